use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use surgctx::commands::{
    cmd_evaluate, cmd_infer_context, cmd_render_timeline, cmd_synth, cmd_translate, BatchReport, EvaluateArgs,
    InferArgs, RenderArgs, SynthArgs, ThresholdOverrides, TranslateArgs,
};
use surgctx::synth::SynthOptions;
use surgctx::trial_io::Task;
use surgctx::ErrorKind;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

/// Surgical context inference and context-to-gesture translation.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer context transcripts from trial masks and annotations.
    InferContext {
        /// Trial manifests, or directories searched for manifest.toml.
        #[arg(long = "manifest", required = true, num_args = 1..)]
        manifests: Vec<PathBuf>,
        /// Rule-set file (default: built-in rules for each trial's task).
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        thresholds: ThresholdFlags,
    },
    /// Translate context transcripts into gesture transcripts.
    Translate {
        /// Context CSV files, or directories searched for *.context.csv.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Grammar file (default: built-in grammar for --task).
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long, default_value = "Suturing")]
        task: Task,
        /// Sample rate of the context transcripts.
        #[arg(long = "rate", default_value_t = 3.0)]
        rate_hz: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score predicted context and gestures against ground truth.
    Evaluate {
        #[arg(long = "manifest", required = true, num_args = 1..)]
        manifests: Vec<PathBuf>,
        /// Directory with <trial_id>.context.csv and <trial_id>.gestures.txt.
        #[arg(long)]
        pred: PathBuf,
        /// Ground-truth directory (default: files beside each manifest).
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw transcripts as an SVG timeline.
    RenderTimeline {
        /// Gesture transcripts (.txt) or context transcripts (.csv).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "Suturing")]
        task: Task,
        #[arg(long = "rate", default_value_t = 3.0)]
        rate_hz: f64,
        #[arg(long = "frame-rate", default_value_t = 30.0)]
        frame_rate_hz: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic trials with ground truth.
    Synth {
        #[arg(long, default_value = "Suturing")]
        task: Task,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Gestures per trial.
        #[arg(long, default_value_t = 8)]
        gestures: usize,
        #[arg(long, default_value_t = 640)]
        width: usize,
        #[arg(long, default_value_t = 480)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ThresholdFlags {
    #[arg(long)]
    near_px: Option<f64>,
    #[arg(long)]
    overlap_px2: Option<f64>,
    #[arg(long)]
    jaw_closed_px: Option<f64>,
    #[arg(long)]
    min_area_px2: Option<f64>,
    #[arg(long)]
    mode_window: Option<usize>,
    #[arg(long)]
    rdp_epsilon_px: Option<f64>,
    #[arg(long)]
    tissue_radius_px: Option<f64>,
}

impl From<ThresholdFlags> for ThresholdOverrides {
    fn from(f: ThresholdFlags) -> Self {
        ThresholdOverrides {
            near_px: f.near_px,
            overlap_px2: f.overlap_px2,
            jaw_closed_px: f.jaw_closed_px,
            min_area_px2: f.min_area_px2,
            mode_window: f.mode_window,
            rdp_epsilon_px: f.rdp_epsilon_px,
            tissue_radius_px: f.tissue_radius_px,
        }
    }
}

fn finish(report: BatchReport, what: &str) -> Result<()> {
    let failed = report.failures.len();
    for p in &report.outputs {
        println!("{}", p.display());
    }
    if let Some((name, e)) = report.failures.into_iter().next() {
        return Err(anyhow::Error::new(e).context(format!("{failed} trial(s) failed to {what}; first: {name}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::InferContext {
            manifests,
            rules,
            out,
            jobs,
            thresholds,
        } => finish(
            cmd_infer_context(&InferArgs {
                manifests,
                rules,
                out,
                jobs,
                overrides: thresholds.into(),
            })?,
            "infer context",
        ),
        Command::Translate {
            inputs,
            grammar,
            task,
            rate_hz,
            out,
            jobs,
        } => finish(
            cmd_translate(&TranslateArgs {
                inputs,
                grammar,
                task,
                rate_hz,
                out,
                jobs,
            })?,
            "translate",
        ),
        Command::Evaluate {
            manifests,
            pred,
            gt,
            out,
        } => {
            let r = cmd_evaluate(&EvaluateArgs {
                manifests,
                pred,
                gt,
                out,
            })?;
            if !r.context_table.rows.is_empty() {
                println!("Context state-variable IOU\n{}", r.context_table.to_text());
            }
            if !r.gesture_table.rows.is_empty() {
                println!("Gesture translation\n{}", r.gesture_table.to_text());
            }
            if r.context.is_empty() && r.gestures.is_empty() {
                bail!("no trial had both ground truth and predictions");
            }
            Ok(())
        }
        Command::RenderTimeline {
            inputs,
            task,
            rate_hz,
            frame_rate_hz,
            out,
        } => {
            let p = cmd_render_timeline(&RenderArgs {
                inputs,
                task,
                rate_hz,
                frame_rate_hz,
                out,
            })?;
            println!("{}", p.display());
            Ok(())
        }
        Command::Synth {
            task,
            seed,
            trials,
            gestures,
            width,
            height,
            out,
        } => {
            let options = SynthOptions {
                width,
                height,
                gestures,
                ..SynthOptions::default()
            };
            let made = cmd_synth(&SynthArgs {
                task,
                seed,
                trials,
                out,
                options,
            })
            .context("synthesising trials")?;
            for t in made {
                println!("{}", t.manifest.display());
            }
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<surgctx::Error>()).map(surgctx::Error::kind) {
        Some(ErrorKind::Config) => EXIT_CONFIG,
        Some(ErrorKind::Data) => EXIT_DATA,
        Some(ErrorKind::Validation) => EXIT_VALIDATION,
        None => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
