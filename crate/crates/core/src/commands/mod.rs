//! Batch operations behind the command-line front end.
//!
//! Each command processes trials independently on a bounded worker pool,
//! writes outputs atomically and reports per-trial failures without
//! aborting the batch.

pub mod timeline;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::context::{infer_trial_context, RuleSet, Thresholds};
use crate::error::{Error, Result};
use crate::gesture_fsm::{translate, validate_transcript, GrammarGraph};
use crate::metrics::{gesture_scores, state_variable_report, GestureScores, StateVariableScores, Table};
use crate::synth::{synth_trials, SynthOptions, SynthTrial, CONTEXT_GT_FILE, GESTURES_GT_FILE};
use crate::trial_io::{
    format_context_transcript, format_gesture_transcript, load_manifest, read_context_transcript,
    read_gesture_transcript, write_atomic, ContextSchema, Task, TrialManifest,
};

pub const CONTEXT_SUFFIX: &str = ".context.csv";
pub const GESTURES_SUFFIX: &str = ".gestures.txt";
pub const TRACE_SUFFIX: &str = ".trace.csv";

/// Optional replacements for the default thresholds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ThresholdOverrides {
    pub near_px: Option<f64>,
    pub overlap_px2: Option<f64>,
    pub jaw_closed_px: Option<f64>,
    pub min_area_px2: Option<f64>,
    pub mode_window: Option<usize>,
    pub rdp_epsilon_px: Option<f64>,
    pub tissue_radius_px: Option<f64>,
}

impl ThresholdOverrides {
    pub fn apply(&self, mut t: Thresholds) -> Result<Thresholds> {
        macro_rules! set {
            ($($f:ident),*) => {$( if let Some(v) = self.$f { t.$f = v; } )*};
        }
        set!(near_px, overlap_px2, jaw_closed_px, min_area_px2, mode_window, rdp_epsilon_px, tissue_radius_px);
        let finite = [t.near_px, t.overlap_px2, t.jaw_closed_px, t.min_area_px2, t.rdp_epsilon_px, t.tissue_radius_px];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) || t.mode_window == 0 {
            return Err(Error::Validation(format!("invalid thresholds {t:?}")));
        }
        Ok(t)
    }
}

/// Outputs written and trials that failed.
#[derive(Debug, Default)]
pub struct BatchReport {
    pub outputs: Vec<PathBuf>,
    pub failures: Vec<(String, Error)>,
}

impl BatchReport {
    fn collect(results: Vec<(String, Result<Vec<PathBuf>>)>) -> Self {
        let mut r = BatchReport::default();
        for (name, res) in results {
            match res {
                Ok(paths) => r.outputs.extend(paths),
                Err(e) => {
                    log::error!("trial={name} error=\"{e}\"");
                    r.failures.push((name, e));
                }
            }
        }
        r
    }

    /// The first failure, if any trial failed.
    pub fn into_result(self) -> Result<Vec<PathBuf>> {
        match self.failures.into_iter().next() {
            Some((_, e)) => Err(e),
            None => Ok(self.outputs),
        }
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Validation("--jobs must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Expands directories to the `manifest.toml` files beneath them.
pub fn find_manifests(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            walk(p, &mut out, &|f| f.file_name().is_some_and(|n| n == "manifest.toml"))?;
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>, keep: &dyn Fn(&Path) -> bool) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(&p, out, keep)?;
        } else if keep(&p) {
            out.push(p);
        }
    }
    Ok(())
}

fn log_stage(trial: &str, stage: &str, started: Instant, extra: &str) {
    log::info!(
        "trial={trial} stage={stage} duration_ms={} {extra}",
        started.elapsed().as_millis()
    );
}

#[derive(Clone, Debug, Default)]
pub struct InferArgs {
    pub manifests: Vec<PathBuf>,
    /// Rule file; the task's built-in rules when absent.
    pub rules: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub overrides: ThresholdOverrides,
}

/// Writes `<out>/<trial_id>.context.csv` for every manifest.
pub fn cmd_infer_context(args: &InferArgs) -> Result<BatchReport> {
    let rules = args.rules.as_ref().map(RuleSet::load).transpose()?;
    args.overrides.apply(Thresholds::default())?;
    let manifests = find_manifests(&args.manifests)?;
    create_dir(&args.out)?;
    let pool = pool(args.jobs)?;
    let results = pool.install(|| {
        manifests
            .par_iter()
            .map(|path| {
                let name = path.display().to_string();
                let res = (|| {
                    let m = load_manifest(path)?;
                    infer_one(&m, rules.as_ref(), args)
                })();
                (name, res)
            })
            .collect()
    });
    Ok(BatchReport::collect(results))
}

fn infer_one(m: &TrialManifest, rules: Option<&RuleSet>, args: &InferArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let builtin;
    let rules = match rules {
        Some(r) => r,
        None => {
            builtin = RuleSet::builtin(m.task());
            &builtin
        }
    };
    let thresholds = args.overrides.apply(Thresholds::default().with_manifest(m))?;
    let transcript = infer_trial_context(m, rules, &thresholds)?;
    let path = args.out.join(format!("{}{CONTEXT_SUFFIX}", m.trial_id()));
    write_atomic(&path, format_context_transcript(&transcript.frames).as_bytes())?;
    log_stage(
        m.trial_id(),
        "infer-context",
        started,
        &format!("frames={} samples={}", m.frame_count(), transcript.len()),
    );
    Ok(vec![path])
}

#[derive(Clone, Debug)]
pub struct TranslateArgs {
    /// Context CSV files, or directories searched for `*.context.csv`.
    pub inputs: Vec<PathBuf>,
    /// Grammar file; the task's built-in grammar when absent.
    pub grammar: Option<PathBuf>,
    pub task: Task,
    pub rate_hz: f64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

fn trial_stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(CONTEXT_SUFFIX)
        .or_else(|| name.strip_suffix(".csv"))
        .unwrap_or(&name)
        .to_string()
}

/// Writes `<stem>.gestures.txt` and `<stem>.trace.csv` for every context file.
pub fn cmd_translate(args: &TranslateArgs) -> Result<BatchReport> {
    let grammar = match &args.grammar {
        Some(p) => GrammarGraph::load(p)?,
        None => GrammarGraph::builtin(args.task),
    };
    let mut inputs = Vec::new();
    for p in &args.inputs {
        if p.is_dir() {
            walk(p, &mut inputs, &|f| f.to_string_lossy().ends_with(CONTEXT_SUFFIX))?;
        } else {
            inputs.push(p.clone());
        }
    }
    create_dir(&args.out)?;
    let schema = ContextSchema::new(grammar.task);
    let results = pool(args.jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|path| {
                let stem = trial_stem(path);
                let res = (|| {
                    let started = Instant::now();
                    let frames = read_context_transcript(path, &schema)?;
                    let (transcript, trace) = translate(&frames, &grammar, args.rate_hz)?;
                    for v in validate_transcript(&transcript, &grammar) {
                        log::warn!("trial={stem} violation=\"{v}\"");
                    }
                    let g = args.out.join(format!("{stem}{GESTURES_SUFFIX}"));
                    let t = args.out.join(format!("{stem}{TRACE_SUFFIX}"));
                    write_atomic(&g, format_gesture_transcript(&transcript).as_bytes())?;
                    write_atomic(&t, trace.to_csv().as_bytes())?;
                    log_stage(
                        &stem,
                        "translate",
                        started,
                        &format!("samples={} segments={}", trace.len(), transcript.segments.len()),
                    );
                    Ok(vec![g, t])
                })();
                (stem, res)
            })
            .collect()
    });
    Ok(BatchReport::collect(results))
}

#[derive(Clone, Debug, Default)]
pub struct EvaluateArgs {
    pub manifests: Vec<PathBuf>,
    /// Directory holding `<trial_id>.context.csv` / `.gestures.txt` predictions.
    pub pred: PathBuf,
    /// Ground-truth directory with `<trial_id>.context.csv` / `.gestures.txt`;
    /// defaults to `context_gt.csv` / `gestures_gt.txt` beside each manifest.
    pub gt: Option<PathBuf>,
    pub out: PathBuf,
}

/// Per-trial scores and the tables written to disk.
#[derive(Debug, Default)]
pub struct EvaluationReport {
    pub context: Vec<(String, StateVariableScores)>,
    pub gestures: Vec<(String, GestureScores)>,
    pub skipped: Vec<String>,
    pub context_table: Table,
    pub gesture_table: Table,
}

fn gt_paths(args: &EvaluateArgs, m: &TrialManifest) -> (PathBuf, PathBuf) {
    match &args.gt {
        Some(dir) => (
            dir.join(format!("{}{CONTEXT_SUFFIX}", m.trial_id())),
            dir.join(format!("{}{GESTURES_SUFFIX}", m.trial_id())),
        ),
        None => (m.dir.join(CONTEXT_GT_FILE), m.dir.join(GESTURES_GT_FILE)),
    }
}

/// Scores predictions against ground truth and writes
/// `context_report.{csv,txt}` and `gesture_report.{csv,txt}`.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvaluationReport> {
    let mut report = EvaluationReport {
        context_table: Table::new(StateVariableScores::headers()),
        gesture_table: Table::new(GestureScores::headers()),
        ..Default::default()
    };
    for path in find_manifests(&args.manifests)? {
        let m = load_manifest(&path)?;
        let id = m.trial_id().to_string();
        let schema = ContextSchema::new(m.task());
        let (gt_ctx, gt_ges) = gt_paths(args, &m);
        let pred_ctx = args.pred.join(format!("{id}{CONTEXT_SUFFIX}"));
        let pred_ges = args.pred.join(format!("{id}{GESTURES_SUFFIX}"));
        let mut used = false;
        if gt_ctx.exists() && pred_ctx.exists() {
            let s = state_variable_report(
                &read_context_transcript(&gt_ctx, &schema)?,
                &read_context_transcript(&pred_ctx, &schema)?,
            );
            report.context_table.push(&id, s.row());
            report.context.push((id.clone(), s));
            used = true;
        }
        if gt_ges.exists() && pred_ges.exists() {
            let gt = read_gesture_transcript(&gt_ges)?.to_native(m.stride());
            let pred = read_gesture_transcript(&pred_ges)?.to_native(m.stride());
            if let (Some(from), Some(to)) = (gt.first_frame(), gt.last_frame()) {
                let s = gesture_scores(&gt.per_frame(from, to), &pred.per_frame(from, to));
                report.gesture_table.push(&id, s.row());
                report.gestures.push((id.clone(), s));
                used = true;
            }
        }
        if !used {
            log::warn!("trial={id} skipped: no ground truth or prediction pair found");
            report.skipped.push(id);
        }
    }
    create_dir(&args.out)?;
    for (name, table) in [("context_report", &report.context_table), ("gesture_report", &report.gesture_table)] {
        write_atomic(&args.out.join(format!("{name}.csv")), table.to_csv().as_bytes())?;
        write_atomic(&args.out.join(format!("{name}.txt")), table.to_text().as_bytes())?;
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct RenderArgs {
    /// Gesture transcripts (`.txt`) or context transcripts (`.csv`).
    pub inputs: Vec<PathBuf>,
    pub task: Task,
    /// Rate of output-basis transcripts and context files.
    pub rate_hz: f64,
    /// Rate of native-basis gesture transcripts.
    pub frame_rate_hz: f64,
    pub out: PathBuf,
}

pub fn cmd_render_timeline(args: &RenderArgs) -> Result<PathBuf> {
    let mut bands = Vec::new();
    let schema = ContextSchema::new(args.task);
    for p in &args.inputs {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if p.extension().is_some_and(|e| e == "csv") {
            let frames = read_context_transcript(p, &schema)?;
            bands.extend(timeline::context_bands(&name, &frames, args.rate_hz));
        } else {
            let t = read_gesture_transcript(p)?;
            let rate = timeline::basis_rate(&t, args.rate_hz, args.frame_rate_hz);
            bands.push(timeline::gesture_band(&name, &t, rate));
        }
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_atomic(&args.out, timeline::render_svg(&bands).as_bytes())?;
    Ok(args.out.clone())
}

#[derive(Clone, Debug)]
pub struct SynthArgs {
    pub task: Task,
    pub seed: u64,
    pub trials: usize,
    pub out: PathBuf,
    pub options: SynthOptions,
}

/// Seeded synthetic trials; equal seeds give byte-identical files.
pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<SynthTrial>> {
    create_dir(&args.out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let started = Instant::now();
    let trials = synth_trials(&args.out, args.task, args.trials, &args.options, &mut rng)?;
    for t in &trials {
        log::info!("trial={} stage=synth samples={}", t.trial_id, t.samples);
    }
    log_stage("*", "synth", started, &format!("trials={}", trials.len()));
    Ok(trials)
}
