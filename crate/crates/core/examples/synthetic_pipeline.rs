// Generating a synthetic trial and recovering its context and gestures.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use surgctx::context::{infer_trial_context, RuleSet, Thresholds};
use surgctx::gesture_fsm::{translate, GrammarGraph};
use surgctx::metrics::{edit_score, state_variable_report};
use surgctx::synth::{synth_trials, SynthOptions};
use surgctx::trial_io::{load_manifest, read_context_transcript, read_gesture_transcript, ContextSchema, Task};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let options = SynthOptions {
        width: 320,
        height: 240,
        gestures: 6,
        ..SynthOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trial = synth_trials(dir.path(), Task::Suturing, 1, &options, &mut rng)?.remove(0);

    let manifest = load_manifest(&trial.manifest)?;
    let thresholds = Thresholds::default().with_manifest(&manifest);
    let context = infer_trial_context(&manifest, &RuleSet::builtin(Task::Suturing), &thresholds)?;
    let truth = read_context_transcript(&trial.context_gt, &ContextSchema::new(Task::Suturing))?;
    let report = state_variable_report(&truth, &context.frames);
    println!("{}: {} samples, context IOU {:.3}", trial.trial_id, context.len(), report.average);

    let (gestures, _) = translate(&context.frames, &GrammarGraph::builtin(Task::Suturing), context.rate_hz)?;
    let expected = read_gesture_transcript(&trial.gestures_gt)?;
    let edit = edit_score(&expected.labels(), &gestures.labels());
    println!("gesture edit score {edit:.1}");
    assert_eq!(report.average, 1.0);
    assert_eq!(edit, 100.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
