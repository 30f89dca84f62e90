// Translating a context series into gestures with the built-in grammar.

use std::error::Error;

use surgctx::gesture_fsm::{translate, GrammarGraph};
use surgctx::trial_io::{format_gesture_transcript, ContextCode, ContextFrame, Task};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grammar = GrammarGraph::builtin(Task::Suturing);
    let codes = [
        "00000", "00000", "00201", "00201", "00202", "00202", "20202", "20202", "20000", "20020",
    ];
    let frames = codes
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(ContextFrame::new(i, c.parse::<ContextCode>()?.0)))
        .collect::<Result<Vec<_>, Box<dyn Error>>>()?;

    let (transcript, trace) = translate(&frames, &grammar, 3.0)?;
    print!("{}", trace.to_csv());
    print!("{}", format_gesture_transcript(&transcript));
    let labels: Vec<String> = transcript.labels().iter().map(|g| g.to_string()).collect();
    assert_eq!(labels, ["G1", "G2", "G3", "G6", "G4", "G11"]);

    // Custom grammars use the same text format as the built-in ones.
    let again = GrammarGraph::parse(&grammar.to_text(), "round trip")?;
    assert_eq!(again.transitions.len(), grammar.transitions.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
