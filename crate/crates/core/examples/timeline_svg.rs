// Drawing context and gesture transcripts as an SVG timeline.

use std::error::Error;

use surgctx::commands::timeline::{context_bands, gesture_band, render_svg};
use surgctx::gesture_fsm::{translate, GrammarGraph};
use surgctx::trial_io::{ContextCode, ContextFrame, Task};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let codes = ["00000", "00201", "00201", "00202", "20202", "20000"];
    let frames = codes
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(ContextFrame::new(i, c.parse::<ContextCode>()?.0)))
        .collect::<Result<Vec<_>, Box<dyn Error>>>()?;
    let (gestures, _) = translate(&frames, &GrammarGraph::builtin(Task::Suturing), 3.0)?;

    let mut bands = context_bands("context", &frames, 3.0);
    bands.push(gesture_band("gestures", &gestures, 3.0));
    let svg = render_svg(&bands);
    let out = std::env::temp_dir().join("surgctx_timeline_example.svg");
    std::fs::write(&out, &svg)?;
    println!("wrote {} ({} bytes, {} bands)", out.display(), svg.len(), bands.len());
    assert!(svg.contains("G6"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
