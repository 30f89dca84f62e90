// Reducing a 30 Hz per-frame context series to 3 Hz by windowed mode.

use std::error::Error;

use surgctx::context::downsample;
use surgctx::trial_io::{format_context_transcript, ContextFrame};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // 25 frames: a grasp that flickers open for two frames.
    let frames: Vec<ContextFrame> = (0..25)
        .map(|i| {
            let hold = if i < 8 || i == 12 || i == 13 { 0 } else { 2 };
            ContextFrame::new(i, [hold, 0, 0, 0, 0])
        })
        .collect();
    let out = downsample(&frames, 10, 10);
    print!("{}", format_context_transcript(&out));
    assert_eq!(out.len(), 3);
    assert_eq!(out.iter().map(|f| f.values[0]).collect::<Vec<_>>(), [0, 2, 2]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
