// Scoring predicted labels against ground truth.

use std::error::Error;

use surgctx::metrics::{gesture_scores, segment_iou, segments, value_iou, Table};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let gt = [1, 1, 1, 2, 2, 2, 2, 3, 3, 3];
    let pred = [1, 1, 2, 2, 2, 2, 2, 2, 3, 3];

    let scores = gesture_scores(&gt, &pred);
    let iou = segment_iou(&segments(&gt), &segments(&pred));
    println!("per-class segment IOU {:?}", iou.per_class);
    println!("per-value IOU {:.3}", value_iou(&gt, &pred));

    let mut table = Table::new(["Accuracy (%)", "Edit Score", "IOU"].map(String::from).to_vec());
    table.push("example", scores.row());
    print!("{}", table.to_text());

    assert_eq!(scores.accuracy, 80.0);
    assert_eq!(scores.edit_score, 100.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
