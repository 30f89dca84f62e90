use std::fmt::Write as _;

use crate::metrics::{accuracy, edit_score, segment_iou, segments, value_iou};
use crate::trial_io::{ContextFrame, StateVariable};

/// Per-variable IOU of one trial's context against ground truth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVariableScores {
    pub per_variable: [f64; 5],
    pub average: f64,
}

pub fn state_variable_report(gt: &[ContextFrame], pred: &[ContextFrame]) -> StateVariableScores {
    let mut per_variable = [0.0; 5];
    for var in StateVariable::ALL {
        let g: Vec<u8> = gt.iter().map(|f| f.get(var)).collect();
        let p: Vec<u8> = pred.iter().map(|f| f.get(var)).collect();
        per_variable[var.index()] = value_iou(&g, &p);
    }
    StateVariableScores {
        per_variable,
        average: per_variable.iter().sum::<f64>() / 5.0,
    }
}

impl StateVariableScores {
    pub fn headers() -> Vec<String> {
        let mut h: Vec<String> = StateVariable::ALL.iter().map(|v| v.title().to_string()).collect();
        h.push("Avg.".into());
        h
    }

    pub fn row(&self) -> Vec<f64> {
        let mut r = self.per_variable.to_vec();
        r.push(self.average);
        r
    }
}

/// Gesture-level scores of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GestureScores {
    /// Percent.
    pub accuracy: f64,
    /// 0 to 100.
    pub edit_score: f64,
    /// 0 to 1.
    pub iou: f64,
}

pub fn gesture_scores<T: Copy + Ord>(gt: &[T], pred: &[T]) -> GestureScores {
    let n = gt.len().min(pred.len());
    GestureScores {
        accuracy: accuracy(gt, pred),
        edit_score: edit_score(&gt[..n], &pred[..n]),
        iou: segment_iou(&segments(&gt[..n]), &segments(&pred[..n])).mean,
    }
}

impl GestureScores {
    pub fn headers() -> Vec<String> {
        vec!["Accuracy (%)".into(), "Edit Score".into(), "IOU".into()]
    }

    pub fn row(&self) -> Vec<f64> {
        vec![self.accuracy, self.edit_score, self.iou]
    }
}

/// Named rows of numbers with a mean row appended on output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Table {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.headers.len());
        self.rows.push((name.into(), values));
    }

    /// Column means, `None` when the table is empty.
    pub fn mean(&self) -> Option<Vec<f64>> {
        if self.rows.is_empty() {
            return None;
        }
        let n = self.rows.len() as f64;
        Some(
            (0..self.headers.len())
                .map(|c| self.rows.iter().map(|r| r.1[c]).sum::<f64>() / n)
                .collect(),
        )
    }

    fn all_rows(&self) -> Vec<(String, Vec<f64>)> {
        let mut rows = self.rows.clone();
        if let Some(m) = self.mean() {
            rows.push(("mean".into(), m));
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["trial".to_string()];
        head.extend(self.headers.iter().cloned());
        w.write_record(&head).expect("in-memory write");
        for (name, vals) in self.all_rows() {
            let mut rec = vec![name];
            rec.extend(vals.iter().map(|v| format!("{v:.4}")));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Fixed-width text rendering.
    pub fn to_text(&self) -> String {
        let rows = self.all_rows();
        let name_w = rows.iter().map(|r| r.0.len()).chain([5]).max().unwrap_or(5);
        let widths: Vec<usize> = self.headers.iter().map(|h| h.len().max(8)).collect();
        let mut s = format!("{:<name_w$}", "trial");
        for (h, w) in self.headers.iter().zip(&widths) {
            let _ = write!(s, "  {h:>w$}");
        }
        s.push('\n');
        for (name, vals) in rows {
            let _ = write!(s, "{name:<name_w$}");
            for (v, w) in vals.iter().zip(&widths) {
                let _ = write!(s, "  {:>w$}", format!("{v:.2}"));
            }
            s.push('\n');
        }
        s
    }
}
