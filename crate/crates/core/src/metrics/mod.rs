//! Accuracy, segmental edit score and segment-matched IOU.
//!
//! All functions are generic over the label type so they apply equally to
//! gesture labels and to single context state variables.

mod report;

pub use report::{gesture_scores, state_variable_report, GestureScores, StateVariableScores, Table};

use std::collections::BTreeMap;

/// Half-open run `[start, end)` of one label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment<T> {
    pub start: usize,
    pub end: usize,
    pub label: T,
}

impl<T> Segment<T> {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    fn overlap<U>(&self, other: &Segment<U>) -> usize {
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }
}

/// Maximal runs of equal labels.
pub fn segments<T: Copy + PartialEq>(labels: &[T]) -> Vec<Segment<T>> {
    let mut out: Vec<Segment<T>> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        match out.last_mut() {
            Some(s) if s.label == l => s.end = i + 1,
            _ => out.push(Segment {
                start: i,
                end: i + 1,
                label: l,
            }),
        }
    }
    out
}

/// Both series cut to their common length; logs a warning when they differ.
pub fn align<'a, T>(gt: &'a [T], pred: &'a [T]) -> (&'a [T], &'a [T]) {
    if gt.len() != pred.len() {
        log::warn!(
            "length mismatch: ground truth {} vs prediction {} samples; truncating to {}",
            gt.len(),
            pred.len(),
            gt.len().min(pred.len())
        );
    }
    let n = gt.len().min(pred.len());
    (&gt[..n], &pred[..n])
}

/// Percentage of samples with equal labels, over the common length.
/// Two empty series score 100.
pub fn accuracy<T: PartialEq>(gt: &[T], pred: &[T]) -> f64 {
    let (gt, pred) = align(gt, pred);
    if gt.is_empty() {
        return 100.0;
    }
    let hits = gt.iter().zip(pred).filter(|(a, b)| a == b).count();
    100.0 * hits as f64 / gt.len() as f64
}

/// Levenshtein distance with unit insert, delete and substitute costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit score of two label sequences that are already segment-level.
pub fn edit_score_segments<T: PartialEq>(gt: &[T], pred: &[T]) -> f64 {
    let longest = gt.len().max(pred.len());
    if longest == 0 {
        return 100.0;
    }
    (1.0 - levenshtein(gt, pred) as f64 / longest as f64) * 100.0
}

/// Segmental edit score of two per-sample series, in `[0, 100]`.
pub fn edit_score<T: Copy + PartialEq>(gt: &[T], pred: &[T]) -> f64 {
    let g: Vec<T> = segments(gt).iter().map(|s| s.label).collect();
    let p: Vec<T> = segments(pred).iter().map(|s| s.label).collect();
    edit_score_segments(&g, &p)
}

/// Per-class and overall IOU of predicted against ground-truth segments.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentIou<T> {
    pub per_class: BTreeMap<T, f64>,
    /// Mean of `per_class`; 1 when neither side has segments.
    pub mean: f64,
}

/// Matches each predicted segment, in temporal order, to the still
/// unmatched ground-truth segment of the same label with the largest
/// overlap, and scores the pair by overlap over union. Unmatched predictions
/// score 0. A class averages over its predicted segments; a class that only
/// occurs in the ground truth scores 0.
///
/// The matching is directional: predictions are matched onto the ground truth.
pub fn segment_iou<T: Copy + Ord>(gt: &[Segment<T>], pred: &[Segment<T>]) -> SegmentIou<T> {
    let mut used = vec![false; gt.len()];
    let mut sums: BTreeMap<T, (f64, usize)> = BTreeMap::new();
    let mut order: Vec<&Segment<T>> = pred.iter().collect();
    order.sort_by_key(|s| (s.start, s.end));
    for p in order {
        let best = gt
            .iter()
            .enumerate()
            .filter(|(i, g)| !used[*i] && g.label == p.label)
            .map(|(i, g)| (p.overlap(g), i))
            .filter(|(o, _)| *o > 0)
            .max_by_key(|&(o, i)| (o, std::cmp::Reverse(i)));
        let iou = match best {
            Some((o, i)) => {
                used[i] = true;
                let union = p.len() + gt[i].len() - o;
                o as f64 / union as f64
            }
            None => 0.0,
        };
        let e = sums.entry(p.label).or_insert((0.0, 0));
        e.0 += iou;
        e.1 += 1;
    }
    for g in gt {
        sums.entry(g.label).or_insert((0.0, 0));
    }
    let per_class: BTreeMap<T, f64> = sums
        .into_iter()
        .map(|(k, (sum, n))| (k, if n == 0 { 0.0 } else { sum / n as f64 }))
        .collect();
    let mean = if per_class.is_empty() {
        1.0
    } else {
        per_class.values().sum::<f64>() / per_class.len() as f64
    };
    SegmentIou { per_class, mean }
}

/// `TP / (TP + FP + FN)` for each value appearing in either series, by
/// sample counts, averaged over those values. Two empty series score 1.
pub fn value_iou<T: Copy + Ord>(gt: &[T], pred: &[T]) -> f64 {
    let (gt, pred) = align(gt, pred);
    let mut counts: BTreeMap<T, (usize, usize)> = BTreeMap::new();
    for (&g, &p) in gt.iter().zip(pred) {
        if g == p {
            counts.entry(g).or_default().0 += 1;
        } else {
            counts.entry(g).or_default().1 += 1;
            counts.entry(p).or_default().1 += 1;
        }
    }
    if counts.is_empty() {
        return 1.0;
    }
    counts
        .values()
        .map(|&(tp, wrong)| tp as f64 / (tp + wrong) as f64)
        .sum::<f64>()
        / counts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(start: usize, end: usize, label: u8) -> Segment<u8> {
        Segment { start, end, label }
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 3, 4]), 100.0);
        assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 0, 0]), 50.0);
        assert_eq!(accuracy(&[1, 1], &[2, 2]), 0.0);
        assert_eq!(accuracy(&[1, 1, 2], &[1, 1]), 100.0);
    }

    #[test]
    fn edit_examples() {
        assert_eq!(edit_score_segments(&[1, 2, 3], &[1, 2, 3]), 100.0);
        assert!((edit_score_segments(&[1, 2, 3], &[1, 3]) - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(edit_score_segments(&[1, 2, 3, 4], &[5, 6, 7, 8]), 0.0);
        assert_eq!(edit_score::<u8>(&[], &[]), 100.0);
        // Run lengths do not matter.
        assert_eq!(edit_score(&[1, 1, 1, 2], &[1, 2, 2, 2]), 100.0);
    }

    #[test]
    fn iou_examples() {
        let r = segment_iou(&[seg(5, 15, 1)], &[seg(0, 10, 1)]);
        assert!((r.mean - 1.0 / 3.0).abs() < 1e-12);
        let same = [seg(0, 4, 1), seg(4, 9, 2), seg(9, 10, 1)];
        assert_eq!(segment_iou(&same, &same).mean, 1.0);
        let r = segment_iou(&[seg(0, 10, 1)], &[seg(0, 10, 2)]);
        assert_eq!(r.per_class[&1], 0.0);
        assert_eq!(r.per_class[&2], 0.0);
    }

    #[test]
    fn each_ground_truth_segment_matches_once() {
        let r = segment_iou(&[seg(0, 10, 1)], &[seg(0, 5, 1), seg(5, 10, 1)]);
        assert!((r.per_class[&1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn value_iou_examples() {
        assert_eq!(value_iou(&[0, 2, 2], &[0, 2, 2]), 1.0);
        assert_eq!(value_iou(&[2, 2, 2], &[0, 0, 0]), 0.0);
        // value 0: tp 1, fp 1 -> 0.5; value 2: tp 1, fn 1 -> 0.5
        assert_eq!(value_iou(&[0, 2, 2], &[0, 0, 2]), 0.5);
    }
}
