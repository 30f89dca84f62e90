//! Property tests for invariants that hold over arbitrary inputs.

use std::collections::BTreeSet;

use proptest::prelude::*;

use surgctx::context::{downsample, infer_state, FeatureKey, FeatureVector, RuleSet, Thresholds};
use surgctx::geometry::{
    component_distance, extract_contours, intersection_area, point_segment_distance, simplify_polyline,
    ObjectPolygons, Point, Polygon,
};
use surgctx::gesture_fsm::{translate, validate_transcript, GrammarGraph};
use surgctx::metrics::{accuracy, edit_score, edit_score_segments, segment_iou, segments, value_iou};
use surgctx::trial_io::{ContextCode, ContextFrame, Mask, ObjectClass, Task};

fn point() -> impl Strategy<Value = Point> {
    (0.0..100.0f64, 0.0..100.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn polyline_distance(p: Point, line: &[Point]) -> f64 {
    line.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Row intervals where each row overlaps the previous one: a 4-connected
/// region without holes.
fn staircase() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (0usize..5, prop::collection::vec((0usize..20, 1usize..10), 1..15)).prop_map(|(top, rows)| {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, w) in rows {
            let (mut a, mut b) = (a, (a + w).min(29));
            if let Some(&(pa, pb)) = out.last() {
                // Force overlap with the row above.
                if b <= pa {
                    b = pa + 1;
                }
                if a >= pb {
                    a = pb - 1;
                }
            }
            out.push((a, b.max(a + 1)));
        }
        (top, out)
    })
}

fn rect_strategy() -> impl Strategy<Value = Polygon> {
    (0.0..60.0f64, 0.0..60.0f64, 1.0..30.0f64, 1.0..30.0f64).prop_map(|(x, y, w, h)| Polygon::rect(x, y, x + w, y + h))
}

fn suturing_codes() -> Vec<ContextCode> {
    let g = GrammarGraph::builtin(Task::Suturing);
    let mut codes: BTreeSet<ContextCode> = g.transitions.iter().flat_map(|t| t.contexts.iter().copied()).collect();
    codes.insert("00000".parse().unwrap());
    codes.insert("33330".parse().unwrap());
    codes.into_iter().collect()
}

proptest! {
    #[test]
    fn simplification_stays_within_epsilon(
        pts in prop::collection::vec(point(), 2..60),
        eps in 0.1..10.0f64,
    ) {
        let out = simplify_polyline(&pts, eps);
        prop_assert_eq!(out.first(), pts.first());
        prop_assert_eq!(out.last(), pts.last());
        prop_assert!(out.iter().all(|p| pts.contains(p)));
        for p in &pts {
            prop_assert!(polyline_distance(*p, &out) <= eps + 1e-9);
        }
    }

    #[test]
    fn contour_area_equals_pixel_count((top, rows) in staircase()) {
        let mut mask = Mask::empty(32, 24, ObjectClass::Needle, 0);
        for (i, &(a, b)) in rows.iter().enumerate() {
            for x in a..b {
                mask.set(x, top + i, true);
            }
        }
        let contours = extract_contours(&mask);
        prop_assert_eq!(contours.len(), 1);
        prop_assert_eq!(contours[0].area(), mask.count_ones() as f64);
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_overlap(a in rect_strategy(), b in rect_strategy()) {
        let ab = component_distance(&a, &b);
        let ba = component_distance(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!(ab >= 0.0);
        let pa = ObjectPolygons::new(ObjectClass::Needle, vec![a]);
        let pb = ObjectPolygons::new(ObjectClass::Thread, vec![b]);
        let inter = intersection_area(&pa, &pb);
        prop_assert_eq!(inter, intersection_area(&pb, &pa));
        if inter > 0.0 {
            prop_assert_eq!(ab, 0.0);
        }
    }

    #[test]
    fn hold_and_contact_are_exclusive(
        d in prop::array::uniform3(prop_oneof![Just(f64::INFINITY), 0.0..3.0f64]),
        i in prop::array::uniform3(prop_oneof![Just(0.0), 0.0..50.0f64]),
        nx in 0.0..300.0f64,
        lo in any::<bool>(),
        ro in any::<bool>(),
    ) {
        use ObjectClass::*;
        let mut v = FeatureVector::default()
            .with(FeatureKey::Distance(LeftGrasper, Needle), d[0])
            .with(FeatureKey::Distance(RightGrasper, Needle), d[1])
            .with(FeatureKey::Distance(RightGrasper, Thread), d[2])
            .with(FeatureKey::Intersection(LeftGrasper, Thread), i[0])
            .with(FeatureKey::Intersection(RightGrasper, Thread), i[1])
            .with(FeatureKey::Intersection(TissuePoints, Needle), i[2])
            .with(FeatureKey::MidX(Needle), nx)
            .with(FeatureKey::MidX(TissuePoints), 150.0);
        v.alpha_left = lo;
        v.alpha_right = ro;
        let s = infer_state(&v, &RuleSet::builtin(Task::Suturing), &Thresholds::default()).values;
        prop_assert!(s[0] == 0 || s[1] == 0);
        prop_assert!(s[2] == 0 || s[3] == 0);
        prop_assert!(s[4] <= 2);
    }

    #[test]
    fn constant_series_downsample_to_constant(
        v in prop::array::uniform5(prop_oneof![Just(0u8), Just(2), Just(3)]),
        n in 1usize..200,
        window in 1usize..15,
        stride in 1usize..15,
    ) {
        let frames: Vec<ContextFrame> = (0..n).map(|i| ContextFrame::new(i, v)).collect();
        let out = downsample(&frames, window, stride);
        prop_assert_eq!(out.len(), n.div_ceil(stride));
        prop_assert!(out.iter().enumerate().all(|(k, f)| f.values == v && f.sample_index == k));
    }

    #[test]
    fn translation_is_deterministic_and_respects_durations(picks in prop::collection::vec(0usize..1000, 0..120)) {
        let g = GrammarGraph::builtin(Task::Suturing);
        let codes = suturing_codes();
        let frames: Vec<ContextFrame> = picks
            .iter()
            .enumerate()
            .map(|(i, p)| ContextFrame::new(i, codes[p % codes.len()].0))
            .collect();
        let rate = 3.0;
        let (t1, trace1) = translate(&frames, &g, rate).unwrap();
        let (t2, trace2) = translate(&frames, &g, rate).unwrap();
        prop_assert_eq!(&t1, &t2);
        prop_assert_eq!(&trace1, &trace2);
        prop_assert_eq!(trace1.len(), frames.len());
        let expected = if frames.is_empty() { 0 } else { frames.len() + 1 };
        prop_assert_eq!(t1.segments.iter().map(|s| s.len()).sum::<usize>(), expected);
        prop_assert!(validate_transcript(&t1, &g).is_empty());
        // The first run may include back-filled samples from before the first transition.
        for s in t1.segments.iter().skip(1) {
            if let Some(d) = g.durations.get(&s.gesture) {
                prop_assert!(s.len() as f64 / rate <= d.max_seconds + 1e-9, "{} lasted {} samples", s.gesture, s.len());
            }
        }
    }

    #[test]
    fn metrics_are_perfect_on_identical_series(x in prop::collection::vec(0u8..6, 0..80)) {
        prop_assert_eq!(accuracy(&x, &x), 100.0);
        prop_assert_eq!(edit_score(&x, &x), 100.0);
        prop_assert_eq!(value_iou(&x, &x), 1.0);
        let s = segments(&x);
        prop_assert_eq!(segment_iou(&s, &s).mean, 1.0);
    }

    #[test]
    fn metrics_are_invariant_under_relabelling(
        gt in prop::collection::vec(0u8..6, 1..80),
        pred in prop::collection::vec(0u8..6, 1..80),
        shift in 1u8..6,
    ) {
        let pred = &pred[..pred.len().min(gt.len())];
        let gt = &gt[..pred.len()];
        let relabel = |s: &[u8]| -> Vec<u8> { s.iter().map(|&v| (v + shift) % 6).collect() };
        let (rg, rp) = (relabel(gt), relabel(pred));
        prop_assert_eq!(accuracy(gt, pred), accuracy(&rg, &rp));
        prop_assert_eq!(edit_score(gt, pred), edit_score(&rg, &rp));
        prop_assert!((value_iou(gt, pred) - value_iou(&rg, &rp)).abs() < 1e-12);
        let a = segment_iou(&segments(gt), &segments(pred)).mean;
        let b = segment_iou(&segments(&rg), &segments(&rp)).mean;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn edit_score_is_symmetric_and_bounded(
        a in prop::collection::vec(0u8..5, 0..30),
        b in prop::collection::vec(0u8..5, 0..30),
    ) {
        let ab = edit_score_segments(&a, &b);
        prop_assert_eq!(ab, edit_score_segments(&b, &a));
        prop_assert!((0.0..=100.0).contains(&ab));
    }

    #[test]
    fn context_code_round_trips(v in prop::array::uniform5(0u8..4)) {
        let c = ContextCode(v);
        prop_assert_eq!(c.to_string().parse::<ContextCode>().unwrap(), c);
    }
}
