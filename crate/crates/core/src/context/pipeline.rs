use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::context::features::{compute_features, grasper_open, point_markers};
use crate::context::{downsample, infer_state, RuleSet, Thresholds};
use crate::error::{Error, Result};
use crate::geometry::{mask_to_polygons, ObjectPolygons, Point};
use crate::trial_io::{load_mask, read_jaw_ends, read_points, ContextFrame, ContextTranscript, ObjectClass, TrialManifest};

/// Per-frame context at the native rate, one entry per manifest frame.
pub fn infer_frames(manifest: &TrialManifest, rules: &RuleSet, thresholds: &Thresholds) -> Result<Vec<ContextFrame>> {
    if rules.task != manifest.task() {
        return Err(Error::Validation(format!(
            "rule set is for {} but trial {} is {}",
            rules.task,
            manifest.trial_id(),
            manifest.task()
        )));
    }
    let required = rules.required_features();
    let objects = rules.required_objects();
    let jaws = match manifest.jaw_ends_path() {
        Some(p) => Some(read_jaw_ends(p)?),
        None => None,
    };
    let tissue = if objects.contains(&ObjectClass::TissuePoints) {
        let points: Vec<Point> = match manifest.tissue_points_path() {
            Some(p) => read_points(p)?,
            None => Vec::new(),
        };
        Some(point_markers(ObjectClass::TissuePoints, &points, thresholds.tissue_radius_px))
    } else {
        None
    };
    let mask_classes: Vec<ObjectClass> = objects
        .iter()
        .copied()
        .filter(|c| *c != ObjectClass::TissuePoints && manifest.file.masks.contains_key(c))
        .collect();

    let first = manifest.file.first_frame;
    let frames: Vec<usize> = manifest.frames().collect();
    frames
        .par_iter()
        .map(|&frame| {
            let mut polys: BTreeMap<ObjectClass, ObjectPolygons> = BTreeMap::new();
            for &class in &mask_classes {
                let path = manifest.mask_path(class, frame).expect("class has a mask pattern");
                let mask = load_mask(&path, class, frame)?;
                polys.insert(
                    class,
                    mask_to_polygons(&mask, thresholds.rdp_epsilon_px, thresholds.min_area_px2),
                );
            }
            if let Some(ts) = &tissue {
                polys.insert(ObjectClass::TissuePoints, ts.clone());
            }
            let (alpha_left, alpha_right) = match jaws.as_ref().and_then(|j| j.at(frame)) {
                Some(j) => (
                    grasper_open(j.left, thresholds.jaw_closed_px),
                    grasper_open(j.right, thresholds.jaw_closed_px),
                ),
                None => (true, true),
            };
            let v = compute_features(frame, &polys, alpha_left, alpha_right, &required);
            let mut state = infer_state(&v, rules, thresholds);
            state.sample_index = frame - first;
            Ok(state)
        })
        .collect()
}

/// Masks and annotations of one trial to a context transcript at the
/// manifest's output rate.
pub fn infer_trial_context(
    manifest: &TrialManifest,
    rules: &RuleSet,
    thresholds: &Thresholds,
) -> Result<ContextTranscript> {
    let native = infer_frames(manifest, rules, thresholds)?;
    Ok(ContextTranscript {
        rate_hz: manifest.file.output_rate_hz,
        frames: downsample(&native, thresholds.mode_window, manifest.stride()),
    })
}
