//! Per-trial manifest (TOML).
//!
//! ```toml
//! trial_id = "Suturing_S02_T01"
//! task = "Suturing"
//! frame_rate_hz = 30
//! output_rate_hz = 3          # optional, default 3
//! frame_count = 1800
//! first_frame = 0             # optional, default 0
//! rdp_epsilon_px = 1.5        # optional
//! tissue_radius_px = 4        # optional
//!
//! [masks]
//! LeftGrasper = "masks/lg/{frame:05}.pgm"
//! RightGrasper = "masks/rg/{frame:05}.pgm"
//! Needle = "masks/n/{frame:05}.pgm"
//! Thread = "masks/t/{frame:05}.pgm"
//!
//! [annotations]
//! jaw_ends = "jaw_ends.csv"
//! tissue_points = "tissue_points.csv"
//! ```
//!
//! Paths are relative to the manifest's directory. `{frame}` expands to the
//! frame index, `{frame:0N}` to the index zero-padded to N digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trial_io::mask::probe_dimensions;
use crate::trial_io::{ObjectClass, Task};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub trial_id: String,
    pub task: Task,
    pub frame_rate_hz: f64,
    #[serde(default = "default_output_rate")]
    pub output_rate_hz: f64,
    pub frame_count: usize,
    #[serde(default)]
    pub first_frame: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rdp_epsilon_px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tissue_radius_px: Option<f64>,
    pub masks: BTreeMap<ObjectClass, String>,
    #[serde(default)]
    pub annotations: AnnotationPaths,
}

fn default_output_rate() -> f64 {
    3.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jaw_ends: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tissue_points: Option<String>,
}

/// A validated trial manifest with resolved paths.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialManifest {
    pub file: ManifestFile,
    pub dir: PathBuf,
    pub width: usize,
    pub height: usize,
}

impl TrialManifest {
    pub fn trial_id(&self) -> &str {
        &self.file.trial_id
    }

    pub fn task(&self) -> Task {
        self.file.task
    }

    pub fn frame_count(&self) -> usize {
        self.file.frame_count
    }

    /// Native frames per output sample.
    pub fn stride(&self) -> usize {
        stride_of(self.file.frame_rate_hz, self.file.output_rate_hz).expect("validated at load")
    }

    pub fn frames(&self) -> impl Iterator<Item = usize> {
        let first = self.file.first_frame;
        first..first + self.file.frame_count
    }

    pub fn mask_path(&self, class: ObjectClass, frame: usize) -> Option<PathBuf> {
        self.file
            .masks
            .get(&class)
            .map(|pattern| self.dir.join(expand_pattern(pattern, frame)))
    }

    pub fn jaw_ends_path(&self) -> Option<PathBuf> {
        self.file.annotations.jaw_ends.as_ref().map(|p| self.dir.join(p))
    }

    pub fn tissue_points_path(&self) -> Option<PathBuf> {
        self.file.annotations.tissue_points.as_ref().map(|p| self.dir.join(p))
    }
}

/// Exact integer ratio of native to output rate.
pub fn stride_of(frame_rate_hz: f64, output_rate_hz: f64) -> Option<usize> {
    if !(frame_rate_hz > 0.0 && output_rate_hz > 0.0) || !frame_rate_hz.is_finite() {
        return None;
    }
    let ratio = frame_rate_hz / output_rate_hz;
    let r = ratio.round();
    ((ratio - r).abs() < 1e-9 && r >= 1.0).then_some(r as usize)
}

pub fn expand_pattern(pattern: &str, frame: usize) -> String {
    let mut out = String::with_capacity(pattern.len() + 8);
    let mut rest = pattern;
    while let Some(start) = rest.find("{frame") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 6..];
        let Some(close) = after.find('}') else {
            out.push_str(&rest[start..]);
            return out;
        };
        let spec = &after[..close];
        match spec.strip_prefix(":0").and_then(|w| w.parse::<usize>().ok()) {
            Some(width) => out.push_str(&format!("{frame:0width$}")),
            None if spec.is_empty() => out.push_str(&frame.to_string()),
            None => out.push_str(&rest[start..start + 7 + close]),
        }
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    out
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<TrialManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ManifestFile = toml::from_str(&text).map_err(|e| Error::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate(file, dir, path)
}

fn validate(file: ManifestFile, dir: PathBuf, origin: &Path) -> Result<TrialManifest> {
    let schema_err = |message: String| Error::Manifest {
        path: origin.to_path_buf(),
        message,
    };
    if file.frame_count == 0 {
        return Err(schema_err("frame_count must be positive".into()));
    }
    if !(file.frame_rate_hz > 0.0) || !(file.output_rate_hz > 0.0) {
        return Err(schema_err("frame rates must be positive".into()));
    }
    if stride_of(file.frame_rate_hz, file.output_rate_hz).is_none() {
        return Err(schema_err(format!(
            "output_rate_hz {} does not divide frame_rate_hz {}",
            file.output_rate_hz, file.frame_rate_hz
        )));
    }
    if let Some(eps) = file.rdp_epsilon_px {
        if !(eps >= 0.0) {
            return Err(schema_err("rdp_epsilon_px must be non-negative".into()));
        }
    }
    if file.masks.contains_key(&ObjectClass::TissuePoints) {
        return Err(schema_err("TissuePoints come from annotations, not a mask stream".into()));
    }

    let mut manifest = TrialManifest {
        file,
        dir,
        width: 0,
        height: 0,
    };
    let mut dims: Option<(ObjectClass, usize, usize)> = None;
    for (&class, _) in manifest.file.masks.iter() {
        for frame in manifest.frames() {
            let p = manifest.mask_path(class, frame).expect("stream exists");
            if !p.is_file() {
                return Err(Error::MissingMaskFrame {
                    class: class.name().into(),
                    frame,
                    path: p,
                });
            }
            let (w, h) = probe_dimensions(&p)?;
            match dims {
                None => dims = Some((class, w, h)),
                Some((_, ew, eh)) if (ew, eh) != (w, h) => {
                    return Err(Error::DimensionMismatch {
                        class: class.name().into(),
                        frame,
                        expected_w: ew,
                        expected_h: eh,
                        found_w: w,
                        found_h: h,
                    })
                }
                _ => {}
            }
        }
    }
    let Some((_, w, h)) = dims else {
        return Err(schema_err("manifest lists no mask streams".into()));
    };
    manifest.width = w;
    manifest.height = h;

    for p in [manifest.jaw_ends_path(), manifest.tissue_points_path()].into_iter().flatten() {
        if !p.is_file() {
            return Err(schema_err(format!("annotation file {} not found", p.display())));
        }
    }
    if let Some(p) = manifest.tissue_points_path() {
        for pt in crate::trial_io::read_points(&p)? {
            if !in_bounds(pt, w, h) {
                return Err(Error::Validation(format!(
                    "{}: tissue point ({}, {}) outside {w}x{h}",
                    p.display(),
                    pt.x,
                    pt.y
                )));
            }
        }
    }
    if let Some(p) = manifest.jaw_ends_path() {
        for (frame, e) in crate::trial_io::read_jaw_ends(&p)?.iter() {
            if ![e.left[0], e.left[1], e.right[0], e.right[1]]
                .into_iter()
                .all(|pt| in_bounds(pt, w, h))
            {
                return Err(Error::Validation(format!(
                    "{}: jaw end in frame {frame} outside {w}x{h}",
                    p.display()
                )));
            }
        }
    }
    Ok(manifest)
}

fn in_bounds(p: crate::geometry::Point, w: usize, h: usize) -> bool {
    p.x >= 0.0 && p.y >= 0.0 && p.x <= w as f64 && p.y <= h as f64
}

pub fn write_manifest(file: &ManifestFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = toml::to_string_pretty(file).map_err(|e| Error::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    crate::trial_io::write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_io::mask::{write_pgm, Mask};

    fn scaffold(dir: &Path, classes: &[ObjectClass], frames: usize, skip: Option<(ObjectClass, usize)>) -> ManifestFile {
        let mut masks = BTreeMap::new();
        for &c in classes {
            let sub = dir.join(c.symbol());
            fs::create_dir_all(&sub).unwrap();
            for f in 0..frames {
                if skip == Some((c, f)) {
                    continue;
                }
                write_pgm(&Mask::empty(8, 6, c, f), sub.join(format!("{f:04}.pgm"))).unwrap();
            }
            masks.insert(c, format!("{}/{{frame:04}}.pgm", c.symbol()));
        }
        ManifestFile {
            trial_id: "t1".into(),
            task: Task::Suturing,
            frame_rate_hz: 30.0,
            output_rate_hz: 3.0,
            frame_count: frames,
            first_frame: 0,
            rdp_epsilon_px: None,
            tissue_radius_px: None,
            masks,
            annotations: AnnotationPaths::default(),
        }
    }

    const FIVE: [ObjectClass; 5] = [
        ObjectClass::LeftGrasper,
        ObjectClass::RightGrasper,
        ObjectClass::Needle,
        ObjectClass::Thread,
        ObjectClass::Ring,
    ];

    #[test]
    fn pattern_expansion() {
        assert_eq!(expand_pattern("m/{frame:05}.pgm", 37), "m/00037.pgm");
        assert_eq!(expand_pattern("m/{frame}.png", 7), "m/7.png");
        assert_eq!(expand_pattern("plain.pgm", 7), "plain.pgm");
    }

    #[test]
    fn stride_requires_integer_ratio() {
        assert_eq!(stride_of(30.0, 3.0), Some(10));
        assert_eq!(stride_of(30.0, 30.0), Some(1));
        assert_eq!(stride_of(30.0, 4.0), None);
        assert_eq!(stride_of(29.97, 3.0), None);
        assert_eq!(stride_of(3.0, 30.0), None);
    }

    #[test]
    fn valid_manifest_loads() {
        let dir = tempfile::tempdir().unwrap();
        let file = scaffold(dir.path(), &FIVE, 100, None);
        let p = dir.path().join("trial.toml");
        write_manifest(&file, &p).unwrap();
        let m = load_manifest(&p).unwrap();
        assert_eq!(m.frame_count(), 100);
        assert_eq!(m.stride(), 10);
        assert_eq!((m.width, m.height), (8, 6));
        assert_eq!(m.file, file);
    }

    #[test]
    fn missing_needle_frame_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let file = scaffold(dir.path(), &FIVE, 40, Some((ObjectClass::Needle, 37)));
        let p = dir.path().join("trial.toml");
        write_manifest(&file, &p).unwrap();
        let err = load_manifest(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Needle") && msg.contains("frame 37"), "{msg}");
    }

    #[test]
    fn dimension_mismatch_reported() {
        let dir = tempfile::tempdir().unwrap();
        let file = scaffold(dir.path(), &FIVE[..2], 3, None);
        write_pgm(
            &Mask::empty(9, 6, ObjectClass::RightGrasper, 2),
            dir.path().join("RG/0002.pgm"),
        )
        .unwrap();
        let p = dir.path().join("trial.toml");
        write_manifest(&file, &p).unwrap();
        let err = load_manifest(&p).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { frame: 2, .. }), "{err}");
    }

    #[test]
    fn schema_violations() {
        let dir = tempfile::tempdir().unwrap();
        let mut file = scaffold(dir.path(), &FIVE[..1], 2, None);
        file.output_rate_hz = 4.0;
        let p = dir.path().join("trial.toml");
        write_manifest(&file, &p).unwrap();
        assert!(matches!(load_manifest(&p), Err(Error::Manifest { .. })));

        fs::write(&p, "trial_id = 3\n").unwrap();
        assert!(matches!(load_manifest(&p), Err(Error::Manifest { .. })));
        assert!(matches!(load_manifest(dir.path().join("nope.toml")), Err(Error::Io { .. })));
    }
}
