use crate::trial_io::TrialManifest;

/// Numeric constants of the context pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// `near` in rule files: distances below this count as touching.
    pub near_px: f64,
    /// `overlap` in rule files: intersections above this count as overlap.
    pub overlap_px2: f64,
    /// Jaw ends closer than this mean the grasper is closed.
    pub jaw_closed_px: f64,
    /// Simplified components smaller than this are dropped.
    pub min_area_px2: f64,
    /// Trailing window of the rolling mode, in native frames.
    pub mode_window: usize,
    pub rdp_epsilon_px: f64,
    /// Half-size of the square drawn around each tissue point.
    pub tissue_radius_px: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            near_px: 1.0,
            overlap_px2: 0.0,
            jaw_closed_px: 18.0,
            min_area_px2: 15.0,
            mode_window: 10,
            rdp_epsilon_px: 1.5,
            tissue_radius_px: 4.0,
        }
    }
}

impl Thresholds {
    /// Applies the per-trial values a manifest may carry.
    pub fn with_manifest(mut self, manifest: &TrialManifest) -> Self {
        if let Some(e) = manifest.file.rdp_epsilon_px {
            self.rdp_epsilon_px = e;
        }
        if let Some(r) = manifest.file.tissue_radius_px {
            self.tissue_radius_px = r;
        }
        self
    }
}
