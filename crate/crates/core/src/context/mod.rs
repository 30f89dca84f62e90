//! Per-frame features, rule evaluation, and downsampling to context transcripts.

mod downsample;
mod features;
mod pipeline;
mod rules;
mod thresholds;

pub use downsample::{downsample, window_mode};
pub use features::{compute_features, grasper_open, point_markers, FeatureKey, FeatureVector, Side};
pub use pipeline::{infer_frames, infer_trial_context};
pub use rules::{infer_state, task_objects, CmpOp, Expr, Operand, Rule, RuleSet};
pub use thresholds::Thresholds;
