//! On-disk formats: trial manifests, per-frame masks, annotations and transcripts.

mod annotations;
mod manifest;
mod mask;
mod transcript;
mod types;

pub use annotations::{read_jaw_ends, read_points, write_jaw_ends, write_points, JawEndSeries, JawEnds};
pub use manifest::{
    expand_pattern, load_manifest, stride_of, write_manifest, AnnotationPaths, ManifestFile, TrialManifest,
};
pub use mask::{load_mask, probe_dimensions, write_pgm, Mask, MASK_THRESHOLD};
pub use transcript::{
    format_context_transcript, format_gesture_transcript, parse_gesture_transcript, read_context_transcript,
    read_gesture_transcript, write_atomic, write_context_transcript, write_gesture_transcript, ContextTranscript,
    FrameBasis, GestureSegment, GestureTranscript,
};
pub use types::{
    ContextCode, ContextFrame, ContextSchema, Gesture, ObjectClass, ObjectEncodings, StateVariable, Task,
};
