//! Surgical context inference from per-frame segmentation masks, and
//! grammar-driven translation of context transcripts into gesture transcripts.
//!
//! The pipeline runs mask → polygons ([`geometry`]) → per-frame features and
//! rule evaluation ([`context`]) → downsampled context transcript →
//! grammar FSM ([`gesture_fsm`]) → gesture transcript, scored by [`metrics`].

pub mod commands;
mod config_text;
pub mod context;
pub mod error;
pub mod geometry;
pub mod gesture_fsm;
pub mod metrics;
pub mod synth;
pub mod trial_io;

pub use error::{Error, ErrorKind, Result};
