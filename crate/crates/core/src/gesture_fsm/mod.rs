//! Context-to-gesture translation with a grammar-graph finite state machine.

mod grammar;
mod translate;

pub use grammar::{DurationTrigger, FsmState, GrammarGraph, Transition};
pub use translate::{translate, validate_transcript, TraceRow, TranslationTrace, TriggerKind};
