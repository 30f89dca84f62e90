use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::gesture_fsm::{FsmState, GrammarGraph};
use crate::trial_io::{ContextCode, ContextFrame, Gesture, GestureTranscript};

/// Tolerance when comparing dwell time against a duration limit.
const DWELL_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriggerKind {
    Context,
    Duration,
    None,
}

impl fmt::Display for TriggerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriggerKind::Context => "context",
            TriggerKind::Duration => "duration",
            TriggerKind::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub sample_index: usize,
    pub context: ContextCode,
    /// FSM state after consuming this sample.
    pub state: FsmState,
    pub trigger: TriggerKind,
    pub gesture: Gesture,
}

/// One row per input sample explaining each emitted label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationTrace {
    pub rows: Vec<TraceRow>,
}

impl TranslationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("sample_index,context,state,trigger,gesture\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.sample_index, r.context, r.state, r.trigger, r.gesture);
        }
        s
    }
}

/// Runs the grammar over a context series sampled at `rate_hz`.
///
/// Returns an output-basis transcript with one label per input sample plus
/// a trailing one-sample terminal gesture, and the per-sample trace.
pub fn translate(
    context: &[ContextFrame],
    grammar: &GrammarGraph,
    rate_hz: f64,
) -> Result<(GestureTranscript, TranslationTrace)> {
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(Error::Validation(format!("sample rate must be positive, got {rate_hz}")));
    }
    let groups: BTreeMap<FsmState, _> = grammar.states.iter().map(|&s| (s, grammar.group(s))).collect();

    let mut state = FsmState::Start;
    let mut dwell = 0usize;
    let mut steps = Vec::with_capacity(context.len());
    for frame in context {
        let code = ContextCode::from_values(frame.values)?;
        let in_group = groups.get(&state).is_some_and(|g| g.contains(&code));
        let forced = state
            .gesture()
            .and_then(|g| grammar.durations.get(&g))
            .filter(|d| (dwell + 1) as f64 / rate_hz > d.max_seconds + DWELL_EPS);
        let trigger = match grammar.trigger(state, code) {
            Some(t) if !in_group => {
                state = FsmState::Gesture(t.to);
                TriggerKind::Context
            }
            _ => match forced {
                Some(d) => {
                    state = FsmState::Gesture(d.next);
                    TriggerKind::Duration
                }
                None => TriggerKind::None,
            },
        };
        dwell = if trigger == TriggerKind::None { dwell + 1 } else { 1 };
        steps.push((frame.sample_index, code, state, trigger));
    }

    // Samples seen before the first transition take the first gesture.
    let fill = steps
        .iter()
        .find_map(|s| s.2.gesture())
        .unwrap_or(grammar.terminal);
    let rows: Vec<TraceRow> = steps
        .into_iter()
        .map(|(sample_index, context, state, trigger)| TraceRow {
            sample_index,
            context,
            state,
            trigger,
            gesture: state.gesture().unwrap_or(fill),
        })
        .collect();
    let mut labels: Vec<Gesture> = rows.iter().map(|r| r.gesture).collect();
    if !labels.is_empty() {
        labels.push(grammar.terminal);
    }
    Ok((GestureTranscript::from_samples(&labels), TranslationTrace { rows }))
}

/// Problems with a transcript under `grammar`; empty when it conforms.
pub fn validate_transcript(t: &GestureTranscript, grammar: &GrammarGraph) -> Vec<String> {
    let mut out = Vec::new();
    if let Err(e) = t.validate() {
        out.push(e.to_string());
    }
    for (i, s) in t.segments.iter().enumerate() {
        if grammar.excluded.contains(&s.gesture) {
            out.push(format!("segment {} uses excluded gesture {}", i + 1, s.gesture));
        } else if s.gesture != grammar.terminal && !grammar.states.contains(&FsmState::Gesture(s.gesture)) {
            out.push(format!("segment {} uses {} which the grammar does not define", i + 1, s.gesture));
        }
    }
    match t.segments.last() {
        Some(last) if last.gesture != grammar.terminal => {
            out.push(format!("transcript ends in {} instead of {}", last.gesture, grammar.terminal))
        }
        _ => {}
    }
    out
}
