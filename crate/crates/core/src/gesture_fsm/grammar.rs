//! Grammar graphs: gesture states, context-triggered transitions and
//! duration-forced fallbacks.
//!
//! ```text
//! task = Suturing
//!
//! [states]
//! Start G1 G2 G3
//!
//! [transitions]
//! Start, G1, contexts=[00000, 00002]
//! G1, G2, contexts=[00201]
//! G1, G3, contexts=[00201], priority=2   # overlapping triggers need priorities
//!
//! [durations]
//! G2, 6.0, G3
//!
//! [terminal]
//! G11
//!
//! [excluded]
//! G9 G10
//! ```
//!
//! Where triggers of two transitions out of one state overlap, the lower
//! priority number wins. Overlaps are only accepted when every transition
//! involved declares a distinct priority.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::config_text::ConfigDoc;
use crate::error::{Error, Result};
use crate::trial_io::{ContextCode, Gesture, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FsmState {
    Start,
    Gesture(Gesture),
}

impl FsmState {
    pub fn gesture(self) -> Option<Gesture> {
        match self {
            FsmState::Start => None,
            FsmState::Gesture(g) => Some(g),
        }
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FsmState::Start => f.write_str("Start"),
            FsmState::Gesture(g) => write!(f, "{g}"),
        }
    }
}

impl FromStr for FsmState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "Start" {
            Ok(FsmState::Start)
        } else {
            Ok(FsmState::Gesture(s.parse()?))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: FsmState,
    pub to: Gesture,
    pub contexts: BTreeSet<ContextCode>,
    /// Lower wins on overlapping triggers.
    pub priority: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DurationTrigger {
    pub max_seconds: f64,
    pub next: Gesture,
}

/// A validated, immutable grammar graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GrammarGraph {
    pub task: Task,
    pub states: Vec<FsmState>,
    pub transitions: Vec<Transition>,
    pub durations: BTreeMap<Gesture, DurationTrigger>,
    pub terminal: Gesture,
    pub excluded: BTreeSet<Gesture>,
}

impl GrammarGraph {
    pub fn outgoing(&self, from: FsmState) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == from)
    }

    /// Contexts that lead into `state`. Seeing one of them while already in
    /// `state` continues the gesture rather than starting another.
    pub fn group(&self, state: FsmState) -> BTreeSet<ContextCode> {
        self.transitions
            .iter()
            .filter(|t| FsmState::Gesture(t.to) == state)
            .flat_map(|t| t.contexts.iter().copied())
            .collect()
    }

    /// The transition out of `from` that `context` triggers, if any.
    pub fn trigger(&self, from: FsmState, context: ContextCode) -> Option<&Transition> {
        self.outgoing(from)
            .filter(|t| t.contexts.contains(&context))
            .min_by_key(|t| t.priority.unwrap_or(u32::MAX))
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text, origin)?;
        let task_entry = doc.get("task").ok_or_else(|| doc.error(1, "missing `task = ...`"))?;
        let task: Task = task_entry
            .value
            .parse()
            .map_err(|e: Error| doc.error(task_entry.line, e.to_string()))?;
        if let Some(e) = doc.preamble.iter().find(|e| e.key != "task") {
            return Err(doc.error(e.line, format!("unknown key {:?}", e.key)));
        }
        for s in &doc.sections {
            if !["states", "transitions", "durations", "terminal", "excluded"].contains(&s.name.as_str()) {
                return Err(doc.error(s.line, format!("unknown section [{}]", s.name)));
            }
        }
        let words = |name: &str| -> Vec<(usize, String)> {
            doc.section(name)
                .map(|s| {
                    s.lines
                        .iter()
                        .flat_map(|(l, text)| text.split_whitespace().map(move |w| (*l, w.to_string())))
                        .collect()
                })
                .unwrap_or_default()
        };

        let mut states = Vec::new();
        for (line, w) in words("states") {
            let s: FsmState = w.parse().map_err(|e: Error| doc.error(line, e.to_string()))?;
            if states.contains(&s) {
                return Err(doc.error(line, format!("state {s} declared twice")));
            }
            states.push(s);
        }
        if !states.contains(&FsmState::Start) {
            return Err(doc.error(
                doc.section("states").map_or(1, |s| s.line),
                "[states] must declare Start",
            ));
        }
        let declared = |line: usize, s: FsmState| -> Result<FsmState> {
            if states.contains(&s) {
                Ok(s)
            } else {
                Err(doc.error(line, format!("unknown state {s}")))
            }
        };

        let mut transitions: Vec<(usize, Transition)> = Vec::new();
        for (line, text) in doc.section("transitions").map(|s| s.lines.as_slice()).unwrap_or(&[]) {
            let t = parse_transition(text).map_err(|m| doc.error(*line, m))?;
            declared(*line, t.from)?;
            declared(*line, FsmState::Gesture(t.to))?;
            transitions.push((*line, t));
        }
        // Overlapping triggers out of one state must be ordered explicitly.
        for (i, (line, a)) in transitions.iter().enumerate() {
            for (_, b) in &transitions[..i] {
                if a.from != b.from {
                    continue;
                }
                if let Some(c) = a.contexts.intersection(&b.contexts).next() {
                    let ordered = matches!((a.priority, b.priority), (Some(x), Some(y)) if x != y);
                    if !ordered {
                        return Err(doc.error(
                            *line,
                            format!(
                                "context {c} triggers both {}->{} and {}->{}; declare distinct priorities",
                                a.from, a.to, b.from, b.to
                            ),
                        ));
                    }
                }
            }
        }

        let mut durations = BTreeMap::new();
        for (line, text) in doc.section("durations").map(|s| s.lines.as_slice()).unwrap_or(&[]) {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            let [state, secs, next] = parts[..] else {
                return Err(doc.error(*line, "expected `state, seconds, next`"));
            };
            let state: Gesture = state.parse().map_err(|e: Error| doc.error(*line, e.to_string()))?;
            let next: Gesture = next.parse().map_err(|e: Error| doc.error(*line, e.to_string()))?;
            declared(*line, FsmState::Gesture(state))?;
            declared(*line, FsmState::Gesture(next))?;
            let max_seconds: f64 = secs
                .parse()
                .map_err(|_| doc.error(*line, format!("bad duration {secs:?}")))?;
            if !(max_seconds > 0.0 && max_seconds.is_finite()) {
                return Err(doc.error(*line, format!("duration must be positive, got {secs}")));
            }
            if durations.insert(state, DurationTrigger { max_seconds, next }).is_some() {
                return Err(doc.error(*line, format!("second duration trigger for {state}")));
            }
        }

        let terminal_words = words("terminal");
        let terminal = match terminal_words.as_slice() {
            [(line, w)] => w.parse().map_err(|e: Error| doc.error(*line, e.to_string()))?,
            [] => Gesture::new(11).expect("G11 is valid"),
            [_, (line, _), ..] => return Err(doc.error(*line, "only one terminal gesture allowed")),
        };
        let mut excluded = BTreeSet::new();
        for (line, w) in words("excluded") {
            let g: Gesture = w.parse().map_err(|e: Error| doc.error(line, e.to_string()))?;
            if states.contains(&FsmState::Gesture(g)) || g == terminal {
                return Err(doc.error(line, format!("{g} is both excluded and used")));
            }
            excluded.insert(g);
        }

        Ok(GrammarGraph {
            task,
            states,
            transitions: transitions.into_iter().map(|(_, t)| t).collect(),
            durations,
            terminal,
            excluded,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Built-in grammar for a task.
    pub fn builtin(task: Task) -> Self {
        let (text, name) = match task {
            Task::Suturing => (include_str!("../../config/suturing.grammar"), "suturing.grammar"),
            Task::NeedlePassing => (include_str!("../../config/needle_passing.grammar"), "needle_passing.grammar"),
            Task::KnotTying => (include_str!("../../config/knot_tying.grammar"), "knot_tying.grammar"),
        };
        Self::parse(text, name).expect("built-in grammar parses")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("task = {}\n\n[states]\n", self.task);
        s += &self.states.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        s += "\n\n[transitions]\n";
        for t in &self.transitions {
            let ctx: Vec<String> = t.contexts.iter().map(ToString::to_string).collect();
            s += &format!("{}, {}, contexts=[{}]", t.from, t.to, ctx.join(", "));
            if let Some(p) = t.priority {
                s += &format!(", priority={p}");
            }
            s.push('\n');
        }
        s += "\n[durations]\n";
        for (g, d) in &self.durations {
            s += &format!("{g}, {}, {}\n", d.max_seconds, d.next);
        }
        s += &format!("\n[terminal]\n{}\n", self.terminal);
        s += "\n[excluded]\n";
        s += &self.excluded.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        s.push('\n');
        s
    }
}

fn parse_transition(text: &str) -> std::result::Result<Transition, String> {
    let (head, rest) = text
        .split_once("contexts")
        .ok_or("expected `from, to, contexts=[...]`")?;
    let mut names = head.split(',').map(str::trim).filter(|s| !s.is_empty());
    let (Some(from), Some(to), None) = (names.next(), names.next(), names.next()) else {
        return Err("expected `from, to, contexts=[...]`".into());
    };
    let from: FsmState = from.parse().map_err(|e: Error| e.to_string())?;
    let to: FsmState = to.parse().map_err(|e: Error| e.to_string())?;
    let FsmState::Gesture(to) = to else {
        return Err("transitions cannot enter Start".into());
    };
    let rest = rest.trim_start().strip_prefix('=').ok_or("expected `contexts=[...]`")?;
    let rest = rest.trim_start().strip_prefix('[').ok_or("expected `[` after contexts=")?;
    let (list, tail) = rest.split_once(']').ok_or("unterminated context list")?;
    let mut contexts = BTreeSet::new();
    for c in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let code: ContextCode = c.parse().map_err(|e: Error| e.to_string())?;
        contexts.insert(code);
    }
    if contexts.is_empty() {
        return Err("empty context list".into());
    }
    let tail = tail.trim().trim_start_matches(',').trim();
    let priority = if tail.is_empty() {
        None
    } else {
        let v = tail
            .strip_prefix("priority")
            .and_then(|r| r.trim_start().strip_prefix('='))
            .ok_or_else(|| format!("unexpected {tail:?}"))?;
        Some(v.trim().parse().map_err(|_| format!("bad priority {:?}", v.trim()))?)
    };
    Ok(Transition {
        from,
        to,
        contexts,
        priority,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u8) -> Gesture {
        Gesture::new(n).unwrap()
    }

    fn code(s: &str) -> ContextCode {
        s.parse().unwrap()
    }

    #[test]
    fn shipped_suturing_durations() {
        let gr = GrammarGraph::builtin(Task::Suturing);
        let d: Vec<(u8, f64, u8)> = gr
            .durations
            .iter()
            .map(|(k, v)| (k.number(), v.max_seconds, v.next.number()))
            .collect();
        assert_eq!(d, vec![(2, 6.0, 3), (3, 11.1, 6), (4, 5.2, 2), (6, 6.1, 4)]);
        assert_eq!(gr.terminal, g(11));
        assert_eq!(gr.excluded, BTreeSet::from([g(9), g(10)]));
    }

    #[test]
    fn builtins_round_trip() {
        for task in Task::ALL {
            let gr = GrammarGraph::builtin(task);
            assert_eq!(GrammarGraph::parse(&gr.to_text(), "rt").unwrap(), gr, "{task}");
        }
    }

    #[test]
    fn g4_group_is_the_transfer_sequence() {
        let gr = GrammarGraph::builtin(Task::Suturing);
        let grp = gr.group(FsmState::Gesture(g(4)));
        for c in ["20000", "20020", "20200", "02200", "00200"] {
            assert!(grp.contains(&code(c)), "{c}");
        }
    }

    const HEAD: &str = "task = Suturing\n[states]\nStart G1 G2 G3\n";

    #[test]
    fn undeclared_state_rejected() {
        let text = format!("{HEAD}[transitions]\nStart, G99, contexts=[00000]\n");
        assert!(GrammarGraph::parse(&text, "x").is_err());
        let text = format!("{HEAD}[transitions]\nStart, G4, contexts=[00000]\n");
        let err = GrammarGraph::parse(&text, "x").unwrap_err();
        assert!(err.to_string().contains("unknown state G4"), "{err}");
    }

    #[test]
    fn overlap_needs_priority() {
        let text = format!(
            "{HEAD}[transitions]\nStart, G1, contexts=[00000]\nG1, G2, contexts=[20002]\nG1, G3, contexts=[20002, 00202]\n"
        );
        let err = GrammarGraph::parse(&text, "x").unwrap_err();
        assert!(err.to_string().contains("20002"), "{err}");
        let text = format!(
            "{HEAD}[transitions]\nStart, G1, contexts=[00000]\nG1, G2, contexts=[20002], priority=2\nG1, G3, contexts=[20002, 00202], priority=1\n"
        );
        let gr = GrammarGraph::parse(&text, "x").unwrap();
        assert_eq!(gr.trigger(FsmState::Gesture(g(1)), code("20002")).unwrap().to, g(3));
    }

    #[test]
    fn non_positive_duration_rejected() {
        for d in ["0", "-1.5", "inf"] {
            let text = format!("{HEAD}[durations]\nG2, {d}, G3\n");
            assert!(GrammarGraph::parse(&text, "x").is_err(), "{d}");
        }
    }
}
