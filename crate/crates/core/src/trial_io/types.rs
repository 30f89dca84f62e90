use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    Suturing,
    NeedlePassing,
    KnotTying,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Suturing, Task::NeedlePassing, Task::KnotTying];

    pub fn name(self) -> &'static str {
        match self {
            Task::Suturing => "Suturing",
            Task::NeedlePassing => "NeedlePassing",
            Task::KnotTying => "KnotTying",
        }
    }

    /// Objects a grasper can hold or touch in this task, in rule order.
    pub fn held_objects(self) -> &'static [ObjectClass] {
        match self {
            Task::Suturing => &[ObjectClass::Needle, ObjectClass::Thread],
            Task::NeedlePassing => &[ObjectClass::Needle, ObjectClass::Thread, ObjectClass::Ring],
            Task::KnotTying => &[ObjectClass::Thread],
        }
    }

    /// Largest value of the task-specific fifth state variable.
    pub fn max_fifth_state(self) -> u8 {
        match self {
            Task::Suturing | Task::NeedlePassing => 2,
            Task::KnotTying => 3,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "suturing" | "s" => Ok(Task::Suturing),
            "needlepassing" | "np" => Ok(Task::NeedlePassing),
            "knottying" | "kt" => Ok(Task::KnotTying),
            _ => Err(Error::Validation(format!("unknown task {s:?}"))),
        }
    }
}

/// Tools and objects that appear as masks or annotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectClass {
    LeftGrasper,
    RightGrasper,
    Needle,
    Thread,
    Ring,
    TissuePoints,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 6] = [
        ObjectClass::LeftGrasper,
        ObjectClass::RightGrasper,
        ObjectClass::Needle,
        ObjectClass::Thread,
        ObjectClass::Ring,
        ObjectClass::TissuePoints,
    ];

    /// Short symbol used in rule expressions (`LG`, `RG`, `N`, `T`, `R`, `Ts`).
    pub fn symbol(self) -> &'static str {
        match self {
            ObjectClass::LeftGrasper => "LG",
            ObjectClass::RightGrasper => "RG",
            ObjectClass::Needle => "N",
            ObjectClass::Thread => "T",
            ObjectClass::Ring => "R",
            ObjectClass::TissuePoints => "Ts",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        ObjectClass::ALL.into_iter().find(|c| c.symbol() == s)
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::LeftGrasper => "LeftGrasper",
            ObjectClass::RightGrasper => "RightGrasper",
            ObjectClass::Needle => "Needle",
            ObjectClass::Thread => "Thread",
            ObjectClass::Ring => "Ring",
            ObjectClass::TissuePoints => "TissuePoints",
        }
    }

    /// Value this object takes in a hold/contact state variable.
    pub fn encoding(self, encodings: &ObjectEncodings) -> Option<u8> {
        match self {
            ObjectClass::Needle => Some(encodings.needle),
            ObjectClass::Thread => Some(encodings.thread),
            ObjectClass::Ring => Some(encodings.ring),
            _ => None,
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        ObjectClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s) || c.symbol() == s)
            .ok_or_else(|| Error::Validation(format!("unknown object class {s:?}")))
    }
}

/// Values written into the hold/contact variables for each held object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectEncodings {
    pub needle: u8,
    pub thread: u8,
    pub ring: u8,
}

impl Default for ObjectEncodings {
    fn default() -> Self {
        ObjectEncodings {
            needle: 2,
            thread: 3,
            ring: 1,
        }
    }
}

impl ObjectEncodings {
    pub fn validate(&self) -> Result<()> {
        let v = [self.needle, self.thread, self.ring];
        if v.iter().any(|&x| x == 0 || x > 9) {
            return Err(Error::Validation(format!(
                "object encodings must be in 1..=9, got {v:?}"
            )));
        }
        if v[0] == v[1] || v[0] == v[2] || v[1] == v[2] {
            return Err(Error::Validation(format!("object encodings must be distinct, got {v:?}")));
        }
        Ok(())
    }
}

/// Index of one of the five context state variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateVariable {
    LeftHold,
    LeftContact,
    RightHold,
    RightContact,
    Fifth,
}

impl StateVariable {
    pub const ALL: [StateVariable; 5] = [
        StateVariable::LeftHold,
        StateVariable::LeftContact,
        StateVariable::RightHold,
        StateVariable::RightContact,
        StateVariable::Fifth,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name in context CSV files.
    pub fn column(self) -> &'static str {
        match self {
            StateVariable::LeftHold => "LH",
            StateVariable::LeftContact => "LC",
            StateVariable::RightHold => "RH",
            StateVariable::RightContact => "RC",
            StateVariable::Fifth => "S5",
        }
    }

    /// Section name in rule-set files.
    pub fn section(self) -> &'static str {
        match self {
            StateVariable::LeftHold => "left_hold",
            StateVariable::LeftContact => "left_contact",
            StateVariable::RightHold => "right_hold",
            StateVariable::RightContact => "right_contact",
            StateVariable::Fifth => "fifth_state",
        }
    }

    pub fn from_section(s: &str) -> Option<Self> {
        StateVariable::ALL.into_iter().find(|v| v.section() == s)
    }

    /// Report heading.
    pub fn title(self) -> &'static str {
        match self {
            StateVariable::LeftHold => "Left Hold",
            StateVariable::LeftContact => "Left Contact",
            StateVariable::RightHold => "Right Hold",
            StateVariable::RightContact => "Right Contact",
            StateVariable::Fifth => "Needle or Knot",
        }
    }
}

/// Admissible values of each state variable for one task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContextSchema {
    pub task: Task,
    pub encodings: ObjectEncodings,
}

impl ContextSchema {
    pub fn new(task: Task) -> Self {
        ContextSchema {
            task,
            encodings: ObjectEncodings::default(),
        }
    }

    pub fn allowed(&self, var: StateVariable) -> Vec<u8> {
        match var {
            StateVariable::Fifth => (0..=self.task.max_fifth_state()).collect(),
            _ => {
                let mut v = vec![0];
                v.extend(
                    self.task
                        .held_objects()
                        .iter()
                        .filter_map(|o| o.encoding(&self.encodings)),
                );
                v.sort_unstable();
                v
            }
        }
    }

    pub fn check(&self, frame: &ContextFrame) -> Result<()> {
        for var in StateVariable::ALL {
            let value = frame.get(var);
            if !self.allowed(var).contains(&value) {
                return Err(Error::Validation(format!(
                    "sample {}: {}={} is outside the {} value set {:?}",
                    frame.sample_index,
                    var.column(),
                    value,
                    self.task,
                    self.allowed(var)
                )));
            }
        }
        Ok(())
    }
}

/// One sample of surgical context: the five state variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ContextFrame {
    pub sample_index: usize,
    pub values: [u8; 5],
}

impl ContextFrame {
    pub fn new(sample_index: usize, values: [u8; 5]) -> Self {
        ContextFrame {
            sample_index,
            values,
        }
    }

    pub fn get(&self, var: StateVariable) -> u8 {
        self.values[var.index()]
    }

    pub fn set(&mut self, var: StateVariable, value: u8) {
        self.values[var.index()] = value;
    }

    pub fn code(&self) -> ContextCode {
        ContextCode(self.values)
    }
}

/// Five-digit context value such as `00202`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ContextCode(pub [u8; 5]);

impl fmt::Display for ContextCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for ContextCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bytes = t.as_bytes();
        if bytes.len() != 5 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::ContextValue(s.to_string()));
        }
        let mut out = [0u8; 5];
        for (o, b) in out.iter_mut().zip(bytes) {
            *o = b - b'0';
        }
        Ok(ContextCode(out))
    }
}

impl ContextCode {
    /// Fails if any variable does not fit in one decimal digit.
    pub fn from_values(values: [u8; 5]) -> Result<Self> {
        if values.iter().any(|&v| v > 9) {
            return Err(Error::ContextValue(format!("{values:?}")));
        }
        Ok(ContextCode(values))
    }
}

/// A JIGSAWS gesture label `G1` .. `G15`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gesture(u8);

impl Gesture {
    pub const MAX: u8 = 15;

    pub fn new(n: u8) -> Option<Self> {
        (1..=Self::MAX).contains(&n).then_some(Gesture(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Gesture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.0)
    }
}

impl FromStr for Gesture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .strip_prefix('G')
            .and_then(|n| n.parse::<u8>().ok())
            .and_then(Gesture::new)
            .ok_or_else(|| Error::Validation(format!("unknown gesture label {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_code_parses_five_digits() {
        let c: ContextCode = "00202".parse().unwrap();
        assert_eq!(c.0, [0, 0, 2, 0, 2]);
        assert_eq!(c.to_string(), "00202");
        assert!("0202".parse::<ContextCode>().is_err());
        assert!("002021".parse::<ContextCode>().is_err());
        assert!("0a202".parse::<ContextCode>().is_err());
    }

    #[test]
    fn gesture_labels() {
        assert_eq!("G11".parse::<Gesture>().unwrap().number(), 11);
        assert!("G0".parse::<Gesture>().is_err());
        assert!("G16".parse::<Gesture>().is_err());
        assert!("X1".parse::<Gesture>().is_err());
    }

    #[test]
    fn suturing_value_sets() {
        let s = ContextSchema::new(Task::Suturing);
        assert_eq!(s.allowed(StateVariable::LeftHold), vec![0, 2, 3]);
        assert_eq!(s.allowed(StateVariable::Fifth), vec![0, 1, 2]);
        let np = ContextSchema::new(Task::NeedlePassing);
        assert_eq!(np.allowed(StateVariable::RightContact), vec![0, 1, 2, 3]);
        let bad = ContextFrame::new(0, [7, 0, 0, 0, 0]);
        assert!(s.check(&bad).is_err());
    }

    #[test]
    fn encodings_must_be_distinct() {
        let mut e = ObjectEncodings::default();
        assert!(e.validate().is_ok());
        e.ring = 2;
        assert!(e.validate().is_err());
    }
}
