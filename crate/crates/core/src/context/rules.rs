//! Task-specific rule sets mapping frame features to state-variable values.
//!
//! Each state variable has an ordered list of `value: condition` rules; the
//! first rule whose condition holds sets the variable, otherwise it is 0.
//!
//! ```text
//! task = Suturing
//!
//! [left_hold]
//! 2: D(LG,N) < near and closed(LG)
//! 3: Inter(LG,T) > overlap and closed(LG)
//! ```
//!
//! Operands are `D(A,B)`, `Inter(A,B)`, `A.x`, `A.y`, numbers, and the
//! named thresholds `near` and `overlap`. Any comparison whose operand
//! refers to an absent object (infinite distance, undefined midpoint) is
//! false.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::config_text::ConfigDoc;
use crate::context::features::{FeatureKey, FeatureVector, Side};
use crate::context::Thresholds;
use crate::error::{Error, Result};
use crate::trial_io::{ContextFrame, ContextSchema, ObjectClass, ObjectEncodings, StateVariable, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operand {
    Feature(FeatureKey),
    Number(f64),
    /// Distance threshold (`near`).
    Near,
    /// Intersection-area threshold (`overlap`).
    Overlap,
}

impl Operand {
    fn value(&self, v: &FeatureVector, t: &Thresholds) -> Option<f64> {
        let x = match *self {
            Operand::Feature(k) => v.get(k)?,
            Operand::Number(x) => x,
            Operand::Near => t.near_px,
            Operand::Overlap => t.overlap_px2,
        };
        x.is_finite().then_some(x)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Feature(k) => write!(f, "{k}"),
            Operand::Number(x) => write!(f, "{x}"),
            Operand::Near => f.write_str("near"),
            Operand::Overlap => f.write_str("overlap"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Cmp(Operand, CmpOp, Operand),
    /// Grasper jaw is open (`open(LG)`).
    Open(Side),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, v: &FeatureVector, t: &Thresholds) -> bool {
        match self {
            Expr::Cmp(a, op, b) => match (a.value(v, t), b.value(v, t)) {
                (Some(x), Some(y)) => op.apply(x, y),
                _ => false,
            },
            Expr::Open(side) => v.alpha(*side),
            Expr::Not(e) => !e.eval(v, t),
            Expr::And(a, b) => a.eval(v, t) && b.eval(v, t),
            Expr::Or(a, b) => a.eval(v, t) || b.eval(v, t),
        }
    }

    pub fn features(&self, out: &mut BTreeSet<FeatureKey>) {
        match self {
            Expr::Cmp(a, _, b) => {
                for o in [a, b] {
                    if let Operand::Feature(k) = o {
                        out.insert(*k);
                    }
                }
            }
            Expr::Open(_) => {}
            Expr::Not(e) => e.features(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.features(out);
                b.features(out);
            }
        }
    }

    pub fn parse(text: &str) -> std::result::Result<Expr, String> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.or_expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(format!("unexpected {t:?}")),
        }
    }
}

fn side_symbol(side: Side) -> &'static str {
    match side {
        Side::Left => "LG",
        Side::Right => "RG",
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                Expr::And(..) | Expr::Or(..) => write!(f, "({e})"),
                _ => write!(f, "{e}"),
            }
        }
        match self {
            Expr::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Expr::Open(s) => write!(f, "open({})", side_symbol(*s)),
            Expr::Not(e) => match **e {
                Expr::Open(s) => write!(f, "closed({})", side_symbol(s)),
                _ => {
                    f.write_str("not ")?;
                    wrap(e, f)
                }
            },
            Expr::And(a, b) => {
                wrap(a, f)?;
                f.write_str(" and ")?;
                wrap(b, f)
            }
            Expr::Or(a, b) => {
                wrap(a, f)?;
                f.write_str(" or ")?;
                wrap(b, f)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Op(CmpOp),
    LParen,
    RParen,
    Comma,
    Dot,
}

fn tokenize(text: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            '.' => {
                out.push(Token::Dot);
                i += 1;
            }
            '<' | '>' | '=' | '!' => {
                let two = chars.get(i + 1) == Some(&'=');
                let op = match (c, two) {
                    ('<', false) => CmpOp::Lt,
                    ('<', true) => CmpOp::Le,
                    ('>', false) => CmpOp::Gt,
                    ('>', true) => CmpOp::Ge,
                    ('=', _) => CmpOp::Eq,
                    ('!', true) => CmpOp::Ne,
                    _ => return Err(format!("unexpected {c:?}")),
                };
                out.push(Token::Op(op));
                i += if two { 2 } else { 1 };
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Number(s.parse().map_err(|_| format!("bad number {s:?}"))?));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> std::result::Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(format!("expected {t:?}, found {got:?}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Token::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or_expr(&mut self) -> std::result::Result<Expr, String> {
        let mut e = self.and_expr()?;
        while self.keyword("or") {
            e = Expr::Or(Box::new(e), Box::new(self.and_expr()?));
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> std::result::Result<Expr, String> {
        let mut e = self.unary()?;
        while self.keyword("and") {
            e = Expr::And(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> std::result::Result<Expr, String> {
        if self.keyword("not") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some(&Token::LParen) {
            // Either a parenthesised condition or nothing else starts with '('.
            self.pos += 1;
            let e = self.or_expr()?;
            self.expect(Token::RParen)?;
            return Ok(e);
        }
        for (kw, open) in [("open", true), ("closed", false)] {
            if matches!(self.peek(), Some(Token::Ident(s)) if s == kw)
                && self.tokens.get(self.pos + 1) == Some(&Token::LParen)
            {
                self.pos += 2;
                let side = match self.next() {
                    Some(Token::Ident(s)) if s == "LG" || s == "L" => Side::Left,
                    Some(Token::Ident(s)) if s == "RG" || s == "R" => Side::Right,
                    got => return Err(format!("{kw}() expects LG or RG, found {got:?}")),
                };
                self.expect(Token::RParen)?;
                let e = Expr::Open(side);
                return Ok(if open { e } else { Expr::Not(Box::new(e)) });
            }
        }
        let a = self.operand()?;
        let op = match self.next() {
            Some(Token::Op(op)) => op,
            got => return Err(format!("expected comparison operator, found {got:?}")),
        };
        let b = self.operand()?;
        Ok(Expr::Cmp(a, op, b))
    }

    fn object(&mut self) -> std::result::Result<ObjectClass, String> {
        match self.next() {
            Some(Token::Ident(s)) => ObjectClass::from_symbol(&s).ok_or_else(|| format!("unknown object {s:?}")),
            got => Err(format!("expected object symbol, found {got:?}")),
        }
    }

    fn operand(&mut self) -> std::result::Result<Operand, String> {
        match self.next() {
            Some(Token::Number(x)) => Ok(Operand::Number(x)),
            Some(Token::Ident(s)) if s == "near" => Ok(Operand::Near),
            Some(Token::Ident(s)) if s == "overlap" => Ok(Operand::Overlap),
            Some(Token::Ident(s)) if (s == "D" || s == "Inter") && self.peek() == Some(&Token::LParen) => {
                self.pos += 1;
                let a = self.object()?;
                self.expect(Token::Comma)?;
                let b = self.object()?;
                self.expect(Token::RParen)?;
                Ok(Operand::Feature(if s == "D" {
                    FeatureKey::Distance(a, b)
                } else {
                    FeatureKey::Intersection(a, b)
                }))
            }
            Some(Token::Ident(s)) if self.peek() == Some(&Token::Dot) => {
                let obj = ObjectClass::from_symbol(&s).ok_or_else(|| format!("unknown object {s:?}"))?;
                self.pos += 1;
                match self.next() {
                    Some(Token::Ident(c)) if c == "x" => Ok(Operand::Feature(FeatureKey::MidX(obj))),
                    Some(Token::Ident(c)) if c == "y" => Ok(Operand::Feature(FeatureKey::MidY(obj))),
                    got => Err(format!("expected .x or .y, found {got:?}")),
                }
            }
            got => Err(format!("expected operand, found {got:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub value: u8,
    pub condition: Expr,
}

/// Ordered rules for each of the five state variables.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub task: Task,
    pub encodings: ObjectEncodings,
    pub rules: [Vec<Rule>; 5],
}

/// Objects whose masks or annotations exist for a task.
pub fn task_objects(task: Task) -> &'static [ObjectClass] {
    use ObjectClass::*;
    match task {
        Task::Suturing => &[LeftGrasper, RightGrasper, Needle, Thread, TissuePoints],
        Task::NeedlePassing => &[LeftGrasper, RightGrasper, Needle, Thread, Ring],
        Task::KnotTying => &[LeftGrasper, RightGrasper, Thread],
    }
}

impl RuleSet {
    pub fn schema(&self) -> ContextSchema {
        ContextSchema {
            task: self.task,
            encodings: self.encodings,
        }
    }

    pub fn rules_for(&self, var: StateVariable) -> &[Rule] {
        &self.rules[var.index()]
    }

    /// Every feature any rule reads.
    pub fn required_features(&self) -> BTreeSet<FeatureKey> {
        let mut out = BTreeSet::new();
        for r in self.rules.iter().flatten() {
            r.condition.features(&mut out);
        }
        out
    }

    pub fn required_objects(&self) -> BTreeSet<ObjectClass> {
        self.required_features().iter().flat_map(FeatureKey::objects).collect()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text, origin)?;
        let task_entry = doc.get("task").ok_or_else(|| doc.error(1, "missing `task = ...`"))?;
        let task: Task = task_entry
            .value
            .parse()
            .map_err(|e: Error| doc.error(task_entry.line, e.to_string()))?;
        let mut encodings = ObjectEncodings::default();
        for entry in &doc.preamble {
            let slot = match entry.key.as_str() {
                "task" => continue,
                "needle_value" => &mut encodings.needle,
                "thread_value" => &mut encodings.thread,
                "ring_value" => &mut encodings.ring,
                other => return Err(doc.error(entry.line, format!("unknown key {other:?}"))),
            };
            *slot = entry
                .value
                .parse()
                .map_err(|_| doc.error(entry.line, format!("bad encoding {:?}", entry.value)))?;
        }
        encodings
            .validate()
            .map_err(|e| doc.error(1, e.to_string()))?;

        let schema = ContextSchema { task, encodings };
        let provided = task_objects(task);
        let mut rules: [Vec<Rule>; 5] = Default::default();
        for section in &doc.sections {
            let var = StateVariable::from_section(&section.name)
                .ok_or_else(|| doc.error(section.line, format!("unknown section [{}]", section.name)))?;
            for (line, text) in &section.lines {
                let (value, cond) = text
                    .split_once(':')
                    .ok_or_else(|| doc.error(*line, "expected `value: condition`"))?;
                let value: u8 = value
                    .trim()
                    .parse()
                    .map_err(|_| doc.error(*line, format!("bad value {:?}", value.trim())))?;
                if !schema.allowed(var).contains(&value) || value == 0 {
                    return Err(doc.error(
                        *line,
                        format!("value {value} is not a non-zero {} value for {task}", var.column()),
                    ));
                }
                let condition = Expr::parse(cond).map_err(|m| doc.error(*line, m))?;
                let mut used = BTreeSet::new();
                condition.features(&mut used);
                if let Some(obj) = used
                    .iter()
                    .flat_map(FeatureKey::objects)
                    .find(|o| !provided.contains(o))
                {
                    return Err(doc.error(*line, format!("{task} provides no {obj} object")));
                }
                rules[var.index()].push(Rule { value, condition });
            }
        }
        Ok(RuleSet { task, encodings, rules })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("task = {}\n", self.task);
        let d = ObjectEncodings::default();
        if self.encodings != d {
            s += &format!(
                "needle_value = {}\nthread_value = {}\nring_value = {}\n",
                self.encodings.needle, self.encodings.thread, self.encodings.ring
            );
        }
        for var in StateVariable::ALL {
            s += &format!("\n[{}]\n", var.section());
            for r in self.rules_for(var) {
                s += &format!("{}: {}\n", r.value, r.condition);
            }
        }
        s
    }

    /// Built-in rules for a task.
    pub fn builtin(task: Task) -> Self {
        let (text, name) = match task {
            Task::Suturing => (include_str!("../../config/suturing.rules"), "suturing.rules"),
            Task::NeedlePassing => (include_str!("../../config/needle_passing.rules"), "needle_passing.rules"),
            Task::KnotTying => (include_str!("../../config/knot_tying.rules"), "knot_tying.rules"),
        };
        Self::parse(text, name).expect("built-in rule set parses")
    }
}

/// Applies `rules` to one feature vector. Unmatched variables are 0.
pub fn infer_state(v: &FeatureVector, rules: &RuleSet, thresholds: &Thresholds) -> ContextFrame {
    let mut frame = ContextFrame::new(v.frame_index, [0; 5]);
    for var in StateVariable::ALL {
        if let Some(r) = rules.rules_for(var).iter().find(|r| r.condition.eval(v, thresholds)) {
            frame.set(var, r.value);
        }
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use ObjectClass::*;

    fn fv() -> FeatureVector {
        FeatureVector::default()
            .with(FeatureKey::Distance(LeftGrasper, Needle), f64::INFINITY)
            .with(FeatureKey::Distance(RightGrasper, Needle), f64::INFINITY)
            .with(FeatureKey::Distance(RightGrasper, Thread), f64::INFINITY)
            .with(FeatureKey::Intersection(LeftGrasper, Thread), 0.0)
            .with(FeatureKey::Intersection(RightGrasper, Thread), 0.0)
            .with(FeatureKey::Intersection(TissuePoints, Needle), 0.0)
            .with(FeatureKey::MidX(Needle), f64::NAN)
            .with(FeatureKey::MidX(TissuePoints), f64::NAN)
    }

    fn run(v: &FeatureVector) -> [u8; 5] {
        infer_state(v, &RuleSet::builtin(Task::Suturing), &Thresholds::default()).values
    }

    #[test]
    fn left_hold_when_touching_and_closed() {
        let mut v = fv().with(FeatureKey::Distance(LeftGrasper, Needle), 0.5);
        v.alpha_left = false;
        assert_eq!(run(&v)[0], 2);
        assert_eq!(run(&v)[1], 0);
    }

    #[test]
    fn left_contact_with_thread_when_open() {
        let mut v = fv()
            .with(FeatureKey::Intersection(LeftGrasper, Thread), 3.0)
            .with(FeatureKey::Distance(LeftGrasper, Needle), 5.0);
        v.alpha_left = true;
        let s = run(&v);
        assert_eq!((s[0], s[1]), (0, 3));
    }

    #[test]
    fn needle_in_fabric() {
        let v = fv()
            .with(FeatureKey::Intersection(TissuePoints, Needle), 4.0)
            .with(FeatureKey::MidX(Needle), 100.0)
            .with(FeatureKey::MidX(TissuePoints), 150.0);
        assert_eq!(run(&v)[4], 2);
    }

    #[test]
    fn needle_second_branch() {
        let v = fv()
            .with(FeatureKey::Distance(RightGrasper, Thread), 5.0)
            .with(FeatureKey::Distance(LeftGrasper, Needle), 5.0);
        assert_eq!(run(&v)[4], 1);
    }

    #[test]
    fn all_absent_is_zero() {
        assert_eq!(run(&fv()), [0; 5]);
    }

    #[test]
    fn builtins_round_trip_through_text() {
        for task in Task::ALL {
            let rs = RuleSet::builtin(task);
            let again = RuleSet::parse(&rs.to_text(), "rt").unwrap();
            assert_eq!(again, rs, "{task}");
        }
    }

    #[test]
    fn expression_parsing() {
        let e = Expr::parse("(Inter(Ts,N) <= overlap or N.x >= Ts.x) and not (D(RG,T) > 1.5)").unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        assert!(Expr::parse("D(LG,Q) < 1").is_err());
        assert!(Expr::parse("D(LG,N) <").is_err());
        assert!(Expr::parse("open(N)").is_err());
        assert!(Expr::parse("D(LG,N) < 1 extra").is_err());
    }

    #[test]
    fn parse_errors_are_config_errors() {
        let bad_value = "task = Suturing\n[left_hold]\n7: D(LG,N) < near\n";
        assert!(matches!(RuleSet::parse(bad_value, "x"), Err(Error::Config { line: 3, .. })));
        let bad_obj = "task = KnotTying\n[left_hold]\n3: D(LG,N) < near\n";
        assert!(RuleSet::parse(bad_obj, "x").is_err());
        let bad_section = "task = Suturing\n[left_elbow]\n";
        assert!(RuleSet::parse(bad_section, "x").is_err());
    }

    #[test]
    fn ring_encoding_configurable() {
        let text = "task = NeedlePassing\nring_value = 4\n[left_hold]\n4: Inter(LG,R) > overlap and closed(LG)\n";
        let rs = RuleSet::parse(text, "x").unwrap();
        assert_eq!(rs.encodings.ring, 4);
        assert_eq!(RuleSet::parse(&rs.to_text(), "y").unwrap(), rs);
    }
}
