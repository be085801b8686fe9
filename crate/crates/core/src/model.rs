//! Step sets, patterns and the textual constraint language.
//!
//! ```text
//! spec       := steps_decl ";" [constraint]
//! steps_decl := "steps" (NAME "=(" INT "," INT ")")+
//! constraint := ("avoid" | "mark") NAME+ | "ascents" | "automaton" PATH
//! ```
//!
//! Tokens are whitespace separated; `NAME` is `[A-Za-z][A-Za-z0-9]*`. A step
//! `(length, altitude)` must have `length >= 1`.

use std::fmt;
use std::path::PathBuf;

use crate::algebra::{ULaurent, VPoly};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Step {
    pub name: String,
    pub length: usize,
    pub altitude: i64,
}

impl Step {
    pub fn new(name: impl Into<String>, length: usize, altitude: i64) -> Self {
        Step {
            name: name.into(),
            length,
            altitude,
        }
    }

    /// Step weight `t^length u^altitude`.
    pub fn weight(&self) -> ULaurent {
        ULaurent::term(VPoly::one(), self.length, self.altitude)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=({},{})", self.name, self.length, self.altitude)
    }
}

/// A nonempty set of directed steps with unique names and unique vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StepSet {
    steps: Vec<Step>,
}

impl StepSet {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::parse(1, "a step set needs at least one step"));
        }
        for (i, s) in steps.iter().enumerate() {
            if s.length == 0 {
                return Err(Error::InvalidStep {
                    name: s.name.clone(),
                    length: 0,
                });
            }
            for other in &steps[..i] {
                if other.name == s.name {
                    return Err(Error::DuplicateStep(format!("name `{}` declared twice", s.name)));
                }
                if other.length == s.length && other.altitude == s.altitude {
                    return Err(Error::DuplicateStep(format!(
                        "`{}` and `{}` are the same vector",
                        other.name, s.name
                    )));
                }
            }
        }
        Ok(StepSet { steps })
    }

    /// `U=(1,1) D=(1,-1)`: Dyck steps.
    pub fn dyck() -> Self {
        Self::new(vec![Step::new("U", 1, 1), Step::new("D", 1, -1)]).unwrap()
    }

    /// `U=(1,1) D=(1,-1) F=(1,0)`: Motzkin steps.
    pub fn motzkin() -> Self {
        Self::new(vec![Step::new("U", 1, 1), Step::new("D", 1, -1), Step::new("F", 1, 0)]).unwrap()
    }

    /// `U=(1,1) D=(1,-1) F=(2,0)`: Schröder steps.
    pub fn schroder() -> Self {
        Self::new(vec![Step::new("U", 1, 1), Step::new("D", 1, -1), Step::new("F", 2, 0)]).unwrap()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.name == name)
    }

    /// Largest downward jump: `max(-altitude)` clipped at 0.
    pub fn c(&self) -> i64 {
        self.steps.iter().map(|s| -s.altitude).max().unwrap_or(0).max(0)
    }

    /// Largest upward jump: `max(altitude)` clipped at 0.
    pub fn d(&self) -> i64 {
        self.steps.iter().map(|s| s.altitude).max().unwrap_or(0).max(0)
    }

    pub fn max_length(&self) -> usize {
        self.steps.iter().map(|s| s.length).max().unwrap_or(1)
    }

    /// True when every step changes the altitude by the same parity as its
    /// length, so all excursions have even length.
    pub fn forces_even_length(&self) -> bool {
        self.steps
            .iter()
            .all(|s| (s.length as i64 + s.altitude).rem_euclid(2) == 0)
    }

    /// Removes one step (used to compare single-step avoidance with deletion).
    pub fn without(&self, name: &str) -> Result<Self> {
        let steps = self.steps.iter().filter(|s| s.name != name).cloned().collect();
        Self::new(steps)
    }
}

/// The step polynomial `P(t,u) = sum_s t^|s| u^alt(s)`.
pub fn step_polynomial(s: &StepSet) -> ULaurent {
    s.steps.iter().fold(ULaurent::zero(), |acc, step| &acc + &step.weight())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PatternMode {
    Avoid,
    Mark,
}

/// A contiguous pattern, stored as indices into its step set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pattern {
    pub steps: Vec<usize>,
    pub mode: PatternMode,
}

impl Pattern {
    pub fn from_names(set: &StepSet, names: &[&str], mode: PatternMode) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::parse(1, "a pattern needs at least one step"));
        }
        let steps = names
            .iter()
            .map(|n| set.index_of(n).ok_or_else(|| Error::UnknownStep(n.to_string())))
            .collect::<Result<_>>()?;
        Ok(Pattern { steps, mode })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Constraint {
    None,
    Pattern(Pattern),
    /// Marks every maximal run of positive-altitude steps.
    Ascents,
    ExplicitAutomaton(PathBuf),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstraintSpec {
    pub step_set: StepSet,
    pub constraint: Constraint,
}

impl ConstraintSpec {
    /// Whether the model carries a marked statistic (the variable `v`).
    /// Explicit automata are only known to be marked once loaded.
    pub fn declares_mark(&self) -> bool {
        match &self.constraint {
            Constraint::Pattern(p) => p.mode == PatternMode::Mark,
            Constraint::Ascents => true,
            _ => false,
        }
    }
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "steps")?;
        for s in self.step_set.steps() {
            write!(f, " {s}")?;
        }
        write!(f, ";")?;
        match &self.constraint {
            Constraint::None => Ok(()),
            Constraint::Pattern(p) => {
                let kw = match p.mode {
                    PatternMode::Avoid => "avoid",
                    PatternMode::Mark => "mark",
                };
                write!(f, " {kw}")?;
                for &i in &p.steps {
                    write!(f, " {}", self.step_set.steps()[i].name)?;
                }
                Ok(())
            }
            Constraint::Ascents => write!(f, " ascents"),
            Constraint::ExplicitAutomaton(path) => write!(f, " automaton {}", path.display()),
        }
    }
}

/// Canonical text form; `parse_spec(&render_spec(s)) == s`.
pub fn render_spec(spec: &ConstraintSpec) -> String {
    spec.to_string()
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&self) -> usize {
        self.text[..self.pos].matches('\n').count() + 1
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line(), msg)
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected `{ch}`, found `{c}`"))),
            None => Err(self.err(format!("expected `{ch}`, found end of input"))),
        }
    }

    fn name(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() => {}
            Some((_, c)) => return Err(self.err(format!("expected a name, found `{c}`"))),
            None => return Err(self.err("expected a name, found end of input")),
        }
        let end = chars
            .find(|(_, c)| !c.is_ascii_alphanumeric())
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Ok(&rest[..end])
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let end = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+'))))
            .map_or(rest.len(), |(i, _)| i);
        let tok = &rest[..end];
        let value = tok
            .parse::<i64>()
            .map_err(|_| self.err(format!("expected an integer, found `{}`", first_token(rest))))?;
        self.pos += end;
        Ok(value)
    }
}

fn first_token(s: &str) -> &str {
    s.split_whitespace().next().unwrap_or("")
}

/// Parses and validates a spec.
pub fn parse_spec(text: &str) -> Result<ConstraintSpec> {
    let mut cur = Cursor { text, pos: 0 };
    let kw = cur.name()?;
    if kw != "steps" {
        return Err(cur.err(format!("expected `steps`, found `{kw}`")));
    }
    let mut steps = Vec::new();
    while cur.peek() != Some(';') {
        if cur.peek().is_none() {
            return Err(cur.err("expected `;` after the step declarations"));
        }
        let name = cur.name()?.to_string();
        cur.expect('=')?;
        cur.expect('(')?;
        let length = cur.int()?;
        cur.expect(',')?;
        let altitude = cur.int()?;
        cur.expect(')')?;
        if length < 1 {
            return Err(Error::InvalidStep { name, length });
        }
        steps.push(Step::new(name, length as usize, altitude));
    }
    cur.expect(';')?;
    let step_set = StepSet::new(steps)?;

    let line = cur.line();
    let tokens: Vec<&str> = text[cur.pos..].split_whitespace().collect();
    let constraint = match tokens.split_first() {
        None => Constraint::None,
        Some((&kw @ ("avoid" | "mark"), names)) => {
            if names.is_empty() {
                return Err(Error::parse(line, format!("`{kw}` needs at least one step")));
            }
            for n in names {
                if !is_name(n) {
                    return Err(Error::parse(line, format!("`{n}` is not a step name")));
                }
            }
            let mode = if kw == "avoid" {
                PatternMode::Avoid
            } else {
                PatternMode::Mark
            };
            Constraint::Pattern(Pattern::from_names(&step_set, names, mode)?)
        }
        Some((&"ascents", [])) => Constraint::Ascents,
        Some((&"automaton", [path])) => Constraint::ExplicitAutomaton(PathBuf::from(path)),
        Some((&"automaton", _)) => {
            return Err(Error::parse(line, "`automaton` takes exactly one path"));
        }
        Some((kw, _)) => {
            return Err(Error::parse(line, format!("unknown constraint `{kw}`")));
        }
    };
    Ok(ConstraintSpec { step_set, constraint })
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::EXACT;
    use proptest::prelude::*;

    fn t_u(c: i64, a: usize, b: i64) -> ULaurent {
        ULaurent::term(VPoly::int(c), a, b)
    }

    #[test]
    fn parses_schroder_avoiding_uf() {
        let spec = parse_spec("steps U=(1,1) D=(1,-1) F=(2,0); avoid U F").unwrap();
        assert_eq!(spec.step_set, StepSet::schroder());
        assert_eq!(
            spec.constraint,
            Constraint::Pattern(Pattern {
                steps: vec![0, 2],
                mode: PatternMode::Avoid
            })
        );
    }

    #[test]
    fn parses_unconstrained_and_other_forms() {
        let spec = parse_spec("steps U=(1,1) D=(1,-1); ").unwrap();
        assert_eq!(spec.constraint, Constraint::None);
        let spec = parse_spec("steps\n  U = ( 1 , 1 )\n  D=(1,-1) ;\nascents").unwrap();
        assert_eq!(spec.constraint, Constraint::Ascents);
        let spec = parse_spec("steps U=(1,1) D=(1,-1); automaton strip.aut").unwrap();
        assert_eq!(spec.constraint, Constraint::ExplicitAutomaton("strip.aut".into()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_spec("steps U=(0,1)"),
            Err(Error::InvalidStep { length: 0, .. })
        ));
        assert!(matches!(parse_spec("steps U=(-2,1);"), Err(Error::InvalidStep { .. })));
        assert_eq!(
            parse_spec("steps U=(1,1) D=(1,-1); avoid U X"),
            Err(Error::UnknownStep("X".into()))
        );
        assert!(matches!(parse_spec("steps U=(1,1) D=(1,-1)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("stops U=(1,1);"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("steps U=(1,1); avoid"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_spec("steps U=(1,1); wiggle U"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_spec("steps U=(1,x);"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_spec("steps U=(1,1) U=(1,-1);"),
            Err(Error::DuplicateStep(_))
        ));
        assert!(matches!(
            parse_spec("steps U=(1,1) V=(1,1);"),
            Err(Error::DuplicateStep(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_spec("steps U=(1,1)\n D=(1,-1)\n X=(1;") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_polynomials() {
        let p = step_polynomial(&StepSet::schroder());
        assert_eq!(p, &(&t_u(1, 1, 1) + &t_u(1, 1, -1)) + &t_u(1, 2, 0));
        let up = StepSet::new(vec![Step::new("U", 1, 1)]).unwrap();
        assert_eq!(step_polynomial(&up), t_u(1, 1, 1));
        assert_eq!(
            step_polynomial(&StepSet::dyck()),
            ULaurent::constant(crate::algebra::TruncSeries::from_ints(&[0, 1], EXACT))
                .mul_u_pow(1)
                .clone()
                + t_u(1, 1, -1)
        );
    }

    #[test]
    fn c_and_d_are_the_polynomial_span() {
        for set in [StepSet::dyck(), StepSet::motzkin(), StepSet::schroder()] {
            let (lo, hi) = step_polynomial(&set).span().unwrap();
            assert_eq!((lo, hi), (-set.c(), set.d()));
        }
        let long = parse_spec("steps U=(1,2) D=(3,-3) F=(2,0);").unwrap().step_set;
        assert_eq!((long.c(), long.d()), (3, 2));
        assert_eq!(step_polynomial(&long).span(), Some((-3, 2)));
        let up_only = parse_spec("steps U=(1,1) H=(2,2);").unwrap().step_set;
        assert_eq!((up_only.c(), up_only.d()), (0, 2));
    }

    fn arb_spec() -> impl Strategy<Value = ConstraintSpec> {
        let steps = proptest::collection::btree_set((1usize..4, -3i64..4), 1..5);
        (steps, 0usize..5, proptest::collection::vec(0usize..8, 1..4)).prop_map(|(vectors, kind, picks)| {
            let steps: Vec<Step> = vectors
                .iter()
                .enumerate()
                .map(|(i, &(l, a))| Step::new(format!("S{i}"), l, a))
                .collect();
            let n = steps.len();
            let step_set = StepSet::new(steps).unwrap();
            let pattern = |mode| {
                Constraint::Pattern(Pattern {
                    steps: picks.iter().map(|p| p % n).collect(),
                    mode,
                })
            };
            let constraint = match kind {
                0 => Constraint::None,
                1 => pattern(PatternMode::Avoid),
                2 => pattern(PatternMode::Mark),
                3 => Constraint::Ascents,
                _ => Constraint::ExplicitAutomaton("dir/some.aut".into()),
            };
            ConstraintSpec { step_set, constraint }
        })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(spec in arb_spec()) {
            let text = render_spec(&spec);
            prop_assert_eq!(parse_spec(&text).unwrap(), spec);
        }
    }
}
