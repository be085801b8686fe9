//! Deterministic constraint automata and their adjacency matrices.
//!
//! States are numbered from 0, which is always the initial state. The
//! transition function is partial: a missing transition forbids the step.
//! A transition may be *marked*, in which case its weight carries the mark
//! variable `v`.

use std::fmt::Write as _;
use std::path::Path;

use crate::algebra::{ULaurent, UMatrix, VPoly};
use crate::error::{Error, Result};
use crate::model::{step_polynomial, Constraint, ConstraintSpec, Pattern, PatternMode, StepSet};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Transition {
    pub target: usize,
    pub marked: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automaton {
    step_set: StepSet,
    labels: Vec<String>,
    /// `delta[state][step]`
    delta: Vec<Vec<Option<Transition>>>,
}

impl Automaton {
    /// Builds an automaton from a full transition table, validating targets.
    pub fn new(step_set: StepSet, labels: Vec<String>, delta: Vec<Vec<Option<Transition>>>) -> Result<Self> {
        let states = delta.len();
        if states == 0 {
            return Err(Error::parse(1, "an automaton needs at least one state"));
        }
        assert_eq!(labels.len(), states);
        for row in &delta {
            assert_eq!(row.len(), step_set.len());
            for t in row.iter().flatten() {
                if t.target >= states {
                    return Err(Error::DanglingState {
                        state: t.target,
                        states,
                    });
                }
            }
        }
        Ok(Automaton {
            step_set,
            labels,
            delta,
        })
    }

    /// The one-state automaton accepting every word.
    pub fn trivial(step_set: &StepSet) -> Self {
        let row = vec![
            Some(Transition {
                target: 0,
                marked: false
            });
            step_set.len()
        ];
        Automaton {
            step_set: step_set.clone(),
            labels: vec!["*".into()],
            delta: vec![row],
        }
    }

    pub fn step_set(&self) -> &StepSet {
        &self.step_set
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn transition(&self, state: usize, step: usize) -> Option<Transition> {
        self.delta[state][step]
    }

    /// All defined transitions as `(from, step, transition)`, in state then step order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, Transition)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter_map(move |(x, t)| t.map(|t| (i, x, t))))
    }

    pub fn has_marks(&self) -> bool {
        self.transitions().any(|(_, _, t)| t.marked)
    }

    /// Runs a word of step indices from the initial state. Returns the final
    /// state and the number of marked transitions, or `None` if some step is
    /// forbidden.
    pub fn run(&self, word: &[usize]) -> Option<(usize, usize)> {
        let mut state = 0;
        let mut marks = 0;
        for &x in word {
            let t = self.delta[state][x]?;
            state = t.target;
            marks += usize::from(t.marked);
        }
        Some((state, marks))
    }

    /// `A(t,u)`: entry `(i,j)` sums `t^len u^alt` (times `v` if marked) over
    /// the transitions from `i` to `j`.
    pub fn adjacency(&self) -> UMatrix {
        let mut a = UMatrix::zero(self.state_count());
        for (i, x, t) in self.transitions() {
            let step = &self.step_set.steps()[x];
            let mark = if t.marked { VPoly::v() } else { VPoly::one() };
            let w = ULaurent::term(mark, step.length, step.altitude);
            a[(i, t.target)] = &a[(i, t.target)] + &w;
        }
        a
    }

    /// `P(t,u)` minus the weights of the steps forbidden in `state`.
    pub fn expected_row_sum(&self, state: usize) -> ULaurent {
        let mut p = step_polynomial(&self.step_set);
        for (x, t) in self.delta[state].iter().enumerate() {
            if t.is_none() {
                p = &p - &self.step_set.steps()[x].weight();
            }
        }
        p
    }

    /// Graphviz rendering; one edge per transition, marked edges in red.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  start [shape=point];\n  start -> q0;\n");
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(out, "  q{i} [label=\"{}\"];", escape(label)).unwrap();
        }
        for (i, x, t) in self.transitions() {
            let s = &self.step_set.steps()[x];
            let style = if t.marked {
                ", color=red, fontcolor=red, style=bold"
            } else {
                ""
            };
            writeln!(
                out,
                "  q{i} -> q{} [label=\"{}({},{})\"{style}];",
                t.target, s.name, s.length, s.altitude
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Renders in the text format read by [`parse_automaton`].
    pub fn to_text(&self) -> String {
        let mut out = format!("states {}\ninitial 0\n", self.state_count());
        for (i, x, t) in self.transitions() {
            let mark = if t.marked { " marked" } else { "" };
            writeln!(out, "trans {i} {} {}{mark}", self.step_set.steps()[x].name, t.target).unwrap();
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Prefix automaton of a contiguous pattern.
///
/// State `i` means "the longest suffix of the input that is a proper prefix
/// of the pattern has length `i`". The single transition that completes the
/// pattern (from state `len-1` on its last step) is removed in avoid mode
/// and marked in mark mode, where it falls back to the longest proper border.
pub fn build_pattern_automaton(s: &StepSet, p: &Pattern) -> Automaton {
    let l = p.len();
    assert!(l > 0, "empty pattern");
    let k = s.len();
    // dfa over states 0..=l, where state l means "just completed".
    let mut dfa = vec![vec![0usize; k]; l + 1];
    dfa[0][p.steps[0]] = 1;
    let mut restart = 0;
    for i in 1..=l {
        dfa[i] = dfa[restart].clone();
        if i < l {
            dfa[i][p.steps[i]] = i + 1;
            restart = dfa[restart][p.steps[i]];
        }
    }
    let border = restart;
    let delta = dfa[..l]
        .iter()
        .map(|row| {
            row.iter()
                .map(|&target| {
                    if target < l {
                        Some(Transition { target, marked: false })
                    } else {
                        match p.mode {
                            PatternMode::Avoid => None,
                            PatternMode::Mark => Some(Transition {
                                target: border,
                                marked: true,
                            }),
                        }
                    }
                })
                .collect()
        })
        .collect();
    let names: Vec<&str> = p.steps.iter().map(|&i| s.steps()[i].name.as_str()).collect();
    let labels = (0..l)
        .map(|i| if i == 0 { "ε".to_string() } else { names[..i].join("") })
        .collect();
    Automaton::new(s.clone(), labels, delta).expect("prefix automaton is well formed")
}

/// Two-state automaton marking ascents.
///
/// State 1 means "the last step went up". Leaving state 1 on a step that does
/// not go up closes an ascent and is marked, so an ascent still open at the
/// end of the path is not counted.
pub fn build_ascent_automaton(s: &StepSet) -> Result<Automaton> {
    if s.steps().iter().all(|x| x.altitude <= 0) {
        return Err(Error::UnsupportedStepSet(
            "ascents need a step with positive altitude".into(),
        ));
    }
    let row = |from_up: bool| {
        s.steps()
            .iter()
            .map(|x| {
                let up = x.altitude > 0;
                Some(Transition {
                    target: usize::from(up),
                    marked: from_up && !up,
                })
            })
            .collect()
    };
    Automaton::new(s.clone(), vec!["flat".into(), "up".into()], vec![row(false), row(true)])
}

/// Parses the line-oriented automaton format.
///
/// ```text
/// # comment
/// states 3
/// initial 0
/// trans 0 U 1
/// trans 1 D 0 marked
/// ```
///
/// Missing transitions are forbidden steps. If the initial state is not 0,
/// it is swapped with state 0.
pub fn parse_automaton(text: &str, steps: &StepSet) -> Result<Automaton> {
    let mut states: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut trans: Vec<(usize, usize, usize, usize, bool)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("expected a state number, found `{s}`")))
        };
        match tok.as_slice() {
            ["states", n] => {
                if states.is_some() {
                    return Err(Error::parse(line_no, "`states` declared twice"));
                }
                let n = num(n)?;
                if n == 0 {
                    return Err(Error::parse(line_no, "an automaton needs at least one state"));
                }
                states = Some(n);
            }
            ["initial", k] => {
                if initial.is_some() {
                    return Err(Error::parse(line_no, "`initial` declared twice"));
                }
                initial = Some(num(k)?);
            }
            ["trans", from, step, to, rest @ ..] => {
                let marked = match rest {
                    [] => false,
                    ["marked"] => true,
                    _ => {
                        return Err(Error::parse(
                            line_no,
                            format!("unexpected `{}` after transition", rest.join(" ")),
                        ))
                    }
                };
                let x = steps
                    .index_of(step)
                    .ok_or_else(|| Error::UnknownStep(step.to_string()))?;
                trans.push((num(from)?, x, num(to)?, line_no, marked));
            }
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("expected `states`, `initial` or `trans`, found `{line}`"),
                ))
            }
        }
    }
    let n = states.ok_or_else(|| Error::parse(1, "missing `states` line"))?;
    let init = initial.unwrap_or(0);
    if init >= n {
        return Err(Error::DanglingState { state: init, states: n });
    }
    let swap = |q: usize| {
        if q == init {
            0
        } else if q == 0 {
            init
        } else {
            q
        }
    };
    let mut delta = vec![vec![None; steps.len()]; n];
    for (from, x, to, _, marked) in trans {
        for q in [from, to] {
            if q >= n {
                return Err(Error::DanglingState { state: q, states: n });
            }
        }
        let slot = &mut delta[swap(from)][x];
        if slot.is_some() {
            return Err(Error::Nondeterministic {
                state: from,
                step: steps.steps()[x].name.clone(),
            });
        }
        *slot = Some(Transition {
            target: swap(to),
            marked,
        });
    }
    let labels = (0..n).map(|q| format!("q{}", swap(q))).collect();
    Automaton::new(steps.clone(), labels, delta)
}

/// Reads and parses an automaton file.
pub fn load_automaton(path: &Path, steps: &StepSet) -> Result<Automaton> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_automaton(&text, steps)
}

/// The automaton a spec describes. Automaton file paths are resolved by
/// `read`, which receives the path exactly as written in the model text.
pub fn automaton_for_with(spec: &ConstraintSpec, read: impl FnOnce(&Path) -> Result<String>) -> Result<Automaton> {
    match &spec.constraint {
        Constraint::None => Ok(Automaton::trivial(&spec.step_set)),
        Constraint::Pattern(p) => Ok(build_pattern_automaton(&spec.step_set, p)),
        Constraint::Ascents => build_ascent_automaton(&spec.step_set),
        Constraint::ExplicitAutomaton(path) => parse_automaton(&read(path)?, &spec.step_set),
    }
}

/// Like [`automaton_for_with`], resolving relative automaton paths against `base`.
pub fn automaton_for(spec: &ConstraintSpec, base: &Path) -> Result<Automaton> {
    automaton_for_with(spec, |p| {
        let path = base.join(p);
        std::fs::read_to_string(&path).map_err(|e| Error::Io {
            path,
            message: e.to_string(),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_spec;

    fn w(c: i64, a: usize, b: i64) -> ULaurent {
        ULaurent::term(VPoly::int(c), a, b)
    }

    fn wv(a: usize, b: i64) -> ULaurent {
        ULaurent::term(VPoly::v(), a, b)
    }

    fn sum(xs: &[ULaurent]) -> ULaurent {
        xs.iter().fold(ULaurent::zero(), |acc, x| &acc + x)
    }

    fn schroder_pattern(names: &[&str], mode: PatternMode) -> Automaton {
        let s = StepSet::schroder();
        build_pattern_automaton(&s, &Pattern::from_names(&s, names, mode).unwrap())
    }

    #[test]
    fn ufud_adjacency_is_the_worked_example() {
        let a = schroder_pattern(&["U", "F", "U", "D"], PatternMode::Avoid).adjacency();
        let z = ULaurent::zero();
        let expected = UMatrix::from_rows(vec![
            vec![sum(&[w(1, 2, 0), w(1, 1, -1)]), w(1, 1, 1), z.clone(), z.clone()],
            vec![w(1, 1, -1), w(1, 1, 1), w(1, 2, 0), z.clone()],
            vec![sum(&[w(1, 2, 0), w(1, 1, -1)]), z.clone(), z.clone(), w(1, 1, 1)],
            vec![z.clone(), w(1, 1, 1), w(1, 2, 0), z],
        ]);
        assert_eq!(a, expected);
    }

    #[test]
    fn uf_adjacency() {
        let a = schroder_pattern(&["U", "F"], PatternMode::Avoid).adjacency();
        let expected = UMatrix::from_rows(vec![
            vec![sum(&[w(1, 2, 0), w(1, 1, -1)]), w(1, 1, 1)],
            vec![w(1, 1, -1), w(1, 1, 1)],
        ]);
        assert_eq!(a, expected);
    }

    #[test]
    fn avoiding_a_single_up_step_leaves_the_down_loop() {
        let s = StepSet::dyck();
        let a = build_pattern_automaton(&s, &Pattern::from_names(&s, &["U"], PatternMode::Avoid).unwrap());
        assert_eq!(a.state_count(), 1);
        assert_eq!(a.adjacency(), UMatrix::from_rows(vec![vec![w(1, 1, -1)]]));
    }

    #[test]
    fn ascent_adjacency() {
        let a = build_ascent_automaton(&StepSet::schroder()).unwrap().adjacency();
        let expected = UMatrix::from_rows(vec![
            vec![sum(&[w(1, 1, -1), w(1, 2, 0)]), w(1, 1, 1)],
            vec![sum(&[wv(1, -1), wv(2, 0)]), w(1, 1, 1)],
        ]);
        assert_eq!(a, expected);
        let one = crate::algebra::rational::int(1);
        let p = step_polynomial(&StepSet::schroder());
        for i in 0..2 {
            assert_eq!(a.row_sum(i).eval_v(&one), p);
        }

        let m = build_ascent_automaton(&StepSet::motzkin()).unwrap().adjacency();
        assert_eq!(m[(1, 0)], sum(&[wv(1, -1), wv(1, 0)]));
        assert_eq!(m[(0, 0)], sum(&[w(1, 1, -1), w(1, 1, 0)]));

        let down = StepSet::new(vec![crate::model::Step::new("D", 1, -1)]).unwrap();
        assert!(matches!(
            build_ascent_automaton(&down),
            Err(Error::UnsupportedStepSet(_))
        ));
    }

    #[test]
    fn row_sums_follow_the_forbidden_steps() {
        for names in [&["U", "F"][..], &["U", "F", "U", "D"], &["U", "U", "U"], &["F"]] {
            let a = schroder_pattern(names, PatternMode::Avoid);
            let m = a.adjacency();
            let p = step_polynomial(a.step_set());
            for i in 0..a.state_count() {
                assert_eq!(m.row_sum(i), a.expected_row_sum(i));
                let forbidden = (0..3).any(|x| a.transition(i, x).is_none());
                assert_eq!(i == names.len() - 1, forbidden);
                if !forbidden {
                    assert_eq!(m.row_sum(i), p);
                }
            }
        }
    }

    #[test]
    fn mark_mode_is_total_with_one_marked_transition() {
        let a = schroder_pattern(&["U", "U", "U"], PatternMode::Mark);
        assert_eq!(a.transitions().count(), 9);
        let marked: Vec<_> = a.transitions().filter(|t| t.2.marked).collect();
        assert_eq!(marked.len(), 1);
        assert_eq!(marked[0].0, 2);
        // UUUU contains UUU twice.
        assert_eq!(a.run(&[0, 0, 0, 0]), Some((2, 2)));
    }

    fn edge_count(dot: &str) -> usize {
        dot.lines()
            .filter(|l| l.contains(" -> ") && !l.contains("start"))
            .count()
    }

    #[test]
    fn dot_export() {
        let trivial = Automaton::trivial(&StepSet::dyck()).export_dot();
        assert_eq!(edge_count(&trivial), 2);
        assert_eq!(trivial.matches("q0 -> q0").count(), 2);
        assert!(trivial.contains("q0 [label=\"*\"]"));

        let ufud = schroder_pattern(&["U", "F", "U", "D"], PatternMode::Avoid).export_dot();
        assert_eq!(edge_count(&ufud), 11);
        assert!(ufud.contains("q3 [label=\"UFU\"]"));

        let asc = build_ascent_automaton(&StepSet::schroder()).unwrap();
        let dot = asc.export_dot();
        assert_eq!(edge_count(&dot), 6);
        assert_eq!(dot.matches(", color=red").count(), 2);
        assert_eq!(dot, asc.clone().export_dot());
    }

    #[test]
    fn file_format_round_trip() {
        let a = schroder_pattern(&["U", "F"], PatternMode::Avoid);
        let text = "# UF avoidance by hand\nstates 2\ninitial 0\n\
                    trans 0 U 1\ntrans 0 D 0\ntrans 0 F 0\ntrans 1 U 1\ntrans 1 D 0\n";
        let b = parse_automaton(text, &StepSet::schroder()).unwrap();
        assert_eq!(b.adjacency(), a.adjacency());
        let c = parse_automaton(&a.to_text(), &StepSet::schroder()).unwrap();
        assert_eq!(c.adjacency(), a.adjacency());
    }

    #[test]
    fn initial_state_is_moved_to_zero() {
        let text = "states 2\ninitial 1\ntrans 1 U 0\ntrans 0 D 1 marked\ntrans 0 U 0\n";
        let a = parse_automaton(text, &StepSet::dyck()).unwrap();
        assert_eq!(
            a.transition(0, 0),
            Some(Transition {
                target: 1,
                marked: false
            })
        );
        assert_eq!(
            a.transition(1, 1),
            Some(Transition {
                target: 0,
                marked: true
            })
        );
        assert_eq!(a.run(&[0, 1]), Some((0, 1)));
    }

    #[test]
    fn file_errors() {
        let s = StepSet::dyck();
        assert_eq!(
            parse_automaton("states 2\ntrans 0 U 2\n", &s),
            Err(Error::DanglingState { state: 2, states: 2 })
        );
        assert_eq!(
            parse_automaton("states 1\ntrans 0 X 0\n", &s),
            Err(Error::UnknownStep("X".into()))
        );
        assert!(matches!(
            parse_automaton("states 1\ntrans 0 U 0\ntrans 0 U 0\n", &s),
            Err(Error::Nondeterministic { .. })
        ));
        assert!(matches!(parse_automaton("trans 0 U 0\n", &s), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_automaton("states 1\nbogus\n", &s),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_automaton("states 1\ninitial 3\n", &s),
            Err(Error::DanglingState { .. })
        ));
    }

    #[test]
    fn spec_dispatch() {
        let spec = parse_spec("steps U=(1,1) D=(1,-1); automaton strip.aut").unwrap();
        let a = automaton_for_with(&spec, |p| {
            assert_eq!(p, Path::new("strip.aut"));
            Ok("states 1\ntrans 0 U 0\n".into())
        })
        .unwrap();
        assert_eq!(a.transitions().count(), 1);
        let err = automaton_for(&spec, Path::new("/nonexistent-dir")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
