//! Brute-force ground truth.
//!
//! Nothing here touches the kernel or the generating-function engine: counts
//! come from dynamic programming over `(length, altitude, state)` and, for
//! small lengths, from listing every word.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::algebra::{TruncSeries, VPoly};
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::model::{Pattern, PatternMode, StepSet};

/// Longest paths [`enumerate_paths`] will list.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    Walk,
    Meander,
}

/// Mark polynomials indexed by length, then `(altitude, state)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DpTable {
    pub max_length: usize,
    pub mode: Mode,
    counts: Vec<BTreeMap<(i64, usize), VPoly>>,
}

impl DpTable {
    pub fn layer(&self, n: usize) -> &BTreeMap<(i64, usize), VPoly> {
        &self.counts[n]
    }

    pub fn get(&self, n: usize, altitude: i64, state: usize) -> VPoly {
        self.counts[n].get(&(altitude, state)).cloned().unwrap_or_default()
    }

    /// All paths of length `n`.
    pub fn total(&self, n: usize) -> VPoly {
        self.counts[n].values().fold(VPoly::zero(), |mut acc, c| {
            acc += c;
            acc
        })
    }

    /// Paths of length `n` ending at `altitude`.
    pub fn at_altitude(&self, n: usize, altitude: i64) -> VPoly {
        self.counts[n]
            .iter()
            .filter(|((h, _), _)| *h == altitude)
            .fold(VPoly::zero(), |mut acc, (_, c)| {
                acc += c;
                acc
            })
    }

    /// `sum_n total(n) t^n`: walks or meanders.
    pub fn totals(&self) -> TruncSeries {
        TruncSeries::from_coeffs(
            (0..=self.max_length).map(|n| self.total(n)).collect(),
            self.max_length + 1,
        )
    }

    /// `sum_n at_altitude(n, 0) t^n`: bridges or excursions.
    pub fn returns(&self) -> TruncSeries {
        TruncSeries::from_coeffs(
            (0..=self.max_length).map(|n| self.at_altitude(n, 0)).collect(),
            self.max_length + 1,
        )
    }
}

/// Generic layer-by-layer counter over an abstract state.
fn dp<S: Ord + Clone>(
    steps: &StepSet,
    mode: Mode,
    max_length: usize,
    ceiling: Option<i64>,
    initial: S,
    step: impl Fn(&S, usize) -> Option<(S, bool)>,
) -> Vec<BTreeMap<(i64, S), VPoly>> {
    let mut layers: Vec<BTreeMap<(i64, S), VPoly>> = vec![BTreeMap::new(); max_length + 1];
    layers[0].insert((0, initial), VPoly::one());
    for n in 0..max_length {
        let (done, rest) = layers.split_at_mut(n + 1);
        for ((h, state), count) in &done[n] {
            for (x, s) in steps.steps().iter().enumerate() {
                if n + s.length > max_length {
                    continue;
                }
                let h2 = h + s.altitude;
                if mode == Mode::Meander && h2 < 0 {
                    continue;
                }
                if ceiling.is_some_and(|c| h2 > c) {
                    continue;
                }
                let Some((next, marked)) = step(state, x) else {
                    continue;
                };
                let add = if marked { count.shift(1) } else { count.clone() };
                *rest[s.length - 1].entry((h2, next)).or_default() += &add;
            }
        }
    }
    layers
}

/// Counts paths accepted by an automaton, by length, altitude and state.
pub fn dp_count(a: &Automaton, mode: Mode, max_length: usize) -> DpTable {
    dp_count_bounded(a, mode, max_length, None)
}

/// Like [`dp_count`], additionally discarding paths that rise above `ceiling`.
pub fn dp_count_bounded(a: &Automaton, mode: Mode, max_length: usize, ceiling: Option<i64>) -> DpTable {
    let counts = dp(a.step_set(), mode, max_length, ceiling, 0usize, |&q, x| {
        a.transition(q, x).map(|t| (t.target, t.marked))
    });
    DpTable {
        max_length,
        mode,
        counts,
    }
}

/// Constraints the oracle can check without an automaton.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Direct {
    None,
    Pattern(Pattern),
    Ascents,
}

/// Counts with the constraint checked on a sliding window of recent steps.
/// The state reported in the table is always 0.
pub fn dp_count_direct(steps: &StepSet, constraint: &Direct, mode: Mode, max_length: usize) -> DpTable {
    let counts = match constraint {
        Direct::None => collapse(dp(steps, mode, max_length, None, (), |_, _| Some(((), false)))),
        Direct::Pattern(p) => {
            let keep = p.len() - 1;
            collapse(dp(steps, mode, max_length, None, Vec::<usize>::new(), |window, x| {
                let mut w = window.clone();
                w.push(x);
                let hit = w.len() == p.len() && w == p.steps;
                if hit && p.mode == PatternMode::Avoid {
                    return None;
                }
                if w.len() > keep {
                    w.remove(0);
                }
                Some((w, hit))
            }))
        }
        Direct::Ascents => collapse(dp(steps, mode, max_length, None, false, |&last_up, x| {
            let up = steps.steps()[x].altitude > 0;
            Some((up, last_up && !up))
        })),
    };
    DpTable {
        max_length,
        mode,
        counts,
    }
}

fn collapse<S>(layers: Vec<BTreeMap<(i64, S), VPoly>>) -> Vec<BTreeMap<(i64, usize), VPoly>> {
    layers
        .into_iter()
        .map(|layer| {
            let mut out: BTreeMap<(i64, usize), VPoly> = BTreeMap::new();
            for ((h, _), c) in layer {
                *out.entry((h, 0)).or_default() += &c;
            }
            out
        })
        .collect()
}

/// A word over a step set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Path {
    pub steps: Vec<usize>,
    pub length: usize,
    /// Altitude after each step.
    pub profile: Vec<i64>,
}

impl Path {
    pub fn final_altitude(&self) -> i64 {
        self.profile.last().copied().unwrap_or(0)
    }

    pub fn is_meander(&self) -> bool {
        self.profile.iter().all(|&h| h >= 0)
    }

    /// Number of (possibly overlapping) contiguous occurrences of `pattern`.
    pub fn occurrences(&self, pattern: &[usize]) -> usize {
        if pattern.is_empty() || pattern.len() > self.steps.len() {
            return 0;
        }
        self.steps.windows(pattern.len()).filter(|w| *w == pattern).count()
    }

    /// Maximal runs of up-steps that are followed by a step that is not up.
    pub fn closed_ascents(&self, set: &StepSet) -> usize {
        let up: Vec<bool> = self.steps.iter().map(|&x| set.steps()[x].altitude > 0).collect();
        up.windows(2).filter(|w| w[0] && !w[1]).count()
    }
}

/// Every word of total length at most `max_length`, shortest first.
pub fn enumerate_paths(s: &StepSet, max_length: usize) -> Result<Vec<Path>> {
    if max_length > ENUMERATION_LIMIT {
        return Err(Error::LimitExceeded {
            requested: max_length,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = vec![Path {
        steps: Vec::new(),
        length: 0,
        profile: Vec::new(),
    }];
    let mut frontier = 0;
    while frontier < out.len() {
        let base = out[frontier].clone();
        frontier += 1;
        for (x, step) in s.steps().iter().enumerate() {
            if base.length + step.length > max_length {
                continue;
            }
            let mut p = base.clone();
            p.steps.push(x);
            p.length += step.length;
            p.profile.push(base.final_altitude() + step.altitude);
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.length.cmp(&b.length).then_with(|| a.steps.cmp(&b.steps)));
    Ok(out)
}

/// Solves `F = 1 + 2xF + x(F - 1 - xF)F` coefficient by coefficient:
/// first-passage decomposition of UF-avoiding Schröder excursions.
pub fn first_passage_schroder_uf(order: usize) -> TruncSeries {
    let mut f: Vec<BigInt> = Vec::with_capacity(order);
    // sq[n] = [x^n] F^2, filled once f[n] is known.
    let mut sq: Vec<BigInt> = Vec::with_capacity(order);
    for n in 0..order {
        let value = if n == 0 {
            BigInt::from(1)
        } else {
            let mut v = BigInt::from(2) * &f[n - 1] + &sq[n - 1] - &f[n - 1];
            if n >= 2 {
                v -= &sq[n - 2];
            }
            v
        };
        f.push(value);
        let s: BigInt = (0..=n).map(|i| &f[i] * &f[n - i]).sum();
        sq.push(s);
    }
    TruncSeries::from_coeffs(
        f.into_iter()
            .map(|c| VPoly::constant(crate::algebra::Rational::from_integer(c)))
            .collect(),
        order,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_pattern_automaton;

    fn ints(s: &TruncSeries) -> Vec<i64> {
        (0..s.order())
            .map(|n| i64::try_from(s.coeff(n).eval_one().to_integer()).unwrap())
            .collect()
    }

    #[test]
    fn binary_walks_and_dyck_excursions() {
        let a = Automaton::trivial(&StepSet::dyck());
        let walks = dp_count(&a, Mode::Walk, 10);
        for n in 0..=10 {
            assert_eq!(walks.total(n), VPoly::int(1 << n));
        }
        let meanders = dp_count(&a, Mode::Meander, 10);
        let e: Vec<i64> = ints(&meanders.returns()).into_iter().step_by(2).collect();
        assert_eq!(e, vec![1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn schroder_numbers() {
        let a = Automaton::trivial(&StepSet::schroder());
        let e: Vec<i64> = ints(&dp_count(&a, Mode::Meander, 8).returns())
            .into_iter()
            .step_by(2)
            .collect();
        assert_eq!(e, vec![1, 2, 6, 22, 90]);
    }

    #[test]
    fn dp_matches_enumeration() {
        let s = StepSet::schroder();
        let p = Pattern::from_names(&s, &["U", "F"], PatternMode::Mark).unwrap();
        let a = build_pattern_automaton(&s, &p);
        let paths = enumerate_paths(&s, 10).unwrap();
        for mode in [Mode::Walk, Mode::Meander] {
            let dp = dp_count(&a, mode, 10);
            let direct = dp_count_direct(&s, &Direct::Pattern(p.clone()), mode, 10);
            for n in 0..=10 {
                let mut expected = VPoly::zero();
                for path in paths.iter().filter(|q| q.length == n) {
                    if mode == Mode::Meander && !path.is_meander() {
                        continue;
                    }
                    expected += &VPoly::monomial(crate::algebra::rational::int(1), path.occurrences(&p.steps));
                }
                assert_eq!(dp.total(n), expected);
                assert_eq!(direct.total(n), expected);
            }
        }
    }

    #[test]
    fn enumeration() {
        let s = StepSet::schroder();
        let paths = enumerate_paths(&s, 2).unwrap();
        let names: Vec<String> = paths
            .iter()
            .filter(|p| p.length == 2)
            .map(|p| p.steps.iter().map(|&x| s.steps()[x].name.as_str()).collect())
            .collect();
        assert_eq!(names, vec!["UU", "UD", "DU", "DD", "F"]);
        assert_eq!(
            enumerate_paths(&s, 13),
            Err(Error::LimitExceeded {
                requested: 13,
                limit: 12
            })
        );
    }

    #[test]
    fn occurrence_counting() {
        let word = |steps: Vec<usize>| Path {
            length: steps.len(),
            profile: vec![0; steps.len()],
            steps,
        };
        // U = 0, F = 2 in the Schröder set.
        assert_eq!(word(vec![0, 2, 0, 2]).occurrences(&[0, 2]), 2);
        assert_eq!(word(vec![0, 0, 0]).occurrences(&[0, 0]), 2);
    }

    #[test]
    fn marks_at_one_are_plain_counts() {
        let s = StepSet::schroder();
        let marked = dp_count_direct(&s, &Direct::Ascents, Mode::Meander, 12);
        let plain = dp_count_direct(&s, &Direct::None, Mode::Meander, 12);
        for n in 0..=12 {
            assert_eq!(VPoly::constant(marked.total(n).eval_one()), plain.total(n));
        }
        assert_eq!(marked.at_altitude(4, 0), VPoly::from_ints(&[1, 4, 1]));
    }

    #[test]
    fn first_passage_quadratic() {
        let f = first_passage_schroder_uf(10);
        assert_eq!(ints(&f), vec![1, 2, 5, 15, 51, 188, 731, 2950, 12235, 51822]);
        let s = StepSet::schroder();
        let p = Pattern::from_names(&s, &["U", "F"], PatternMode::Avoid).unwrap();
        let dp = dp_count(&build_pattern_automaton(&s, &p), Mode::Meander, 18);
        let e: Vec<i64> = ints(&dp.returns()).into_iter().step_by(2).collect();
        assert_eq!(e, ints(&f));
    }

    #[test]
    fn height_ceiling() {
        let a = Automaton::trivial(&StepSet::dyck());
        let dp = dp_count_bounded(&a, Mode::Meander, 8, Some(1));
        // Meanders of height at most 1 alternate U and D.
        for n in 0..=8 {
            assert_eq!(dp.total(n), VPoly::one());
        }
    }
}
