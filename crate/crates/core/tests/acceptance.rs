//! Acceptance criteria. Each test prints one `PASS` or `FAIL` line.

use std::f64::consts::SQRT_2;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use kernelpath::algebra::{Rational, TruncSeries, ULaurent, UMatrix, VPoly, EXACT};
use kernelpath::asymptotics::{approx, estimate_rho, estimate_slopes, moment_table, normality_diagnostic, MomentRow};
use kernelpath::automaton::{automaton_for, Automaton};
use kernelpath::corpus::{corpus_list, oracle_counts};
use kernelpath::gf::{class_series_streaming, substitute_semilength, Class, GfBundle};
use kernelpath::kernel::{adjugate, determinant, kernel_matrix, small_factor};
use kernelpath::model::{parse_spec, Constraint, PatternMode};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const AVOID_UF: &str = "steps U=(1,1) F=(2,0) D=(1,-1); avoid U F";
const ASCENTS: &str = "steps U=(1,1) F=(2,0) D=(1,-1); ascents";
const SCHRODER: &str = "steps U=(1,1) F=(2,0) D=(1,-1);";

const ORACLE_MAX_LENGTH: usize = 14;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const BOUNDARY_ORDER: usize = 24;
const WEIERSTRASS_ORDER: usize = 64;
const MOMENT_SEMILENGTH: usize = 400;
const MOMENT_BUDGET: Duration = Duration::from_secs(300);
const MEAN_SLOPE_TOL: f64 = 1e-3;
const VAR_SLOPE_TOL: f64 = 2e-3;
const RHO_TERMS: usize = 200;
const RHO_TOL: f64 = 1e-4;
const SKEWNESS_SEMILENGTHS: [usize; 3] = [50, 100, 200];
const SKEWNESS_MAX: f64 = 0.15;
const SCANNER_MAX_WORD: usize = 8;
const RING_CASES: u32 = 1000;

fn verdict(id: usize, name: &str, pass: bool, detail: impl AsRef<str>) {
    let tag = if pass { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line survives output capture.
    #[allow(clippy::explicit_write)]
    writeln!(std::io::stderr(), "{tag} criterion {id} ({name}): {}", detail.as_ref()).unwrap();
    assert!(pass, "criterion {id} ({name}) failed: {}", detail.as_ref());
}

fn automaton(spec: &str) -> Automaton {
    automaton_for(&parse_spec(spec).unwrap(), ".".as_ref()).unwrap()
}

fn t_u(c: i64, a: usize, b: i64) -> ULaurent {
    ULaurent::term(VPoly::int(c), a, b)
}

fn tv_u(c: &[i64], a: usize, b: i64) -> ULaurent {
    ULaurent::term(VPoly::from_ints(c), a, b)
}

fn sum(xs: &[ULaurent]) -> ULaurent {
    xs.iter().fold(ULaurent::zero(), |acc, x| &acc + x)
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cases = corpus_list();
    for case in &cases {
        let spec = case.spec().unwrap();
        let a = case.automaton().unwrap();
        let oracle = match case.oracle.ceiling {
            Some(_) => case.oracle_counts(ORACLE_MAX_LENGTH).unwrap(),
            None => oracle_counts(&spec, || Ok(a.clone()), ORACLE_MAX_LENGTH).unwrap(),
        };
        let closed = GfBundle::closed_form(&a.adjacency(), ORACLE_MAX_LENGTH + 1)
            .unwrap()
            .bundle;
        for class in Class::ALL {
            let got = closed.class(class);
            let want = &oracle[&class];
            for n in 0..=ORACLE_MAX_LENGTH {
                if got.coeff(n).eval_one() != want.coeff(n).eval_one() {
                    failures.push(format!("{} {class} n={n}", case.name));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "oracle equivalence",
        failures.is_empty() && elapsed < ORACLE_BUDGET,
        format!(
            "{} cases x 4 classes, lengths <= {ORACLE_MAX_LENGTH}, {} mismatches, {elapsed:.2?}",
            cases.len(),
            failures.len()
        ),
    );
}

#[test]
fn criterion_02_printed_kernels() {
    let uf = determinant(&kernel_matrix(&automaton(AVOID_UF).adjacency()));
    // (t^3 u^2 - t^2 u - t u^2 - t + u) / u
    let uf_printed = sum(&[t_u(1, 3, 1), t_u(-1, 2, 0), t_u(-1, 1, 1), t_u(-1, 1, -1), t_u(1, 0, 0)]);
    let asc = determinant(&kernel_matrix(&automaton(ASCENTS).adjacency()));
    // u^{-1}((t^3 - t^3 v - t) u^2 + (1 - t^2 v) u - t)
    let asc_printed = sum(&[
        tv_u(&[1, -1], 3, 1),
        t_u(-1, 1, 1),
        t_u(1, 0, 0),
        tv_u(&[0, -1], 2, 0),
        t_u(-1, 1, -1),
    ]);
    verdict(
        2,
        "printed kernels",
        uf == uf_printed && asc == asc_printed,
        format!("avoid UF: K = {uf}; ascents: K = {asc}"),
    );
}

#[test]
fn criterion_03_uf_excursion_sequence() {
    let stated: [i64; 7] = [1, 1, 2, 5, 15, 51, 188];
    let e = substitute_semilength(
        &GfBundle::closed_form(&automaton(AVOID_UF).adjacency(), 16)
            .unwrap()
            .bundle
            .e,
    )
    .unwrap();
    let got: Vec<Rational> = (0..7).map(|n| e.coeff(n).eval_one()).collect();
    let want: Vec<Rational> = stated.iter().map(|&x| Rational::from_integer(x.into())).collect();
    let shown: Vec<String> = got.iter().map(ToString::to_string).collect();
    verdict(
        3,
        "avoid-UF excursions by semilength",
        got == want,
        format!("computed {} for n = 0..6, stated {stated:?}", shown.join(", ")),
    );
}

#[test]
fn criterion_04_boundary_identities() {
    let mut details = Vec::new();
    let mut pass = true;
    let t = TruncSeries::monomial(VPoly::one(), 1);
    for spec in [AVOID_UF, ASCENTS] {
        let adj = automaton(spec).adjacency();
        let cf = GfBundle::closed_form(&adj, BOUNDARY_ORDER).unwrap();
        let iterated = GfBundle::iterate(&adj, BOUNDARY_ORDER);
        let m0 = iterated.meander_vector[0].coeff_u(0);
        let g_is_one = cf.boundary.g == ULaurent::one().truncate_t(BOUNDARY_ORDER);
        let phi = (&ULaurent::u() - &ULaurent::constant(&t * &m0)).truncate_t(BOUNDARY_ORDER);
        let phi_ok = cf.boundary.phi == phi;
        let u1 = cf.kernel.small_root().expect("one small root");
        let g0 = cf.boundary.g.coeff_u(0);
        let root_ok = (&g0 * &u1).truncate(BOUNDARY_ORDER) == (&t * &m0).truncate(BOUNDARY_ORDER);
        pass &= g_is_one && phi_ok && root_ok;
        details.push(format!(
            "{spec}: G = 1 {g_is_one}, Phi = u - t m0 {phi_ok}, G u1 = t m0 {root_ok}"
        ));
    }
    verdict(
        4,
        "boundary identities",
        pass,
        format!("mod t^{BOUNDARY_ORDER}; {}", details.join("; ")),
    );
}

#[test]
fn criterion_05_weierstrass() {
    let mut bad = Vec::new();
    let cases = corpus_list();
    for case in &cases {
        let k = determinant(&kernel_matrix(&case.automaton().unwrap().adjacency()));
        let kd = small_factor(&k, WEIERSTRASS_ORDER).unwrap();
        let c_k = -k.min_deg().min(0);
        let lhs = k.mul_u_pow(c_k).truncate_t(WEIERSTRASS_ORDER);
        let rhs = (&kd.small_factor * &kd.unit_factor).truncate_t(WEIERSTRASS_ORDER);
        let degree = kd.small_factor.span().map_or(0, |(_, hi)| hi);
        if lhs != rhs || degree != c_k {
            bad.push(case.name.clone());
        }
    }
    verdict(
        5,
        "Weierstrass identity",
        bad.is_empty(),
        format!(
            "{} corpus kernels to t^{WEIERSTRASS_ORDER}, failing: {bad:?}",
            cases.len()
        ),
    );
}

struct AscentMoments {
    dists: Vec<VPoly>,
    table: Vec<MomentRow>,
    elapsed: Duration,
}

fn ascent_moments() -> &'static AscentMoments {
    static CELL: OnceLock<AscentMoments> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let adj = automaton(ASCENTS).adjacency();
        let e = class_series_streaming(&adj, Class::E, 2 * MOMENT_SEMILENGTH + 1);
        let e = substitute_semilength(&e).unwrap();
        let dists: Vec<VPoly> = (0..=MOMENT_SEMILENGTH).map(|n| e.coeff(n).clone()).collect();
        let table = moment_table(&dists).unwrap();
        AscentMoments {
            dists,
            table,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_06_mean_slope() {
    let m = ascent_moments();
    let (mean, _) = estimate_slopes(&m.table).unwrap();
    let start = Instant::now();
    let got = approx(&mean);
    let target = SQRT_2 - 1.0;
    let elapsed = m.elapsed + start.elapsed();
    verdict(
        6,
        "mean slope",
        (got - target).abs() <= MEAN_SLOPE_TOL && elapsed < MOMENT_BUDGET,
        format!("estimate {got:.7}, target {target:.7}, tolerance {MEAN_SLOPE_TOL:e}, N = {MOMENT_SEMILENGTH}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_07_variance_slope() {
    let m = ascent_moments();
    let (_, var) = estimate_slopes(&m.table).unwrap();
    let got = approx(&var);
    let printed = (188.0 - 133.0 * SQRT_2) / (8.0 * SQRT_2 - 12.0);
    verdict(
        7,
        "variance slope",
        (got - printed).abs() <= VAR_SLOPE_TOL,
        format!("estimate {got:.7}, printed constant {printed:.7}, tolerance {VAR_SLOPE_TOL:e}"),
    );
}

#[test]
fn criterion_08_dominant_singularity() {
    let adj = automaton(SCHRODER).adjacency();
    let e = substitute_semilength(&class_series_streaming(&adj, Class::E, 2 * RHO_TERMS)).unwrap();
    let coeffs: Vec<Rational> = (0..RHO_TERMS).map(|n| e.coeff(n).eval_one()).collect();
    let rho = estimate_rho(&coeffs).unwrap();
    let got = approx(&rho.extrapolated);
    let target = 3.0 - 8f64.sqrt();
    verdict(
        8,
        "dominant singularity",
        (got - target).abs() <= RHO_TOL,
        format!(
            "extrapolated {got:.9} (raw ratio {:.9}), target {target:.9}, tolerance {RHO_TOL:e}, {RHO_TERMS} terms",
            approx(&rho.raw)
        ),
    );
}

#[test]
fn criterion_09_gaussian_diagnostic() {
    let m = ascent_moments();
    let skew: Vec<f64> = SKEWNESS_SEMILENGTHS
        .iter()
        .map(|&n| approx(&normality_diagnostic(&m.dists[n]).unwrap()))
        .collect();
    let decreasing = skew.windows(2).all(|w| w[1].abs() < w[0].abs());
    let last = *skew.last().unwrap();
    verdict(
        9,
        "Gaussian diagnostic",
        last.abs() <= SKEWNESS_MAX && decreasing,
        format!("skewness at semilength {SKEWNESS_SEMILENGTHS:?} = {skew:.5?}, bound {SKEWNESS_MAX}"),
    );
}

fn scanner_agrees() -> (bool, usize) {
    let mut checked = 0usize;
    let mut ok = true;
    for case in corpus_list() {
        let spec = case.spec().unwrap();
        if !matches!(spec.constraint, Constraint::Pattern(_) | Constraint::Ascents) {
            continue;
        }
        let a = case.automaton().unwrap();
        let k = spec.step_set.len();
        let up = |x: usize| spec.step_set.steps()[x].altitude > 0;
        for len in 0..=SCANNER_MAX_WORD {
            for code in 0..k.pow(len as u32) {
                let word: Vec<usize> = (0..len).map(|i| code / k.pow(i as u32) % k).collect();
                let naive = match &spec.constraint {
                    Constraint::Pattern(p) => {
                        let hits = word.windows(p.len()).filter(|w| *w == p.steps.as_slice()).count();
                        match p.mode {
                            PatternMode::Avoid => (hits == 0).then_some(0),
                            PatternMode::Mark => Some(hits),
                        }
                    }
                    _ => Some(word.windows(2).filter(|w| up(w[0]) && !up(w[1])).count()),
                };
                ok &= a.run(&word).map(|(_, marks)| marks) == naive;
                checked += 1;
            }
        }
    }
    (ok, checked)
}

fn det_adj_holds() -> bool {
    corpus_list().iter().all(|case| {
        let m = kernel_matrix(&case.automaton().unwrap().adjacency());
        let k = determinant(&m);
        let scaled: UMatrix = UMatrix::identity(m.dim()).map(|x| x * &k);
        &m * &adjugate(&m) == scaled
    })
}

fn ring_axioms_hold() -> bool {
    let coeff = prop::collection::vec(-3i64..=3, 0..3).prop_map(|c| VPoly::from_ints(&c));
    let series =
        |o: usize| prop::collection::vec(coeff.clone(), 0..4).prop_map(move |c| TruncSeries::from_coeffs(c, o));
    let laurent = move |o: usize| {
        (-2i64..=2, prop::collection::vec(series(o), 0..3)).prop_map(|(lo, c)| ULaurent::from_coeffs(lo, c))
    };
    let strategy = prop_oneof![Just(EXACT), 1usize..6].prop_flat_map(move |o| (laurent(o), laurent(o), laurent(o)));
    let mut runner = TestRunner::new(Config {
        cases: RING_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |(a, b, c)| {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &(-&a)).is_zero());
            Ok(())
        })
        .is_ok()
}

#[test]
fn criterion_10_property_suites() {
    let (scanner, words) = scanner_agrees();
    let det_adj = det_adj_holds();
    let ring = ring_axioms_hold();
    verdict(
        10,
        "property suites",
        scanner && det_adj && ring,
        format!(
            "scanner {scanner} ({words} words of <= {SCANNER_MAX_WORD} steps), det adj = K I {det_adj}, ring axioms {ring} ({RING_CASES} cases)"
        ),
    );
}
