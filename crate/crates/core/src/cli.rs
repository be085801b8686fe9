//! Command-line front end: spec, automaton, kernel, series, reports.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{LaurentVPoly, Rational, TruncSeries, ULaurent, VPoly};
use crate::asymptotics::{render, MomentReport};
use crate::automaton::{automaton_for, Automaton};
use crate::corpus::{corpus_case, oracle_counts, render_bfile, GoldenCase};
use crate::error::{Error, Result};
use crate::gf::{class_series_streaming, substitute_semilength, Class, GfBundle};
use crate::kernel::KernelData;
use crate::model::{parse_spec, render_spec, ConstraintSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_COMPUTATION: i32 = 4;

pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_TERMS: usize = 20;
pub const DEFAULT_VERIFY_ORDER: usize = 24;

/// Number of coefficients shown per class in the verify summary.
const SUMMARY_TERMS: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "kernelpath",
    version,
    about = "Generating functions of constrained lattice paths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the constraint automaton (dot, json or text).
    Automaton(RunConfig),
    /// Print the kernel and its small-root factorization.
    Kernel(RunConfig),
    /// Print the coefficients of one class.
    Series(RunConfig),
    /// Moments of the marked statistic and growth estimates.
    Moments(RunConfig),
    /// Check closed forms against iteration and the brute-force oracle.
    Verify(VerifyConfig),
}

#[derive(Args, Debug, Clone, Default)]
pub struct SpecSource {
    /// Spec file; automaton paths inside are relative to its directory.
    #[arg(long, conflicts_with = "inline")]
    pub spec: Option<PathBuf>,
    /// Spec text given on the command line.
    #[arg(long)]
    pub inline: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[command(flatten)]
    pub source: SpecSource,
    /// Truncation order in t (default: 64, raised when more is needed).
    #[arg(long)]
    pub order: Option<usize>,
    /// Number of coefficients to print, or the largest n for moments.
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[arg(long, default_value = "E")]
    pub class: Class,
    /// Index by semilength (t^2 becomes x).
    #[arg(long)]
    pub semilength: bool,
    /// Evaluate W or M at this value of u.
    #[arg(long)]
    pub u: Option<Rational>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyConfig {
    #[command(flatten)]
    pub source: SpecSource,
    #[arg(long, default_value_t = DEFAULT_VERIFY_ORDER)]
    pub order: usize,
    /// A corpus case directory, or the name of a built-in case.
    #[arg(long, conflicts_with_all = ["spec", "inline"])]
    pub corpus: Option<String>,
    /// Rewrite the golden files of the `--corpus` directory from the oracle.
    #[arg(long, requires = "corpus")]
    pub regolden: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Bfile,
    Dot,
    Text,
}

/// What the process should print and return.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            code: EXIT_OK,
            ..Default::default()
        }
    }

    fn error(e: &Error) -> Self {
        Outcome {
            stderr: format!("error: {e}\n"),
            code: exit_code(e),
            ..Default::default()
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_COMPUTATION
    }
}

/// Parses arguments (the first is the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stderr: text,
                    code: EXIT_INPUT,
                    ..Default::default()
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    let result = match command {
        Command::Automaton(cfg) => cmd_automaton(cfg),
        Command::Kernel(cfg) => cmd_kernel(cfg),
        Command::Series(cfg) => cmd_series(cfg),
        Command::Moments(cfg) => cmd_moments(cfg),
        Command::Verify(cfg) => return cmd_verify(cfg),
    };
    match result {
        Ok(out) => Outcome::ok(out),
        Err(e) => Outcome::error(&e),
    }
}

/// A parsed spec with its automaton.
pub struct Loaded {
    pub spec: ConstraintSpec,
    pub automaton: Automaton,
}

impl SpecSource {
    pub fn load(&self) -> Result<Loaded> {
        let (text, base) = match (&self.spec, &self.inline) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (text, base)
            }
            (None, Some(text)) => (text.clone(), PathBuf::from(".")),
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "give a spec with --spec FILE or --inline TEXT".into(),
                ))
            }
        };
        let spec = parse_spec(&text)?;
        let automaton = automaton_for(&spec, &base)?;
        Ok(Loaded { spec, automaton })
    }
}

impl RunConfig {
    /// The truncation order; at least `terms` coefficients in the chosen
    /// indexing, for every step length.
    pub fn effective_order(&self, spec: &ConstraintSpec) -> Result<usize> {
        let stride = if self.semilength { 2 } else { 1 };
        let needed = self.terms * spec.step_set.max_length().max(stride);
        match self.order {
            Some(order) if order < needed => Err(Error::InvalidConfig(format!(
                "--order {order} is too small for {} terms (need at least {needed})",
                self.terms
            ))),
            Some(order) => Ok(order),
            None => Ok(DEFAULT_ORDER.max(needed)),
        }
    }
}

pub fn cmd_automaton(cfg: &RunConfig) -> Result<String> {
    let loaded = cfg.source.load()?;
    let a = &loaded.automaton;
    match cfg.format.unwrap_or(Format::Dot) {
        Format::Dot => Ok(a.export_dot()),
        Format::Text => Ok(a.to_text()),
        Format::Json => {
            let steps = a.step_set().steps();
            let transitions: Vec<Value> = a
                .transitions()
                .map(|(from, x, t)| {
                    json!({
                        "from": from,
                        "step": steps[x].name,
                        "to": t.target,
                        "marked": t.marked,
                    })
                })
                .collect();
            let labels: Vec<&str> = (0..a.state_count()).map(|q| a.label(q)).collect();
            pretty(&json!({
                "schema": 1,
                "spec": render_spec(&loaded.spec),
                "states": labels,
                "initial": 0,
                "transitions": transitions,
            }))
        }
        Format::Bfile => Err(Error::InvalidConfig("automata have no b-file form".into())),
    }
}

pub fn cmd_kernel(cfg: &RunConfig) -> Result<String> {
    let loaded = cfg.source.load()?;
    let order = cfg.effective_order(&loaded.spec)?;
    let adj = loaded.automaton.adjacency();
    let k = crate::kernel::determinant(&crate::kernel::kernel_matrix(&adj));
    let kd = crate::kernel::small_factor(&k, order)?;
    let shown = cfg.terms.min(order);
    let small = kd.small_factor.truncate_t(shown);
    let unit = kd.unit_factor.truncate_t(shown);
    match cfg.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "spec: {}", render_spec(&loaded.spec)).unwrap();
            writeln!(out, "kernel: {k}").unwrap();
            writeln!(out, "small roots: {}", kd.e).unwrap();
            writeln!(out, "small factor: {small}").unwrap();
            writeln!(out, "unit factor: {unit}").unwrap();
            if let Some(root) = kd.small_root() {
                writeln!(out, "small root: {}", root.truncate(shown)).unwrap();
            }
            Ok(out)
        }
        Format::Json => pretty(&json!({
            "schema": 1,
            "spec": render_spec(&loaded.spec),
            "kernel": k.to_string(),
            "small_roots": kd.e,
            "small_factor": small.to_string(),
            "unit_factor": unit.to_string(),
        })),
        f => Err(Error::InvalidConfig(format!("kernel output has no {f:?} form"))),
    }
}

/// The coefficients `cmd_series` prints, indexed from 0.
pub fn series_values(cfg: &RunConfig, loaded: &Loaded) -> Result<Vec<VPoly>> {
    if cfg.u.is_some() && cfg.class.ends_at_zero() {
        return Err(Error::InvalidConfig(format!(
            "--u does not apply to class {}",
            cfg.class
        )));
    }
    let order = cfg.effective_order(&loaded.spec)?;
    let closed = GfBundle::closed_form(&loaded.automaton.adjacency(), order)?;
    let one = Rational::from_integer(1.into());
    let mut series = closed.bundle.class_at(cfg.class, cfg.u.as_ref().unwrap_or(&one));
    if cfg.semilength {
        series = substitute_semilength(&series)?;
    }
    (0..cfg.terms).map(|n| series.try_coeff(n).cloned()).collect()
}

pub fn cmd_series(cfg: &RunConfig) -> Result<String> {
    let loaded = cfg.source.load()?;
    let marked = loaded.automaton.has_marks();
    let values = series_values(cfg, &loaded)?;
    match cfg.format.unwrap_or(Format::Text) {
        Format::Text if marked => Ok(values.iter().enumerate().map(|(n, h)| format!("{n} {h}\n")).collect()),
        Format::Text => Ok(format!(
            "{}\n",
            values.iter().map(VPoly::to_string).collect::<Vec<_>>().join(", ")
        )),
        Format::Bfile if marked => Err(Error::InvalidConfig(
            "b-files hold single numbers; use --format text or json for mark polynomials".into(),
        )),
        Format::Bfile => Ok(render_bfile(&values.iter().map(VPoly::eval_one).collect::<Vec<_>>())),
        Format::Json => {
            let coefficients: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(n, h)| {
                    let value = if marked {
                        Value::Array(h.coeffs().iter().map(number).collect())
                    } else {
                        number(&h.eval_one())
                    };
                    json!([n, value])
                })
                .collect();
            pretty(&json!({
                "schema": 1,
                "spec": render_spec(&loaded.spec),
                "class": cfg.class.to_string(),
                "coefficients": coefficients,
            }))
        }
        Format::Dot => Err(Error::InvalidConfig("series have no dot form".into())),
    }
}

/// Distributions `h_0, ..., h_N` of the marked statistic, `N = terms`.
pub fn moment_distributions(cfg: &RunConfig, loaded: &Loaded) -> Result<Vec<VPoly>> {
    if !loaded.automaton.has_marks() {
        return Err(Error::NoMarkInSpec);
    }
    let stride = if cfg.semilength { 2 } else { 1 };
    let order = cfg.order.unwrap_or(0).max(stride * cfg.terms + 1);
    let mut series = class_series_streaming(&loaded.automaton.adjacency(), cfg.class, order);
    if cfg.semilength {
        series = substitute_semilength(&series)?;
    }
    (0..=cfg.terms).map(|n| series.try_coeff(n).cloned()).collect()
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<String> {
    let loaded = cfg.source.load()?;
    let dists = moment_distributions(cfg, &loaded)?;
    let report = MomentReport::from_distributions(&dists)?;
    let opt = |r: &Option<Rational>| r.as_ref().map(render);
    match cfg.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let na = || "n/a".to_string();
            writeln!(out, "spec: {}", render_spec(&loaded.spec)).unwrap();
            writeln!(out, "class: {}", cfg.class).unwrap();
            writeln!(out, "n_max: {}", report.n_max).unwrap();
            match &report.rho_estimate {
                Some(r) => writeln!(out, "rho: {} (raw {})", render(&r.extrapolated), render(&r.raw)).unwrap(),
                None => writeln!(out, "rho: n/a").unwrap(),
            }
            writeln!(out, "mean slope: {}", opt(&report.mean_slope).unwrap_or_else(na)).unwrap();
            writeln!(out, "variance slope: {}", opt(&report.var_slope).unwrap_or_else(na)).unwrap();
            writeln!(
                out,
                "skewness at n_max: {}",
                opt(&report.skewness_at_nmax).unwrap_or_else(na)
            )
            .unwrap();
            writeln!(out, "n mean variance").unwrap();
            for row in &report.convergence_table {
                writeln!(out, "{} {} {}", row.n, render(&row.mean), render(&row.variance)).unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .convergence_table
                .iter()
                .map(|r| json!([r.n, render(&r.mean), render(&r.variance)]))
                .collect();
            pretty(&json!({
                "schema": 1,
                "spec": render_spec(&loaded.spec),
                "class": cfg.class.to_string(),
                "n_max": report.n_max,
                "rho": report.rho_estimate.as_ref().map(|r| render(&r.extrapolated)),
                "mean_slope": opt(&report.mean_slope),
                "variance_slope": opt(&report.var_slope),
                "skewness_at_n_max": opt(&report.skewness_at_nmax),
                "convergence_table": rows,
            }))
        }
        f => Err(Error::InvalidConfig(format!("moment reports have no {f:?} form"))),
    }
}

/// Outcome of one verify check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub spec: String,
    pub order: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("spec: {}\norder: {}\n", self.spec, self.order);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {}: {}", c.name, c.detail).unwrap();
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "verify: {verdict} ({passed}/{} checks)", self.checks.len()).unwrap();
        out
    }
}

/// Runs the four checks: walk and meander closed forms against iteration,
/// every class against `expected`, and the small-root factorization.
pub fn verify(
    spec: &ConstraintSpec,
    automaton: &Automaton,
    expected: &BTreeMap<Class, Vec<VPoly>>,
    order: usize,
) -> Result<VerifyReport> {
    let adj = automaton.adjacency();
    let closed = GfBundle::closed_form(&adj, order)?;
    let iterated = GfBundle::iterate(&adj, order);
    let mut checks = vec![
        dual_route(
            "walk dual route",
            &closed.bundle.walk_vector,
            &iterated.walk_vector,
            order,
        ),
        dual_route(
            "meander dual route",
            &closed.bundle.meander_vector,
            &iterated.meander_vector,
            order,
        ),
    ];
    checks.push(oracle_check(&closed.bundle, expected, order));
    checks.push(weierstrass_check(&closed.kernel, order));
    Ok(VerifyReport {
        spec: render_spec(spec),
        order,
        checks,
    })
}

fn dual_route(name: &'static str, closed: &[ULaurent], iterated: &[ULaurent], order: usize) -> Check {
    for (state, (a, b)) in closed.iter().zip(iterated).enumerate() {
        let (sa, sb) = (a.to_t_major(order), b.to_t_major(order));
        if let Some(n) = (0..order).find(|&n| sa[n] != sb[n]) {
            return Check {
                name,
                passed: false,
                detail: format!(
                    "state {state}, t^{n}: closed form {}, iteration {}",
                    show_slice(&sa[n]),
                    show_slice(&sb[n])
                ),
            };
        }
    }
    Check {
        name,
        passed: true,
        detail: format!("{} states agree to t^{}", closed.len(), order - 1),
    }
}

fn oracle_check(bundle: &GfBundle, expected: &BTreeMap<Class, Vec<VPoly>>, order: usize) -> Check {
    let name = "oracle equivalence";
    let mut summary = Vec::new();
    let mut upto = order;
    for class in Class::ALL {
        let Some(want) = expected.get(&class) else {
            return Check {
                name,
                passed: false,
                detail: format!("no expected values for class {class}"),
            };
        };
        let got = bundle.class(class);
        let n_max = order.min(want.len());
        upto = upto.min(n_max);
        for (n, w) in want.iter().enumerate().take(n_max) {
            let g = got.coeff(n);
            if g != w {
                return Check {
                    name,
                    passed: false,
                    detail: format!("class {class}, n = {n}: computed {g}, expected {w}"),
                };
            }
        }
        let head: Vec<String> = want
            .iter()
            .take(SUMMARY_TERMS)
            .map(|h| h.eval_one().to_string())
            .collect();
        summary.push(format!("{class}: {}, ...", head.join(", ")));
    }
    Check {
        name,
        passed: true,
        detail: format!("W B M E agree for lengths < {upto} ({})", summary.join("; ")),
    }
}

fn weierstrass_check(kd: &KernelData, order: usize) -> Check {
    let name = "weierstrass factorization";
    let product = (&kd.small_factor * &kd.unit_factor).truncate_t(order);
    let pole = usize::try_from(-kd.kernel.min_deg().min(0)).unwrap_or(0);
    let degree = kd.small_factor.span().map_or(0, |(_, hi)| hi.max(0) as usize);
    let detail = if product != kd.cleared.truncate_t(order) {
        "u^e K differs from small factor times unit".to_string()
    } else if degree != kd.e || kd.e != pole {
        format!("small factor degree {degree}, pole order {pole}, e = {}", kd.e)
    } else if !kd.small_factor.coeff_u(kd.e as i64).truncate(order).is_one() {
        "small factor is not monic".to_string()
    } else {
        return Check {
            name,
            passed: true,
            detail: format!("u^{} K = small factor * unit to t^{}", kd.e, order - 1),
        };
    };
    Check {
        name,
        passed: false,
        detail,
    }
}

fn show_slice(s: &LaurentVPoly) -> String {
    if s.is_zero() {
        return "0".into();
    }
    s.terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format!("({c})u^{k}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn cmd_verify(cfg: &VerifyConfig) -> Outcome {
    match verify_outcome(cfg) {
        Ok((report, text)) => Outcome {
            stdout: text,
            code: if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED },
            ..Default::default()
        },
        Err(e) => Outcome::error(&e),
    }
}

fn verify_outcome(cfg: &VerifyConfig) -> Result<(VerifyReport, String)> {
    if cfg.order == 0 {
        return Err(Error::InvalidConfig("--order must be positive".into()));
    }
    let (spec, automaton, expected) = match &cfg.corpus {
        Some(which) => {
            let dir = Path::new(which);
            let mut case = if dir.is_dir() {
                GoldenCase::load(dir)?
            } else {
                corpus_case(which)
                    .ok_or_else(|| Error::InvalidConfig(format!("no corpus case or directory `{which}`")))?
            };
            if cfg.regolden {
                if !dir.is_dir() {
                    return Err(Error::InvalidConfig("--regolden needs a case directory".into()));
                }
                case.regolden()?;
                case.write(dir)?;
            }
            let spec = case.spec()?;
            let automaton = case.automaton()?;
            (spec, automaton, case.expected.clone())
        }
        None => {
            let loaded = cfg.source.load()?;
            let counts = oracle_counts(
                &loaded.spec,
                || Ok(loaded.automaton.clone()),
                cfg.order.saturating_sub(1),
            )?;
            let expected = counts
                .into_iter()
                .map(|(c, s)| (c, coeffs_below(&s, cfg.order)))
                .collect();
            (loaded.spec, loaded.automaton, expected)
        }
    };
    let report = verify(&spec, &automaton, &expected, cfg.order)?;
    let text = match cfg.format.unwrap_or(Format::Text) {
        Format::Text => report.render_text(),
        Format::Json => {
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            pretty(&json!({
                "schema": 1,
                "spec": report.spec,
                "order": report.order,
                "passed": report.passed(),
                "checks": checks,
            }))?
        }
        f => return Err(Error::InvalidConfig(format!("verify reports have no {f:?} form"))),
    };
    Ok((report, text))
}

fn coeffs_below(s: &TruncSeries, n: usize) -> Vec<VPoly> {
    (0..n.min(s.order())).map(|k| s.coeff(k).clone()).collect()
}

/// Integers become JSON numbers, other rationals `"p/q"` strings.
fn number(r: &Rational) -> Value {
    if r.is_integer() {
        Value::Number(serde_json::Number::from_str(&r.to_integer().to_string()).expect("integer literal"))
    } else {
        Value::String(r.to_string())
    }
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
