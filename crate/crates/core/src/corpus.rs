//! Versioned test cases with oracle-generated expected counts.
//!
//! A case is a directory:
//!
//! ```text
//! corpus/<name>/
//!   case.toml        name, spec, provenance, optional [oracle] table
//!   W.b B.b M.b E.b  counts at v = 1, one "n value" pair per line
//!   W.vpoly ...      full mark polynomials, only for marked specs
//!   *.aut            automaton files referenced by the model text
//! ```
//!
//! Expected counts are written by [`GoldenCase::regolden`], which only
//! consults [`crate::oracle`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::algebra::{Rational, TruncSeries, VPoly};
use crate::automaton::{automaton_for_with, Automaton};
use crate::error::{Error, Result};
use crate::gf::Class;
use crate::model::{parse_spec, Constraint, ConstraintSpec};
use crate::oracle::{dp_count, dp_count_bounded, dp_count_direct, Direct, Mode};

/// Longest path length stored in golden files.
pub const GOLDEN_LENGTH: usize = 24;

#[derive(Clone, PartialEq, Eq, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Count paths confined to altitudes `0..=ceiling` with no other
    /// constraint, instead of following the model text.
    pub ceiling: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    name: String,
    spec: String,
    provenance: String,
    #[serde(default)]
    oracle: OracleConfig,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GoldenCase {
    pub name: String,
    pub spec_text: String,
    pub provenance: String,
    pub oracle: OracleConfig,
    /// Expected `h_n(v)` for `n = 0..=GOLDEN_LENGTH`, per class.
    pub expected: BTreeMap<Class, Vec<VPoly>>,
    files: BTreeMap<String, String>,
}

impl GoldenCase {
    /// Builds a case from file names and contents. Missing goldens are
    /// allowed (a fresh case before `regolden`).
    pub fn from_files(files: BTreeMap<String, String>) -> Result<Self> {
        let toml_text = files
            .get("case.toml")
            .ok_or_else(|| Error::InvalidConfig("case has no case.toml".into()))?;
        let case: CaseFile = toml::from_str(toml_text).map_err(|e| Error::InvalidConfig(format!("case.toml: {e}")))?;
        let mut expected = BTreeMap::new();
        for class in Class::ALL {
            let vpoly = files.get(&format!("{class}.vpoly"));
            let bfile = files.get(&format!("{class}.b"));
            let values = match (vpoly, bfile) {
                (Some(text), _) => parse_vpoly_file(text)?,
                (None, Some(text)) => parse_bfile(text)?.into_iter().map(VPoly::constant).collect(),
                (None, None) => continue,
            };
            expected.insert(class, values);
        }
        Ok(GoldenCase {
            name: case.name,
            spec_text: case.spec,
            provenance: case.provenance,
            oracle: case.oracle,
            expected,
            files,
        })
    }

    /// Reads every regular file in `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let io = |path: &Path, e: std::io::Error| Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let mut files = BTreeMap::new();
        for entry in std::fs::read_dir(dir).map_err(|e| io(dir, e))? {
            let entry = entry.map_err(|e| io(dir, e))?;
            let path = entry.path();
            if !path.is_file() {
                continue;
            }
            let name = entry.file_name().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
            files.insert(name, text);
        }
        Self::from_files(files)
    }

    pub fn spec(&self) -> Result<ConstraintSpec> {
        parse_spec(&self.spec_text)
    }

    /// The automaton of the model; automaton files come from the case itself.
    pub fn automaton(&self) -> Result<Automaton> {
        automaton_for_with(&self.spec()?, |p| {
            let key = p.to_string_lossy();
            self.files.get(key.as_ref()).cloned().ok_or_else(|| Error::Io {
                path: PathBuf::from(p),
                message: format!("case `{}` has no file `{key}`", self.name),
            })
        })
    }

    /// Oracle counts of all four classes for lengths `0..=max_length`.
    pub fn oracle_counts(&self, max_length: usize) -> Result<BTreeMap<Class, TruncSeries>> {
        let spec = self.spec()?;
        let (walks, meanders) = match self.oracle.ceiling {
            Some(top) => {
                let free = Automaton::trivial(&spec.step_set);
                let t = dp_count_bounded(&free, Mode::Meander, max_length, Some(top));
                (t.clone(), t)
            }
            None => return oracle_counts(&spec, || self.automaton(), max_length),
        };
        Ok(classes(&walks, &meanders))
    }

    /// Recomputes every golden file from the oracle.
    pub fn regolden(&mut self) -> Result<()> {
        let counts = self.oracle_counts(GOLDEN_LENGTH)?;
        let marked = counts
            .values()
            .any(|s| s.coeffs().iter().any(|c| c.degree().unwrap_or(0) > 0));
        self.expected.clear();
        for (class, series) in counts {
            let values: Vec<VPoly> = (0..=GOLDEN_LENGTH).map(|n| series.coeff(n).clone()).collect();
            let at_one: Vec<Rational> = values.iter().map(VPoly::eval_one).collect();
            self.files.insert(format!("{class}.b"), render_bfile(&at_one));
            if marked {
                self.files.insert(format!("{class}.vpoly"), render_vpoly_file(&values));
            } else {
                self.files.remove(&format!("{class}.vpoly"));
            }
            self.expected.insert(class, values);
        }
        Ok(())
    }

    /// Writes the files of the case into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (name, text) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::Io {
                path,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }
}

/// Oracle counts for a spec. Explicit automata are their own definition,
/// so for those the oracle walks the automaton directly.
pub fn oracle_counts(
    spec: &ConstraintSpec,
    automaton: impl FnOnce() -> Result<Automaton>,
    max_length: usize,
) -> Result<BTreeMap<Class, TruncSeries>> {
    let direct = match &spec.constraint {
        Constraint::None => Direct::None,
        Constraint::Pattern(p) => Direct::Pattern(p.clone()),
        Constraint::Ascents => Direct::Ascents,
        Constraint::ExplicitAutomaton(_) => {
            let a = automaton()?;
            let walks = dp_count(&a, Mode::Walk, max_length);
            let meanders = dp_count(&a, Mode::Meander, max_length);
            return Ok(classes(&walks, &meanders));
        }
    };
    let walks = dp_count_direct(&spec.step_set, &direct, Mode::Walk, max_length);
    let meanders = dp_count_direct(&spec.step_set, &direct, Mode::Meander, max_length);
    Ok(classes(&walks, &meanders))
}

fn classes(walks: &crate::oracle::DpTable, meanders: &crate::oracle::DpTable) -> BTreeMap<Class, TruncSeries> {
    BTreeMap::from([
        (Class::W, walks.totals()),
        (Class::B, walks.returns()),
        (Class::M, meanders.totals()),
        (Class::E, meanders.returns()),
    ])
}

macro_rules! embedded {
    ($name:literal $(, $extra:literal)*) => {
        (
            $name,
            &[
                ("case.toml", include_str!(concat!("../corpus/", $name, "/case.toml"))),
                ("W.b", include_str!(concat!("../corpus/", $name, "/W.b"))),
                ("B.b", include_str!(concat!("../corpus/", $name, "/B.b"))),
                ("M.b", include_str!(concat!("../corpus/", $name, "/M.b"))),
                ("E.b", include_str!(concat!("../corpus/", $name, "/E.b"))),
                $(($extra, include_str!(concat!("../corpus/", $name, "/", $extra))),)*
            ],
        )
    };
}

type Embedded = (&'static str, &'static [(&'static str, &'static str)]);

const EMBEDDED: &[Embedded] = &[
    embedded!("dyck-trivial"),
    embedded!("long-avoid"),
    embedded!("long-mixed-mark", "W.vpoly", "B.vpoly", "M.vpoly", "E.vpoly"),
    embedded!("motzkin-avoid-UU"),
    embedded!("motzkin-trivial"),
    embedded!("schroder-ascents", "W.vpoly", "B.vpoly", "M.vpoly", "E.vpoly"),
    embedded!("schroder-avoid-UF"),
    embedded!("schroder-avoid-UFUD"),
    embedded!("schroder-trivial"),
    embedded!("strip-height2", "strip.aut"),
];

/// The built-in corpus, sorted by name.
pub fn corpus_list() -> Vec<GoldenCase> {
    let mut cases: Vec<GoldenCase> = EMBEDDED
        .iter()
        .map(|(name, files)| {
            let files = files.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            GoldenCase::from_files(files).unwrap_or_else(|e| panic!("corpus case `{name}` is malformed: {e}"))
        })
        .collect();
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    cases
}

/// Looks up a built-in case by name.
pub fn corpus_case(name: &str) -> Option<GoldenCase> {
    corpus_list().into_iter().find(|c| c.name == name)
}

/// One `n value` line per entry.
pub fn render_bfile(values: &[Rational]) -> String {
    let mut out = String::new();
    for (n, v) in values.iter().enumerate() {
        writeln!(out, "{n} {v}").unwrap();
    }
    out
}

/// Parses `n value` lines; `#` starts a comment. Indices must run 0, 1, 2, ...
pub fn parse_bfile(text: &str) -> Result<Vec<Rational>> {
    indexed_lines(text, |line_no, s| {
        s.parse::<Rational>()
            .map_err(|_| Error::parse(line_no, format!("expected a number, found `{s}`")))
    })
}

fn render_vpoly_file(values: &[VPoly]) -> String {
    let mut out = String::new();
    for (n, v) in values.iter().enumerate() {
        writeln!(out, "{n} {v}").unwrap();
    }
    out
}

fn parse_vpoly_file(text: &str) -> Result<Vec<VPoly>> {
    indexed_lines(text, |line_no, s| {
        s.parse::<VPoly>()
            .map_err(|e| Error::parse(line_no, format!("bad polynomial `{s}`: {e}")))
    })
}

fn indexed_lines<T>(text: &str, mut value: impl FnMut(usize, &str) -> Result<T>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (n, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(line_no, "expected `index value`"))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::parse(line_no, format!("expected an index, found `{n}`")))?;
        if n != out.len() {
            return Err(Error::parse(
                line_no,
                format!("expected index {}, found {n}", out.len()),
            ));
        }
        out.push(value(line_no, rest.trim())?);
    }
    Ok(out)
}
