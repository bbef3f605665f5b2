//! Verification suites and space export behind the `mixsym` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mixsym::eisenstein::{gamma0p_constants, logdet_identity, DEFAULT_MAX_TERMS, DEFAULT_TOLERANCE};
use mixsym::hecke::{complex_conjugation, factor, is_prime, verify_hecke_laws};
use mixsym::lattice::{integer_kernel, sublattice_index, LatticeIndex};
use mixsym::pairing::{
    adjointness_check, conjugation_anti_invariant, expected_det, pairing_matrix, perfectness_report, verify_g_identity,
};
use mixsym::report::{all_passed, CheckItem, Status};
use mixsym::sl2::{Family, GroupSpec};
use mixsym::symbols::{build_space, SpaceDocument, SymbolSpace};
use mixsym::MmsError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_PRIMES: [u64; 4] = [2, 3, 5, 7];
pub const DEFAULT_PN: [u64; 6] = [5, 7, 9, 11, 13, 25];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Compute(MmsError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<MmsError> for CliError {
    fn from(e: MmsError) -> Self {
        CliError::Compute(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Rank,
    Manin,
    Hecke,
    Pairing,
    Eis,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Rank => "rank",
            Suite::Manin => "manin",
            Suite::Hecke => "hecke",
            Suite::Pairing => "pairing",
            Suite::Eis => "eis",
            Suite::All => "all",
        }
    }

    fn needs_levels(self) -> bool {
        self != Suite::Eis
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "rank" => Ok(Suite::Rank),
            "manin" => Ok(Suite::Manin),
            "hecke" => Ok(Suite::Hecke),
            "pairing" => Ok(Suite::Pairing),
            "eis" => Ok(Suite::Eis),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Usage(format!(
                "unknown suite {s:?} (expected rank, manin, hecke, pairing, eis or all)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(CliError::Usage(format!(
                "unknown format {s:?} (expected json or markdown)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub family: Family,
    pub levels: Vec<u64>,
    pub primes: Vec<u64>,
    pub pn: Vec<u64>,
    pub tolerance: f64,
    pub max_terms: usize,
    pub strict: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(suite: Suite, family: Family, levels: Vec<u64>) -> Self {
        SuiteConfig {
            suite,
            family,
            levels,
            primes: DEFAULT_PRIMES.to_vec(),
            pn: DEFAULT_PN.to_vec(),
            tolerance: DEFAULT_TOLERANCE,
            max_terms: DEFAULT_MAX_TERMS,
            strict: false,
            out: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.suite.needs_levels() && self.levels.is_empty() {
            return Err(CliError::Usage(format!("suite {} needs --levels", self.suite.name())));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Usage(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_terms == 0 {
            return Err(CliError::Usage("term bound must be positive".into()));
        }
        for &n in &self.levels {
            GroupSpec::new(self.family, n).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if let Some(q) = self.primes.iter().find(|&&q| !is_prime(q)) {
            return Err(CliError::Usage(format!("{q} is not prime")));
        }
        if let Some(m) = self.pn.iter().find(|&&m| !is_odd_prime_power(m)) {
            return Err(CliError::Usage(format!("{m} is not an odd prime power")));
        }
        Ok(())
    }

    fn specs(&self) -> Vec<GroupSpec> {
        self.levels
            .iter()
            .map(|&n| GroupSpec::new(self.family, n).expect("validated"))
            .collect()
    }
}

fn is_odd_prime_power(m: u64) -> bool {
    let f = factor(m);
    f.len() == 1 && f[0].0 != 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub items: Vec<CheckItem>,
    pub version: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        all_passed(&self.items)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.passed()).collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Markdown => {
                let mut s = format!("# mixsym {} suite (version {})\n\n", self.suite, self.version);
                s.push_str("| id | status | detail |\n|---|---|---|\n");
                for item in &self.items {
                    let status = match item.status {
                        Status::Pass => "pass",
                        Status::Fail => "fail",
                        Status::Report => "report",
                    };
                    s.push_str(&format!(
                        "| {} | {status} | {} |\n",
                        item.id,
                        item.detail.replace('|', "\\|")
                    ));
                }
                s
            }
        }
    }
}

/// A check that only counts under `--strict`.
fn conjecture(id: String, ok: bool, detail: String, strict: bool) -> CheckItem {
    if strict {
        CheckItem::check(id, ok, detail)
    } else {
        CheckItem::report(id, detail)
    }
}

fn build(spec: GroupSpec) -> Result<SymbolSpace, CheckItem> {
    build_space(spec).map_err(|e| CheckItem::check(format!("{spec}:build"), false, e.to_string()))
}

fn rank_items(spec: GroupSpec) -> Vec<CheckItem> {
    let space = match build(spec) {
        Ok(s) => s,
        Err(item) => return vec![item],
    };
    let tag = spec.to_string();
    let c = space.cusps.len();
    let mut items = vec![CheckItem::check(
        format!("{tag}:rank"),
        space.rank() == space.expected_rank(),
        format!("rank {} = 2g + 2(c-1) with g = {}, c = {c}", space.rank(), space.genus),
    )];
    let ker = integer_kernel(&space.pi);
    let cusp_rows = space.cusp_sublattice();
    let spans = space.rank() == 0
        || matches!(sublattice_index(&ker, &cusp_rows), Ok(LatticeIndex::Finite(ref i)) if i.is_one());
    items.push(CheckItem::check(
        format!("{tag}:exact-sequence"),
        ker.rows() == c - 1 && spans,
        format!("ker pi free of rank {}, spanned by the cusp generators", ker.rows()),
    ));
    let want = expected_det(&space);
    match space.homology_index() {
        Ok(idx) => items.push(CheckItem::check(
            format!("{tag}:homology-index"),
            idx == LatticeIndex::Finite(want.clone()),
            format!("[ker d : H1(Y)] = {idx}, (1/d)·prod e_c = {want}"),
        )),
        Err(e) => items.push(CheckItem::check(format!("{tag}:homology-index"), false, e.to_string())),
    }
    items
}

/// Predicted Manin index for prime-power levels `pⁿ`, `p ≥ 5`.
pub fn predicted_manin_index(spec: GroupSpec) -> Option<u64> {
    let f = factor(spec.level);
    if f.len() != 1 || f[0].0 < 5 {
        return None;
    }
    let p = f[0].0;
    match spec.family {
        Family::Gamma0 if p % 3 == 1 => Some(1),
        Family::Gamma0 | Family::Gamma1 => Some(3),
        Family::FullSL2 => None,
    }
}

fn manin_items(spec: GroupSpec, strict: bool) -> Vec<CheckItem> {
    let space = match build(spec) {
        Ok(s) => s,
        Err(item) => return vec![item],
    };
    let idx = space.manin_index();
    let id = format!("{spec}:manin-index");
    match predicted_manin_index(spec) {
        Some(want) => vec![CheckItem::check(
            id,
            idx == LatticeIndex::Finite(BigInt::from(want)),
            format!("index {idx}, predicted {want}"),
        )],
        None => {
            let divides = matches!(&idx, LatticeIndex::Finite(i) if i.is_positive() && (BigInt::from(3) % i).is_zero());
            vec![conjecture(id, divides, format!("index {idx}"), strict)]
        }
    }
}

fn hecke_items(spec: GroupSpec, primes: &[u64]) -> Vec<CheckItem> {
    let space = match build(spec) {
        Ok(s) => s,
        Err(item) => return vec![item],
    };
    match verify_hecke_laws(&space, primes) {
        Ok(items) => items,
        Err(e) => vec![CheckItem::check(format!("{spec}:hecke"), false, e.to_string())],
    }
}

fn pairing_items(spec: GroupSpec, primes: &[u64], strict: bool) -> Vec<CheckItem> {
    let space = match build(spec) {
        Ok(s) => s,
        Err(item) => return vec![item],
    };
    let tag = spec.to_string();
    let pm = pairing_matrix(&space);
    let mut items = vec![
        CheckItem::check(format!("{tag}:antisymmetric"), pm.is_antisymmetric(), "P + P^T = 0"),
        CheckItem::check(
            format!("{tag}:six-integral"),
            pm.six_times.to_q() == pm.mat.scale(&BigRational::from_integer(BigInt::from(6))),
            "6·P has integer entries",
        ),
    ];
    match complex_conjugation(&space) {
        Ok(conj) => items.push(CheckItem::check(
            format!("{tag}:conj-anti-invariant"),
            conjugation_anti_invariant(&pm, &conj.mat),
            "<phi∘c, psi> = -<phi, psi∘c>",
        )),
        Err(e) => items.push(CheckItem::check(
            format!("{tag}:conj-anti-invariant"),
            false,
            e.to_string(),
        )),
    }
    let perf = perfectness_report(&space, &pm);
    items.push(CheckItem::check(
        format!("{tag}:perfect"),
        perf.perfect_after_inverting_allowed,
        format!(
            "perfect over {}, elementary divisors of 6P [{}], allowed primes divide {}",
            perf.perfect_over.as_deref().unwrap_or("no localisation"),
            perf.elementary_divisors.join(","),
            perf.allowed
        ),
    ));
    if space.rank() > 0 {
        match verify_g_identity(&space, &pm) {
            Ok(ok) => items.push(CheckItem::check(
                format!("{tag}:g-identity"),
                ok,
                "lambda_to_mms∘lambda_from_dual = G on the classical dual block",
            )),
            Err(e) => items.push(CheckItem::check(format!("{tag}:g-identity"), false, e.to_string())),
        }
    }
    if factor(spec.level).len() == 1 {
        for &q in primes.iter().filter(|&&q| q != 2 && !spec.level.is_multiple_of(q)) {
            match adjointness_check(&space, &pm, q) {
                Ok(ok) => items.push(CheckItem::check(
                    format!("{tag}:adjoint:T{q}"),
                    ok,
                    format!("<T{q} phi, psi> = <phi, W T{q} W psi>"),
                )),
                Err(e) => items.push(CheckItem::check(format!("{tag}:adjoint:T{q}"), false, e.to_string())),
            }
        }
    }
    let det = pm.det();
    let want = expected_det(&space);
    items.push(conjecture(
        format!("{tag}:det"),
        det.abs() == BigRational::from_integer(want.clone()),
        format!(
            "|det P| = {}, (1/d)·prod e_c = {want}, |Pf P| = {}",
            det.abs(),
            pm.abs_pfaffian()
        ),
        strict,
    ));
    items
}

fn eis_items(pn: u64, tolerance: f64, max_terms: usize) -> Vec<CheckItem> {
    let mut items = Vec::new();
    match logdet_identity(pn, tolerance, max_terms) {
        Ok(r) => {
            for rep in [&r.m_prime, &r.m_double_prime] {
                items.push(CheckItem::check(
                    format!("{}:{pn}", rep.identity),
                    rep.pass && rep.lhs.norm() > 0.0,
                    numeric_detail(rep),
                ));
            }
            items.push(CheckItem::report(
                format!("{}:{pn}", r.m_prime_literal.identity),
                numeric_detail(&r.m_prime_literal),
            ));
        }
        Err(e) => items.push(CheckItem::check(format!("logdet:{pn}"), false, e.to_string())),
    }
    items
}

fn numeric_detail(rep: &mixsym::eisenstein::NumericReport) -> String {
    serde_json::to_string(&rep.to_document()).expect("numeric documents serialize")
}

fn constants_items(p: u64) -> Vec<CheckItem> {
    match gamma0p_constants(p, 50) {
        Ok(c) => {
            let (l, a0) = c.period_pair();
            let ok = c.n * c.d == p - 1 && c.coefficients[0] == c.n && l != 0.0 && a0 != 0.0;
            let head: Vec<String> = c.coefficients.iter().take(7).map(|x| x.to_string()).collect();
            vec![CheckItem::check(
                format!("Gamma0({p}):constants"),
                ok,
                format!(
                    "d = {}, n = {}, E = {} + ..., L(E,1) = {}·log {p} = {l:.12}, 2π·a0 = {a0:.12}",
                    c.d,
                    c.n,
                    head.join(", "),
                    c.l_coefficient
                ),
            )]
        }
        Err(e) => vec![CheckItem::check(format!("Gamma0({p}):constants"), false, e.to_string())],
    }
}

/// Runs the configured suite. Check failures are reported as items, not errors.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, CliError> {
    config.validate()?;
    let suites = match config.suite {
        Suite::All => vec![Suite::Rank, Suite::Manin, Suite::Hecke, Suite::Pairing, Suite::Eis],
        s => vec![s],
    };
    let mut items = Vec::new();
    for suite in suites {
        match suite {
            Suite::Rank => {
                for spec in config.specs() {
                    items.extend(rank_items(spec));
                }
            }
            Suite::Manin => {
                for spec in config.specs() {
                    items.extend(manin_items(spec, config.strict));
                }
            }
            Suite::Hecke => {
                for spec in config.specs() {
                    items.extend(hecke_items(spec, &config.primes));
                }
            }
            Suite::Pairing => {
                for spec in config.specs() {
                    items.extend(pairing_items(spec, &config.primes, config.strict));
                }
            }
            Suite::Eis => {
                for &pn in &config.pn {
                    items.extend(eis_items(pn, config.tolerance, config.max_terms));
                }
                let mut primes: Vec<u64> = config.pn.iter().map(|&m| factor(m)[0].0).collect();
                primes.sort();
                primes.dedup();
                for p in primes {
                    items.extend(constants_items(p));
                }
            }
            Suite::All => unreachable!(),
        }
    }
    Ok(Report {
        suite: config.suite.name().to_string(),
        items,
        version: VERSION.to_string(),
    })
}

/// Writes `text` to `path`, mapping failures to I/O errors.
pub fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes the JSON document of the space of `spec` to `path`.
pub fn export_space(spec: GroupSpec, path: &Path) -> Result<SpaceDocument, CliError> {
    let doc = build_space(spec)?.to_document();
    let mut text = serde_json::to_string_pretty(&doc).expect("documents serialize");
    text.push('\n');
    write_output(path, &text)?;
    Ok(doc)
}

/// Reads a space document and rebuilds the space it describes.
pub fn import_space(path: &Path) -> Result<SymbolSpace, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc: SpaceDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(SymbolSpace::from_document(&doc)?)
}

/// Parses a comma-separated list of positive integers.
pub fn parse_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Usage(format!("not a positive integer: {t:?}")))
        })
        .collect()
}

pub fn parse_family(s: &str) -> Result<Family, CliError> {
    s.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))
}
