//! The `tauh` command line and its JSON file formats.
//!
//! ```text
//! tauh dual <SPEC> [-o FILE]
//! tauh transform <SPEC> <FUNCTION> [--variant plain|generalized] [--inverse] [-o FILE]
//! tauh verify <SPEC> [--suite all|group|duality|plancherel|parseval|inversion] [--trials N] [--seed S] [--tol T]
//! tauh catalog [NAME]
//! ```
//!
//! `SPEC` is a catalog name (`affine:5`, `heisenberg:3`, `motion:4`,
//! `affine-continuum:default`) or a path to a group spec file. Exit codes:
//! 0 pass, 1 failed invariant, 2 bad input, 3 contract misuse.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineDomain, AffineGrid, SampledAffineFunction, UniformAxis};
use crate::automorphism::Automorphism;
use crate::catalog::{self, CatalogEntry};
use crate::error::Error;
use crate::lca::{Character, FiniteLcaGroup, KFunction, Role, DEFAULT_MAX_ORDER};
use crate::semidirect::{
    left_invariance_residual, pushforward_check, tau_dual, verify_duality, verify_group_axioms, GTauElement,
    GroupFunction, Side, TauSystem,
};
use crate::tau_fourier::{
    inverse_transform, parseval_residual, preimage_generalized, preimage_plain, transform, ParsevalIdentity, Variant,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping `|H|·|K|`.
pub const MAX_ORDER_ENV: &str = "TAUH_MAX_ORDER";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

/// Above this order the duality suite samples instead of sweeping all pairs.
const DUALITY_EXHAUSTIVE_LIMIT: usize = 2000;

const CONTINUUM_DEFAULT: &str = "affine-continuum:default";

#[derive(Debug, Parser)]
#[command(name = "tauh", version, about = "τ-dual groups and τ-Fourier transforms on semi-direct products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the τ-dual group spec and check both group laws.
    Dual {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply F_τ or F_τ^♯ (or an inverse) to a function file.
    Transform {
        spec: String,
        function: PathBuf,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        inverse: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run invariant suites and print a JSON report.
    Verify {
        spec: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides every check's default tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List built-in groups, or print the spec of one.
    Catalog { name: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Plain,
    Generalized,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Generalized => Variant::Generalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    All,
    Group,
    Duality,
    Plancherel,
    Parseval,
    Inversion,
}

impl Suite {
    const EACH: [Suite; 5] = [Suite::Group, Suite::Duality, Suite::Plancherel, Suite::Parseval, Suite::Inversion];

    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Group => "group",
            Suite::Duality => "duality",
            Suite::Plancherel => "plancherel",
            Suite::Parseval => "parseval",
            Suite::Inversion => "inversion",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

// ---------------------------------------------------------------------------
// File formats

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpecFile {
    FiniteSemidirect(FiniteSpec),
    AffineContinuum(ContinuumSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpec {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Orders `n_i` of the cyclic factors of `K`.
    pub divisors: Vec<i64>,
    pub h: Vec<HEntry>,
    /// `cayley[i][j]` is the index of `h_i·h_j`.
    pub cayley: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HEntry {
    pub label: String,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSpec {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub a: AxisSpec,
    pub b: AxisSpec,
    pub omega: AxisSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    fn to_axis(self) -> crate::Result<UniformAxis> {
        UniformAxis::new(self.min, self.max, self.count)
    }

    fn from_axis(axis: &UniformAxis) -> Self {
        AxisSpec { min: axis.min(), max: axis.max(), count: axis.count() }
    }
}

impl GroupSpecFile {
    pub fn from_system(sys: &TauSystem, name: Option<String>) -> Self {
        let delta = sys.delta_table().iter().map(|d| d.value()).collect::<Vec<_>>();
        GroupSpecFile::FiniteSemidirect(FiniteSpec {
            schema_version: SCHEMA_VERSION,
            name,
            divisors: sys.k().divisors().iter().map(|&n| n as i64).collect(),
            h: (0..sys.h_len())
                .map(|h| HEntry { label: sys.label(h).to_string(), matrix: sys.tau(h).matrix().to_vec() })
                .collect(),
            cayley: sys.cayley().to_vec(),
            delta: delta.iter().any(|&d| d != 1.0).then_some(delta),
        })
    }

    pub fn from_grid(grid: &AffineGrid, name: Option<String>) -> Self {
        GroupSpecFile::AffineContinuum(ContinuumSpec {
            schema_version: SCHEMA_VERSION,
            name,
            a: AxisSpec::from_axis(grid.a()),
            b: AxisSpec::from_axis(grid.b()),
            omega: AxisSpec::from_axis(grid.omega()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideTag {
    Primal,
    Dual,
}

impl From<Side> for SideTag {
    fn from(s: Side) -> Self {
        match s {
            Side::Primal => SideTag::Primal,
            Side::Dual => SideTag::Dual,
        }
    }
}

impl From<SideTag> for Side {
    fn from(s: SideTag) -> Self {
        match s {
            SideTag::Primal => Side::Primal,
            SideTag::Dual => Side::Dual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub schema_version: u32,
    pub side: SideTag,
    /// Which transform produced a dual-side file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<VariantArg>,
    pub entries: Vec<FunctionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    pub h: HKey,
    pub k_or_omega: Vec<Coord>,
    pub re: f64,
    pub im: f64,
}

/// An `H` label on finite groups, the scale `a` on the continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HKey {
    Label(String),
    Number(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Real(f64),
}

impl Coord {
    fn as_real(self) -> f64 {
        match self {
            Coord::Int(i) => i as f64,
            Coord::Real(x) => x,
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub spec: String,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

// ---------------------------------------------------------------------------
// Errors and loading

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Contract(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Contract(_) => EXIT_CONTRACT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Contract(m) => write!(f, "contract error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SideMismatch { .. } | Error::RoleMismatch(_) => CliError::Contract(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A resolved `SPEC` argument.
pub enum LoadedSpec {
    Finite { name: String, system: TauSystem, entry: Option<CatalogEntry> },
    Continuum { name: String, grid: AffineGrid },
}

fn max_order_from_env() -> CliResult<u64> {
    match std::env::var(MAX_ORDER_ENV) {
        Err(_) => Ok(DEFAULT_MAX_ORDER),
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| CliError::Input(format!("{MAX_ORDER_ENV}={v:?} is not a positive integer"))),
    }
}

fn check_order(order: u64, cap: u64) -> CliResult<()> {
    if order > cap {
        return Err(Error::OrderTooLarge { order, cap }.into());
    }
    Ok(())
}

fn catalog_order(family: &str, n: i64) -> Option<u64> {
    let n = u64::try_from(n).ok()?;
    let nn = n.checked_mul(n)?;
    match family {
        "affine" => Some(nn),
        "heisenberg" => nn.checked_mul(n),
        "motion" => nn.checked_mul(4),
        _ => None,
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_spec(arg: &str, cap: u64) -> CliResult<LoadedSpec> {
    let path = Path::new(arg);
    if !path.exists() {
        if arg == CONTINUUM_DEFAULT {
            return Ok(LoadedSpec::Continuum { name: arg.to_string(), grid: AffineGrid::desk() });
        }
        if let Some((family, n)) = arg.split_once(':') {
            if let (Ok(n), true) = (n.parse::<i64>(), catalog::FAMILIES.contains(&family)) {
                if let Some(order) = catalog_order(family, n) {
                    check_order(order, cap)?;
                }
            }
            let entry = catalog::lookup(arg)?;
            return Ok(LoadedSpec::Finite { name: arg.to_string(), system: entry.system.clone(), entry: Some(entry) });
        }
    }
    let spec: GroupSpecFile = read_json(path)?;
    spec_to_loaded(spec, arg, cap)
}

fn check_schema(v: u32) -> CliResult<()> {
    if v != SCHEMA_VERSION {
        return Err(CliError::Input(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

pub fn spec_to_loaded(spec: GroupSpecFile, fallback_name: &str, cap: u64) -> CliResult<LoadedSpec> {
    match spec {
        GroupSpecFile::FiniteSemidirect(s) => {
            check_schema(s.schema_version)?;
            let k = FiniteLcaGroup::with_max_order(&s.divisors, cap)?;
            check_order((s.h.len() as u64).saturating_mul(k.order()), cap)?;
            let autos = s.h.iter().map(|e| Automorphism::new(&k, e.matrix.clone())).collect::<crate::Result<Vec<_>>>()?;
            let labels = s.h.iter().map(|e| e.label.clone()).collect();
            let system = TauSystem::new(k, labels, autos, s.cayley, s.delta)?;
            Ok(LoadedSpec::Finite { name: s.name.unwrap_or_else(|| fallback_name.to_string()), system, entry: None })
        }
        GroupSpecFile::AffineContinuum(s) => {
            check_schema(s.schema_version)?;
            let grid = AffineGrid::new(s.a.to_axis()?, s.b.to_axis()?, s.omega.to_axis()?)?;
            Ok(LoadedSpec::Continuum { name: s.name.unwrap_or_else(|| fallback_name.to_string()), grid })
        }
    }
}

// ---------------------------------------------------------------------------
// Function files

fn h_index(sys: &TauSystem, key: &HKey) -> CliResult<usize> {
    let label = match key {
        HKey::Label(s) => s.clone(),
        HKey::Number(x) if x.fract() == 0.0 => format!("{}", *x as i64),
        HKey::Number(x) => return Err(CliError::Input(format!("{x} is not an H label"))),
    };
    Ok(sys.label_index(&label)?)
}

pub fn function_from_file(sys: Arc<TauSystem>, file: &FunctionFile) -> CliResult<GroupFunction> {
    check_schema(file.schema_version)?;
    let k = sys.k().clone();
    let mut values = vec![Complex64::new(0.0, 0.0); sys.order()];
    let mut seen = HashSet::new();
    for e in &file.entries {
        let h = h_index(&sys, &e.h)?;
        if e.k_or_omega.len() != k.rank() {
            return Err(Error::DimensionMismatch { expected: k.rank(), found: e.k_or_omega.len() }.into());
        }
        let coords = e
            .k_or_omega
            .iter()
            .map(|c| match c {
                Coord::Int(i) => Ok(*i),
                Coord::Real(x) => Err(CliError::Input(format!("finite coordinate {x} is not an integer"))),
            })
            .collect::<CliResult<Vec<i64>>>()?;
        let x = k.element_strict(&coords)?;
        let index = h * k.len() + k.index_of(&x);
        if !seen.insert(index) {
            return Err(CliError::Input(format!("duplicate entry for h={} at {coords:?}", sys.label(h))));
        }
        values[index] = Complex64::new(e.re, e.im);
    }
    Ok(GroupFunction::from_values(sys, file.side.into(), values)?)
}

pub fn function_to_file(f: &GroupFunction, transform: Option<VariantArg>) -> FunctionFile {
    let sys = f.system();
    let k = sys.k();
    let mut entries = Vec::new();
    for h in 0..sys.h_len() {
        for (i, v) in f.row(h).iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                entries.push(FunctionEntry {
                    h: HKey::Label(sys.label(h).to_string()),
                    k_or_omega: k.element_at(i).to_i64().into_iter().map(Coord::Int).collect(),
                    re: v.re,
                    im: v.im,
                });
            }
        }
    }
    FunctionFile { schema_version: SCHEMA_VERSION, side: f.side().into(), transform, entries }
}

fn node_index(axis: &UniformAxis, x: f64, what: &str) -> CliResult<usize> {
    let t = (x - axis.min()) / axis.step();
    let i = t.round();
    if !(0.0..axis.count() as f64).contains(&i) || (axis.node(i as usize) - x).abs() > 1e-9 * axis.step() {
        return Err(CliError::Input(format!("{what} = {x} is not a grid node")));
    }
    Ok(i as usize)
}

pub fn affine_function_from_file(
    grid: AffineGrid,
    domain: AffineDomain,
    file: &FunctionFile,
) -> CliResult<SampledAffineFunction> {
    check_schema(file.schema_version)?;
    let mut f = SampledAffineFunction::zeros(grid, domain);
    let inner = f.x_axis();
    let mut values = f.values().to_vec();
    let mut seen = HashSet::new();
    for e in &file.entries {
        let a = match &e.h {
            HKey::Number(a) => *a,
            HKey::Label(s) => return Err(CliError::Input(format!("continuum scale must be a number, got {s:?}"))),
        };
        if e.k_or_omega.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: e.k_or_omega.len() }.into());
        }
        let ia = node_index(grid.a(), a, "a")?;
        let ix = node_index(&inner, e.k_or_omega[0].as_real(), "coordinate")?;
        let index = ia * inner.count() + ix;
        if !seen.insert(index) {
            return Err(CliError::Input(format!("duplicate entry at a={a}")));
        }
        values[index] = Complex64::new(e.re, e.im);
    }
    f = SampledAffineFunction::new(grid, domain, values)?;
    Ok(f)
}

pub fn affine_function_to_file(f: &SampledAffineFunction) -> FunctionFile {
    let (side, transform) = match f.domain() {
        AffineDomain::Spatial => (SideTag::Primal, None),
        AffineDomain::Frequency(Variant::Plain) => (SideTag::Dual, Some(VariantArg::Plain)),
        AffineDomain::Frequency(Variant::Generalized) => (SideTag::Dual, Some(VariantArg::Generalized)),
    };
    let inner = f.x_axis();
    let mut entries = Vec::new();
    for ia in 0..f.grid().a().count() {
        for (ix, v) in f.row(ia).iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                entries.push(FunctionEntry {
                    h: HKey::Number(f.grid().a().node(ia)),
                    k_or_omega: vec![Coord::Real(inner.node(ix))],
                    re: v.re,
                    im: v.im,
                });
            }
        }
    }
    FunctionFile { schema_version: SCHEMA_VERSION, side, transform, entries }
}

// ---------------------------------------------------------------------------
// Commands

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    match output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => writeln!(stdout, "{text}").map_err(|e| CliError::Input(e.to_string())),
    }
}

fn cmd_dual(spec: &str, output: Option<&Path>, cap: u64, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let (name, system, entry) = match load_spec(spec, cap)? {
        LoadedSpec::Finite { name, system, entry } => (name, system, entry),
        LoadedSpec::Continuum { .. } => {
            return Err(CliError::Contract(
                "the affine continuum dual is (0,∞) ⋉ ℝ̂ in closed form; run `verify --suite group` on it instead".into(),
            ))
        }
    };
    let dual = tau_dual(&system)?;
    emit_json(&GroupSpecFile::from_system(&dual, Some(format!("dual of {name}"))), output, out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut ok = true;
    for side in [Side::Primal, Side::Dual] {
        let r = verify_group_axioms(&system, side, &mut rng, 10_000)?;
        ok &= r.passed();
        let mode = if r.exhaustive { "exhaustive" } else { "sampled" };
        let _ = writeln!(err, "{side} group axioms: {} checks ({mode}), {} failures", r.checked, r.failures);
    }
    if let Some(entry) = entry {
        let r = entry.verify_oracle(&mut rng)?;
        ok &= r.passed();
        let _ = writeln!(err, "dual law oracle: {} pairs, {} mismatches", r.pairs, r.mismatches);
    }
    let _ = writeln!(err, "τ̂ table:");
    for h in 0..dual.h_len() {
        let _ = writeln!(err, "  {}: {}", dual.label(h), dual.tau(h));
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn resolve_variant(explicit: Option<VariantArg>, file: Option<VariantArg>, inverse: bool) -> CliResult<VariantArg> {
    match (explicit, file, inverse) {
        (Some(e), Some(f), true) if e != f => Err(CliError::Contract(format!(
            "function file was produced by the {f:?} transform but --variant {e:?} was requested"
        ))),
        (Some(e), _, _) => Ok(e),
        (None, Some(f), true) => Ok(f),
        _ => Ok(VariantArg::Plain),
    }
}

fn cmd_transform(
    spec: &str,
    function: &Path,
    variant: Option<VariantArg>,
    inverse: bool,
    output: Option<&Path>,
    cap: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let loaded = load_spec(spec, cap)?;
    let file: FunctionFile = read_json(function)?;
    let expected = if inverse { SideTag::Dual } else { SideTag::Primal };
    if file.side != expected {
        let direction = if inverse { "inverse" } else { "forward" };
        return Err(CliError::Contract(format!("{direction} transform needs a {expected:?} function, got {:?}", file.side)));
    }
    let v = resolve_variant(variant, file.transform, inverse)?;
    match loaded {
        LoadedSpec::Finite { system, .. } => {
            let f = function_from_file(Arc::new(system), &file)?;
            let result = if inverse { inverse_transform(&f, v.into())? } else { transform(&f, v.into())?.function };
            let _ = writeln!(err, "input norm² ({}): {}", f.side(), f.norm_sq());
            let _ = writeln!(err, "output norm² ({}): {}", result.side(), result.norm_sq());
            emit_json(&function_to_file(&result, (!inverse).then_some(v)), output, out)?;
        }
        LoadedSpec::Continuum { grid, .. } => {
            let domain = if inverse { AffineDomain::Frequency(v.into()) } else { AffineDomain::Spatial };
            let f = affine_function_from_file(grid, domain, &file)?;
            let result =
                if inverse { affine::affine_reconstruct(&f, v.into())? } else { affine::affine_transform(&f, v.into())? };
            for (what, g) in [("input", &f), ("output", &result)] {
                if let Some(w) = g.truncation_check() {
                    let _ = writeln!(err, "warning: {what} boundary magnitude {:e} exceeds {:e}", w.boundary_max, w.threshold);
                }
            }
            let _ = writeln!(err, "input norm²: {}", f.norm_sq());
            let _ = writeln!(err, "output norm²: {}", result.norm_sq());
            emit_json(&affine_function_to_file(&result), output, out)?;
        }
    }
    Ok(EXIT_PASS)
}

struct Checks {
    tol_override: Option<f64>,
    records: BTreeMap<String, CheckRecord>,
}

impl Checks {
    fn add(&mut self, name: impl Into<String>, residual: f64, default_tol: f64) {
        let name = name.into();
        let tolerance = self.tol_override.unwrap_or(default_tol);
        let pass = residual <= tolerance;
        self.records.insert(name.clone(), CheckRecord { name, residual, tolerance, pass });
    }
}

fn finite_suite(sys: &Arc<TauSystem>, entry: Option<&CatalogEntry>, suite: Suite, trials: usize, rng: &mut ChaCha8Rng, c: &mut Checks) -> CliResult<()> {
    let random = |side, rng: &mut ChaCha8Rng| GroupFunction::random(Arc::clone(sys), side, rng);
    match suite {
        Suite::Group => {
            for side in [Side::Primal, Side::Dual] {
                let r = verify_group_axioms(sys, side, rng, trials)?;
                c.add(format!("group.{side}.axioms"), r.failures as f64, 0.0);
            }
            if let Some(entry) = entry {
                c.add("group.dual_law_oracle", entry.verify_oracle(rng)?.mismatches as f64, 0.0);
            }
        }
        Suite::Duality => {
            if sys.order() <= DUALITY_EXHAUSTIVE_LIMIT {
                let r = verify_duality(sys)?;
                c.add("duality.theta_homomorphism", (r.theta_failures + usize::from(!r.theta_bijective)) as f64, 0.0);
                c.add("duality.lemma", r.lemma_failures as f64, 0.0);
            } else {
                let (theta, lemma) = sampled_duality(sys, trials, rng)?;
                c.add("duality.theta_homomorphism", theta as f64, 0.0);
                c.add("duality.lemma", lemma as f64, 0.0);
            }
            let mut push = 0.0f64;
            for _ in 0..trials {
                let g = KFunction::from_fn(sys.k().clone(), Role::Dual, |_| Complex64::new(rng.random::<f64>(), 0.0));
                for h in 0..sys.h_len() {
                    let (lhs, rhs) = pushforward_check(sys, h, &g)?;
                    push = push.max((lhs - rhs).abs());
                }
            }
            c.add("duality.pushforward", push, 0.0);
            for side in [Side::Primal, Side::Dual] {
                let mut worst = 0.0f64;
                for _ in 0..trials {
                    let f = random(side, rng);
                    let g0 = GTauElement {
                        h: rng.random_range(0..sys.h_len()),
                        k: sys.k().element_at(rng.random_range(0..sys.k().len())),
                    };
                    worst = worst.max(left_invariance_residual(&f, &g0)?);
                }
                c.add(format!("duality.{side}.haar_left_invariance"), worst, 1e-10);
            }
        }
        Suite::Plancherel => {
            for (name, v) in [("plain", Variant::Plain), ("generalized", Variant::Generalized)] {
                let mut worst = 0.0f64;
                for _ in 0..trials {
                    let f = random(Side::Primal, rng);
                    let big = transform(&f, v)?.function;
                    worst = worst.max((big.norm_sq() - f.norm_sq()).abs() / f.norm_sq());
                }
                c.add(format!("plancherel.{name}"), worst, 1e-10);
            }
        }
        Suite::Parseval => {
            let mut worst = [0.0f64; 4];
            for _ in 0..trials {
                let f = random(Side::Primal, rng);
                let psi = random(Side::Dual, rng);
                for (slot, id) in worst.iter_mut().zip(ParsevalIdentity::ALL) {
                    *slot = slot.max(parseval_residual(&f, &psi, id)?);
                }
            }
            for (w, id) in worst.iter().zip(ParsevalIdentity::ALL) {
                c.add(format!("parseval.{}", id.name()), *w, 1e-10);
            }
        }
        Suite::Inversion => {
            for (name, v) in [("plain", Variant::Plain), ("generalized", Variant::Generalized)] {
                let (mut round, mut onto) = (0.0f64, 0.0f64);
                for _ in 0..trials {
                    let f = random(Side::Primal, rng);
                    let back = inverse_transform(&transform(&f, v)?.function, v)?;
                    round = round.max(back.sup_distance(&f)?);
                    let phi = random(Side::Dual, rng);
                    let pre = match v {
                        Variant::Plain => preimage_plain(&phi)?,
                        Variant::Generalized => preimage_generalized(&phi)?,
                    };
                    onto = onto.max(transform(&pre, v)?.function.sup_distance(&phi)?);
                }
                c.add(format!("inversion.{name}.round_trip"), round, 1e-12);
                c.add(format!("inversion.{name}.surjectivity"), onto, 1e-10);
            }
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok(())
}

/// Θ on random pairs and the pairing lemma at random points.
fn sampled_duality(sys: &TauSystem, trials: usize, rng: &mut ChaCha8Rng) -> CliResult<(usize, usize)> {
    let double = tau_dual(&tau_dual(sys)?)?;
    let k = sys.k();
    let pick = |rng: &mut ChaCha8Rng| GTauElement {
        h: rng.random_range(0..sys.h_len()),
        k: k.element_at(rng.random_range(0..k.len())),
    };
    let (mut theta, mut lemma) = (0, 0);
    for _ in 0..trials {
        let (x, y) = (pick(rng), pick(rng));
        if sys.multiply(&x, &y)? != double.multiply(&x, &y)? {
            theta += 1;
        }
        let w = k.element_at(rng.random_range(0..k.len()));
        let lhs = k.pairing_phase(&w, &sys.tau(x.h).apply(&x.k)?)?;
        let rhs = k.pairing_phase(&double.tau(x.h).apply(&x.k)?, &w)?;
        let via = sys.omega_action(sys.h_inverse(x.h), &Character::new(w))?.phase(k, &x.k)?;
        if lhs != rhs || lhs != via {
            lemma += 1;
        }
    }
    Ok((theta, lemma))
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn continuum_suite(grid: &AffineGrid, suite: Suite, trials: usize, rng: &mut ChaCha8Rng, c: &mut Checks) -> CliResult<()> {
    let f = affine::gaussian_strip(*grid);
    let closed_form = grid.a().min() == 1.0 && grid.a().max() == 2.0;
    let point = |rng: &mut ChaCha8Rng| (rng.random_range(0.25..4.0), rng.random_range(-8.0..8.0));
    match suite {
        Suite::Group => {
            let (mut assoc, mut inv, mut oracle, mut primal, mut delta) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let dm = affine::affine_dual_multiply;
            for _ in 0..trials {
                let (x, y, z) = (point(rng), point(rng), point(rng));
                let l = dm(dm(x, y)?, z)?;
                let r = dm(x, dm(y, z)?)?;
                assoc = assoc.max(((l.0 - r.0) / l.0).abs()).max((l.1 - r.1).abs() / (1.0 + l.1.abs()));
                let e = dm(x, affine::affine_dual_invert(x)?)?;
                inv = inv.max((e.0 - 1.0).abs()).max(e.1.abs() / (1.0 + x.1.abs()));
                let got = dm(x, y)?;
                if got != (x.0 * y.0, x.1 + x.0.recip() * y.1) {
                    oracle += 1.0;
                }
                let mp = affine::affine_multiply;
                let l = mp(mp(x, y)?, z)?;
                let r = mp(x, mp(y, z)?)?;
                primal = primal.max(((l.0 - r.0) / l.0).abs()).max((l.1 - r.1).abs() / (1.0 + l.1.abs()));
                let d = affine::affine_delta(x.0 * y.0)?.value();
                let dd = (affine::affine_delta(x.0)? * affine::affine_delta(y.0)?).value();
                delta = delta.max((d - dd).abs() / d);
            }
            c.add("group.dual.associativity", assoc, 1e-12);
            c.add("group.dual.inverse", inv, 1e-12);
            c.add("group.dual_law_oracle", oracle, 0.0);
            c.add("group.primal.associativity", primal, 1e-12);
            c.add("group.delta_multiplicative", delta, 1e-15);
        }
        Suite::Duality => {
            let mut push = 0.0f64;
            for i in 0..grid.a().count() {
                let a = grid.a().node(i);
                let (lhs, rhs) =
                    affine::affine_pushforward_check(grid.omega(), a, |w| (-std::f64::consts::PI * w * w).exp())?;
                push = push.max((lhs - rhs).abs() / rhs.abs());
            }
            c.add("duality.pushforward", push, 1e-6);
            let phi = |a: f64, w: f64| bump((a - 1.5) / 0.4) * bump(w / 2.0);
            let a_axis = UniformAxis::new(0.5, 3.0, 501)?;
            let w_axis = UniformAxis::new(-5.0, 5.0, 1001)?;
            let mut worst = 0.0f64;
            for _ in 0..trials.min(3) {
                let x0 = (rng.random_range(0.8..1.25), rng.random_range(-1.0..1.0));
                worst = worst.max(affine::dual_haar_left_invariance_residual(phi, x0, &a_axis, &w_axis)?);
            }
            c.add("duality.dual_haar_left_invariance", worst, 1e-3);
        }
        Suite::Plancherel => {
            for (name, v, tol) in [("plain", Variant::Plain, 1e-4), ("generalized", Variant::Generalized, 1e-3)] {
                let sides = affine::affine_plancherel(&f, v)?;
                c.add(format!("plancherel.{name}.sides"), sides.relative_residual(), tol);
                if closed_form {
                    let target = affine::GAUSSIAN_STRIP_NORM_SQ;
                    c.add(format!("plancherel.{name}.closed_form"), (sides.transform_side - target).abs() / target, tol);
                }
            }
        }
        Suite::Parseval => {
            for (name, v) in [("plain", Variant::Plain), ("generalized", Variant::Generalized)] {
                let q = affine::quadruple_integral(&f, v)?;
                c.add(format!("parseval.quadruple.{name}"), q.residual / q.quadruple.abs(), 1e-3);
            }
        }
        Suite::Inversion => {
            let radius = grid.b().max().abs().min(grid.b().min().abs()) / 2.0;
            let plain = affine::affine_reconstruct(&affine::affine_tau_fourier(&f)?, Variant::Plain)?;
            let gen = affine::affine_reconstruct(&affine::affine_gen_tau_fourier(&f)?, Variant::Generalized)?;
            c.add("inversion.plain.round_trip", plain.relative_l2_error(&f, radius)?, 1e-3);
            c.add("inversion.generalized.round_trip", gen.relative_l2_error(&f, radius)?, 1e-3);
            c.add("inversion.agreement", plain.relative_l2_error(&gen, radius)?, 1e-3);
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok(())
}

pub fn verify_report(loaded: &LoadedSpec, suite: Suite, trials: usize, seed: u64, tol: Option<f64>) -> CliResult<VerifyReport> {
    let mut checks = Checks { tol_override: tol, records: BTreeMap::new() };
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let name = match loaded {
        LoadedSpec::Finite { name, .. } | LoadedSpec::Continuum { name, .. } => name.clone(),
    };
    if trials > 0 {
        let shared = match loaded {
            LoadedSpec::Finite { system, .. } => Some(Arc::new(system.clone())),
            LoadedSpec::Continuum { .. } => None,
        };
        for s in suites {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s.stream());
            match loaded {
                LoadedSpec::Finite { entry, .. } => {
                    finite_suite(shared.as_ref().expect("finite"), entry.as_ref(), s, trials, &mut rng, &mut checks)?
                }
                LoadedSpec::Continuum { grid, .. } => continuum_suite(grid, s, trials, &mut rng, &mut checks)?,
            }
        }
    }
    let checks: Vec<CheckRecord> = checks.records.into_values().collect();
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        spec: name,
        suite: suite.name().to_string(),
        seed,
        trials,
        passed: checks.iter().all(|c| c.pass),
        checks,
    })
}

fn cmd_verify(spec: &str, suite: Suite, trials: usize, seed: u64, tol: Option<f64>, cap: u64, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if let Some(t) = tol {
        if !(t >= 0.0) {
            return Err(CliError::Input(format!("--tol must be nonnegative, got {t}")));
        }
    }
    let loaded = load_spec(spec, cap)?;
    let report = verify_report(&loaded, suite, trials, seed, tol)?;
    emit_json(&report, None, out)?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        let _ = writeln!(err, "FAIL {}: residual {:e} > tolerance {:e}", c.name, c.residual, c.tolerance);
    }
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_catalog(name: Option<&str>, cap: u64, out: &mut dyn Write) -> CliResult<i32> {
    match name {
        None => {
            let lines = [
                ("affine:n", "units of ℤ_n acting on ℤ_n by multiplication"),
                ("heisenberg:n", "ℤ_n acting on ℤ_n² by (x, z) ↦ (x, z + sx)"),
                ("motion:n", "quarter-turn rotations acting on ℤ_n²"),
                (CONTINUUM_DEFAULT, "(0,∞) ⋉ ℝ on the default quadrature grid"),
            ];
            for (n, d) in lines {
                writeln!(out, "{n:<26} {d}").map_err(|e| CliError::Input(e.to_string()))?;
            }
        }
        Some(name) => {
            let spec = match load_spec(name, cap)? {
                LoadedSpec::Finite { name, system, .. } => GroupSpecFile::from_system(&system, Some(name)),
                LoadedSpec::Continuum { name, grid } => GroupSpecFile::from_grid(&grid, Some(name)),
            };
            emit_json(&spec, None, out)?;
        }
    }
    Ok(EXIT_PASS)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = max_order_from_env().and_then(|cap| match &cli.command {
        Command::Dual { spec, output } => cmd_dual(spec, output.as_deref(), cap, out, err),
        Command::Transform { spec, function, variant, inverse, output } => {
            cmd_transform(spec, function, *variant, *inverse, output.as_deref(), cap, out, err)
        }
        Command::Verify { spec, suite, trials, seed, tol } => cmd_verify(spec, *suite, *trials, *seed, *tol, cap, out, err),
        Command::Catalog { name } => cmd_catalog(name.as_deref(), cap, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "tauh: {e}");
            e.code()
        }
    }
}
