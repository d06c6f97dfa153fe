//! Command implementations behind the `chroma` binary.
//!
//! Every command produces a JSON [`Report`] plus a flag telling the caller
//! whether a certificate or validation failed (exit code 2).

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use chroma_core::arith::{parse_rational, Rational};
use chroma_core::bohr::{bohr_color, SpectrumParams};
use chroma_core::cayley::{
    chromatic_number_exact, independence_number_exact, BitGraph, CayleyView, SolverBudget,
};
use chroma_core::constructions::{
    certify_lift, density_report, lift_to_fp, negative_control, ConstructionParams, PrimeChoice,
    ThresholdMode, DEFAULT_SCAN_CAP,
};
use chroma_core::equation::{classify, Equation};
use chroma_core::group::{read_element_set, write_element_set, ElementSet, GroupLiteral};
use chroma_core::kneser::{
    check_embedding_all, check_independent_exhaustive, chi_lower_bound, embedding_k,
    estimate_independent_density, kneser_graph, kneser_vertices, HammingBall, IndependentSetParams,
    KneserParams,
};

/// Environment variable naming the cache directory for generated sets.
pub const CACHE_ENV: &str = "CHROMA_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config schema violation: {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cap exceeded: {0}")]
    Cap(chroma_core::Error),
    #[error("infeasible parameters: {0}")]
    Infeasible(chroma_core::Error),
    #[error("{0}")]
    Core(chroma_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<chroma_core::Error> for CliError {
    fn from(e: chroma_core::Error) -> Self {
        use chroma_core::Error as E;
        match e {
            E::CapExceeded { .. } => CliError::Cap(e),
            E::Infeasible(_) | E::NotPrime(_) | E::ModulusTooSmall { .. } => {
                CliError::Infeasible(e)
            }
            E::Parse(_) => CliError::Input(e.to_string()),
            _ => CliError::Core(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub result: Value,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// A certificate or validation failed.
    pub finding: bool,
}

impl Outcome {
    fn ok(command: &str, result: Value) -> Self {
        Self::new(command, result, false)
    }

    fn new(command: &str, result: Value, finding: bool) -> Self {
        Outcome {
            report: Report {
                command: command.to_string(),
                result,
            },
            finding,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.finding {
            2
        } else {
            0
        }
    }
}

/// Side outputs shared by all commands.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub budget: Option<Duration>,
    pub seed: u64,
    pub csv: Option<PathBuf>,
    pub dimacs: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl Context {
    fn solver_budget(&self) -> SolverBudget {
        match self.budget {
            Some(t) => SolverBudget::default().with_time(t),
            None => SolverBudget::default(),
        }
    }

    fn write_dimacs(&self, g: &BitGraph, comment: &str) -> CliResult<Option<String>> {
        let Some(path) = &self.dimacs else {
            return Ok(None);
        };
        fs::write(path, g.to_dimacs(comment)).map_err(io_err(path))?;
        Ok(Some(path.display().to_string()))
    }
}

pub fn parse_budget(s: &str) -> CliResult<Duration> {
    humantime::parse_duration(s).map_err(|e| CliError::Input(format!("budget {s:?}: {e}")))
}

fn rational_arg(s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(CliError::from)
}

fn equation_arg(eq: &Option<String>) -> CliResult<Equation> {
    let s = eq
        .as_deref()
        .ok_or_else(|| CliError::Input("missing equation (--eq)".into()))?;
    Ok(Equation::parse(s)?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn load_set(path: &Path) -> CliResult<(GroupLiteral, ElementSet)> {
    let f = File::open(path).map_err(io_err(path))?;
    Ok(read_element_set(BufReader::new(f))?)
}

fn save_set(path: &Path, lit: &GroupLiteral, set: &ElementSet) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    write_element_set(&mut w, lit, set).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

// ---------------------------------------------------------------- classify

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct ClassifyArgs {
    /// Coefficient list, e.g. "[1,1,-1]".
    #[arg(long)]
    #[serde(default)]
    pub eq: Option<String>,
}

pub fn run_classify(args: &ClassifyArgs) -> CliResult<Outcome> {
    let eq = equation_arg(&args.eq)?;
    let class = classify(&eq)?;
    let mut v = to_value(&class.report());
    v["equation"] = json!(eq.coeffs());
    Ok(Outcome::ok("classify", v))
}

// ---------------------------------------------------------------- kneser

#[derive(ValueEnum, Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum KneserAction {
    Enumerate,
    Adjacency,
    ChiBound,
    EmbedCheck,
    Chi,
}

#[derive(Args, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct KneserArgs {
    #[arg(value_enum)]
    pub action: KneserAction,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Number of parts; defaults to `p - 1` when `--p` is given.
    #[arg(long)]
    #[serde(default)]
    pub m: Option<u32>,
    #[arg(long)]
    #[serde(default)]
    pub p: Option<u32>,
    /// Vertices listed in the report for `enumerate`.
    #[arg(long, default_value_t = 20)]
    #[serde(default = "default_listed")]
    pub list: usize,
}

fn default_listed() -> usize {
    20
}

pub fn run_kneser(args: &KneserArgs, ctx: &Context) -> CliResult<Outcome> {
    let m = match (args.m, args.p) {
        (Some(m), Some(p)) if m + 1 != p => {
            return Err(CliError::Input(format!(
                "m = {m} and p = {p} disagree (need m = p - 1)"
            )))
        }
        (Some(m), _) => m,
        (None, Some(p)) => p
            .checked_sub(1)
            .ok_or_else(|| CliError::Input("p must be >= 2".into()))?,
        (None, None) => return Err(CliError::Input("one of --m or --p is required".into())),
    };
    let params = KneserParams::new(args.n, args.k, m)?;
    let base =
        json!({"n": args.n, "k": args.k, "m": m, "vertices": params.vertex_count().to_string()});
    let mut v = base;
    let mut finding = false;
    match args.action {
        KneserAction::Enumerate => {
            let vs = kneser_vertices(&params)?;
            v["listed"] = to_value(&vs.iter().take(args.list).collect::<Vec<_>>());
            if let Some(path) = &ctx.csv {
                let mut w =
                    csv::Writer::from_path(path).map_err(|e| CliError::Input(e.to_string()))?;
                w.write_record(["index", "parts"])
                    .map_err(|e| CliError::Input(e.to_string()))?;
                for (i, x) in vs.iter().enumerate() {
                    let parts: Vec<String> = (0..x.parts.len())
                        .map(|j| {
                            let p: Vec<String> = x.part(j).iter().map(|e| e.to_string()).collect();
                            format!("{{{}}}", p.join(","))
                        })
                        .collect();
                    w.write_record([i.to_string(), parts.join(" ")])
                        .map_err(|e| CliError::Input(e.to_string()))?;
                }
                w.flush().map_err(io_err(path))?;
                v["csv"] = json!(path.display().to_string());
            }
        }
        KneserAction::Adjacency => {
            let (_, g) = kneser_graph(&params)?;
            v["edges"] = json!(g.edge_count());
            v["max_degree"] = json!(g.max_degree());
            v["dimacs"] = json!(ctx.write_dimacs(&g, &format!("KN({},{},{})", args.n, args.k, m))?);
        }
        KneserAction::ChiBound => {
            let b = chi_lower_bound(&params)?;
            v["bound"] = json!(b.to_string());
            v["bound_ceil"] = json!(chroma_core::arith::ceil_rational(&b).max(0).to_string());
        }
        KneserAction::EmbedCheck => {
            let p = params
                .prime()
                .ok_or_else(|| CliError::Infeasible(chroma_core::Error::NotPrime(m as u64 + 1)))?;
            let ball = HammingBall::standard(p, args.n)?;
            let r = check_embedding_all(&params, &ball)?;
            finding = r.violations > 0;
            v["embedding_k"] = json!(embedding_k(p, args.n));
            v["report"] = to_value(&r);
        }
        KneserAction::Chi => {
            let (_, g) = kneser_graph(&params)?;
            let r = chromatic_number_exact(&g, &ctx.solver_budget());
            v["chi"] = chi_summary(&r);
            if let Some(p) = params.prime() {
                let b = chi_lower_bound(&params)?;
                let need = chroma_core::arith::ceil_rational(&b);
                v["bound"] = json!(b.to_string());
                if need > 0 && r.exact {
                    finding = (r.lower as i128) < need;
                }
                v["p"] = json!(p);
            }
        }
    }
    Ok(Outcome::new("kneser", v, finding))
}

fn chi_summary(r: &chroma_core::cayley::ChromaticResult) -> Value {
    json!({
        "lower": r.lower,
        "upper": r.upper,
        "exact": r.exact,
        "certificate": r.certificate,
        "clique": r.clique,
        "nodes": r.nodes,
        "budget_exhausted": r.budget_exhausted,
    })
}

// ---------------------------------------------------------------- cayley

#[derive(ValueEnum, Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CayleyAction {
    Chi,
    Alpha,
    Export,
}

#[derive(Args, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CayleyArgs {
    #[arg(value_enum)]
    pub action: CayleyAction,
    /// Group literal such as "Z(101)" or "Z(3)^4"; must match the set file header.
    #[arg(long)]
    #[serde(default)]
    pub group: Option<String>,
    /// Connection set in the element-set text format.
    #[arg(long)]
    #[serde(default)]
    pub set: Option<PathBuf>,
    /// A DIMACS edge file used instead of a Cayley graph.
    #[arg(long, conflicts_with_all = ["group", "set"])]
    #[serde(default)]
    pub graph: Option<PathBuf>,
}

pub fn run_cayley(args: &CayleyArgs, ctx: &Context) -> CliResult<Outcome> {
    let (g, label) = if let Some(path) = &args.graph {
        let f = File::open(path).map_err(io_err(path))?;
        (
            BitGraph::from_dimacs(BufReader::new(f))?,
            path.display().to_string(),
        )
    } else {
        let path = args
            .set
            .as_ref()
            .ok_or_else(|| CliError::Input("--set or --graph is required".into()))?;
        let (lit, set) = load_set(path)?;
        if let Some(gs) = &args.group {
            let want = GroupLiteral::parse(gs)?;
            if want.spec != lit.spec {
                return Err(CliError::Input(format!("set file is over {lit}, not {gs}")));
            }
        }
        let view = CayleyView::new(&lit.spec, &set)?;
        (
            view.to_bitgraph()?,
            format!("Cay({lit}, {})", path.display()),
        )
    };
    let mut v = json!({"graph": label, "order": g.order(), "edges": g.edge_count()});
    match args.action {
        CayleyAction::Chi => {
            let r = chromatic_number_exact(&g, &ctx.solver_budget());
            if !r.coloring.is_proper(&g) {
                return Err(CliError::Core(chroma_core::Error::OutOfRange(
                    "solver returned an improper coloring".into(),
                )));
            }
            v["chi"] = chi_summary(&r);
        }
        CayleyAction::Alpha => {
            let r = independence_number_exact(&g, &ctx.solver_budget());
            v["alpha"] = to_value(&r);
        }
        CayleyAction::Export => {
            let path = ctx
                .dimacs
                .as_ref()
                .ok_or_else(|| CliError::Input("export needs --dimacs <path>".into()))?;
            ctx.write_dimacs(&g, &label)?;
            v["dimacs"] = json!(path.display().to_string());
        }
    }
    Ok(Outcome::ok("cayley", v))
}

// ---------------------------------------------------------------- construct / certify-lift

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstructArgs {
    #[arg(long)]
    #[serde(default)]
    pub eq: Option<String>,
    #[arg(long)]
    pub q: u64,
    /// Comma-separated primes whose product is `m`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
    /// "auto", "conservative" or an explicit prime.
    #[arg(long, default_value = "auto")]
    #[serde(default = "default_p")]
    pub p: String,
    /// "paper" or "scaled".
    #[arg(long, default_value = "scaled")]
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Slack for the scaled thresholds, as a rational such as "2/5".
    #[arg(long, default_value = "2/5")]
    #[serde(default = "default_slack")]
    pub slack: String,
    /// Pattern-scan cap for the certificates.
    #[arg(long)]
    #[serde(default)]
    pub scan_cap: Option<u128>,
    /// Directory receiving E0, F0 and A as element-set files.
    #[arg(long)]
    #[serde(default)]
    pub export_sets: Option<PathBuf>,
}

fn default_p() -> String {
    "auto".into()
}
fn default_mode() -> String {
    "scaled".into()
}
fn default_slack() -> String {
    "2/5".into()
}

fn construction_params(args: &ConstructArgs) -> CliResult<ConstructionParams> {
    let eq = equation_arg(&args.eq)?;
    let choice = match args.p.as_str() {
        "auto" => PrimeChoice::Auto,
        "conservative" => PrimeChoice::Conservative,
        s => PrimeChoice::Explicit(s.parse().map_err(|_| {
            CliError::Input(format!(
                "--p expects auto, conservative or a prime, got {s:?}"
            ))
        })?),
    };
    let mode = match args.mode.as_str() {
        "paper" => ThresholdMode::Paper,
        "scaled" => ThresholdMode::Scaled {
            slack: rational_arg(&args.slack)?,
        },
        s => {
            return Err(CliError::Input(format!(
                "--mode expects paper or scaled, got {s:?}"
            )))
        }
    };
    Ok(ConstructionParams::new(
        &eq,
        args.q,
        &args.primes,
        choice,
        mode,
    )?)
}

fn params_value(params: &ConstructionParams) -> Value {
    json!({
        "equation": params.original_equation().coeffs(),
        "normalized": params.equation().coeffs(),
        "permutation": params.permutation(),
        "negated": params.negated(),
        "q": params.q(),
        "primes": params.norm_context().primes(),
        "m": params.m(),
        "p": params.p(),
        "mode": to_value(params.mode()),
        "C": params.c_sum(),
        "D": params.d_sum(),
        "interval": params.interval(),
        "thresholds": to_value(&params.thresholds()),
    })
}

fn set_key(params: &ConstructionParams) -> String {
    let eq: Vec<String> = params
        .original_equation()
        .coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect();
    let primes: Vec<String> = params
        .norm_context()
        .primes()
        .iter()
        .map(|c| c.to_string())
        .collect();
    let mode = match params.mode() {
        ThresholdMode::Paper => "paper".to_string(),
        ThresholdMode::Scaled { slack } => format!("s{}-{}", slack.numer(), slack.denom()),
    };
    format!(
        "eq{}_q{}_m{}_p{}_{mode}",
        eq.join(","),
        params.q(),
        primes.join("x"),
        params.p()
    )
}

struct Built {
    params: ConstructionParams,
    e0: ElementSet,
    f0: ElementSet,
    lifted: chroma_core::constructions::LiftedSets,
    exported: Vec<String>,
}

fn build(args: &ConstructArgs, ctx: &Context) -> CliResult<Built> {
    let params = construction_params(args)?;
    let e0 = params.build_e0()?;
    let f0 = params.build_f0()?;
    let lifted = lift_to_fp(&params, &e0, &f0)?;
    let mut exported = Vec::new();
    let dir = args.export_sets.clone().or_else(|| ctx.cache_dir.clone());
    if let Some(dir) = dir {
        let key = set_key(&params);
        let zm = GroupLiteral::parse(&format!("Z({})", params.m()))?;
        let fp = GroupLiteral::parse(&format!("Z({})", params.p()))?;
        for (name, lit, set) in [("E0", &zm, &e0), ("F0", &zm, &f0), ("A", &fp, &lifted.a)] {
            let path = dir.join(format!("{key}_{name}.set"));
            save_set(&path, lit, set)?;
            exported.push(path.display().to_string());
        }
    }
    Ok(Built {
        params,
        e0,
        f0,
        lifted,
        exported,
    })
}

pub fn run_construct(args: &ConstructArgs, ctx: &Context) -> CliResult<Outcome> {
    let b = build(args, ctx)?;
    let v = json!({
        "params": params_value(&b.params),
        "predicates": to_value(&b.params.predicates()),
        "sizes": {"e0": b.e0.len(), "f0": b.f0.len()},
        "density": to_value(&density_report(&b.params, &b.f0)),
        "lift": to_value(&b.lifted.summary()),
        "exported": b.exported,
    });
    Ok(Outcome::ok("construct", v))
}

pub fn run_certify_lift(args: &ConstructArgs, ctx: &Context) -> CliResult<Outcome> {
    let b = build(args, ctx)?;
    let cap = args.scan_cap.unwrap_or(DEFAULT_SCAN_CAP);
    let bundle = certify_lift(&b.params, &b.e0, &b.f0, &b.lifted, cap);
    let control = negative_control(&b.params, &b.f0, &b.lifted, cap);
    let v = json!({
        "params": params_value(&b.params),
        "predicates": to_value(&b.params.predicates()),
        "lift": to_value(&b.lifted.summary()),
        "certificates": to_value(&bundle),
        "negative_control": to_value(&control),
        "exported": b.exported,
    });
    Ok(Outcome::new("certify-lift", v, !bundle.all_pass))
}

// ---------------------------------------------------------------- bohr-color

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct BohrArgs {
    /// Expected prime; checked against the set file.
    #[arg(long)]
    #[serde(default)]
    pub p: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub eq: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Bohr radius as a rational or decimal.
    #[arg(long)]
    #[serde(default)]
    pub rho: Option<String>,
    /// Supersaturation constant; sets the radius from its cube when `--rho` is absent.
    #[arg(long)]
    #[serde(default)]
    pub delta: Option<f64>,
    /// 0-based variable index used to rescale the spectrum.
    #[arg(long)]
    #[serde(default)]
    pub s: Option<usize>,
    /// Write the coloring (one color per line) to this path.
    #[arg(long)]
    #[serde(default)]
    pub coloring_out: Option<PathBuf>,
}

fn default_nu() -> f64 {
    0.1
}

pub fn run_bohr(args: &BohrArgs) -> CliResult<Outcome> {
    let eq = equation_arg(&args.eq)?;
    let path = args
        .set
        .as_ref()
        .ok_or_else(|| CliError::Input("--set is required".into()))?;
    let (lit, a) = load_set(path)?;
    let p = lit
        .spec
        .cyclic_modulus()
        .ok_or_else(|| CliError::Input(format!("set file is over {lit}, not a cyclic group")))?;
    if args.p.is_some_and(|want| want != p) {
        return Err(CliError::Input(format!(
            "set file is over Z({p}), not Z({})",
            args.p.unwrap()
        )));
    }
    let rho = match (&args.rho, args.delta) {
        (Some(r), _) => rational_arg(r)?,
        (None, Some(d)) => SpectrumParams::rho_from_delta(d, eq.abs_sum() as u64)?,
        (None, None) => {
            return Err(CliError::Input(
                "one of --rho or --delta is required".into(),
            ))
        }
    };
    let sp = SpectrumParams::new(args.nu, rho, args.s)?;
    let r = bohr_color(&a, &eq, &sp)?;
    if let Some(out) = &args.coloring_out {
        let f = File::create(out).map_err(io_err(out))?;
        let mut w = BufWriter::new(f);
        for c in &r.coloring.colors {
            writeln!(w, "{c}").map_err(io_err(out))?;
        }
        w.flush().map_err(io_err(out))?;
    }
    let finding = !r.report.proper;
    Ok(Outcome::new("bohr-color", to_value(&r.report), finding))
}

// ---------------------------------------------------------------- indep-set

#[derive(Args, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct IndepArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    /// Radius scale; defaults to `p` (or 1 for `p = 2`).
    #[arg(long)]
    #[serde(default)]
    pub lambda: Option<String>,
    /// Monte Carlo samples instead of exhaustive enumeration.
    #[arg(long)]
    #[serde(default)]
    pub samples: Option<u64>,
}

pub fn run_indep(args: &IndepArgs, ctx: &Context) -> CliResult<Outcome> {
    let params = match &args.lambda {
        Some(l) => IndependentSetParams::scaled(args.p, args.n, rational_arg(l)?)?,
        None => IndependentSetParams::standard(args.p, args.n)?,
    };
    match args.samples {
        Some(s) => {
            let est = estimate_independent_density(&params, s, ctx.seed);
            let v = json!({"params": to_value(&params), "degenerate": params.is_degenerate(), "estimate": to_value(&est)});
            Ok(Outcome::ok("indep-set", v))
        }
        None => {
            let r = check_independent_exhaustive(&params)?;
            let finding = r.violations > 0;
            Ok(Outcome::new("indep-set", to_value(&r), finding))
        }
    }
}

// ---------------------------------------------------------------- config files

/// A batch experiment. `params` is validated against the schema of `command`.
#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub equation: Option<String>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub dimacs: Option<PathBuf>,
    #[serde(default)]
    pub budget: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
    }
}

fn params_as<T: for<'de> Deserialize<'de>>(cfg: &ExperimentConfig) -> CliResult<T> {
    let v = if cfg.params.is_null() {
        json!({})
    } else {
        cfg.params.clone()
    };
    serde_json::from_value(v)
        .map_err(|e| CliError::Schema(format!("params for {:?}: {e}", cfg.command)))
}

fn merge_eq(slot: &mut Option<String>, top: &Option<String>) -> CliResult<()> {
    match (slot.as_ref(), top) {
        (Some(a), Some(b)) if a != b => Err(CliError::Schema(format!(
            "equation given twice with different values: {a:?} vs {b:?}"
        ))),
        (None, Some(b)) => {
            *slot = Some(b.clone());
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Runs a config; the caller writes the report to `cfg.output`.
pub fn run_config(cfg: &ExperimentConfig, base: &Context) -> CliResult<Outcome> {
    let mut ctx = base.clone();
    ctx.seed = cfg.seed;
    if cfg.csv.is_some() {
        ctx.csv = cfg.csv.clone();
    }
    if cfg.dimacs.is_some() {
        ctx.dimacs = cfg.dimacs.clone();
    }
    if let Some(b) = &cfg.budget {
        ctx.budget = Some(parse_budget(b)?);
    }
    match cfg.command.as_str() {
        "classify" => {
            let mut a: ClassifyArgs = params_as(cfg)?;
            merge_eq(&mut a.eq, &cfg.equation)?;
            run_classify(&a)
        }
        "kneser" => run_kneser(&params_as(cfg)?, &ctx),
        "cayley" => {
            let mut a: CayleyArgs = params_as(cfg)?;
            merge_eq(&mut a.group, &cfg.group)?;
            run_cayley(&a, &ctx)
        }
        "construct" | "certify-lift" => {
            let mut a: ConstructArgs = params_as(cfg)?;
            merge_eq(&mut a.eq, &cfg.equation)?;
            if cfg.command == "construct" {
                run_construct(&a, &ctx)
            } else {
                run_certify_lift(&a, &ctx)
            }
        }
        "bohr-color" => {
            let mut a: BohrArgs = params_as(cfg)?;
            merge_eq(&mut a.eq, &cfg.equation)?;
            run_bohr(&a)
        }
        "indep-set" => run_indep(&params_as(cfg)?, &ctx),
        other => Err(CliError::Schema(format!("unknown command {other:?}"))),
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn emit(report: &Report, out: Option<&Path>) -> CliResult<()> {
    let text = render(report);
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
