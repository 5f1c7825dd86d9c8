//! Command-line interface: the library pipelines behind one binary with
//! reproducible numerics and machine-readable output.
//!
//! Every subcommand prints a single JSON document (or a CSV table with
//! `--format csv`) on stdout. Numbers are rounded to 12 significant
//! digits so that repeated runs with the same configuration are
//! byte-identical. Exit codes: 0 on success, 2 when the requested
//! quantity has a mathematical verdict instead of a value (the verdict
//! is serialized on stdout), 1 on usage errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Activation, RandomField};
use crate::hermite;
use crate::manifold::{self, ExpFamily, ExpModelPoint, SpherePoint};
use crate::measure::GaussianIntegrator;
use crate::norms;
use crate::oracle::{self, FiniteSpace};
use crate::sobolev;
use crate::young::{self, YoungFunction};

/// Environment variable that overrides every other seed source.
pub const SEED_ENV: &str = "ORLICZ_IG_SEED";

/// Number of significant digits kept in printed output.
const OUTPUT_DIGITS: i32 = 12;

/// Run configuration: integration backend and output settings. Loadable
/// from JSON with `--config`; individual flags override file values, and
/// the `ORLICZ_IG_SEED` environment variable overrides the seed last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    /// Quadrature order per axis (quadrature backend).
    pub order: usize,
    /// Sample count (Monte Carlo backend).
    pub samples: usize,
    /// RNG seed (Monte Carlo backend).
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Quadrature,
            order: 64,
            samples: 200_000,
            seed: 7,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Adaptive Gauss–Hermite tensor quadrature.
    Quadrature,
    /// Seeded Monte Carlo.
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Read a [`RunConfig`] from a JSON file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Parser, Debug)]
#[command(
    name = "orlicz-ig",
    version,
    about = "Orlicz-space information geometry over the standard Gaussian",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Path to a JSON run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Integration backend.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendKind>,
    /// Quadrature order per axis.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// RNG seed; the ORLICZ_IG_SEED environment variable overrides this.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Luxemburg gauge of a field.
    Norm(NormArgs),
    /// Dual (Orlicz) norm of a field via the Amemiya formula.
    Dualnorm(NormArgs),
    /// Equivalent norm from weighted Lebesgue moments.
    Momentnorm(MomentnormArgs),
    /// Exponential tail certificate driven by the gauge.
    Tailcert(TailcertArgs),
    /// Membership frontier of exp(lambda x^2)-type moments.
    Class(ClassArgs),
    /// Gauge of the field outside growing boxes: heart vs. boundary.
    Truncation(TruncationArgs),
    /// Tabulate a Young function against its conjugate.
    Conjugate(ConjugateArgs),
    /// Certificate that one Young function eventually dominates another.
    Domination(DominationArgs),
    /// A Hermite basis polynomial: coefficients, normalizer, values.
    Hermite(HermiteArgs),
    /// Hermite expansion of a field with reconstruction error.
    Expand(ExpandArgs),
    /// Cumulant (log normalizer) of a statistic.
    K1(K1Args),
    /// Recover the centered statistic and cumulant from a density.
    Chart(ChartArgs),
    /// Cumulant, gradient, and Fisher information of a family.
    Fisher(FisherArgs),
    /// Hyvarinen divergence between two model points.
    Hyvarinen(HyvarinenArgs),
    /// Weighted Dirichlet pairing and its integration-by-parts adjoint.
    Otto(OttoArgs),
    /// Entropy-energy (log-Sobolev) check at a model point.
    Logsob(LogsobArgs),
    /// Move between the model bundle and the sphere picture.
    Sphere(SphereArgs),
    /// Equivalent-model conditions for two densities on a finite space.
    Portmanteau(PortmanteauArgs),
    /// Sobolev-type membership and calculus checks.
    Sobolev(SobolevArgs),
    /// Regenerate the frozen regression fixtures.
    GenFixtures(GenFixturesArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field as an infix expression ("0.5 * x0 + 1") or JSON.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Named field preset (x, square, hermite2, affine, tanh, sigmoid, vee).
    #[arg(long)]
    preset: Option<String>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct NormArgs {
    /// Young function name (power:A, exp2, exp2*, cosh2, cosh2*, gauss2,
    /// sq:NAME).
    #[arg(long)]
    phi: String,
    #[command(flatten)]
    field: FieldArgs,
}

#[derive(Args, Debug)]
struct MomentnormArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Largest moment order in the supremum.
    #[arg(long, default_value_t = 20)]
    kmax: usize,
}

#[derive(Args, Debug)]
struct TailcertArgs {
    /// Young function name.
    #[arg(long, default_value = "cosh2")]
    phi: String,
    #[command(flatten)]
    field: FieldArgs,
    /// Number of thresholds.
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Largest threshold.
    #[arg(long, default_value_t = 12.0)]
    tmax: f64,
}

#[derive(Args, Debug)]
struct ClassArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated scale probes (default: 0.05..1.00 plus 0.49, 0.51).
    #[arg(long, allow_hyphen_values = true)]
    lambdas: Option<String>,
}

#[derive(Args, Debug)]
struct TruncationArgs {
    /// Young function name.
    #[arg(long, default_value = "cosh2")]
    phi: String,
    #[command(flatten)]
    field: FieldArgs,
    /// Scale inside the Young function.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Comma-separated box radii.
    #[arg(long, allow_hyphen_values = true, default_value = "1,2,4,8")]
    radii: String,
}

#[derive(Args, Debug)]
struct ConjugateArgs {
    /// Young function name.
    #[arg(long)]
    phi: String,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0.25,0.5,1,2,4")]
    points: String,
}

#[derive(Args, Debug)]
struct DominationArgs {
    /// Candidate dominating Young function.
    #[arg(long)]
    phi: String,
    /// Candidate dominated Young function.
    #[arg(long)]
    psi: String,
    /// Comma-separated scale grid (default: built-in grid).
    #[arg(long, allow_hyphen_values = true)]
    scales: Option<String>,
    /// Comma-separated threshold grid (default: built-in grid).
    #[arg(long, allow_hyphen_values = true)]
    thresholds: Option<String>,
}

#[derive(Args, Debug)]
struct HermiteArgs {
    /// Multi-index, comma-separated (its length sets the dimension).
    #[arg(long)]
    alpha: String,
    /// Optional evaluation point, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Largest total degree retained.
    #[arg(long, default_value_t = 4)]
    degree: usize,
}

#[derive(Args, Debug)]
struct K1Args {
    /// Statistic as an expression or JSON.
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Subtract the mean of u before exponentiating.
    #[arg(long)]
    center: bool,
}

#[derive(Args, Debug)]
struct ChartArgs {
    /// Candidate density as an expression or JSON.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct FisherArgs {
    /// Statistics separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    stats: String,
    /// Parameter vector, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct HyvarinenArgs {
    /// Statistic of the first point.
    #[arg(long, allow_hyphen_values = true)]
    up: String,
    /// Statistic of the second point.
    #[arg(long, allow_hyphen_values = true)]
    uq: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct OttoArgs {
    /// First tangent field.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Second tangent field (must be twice differentiable).
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Statistic of the base point.
    #[arg(long, allow_hyphen_values = true)]
    up: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct LogsobArgs {
    /// Statistic of the model point.
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SphereDirection {
    /// Bundle element (u, v) to the sphere.
    To,
    /// Sphere point and velocity back to the bundle.
    From,
}

#[derive(Args, Debug)]
struct SphereArgs {
    #[arg(long, value_enum, default_value_t = SphereDirection::To)]
    direction: SphereDirection,
    /// Statistic of the base point (direction "to").
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Centered tangent statistic (direction "to").
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Sphere point (direction "from").
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Sphere velocity (direction "from").
    #[arg(long, allow_hyphen_values = true)]
    velocity: Option<String>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct PortmanteauArgs {
    /// Probability weights of the finite space, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
    /// First density, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Second density, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SobolevCheck {
    /// Gauge of the field and of each partial derivative.
    Membership,
    /// Translation increment identity and superlinear remainder decay.
    Increment,
    /// Weak chain rule under a Lipschitz activation.
    Chain,
    /// Local Lebesgue-moment embedding bound.
    Embedding,
}

#[derive(Args, Debug)]
struct SobolevArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Which check to run.
    #[arg(long, value_enum)]
    check: SobolevCheck,
    /// Shift direction for the increment check, comma-separated.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    h: String,
    /// Shift size for the increment check.
    #[arg(long, default_value_t = 0.2)]
    t: f64,
    /// Lebesgue exponent for the increment check.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Activation for the chain check (identity, relu, abs, tanh,
    /// sigmoid, softplus, clip:LO:HI).
    #[arg(long, default_value = "tanh")]
    activation: String,
    /// Ball radius for the embedding check.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Half moment order for the embedding check (bounds the 2k-th moment).
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args, Debug)]
struct GenFixturesArgs {
    /// Directory receiving fixtures.json.
    #[arg(long, default_value = "tests/fixtures")]
    dir: PathBuf,
}

/// Entry point of the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve_config(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&RunConfig::default(), e),
    };
    match dispatch(&cfg, &cli.command) {
        Ok(out) => {
            emit(&cfg, out);
            0
        }
        Err(e) => fail(&cfg, e),
    }
}

fn resolve_config(global: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(b) = global.backend {
        cfg.backend = b;
    }
    if let Some(o) = global.order {
        cfg.order = o;
    }
    if let Some(s) = global.samples {
        cfg.samples = s;
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        cfg.seed = text.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("{SEED_ENV} must be an unsigned integer, got {text:?}"))
        })?;
    }
    Ok(cfg)
}

fn fail(cfg: &RunConfig, e: Error) -> i32 {
    if e.is_domain_verdict() {
        let doc = json!({ "verdict": { "kind": e.slug(), "message": e.to_string() } });
        emit(cfg, Output::json(doc));
        2
    } else {
        eprintln!("error: {e}");
        1
    }
}

struct Output {
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn json(v: Value) -> Self {
        Self { json: v, csv: None }
    }

    fn with_csv(v: Value, csv: String) -> Self {
        Self { json: v, csv: Some(csv) }
    }
}

fn emit(cfg: &RunConfig, out: Output) {
    use std::io::Write;
    let text = match cfg.format {
        OutputFormat::Json => format!("{}\n", round_json(out.json)),
        OutputFormat::Csv => match out.csv {
            Some(table) => table,
            None => default_csv(&round_json(out.json)),
        },
    };
    // A closed pipe (e.g. `orlicz-ig ... | head`) is the reader's
    // choice, not an error worth a panic or a message.
    if let Err(e) = std::io::stdout().write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

/// Round to [`OUTPUT_DIGITS`] significant digits by round-tripping
/// through decimal scientific notation: the nearest double to a
/// 12-digit decimal prints back as exactly that decimal, so equal
/// values always serialize to equal bytes.
fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.*e}", (OUTPUT_DIGITS - 1) as usize)
        .parse()
        .expect("scientific notation reparses")
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("checked is_f64");
                return match serde_json::Number::from_f64(round_sig(x)) {
                    Some(num) => Value::Number(num),
                    None => Value::String(format!("{x}")),
                };
            }
            Value::Number(n)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

fn csv_num(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() {
        serde_json::to_string(&r).expect("finite float serializes")
    } else {
        format!("{r}")
    }
}

fn default_csv(v: &Value) -> String {
    fn flatten(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, vv) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    flatten(&key, vv, out);
                }
            }
            Value::Array(items) => {
                for (i, vv) in items.iter().enumerate() {
                    let key =
                        if prefix.is_empty() { i.to_string() } else { format!("{prefix}.{i}") };
                    flatten(&key, vv, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
            scalar => out.push_str(&format!("{prefix},{scalar}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    flatten("", v, &mut out);
    out
}

fn verdict(v: Option<f64>) -> Value {
    match v {
        Some(x) => json!({ "finite": x }),
        None => json!({ "diverged": true }),
    }
}

fn integrator(cfg: &RunConfig, dim: usize) -> GaussianIntegrator {
    match cfg.backend {
        BackendKind::Quadrature => GaussianIntegrator::quadrature(dim, cfg.order),
        BackendKind::Montecarlo => GaussianIntegrator::monte_carlo(dim, cfg.samples, cfg.seed),
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let t = s.trim();
            t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            let t = s.trim();
            t.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("not a nonnegative integer: {t:?}")))
        })
        .collect()
}

fn preset_field(name: &str, dim: usize) -> Result<RandomField> {
    let expr = match name {
        "x" => "x0",
        "square" => "x0^2",
        "hermite2" => "x0^2 - 1",
        "affine" => "0.5 * x0 + 1",
        "tanh" => "tanh(3 * x0)",
        "sigmoid" => "sigmoid(x0)",
        "vee" => "abs(x0)",
        other => {
            return Err(Error::UnknownPreset(format!(
                "{other} (field presets: x, square, hermite2, affine, tanh, sigmoid, vee)"
            )))
        }
    };
    RandomField::parse(dim, expr)
}

impl FieldArgs {
    fn resolve(&self) -> Result<RandomField> {
        match (&self.f, &self.preset) {
            (Some(_), Some(_)) => {
                Err(Error::InvalidArgument("give either --f or --preset, not both".into()))
            }
            (Some(expr), None) => RandomField::parse(self.n, expr),
            (None, Some(name)) => preset_field(name, self.n),
            (None, None) => {
                Err(Error::InvalidArgument("a field is required: pass --f or --preset".into()))
            }
        }
    }
}

fn parse_activation(name: &str) -> Result<Activation> {
    let lower = name.trim().to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("clip:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() == 2 {
            if let (Ok(lo), Ok(hi)) = (parts[0].parse::<f64>(), parts[1].parse::<f64>()) {
                return Ok(Activation::Clip { lo, hi });
            }
        }
        return Err(Error::InvalidArgument(format!(
            "clip activation takes clip:LO:HI, got {name:?}"
        )));
    }
    Ok(match lower.as_str() {
        "identity" => Activation::Identity,
        "relu" => Activation::Relu,
        "step" => Activation::Step,
        "abs" => Activation::Abs,
        "sign" => Activation::Sign,
        "tanh" => Activation::Tanh,
        "sigmoid" => Activation::Sigmoid,
        "softplus" => Activation::Softplus,
        "exp" => Activation::Exp,
        "log" => Activation::Log,
        "recip" => Activation::Recip,
        other => {
            return Err(Error::UnknownPreset(format!(
                "{other} (activations: identity, relu, abs, tanh, sigmoid, softplus, clip:LO:HI)"
            )))
        }
    })
}

fn field_json(f: &RandomField) -> Result<Value> {
    Ok(serde_json::from_str(&f.to_json())?)
}

fn dispatch(cfg: &RunConfig, command: &Command) -> Result<Output> {
    match command {
        Command::Norm(a) => cmd_norm(cfg, a, false),
        Command::Dualnorm(a) => cmd_norm(cfg, a, true),
        Command::Momentnorm(a) => cmd_momentnorm(cfg, a),
        Command::Tailcert(a) => cmd_tailcert(cfg, a),
        Command::Class(a) => cmd_class(cfg, a),
        Command::Truncation(a) => cmd_truncation(cfg, a),
        Command::Conjugate(a) => cmd_conjugate(a),
        Command::Domination(a) => cmd_domination(a),
        Command::Hermite(a) => cmd_hermite(a),
        Command::Expand(a) => cmd_expand(cfg, a),
        Command::K1(a) => cmd_k1(cfg, a),
        Command::Chart(a) => cmd_chart(cfg, a),
        Command::Fisher(a) => cmd_fisher(cfg, a),
        Command::Hyvarinen(a) => cmd_hyvarinen(cfg, a),
        Command::Otto(a) => cmd_otto(cfg, a),
        Command::Logsob(a) => cmd_logsob(cfg, a),
        Command::Sphere(a) => cmd_sphere(cfg, a),
        Command::Portmanteau(a) => cmd_portmanteau(a),
        Command::Sobolev(a) => cmd_sobolev(cfg, a),
        Command::GenFixtures(a) => cmd_gen_fixtures(a),
    }
}

fn cmd_norm(cfg: &RunConfig, a: &NormArgs, dual: bool) -> Result<Output> {
    let phi = YoungFunction::from_name(&a.phi)?;
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    let r = if dual { norms::dual_norm(&f, &phi, &i)? } else { norms::luxemburg_norm(&f, &phi, &i)? };
    Ok(Output::json(json!({
        "value": r.value,
        "method": r.method,
        "residual": r.residual,
        "bracket": [r.bracket.0, r.bracket.1],
    })))
}

fn cmd_momentnorm(cfg: &RunConfig, a: &MomentnormArgs) -> Result<Output> {
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    let r = norms::moment_norm(&f, &i, a.kmax)?;
    let mut csv = String::from("k,term\n");
    for &(k, v) in &r.terms {
        csv.push_str(&format!("{k},{}\n", csv_num(v)));
    }
    let terms: Vec<Value> = r.terms.iter().map(|&(k, v)| json!([k, v])).collect();
    Ok(Output::with_csv(
        json!({ "value": r.value, "attained_at": r.attained_at, "terms": terms }),
        csv,
    ))
}

fn cmd_tailcert(cfg: &RunConfig, a: &TailcertArgs) -> Result<Output> {
    let phi = YoungFunction::from_name(&a.phi)?;
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    if a.points == 0 {
        return Err(Error::InvalidArgument("need at least one threshold".into()));
    }
    if !(a.tmax > 0.0) {
        return Err(Error::InvalidArgument("tmax must be positive".into()));
    }
    let thresholds: Vec<f64> =
        (1..=a.points).map(|k| a.tmax * k as f64 / a.points as f64).collect();
    let c = norms::tail_certificate(&f, &phi, &i, &thresholds)?;
    let mut csv = String::from("t,empirical_tail,bound\n");
    for check in &c.checks {
        let bound = check.exponential_bound.unwrap_or(check.chebyshev_bound);
        csv.push_str(&format!(
            "{},{},{}\n",
            csv_num(check.threshold),
            csv_num(check.probability),
            csv_num(bound)
        ));
    }
    let checks: Vec<Value> = c
        .checks
        .iter()
        .map(|ch| {
            json!({
                "t": ch.threshold,
                "probability": ch.probability,
                "chebyshev_bound": ch.chebyshev_bound,
                "exponential_bound": ch.exponential_bound,
                "holds": ch.holds,
            })
        })
        .collect();
    Ok(Output::with_csv(
        json!({
            "norm": c.norm,
            "c1": c.c1,
            "c2": c.c2,
            "valid_from": c.valid_from,
            "holds": c.holds,
            "checks": checks,
        }),
        csv,
    ))
}

fn cmd_class(cfg: &RunConfig, a: &ClassArgs) -> Result<Output> {
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    let grid = match &a.lambdas {
        Some(text) => parse_f64_list(text)?,
        None => {
            let mut g: Vec<f64> =
                (1..=20).map(|k| k as f64 * 0.05).chain([0.49, 0.51]).collect();
            g.sort_by(|x, y| x.partial_cmp(y).expect("finite grid"));
            g.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
            g
        }
    };
    let v = norms::orlicz_class_member(&f, &i, &grid)?;
    let mut csv = String::from("lambda,moment\n");
    for &(lambda, m) in &v.probes {
        match m {
            Some(x) => csv.push_str(&format!("{},{}\n", csv_num(lambda), csv_num(x))),
            None => csv.push_str(&format!("{},diverged\n", csv_num(lambda))),
        }
    }
    let probes: Vec<Value> =
        v.probes.iter().map(|&(l, m)| json!({ "lambda": l, "moment": verdict(m) })).collect();
    Ok(Output::with_csv(
        json!({
            "in_M": v.in_class,
            "max_finite_lambda": v.max_finite_lambda,
            "min_diverged_lambda": v.min_diverged_lambda,
            "probes": probes,
        }),
        csv,
    ))
}

fn cmd_truncation(cfg: &RunConfig, a: &TruncationArgs) -> Result<Output> {
    let phi = YoungFunction::from_name(&a.phi)?;
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    let radii = parse_f64_list(&a.radii)?;
    let r = norms::truncation_convergence(&f, &phi, &i, &radii, a.lambda)?;
    let mut csv = String::from("radius,modulus,tail_probability\n");
    for row in &r.rows {
        let m = match row.modulus {
            Some(x) => csv_num(x),
            None => "diverged".into(),
        };
        csv.push_str(&format!("{},{m},{}\n", csv_num(row.radius), csv_num(row.tail_probability)));
    }
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "radius": row.radius,
                "modulus": verdict(row.modulus),
                "tail_probability": row.tail_probability,
            })
        })
        .collect();
    Ok(Output::with_csv(json!({ "rows": rows, "nonincreasing": r.nonincreasing }), csv))
}

fn cmd_conjugate(a: &ConjugateArgs) -> Result<Output> {
    let phi = YoungFunction::from_name(&a.phi)?;
    let psi = phi.conjugate().or_else(|_| phi.conjugate_numeric())?;
    let points = parse_f64_list(&a.points)?;
    let mut csv = String::from("x,phi,conjugate,young_gap,legendre_residual\n");
    let mut rows = Vec::new();
    for &x in &points {
        let check = phi.check_young_legendre(x, x)?;
        let px = phi.value(x);
        let cx = psi.value(x);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_num(x),
            csv_num(px),
            csv_num(cx),
            csv_num(check.young_gap),
            csv_num(check.legendre_residual)
        ));
        rows.push(json!({
            "x": x,
            "phi": px,
            "conjugate": cx,
            "young_gap": check.young_gap,
            "legendre_residual": check.legendre_residual,
        }));
    }
    Ok(Output::with_csv(
        json!({ "phi": phi.name(), "conjugate": psi.name(), "points": rows }),
        csv,
    ))
}

fn cmd_domination(a: &DominationArgs) -> Result<Output> {
    let phi = YoungFunction::from_name(&a.phi)?;
    let psi = YoungFunction::from_name(&a.psi)?;
    let scales = match &a.scales {
        Some(text) => parse_f64_list(text)?,
        None => young::default_scale_grid(),
    };
    let thresholds = match &a.thresholds {
        Some(text) => parse_f64_list(text)?,
        None => young::default_threshold_grid(),
    };
    // The library predicate reads "the second argument dominates the
    // first beyond a threshold"; the CLI promises --phi dominates --psi.
    let cert = young::eventually_dominates(&psi, &phi, &scales, &thresholds);
    Ok(Output::json(json!({
        "holds": cert.holds,
        "scale": cert.scale,
        "threshold": cert.threshold,
        "probe_max": cert.probe_max,
        "counterexample": cert.counterexample,
    })))
}

fn cmd_hermite(a: &HermiteArgs) -> Result<Output> {
    let alpha = parse_usize_list(&a.alpha)?;
    let dim = alpha.len();
    let series = hermite::hermite(dim, &alpha)?;
    let field = series.to_field();
    let mut csv = String::from("alpha,coeff\n");
    let mut coeffs = Vec::new();
    for (index, &c) in series.coeffs() {
        let joined: Vec<String> = index.iter().map(|k| k.to_string()).collect();
        csv.push_str(&format!("{},{}\n", joined.join(" "), csv_num(c)));
        coeffs.push(json!({ "alpha": index, "coeff": c }));
    }
    let value = match &a.at {
        Some(text) => {
            let x = parse_f64_list(text)?;
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
            }
            Some(series.eval(&x))
        }
        None => None,
    };
    Ok(Output::with_csv(
        json!({
            "alpha": alpha,
            "factorial": hermite::multi_factorial(&alpha),
            "norm_squared": series.l2_norm_squared(),
            "coefficients": coeffs,
            "field": field_json(&field)?,
            "value": value,
        }),
        csv,
    ))
}

fn cmd_expand(cfg: &RunConfig, a: &ExpandArgs) -> Result<Output> {
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    let e = hermite::expand(&f, a.degree, &i)?;
    let mut csv = String::from("alpha,coeff\n");
    let mut coeffs = Vec::new();
    for (index, &c) in e.series.coeffs() {
        let joined: Vec<String> = index.iter().map(|k| k.to_string()).collect();
        csv.push_str(&format!("{},{}\n", joined.join(" "), csv_num(c)));
        coeffs.push(json!({ "alpha": index, "coeff": c }));
    }
    Ok(Output::with_csv(
        json!({
            "degree": a.degree,
            "reconstruction_error": e.reconstruction_error,
            "coefficients": coeffs,
        }),
        csv,
    ))
}

fn cmd_k1(cfg: &RunConfig, a: &K1Args) -> Result<Output> {
    let u = RandomField::parse(a.n, &a.u)?;
    let i = integrator(cfg, a.n);
    let value =
        if a.center { manifold::cumulant_centered(&u, &i)? } else { manifold::cumulant(&u, &i)? };
    Ok(Output::json(json!({ "value": value })))
}

fn cmd_chart(cfg: &RunConfig, a: &ChartArgs) -> Result<Output> {
    let q = RandomField::parse(a.n, &a.q)?;
    let i = integrator(cfg, a.n);
    let point = manifold::chart(&q, &i)?;
    let check = point.check(&i)?;
    Ok(Output::json(json!({
        "statistic": field_json(point.statistic())?,
        "cumulant": point.cumulant(),
        "statistic_mean": check.statistic_mean,
        "density_mass": check.density_mass,
    })))
}

fn cmd_fisher(cfg: &RunConfig, a: &FisherArgs) -> Result<Output> {
    let i = integrator(cfg, a.n);
    let stats: Vec<RandomField> = a
        .stats
        .split(';')
        .map(|s| RandomField::parse(a.n, s.trim()))
        .collect::<Result<Vec<_>>>()?;
    let family = ExpFamily::new(stats, &i)?;
    let theta = parse_f64_list(&a.theta)?;
    let r = manifold::cumulant_and_fisher(&family, &theta, &i)?;
    Ok(Output::json(json!({
        "cumulant": r.cumulant,
        "grad": r.grad,
        "covariance": r.covariance,
        "hessian": r.hessian,
        "max_difference": r.max_difference,
    })))
}

fn cmd_hyvarinen(cfg: &RunConfig, a: &HyvarinenArgs) -> Result<Output> {
    let i = integrator(cfg, a.n);
    let p = ExpModelPoint::new(RandomField::parse(a.n, &a.up)?, &i)?;
    let q = ExpModelPoint::new(RandomField::parse(a.n, &a.uq)?, &i)?;
    let value = manifold::hyvarinen(&p, &q, &i)?;
    Ok(Output::json(json!({ "value": value })))
}

fn cmd_otto(cfg: &RunConfig, a: &OttoArgs) -> Result<Output> {
    let i = integrator(cfg, a.n);
    let f = RandomField::parse(a.n, &a.f)?;
    let g = RandomField::parse(a.n, &a.g)?;
    let p = ExpModelPoint::new(RandomField::parse(a.n, &a.up)?, &i)?;
    let r = manifold::otto_adjoint_check(&f, &g, &p, &i)?;
    Ok(Output::json(json!({
        "inner": r.inner,
        "adjoint": r.adjoint,
        "residual": r.residual,
    })))
}

fn cmd_logsob(cfg: &RunConfig, a: &LogsobArgs) -> Result<Output> {
    let i = integrator(cfg, a.n);
    let p = ExpModelPoint::new(RandomField::parse(a.n, &a.u)?, &i)?;
    let r = manifold::log_sobolev_check(&p, &i)?;
    Ok(Output::json(json!({
        "entropy": r.entropy,
        "energy": r.energy,
        "slack": r.slack,
        "holds": r.holds,
    })))
}

fn cmd_sphere(cfg: &RunConfig, a: &SphereArgs) -> Result<Output> {
    let i = integrator(cfg, a.n);
    match a.direction {
        SphereDirection::To => {
            let (u, v) = match (&a.u, &a.v) {
                (Some(u), Some(v)) => (u, v),
                _ => {
                    return Err(Error::InvalidArgument(
                        "direction \"to\" needs --u and --v".into(),
                    ))
                }
            };
            let p = ExpModelPoint::new(RandomField::parse(a.n, u)?, &i)?;
            let v = RandomField::parse(a.n, v)?;
            let state = manifold::bundle_to_sphere(&p, &v, &i)?;
            let check = manifold::sphere_pairing_check(&p, &v, &v, &i)?;
            Ok(Output::json(json!({
                "point": field_json(&state.point)?,
                "velocity": field_json(&state.velocity)?,
                "mass": check.mass,
                "tangency": check.tangency,
                "pairing_gap": check.pairing_gap,
            })))
        }
        SphereDirection::From => {
            let (point, velocity) = match (&a.point, &a.velocity) {
                (Some(p), Some(v)) => (p, v),
                _ => {
                    return Err(Error::InvalidArgument(
                        "direction \"from\" needs --point and --velocity".into(),
                    ))
                }
            };
            let state = SpherePoint {
                point: RandomField::parse(a.n, point)?,
                velocity: RandomField::parse(a.n, velocity)?,
            };
            let (p, v) = manifold::sphere_to_bundle(&state, &i)?;
            Ok(Output::json(json!({
                "statistic": field_json(p.statistic())?,
                "cumulant": p.cumulant(),
                "velocity": field_json(&v)?,
            })))
        }
    }
}

fn cmd_portmanteau(a: &PortmanteauArgs) -> Result<Output> {
    let weights = parse_f64_list(&a.weights)?;
    let p = parse_f64_list(&a.p)?;
    let q = parse_f64_list(&a.q)?;
    let space = FiniteSpace::from_weights(weights)?;
    let r = oracle::exact_portmanteau(&space, &p, &q)?;
    let mut csv = String::from("t,z\n");
    for &(t, z) in &r.arc {
        csv.push_str(&format!("{},{}\n", csv_num(t), csv_num(z)));
    }
    Ok(Output::with_csv(serde_json::to_value(&r)?, csv))
}

fn cmd_sobolev(cfg: &RunConfig, a: &SobolevArgs) -> Result<Output> {
    let f = a.field.resolve()?;
    let i = integrator(cfg, a.field.n);
    match a.check {
        SobolevCheck::Membership => {
            let r = sobolev::sobolev_membership(&f, &i)?;
            let grads: Vec<Value> = r.grad_norms.iter().map(|&g| verdict(g)).collect();
            Ok(Output::json(json!({
                "f_norm": verdict(r.f_norm),
                "grad_norms": grads,
                "total": verdict(r.total),
                "member": r.member,
            })))
        }
        SobolevCheck::Increment => {
            let h = parse_f64_list(&a.h)?;
            let r = sobolev::translation_increment_check(&f, &h, a.t, a.alpha, &i)?;
            Ok(Output::json(json!({
                "alpha": r.alpha,
                "t": r.t,
                "identity_gap": r.identity_gap,
                "identity_gap_refined": r.identity_gap_refined,
                "remainder": r.remainder,
                "remainder_half": r.remainder_half,
                "ratio": r.ratio,
                "superlinear": r.superlinear,
            })))
        }
        SobolevCheck::Chain => {
            let activation = parse_activation(&a.activation)?;
            let bumps = sobolev::bump_presets(a.field.n)?;
            let r = sobolev::lipschitz_composition(activation, &f, &bumps, &i)?;
            let grads: Vec<Value> = r.composite.grad_norms.iter().map(|&g| verdict(g)).collect();
            Ok(Output::json(json!({
                "lipschitz_constant": r.lipschitz_constant,
                "chain_residual": r.chain_residual,
                "composite": {
                    "f_norm": verdict(r.composite.f_norm),
                    "grad_norms": grads,
                    "total": verdict(r.composite.total),
                    "member": r.composite.member,
                },
            })))
        }
        SobolevCheck::Embedding => {
            let r = sobolev::local_embedding_bound(&f, a.rho, a.k, &i)?;
            Ok(Output::json(json!({
                "lhs": r.lhs,
                "rhs": r.rhs,
                "norm": r.norm,
                "pass": r.pass,
            })))
        }
    }
}

fn cmd_gen_fixtures(a: &GenFixturesArgs) -> Result<Output> {
    let fixtures = oracle::generate_fixtures()?;
    std::fs::create_dir_all(&a.dir)?;
    let path = a.dir.join("fixtures.json");
    let mut text = serde_json::to_string_pretty(&fixtures)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(Output::json(json!({
        "written": fixtures.len(),
        "path": path.display().to_string(),
    })))
}
