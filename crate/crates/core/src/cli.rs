//! Command-line surface.
//!
//! Every subcommand writes a JSON document (or CSV where noted) to standard output or to
//! `--output`. Floats are printed with 12 significant digits.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage error, 3 oracle disagreement.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channels::{apply, build_phi_family, MapParams, QuantumState, QuantumStateJson};
use crate::dynamics::{
    crossing_times, tangency_slope, Boundary, map_at, n_enm, nu_enm, switch_times, trajectory, trajectory_csv, Schedule,
};
use crate::error::Error;
use crate::generators::{
    build_generator, closed_form_spectrum, dissipativity_threshold, is_ccp, is_conditionally_positive,
    is_dissipative, pair_overlap, spectrum_distance, spectrum_rates, GenParams, PositivityClass,
};
use crate::linalg::{self, eigvals_general};
use crate::numerics::{adaptive_simpson, format_sig};
use crate::regions::{classify_grid, classify_numeric, classify_point, region_area, region_polygon, Region};
use crate::sampling::{self, orthonormal_pair, traceless_unit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "QUDIT_MAPS_SEED";

/// Margin below which closed-form and oracle verdicts are not compared.
const MARGIN_FILTER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub d: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    pub sample_budget: usize,
    /// JSON for every command except `trajectory`, which defaults to CSV.
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: None,
            tolerance: 1e-9,
            seed: 42,
            sample_budget: 10_000,
            output_format: None,
            output_path: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qudit-maps", version, about = "Positive, Schwarz and completely positive qudit maps")]
pub struct Cli {
    /// JSON file with default run settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and numerical membership of one (alpha, beta) point.
    Classify {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Vertices of a region polygon.
    Region {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        which: Region,
    },
    /// Areas of the three regions.
    Area {
        #[arg(long)]
        d: Option<usize>,
    },
    /// (alpha, beta) along a schedule; CSV unless --format json.
    Trajectory {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Times at which a constant-nu trajectory enters the P, CP and EB regions for good.
    Crossings {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
    },
    /// Relaxation rates and generator-level tests.
    Spectrum {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, default_value = "positive")]
        class: PositivityClass,
        /// Comma-separated diagonal energies.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
    },
    /// Runs the invariant battery and prints one line per check.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Evolves a JSON state file under a schedule to time t.
    Apply {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// One of const, enm, pdiv, sdiv, enm2, weyl.
    #[arg(long, default_value = "enm")]
    pub schedule: String,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Channels,
    Generators,
    Regions,
    Dynamics,
}

/// Outcome of a command before it is written out.
struct Report {
    body: String,
    code: i32,
}

impl Report {
    fn json(v: Value, code: i32) -> Self {
        Report { body: format!("{}\n", serde_json::to_string_pretty(&round_floats(v)).expect("finite json")), code }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Property(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoCrossing { .. } | Error::SingularMap { .. } | Error::NoConvergence(_) => {
                CliError::Property(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Rounds every float in a JSON tree to 12 significant digits; non-finite values become null.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            format_sig(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn opt_f64(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

/// Parses `args` (including the program name), runs the command and writes its output.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command, &cfg) {
        Ok(report) => {
            let written = match &cfg.output_path {
                Some(path) => fs::write(path, &report.body).map_err(|e| e.to_string()),
                None => stdout.write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            report.code
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Property(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_PROPERTY
        }
    }
}

/// Command-line flags override the environment, which overrides `--config`, which overrides
/// the defaults.
fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tolerance = t;
    }
    if let Some(b) = cli.budget {
        cfg.sample_budget = b;
    }
    if let Some(f) = cli.format {
        cfg.output_format = Some(f);
    }
    if let Some(o) = &cli.output {
        cfg.output_path = Some(o.clone());
    }
    Ok(cfg)
}

fn dimension(d: Option<usize>, cfg: &RunConfig) -> Result<usize, CliError> {
    let d = d.or(cfg.d).ok_or_else(|| CliError::Usage("missing --d".into()))?;
    linalg::check_dim(d)?;
    Ok(d)
}

fn schedule_of(a: &ScheduleArgs, cfg: &RunConfig) -> Result<Schedule, CliError> {
    Ok(Schedule::from_name(&a.schedule, dimension(a.d, cfg)?, a.kappa, a.nu)?)
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Classify { d, alpha, beta } => cmd_classify(dimension(*d, cfg)?, *alpha, *beta, cfg),
        Command::Region { d, which } => cmd_region(dimension(*d, cfg)?, *which, cfg),
        Command::Area { d } => cmd_area(dimension(*d, cfg)?),
        Command::Trajectory { schedule, t_max, steps } => {
            cmd_trajectory(&schedule_of(schedule, cfg)?, *t_max, *steps, cfg)
        }
        Command::Crossings { d, kappa, nu } => cmd_crossings(dimension(*d, cfg)?, *kappa, *nu),
        Command::Spectrum { d, kappa, nu, class, h } => {
            cmd_spectrum(dimension(*d, cfg)?, *kappa, *nu, *class, h.clone(), cfg)
        }
        Command::Verify { suite } => Ok(cmd_verify(*suite, cfg)),
        Command::Apply { state, schedule, t } => cmd_apply(state, schedule, *t, cfg),
    }
}

fn verdict_json(v: &crate::regions::RegionVerdict) -> Value {
    json!({
        "positive": v.positive,
        "cp": v.completely_positive,
        "eb": v.entanglement_breaking,
    })
}

fn cmd_classify(d: usize, alpha: f64, beta: f64, cfg: &RunConfig) -> Result<Report, CliError> {
    let p = MapParams::new(d, alpha, beta)?;
    let closed = classify_point(&p);
    let oracle = classify_numeric(&p, cfg.sample_budget, cfg.seed)?;
    let disagreements: Vec<String> = Region::ALL
        .into_iter()
        .filter(|&r| closed.margin(r).abs() > MARGIN_FILTER && closed.get(r) != oracle.get(r))
        .map(|r| r.to_string())
        .collect();
    let code = if disagreements.is_empty() { EXIT_OK } else { EXIT_DISAGREEMENT };
    let mut out = verdict_json(&closed);
    let extra = json!({
        "d": d,
        "alpha": alpha,
        "beta": beta,
        "closed_form": verdict_json(&closed),
        "oracle": verdict_json(&oracle),
        "margins": { "closed_form": to_value(&closed.margins), "oracle": to_value(&oracle.margins) },
        "disagreements": disagreements,
    });
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    Ok(Report::json(out, code))
}

fn cmd_region(d: usize, which: Region, cfg: &RunConfig) -> Result<Report, CliError> {
    let poly = region_polygon(which, d)?;
    Ok(match cfg.output_format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Csv => Report { body: poly.to_csv(), code: EXIT_OK },
        OutputFormat::Json => Report::json(
            json!({
                "which": which.to_string(),
                "d": d,
                "vertices": poly.vertices.iter().map(|v| json!([v.0, v.1])).collect::<Vec<_>>(),
                "area": poly.area(),
            }),
            EXIT_OK,
        ),
    })
}

fn cmd_area(d: usize) -> Result<Report, CliError> {
    let mut closed = serde_json::Map::new();
    let mut shoelace = serde_json::Map::new();
    for r in Region::ALL {
        let a = region_area(r, d)?;
        closed.insert(r.to_string(), json!(a.closed_form));
        shoelace.insert(r.to_string(), json!(a.shoelace));
    }
    let mut out = closed;
    out.insert("d".into(), json!(d));
    out.insert("shoelace".into(), Value::Object(shoelace));
    Ok(Report::json(Value::Object(out), EXIT_OK))
}

fn cmd_trajectory(s: &Schedule, t_max: f64, steps: usize, cfg: &RunConfig) -> Result<Report, CliError> {
    let pts = trajectory(s, t_max, steps)?;
    Ok(match cfg.output_format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => Report::json(to_value(&pts), EXIT_OK),
        OutputFormat::Csv => Report { body: trajectory_csv(&pts), code: EXIT_OK },
    })
}

fn cmd_crossings(d: usize, kappa: f64, nu: f64) -> Result<Report, CliError> {
    let r = crossing_times(d, kappa, nu)?;
    let code = if r.is_ordered() { EXIT_OK } else { EXIT_PROPERTY };
    Ok(Report::json(
        json!({
            "t_P": opt_f64(r.t_p),
            "t_CP": opt_f64(r.t_cp),
            "t_EB": opt_f64(r.t_eb),
            "margins": to_value(&r.margins),
            "ordered": r.is_ordered(),
        }),
        code,
    ))
}

fn cmd_spectrum(
    d: usize,
    kappa: f64,
    nu: f64,
    class: PositivityClass,
    h: Option<Vec<f64>>,
    cfg: &RunConfig,
) -> Result<Report, CliError> {
    let mut p = GenParams::new(d, kappa, nu)?;
    if let Some(h) = h {
        p = p.with_energies(h)?;
    }
    let rates = spectrum_rates(&p, class)?;
    let mut tests = serde_json::Map::new();
    let mut disagreement = false;
    if kappa > 0.0 {
        let cp = is_conditionally_positive(&p, cfg.sample_budget, cfg.seed)?;
        disagreement |= cp.closed_form && cp.sampled_min < -cfg.tolerance;
        tests.insert(
            "conditional_positivity".into(),
            json!({ "closed_form": cp.closed_form, "witness": Value::Null, "sampled": cp.sampled_min,
                    "seed": cfg.seed, "budget": cfg.sample_budget }),
        );
        let diss = is_dissipative(&p, cfg.sample_budget, cfg.seed)?;
        disagreement |= diss.closed_form
            && (diss.min_witness_eig < -cfg.tolerance || diss.min_sampled_eig < -cfg.tolerance);
        disagreement |= !diss.closed_form && diss.min_witness_eig >= 0.0;
        tests.insert(
            "dissipativity".into(),
            json!({ "closed_form": diss.closed_form, "witness": diss.min_witness_eig, "witness_c": diss.witness_c,
                    "sampled": diss.min_sampled_eig, "seed": cfg.seed, "budget": cfg.sample_budget }),
        );
        let ccp = is_ccp(&p)?;
        disagreement |= ccp.closed_form != (ccp.min_eig_projected >= -cfg.tolerance);
        tests.insert(
            "conditional_complete_positivity".into(),
            json!({ "closed_form": ccp.closed_form, "witness": ccp.min_eig_projected, "sampled": Value::Null,
                    "seed": Value::Null, "budget": Value::Null }),
        );
    }
    let mut out = to_value(&rates);
    if let Value::Object(o) = &mut out {
        o.insert("d".into(), json!(d));
        o.insert("kappa".into(), json!(kappa));
        o.insert("nu".into(), json!(nu));
        o.insert("tests".into(), Value::Object(tests));
    }
    let code = if disagreement || rates.numeric_mismatch > 1e-9 { EXIT_DISAGREEMENT } else { EXIT_OK };
    Ok(Report::json(out, code))
}

fn cmd_apply(path: &PathBuf, args: &ScheduleArgs, t: f64, cfg: &RunConfig) -> Result<Report, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let j: QuantumStateJson = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let state = QuantumState::from_json(&j)?;
    state.validate(cfg.tolerance.max(1e-9))?;
    let d = args.d.unwrap_or(state.d());
    if d != state.d() {
        return Err(CliError::Usage(format!("--d {d} does not match state dimension {}", state.d())));
    }
    let s = Schedule::from_name(&args.schedule, d, args.kappa, args.nu)?;
    let out = apply(&map_at(&s, t)?, &state)?;
    Ok(Report::json(to_value(&out.to_json()), EXIT_OK))
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

fn cmd_verify(suite: Suite, cfg: &RunConfig) -> Report {
    let checks = verify_suite(suite, cfg);
    let mut body = String::new();
    for c in &checks {
        body.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    body.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    Report { body, code: if failed == 0 { EXIT_OK } else { EXIT_PROPERTY } }
}

/// Runs the invariant battery of the selected modules.
pub fn verify_suite(suite: Suite, cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Channels) {
        out.extend(verify_channels(cfg));
    }
    if matches!(suite, Suite::All | Suite::Generators) {
        out.extend(verify_generators(cfg));
    }
    if matches!(suite, Suite::All | Suite::Regions) {
        out.extend(verify_regions(cfg));
    }
    if matches!(suite, Suite::All | Suite::Dynamics) {
        out.extend(verify_dynamics());
    }
    out
}

fn check<F: FnOnce() -> crate::Result<(bool, String)>>(name: &str, f: F) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult::new(name, passed, detail),
        Err(e) => CheckResult::new(name, false, format!("error: {e}")),
    }
}

fn verify_channels(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("channels/family-unital-trace-preserving", || {
        let mut worst = 0.0f64;
        for d in 2..=8 {
            for (alpha, beta) in [(0.3, -0.2), (1.5, 0.0), (-0.7, 2.1)] {
                let m = build_phi_family(&MapParams::new(d, alpha, beta)?)?;
                worst = worst.max(m.trace_preservation_defect()).max(m.unitality_defect());
            }
        }
        Ok((worst <= 1e-12, format!("max defect = {}", format_sig(worst))))
    }));
    out.push(check("channels/choi-round-trip", || {
        let mut rng = sampling::rng(cfg.seed);
        let mut worst = 0.0f64;
        for d in 2..=5 {
            let a = sampling::ginibre(&mut rng, d);
            let b = sampling::ginibre(&mut rng, d);
            let m = crate::channels::SuperMap::sandwich(&a, &b)?;
            let back = crate::channels::SuperMap::from_choi(d, m.choi().clone())?;
            worst = worst.max(m.distance(&back));
        }
        Ok((worst <= 1e-12, format!("max |T - T(C(T))| = {}", format_sig(worst))))
    }));
    out.push(check("channels/transposition-not-schwarz", || {
        let witness = crate::regions::schwarz_falsify(&crate::channels::transposition(2)?, cfg.sample_budget, cfg.seed)?;
        Ok((witness.is_some(), format!("witness found: {}", witness.is_some())))
    }));
    out
}

fn verify_generators(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("generators/trace-annihilation", || {
        let mut rng = sampling::rng(cfg.seed);
        let mut worst = 0.0f64;
        for d in 2..=6 {
            for nu in [-1.5, -0.5, 0.0, 1.0] {
                let h: Vec<f64> = (0..d).map(|k| 0.3 * k as f64).collect();
                let l = build_generator(&GenParams::new(d, 1.0, nu)?.with_energies(h)?)?;
                for _ in 0..200 {
                    let x = sampling::ginibre(&mut rng, d);
                    worst = worst.max(linalg::trace(&l.apply_matrix(&x)?).norm());
                }
            }
        }
        Ok((worst <= 1e-10, format!("max |Tr L(X)| = {}", format_sig(worst))))
    }));
    out.push(check("generators/spectrum-consistency", || {
        let mut worst = 0.0f64;
        for d in 2..=6 {
            for nu in [-1.0, -0.4, 0.0, 0.7] {
                let h: Vec<f64> = (0..d).map(|k| 0.17 * (k * k) as f64).collect();
                let p = GenParams::new(d, 0.9, nu)?.with_energies(h)?;
                let numeric = eigvals_general(build_generator(&p)?.transfer())?;
                worst = worst.max(spectrum_distance(&numeric, &closed_form_spectrum(&p)));
            }
        }
        Ok((worst <= 1e-9, format!("max eigenvalue mismatch = {}", format_sig(worst))))
    }));
    out.push(check("generators/threshold-ordering", || {
        let ok = (2..=8).all(|d| {
            let p = PositivityClass::Positive.nu_threshold(d);
            let s = PositivityClass::Schwarz.nu_threshold(d);
            let k = PositivityClass::KPositive.nu_threshold(d);
            p == -1.0 && p < s && s < k && k == 0.0
        });
        Ok((ok, "-1 < -d/(d+2) < 0 for d in 2..=8".into()))
    }));
    out.push(check("generators/dissipativity-sampling-soundness", || {
        let mut worst = f64::INFINITY;
        for d in 2..=6 {
            let nu = dissipativity_threshold(d);
            let r = is_dissipative(&GenParams::new(d, 1.0, nu)?, cfg.sample_budget, cfg.seed)?;
            worst = worst.min(r.min_sampled_eig).min(r.min_witness_eig);
        }
        Ok((worst >= -1e-9, format!("min eigenvalue at threshold = {}", format_sig(worst))))
    }));
    out.push(check("generators/pair-bound", || {
        let mut rng = sampling::rng(cfg.seed);
        let mut worst = 0.0f64;
        for d in 2..=8 {
            for _ in 0..cfg.sample_budget {
                let (x, y) = orthonormal_pair(&mut rng, d);
                worst = worst.max(pair_overlap(&x, &y)?);
            }
        }
        Ok((worst <= 0.5 + 1e-12, format!("max sum |x_k|^2 |y_k|^2 = {}", format_sig(worst))))
    }));
    out.push(check("generators/dissipation-function", || {
        let mut rng = sampling::rng(cfg.seed);
        let mut worst = 0.0f64;
        for d in 2..=5 {
            let p = GenParams::new(d, 1.0, -0.3)?;
            let l = build_generator(&p)?;
            for _ in 0..50 {
                let x = traceless_unit(&mut rng, d);
                let direct = crate::generators::dissipation_function(&l, &x)?;
                let m = crate::generators::dissipativity_matrix(d, p.a(), &x)?;
                worst = worst.max(linalg::max_abs(&(direct - m)));
            }
        }
        Ok((worst <= 1e-12, format!("max |D_L(X) - kappa M(a,X)| = {}", format_sig(worst))))
    }));
    out
}

fn verify_regions(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    // random pure states on top of the structured probes, per grid point
    let grid_budget = (cfg.sample_budget / 1000).max(1);
    for d in 2..=5 {
        out.push(check(&format!("regions/grid-agreement-d{d}"), || {
            let df = d as f64;
            let pts = classify_grid(d, 101, -2.0 / (df - 1.0) - 0.25, df / (df - 1.0) + 0.25, grid_budget, cfg.seed)?;
            let bad = pts.iter().filter(|g| !g.disagreements(MARGIN_FILTER).is_empty()).count();
            let unnested = pts.iter().filter(|g| !g.closed_form.is_nested() || !g.oracle.is_nested()).count();
            Ok((
                bad == 0 && unnested == 0,
                format!("{} points, {bad} disagreements, {unnested} nesting violations", pts.len()),
            ))
        }));
    }
    for r in Region::ALL {
        out.push(check(&format!("regions/area-{r}"), || {
            let mut worst = 0.0f64;
            let mut worst_d = 0;
            for d in 3..=12 {
                let a = region_area(r, d)?;
                let gap = (a.closed_form - a.shoelace).abs();
                if gap > worst {
                    worst = gap;
                    worst_d = d;
                }
            }
            Ok((worst <= 1e-12, format!("max |closed form - shoelace| = {} (d = {worst_d})", format_sig(worst))))
        }));
    }
    out.push(check("regions/polygons-convex", || {
        let mut ok = true;
        for d in 2..=12 {
            for r in Region::ALL {
                let p = region_polygon(r, d)?;
                ok &= p.is_convex() && p.area() > 0.0;
            }
        }
        Ok((ok, "all polygons convex with positive area".into()))
    }));
    out
}

fn verify_dynamics() -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("dynamics/saturation-identity", || {
        let mut worst = 0.0f64;
        for d in 2..=6 {
            let df = d as f64;
            for k in 0..=50 {
                let t = 0.1 * k as f64;
                let n = adaptive_simpson(&|u| nu_enm(d, u), 0.0, t, 1e-11);
                let lhs = (-n).exp() * df;
                let rhs = ((df - 1.0) * t).exp() + (df - 1.0) * (-t).exp();
                worst = worst.max((lhs - rhs).abs() / rhs);
            }
        }
        Ok((worst <= 1e-9, format!("max relative defect = {}", format_sig(worst))))
    }));
    out.push(check("dynamics/closed-form-n", || {
        let mut worst = 0.0f64;
        for d in 2..=6 {
            for k in 0..=50 {
                let t = 0.1 * k as f64;
                worst = worst.max((n_enm(d, t) - adaptive_simpson(&|u| nu_enm(d, u), 0.0, t, 1e-11)).abs());
            }
        }
        Ok((worst <= 1e-9, format!("max |N(t) - quadrature| = {}", format_sig(worst))))
    }));
    out.push(check("dynamics/switch-times", || {
        let mut worst = 0.0f64;
        for d in 3..=12 {
            let ts = switch_times(d);
            worst = worst.max((nu_enm(d, ts.t_star) + 1.0).abs());
            worst = worst.max((nu_enm(d, ts.t_s) - dissipativity_threshold(d)).abs());
        }
        Ok((worst <= 1e-12, format!("max threshold defect = {}", format_sig(worst))))
    }));
    out.push(check("dynamics/tangency-slopes", || {
        let mut ok = true;
        for d in 2..=6 {
            for nu in [-0.8, -0.2, 0.5] {
                for b in [Boundary::P, Boundary::CP, Boundary::Schwarz] {
                    ok &= tangency_slope(d, 1.3, nu, b).agrees(1e-6);
                }
            }
        }
        Ok((ok, "finite differences match kappa(nu + s) on every boundary".into()))
    }));
    out.push(check("dynamics/boundary-riding", || {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in 2..=6 {
            for k in 0..=200 {
                let m = map_at(&Schedule::OptimalEnm { d }, 0.1 * k as f64)?;
                let e = m.min_choi_eig()?;
                lo = lo.min(e);
                hi = hi.max(e);
            }
        }
        Ok((lo >= -1e-10 && hi <= 1e-8, format!("Choi min-eig in [{}, {}]", format_sig(lo), format_sig(hi))))
    }));
    out.push(check("dynamics/divisibility-flags", || {
        let mut ok = true;
        for d in 3..=8 {
            let ts = switch_times(d);
            for k in 0..=1000 {
                let t = 0.01 * k as f64;
                ok &= Schedule::PDivisible { d }.rates(t).is_some_and(|(_, nu)| nu >= -1.0 - 1e-12);
                ok &= Schedule::SchwarzDivisible { d }
                    .rates(t)
                    .is_some_and(|(_, nu)| nu >= dissipativity_threshold(d) - 1e-12);
                if t > ts.t_star {
                    ok &= nu_enm(d, t) < -1.0;
                }
            }
        }
        Ok((ok, "pdiv nu >= -1, sdiv nu >= -d/(d+2), enm nu < -1 after t_*".into()))
    }));
    out.push(check("dynamics/rate-bound-violation", || {
        let mut worst = 0.0f64;
        for d in 2..=8 {
            let r = spectrum_rates(&GenParams::new(d, 1.0, nu_enm(d, 30.0))?, PositivityClass::KPositive)?;
            worst = worst.max((r.gamma_diag - r.gamma_total / d as f64 - 1.0).abs());
        }
        Ok((worst <= 1e-9, format!("max |Gamma_l - Gamma/d - 1| at t = 30: {}", format_sig(worst))))
    }));
    out.push(check("dynamics/weyl-qubit-tanh", || {
        let mut worst = 0.0f64;
        for k in 0..100 {
            let t = 0.05 * (k + 1) as f64;
            let m = crate::dynamics::weyl_mixture_map(2, t)?;
            let enm = build_phi_family(&MapParams::new(2, 1.0 - (-2.0 * t).exp(), ((-2.0 * t).exp() - 1.0) / 2.0)?)?;
            worst = worst.max(m.distance(&enm));
        }
        Ok((worst <= 1e-10, format!("max distance to tanh schedule = {}", format_sig(worst))))
    }));
    out
}
