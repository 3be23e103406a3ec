//! File-based front end: every command reads JSON inputs, writes JSON or CSV outputs
//! carrying a run header, and reports one of three exit statuses.

use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use innerfn::diagnostics::{classify, eta_curve, ClassifyConfig, EtaCurve, DEFAULT_R_MAX};
use innerfn::entropy::{
    b2_tail_profile, build_sipification, claim_ratios, entropy_integral, family_L, g_entropy_sum,
    g_entropy_sum_dyadic, l_count, l_length_sum, length_sum, whitney_scan, BoundarySet, MAX_L_ARCS,
};
use innerfn::eval::{InnerEvaluator, InnerFunction, SingularMeasure, ZeroSet};
use innerfn::geometry::DiscPoint;
use innerfn::zoo::{transform_zeros, Generated, GeneratorSpec, Transform};

pub mod output;

use output::{num, read_json, write_csv, write_json, RunInfo};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range input.
    Input(String),
    /// An output could not be written.
    Output(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<innerfn::Error> for CliError {
    fn from(e: innerfn::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    /// Outputs were written but some quantity had nothing to measure.
    Degenerate,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Done => 0,
            Status::Degenerate => 3,
        }
    }
}

pub const INPUT_ERROR_EXIT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "innerfn",
    version,
    about = "Generate zero sets and run inner-function diagnostics"
)]
pub struct Cli {
    /// Size of the worker pool; results do not depend on it. Default: all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a zero set or boundary set from a generator spec.
    Generate(GenerateArgs),
    /// Run every diagnostic and write a report with evidence labels.
    Diagnose(DiagnoseArgs),
    /// Write the eta curve as CSV.
    Eta(EtaArgs),
    /// Sample |Theta| on a polar grid and mark the sublevel set {|Theta| < 1 - eps}.
    Sublevel(SublevelArgs),
    /// Entropy integral and dyadic families of a boundary set.
    Entropy(EntropyArgs),
    /// Blaschke products B1, B2 for a measure on a boundary set, with the probe checks.
    Sipify(SipifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// Generator spec (JSON).
    #[arg(long)]
    #[serde(skip)]
    pub spec: PathBuf,
    /// JSON list of transforms applied in order.
    #[arg(long)]
    #[serde(skip)]
    pub transforms: Option<PathBuf>,
    #[arg(short, long)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Zero set and/or singular measure inputs.
#[derive(Debug, Args)]
pub struct InnerInput {
    /// Zero set (JSON).
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// Singular measure (JSON).
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: InnerInput,
    /// Classification config (JSON); missing fields take their defaults.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Hyperbolic mesh step for the eta probes. Default 0.1.
    #[arg(long)]
    pub mesh: Option<f64>,
    /// Probe region radius. Default 1 - 1/4096.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Comma-separated t values. Default 0.05, 0.10, ..., 0.95, 0.99, 0.999.
    #[arg(long, value_delimiter = ',')]
    pub t_values: Option<Vec<f64>>,
    /// Report (JSON).
    #[arg(short, long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Also write the eta curve (CSV).
    #[arg(long)]
    #[serde(skip)]
    pub eta_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EtaArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: InnerInput,
    /// Comma-separated, strictly increasing t values in (0, 1).
    #[arg(long, value_delimiter = ',', required = true)]
    pub t_values: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub mesh: f64,
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    pub r_max: f64,
    #[arg(short, long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SublevelArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: InnerInput,
    /// Points with |Theta| < 1 - eps are in the set.
    #[arg(long)]
    pub eps: f64,
    /// Radii r_max (i + 1/2) / n_radial.
    #[arg(long, default_value_t = 64)]
    pub n_radial: usize,
    /// Angles 2 pi j / n_angular.
    #[arg(long, default_value_t = 128)]
    pub n_angular: usize,
    #[arg(long, default_value_t = 0.99)]
    pub r_max: f64,
    #[arg(short, long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    /// Boundary set (JSON).
    #[arg(long)]
    #[serde(skip)]
    pub set: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub max_level: u32,
    /// List the L family as well (refused above 2^22 arcs).
    #[arg(long)]
    pub with_l: bool,
    #[arg(short, long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SipifyArgs {
    /// Singular measure (JSON); every atom must lie in the set.
    #[arg(long)]
    #[serde(skip)]
    pub measure: PathBuf,
    /// Boundary set (JSON).
    #[arg(long)]
    #[serde(skip)]
    pub set: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_level: u32,
    /// Depth factors of the B2 tail probes.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub tail_eps: Vec<f64>,
    /// Receives b1.json, b2.json and sipify.json.
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: PathBuf,
}

fn config_value(args: &impl Serialize) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

/// Runs a parsed command line, inside a pool of `workers` threads when given.
pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.workers {
        Some(0) => Err(CliError::Input("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Input(format!("--workers: {e}")))?
            .install(|| run_command(cli.command)),
        None => run_command(cli.command),
    }
}

pub fn run_command(cmd: Command) -> Result<Status, CliError> {
    match cmd {
        Command::Generate(a) => run_generate(&a),
        Command::Diagnose(a) => run_diagnose(&a),
        Command::Eta(a) => run_eta(&a),
        Command::Sublevel(a) => run_sublevel(&a),
        Command::Entropy(a) => run_entropy(&a),
        Command::Sipify(a) => run_sipify(&a),
    }
}

pub fn run_generate(a: &GenerateArgs) -> Result<Status, CliError> {
    let mut info = RunInfo::new("generate", Value::Null);
    let spec: GeneratorSpec = read_json(&a.spec, &mut info)?;
    let transforms: Vec<Transform> = match &a.transforms {
        Some(p) => read_json(p, &mut info)?,
        None => Vec::new(),
    };
    info.config = json!({ "spec": spec, "transforms": transforms });
    match spec.generate()? {
        Generated::Zeros(mut zs) => {
            for t in &transforms {
                zs = transform_zeros(&zs, t)?;
            }
            write_json(&a.out, &zs, &info)?;
        }
        Generated::Boundary(set) => {
            if !transforms.is_empty() {
                return Err(CliError::Input("transforms apply to zero sets only".into()));
            }
            write_json(&a.out, &set, &info)?;
        }
    }
    Ok(Status::Done)
}

fn load_inner(input: &InnerInput, info: &mut RunInfo) -> Result<InnerFunction, CliError> {
    if input.zeros.is_none() && input.measure.is_none() {
        return Err(CliError::Input(
            "one of --zeros or --measure is required".into(),
        ));
    }
    let zs = match &input.zeros {
        Some(p) => read_json::<ZeroSet>(p, info)?,
        None => ZeroSet::empty(),
    };
    let mu = match &input.measure {
        Some(p) => read_json::<SingularMeasure>(p, info)?,
        None => SingularMeasure::empty(),
    };
    Ok(InnerFunction::new(zs, mu))
}

fn eta_rows(curve: &EtaCurve) -> Vec<Vec<String>> {
    curve
        .samples
        .iter()
        .map(|s| {
            vec![
                num(Some(s.t)),
                num(s.estimate),
                num(s.argmin.map(|p| p.re())),
                num(s.argmin.map(|p| p.im())),
                num(s.argmin.map(|p| p.depth())),
                s.n_probes.to_string(),
            ]
        })
        .collect()
}

const ETA_HEADER: [&str; 6] = [
    "t",
    "estimate",
    "argmin_re",
    "argmin_im",
    "argmin_depth",
    "n_probes",
];

pub fn run_diagnose(a: &DiagnoseArgs) -> Result<Status, CliError> {
    let mut info = RunInfo::new("diagnose", Value::Null);
    let f = load_inner(&a.input, &mut info)?;
    let mut config: ClassifyConfig = match &a.config {
        Some(p) => read_json(p, &mut info)?,
        None => ClassifyConfig::default(),
    };
    if let Some(m) = a.mesh {
        config.mesh = m;
    }
    if let Some(r) = a.r_max {
        config.r_max = r;
    }
    if let Some(t) = &a.t_values {
        config.t_values = t.clone();
    }
    info.config = config_value(&config);
    let report = classify(&f, &config)?;
    let degenerate = report.eta_curve.all_absent();
    let mut body = serde_json::to_value(&report).map_err(|e| CliError::Output(e.to_string()))?;
    if let Value::Object(map) = &mut body {
        map.insert("degenerate".into(), Value::Bool(degenerate));
    }
    write_json(&a.out, &body, &info)?;
    if let Some(p) = &a.eta_csv {
        write_csv(p, &info, &ETA_HEADER, eta_rows(&report.eta_curve))?;
    }
    Ok(if degenerate {
        Status::Degenerate
    } else {
        Status::Done
    })
}

pub fn run_eta(a: &EtaArgs) -> Result<Status, CliError> {
    let mut info = RunInfo::new("eta", config_value(a));
    let f = load_inner(&a.input, &mut info)?;
    let curve = eta_curve(&f, &a.t_values, a.r_max, a.mesh)?;
    write_csv(&a.out, &info, &ETA_HEADER, eta_rows(&curve))?;
    Ok(if curve.all_absent() {
        Status::Degenerate
    } else {
        Status::Done
    })
}

pub fn run_sublevel(a: &SublevelArgs) -> Result<Status, CliError> {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(CliError::Input(format!(
            "--eps must lie in (0, 1), got {}",
            a.eps
        )));
    }
    if !(a.r_max > 0.0 && a.r_max < 1.0) {
        return Err(CliError::Input(format!(
            "--r-max must lie in (0, 1), got {}",
            a.r_max
        )));
    }
    let mut info = RunInfo::new("sublevel", config_value(a));
    let f = load_inner(&a.input, &mut info)?;
    let ev = InnerEvaluator::new(&f);
    let threshold = 1.0 - a.eps;
    let (nr, na) = (a.n_radial, a.n_angular);
    let rows: Vec<Vec<String>> = (0..nr * na)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / na, k % na);
            let r = a.r_max * (i as f64 + 0.5) / nr as f64;
            let z = DiscPoint::from_polar(r, TAU * (j as f64 / na as f64)).expect("r < 1");
            let m = ev.eval(&z).value.norm();
            vec![
                num(Some(z.re())),
                num(Some(z.im())),
                num(Some(m)),
                u8::from(m < threshold).to_string(),
            ]
        })
        .collect();
    write_csv(&a.out, &info, &["re", "im", "modulus", "in_set"], rows)?;
    Ok(Status::Done)
}

pub fn run_entropy(a: &EntropyArgs) -> Result<Status, CliError> {
    let mut info = RunInfo::new("entropy", config_value(a));
    let set: BoundarySet = read_json(&a.set, &mut info)?;
    let scan = whitney_scan(&set, a.max_level)?;
    let l = if a.with_l {
        Some(family_L(&scan.g)?)
    } else {
        None
    };
    let body = json!({
        "entropy_integral": entropy_integral(&set),
        "positive_measure": set.has_positive_measure(),
        "measure_turns": set.measure_turns(),
        "max_level": a.max_level,
        "counts": {
            "G": scan.g.len(),
            "F": scan.f.len(),
            "L": l_count(&scan.g),
            "residual": scan.residual.len(),
        },
        "sums": {
            "g_entropy": g_entropy_sum(&scan.g),
            "g_entropy_dyadic": g_entropy_sum_dyadic(&scan.g),
            "f_length": length_sum(&scan.f),
            "l_length": l_length_sum(&scan.g),
            "residual_length": length_sum(&scan.residual),
        },
        "l_limit": MAX_L_ARCS,
        "G": scan.g,
        "F": scan.f,
        "residual": scan.residual,
        "L": l,
    });
    write_json(&a.out, &body, &info)?;
    Ok(Status::Done)
}

pub fn run_sipify(a: &SipifyArgs) -> Result<Status, CliError> {
    let mut info = RunInfo::new("sipify", config_value(a));
    let mu: SingularMeasure = read_json(&a.measure, &mut info)?;
    let set: BoundarySet = read_json(&a.set, &mut info)?;
    if let Some(e) = a.tail_eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(CliError::Input(format!(
            "--tail-eps values must lie in (0, 1), got {e}"
        )));
    }
    let s = build_sipification(&mu, &set, a.max_level)?;
    let (samples, fitted) = claim_ratios(&s.composite(&mu), &s.g);
    let tail = b2_tail_profile(&s.b2, &s.g, &a.tail_eps);
    write_json(&a.out_dir.join("b1.json"), &s.b1, &info)?;
    write_json(&a.out_dir.join("b2.json"), &s.b2, &info)?;
    let body = json!({
        "max_level": s.max_level,
        "positive_measure": s.positive_measure,
        "counts": {
            "G": s.g.len(),
            "F": s.f_count,
            "L": s.l_count,
            "residual": s.residual_count,
            "b1_zeros": s.b1.len(),
            "b2_zeros": s.b2.len(),
            "unanchored_f": s.unanchored_f,
            "unanchored_l": s.unanchored_l,
        },
        "sums": {
            "g_entropy": s.g_entropy_sum,
            "f_length": s.f_length_sum,
            "l_length": s.l_length_sum,
            "b2_blaschke": s.b2_blaschke_sum,
        },
        "claim": { "fitted_constant": fitted, "samples": samples },
        "b2_tail": tail,
    });
    write_json(&a.out_dir.join("sipify.json"), &body, &info)?;
    Ok(Status::Done)
}

/// Convenience for tests and scripts: parse `args` (without the program name) and run.
pub fn run_args<I, S>(args: I) -> Result<Status, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(
        std::iter::once("innerfn".into()).chain(args.into_iter().map(Into::into)),
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    run(cli)
}
