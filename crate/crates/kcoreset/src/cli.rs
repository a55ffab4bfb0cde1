//! The `kcoreset` command line.
//!
//! Exit codes: 0 on success, 1 when a requested check fails, 2 on usage or
//! input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kcoreset_core::coreset::{build_eps_sample, certify, HalvingConfig, Target};
use kcoreset_core::discrepancy::{
    color_from_matching, disc_max, disc_max_with_values, min_disc_bruteforce, random_coloring, Coloring,
    DiscrepancyReport,
};
use kcoreset_core::kde::{linf_distance, KdeQuery};
use kcoreset_core::matching::{min_cost_matching, MatchingAlgo};
use kcoreset_core::net::{build_net_with, NetOptions, DEFAULT_MAX_CENTERS};
use kcoreset_core::rng::derive_seed;
use kcoreset_core::{KernelSpec, PointSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::experiments::{self, median, ExperimentSpec};
use crate::gen::{generate, Generator};
use crate::io::{fmt_f64, points_to_csv, points_to_json, read_points, write_points, write_text};

#[derive(Debug, Parser)]
#[command(name = "kcoreset", version, about = "Kernel discrepancy, halving coresets and KDE error certificates")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "KCORESET_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Do not echo the resolved configuration on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic point set.
    Gen(GenArgs),
    /// Min-cost perfect matching of a point set.
    Match(MatchArgs),
    /// Kernel discrepancy of a coloring over an evaluation net.
    Disc(DiscArgs),
    /// Build an epsilon-sample by halving.
    Sample(SampleArgs),
    /// L-infinity distance between two kernel density estimates.
    Eval(EvalArgs),
    /// Run an experiment described by a JSON spec.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    /// uniform-square, uniform-disk, gaussian-mixture, annulus,
    /// coincident-clusters, two-site or isolated-point.
    generator: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Number of sites (coincident-clusters).
    #[arg(long)]
    t: Option<usize>,
    /// Number of components (gaussian-mixture).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    inner: Option<f64>,
    #[arg(long)]
    outer: Option<f64>,
    /// Output file (`.json` for JSON, CSV otherwise); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct MatchArgs {
    input: PathBuf,
    #[arg(long, default_value = "exact")]
    algo: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ColoringKind {
    Matching,
    Random,
    Brute,
}

#[derive(Debug, Args, Serialize)]
struct NetArgs {
    /// Net spacing: `auto` or a positive number.
    #[arg(long, default_value = "auto")]
    net_tau: String,
    #[arg(long, default_value_t = DEFAULT_MAX_CENTERS)]
    max_centers: usize,
}

impl NetArgs {
    fn options(&self) -> Result<NetOptions, CliError> {
        Ok(NetOptions {
            tau: parse_auto(&self.net_tau, "--net-tau")?,
            ..NetOptions::capped(self.max_centers)
        })
    }
}

#[derive(Debug, Args, Serialize)]
struct DiscArgs {
    input: PathBuf,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    #[arg(long, value_enum, default_value_t = ColoringKind::Matching)]
    coloring: ColoringKind,
    #[arg(long, default_value = "exact")]
    matching: String,
    #[command(flatten)]
    net: NetArgs,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Write `|sum chi K|` at every center of the first trial to this CSV.
    #[arg(long)]
    per_center: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    input: PathBuf,
    #[arg(long, required_unless_present = "size", conflicts_with = "size")]
    eps: Option<f64>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    #[arg(long, default_value = "exact")]
    matching: String,
    /// Constant in the closed-form target size.
    #[arg(long = "c", default_value_t = 1.0)]
    size_constant: f64,
    /// Overall failure probability spread over the levels.
    #[arg(long, default_value_t = 0.1)]
    phi: f64,
    /// Measure the L-infinity error and exit 1 if it exceeds eps.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_CENTERS)]
    max_centers: usize,
    /// Write the sample points here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    base: PathBuf,
    sample: PathBuf,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    /// Kernel of the second estimate; must equal --kernel.
    #[arg(long)]
    sample_kernel: Option<String>,
    /// Grid spacing: `auto` or a positive number.
    #[arg(long, default_value = "auto")]
    resolution: String,
    #[arg(long, default_value_t = DEFAULT_MAX_CENTERS)]
    max_centers: usize,
}

#[derive(Debug, Args, Serialize)]
struct ExperimentArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Directory for the result table and summary.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn dispatch<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(&cli, out, err)),
            Err(e) => Err(CliError::Usage(format!("thread pool: {e}"))),
        },
        None => run(&cli, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "kcoreset: {e}");
            e.exit_code()
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
}

impl Ctx<'_> {
    fn config(&self, command: &str, args: &impl Serialize) -> Value {
        json!({
            "command": command,
            "seed": self.cli.seed,
            "threads": self.cli.threads,
            "format": self.cli.format,
            "args": args,
        })
    }

    fn echo(&mut self, config: &Value) -> Result<(), CliError> {
        if !self.cli.quiet {
            writeln!(self.err, "config: {config}").map_err(io_err)?;
        }
        Ok(())
    }

    fn emit(&mut self, text: &str) -> Result<(), CliError> {
        self.out.write_all(text.as_bytes()).map_err(io_err)?;
        if !text.ends_with('\n') {
            self.out.write_all(b"\n").map_err(io_err)?;
        }
        Ok(())
    }

    fn emit_json(&mut self, value: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        self.emit(&text)
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn run(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let mut ctx = Ctx { cli, out, err };
    match &cli.command {
        Command::Gen(a) => cmd_gen(&mut ctx, a),
        Command::Match(a) => cmd_match(&mut ctx, a),
        Command::Disc(a) => cmd_disc(&mut ctx, a),
        Command::Sample(a) => cmd_sample(&mut ctx, a),
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::Experiment(a) => cmd_experiment(&mut ctx, a),
    }
}

fn parse_auto(text: &str, flag: &str) -> Result<Option<f64>, CliError> {
    if text == "auto" {
        return Ok(None);
    }
    match text.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
        _ => Err(CliError::Usage(format!("{flag} expects `auto` or a positive number, got `{text}`"))),
    }
}

fn parse_algo(text: &str) -> Result<MatchingAlgo, CliError> {
    text.parse().map_err(|e: kcoreset_core::Error| CliError::Usage(e.to_string()))
}

fn parse_kernel(text: &str, dim: usize) -> Result<KernelSpec, CliError> {
    KernelSpec::parse(text, dim).map_err(|e| CliError::Usage(e.to_string()))
}

fn build_generator(a: &GenArgs) -> Result<Generator, CliError> {
    let mut obj = serde_json::Map::new();
    obj.insert("name".into(), json!(a.generator));
    let params = [
        ("t", a.t.map(|v| json!(v))),
        ("k", a.k.map(|v| json!(v))),
        ("sigma", a.sigma.map(|v| json!(v))),
        ("separation", a.separation.map(|v| json!(v))),
        ("inner", a.inner.map(|v| json!(v))),
        ("outer", a.outer.map(|v| json!(v))),
    ];
    for (key, value) in params {
        if let Some(v) = value {
            obj.insert(key.into(), v);
        }
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Usage(format!("generator: {e}")))
}

fn cmd_gen(ctx: &mut Ctx<'_>, a: &GenArgs) -> Result<(), CliError> {
    let generator = build_generator(a)?;
    let mut config = ctx.config("gen", a);
    config["generator"] = serde_json::to_value(&generator).expect("generator serializes");
    ctx.echo(&config)?;
    let points = generate(&generator, a.n, a.dim, ctx.cli.seed)?;
    match &a.out {
        Some(path) => {
            write_points(path, &points)?;
            if ctx.cli.format == Format::Json {
                ctx.emit_json(&json!({
                    "config": config,
                    "n": points.len(),
                    "dim": points.dim(),
                    "path": path,
                }))?;
            }
        }
        None => {
            let text = match ctx.cli.format {
                Format::Json => points_to_json(&points),
                Format::Csv => points_to_csv(&points),
            };
            ctx.emit(&text)?;
        }
    }
    Ok(())
}

fn cmd_match(ctx: &mut Ctx<'_>, a: &MatchArgs) -> Result<(), CliError> {
    let algo = parse_algo(&a.algo)?;
    let config = ctx.config("match", a);
    ctx.echo(&config)?;
    let points = read_points(&a.input)?;
    let m = min_cost_matching(&points, algo)?;
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({
            "config": config,
            "n": points.len(),
            "algo": algo.name(),
            "cost": m.cost,
            "pairs": m.pairs,
            "leftover": m.leftover,
        })),
        Format::Csv => {
            let mut text = String::from("i,j\n");
            for (i, j) in &m.pairs {
                text.push_str(&format!("{i},{j}\n"));
            }
            ctx.emit(&text)
        }
    }
}

#[derive(Serialize)]
struct DiscTrial {
    trial: usize,
    seed: u64,
    #[serde(flatten)]
    report: DiscrepancyReport,
}

fn cmd_disc(ctx: &mut Ctx<'_>, a: &DiscArgs) -> Result<(), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let algo = parse_algo(&a.matching)?;
    let opts = a.net.options()?;
    let config = ctx.config("disc", a);
    ctx.echo(&config)?;
    let points = read_points(&a.input)?;
    let kernel = parse_kernel(&a.kernel, points.dim())?;
    let net = build_net_with(&points, &kernel, &opts)?;
    let matching = match a.coloring {
        ColoringKind::Matching => Some(min_cost_matching(&points, algo)?),
        _ => None,
    };
    let trials = if a.coloring == ColoringKind::Brute { 1 } else { a.trials };
    let mut results = Vec::with_capacity(trials);
    for t in 0..trials {
        let seed = derive_seed(ctx.cli.seed, "disc-trial", t as u64);
        let chi = match a.coloring {
            ColoringKind::Matching => color_from_matching(matching.as_ref().expect("matching computed"), seed),
            ColoringKind::Random => random_coloring(points.len(), seed),
            ColoringKind::Brute => {
                let (_, signs) = min_disc_bruteforce(&points, &kernel, &net)?;
                Coloring {
                    signs,
                    seed,
                    pairs: Vec::new(),
                    singles: Vec::new(),
                    leftover: None,
                }
            }
        };
        let keep = t == 0 && a.per_center.is_some();
        let mut report = if keep {
            disc_max_with_values(&points, &chi, &kernel, &net)?
        } else {
            disc_max(&points, &chi, &kernel, &net)?
        };
        if let (Some(path), Some(values)) = (&a.per_center, report.per_center.take()) {
            write_per_center(path, &net.centers(), &values)?;
        }
        results.push(DiscTrial { trial: t, seed, report });
    }
    let maxima: Vec<f64> = results.iter().map(|r| r.report.max_disc).collect();
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({
            "config": config,
            "n": points.len(),
            "kernel": kernel.to_string(),
            "coloring": a.coloring,
            "matching_cost": matching.as_ref().map(|m| m.cost),
            "trials": results,
            "median_max_disc": median(&maxima),
        })),
        Format::Csv => {
            let mut text = String::from("trial,seed,max_disc,resolution_slack,outside_bound,chernoff_alpha,centers,tau\n");
            for r in &results {
                let rep = &r.report;
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.trial,
                    r.seed,
                    fmt_f64(rep.max_disc),
                    rep.resolution_slack.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(rep.outside_bound),
                    fmt_f64(rep.chernoff_alpha),
                    rep.centers,
                    fmt_f64(rep.tau)
                ));
            }
            ctx.emit(&text)
        }
    }
}

fn write_per_center(path: &Path, centers: &PointSet, values: &[f64]) -> Result<(), CliError> {
    let mut text = String::new();
    let cols: Vec<String> = (0..centers.dim()).map(|i| format!("x{i}")).collect();
    text.push_str(&cols.join(","));
    text.push_str(",value\n");
    for (c, v) in centers.iter().zip(values) {
        for x in c {
            text.push_str(&fmt_f64(*x));
            text.push(',');
        }
        text.push_str(&fmt_f64(*v));
        text.push('\n');
    }
    write_text(path, &text)
}

fn cmd_sample(ctx: &mut Ctx<'_>, a: &SampleArgs) -> Result<(), CliError> {
    let algo = parse_algo(&a.matching)?;
    let target = match (a.eps, a.size) {
        (Some(e), None) => Target::Eps(e),
        (None, Some(s)) => Target::Size(s),
        _ => return Err(CliError::Usage("give exactly one of --eps and --size".into())),
    };
    let config = ctx.config("sample", a);
    ctx.echo(&config)?;
    let points = read_points(&a.input)?;
    let kernel = parse_kernel(&a.kernel, points.dim())?;
    let cfg = HalvingConfig {
        algo,
        size_constant: a.size_constant,
        phi: a.phi,
        ..HalvingConfig::new(kernel, target, ctx.cli.seed)
    };
    let mut result = build_eps_sample(&points, &cfg).map_err(|e| match e {
        kcoreset_core::Error::InvalidArgument(m) => CliError::Usage(m),
        other => other.into(),
    })?;
    let report = if a.verify {
        Some(certify(&points, &mut result, &kernel, &NetOptions::capped(a.max_centers))?)
    } else {
        None
    };
    let passed = match (&report, a.eps) {
        (Some(r), Some(eps)) => Some(r.value <= eps),
        _ => None,
    };
    let sample = result.sample(&points);
    if let Some(path) = &a.out {
        write_points(path, &sample)?;
    }
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({
            "config": config,
            "n": points.len(),
            "size": result.indices.len(),
            "result": result,
            "linf": report,
            "passed": passed,
        }))?,
        Format::Csv => ctx.emit(&points_to_csv(&sample))?,
    }
    match (passed, report) {
        (Some(false), Some(r)) => Err(CliError::Failed(format!(
            "measured L-infinity error {} exceeds eps {}",
            r.value,
            a.eps.expect("eps target")
        ))),
        _ => Ok(()),
    }
}

fn cmd_eval(ctx: &mut Ctx<'_>, a: &EvalArgs) -> Result<(), CliError> {
    let tau = parse_auto(&a.resolution, "--resolution")?;
    let config = ctx.config("eval", a);
    ctx.echo(&config)?;
    let base = read_points(&a.base)?;
    let sample = read_points(&a.sample)?;
    if base.dim() != sample.dim() {
        return Err(CliError::Input(format!(
            "dimension mismatch: {} vs {}",
            base.dim(),
            sample.dim()
        )));
    }
    let k1 = parse_kernel(&a.kernel, base.dim())?;
    let k2 = match &a.sample_kernel {
        Some(k) => parse_kernel(k, sample.dim())?,
        None => k1,
    };
    if k1 != k2 {
        return Err(CliError::Usage(format!("kernel mismatch: `{k1}` vs `{k2}`")));
    }
    let opts = NetOptions {
        tau,
        ..NetOptions::capped(a.max_centers)
    };
    let report = linf_distance(&KdeQuery::new(base, k1)?, &KdeQuery::new(sample, k2)?, &opts)?;
    match ctx.cli.format {
        Format::Json => ctx.emit_json(&json!({
            "config": config,
            "kernel": k1.to_string(),
            "report": report,
            "upper_bound": report.upper_bound(),
        })),
        Format::Csv => ctx.emit(&format!(
            "value,slack,upper_bound,outside_bound,grid_tau,centers,certified\n{},{},{},{},{},{},{}\n",
            fmt_f64(report.value),
            report.slack.map(fmt_f64).unwrap_or_default(),
            report.upper_bound().map(fmt_f64).unwrap_or_default(),
            fmt_f64(report.outside_bound),
            fmt_f64(report.grid_tau),
            report.centers,
            report.certified
        )),
    }
}

fn cmd_experiment(ctx: &mut Ctx<'_>, a: &ExperimentArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| CliError::Io(format!("{}: {e}", a.spec.display())))?;
    let spec = ExperimentSpec::from_json(&text)?;
    let mut config = ctx.config("experiment", a);
    config["spec"] = serde_json::to_value(&spec).expect("spec serializes");
    config["config_hash"] = json!(spec.config_hash());
    ctx.echo(&config)?;
    let output = experiments::run(&spec)?;
    let stem = format!("{}-{}", spec.experiment.name(), spec.config_hash());
    let outputs = spec.outputs.clone().unwrap_or(experiments::Outputs {
        table: None,
        summary: None,
    });
    let table_path = a.out_dir.join(outputs.table.unwrap_or_else(|| format!("{stem}.csv")));
    let summary_path = a.out_dir.join(outputs.summary.unwrap_or_else(|| format!("{stem}.summary.json")));
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    let summary = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    write_text(&table_path, &output.table_csv())?;
    write_text(&summary_path, &summary)?;
    match ctx.cli.format {
        Format::Json => ctx.emit(&summary)?,
        Format::Csv => ctx.emit(&output.table_csv())?,
    }
    if output.summary.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = output
            .summary
            .assertions
            .iter()
            .filter(|a| !a.passed)
            .map(|a| a.name.as_str())
            .collect();
        Err(CliError::Failed(format!("assertions failed: {}", failed.join(", "))))
    }
}
