//! `sindex`: survey estimation from the command line.
//!
//! Every run first prints its resolved configuration (defaults and seeds
//! included) as a JSON object on stdout, then the results. Machine output
//! carries full precision; the human-readable summary rounds to six
//! significant digits. Timing goes to stderr so serialized output stays
//! reproducible.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error,
//! 3 numerical failure.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use sindex::error::Error;
use sindex::estimators::{greg_linear, ht_estimate, oracle_estimate, sim_estimate, EstimateReport};
use sindex::harness::{self, DesignKind, EstimatorKind, GridConfig, TableFormat};
use sindex::population::{self, MeanFn, PopulationSpec};
use sindex::sim_fit::{self, FitData, FitOptions};
use sindex::splines::{num_knots, KnotVector};
use sindex::transform::IndexTransform;
use sindex::{Mat, SimOptions, SurveyDesign};

#[derive(Parser)]
#[command(name = "sindex", version, about = "Model-assisted survey estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a population total from a sample
    Estimate(EstimateArgs),
    /// Run a Monte Carlo benchmark grid from a JSON config
    Simulate(SimulateArgs),
    /// Fit the working model on a full population (census benchmark)
    Oracle(OracleArgs),
    /// Compare the profile-risk gradient against finite differences
    CheckGradient(CheckGradientArgs),
    /// Generate a synthetic population CSV
    GenPopulation(GenPopulationArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Population CSV with header id,x1,...,xd and optionally y
    #[arg(long)]
    population: PathBuf,
    /// Sample CSV with header id,y; omit to draw a sample instead
    #[arg(long)]
    sample: Option<PathBuf>,
    #[arg(long, default_value = "srswor")]
    design: DesignKind,
    /// Sample size (inferred from --sample when given)
    #[arg(long)]
    n: Option<usize>,
    /// Seed for drawing the sample (falls back to SINDEX_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Tail fraction excluded when picking the index radius
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Knot-rule multiplier
    #[arg(long, default_value_t = 1)]
    c1: usize,
    /// Knot-rule cap
    #[arg(long, default_value_t = 5)]
    c2: usize,
    /// Extra random optimizer starts beyond the default initializer
    #[arg(long, default_value_t = 0)]
    multi_start: usize,
    /// Comma-separated subset of ht,lreg,sim
    #[arg(long, default_value = "sim", value_delimiter = ',')]
    estimators: Vec<EstimatorKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: TableFormatArg,
}

#[derive(Args)]
struct SimulateArgs {
    /// Benchmark grid as JSON
    #[arg(long)]
    config: PathBuf,
    /// File for the machine-readable tables (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: TableFormatArg,
    /// Worker threads per cell (0 uses all cores)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Override the replicate count in the config
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Population CSV; the response column is required
    #[arg(long)]
    population: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    c1: usize,
    #[arg(long, default_value_t = 5)]
    c2: usize,
    #[arg(long, default_value_t = 0)]
    multi_start: usize,
    /// Also write the census predictions (CSV: id,m) to this file
    #[arg(long)]
    predictions_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: TableFormatArg,
}

#[derive(Args)]
struct CheckGradientArgs {
    /// Number of auxiliary variables
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Sample size of each instance
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Seed of the first instance (falls back to SINDEX_SEED, then 17)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of instances (seeds seed, seed+1, ...)
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Replace the responses with a constant; the gradient must vanish
    #[arg(long)]
    constant_y: bool,
}

#[derive(Args)]
struct GenPopulationArgs {
    #[arg(long)]
    mean_fn: MeanFn,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 1000)]
    size: usize,
    /// Falls back to SINDEX_SEED
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

/// Newtype so clap can parse the table format via FromStr.
#[derive(Debug, Clone, Copy)]
struct TableFormatArg(TableFormat);

impl FromStr for TableFormatArg {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        TableFormat::from_str(s).map(TableFormatArg)
    }
}

impl TableFormatArg {
    fn name(self) -> &'static str {
        match self.0 {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::CheckGradient(args) => cmd_check_gradient(args),
        Command::GenPopulation(args) => cmd_gen_population(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sindex: {e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

/// Maps error kinds onto the exit code contract.
fn exit_class(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_)
        | Error::SampleTooLarge { .. }
        | Error::EnumerationTooLarge { .. }
        | Error::PopulationTooSmall { .. }
        | Error::InvalidInclusion(_) => 1,
        Error::Io(_)
        | Error::Parse { .. }
        | Error::MissingResponse(_)
        | Error::DegenerateColumn(_)
        | Error::DimensionMismatch { .. }
        | Error::LengthMismatch { .. } => 2,
        Error::SingularNormalEquations
        | Error::TooFewObservations { .. }
        | Error::RankDeficient
        | Error::NonUnitTheta(_)
        | Error::OutsideChart
        | Error::JointInclusionZero(_, _)
        | Error::TooManyExclusions { .. } => 3,
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("SINDEX_SEED") {
        Ok(s) => s
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("SINDEX_SEED is not a u64: {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn print_config(value: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("config serializes")
    );
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Rounds to six significant digits for the human-readable summary.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let dec = (5 - mag).max(0) as usize;
    format!("{x:.dec$}")
}

fn cmd_estimate(args: EstimateArgs) -> Result<ExitCode, Error> {
    let pop = population::load_population(&args.population)?;
    for kind in &args.estimators {
        if *kind == EstimatorKind::Oracle {
            return Err(Error::InvalidConfig(
                "estimate supports ht, lreg, and sim; use the oracle subcommand".to_string(),
            ));
        }
    }
    if args.estimators.is_empty() {
        return Err(Error::InvalidConfig("no estimators requested".to_string()));
    }

    // Either take the sample from a file or draw one from the design.
    let (design, sample, y_s, seed) = match &args.sample {
        Some(path) => {
            let (indices, y_s) = load_sample(path, &pop.ids)?;
            let design = args.design.build(pop.size(), indices.len())?;
            let sample = design.sample_from_indices(indices)?;
            (design, sample, y_s, None)
        }
        None => {
            let y = pop.responses()?;
            let n = match args.design {
                DesignKind::Census => pop.size(),
                _ => args.n.ok_or_else(|| {
                    Error::InvalidConfig(
                        "--n is required when drawing a sample (or pass --sample)".to_string(),
                    )
                })?,
            };
            let seed = match args.design {
                DesignKind::Census => resolve_seed(args.seed)?.unwrap_or(0),
                _ => resolve_seed(args.seed)?.ok_or_else(|| {
                    Error::InvalidConfig(
                        "--seed (or SINDEX_SEED) is required when drawing a sample".to_string(),
                    )
                })?,
            };
            let design = args.design.build(pop.size(), n)?;
            let sample = design.draw(seed);
            let y_s = sample.gather(y);
            (design, sample, y_s, Some(seed))
        }
    };

    print_config(json!({
        "tool": "sindex",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "estimate",
        "population": args.population,
        "sample": args.sample,
        "design": design.label(),
        "n": sample.len(),
        "N": pop.size(),
        "seed": seed,
        "alpha": args.alpha,
        "c1": args.c1,
        "c2": args.c2,
        "multi_start": args.multi_start,
        "estimators": args.estimators,
        "format": args.format.name(),
        "out": args.out,
    }));

    let options = SimOptions {
        alpha: args.alpha,
        c1: args.c1,
        c2: args.c2,
        fit: FitOptions {
            multi_start: args.multi_start,
            ..FitOptions::default()
        },
    };
    let mut reports = Vec::new();
    for kind in &args.estimators {
        let mut report = match kind {
            EstimatorKind::Ht => ht_estimate(&sample, &y_s, &design)?,
            EstimatorKind::Lreg => greg_linear(&pop.x, &sample, &y_s, &design)?,
            EstimatorKind::Sim => {
                let start = Instant::now();
                let (report, _) = sim_estimate(&pop.x, &sample, &y_s, &design, &options)?;
                eprintln!("sim fit: {:.3}s", start.elapsed().as_secs_f64());
                report
            }
            EstimatorKind::Oracle => unreachable!("rejected above"),
        };
        report.seed = seed;
        reports.push(report);
    }

    let text = render_reports(&reports, args.format.0)?;
    emit(args.out.as_deref(), &text)?;
    if args.out.is_some() {
        for r in &reports {
            let var = r
                .var_hat
                .map(|v| format!("  var_hat {}", sig6(v)))
                .unwrap_or_default();
            println!("{:<6} t_hat {}{}", r.estimator, sig6(r.t_hat), var);
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Reads a sample CSV (header `id,y`), resolves ids against the population,
/// and returns strictly increasing indices with their responses.
fn load_sample(path: &Path, pop_ids: &[String]) -> Result<(Vec<usize>, Vec<f64>), Error> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "y" {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "expected header id,y".to_string(),
        });
    }
    let lookup: HashMap<&str, usize> = pop_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0) as usize;
        let id = &record[0];
        let idx = *lookup.get(id).ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line,
            message: format!("unknown unit id {id:?}"),
        })?;
        let y: f64 = record[1].parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line,
            message: format!("bad response for id {id:?}: {:?}", &record[1]),
        })?;
        if !y.is_finite() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("non-finite response for id {id:?}"),
            });
        }
        pairs.push((idx, y));
    }
    pairs.sort_by_key(|(idx, _)| *idx);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: 0,
                message: format!("duplicate unit id {:?}", pop_ids[w[0].0]),
            });
        }
    }
    Ok(pairs.into_iter().unzip())
}

fn render_reports(reports: &[EstimateReport], format: TableFormat) -> Result<String, Error> {
    match format {
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports)
                .map_err(|e| Error::InvalidConfig(format!("serialize: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record([
                "estimator",
                "t_hat",
                "var_hat",
                "theta_hat",
                "n",
                "N",
                "seed",
                "design",
                "converged",
                "iterations",
            ])
            .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))?;
            for r in reports {
                w.write_record([
                    r.estimator.clone(),
                    r.t_hat.to_string(),
                    r.var_hat.map(|v| v.to_string()).unwrap_or_default(),
                    r.theta_hat
                        .as_ref()
                        .map(|t| {
                            t.iter()
                                .map(|v| v.to_string())
                                .collect::<Vec<_>>()
                                .join(" ")
                        })
                        .unwrap_or_default(),
                    r.n.to_string(),
                    r.population_size.to_string(),
                    r.seed.map(|s| s.to_string()).unwrap_or_default(),
                    r.design.clone(),
                    r.converged.map(|c| c.to_string()).unwrap_or_default(),
                    r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                ])
                .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::InvalidConfig(format!("csv finish: {e}")))?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(format!("csv encoding: {e}")))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config: GridConfig = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidConfig(format!(
            "{}: {e} (mean functions are m1..m6; estimators are ht, lreg, sim, oracle)",
            args.config.display()
        ))
    })?;
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    config.validate()?;

    print_config(json!({
        "tool": "sindex",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "simulate",
        "config_file": args.config,
        "jobs": args.jobs,
        "format": args.format.name(),
        "out": args.out,
        "config": config,
    }));

    let start = Instant::now();
    let results = harness::run_grid(&config, args.jobs)?;
    eprintln!("simulate: {:.3}s total", start.elapsed().as_secs_f64());

    for res in &results {
        println!(
            "[{}] {} N={} R={} (excluded {}) t_y={}",
            res.label, res.design, res.population_size, res.replicates, res.excluded,
            sig6(res.t_y)
        );
        println!(
            "  {:<8} {:>13} {:>13} {:>10} {:>13} {:>13} {:>9}",
            "estimator", "mean", "bias", "%relbias", "sd", "mse", "ratio"
        );
        for s in &res.estimators {
            println!(
                "  {:<8} {:>13} {:>13} {:>10} {:>13} {:>13} {:>9}",
                s.estimator.to_string(),
                sig6(s.mean),
                sig6(s.bias),
                sig6(s.pct_rel_bias),
                sig6(s.sd),
                sig6(s.mse),
                s.mse_ratio_vs_sim.map(sig6).unwrap_or_default(),
            );
        }
        if let Some(t) = &res.theta {
            println!("  theta AMSE {}", sig6(t.amse));
        }
        if res.mean_sim_fit_seconds > 0.0 {
            eprintln!("[{}] mean sim fit {:.4}s", res.label, res.mean_sim_fit_seconds);
        }
    }

    let rendered = harness::render_tables(&results, args.format.0)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &rendered)?;
            println!("wrote {}", path.display());
        }
        None => {
            println!("{rendered}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Error> {
    let pop = population::load_population(&args.population)?;
    let y = pop.responses()?;

    print_config(json!({
        "tool": "sindex",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "oracle",
        "population": args.population,
        "N": pop.size(),
        "alpha": args.alpha,
        "c1": args.c1,
        "c2": args.c2,
        "multi_start": args.multi_start,
        "format": args.format.name(),
        "out": args.out,
    }));

    let options = SimOptions {
        alpha: args.alpha,
        c1: args.c1,
        c2: args.c2,
        fit: FitOptions {
            multi_start: args.multi_start,
            ..FitOptions::default()
        },
    };
    let start = Instant::now();
    let report = oracle_estimate(&pop.x, y, None, &options)?;
    eprintln!("oracle fit: {:.3}s", start.elapsed().as_secs_f64());

    if let Some(path) = &args.predictions_out {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        w.write_record(["id", "m"])
            .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))?;
        for (id, m) in pop.ids.iter().zip(&report.predictions) {
            w.write_record([id.clone(), m.to_string()])
                .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))?;
        }
        w.flush()?;
    }

    let text = match args.format.0 {
        TableFormat::Json => {
            let doc = json!({
                "theta_original": report.theta_original,
                "theta_std": report.theta_std,
                "risk": report.risk,
                "t_y": report.t_y,
                "trace": report.trace,
            });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::InvalidConfig(format!("serialize: {e}")))?;
            s.push('\n');
            s
        }
        TableFormat::Csv => {
            let join = |v: &[f64]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let mut s = String::from("key,value\n");
            s.push_str(&format!("theta_original,{}\n", join(&report.theta_original)));
            s.push_str(&format!("theta_std,{}\n", join(&report.theta_std)));
            s.push_str(&format!("risk,{}\n", report.risk));
            s.push_str(&format!("t_y,{}\n", report.t_y));
            s.push_str(&format!("iterations,{}\n", report.trace.iterations));
            s.push_str(&format!("converged,{}\n", report.trace.converged));
            s
        }
    };
    emit(args.out.as_deref(), &text)?;
    if args.out.is_some() {
        let theta = report
            .theta_original
            .iter()
            .map(|v| sig6(*v))
            .collect::<Vec<_>>()
            .join(", ");
        println!("theta ({theta})  risk {}  t_y {}", sig6(report.risk), sig6(report.t_y));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_gradient(args: CheckGradientArgs) -> Result<ExitCode, Error> {
    if args.d < 1 {
        return Err(Error::InvalidConfig("--d must be at least 1".to_string()));
    }
    if args.instances < 1 {
        return Err(Error::InvalidConfig("--instances must be at least 1".to_string()));
    }
    let first_seed = resolve_seed(args.seed)?.unwrap_or(17);

    print_config(json!({
        "tool": "sindex",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "check-gradient",
        "d": args.d,
        "n": args.n,
        "seed": first_seed,
        "instances": args.instances,
        "constant_y": args.constant_y,
    }));

    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for k in 0..args.instances {
        let seed = first_seed + k as u64;
        let check = gradient_instance(args.d, args.n, seed, args.constant_y)?;
        if args.constant_y {
            // Constant responses have zero residuals, so the gradient
            // vanishes identically; the solve leaves rounding of order
            // 1e-15, far below the 1e-3 contract.
            let max = check.analytic.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if max > 1e-12 {
                eprintln!("sindex: constant responses produced gradient {max:e}");
                return Ok(ExitCode::from(3));
            }
        }
        worst = worst.max(check.max_rel_dev);
        rows.push(json!({
            "seed": seed,
            "d": args.d,
            "n": args.n,
            "max_rel_dev": check.max_rel_dev,
            "analytic": check.analytic,
            "finite_difference": check.finite_difference,
        }));
    }
    let doc = json!({ "instances": rows, "max_rel_dev": worst });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidConfig(e.to_string()))?
    );
    println!("max relative deviation {}", sig6(worst));
    if worst > 1e-3 {
        eprintln!("sindex: gradient deviates from finite differences by {worst:e}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

/// One random instance for the gradient diagnostic: a smooth single-index
/// surface over a synthetic population, sampled by SRSWOR.
fn gradient_instance(
    d: usize,
    n: usize,
    seed: u64,
    constant_y: bool,
) -> Result<sim_fit::GradientCheck, Error> {
    let n_pop = (4 * n).max(n + 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Mat::zeros(n_pop, d);
    for i in 0..n_pop {
        for q in 0..d {
            x.set(i, q, rng.gen::<f64>());
        }
    }
    let theta_star = 1.0 / (d as f64).sqrt();
    let mut y = Vec::with_capacity(n_pop);
    for i in 0..n_pop {
        if constant_y {
            y.push(3.0);
        } else {
            let v: f64 = x.row(i).iter().map(|xq| xq * theta_star).sum();
            y.push((2.5 * v).sin() + 0.05 * (rng.gen::<f64>() - 0.5));
        }
    }

    let (x_std, tr) = IndexTransform::fit(&x, 0.05)?;
    let design = SurveyDesign::srswor(n_pop, n)?;
    let sample = design.draw(seed.wrapping_add(1000));
    let x_s = x_std.take_rows(sample.indices());
    let y_s = sample.gather(&y);
    let data = FitData {
        x_std: &x_s,
        y: &y_s,
        weights: sample.weights(),
        population_size: n_pop,
    };
    let kv = KnotVector::cubic(num_knots(n, 1, 5));
    // An interior chart point leaning toward the generating direction.
    let u = vec![0.9 * theta_star; d - 1];
    sim_fit::gradient_check(&u, &data, &tr, &kv, 1e-5)
}

fn cmd_gen_population(args: GenPopulationArgs) -> Result<ExitCode, Error> {
    let seed = resolve_seed(args.seed)?.ok_or_else(|| {
        Error::InvalidConfig("--seed (or SINDEX_SEED) is required".to_string())
    })?;
    if !(args.sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sigma must be nonnegative, got {}",
            args.sigma
        )));
    }

    print_config(json!({
        "tool": "sindex",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "gen-population",
        "mean_fn": args.mean_fn.to_string(),
        "sigma": args.sigma,
        "size": args.size,
        "seed": seed,
        "out": args.out,
    }));

    let spec = PopulationSpec {
        mean_fn: args.mean_fn,
        sigma: args.sigma,
        size: args.size,
        seed,
    };
    let pop = population::generate::<f64>(&spec);
    population::save_population(&pop, &args.out)?;
    println!("wrote {} units to {}", pop.size(), args.out.display());
    Ok(ExitCode::SUCCESS)
}
