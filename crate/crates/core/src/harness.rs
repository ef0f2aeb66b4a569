//! Monte Carlo harness: repeated sampling from one fixed population, per
//! estimator, with summary tables.
//!
//! A benchmark cell fixes a population, a design, and a sample size; every
//! replicate draws a fresh sample (replicate `r` uses seed `base_seed + r`)
//! and runs each requested estimator on it. Everything downstream of the
//! seeds is deterministic, replicates are merged in replicate order, and no
//! wall-clock data enters the serialized results, so reruns and different
//! `--jobs` settings produce byte-identical tables.
//!
//! The oracle estimator reuses one census fit of the working model per
//! cell; its per-replicate estimate is the difference estimator built from
//! those fixed census predictions.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::SurveyDesign;
use crate::error::{Error, Result};
use crate::estimators::{
    greg_linear, ht_estimate, oracle_estimate, sim_estimate, SimOptions,
};
use crate::population::{self, MeanFn, Population, PopulationSpec};

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Ht,
    Lreg,
    Sim,
    Oracle,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Ht,
        EstimatorKind::Lreg,
        EstimatorKind::Sim,
        EstimatorKind::Oracle,
    ];
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EstimatorKind::Ht => "ht",
            EstimatorKind::Lreg => "lreg",
            EstimatorKind::Sim => "sim",
            EstimatorKind::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ht" => Ok(EstimatorKind::Ht),
            "lreg" => Ok(EstimatorKind::Lreg),
            "sim" => Ok(EstimatorKind::Sim),
            "oracle" => Ok(EstimatorKind::Oracle),
            other => Err(Error::InvalidConfig(format!(
                "unknown estimator {other:?} (expected ht, lreg, sim, or oracle)"
            ))),
        }
    }
}

/// One population slot of a benchmark grid: either generated on the fly or
/// loaded from CSV (which must then carry responses).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PopulationCell {
    Synthetic { mean_fn: MeanFn, sigma: f64 },
    File { file: PathBuf },
}

/// Sampling design selector used by configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Srswor,
    /// Poisson sampling with equal probabilities `n / N`.
    Poisson,
    Census,
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DesignKind::Srswor => "srswor",
            DesignKind::Poisson => "poisson",
            DesignKind::Census => "census",
        };
        f.write_str(s)
    }
}

impl FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "srswor" => Ok(DesignKind::Srswor),
            "poisson" => Ok(DesignKind::Poisson),
            "census" => Ok(DesignKind::Census),
            other => Err(Error::InvalidConfig(format!(
                "unknown design {other:?} (expected srswor, poisson, or census)"
            ))),
        }
    }
}

impl DesignKind {
    /// Builds the concrete design over `n_pop` units with (expected)
    /// sample size `n`.
    pub fn build(self, n_pop: usize, n: usize) -> Result<SurveyDesign<f64>> {
        match self {
            DesignKind::Srswor => SurveyDesign::srswor(n_pop, n),
            DesignKind::Census => SurveyDesign::census(n_pop),
            DesignKind::Poisson => {
                if n == 0 || n > n_pop {
                    return Err(Error::SampleTooLarge {
                        n,
                        population: n_pop,
                    });
                }
                let p = n as f64 / n_pop as f64;
                SurveyDesign::poisson(vec![p; n_pop])
            }
        }
    }
}

fn default_population_size() -> usize {
    1000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_c1() -> usize {
    1
}

fn default_c2() -> usize {
    5
}

/// A benchmark grid: the cross product of populations and sample sizes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridConfig {
    pub populations: Vec<PopulationCell>,
    /// Size of generated populations (file populations keep their own).
    #[serde(default = "default_population_size")]
    pub population_size: usize,
    pub design: DesignKind,
    pub sample_sizes: Vec<usize>,
    pub estimators: Vec<EstimatorKind>,
    pub replicates: usize,
    pub base_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_c1")]
    pub c1: usize,
    #[serde(default = "default_c2")]
    pub c2: usize,
    /// Extra optimizer starts per fit (0 keeps the single OLS start).
    #[serde(default)]
    pub multi_start: usize,
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.populations.is_empty() {
            return Err(Error::InvalidConfig("no populations listed".to_string()));
        }
        if self.sample_sizes.is_empty() && self.design != DesignKind::Census {
            return Err(Error::InvalidConfig("no sample sizes listed".to_string()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators listed".to_string()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be positive".to_string()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie strictly between 0 and 1, got {}",
                self.alpha
            )));
        }
        if self.c1 == 0 || self.c2 == 0 {
            return Err(Error::InvalidConfig(
                "knot-rule constants must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// One fully materialized benchmark cell.
#[derive(Debug, Clone)]
pub struct McCell {
    pub label: String,
    /// Echo of where the population came from.
    pub population_tag: String,
    pub population_seed: u64,
    pub population: Population<f64>,
    pub design: SurveyDesign<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub replicates: usize,
    pub base_seed: u64,
    pub sim: SimOptions<f64>,
    /// Direction the fitted coefficients are scored against; resolved from
    /// the surface when known, otherwise from the census fit.
    pub theta_reference: Option<Vec<f64>>,
}

/// Per-estimator summary over the completed replicates.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub mean: f64,
    pub bias: f64,
    /// `100 * bias / t_y`.
    pub pct_rel_bias: f64,
    pub sd: f64,
    pub mse: f64,
    /// `mse / mse(sim)`, when the sim estimator ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_ratio_vs_sim: Option<f64>,
}

/// Coordinate-wise summary of the fitted directions.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ThetaSummary {
    pub reference: Vec<f64>,
    pub mean: Vec<f64>,
    pub bias: Vec<f64>,
    pub sd: Vec<f64>,
    pub mse: Vec<f64>,
    /// Average of the coordinate MSEs.
    pub amse: f64,
}

/// One replicate's outputs, kept for the serialized record.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub seed: u64,
    /// Realized sample size (varies under Poisson sampling).
    pub n: usize,
    pub estimates: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hat: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim_converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim_iterations: Option<usize>,
    /// Exclusion reason, when the replicate produced no usable estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Results of one benchmark cell.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct McResult {
    pub label: String,
    pub population: String,
    pub population_seed: u64,
    pub design: String,
    /// Nominal (expected) sample size of the cell.
    pub n: usize,
    pub population_size: usize,
    pub replicates: usize,
    pub completed: usize,
    pub excluded: usize,
    pub base_seed: u64,
    pub alpha: f64,
    pub c1: usize,
    pub c2: usize,
    pub t_y: f64,
    pub estimators: Vec<EstimatorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSummary>,
    pub records: Vec<ReplicateRecord>,
    /// Mean seconds per sim fit; diagnostic only, never serialized.
    #[serde(skip)]
    pub mean_sim_fit_seconds: f64,
}

/// SplitMix64-style mixer for deriving stream seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reference direction for scoring fitted coefficients on a known surface.
///
/// The four two-variable surfaces depend on the auxiliaries only through
/// `x1 + x2`, except `m4`, which has no single-index representation; the
/// two sine surfaces carry their generating direction.
pub fn surface_reference(mean_fn: MeanFn) -> Option<Vec<f64>> {
    match mean_fn {
        MeanFn::M1 | MeanFn::M2 | MeanFn::M3 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Some(vec![s, s])
        }
        MeanFn::M4 => None,
        MeanFn::M5 | MeanFn::M6 => mean_fn.theta0(),
    }
}

struct ReplicateOutput {
    record: ReplicateRecord,
    sim_seconds: f64,
}

fn run_replicate(cell: &McCell, r: usize, oracle_m: Option<&[f64]>) -> ReplicateOutput {
    let seed = cell.base_seed.wrapping_add(r as u64);
    let sample = cell.design.draw(seed);
    let y = cell
        .population
        .y
        .as_deref()
        .expect("cell construction requires responses");
    let y_s = sample.gather(y);

    let mut record = ReplicateRecord {
        replicate: r,
        seed,
        n: sample.len(),
        estimates: BTreeMap::new(),
        theta_hat: None,
        sim_converged: None,
        sim_iterations: None,
        error: None,
    };
    let mut sim_seconds = 0.0;

    for &kind in &cell.estimators {
        let outcome = match kind {
            EstimatorKind::Ht => {
                ht_estimate(&sample, &y_s, &cell.design).map(|rep| rep.t_hat)
            }
            EstimatorKind::Lreg => {
                greg_linear(&cell.population.x, &sample, &y_s, &cell.design)
                    .map(|rep| rep.t_hat)
            }
            EstimatorKind::Sim => {
                let start = Instant::now();
                let res = sim_estimate(&cell.population.x, &sample, &y_s, &cell.design, &cell.sim);
                sim_seconds = start.elapsed().as_secs_f64();
                res.map(|(rep, _)| {
                    record.theta_hat = rep.theta_hat.clone();
                    record.sim_converged = rep.converged;
                    record.sim_iterations = rep.iterations;
                    rep.t_hat
                })
            }
            EstimatorKind::Oracle => {
                let m = oracle_m.expect("oracle predictions precomputed");
                let mut t: f64 = m.iter().sum();
                for (k, &i) in sample.indices().iter().enumerate() {
                    t += sample.weights()[k] * (y[i] - m[i]);
                }
                Ok(t)
            }
        };
        match outcome {
            Ok(t_hat) => {
                record.estimates.insert(kind.to_string(), t_hat);
            }
            Err(e) => {
                record.error = Some(format!("{kind}: {e}"));
                record.estimates.clear();
                record.theta_hat = None;
                record.sim_converged = None;
                record.sim_iterations = None;
                break;
            }
        }
    }
    ReplicateOutput {
        record,
        sim_seconds,
    }
}

/// Runs one benchmark cell. `jobs` is the number of worker threads
/// (0 uses all available); the output is identical for every value.
pub fn run_monte_carlo(cell: &McCell, jobs: usize) -> Result<McResult> {
    let y = cell.population.responses()?;
    let t_y: f64 = y.iter().sum();
    if cell.replicates == 0 {
        return Err(Error::InvalidConfig("replicates must be positive".to_string()));
    }

    // One census fit serves every replicate of the oracle estimator and,
    // when no surface reference exists, scores the fitted directions.
    let needs_reference = cell.estimators.contains(&EstimatorKind::Sim)
        && cell.theta_reference.is_none();
    let needs_oracle = cell.estimators.contains(&EstimatorKind::Oracle) || needs_reference;
    let oracle = if needs_oracle {
        Some(oracle_estimate(
            &cell.population.x,
            y,
            None,
            &cell.sim,
        )?)
    } else {
        None
    };
    let oracle_m: Option<Vec<f64>> = oracle.as_ref().map(|o| o.predictions.clone());
    let theta_reference = cell
        .theta_reference
        .clone()
        .or_else(|| oracle.as_ref().map(|o| o.theta_original.clone()));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let outputs: Vec<ReplicateOutput> = pool.install(|| {
        (1..=cell.replicates)
            .into_par_iter()
            .map(|r| run_replicate(cell, r, oracle_m.as_deref()))
            .collect()
    });

    let completed: Vec<&ReplicateRecord> = outputs
        .iter()
        .map(|o| &o.record)
        .filter(|rec| rec.error.is_none())
        .collect();
    let excluded = cell.replicates - completed.len();
    if 20 * excluded > cell.replicates {
        let first = outputs
            .iter()
            .find_map(|o| o.record.error.clone())
            .unwrap_or_default();
        return Err(Error::TooManyExclusions {
            excluded,
            total: cell.replicates,
            first,
        });
    }

    let mut summaries = Vec::new();
    let sim_mse = estimator_values(&completed, EstimatorKind::Sim)
        .map(|vals| mse(&vals, t_y));
    for &kind in &cell.estimators {
        let vals = match estimator_values(&completed, kind) {
            Some(v) => v,
            None => continue,
        };
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let bias = mean - t_y;
        let sd = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (vals.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        summaries.push(EstimatorSummary {
            estimator: kind,
            mean,
            bias,
            pct_rel_bias: 100.0 * bias / t_y,
            sd,
            mse: mse(&vals, t_y),
            mse_ratio_vs_sim: sim_mse.map(|m| mse(&vals, t_y) / m),
        });
    }

    let theta = match (&theta_reference, cell.estimators.contains(&EstimatorKind::Sim)) {
        (Some(reference), true) => {
            let hats: Vec<Vec<f64>> = completed
                .iter()
                .filter_map(|rec| rec.theta_hat.clone())
                .collect();
            if hats.is_empty() {
                None
            } else {
                Some(theta_metrics(&hats, reference))
            }
        }
        _ => None,
    };

    let sim_times: Vec<f64> = outputs
        .iter()
        .filter(|o| o.record.error.is_none() && o.sim_seconds > 0.0)
        .map(|o| o.sim_seconds)
        .collect();
    let mean_sim_fit_seconds = if sim_times.is_empty() {
        0.0
    } else {
        sim_times.iter().sum::<f64>() / sim_times.len() as f64
    };

    Ok(McResult {
        label: cell.label.clone(),
        population: cell.population_tag.clone(),
        population_seed: cell.population_seed,
        design: cell.design.label(),
        n: cell.design.fixed_sample_size().unwrap_or_else(|| {
            // Poisson cells: expected size from the inclusion probabilities.
            (0..cell.design.population_size())
                .map(|i| cell.design.pi(i))
                .sum::<f64>()
                .round() as usize
        }),
        population_size: cell.design.population_size(),
        replicates: cell.replicates,
        completed: completed.len(),
        excluded,
        base_seed: cell.base_seed,
        alpha: cell.sim.alpha,
        c1: cell.sim.c1,
        c2: cell.sim.c2,
        t_y,
        estimators: summaries,
        theta,
        records: outputs.into_iter().map(|o| o.record).collect(),
        mean_sim_fit_seconds,
    })
}

fn estimator_values(records: &[&ReplicateRecord], kind: EstimatorKind) -> Option<Vec<f64>> {
    let key = kind.to_string();
    let vals: Vec<f64> = records
        .iter()
        .filter_map(|r| r.estimates.get(&key).copied())
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals)
    }
}

fn mse(vals: &[f64], target: f64) -> f64 {
    vals.iter().map(|v| (v - target) * (v - target)).sum::<f64>() / vals.len() as f64
}

/// Coordinate-wise mean, bias, SD, and MSE of fitted directions against a
/// reference direction, plus the average MSE across coordinates.
pub fn theta_metrics(theta_hats: &[Vec<f64>], reference: &[f64]) -> ThetaSummary {
    let d = reference.len();
    let r = theta_hats.len();
    let mut mean = vec![0.0; d];
    for hat in theta_hats {
        for q in 0..d {
            mean[q] += hat[q] / r as f64;
        }
    }
    let mut sd = vec![0.0; d];
    let mut mse = vec![0.0; d];
    for hat in theta_hats {
        for q in 0..d {
            sd[q] += (hat[q] - mean[q]) * (hat[q] - mean[q]);
            mse[q] += (hat[q] - reference[q]) * (hat[q] - reference[q]) / r as f64;
        }
    }
    for q in 0..d {
        sd[q] = if r > 1 {
            (sd[q] / (r - 1) as f64).sqrt()
        } else {
            0.0
        };
    }
    let bias: Vec<f64> = (0..d).map(|q| mean[q] - reference[q]).collect();
    let amse = mse.iter().sum::<f64>() / d as f64;
    ThetaSummary {
        reference: reference.to_vec(),
        mean,
        bias,
        sd,
        mse,
        amse,
    }
}

/// Materializes the cells of a grid. Each population slot is generated (or
/// loaded) once and shared by all of its sample sizes, so estimates at
/// different `n` are comparable within a slot.
pub fn build_cells(config: &GridConfig) -> Result<Vec<McCell>> {
    config.validate()?;
    let mut cells = Vec::new();
    for (pop_idx, slot) in config.populations.iter().enumerate() {
        let population_seed = mix_seed(config.base_seed, 1000 + pop_idx as u64);
        let (population, tag, label_base) = match slot {
            PopulationCell::Synthetic { mean_fn, sigma } => {
                let spec = PopulationSpec {
                    mean_fn: *mean_fn,
                    sigma: *sigma,
                    size: config.population_size,
                    seed: population_seed,
                };
                let pop = population::generate::<f64>(&spec);
                let tag = format!(
                    "{} sigma={} N={} seed={}",
                    mean_fn, sigma, config.population_size, population_seed
                );
                (pop, tag, format!("{mean_fn} sigma={sigma}"))
            }
            PopulationCell::File { file } => {
                let pop = population::load_population(file)?;
                pop.responses()?;
                let stem = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| file.display().to_string());
                let tag = format!("{} N={}", file.display(), pop.size());
                (pop, tag, stem)
            }
        };

        let theta_reference = match slot {
            PopulationCell::Synthetic { mean_fn, .. } => surface_reference(*mean_fn),
            PopulationCell::File { .. } => None,
        };

        let sizes: Vec<usize> = if config.design == DesignKind::Census {
            vec![population.size()]
        } else {
            config.sample_sizes.clone()
        };
        for &n in &sizes {
            let design = config.design.build(population.size(), n)?;
            let sim = SimOptions {
                alpha: config.alpha,
                c1: config.c1,
                c2: config.c2,
                fit: crate::sim_fit::FitOptions {
                    multi_start: config.multi_start,
                    ..Default::default()
                },
            };
            cells.push(McCell {
                label: format!("{label_base} n={n}"),
                population_tag: tag.clone(),
                population_seed,
                population: population.clone(),
                design,
                estimators: config.estimators.clone(),
                replicates: config.replicates,
                base_seed: mix_seed(population_seed, n as u64),
                sim,
                theta_reference: theta_reference.clone(),
            });
        }
    }
    Ok(cells)
}

/// Runs every cell of a grid.
pub fn run_grid(config: &GridConfig, jobs: usize) -> Result<Vec<McResult>> {
    build_cells(config)?
        .iter()
        .map(|cell| run_monte_carlo(cell, jobs))
        .collect()
}

/// Output encoding for [`render_tables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Renders results as one summary table (CSV: one row per cell and
/// estimator; JSON: the full result objects, replicate records included).
/// Numbers are written with shortest round-trip precision, so reparsing a
/// CSV recovers the exact values.
pub fn render_tables(results: &[McResult], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(results)
                .map_err(|e| Error::InvalidConfig(format!("serialize: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "label",
                "population",
                "population_seed",
                "design",
                "n",
                "N",
                "replicates",
                "completed",
                "excluded",
                "base_seed",
                "alpha",
                "c1",
                "c2",
                "t_y",
                "estimator",
                "mean",
                "bias",
                "pct_rel_bias",
                "sd",
                "mse",
                "mse_ratio_vs_sim",
                "theta_amse",
            ])
            .map_err(csv_err)?;
            for res in results {
                for s in &res.estimators {
                    let theta_amse = match (&res.theta, s.estimator) {
                        (Some(t), EstimatorKind::Sim) => t.amse.to_string(),
                        _ => String::new(),
                    };
                    w.write_record([
                        res.label.clone(),
                        res.population.clone(),
                        res.population_seed.to_string(),
                        res.design.clone(),
                        res.n.to_string(),
                        res.population_size.to_string(),
                        res.replicates.to_string(),
                        res.completed.to_string(),
                        res.excluded.to_string(),
                        res.base_seed.to_string(),
                        res.alpha.to_string(),
                        res.c1.to_string(),
                        res.c2.to_string(),
                        res.t_y.to_string(),
                        s.estimator.to_string(),
                        s.mean.to_string(),
                        s.bias.to_string(),
                        s.pct_rel_bias.to_string(),
                        s.sd.to_string(),
                        s.mse.to_string(),
                        s.mse_ratio_vs_sim.map(|v| v.to_string()).unwrap_or_default(),
                        theta_amse,
                    ])
                    .map_err(csv_err)?;
                }
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::InvalidConfig(format!("csv finish: {e}")))?;
            String::from_utf8(bytes)
                .map_err(|e| Error::InvalidConfig(format!("csv encoding: {e}")))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv write failed: {e}"))
}
