//! The estimators of the population total and their variance estimator.
//!
//! All model-assisted estimators here share the generalized difference
//! form: fit a working model on the sample, predict every population unit,
//! and correct the prediction total with the design-weighted residual sum,
//!
//! ```text
//! t_hat = sum_(i in s) w_i (y_i - m_hat_i) + sum_(i in U) m_hat_i .
//! ```
//!
//! Design unbiasedness comes from the correction term alone, so it holds
//! for any working model; the model only moves the variance. The
//! single-index spline estimator plugs in the fitted spline model, the
//! linear regression estimator an ordinary weighted linear fit, and the
//! Horvitz-Thompson estimator uses no model at all.

use serde::Serialize;

use crate::design::{ht_total, Sample, SurveyDesign};
use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};
use crate::scalar::Real;
use crate::sim_fit::{fit_model, FitOptions, FitTrace, SplineModel};
use crate::splines::{num_knots, KnotVector};
use crate::transform::IndexTransform;

/// Options of the single-index spline estimator.
#[derive(Debug, Clone)]
pub struct SimOptions<R> {
    /// Fraction of population index norms allowed outside the transform
    /// radius.
    pub alpha: R,
    /// Multiplier in the interior-knot rule.
    pub c1: usize,
    /// Cap in the interior-knot rule.
    pub c2: usize,
    pub fit: FitOptions<R>,
}

impl<R: Real> Default for SimOptions<R> {
    fn default() -> Self {
        SimOptions {
            alpha: R::of(0.05),
            c1: 1,
            c2: 5,
            fit: FitOptions::default(),
        }
    }
}

/// One estimator's output on one sample, ready for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// `"ht"`, `"lreg"`, `"sim"`, or `"oracle"`.
    pub estimator: String,
    /// Estimated population total.
    pub t_hat: f64,
    /// Estimated design variance of `t_hat`, when the estimator defines one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_hat: Option<f64>,
    /// Fitted index direction on the original scale of the auxiliaries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hat: Option<Vec<f64>>,
    /// Realized sample size.
    pub n: usize,
    /// Population size.
    #[serde(rename = "N")]
    pub population_size: usize,
    /// Seed used to draw the sample, when the caller drew one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Design label, e.g. `srswor(n=100)`.
    pub design: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

/// Result of fitting the working model to the whole population with unit
/// weights: the best the spline estimator could do with everything known.
#[derive(Debug, Clone)]
pub struct OracleReport<R> {
    /// Fitted direction on the standardized scale.
    pub theta_std: Vec<R>,
    /// Fitted direction on the original scale.
    pub theta_original: Vec<R>,
    /// Population-level profile risk at the fitted direction.
    pub risk: R,
    /// True population total of the responses.
    pub t_y: R,
    /// Census predictions for every population unit.
    pub predictions: Vec<R>,
    /// Difference estimator built from the census fit, when a sample was
    /// supplied.
    pub t_diff: Option<R>,
    pub trace: FitTrace,
}

fn check_sample_inputs<R: Real>(
    x_pop: &Mat<R>,
    sample: &Sample<R>,
    y_s: &[R],
    design: &SurveyDesign<R>,
) -> Result<()> {
    if x_pop.rows() != design.population_size() {
        return Err(Error::LengthMismatch {
            left: x_pop.rows(),
            right: design.population_size(),
        });
    }
    if y_s.len() != sample.len() {
        return Err(Error::LengthMismatch {
            left: sample.len(),
            right: y_s.len(),
        });
    }
    Ok(())
}

/// Single-index model-assisted estimator of the population total.
///
/// Standardizes the population auxiliaries, fits the index direction and
/// spline on the sample by design-weighted profile least squares, predicts
/// every population unit, and assembles the difference estimator together
/// with its residual-based variance estimate.
pub fn sim_estimate<R: Real>(
    x_pop: &Mat<R>,
    sample: &Sample<R>,
    y_s: &[R],
    design: &SurveyDesign<R>,
    options: &SimOptions<R>,
) -> Result<(EstimateReport, SplineModel<R>)> {
    check_sample_inputs(x_pop, sample, y_s, design)?;
    let n = sample.len();
    let (x_std, tr) = IndexTransform::fit(x_pop, options.alpha)?;
    let kv = KnotVector::cubic(num_knots(n, options.c1, options.c2));
    let x_s_std = x_std.take_rows(sample.indices());
    let data = crate::sim_fit::FitData {
        x_std: &x_s_std,
        y: y_s,
        weights: sample.weights(),
        population_size: design.population_size(),
    };
    let (model, trace) = fit_model(&data, &tr, &kv, &options.fit)?;

    let m_pop = model.predict_std(&x_std)?;
    let (t_hat, residuals) = difference_estimate(sample, y_s, &m_pop);
    let var_hat = variance_estimate(sample, &residuals, design)?;

    let report = EstimateReport {
        estimator: "sim".to_string(),
        t_hat: t_hat.as_f64(),
        var_hat: Some(var_hat.as_f64()),
        theta_hat: Some(
            model
                .theta_original()
                .iter()
                .map(|&t| t.as_f64())
                .collect(),
        ),
        n,
        population_size: design.population_size(),
        seed: None,
        design: design.label(),
        converged: Some(trace.converged),
        iterations: Some(trace.iterations),
    };
    Ok((report, model))
}

/// Difference estimator and sample residuals from population predictions.
fn difference_estimate<R: Real>(
    sample: &Sample<R>,
    y_s: &[R],
    m_pop: &[R],
) -> (R, Vec<R>) {
    let prediction_total: R = m_pop.iter().copied().sum();
    let mut correction = R::zero();
    let mut residuals = Vec::with_capacity(sample.len());
    for (k, &i) in sample.indices().iter().enumerate() {
        let e = y_s[k] - m_pop[i];
        residuals.push(e);
        correction += sample.weights()[k] * e;
    }
    (prediction_total + correction, residuals)
}

/// Residual-based variance estimator on the total scale:
///
/// ```text
/// sum_(i,j in s) e_i e_j (pi_(ij) - pi_i pi_j) / (pi_i pi_j pi_(ij))
/// ```
///
/// With `e = y` this is the Horvitz-Thompson variance estimator.
pub fn variance_estimate<R: Real>(
    sample: &Sample<R>,
    residuals: &[R],
    design: &SurveyDesign<R>,
) -> Result<R> {
    if residuals.len() != sample.len() {
        return Err(Error::LengthMismatch {
            left: sample.len(),
            right: residuals.len(),
        });
    }
    let idx = sample.indices();
    let mut acc = R::zero();
    for (a, &i) in idx.iter().enumerate() {
        let pi_i = design.pi(i);
        for (b, &j) in idx.iter().enumerate() {
            let pi_ij = design.pi_joint(i, j);
            if !(pi_ij > R::zero()) {
                return Err(Error::JointInclusionZero(i, j));
            }
            let pi_j = design.pi(j);
            let delta = pi_ij - pi_i * pi_j;
            acc += residuals[a] * residuals[b] * delta / (pi_i * pi_j * pi_ij);
        }
    }
    Ok(acc)
}

/// Horvitz-Thompson estimator of the total with its variance estimate.
pub fn ht_estimate<R: Real>(
    sample: &Sample<R>,
    y_s: &[R],
    design: &SurveyDesign<R>,
) -> Result<EstimateReport> {
    let t_hat = ht_total(sample, y_s)?;
    let var_hat = variance_estimate(sample, y_s, design)?;
    Ok(EstimateReport {
        estimator: "ht".to_string(),
        t_hat: t_hat.as_f64(),
        var_hat: Some(var_hat.as_f64()),
        theta_hat: None,
        n: sample.len(),
        population_size: design.population_size(),
        seed: None,
        design: design.label(),
        converged: None,
        iterations: None,
    })
}

/// Linear regression (GREG) estimator: the difference estimator with a
/// design-weighted linear working model with intercept.
pub fn greg_linear<R: Real>(
    x_pop: &Mat<R>,
    sample: &Sample<R>,
    y_s: &[R],
    design: &SurveyDesign<R>,
) -> Result<EstimateReport> {
    check_sample_inputs(x_pop, sample, y_s, design)?;
    let n = sample.len();
    let d = x_pop.cols();
    let mut a_s = Mat::zeros(n, d + 1);
    for (k, &i) in sample.indices().iter().enumerate() {
        a_s.set(k, 0, R::one());
        a_s.row_mut(k)[1..].copy_from_slice(x_pop.row(i));
    }
    let beta = crate::linalg::solve_weighted_normal(&a_s, y_s, sample.weights(), R::zero())
        .ok_or(Error::RankDeficient)?;
    let m_pop: Vec<R> = (0..x_pop.rows())
        .map(|i| beta[0] + dot(x_pop.row(i), &beta[1..]))
        .collect();
    let (t_hat, residuals) = difference_estimate(sample, y_s, &m_pop);
    let var_hat = variance_estimate(sample, &residuals, design)?;
    Ok(EstimateReport {
        estimator: "lreg".to_string(),
        t_hat: t_hat.as_f64(),
        var_hat: Some(var_hat.as_f64()),
        theta_hat: None,
        n,
        population_size: design.population_size(),
        seed: None,
        design: design.label(),
        converged: None,
        iterations: None,
    })
}

/// Fits the working model to the whole population with unit weights.
///
/// This is the infeasible benchmark the sampled estimator is compared
/// against: the direction, predictions, and risk it would reach if every
/// response were observed. When a sample and design are supplied, the
/// corresponding difference estimator (with census predictions) is also
/// assembled.
pub fn oracle_estimate<R: Real>(
    x_pop: &Mat<R>,
    y_pop: &[R],
    sampled: Option<(&Sample<R>, &SurveyDesign<R>)>,
    options: &SimOptions<R>,
) -> Result<OracleReport<R>> {
    let n_pop = x_pop.rows();
    if y_pop.len() != n_pop {
        return Err(Error::LengthMismatch {
            left: n_pop,
            right: y_pop.len(),
        });
    }
    let (x_std, tr) = IndexTransform::fit(x_pop, options.alpha)?;
    let kv = KnotVector::cubic(num_knots(n_pop, options.c1, options.c2));
    let weights = vec![R::one(); n_pop];
    let data = crate::sim_fit::FitData {
        x_std: &x_std,
        y: y_pop,
        weights: &weights,
        population_size: n_pop,
    };
    let (model, trace) = fit_model(&data, &tr, &kv, &options.fit)?;
    let predictions = model.predict_std(&x_std)?;
    let risk = crate::sim_fit::risk(&model.theta, &data, &tr, &kv)?;
    let t_y: R = y_pop.iter().copied().sum();

    let t_diff = match sampled {
        Some((sample, design)) => {
            if design.population_size() != n_pop {
                return Err(Error::LengthMismatch {
                    left: design.population_size(),
                    right: n_pop,
                });
            }
            let y_s = sample.gather(y_pop);
            let (t, _) = difference_estimate(sample, &y_s, &predictions);
            Some(t)
        }
        None => None,
    };

    Ok(OracleReport {
        theta_std: model.theta.clone(),
        theta_original: model.theta_original(),
        risk,
        t_y,
        predictions,
        t_diff,
        trace,
    })
}
