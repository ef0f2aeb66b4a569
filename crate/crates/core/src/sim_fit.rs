//! Fitting the single-index spline model by design-weighted profile least
//! squares.
//!
//! For a candidate unit coefficient `theta`, every sampled row is reduced to
//! the index `v_i = x_i' theta` (standardized auxiliaries), pushed through
//! the compact-support CDF onto `z_i` in [0, 1], and a cubic spline is fit
//! to the responses by design-weighted least squares. The profile risk of
//! `theta` is the weighted residual sum of squares divided by the population
//! size:
//!
//! ```text
//! R(theta) = (1/N) sum_(i in s) w_i (y_i - B(z_i)' gamma(theta))^2
//! ```
//!
//! Because `gamma(theta)` solves the weighted normal equations exactly, the
//! envelope theorem kills its derivative, and the gradient of the risk in
//! `theta` has the closed form
//!
//! ```text
//! dR/dtheta_q = -(2/N) sum_i w_i r_i F'(v_i) (B'(z_i)' gamma) x_iq
//! ```
//!
//! where `F'` is the index density (zero outside the transform radius, so
//! clamped points contribute nothing). The unit-norm constraint with a
//! positive last coordinate is handled on the open upper-hemisphere chart
//! `theta = (u, sqrt(1 - |u|^2))`; the chain rule folds the last component
//! of the gradient into the free ones. A BFGS iteration with backtracking
//! line search and projection into the chart minimizes the risk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, norm2, Mat};
use crate::scalar::Real;
use crate::splines::KnotVector;
use crate::transform::{transform_index, IndexTransform};

/// Knobs of the profile-risk optimizer. `Default` gives the settings used
/// by the estimators and the simulation harness.
#[derive(Debug, Clone)]
pub struct FitOptions<R> {
    /// Maximum accepted BFGS steps.
    pub max_iter: usize,
    /// Stop when the chart gradient's max-norm falls below this.
    pub grad_tol: R,
    /// Stop when the relative risk decrease of a step falls below this.
    pub risk_tol: R,
    /// The chart is kept inside `|u|^2 <= 1 - eps_dome`.
    pub eps_dome: R,
    /// Retry a singular spline solve once with a small ridge.
    pub ridge_fallback: bool,
    /// Number of extra deterministic starting points (0 = single start).
    pub multi_start: usize,
    /// Optional full-length starting coefficient; must be unit norm with a
    /// positive last coordinate.
    pub init: Option<Vec<R>>,
}

impl<R: Real> Default for FitOptions<R> {
    fn default() -> Self {
        FitOptions {
            max_iter: 200,
            grad_tol: R::of(1e-8),
            risk_tol: R::of(1e-12),
            eps_dome: R::of(1e-6),
            ridge_fallback: true,
            multi_start: 0,
            init: None,
        }
    }
}

/// Diagnostics of one optimizer run.
#[derive(Debug, Clone, Serialize)]
pub struct FitTrace {
    /// Accepted BFGS steps.
    pub iterations: usize,
    /// Risk after the initial point and after each accepted step;
    /// non-increasing by construction.
    pub risk_values: Vec<f64>,
    /// Max-norm of the chart gradient at the returned point.
    pub final_grad_norm: f64,
    /// Whether a stopping rule fired before the iteration cap.
    pub converged: bool,
}

/// Borrowed view of the fitting data.
#[derive(Debug, Clone, Copy)]
pub struct FitData<'a, R> {
    /// Standardized sampled auxiliary rows, `n x d`.
    pub x_std: &'a Mat<R>,
    /// Sampled responses, length `n`.
    pub y: &'a [R],
    /// Design weights `1 / pi_i`, length `n`.
    pub weights: &'a [R],
    /// Population size `N`; the risk divisor.
    pub population_size: usize,
}

impl<'a, R: Real> FitData<'a, R> {
    fn validate(&self) -> Result<()> {
        let n = self.x_std.rows();
        if self.y.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: self.y.len(),
            });
        }
        if self.weights.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: self.weights.len(),
            });
        }
        Ok(())
    }
}

/// A fitted single-index spline model: direction, spline coefficients, and
/// the transform that maps raw rows onto the spline's domain.
#[derive(Debug, Clone)]
pub struct SplineModel<R> {
    /// Unit coefficient on the standardized scale, last coordinate positive.
    pub theta: Vec<R>,
    /// Spline coefficients, length `knots.dim()`.
    pub gamma: Vec<R>,
    pub knots: KnotVector<R>,
    pub transform: IndexTransform<R>,
}

impl<R: Real> SplineModel<R> {
    /// Predicted mean for each raw auxiliary row.
    pub fn predict(&self, x_raw: &Mat<R>) -> Result<Vec<R>> {
        let x_std = self.transform.apply(x_raw)?;
        self.predict_std(&x_std)
    }

    /// Predicted mean for rows already on the standardized scale.
    pub fn predict_std(&self, x_std: &Mat<R>) -> Result<Vec<R>> {
        let z = transform_index(x_std, &self.theta, &self.transform)?;
        Ok(z
            .iter()
            .map(|&zi| {
                let (l, b) = self.knots.eval_nonzero(zi);
                dot(&b, &self.gamma[l..l + 4])
            })
            .collect())
    }

    /// The fitted direction rewritten on the original scale of the
    /// auxiliaries.
    pub fn theta_original(&self) -> Vec<R> {
        self.transform.theta_to_original(&self.theta)
    }
}

/// Design-weighted least-squares spline fit on precomputed domain points
/// `z` (each in [0, 1]). Returns the spline coefficients.
///
/// A singular system is retried once with a tiny ridge proportional to the
/// mean Gram diagonal; if that also fails the data cannot identify the
/// coefficients and an error is returned.
pub fn weighted_spline_fit<R: Real>(
    z: &[R],
    y: &[R],
    w: &[R],
    kv: &KnotVector<R>,
) -> Result<Vec<R>> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: y.len(),
        });
    }
    if w.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    let windows: Vec<(usize, [R; 4])> = z.iter().map(|&zi| kv.eval_nonzero(zi)).collect();
    fit_gamma(&windows, y, w, kv.dim(), true)
}

/// Shared normal-equation solve over basis windows.
fn fit_gamma<R: Real>(
    windows: &[(usize, [R; 4])],
    y: &[R],
    w: &[R],
    dim: usize,
    ridge_fallback: bool,
) -> Result<Vec<R>> {
    if windows.len() < dim {
        return Err(Error::TooFewObservations {
            n: windows.len(),
            dim,
        });
    }
    let mut gram = Mat::zeros(dim, dim);
    let mut rhs = vec![R::zero(); dim];
    for (i, &(l, b)) in windows.iter().enumerate() {
        let wi = w[i];
        let wy = wi * y[i];
        for a in 0..4 {
            rhs[l + a] += b[a] * wy;
            let wba = wi * b[a];
            for c in a..4 {
                let v = gram.get(l + a, l + c) + wba * b[c];
                gram.set(l + a, l + c, v);
            }
        }
    }
    for a in 0..dim {
        for c in 0..a {
            let v = gram.get(c, a);
            gram.set(a, c, v);
        }
    }
    if let Some(gamma) = cholesky_solve(&gram, &rhs) {
        return Ok(gamma);
    }
    if ridge_fallback {
        let trace: R = (0..dim).map(|a| gram.get(a, a)).sum();
        let ridge = R::of(1e-8) * trace / R::from_usize(dim).unwrap();
        let mut ridged = gram.clone();
        for a in 0..dim {
            let v = ridged.get(a, a) + ridge;
            ridged.set(a, a, v);
        }
        if let Some(gamma) = cholesky_solve(&ridged, &rhs) {
            return Ok(gamma);
        }
    }
    Err(Error::SingularNormalEquations)
}

/// One full evaluation of the profile at a fixed `theta`.
struct Eval<R> {
    risk: R,
    gamma: Vec<R>,
    /// Raw index values, before clamping.
    v: Vec<R>,
    z: Vec<R>,
    residuals: Vec<R>,
}

fn evaluate<R: Real>(
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    theta: &[R],
    ridge_fallback: bool,
) -> Result<Eval<R>> {
    let n = data.x_std.rows();
    let v: Vec<R> = (0..n).map(|i| dot(data.x_std.row(i), theta)).collect();
    let z: Vec<R> = v.iter().map(|&vi| tr.index_cdf(vi)).collect();
    let windows: Vec<(usize, [R; 4])> = z.iter().map(|&zi| kv.eval_nonzero(zi)).collect();
    let gamma = fit_gamma(&windows, data.y, data.weights, kv.dim(), ridge_fallback)?;
    let mut residuals = Vec::with_capacity(n);
    let mut wss = R::zero();
    for (i, &(l, b)) in windows.iter().enumerate() {
        let fitted = dot(&b, &gamma[l..l + 4]);
        let r = data.y[i] - fitted;
        residuals.push(r);
        wss += data.weights[i] * r * r;
    }
    let risk = wss / R::from_usize(data.population_size).unwrap();
    Ok(Eval {
        risk,
        gamma,
        v,
        z,
        residuals,
    })
}

/// Full-length risk gradient at `theta`, from an existing evaluation.
fn full_gradient<R: Real>(
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    eval: &Eval<R>,
) -> Vec<R> {
    let n = data.x_std.rows();
    let d = tr.dim();
    let mut g = vec![R::zero(); d];
    let scale = R::of(2.0) / R::from_usize(data.population_size).unwrap();
    for i in 0..n {
        let fprime = tr.index_density(eval.v[i]);
        if fprime == R::zero() {
            continue;
        }
        let (l, db) = kv.eval_deriv_nonzero(eval.z[i]);
        let slope = dot(&db, &eval.gamma[l..l + 4]);
        let kappa = data.weights[i] * eval.residuals[i] * fprime * slope;
        let xi = data.x_std.row(i);
        for (q, gq) in g.iter_mut().enumerate() {
            *gq -= scale * kappa * xi[q];
        }
    }
    g
}

/// Lifts chart coordinates to the full coefficient
/// `theta = (u, sqrt(1 - |u|^2))`.
pub fn theta_from_chart<R: Real>(u: &[R]) -> Result<Vec<R>> {
    let sq: R = u.iter().map(|&v| v * v).sum();
    if sq >= R::one() {
        return Err(Error::OutsideChart);
    }
    let mut theta = u.to_vec();
    theta.push((R::one() - sq).sqrt());
    Ok(theta)
}

/// Reduces a full gradient to the chart: the last coordinate moves with the
/// free ones as `dtheta_d/du_q = -u_q / theta_d`.
fn chart_gradient<R: Real>(full: &[R], theta: &[R]) -> Vec<R> {
    let d = theta.len();
    let gd = full[d - 1];
    let td = theta[d - 1];
    (0..d - 1)
        .map(|q| full[q] - theta[q] / td * gd)
        .collect()
}

/// Profile risk at a full unit coefficient `theta`.
pub fn risk<R: Real>(
    theta: &[R],
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
) -> Result<R> {
    data.validate()?;
    check_unit(theta, tr.dim())?;
    Ok(evaluate(data, tr, kv, theta, true)?.risk)
}

/// Chart gradient of the profile risk at chart coordinates `u`
/// (length `d - 1`, `|u| < 1`).
pub fn score<R: Real>(
    u: &[R],
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
) -> Result<Vec<R>> {
    data.validate()?;
    if u.len() != tr.dim() - 1 {
        return Err(Error::DimensionMismatch {
            expected: tr.dim() - 1,
            got: u.len(),
        });
    }
    let theta = theta_from_chart(u)?;
    let eval = evaluate(data, tr, kv, &theta, true)?;
    let full = full_gradient(data, tr, kv, &eval);
    Ok(chart_gradient(&full, &theta))
}

fn check_unit<R: Real>(theta: &[R], d: usize) -> Result<()> {
    if theta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.len(),
        });
    }
    let norm = norm2(theta);
    if (norm - R::one()).abs() > R::of(1e-8) {
        return Err(Error::NonUnitTheta(norm.as_f64()));
    }
    Ok(())
}

/// Starting direction from the ordinary least-squares fit of `y` on the
/// rows of `x` (intercept included): the slope vector normalized to unit
/// length, negated if its last coordinate is negative. Falls back to
/// `(0, ..., 0, 1)` when the solve fails, the slope is numerically zero,
/// or its last coordinate is exactly zero.
pub fn ols_init<R: Real>(x: &Mat<R>, y: &[R]) -> Vec<R> {
    let n = x.rows();
    let d = x.cols();
    let fallback = || {
        let mut e = vec![R::zero(); d];
        e[d - 1] = R::one();
        e
    };
    if y.len() != n || n < d + 1 {
        return fallback();
    }
    let mut a = Mat::zeros(n, d + 1);
    for i in 0..n {
        a.set(i, 0, R::one());
        a.row_mut(i)[1..].copy_from_slice(x.row(i));
    }
    let ones = vec![R::one(); n];
    let beta = match crate::linalg::solve_weighted_normal(&a, y, &ones, R::zero()) {
        Some(b) => b,
        None => return fallback(),
    };
    let slope = &beta[1..];
    let norm = norm2(slope);
    if !(norm > R::of(1e-12)) || slope[d - 1] == R::zero() {
        return fallback();
    }
    let sign = if slope[d - 1] < R::zero() {
        -R::one()
    } else {
        R::one()
    };
    slope.iter().map(|&b| sign * b / norm).collect()
}

/// Clips chart coordinates into the closed dome `|u|^2 <= 1 - eps`.
fn project_dome<R: Real>(u: &mut [R], eps: R) {
    let sq: R = u.iter().map(|&v| v * v).sum();
    let cap = R::one() - eps;
    if sq > cap {
        let f = (cap / sq).sqrt();
        for v in u.iter_mut() {
            *v = *v * f;
        }
    }
}

/// Minimizes the profile risk over the upper hemisphere. Returns the fitted
/// unit coefficient and the optimizer trace.
///
/// With `d = 1` the hemisphere is the single point `theta = (1)` and no
/// optimization happens. Otherwise a BFGS iteration with backtracking line
/// search runs from the OLS direction (or `options.init`), plus
/// `options.multi_start` deterministic extra starts; the best final iterate
/// wins.
pub fn fit_theta<R: Real>(
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    options: &FitOptions<R>,
) -> Result<(Vec<R>, FitTrace)> {
    data.validate()?;
    let d = tr.dim();
    if data.x_std.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: data.x_std.cols(),
        });
    }

    if d == 1 {
        let theta = vec![R::one()];
        let eval = evaluate(data, tr, kv, &theta, options.ridge_fallback)?;
        let trace = FitTrace {
            iterations: 0,
            risk_values: vec![eval.risk.as_f64()],
            final_grad_norm: 0.0,
            converged: true,
        };
        return Ok((theta, trace));
    }

    let primary = match &options.init {
        Some(init) => {
            check_unit(init, d)?;
            if !(init[d - 1] > R::zero()) {
                return Err(Error::InvalidConfig(
                    "initial coefficient must have a positive last coordinate".to_string(),
                ));
            }
            init.clone()
        }
        None => ols_init(data.x_std, data.y),
    };

    let mut starts = vec![primary];
    if options.multi_start > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ea5_0d0e);
        while starts.len() < options.multi_start + 1 {
            let mut c: Vec<R> = (0..d)
                .map(|_| R::of(rng.gen::<f64>() * 2.0 - 1.0))
                .collect();
            let norm = norm2(&c);
            if !(norm.as_f64() > 0.1) {
                continue;
            }
            c[d - 1] = c[d - 1].abs().max(R::of(0.05));
            let norm = norm2(&c);
            for v in c.iter_mut() {
                *v = *v / norm;
            }
            starts.push(c);
        }
    }

    let mut best: Option<(R, Vec<R>, FitTrace)> = None;
    let mut first_err: Option<Error> = None;
    for theta0 in starts {
        match bfgs_run(data, tr, kv, options, &theta0) {
            Ok((risk, theta, trace)) => {
                let better = match &best {
                    Some((r, _, _)) => risk < *r,
                    None => true,
                };
                if better {
                    best = Some((risk, theta, trace));
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match best {
        Some((_, theta, trace)) => Ok((theta, trace)),
        None => Err(first_err.expect("at least one start attempted")),
    }
}

/// One BFGS run from a full-length starting coefficient.
fn bfgs_run<R: Real>(
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    options: &FitOptions<R>,
    theta0: &[R],
) -> Result<(R, Vec<R>, FitTrace)> {
    let d = tr.dim();
    let m = d - 1;
    let mut u = theta0[..m].to_vec();
    project_dome(&mut u, options.eps_dome);

    let eval_at = |u: &[R]| -> Result<(Vec<R>, Eval<R>)> {
        let theta = theta_from_chart(u)?;
        let eval = evaluate(data, tr, kv, &theta, options.ridge_fallback)?;
        Ok((theta, eval))
    };

    let (mut theta, mut eval) = eval_at(&u)?;
    let mut grad = chart_gradient(&full_gradient(data, tr, kv, &eval), &theta);
    let mut risks = vec![eval.risk.as_f64()];
    let mut best_u = u.clone();
    let mut best_risk = eval.risk;

    // Inverse-Hessian approximation, row-major m x m, starting at identity.
    let mut h = vec![R::zero(); m * m];
    for q in 0..m {
        h[q * m + q] = R::one();
    }

    let mut converged = false;
    let mut iterations = 0;
    let c_armijo = R::of(1e-4);

    while iterations < options.max_iter {
        let gnorm = grad.iter().fold(R::zero(), |acc, &g| acc.max(g.abs()));
        if gnorm < options.grad_tol {
            converged = true;
            break;
        }

        // Search direction p = -H g, reset to steepest descent if H has
        // drifted away from positive definiteness.
        let mut p: Vec<R> = (0..m)
            .map(|q| -dot(&h[q * m..(q + 1) * m], &grad))
            .collect();
        if dot(&p, &grad) >= R::zero() {
            for q in 0..m {
                for r in 0..m {
                    h[q * m + r] = if q == r { R::one() } else { R::zero() };
                }
            }
            p = grad.iter().map(|&g| -g).collect();
        }

        // Backtracking with projection into the dome.
        let mut step = R::one();
        let mut accepted: Option<(Vec<R>, Vec<R>, Vec<R>, Eval<R>)> = None;
        for _ in 0..60 {
            let mut u_try: Vec<R> = u
                .iter()
                .zip(&p)
                .map(|(&ui, &pi)| ui + step * pi)
                .collect();
            project_dome(&mut u_try, options.eps_dome);
            let delta: Vec<R> = u_try.iter().zip(&u).map(|(&a, &b)| a - b).collect();
            let move_size = delta.iter().fold(R::zero(), |acc, &v| acc.max(v.abs()));
            if !(move_size > R::zero()) {
                break;
            }
            match eval_at(&u_try) {
                Ok((theta_try, eval_try)) => {
                    let slope = dot(&grad, &delta).min(R::zero());
                    if eval_try.risk <= eval.risk + c_armijo * slope {
                        accepted = Some((u_try, delta, theta_try, eval_try));
                        break;
                    }
                }
                // A trial point where the spline solve degenerates is
                // treated like an over-long step.
                Err(_) => {}
            }
            step = step * R::of(0.5);
        }

        let (u_new, s, theta_new, eval_new) = match accepted {
            Some(v) => v,
            None => break,
        };
        let grad_new = chart_gradient(&full_gradient(data, tr, kv, &eval_new), &theta_new);

        // BFGS inverse update (skipped when curvature is not positive).
        let yv: Vec<R> = grad_new.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > R::of(1e-12) * norm2(&s) * norm2(&yv) {
            let hy: Vec<R> = (0..m)
                .map(|q| dot(&h[q * m..(q + 1) * m], &yv))
                .collect();
            let yhy = dot(&yv, &hy);
            let c1 = (sy + yhy) / (sy * sy);
            for q in 0..m {
                for r in 0..m {
                    h[q * m + r] =
                        h[q * m + r] + c1 * s[q] * s[r] - (hy[q] * s[r] + s[q] * hy[r]) / sy;
                }
            }
        }

        let rel_dec = (eval.risk - eval_new.risk) / R::one().max(eval.risk.abs());
        u = u_new;
        theta = theta_new;
        eval = eval_new;
        grad = grad_new;
        iterations += 1;
        risks.push(eval.risk.as_f64());
        if eval.risk < best_risk {
            best_risk = eval.risk;
            best_u = u.clone();
        }
        if rel_dec < options.risk_tol {
            converged = true;
            break;
        }
    }

    let final_grad_norm = grad
        .iter()
        .fold(R::zero(), |acc, &g| acc.max(g.abs()))
        .as_f64();
    // Return the best iterate seen, which under monotone descent is the
    // last accepted one; the guard matters only if evaluation at a later
    // point failed.
    let theta_best = theta_from_chart(&best_u)?;
    let _ = theta;
    Ok((
        best_risk,
        theta_best,
        FitTrace {
            iterations,
            risk_values: risks,
            final_grad_norm,
            converged,
        },
    ))
}

/// Fits the direction and then the spline coefficients at the fitted
/// direction, packaging both as a [`SplineModel`].
pub fn fit_model<R: Real>(
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    options: &FitOptions<R>,
) -> Result<(SplineModel<R>, FitTrace)> {
    let (theta, trace) = fit_theta(data, tr, kv, options)?;
    let eval = evaluate(data, tr, kv, &theta, options.ridge_fallback)?;
    Ok((
        SplineModel {
            theta,
            gamma: eval.gamma,
            knots: kv.clone(),
            transform: tr.clone(),
        },
        trace,
    ))
}

/// Side-by-side analytic and central-difference chart gradients at `u`,
/// for verification. `h` is the finite-difference step.
#[derive(Debug, Clone, Serialize)]
pub struct GradientCheck {
    pub analytic: Vec<f64>,
    pub finite_difference: Vec<f64>,
    /// Max over coordinates of `|analytic - fd| / max(1, |fd|)`.
    pub max_rel_dev: f64,
}

pub fn gradient_check<R: Real>(
    u: &[R],
    data: &FitData<R>,
    tr: &IndexTransform<R>,
    kv: &KnotVector<R>,
    h: R,
) -> Result<GradientCheck> {
    let analytic = score(u, data, tr, kv)?;
    let mut fd = Vec::with_capacity(u.len());
    for q in 0..u.len() {
        let mut hi = u.to_vec();
        hi[q] += h;
        let mut lo = u.to_vec();
        lo[q] -= h;
        let r_hi = risk(&theta_from_chart(&hi)?, data, tr, kv)?;
        let r_lo = risk(&theta_from_chart(&lo)?, data, tr, kv)?;
        fd.push(((r_hi - r_lo) / (R::of(2.0) * h)).as_f64());
    }
    let max_rel_dev = analytic
        .iter()
        .zip(&fd)
        .map(|(&a, &f)| (a.as_f64() - f).abs() / f.abs().max(1.0))
        .fold(0.0, f64::max);
    Ok(GradientCheck {
        analytic: analytic.iter().map(|&a| a.as_f64()).collect(),
        finite_difference: fd,
        max_rel_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines;
    use crate::transform::IndexTransform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Uniform(0,1) matrix with a deterministic seed.
    fn uniform_mat(n: usize, d: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Mat::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                m.set(i, j, rng.gen::<f64>());
            }
        }
        m
    }

    fn unit_last_positive(mut v: Vec<f64>) -> Vec<f64> {
        let n = norm2(&v);
        for x in v.iter_mut() {
            *x /= n;
        }
        if *v.last().unwrap() < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        v
    }

    struct Instance {
        x_raw: Mat<f64>,
        x_std: Mat<f64>,
        y: Vec<f64>,
        w: Vec<f64>,
        tr: IndexTransform<f64>,
        kv: KnotVector<f64>,
    }

    /// Census-weighted instance with a curved single-index mean.
    fn instance(n: usize, d: usize, sigma: f64, seed: u64) -> Instance {
        let x_raw = uniform_mat(n, d, seed);
        let theta0 = unit_last_positive((1..=d).map(|q| q as f64).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let t: f64 = dot(x_raw.row(i), &theta0);
                1.0 + t + 2.0 * (std::f64::consts::PI * t).sin()
                    + sigma * (rng.gen::<f64>() - 0.5)
            })
            .collect();
        let (x_std, tr) = IndexTransform::fit(&x_raw, 0.05).unwrap();
        let kv = KnotVector::cubic(splines::num_knots(n, 1, 5));
        Instance {
            x_raw,
            x_std,
            y,
            w: vec![1.0; n],
            tr,
            kv,
        }
    }

    fn data<'a>(inst: &'a Instance) -> FitData<'a, f64> {
        FitData {
            x_std: &inst.x_std,
            y: &inst.y,
            weights: &inst.w,
            population_size: inst.y.len(),
        }
    }

    #[test]
    fn weighted_fit_reproduces_cubic_with_uneven_weights() {
        let kv = KnotVector::<f64>::cubic(2);
        let p = |z: f64| -1.5 * z.powi(3) + 2.0 * z.powi(2) - 0.3 * z + 0.1;
        let z: Vec<f64> = (0..80).map(|k| k as f64 / 79.0).collect();
        let y: Vec<f64> = z.iter().map(|&v| p(v)).collect();
        let w: Vec<f64> = (0..80).map(|k| 1.0 + (k % 7) as f64).collect();
        let gamma = weighted_spline_fit(&z, &y, &w, &kv).unwrap();
        for k in 0..=50 {
            let zz = k as f64 / 50.0;
            let (l, b) = kv.eval_nonzero(zz);
            let fit = dot(&b, &gamma[l..l + 4]);
            assert!((fit - p(zz)).abs() < 1e-8, "z={zz}: {fit} vs {}", p(zz));
        }
    }

    #[test]
    fn score_matches_finite_differences() {
        for (k, &(n, d)) in [(40usize, 2usize), (60, 3), (80, 4)].iter().enumerate() {
            let inst = instance(n, d, 0.3, 900 + k as u64);
            let dat = data(&inst);
            let mut rng = ChaCha8Rng::seed_from_u64(77 + k as u64);
            for _ in 0..5 {
                let theta = unit_last_positive(
                    (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                );
                // Keep the chart point comfortably interior.
                if theta[d - 1] < 0.2 {
                    continue;
                }
                let u = &theta[..d - 1];
                let check = gradient_check(u, &dat, &inst.tr, &inst.kv, 1e-5).unwrap();
                assert!(
                    check.max_rel_dev < 1e-4,
                    "n={n}, d={d}: rel dev {}",
                    check.max_rel_dev
                );
            }
        }
    }

    #[test]
    fn fit_risk_matches_grid_search_in_2d() {
        let inst = instance(100, 2, 0.2, 4242);
        let dat = data(&inst);
        let mut grid_min = f64::INFINITY;
        for k in 0..2000 {
            let phi = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (k as f64 + 0.5) / 2000.0;
            let theta = vec![phi.sin(), phi.cos()];
            if let Ok(r) = risk(&theta, &dat, &inst.tr, &inst.kv) {
                grid_min = grid_min.min(r);
            }
        }
        let (theta_hat, trace) =
            fit_theta(&dat, &inst.tr, &inst.kv, &FitOptions::default()).unwrap();
        let fit_risk = risk(&theta_hat, &dat, &inst.tr, &inst.kv).unwrap();
        assert!(trace.converged);
        // The optimizer may only do better than the grid's resolution.
        assert!(
            fit_risk <= grid_min + 1e-6,
            "fit {fit_risk} vs grid {grid_min}"
        );
        assert!((fit_risk - grid_min).abs() < 1e-4);
    }

    #[test]
    fn trace_is_monotone_and_converges_on_smooth_problem() {
        let inst = instance(150, 3, 0.1, 31);
        let dat = data(&inst);
        let (_, trace) = fit_theta(&dat, &inst.tr, &inst.kv, &FitOptions::default()).unwrap();
        assert!(trace.converged);
        for w in trace.risk_values.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "risk increased: {w:?}");
        }
        assert_eq!(trace.iterations + 1, trace.risk_values.len());
    }

    #[test]
    fn recovers_generating_direction_on_clean_data() {
        let n = 500;
        let d = 3;
        let inst = instance(n, d, 0.02, 555);
        let dat = data(&inst);
        let (model, _) = fit_model(&dat, &inst.tr, &inst.kv, &FitOptions::default()).unwrap();
        let theta0 = unit_last_positive((1..=d).map(|q| q as f64).collect());
        let theta_orig = model.theta_original();
        for q in 0..d {
            assert!(
                (theta_orig[q] - theta0[q]).abs() < 0.05,
                "coordinate {q}: {} vs {}",
                theta_orig[q],
                theta0[q]
            );
        }
        // Predictions should track the mean closely on clean data.
        let preds = model.predict(&inst.x_raw).unwrap();
        let mut mse = 0.0;
        for i in 0..n {
            mse += (preds[i] - inst.y[i]).powi(2) / n as f64;
        }
        assert!(mse < 0.05, "prediction mse {mse}");
    }

    #[test]
    fn d1_needs_no_optimization() {
        let x_raw = uniform_mat(50, 1, 9);
        let y: Vec<f64> = (0..50).map(|i| x_raw.get(i, 0) * 2.0 + 1.0).collect();
        let (x_std, tr) = IndexTransform::fit(&x_raw, 0.05).unwrap();
        let w = vec![1.0; 50];
        let dat = FitData {
            x_std: &x_std,
            y: &y,
            weights: &w,
            population_size: 50,
        };
        let kv = KnotVector::cubic(2);
        let (theta, trace) = fit_theta(&dat, &tr, &kv, &FitOptions::default()).unwrap();
        assert_eq!(theta, vec![1.0]);
        assert!(trace.converged);
        assert_eq!(trace.iterations, 0);
    }

    #[test]
    fn ols_init_examples() {
        // Exact linear response: slope (2, 2) normalizes to (1,1)/sqrt(2).
        let x = uniform_mat(40, 2, 17);
        let y: Vec<f64> = (0..40)
            .map(|i| 1.0 + 2.0 * x.get(i, 0) + 2.0 * x.get(i, 1))
            .collect();
        let init = ols_init(&x, &y);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((init[0] - s).abs() < 1e-10);
        assert!((init[1] - s).abs() < 1e-10);

        // Negative last slope flips sign.
        let y: Vec<f64> = (0..40).map(|i| -x.get(i, 1)).collect();
        let init = ols_init(&x, &y);
        assert!((init[0] - 0.0).abs() < 1e-10);
        assert!((init[1] - 1.0).abs() < 1e-10);

        // Constant response: zero slope falls back to the last axis.
        let y = vec![3.0; 40];
        assert_eq!(ols_init(&x, &y), vec![0.0, 1.0]);
    }

    #[test]
    fn init_override_is_respected() {
        let inst = instance(80, 3, 0.2, 66);
        let dat = data(&inst);
        let init = unit_last_positive(vec![0.3, -0.2, 0.9]);
        let opts = FitOptions {
            max_iter: 0,
            init: Some(init.clone()),
            ..FitOptions::default()
        };
        let (theta, trace) = fit_theta(&dat, &inst.tr, &inst.kv, &opts).unwrap();
        assert_eq!(trace.iterations, 0);
        for q in 0..3 {
            assert!((theta[q] - init[q]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_init_is_rejected() {
        let inst = instance(80, 3, 0.2, 67);
        let dat = data(&inst);
        let opts = FitOptions {
            init: Some(vec![1.0, 0.0, 0.0]), // last coordinate not positive
            ..FitOptions::default()
        };
        assert!(fit_theta(&dat, &inst.tr, &inst.kv, &opts).is_err());
        let opts = FitOptions {
            init: Some(vec![0.5, 0.5, 0.5]), // not unit norm
            ..FitOptions::default()
        };
        assert!(matches!(
            fit_theta(&dat, &inst.tr, &inst.kv, &opts),
            Err(Error::NonUnitTheta(_))
        ));
    }

    #[test]
    fn multi_start_never_does_worse() {
        let inst = instance(120, 4, 0.3, 2024);
        let dat = data(&inst);
        let (theta_single, _) =
            fit_theta(&dat, &inst.tr, &inst.kv, &FitOptions::default()).unwrap();
        let opts = FitOptions {
            multi_start: 3,
            ..FitOptions::default()
        };
        let (theta_multi, _) = fit_theta(&dat, &inst.tr, &inst.kv, &opts).unwrap();
        let r_single = risk(&theta_single, &dat, &inst.tr, &inst.kv).unwrap();
        let r_multi = risk(&theta_multi, &dat, &inst.tr, &inst.kv).unwrap();
        assert!(r_multi <= r_single + 1e-12);
    }

    #[test]
    fn too_few_observations_is_an_error() {
        let inst = instance(30, 2, 0.2, 5);
        let kv = KnotVector::cubic(10); // 14 coefficients
        let x_small = inst.x_std.take_rows(&(0..8).collect::<Vec<_>>());
        let dat = FitData {
            x_std: &x_small,
            y: &inst.y[..8],
            weights: &inst.w[..8],
            population_size: 30,
        };
        assert!(matches!(
            fit_theta(&dat, &inst.tr, &kv, &FitOptions::default()),
            Err(Error::TooFewObservations { .. })
        ));
    }

    #[test]
    fn fitted_theta_is_unit_with_positive_last() {
        for seed in [1u64, 2, 3, 4, 5] {
            let inst = instance(90, 3, 0.4, seed);
            let dat = data(&inst);
            let (theta, _) =
                fit_theta(&dat, &inst.tr, &inst.kv, &FitOptions::default()).unwrap();
            assert!((norm2(&theta) - 1.0).abs() < 1e-12);
            assert!(theta[2] > 0.0);
        }
    }

    #[test]
    fn f32_fit_runs_and_stays_on_the_sphere() {
        let x64 = uniform_mat(60, 2, 88);
        let mut x32 = crate::linalg::Mat::<f32>::zeros(60, 2);
        for i in 0..60 {
            for j in 0..2 {
                x32.set(i, j, x64.get(i, j) as f32);
            }
        }
        let y: Vec<f32> = (0..60)
            .map(|i| {
                let t = x32.get(i, 0) + 0.5 * x32.get(i, 1);
                (t * t) as f32
            })
            .collect();
        let (x_std, tr) = IndexTransform::fit(&x32, 0.05f32).unwrap();
        let w = vec![1.0f32; 60];
        let dat = FitData {
            x_std: &x_std,
            y: &y,
            weights: &w,
            population_size: 60,
        };
        let kv = KnotVector::<f32>::cubic(2);
        let opts = FitOptions::<f32> {
            grad_tol: 1e-4,
            risk_tol: 1e-6,
            ..FitOptions::default()
        };
        let (theta, _) = fit_theta(&dat, &tr, &kv, &opts).unwrap();
        assert!((norm2(&theta) - 1.0).abs() < 1e-5);
        assert!(theta[1] > 0.0);
    }
}
