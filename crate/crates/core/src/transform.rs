//! Standardization of the auxiliary variables and the compact-support CDF
//! map that carries index values onto [0, 1].
//!
//! The fitted index `x' theta` of a unit-norm coefficient over standardized
//! auxiliaries lands in a data-driven interval [-a, a]. Before spline
//! fitting it is pushed through the CDF `F_d` of the distribution with
//! density proportional to `(1 - (v/a)^2)^((d-1)/2)` on that interval (the
//! one-dimensional marginal of the uniform law on the radius-`a` ball in
//! `d` dimensions). The map is strictly increasing inside the interval, so
//! it reparameterizes rather than distorts the fit, and it spreads transformed
//! index values roughly uniformly, which keeps every knot span populated.
//!
//! Writing `u = (v/a + 1)/2`, the CDF reduces to a regularized incomplete
//! beta function with equal parameters: `F_d(v) = I_u((d+1)/2, (d+1)/2)`.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::special::{ln_gamma, reg_inc_beta};

/// Per-column centering and scaling constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization<R> {
    pub center: Vec<R>,
    pub scale: Vec<R>,
}

/// Everything needed to map raw auxiliary rows to transformed index values.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTransform<R> {
    dim: usize,
    radius: R,
    alpha: R,
    standardization: Standardization<R>,
}

/// Centers each column at its mean and scales by the sample standard
/// deviation (denominator `N - 1`). Returns the standardized matrix with
/// the constants. A constant column is an error, not a silent divide.
pub fn standardize<R: Real>(x: &Mat<R>) -> Result<(Mat<R>, Standardization<R>)> {
    let n = x.rows();
    let d = x.cols();
    if n < 2 {
        return Err(Error::PopulationTooSmall { min: 2, got: n });
    }
    let nf = R::from_usize(n).unwrap();
    let mut center = vec![R::zero(); d];
    for i in 0..n {
        for (j, c) in center.iter_mut().enumerate() {
            *c += x.get(i, j);
        }
    }
    for c in center.iter_mut() {
        *c = *c / nf;
    }
    let mut scale = vec![R::zero(); d];
    for i in 0..n {
        for j in 0..d {
            let dev = x.get(i, j) - center[j];
            scale[j] += dev * dev;
        }
    }
    let bessel = R::from_usize(n - 1).unwrap();
    for (j, s) in scale.iter_mut().enumerate() {
        *s = (*s / bessel).sqrt();
        if !(*s > R::zero()) {
            return Err(Error::DegenerateColumn(j));
        }
    }
    let mut out = Mat::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            out.set(i, j, (x.get(i, j) - center[j]) / scale[j]);
        }
    }
    Ok((out, Standardization { center, scale }))
}

/// Selects the transform radius as the nearest-rank `100 (1 - alpha)`
/// percentile of the Euclidean row norms of the standardized auxiliaries.
///
/// Nearest rank means `a = norm_(ceil((1 - alpha) N))` over the ascending
/// sorted norms; the product is nudged down before the ceiling so exact
/// integer ranks survive floating-point rounding.
pub fn select_radius<R: Real>(x_std: &Mat<R>, alpha: R) -> Result<R> {
    let n = x_std.rows();
    if n == 0 {
        return Err(Error::PopulationTooSmall { min: 1, got: 0 });
    }
    if !(alpha > R::zero() && alpha < R::one()) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    let mut norms: Vec<R> = (0..n).map(|i| crate::linalg::norm2(x_std.row(i))).collect();
    norms.sort_by(|a, b| a.partial_cmp(b).expect("finite norms"));
    let q = (R::one() - alpha) * R::from_usize(n).unwrap();
    let rank = (q - R::of(1e-9)).ceil().to_usize().unwrap_or(1).clamp(1, n);
    let a = norms[rank - 1];
    if !(a > R::zero()) {
        return Err(Error::InvalidConfig(
            "selected radius is not positive".to_string(),
        ));
    }
    Ok(a)
}

/// Density of the transform law: proportional to `(1 - (v/a)^2)^((d-1)/2)`
/// on [-a, a], zero outside. For `d = 1` this is the uniform density on
/// the interval; for `d = 2` a semicircle law.
pub fn density<R: Real>(v: R, d: usize, a: R) -> R {
    debug_assert!(d >= 1 && a > R::zero());
    if v.abs() > a {
        return R::zero();
    }
    let one = R::one();
    let df = R::from_usize(d).unwrap();
    // Gamma(d + 1) / Gamma((d+1)/2)^2 / (2^d a).
    let half_d1 = (df + one) / R::of(2.0);
    let ln_coef = ln_gamma(df + one)
        - R::of(2.0) * ln_gamma(half_d1)
        - df * R::of(2.0).ln()
        - a.ln();
    let u = (one - (v / a) * (v / a)).max(R::zero());
    ln_coef.exp() * u.powf((df - one) / R::of(2.0))
}

/// CDF of the transform law. Values outside [-a, a] clamp to 0 or 1.
pub fn cdf<R: Real>(v: R, d: usize, a: R) -> R {
    debug_assert!(d >= 1 && a > R::zero());
    let half = R::of(0.5);
    let u = (v / a + R::one()) * half;
    let p = (R::from_usize(d).unwrap() + R::one()) * half;
    reg_inc_beta(p, p, u)
}

/// Derivative of [`cdf`] in `v`; identical to [`density`] wherever the
/// density is continuous, which is everywhere except the two endpoints
/// when `d = 1`.
pub fn cdf_deriv<R: Real>(v: R, d: usize, a: R) -> R {
    density(v, d, a)
}

/// Maps standardized rows to transformed index values `F_d(x' theta)`.
///
/// `theta` must be a unit vector (checked to 1e-8). Index values beyond
/// the radius clamp to the endpoints 0 and 1 of the transformed scale.
pub fn transform_index<R: Real>(
    x_std: &Mat<R>,
    theta: &[R],
    tr: &IndexTransform<R>,
) -> Result<Vec<R>> {
    if theta.len() != tr.dim {
        return Err(Error::DimensionMismatch {
            expected: tr.dim,
            got: theta.len(),
        });
    }
    if x_std.cols() != tr.dim {
        return Err(Error::DimensionMismatch {
            expected: tr.dim,
            got: x_std.cols(),
        });
    }
    let norm = crate::linalg::norm2(theta);
    if (norm - R::one()).abs() > R::of(1e-8) {
        return Err(Error::NonUnitTheta(norm.as_f64()));
    }
    Ok((0..x_std.rows())
        .map(|i| cdf(crate::linalg::dot(x_std.row(i), theta), tr.dim, tr.radius))
        .collect())
}

impl<R: Real> IndexTransform<R> {
    /// Standardizes a population matrix and fixes the transform radius from
    /// it. Returns the standardized matrix alongside the transform so the
    /// caller does not recompute it.
    pub fn fit(x: &Mat<R>, alpha: R) -> Result<(Mat<R>, Self)> {
        let (x_std, standardization) = standardize(x)?;
        let radius = select_radius(&x_std, alpha)?;
        Ok((
            x_std,
            IndexTransform {
                dim: x.cols(),
                radius,
                alpha,
                standardization,
            },
        ))
    }

    /// Standardizes new rows with the stored constants.
    pub fn apply(&self, x: &Mat<R>) -> Result<Mat<R>> {
        if x.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.cols(),
            });
        }
        let mut out = Mat::zeros(x.rows(), self.dim);
        for i in 0..x.rows() {
            for j in 0..self.dim {
                let v = (x.get(i, j) - self.standardization.center[j])
                    / self.standardization.scale[j];
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Rewrites a coefficient fitted on the standardized scale as a unit
    /// vector on the original scale of the auxiliaries (the two index
    /// directions are related by the per-column scales; centering only
    /// shifts the index).
    pub fn theta_to_original(&self, theta_std: &[R]) -> Vec<R> {
        debug_assert_eq!(theta_std.len(), self.dim);
        let mut out: Vec<R> = theta_std
            .iter()
            .zip(&self.standardization.scale)
            .map(|(&t, &s)| t / s)
            .collect();
        let norm = crate::linalg::norm2(&out);
        if norm > R::zero() {
            for v in out.iter_mut() {
                *v = *v / norm;
            }
        }
        if out[self.dim - 1] < R::zero() {
            for v in out.iter_mut() {
                *v = -*v;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> R {
        self.radius
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    pub fn standardization(&self) -> &Standardization<R> {
        &self.standardization
    }

    /// CDF of the index law with this transform's dimension and radius.
    pub fn index_cdf(&self, v: R) -> R {
        cdf(v, self.dim, self.radius)
    }

    /// Density of the index law; also the derivative of [`Self::index_cdf`].
    pub fn index_density(&self, v: R) -> R {
        density(v, self.dim, self.radius)
    }
}
