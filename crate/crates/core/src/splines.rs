//! Cubic B-spline basis on [0, 1] with uniformly spaced interior knots.
//!
//! The basis is the standard clamped cubic one: order 4, `J` interior knots
//! at `j / (J + 1)`, and four-fold boundary knots at 0 and 1, giving `J + 4`
//! basis functions. Evaluation uses the Cox-de Boor recursion restricted to
//! the single knot span containing the point, so only the four (three for
//! the derivative's order-3 pass) non-vanishing functions are ever touched.
//!
//! With no interior knots the basis degenerates to the cubic Bernstein
//! polynomials, which pins down handy closed-form checks.

use crate::linalg::Mat;
use crate::scalar::Real;

/// Spline order (degree + 1). The fitter is hard-wired to cubics.
pub const ORDER: usize = 4;

/// Clamped knot sequence for the cubic basis on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector<R> {
    num_interior: usize,
    /// Full padded sequence: four zeros, the interior knots, four ones.
    knots: Vec<R>,
}

impl<R: Real> KnotVector<R> {
    /// Builds the clamped cubic knot sequence with `num_interior` equally
    /// spaced interior knots.
    pub fn cubic(num_interior: usize) -> Self {
        let j = num_interior;
        let mut knots = Vec::with_capacity(j + 2 * ORDER);
        knots.extend(std::iter::repeat(R::zero()).take(ORDER));
        let denom = R::from_usize(j + 1).unwrap();
        for i in 1..=j {
            knots.push(R::from_usize(i).unwrap() / denom);
        }
        knots.extend(std::iter::repeat(R::one()).take(ORDER));
        KnotVector {
            num_interior: j,
            knots,
        }
    }

    /// Number of interior knots `J`.
    pub fn num_interior(&self) -> usize {
        self.num_interior
    }

    /// Dimension of the spanned spline space, `J + 4`.
    pub fn dim(&self) -> usize {
        self.num_interior + ORDER
    }

    /// Full padded knot sequence, boundary repetitions included.
    pub fn knots(&self) -> &[R] {
        &self.knots
    }

    /// Index of the knot span containing `z`: the largest `l <= J` with
    /// `l / (J + 1) <= z`. Knot spacing is uniform, so this is a floor.
    #[inline]
    fn span(&self, z: R) -> usize {
        let segments = self.num_interior + 1;
        let raw = (z * R::from_usize(segments).unwrap()).floor();
        let raw = raw.to_usize().unwrap_or(0);
        raw.min(self.num_interior)
    }

    /// Values of the four basis functions that are non-zero at `z`.
    ///
    /// Returns `(l, values)` where `values[i]` is basis function `l + i`
    /// (0-based among the `J + 4`). `z` is clamped into [0, 1].
    pub fn eval_nonzero(&self, z: R) -> (usize, [R; 4]) {
        let z = clamp_unit(z);
        let l = self.span(z);
        let s = l + ORDER - 1; // span index into the padded sequence
        let vals = self.basis_on_span(z, s, 3);
        (l, [vals[0], vals[1], vals[2], vals[3]])
    }

    /// First derivatives of the four basis functions non-zero at `z`.
    ///
    /// Uses the exact identity relating the cubic derivative to order-3
    /// basis values, with the 0/0 convention at repeated boundary knots.
    pub fn eval_deriv_nonzero(&self, z: R) -> (usize, [R; 4]) {
        let z = clamp_unit(z);
        let l = self.span(z);
        let s = l + ORDER - 1;
        let quad = self.basis_on_span(z, s, 2);
        let three = R::of(3.0);

        let mut out = [R::zero(); 4];
        for (i, slot) in out.iter_mut().enumerate() {
            // Output l + i is padded-index p = s - 3 + i; the two order-3
            // values feeding it are padded indices p and p + 1, which the
            // quadratic pass stored at positions p - (s - 2) when in range.
            let p = s - 3 + i;
            let left = self.deriv_term(&quad, s, p);
            let right = self.deriv_term(&quad, s, p + 1);
            *slot = three * (left - right);
        }
        (l, out)
    }

    /// One term `B_{p,3} / (t_{p+3} - t_p)` of the derivative identity,
    /// with zero-width denominators (possible only when the numerator
    /// vanishes) mapped to zero.
    #[inline]
    fn deriv_term(&self, quad: &[R; 4], s: usize, p: usize) -> R {
        let m = if p >= s - 2 && p <= s {
            quad[p - (s - 2)]
        } else {
            R::zero()
        };
        let den = self.knots[p + 3] - self.knots[p];
        if den > R::zero() {
            m / den
        } else {
            R::zero()
        }
    }

    /// Cox-de Boor triangle on the span `[t_s, t_{s+1})` up to the given
    /// degree; entry `i` of the result is the basis function with padded
    /// index `s - degree + i`. Only the first `degree + 1` entries are set.
    fn basis_on_span(&self, z: R, s: usize, degree: usize) -> [R; 4] {
        let t = &self.knots;
        let mut n = [R::zero(); 4];
        let mut left = [R::zero(); 4];
        let mut right = [R::zero(); 4];
        n[0] = R::one();
        for j in 1..=degree {
            left[j] = z - t[s + 1 - j];
            right[j] = t[s + j] - z;
            let mut saved = R::zero();
            for r in 0..j {
                // Denominator is a span width inside the support, > 0 here.
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        n
    }
}

#[inline]
fn clamp_unit<R: Real>(z: R) -> R {
    z.max(R::zero()).min(R::one())
}

/// Interior-knot count rule `J = min(c1 * floor(n^(1/5.5)), c2)`.
///
/// The fractional power is nudged before flooring so that arguments that are
/// mathematically exact powers do not fall to the next lower integer through
/// floating-point rounding.
pub fn num_knots(n: usize, c1: usize, c2: usize) -> usize {
    assert!(n >= 1, "sample size must be positive");
    assert!(c1 >= 1 && c2 >= 1, "knot-rule constants must be positive");
    let root = (n as f64).powf(1.0 / 5.5);
    let base = (root + 1e-9).floor() as usize;
    (c1 * base).min(c2)
}

/// Evaluates all `J + 4` basis functions at `z` (clamped into [0, 1]).
pub fn eval_basis<R: Real>(z: R, kv: &KnotVector<R>) -> Vec<R> {
    let mut out = vec![R::zero(); kv.dim()];
    let (l, vals) = kv.eval_nonzero(z);
    out[l..l + 4].copy_from_slice(&vals);
    out
}

/// Evaluates all `J + 4` basis derivatives at `z` (clamped into [0, 1]).
pub fn eval_basis_deriv<R: Real>(z: R, kv: &KnotVector<R>) -> Vec<R> {
    let mut out = vec![R::zero(); kv.dim()];
    let (l, vals) = kv.eval_deriv_nonzero(z);
    out[l..l + 4].copy_from_slice(&vals);
    out
}

/// Stacks basis evaluations into the `n x (J + 4)` design matrix.
pub fn design_matrix<R: Real>(zs: &[R], kv: &KnotVector<R>) -> Mat<R> {
    let mut out = Mat::zeros(zs.len(), kv.dim());
    for (i, &z) in zs.iter().enumerate() {
        let (l, vals) = kv.eval_nonzero(z);
        out.row_mut(i)[l..l + 4].copy_from_slice(&vals);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_weighted_normal;
    use proptest::prelude::*;

    #[test]
    fn knot_sequence_layout() {
        let kv = KnotVector::<f64>::cubic(2);
        let expected = [
            0.0,
            0.0,
            0.0,
            0.0,
            1.0 / 3.0,
            2.0 / 3.0,
            1.0,
            1.0,
            1.0,
            1.0,
        ];
        assert_eq!(kv.knots(), &expected);
        assert_eq!(kv.dim(), 6);
    }

    #[test]
    fn bernstein_values_at_half() {
        // J = 0 collapses to the cubic Bernstein basis.
        let kv = KnotVector::<f64>::cubic(0);
        let b = eval_basis(0.5, &kv);
        let expected = [0.125, 0.375, 0.375, 0.125];
        for (got, want) in b.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
        }
    }

    #[test]
    fn bernstein_derivatives_at_half() {
        let kv = KnotVector::<f64>::cubic(0);
        let d = eval_basis_deriv(0.5, &kv);
        let expected = [-0.75, -0.75, 0.75, 0.75];
        for (got, want) in d.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "got {got}, want {want}");
        }
    }

    #[test]
    fn endpoints_are_interpolatory() {
        for j in 0..=6 {
            let kv = KnotVector::<f64>::cubic(j);
            let b0 = eval_basis(0.0, &kv);
            let b1 = eval_basis(1.0, &kv);
            assert!((b0[0] - 1.0).abs() < 1e-15);
            assert!(b0[1..].iter().all(|&v| v.abs() < 1e-15));
            assert!((b1[kv.dim() - 1] - 1.0).abs() < 1e-15);
            assert!(b1[..kv.dim() - 1].iter().all(|&v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn partition_of_unity_on_grid() {
        for j in 0..=10 {
            let kv = KnotVector::<f64>::cubic(j);
            for k in 0..=1000 {
                let z = k as f64 / 1000.0;
                let sum: f64 = eval_basis(z, &kv).iter().sum();
                assert!(
                    (sum - 1.0).abs() <= 1e-12,
                    "J={j}, z={z}: sum deviates by {}",
                    (sum - 1.0).abs()
                );
            }
        }
    }

    #[test]
    fn derivatives_sum_to_zero() {
        for j in 0..=10 {
            let kv = KnotVector::<f64>::cubic(j);
            for k in 0..=500 {
                let z = k as f64 / 500.0;
                let sum: f64 = eval_basis_deriv(z, &kv).iter().sum();
                assert!(sum.abs() <= 1e-11, "J={j}, z={z}: derivative sum {sum}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for j in [0usize, 1, 3, 5, 10] {
            let kv = KnotVector::<f64>::cubic(j);
            // Stay h away from knots so the stencil does not straddle a
            // breakpoint of the piecewise polynomial.
            for k in 0..200 {
                let z = 0.001 + 0.998 * (k as f64 / 199.0);
                let near_knot = kv
                    .knots()
                    .iter()
                    .any(|&t| (z - t).abs() < 2.0 * h);
                if near_knot {
                    continue;
                }
                let d = eval_basis_deriv(z, &kv);
                let lo = eval_basis(z - h, &kv);
                let hi = eval_basis(z + h, &kv);
                for i in 0..kv.dim() {
                    let fd = (hi[i] - lo[i]) / (2.0 * h);
                    assert!(
                        (d[i] - fd).abs() < 1e-5,
                        "J={j}, z={z}, i={i}: exact {} vs fd {fd}",
                        d[i]
                    );
                }
            }
        }
    }

    #[test]
    fn least_squares_fit_reproduces_cubic() {
        // Cubics lie in the spline space exactly, for every knot count.
        let p = |z: f64| 2.0 * z.powi(3) - z.powi(2) + 0.5 * z - 0.25;
        for j in [0usize, 2, 5] {
            let kv = KnotVector::<f64>::cubic(j);
            let zs: Vec<f64> = (0..60).map(|k| k as f64 / 59.0).collect();
            let ys: Vec<f64> = zs.iter().map(|&z| p(z)).collect();
            let x = design_matrix(&zs, &kv);
            let w = vec![1.0; zs.len()];
            let gamma = solve_weighted_normal(&x, &ys, &w, 0.0).unwrap();
            for k in 0..=97 {
                let z = 0.013 + 0.97 * (k as f64 / 97.0);
                let fit = crate::linalg::dot(&eval_basis(z, &kv), &gamma);
                assert!(
                    (fit - p(z)).abs() < 1e-8,
                    "J={j}, z={z}: fit {fit} vs exact {}",
                    p(z)
                );
            }
        }
    }

    #[test]
    fn knot_rule_examples() {
        assert_eq!(num_knots(100, 1, 5), 2);
        assert_eq!(num_knots(1000, 1, 5), 3);
        assert_eq!(num_knots(50, 1, 5), 2);
        assert_eq!(num_knots(1, 1, 5), 1);
        // Cap binds for large n.
        assert_eq!(num_knots(1_000_000, 1, 5), 5);
        // Exact power of the exponent's reciprocal must not round down:
        // 2048 = 4^5.5, so floor must give 4.
        assert_eq!(num_knots(2048, 1, 10), 4);
        assert_eq!(num_knots(100, 2, 5), 4);
    }

    proptest! {
        #[test]
        fn partition_of_unity_random(j in 0usize..=10, z in 0.0f64..=1.0) {
            let kv = KnotVector::<f64>::cubic(j);
            let sum: f64 = eval_basis(z, &kv).iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn basis_values_nonnegative(j in 0usize..=10, z in 0.0f64..=1.0) {
            let kv = KnotVector::<f64>::cubic(j);
            for v in eval_basis(z, &kv) {
                prop_assert!(v >= 0.0);
            }
        }

        #[test]
        fn window_is_consistent_with_full_vector(j in 0usize..=10, z in 0.0f64..=1.0) {
            let kv = KnotVector::<f64>::cubic(j);
            let (l, vals) = kv.eval_nonzero(z);
            let full = eval_basis(z, &kv);
            for (i, v) in full.iter().enumerate() {
                if i >= l && i < l + 4 {
                    prop_assert_eq!(*v, vals[i - l]);
                } else {
                    prop_assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn f32_basis_agrees_with_f64() {
        let kv64 = KnotVector::<f64>::cubic(3);
        let kv32 = KnotVector::<f32>::cubic(3);
        for k in 0..=50 {
            let z = k as f64 / 50.0;
            let b64 = eval_basis(z, &kv64);
            let b32 = eval_basis(z as f32, &kv32);
            for (a, b) in b64.iter().zip(b32) {
                assert!((a - b as f64).abs() < 1e-6);
            }
        }
    }
}
