//! Sampling designs, drawn samples, and the Horvitz-Thompson estimator.
//!
//! Two designs cover everything the toolkit does: simple random sampling
//! without replacement (fixed size, equal probabilities) and Poisson
//! sampling (independent Bernoulli selections, arbitrary probabilities).
//! A census is simple random sampling with `n = N`.
//!
//! Small designs can be enumerated exhaustively, sample by sample with
//! probabilities. The enumeration is the ground truth the estimator tests
//! check against: design expectations computed by weighting every possible
//! sample must reproduce population totals exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest design support [`SurveyDesign::enumerate`] will expand.
pub const ENUMERATION_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
enum Kind<R> {
    Srswor { sample_size: usize },
    Poisson { inclusion: Vec<R> },
}

/// A sampling design over a finite population indexed `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyDesign<R> {
    population_size: usize,
    kind: Kind<R>,
}

/// A drawn sample: strictly increasing population indices with their
/// design weights `1 / pi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<R> {
    indices: Vec<usize>,
    weights: Vec<R>,
}

impl<R: Real> Sample<R> {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Pulls the sampled entries out of a population-length slice.
    pub fn gather(&self, values: &[R]) -> Vec<R> {
        self.indices.iter().map(|&i| values[i]).collect()
    }
}

impl<R: Real> SurveyDesign<R> {
    /// Simple random sampling without replacement: `n` of `N` units, all
    /// subsets equally likely.
    pub fn srswor(population_size: usize, sample_size: usize) -> Result<Self> {
        if population_size == 0 {
            return Err(Error::PopulationTooSmall {
                min: 1,
                got: 0,
            });
        }
        if sample_size == 0 || sample_size > population_size {
            return Err(Error::SampleTooLarge {
                n: sample_size,
                population: population_size,
            });
        }
        Ok(SurveyDesign {
            population_size,
            kind: Kind::Srswor { sample_size },
        })
    }

    /// The degenerate design that observes every unit.
    pub fn census(population_size: usize) -> Result<Self> {
        Self::srswor(population_size, population_size)
    }

    /// Poisson sampling with per-unit inclusion probabilities in (0, 1].
    pub fn poisson(inclusion: Vec<R>) -> Result<Self> {
        if inclusion.is_empty() {
            return Err(Error::PopulationTooSmall { min: 1, got: 0 });
        }
        for (i, &p) in inclusion.iter().enumerate() {
            if !(p > R::zero() && p <= R::one()) {
                return Err(Error::InvalidInclusion(i));
            }
        }
        Ok(SurveyDesign {
            population_size: inclusion.len(),
            kind: Kind::Poisson { inclusion },
        })
    }

    pub fn population_size(&self) -> usize {
        self.population_size
    }

    /// Fixed sample size for SRSWOR; `None` for Poisson, where the size is
    /// random.
    pub fn fixed_sample_size(&self) -> Option<usize> {
        match &self.kind {
            Kind::Srswor { sample_size } => Some(*sample_size),
            Kind::Poisson { .. } => None,
        }
    }

    pub fn is_census(&self) -> bool {
        matches!(&self.kind, Kind::Srswor { sample_size } if *sample_size == self.population_size)
    }

    /// First-order inclusion probability of unit `i`.
    pub fn pi(&self, i: usize) -> R {
        debug_assert!(i < self.population_size);
        match &self.kind {
            Kind::Srswor { sample_size } => {
                R::from_usize(*sample_size).unwrap()
                    / R::from_usize(self.population_size).unwrap()
            }
            Kind::Poisson { inclusion } => inclusion[i],
        }
    }

    /// Joint inclusion probability of units `i` and `j`, with the
    /// convention `pi_(ii) = pi_i`.
    pub fn pi_joint(&self, i: usize, j: usize) -> R {
        debug_assert!(i < self.population_size && j < self.population_size);
        if i == j {
            return self.pi(i);
        }
        match &self.kind {
            Kind::Srswor { sample_size } => {
                let n = R::from_usize(*sample_size).unwrap();
                let big_n = R::from_usize(self.population_size).unwrap();
                n * (n - R::one()) / (big_n * (big_n - R::one()))
            }
            Kind::Poisson { inclusion } => inclusion[i] * inclusion[j],
        }
    }

    /// Draws one sample. The same seed always yields the same sample.
    ///
    /// SRSWOR uses sequential selection: scanning the population in order,
    /// unit `i` is taken with probability (still needed) / (still unseen),
    /// which selects every subset of size `n` with equal probability and
    /// produces sorted indices for free.
    pub fn draw(&self, seed: u64) -> Sample<R> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let indices = match &self.kind {
            Kind::Srswor { sample_size } => {
                let mut picked = Vec::with_capacity(*sample_size);
                let mut remaining = *sample_size;
                for i in 0..self.population_size {
                    if remaining == 0 {
                        break;
                    }
                    let p = remaining as f64 / (self.population_size - i) as f64;
                    if rng.gen::<f64>() < p {
                        picked.push(i);
                        remaining -= 1;
                    }
                }
                picked
            }
            Kind::Poisson { inclusion } => (0..self.population_size)
                .filter(|&i| rng.gen::<f64>() < inclusion[i].as_f64())
                .collect(),
        };
        self.sample_from_indices(indices)
            .expect("drawn indices are valid by construction")
    }

    /// Wraps externally supplied population indices (sorted, in range,
    /// distinct) as a sample of this design, attaching design weights.
    pub fn sample_from_indices(&self, indices: Vec<usize>) -> Result<Sample<R>> {
        if let Kind::Srswor { sample_size } = &self.kind {
            if indices.len() != *sample_size {
                return Err(Error::LengthMismatch {
                    left: *sample_size,
                    right: indices.len(),
                });
            }
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidConfig(
                    "sample indices must be strictly increasing".to_string(),
                ));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= self.population_size {
                return Err(Error::DimensionMismatch {
                    expected: self.population_size,
                    got: last + 1,
                });
            }
        }
        let weights = indices.iter().map(|&i| R::one() / self.pi(i)).collect();
        Ok(Sample { indices, weights })
    }

    /// Expands the design's whole support as `(sample, probability)` pairs.
    ///
    /// SRSWOR enumerates the `C(N, n)` subsets; Poisson the `2^N` subsets.
    /// Fails when the support exceeds [`ENUMERATION_LIMIT`].
    pub fn enumerate(&self) -> Result<Vec<(Sample<R>, R)>> {
        match &self.kind {
            Kind::Srswor { sample_size } => {
                let count = binomial(self.population_size as u64, *sample_size as u64);
                if count > ENUMERATION_LIMIT {
                    return Err(Error::EnumerationTooLarge {
                        population: self.population_size,
                        n: *sample_size,
                        limit: ENUMERATION_LIMIT,
                    });
                }
                let prob = R::one() / R::from_u64(count).unwrap();
                let mut out = Vec::with_capacity(count as usize);
                let mut current = Vec::with_capacity(*sample_size);
                combinations(self.population_size, *sample_size, 0, &mut current, &mut |c| {
                    out.push((
                        self.sample_from_indices(c.to_vec())
                            .expect("combination indices are valid"),
                        prob,
                    ));
                });
                Ok(out)
            }
            Kind::Poisson { inclusion } => {
                let n = self.population_size;
                if n >= 64 || (1u64 << n) > ENUMERATION_LIMIT {
                    return Err(Error::EnumerationTooLarge {
                        population: n,
                        n,
                        limit: ENUMERATION_LIMIT,
                    });
                }
                let mut out = Vec::with_capacity(1usize << n);
                for mask in 0u64..(1u64 << n) {
                    let mut prob = R::one();
                    let mut indices = Vec::new();
                    for (i, &p) in inclusion.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            prob = prob * p;
                            indices.push(i);
                        } else {
                            prob = prob * (R::one() - p);
                        }
                    }
                    out.push((
                        self.sample_from_indices(indices)
                            .expect("mask indices are valid"),
                        prob,
                    ));
                }
                Ok(out)
            }
        }
    }

    /// Short human-readable tag, e.g. `srswor(n=100)`.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Srswor { .. } if self.is_census() => {
                format!("census(N={})", self.population_size)
            }
            Kind::Srswor { sample_size } => format!("srswor(n={sample_size})"),
            Kind::Poisson { .. } => format!("poisson(N={})", self.population_size),
        }
    }
}

/// Binomial coefficient, saturating at `u64::MAX` to keep the cap check
/// meaningful for large inputs.
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

fn combinations(
    n: usize,
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if current.len() == k {
        emit(current);
        return;
    }
    let needed = k - current.len();
    for i in start..=(n - needed) {
        current.push(i);
        combinations(n, k, i + 1, current, emit);
        current.pop();
    }
}

/// Horvitz-Thompson estimator of the population total from sampled
/// responses: the weighted sample sum.
pub fn ht_total<R: Real>(sample: &Sample<R>, y_s: &[R]) -> Result<R> {
    if y_s.len() != sample.len() {
        return Err(Error::LengthMismatch {
            left: sample.len(),
            right: y_s.len(),
        });
    }
    Ok(sample
        .weights
        .iter()
        .zip(y_s)
        .map(|(&w, &y)| w * y)
        .sum())
}

/// Exact design variance of the Horvitz-Thompson total, computed from the
/// full population vector:
/// `sum_(i,j) (pi_(ij) - pi_i pi_j) (y_i / pi_i) (y_j / pi_j)`.
pub fn ht_variance_population<R: Real>(design: &SurveyDesign<R>, y: &[R]) -> R {
    let n = design.population_size();
    debug_assert_eq!(y.len(), n);
    let checked: Vec<R> = (0..n).map(|i| y[i] / design.pi(i)).collect();
    let mut acc = R::zero();
    for i in 0..n {
        for j in 0..n {
            let delta = design.pi_joint(i, j) - design.pi(i) * design.pi(j);
            acc += delta * checked[i] * checked[j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_y(n: usize) -> Vec<f64> {
        // Deterministic, irregular values.
        (0..n).map(|i| ((i * 37 + 11) % 17) as f64 - 5.0).collect()
    }

    #[test]
    fn srswor_probabilities() {
        let d = SurveyDesign::<f64>::srswor(5, 3).unwrap();
        assert!((d.pi(2) - 0.6).abs() < 1e-15);
        assert!((d.pi_joint(0, 4) - 0.3).abs() < 1e-15);
        assert_eq!(d.pi_joint(1, 1), d.pi(1));
    }

    #[test]
    fn census_has_unit_probabilities() {
        let d = SurveyDesign::<f64>::census(7).unwrap();
        assert!(d.is_census());
        for i in 0..7 {
            assert_eq!(d.pi(i), 1.0);
        }
        let s = d.draw(123);
        assert_eq!(s.indices(), (0..7).collect::<Vec<_>>());
        assert!(s.weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn poisson_rejects_bad_probabilities() {
        assert!(SurveyDesign::<f64>::poisson(vec![0.5, 0.0]).is_err());
        assert!(SurveyDesign::<f64>::poisson(vec![0.5, 1.2]).is_err());
        assert!(SurveyDesign::<f64>::poisson(vec![]).is_err());
    }

    #[test]
    fn srswor_rejects_oversized_sample() {
        assert!(SurveyDesign::<f64>::srswor(5, 6).is_err());
        assert!(SurveyDesign::<f64>::srswor(5, 0).is_err());
    }

    #[test]
    fn enumeration_counts_and_probabilities() {
        let d = SurveyDesign::<f64>::srswor(5, 3).unwrap();
        let support = d.enumerate().unwrap();
        assert_eq!(support.len(), 10);
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Inclusion frequency of unit 0 across the support is pi_0.
        let freq: f64 = support
            .iter()
            .filter(|(s, _)| s.indices().contains(&0))
            .map(|(_, p)| p)
            .sum();
        assert!((freq - d.pi(0)).abs() < 1e-12);
    }

    #[test]
    fn enumeration_respects_cap() {
        let d = SurveyDesign::<f64>::srswor(50, 25).unwrap();
        assert!(matches!(
            d.enumerate(),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn ht_is_design_unbiased_by_enumeration() {
        let y = toy_y(6);
        let t_y: f64 = y.iter().sum();
        for design in [
            SurveyDesign::<f64>::srswor(6, 2).unwrap(),
            SurveyDesign::<f64>::srswor(6, 4).unwrap(),
            SurveyDesign::<f64>::poisson(vec![0.3, 0.5, 0.9, 0.2, 0.7, 1.0]).unwrap(),
        ] {
            let support = design.enumerate().unwrap();
            let mean: f64 = support
                .iter()
                .map(|(s, p)| p * ht_total(s, &s.gather(&y)).unwrap())
                .sum();
            assert!(
                (mean - t_y).abs() < 1e-10,
                "{}: {mean} vs {t_y}",
                design.label()
            );
        }
    }

    #[test]
    fn ht_variance_matches_enumeration() {
        let y = toy_y(6);
        let t_y: f64 = y.iter().sum();
        for design in [
            SurveyDesign::<f64>::srswor(6, 3).unwrap(),
            SurveyDesign::<f64>::poisson(vec![0.4, 0.6, 0.8, 0.3, 0.5, 0.9]).unwrap(),
        ] {
            let support = design.enumerate().unwrap();
            let var_enum: f64 = support
                .iter()
                .map(|(s, p)| {
                    let t = ht_total(s, &s.gather(&y)).unwrap();
                    p * (t - t_y) * (t - t_y)
                })
                .sum();
            let var_formula = ht_variance_population(&design, &y);
            assert!(
                (var_enum - var_formula).abs() < 1e-9 * (1.0 + var_enum.abs()),
                "{}: {var_enum} vs {var_formula}",
                design.label()
            );
        }
    }

    #[test]
    fn draw_is_deterministic_per_seed() {
        let d = SurveyDesign::<f64>::srswor(100, 10).unwrap();
        assert_eq!(d.draw(42), d.draw(42));
        assert_ne!(d.draw(42), d.draw(43));
    }

    #[test]
    fn draw_frequencies_match_inclusion_probabilities() {
        let d = SurveyDesign::<f64>::srswor(10, 3).unwrap();
        let reps = 2000;
        let mut counts = [0usize; 10];
        for seed in 0..reps {
            for &i in d.draw(seed).indices() {
                counts[i] += 1;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / reps as f64;
            assert!(
                (freq - 0.3).abs() < 0.04,
                "unit {i}: frequency {freq} far from 0.3"
            );
        }
    }

    #[test]
    fn sample_from_indices_validates() {
        let d = SurveyDesign::<f64>::srswor(10, 3).unwrap();
        assert!(d.sample_from_indices(vec![1, 5, 5]).is_err());
        assert!(d.sample_from_indices(vec![5, 1, 7]).is_err());
        assert!(d.sample_from_indices(vec![1, 5, 10]).is_err());
        assert!(d.sample_from_indices(vec![1, 5]).is_err());
        let s = d.sample_from_indices(vec![1, 5, 9]).unwrap();
        assert!(s.weights().iter().all(|&w| (w - 10.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn ht_total_length_check() {
        let d = SurveyDesign::<f64>::srswor(10, 3).unwrap();
        let s = d.draw(1);
        assert!(ht_total(&s, &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn drawn_samples_are_valid(seed in 0u64..500, n in 1usize..20) {
            let d = SurveyDesign::<f64>::srswor(20, n).unwrap();
            let s = d.draw(seed);
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.indices().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.indices().iter().all(|&i| i < 20));
        }

        #[test]
        fn poisson_draws_subset_of_support(seed in 0u64..200) {
            let d = SurveyDesign::<f64>::poisson(vec![0.2, 0.9, 0.5, 0.7]).unwrap();
            let s = d.draw(seed);
            prop_assert!(s.indices().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.indices().iter().all(|&i| i < 4));
        }
    }
}
