//! Poisson-Binomial distributions: sums of independent Bernoulli trials with
//! heterogeneous success probabilities.
//!
//! The mass function is built by folding one trial at a time into a running
//! convolution. Each fold preserves total mass, so the result stays within
//! round-off of a proper distribution even for a few thousand trials; the
//! overall cost is O(k^2).

use crate::{Error, Result};

/// Largest tolerated magnitude for negative round-off in a mass vector.
const NEGATIVE_MASS_TOLERANCE: f64 = 1e-15;

/// Largest tolerated deviation of a mass vector's sum from 1.
const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// A validated vector of Bernoulli success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Wraps `rates`, rejecting non-finite entries and entries outside [0, 1].
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        for (i, &r) in rates.iter().enumerate() {
            if !r.is_finite() || !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid(format!(
                    "probability at index {i} must lie in [0, 1], got {r}"
                )));
            }
        }
        Ok(Self(rates))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Sum of the probabilities, i.e. the expected number of successes.
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(rates: Vec<f64>) -> Result<Self> {
        ProbVector::new(rates)
    }
}

/// A probability mass function over outcome counts `0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    mass: Vec<f64>,
}

impl Pmf {
    /// Wraps a raw mass vector over `0..=mass.len()-1` outcomes.
    ///
    /// Negative round-off of magnitude below 1e-15 is clamped to zero; any
    /// larger negative entry is an error. The entries must sum to 1 within
    /// 1e-9 and are renormalized to sum to 1 after clamping.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::invalid("mass vector must not be empty"));
        }
        let mut mass = mass;
        for (t, m) in mass.iter_mut().enumerate() {
            if !m.is_finite() {
                return Err(Error::invalid(format!("mass at {t} is not finite")));
            }
            if *m < 0.0 {
                if *m > -NEGATIVE_MASS_TOLERANCE {
                    *m = 0.0;
                } else {
                    return Err(Error::invalid(format!(
                        "mass at {t} is negative beyond round-off: {m}"
                    )));
                }
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "mass vector sums to {total}, expected 1"
            )));
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(Self { mass })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Mass at exactly `t` outcomes; zero outside the support.
    pub fn at(&self, t: usize) -> f64 {
        self.mass.get(t).copied().unwrap_or(0.0)
    }

    /// Number of trials `k`; the support is `0..=k`.
    pub fn trials(&self) -> usize {
        self.mass.len() - 1
    }

    /// Expected outcome count, `sum over t of t * P(T = t)`.
    pub fn mean(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(t, &m)| t as f64 * m)
            .sum()
    }

    /// Total-variation distance to `other`: half the L1 distance, treating
    /// outcomes outside either support as zero mass.
    pub fn tv_distance(&self, other: &Pmf) -> f64 {
        let len = self.mass.len().max(other.mass.len());
        let l1: f64 = (0..len).map(|t| (self.at(t) - other.at(t)).abs()).sum();
        l1 / 2.0
    }
}

/// Exact PMF of the number of successes among independent trials with the
/// given per-trial probabilities.
///
/// Zero trials yield the point mass at zero. The fold order follows the input
/// order; the result is permutation-invariant up to round-off.
pub fn poisson_binomial_pmf(rates: &ProbVector) -> Pmf {
    let mut mass = Vec::with_capacity(rates.len() + 1);
    mass.push(1.0);
    for &p in rates.as_slice() {
        let q = 1.0 - p;
        let mut next = vec![0.0; mass.len() + 1];
        for (t, &m) in mass.iter().enumerate() {
            next[t] += m * q;
            next[t + 1] += m * p;
        }
        mass = next;
    }
    Pmf::new(mass).expect("convolving probabilities keeps mass in [0, 1]")
}
