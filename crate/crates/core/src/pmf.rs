use std::ops::Index;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-12;

/// A probability mass function on states `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    weights: Vec<f64>,
    positive: bool,
}

impl Pmf {
    /// Validates nonnegativity and unit mass.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidPmf(format!("weight {w} at state {i}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!("weights sum to {total}")));
        }
        Ok(Self {
            weights,
            positive: false,
        })
    }

    /// Like [`Pmf::new`] but additionally requires every weight to be > 0.
    pub fn positive(weights: Vec<f64>) -> Result<Self> {
        let mut pmf = Self::new(weights)?;
        if let Some(i) = pmf.weights.iter().position(|w| *w <= 0.0) {
            return Err(Error::InvalidPmf(format!(
                "weight at state {i} must be strictly positive"
            )));
        }
        pmf.positive = true;
        Ok(pmf)
    }

    /// Normalizes nonnegative weights with a positive total.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidPmf(format!("weights sum to {total}")));
        }
        let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
        if normalized.iter().all(|w| *w > 0.0) {
            Self::positive(normalized)
        } else {
            Self::new(normalized)
        }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            weights: vec![1.0 / len as f64; len],
            positive: true,
        }
    }

    pub fn point_mass(len: usize, state: usize) -> Self {
        let mut weights = vec![0.0; len];
        weights[state] = 1.0;
        Self {
            weights,
            positive: len == 1,
        }
    }

    /// Wraps a vector produced by exact kernel algebra on a valid pmf.
    /// Mass drift from round-off is not re-checked.
    pub(crate) fn from_vec_unchecked(weights: Vec<f64>) -> Self {
        let positive = weights.iter().all(|w| *w > 0.0);
        Self { weights, positive }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// True when every weight is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.positive || self.weights.iter().all(|w| *w > 0.0)
    }

    pub fn require_positive(&self) -> Result<()> {
        match self.weights.iter().position(|w| *w <= 0.0) {
            Some(i) => Err(Error::InvalidPmf(format!(
                "weight at state {i} must be strictly positive"
            ))),
            None => Ok(()),
        }
    }

    /// Cumulative distribution `H_i = sum_{k <= i} pi_k`.
    pub fn cdf(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }

    /// `H_i (1 - H_i)` for each cut `{0..i} | {i+1..}`, `i < len - 1`, with
    /// `1 - H_i` summed from the tail so small upper masses keep full precision.
    pub fn cut_products(&self) -> Vec<f64> {
        let len = self.weights.len();
        let mut tail = vec![0.0; len];
        let mut acc = 0.0;
        for i in (1..len).rev() {
            acc += self.weights[i];
            tail[i - 1] = acc;
        }
        self.cdf()
            .iter()
            .zip(&tail)
            .take(len.saturating_sub(1))
            .map(|(h, t)| h * t)
            .collect()
    }

    /// Mass of the states selected by `mask`.
    pub fn mass_of(&self, mask: &[bool]) -> f64 {
        self.weights
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(w, _)| w)
            .sum()
    }

    /// Max-norm distance to another pmf of the same length.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when `pi_i^2 >= pi_{i-1} pi_{i+1}` (up to a relative slack) for every interior index.
    pub fn is_log_concave(&self) -> bool {
        self.log_concavity_violation().is_none()
    }

    pub(crate) fn log_concavity_violation(&self) -> Option<usize> {
        let w = &self.weights;
        (1..w.len().saturating_sub(1))
            .find(|&i| w[i] * w[i] < w[i - 1] * w[i + 1] - 1e-12 * w[i] * w[i])
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.weights.windows(2).all(|p| p[1] >= p[0])
    }
}

impl Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}
