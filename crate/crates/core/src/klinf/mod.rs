//! Smallest KL divergence from an empirical distribution to any member of a
//! nonparametric family whose mean clears a target.
//!
//! Two families are supported: distributions supported in [0,1] and
//! distributions with a known bound on the (1+eps)-th absolute moment. Both
//! values are computed through their dual representations, which are finite
//! concave maximizations (one multiplier for the bounded family, two for the
//! heavy-tailed one).

mod bounded;
mod heavy;

pub use bounded::{klinf_bounded, klinf_bounded_lower, klinf_bounded_upper};
pub use heavy::{heavy_dual_objective, heavy_feasible, klinf_heavy};
pub(crate) use heavy::HeavyUpperSolver;

use crate::error::{Error, Result};

/// Which side of the mean a divergence or interval endpoint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// A weighted, sorted, deduplicated sample distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    values: Vec<f64>,
    weights: Vec<f64>,
    mean: f64,
    n_samples: u64,
}

impl EmpiricalDist {
    /// Build from raw observations. Equal values are merged into one atom
    /// with summed weight; the observation count is retained for threshold
    /// functions that depend on it.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite sample {bad}")));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = 1.0 / samples.len() as f64;
        let mut values = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for v in sorted {
            match values.last() {
                Some(&last) if last == v => *weights.last_mut().unwrap() += w,
                _ => {
                    values.push(v);
                    weights.push(w);
                }
            }
        }
        Self::finish(values, weights, samples.len() as u64)
    }

    /// Build from explicit (value, weight) atoms and an observation count.
    /// Atoms must be strictly increasing with positive weights summing to 1.
    pub fn from_atoms(atoms: &[(f64, f64)], n_samples: u64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut values = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for &(v, w) in atoms {
            if !v.is_finite() || !w.is_finite() {
                return Err(Error::InvalidDistribution("non-finite atom".into()));
            }
            if w <= 0.0 {
                return Err(Error::InvalidDistribution(format!("weight {w} must be positive")));
            }
            if let Some(&last) = values.last() {
                if v <= last {
                    return Err(Error::InvalidDistribution("atom values must be strictly increasing".into()));
                }
            }
            values.push(v);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, expected 1")));
        }
        Self::finish(values, weights, n_samples)
    }

    fn finish(values: Vec<f64>, mut weights: Vec<f64>, n_samples: u64) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mean = values.iter().zip(&weights).map(|(v, w)| v * w).sum();
        Ok(EmpiricalDist { values, weights, mean, n_samples })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// E |X|^p under the empirical distribution.
    pub fn abs_moment(&self, p: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum()
    }

    /// Mirror the distribution through the origin (X -> -X).
    pub(crate) fn reflected(&self) -> Self {
        let values: Vec<f64> = self.values.iter().rev().map(|v| -v).collect();
        let weights: Vec<f64> = self.weights.iter().rev().copied().collect();
        EmpiricalDist { values, weights, mean: -self.mean, n_samples: self.n_samples }
    }
}

/// Heavy-tailed family description: E|X|^(1+eps) <= gamma_bound.
///
/// Means of members range over the open interval (-m_half, m_half) with
/// m_half = gamma_bound^(1/(1+eps)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeavyFamilySpec {
    pub eps: f64,
    pub gamma_bound: f64,
}

impl HeavyFamilySpec {
    pub fn new(eps: f64, gamma_bound: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        if !(gamma_bound > 0.0 && gamma_bound.is_finite()) {
            return Err(Error::Domain(format!("moment bound must be positive, got {gamma_bound}")));
        }
        Ok(HeavyFamilySpec { eps, gamma_bound })
    }

    /// Half-width of the admissible mean interval.
    pub fn m_half(&self) -> f64 {
        self.gamma_bound.powf(1.0 / (1.0 + self.eps))
    }

    /// True when x lies strictly inside the admissible mean interval.
    pub fn contains_mean(&self, x: f64) -> bool {
        x.is_finite() && x.abs() < self.m_half()
    }
}

/// Location of a dual maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualPoint {
    Univariate(f64),
    Bivariate(f64, f64),
}

/// Value and diagnostics of a solved dual problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSolution {
    /// The divergence value (always >= 0).
    pub value: f64,
    /// Maximizing multiplier(s).
    pub argmax: DualPoint,
    /// False only if an iteration limit was hit before the tolerance.
    pub converged: bool,
    /// Objective/derivative evaluations used.
    pub iterations: u32,
}

impl DualSolution {
    pub(crate) fn trivial_univariate() -> Self {
        DualSolution { value: 0.0, argmax: DualPoint::Univariate(0.0), converged: true, iterations: 0 }
    }

    pub(crate) fn trivial_bivariate() -> Self {
        DualSolution { value: 0.0, argmax: DualPoint::Bivariate(0.0, 0.0), converged: true, iterations: 0 }
    }
}
