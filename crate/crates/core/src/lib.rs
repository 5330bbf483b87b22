//! Confidence intervals for the mean by divergence inversion.
//!
//! The crate builds two-sided (and one-sided) mean confidence intervals by
//! inverting deviation inequalities of the form
//! `n * div(estimate, q) <= beta`, where `div` is either the KL divergence of
//! a single-parameter exponential family in mean coordinates or the smallest
//! KL divergence to a nonparametric family (bounded support, or a known bound
//! on the (1+eps)-th absolute moment). Classical Hoeffding, Bernstein and
//! empirical-Bernstein intervals are included as baselines, along with the
//! regime-dependent limiting-width solvers they are compared against and a
//! reproducible Monte Carlo harness for fixed-sample and cost-budget
//! experiments.

pub mod bounds;
pub mod error;
pub mod exp_family;
pub mod harness;
pub mod klinf;
pub mod policies;
pub mod thresholds;

pub use bounds::{classify_regime, rate_constant, LimitingWidth, Regime, RegimeSpec};
pub use error::{Error, Result};
pub use exp_family::ExpFamilyModel;
pub use klinf::{DualPoint, DualSolution, EmpiricalDist, HeavyFamilySpec, Side};
pub use policies::{ConfidenceInterval, Method, SidedRequest};
pub use harness::{CostModel, DataGenerator, ExperimentConfig, ResultRow};
