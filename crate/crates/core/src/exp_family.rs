//! Canonical single-parameter exponential families in mean coordinates.
//!
//! A family member is identified by its mean. The divergence
//! `d(mu, mu_tilde)` is the KL divergence between the members with means
//! `mu` and `mu_tilde`, written in mean coordinates:
//!
//! ```text
//! d(mu, mu_tilde) = b(theta(mu_tilde)) - b(theta(mu)) - mu * (theta(mu_tilde) - theta(mu))
//! ```
//!
//! where `b` is the log-partition function and `theta(mu)` inverts
//! `b'(theta) = mu`. Each family uses an explicit closed form instead of the
//! `b`-based expression, which cancels catastrophically near `mu_tilde == mu`;
//! the unit tests cross-check the two.

use crate::error::{Error, Result};

/// One of the four supported single-parameter exponential families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpFamilyModel {
    /// Bernoulli with unknown success probability; mean domain (0, 1).
    Bernoulli,
    /// Poisson with unknown rate; mean domain (0, inf).
    Poisson,
    /// Gaussian with known standard deviation; mean domain (-inf, inf).
    GaussianKnownVar { sigma: f64 },
    /// Gamma with known shape; mean domain (0, inf).
    GammaKnownShape { shape: f64 },
}

impl ExpFamilyModel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(ExpFamilyModel::GaussianKnownVar { sigma })
    }

    pub fn gamma(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::Domain(format!("shape must be positive, got {shape}")));
        }
        Ok(ExpFamilyModel::GammaKnownShape { shape })
    }

    /// Open interval of attainable means.
    pub fn mean_domain(&self) -> (f64, f64) {
        match self {
            ExpFamilyModel::Bernoulli => (0.0, 1.0),
            ExpFamilyModel::Poisson | ExpFamilyModel::GammaKnownShape { .. } => (0.0, f64::INFINITY),
            ExpFamilyModel::GaussianKnownVar { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// True when `mu` lies strictly inside the mean domain.
    pub fn contains_mean(&self, mu: f64) -> bool {
        let (lo, hi) = self.mean_domain();
        mu.is_finite() && mu > lo && mu < hi
    }

    fn check_params(&self) -> Result<()> {
        match self {
            ExpFamilyModel::GaussianKnownVar { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::Domain(format!("sigma must be positive, got {sigma}")))
            }
            ExpFamilyModel::GammaKnownShape { shape } if !(*shape > 0.0 && shape.is_finite()) => {
                Err(Error::Domain(format!("shape must be positive, got {shape}")))
            }
            _ => Ok(()),
        }
    }

    /// Variance of the member with mean `mu` (the inverse Fisher information).
    pub fn variance(&self, mu: f64) -> f64 {
        match self {
            ExpFamilyModel::Bernoulli => mu * (1.0 - mu),
            ExpFamilyModel::Poisson => mu,
            ExpFamilyModel::GaussianKnownVar { sigma } => sigma * sigma,
            ExpFamilyModel::GammaKnownShape { shape } => mu * mu / shape,
        }
    }

    /// Natural parameter of the member with mean `mu`, i.e. the inverse of
    /// `b'`. Strictly increasing in `mu`.
    pub fn mean_to_natural(&self, mu: f64) -> Result<f64> {
        self.check_params()?;
        if !self.contains_mean(mu) {
            return Err(Error::Domain(format!("mean {mu} outside domain {:?}", self.mean_domain())));
        }
        Ok(match self {
            ExpFamilyModel::Bernoulli => (mu / (1.0 - mu)).ln(),
            ExpFamilyModel::Poisson => mu.ln(),
            ExpFamilyModel::GaussianKnownVar { sigma } => mu / (sigma * sigma),
            ExpFamilyModel::GammaKnownShape { shape } => -shape / mu,
        })
    }

    /// Log-partition function `b(theta)`; fixed up to the additive constant
    /// implied by the reference measure. Only used to cross-validate the
    /// closed-form divergences.
    pub fn log_partition(&self, theta: f64) -> f64 {
        match self {
            ExpFamilyModel::Bernoulli => {
                // ln(1 + e^theta), stable on both tails
                if theta > 0.0 {
                    theta + (-theta).exp().ln_1p()
                } else {
                    theta.exp().ln_1p()
                }
            }
            ExpFamilyModel::Poisson => theta.exp(),
            ExpFamilyModel::GaussianKnownVar { sigma } => 0.5 * sigma * sigma * theta * theta,
            ExpFamilyModel::GammaKnownShape { shape } => -shape * (-theta).ln(),
        }
    }

    /// KL divergence `d(mu, mu_tilde)` in mean coordinates.
    ///
    /// The first argument may sit on the Bernoulli domain boundary {0, 1},
    /// where the `0 * ln 0 = 0` convention gives a finite limit. The second
    /// argument must lie strictly inside the mean domain.
    pub fn divergence(&self, mu: f64, mu_tilde: f64) -> Result<f64> {
        self.check_params()?;
        let first_ok = match self {
            ExpFamilyModel::Bernoulli => (0.0..=1.0).contains(&mu),
            _ => self.contains_mean(mu),
        };
        if !first_ok {
            return Err(Error::Domain(format!("mean {mu} outside domain of {self:?}")));
        }
        if !self.contains_mean(mu_tilde) {
            return Err(Error::Domain(format!("alternative mean {mu_tilde} outside open domain of {self:?}")));
        }
        Ok(self.divergence_unchecked(mu, mu_tilde))
    }

    /// Same as [`divergence`](Self::divergence) but additionally accepts the
    /// first argument on any closure point where the divergence has a finite
    /// limit (Poisson mean 0 besides the Bernoulli boundary). Interval
    /// construction needs this for boundary sample means.
    pub(crate) fn divergence_closure(&self, mu: f64, mu_tilde: f64) -> Result<f64> {
        self.check_params()?;
        let first_ok = match self {
            ExpFamilyModel::Bernoulli => (0.0..=1.0).contains(&mu),
            ExpFamilyModel::Poisson => mu >= 0.0 && mu.is_finite(),
            _ => self.contains_mean(mu),
        };
        if !first_ok {
            return Err(Error::Domain(format!("mean {mu} outside closed domain of {self:?}")));
        }
        if !self.contains_mean(mu_tilde) {
            return Err(Error::Domain(format!("alternative mean {mu_tilde} outside open domain of {self:?}")));
        }
        Ok(self.divergence_unchecked(mu, mu_tilde))
    }

    fn divergence_unchecked(&self, mu: f64, mu_tilde: f64) -> f64 {
        match self {
            ExpFamilyModel::Bernoulli => {
                let a = if mu > 0.0 { mu * (mu / mu_tilde).ln() } else { 0.0 };
                let b = if mu < 1.0 { (1.0 - mu) * ((1.0 - mu) / (1.0 - mu_tilde)).ln() } else { 0.0 };
                a + b
            }
            ExpFamilyModel::Poisson => {
                let a = if mu > 0.0 { mu * (mu / mu_tilde).ln() } else { 0.0 };
                mu_tilde - mu + a
            }
            ExpFamilyModel::GaussianKnownVar { sigma } => {
                let z = mu_tilde - mu;
                z * z / (2.0 * sigma * sigma)
            }
            ExpFamilyModel::GammaKnownShape { shape } => {
                shape * (mu / mu_tilde - 1.0 + (mu_tilde / mu).ln())
            }
        }
    }
}

impl std::fmt::Display for ExpFamilyModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpFamilyModel::Bernoulli => write!(f, "bernoulli"),
            ExpFamilyModel::Poisson => write!(f, "poisson"),
            ExpFamilyModel::GaussianKnownVar { sigma } => write!(f, "gaussian(sigma={sigma})"),
            ExpFamilyModel::GammaKnownShape { shape } => write!(f, "gamma(shape={shape})"),
        }
    }
}
