//! Regime classification and limiting-width solvers.
//!
//! As the confidence level tightens, the sample size (or cost budget) scales
//! against ln(1/delta) with some constant k. Below the critical scaling no
//! interval can shrink at all, above it every reasonable interval collapses,
//! and exactly at scale k the smallest achievable limiting width solves
//! `div(mu, endpoint) = cbar / k` on each side of the mean.

use crate::error::{Error, Result};
use crate::exp_family::ExpFamilyModel;
use crate::klinf::{klinf_bounded_lower, klinf_bounded_upper, klinf_heavy, EmpiricalDist, HeavyFamilySpec, Side};
use crate::policies::{invert_divergence, Direction};

/// Scaling constant k = lim N_delta / ln(1/delta) (or C_delta / ln(1/delta))
/// together with the mean per-sample cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSpec {
    /// Nonnegative, possibly infinite.
    pub k: f64,
    /// Mean sampling cost, 1 for unit-cost sampling.
    pub cbar: f64,
}

impl RegimeSpec {
    pub fn new(k: f64, cbar: f64) -> Result<Self> {
        if k.is_nan() || k < 0.0 {
            return Err(Error::Domain(format!("scaling constant must be >= 0, got {k}")));
        }
        if !(cbar > 0.0) || !cbar.is_finite() {
            return Err(Error::Domain(format!("mean cost must be positive, got {cbar}")));
        }
        Ok(RegimeSpec { k, cbar })
    }

    pub fn unit_cost(k: f64) -> Result<Self> {
        Self::new(k, 1.0)
    }
}

/// Finite-sample proxy k = N / ln(1/delta) for exploratory use; the limiting
/// constant itself is a modelling input, not something a single (N, delta)
/// pair identifies.
pub fn k_hat(n: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must be in (0,1), got {delta}")));
    }
    Ok(n as f64 / (1.0 / delta).ln())
}

/// The three learning regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoLearning,
    Sufficient,
    Complete,
}

pub fn classify_regime(spec: &RegimeSpec) -> Regime {
    if spec.k == 0.0 {
        Regime::NoLearning
    } else if spec.k.is_infinite() {
        Regime::Complete
    } else {
        Regime::Sufficient
    }
}

/// Limiting interval endpoints and width for a given regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitingWidth {
    pub regime: Regime,
    pub mu_star_l: f64,
    pub mu_star_r: f64,
    pub width: f64,
}

impl LimitingWidth {
    fn from_endpoints(regime: Regime, lo: f64, hi: f64) -> Self {
        LimitingWidth { regime, mu_star_l: lo, mu_star_r: hi, width: hi - lo }
    }
}

/// Smallest limiting width achievable at scale k for an exponential family:
/// endpoints solve `d(mu, .) = cbar / k` on each side, saturating at the mean
/// domain boundary when the level never reaches the target.
pub fn limiting_width_param(model: &ExpFamilyModel, mu: f64, spec: &RegimeSpec) -> Result<LimitingWidth> {
    if !model.contains_mean(mu) {
        return Err(Error::Domain(format!("mean {mu} outside domain of {model}")));
    }
    let (dom_lo, dom_hi) = model.mean_domain();
    match classify_regime(spec) {
        Regime::NoLearning => Ok(LimitingWidth::from_endpoints(Regime::NoLearning, dom_lo, dom_hi)),
        Regime::Complete => Ok(LimitingWidth::from_endpoints(Regime::Complete, mu, mu)),
        Regime::Sufficient => {
            let target = spec.cbar / spec.k;
            if let ExpFamilyModel::GaussianKnownVar { sigma } = model {
                let r = sigma * (2.0 * target).sqrt();
                return Ok(LimitingWidth::from_endpoints(Regime::Sufficient, mu - r, mu + r));
            }
            let f = |q: f64| {
                if q == mu {
                    0.0
                } else {
                    model.divergence_closure(mu, q).expect("probe inside open domain")
                }
            };
            let hi = if dom_hi.is_finite() {
                invert_divergence(f, target, (mu, dom_hi), Direction::Right)?
            } else {
                let mut b = mu + mu.abs().max(1.0);
                while f(b) < target {
                    b = mu + 2.0 * (b - mu);
                }
                invert_divergence(f, target, (mu, b), Direction::Right)?
            };
            let lo = if dom_lo.is_finite() {
                invert_divergence(f, target, (mu, dom_lo), Direction::Left)?
            } else {
                let mut b = mu - mu.abs().max(1.0);
                while f(b) < target {
                    b = mu - 2.0 * (mu - b);
                }
                invert_divergence(f, target, (mu, b), Direction::Left)?
            };
            Ok(LimitingWidth::from_endpoints(Regime::Sufficient, lo, hi))
        }
    }
}

/// Nonparametric family selector for [`limiting_width_nonparam`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonparamFamily {
    Bounded,
    Heavy(HeavyFamilySpec),
}

/// Smallest limiting width at scale k when the truth is a finitely-supported
/// distribution in a nonparametric family: endpoints solve
/// `KL_inf(nu, ., q) = cbar / k`, saturating at the family's mean boundary.
pub fn limiting_width_nonparam(
    nu: &EmpiricalDist,
    spec: &RegimeSpec,
    family: NonparamFamily,
) -> Result<LimitingWidth> {
    let (dom_lo, dom_hi) = match family {
        NonparamFamily::Bounded => {
            if nu.min_value() < 0.0 || nu.max_value() > 1.0 {
                return Err(Error::Support("bounded family needs support in [0,1]".into()));
            }
            (0.0, 1.0)
        }
        NonparamFamily::Heavy(h) => {
            let observed = nu.abs_moment(1.0 + h.eps);
            if observed > h.gamma_bound {
                return Err(Error::MomentViolation { observed, bound: h.gamma_bound });
            }
            (-h.m_half(), h.m_half())
        }
    };
    let m = nu.mean();
    match classify_regime(spec) {
        Regime::NoLearning => Ok(LimitingWidth::from_endpoints(Regime::NoLearning, dom_lo, dom_hi)),
        Regime::Complete => Ok(LimitingWidth::from_endpoints(Regime::Complete, m, m)),
        Regime::Sufficient => {
            let target = spec.cbar / spec.k;
            let (lo, hi) = match family {
                NonparamFamily::Bounded => {
                    let f_up = |q: f64| {
                        if q <= m { 0.0 } else { klinf_bounded_upper(nu, q).expect("q in (0,1)").value }
                    };
                    let hi = if m >= 1.0 {
                        1.0
                    } else {
                        invert_divergence(f_up, target, (m, 1.0), Direction::Right)?
                    };
                    let f_lo = |q: f64| {
                        if q >= m { 0.0 } else { klinf_bounded_lower(nu, q).expect("q in (0,1)").value }
                    };
                    let lo = if m <= 0.0 {
                        0.0
                    } else {
                        invert_divergence(f_lo, target, (m, 0.0), Direction::Left)?
                    };
                    (lo, hi)
                }
                NonparamFamily::Heavy(h) => {
                    let f_up = |q: f64| {
                        if q <= m { 0.0 } else { klinf_heavy(nu, q, &h, Side::Upper).expect("q in domain").value }
                    };
                    let hi = invert_divergence(f_up, target, (m, dom_hi), Direction::Right)?;
                    let f_lo = |q: f64| {
                        if q >= m { 0.0 } else { klinf_heavy(nu, q, &h, Side::Lower).expect("q in domain").value }
                    };
                    let lo = invert_divergence(f_lo, target, (m, dom_lo), Direction::Left)?;
                    (lo, hi)
                }
            };
            Ok(LimitingWidth::from_endpoints(Regime::Sufficient, lo, hi))
        }
    }
}

/// The comparator lower bound for the Gaussian case: sigma * sqrt(2/k).
pub fn shekhar_bound_gaussian(sigma: f64, k: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    Ok(sigma * (2.0 / k).sqrt())
}

/// Optimal squared-width rate constant in the complete-learning regime:
/// 8 * variance(mu).
pub fn rate_constant(model: &ExpFamilyModel, mu: f64) -> Result<f64> {
    if !model.contains_mean(mu) {
        return Err(Error::Domain(format!("mean {mu} outside domain of {model}")));
    }
    Ok(8.0 * model.variance(mu))
}
