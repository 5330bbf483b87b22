//! Interval construction policies.
//!
//! Divergence-inversion policies (`ci_pi1`, `ci_pi1_hat`, `ci_pi1_b`,
//! `ci_pi1_h`) report the largest interval around the point estimate on which
//! `n * div(estimate, q) <= beta`, with the divergence and threshold chosen
//! per family and sampling regime. The classical baselines (`ci_hoeffding`,
//! `ci_bernstein`, `ci_mp_eb`) are closed-form widths clipped to the known
//! support.

mod invert;

pub use invert::{invert_divergence, Direction};

use crate::error::{Error, Result};
use crate::exp_family::ExpFamilyModel;
use crate::klinf::{
    klinf_bounded_lower, klinf_bounded_upper, EmpiricalDist, HeavyFamilySpec, HeavyUpperSolver,
};
use crate::thresholds;

/// Policy tags, used for reporting and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pi1,
    Pi1Hat,
    Pi1B,
    Pi1H,
    Hoeffding,
    Bernstein,
    MpEb,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Pi1 => "pi1",
            Method::Pi1Hat => "pi1hat",
            Method::Pi1B => "pi1b",
            Method::Pi1H => "pi1h",
            Method::Hoeffding => "hoeffding",
            Method::Bernstein => "bernstein",
            Method::MpEb => "mpeb",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pi1" => Method::Pi1,
            "pi1hat" => Method::Pi1Hat,
            "pi1b" => Method::Pi1B,
            "pi1h" => Method::Pi1H,
            "hoeffding" => Method::Hoeffding,
            "bernstein" => Method::Bernstein,
            "mpeb" => Method::MpEb,
            other => return Err(Error::Domain(format!("unknown method '{other}'"))),
        })
    }
}

/// Which side(s) of the interval are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidedRequest {
    TwoSided,
    LowerOnly,
    UpperOnly,
}

/// A computed confidence interval with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub point_estimate: f64,
    pub method: Method,
    pub n_used: u64,
    pub beta_used: f64,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, mu: f64) -> bool {
        self.lower <= mu && mu <= self.upper
    }
}

/// Sample validation shared by the exponential-family policies. Only the mean
/// feeds the interval, so value shapes are unconstrained beyond the family's
/// support sign: Bernoulli data must lie in [0,1], Poisson and Gamma data must
/// be nonnegative.
fn validate_samples(model: &ExpFamilyModel, samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::Support(format!("non-finite sample {bad}")));
    }
    match model {
        ExpFamilyModel::Bernoulli => {
            if samples.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::Support("Bernoulli model needs samples in [0,1]".into()));
            }
        }
        ExpFamilyModel::Poisson | ExpFamilyModel::GammaKnownShape { .. } => {
            if samples.iter().any(|&v| v < 0.0) {
                return Err(Error::Support(format!("{model} model rejects negative samples")));
            }
        }
        ExpFamilyModel::GaussianKnownVar { .. } => {}
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    match model {
        ExpFamilyModel::GammaKnownShape { .. } if mean <= 0.0 => {
            Err(Error::Domain("Gamma model needs a positive sample mean".into()))
        }
        _ => Ok(mean),
    }
}

/// Both endpoints of `{q : n * d(mu_hat, q) <= beta}` for an exponential
/// family, saturating at the mean-domain boundary when the level set reaches
/// it. Gaussian inverts in closed form; the others bracket and bisect.
fn kl_endpoints(model: &ExpFamilyModel, mu_hat: f64, n: u64, beta: f64) -> Result<(f64, f64)> {
    if let ExpFamilyModel::GaussianKnownVar { sigma } = model {
        let r = sigma * (2.0 * beta / n as f64).sqrt();
        return Ok((mu_hat - r, mu_hat + r));
    }
    let (dom_lo, dom_hi) = model.mean_domain();
    let nf = n as f64;
    let f = |q: f64| {
        if q == mu_hat {
            0.0
        } else {
            nf * model.divergence_closure(mu_hat, q).expect("probe inside open domain")
        }
    };

    let upper = if mu_hat >= dom_hi {
        dom_hi
    } else if dom_hi.is_finite() {
        invert_divergence(f, beta, (mu_hat, dom_hi), Direction::Right)?
    } else {
        let mut hi = mu_hat + mu_hat.abs().max(1.0);
        while f(hi) < beta {
            hi = mu_hat + 2.0 * (hi - mu_hat);
        }
        invert_divergence(f, beta, (mu_hat, hi), Direction::Right)?
    };

    let lower = if mu_hat <= dom_lo {
        dom_lo
    } else if dom_lo.is_finite() {
        invert_divergence(f, beta, (mu_hat, dom_lo), Direction::Left)?
    } else {
        let mut lo = mu_hat - mu_hat.abs().max(1.0);
        while f(lo) < beta {
            lo = mu_hat - 2.0 * (mu_hat - lo);
        }
        invert_divergence(f, beta, (mu_hat, lo), Direction::Left)?
    };
    Ok((lower, upper))
}

/// Exponential-family interval with the fixed-sample threshold ln(2/delta).
pub fn ci_pi1(model: &ExpFamilyModel, samples: &[f64], delta: f64) -> Result<ConfidenceInterval> {
    let mu_hat = validate_samples(model, samples)?;
    let n = samples.len() as u64;
    let beta = thresholds::beta_fixed(delta)?;
    let (lower, upper) = kl_endpoints(model, mu_hat, n, beta)?;
    Ok(ConfidenceInterval { lower, upper, point_estimate: mu_hat, method: Method::Pi1, n_used: n, beta_used: beta })
}

/// Exponential-family interval with the anytime-valid mixture threshold;
/// valid when the sample count is itself random (cost-budget sampling).
pub fn ci_pi1_hat(model: &ExpFamilyModel, samples: &[f64], delta: f64) -> Result<ConfidenceInterval> {
    let mu_hat = validate_samples(model, samples)?;
    let n = samples.len() as u64;
    let beta = thresholds::beta_anytime(n, delta)?;
    let (lower, upper) = kl_endpoints(model, mu_hat, n, beta)?;
    Ok(ConfidenceInterval { lower, upper, point_estimate: mu_hat, method: Method::Pi1Hat, n_used: n, beta_used: beta })
}

/// Nonparametric interval for distributions supported in [0,1], inverting the
/// bounded-family divergence at the stitched threshold 1 + ln(2(1+n)/delta).
pub fn ci_pi1_b(dist: &EmpiricalDist, delta: f64) -> Result<ConfidenceInterval> {
    if dist.min_value() < 0.0 || dist.max_value() > 1.0 {
        return Err(Error::Support(format!(
            "bounded-family policy needs atoms in [0,1], found range [{}, {}]",
            dist.min_value(),
            dist.max_value()
        )));
    }
    let n = dist.n_samples();
    let beta = thresholds::beta_bounded(n, delta)?;
    let m = dist.mean();
    let nf = n as f64;

    let f_up = |q: f64| if q <= m { 0.0 } else { nf * klinf_bounded_upper(dist, q).expect("q in (0,1)").value };
    let upper = if m >= 1.0 { 1.0 } else { invert_divergence(f_up, beta, (m, 1.0), Direction::Right)? };

    let f_lo = |q: f64| if q >= m { 0.0 } else { nf * klinf_bounded_lower(dist, q).expect("q in (0,1)").value };
    let lower = if m <= 0.0 { 0.0 } else { invert_divergence(f_lo, beta, (m, 0.0), Direction::Left)? };

    Ok(ConfidenceInterval { lower, upper, point_estimate: m, method: Method::Pi1B, n_used: n, beta_used: beta })
}

/// Nonparametric interval under a known bound on E|X|^(1+eps), inverting the
/// heavy-tailed divergence at the stitched threshold 1 + ln(2(1+n)^2/delta).
///
/// Errors with [`Error::MomentViolation`] while the empirical moment still
/// exceeds the bound; callers sampling from a conforming distribution only
/// see this for early samples.
pub fn ci_pi1_h(dist: &EmpiricalDist, delta: f64, spec: &HeavyFamilySpec) -> Result<ConfidenceInterval> {
    let observed = dist.abs_moment(1.0 + spec.eps);
    if observed > spec.gamma_bound {
        return Err(Error::MomentViolation { observed, bound: spec.gamma_bound });
    }
    let m = dist.mean();
    if !spec.contains_mean(m) {
        return Err(Error::Domain(format!(
            "sample mean {m} outside admissible mean interval (-{h}, {h})",
            h = spec.m_half()
        )));
    }
    let n = dist.n_samples();
    let beta = thresholds::beta_heavy(n, delta)?;
    let nf = n as f64;
    let m_half = spec.m_half();

    let up_solver = HeavyUpperSolver::new(dist, spec);
    let f_up = |q: f64| if q <= m { 0.0 } else { nf * up_solver.solve(q).value };
    let upper = invert_divergence(f_up, beta, (m, m_half), Direction::Right)?;

    let reflected = dist.reflected();
    let lo_solver = HeavyUpperSolver::new(&reflected, spec);
    let f_lo = |q: f64| if q >= m { 0.0 } else { nf * lo_solver.solve(-q).value };
    let lower = invert_divergence(f_lo, beta, (m, -m_half), Direction::Left)?;

    Ok(ConfidenceInterval { lower, upper, point_estimate: m, method: Method::Pi1H, n_used: n, beta_used: beta })
}

fn validate_unit_support(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Support("samples must lie in [0,1]".into()));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

fn clipped(mu: f64, half_width: f64, method: Method, n: u64, beta: f64) -> ConfidenceInterval {
    ConfidenceInterval {
        lower: (mu - half_width).max(0.0),
        upper: (mu + half_width).min(1.0),
        point_estimate: mu,
        method,
        n_used: n,
        beta_used: beta,
    }
}

/// Hoeffding interval for [0,1]-supported data: half-width
/// sqrt(ln(2/delta) / (2N)), clipped to the support.
pub fn ci_hoeffding(samples: &[f64], delta: f64) -> Result<ConfidenceInterval> {
    let mu = validate_unit_support(samples)?;
    let beta = thresholds::beta_fixed(delta)?;
    let n = samples.len() as u64;
    let half = (beta / (2.0 * n as f64)).sqrt();
    Ok(clipped(mu, half, Method::Hoeffding, n, beta))
}

/// Bernstein interval with known standard deviation:
/// width 2 sigma sqrt(2 ln(2/delta)/N) + 4 ln(2/delta)/(3N), clipped.
pub fn ci_bernstein(samples: &[f64], sigma: f64, delta: f64) -> Result<ConfidenceInterval> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mu = validate_unit_support(samples)?;
    let beta = thresholds::beta_fixed(delta)?;
    let nf = samples.len() as f64;
    let half = sigma * (2.0 * beta / nf).sqrt() + 2.0 * beta / (3.0 * nf);
    Ok(clipped(mu, half, Method::Bernstein, samples.len() as u64, beta))
}

/// Empirical-Bernstein interval (Maurer-Pontil):
/// width 2 s_N sqrt(2 ln(4/delta)/N) + 14 ln(4/delta)/(3(N-1)) with the
/// unbiased sample standard deviation s_N, clipped. Needs N >= 2.
pub fn ci_mp_eb(samples: &[f64], delta: f64) -> Result<ConfidenceInterval> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { required: 2, got: samples.len() });
    }
    let mu = validate_unit_support(samples)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must be in (0,1), got {delta}")));
    }
    let beta = (4.0 / delta).ln();
    let nf = samples.len() as f64;
    let var = samples.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (nf - 1.0);
    let half = var.sqrt() * (2.0 * beta / nf).sqrt() + 7.0 * beta / (3.0 * (nf - 1.0));
    Ok(clipped(mu, half, Method::MpEb, samples.len() as u64, beta))
}

/// One-sided interval built from the corresponding two-sided endpoint with an
/// unchanged threshold: `[lower, sup O)` or `(inf O, upper]`.
pub fn ci_one_sided(
    model: &ExpFamilyModel,
    samples: &[f64],
    delta: f64,
    side: SidedRequest,
) -> Result<ConfidenceInterval> {
    if side == SidedRequest::TwoSided {
        return Err(Error::Domain("one-sided request must pick a side".into()));
    }
    let two_sided = ci_pi1(model, samples, delta)?;
    let (dom_lo, dom_hi) = model.mean_domain();
    Ok(match side {
        SidedRequest::LowerOnly => ConfidenceInterval { upper: dom_hi, ..two_sided },
        SidedRequest::UpperOnly => ConfidenceInterval { lower: dom_lo, ..two_sided },
        SidedRequest::TwoSided => unreachable!(),
    })
}
