//! Threshold functions beta(.) paired with the divergence deviation bounds.
//!
//! Four kinds are used by the interval policies:
//!   * `beta_fixed`: ln(2/delta), valid for one fixed sample size;
//!   * `beta_anytime`: 3 ln(1 + ln n) + T(ln(1/delta)), valid uniformly in n
//!     (mixture-martingale threshold), used when the sample count is random;
//!   * `beta_bounded`: 1 + ln(2(1+n)/delta), the stitched threshold paired
//!     with the bounded-support divergence;
//!   * `beta_heavy`: 1 + ln(2(1+n)^2/delta), its heavy-tailed counterpart.

use crate::error::{Error, Result};

/// Which threshold family a policy used; carried for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    FixedN,
    AnytimeMixture,
    BoundedStitched,
    HeavyStitched,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must be in (0,1), got {delta}")));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    Ok(())
}

/// Fixed-sample threshold ln(2/delta).
pub fn beta_fixed(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((2.0 / delta).ln())
}

/// Inverse of psi(u) = u - ln u on u >= 1.
///
/// Newton from u0 = z + ln z, clipped into a maintained bracket; psi is convex
/// and increasing on [1, inf) so the iteration is safe.
pub fn psi_inverse(z: f64) -> Result<f64> {
    if !(z >= 1.0) {
        return Err(Error::Domain(format!("psi_inverse needs z >= 1, got {z}")));
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    let psi = |u: f64| u - u.ln();
    let mut lo = 1.0f64;
    let mut hi = z + 2.0 * z.ln() + 2.0;
    debug_assert!(psi(hi) >= z);
    let mut u = z + z.ln();
    for _ in 0..100 {
        let f = psi(u) - z;
        if f.abs() <= 1e-12 * z.max(1.0) {
            return Ok(u);
        }
        if f > 0.0 {
            hi = hi.min(u);
        } else {
            lo = lo.max(u);
        }
        let fp = 1.0 - 1.0 / u;
        let mut next = u - f / fp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        u = next;
    }
    Ok(u)
}

/// ln(2 * zeta(2)) with zeta(2) = pi^2 / 6.
fn ln_two_zeta2() -> f64 {
    (std::f64::consts::PI * std::f64::consts::PI / 3.0).ln()
}

/// The piecewise map used inside `calT`, specialized to y = 3/2.
fn psi_tilde_3_2(x: f64) -> f64 {
    let y: f64 = 1.5;
    let ln_y = y.ln();
    // switch point psi^{-1}(1/ln y); both pieces are increasing in x
    let switch = psi_inverse(1.0 / ln_y).expect("1/ln(3/2) > 1");
    if x >= switch {
        let u = psi_inverse(x).expect("x >= switch > 1");
        (1.0 / u).exp() * u
    } else {
        y * (x - ln_y.ln())
    }
}

/// The mixture-threshold transform: calT(x) = 2 psi_tilde_{3/2}((x + ln(2 zeta(2))) / 2),
/// satisfying calT(x)/x -> 1 as x -> inf.
pub fn cal_t(x: f64) -> f64 {
    assert!(x >= 0.0, "calT needs x >= 0, got {x}");
    2.0 * psi_tilde_3_2((x + ln_two_zeta2()) / 2.0)
}

/// Anytime-valid threshold beta(n, delta) = 3 ln(1 + ln n) + calT(ln(1/delta)).
pub fn beta_anytime(n: u64, delta: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    Ok(3.0 * (1.0 + (n as f64).ln()).ln() + cal_t((1.0 / delta).ln()))
}

/// Stitched threshold for the bounded-support divergence: 1 + ln(2(1+n)/delta).
pub fn beta_bounded(n: u64, delta: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    Ok(1.0 + (2.0 * (1.0 + n as f64) / delta).ln())
}

/// Stitched threshold for the heavy-tailed divergence: 1 + ln(2(1+n)^2/delta).
pub fn beta_heavy(n: u64, delta: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    let np1 = 1.0 + n as f64;
    Ok(1.0 + (2.0 * np1 * np1 / delta).ln())
}
