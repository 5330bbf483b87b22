//! Divergence to the bounded-support family (distributions on [0,1]).
//!
//! Upper side: KL_inf^U(nu, x) = sup over lambda in [0, 1/(1-x)] of
//! E_nu[ln(1 - lambda (X - x))]. Lower side mirrors with lambda in [0, 1/x]
//! and a sign flip. Both objectives are strictly concave in lambda, so a
//! safeguarded Newton iteration with a bisection bracket suffices.

use super::{DualPoint, DualSolution, EmpiricalDist};
use crate::error::{Error, Result};

const GRAD_TOL: f64 = 1e-10;
const BRACKET_TOL: f64 = 1e-12;
const MAX_ITER: u32 = 200;

fn check_bounded_inputs(dist: &EmpiricalDist, x: f64) -> Result<()> {
    if dist.min_value() < 0.0 || dist.max_value() > 1.0 {
        return Err(Error::Support(format!(
            "atoms must lie in [0,1], found range [{}, {}]",
            dist.min_value(),
            dist.max_value()
        )));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("target {x} must lie in (0,1)")));
    }
    Ok(())
}

/// Maximize H(lambda) = sum_i w_i ln(1 - lambda * a_i) over [0, hi].
///
/// `a_i` encodes the side: `x_i - x` for the upper problem, `x - x_i` for the
/// lower one. Assumes H'(0) > 0.
fn solve_univariate(a: &[f64], w: &[f64], hi: f64) -> DualSolution {
    let h = |lam: f64| -> f64 {
        let mut s = 0.0;
        for (&ai, &wi) in a.iter().zip(w) {
            let g = 1.0 - lam * ai;
            if g <= 0.0 {
                return f64::NEG_INFINITY;
            }
            s += wi * g.ln();
        }
        s
    };
    // H'(lam) = sum w_i * (-a_i) / (1 - lam a_i), H'' < 0
    let h1h2 = |lam: f64| -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (&ai, &wi) in a.iter().zip(w) {
            let g = 1.0 - lam * ai;
            d1 += wi * (-ai) / g;
            d2 -= wi * ai * ai / (g * g);
        }
        (d1, d2)
    };

    let mut iterations = 1;
    let (d_hi, _) = h1h2(hi);
    if d_hi.is_finite() && d_hi >= 0.0 {
        // objective still increasing at the right end: boundary maximum
        return DualSolution { value: h(hi).max(0.0), argmax: DualPoint::Univariate(hi), converged: true, iterations };
    }

    let mut lo = 0.0;
    let mut up = hi;
    let mut lam = 0.5 * hi;
    let mut converged = false;
    while iterations < MAX_ITER {
        iterations += 1;
        let (d1, d2) = h1h2(lam);
        if d1.is_finite() && d1.abs() < GRAD_TOL {
            converged = true;
            break;
        }
        if d1 > 0.0 {
            lo = lam;
        } else {
            up = lam;
        }
        let mut next = if d1.is_finite() && d2.is_finite() && d2 < 0.0 { lam - d1 / d2 } else { f64::NAN };
        if !(next > lo && next < up) {
            next = 0.5 * (lo + up);
        }
        lam = next;
        if up - lo < BRACKET_TOL {
            converged = true;
            break;
        }
    }
    DualSolution { value: h(lam).max(0.0), argmax: DualPoint::Univariate(lam), converged, iterations }
}

/// KL_inf to members of the bounded family with mean >= x.
pub fn klinf_bounded_upper(dist: &EmpiricalDist, x: f64) -> Result<DualSolution> {
    check_bounded_inputs(dist, x)?;
    if dist.mean() >= x {
        return Ok(DualSolution::trivial_univariate());
    }
    // clamp away from the pole when an atom sits exactly at 1
    let cap = if dist.max_value() == 1.0 { (1.0 - 1e-12) / (1.0 - x) } else { 1.0 / (1.0 - x) };
    let a: Vec<f64> = dist.values().iter().map(|v| v - x).collect();
    Ok(solve_univariate(&a, dist.weights(), cap))
}

/// KL_inf to members of the bounded family with mean <= x.
pub fn klinf_bounded_lower(dist: &EmpiricalDist, x: f64) -> Result<DualSolution> {
    check_bounded_inputs(dist, x)?;
    if dist.mean() <= x {
        return Ok(DualSolution::trivial_univariate());
    }
    let cap = if dist.min_value() == 0.0 { (1.0 - 1e-12) / x } else { 1.0 / x };
    // H^-(lam) = E ln(1 + lam (X - x)) = E ln(1 - lam (x - X))
    let a: Vec<f64> = dist.values().iter().map(|v| x - v).collect();
    Ok(solve_univariate(&a, dist.weights(), cap))
}

/// Side-selected divergence: the upper branch when x >= mean, else the lower
/// branch. Equals the maximum of the two one-sided values.
pub fn klinf_bounded(dist: &EmpiricalDist, x: f64) -> Result<f64> {
    if x >= dist.mean() {
        Ok(klinf_bounded_upper(dist, x)?.value)
    } else {
        Ok(klinf_bounded_lower(dist, x)?.value)
    }
}
