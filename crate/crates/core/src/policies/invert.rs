//! Shared monotone-function inversion for interval endpoints.

use crate::error::{Error, Result};

/// Which way the bracket runs from its inner end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Relative offset from the outer bracket end used to decide saturation: the
/// function is probed just inside the open domain, and if it still has not
/// reached the target there the endpoint is reported at the boundary itself.
const SATURATION_OFFSET: f64 = 1e-9;

const RESIDUAL_TOL: f64 = 1e-10;

/// Solve `f(q) = target` for a continuous `f` that is 0 at `bracket.0` (the
/// inner end) and increases toward `bracket.1` (the outer end).
///
/// Returns the outer end itself when the target stays out of reach inside the
/// open bracket, so interval endpoints saturate at domain boundaries. The
/// returned point satisfies `|f(q) - target| <= 1e-10 * max(1, target)`
/// whenever `f` has enough resolution in double precision.
pub fn invert_divergence(
    f: impl Fn(f64) -> f64,
    target: f64,
    bracket: (f64, f64),
    direction: Direction,
) -> Result<f64> {
    let (inner, outer) = bracket;
    if !(target > 0.0) {
        return Err(Error::Domain(format!("target must be positive, got {target}")));
    }
    match direction {
        Direction::Right if !(outer > inner) => {
            return Err(Error::Bracket(format!("right bracket needs outer > inner, got ({inner}, {outer})")));
        }
        Direction::Left if !(outer < inner) => {
            return Err(Error::Bracket(format!("left bracket needs outer < inner, got ({inner}, {outer})")));
        }
        _ => {}
    }
    let f_inner = f(inner);
    let tol = RESIDUAL_TOL * target.max(1.0);
    if f_inner > target {
        return Err(Error::Bracket(format!("f(inner) = {f_inner} already exceeds target {target}")));
    }
    let probe = inner + (outer - inner) * (1.0 - SATURATION_OFFSET);
    let f_probe = f(probe);
    if f_probe <= target {
        return Ok(outer);
    }
    Ok(brent(&f, target, inner, probe, f_inner - target, f_probe - target, tol))
}

/// Brent's method on g(q) = f(q) - target with g(a) <= 0 < g(b), with an
/// early exit once the residual tolerance is met.
fn brent(
    f: &impl Fn(f64) -> f64,
    target: f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> f64 {
    if fa.abs() <= tol {
        return a;
    }
    if fb.abs() <= tol {
        return b;
    }
    // keep the better end in b
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut mflag = true;
    let mut d = a;
    for _ in 0..256 {
        if fb.abs() <= tol {
            return b;
        }
        let s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { (lo..=b).contains(&s) } else { (b..=lo).contains(&s) };
        let step_tol = 2.0 * f64::EPSILON * b.abs().max(1e-300);
        let use_bisect = !between
            || (mflag && (s - b).abs() >= 0.5 * (b - c).abs())
            || (!mflag && (s - b).abs() >= 0.5 * (c - d).abs())
            || (mflag && (b - c).abs() < step_tol)
            || (!mflag && (c - d).abs() < step_tol);
        let s = if use_bisect { 0.5 * (a + b) } else { s };
        mflag = use_bisect;
        let fs = f(s) - target;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if (a - b).abs() <= 2.0 * f64::EPSILON * b.abs().max(1e-300) {
            break;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}
