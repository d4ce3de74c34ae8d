//! Adaptive Simpson quadrature for real- and quaternion-valued integrands
//! of a real variable. Quaternion integration is componentwise, so the
//! quaternion version simply runs the scalar estimator on the full value
//! and measures error in the quaternion norm.

use crate::error::{Error, Result};
use crate::quat::Quat;
use crate::tol;

fn simpson_slice(fa: Quat, fm: Quat, fb: Quat, h: f64) -> Quat {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> Quat,
    a: f64,
    b: f64,
    fa: Quat,
    fm: Quat,
    fb: Quat,
    whole: Quat,
    eps: f64,
    depth: usize,
) -> Result<Quat> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_slice(fa, flm, fm, m - a);
    let right = simpson_slice(fm, frm, fb, b - m);
    let refined = left + right;
    let err = (refined - whole).norm();
    if err <= 15.0 * eps {
        // Richardson correction of the composite estimate.
        return Ok(refined + (refined - whole) / 15.0);
    }
    if depth == 0 {
        return Err(Error::Integration(format!(
            "Simpson refinement exceeded {} levels on [{}, {}] (err {:e})",
            tol::SIMPSON_MAX_DEPTH,
            a,
            b,
            err
        )));
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
    Ok(l + r)
}

/// Integrates a quaternion-valued function over `[a, b]` (oriented: swapping
/// the endpoints flips the sign) to absolute tolerance `eps`.
pub fn integrate_quat(f: impl Fn(f64) -> Quat, a: f64, b: f64, eps: f64) -> Result<Quat> {
    if a == b {
        return Ok(Quat::ZERO);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = simpson_slice(fa, fm, fb, hi - lo);
    let v = adapt(&f, lo, hi, fa, fm, fb, whole, eps, tol::SIMPSON_MAX_DEPTH)?;
    Ok(v * sign)
}

/// Integrates a real function over `[a, b]` to absolute tolerance `eps`.
pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> Result<f64> {
    integrate_quat(|t| Quat::real(f(t)), a, b, eps).map(|q| q.w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_reproduced() {
        let v = integrate_real(|t| 3.0 * t * t, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-11);
    }

    #[test]
    fn orientation() {
        let fwd = integrate_real(|t| t.cos(), 0.0, 1.0, 1e-12).unwrap();
        let bwd = integrate_real(|t| t.cos(), 1.0, 0.0, 1e-12).unwrap();
        assert!((fwd + bwd).abs() < 1e-13);
        assert!((fwd - 1.0f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn quaternion_integrand_componentwise() {
        // int_0^pi (cos t) i + (sin t) j dt = 0 i + 2 j
        let pi = std::f64::consts::PI;
        let v = integrate_quat(|t| Quat::pure(t.cos(), t.sin(), 0.0), 0.0, pi, 1e-12).unwrap();
        assert!(v.dist(&Quat::pure(0.0, 2.0, 0.0)) < 1e-10);
    }

    #[test]
    fn exponential_integrand() {
        // int_0^1 e^{-it} e^{jt} dt, cross-checked against a midpoint sum
        let f = |t: f64| (Quat::I * (-t)).exp() * (Quat::J * t).exp();
        let v = integrate_quat(f, 0.0, 1.0, 1e-12).unwrap();
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut s = Quat::ZERO;
        for idx in 0..n {
            s = s + f((idx as f64 + 0.5) * h) * h;
        }
        assert!(v.dist(&s) < 1e-9);
    }
}
