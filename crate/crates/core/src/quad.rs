//! Adaptive Simpson quadrature and the integral representations used as
//! independent cross-checks of the series.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

/// Adaptive Simpson rule with Richardson correction on `[a, b]`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let mut ok = true;
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut err, &mut ok);
    if ok {
        Ok(Quadrature { value, error_estimate: err })
    } else {
        Err(Error::Quadrature { estimate: value, error: err })
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // a minimum depth guards against symmetric cancellation on the first split
    if depth + 6 <= MAX_DEPTH && delta.abs() <= 15.0 * tol {
        *err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *ok = false;
        *err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err, ok)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err, ok)
}

/// `int_0^1 (1-t)^(mu-1) g(t) dt` for `mu > 0`, after the substitution
/// `u = (1-t)^mu` which turns it into `(1/mu) int_0^1 g(1 - u^(1/mu)) du`.
pub fn lommel_weighted<G: Fn(f64) -> f64>(mu: f64, g: G, tol: f64) -> Result<Quadrature> {
    if !(mu > 0.0) {
        return Err(Error::domain(format!("weight (1-t)^(mu-1) needs mu > 0, got {mu}")));
    }
    let inv = mu.recip();
    let q = adaptive_simpson(|u| g(1.0 - u.powf(inv)), 0.0, 1.0, tol * mu)?;
    Ok(Quadrature { value: q.value * inv, error_estimate: q.error_estimate * inv })
}

/// Struve function from `H_nu(x) = 2 (x/2)^nu / (sqrt(pi) Gamma(nu+1/2)) int_0^1 (1-t^2)^(nu-1/2) sin(xt) dt`.
pub fn struve_integral(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -0.5) {
        return Err(Error::domain(format!("integral representation needs nu > -1/2, got {nu}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lambda = nu + 0.5;
    let q = if lambda < 1.0 {
        // u = (1-t)^lambda removes the endpoint singularity
        let inv = lambda.recip();
        let g = |u: f64| {
            let s = u.powf(inv);
            (2.0 - s).powf(nu - 0.5) * (x * (1.0 - s)).sin()
        };
        let q = adaptive_simpson(g, 0.0, 1.0, DEFAULT_QUAD_TOL * lambda)?;
        q.value * inv
    } else {
        adaptive_simpson(
            |t| (1.0 - t * t).powf(nu - 0.5) * (x * t).sin(),
            0.0,
            1.0,
            DEFAULT_QUAD_TOL,
        )?
        .value
    };
    Ok(2.0 * (0.5 * x).powf(nu) / (PI.sqrt() * libm::tgamma(lambda)) * q)
}

/// Lommel integral forms `x phi_0(x)` and `phi_1(x)` for `mu in (0,1)`:
///
/// `x phi_0(x) = mu (mu+1) int_0^1 (1-t)^(mu-1) sin(xt) dt`,
/// `phi_1(x) = mu int_0^1 (1-t)^(mu-1) cos(xt) dt`.
pub fn lommel_integrals(mu: f64, x: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("Lommel integrals need mu in (0,1), got {mu}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("argument must be >= 0, got {x}")));
    }
    let s = lommel_weighted(mu, |t| (x * t).sin(), DEFAULT_QUAD_TOL)?;
    let c = lommel_weighted(mu, |t| (x * t).cos(), DEFAULT_QUAD_TOL)?;
    Ok((mu * (mu + 1.0) * s.value, mu * c.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_sine() {
        let q = adaptive_simpson(|t| t * t * t, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 4.0).abs() < 1e-12);
        let q = adaptive_simpson(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn singular_weight_exact_integral() {
        // mu int_0^1 (1-t)^(mu-1) dt = 1
        for mu in [0.1, 0.5, 0.9] {
            let q = lommel_weighted(mu, |_| 1.0, 1e-12).unwrap();
            assert!((mu * q.value - 1.0).abs() < 1e-12);
        }
        let (_, phi1) = lommel_integrals(0.5, 1e-12).unwrap();
        assert!((phi1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn struve_integral_edge_cases() {
        assert_eq!(struve_integral(0.5, 0.0).unwrap(), 0.0);
        assert!(struve_integral(-0.5, 1.0).is_err());
        // H_{1/2}(x) = sqrt(2/(pi x)) (1 - cos x)
        let x = 1.3;
        let exact = (2.0 / (PI * x)).sqrt() * (1.0 - x.cos());
        assert!((struve_integral(0.5, x).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn lommel_domain() {
        assert!(lommel_integrals(1.0, 1.0).is_err());
        assert!(lommel_integrals(0.0, 1.0).is_err());
    }
}
