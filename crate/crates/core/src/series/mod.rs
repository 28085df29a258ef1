//! Power-series evaluation of the Bessel, Struve and Lommel families.
//!
//! Two paths:
//!
//! * the normalized functions `f_nu`, `h_nu`, `l_mu` are entire in `z` and are
//!   only needed on a slightly enlarged unit disk, so they are summed in
//!   complex double precision from their z-series;
//! * the raw functions `J_nu`, `H_nu`, `phi_0`, `phi_1` are needed along the
//!   positive axis far enough out to bracket hundreds of zeros, and go through
//!   the extended-precision kernel in [`wide`].
//!
//! All coefficients come from term-ratio recurrences; the only Gamma values
//! used are the closed-form prefactors of the raw functions.

mod wide;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub(crate) use wide::{Dyadic, Kernel};

/// Largest derivative order accepted by the evaluators.
pub const MAX_DERIVATIVE_ORDER: u32 = 20;
/// Largest modulus accepted by [`eval_normalized`].
pub const MAX_NORMALIZED_MODULUS: f64 = 1.25;
/// Largest argument accepted by [`eval_raw`]; covers the scan range of 500 zeros.
pub const MAX_RAW_ARGUMENT: f64 = 2000.0;

/// A computed value together with an absolute truncation-plus-rounding bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue<T = Complex64> {
    pub value: T,
    pub error_bound: f64,
    pub terms_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `f_nu(z) = 2^nu Gamma(nu+1) z^(1-nu/2) J_nu(sqrt z)`
    BesselF,
    /// `h_nu(z) = sqrt(pi) 2^nu Gamma(nu+3/2) z^((1-nu)/2) H_nu(sqrt z)`
    StruveH,
    /// `l_mu(z) = z 1F2(1; (mu+2)/2, (mu+3)/2; -z/4)`
    LommelL,
    RawBesselJ,
    #[serde(rename = "raw_struve_H")]
    RawStruveH,
    /// `phi_0(x) = 1F2(1; (mu+2)/2, (mu+3)/2; -x^2/4)`
    Phi0,
    /// `phi_1(x) = 1F2(1; (mu+1)/2, (mu+2)/2; -x^2/4)`
    Phi1,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BesselF => "bessel_f",
            Family::StruveH => "struve_h",
            Family::LommelL => "lommel_l",
            Family::RawBesselJ => "raw_bessel_j",
            Family::RawStruveH => "raw_struve_H",
            Family::Phi0 => "phi0",
            Family::Phi1 => "phi1",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "bessel_f" => Family::BesselF,
            "struve_h" => Family::StruveH,
            "lommel_l" => Family::LommelL,
            "raw_bessel_j" => Family::RawBesselJ,
            "raw_struve_H" | "raw_struve_h" => Family::RawStruveH,
            "phi0" => Family::Phi0,
            "phi1" => Family::Phi1,
            _ => return None,
        })
    }

    pub fn is_normalized(self) -> bool {
        matches!(self, Family::BesselF | Family::StruveH | Family::LommelL)
    }
}

/// A function family at one real parameter (`nu` or `mu`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionId {
    pub family: Family,
    pub param: f64,
}

impl FunctionId {
    pub fn new(family: Family, param: f64) -> Self {
        FunctionId { family, param }
    }

    pub fn bessel_f(nu: f64) -> Self {
        Self::new(Family::BesselF, nu)
    }

    pub fn struve_h(nu: f64) -> Self {
        Self::new(Family::StruveH, nu)
    }

    pub fn lommel_l(mu: f64) -> Self {
        Self::new(Family::LommelL, mu)
    }

    /// Checks the evaluation domain of the family.
    ///
    /// Struve evaluation is allowed down to `nu = -3/2`, which is needed for
    /// the closed form of `H_{-3/2}`; certification is restricted elsewhere.
    pub fn validate(&self) -> Result<()> {
        let p = self.param;
        if !p.is_finite() {
            return Err(Error::domain(format!("{}: parameter must be finite", self.family.name())));
        }
        let ok = match self.family {
            Family::BesselF | Family::RawBesselJ => p > -1.0,
            Family::StruveH => p > -1.5,
            Family::RawStruveH => p >= -1.5,
            Family::LommelL | Family::Phi0 | Family::Phi1 => p > -1.0 && p < 1.0 && p != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{}: parameter {p} outside the supported domain",
                self.family.name()
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Absolute stopping tolerance (relative once the value exceeds 1).
    pub tolerance: f64,
    pub max_terms: usize,
    /// Always sum at least this many terms.
    pub min_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tolerance: 1e-14,
            max_terms: 4096,
            min_terms: 0,
        }
    }
}

impl EvalOptions {
    pub const MAX_TERMS_ENV: &'static str = "UNIDISC_MAX_TERMS";

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if self.max_terms < 8 {
            return Err(Error::domain("max_terms must be at least 8"));
        }
        Ok(())
    }

    /// Applies `UNIDISC_MAX_TERMS` when it is set to a valid integer.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var(Self::MAX_TERMS_ENV) {
            self.max_terms = raw.trim().parse().map_err(|_| {
                Error::domain(format!("{}={raw:?} is not a positive integer", Self::MAX_TERMS_ENV))
            })?;
        }
        self.validate()?;
        Ok(self)
    }
}

fn check_order(k: u32) -> Result<()> {
    if k > MAX_DERIVATIVE_ORDER {
        Err(Error::domain(format!(
            "derivative order {k} exceeds {MAX_DERIVATIVE_ORDER}"
        )))
    } else {
        Ok(())
    }
}

/// `(alpha, beta)` with `a_{n+1}/a_n = -1/(4 (n+alpha)(n+beta))` for the
/// normalized z-series `sum a_n z^(n+1)`.
fn normalized_shape(id: &FunctionId) -> Result<(f64, f64)> {
    let p = id.param;
    match id.family {
        Family::BesselF => Ok((1.0, p + 1.0)),
        Family::StruveH => Ok((1.5, p + 1.5)),
        Family::LommelL => Ok(((p + 2.0) / 2.0, (p + 3.0) / 2.0)),
        other => Err(Error::domain(format!(
            "{} is not a normalized family",
            other.name()
        ))),
    }
}

/// Leading `count` coefficients `a_n` of the normalized series `sum a_n z^(n+1)`.
pub fn normalized_coefficients(id: &FunctionId, count: usize) -> Result<Vec<f64>> {
    id.validate()?;
    let (alpha, beta) = normalized_shape(id)?;
    let mut out = Vec::with_capacity(count);
    let mut a = 1.0;
    for n in 0..count {
        out.push(a);
        a *= -0.25 / ((n as f64 + alpha) * (n as f64 + beta));
    }
    Ok(out)
}

/// k-th derivative of a normalized function at complex `z`, `|z| <= 1.25`.
pub fn eval_normalized(
    id: &FunctionId,
    z: Complex64,
    k: u32,
    opts: &EvalOptions,
) -> Result<SeriesValue<Complex64>> {
    id.validate()?;
    opts.validate()?;
    check_order(k)?;
    let (alpha, beta) = normalized_shape(id)?;
    if !(z.norm() <= MAX_NORMALIZED_MODULUS) {
        return Err(Error::domain(format!(
            "|z| = {} exceeds {MAX_NORMALIZED_MODULUS}",
            z.norm()
        )));
    }

    // term n contributes a_n (n+1)_(k) z^(n+1-k)
    let falling = |n: usize| -> f64 { (0..k).fold(1.0, |acc, j| acc * (n as f64 + 1.0 - j as f64)) };
    let ratio = |n: usize| -> f64 { -0.25 / ((n as f64 + alpha) * (n as f64 + beta)) };

    if z == Complex64::new(0.0, 0.0) {
        if k == 0 {
            return Ok(SeriesValue { value: z, error_bound: 0.0, terms_used: 1 });
        }
        let n = k as usize - 1;
        let a_n: f64 = (0..n).map(ratio).product();
        return Ok(SeriesValue {
            value: Complex64::new(a_n * falling(n), 0.0),
            error_bound: 0.0,
            terms_used: n + 1,
        });
    }

    let first = (k as usize).saturating_sub(1);
    let mut coeff: f64 = (0..first).map(ratio).product();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut n = first;
    let term_at = |n: usize, coeff: f64| -> Complex64 {
        z.powi((n + 1 - k as usize) as i32) * (coeff * falling(n))
    };
    let mut term = term_at(n, coeff);
    loop {
        sum += term;
        abs_sum += term.norm();
        coeff *= ratio(n);
        n += 1;
        let next = term_at(n, coeff);
        let next_mag = next.norm();
        let converged = n >= opts.min_terms
            && next_mag < term.norm()
            && next_mag < opts.tolerance * sum.norm().max(1.0);
        if converged || n >= opts.max_terms {
            // ratios keep shrinking past this point, so the tail is geometric
            let rho = term_at(n + 1, coeff * ratio(n)).norm() / next_mag.max(f64::MIN_POSITIVE);
            let tail = if rho < 1.0 { next_mag / (1.0 - rho) } else { next_mag };
            let bound = tail + 4.0 * (n as f64 + 1.0) * f64::EPSILON * abs_sum;
            if converged {
                return Ok(SeriesValue { value: sum, error_bound: bound, terms_used: n });
            }
            return Err(Error::Truncation { best: sum, bound, terms: n });
        }
        term = next;
    }
}

/// Extended-precision kernel for a raw family.
pub(crate) fn raw_kernel(id: &FunctionId) -> Result<Kernel> {
    id.validate()?;
    let p = id.param;
    let nu = Dyadic::from_f64(p);
    Ok(match id.family {
        Family::RawBesselJ => Kernel::new(
            (-p).exp2() / libm::tgamma(p + 1.0),
            nu.clone(),
            Dyadic::from_i64(1),
            nu.add_f64(1.0),
        ),
        Family::RawStruveH if p == -1.5 => {
            // the n = 0 term has 1/Gamma(0) = 0; re-index from n = 1
            let gamma_52 = 0.75 * std::f64::consts::PI.sqrt();
            Kernel::new(
                -(1.5f64).exp2().recip() / gamma_52,
                Dyadic::from_f64(1.5),
                Dyadic::from_f64(2.5),
                Dyadic::from_i64(1),
            )
        }
        Family::RawStruveH => {
            let gamma_32 = 0.5 * std::f64::consts::PI.sqrt();
            Kernel::new(
                (-p - 1.0).exp2() / (gamma_32 * libm::tgamma(p + 1.5)),
                nu.add_f64(1.0),
                Dyadic::from_f64(1.5),
                nu.add_f64(1.5),
            )
        }
        Family::Phi0 | Family::Phi1 => {
            let shift = if id.family == Family::Phi0 { 2.0 } else { 1.0 };
            let a = nu.add_f64(shift).halve();
            let b = nu.add_f64(shift + 1.0).halve();
            Kernel::new(1.0, Dyadic::from_i64(0), a, b)
        }
        other => {
            return Err(Error::domain(format!(
                "{} is not a raw family",
                other.name()
            )))
        }
    })
}

/// Same kernel with the prefactor `C x^p` stripped: an entire function of x
/// with value 1 at the origin and the same positive zeros.
pub(crate) fn reduced_kernel(id: &FunctionId) -> Result<Kernel> {
    let mut k = raw_kernel(id)?;
    if id.family == Family::RawStruveH && id.param == -1.5 {
        return Err(Error::domain("reduced form undefined for H_{-3/2}"));
    }
    k.prefactor = 1.0;
    k.power = Dyadic::from_i64(0);
    Ok(k)
}

fn check_raw_argument(x: f64) -> Result<()> {
    if !(0.0..=MAX_RAW_ARGUMENT).contains(&x) {
        return Err(Error::domain(format!(
            "argument {x} outside [0, {MAX_RAW_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// k-th derivative of `J_nu`, `H_nu`, `phi_0` or `phi_1` at real `x`.
pub fn eval_raw(id: &FunctionId, x: f64, k: u32, opts: &EvalOptions) -> Result<SeriesValue<f64>> {
    let mut v = eval_raw_orders(id, x, &[k], opts)?;
    Ok(v.remove(0))
}

/// Several derivative orders from a single pass over the series.
pub fn eval_raw_orders(
    id: &FunctionId,
    x: f64,
    orders: &[u32],
    opts: &EvalOptions,
) -> Result<Vec<SeriesValue<f64>>> {
    opts.validate()?;
    check_raw_argument(x)?;
    for &k in orders {
        check_order(k)?;
    }
    raw_kernel(id)?.evaluate(x, orders, opts)
}

/// Dini function `(2-nu) J_nu(x) + x J_nu'(x)`, evaluated as `2 J_nu(x) - x J_{nu+1}(x)`.
pub fn dini_value(nu: f64, x: f64, opts: &EvalOptions) -> Result<SeriesValue<f64>> {
    if !(nu > -1.0) {
        return Err(Error::domain(format!("Dini function needs nu > -1, got {nu}")));
    }
    let j0 = eval_raw(&FunctionId::new(Family::RawBesselJ, nu), x, 0, opts)?;
    let j1 = eval_raw(&FunctionId::new(Family::RawBesselJ, nu + 1.0), x, 0, opts)?;
    Ok(SeriesValue {
        value: 2.0 * j0.value - x * j1.value,
        error_bound: 2.0 * j0.error_bound + x * j1.error_bound,
        terms_used: j0.terms_used.max(j1.terms_used),
    })
}

/// `|x^2 J'' + x J' + (x^2 - nu^2) J|` at `x`, a self-consistency diagnostic.
pub fn ode_residual(nu: f64, x: f64, opts: &EvalOptions) -> Result<f64> {
    if !(x > 0.0 && x <= 50.0) {
        return Err(Error::domain(format!("residual check needs 0 < x <= 50, got {x}")));
    }
    let v = eval_raw_orders(&FunctionId::new(Family::RawBesselJ, nu), x, &[0, 1, 2], opts)?;
    Ok((x * x * v[2].value + x * v[1].value + (x * x - nu * nu) * v[0].value).abs())
}
