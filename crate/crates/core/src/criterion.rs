//! Criterion sums `sum 1/(z_n^2 - 1)` over the positive zeros of a normalized
//! function (starlikeness) or of its derivative (convexity).
//!
//! A table of N zeros gives the partial sum. The remaining tail is bounded by
//! the closed-form Rayleigh sum `sum 1/z_n^2`: every omitted term satisfies
//! `1/(z^2-1) <= C/z^2` with `C = z_N^2/(z_N^2-1)`, so the tail is at most
//! `C (rayleigh - sum_{n<=N} 1/z_n^2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Quadrature, DEFAULT_QUAD_TOL};
use crate::report::{de_f64, de_opt_f64};
use crate::series::{self, EvalOptions, Family, FunctionId};
use crate::zeros::{self, ZeroFamily, ZeroOptions, ZeroTable};

/// Smallest table accepted by [`st_sum`].
pub const MIN_TABLE: usize = 5;
/// Zero count used by [`certify`] callers that have no preference.
pub const DEFAULT_ZERO_COUNT: usize = 100;
/// Denominators below this magnitude are reported as near-pole.
pub const POLE_GUARD: f64 = 1e-12;
/// Resolution of a sum read back from a 12-significant-digit document.
const DOCUMENT_RESOLUTION: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Holds,
    Fails,
    Inconclusive,
}

impl Decision {
    pub fn from_sums(partial_sum: f64, tail_bound: f64) -> Decision {
        if partial_sum + tail_bound <= 1.0 {
            Decision::Holds
        } else if partial_sum > 1.0 {
            Decision::Fails
        } else {
            Decision::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Holds => "holds",
            Decision::Fails => "fails",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    #[serde(deserialize_with = "de_f64")]
    pub partial_sum: f64,
    #[serde(deserialize_with = "de_f64")]
    pub tail_bound: f64,
    pub n_used: usize,
    pub decision: Decision,
}

impl CriterionResult {
    pub fn new(partial_sum: f64, tail_bound: f64, n_used: usize) -> Self {
        CriterionResult {
            partial_sum,
            tail_bound,
            n_used,
            decision: Decision::from_sums(partial_sum, tail_bound),
        }
    }

    /// The decision matches the sums exactly.
    pub fn validate(&self) -> Result<()> {
        self.validate_within(0.0)
    }

    /// Like [`validate`](Self::validate), but sums within `resolution` of a
    /// threshold may carry either adjacent decision.
    pub fn validate_within(&self, resolution: f64) -> Result<()> {
        let (p, t) = (self.partial_sum, self.tail_bound);
        if !(p.is_finite() && t.is_finite() && t >= 0.0) {
            return Err(Error::Invalid(format!("sums must be finite with tail >= 0, got {p}, {t}")));
        }
        let expected = Decision::from_sums(p, t);
        if expected == self.decision {
            return Ok(());
        }
        let near = |v: f64| (v - 1.0).abs() <= resolution;
        let ambiguous = match (expected, self.decision) {
            (Decision::Holds, Decision::Inconclusive) | (Decision::Inconclusive, Decision::Holds) => {
                near(p + t)
            }
            (Decision::Fails, Decision::Inconclusive) | (Decision::Inconclusive, Decision::Fails) => {
                near(p)
            }
            _ => false,
        };
        if ambiguous {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "decision {} does not match partial sum {p} and tail bound {t}",
                self.decision.as_str()
            )))
        }
    }
}

/// `sum_n 1/z_n^2` over the positive zeros of a family, read off the first
/// two coefficients of its product expansion.
pub fn rayleigh_sum(family: ZeroFamily, param: f64) -> Result<f64> {
    family.validate(param)?;
    Ok(match family {
        ZeroFamily::Bessel => 1.0 / (4.0 * (param + 1.0)),
        ZeroFamily::Dini => 1.0 / (2.0 * (param + 1.0)),
        ZeroFamily::Struve => 1.0 / (3.0 * (2.0 * param + 3.0)),
        ZeroFamily::Phi0 => 1.0 / ((param + 2.0) * (param + 3.0)),
        ZeroFamily::Phi1 => 1.0 / ((param + 1.0) * (param + 2.0)),
    })
}

/// Partial criterion sum over a zero table with a certified tail bound.
pub fn st_sum(table: &ZeroTable) -> Result<CriterionResult> {
    let n = table.count();
    if n < MIN_TABLE {
        return Err(Error::domain(format!("criterion needs at least {MIN_TABLE} zeros, got {n}")));
    }
    if let Some((i, &z)) = table.zeros.iter().enumerate().find(|(_, &z)| !(z > 1.0)) {
        return Err(Error::CriterionInapplicable { index: i + 1, zero: z });
    }
    let rayleigh = rayleigh_sum(table.family, table.param)?;

    let mut partial = 0.0;
    let mut inv_sq = 0.0;
    let mut sensitivity = 0.0;
    for &z in &table.zeros {
        let d = (z - 1.0) * (z + 1.0);
        partial += 1.0 / d;
        inv_sq += 1.0 / (z * z);
        sensitivity += 2.0 * z / (d * d);
    }
    let zn = table.zeros[n - 1];
    let c = zn * zn / ((zn - 1.0) * (zn + 1.0));
    // rounding in both running sums plus the refinement error of each zero
    let slack = 4.0 * (n as f64 + 2.0) * f64::EPSILON * (partial + rayleigh)
        + table.refine_tol * sensitivity * (1.0 + c);
    let tail = c * (rayleigh - inv_sq).max(0.0) + slack;
    Ok(CriterionResult::new(partial, tail, n))
}

/// `1 - g'(1)/g(1)` for a normalized function `g`; by the product expansion this
/// equals `sum 1/(z_n^2 - 1)` over its zeros.
pub fn log_derivative_sum(id: &FunctionId, opts: &EvalOptions) -> Result<f64> {
    if !id.family.is_normalized() {
        return Err(Error::domain(format!("{} is not a normalized family", id.family.name())));
    }
    let one = Complex64::new(1.0, 0.0);
    let g = series::eval_normalized(id, one, 0, opts)?.value.re;
    if g.abs() < POLE_GUARD {
        return Err(Error::NearPole(g));
    }
    let dg = series::eval_normalized(id, one, 1, opts)?.value.re;
    Ok(1.0 - dg / g)
}

/// `1 - f_nu'(1)/f_nu(1)`, the sum over the Bessel zeros.
pub fn bessel_sum_closed_form(nu: f64, opts: &EvalOptions) -> Result<f64> {
    log_derivative_sum(&FunctionId::bessel_f(nu), opts)
}

pub fn struve_sum_closed_form(nu: f64, opts: &EvalOptions) -> Result<f64> {
    log_derivative_sum(&FunctionId::struve_h(nu), opts)
}

pub fn lommel_sum_closed_form(mu: f64, opts: &EvalOptions) -> Result<f64> {
    log_derivative_sum(&FunctionId::lommel_l(mu), opts)
}

/// Sum over the Dini zeros: `(J_nu(1) + 2(1-nu) J_{nu+1}(1)) / (2 (2 J_nu(1) - J_{nu+1}(1)))`.
pub fn dini_sum_closed_form(nu: f64, opts: &EvalOptions) -> Result<f64> {
    let (j0, j1) = bessel_pair_at_one(nu, opts)?;
    let den = 2.0 * j0 - j1;
    if den.abs() < POLE_GUARD {
        return Err(Error::NearPole(den));
    }
    Ok(0.5 * (j0 + 2.0 * (1.0 - nu) * j1) / den)
}

/// `(J_nu(1), J_{nu+1}(1))`.
pub fn bessel_pair_at_one(nu: f64, opts: &EvalOptions) -> Result<(f64, f64)> {
    let j = |p: f64| series::eval_raw(&FunctionId::new(Family::RawBesselJ, p), 1.0, 0, opts);
    Ok((j(nu)?.value, j(nu + 1.0)?.value))
}

/// `(1 - 2 nu) H_nu(1) + H_{nu-1}(1)` for `nu >= -1/2`.
pub fn struve_bracket(nu: f64, opts: &EvalOptions) -> Result<f64> {
    if !(nu >= -0.5) {
        return Err(Error::domain(format!("bracket needs nu >= -1/2, got {nu}")));
    }
    let h = |p: f64| series::eval_raw(&FunctionId::new(Family::RawStruveH, p), 1.0, 0, opts);
    Ok((1.0 - 2.0 * nu) * h(nu)?.value + h(nu - 1.0)?.value)
}

/// `h_nu'(1) = sqrt(pi) 2^(nu-1) Gamma(nu + 3/2) ((1 - 2 nu) H_nu(1) + H_{nu-1}(1))`.
pub fn struve_h_prime_at_one(nu: f64, opts: &EvalOptions) -> Result<f64> {
    let k = PI.sqrt() * (nu - 1.0).exp2() * libm::tgamma(nu + 1.5);
    Ok(k * struve_bracket(nu, opts)?)
}

/// `2 cos t - t sin t`, decreasing on `[0, 1]`.
pub fn lommel_shifted_kernel(t: f64) -> f64 {
    2.0 * t.cos() - t * t.sin()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LommelPositivity {
    /// `2 l_mu'(1) = mu (mu+1) int (1-t)^(mu-1) (cos t + (1-mu) sin t) dt`
    pub two_l_prime: Quadrature,
    /// `2 l_{mu-1}'(1) = mu int (1-t)^(mu-1) (2 cos t - t sin t) dt`
    pub two_l_prime_shifted: Quadrature,
}

pub fn lommel_positivity(mu: f64) -> Result<LommelPositivity> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("mu must lie in (0,1), got {mu}")));
    }
    let scale = |q: Quadrature, s: f64| Quadrature {
        value: q.value * s,
        error_estimate: q.error_estimate * s,
    };
    let a = quad::lommel_weighted(mu, |t| t.cos() + (1.0 - mu) * t.sin(), DEFAULT_QUAD_TOL)?;
    let b = quad::lommel_weighted(mu, lommel_shifted_kernel, DEFAULT_QUAD_TOL)?;
    Ok(LommelPositivity {
        two_l_prime: scale(a, mu * (mu + 1.0)),
        two_l_prime_shifted: scale(b, mu),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Bessel,
    Struve,
    Lommel,
}

impl Subject {
    pub fn name(self) -> &'static str {
        match self {
            Subject::Bessel => "bessel",
            Subject::Struve => "struve",
            Subject::Lommel => "lommel",
        }
    }

    pub fn parse(s: &str) -> Option<Subject> {
        Some(match s {
            "bessel" => Subject::Bessel,
            "struve" => Subject::Struve,
            "lommel" => Subject::Lommel,
            _ => return None,
        })
    }

    pub fn normalized(self, param: f64) -> FunctionId {
        match self {
            Subject::Bessel => FunctionId::bessel_f(param),
            Subject::Struve => FunctionId::struve_h(param),
            Subject::Lommel => FunctionId::lommel_l(param),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Starlike with every derivative close-to-convex; zeros of the function.
    StarlikeCtc,
    /// Convex with every derivative close-to-convex; zeros of the derivative.
    ConvexAllDerivatives,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::StarlikeCtc => "starlike_ctc",
            Mode::ConvexAllDerivatives => "convex_all_derivatives",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "starlike_ctc" => Mode::StarlikeCtc,
            "convex_all_derivatives" => Mode::ConvexAllDerivatives,
            _ => return None,
        })
    }
}

/// Which zero table decides `(subject, mode)` at `param`.
///
/// `l_mu` with `mu in (-1, 0)` is `z phi_1(sqrt z)` at `mu + 1`.
pub fn zero_source(subject: Subject, mode: Mode, param: f64) -> Result<(ZeroFamily, f64)> {
    match (subject, mode) {
        (Subject::Bessel, Mode::StarlikeCtc) => Ok((ZeroFamily::Bessel, param)),
        (Subject::Bessel, Mode::ConvexAllDerivatives) => Ok((ZeroFamily::Dini, param)),
        (Subject::Struve, Mode::StarlikeCtc) => Ok((ZeroFamily::Struve, param)),
        (Subject::Lommel, Mode::StarlikeCtc) => {
            if param > 0.0 && param < 1.0 {
                Ok((ZeroFamily::Phi0, param))
            } else if param > -1.0 && param < 0.0 {
                Ok((ZeroFamily::Phi1, param + 1.0))
            } else {
                Err(Error::domain(format!("Lommel parameter must lie in (-1,0) or (0,1), got {param}")))
            }
        }
        (s, m) => Err(Error::Unsupported(format!(
            "{} certification is not available for {}",
            m.name(),
            s.name()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroProvenance {
    pub family: ZeroFamily,
    #[serde(deserialize_with = "de_f64")]
    pub param: f64,
    pub count: usize,
    #[serde(deserialize_with = "de_f64")]
    pub refine_tol: f64,
    #[serde(deserialize_with = "de_f64")]
    pub first: f64,
    #[serde(deserialize_with = "de_f64")]
    pub last: f64,
}

impl ZeroProvenance {
    fn of(table: &ZeroTable) -> Self {
        ZeroProvenance {
            family: table.family,
            param: table.param,
            count: table.count(),
            refine_tol: table.refine_tol,
            first: table.zeros[0],
            last: table.zeros[table.count() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub subject: Subject,
    #[serde(deserialize_with = "de_f64")]
    pub param: f64,
    pub mode: Mode,
    pub zeros: ZeroProvenance,
    pub criterion: CriterionResult,
    /// The same sum from the closed form, when it is defined.
    #[serde(deserialize_with = "de_opt_f64")]
    pub closed_form: Option<f64>,
    pub decision: Decision,
}

impl Certificate {
    pub fn validate(&self) -> Result<()> {
        self.check(0.0)
    }

    fn check(&self, resolution: f64) -> Result<()> {
        self.criterion.validate_within(resolution)?;
        if self.decision != self.criterion.decision {
            return Err(Error::Invalid("certificate decision differs from its criterion".into()));
        }
        if self.criterion.n_used != self.zeros.count {
            return Err(Error::Invalid("criterion size differs from the zero table".into()));
        }
        let (family, _) = zero_source(self.subject, self.mode, self.param)?;
        if family != self.zeros.family {
            return Err(Error::Invalid(format!(
                "{} zeros cannot certify {} {}",
                self.zeros.family.name(),
                self.subject.name(),
                self.mode.name()
            )));
        }
        Ok(())
    }

    /// Parses a certificate (plain or with decimal-string floats) and checks it.
    pub fn from_json(text: &str) -> Result<Certificate> {
        let cert: Certificate =
            serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        cert.check(DOCUMENT_RESOLUTION)?;
        Ok(cert)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Certificate> {
        let cert: Certificate =
            serde_json::from_value(value).map_err(|e| Error::Invalid(e.to_string()))?;
        cert.check(DOCUMENT_RESOLUTION)?;
        Ok(cert)
    }
}

/// Certifies `(subject, mode)` at `param` from `n` freshly computed zeros.
pub fn certify(
    subject: Subject,
    param: f64,
    mode: Mode,
    n: usize,
    opts: &ZeroOptions,
) -> Result<Certificate> {
    let (family, zparam) = zero_source(subject, mode, param)?;
    let table = zeros::zeros(family, zparam, n, opts)?;
    certify_from_table(subject, param, mode, &table, &opts.eval)
}

/// Certifies from an existing table, which must be the one [`zero_source`] names.
pub fn certify_from_table(
    subject: Subject,
    param: f64,
    mode: Mode,
    table: &ZeroTable,
    eval: &EvalOptions,
) -> Result<Certificate> {
    let (family, zparam) = zero_source(subject, mode, param)?;
    if table.family != family || table.param != zparam {
        return Err(Error::domain(format!(
            "{} {} at {param} needs {} zeros at {zparam}, got {} zeros at {}",
            subject.name(),
            mode.name(),
            family.name(),
            table.family.name(),
            table.param
        )));
    }
    let criterion = st_sum(table)?;
    let closed = match mode {
        Mode::StarlikeCtc => log_derivative_sum(&subject.normalized(param), eval),
        Mode::ConvexAllDerivatives => dini_sum_closed_form(param, eval),
    };
    let closed_form = match closed {
        Ok(v) => Some(v),
        Err(Error::NearPole(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Certificate {
        subject,
        param,
        mode,
        zeros: ZeroProvenance::of(table),
        criterion,
        closed_form,
        decision: criterion.decision,
    })
}
