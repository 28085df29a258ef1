//! Positive zeros of `J_nu`, of the Dini function `2 J_nu - x J_{nu+1}`, of
//! `H_nu`, and of the Lommel kernels `phi_0`, `phi_1`.
//!
//! Zeros are bracketed by a sign scan of the prefactor-free series (an entire
//! function equal to 1 or 2 at the origin), refined by bisection and a
//! bracket-safeguarded Newton polish, and then checked against the known
//! localization results for the family.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::series::{self, EvalOptions, Family, FunctionId, Kernel, SeriesValue};

/// Largest table size accepted by the zero finders.
pub const MAX_ZEROS: usize = 500;
/// Width at which bisection hands over to Newton; two halvings of the scan step.
const BISECTION_WIDTH: f64 = PI / 32.0 + 1e-9;
const MAX_NEWTON_STEPS: usize = 8;
const SCAN_BATCH: usize = 32;
/// Largest accepted `|F(zero)|` for zeros that are not refined by bracketing.
const RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFamily {
    /// `j_{nu,n}`, zeros of `J_nu`
    Bessel,
    /// `beta_{nu,n}`, zeros of `(2-nu) J_nu + x J_nu'`
    Dini,
    /// `h_{nu,n}`, zeros of `H_nu`
    Struve,
    /// `xi_{mu,n}`, zeros of `phi_0`
    Phi0,
    /// `zeta_{mu,n}`, zeros of `phi_1`
    Phi1,
}

impl ZeroFamily {
    pub fn name(self) -> &'static str {
        match self {
            ZeroFamily::Bessel => "bessel",
            ZeroFamily::Dini => "dini",
            ZeroFamily::Struve => "struve",
            ZeroFamily::Phi0 => "phi0",
            ZeroFamily::Phi1 => "phi1",
        }
    }

    pub fn parse(s: &str) -> Option<ZeroFamily> {
        Some(match s {
            "bessel" => ZeroFamily::Bessel,
            "dini" => ZeroFamily::Dini,
            "struve" => ZeroFamily::Struve,
            "phi0" => ZeroFamily::Phi0,
            "phi1" => ZeroFamily::Phi1,
            _ => return None,
        })
    }

    pub(crate) fn validate(self, param: f64) -> Result<()> {
        let ok = param.is_finite()
            && match self {
                ZeroFamily::Bessel | ZeroFamily::Dini => param > -1.0,
                ZeroFamily::Struve => param.abs() <= 0.5,
                ZeroFamily::Phi0 | ZeroFamily::Phi1 => param > 0.0 && param < 1.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{} zeros: parameter {param} outside the supported domain",
                self.name()
            )))
        }
    }

    fn scan_upper(self, n: usize) -> f64 {
        match self {
            ZeroFamily::Phi0 | ZeroFamily::Phi1 => (n as f64 + 2.0) * PI,
            _ => (n as f64 + 2.0) * PI + 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub family: ZeroFamily,
    pub param: f64,
    /// Positive zeros listed with multiplicity. Strictly increasing except
    /// for `H_{1/2}`, whose zeros are all double.
    pub zeros: Vec<f64>,
    pub refine_tol: f64,
}

impl ZeroTable {
    pub fn count(&self) -> usize {
        self.zeros.len()
    }

    /// The first `n` zeros as a table of their own.
    pub fn prefix(&self, n: usize) -> ZeroTable {
        ZeroTable {
            zeros: self.zeros[..n.min(self.zeros.len())].to_vec(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroOptions {
    /// Newton acceptance threshold on the step size.
    pub tol: f64,
    pub scan_step: f64,
    pub exec: Execution,
    pub eval: EvalOptions,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        ZeroOptions {
            tol: 1e-12,
            scan_step: PI / 8.0,
            exec: Execution::default(),
            eval: EvalOptions::default(),
        }
    }
}

/// The defining function `F` of a zero family at `x`.
pub fn function_value(
    family: ZeroFamily,
    param: f64,
    x: f64,
    opts: &EvalOptions,
) -> Result<SeriesValue<f64>> {
    Ok(function_value_slope(family, param, x, opts)?.0)
}

/// `F(x)` and `F'(x)` for a zero family.
pub fn function_value_slope(
    family: ZeroFamily,
    param: f64,
    x: f64,
    opts: &EvalOptions,
) -> Result<(SeriesValue<f64>, f64)> {
    let raw = |fam: Family, p: f64| -> Result<(SeriesValue<f64>, f64)> {
        let v = series::eval_raw_orders(&FunctionId::new(fam, p), x, &[0, 1], opts)?;
        Ok((v[0], v[1].value))
    };
    match family {
        ZeroFamily::Bessel => raw(Family::RawBesselJ, param),
        ZeroFamily::Struve => raw(Family::RawStruveH, param),
        ZeroFamily::Phi0 => raw(Family::Phi0, param),
        ZeroFamily::Phi1 => raw(Family::Phi1, param),
        ZeroFamily::Dini => {
            let value = series::dini_value(param, x, opts)?;
            let (_, dj0) = raw(Family::RawBesselJ, param)?;
            let (j1, dj1) = raw(Family::RawBesselJ, param + 1.0)?;
            Ok((value, 2.0 * dj0 - j1.value - x * dj1))
        }
    }
}

/// Prefactor-free form of the defining function, positive at the origin.
enum Target {
    Single(Kernel),
    /// `2 S_nu(x) - x^2/(2(nu+1)) S_{nu+1}(x)`, the Dini function over `C x^nu`.
    Dini { s0: Kernel, s1: Kernel, nu: f64 },
}

impl Target {
    fn new(family: ZeroFamily, param: f64) -> Result<Self> {
        let k = |fam: Family, p: f64| series::reduced_kernel(&FunctionId::new(fam, p));
        Ok(match family {
            ZeroFamily::Bessel => Target::Single(k(Family::RawBesselJ, param)?),
            ZeroFamily::Struve => Target::Single(k(Family::RawStruveH, param)?),
            ZeroFamily::Phi0 => Target::Single(k(Family::Phi0, param)?),
            ZeroFamily::Phi1 => Target::Single(k(Family::Phi1, param)?),
            ZeroFamily::Dini => Target::Dini {
                s0: k(Family::RawBesselJ, param)?,
                s1: k(Family::RawBesselJ, param + 1.0)?,
                nu: param,
            },
        })
    }

    fn eval(&self, x: f64, with_slope: bool, opts: &EvalOptions) -> Result<(f64, f64)> {
        let orders: &[u32] = if with_slope { &[0, 1] } else { &[0] };
        let get = |v: &[SeriesValue<f64>], i: usize| v.get(i).map_or(0.0, |s| s.value);
        match self {
            Target::Single(kernel) => {
                let v = kernel.evaluate(x, orders, opts)?;
                Ok((get(&v, 0), get(&v, 1)))
            }
            Target::Dini { s0, s1, nu } => {
                let a = s0.evaluate(x, orders, opts)?;
                let b = s1.evaluate(x, orders, opts)?;
                let c = 0.5 / (nu + 1.0);
                let value = 2.0 * get(&a, 0) - c * x * x * get(&b, 0);
                let slope = 2.0 * get(&a, 1) - 2.0 * c * x * get(&b, 0) - c * x * x * get(&b, 1);
                Ok((value, slope))
            }
        }
    }

    fn value(&self, x: f64, opts: &EvalOptions) -> Result<f64> {
        Ok(self.eval(x, false, opts)?.0)
    }
}

#[derive(Clone, Copy, Debug)]
struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

/// Sign-change brackets in `(0, upper]`, stopping after `wanted` of them.
fn scan(
    target: &Target,
    wanted: usize,
    upper: f64,
    opts: &ZeroOptions,
) -> Result<Vec<Bracket>> {
    let mut brackets = Vec::with_capacity(wanted);
    let mut prev_x = 0.0;
    let mut prev_f = target.value(0.0, &opts.eval)?;
    let mut i = 1usize;
    while brackets.len() < wanted {
        let points: Vec<f64> = (i..i + SCAN_BATCH)
            .map(|j| j as f64 * opts.scan_step)
            .take_while(|&x| x <= upper)
            .collect();
        if points.is_empty() {
            return Err(Error::ScanExhausted { found: brackets.len(), wanted, upper });
        }
        i += points.len();
        let values = par::try_map(&points, opts.exec, |&x| target.value(x, &opts.eval))?;
        for (&x, &f) in points.iter().zip(&values) {
            if f == 0.0 {
                brackets.push(Bracket { lo: x, hi: x, f_lo: 0.0, f_hi: 0.0 });
                prev_f = -prev_f;
            } else if f.signum() != prev_f.signum() {
                brackets.push(Bracket { lo: prev_x, hi: x, f_lo: prev_f, f_hi: f });
                prev_f = f;
            } else {
                prev_f = f;
            }
            prev_x = x;
            if brackets.len() == wanted {
                break;
            }
        }
    }
    Ok(brackets)
}

fn refine(target: &Target, br: Bracket, opts: &ZeroOptions) -> Result<f64> {
    if br.lo == br.hi {
        return Ok(br.lo);
    }
    let (mut lo, mut hi) = ((br.lo, br.f_lo), (br.hi, br.f_hi));
    let lo_sign = br.f_lo.signum();
    let update = |x: f64, f: f64, lo: &mut (f64, f64), hi: &mut (f64, f64)| {
        if f.signum() == lo_sign {
            *lo = (x, f);
        } else {
            *hi = (x, f);
        }
    };

    while hi.0 - lo.0 > BISECTION_WIDTH {
        let mid = 0.5 * (lo.0 + hi.0);
        let f = target.value(mid, &opts.eval)?;
        if f == 0.0 {
            return Ok(mid);
        }
        update(mid, f, &mut lo, &mut hi);
    }

    // Newton from the regula falsi point of the final bracket
    let mut x = (lo.0 * hi.1 - hi.0 * lo.1) / (hi.1 - lo.1);
    if !(x > lo.0 && x < hi.0) {
        x = 0.5 * (lo.0 + hi.0);
    }
    for _ in 0..MAX_NEWTON_STEPS {
        let (f, df) = target.eval(x, true, &opts.eval)?;
        if f == 0.0 {
            return Ok(x);
        }
        update(x, f, &mut lo, &mut hi);
        let step = f / df;
        let next = x - step;
        if step.abs() < opts.tol && next >= lo.0 && next <= hi.0 {
            return Ok(next);
        }
        if !next.is_finite() || next <= lo.0 || next >= hi.0 {
            break;
        }
        x = next;
    }

    // Newton left the bracket or stalled
    while hi.0 - lo.0 > opts.tol {
        let mid = 0.5 * (lo.0 + hi.0);
        let f = target.value(mid, &opts.eval)?;
        if f == 0.0 {
            return Ok(mid);
        }
        update(mid, f, &mut lo, &mut hi);
    }
    Ok(0.5 * (lo.0 + hi.0))
}

fn compute(family: ZeroFamily, param: f64, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    family.validate(param)?;
    if n == 0 || n > MAX_ZEROS {
        return Err(Error::domain(format!("zero count must be in 1..={MAX_ZEROS}, got {n}")));
    }
    if !(opts.tol > 0.0 && opts.scan_step > 0.0) {
        return Err(Error::domain("tolerance and scan step must be positive"));
    }
    let target = Target::new(family, param)?;
    let brackets = scan(&target, n, family.scan_upper(n), opts)?;
    let zeros = par::try_map(&brackets, opts.exec, |br| refine(&target, *br, opts))?;
    if zeros[0] <= 0.0 || zeros.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Consistency(format!(
            "{} zeros at {param} are not strictly increasing and positive",
            family.name()
        )));
    }
    Ok(ZeroTable { family, param, zeros, refine_tol: opts.tol })
}

/// First `n` positive zeros `j_{nu,k}` of `J_nu`.
pub fn bessel_zeros(nu: f64, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    compute(ZeroFamily::Bessel, nu, n, opts)
}

/// First `n` positive zeros `beta_{nu,k}` of the Dini function.
pub fn dini_zeros(nu: f64, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    compute(ZeroFamily::Dini, nu, n, opts)
}

/// First `n` positive zeros `h_{nu,k}` of `H_nu`, `|nu| <= 1/2`, checked for
/// interlacing with the zeros of `J_nu`.
///
/// `H_{1/2}(x) = sqrt(2/(pi x)) (1 - cos x)` has double zeros at `2 pi k`
/// that a sign scan cannot see; that table is built from those points and
/// checked against the series instead.
pub fn struve_zeros(nu: f64, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    if nu == 0.5 {
        return struve_half_zeros(n, opts);
    }
    let table = compute(ZeroFamily::Struve, nu, n, opts)?;
    let bessel = bessel_zeros(nu, n + 1, opts)?;
    check_steinig_interlacing(&table, &bessel)?;
    Ok(table)
}

fn struve_half_zeros(n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    if n == 0 || n > MAX_ZEROS {
        return Err(Error::domain(format!("zero count must be in 1..={MAX_ZEROS}, got {n}")));
    }
    let zeros: Vec<f64> = (0..n).map(|i| 2.0 * PI * (i / 2 + 1) as f64).collect();
    let target = Target::new(ZeroFamily::Struve, 0.5)?;
    let distinct: Vec<f64> = zeros.iter().step_by(2).copied().collect();
    let checks = par::try_map(&distinct, opts.exec, |&x| {
        let (f, df) = target.eval(x, true, &opts.eval)?;
        // both the value and the slope vanish at a double zero
        Ok((x, f.abs().max(df.abs())))
    })?;
    if let Some((x, r)) = checks.iter().find(|(_, r)| !(*r <= RESIDUAL_LIMIT)) {
        return Err(Error::Consistency(format!("H_1/2 does not have a double zero at {x} ({r:e})")));
    }
    Ok(ZeroTable { family: ZeroFamily::Struve, param: 0.5, zeros, refine_tol: opts.tol })
}

/// One zero of `J_nu` below `h_1` and exactly one between consecutive Struve zeros.
pub fn check_steinig_interlacing(struve: &ZeroTable, bessel: &ZeroTable) -> Result<()> {
    let h = &struve.zeros;
    let j = &bessel.zeros;
    if j.len() <= h.len() {
        return Err(Error::domain("interlacing check needs one more Bessel zero than Struve zeros"));
    }
    for (i, &hi) in h.iter().enumerate() {
        let below = if i == 0 { 0.0 } else { h[i - 1] };
        if !(j[i] > below && j[i] < hi) {
            return Err(Error::Consistency(format!(
                "interlacing: j_{} = {} not in ({below}, {hi})",
                i + 1,
                j[i]
            )));
        }
    }
    let last = *h.last().expect("non-empty table");
    if j[h.len()] <= last {
        return Err(Error::Consistency(format!(
            "interlacing: j_{} = {} does not exceed h_{} = {last}",
            h.len() + 1,
            j[h.len()],
            h.len()
        )));
    }
    Ok(())
}

/// First `n` positive zeros of `phi_k`, `k in {0,1}`, `mu in (0,1)`.
///
/// `phi_0` zeros satisfy `xi_n in (n pi, (n+1) pi)`; `phi_1` zeros satisfy
/// `zeta_1 > pi/2` and `zeta_{n+1} in ((2n+1) pi/2, (2n+3) pi/2)` for `n >= 1`.
pub fn lommel_zeros(mu: f64, k: u32, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    let family = match k {
        0 => ZeroFamily::Phi0,
        1 => ZeroFamily::Phi1,
        _ => return Err(Error::domain(format!("Lommel kernel index must be 0 or 1, got {k}"))),
    };
    let table = compute(family, mu, n, opts)?;
    check_lommel_localization(&table)?;
    Ok(table)
}

pub fn check_lommel_localization(table: &ZeroTable) -> Result<()> {
    for (i, &z) in table.zeros.iter().enumerate() {
        let (lo, hi) = match table.family {
            ZeroFamily::Phi0 => ((i + 1) as f64 * PI, (i + 2) as f64 * PI),
            ZeroFamily::Phi1 if i == 0 => (0.5 * PI, f64::INFINITY),
            ZeroFamily::Phi1 => ((2 * i + 1) as f64 * 0.5 * PI, (2 * i + 3) as f64 * 0.5 * PI),
            _ => return Ok(()),
        };
        if !(z > lo && z < hi) {
            return Err(Error::Consistency(format!(
                "{} zero #{} = {z} outside ({lo}, {hi})",
                table.family.name(),
                i + 1
            )));
        }
    }
    Ok(())
}

/// Zero table for any family; Struve and Lommel tables carry their checks.
pub fn zeros(family: ZeroFamily, param: f64, n: usize, opts: &ZeroOptions) -> Result<ZeroTable> {
    match family {
        ZeroFamily::Bessel => bessel_zeros(param, n, opts),
        ZeroFamily::Dini => dini_zeros(param, n, opts),
        ZeroFamily::Struve => struve_zeros(param, n, opts),
        ZeroFamily::Phi0 => lommel_zeros(param, 0, n, opts),
        ZeroFamily::Phi1 => lommel_zeros(param, 1, n, opts),
    }
}

/// Number of sign changes of the defining function on `(0, upper]` at the scan step.
pub fn count_sign_changes(
    family: ZeroFamily,
    param: f64,
    upper: f64,
    opts: &ZeroOptions,
) -> Result<usize> {
    family.validate(param)?;
    let target = Target::new(family, param)?;
    let steps = (upper / opts.scan_step).floor() as usize;
    let mut points: Vec<f64> = (1..=steps).map(|j| j as f64 * opts.scan_step).collect();
    if points.last().is_none_or(|&x| x < upper) {
        points.push(upper);
    }
    let values = par::try_map(&points, opts.exec, |&x| target.value(x, &opts.eval))?;
    let mut prev = target.value(0.0, &opts.eval)?;
    let mut changes = 0;
    for f in values {
        if f != 0.0 && f.signum() != prev.signum() {
            changes += 1;
        }
        if f != 0.0 {
            prev = f;
        }
    }
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ZeroOptions {
        ZeroOptions::default()
    }

    #[test]
    fn j0_first_zero() {
        let t = bessel_zeros(0.0, 1, &opts()).unwrap();
        assert!((t.zeros[0] - 2.404_825_557_695_773).abs() < 1e-9);
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let t = bessel_zeros(0.5, 3, &opts()).unwrap();
        for (i, z) in t.zeros.iter().enumerate() {
            assert!((z - (i + 1) as f64 * PI).abs() < 1e-9);
        }
        let t = struve_zeros(-0.5, 3, &opts()).unwrap();
        for (i, z) in t.zeros.iter().enumerate() {
            assert!((z - (i + 1) as f64 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let o = opts();
        assert!(matches!(bessel_zeros(-1.0, 3, &o), Err(Error::Domain(_))));
        assert!(matches!(bessel_zeros(0.0, 0, &o), Err(Error::Domain(_))));
        assert!(matches!(bessel_zeros(0.0, 501, &o), Err(Error::Domain(_))));
        assert!(matches!(struve_zeros(0.6, 3, &o), Err(Error::Domain(_))));
        assert!(matches!(lommel_zeros(0.0, 0, 3, &o), Err(Error::Domain(_))));
        assert!(matches!(lommel_zeros(-0.5, 1, 3, &o), Err(Error::Domain(_))));
        assert!(matches!(lommel_zeros(0.5, 2, 3, &o), Err(Error::Domain(_))));
    }

    #[test]
    fn scan_exhausted_when_step_too_coarse_range() {
        // a tiny scan range cannot hold five zeros
        let t = Target::new(ZeroFamily::Bessel, 0.0).unwrap();
        let err = scan(&t, 5, 4.0, &opts()).unwrap_err();
        assert!(matches!(err, Error::ScanExhausted { found: 1, wanted: 5, .. }));
    }

    #[test]
    fn interlacing_detects_missing_zero() {
        let h = ZeroTable {
            family: ZeroFamily::Struve,
            param: 0.0,
            zeros: vec![3.0, 9.0],
            refine_tol: 1e-12,
        };
        let j = ZeroTable {
            family: ZeroFamily::Bessel,
            param: 0.0,
            zeros: vec![2.4, 5.5, 6.0],
            refine_tol: 1e-12,
        };
        assert!(matches!(check_steinig_interlacing(&h, &j), Err(Error::Consistency(_))));
    }

    #[test]
    fn localization_violation_detected() {
        let t = ZeroTable {
            family: ZeroFamily::Phi0,
            param: 0.5,
            zeros: vec![3.5, 5.0],
            refine_tol: 1e-12,
        };
        assert!(matches!(check_lommel_localization(&t), Err(Error::Consistency(_))));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut o = opts();
        o.exec = Execution::Sequential;
        let a = dini_zeros(0.3, 8, &o).unwrap();
        o.exec = Execution::Parallel;
        let b = dini_zeros(0.3, 8, &o).unwrap();
        assert_eq!(a, b);
    }
}
