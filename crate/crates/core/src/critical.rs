//! Critical orders of the Bessel criteria, located by bracketed root-finding in `nu`.
//!
//! * `nu_star`: `f_nu(1) = 0`, below which `j_{nu,1} < 1`,
//! * `nu0`: `f_nu'(1) = 0`, the starlikeness threshold,
//! * `nu1`: `3 J_nu(1) + 2 (nu - 2) J_{nu+1}(1) = 0`, the convexity threshold.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criterion::{self, CriterionResult, Decision, Mode, Subject};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::series::{self, EvalOptions, FunctionId};
use crate::zeros::ZeroOptions;

const SCAN_POINTS: usize = 20;
const MAX_ITERATIONS: usize = 400;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const MIN_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalId {
    NuStar,
    Nu0,
    Nu1,
}

impl CriticalId {
    pub const ALL: [CriticalId; 3] = [CriticalId::NuStar, CriticalId::Nu0, CriticalId::Nu1];

    pub fn name(self) -> &'static str {
        match self {
            CriticalId::NuStar => "nu_star",
            CriticalId::Nu0 => "nu0",
            CriticalId::Nu1 => "nu1",
        }
    }

    pub fn parse(s: &str) -> Option<CriticalId> {
        Some(match s {
            "nu_star" => CriticalId::NuStar,
            "nu0" => CriticalId::Nu0,
            "nu1" => CriticalId::Nu1,
            _ => return None,
        })
    }

    /// Initial search interval.
    pub fn bracket(self) -> (f64, f64) {
        match self {
            CriticalId::NuStar => (-0.9, -0.6),
            CriticalId::Nu0 => (-0.7, -0.4),
            CriticalId::Nu1 => (-0.3, 0.0),
        }
    }

    /// The criterion whose verdict switches at this order, if any.
    pub fn mode(self) -> Option<Mode> {
        match self {
            CriticalId::NuStar => None,
            CriticalId::Nu0 => Some(Mode::StarlikeCtc),
            CriticalId::Nu1 => Some(Mode::ConvexAllDerivatives),
        }
    }

    /// Defining function at `nu`.
    pub fn residual(self, nu: f64, opts: &EvalOptions) -> Result<f64> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            CriticalId::NuStar => {
                Ok(series::eval_normalized(&FunctionId::bessel_f(nu), one, 0, opts)?.value.re)
            }
            CriticalId::Nu0 => {
                Ok(series::eval_normalized(&FunctionId::bessel_f(nu), one, 1, opts)?.value.re)
            }
            CriticalId::Nu1 => {
                let (j0, j1) = criterion::bessel_pair_at_one(nu, opts)?;
                Ok(3.0 * j0 + 2.0 * (nu - 2.0) * j1)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    #[default]
    Bisection,
    /// Illinois-weighted secant steps inside the bracket.
    BisectionSecant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalOptions {
    pub tol: f64,
    pub refinement: Refinement,
    pub exec: Execution,
    pub eval: EvalOptions,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            tol: DEFAULT_TOL,
            refinement: Refinement::default(),
            exec: Execution::default(),
            eval: EvalOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalParameter {
    pub id: CriticalId,
    pub value: f64,
    pub residual: f64,
    /// Final bracket around `value`.
    pub bracket: (f64, f64),
    pub tol: f64,
    pub refinement: Refinement,
    pub evaluations: usize,
}

pub fn solve_critical(id: CriticalId, opts: &CriticalOptions) -> Result<CriticalParameter> {
    if !(opts.tol >= MIN_TOL && opts.tol.is_finite()) {
        return Err(Error::domain(format!("tolerance must be >= {MIN_TOL:e}, got {}", opts.tol)));
    }
    let f = |nu: f64| id.residual(nu, &opts.eval);
    let (a, b) = id.bracket();

    // sign scan: exactly one change confirms the root is isolated
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| a + (b - a) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let values = par::try_map(&grid, opts.exec, |&nu| f(nu))?;
    let changes: Vec<usize> = (0..SCAN_POINTS)
        .filter(|&i| values[i].signum() != values[i + 1].signum() || values[i + 1] == 0.0)
        .collect();
    if changes.len() != 1 {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    let i = changes[0];
    let mut lo = (grid[i], values[i]);
    let mut hi = (grid[i + 1], values[i + 1]);
    let mut evaluations = grid.len();

    if hi.1 == 0.0 {
        return finish(id, opts, hi.0, 0.0, (hi.0 - opts.tol, hi.0 + opts.tol), evaluations);
    }

    let mut side = 0i8;
    let mut width_before = [hi.0 - lo.0; 2];
    for iter in 0..MAX_ITERATIONS {
        let width = hi.0 - lo.0;
        if width <= 2.0 * opts.tol {
            break;
        }
        let mid = 0.5 * (lo.0 + hi.0);
        let x = match opts.refinement {
            Refinement::Bisection => mid,
            Refinement::BisectionSecant => {
                // fall back to bisection when two secant steps failed to halve the bracket
                if iter >= 2 && width > 0.5 * width_before[0] {
                    mid
                } else {
                    let (mut fl, mut fh) = (lo.1, hi.1);
                    if side == -1 {
                        fh *= 0.5;
                    } else if side == 1 {
                        fl *= 0.5;
                    }
                    let s = (lo.0 * fh - hi.0 * fl) / (fh - fl);
                    let guard = 0.5 * opts.tol;
                    if s.is_finite() {
                        s.clamp(lo.0 + guard, hi.0 - guard)
                    } else {
                        mid
                    }
                }
            }
        };
        width_before = [width_before[1], width];
        let fx = f(x)?;
        evaluations += 1;
        if fx == 0.0 {
            return finish(id, opts, x, 0.0, (x - opts.tol, x + opts.tol), evaluations);
        }
        if fx.signum() == lo.1.signum() {
            lo = (x, fx);
            side = -1;
        } else {
            hi = (x, fx);
            side = 1;
        }
    }
    if hi.0 - lo.0 > 2.0 * opts.tol {
        return Err(Error::Consistency(format!(
            "{} bracket did not shrink below {}",
            id.name(),
            2.0 * opts.tol
        )));
    }
    let value = 0.5 * (lo.0 + hi.0);
    let residual = f(value)?;
    finish(id, opts, value, residual, (lo.0, hi.0), evaluations + 1)
}

fn finish(
    id: CriticalId,
    opts: &CriticalOptions,
    value: f64,
    residual: f64,
    bracket: (f64, f64),
    evaluations: usize,
) -> Result<CriticalParameter> {
    Ok(CriticalParameter {
        id,
        value,
        residual,
        bracket,
        tol: opts.tol,
        refinement: opts.refinement,
        evaluations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub id: CriticalId,
    pub mode: Mode,
    pub value: f64,
    pub delta: f64,
    pub n: usize,
    pub above: CriterionResult,
    pub below: CriterionResult,
}

/// Certifies at `value + delta` (must hold) and `value - delta` (must fail).
pub fn threshold_consistency(
    id: CriticalId,
    delta: f64,
    n: usize,
    opts: &ZeroOptions,
) -> Result<ThresholdReport> {
    if !(1e-3..=0.2).contains(&delta) {
        return Err(Error::domain(format!("delta must lie in [1e-3, 0.2], got {delta}")));
    }
    let mode = id
        .mode()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a criterion threshold", id.name())))?;
    let crit = solve_critical(
        id,
        &CriticalOptions { exec: opts.exec, eval: opts.eval, ..CriticalOptions::default() },
    )?;
    let above = criterion::certify(Subject::Bessel, crit.value + delta, mode, n, opts)?.criterion;
    let below = criterion::certify(Subject::Bessel, crit.value - delta, mode, n, opts)?.criterion;
    if above.decision == Decision::Inconclusive || below.decision == Decision::Inconclusive {
        return Err(Error::InsufficientN { n });
    }
    if above.decision != Decision::Holds || below.decision != Decision::Fails {
        return Err(Error::Consistency(format!(
            "{} at {}: {} above and {} below",
            id.name(),
            crit.value,
            above.decision.as_str(),
            below.decision.as_str()
        )));
    }
    Ok(ThresholdReport { id, mode, value: crit.value, delta, n, above, below })
}
