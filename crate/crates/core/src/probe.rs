//! Sampled geometric functionals of the normalized functions on polar grids of
//! the closed unit disk. These corroborate certificates and never replace them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::series::{self, EvalOptions, FunctionId};

pub const DEFAULT_RADII: [f64; 6] = [0.25, 0.5, 0.75, 0.9, 0.99, 1.0];
pub const DEFAULT_ANGLES: usize = 512;
pub const MIN_ANGLES: usize = 64;
pub const MAX_DERIV_INDEX: u32 = 10;
/// Points whose denominator is smaller than this are skipped.
pub const DENOMINATOR_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `Re z f'(z) / f(z)`
    StarlikeRe,
    /// `Re (1 + z f''(z) / f'(z))`
    ConvexRe,
    /// `Re f^(k+1)(z) / f^(k+1)(0)`, the derivative of the normalized k-th
    /// derivative. Heuristic only.
    DerivRe(u32),
}

impl Functional {
    pub fn name(self) -> String {
        match self {
            Functional::StarlikeRe => "starlike_re".into(),
            Functional::ConvexRe => "convex_re".into(),
            Functional::DerivRe(k) => format!("deriv_re({k})"),
        }
    }

    pub fn is_heuristic(self) -> bool {
        matches!(self, Functional::DerivRe(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { radii: DEFAULT_RADII.to_vec(), angles: DEFAULT_ANGLES }
    }
}

impl Grid {
    pub fn boundary(angles: usize) -> Self {
        Grid { radii: vec![1.0], angles }
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::domain("radii must be non-empty and lie in (0, 1]"));
        }
        if self.angles < MIN_ANGLES {
            return Err(Error::domain(format!(
                "at least {MIN_ANGLES} angles are required, got {}",
                self.angles
            )));
        }
        Ok(())
    }

    /// `(r, theta)` pairs, radius-major, `theta_j = 2 pi j / angles`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let step = 2.0 * PI / self.angles as f64;
        self.radii
            .iter()
            .flat_map(|&r| (0..self.angles).map(move |j| (r, j as f64 * step)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub theta: f64,
    /// `None` when the denominator vanished at this point.
    pub re_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub id: FunctionId,
    pub functional: String,
    pub heuristic: bool,
    pub min_value: f64,
    pub argmin: (f64, f64),
    pub argmin_polar: (f64, f64),
    pub grid: (usize, usize),
    pub skipped: usize,
}

/// Value of a functional at one point, or `None` if its denominator is too small.
pub fn functional_at(
    id: &FunctionId,
    functional: Functional,
    z: Complex64,
    opts: &EvalOptions,
) -> Result<Option<f64>> {
    let d = |k: u32, at: Complex64| series::eval_normalized(id, at, k, opts).map(|v| v.value);
    let (num, den) = match functional {
        Functional::StarlikeRe => (z * d(1, z)?, d(0, z)?),
        Functional::ConvexRe => {
            let d1 = d(1, z)?;
            (d1 + z * d(2, z)?, d1)
        }
        Functional::DerivRe(k) => {
            if k > MAX_DERIV_INDEX {
                return Err(Error::domain(format!("k must be <= {MAX_DERIV_INDEX}, got {k}")));
            }
            (d(k + 1, z)?, d(k + 1, Complex64::new(0.0, 0.0))?)
        }
    };
    if den.norm() < DENOMINATOR_FLOOR {
        return Ok(None);
    }
    Ok(Some((num / den).re))
}

/// Functional values over the grid, in [`Grid::points`] order.
pub fn samples(
    id: &FunctionId,
    functional: Functional,
    grid: &Grid,
    exec: Execution,
    opts: &EvalOptions,
) -> Result<Vec<Sample>> {
    id.validate()?;
    if !id.family.is_normalized() {
        return Err(Error::domain(format!("{} is not a normalized family", id.family.name())));
    }
    grid.validate()?;
    if let Functional::DerivRe(k) = functional {
        if k > MAX_DERIV_INDEX {
            return Err(Error::domain(format!("k must be <= {MAX_DERIV_INDEX}, got {k}")));
        }
    }
    par::try_map(&grid.points(), exec, |&(r, theta)| {
        let z = Complex64::from_polar(r, theta);
        Ok(Sample { r, theta, re_value: functional_at(id, functional, z, opts)? })
    })
}

pub fn probe(
    id: &FunctionId,
    functional: Functional,
    grid: &Grid,
    exec: Execution,
    opts: &EvalOptions,
) -> Result<ProbeReport> {
    let all = samples(id, functional, grid, exec, opts)?;
    report_from_samples(id, functional, grid, &all, opts)
}

/// Minimum over already computed samples, re-evaluated at the argmin.
pub fn report_from_samples(
    id: &FunctionId,
    functional: Functional,
    grid: &Grid,
    all: &[Sample],
    opts: &EvalOptions,
) -> Result<ProbeReport> {
    let skipped = all.iter().filter(|s| s.re_value.is_none()).count();
    let best = all
        .iter()
        .filter_map(|s| s.re_value.map(|v| (v, s)))
        .fold(None, |acc: Option<(f64, &Sample)>, (v, s)| match acc {
            Some((m, _)) if m <= v => acc,
            _ => Some((v, s)),
        });
    let (min_value, at) = best.ok_or(Error::Degenerate(all.len()))?;
    let z = Complex64::from_polar(at.r, at.theta);
    let again = functional_at(id, functional, z, opts)?;
    if again != Some(min_value) {
        return Err(Error::Consistency(format!(
            "functional at the argmin re-evaluated to {again:?}, expected {min_value}"
        )));
    }
    Ok(ProbeReport {
        id: *id,
        functional: functional.name(),
        heuristic: functional.is_heuristic(),
        min_value,
        argmin: (z.re, z.im),
        argmin_polar: (at.r, at.theta),
        grid: (grid.radii.len(), grid.angles),
        skipped,
    })
}
