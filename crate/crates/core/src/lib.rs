//! Numerical verification of the Shah–Trimble close-to-convexity criterion
//! for normalized Bessel, Struve and Lommel functions on the unit disk.
//!
//! The building blocks are layered:
//!
//! * [`series`]: power-series evaluation with truncation bounds,
//! * [`quad`]: integral representations used as independent cross-checks,
//! * [`zeros`]: tables of positive zeros with localization checks,
//! * [`criterion`]: criterion sums with certified tails and certificates,
//! * [`critical`]: the critical orders where the criteria switch,
//! * [`probe`]: sampled geometric functionals on the closed disk,
//! * [`report`]: JSON/CSV output and the command dispatcher behind the CLI.

// `!(a <= b)` is used on purpose so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criterion;
pub mod critical;
pub mod error;
pub mod par;
pub mod probe;
pub mod quad;
pub mod report;
pub mod series;
pub mod zeros;

pub use error::{Error, Result};
pub use par::Execution;
