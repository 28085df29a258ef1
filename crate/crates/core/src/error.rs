use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter or argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The series did not meet its tolerance within the term budget.
    #[error("series truncated after {terms} terms: best value {best}, bound {bound:e}")]
    Truncation {
        best: Complex64,
        bound: f64,
        terms: usize,
    },

    #[error("quadrature did not converge: best estimate {estimate}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("found {found} of {wanted} zeros before the scan bound {upper}")]
    ScanExhausted {
        found: usize,
        wanted: usize,
        upper: f64,
    },

    /// A localization or interlacing property failed; usually a missed zero.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("criterion inapplicable: zero #{index} = {zero} is not greater than 1")]
    CriterionInapplicable { index: usize, zero: f64 },

    #[error("near-pole: denominator {0:e} too close to zero")]
    NearPole(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no sign change on bracket ({lo}, {hi})")]
    Bracket { lo: f64, hi: f64 },

    #[error("decision inconclusive with {n} zeros; increase the zero count")]
    InsufficientN { n: usize },

    #[error("all {0} grid points were skipped")]
    Degenerate(usize),

    #[error("invalid document: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag, used in diagnostic output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Truncation { .. } => "truncation",
            Error::Quadrature { .. } => "quadrature",
            Error::ScanExhausted { .. } => "scan_exhausted",
            Error::Consistency(_) => "consistency",
            Error::CriterionInapplicable { .. } => "criterion_inapplicable",
            Error::NearPole(_) => "near_pole",
            Error::Unsupported(_) => "unsupported",
            Error::Bracket { .. } => "bracket",
            Error::InsufficientN { .. } => "insufficient_n",
            Error::Degenerate(_) => "degenerate",
            Error::Invalid(_) => "invalid",
        }
    }
}
