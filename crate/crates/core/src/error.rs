use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// `Usage` covers bad input (parse, range, shape), the rest are numeric.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature tail estimate {estimate:.3e} exceeds tolerance {tolerance:.1e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    #[error("imaginary residue {0:.3e} in a transform of an even spectrum")]
    ImaginaryResidue(f64),

    #[error("ill-conditioned system (condition {condition:.3e}): {context}")]
    Conditioning { condition: f64, context: String },

    #[error("collocation matrix singular to working precision (condition {condition:.3e})")]
    Singular { condition: f64 },

    #[error("degenerate periodized spectrum at xi = {0}")]
    Degenerate(f64),

    #[error("linear algebra failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by caller input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Range(_) | Error::Domain(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::Range(_) => "range",
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::ImaginaryResidue(_) => "imaginary-residue",
            Error::Conditioning { .. } => "conditioning",
            Error::Singular { .. } => "singular",
            Error::Degenerate(_) => "degenerate",
            Error::Numeric(_) => "numeric",
        }
    }
}
