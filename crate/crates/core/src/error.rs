use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the region where the operation is defined.
    #[error("{op}: argument {value} outside domain ({domain})")]
    Domain {
        op: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("rational function has a pole at x = {0}")]
    Pole(f64),

    /// `w` falls strictly between the two critical values of `f`, so the
    /// quadratic for the inverse branches has no real root.
    #[error("no real inverse: w = {w} lies in the gap ({lo}, {hi})")]
    BranchGap { w: f64, lo: f64, hi: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("quadrature did not converge: value {value}, error estimate {estimate} > tolerance {tolerance}")]
    Quadrature { value: f64, estimate: f64, tolerance: f64 },

    /// Two evaluation routes that must agree did not.
    #[error("consistency check failed: {what} differs by {diff:e}")]
    Inconsistent { what: &'static str, diff: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { op, value, domain }
    }
}
