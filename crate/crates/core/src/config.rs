//! Tolerances shared by the library, the verification suite and the CLI.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative accuracy requested from each evaluation of `rho`.
    pub quadrature_tol: f64,
    /// Allowed gap between the integrated density and its closed-form mass.
    pub mass_tol: f64,
    /// Relative tolerance for the large-`t` ratio test.
    pub asymptote_tol: f64,
    /// Envelope value below which the density is truncated in mass integrals.
    pub tail_threshold: f64,
    /// Allowed gap between the double-integral oracle and `-4 L(a)`.
    pub oracle_tol: f64,
    /// Allowed polygon identity defect.
    pub identity_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature_tol: 1e-7,
            mass_tol: 1e-4,
            asymptote_tol: 0.01,
            tail_threshold: 1e-12,
            oracle_tol: 1e-6,
            identity_tol: 1e-9,
        }
    }
}
