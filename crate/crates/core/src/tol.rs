//! Numerical tolerances shared by all checks.
//!
//! Spectral tolerances are relative: a check against `psd` accepts a minimum
//! eigenvalue down to `-psd * max(1, ‖M‖_op)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity, relative to the largest entry magnitude.
    pub herm: f64,
    pub psd: f64,
    /// Trace preservation `‖Σ V†V − I‖_op` and unitarity defects.
    pub tp: f64,
    /// Relative eigenvalue cut for Kraus extraction.
    pub rank: f64,
    pub orth: f64,
    pub trace: f64,
    pub span: f64,
    /// Frobenius residual accepted for a conic decomposition.
    pub decomp: f64,
    pub feas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-9,
            tp: 1e-9,
            rank: 1e-9,
            orth: 1e-9,
            trace: 1e-9,
            span: 1e-9,
            decomp: 1e-8,
            feas: 1e-6,
        }
    }
}
