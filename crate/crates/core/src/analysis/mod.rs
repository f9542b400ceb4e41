//! Quantization effects on the closed loop: error bounds on the quantized
//! gain and data, a sufficient condition on `Δ_K` for stability, and a
//! worst-case bound on the output deviation.

mod bounds;
mod lyapunov;
mod memory;
mod quantization;

pub use bounds::{delta_k_bound, error_bound, ErrorBoundReport, StabilityCertificate, ThetaForm, M_SEARCH_CAP};
pub use lyapunov::{solve_dlyap, LyapunovForm, DLYAP_TOLERANCE};
pub use memory::{memory_bits, MemoryReport};
pub use quantization::{quantization_bounds, QuantizedGain};

use crate::encoding::EncodingError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("closed loop is not Schur stable (spectral radius {rho})")]
    Unstable { rho: f64 },
    #[error("gamma = {gamma} must lie in ({lower}, 1)")]
    Gamma { gamma: f64, lower: f64 },
    #[error("no index up to {cap} keeps ‖A^k‖ < γ^k for {run} consecutive steps")]
    MSearch { cap: usize, run: usize },
    #[error("Lyapunov residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}
