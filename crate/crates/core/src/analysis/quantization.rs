//! Quantized gain and the worst-case quantization error norms.

use nalgebra::DMatrix;

use super::AnalysisError;
use crate::encoding::{quantize_matrix, Sensitivity};
use crate::iohfc::linalg::norm2;

/// `(η_d, η_K)`: bounds on `‖d̄ − d‖` and `‖K̄ − K‖` for a window of length `L`.
pub fn quantization_bounds(q: usize, l: usize, m: usize, length: usize, delta_d: f64, delta_k: f64) -> (f64, f64) {
    let width = ((length + 1) * (q + l) + length * m) as f64;
    let eta_d = width.sqrt() * delta_d / 2.0;
    let eta_k = (width * m as f64).sqrt() * delta_k / 2.0;
    (eta_d, eta_k)
}

/// `K̄ = Q_{Δ_K}(K)` with its error and the matching bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedGain {
    pub k: DMatrix<f64>,
    pub k_bar: DMatrix<f64>,
    pub k_tilde: DMatrix<f64>,
    pub delta_k: f64,
    pub delta_d: f64,
    pub eta_k: f64,
    pub eta_d: f64,
}

impl QuantizedGain {
    /// Quantizes `K` (an `m × ((L+1)(q+ℓ)+Lm)` gain) with plaintext modulus `t`.
    pub fn new(
        k: &DMatrix<f64>,
        length: usize,
        q: usize,
        l: usize,
        delta_k: Sensitivity,
        delta_d: Sensitivity,
        t: u64,
    ) -> Result<Self, AnalysisError> {
        let m = k.nrows();
        if k.ncols() != (length + 1) * (q + l) + length * m {
            return Err(AnalysisError::Shape(format!("gain of width {} for L = {length}", k.ncols())));
        }
        let k_bar = quantize_matrix(k, delta_k, t)?;
        let k_tilde = &k_bar - k;
        let (eta_d, eta_k) = quantization_bounds(q, l, m, length, delta_d.value(), delta_k.value());
        Ok(Self { k: k.clone(), k_bar, k_tilde, delta_k: delta_k.value(), delta_d: delta_d.value(), eta_k, eta_d })
    }

    /// `‖K̃‖₂`.
    pub fn error_norm(&self) -> f64 {
        norm2(&self.k_tilde)
    }
}
