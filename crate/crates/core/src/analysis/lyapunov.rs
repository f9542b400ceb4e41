//! Discrete Lyapunov equations by squared Smith iteration.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::iohfc::linalg::{norm2, spectral_radius};

/// Largest accepted residual in the induced 2-norm.
pub const DLYAP_TOLERANCE: f64 = 1e-8;

/// Which of the two adjoint equations to solve for a closed-loop matrix `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LyapunovForm {
    /// `AᵀPA − P + Q = 0`.
    #[default]
    Standard,
    /// `APAᵀ − P + Q = 0`.
    Transposed,
}

impl std::str::FromStr for LyapunovForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(Self::Standard),
            "transposed" => Ok(Self::Transposed),
            _ => Err(format!("unknown Lyapunov form '{s}' (expected standard or transposed)")),
        }
    }
}

fn residual(a: &DMatrix<f64>, p: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * p * a - p + q
}

// P = Σ_k (Aᵀ)^k Q A^k, summed 2^j terms at a time
fn smith(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = q.clone();
    let mut ak = a.clone();
    for _ in 0..64 {
        let next = &p + ak.transpose() * &p * &ak;
        let done = (&next - &p).amax() <= f64::EPSILON * next.amax();
        p = next;
        if done {
            break;
        }
        ak = &ak * &ak;
    }
    p
}

/// Solves the chosen form for a Schur-stable `a`; the result is symmetrized.
pub fn solve_dlyap(a: &DMatrix<f64>, q: &DMatrix<f64>, form: LyapunovForm) -> Result<DMatrix<f64>, AnalysisError> {
    if !a.is_square() || a.shape() != q.shape() {
        return Err(AnalysisError::Shape(format!("A is {:?}, Q is {:?}", a.shape(), q.shape())));
    }
    let rho = spectral_radius(a);
    if rho >= 1.0 {
        return Err(AnalysisError::Unstable { rho });
    }
    let a = match form {
        LyapunovForm::Standard => a.clone(),
        LyapunovForm::Transposed => a.transpose(),
    };
    let mut p = smith(&a, q);
    // one correction pass solves the same equation for the rounding residual
    let r = residual(&a, &p, q);
    p += smith(&a, &r);
    p = (&p + p.transpose()) / 2.0;
    let res = norm2(&residual(&a, &p, q));
    if res > DLYAP_TOLERANCE {
        return Err(AnalysisError::Residual { residual: res, tolerance: DLYAP_TOLERANCE });
    }
    Ok(p)
}
