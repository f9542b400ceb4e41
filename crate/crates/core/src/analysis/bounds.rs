//! The `Δ_K` stability condition and the worst-case output-error bound.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lyapunov::{solve_dlyap, LyapunovForm};
use super::{AnalysisError, QuantizedGain};
use crate::iohfc::linalg::{norm2, spectral_radius};
use crate::iohfc::LiftedPlant;

/// Largest power examined when searching for `M`.
pub const M_SEARCH_CAP: usize = 100_000;

/// Intermediates of `Δ_K < β₁(−β₂ + √β₃)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityCertificate {
    #[serde(skip)]
    pub p: DMatrix<f64>,
    #[serde(skip)]
    pub q_lyap: DMatrix<f64>,
    pub form: LyapunovForm,
    pub rho: f64,
    pub lambda_min_q: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub delta_k_max: f64,
}

impl StabilityCertificate {
    /// Whether `delta_k` meets the strict inequality.
    pub fn admits(&self, delta_k: f64) -> bool {
        delta_k < self.delta_k_max
    }
}

/// Largest `Δ_K` for which quantizing `K` provably keeps the lifted loop stable.
pub fn delta_k_bound(
    lifted: &LiftedPlant,
    k: &DMatrix<f64>,
    q_lyap: &DMatrix<f64>,
    form: LyapunovForm,
) -> Result<StabilityCertificate, AnalysisError> {
    let (m, width) = k.shape();
    if lifted.b.ncols() != m || lifted.c1.nrows() != width {
        return Err(AnalysisError::Shape(format!("gain {m}x{width} does not fit the lifted plant")));
    }
    let acl = lifted.closed_loop(k);
    let rho = spectral_radius(&acl);
    let p = solve_dlyap(&acl, q_lyap, form)?;
    let lambda_min_q = q_lyap.clone().symmetric_eigen().eigenvalues.min();
    let bpb = norm2(&(lifted.b.transpose() * &p * &lifted.b));
    let apb = norm2(&(acl.transpose() * &p * &lifted.b));
    let beta1 = 2.0 / ((width as f64 * m as f64).sqrt() * bpb * norm2(&lifted.c1));
    let beta2 = apb;
    let beta3 = apb * apb + lambda_min_q * bpb;
    Ok(StabilityCertificate {
        p,
        q_lyap: q_lyap.clone(),
        form,
        rho,
        lambda_min_q,
        beta1,
        beta2,
        beta3,
        delta_k_max: beta1 * (beta3.sqrt() - beta2),
    })
}

/// How `‖C₂BK̃C₁‖` enters `θ₁` and `θ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ThetaForm {
    /// The norm of the product.
    Joint,
    /// The submultiplicative estimate `‖C₂B‖·‖K̃‖·‖C₁‖`.
    #[default]
    Split,
}

impl std::str::FromStr for ThetaForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "joint" => Ok(Self::Joint),
            "split" => Ok(Self::Split),
            _ => Err(format!("unknown theta form '{s}' (expected joint or split)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorBoundReport {
    pub form: ThetaForm,
    pub rho: f64,
    pub rho_bar: f64,
    pub gamma: f64,
    pub c: f64,
    pub tau: u64,
    pub m_index: usize,
    pub b_r: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub bound: f64,
}

// Largest γ^(-k)‖A^k‖ over k ≤ M for both matrices, where M opens the first
// run of `run` consecutive powers with γ^(-k)‖A^k‖ < 1 for both.
fn transient_constant(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    gamma: f64,
    run: usize,
) -> Result<(f64, usize), AnalysisError> {
    let (sa, sb) = (a / gamma, b / gamma);
    let (mut pa, mut pb) = (sa.clone(), sb.clone());
    let mut c: f64 = 1.0;
    let mut streak = 0;
    for k in 1..=M_SEARCH_CAP {
        // entries inside the run are below 1 and cannot raise c
        let r = norm2(&pa).max(norm2(&pb));
        c = c.max(r);
        streak = if r < 1.0 { streak + 1 } else { 0 };
        if streak == run {
            return Ok((c, k + 1 - run));
        }
        pa = &pa * &sa;
        pb = &pb * &sb;
    }
    Err(AnalysisError::MSearch { cap: M_SEARCH_CAP, run })
}

/// Worst-case `sup_t ‖y_t − y'_t‖` between the exact and quantized loops.
///
/// Without `gamma`, the midpoint of `(max(ρ, ρ̄), 1)` is used.
pub fn error_bound(
    lifted: &LiftedPlant,
    qg: &QuantizedGain,
    x0: &DVector<f64>,
    b_r: f64,
    gamma: Option<f64>,
    form: ThetaForm,
) -> Result<ErrorBoundReport, AnalysisError> {
    if x0.len() != lifted.n {
        return Err(AnalysisError::Shape(format!("x0 of length {} for n = {}", x0.len(), lifted.n)));
    }
    let acl = lifted.closed_loop(&qg.k);
    let acl_bar = lifted.closed_loop(&qg.k_bar);
    let (rho, rho_bar) = (spectral_radius(&acl), spectral_radius(&acl_bar));
    let lower = rho.max(rho_bar);
    if lower >= 1.0 {
        return Err(AnalysisError::Unstable { rho: lower });
    }
    let gamma = gamma.unwrap_or((1.0 + lower) / 2.0);
    if !(gamma > lower && gamma < 1.0) {
        return Err(AnalysisError::Gamma { gamma, lower });
    }
    let tau = (-1.0 / gamma.ln()).round() as u64;
    let (c, m_index) = transient_constant(&acl, &acl_bar, gamma, 3 * tau.max(1) as usize)?;

    let c2b = &lifted.c2 * &lifted.b;
    let x = match form {
        ThetaForm::Joint => norm2(&(&c2b * &qg.k_tilde * &lifted.c1)),
        ThetaForm::Split => norm2(&c2b) * norm2(&qg.k_tilde) * norm2(&lifted.c1),
    };
    let ebkf = &lifted.e + &lifted.b * &qg.k * &lifted.f;
    let theta1 = x * x0.norm();
    let theta2 = x * norm2(&ebkf) * b_r;
    let theta3 = norm2(&c2b) * (norm2(&(&qg.k_tilde * &lifted.f)) * b_r + norm2(&qg.k_bar) * qg.eta_d);
    let bound = theta1 * c * c * tau as f64 * gamma.powi(tau as i32 - 1)
        + theta2 * c * c / (1.0 - gamma).powi(2)
        + theta3 * c / (1.0 - gamma);
    Ok(ErrorBoundReport { form, rho, rho_bar, gamma, c, tau, m_index, b_r, theta1, theta2, theta3, bound })
}
