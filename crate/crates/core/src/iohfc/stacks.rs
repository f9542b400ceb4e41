//! Stacked input-output relations of a controller over a window of length `L`.

use nalgebra::DMatrix;

use super::linalg::{matrix_power, observability_matrix};
use super::{IohfcError, StateSpaceController};

/// Matrices relating `z_{t-L}` and the windowed histories to `z_t` and the
/// windowed inputs:
///
/// * `z_t = A^L z_{t-L} + R_L [y] + S_L [r]`
/// * `[u] = V_L z_{t-L} + H_L [y] + J_L [r]`
///
/// where each `[·]` stacks samples `t-L … t-1`, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryStack {
    pub length: usize,
    /// `[C; CA; …; CA^(L-1)]`, `Lm × p`.
    pub v: DMatrix<f64>,
    /// `[A^(L-1)B … AB B]`, `p × Lℓ`.
    pub r: DMatrix<f64>,
    /// `[A^(L-1)E … AE E]`, `p × Lq`.
    pub s: DMatrix<f64>,
    /// Block lower-triangular Toeplitz with `D` on the diagonal, `Lm × Lℓ`.
    pub h: DMatrix<f64>,
    /// Block lower-triangular Toeplitz with `F` on the diagonal, `Lm × Lq`.
    pub j: DMatrix<f64>,
}

fn power_row(a: &DMatrix<f64>, x: &DMatrix<f64>, len: usize) -> DMatrix<f64> {
    let (p, w) = x.shape();
    let mut out = DMatrix::zeros(p, len * w);
    for k in 0..len {
        let blk = matrix_power(a, len - 1 - k) * x;
        out.view_mut((0, k * w), (p, w)).copy_from(&blk);
    }
    out
}

fn toeplitz(ctrl: &StateSpaceController, x: &DMatrix<f64>, diag: &DMatrix<f64>, len: usize) -> DMatrix<f64> {
    let m = ctrl.m();
    let w = diag.ncols();
    let mut out = DMatrix::zeros(len * m, len * w);
    for i in 0..len {
        for j in 0..=i {
            let blk = if i == j { diag.clone() } else { &ctrl.c * matrix_power(&ctrl.a, i - j - 1) * x };
            out.view_mut((i * m, j * w), (m, w)).copy_from(&blk);
        }
    }
    out
}

pub fn build_stacks(ctrl: &StateSpaceController, length: usize) -> Result<HistoryStack, IohfcError> {
    if length == 0 {
        return Err(IohfcError::InvalidLength { length, p: ctrl.p() });
    }
    Ok(HistoryStack {
        length,
        v: observability_matrix(&ctrl.a, &ctrl.c, length),
        r: power_row(&ctrl.a, &ctrl.b, length),
        s: power_row(&ctrl.a, &ctrl.e, length),
        h: toeplitz(ctrl, &ctrl.b, &ctrl.d, length),
        j: toeplitz(ctrl, &ctrl.e, &ctrl.f, length),
    })
}
