//! The plant rewritten so that its output is the history vector `d_t`.
//!
//! The lifted state is
//! `𝗑_t = [r_{t-L} … r_{t-1}, 0_q, x_{t-L} … x_t, u_{t-L} … u_{t-1}]` and
//!
//! * `𝗑_{t+1} = 𝖠𝗑_t + 𝖡u_t + 𝖤r_t`
//! * `d_t = 𝖢₁𝗑_t + 𝖥r_t`, `y_t = 𝖢₂𝗑_t`

use nalgebra::{DMatrix, DVector};

use super::linalg::block_diag;
use super::{IohfcError, Plant};

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPlant {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c1: DMatrix<f64>,
    pub c2: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub length: usize,
    pub q: usize,
    pub n: usize,
    pub l: usize,
    pub m: usize,
}

fn shift_up(blocks: usize, w: usize, total_blocks: usize) -> DMatrix<f64> {
    // row block i receives column block i+1 for i < blocks
    let mut out = DMatrix::zeros(total_blocks * w, total_blocks * w);
    for i in 0..blocks {
        out.view_mut((i * w, (i + 1) * w), (w, w)).fill_with_identity();
    }
    out
}

pub fn lift_plant(plant: &Plant, length: usize, q: usize) -> Result<LiftedPlant, IohfcError> {
    if length == 0 {
        return Err(IohfcError::InvalidLength { length, p: 0 });
    }
    let (n, m, l) = (plant.n(), plant.m(), plant.l());
    let n1 = (length + 1) * q;
    let n2 = (length + 1) * n;
    let n3 = length * m;
    let dim = n1 + n2 + n3;

    let a1 = shift_up(length - 1, q, length + 1);
    let mut a2 = shift_up(length, n, length + 1);
    a2.view_mut((length * n, length * n), (n, n)).copy_from(&plant.a);
    let a3 = shift_up(length - 1, m, length);
    let a = block_diag(&[&a1, &a2, &a3]);

    let mut b = DMatrix::zeros(dim, m);
    b.view_mut((n1 + length * n, 0), (n, m)).copy_from(&plant.b);
    b.view_mut((dim - m, 0), (m, m)).fill_with_identity();

    let kron_c = block_diag(&vec![&plant.c; length + 1]);
    let c1 = block_diag(&[&DMatrix::identity(n1, n1), &kron_c, &DMatrix::identity(n3, n3)]);

    let mut c2 = DMatrix::zeros(l, dim);
    c2.view_mut((0, n1 + length * n), (l, n)).copy_from(&plant.c);

    let mut e = DMatrix::zeros(dim, q);
    e.view_mut(((length - 1) * q, 0), (q, q)).fill_with_identity();

    let mut f = DMatrix::zeros(c1.nrows(), q);
    f.view_mut((length * q, 0), (q, q)).fill_with_identity();

    Ok(LiftedPlant { a, b, c1, c2, e, f, length, q, n, l, m })
}

impl LiftedPlant {
    /// `(L+1)q + (L+1)n + Lm`.
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `𝖠 + 𝖡K𝖢₁`.
    pub fn closed_loop(&self, k: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a + &self.b * k * &self.c1
    }

    /// Lifted initial state holding `x_0` with zero history.
    pub fn initial_state(&self, x0: &DVector<f64>) -> DVector<f64> {
        let mut s = DVector::zeros(self.dim());
        s.rows_mut((self.length + 1) * self.q + self.length * self.n, self.n).copy_from(x0);
        s
    }

    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, r: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * u + &self.e * r
    }

    pub fn history(&self, x: &DVector<f64>, r: &DVector<f64>) -> DVector<f64> {
        &self.c1 * x + &self.f * r
    }

    pub fn output(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.c2 * x
    }
}
