//! Dense linear-algebra helpers shared by the transformation and the analysis.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions and pseudoinverses.
pub const SVD_CUTOFF: f64 = 1e-10;

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Numerical rank with singular values below `SVD_CUTOFF·σ_max` treated as zero.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let s = singular_values(m);
    let max = s.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > SVD_CUTOFF * max).count()
}

/// Moore-Penrose inverse via SVD with the same cutoff as [`rank`].
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if m.is_empty() {
        return DMatrix::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut out = DMatrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > SVD_CUTOFF * max {
            out += vt.row(k).transpose() * u.column(k).transpose() / s;
        }
    }
    out
}

/// `A^k` by repeated multiplication (`k = 0` gives the identity).
pub fn matrix_power(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// `[C; CA; …; CA^(k-1)]`.
pub fn observability_matrix(a: &DMatrix<f64>, c: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(k * c.nrows(), a.ncols());
    let mut row = c.clone();
    for i in 0..k {
        out.view_mut((i * c.nrows(), 0), (c.nrows(), a.ncols())).copy_from(&row);
        row = &row * a;
    }
    out
}

/// `[B, AB, …, A^(k-1)B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    observability_matrix(&a.transpose(), &b.transpose(), k).transpose()
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    singular_values(m).iter().cloned().fold(0.0, f64::max)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<nalgebra::Complex<f64>> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().schur().complex_eigenvalues().iter().copied().collect()
}

/// Block-diagonal concatenation.
pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Horizontal concatenation of matrices with equal row counts.
pub fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_left_inverts_full_column_rank() {
        let v = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 1.0, 1.0]);
        let p = pinv(&v);
        assert!((p * &v - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert_eq!(rank(&v), 2);
        assert_eq!(rank(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0])), 1);
    }

    #[test]
    fn spectral_helpers() {
        let a = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, -0.8]);
        assert!((spectral_radius(&a) - 0.8).abs() < 1e-12);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -0.9, 0.9, 0.0]);
        assert!((spectral_radius(&rot) - 0.9).abs() < 1e-12);
        assert!((norm2(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -4.0])) - 4.0).abs() < 1e-12);
    }
}
