//! Slot layouts for packed gain matrices and history data blocks.

use nalgebra::{DMatrix, Scalar};
use num_traits::Zero;

use super::EncodingError;

/// Rows of `m` concatenated in order, i.e. `vec(mᵀ)ᵀ`.
pub fn layout_gain<T: Scalar + Copy>(m: &DMatrix<T>, capacity: usize) -> Result<Vec<T>, EncodingError> {
    let len = m.nrows() * m.ncols();
    if len > capacity {
        return Err(EncodingError::Capacity { len, capacity });
    }
    Ok((0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect())
}

/// `v` repeated `reps` times.
pub fn layout_repeated<T: Copy>(v: &[T], reps: usize, capacity: usize) -> Result<Vec<T>, EncodingError> {
    let len = v.len() * reps;
    if len > capacity {
        return Err(EncodingError::Capacity { len, capacity });
    }
    Ok((0..reps).flat_map(|_| v.iter().copied()).collect())
}

/// Shape of one history block `[rᵀ yᵀ uᵀ]` with `q + ℓ + m = h` entries,
/// repeated once per controller output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DataLayout {
    pub q: usize,
    pub l: usize,
    pub m: usize,
}

impl DataLayout {
    pub fn new(q: usize, l: usize, m: usize) -> Self {
        Self { q, l, m }
    }

    /// Block width `h = q + ℓ + m`.
    pub fn h(&self) -> usize {
        self.q + self.l + self.m
    }

    /// Slots used: `m·h`.
    pub fn len(&self) -> usize {
        self.m * self.h()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[rᵀ yᵀ uᵀ]` repeated `m` times.
    pub fn full<T: Copy + Zero>(&self, r: &[T], y: &[T], u: &[T], capacity: usize) -> Result<Vec<T>, EncodingError> {
        self.check(r.len(), self.q, "r")?;
        self.check(y.len(), self.l, "y")?;
        self.check(u.len(), self.m, "u")?;
        let block: Vec<T> = r.iter().chain(y).chain(u).copied().collect();
        layout_repeated(&block, self.m, capacity)
    }

    pub fn r_only<T: Copy + Zero>(&self, r: &[T], capacity: usize) -> Result<Vec<T>, EncodingError> {
        self.full(r, &vec![T::zero(); self.l], &vec![T::zero(); self.m], capacity)
    }

    pub fn y_only<T: Copy + Zero>(&self, y: &[T], capacity: usize) -> Result<Vec<T>, EncodingError> {
        self.full(&vec![T::zero(); self.q], y, &vec![T::zero(); self.m], capacity)
    }

    pub fn u_only<T: Copy + Zero>(&self, u: &[T], capacity: usize) -> Result<Vec<T>, EncodingError> {
        self.full(&vec![T::zero(); self.q], &vec![T::zero(); self.l], u, capacity)
    }

    fn check(&self, got: usize, want: usize, what: &'static str) -> Result<(), EncodingError> {
        if got != want {
            return Err(EncodingError::Shape { what, expected: want, found: got });
        }
        Ok(())
    }
}
