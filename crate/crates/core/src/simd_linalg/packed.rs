//! Packed operands, the rotate-and-sum reduction and the mat-vec kernels.

use std::ops::AddAssign;

use nalgebra::DMatrix;
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::SimdError;
use crate::bfv::{BfvContext, Ciphertext, GaloisKey, PublicKey, RelinKey};
use crate::encoding::{layout_gain, layout_repeated, Encoder, SlotVector};

/// Tally of scheme operations, one field per primitive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub enc: usize,
    pub dec: usize,
    pub add: usize,
    pub mult: usize,
    pub relin: usize,
    pub rotate: usize,
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.enc += o.enc;
        self.dec += o.dec;
        self.add += o.add;
        self.mult += o.mult;
        self.relin += o.relin;
        self.rotate += o.rotate;
    }
}

/// Encrypted m×n matrix laid out row-major from slot 0.
#[derive(Clone, Debug)]
pub struct PackedMatrix {
    pub ct: Ciphertext,
    pub rows: usize,
    pub cols: usize,
}

/// Encrypted n-vector repeated `rows` times from slot 0.
#[derive(Clone, Debug)]
pub struct PackedVector {
    pub ct: Ciphertext,
    pub rows: usize,
    pub cols: usize,
}

fn check_capacity(rows: usize, cols: usize, slots: usize) -> Result<(), SimdError> {
    if rows == 0 || cols == 0 || rows * cols > slots {
        return Err(SimdError::Shape(format!("{rows}x{cols} does not fit {slots} slots")));
    }
    Ok(())
}

impl PackedMatrix {
    /// Wrap a ciphertext already holding a row-major layout.
    pub fn from_ciphertext(ct: Ciphertext, rows: usize, cols: usize, slots: usize) -> Result<Self, SimdError> {
        check_capacity(rows, cols, slots)?;
        Ok(Self { ct, rows, cols })
    }

    pub fn encrypt<R: RngCore + CryptoRng>(
        enc: &Encoder,
        pk: &PublicKey,
        m: &DMatrix<i64>,
        rng: &mut R,
    ) -> Result<Self, SimdError> {
        check_capacity(m.nrows(), m.ncols(), enc.slot_count())?;
        let slots = SlotVector::new(layout_gain(m, enc.slot_count())?);
        let ct = enc.encrypt_slots(pk, &slots, rng)?;
        Ok(Self { ct, rows: m.nrows(), cols: m.ncols() })
    }
}

impl PackedVector {
    pub fn from_ciphertext(ct: Ciphertext, rows: usize, cols: usize, slots: usize) -> Result<Self, SimdError> {
        check_capacity(rows, cols, slots)?;
        Ok(Self { ct, rows, cols })
    }

    pub fn encrypt<R: RngCore + CryptoRng>(
        enc: &Encoder,
        pk: &PublicKey,
        v: &[i64],
        rows: usize,
        rng: &mut R,
    ) -> Result<Self, SimdError> {
        check_capacity(rows, v.len(), enc.slot_count())?;
        let slots = SlotVector::new(layout_repeated(v, rows, enc.slot_count())?);
        let ct = enc.encrypt_slots(pk, &slots, rng)?;
        Ok(Self { ct, rows, cols: v.len() })
    }
}

fn require<'a, K>(key: Option<&'a K>, name: &'static str) -> Result<&'a K, SimdError> {
    key.ok_or(SimdError::MissingKey(name))
}

/// Slot `k` of the result is `ct_k + ct_{k+1} + … + ct_{k+n-1}`.
///
/// Runs `n - 1` rounds, each rotating the running shifted copy once more and
/// adding it to the accumulator.
pub fn rotate_and_sum(
    ctx: &BfvContext,
    gk: &GaloisKey,
    ct: &Ciphertext,
    n: usize,
    counts: &mut OpCounts,
) -> Result<Ciphertext, SimdError> {
    let mut acc = ct.clone();
    let mut shifted = ct.clone();
    for _ in 1..n {
        shifted = ctx.rotate(gk, &shifted)?;
        acc = ctx.add(&acc, &shifted)?;
        counts.rotate += 1;
        counts.add += 1;
    }
    Ok(acc)
}

/// `Mv` with `(Mv)_i` at slot `i·n` (0-based).
pub fn matvec(
    ctx: &BfvContext,
    gk: Option<&GaloisKey>,
    rlk: Option<&RelinKey>,
    m: &PackedMatrix,
    v: &PackedVector,
    counts: &mut OpCounts,
) -> Result<Ciphertext, SimdError> {
    if m.rows != v.rows || m.cols != v.cols {
        return Err(SimdError::Shape(format!(
            "matrix {}x{} against vector block {}x{}",
            m.rows, m.cols, v.rows, v.cols
        )));
    }
    let rlk = require(rlk, "relinearization")?;
    let gk = require(gk, "rotation")?;
    let prod = ctx.mult_relin(rlk, &m.ct, &v.ct)?;
    counts.mult += 1;
    counts.relin += 1;
    rotate_and_sum(ctx, gk, &prod, m.cols, counts)
}

/// `Σ_i M_i v_i` with one product per pair and a single shared reduction.
///
/// Performs `L + 1` multiplications, `L + h - 1` additions and `h - 1`
/// rotations for `L + 1` pairs of width `h`.
pub fn matvec_sum(
    ctx: &BfvContext,
    gk: Option<&GaloisKey>,
    rlk: Option<&RelinKey>,
    gains: &[PackedMatrix],
    datas: &[PackedVector],
    counts: &mut OpCounts,
) -> Result<Ciphertext, SimdError> {
    if gains.is_empty() || gains.len() != datas.len() {
        return Err(SimdError::Shape(format!("{} gains against {} data blocks", gains.len(), datas.len())));
    }
    let (rows, cols) = (gains[0].rows, gains[0].cols);
    for (g, d) in gains.iter().zip(datas) {
        if (g.rows, g.cols) != (rows, cols) || (d.rows, d.cols) != (rows, cols) {
            return Err(SimdError::Shape(format!(
                "expected uniform {rows}x{cols} blocks, found {}x{} and {}x{}",
                g.rows, g.cols, d.rows, d.cols
            )));
        }
    }
    let rlk = require(rlk, "relinearization")?;
    let gk = require(gk, "rotation")?;
    let mut acc: Option<Ciphertext> = None;
    for (g, d) in gains.iter().zip(datas) {
        let prod = ctx.mult_relin(rlk, &g.ct, &d.ct)?;
        counts.mult += 1;
        counts.relin += 1;
        acc = Some(match acc {
            None => prod,
            Some(a) => {
                counts.add += 1;
                ctx.add(&a, &prod)?
            }
        });
    }
    let acc = acc.expect("gains is non-empty");
    rotate_and_sum(ctx, gk, &acc, cols, counts)
}

/// Entries at slots `0, stride, …, (m-1)·stride`.
///
/// These are the 1-based positions `1, stride + 1, …, (m-1)·stride + 1`.
pub fn extract(slots: &SlotVector, m: usize, stride: usize) -> Result<Vec<i64>, SimdError> {
    (0..m)
        .map(|i| {
            let index = i * stride;
            if index >= slots.len() {
                Err(SimdError::SlotIndex { index, len: slots.len() })
            } else {
                Ok(slots.get(index))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_picks_strided_slots() {
        let s = SlotVector::new(vec![50, 1, 2, 122, 3, 4, 9, 9]);
        assert_eq!(extract(&s, 1, 1).unwrap(), vec![50]);
        assert_eq!(extract(&s, 2, 3).unwrap(), vec![50, 122]);
        assert!(extract(&s, 3, 4).is_err());
    }
}
