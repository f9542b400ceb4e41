//! Plaintext integer model of the encrypted loop for exact comparison.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::EncsysError;
use crate::encoding::{dcd_vec, ecd, ecd_matrix, ecd_vec, Sensitivity};
use crate::iohfc::IohfcGain;
use crate::ring::reduce_minimal;

/// Computes `z = Σ_i K̂_i d̂_i mod T` on the same integers the ciphertexts
/// carry, with re-encoded inputs fed back into the history.
#[derive(Clone, Debug)]
pub struct QuantizedOracle {
    blocks: Vec<DMatrix<i64>>,
    history: VecDeque<Vec<i64>>,
    q: usize,
    l: usize,
    m: usize,
    delta_k: Sensitivity,
    delta_d: Sensitivity,
    t: u64,
}

impl QuantizedOracle {
    pub fn new(gain: &IohfcGain, delta_k: Sensitivity, delta_d: Sensitivity, t: u64) -> Result<Self, EncsysError> {
        let blocks = gain.blocks().iter().map(|b| ecd_matrix(b, delta_k, t)).collect::<Result<Vec<_>, _>>()?;
        let h = gain.h();
        Ok(Self {
            blocks,
            history: (0..gain.length()).map(|_| vec![0; h]).collect(),
            q: gain.q(),
            l: gain.l(),
            m: gain.m(),
            delta_k,
            delta_d,
            t,
        })
    }

    /// Integer gain blocks `K̂_0 … K̂_L`.
    pub fn gain_blocks(&self) -> &[DMatrix<i64>] {
        &self.blocks
    }

    /// Returns the minimal residues `z` and `u = Dcd_{Δ_K·Δ_d}(z)`, then
    /// records `[r̂ ŷ Ecd_{Δ_d}(u)]` as the newest history block.
    pub fn step(&mut self, r: &DVector<f64>, y: &DVector<f64>) -> Result<(Vec<i64>, DVector<f64>), EncsysError> {
        if r.len() != self.q || y.len() != self.l {
            return Err(EncsysError::Shape(format!(
                "r of length {}, y of length {} for q = {}, l = {}",
                r.len(),
                y.len(),
                self.q,
                self.l
            )));
        }
        let mut newest = ecd_vec(r.as_slice(), self.delta_d, self.t)?;
        newest.extend(ecd_vec(y.as_slice(), self.delta_d, self.t)?);
        newest.extend(std::iter::repeat_n(0, self.m));

        let z: Vec<i64> = (0..self.m)
            .map(|j| {
                let total: i128 = self
                    .history
                    .iter()
                    .chain([&newest])
                    .zip(&self.blocks)
                    .map(|(d, k)| d.iter().enumerate().map(|(c, &x)| k[(j, c)] as i128 * x as i128).sum::<i128>())
                    .sum();
                reduce_minimal(total, self.t)
            })
            .collect();
        let u = DVector::from_vec(dcd_vec(&z, self.delta_k.product(self.delta_d)));

        let base = self.q + self.l;
        for (j, &uj) in u.iter().enumerate() {
            newest[base + j] = ecd(uj, self.delta_d, self.t)?;
        }
        self.history.pop_front();
        self.history.push_back(newest);
        Ok((z, u))
    }

    /// Expected integer blocks of every queue slot between steps, oldest
    /// first; the newest slot is empty.
    pub fn expected_queue(&self) -> Vec<Vec<i64>> {
        let h = self.q + self.l + self.m;
        self.history.iter().cloned().chain([vec![0; h]]).collect()
    }
}
