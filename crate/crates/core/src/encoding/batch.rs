//! CRT batching with slots ordered along the orbit of the rotation generator.
//!
//! The `N` evaluation points `zeta^e` (odd `e`) split into two rows,
//! `e = 3^k` and `e = -3^k (mod 2N)` for `k = 0..N/2`. Only the first row is
//! used: usable slot `k` holds `m(zeta^(3^k))`, so the automorphism
//! `X -> X^3` shifts the usable row one position to the left. The second
//! row is always packed as zero.

use std::sync::Arc;

use crate::bfv::BfvContext;
use crate::ring::{NttTables, RingElement, DEFAULT_ROOT_SEED};

use super::EncodingError;

/// Up to `S = N/2` residues in minimal form; missing tail slots are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlotVector {
    slots: Vec<i64>,
}

impl SlotVector {
    pub fn new(slots: Vec<i64>) -> Self {
        Self { slots }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.slots
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot `i`, zero past the stored prefix.
    pub fn get(&self, i: usize) -> i64 {
        self.slots.get(i).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct BatchEncoder {
    tables: NttTables,
    // natural slot index (evaluation at zeta^(2j+1)) of usable slot k
    usable: Vec<usize>,
    // natural slot index of the k-th slot of the unused row
    unused: Vec<usize>,
}

impl BatchEncoder {
    pub fn new(ctx: &Arc<BfvContext>) -> Result<Self, EncodingError> {
        Self::from_tables(NttTables::new(ctx.n(), *ctx.plain_modulus(), DEFAULT_ROOT_SEED)?)
    }

    pub fn from_tables(tables: NttTables) -> Result<Self, EncodingError> {
        let n = tables.n();
        let two_n = 2 * n;
        let half = n / 2;
        let mut usable = Vec::with_capacity(half);
        let mut unused = Vec::with_capacity(half);
        let mut e = 1usize;
        for _ in 0..half {
            usable.push((e - 1) / 2);
            unused.push((two_n - e - 1) / 2);
            e = e * 3 % two_n;
        }
        Ok(Self { tables, usable, unused })
    }

    /// Number of usable slots `S = N/2`.
    pub fn slot_count(&self) -> usize {
        self.usable.len()
    }

    pub fn tables(&self) -> &NttTables {
        &self.tables
    }

    pub fn plain_modulus(&self) -> u64 {
        self.tables.modulus().value()
    }

    /// Place values on the usable row (rest zero) and interpolate.
    pub fn pack(&self, v: &SlotVector) -> Result<RingElement, EncodingError> {
        let s = self.slot_count();
        if v.len() > s {
            return Err(EncodingError::Capacity { len: v.len(), capacity: s });
        }
        let mut natural = vec![0i64; self.tables.n()];
        for (k, &z) in v.as_slice().iter().enumerate() {
            natural[self.usable[k]] = z;
        }
        Ok(self.tables.inverse_element(&natural)?)
    }

    /// Evaluate and read back the usable row.
    pub fn unpack(&self, m: &RingElement) -> Result<SlotVector, EncodingError> {
        let natural = self.tables.forward_element(m)?;
        Ok(SlotVector::new(self.usable.iter().map(|&j| natural[j]).collect()))
    }

    /// Values on the unused row; zero for anything produced by [`Self::pack`]
    /// and kept zero by slotwise operations and rotations.
    pub fn unpack_unused_row(&self, m: &RingElement) -> Result<SlotVector, EncodingError> {
        let natural = self.tables.forward_element(m)?;
        Ok(SlotVector::new(self.unused.iter().map(|&j| natural[j]).collect()))
    }
}
