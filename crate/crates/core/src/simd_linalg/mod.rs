//! Encrypted matrix-vector products over packed slots.
//!
//! A gain matrix `M` (m×n) is packed row by row and the vector `v` is
//! repeated once per row, so one slotwise product holds every `M_ij v_j`.
//! Summing each window of `n` consecutive slots with rotations leaves
//! `(Mv)_i` at slot `i·n` (0-based); the remaining slots are scratch.

mod packed;

pub use packed::{extract, matvec, matvec_sum, rotate_and_sum, OpCounts, PackedMatrix, PackedVector};

use crate::bfv::BfvError;
use crate::encoding::EncodingError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimdError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("missing {0} key")]
    MissingKey(&'static str),
    #[error("slot index {index} out of range for {len} slots")]
    SlotIndex { index: usize, len: usize },
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}
