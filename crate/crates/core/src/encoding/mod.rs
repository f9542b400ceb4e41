//! Fixed-point encoding, CRT batching and the slot layouts used by the
//! packed matrix-vector products.

mod batch;
mod encoder;
mod fixed_point;
mod layout;

pub use batch::{BatchEncoder, SlotVector};
pub use encoder::Encoder;
pub use fixed_point::{dcd, dcd_vec, ecd, ecd_matrix, ecd_vec, quantize, quantize_matrix, Sensitivity};
pub use layout::{layout_gain, layout_repeated, DataLayout};

use crate::bfv::BfvError;
use crate::ring::RingError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncodingError {
    #[error("value {value} at sensitivity {delta} does not fit in Z_{t} without wrapping")]
    Overflow { value: f64, delta: f64, t: u64 },
    #[error("{len} values exceed the {capacity} usable slots")]
    Capacity { len: usize, capacity: usize },
    #[error("sensitivity must be positive and finite, got {0}")]
    InvalidSensitivity(f64),
    #[error("{what} segment has length {found}, expected {expected}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error(transparent)]
    Ring(#[from] RingError),
}
