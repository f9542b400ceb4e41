//! Storage needed by the encrypted controller's gain and data ciphertexts.

use serde::Serialize;

/// `4(p+1)N·log₂Q` bits: `p+1` gain and `p+1` data ciphertexts of two `R_Q`
/// elements each, with the smallest data length `L = p`.
pub fn memory_bits(p: usize, n: usize, log2_q: u32) -> u64 {
    4 * (p as u64 + 1) * n as u64 * log2_q as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MemoryReport {
    pub bits: u64,
    pub bytes: u64,
    pub kib: f64,
}

impl MemoryReport {
    pub fn new(p: usize, n: usize, log2_q: u32) -> Self {
        let bits = memory_bits(p, n, log2_q);
        Self { bits, bytes: bits.div_ceil(8), kib: bits as f64 / 8.0 / 1024.0 }
    }
}
