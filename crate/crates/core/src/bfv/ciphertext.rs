//! BFV ciphertexts.

use crate::ring::RnsPoly;

/// Two or three elements of `R_Q` in coefficient form, plus bookkeeping.
///
/// `delta_product` counts the sensitivity factors carried by the plaintext
/// (1 after a fixed-point encryption, 2 after a gain-by-data product), and
/// `depth` counts multiplications. Neither is part of the wire format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub(crate) parts: Vec<RnsPoly>,
    pub delta_product: u32,
    pub depth: u32,
}

impl Ciphertext {
    pub fn parts(&self) -> &[RnsPoly] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn with_delta_product(mut self, k: u32) -> Self {
        self.delta_product = k;
        self
    }
}
