//! The BFV leveled homomorphic encryption scheme over `R_Q`, with
//! relinearization, a one-slot rotation key and a binary wire format.

mod ciphertext;
mod keys;
mod ops;
mod params;
pub mod sampling;
mod serialize;

pub use ciphertext::Ciphertext;
pub use keys::{keygen, GaloisKey, KeySet, KeySwitchKey, PublicKey, RelinKey, SecretKey, ROTATION_GALOIS_ELEMENT};
pub use params::{BfvContext, BfvParams, Profile, DEFAULT_AUX_PRIMES, DEFAULT_Q_PRIMES, DEFAULT_T, TOY_T};
pub use serialize::{read_polys, write_polys, FORMAT_VERSION, MAGIC};

use crate::ring::RingError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BfvError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("ciphertext has {found} parts, expected {expected}")]
    PartCount { expected: usize, found: usize },
    #[error("multiplicative depth {depth} exceeds the budget of {max_depth}")]
    NoiseBudget { depth: u32, max_depth: u32 },
    #[error("sensitivity mismatch: Δ^{left} vs Δ^{right}")]
    ScaleMismatch { left: u32, right: u32 },
    #[error("plaintext (N = {n}, modulus {modulus}) does not match the parameters")]
    PlaintextMismatch { n: usize, modulus: u64 },
    #[error("malformed key or ciphertext data: {0}")]
    Format(String),
}
