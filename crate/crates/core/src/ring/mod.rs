//! Exact arithmetic in `Z_n` and in `R_n = Z_n[X]/(X^N + 1)`.

mod modulus;
mod ntt;
mod poly;
mod rns;
mod tables;

pub use modulus::{is_prime_u64, reduce_minimal, Modulus, MAX_MODULUS_BITS};
pub use ntt::{find_primitive_root, is_primitive_2n_root, NttPlan};
pub use poly::RingElement;
pub use rns::{ntt_primes, ntt_primes_above, RnsBasis, RnsPoly};
pub use tables::{NttTables, DEFAULT_ROOT_SEED};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("invalid modulus {0}: must be in [2, 2^62)")]
    InvalidModulus(u64),
    #[error("invalid ring degree {0}: must be a power of two >= 2")]
    InvalidDegree(usize),
    #[error("modulus {modulus} is not an NTT-friendly prime for N = {n}")]
    NotNttFriendly { modulus: u64, n: usize },
    #[error("{root} is not a primitive 2N-th root of unity for N = {n}")]
    NotPrimitiveRoot { root: u64, n: usize },
    #[error("operand mismatch: (N, modulus) {left:?} vs {right:?}")]
    Mismatch { left: (usize, u64), right: (usize, u64) },
    #[error("Galois element {0} must be odd")]
    EvenGaloisElement(usize),
    #[error("RNS basis must contain at least one prime")]
    EmptyBasis,
    #[error("RNS basis contains prime {0} twice")]
    DuplicatePrime(u64),
    #[error("expected {expected} limbs, found {found}")]
    LimbCount { expected: usize, found: usize },
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u64, modulus: u64 },
}
