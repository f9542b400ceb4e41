//! Encrypted dynamic control over leveled BFV homomorphic encryption.
//!
//! The crate is layered bottom-up:
//! * [`ring`]: modular and negacyclic polynomial arithmetic, NTTs and RNS.
//! * [`bfv`]: the BFV scheme with relinearization and slot rotation.
//! * [`encoding`]: fixed-point encoding, CRT batching and slot layouts.
//! * [`simd_linalg`]: packed encrypted matrix-vector products.
//! * [`iohfc`]: the input-output history feedback controller transformation.
//! * [`analysis`]: quantization, stability and output-error bounds.
//! * [`encsys`]: the three-party encrypted control protocol.

pub mod analysis;
pub mod bfv;
pub mod encoding;
pub mod encsys;
pub mod iohfc;
pub mod ring;
pub mod simd_linalg;
