//! Plaintext-side NTT tables realizing the batching maps between `R_T` and `Z_T^N`.
//!
//! Slot order here is the natural one: slot `k` (0-based) is the
//! evaluation at `zeta^(2k+1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::modulus::Modulus;
use super::ntt::{bit_reverse, is_primitive_2n_root, NttPlan};
use super::poly::{check_degree, RingElement};
use super::RingError;

/// Seed used when callers do not pick one, so default tables are reproducible.
pub const DEFAULT_ROOT_SEED: u64 = 0x10_4FC0;

#[derive(Clone, Debug)]
pub struct NttTables {
    n: usize,
    modulus: Modulus,
    /// Primitive `2N`-th root of unity.
    pub zeta: u64,
    /// `zeta^2`, a primitive `N`-th root.
    pub omega: u64,
    /// `zeta^-1`.
    pub xi: u64,
    /// `omega^-1`.
    pub pi: u64,
    /// `N^-1 mod T`.
    pub n_inv: u64,
    plan: NttPlan,
}

impl NttTables {
    /// Search for `zeta` by raising seeded random elements to `(T-1)/2N`.
    pub fn new(n: usize, modulus: Modulus, seed: u64) -> Result<Self, RingError> {
        check_degree(n)?;
        if !modulus.is_ntt_friendly(n) {
            return Err(RingError::NotNttFriendly { modulus: modulus.value(), n });
        }
        let q = modulus.value();
        let exp = (q - 1) / (2 * n as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        // at least half of all units yield a primitive root, so this ends fast
        loop {
            let g = rng.gen_range(2..q);
            let cand = modulus.pow(g, exp);
            if is_primitive_2n_root(cand, n, &modulus) {
                return Self::with_root(n, modulus, cand);
            }
        }
    }

    pub fn with_root(n: usize, modulus: Modulus, zeta: u64) -> Result<Self, RingError> {
        let plan = NttPlan::with_root(n, modulus, zeta)?;
        let omega = modulus.mul(zeta, zeta);
        let xi = modulus.inv(zeta).ok_or(RingError::NotPrimitiveRoot { root: zeta, n })?;
        let pi = modulus.mul(xi, xi);
        let n_inv = modulus.inv(n as u64).ok_or(RingError::InvalidModulus(modulus.value()))?;
        Ok(Self { n, modulus, zeta, omega, xi, pi, n_inv, plan })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// `sigma^-1`: coefficients to slots, `z_k = m(zeta^(2k+1))`.
    pub fn forward(&self, coeffs: &[i64]) -> Result<Vec<i64>, RingError> {
        self.check_len(coeffs.len())?;
        let m = &self.modulus;
        let mut a: Vec<u64> = coeffs.iter().map(|&c| m.reduce_i64(c)).collect();
        self.plan.forward(&mut a);
        let bits = self.n.trailing_zeros();
        Ok((0..self.n).map(|k| m.to_minimal(a[bit_reverse(k, bits)])).collect())
    }

    /// `sigma`: slots back to coefficients.
    pub fn inverse(&self, slots: &[i64]) -> Result<Vec<i64>, RingError> {
        self.check_len(slots.len())?;
        let m = &self.modulus;
        let bits = self.n.trailing_zeros();
        let mut a = vec![0u64; self.n];
        for (k, &z) in slots.iter().enumerate() {
            a[bit_reverse(k, bits)] = m.reduce_i64(z);
        }
        self.plan.inverse(&mut a);
        Ok(a.into_iter().map(|c| m.to_minimal(c)).collect())
    }

    pub fn forward_element(&self, e: &RingElement) -> Result<Vec<i64>, RingError> {
        if e.modulus() != &self.modulus {
            return Err(RingError::Mismatch {
                left: (e.n(), e.modulus().value()),
                right: (self.n, self.modulus.value()),
            });
        }
        self.forward(e.coeffs())
    }

    pub fn inverse_element(&self, slots: &[i64]) -> Result<RingElement, RingError> {
        RingElement::from_coeffs(&self.inverse(slots)?, self.modulus)
    }

    /// Negacyclic product through pointwise slot multiplication.
    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
        let m = &self.modulus;
        let fa = self.forward_element(a)?;
        let fb = self.forward_element(b)?;
        let prod: Vec<i64> =
            fa.iter().zip(&fb).map(|(&x, &y)| m.to_minimal(m.mul(m.reduce_i64(x), m.reduce_i64(y)))).collect();
        self.inverse_element(&prod)
    }

    fn check_len(&self, len: usize) -> Result<(), RingError> {
        if len != self.n {
            return Err(RingError::Mismatch {
                left: (len, self.modulus.value()),
                right: (self.n, self.modulus.value()),
            });
        }
        Ok(())
    }
}
