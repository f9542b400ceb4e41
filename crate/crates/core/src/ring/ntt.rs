//! In-place negacyclic NTT over a single NTT-friendly prime.
//!
//! The forward transform is a Cooley-Tukey butterfly network with merged
//! twisting; on output, position `i` holds the evaluation of the input at
//! `psi^(2·brev(i)+1)`, where `brev` reverses `log2(n)` bits. The inverse
//! is the matching Gentleman-Sande network and consumes that same order.

use super::modulus::Modulus;
use super::RingError;

/// Precomputed twiddles for one `(n, q, psi)` triple.
#[derive(Clone, Debug)]
pub struct NttPlan {
    n: usize,
    modulus: Modulus,
    psi: u64,
    psi_rev: Vec<u64>,
    psi_rev_shoup: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    psi_inv_rev_shoup: Vec<u64>,
    n_inv: u64,
    n_inv_shoup: u64,
}

pub(crate) fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

/// True when `psi` has multiplicative order exactly `2n` modulo `q`.
pub fn is_primitive_2n_root(psi: u64, n: usize, modulus: &Modulus) -> bool {
    // order divides 2n (a power of two); primitive iff psi^n = -1
    modulus.pow(psi, n as u64) == modulus.value() - 1
}

/// Smallest-generator primitive `2n`-th root: tries `g = 2, 3, ...` and
/// returns the first `g^((q-1)/2n)` with order exactly `2n`.
pub fn find_primitive_root(n: usize, modulus: &Modulus) -> Result<u64, RingError> {
    if !modulus.is_ntt_friendly(n) {
        return Err(RingError::NotNttFriendly { modulus: modulus.value(), n });
    }
    let q = modulus.value();
    let exp = (q - 1) / (2 * n as u64);
    for g in 2..q {
        let cand = modulus.pow(g, exp);
        if is_primitive_2n_root(cand, n, modulus) {
            return Ok(cand);
        }
    }
    Err(RingError::NotNttFriendly { modulus: q, n })
}

impl NttPlan {
    pub fn new(n: usize, modulus: Modulus) -> Result<Self, RingError> {
        let psi = find_primitive_root(n, &modulus)?;
        Self::with_root(n, modulus, psi)
    }

    pub fn with_root(n: usize, modulus: Modulus, psi: u64) -> Result<Self, RingError> {
        if !n.is_power_of_two() || n < 2 {
            return Err(RingError::InvalidDegree(n));
        }
        if !modulus.is_ntt_friendly(n) {
            return Err(RingError::NotNttFriendly { modulus: modulus.value(), n });
        }
        if !is_primitive_2n_root(psi, n, &modulus) {
            return Err(RingError::NotPrimitiveRoot { root: psi, n });
        }
        let bits = n.trailing_zeros();
        let psi_inv = modulus.inv(psi).expect("root of unity is invertible");
        let mut psi_rev = vec![0u64; n];
        let mut psi_inv_rev = vec![0u64; n];
        let (mut p, mut pi) = (1u64, 1u64);
        for i in 0..n {
            let j = bit_reverse(i, bits);
            psi_rev[j] = p;
            psi_inv_rev[j] = pi;
            p = modulus.mul(p, psi);
            pi = modulus.mul(pi, psi_inv);
        }
        let psi_rev_shoup = psi_rev.iter().map(|&w| modulus.shoup(w)).collect();
        let psi_inv_rev_shoup = psi_inv_rev.iter().map(|&w| modulus.shoup(w)).collect();
        let n_inv = modulus.inv(n as u64).expect("n is invertible modulo an odd prime");
        Ok(Self {
            n,
            modulus,
            psi,
            psi_rev,
            psi_rev_shoup,
            psi_inv_rev,
            psi_inv_rev_shoup,
            n_inv,
            n_inv_shoup: modulus.shoup(n_inv),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn psi(&self) -> u64 {
        self.psi
    }

    /// Forward transform of canonical residues, output in bit-reversed order.
    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let q = &self.modulus;
        let mut t = self.n;
        let mut m = 1;
        while m < self.n {
            t >>= 1;
            for i in 0..m {
                let w = self.psi_rev[m + i];
                let ws = self.psi_rev_shoup[m + i];
                let j1 = 2 * i * t;
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = q.mul_shoup(*y, w, ws);
                    *x = q.add(u, v);
                    *y = q.sub(u, v);
                }
            }
            m <<= 1;
        }
    }

    /// Inverse of [`NttPlan::forward`], including the `1/n` factor.
    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let q = &self.modulus;
        let mut t = 1;
        let mut m = self.n;
        while m > 1 {
            let h = m >> 1;
            for i in 0..h {
                let w = self.psi_inv_rev[h + i];
                let ws = self.psi_inv_rev_shoup[h + i];
                let j1 = 2 * i * t;
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = *y;
                    *x = q.add(u, v);
                    *y = q.mul_shoup(q.sub(u, v), w, ws);
                }
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = q.mul_shoup(*x, self.n_inv, self.n_inv_shoup);
        }
    }
}
