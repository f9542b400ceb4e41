//! Parameter sets and the precomputed evaluation context.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::BfvError;
use crate::ring::{Modulus, RnsBasis};

/// Plaintext modulus of the default profile: the largest 25-bit prime `≡ 1 (mod 8192)`.
pub const DEFAULT_T: u64 = 33538049;
/// Ciphertext limbs of the default profile: the two smallest primes above
/// `2^54` that are `≡ 1 (mod 8192)`. Their product has 109 bits.
pub const DEFAULT_Q_PRIMES: [u64; 2] = [18014398509506561, 18014398509998081];
/// Auxiliary primes used only while tensoring in homomorphic multiplication.
pub const DEFAULT_AUX_PRIMES: [u64; 3] = [2305843009213554689, 2305843009213489153, 2305843009213317121];
/// Plaintext modulus of the toy profile.
pub const TOY_T: u64 = 65537;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfvParams {
    /// Ring degree, a power of two.
    pub n: usize,
    /// Plaintext modulus, prime and `≡ 1 (mod 2N)`.
    pub t: u64,
    /// Ciphertext modulus limbs.
    pub q_primes: Vec<u64>,
    /// Auxiliary limbs for exact tensoring.
    pub aux_primes: Vec<u64>,
    /// Relinearization / key-switching decomposition base.
    pub w: u64,
    /// Standard deviation of the error distribution.
    pub noise_std: f64,
    /// Claimed security level in bits.
    pub lambda: u32,
    /// Number of multiplications a ciphertext may go through.
    pub max_depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Default,
    Toy,
}

impl std::str::FromStr for Profile {
    type Err = BfvError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(Profile::Default),
            "toy" => Ok(Profile::Toy),
            other => Err(BfvError::InvalidParams(format!("unknown profile '{other}' (expected default|toy)"))),
        }
    }
}

impl BfvParams {
    /// `N = 4096`, 25-bit `T`, 109-bit `Q`, `W = 2^20`, 128-bit security.
    pub fn default_profile() -> Self {
        Self {
            n: 4096,
            t: DEFAULT_T,
            q_primes: DEFAULT_Q_PRIMES.to_vec(),
            aux_primes: DEFAULT_AUX_PRIMES.to_vec(),
            w: 1 << 20,
            noise_std: 3.2,
            lambda: 128,
            max_depth: 1,
        }
    }

    /// `N = 16` for fast property testing. Provides no security.
    pub fn toy_profile() -> Self {
        Self { n: 16, t: TOY_T, lambda: 0, ..Self::default_profile() }
    }

    pub fn for_profile(p: Profile) -> Self {
        match p {
            Profile::Default => Self::default_profile(),
            Profile::Toy => Self::toy_profile(),
        }
    }

    pub fn log2_q(&self) -> f64 {
        self.q_primes.iter().map(|&q| (q as f64).log2()).sum()
    }

    /// Bit length of `Q`.
    pub fn q_bits(&self) -> u32 {
        self.log2_q().floor() as u32 + 1
    }

    /// `floor(log_W Q)`; digits run over `0..=ell`.
    pub fn ell(&self) -> usize {
        let q: u128 = self.q_primes.iter().map(|&p| p as u128).product();
        let mut ell = 0;
        let mut pow = self.w as u128;
        while pow <= q {
            ell += 1;
            match pow.checked_mul(self.w as u128) {
                Some(p) => pow = p,
                None => break,
            }
        }
        ell
    }

    pub fn validate(&self) -> Result<(), BfvError> {
        let bad = |m: String| Err(BfvError::InvalidParams(m));
        if self.n < 4 || !self.n.is_power_of_two() {
            return bad(format!("N = {} must be a power of two >= 4", self.n));
        }
        let t = Modulus::new(self.t).map_err(|e| BfvError::InvalidParams(e.to_string()))?;
        if !t.is_ntt_friendly(self.n) {
            return bad(format!("T = {} must be prime and ≡ 1 mod 2N = {}", self.t, 2 * self.n));
        }
        if self.q_primes.is_empty() {
            return bad("Q needs at least one limb".into());
        }
        let log_q = self.log2_q();
        if log_q >= 126.0 {
            return bad(format!("log2 Q = {log_q:.1} exceeds the 126-bit limit of the exact lifts"));
        }
        for &q in self.q_primes.iter().chain(&self.aux_primes) {
            let m = Modulus::new(q).map_err(|e| BfvError::InvalidParams(e.to_string()))?;
            if !m.is_ntt_friendly(self.n) {
                return bad(format!("limb {q} must be prime and ≡ 1 mod 2N"));
            }
            if q == self.t {
                return bad("Q and T must be coprime".into());
            }
        }
        if self.w < 2 {
            return bad(format!("W = {} must be at least 2", self.w));
        }
        if self.w >= 1 << 62 {
            return bad(format!("W = {} must be below 2^62", self.w));
        }
        if self.ell() < 1 {
            return bad("floor(log_W Q) must be at least 1".into());
        }
        // tensor coefficients are bounded by N (Q/2)^2; the quotient by Q must
        // be recoverable from the auxiliary limbs and fit in i128
        let log_quot = (self.n as f64).log2() + log_q - 2.0;
        let log_aux: f64 = self.aux_primes.iter().map(|&p| (p as f64).log2()).sum();
        if log_aux < log_quot + 3.0 || log_quot > 125.0 {
            return bad(format!(
                "auxiliary limbs ({log_aux:.1} bits) cannot hold the tensor quotient ({log_quot:.1} bits)"
            ));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std = {} must be positive", self.noise_std));
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1".into());
        }
        Ok(())
    }
}

/// Validated parameters plus every table the scheme needs at run time.
#[derive(Debug)]
pub struct BfvContext {
    pub(crate) params: BfvParams,
    pub(crate) q: RnsBasis,
    // Q limbs followed by auxiliary limbs, used for exact tensoring
    pub(crate) tensor: RnsBasis,
    pub(crate) aux: RnsBasis,
    pub(crate) t: Modulus,
    pub(crate) q_u128: u128,
    pub(crate) delta_mod_q: Vec<u64>,
    pub(crate) t_mod_q: Vec<u64>,
    // Q^-1 modulo each auxiliary prime
    pub(crate) q_inv_mod_aux: Vec<u64>,
    pub(crate) ell: usize,
    pub(crate) w_pows: Vec<u128>,
    // Q mod T, used by the exact noise-margin threshold
    pub(crate) q_mod_t: u64,
}

impl BfvContext {
    pub fn new(params: BfvParams) -> Result<Arc<Self>, BfvError> {
        params.validate()?;
        let q = RnsBasis::new(params.n, &params.q_primes)?;
        let mut all = params.q_primes.clone();
        all.extend(&params.aux_primes);
        let tensor = RnsBasis::new(params.n, &all)?;
        let aux = RnsBasis::new(params.n, &params.aux_primes)?;
        let t = Modulus::new(params.t)?;
        let q_u128 = q.product().expect("validated below 2^126");
        let delta = q_u128 / params.t as u128;
        let delta_mod_q = q.moduli().iter().map(|m| m.reduce_u128(delta)).collect();
        let t_mod_q = q.moduli().iter().map(|m| m.reduce_u64(params.t)).collect();
        let q_inv_mod_aux =
            aux.moduli().iter().map(|m| m.inv(m.reduce_u128(q_u128)).expect("aux primes are coprime to Q")).collect();
        let ell = params.ell();
        let mut w_pows = Vec::with_capacity(ell + 1);
        let mut p = 1u128;
        for _ in 0..=ell {
            w_pows.push(p);
            p = p.saturating_mul(params.w as u128);
        }
        let q_mod_t = (q_u128 % params.t as u128) as u64;
        Ok(Arc::new(Self {
            params,
            q,
            tensor,
            aux,
            t,
            q_u128,
            delta_mod_q,
            t_mod_q,
            q_inv_mod_aux,
            ell,
            w_pows,
            q_mod_t,
        }))
    }

    pub fn params(&self) -> &BfvParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn q_basis(&self) -> &RnsBasis {
        &self.q
    }

    pub fn plain_modulus(&self) -> &Modulus {
        &self.t
    }

    /// The full ciphertext modulus `Q`.
    pub fn q(&self) -> u128 {
        self.q_u128
    }

    /// `Δ = floor(Q / T)`.
    pub fn delta(&self) -> u128 {
        self.q_u128 / self.params.t as u128
    }

    /// Number of key-switching digits minus one.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `round(T·b / Q)` and the exact remainder `T·b - round·Q` for `b` in `[0, Q)`.
    pub(crate) fn scale_round(&self, b: u128) -> (u128, i128) {
        let q = self.q_u128;
        let t = self.params.t as u128;
        let mut est = ((b as f64 / q as f64) * t as f64).round() as u128;
        loop {
            // exact because the true difference is tiny compared to 2^127
            let diff = t.wrapping_mul(b).wrapping_sub(est.wrapping_mul(q)) as i128;
            if 2 * diff >= q as i128 {
                est += 1;
            } else if 2 * diff < -(q as i128) {
                est -= 1;
            } else {
                return (est, diff);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_shape() {
        let p = BfvParams::default_profile();
        p.validate().unwrap();
        assert_eq!(p.q_bits(), 109);
        assert_eq!(p.ell(), 5);
        assert_eq!(p.t % 8192, 1);
        assert_eq!(64 - p.t.leading_zeros(), 25);
        BfvParams::toy_profile().validate().unwrap();
    }

    #[test]
    fn rejects_invalid() {
        let mut p = BfvParams::toy_profile();
        p.t = 17;
        assert!(p.validate().is_err());
        let mut p = BfvParams::toy_profile();
        p.w = 1;
        assert!(p.validate().is_err());
        let mut p = BfvParams::toy_profile();
        p.aux_primes.truncate(1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn scale_round_matches_rational_rounding() {
        use num_bigint::BigInt;
        let ctx = BfvContext::new(BfvParams::toy_profile()).unwrap();
        let q = ctx.q();
        let t = ctx.params.t as u128;
        for b in [0u128, 1, q / 2, q / 2 + 1, q - 1, q / 3, 123456789012345678901234567 % q] {
            let (r, diff) = ctx.scale_round(b);
            let (bt, bb, bq) = (BigInt::from(t), BigInt::from(b), BigInt::from(q));
            // floor((2Tb + Q) / 2Q)
            let expected: BigInt = (BigInt::from(2) * &bt * &bb + &bq) / (BigInt::from(2) * &bq);
            assert_eq!(BigInt::from(r), expected, "b={b}");
            assert_eq!(BigInt::from(diff), &bt * &bb - BigInt::from(r) * &bq);
        }
    }
}
