//! Encryption, decryption and homomorphic evaluation.

use rand::{CryptoRng, RngCore};

use super::ciphertext::Ciphertext;
use super::keys::{GaloisKey, KeySwitchKey, PublicKey, RelinKey, SecretKey, ROTATION_GALOIS_ELEMENT};
use super::params::BfvContext;
use super::sampling;
use super::BfvError;
use crate::ring::{RingElement, RnsPoly};

impl BfvContext {
    fn check_plaintext(&self, m: &RingElement) -> Result<(), BfvError> {
        if m.n() != self.n() || m.modulus() != &self.t {
            return Err(BfvError::PlaintextMismatch { n: m.n(), modulus: m.modulus().value() });
        }
        Ok(())
    }

    /// `Δ·m` lifted into `R_Q`.
    fn scaled_message(&self, m: &RingElement) -> RnsPoly {
        let limbs = self
            .q
            .moduli()
            .iter()
            .zip(&self.delta_mod_q)
            .map(|(qm, &d)| {
                let ds = qm.shoup(d);
                m.coeffs().iter().map(|&c| qm.mul_shoup(qm.reduce_i64(c), d, ds)).collect()
            })
            .collect();
        self.q.from_limbs(limbs).expect("reduced residues")
    }

    /// `(p0·u + e0 + Δ·m, p1·u + e1)` with binary `u` and Gaussian errors.
    pub fn encrypt<R: RngCore + CryptoRng>(
        &self,
        pk: &PublicKey,
        m: &RingElement,
        rng: &mut R,
    ) -> Result<Ciphertext, BfvError> {
        self.check_plaintext(m)?;
        let b = &self.q;
        let n = self.n();
        let mut u = b.from_i64(&sampling::binary(n, rng))?;
        b.to_ntt(&mut u);
        let e0 = b.from_i64(&sampling::gaussian(n, self.params.noise_std, rng))?;
        let e1 = b.from_i64(&sampling::gaussian(n, self.params.noise_std, rng))?;
        let mut c0 = b.mul_pointwise(&pk.p0, &u);
        let mut c1 = b.mul_pointwise(&pk.p1, &u);
        b.from_ntt(&mut c0);
        b.from_ntt(&mut c1);
        b.add_assign(&mut c0, &e0);
        b.add_assign(&mut c0, &self.scaled_message(m));
        b.add_assign(&mut c1, &e1);
        Ok(Ciphertext { parts: vec![c0, c1], delta_product: 0, depth: 0 })
    }

    /// Noiseless encryption `(Δ·m, 0)`; decrypts to `m` under any key.
    pub fn trivial(&self, m: &RingElement) -> Result<Ciphertext, BfvError> {
        self.check_plaintext(m)?;
        Ok(Ciphertext { parts: vec![self.scaled_message(m), self.q.zero()], delta_product: 0, depth: 0 })
    }

    /// `c0 + c1·s (+ c2·s^2)` in coefficient form.
    fn phase(&self, sk: &SecretKey, ct: &Ciphertext) -> RnsPoly {
        let b = &self.q;
        let mut acc = b.zero();
        b.to_ntt(&mut acc);
        let mut s_pow = sk.ntt.clone();
        for (i, part) in ct.parts.iter().enumerate().skip(1) {
            let mut p = part.clone();
            b.to_ntt(&mut p);
            b.mul_acc(&mut acc, &p, &s_pow);
            if i + 1 < ct.parts.len() {
                s_pow = b.mul_pointwise(&s_pow, &sk.ntt);
            }
        }
        b.from_ntt(&mut acc);
        b.add(&acc, &ct.parts[0])
    }

    /// `[round((T/Q)·[c0 + c1·s]_Q)]_T`, also accepting three-part ciphertexts.
    pub fn decrypt(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<RingElement, BfvError> {
        self.check_parts(ct, &[2, 3])?;
        let x = self.phase(sk, ct);
        let t = &self.t;
        let coeffs: Vec<i64> = (0..self.n())
            .map(|j| {
                let b = self.q.garner(|i| x.limbs[i][j]);
                let (r, _) = self.scale_round(b);
                t.to_minimal(t.reduce_u128(r))
            })
            .collect();
        Ok(RingElement::from_coeffs(&coeffs, self.t)?)
    }

    /// Remaining noise budget in bits.
    ///
    /// With `x = c0 + c1·s = Δ·m + e (mod Q)`, decryption is exact whenever
    /// `‖e‖∞ < (Q - (Q mod T)·T) / (2T)`. The margin is `log2` of that
    /// threshold minus `log2 ‖e‖∞`, so a positive margin guarantees
    /// correct decryption.
    pub fn noise_margin(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<f64, BfvError> {
        let m = self.decrypt(sk, ct)?;
        let x = self.phase(sk, ct);
        let e = self.q.sub(&x, &self.scaled_message(&m));
        let max_e = self.q.to_centered(&e).iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        let t = self.params.t as u128;
        let threshold = (self.q_u128 - self.q_mod_t as u128 * t) as f64 / (2.0 * t as f64);
        Ok(threshold.log2() - (max_e.max(1) as f64).log2())
    }

    fn check_parts(&self, ct: &Ciphertext, allowed: &[usize]) -> Result<(), BfvError> {
        if !allowed.contains(&ct.parts.len()) {
            return Err(BfvError::PartCount { expected: allowed[0], found: ct.parts.len() });
        }
        Ok(())
    }

    pub fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BfvError> {
        self.check_parts(a, &[2])?;
        self.check_parts(b, &[2])?;
        if a.delta_product != b.delta_product {
            return Err(BfvError::ScaleMismatch { left: a.delta_product, right: b.delta_product });
        }
        Ok(Ciphertext {
            parts: vec![self.q.add(&a.parts[0], &b.parts[0]), self.q.add(&a.parts[1], &b.parts[1])],
            delta_product: a.delta_product,
            depth: a.depth.max(b.depth),
        })
    }

    /// Tensor product rescaled by `T/Q` with exact rounding; returns three parts.
    pub fn mult(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BfvError> {
        self.check_parts(a, &[2])?;
        self.check_parts(b, &[2])?;
        let depth = a.depth.max(b.depth) + 1;
        if depth > self.params.max_depth {
            return Err(BfvError::NoiseBudget { depth, max_depth: self.params.max_depth });
        }
        let tb = &self.tensor;
        let lift = |p: &RnsPoly| {
            let mut x = tb.from_i128(&self.q.to_centered(p)).expect("matching degree");
            tb.to_ntt(&mut x);
            x
        };
        let (a0, a1, b0, b1) = (lift(&a.parts[0]), lift(&a.parts[1]), lift(&b.parts[0]), lift(&b.parts[1]));
        let mut t0 = tb.mul_pointwise(&a0, &b0);
        let mut t1 = tb.mul_pointwise(&a0, &b1);
        tb.mul_acc(&mut t1, &a1, &b0);
        let mut t2 = tb.mul_pointwise(&a1, &b1);
        let parts = [&mut t0, &mut t1, &mut t2]
            .into_iter()
            .map(|t| {
                tb.from_ntt(t);
                self.rescale(t)
            })
            .collect();
        Ok(Ciphertext { parts, delta_product: a.delta_product + b.delta_product, depth })
    }

    /// `round((T/Q)·x)` mod `Q` for an exact integer `x` held in the tensor basis.
    fn rescale(&self, x: &RnsPoly) -> RnsPoly {
        let k = self.q.len();
        let aux = self.aux.moduli();
        let qm = self.q.moduli();
        let mut limbs = vec![vec![0u64; self.n()]; k];
        for j in 0..self.n() {
            // x = a·Q + b with b in [0, Q)
            let b = self.q.garner(|i| x.limbs[i][j]);
            let a = self.aux.garner_signed(|i| {
                let p = &aux[i];
                p.mul(p.sub(x.limbs[k + i][j], p.reduce_u128(b)), self.q_inv_mod_aux[i])
            });
            let (r, _) = self.scale_round(b);
            for (i, m) in qm.iter().enumerate() {
                limbs[i][j] = m.add(m.mul(self.t_mod_q[i], m.reduce_i128(a)), m.reduce_u128(r));
            }
        }
        self.q.from_limbs(limbs).expect("reduced residues")
    }

    /// Balanced base-`W` digits of a coefficient-form polynomial:
    /// `sum_i digit_i · W^i = p` coefficientwise over the integers.
    pub fn decompose(&self, p: &RnsPoly) -> Vec<Vec<i64>> {
        let centered = self.q.to_centered(p);
        let w = self.params.w as i128;
        let (pow2, shift) = (self.params.w.is_power_of_two(), self.params.w.trailing_zeros());
        let mut digits = vec![vec![0i64; self.n()]; self.ell + 1];
        for (j, &c) in centered.iter().enumerate() {
            let mut rest = c;
            for digit in digits.iter_mut().take(self.ell) {
                let mut d = if pow2 { rest & (w - 1) } else { rest.rem_euclid(w) };
                if 2 * d > w {
                    d -= w;
                }
                digit[j] = d as i64;
                rest = if pow2 { (rest - d) >> shift } else { (rest - d) / w };
            }
            digits[self.ell][j] = i64::try_from(rest).expect("top digit is small");
        }
        digits
    }

    /// Returns `(d0, d1)` with `d0 + d1·s ≈ p·t` for the key's target `t`.
    fn key_switch(&self, key: &KeySwitchKey, p: &RnsPoly) -> (RnsPoly, RnsPoly) {
        let b = &self.q;
        let mut acc0 = b.zero();
        let mut acc1 = b.zero();
        b.to_ntt(&mut acc0);
        b.to_ntt(&mut acc1);
        for (digit, (k0, k1)) in self.decompose(p).iter().zip(&key.pairs) {
            let mut d = b.from_i64(digit).expect("matching degree");
            b.to_ntt(&mut d);
            b.mul_acc(&mut acc0, &d, k0);
            b.mul_acc(&mut acc1, &d, k1);
        }
        b.from_ntt(&mut acc0);
        b.from_ntt(&mut acc1);
        (acc0, acc1)
    }

    /// Fold the `c2·s^2` term back into two parts.
    pub fn relin(&self, rlk: &RelinKey, ct: &Ciphertext) -> Result<Ciphertext, BfvError> {
        self.check_parts(ct, &[3])?;
        let (d0, d1) = self.key_switch(&rlk.0, &ct.parts[2]);
        Ok(Ciphertext {
            parts: vec![self.q.add(&ct.parts[0], &d0), self.q.add(&ct.parts[1], &d1)],
            delta_product: ct.delta_product,
            depth: ct.depth,
        })
    }

    /// `mult` followed by `relin`.
    pub fn mult_relin(&self, rlk: &RelinKey, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BfvError> {
        self.relin(rlk, &self.mult(a, b)?)
    }

    /// Apply `X -> X^3` and switch back to `s`, shifting the usable slot row
    /// one position to the left.
    pub fn rotate(&self, gk: &GaloisKey, ct: &Ciphertext) -> Result<Ciphertext, BfvError> {
        self.check_parts(ct, &[2])?;
        let c0 = self.q.automorphism(&ct.parts[0], ROTATION_GALOIS_ELEMENT)?;
        let c1 = self.q.automorphism(&ct.parts[1], ROTATION_GALOIS_ELEMENT)?;
        let (d0, d1) = self.key_switch(&gk.0, &c1);
        Ok(Ciphertext { parts: vec![self.q.add(&c0, &d0), d1], delta_product: ct.delta_product, depth: ct.depth })
    }
}
