//! Residue-number-system polynomials over a product of word-sized NTT primes.
//!
//! Limb residues are stored canonically in `[0, q_i)`. The minimal (centered)
//! representative of each coefficient modulo the full product is available
//! through [`RnsBasis::to_centered`].

use super::modulus::{is_prime_u64, Modulus};
use super::ntt::NttPlan;
use super::RingError;

/// Largest primes below `2^bits` that are `≡ 1 (mod 2n)`, in descending order.
pub fn ntt_primes(bits: u32, n: usize, count: usize) -> Vec<u64> {
    let step = 2 * n as u64;
    let top = (1u64 << bits) - 1;
    let mut cand = top - (top % step) + 1;
    if cand > top {
        cand -= step;
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count && cand > step {
        if is_prime_u64(cand) {
            out.push(cand);
        }
        cand -= step;
    }
    out
}

/// Smallest primes above `2^bits` that are `≡ 1 (mod 2n)`, in ascending order.
pub fn ntt_primes_above(bits: u32, n: usize, count: usize) -> Vec<u64> {
    let step = 2 * n as u64;
    let mut cand = (1u64 << bits) + 1;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if is_prime_u64(cand) {
            out.push(cand);
        }
        cand += step;
    }
    out
}

/// A polynomial stored as one residue vector per limb.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPoly {
    pub(crate) limbs: Vec<Vec<u64>>,
    pub(crate) ntt_form: bool,
}

impl RnsPoly {
    pub fn limbs(&self) -> &[Vec<u64>] {
        &self.limbs
    }

    pub fn is_ntt_form(&self) -> bool {
        self.ntt_form
    }

    pub fn n(&self) -> usize {
        self.limbs.first().map_or(0, Vec::len)
    }
}

/// The modulus chain `q_0 ... q_{k-1}` with NTT plans and CRT constants.
#[derive(Clone, Debug)]
pub struct RnsBasis {
    n: usize,
    moduli: Vec<Modulus>,
    plans: Vec<NttPlan>,
    // garner_inv[i] = (q_0 ... q_{i-1})^-1 mod q_i
    garner_inv: Vec<u64>,
    // radix_mod[i][k] = (q_0 ... q_{k-1}) mod q_i for k < i
    radix_mod: Vec<Vec<u64>>,
    // radix[k] = q_0 ... q_{k-1} modulo 2^128
    radix_wrapping: Vec<u128>,
    product: Option<u128>,
}

impl RnsBasis {
    pub fn new(n: usize, primes: &[u64]) -> Result<Self, RingError> {
        if primes.is_empty() {
            return Err(RingError::EmptyBasis);
        }
        let moduli = primes.iter().map(|&p| Modulus::new(p)).collect::<Result<Vec<_>, _>>()?;
        for (i, a) in primes.iter().enumerate() {
            if primes[..i].contains(a) {
                return Err(RingError::DuplicatePrime(*a));
            }
        }
        let plans = moduli.iter().map(|&m| NttPlan::new(n, m)).collect::<Result<Vec<_>, _>>()?;
        let mut garner_inv = vec![1u64];
        for i in 1..moduli.len() {
            let qi = &moduli[i];
            let prefix = moduli[..i].iter().fold(1u64, |acc, m| qi.mul(acc, qi.reduce_u64(m.value())));
            garner_inv.push(qi.inv(prefix).expect("distinct primes are coprime"));
        }
        let radix_mod = moduli
            .iter()
            .enumerate()
            .map(|(i, qi)| {
                let mut r = Vec::with_capacity(i);
                let mut acc = 1u64;
                for m in &moduli[..i] {
                    r.push(acc);
                    acc = qi.mul(acc, qi.reduce_u64(m.value()));
                }
                r
            })
            .collect();
        let mut radix_wrapping = Vec::with_capacity(moduli.len());
        let mut acc = 1u128;
        for m in &moduli {
            radix_wrapping.push(acc);
            acc = acc.wrapping_mul(m.value() as u128);
        }
        let product = primes.iter().try_fold(1u128, |acc, &p| acc.checked_mul(p as u128));
        Ok(Self { n, moduli, plans, garner_inv, radix_mod, radix_wrapping, product })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moduli(&self) -> &[Modulus] {
        &self.moduli
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn plans(&self) -> &[NttPlan] {
        &self.plans
    }

    /// The full modulus when it fits in 128 bits.
    pub fn product(&self) -> Option<u128> {
        self.product
    }

    /// `log2` of the full modulus.
    pub fn log2_product(&self) -> f64 {
        self.moduli.iter().map(|m| (m.value() as f64).log2()).sum()
    }

    pub fn zero(&self) -> RnsPoly {
        RnsPoly { limbs: vec![vec![0; self.n]; self.len()], ntt_form: false }
    }

    pub fn from_i64(&self, coeffs: &[i64]) -> Result<RnsPoly, RingError> {
        self.check_len(coeffs.len())?;
        Ok(RnsPoly {
            limbs: self.moduli.iter().map(|m| coeffs.iter().map(|&c| m.reduce_i64(c)).collect()).collect(),
            ntt_form: false,
        })
    }

    pub fn from_i128(&self, coeffs: &[i128]) -> Result<RnsPoly, RingError> {
        self.check_len(coeffs.len())?;
        Ok(RnsPoly {
            limbs: self.moduli.iter().map(|m| coeffs.iter().map(|&c| m.reduce_i128(c)).collect()).collect(),
            ntt_form: false,
        })
    }

    /// Build from raw canonical limbs, validating ranges and shape.
    pub fn from_limbs(&self, limbs: Vec<Vec<u64>>) -> Result<RnsPoly, RingError> {
        if limbs.len() != self.len() {
            return Err(RingError::LimbCount { expected: self.len(), found: limbs.len() });
        }
        for (limb, m) in limbs.iter().zip(&self.moduli) {
            self.check_len(limb.len())?;
            if let Some(&bad) = limb.iter().find(|&&v| v >= m.value()) {
                return Err(RingError::ResidueOutOfRange { value: bad, modulus: m.value() });
            }
        }
        Ok(RnsPoly { limbs, ntt_form: false })
    }

    /// Centered lift of every coefficient modulo the full product.
    ///
    /// Requires the product to fit in 127 bits.
    pub fn to_centered(&self, p: &RnsPoly) -> Vec<i128> {
        assert!(!p.ntt_form, "to_centered expects coefficient form");
        let q = self.product.filter(|&q| q < 1u128 << 127).expect("basis product exceeds 127 bits");
        let half = q / 2;
        (0..self.n)
            .map(|j| {
                let x = self.garner(|i| p.limbs[i][j]);
                if x > half {
                    x as i128 - q as i128
                } else {
                    x as i128
                }
            })
            .collect()
    }

    /// Mixed-radix digits `d_i` with `x = sum_i d_i * q_0 ... q_{i-1}`.
    pub fn mixed_radix(&self, residue: impl Fn(usize) -> u64, digits: &mut [u64]) {
        for i in 0..self.len() {
            let qi = &self.moduli[i];
            let mut partial = 0u64;
            for (k, &d) in digits[..i].iter().enumerate() {
                partial = qi.add(partial, qi.mul(qi.reduce_u64(d), self.radix_mod[i][k]));
            }
            digits[i] = qi.mul(qi.sub(residue(i), partial), self.garner_inv[i]);
        }
    }

    /// Canonical lift in `[0, Q)` of one coefficient given its residues.
    ///
    /// Requires the product to fit in 128 bits.
    pub fn garner(&self, residue: impl Fn(usize) -> u64) -> u128 {
        let mut digits = [0u64; 8];
        let k = self.len();
        assert!(k <= digits.len(), "garner supports at most 8 limbs");
        self.mixed_radix(residue, &mut digits[..k]);
        digits[..k].iter().zip(&self.radix_wrapping).fold(0u128, |acc, (&d, &r)| acc + d as u128 * r)
    }

    /// Signed lift of one coefficient whose true value `a` satisfies
    /// `|a| < 2^127` and `|a|` well below half the product.
    ///
    /// The top mixed-radix digit is centered and the sum is formed in
    /// wrapping arithmetic, which is exact because the result fits in `i128`.
    pub fn garner_signed(&self, residue: impl Fn(usize) -> u64) -> i128 {
        let mut digits = [0u64; 8];
        let k = self.len();
        assert!(k <= digits.len(), "garner supports at most 8 limbs");
        self.mixed_radix(residue, &mut digits[..k]);
        let mut acc = 0i128;
        for i in 0..k {
            let mut d = digits[i] as i128;
            if i == k - 1 && 2 * digits[i] > self.moduli[i].value() {
                d -= self.moduli[i].value() as i128;
            }
            acc = acc.wrapping_add(d.wrapping_mul(self.radix_wrapping[i] as i128));
        }
        acc
    }

    pub fn to_ntt(&self, p: &mut RnsPoly) {
        if !p.ntt_form {
            for (limb, plan) in p.limbs.iter_mut().zip(&self.plans) {
                plan.forward(limb);
            }
            p.ntt_form = true;
        }
    }

    pub fn from_ntt(&self, p: &mut RnsPoly) {
        if p.ntt_form {
            for (limb, plan) in p.limbs.iter_mut().zip(&self.plans) {
                plan.inverse(limb);
            }
            p.ntt_form = false;
        }
    }

    fn zip_with(&self, a: &RnsPoly, b: &RnsPoly, f: impl Fn(&Modulus, u64, u64) -> u64) -> RnsPoly {
        assert_eq!(a.ntt_form, b.ntt_form, "operands must share representation");
        let limbs = self
            .moduli
            .iter()
            .zip(a.limbs.iter().zip(&b.limbs))
            .map(|(m, (x, y))| x.iter().zip(y).map(|(&u, &v)| f(m, u, v)).collect())
            .collect();
        RnsPoly { limbs, ntt_form: a.ntt_form }
    }

    pub fn add(&self, a: &RnsPoly, b: &RnsPoly) -> RnsPoly {
        self.zip_with(a, b, |m, u, v| m.add(u, v))
    }

    pub fn sub(&self, a: &RnsPoly, b: &RnsPoly) -> RnsPoly {
        self.zip_with(a, b, |m, u, v| m.sub(u, v))
    }

    pub fn add_assign(&self, a: &mut RnsPoly, b: &RnsPoly) {
        assert_eq!(a.ntt_form, b.ntt_form, "operands must share representation");
        for (m, (x, y)) in self.moduli.iter().zip(a.limbs.iter_mut().zip(&b.limbs)) {
            for (u, &v) in x.iter_mut().zip(y) {
                *u = m.add(*u, v);
            }
        }
    }

    pub fn neg(&self, a: &RnsPoly) -> RnsPoly {
        RnsPoly {
            limbs: self.moduli.iter().zip(&a.limbs).map(|(m, x)| x.iter().map(|&u| m.neg(u)).collect()).collect(),
            ntt_form: a.ntt_form,
        }
    }

    /// Multiply by an integer scalar given as a signed 128-bit value.
    pub fn scalar_mul(&self, a: &RnsPoly, s: i128) -> RnsPoly {
        RnsPoly {
            limbs: self
                .moduli
                .iter()
                .zip(&a.limbs)
                .map(|(m, x)| {
                    let sr = m.reduce_i128(s);
                    let ss = m.shoup(sr);
                    x.iter().map(|&u| m.mul_shoup(u, sr, ss)).collect()
                })
                .collect(),
            ntt_form: a.ntt_form,
        }
    }

    /// Pointwise product of two NTT-form polynomials.
    pub fn mul_pointwise(&self, a: &RnsPoly, b: &RnsPoly) -> RnsPoly {
        assert!(a.ntt_form && b.ntt_form, "pointwise product expects NTT form");
        self.zip_with(a, b, |m, u, v| m.mul(u, v))
    }

    /// `acc += a * b` for NTT-form operands.
    pub fn mul_acc(&self, acc: &mut RnsPoly, a: &RnsPoly, b: &RnsPoly) {
        assert!(acc.ntt_form && a.ntt_form && b.ntt_form, "mul_acc expects NTT form");
        for (m, (z, (x, y))) in self.moduli.iter().zip(acc.limbs.iter_mut().zip(a.limbs.iter().zip(&b.limbs))) {
            for (w, (&u, &v)) in z.iter_mut().zip(x.iter().zip(y)) {
                *w = m.add(*w, m.mul(u, v));
            }
        }
    }

    /// Negacyclic product of coefficient-form inputs, returned in coefficient form.
    pub fn mul(&self, a: &RnsPoly, b: &RnsPoly) -> RnsPoly {
        let (mut fa, mut fb) = (a.clone(), b.clone());
        self.to_ntt(&mut fa);
        self.to_ntt(&mut fb);
        let mut out = self.mul_pointwise(&fa, &fb);
        self.from_ntt(&mut out);
        out
    }

    /// `a(X) -> a(X^g)` on a coefficient-form polynomial.
    pub fn automorphism(&self, a: &RnsPoly, g: usize) -> Result<RnsPoly, RingError> {
        assert!(!a.ntt_form, "automorphism expects coefficient form");
        if g.is_multiple_of(2) {
            return Err(RingError::EvenGaloisElement(g));
        }
        let n = self.n;
        let mut limbs = vec![vec![0u64; n]; self.len()];
        for j in 0..n {
            let k = (j * g) % (2 * n);
            for (i, m) in self.moduli.iter().enumerate() {
                let c = a.limbs[i][j];
                if k < n {
                    limbs[i][k] = c;
                } else {
                    limbs[i][k - n] = m.neg(c);
                }
            }
        }
        Ok(RnsPoly { limbs, ntt_form: false })
    }

    fn check_len(&self, len: usize) -> Result<(), RingError> {
        if len != self.n {
            return Err(RingError::Mismatch { left: (len, 0), right: (self.n, 0) });
        }
        Ok(())
    }
}
