//! Polynomials in `Z_n[X]/(X^N + 1)` with coefficients kept in minimal form.

use super::modulus::Modulus;
use super::RingError;

/// An element of `R_n`. Every stored coefficient lies in `(-n/2, n/2]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    coeffs: Vec<i64>,
    modulus: Modulus,
}

impl RingElement {
    /// Build from arbitrary integer coefficients, reducing each to minimal form.
    pub fn from_coeffs(coeffs: &[i64], modulus: Modulus) -> Result<Self, RingError> {
        check_degree(coeffs.len())?;
        Ok(Self { coeffs: coeffs.iter().map(|&c| modulus.to_minimal(modulus.reduce_i64(c))).collect(), modulus })
    }

    pub fn from_i128(coeffs: &[i128], modulus: Modulus) -> Result<Self, RingError> {
        check_degree(coeffs.len())?;
        Ok(Self { coeffs: coeffs.iter().map(|&c| modulus.to_minimal(modulus.reduce_i128(c))).collect(), modulus })
    }

    pub fn zero(n: usize, modulus: Modulus) -> Result<Self, RingError> {
        check_degree(n)?;
        Ok(Self { coeffs: vec![0; n], modulus })
    }

    pub fn constant(n: usize, c: i64, modulus: Modulus) -> Result<Self, RingError> {
        let mut e = Self::zero(n, modulus)?;
        e.coeffs[0] = modulus.to_minimal(modulus.reduce_i64(c));
        Ok(e)
    }

    /// The monomial `X^k` for `k < n`.
    pub fn monomial(n: usize, k: usize, modulus: Modulus) -> Result<Self, RingError> {
        let mut e = Self::zero(n, modulus)?;
        if k >= n {
            return Err(RingError::InvalidDegree(k));
        }
        e.coeffs[k] = modulus.to_minimal(1);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Scan every coefficient against the minimal-residue interval.
    pub fn is_minimal(&self) -> bool {
        let n = self.modulus.value() as i128;
        self.coeffs.iter().all(|&c| {
            let c = c as i128;
            -n < 2 * c && 2 * c <= n
        })
    }

    pub fn infinity_norm(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), RingError> {
        if self.n() != other.n() || self.modulus != other.modulus {
            return Err(RingError::Mismatch {
                left: (self.n(), self.modulus.value()),
                right: (other.n(), other.modulus.value()),
            });
        }
        Ok(())
    }

    fn map2(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, RingError> {
        self.check_compatible(other)?;
        let m = self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| m.to_minimal(f(m.reduce_i64(a), m.reduce_i64(b))))
            .collect();
        Ok(Self { coeffs, modulus: m })
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        let m = self.modulus;
        self.map2(other, |a, b| m.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        let m = self.modulus;
        self.map2(other, |a, b| m.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self { coeffs: self.coeffs.iter().map(|&a| m.to_minimal(m.neg(m.reduce_i64(a)))).collect(), modulus: m }
    }

    pub fn scalar_mul(&self, s: i64) -> Self {
        let m = self.modulus;
        let s = m.reduce_i64(s);
        Self { coeffs: self.coeffs.iter().map(|&a| m.to_minimal(m.mul(m.reduce_i64(a), s))).collect(), modulus: m }
    }

    /// Negacyclic product by direct convolution with `X^N = -1` folding.
    ///
    /// Works for any modulus. NTT-friendly plaintext moduli can use
    /// [`super::NttTables::mul`] instead, which gives the same result.
    pub fn mul_negacyclic(&self, other: &Self) -> Result<Self, RingError> {
        self.check_compatible(other)?;
        let n = self.n();
        let m = self.modulus;
        let a: Vec<u64> = self.coeffs.iter().map(|&c| m.reduce_i64(c)).collect();
        let b: Vec<u64> = other.coeffs.iter().map(|&c| m.reduce_i64(c)).collect();
        let mut acc = vec![0u64; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                let p = m.mul(ai, bj);
                let k = i + j;
                if k < n {
                    acc[k] = m.add(acc[k], p);
                } else {
                    acc[k - n] = m.sub(acc[k - n], p);
                }
            }
        }
        Ok(Self { coeffs: acc.into_iter().map(|c| m.to_minimal(c)).collect(), modulus: m })
    }

    /// The ring automorphism `a(X) -> a(X^g)` for odd `g`.
    pub fn automorphism(&self, g: usize) -> Result<Self, RingError> {
        let n = self.n();
        if g.is_multiple_of(2) {
            return Err(RingError::EvenGaloisElement(g));
        }
        let m = self.modulus;
        let mut out = vec![0i64; n];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let k = (j * g) % (2 * n);
            if k < n {
                out[k] = c;
            } else {
                out[k - n] = m.to_minimal(m.neg(m.reduce_i64(c)));
            }
        }
        Ok(Self { coeffs: out, modulus: m })
    }
}

pub(crate) fn check_degree(n: usize) -> Result<(), RingError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(RingError::InvalidDegree(n));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m17() -> Modulus {
        Modulus::new(17).unwrap()
    }

    #[test]
    fn wrap_around_sign() {
        let n = 8;
        let x = RingElement::monomial(n, 1, m17()).unwrap();
        let xn1 = RingElement::monomial(n, n - 1, m17()).unwrap();
        let p = x.mul_negacyclic(&xn1).unwrap();
        assert_eq!(p, RingElement::constant(n, -1, m17()).unwrap());
    }

    #[test]
    fn identities() {
        let a = RingElement::from_coeffs(&[5, -3, 8, 16, 0, 1, 2, 9], m17()).unwrap();
        assert!(a.is_minimal());
        let zero = RingElement::zero(8, m17()).unwrap();
        let one = RingElement::constant(8, 1, m17()).unwrap();
        assert_eq!(a.add(&zero).unwrap(), a);
        assert!(a.sub(&a).unwrap().is_zero());
        assert_eq!(a.mul_negacyclic(&one).unwrap(), a);
    }

    #[test]
    fn mismatch_is_structural_error() {
        let a = RingElement::zero(8, m17()).unwrap();
        let b = RingElement::zero(4, m17()).unwrap();
        let c = RingElement::zero(8, Modulus::new(97).unwrap()).unwrap();
        assert!(matches!(a.add(&b), Err(RingError::Mismatch { .. })));
        assert!(matches!(a.mul_negacyclic(&c), Err(RingError::Mismatch { .. })));
    }

    #[test]
    fn automorphism_is_multiplicative() {
        let a = RingElement::from_coeffs(&[1, 2, 3, 4, 5, 6, 7, 8], m17()).unwrap();
        let b = RingElement::from_coeffs(&[8, -1, 0, 3, 2, 2, 1, -5], m17()).unwrap();
        for g in [3usize, 5, 15] {
            let lhs = a.mul_negacyclic(&b).unwrap().automorphism(g).unwrap();
            let rhs = a.automorphism(g).unwrap().mul_negacyclic(&b.automorphism(g).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(a.automorphism(2).is_err());
    }
}
