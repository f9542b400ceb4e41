//! Word-sized moduli with Barrett reduction and Shoup multiplication.

use super::RingError;

/// Largest modulus accepted; keeps lazy sums of two residues below 2^63.
pub const MAX_MODULUS_BITS: u32 = 62;

/// A modulus `n >= 2` that fits in a machine word.
///
/// Residues handed to the arithmetic methods are canonical, i.e. in `[0, n)`.
/// The minimal (centered) representation `(-n/2, n/2]` is produced by
/// [`Modulus::to_minimal`] and [`reduce_minimal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: u64,
    // floor(2^128 / value) split into (hi, lo) words
    ratio_hi: u64,
    ratio_lo: u64,
}

impl Modulus {
    pub fn new(value: u64) -> Result<Self, RingError> {
        if value < 2 || 64 - value.leading_zeros() > MAX_MODULUS_BITS {
            return Err(RingError::InvalidModulus(value));
        }
        // floor(2^128 / v) = floor((2^128 - 1) / v) unless v is a power of two
        let mut ratio = u128::MAX / value as u128;
        if value.is_power_of_two() {
            ratio += 1;
        }
        Ok(Self { value, ratio_hi: (ratio >> 64) as u64, ratio_lo: ratio as u64 })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        64 - self.value.leading_zeros()
    }

    pub fn is_prime(&self) -> bool {
        is_prime_u64(self.value)
    }

    /// Prime and `value ≡ 1 (mod 2n)`, so a primitive `2n`-th root of unity exists.
    pub fn is_ntt_friendly(&self, n: usize) -> bool {
        n.is_power_of_two() && self.value % (2 * n as u64) == 1 && self.is_prime()
    }

    /// Barrett reduction of a full 128-bit value.
    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        let x0 = x as u64;
        let x1 = (x >> 64) as u64;
        let lo = x0 as u128 * self.ratio_lo as u128;
        let mid1 = x0 as u128 * self.ratio_hi as u128;
        let mid2 = x1 as u128 * self.ratio_lo as u128;
        let hi = x1 as u128 * self.ratio_hi as u128;
        let t = (lo >> 64) + (mid1 as u64 as u128) + (mid2 as u64 as u128);
        let quot = hi + (mid1 >> 64) + (mid2 >> 64) + (t >> 64);
        let mut r = x.wrapping_sub(quot.wrapping_mul(self.value as u128)) as u64;
        while r >= self.value {
            r -= self.value;
        }
        r
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> u64 {
        if x < self.value {
            x
        } else {
            x % self.value
        }
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.value as i64);
        r as u64
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        let r = self.reduce_u128(x.unsigned_abs());
        if x < 0 && r != 0 {
            self.value - r
        } else {
            r
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.fold(a + b)
    }

    // x - n when x >= n, else x, for x < 2n; branch-free since the
    // comparison is data dependent in every butterfly
    #[inline]
    fn fold(&self, x: u64) -> u64 {
        let r = x.wrapping_sub(self.value);
        r.wrapping_add(self.value & ((r as i64 >> 63) as u64))
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let r = a.wrapping_sub(b);
        r.wrapping_add(self.value & ((r as i64 >> 63) as u64))
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = 1 % self.value;
        let mut b = self.reduce_u64(base);
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }

    /// Inverse by the extended Euclidean algorithm, `None` when not coprime.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (mut old_r, mut r) = (self.reduce_u64(a) as i128, self.value as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        if old_r != 1 {
            return None;
        }
        Some(old_s.rem_euclid(self.value as i128) as u64)
    }

    /// Map a canonical residue to `(-n/2, n/2]`.
    #[inline]
    pub fn to_minimal(&self, a: u64) -> i64 {
        if a > self.value / 2 {
            a as i64 - self.value as i64
        } else {
            a as i64
        }
    }

    /// Precompute the Shoup companion `floor(w * 2^64 / n)` of a fixed operand.
    #[inline]
    pub fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.value as u128) as u64
    }

    /// `a * w mod n` for a fixed `w` with companion `w_shoup`.
    #[inline]
    pub fn mul_shoup(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let q = ((a as u128 * w_shoup as u128) >> 64) as u64;
        self.fold(a.wrapping_mul(w).wrapping_sub(q.wrapping_mul(self.value)))
    }
}

/// Minimal residue of `z` modulo `n`, the unique value in `(-n/2, n/2]`
/// congruent to `z`.
pub fn reduce_minimal(z: i128, n: u64) -> i64 {
    assert!(n >= 2, "modulus must be at least 2");
    let n = n as i128;
    let mut r = z.rem_euclid(n);
    if 2 * r > n {
        r -= n;
    }
    r as i64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
