//! Fixed-point encoding of reals into `Z_T` and back.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::EncodingError;

/// A positive scaling step `Δ`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Sensitivity(f64);

impl Sensitivity {
    pub fn new(delta: f64) -> Result<Self, EncodingError> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self(delta))
        } else {
            Err(EncodingError::InvalidSensitivity(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Sensitivity of a product of two encodings.
    pub fn product(self, other: Self) -> Self {
        Self(self.0 * other.0)
    }
}

/// `[floor(x/Δ + 1/2)]_T` as a minimal residue; fails instead of wrapping.
pub fn ecd(x: f64, delta: Sensitivity, t: u64) -> Result<i64, EncodingError> {
    let z = (x / delta.0 + 0.5).floor();
    let half = (t / 2) as f64;
    // minimal residues of an odd modulus are exactly [-(t-1)/2, (t-1)/2]
    let lo = if t % 2 == 1 { -half } else { -half + 1.0 };
    if !z.is_finite() || z < lo || z > half {
        return Err(EncodingError::Overflow { value: x, delta: delta.0, t });
    }
    Ok(z as i64)
}

/// `Δ·z` for a minimal residue `z`.
pub fn dcd(z: i64, delta: Sensitivity) -> f64 {
    z as f64 * delta.0
}

/// The quantizer `Dcd ∘ Ecd`.
pub fn quantize(x: f64, delta: Sensitivity, t: u64) -> Result<f64, EncodingError> {
    Ok(dcd(ecd(x, delta, t)?, delta))
}

pub fn ecd_vec(xs: &[f64], delta: Sensitivity, t: u64) -> Result<Vec<i64>, EncodingError> {
    xs.iter().map(|&x| ecd(x, delta, t)).collect()
}

pub fn dcd_vec(zs: &[i64], delta: Sensitivity) -> Vec<f64> {
    zs.iter().map(|&z| dcd(z, delta)).collect()
}

pub fn ecd_matrix(m: &DMatrix<f64>, delta: Sensitivity, t: u64) -> Result<DMatrix<i64>, EncodingError> {
    let data = m.iter().map(|&x| ecd(x, delta, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(DMatrix::from_vec(m.nrows(), m.ncols(), data))
}

pub fn quantize_matrix(m: &DMatrix<f64>, delta: Sensitivity, t: u64) -> Result<DMatrix<f64>, EncodingError> {
    Ok(ecd_matrix(m, delta, t)?.map(|z| dcd(z, delta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: u64 = 33538049;

    #[test]
    fn definition_examples() {
        let d = Sensitivity::new(1e-3).unwrap();
        assert_eq!(ecd(0.0, d, T).unwrap(), 0);
        assert_eq!(dcd(0, d), 0.0);
        assert_eq!(ecd(1.2345, d, T).unwrap(), 1235);
        assert!((dcd(1235, d) - 1.235).abs() < 1e-12);
        assert_eq!(ecd(-1.2345, d, T).unwrap(), -1234);
    }

    #[test]
    fn overflow_guard() {
        let d = Sensitivity::new(1.0).unwrap();
        let half = (T / 2) as f64;
        assert_eq!(ecd(half, d, T).unwrap(), (T / 2) as i64);
        assert_eq!(ecd(-half, d, T).unwrap(), -((T / 2) as i64));
        assert!(ecd(half + 1.0, d, T).is_err());
        assert!(ecd(-half - 1.0, d, T).is_err());
        assert!(ecd(f64::NAN, d, T).is_err());
        assert!(Sensitivity::new(0.0).is_err());
        assert!(Sensitivity::new(-1.0).is_err());
    }
}
