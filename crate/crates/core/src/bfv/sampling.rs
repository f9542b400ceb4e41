//! Samplers for secrets, errors and uniform masks.

use rand::{CryptoRng, Rng, RngCore};

use crate::ring::{RnsBasis, RnsPoly};

/// Binary coefficients, the distribution of the secret and of the
/// encryption ephemeral.
pub fn binary<R: RngCore + CryptoRng>(n: usize, rng: &mut R) -> Vec<i64> {
    (0..n).map(|_| (rng.next_u32() & 1) as i64).collect()
}

/// Centered discrete Gaussian truncated at `6σ`, sampled by rejection.
pub fn gaussian<R: RngCore + CryptoRng>(n: usize, sigma: f64, rng: &mut R) -> Vec<i64> {
    let bound = (6.0 * sigma).floor() as i64;
    let denom = 2.0 * sigma * sigma;
    (0..n)
        .map(|_| loop {
            let x = rng.gen_range(-bound..=bound);
            if rng.gen::<f64>() < (-((x * x) as f64) / denom).exp() {
                break x;
            }
        })
        .collect()
}

/// Uniform element of `R_Q`, drawn independently per limb.
pub fn uniform<R: RngCore + CryptoRng>(basis: &RnsBasis, rng: &mut R) -> RnsPoly {
    let limbs = basis.moduli().iter().map(|m| (0..basis.n()).map(|_| rng.gen_range(0..m.value())).collect()).collect();
    basis.from_limbs(limbs).expect("residues drawn in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn gaussian_moments_and_truncation() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let xs = gaussian(200_000, 3.2, &mut rng);
        let mean = xs.iter().sum::<i64>() as f64 / xs.len() as f64;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var.sqrt() - 3.2).abs() < 0.05, "std {}", var.sqrt());
        assert!(xs.iter().all(|x| x.abs() <= 19));
    }

    #[test]
    fn binary_is_zero_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let b = binary(1000, &mut rng);
        assert!(b.iter().all(|&x| x == 0 || x == 1));
        let ones = b.iter().filter(|&&x| x == 1).count();
        assert!((400..600).contains(&ones));
    }
}
