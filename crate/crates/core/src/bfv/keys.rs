//! Key material and key generation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::params::BfvContext;
use super::sampling;
use super::BfvError;
use crate::ring::RnsPoly;

/// Galois element of the one-slot left rotation.
pub const ROTATION_GALOIS_ELEMENT: usize = 3;

/// Binary secret `s ∈ R_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub(crate) coeffs: Vec<i64>,
    pub(crate) ntt: RnsPoly,
}

impl SecretKey {
    pub(crate) fn from_coeffs(ctx: &BfvContext, coeffs: Vec<i64>) -> Result<Self, BfvError> {
        if coeffs.len() != ctx.n() || coeffs.iter().any(|&c| c != 0 && c != 1) {
            return Err(BfvError::Format("secret key must have N binary coefficients".into()));
        }
        let mut ntt = ctx.q.from_i64(&coeffs)?;
        ctx.q.to_ntt(&mut ntt);
        Ok(Self { coeffs, ntt })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }
}

/// `(p0, p1) = (-(a·s + e), a)`; both parts kept in NTT form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub(crate) p0: RnsPoly,
    pub(crate) p1: RnsPoly,
}

impl PublicKey {
    /// Both parts in coefficient form.
    pub fn parts(&self, ctx: &BfvContext) -> [RnsPoly; 2] {
        [to_coeff(ctx, &self.p0), to_coeff(ctx, &self.p1)]
    }
}

/// Key-switching material for a target key `t`:
/// pair `i` is `(-(a_i·s + e_i) + W^i·t, a_i)` for `i = 0..=ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySwitchKey {
    pub(crate) pairs: Vec<(RnsPoly, RnsPoly)>,
}

impl KeySwitchKey {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pair `i` in coefficient form.
    pub fn pair(&self, ctx: &BfvContext, i: usize) -> (RnsPoly, RnsPoly) {
        let (a, b) = &self.pairs[i];
        (to_coeff(ctx, a), to_coeff(ctx, b))
    }
}

/// Relinearization key, switching from `s^2` to `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelinKey(pub(crate) KeySwitchKey);

impl RelinKey {
    pub fn key(&self) -> &KeySwitchKey {
        &self.0
    }
}

/// Rotation key, switching from `s(X^3)` to `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisKey(pub(crate) KeySwitchKey);

impl GaloisKey {
    pub fn key(&self) -> &KeySwitchKey {
        &self.0
    }

    pub fn galois_element(&self) -> usize {
        ROTATION_GALOIS_ELEMENT
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySet {
    pub sk: SecretKey,
    pub pk: PublicKey,
    pub rlk: RelinKey,
    pub gk: GaloisKey,
}

fn to_coeff(ctx: &BfvContext, p: &RnsPoly) -> RnsPoly {
    let mut c = p.clone();
    ctx.q.from_ntt(&mut c);
    c
}

/// Generate every key deterministically from 32 bytes of seed material.
pub fn keygen(ctx: &BfvContext, seed: [u8; 32]) -> Result<KeySet, BfvError> {
    let mut rng = ChaCha20Rng::from_seed(seed);
    let basis = &ctx.q;
    let n = ctx.n();
    let sk = SecretKey::from_coeffs(ctx, sampling::binary(n, &mut rng))?;

    let mut a = sampling::uniform(basis, &mut rng);
    basis.to_ntt(&mut a);
    let mut e = basis.from_i64(&sampling::gaussian(n, ctx.params.noise_std, &mut rng))?;
    basis.to_ntt(&mut e);
    let p0 = basis.neg(&basis.add(&basis.mul_pointwise(&a, &sk.ntt), &e));
    let pk = PublicKey { p0, p1: a };

    let mut s_sq = basis.mul_pointwise(&sk.ntt, &sk.ntt);
    basis.from_ntt(&mut s_sq);
    let rlk = RelinKey(switch_key(ctx, &sk, &s_sq, &mut rng)?);

    let s_coeff = basis.from_i64(&sk.coeffs)?;
    let s_rot = basis.automorphism(&s_coeff, ROTATION_GALOIS_ELEMENT)?;
    let gk = GaloisKey(switch_key(ctx, &sk, &s_rot, &mut rng)?);

    Ok(KeySet { sk, pk, rlk, gk })
}

fn switch_key(
    ctx: &BfvContext,
    sk: &SecretKey,
    target: &RnsPoly,
    rng: &mut ChaCha20Rng,
) -> Result<KeySwitchKey, BfvError> {
    let basis = &ctx.q;
    let mut pairs = Vec::with_capacity(ctx.ell + 1);
    for i in 0..=ctx.ell {
        let mut a = sampling::uniform(basis, rng);
        basis.to_ntt(&mut a);
        let mut e = basis.from_i64(&sampling::gaussian(ctx.n(), ctx.params.noise_std, rng))?;
        basis.to_ntt(&mut e);
        let mut shifted = basis.scalar_mul(target, ctx.w_pows[i] as i128);
        basis.to_ntt(&mut shifted);
        let k0 = basis.sub(&shifted, &basis.add(&basis.mul_pointwise(&a, &sk.ntt), &e));
        pairs.push((k0, a));
    }
    Ok(KeySwitchKey { pairs })
}
