//! Binary wire format for keys and ciphertexts.
//!
//! Layout, all integers little-endian:
//! `"EIOH"`, version (u16), N (u32), limb count (u8), limb primes (u64 each),
//! then for every part and every limb, N residues (u64 each). The part
//! count follows from the payload length.

use super::ciphertext::Ciphertext;
use super::keys::{GaloisKey, KeySwitchKey, PublicKey, RelinKey, SecretKey};
use super::params::BfvContext;
use super::BfvError;
use crate::ring::{RnsBasis, RnsPoly};

pub const MAGIC: &[u8; 4] = b"EIOH";
pub const FORMAT_VERSION: u16 = 1;

/// Serialize polynomials given in coefficient form.
pub fn write_polys(basis: &RnsBasis, polys: &[RnsPoly]) -> Vec<u8> {
    let header = 4 + 2 + 4 + 1 + 8 * basis.len();
    let mut out = Vec::with_capacity(header + polys.len() * basis.len() * basis.n() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(basis.n() as u32).to_le_bytes());
    out.push(basis.len() as u8);
    for m in basis.moduli() {
        out.extend_from_slice(&m.value().to_le_bytes());
    }
    for p in polys {
        assert!(!p.is_ntt_form(), "serialize coefficient-form polynomials");
        for limb in p.limbs() {
            for &v in limb {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

/// Parse and validate a blob written by [`write_polys`] against `basis`.
pub fn read_polys(basis: &RnsBasis, bytes: &[u8]) -> Result<Vec<RnsPoly>, BfvError> {
    let fmt = |m: String| BfvError::Format(m);
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(fmt("bad magic".into()));
    }
    let version = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(fmt(format!("unsupported format version {version}")));
    }
    let n = u32::from_le_bytes(cur.take(4)?.try_into().unwrap()) as usize;
    if n != basis.n() {
        return Err(fmt(format!("ring degree {n} does not match parameters ({})", basis.n())));
    }
    let limbs = cur.take(1)?[0] as usize;
    if limbs != basis.len() {
        return Err(fmt(format!("limb count {limbs} does not match parameters ({})", basis.len())));
    }
    for m in basis.moduli() {
        let p = u64::from_le_bytes(cur.take(8)?.try_into().unwrap());
        if p != m.value() {
            return Err(fmt(format!("limb prime {p} does not match parameters ({})", m.value())));
        }
    }
    let per_part = limbs * n * 8;
    let rest = bytes.len() - cur.pos;
    if rest == 0 || !rest.is_multiple_of(per_part) {
        return Err(fmt(format!("payload of {rest} bytes is not a whole number of polynomials")));
    }
    let mut polys = Vec::with_capacity(rest / per_part);
    for _ in 0..rest / per_part {
        let mut ls = Vec::with_capacity(limbs);
        for _ in 0..limbs {
            let raw = cur.take(n * 8)?;
            ls.push(raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect());
        }
        polys.push(basis.from_limbs(ls)?);
    }
    Ok(polys)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], BfvError> {
        if self.pos + k > self.bytes.len() {
            return Err(BfvError::Format("truncated input".into()));
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
}

fn coeff_form(ctx: &BfvContext, p: &RnsPoly) -> RnsPoly {
    let mut c = p.clone();
    ctx.q.from_ntt(&mut c);
    c
}

fn ntt_form(ctx: &BfvContext, mut p: RnsPoly) -> RnsPoly {
    ctx.q.to_ntt(&mut p);
    p
}

fn expect_parts(polys: &[RnsPoly], allowed: &[usize], what: &str) -> Result<(), BfvError> {
    if !allowed.contains(&polys.len()) {
        return Err(BfvError::Format(format!("{what} blob holds {} polynomials, expected {allowed:?}", polys.len())));
    }
    Ok(())
}

impl Ciphertext {
    pub fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        write_polys(&ctx.q, &self.parts)
    }

    /// Metadata is not serialized: the result has `depth = 0` and
    /// `delta_product = 0`; callers restore the latter with
    /// [`Ciphertext::with_delta_product`].
    pub fn from_bytes(ctx: &BfvContext, bytes: &[u8]) -> Result<Self, BfvError> {
        let parts = read_polys(&ctx.q, bytes)?;
        expect_parts(&parts, &[2, 3], "ciphertext")?;
        Ok(Self { parts, delta_product: 0, depth: 0 })
    }
}

impl PublicKey {
    pub fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        write_polys(&ctx.q, &self.parts(ctx))
    }

    pub fn from_bytes(ctx: &BfvContext, bytes: &[u8]) -> Result<Self, BfvError> {
        let mut parts = read_polys(&ctx.q, bytes)?;
        expect_parts(&parts, &[2], "public key")?;
        let p1 = ntt_form(ctx, parts.pop().unwrap());
        let p0 = ntt_form(ctx, parts.pop().unwrap());
        Ok(Self { p0, p1 })
    }
}

impl SecretKey {
    pub fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        write_polys(&ctx.q, &[coeff_form(ctx, &self.ntt)])
    }

    pub fn from_bytes(ctx: &BfvContext, bytes: &[u8]) -> Result<Self, BfvError> {
        let parts = read_polys(&ctx.q, bytes)?;
        expect_parts(&parts, &[1], "secret key")?;
        let coeffs = ctx.q.to_centered(&parts[0]).into_iter().map(|c| c as i64).collect();
        SecretKey::from_coeffs(ctx, coeffs)
    }
}

impl KeySwitchKey {
    fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        let polys: Vec<RnsPoly> =
            self.pairs.iter().flat_map(|(a, b)| [coeff_form(ctx, a), coeff_form(ctx, b)]).collect();
        write_polys(&ctx.q, &polys)
    }

    fn from_bytes(ctx: &BfvContext, bytes: &[u8], what: &str) -> Result<Self, BfvError> {
        let polys = read_polys(&ctx.q, bytes)?;
        expect_parts(&polys, &[2 * (ctx.ell + 1)], what)?;
        let mut it = polys.into_iter();
        let mut pairs = Vec::with_capacity(ctx.ell + 1);
        while let (Some(a), Some(b)) = (it.next(), it.next()) {
            pairs.push((ntt_form(ctx, a), ntt_form(ctx, b)));
        }
        Ok(Self { pairs })
    }
}

impl RelinKey {
    pub fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        self.0.to_bytes(ctx)
    }

    pub fn from_bytes(ctx: &BfvContext, bytes: &[u8]) -> Result<Self, BfvError> {
        Ok(Self(KeySwitchKey::from_bytes(ctx, bytes, "relinearization key")?))
    }
}

impl GaloisKey {
    pub fn to_bytes(&self, ctx: &BfvContext) -> Vec<u8> {
        self.0.to_bytes(ctx)
    }

    pub fn from_bytes(ctx: &BfvContext, bytes: &[u8]) -> Result<Self, BfvError> {
        Ok(Self(KeySwitchKey::from_bytes(ctx, bytes, "rotation key")?))
    }
}
