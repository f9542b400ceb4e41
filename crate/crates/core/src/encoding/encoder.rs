//! Composite encryption of real vectors: `Enc ∘ σ ∘ Ecd_Δ` and its inverse.

use std::sync::Arc;

use rand::{CryptoRng, RngCore};

use super::batch::{BatchEncoder, SlotVector};
use super::fixed_point::{dcd_vec, ecd_vec, Sensitivity};
use super::EncodingError;
use crate::bfv::{BfvContext, Ciphertext, PublicKey, SecretKey};

/// Couples a BFV context with its batch encoder.
#[derive(Clone, Debug)]
pub struct Encoder {
    ctx: Arc<BfvContext>,
    batch: BatchEncoder,
}

impl Encoder {
    pub fn new(ctx: Arc<BfvContext>) -> Result<Self, EncodingError> {
        let batch = BatchEncoder::new(&ctx)?;
        Ok(Self { ctx, batch })
    }

    pub fn context(&self) -> &Arc<BfvContext> {
        &self.ctx
    }

    pub fn batch(&self) -> &BatchEncoder {
        &self.batch
    }

    pub fn slot_count(&self) -> usize {
        self.batch.slot_count()
    }

    pub fn t(&self) -> u64 {
        self.ctx.params().t
    }

    /// Encrypt integer slots; `delta_product` is left at zero.
    pub fn encrypt_slots<R: RngCore + CryptoRng>(
        &self,
        pk: &PublicKey,
        v: &SlotVector,
        rng: &mut R,
    ) -> Result<Ciphertext, EncodingError> {
        Ok(self.ctx.encrypt(pk, &self.batch.pack(v)?, rng)?)
    }

    /// Noiseless encryption of integer slots.
    pub fn trivial_slots(&self, v: &SlotVector) -> Result<Ciphertext, EncodingError> {
        Ok(self.ctx.trivial(&self.batch.pack(v)?)?)
    }

    pub fn decrypt_slots(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<SlotVector, EncodingError> {
        self.batch.unpack(&self.ctx.decrypt(sk, ct)?)
    }

    /// `Enc_Δ(v)`: fixed-point encode, pack, encrypt. Marks one `Δ` factor.
    pub fn enc_delta<R: RngCore + CryptoRng>(
        &self,
        pk: &PublicKey,
        v: &[f64],
        delta: Sensitivity,
        rng: &mut R,
    ) -> Result<Ciphertext, EncodingError> {
        let slots = SlotVector::new(ecd_vec(v, delta, self.t())?);
        Ok(self.encrypt_slots(pk, &slots, rng)?.with_delta_product(1))
    }

    /// `Dec_Δ(ct)`: decrypt, unpack, decode every usable slot with `delta`.
    ///
    /// After a gain-by-data product pass the product sensitivity `Δ_K·Δ_d`.
    pub fn dec_delta(&self, sk: &SecretKey, ct: &Ciphertext, delta: Sensitivity) -> Result<Vec<f64>, EncodingError> {
        Ok(dcd_vec(self.decrypt_slots(sk, ct)?.as_slice(), delta))
    }
}
