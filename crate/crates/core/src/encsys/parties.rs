//! The three runtime parties and the controller's ciphertext queue.
//!
//! Key material follows the deployment: the operator holds `pk`, the plant
//! holds `pk` and `sk`, and the controller holds only the evaluation keys.

use std::sync::Arc;

use nalgebra::DVector;
use rand_chacha::ChaCha20Rng;

use super::EncsysError;
use crate::bfv::{BfvContext, Ciphertext, GaloisKey, PublicKey, RelinKey, SecretKey};
use crate::encoding::{dcd_vec, DataLayout, Encoder, Sensitivity, SlotVector};
use crate::simd_linalg::{extract, matvec_sum, OpCounts, PackedMatrix, PackedVector};

/// Encrypts the reference signal.
#[derive(Debug)]
pub struct Operator {
    pub(crate) enc: Encoder,
    pub(crate) pk: PublicKey,
    pub(crate) rng: ChaCha20Rng,
    pub(crate) layout: DataLayout,
    pub(crate) delta_d: Sensitivity,
    pub(crate) counts: OpCounts,
}

impl Operator {
    /// `Enc_{Δ_d}([r 0 0 … r 0 0])`.
    pub fn encrypt_reference(&mut self, r: &DVector<f64>) -> Result<Ciphertext, EncsysError> {
        let v = self.layout.r_only(r.as_slice(), self.enc.slot_count())?;
        self.counts.enc += 1;
        Ok(self.enc.enc_delta(&self.pk, &v, self.delta_d, &mut self.rng)?)
    }
}

/// Measures, decrypts the returned input and re-encrypts it.
#[derive(Debug)]
pub struct PlantParty {
    pub(crate) enc: Encoder,
    pub(crate) pk: PublicKey,
    pub(crate) sk: SecretKey,
    pub(crate) rng: ChaCha20Rng,
    pub(crate) layout: DataLayout,
    pub(crate) delta_k: Sensitivity,
    pub(crate) delta_d: Sensitivity,
    pub(crate) counts: OpCounts,
}

impl PlantParty {
    /// `Enc_{Δ_d}([0 y 0 … 0 y 0])`.
    pub fn encrypt_output(&mut self, y: &DVector<f64>) -> Result<Ciphertext, EncsysError> {
        let v = self.layout.y_only(y.as_slice(), self.enc.slot_count())?;
        self.counts.enc += 1;
        Ok(self.enc.enc_delta(&self.pk, &v, self.delta_d, &mut self.rng)?)
    }

    /// Decrypts the controller's result and reads slots `0, h, …, (m-1)h`.
    /// Returns the integer slots and `u_t` decoded at `Δ_K·Δ_d`.
    pub fn decrypt_input(&mut self, ct: &Ciphertext) -> Result<(Vec<i64>, DVector<f64>), EncsysError> {
        let slots = self.enc.decrypt_slots(&self.sk, ct)?;
        self.counts.dec += 1;
        let z = extract(&slots, self.layout.m, self.layout.h())?;
        let u = dcd_vec(&z, self.delta_k.product(self.delta_d));
        Ok((z, DVector::from_vec(u)))
    }

    /// `Enc_{Δ_d}([0 0 u … 0 0 u])`.
    pub fn encrypt_input(&mut self, u: &DVector<f64>) -> Result<Ciphertext, EncsysError> {
        let v = self.layout.u_only(u.as_slice(), self.enc.slot_count())?;
        self.counts.enc += 1;
        Ok(self.enc.enc_delta(&self.pk, &v, self.delta_d, &mut self.rng)?)
    }
}

/// `L + 1` data ciphertexts; slot 0 is the oldest and slot `L` the newest.
#[derive(Clone, Debug)]
pub struct CipherQueue {
    slots: Vec<Ciphertext>,
}

impl CipherQueue {
    pub fn new(slots: Vec<Ciphertext>) -> Result<Self, EncsysError> {
        if slots.len() < 2 {
            return Err(EncsysError::Protocol(format!("queue of {} slots, need at least 2", slots.len())));
        }
        Ok(Self { slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Ciphertext] {
        &self.slots
    }

    /// Index of the newest slot, `L`.
    pub fn back(&self) -> usize {
        self.slots.len() - 1
    }

    /// Drop slot 0, move every slot one position forward and put `fresh` at the back.
    pub fn shift(&mut self, fresh: Ciphertext) {
        self.slots.remove(0);
        self.slots.push(fresh);
    }
}

/// Evaluates the packed gain against the queue. Holds no secret key.
#[derive(Debug)]
pub struct ControllerParty {
    pub(crate) ctx: Arc<BfvContext>,
    pub(crate) rlk: RelinKey,
    pub(crate) gk: GaloisKey,
    pub(crate) gains: Vec<PackedMatrix>,
    pub(crate) queue: CipherQueue,
    pub(crate) zero: Ciphertext,
    pub(crate) layout: DataLayout,
    pub(crate) counts: OpCounts,
}

impl ControllerParty {
    fn accumulate(&mut self, slot: usize, ct: &Ciphertext) -> Result<(), EncsysError> {
        let sum = self.ctx.add(&self.queue.slots[slot], ct)?;
        self.queue.slots[slot] = sum;
        self.counts.add += 1;
        Ok(())
    }

    /// Adds the encrypted reference into the newest slot.
    pub fn receive_reference(&mut self, ct: &Ciphertext) -> Result<(), EncsysError> {
        self.accumulate(self.queue.back(), ct)
    }

    /// Adds the encrypted output into the newest slot.
    pub fn receive_output(&mut self, ct: &Ciphertext) -> Result<(), EncsysError> {
        self.accumulate(self.queue.back(), ct)
    }

    /// `Σ_i K̂_i d̂_i` followed by the queue shift. The vacated newest slot is
    /// reset to a noiseless zero so it collects only the next sample.
    pub fn compute(&mut self) -> Result<Ciphertext, EncsysError> {
        let (m, h) = (self.layout.m, self.layout.h());
        let slots = self.ctx.n() / 2;
        let datas = self
            .queue
            .slots
            .iter()
            .map(|ct| PackedVector::from_ciphertext(ct.clone(), m, h, slots))
            .collect::<Result<Vec<_>, _>>()?;
        let ct = matvec_sum(&self.ctx, Some(&self.gk), Some(&self.rlk), &self.gains, &datas, &mut self.counts)?;
        self.queue.shift(self.zero.clone());
        Ok(ct)
    }

    /// Adds the re-encrypted input into slot `L - 1`.
    pub fn receive_input(&mut self, ct: &Ciphertext) -> Result<(), EncsysError> {
        self.accumulate(self.queue.back() - 1, ct)
    }

    pub fn queue(&self) -> &CipherQueue {
        &self.queue
    }
}

/// All `capacity` slots expected in a queue entry holding `block = [r y u]`.
pub(crate) fn expected_slots(layout: &DataLayout, block: &[i64], capacity: usize) -> Result<SlotVector, EncsysError> {
    if block.len() != layout.h() {
        return Err(EncsysError::Shape(format!("block of {} entries for h = {}", block.len(), layout.h())));
    }
    let (q, l) = (layout.q, layout.l);
    let mut slots = layout.full(&block[..q], &block[q..q + l], &block[q + l..], capacity)?;
    slots.resize(capacity, 0);
    Ok(SlotVector::new(slots))
}
