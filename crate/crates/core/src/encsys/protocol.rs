//! Designer setup and the per-step exchange between operator, plant and controller.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::channel::{Channel, Message, MessageKind, Role};
use super::parties::{expected_slots, CipherQueue, ControllerParty, Operator, PlantParty};
use super::EncsysError;
use crate::analysis::{delta_k_bound, LyapunovForm, StabilityCertificate};
use crate::bfv::{keygen, BfvContext, BfvParams, Ciphertext, GaloisKey, PublicKey, RelinKey, SecretKey};
use crate::encoding::{ecd_matrix, DataLayout, Encoder, Sensitivity, SlotVector};
use crate::iohfc::{lift_plant, IohfcGain, Plant};
use crate::simd_linalg::{OpCounts, PackedMatrix};

/// Operation tallies of one step, split by party.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartyCounts {
    pub operator: OpCounts,
    pub plant: OpCounts,
    pub controller: OpCounts,
}

/// Wall-clock time spent by each party in one step, in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PartyTimings {
    pub operator_ms: f64,
    pub plant_ms: f64,
    pub controller_ms: f64,
}

impl PartyTimings {
    pub fn total_ms(&self) -> f64 {
        self.operator_ms + self.plant_ms + self.controller_ms
    }
}

/// Everything observable about one sampling period.
#[derive(Clone, Debug)]
pub struct StepTranscript {
    pub t: usize,
    /// `ct_r`, `ct_y`, `ct` and `ct_u` in the order they were sent.
    pub messages: Vec<Message>,
    /// Decrypted integer slots before decoding.
    pub z: Vec<i64>,
    pub u: DVector<f64>,
    pub counts: PartyCounts,
    pub timings: PartyTimings,
}

/// Decrypted queue contents with the noise margin of each slot, in bits.
#[derive(Clone, Debug)]
pub struct QueueAudit {
    pub slots: Vec<SlotVector>,
    pub margins: Vec<f64>,
}

impl QueueAudit {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A configured encrypted loop: the three runtime parties plus setup records.
#[derive(Debug)]
pub struct EncryptedLoop {
    ctx: Arc<BfvContext>,
    gain: IohfcGain,
    layout: DataLayout,
    delta_k: Sensitivity,
    delta_d: Sensitivity,
    operator: Operator,
    plant: PlantParty,
    controller: ControllerParty,
    setup_messages: Vec<Message>,
    certificate: Option<StabilityCertificate>,
    warnings: Vec<String>,
    t: usize,
}

fn elapsed_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn key_message(from: Role, to: Role, kind: MessageKind, bytes: Vec<u8>) -> Message {
    Message { from, to, kind, delta_product: 0, bytes }
}

fn find(log: &[Message], to: Role, kind: MessageKind) -> Result<&Message, EncsysError> {
    log.iter()
        .find(|m| m.to == to && m.kind == kind)
        .ok_or_else(|| EncsysError::Protocol(format!("{to:?} never received {kind:?}")))
}

impl EncryptedLoop {
    /// Designer preprocessing: key generation, gain encryption and a queue of
    /// zero encryptions, delivered to each party as serialized messages.
    ///
    /// With a plant model, `Δ_K` is checked against the stability certificate
    /// for `Q = I`; exceeding it only adds a warning.
    pub fn setup(
        params: BfvParams,
        plant: Option<&Plant>,
        gain: &IohfcGain,
        delta_k: Sensitivity,
        delta_d: Sensitivity,
        seed: [u8; 32],
    ) -> Result<Self, EncsysError> {
        let ctx = BfvContext::new(params)?;
        let enc = Encoder::new(ctx.clone())?;
        let layout = DataLayout::new(gain.q(), gain.l(), gain.m());
        let slots = enc.slot_count();
        if layout.len() > slots {
            return Err(EncsysError::Shape(format!("m·h = {} exceeds the {slots} available slots", layout.len())));
        }

        let mut master = ChaCha20Rng::from_seed(seed);
        let key_seed: [u8; 32] = master.gen();
        let mut designer_rng = ChaCha20Rng::from_seed(master.gen());
        let operator_rng = ChaCha20Rng::from_seed(master.gen());
        let plant_rng = ChaCha20Rng::from_seed(master.gen());

        let keys = keygen(&ctx, key_seed)?;
        let mut channel = Channel::new();
        let pk_bytes = keys.pk.to_bytes(&ctx);
        channel.send(key_message(Role::Designer, Role::Plant, MessageKind::PublicKey, pk_bytes.clone()));
        channel.send(key_message(Role::Designer, Role::Plant, MessageKind::SecretKey, keys.sk.to_bytes(&ctx)));
        channel.send(key_message(Role::Designer, Role::Operator, MessageKind::PublicKey, pk_bytes));
        channel.send(key_message(Role::Designer, Role::Controller, MessageKind::RelinKey, keys.rlk.to_bytes(&ctx)));
        channel.send(key_message(Role::Designer, Role::Controller, MessageKind::GaloisKey, keys.gk.to_bytes(&ctx)));

        for (i, block) in gain.blocks().iter().enumerate() {
            let int = ecd_matrix(block, delta_k, ctx.params().t)?;
            let packed = PackedMatrix::encrypt(&enc, &keys.pk, &int, &mut designer_rng)?;
            let ct = packed.ct.with_delta_product(1);
            channel.send(Message::ciphertext(&ctx, Role::Designer, Role::Controller, MessageKind::Gain(i), &ct));
        }
        for i in 0..=gain.length() {
            let ct = enc.enc_delta(&keys.pk, &[], delta_d, &mut designer_rng)?;
            channel.send(Message::ciphertext(&ctx, Role::Designer, Role::Controller, MessageKind::Queue(i), &ct));
        }
        let log = channel.drain();

        let operator_pk = PublicKey::from_bytes(&ctx, &find(&log, Role::Operator, MessageKind::PublicKey)?.bytes)?;
        let operator = Operator {
            enc: enc.clone(),
            pk: operator_pk,
            rng: operator_rng,
            layout,
            delta_d,
            counts: OpCounts::default(),
        };

        let plant_party = PlantParty {
            enc: enc.clone(),
            pk: PublicKey::from_bytes(&ctx, &find(&log, Role::Plant, MessageKind::PublicKey)?.bytes)?,
            sk: SecretKey::from_bytes(&ctx, &find(&log, Role::Plant, MessageKind::SecretKey)?.bytes)?,
            rng: plant_rng,
            layout,
            delta_k,
            delta_d,
            counts: OpCounts::default(),
        };

        let (m, h) = (layout.m, layout.h());
        let gains = (0..=gain.length())
            .map(|i| {
                let ct = find(&log, Role::Controller, MessageKind::Gain(i))?.open(&ctx, MessageKind::Gain(i))?;
                Ok(PackedMatrix::from_ciphertext(ct, m, h, slots)?)
            })
            .collect::<Result<Vec<_>, EncsysError>>()?;
        let queue = (0..=gain.length())
            .map(|i| find(&log, Role::Controller, MessageKind::Queue(i))?.open(&ctx, MessageKind::Queue(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let controller = ControllerParty {
            ctx: ctx.clone(),
            rlk: RelinKey::from_bytes(&ctx, &find(&log, Role::Controller, MessageKind::RelinKey)?.bytes)?,
            gk: GaloisKey::from_bytes(&ctx, &find(&log, Role::Controller, MessageKind::GaloisKey)?.bytes)?,
            gains,
            queue: CipherQueue::new(queue)?,
            zero: enc.trivial_slots(&SlotVector::default())?.with_delta_product(1),
            layout,
            counts: OpCounts::default(),
        };

        let mut warnings = Vec::new();
        let mut certificate = None;
        if let Some(plant) = plant {
            warnings.extend(plant.warnings());
            let lifted = lift_plant(plant, gain.length(), gain.q())?;
            let q = DMatrix::identity(lifted.dim(), lifted.dim());
            match delta_k_bound(&lifted, gain.k(), &q, LyapunovForm::Standard) {
                Ok(cert) => {
                    if !cert.admits(delta_k.value()) {
                        warnings.push(format!(
                            "delta_k = {} is not below the stability threshold {:.4e}",
                            delta_k.value(),
                            cert.delta_k_max
                        ));
                    }
                    certificate = Some(cert);
                }
                Err(e) => warnings.push(format!("no stability certificate: {e}")),
            }
        }

        Ok(Self {
            ctx,
            gain: gain.clone(),
            layout,
            delta_k,
            delta_d,
            operator,
            plant: plant_party,
            controller,
            setup_messages: log,
            certificate,
            warnings,
            t: 0,
        })
    }

    /// One sampling period. Returns the decrypted input `u_t`.
    pub fn step(&mut self, r: &DVector<f64>, y: &DVector<f64>) -> Result<StepTranscript, EncsysError> {
        let ctx = self.ctx.clone();
        let mut channel = Channel::new();
        self.operator.counts = OpCounts::default();
        self.plant.counts = OpCounts::default();
        self.controller.counts = OpCounts::default();
        let (mut t_op, mut t_plant, mut t_ctrl) = (Duration::ZERO, Duration::ZERO, Duration::ZERO);

        let clock = Instant::now();
        let ct_r = self.operator.encrypt_reference(r)?;
        let msg =
            channel.send(Message::ciphertext(&ctx, Role::Operator, Role::Controller, MessageKind::Reference, &ct_r));
        t_op += clock.elapsed();

        let clock = Instant::now();
        let ct_r = msg.open(&ctx, MessageKind::Reference)?;
        self.controller.receive_reference(&ct_r)?;
        t_ctrl += clock.elapsed();

        let clock = Instant::now();
        let ct_y = self.plant.encrypt_output(y)?;
        let msg = channel.send(Message::ciphertext(&ctx, Role::Plant, Role::Controller, MessageKind::Output, &ct_y));
        t_plant += clock.elapsed();

        let clock = Instant::now();
        let ct_y = msg.open(&ctx, MessageKind::Output)?;
        self.controller.receive_output(&ct_y)?;
        let ct = self.controller.compute()?;
        let msg = channel.send(Message::ciphertext(&ctx, Role::Controller, Role::Plant, MessageKind::Input, &ct));
        t_ctrl += clock.elapsed();

        let clock = Instant::now();
        let ct = msg.open(&ctx, MessageKind::Input)?;
        let (z, u) = self.plant.decrypt_input(&ct)?;
        let ct_u = self.plant.encrypt_input(&u)?;
        let msg = channel.send(Message::ciphertext(
            &ctx,
            Role::Plant,
            Role::Controller,
            MessageKind::ReEncryptedInput,
            &ct_u,
        ));
        t_plant += clock.elapsed();

        let clock = Instant::now();
        let ct_u = msg.open(&ctx, MessageKind::ReEncryptedInput)?;
        self.controller.receive_input(&ct_u)?;
        t_ctrl += clock.elapsed();

        let transcript = StepTranscript {
            t: self.t,
            messages: channel.drain(),
            z,
            u,
            counts: PartyCounts {
                operator: self.operator.counts,
                plant: self.plant.counts,
                controller: self.controller.counts,
            },
            timings: PartyTimings {
                operator_ms: elapsed_ms(t_op),
                plant_ms: elapsed_ms(t_plant),
                controller_ms: elapsed_ms(t_ctrl),
            },
        };
        self.t += 1;
        Ok(transcript)
    }

    /// Decrypts every queue slot with the plant's key. Instrumentation only.
    pub fn audit_queue(&self) -> Result<QueueAudit, EncsysError> {
        let mut slots = Vec::with_capacity(self.controller.queue.len());
        let mut margins = Vec::with_capacity(self.controller.queue.len());
        for ct in self.controller.queue.slots() {
            slots.push(self.plant.enc.decrypt_slots(&self.plant.sk, ct)?);
            margins.push(self.ctx.noise_margin(&self.plant.sk, ct)?);
        }
        Ok(QueueAudit { slots, margins })
    }

    /// Whether the queue holds exactly `blocks`, slot by slot, each laid out as `[r y u]`.
    pub fn queue_matches(&self, audit: &QueueAudit, blocks: &[Vec<i64>]) -> Result<bool, EncsysError> {
        if blocks.len() != audit.slots.len() {
            return Ok(false);
        }
        for (got, block) in audit.slots.iter().zip(blocks) {
            if *got != expected_slots(&self.layout, block, got.len())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn context(&self) -> &Arc<BfvContext> {
        &self.ctx
    }

    pub fn gain(&self) -> &IohfcGain {
        &self.gain
    }

    pub fn layout(&self) -> DataLayout {
        self.layout
    }

    pub fn delta_k(&self) -> Sensitivity {
        self.delta_k
    }

    pub fn delta_d(&self) -> Sensitivity {
        self.delta_d
    }

    /// Steps completed so far.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn setup_messages(&self) -> &[Message] {
        &self.setup_messages
    }

    pub fn certificate(&self) -> Option<&StabilityCertificate> {
        self.certificate.as_ref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn controller(&self) -> &ControllerParty {
        &self.controller
    }

    pub(crate) fn plant_keys(&self) -> (&Encoder, &PublicKey, &SecretKey) {
        (&self.plant.enc, &self.plant.pk, &self.plant.sk)
    }

    pub(crate) fn eval_keys(&self) -> (&RelinKey, &GaloisKey) {
        (&self.controller.rlk, &self.controller.gk)
    }

    /// Serialized size of one ciphertext of this context, in bytes.
    pub fn ciphertext_bytes(&self) -> usize {
        self.controller.queue.slots()[0].to_bytes(&self.ctx).len()
    }

    /// Every ciphertext the controller stores: `L + 1` gains and `L + 1` queue slots.
    pub fn controller_ciphertexts(&self) -> Vec<&Ciphertext> {
        self.controller.gains.iter().map(|g| &g.ct).chain(self.controller.queue.slots()).collect()
    }
}
