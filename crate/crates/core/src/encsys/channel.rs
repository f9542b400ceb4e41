//! Serialized messages between the parties and an in-process ordered channel.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use super::EncsysError;
use crate::bfv::{BfvContext, Ciphertext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Designer,
    Operator,
    Plant,
    Controller,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MessageKind {
    PublicKey,
    SecretKey,
    RelinKey,
    GaloisKey,
    /// Packed gain block `K̂_i`.
    Gain(usize),
    /// Initial zero encryption of queue slot `i`.
    Queue(usize),
    Reference,
    Output,
    /// The accumulated product returned to the plant.
    Input,
    ReEncryptedInput,
}

impl MessageKind {
    pub fn is_ciphertext(self) -> bool {
        matches!(
            self,
            Self::Gain(_) | Self::Queue(_) | Self::Reference | Self::Output | Self::Input | Self::ReEncryptedInput
        )
    }
}

/// One transmission. Ciphertext payloads carry their sensitivity exponent
/// alongside the wire bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub from: Role,
    pub to: Role,
    pub kind: MessageKind,
    pub delta_product: u32,
    pub bytes: Vec<u8>,
}

impl Message {
    pub fn ciphertext(ctx: &BfvContext, from: Role, to: Role, kind: MessageKind, ct: &Ciphertext) -> Self {
        Self { from, to, kind, delta_product: ct.delta_product, bytes: ct.to_bytes(ctx) }
    }

    pub fn open(&self, ctx: &BfvContext, expect: MessageKind) -> Result<Ciphertext, EncsysError> {
        if self.kind != expect || !self.kind.is_ciphertext() {
            return Err(EncsysError::Protocol(format!("expected {expect:?}, received {:?}", self.kind)));
        }
        Ok(Ciphertext::from_bytes(ctx, &self.bytes)?.with_delta_product(self.delta_product))
    }
}

/// Delivers messages in order and keeps the log of everything sent.
#[derive(Clone, Debug, Default)]
pub struct Channel {
    log: Vec<Message>,
}

impl Channel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, msg: Message) -> &Message {
        self.log.push(msg);
        self.log.last().expect("just pushed")
    }

    pub fn log(&self) -> &[Message] {
        &self.log
    }

    /// Hand over the log and start an empty one.
    pub fn drain(&mut self) -> Vec<Message> {
        std::mem::take(&mut self.log)
    }
}

/// Fingerprint of a message sequence, for determinism checks.
pub fn digest(messages: &[Message]) -> u64 {
    let mut h = DefaultHasher::new();
    messages.hash(&mut h);
    h.finish()
}
