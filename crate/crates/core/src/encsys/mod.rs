//! The three-party encrypted control loop.
//!
//! A designer generates keys and encrypts the gain blocks once. Each sampling
//! period the operator encrypts the reference and the plant encrypts its
//! output. The controller multiplies the packed gain with the ciphertext
//! queue and returns one ciphertext. The plant decrypts it and re-encrypts
//! the input so the queue never accumulates products. Parties are in-process
//! actors that talk only through serialized [`Message`]s on a [`Channel`].

mod bench;
mod channel;
mod closed_loop;
mod oracle;
mod parties;
mod protocol;

pub use bench::{bench, BenchRow, BENCH_OPERATIONS};
pub use channel::{digest, Channel, Message, MessageKind, Role};
pub use closed_loop::{run_closed_loop, ClosedLoopRun, ReferenceSchedule, RunOptions, Segment, StepRecord};
pub use oracle::QuantizedOracle;
pub use parties::{CipherQueue, ControllerParty, Operator, PlantParty};
pub use protocol::{EncryptedLoop, PartyCounts, PartyTimings, QueueAudit, StepTranscript};

use crate::analysis::AnalysisError;
use crate::bfv::BfvError;
use crate::encoding::EncodingError;
use crate::iohfc::IohfcError;
use crate::simd_linalg::SimdError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncsysError {
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Simd(#[from] SimdError),
    #[error(transparent)]
    Iohfc(#[from] IohfcError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
