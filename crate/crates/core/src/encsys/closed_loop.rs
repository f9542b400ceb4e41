//! Driving a plant with the encrypted controller, and reference schedules.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::channel::digest;
use super::oracle::QuantizedOracle;
use super::protocol::{EncryptedLoop, PartyCounts, PartyTimings};
use super::EncsysError;
use crate::iohfc::{simulate_plain, simulate_with, ControlLaw, NoiseSequence, Plant, Trajectory};

/// Reference `r` applied from step `start` until the next segment begins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub r: Vec<f64>,
}

/// Piecewise-constant reference signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct ReferenceSchedule {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for ReferenceSchedule {
    type Error = EncsysError;

    fn try_from(segments: Vec<Segment>) -> Result<Self, EncsysError> {
        Self::new(segments)
    }
}

impl From<ReferenceSchedule> for Vec<Segment> {
    fn from(s: ReferenceSchedule) -> Self {
        s.segments
    }
}

impl ReferenceSchedule {
    /// Segments must start at 0, be strictly increasing and share one dimension.
    pub fn new(segments: Vec<Segment>) -> Result<Self, EncsysError> {
        let Some(first) = segments.first() else {
            return Err(EncsysError::Shape("empty reference schedule".into()));
        };
        if first.start != 0 {
            return Err(EncsysError::Shape(format!("first segment starts at {}, not 0", first.start)));
        }
        let q = first.r.len();
        for w in segments.windows(2) {
            if w[1].start <= w[0].start {
                return Err(EncsysError::Shape(format!("segment start {} follows {}", w[1].start, w[0].start)));
            }
        }
        if let Some(bad) = segments.iter().find(|s| s.r.len() != q) {
            return Err(EncsysError::Shape(format!(
                "segment at {} has {} entries, expected {q}",
                bad.start,
                bad.r.len()
            )));
        }
        Ok(Self { segments })
    }

    /// Zero until step 600, then `±[0.5 0.5]` alternating every 200 steps up to step 1400.
    pub fn tank() -> Self {
        let mut segments = vec![Segment { start: 0, r: vec![0.0, 0.0] }];
        for (i, start) in (600..1400).step_by(200).enumerate() {
            let v = if i % 2 == 0 { 0.5 } else { -0.5 };
            segments.push(Segment { start, r: vec![v, v] });
        }
        Self { segments }
    }

    pub fn dim(&self) -> usize {
        self.segments[0].r.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn at(&self, t: usize) -> DVector<f64> {
        let seg = self.segments.iter().rev().find(|s| s.start <= t).expect("first segment starts at 0");
        DVector::from_column_slice(&seg.r)
    }

    pub fn sample(&self, steps: usize) -> Vec<DVector<f64>> {
        (0..steps).map(|t| self.at(t)).collect()
    }

    /// `sup_t ‖r_t‖`.
    pub fn sup_norm(&self) -> f64 {
        self.segments.iter().map(|s| s.r.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }
}

/// Optional work done alongside the encrypted run.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Also simulate the unencrypted history controller on the same inputs.
    pub plain: bool,
    /// Compare every decrypted input with [`QuantizedOracle`].
    pub oracle: bool,
    /// Decrypt the queue after every step, record its smallest noise margin
    /// and, together with `oracle`, check each slot's contents.
    pub audit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub t: usize,
    pub z: Vec<i64>,
    pub counts: PartyCounts,
    pub timings: PartyTimings,
    pub messages: usize,
    pub digest: u64,
    pub min_margin: Option<f64>,
    pub oracle_match: Option<bool>,
    pub queue_match: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ClosedLoopRun {
    pub encrypted: Trajectory,
    pub plain: Option<Trajectory>,
    pub records: Vec<StepRecord>,
}

impl ClosedLoopRun {
    /// `max_t ‖y_t − y'_t‖` against the unencrypted run.
    pub fn max_output_error(&self) -> Option<f64> {
        let plain = self.plain.as_ref()?;
        Some(self.encrypted.y.iter().zip(&plain.y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn oracle_mismatches(&self) -> usize {
        self.records.iter().filter(|r| r.oracle_match == Some(false)).count()
    }

    pub fn queue_mismatches(&self) -> usize {
        self.records.iter().filter(|r| r.queue_match == Some(false)).count()
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.min_margin).reduce(f64::min)
    }

    /// Fingerprint of every step digest, in order.
    pub fn transcript_digest(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for r in &self.records {
            r.digest.hash(&mut h);
        }
        h.finish()
    }
}

/// Advances `plant` with the decrypted input of every step.
pub fn run_closed_loop(
    lp: &mut EncryptedLoop,
    plant: &Plant,
    x0: &DVector<f64>,
    refs: &[DVector<f64>],
    noise: Option<&NoiseSequence>,
    options: RunOptions,
) -> Result<ClosedLoopRun, EncsysError> {
    let gain = lp.gain().clone();
    if plant.m() != gain.m() || plant.l() != gain.l() {
        return Err(EncsysError::Shape(format!(
            "plant with {} inputs and {} outputs for a gain with m = {}, l = {}",
            plant.m(),
            plant.l(),
            gain.m(),
            gain.l()
        )));
    }
    let mut oracle = if options.oracle {
        Some(QuantizedOracle::new(&gain, lp.delta_k(), lp.delta_d(), lp.context().params().t)?)
    } else {
        None
    };
    let mut records = Vec::with_capacity(refs.len());
    let encrypted = simulate_with(plant, x0, refs, noise, |t, r, y| {
        let tr = lp.step(r, y)?;
        let oracle_match = match oracle.as_mut() {
            Some(o) => {
                let (z, u) = o.step(r, y)?;
                Some(z == tr.z && u == tr.u)
            }
            None => None,
        };
        let (min_margin, queue_match) = if options.audit {
            let audit = lp.audit_queue()?;
            let matches = match oracle.as_ref() {
                Some(o) => Some(lp.queue_matches(&audit, &o.expected_queue())?),
                None => None,
            };
            (Some(audit.min_margin()), matches)
        } else {
            (None, None)
        };
        records.push(StepRecord {
            t,
            z: tr.z,
            counts: tr.counts,
            timings: tr.timings,
            messages: tr.messages.len(),
            digest: digest(&tr.messages),
            min_margin,
            oracle_match,
            queue_match,
        });
        Ok::<_, EncsysError>(tr.u)
    })?;
    let plain =
        if options.plain { Some(simulate_plain(plant, ControlLaw::Iohfc(&gain), x0, refs, noise)?) } else { None };
    Ok(ClosedLoopRun { encrypted, plain, records })
}
