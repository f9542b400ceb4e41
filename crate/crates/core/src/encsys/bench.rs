//! Timing of the scheme primitives with a loop's own keys.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::protocol::EncryptedLoop;
use super::EncsysError;
use crate::encoding::SlotVector;

/// Row labels in output order. `Mult` includes relinearization.
pub const BENCH_OPERATIONS: [&str; 7] = ["sigma", "sigma_inv", "Enc", "Dec", "Mult", "Add", "Rotate"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub operation: &'static str,
    pub min_ms: f64,
    pub avg_ms: f64,
    pub max_ms: f64,
    pub std_us: f64,
}

impl BenchRow {
    fn from_samples(operation: &'static str, samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let avg = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - avg).powi(2)).sum::<f64>() / n;
        Self {
            operation,
            min_ms: samples.iter().copied().fold(f64::INFINITY, f64::min),
            avg_ms: avg,
            max_ms: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            std_us: var.sqrt() * 1e3,
        }
    }
}

fn time<T>(samples: &mut Vec<f64>, f: impl FnOnce() -> T) -> T {
    let clock = Instant::now();
    let out = f();
    samples.push(clock.elapsed().as_secs_f64() * 1e3);
    out
}

/// Runs every primitive `trials` times on fresh random slot data.
pub fn bench(lp: &EncryptedLoop, trials: usize, seed: u64) -> Result<Vec<BenchRow>, EncsysError> {
    if trials == 0 {
        return Err(EncsysError::Protocol("bench needs at least one trial".into()));
    }
    let ctx = lp.context();
    let (enc, pk, sk) = lp.plant_keys();
    let (rlk, gk) = lp.eval_keys();
    let batch = enc.batch();
    let half = (enc.t() / 2) as i64;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); BENCH_OPERATIONS.len()];

    for _ in 0..trials {
        let mut random_slots = || SlotVector::new((0..enc.slot_count()).map(|_| rng.gen_range(-half..=half)).collect());
        let (a, b) = (random_slots(), random_slots());
        let pa = time(&mut samples[0], || batch.pack(&a))?;
        let back = time(&mut samples[1], || batch.unpack(&pa))?;
        debug_assert_eq!(back, a);
        let pb = batch.pack(&b)?;
        let ca = time(&mut samples[2], || ctx.encrypt(pk, &pa, &mut rng))?;
        let cb = ctx.encrypt(pk, &pb, &mut rng)?;
        time(&mut samples[3], || ctx.decrypt(sk, &ca))?;
        time(&mut samples[4], || ctx.mult_relin(rlk, &ca, &cb))?;
        time(&mut samples[5], || ctx.add(&ca, &cb))?;
        time(&mut samples[6], || ctx.rotate(gk, &ca))?;
    }
    Ok(BENCH_OPERATIONS.iter().zip(&samples).map(|(op, s)| BenchRow::from_samples(op, s)).collect())
}
