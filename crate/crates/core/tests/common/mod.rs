//! Random system generators shared by the integration tests.
#![allow(dead_code)]

use iohfc_core::analysis::QuantizedGain;
use iohfc_core::encoding::{quantize, Sensitivity};
use iohfc_core::iohfc::linalg::spectral_radius;
use iohfc_core::iohfc::{
    closed_loop_matrix, simulate_with, transform, History, IohfcGain, Plant, StateSpaceController,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub fn random_matrix(rng: &mut ChaCha20Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

// random square matrix rescaled to the given spectral radius
pub fn random_with_radius(rng: &mut ChaCha20Rng, n: usize, radius: f64) -> DMatrix<f64> {
    loop {
        let a = random_matrix(rng, n, n);
        let rho = spectral_radius(&a);
        if rho > 1e-3 {
            return a * (radius / rho);
        }
    }
}

pub struct Loop {
    pub plant: Plant,
    pub ctrl: StateSpaceController,
}

/// Stable plant with an observable controller (p ≤ 5, q, ℓ, m ≤ 3) whose
/// interconnection has spectral radius below `max_rho`.
pub fn random_loop(rng: &mut ChaCha20Rng, max_rho: f64) -> Loop {
    loop {
        let (n, p) = (rng.gen_range(1..=4), rng.gen_range(1..=5));
        let (q, l, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (rho_p, rho_c) = (rng.gen_range(0.3..0.9), rng.gen_range(0.3..0.9));
        let plant =
            Plant::new(random_with_radius(rng, n, rho_p), random_matrix(rng, n, m), random_matrix(rng, l, n)).unwrap();
        let gain = 0.3;
        let Ok(ctrl) = StateSpaceController::new(
            random_with_radius(rng, p, rho_c),
            random_matrix(rng, p, l) * gain,
            random_matrix(rng, m, p),
            random_matrix(rng, m, l) * gain,
            random_matrix(rng, p, q),
            random_matrix(rng, m, q),
        ) else {
            continue;
        };
        if spectral_radius(&closed_loop_matrix(&plant, &ctrl)) < max_rho {
            return Loop { plant, ctrl };
        }
    }
}

/// Smallest admissible data length.
pub fn smallest_length(ctrl: &StateSpaceController) -> usize {
    (ctrl.p().max(1)..).find(|&l| transform(ctrl, l).is_ok()).unwrap()
}

pub fn random_refs(rng: &mut ChaCha20Rng, q: usize, steps: usize) -> Vec<DVector<f64>> {
    (0..steps).map(|_| DVector::from_fn(q, |_, _| rng.gen_range(-1.0..1.0))).collect()
}

/// Reference held at zero, then alternating ±0.5 every 200 steps from step 600.
pub fn tank_schedule(steps: usize) -> Vec<DVector<f64>> {
    (0..steps)
        .map(|t| {
            let v = if t < 600 {
                0.0
            } else if (t - 600) / 200 % 2 == 0 {
                0.5
            } else {
                -0.5
            };
            DVector::from_element(2, v)
        })
        .collect()
}

pub fn max_diff(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max)
}

// sup_t ‖y_t − y'_t‖ between the exact loop and `K̄·Q(d)`
pub fn simulated_error(
    plant: &Plant,
    g: &IohfcGain,
    qg: &QuantizedGain,
    x0: &DVector<f64>,
    refs: &[DVector<f64>],
) -> f64 {
    let mut h1 = History::for_gain(g);
    let exact = simulate_with(plant, x0, refs, None, |_, r, y| {
        let u = g.k() * h1.d(r, y);
        h1.push(r.clone(), y.clone(), u.clone());
        Ok::<_, ()>(u)
    })
    .unwrap();
    let mut h2 = History::for_gain(g);
    let dd = Sensitivity::new(qg.delta_d).unwrap();
    let quant = simulate_with(plant, x0, refs, None, |_, r, y| {
        let d_bar = h2.d(r, y).map(|x| quantize(x, dd, u64::MAX).unwrap());
        let u = &qg.k_bar * d_bar;
        h2.push(r.clone(), y.clone(), u.clone());
        Ok::<_, ()>(u)
    })
    .unwrap();
    exact.y.iter().zip(&quant.y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}
