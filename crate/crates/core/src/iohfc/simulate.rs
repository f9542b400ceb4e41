//! Plaintext closed-loop simulation with either controller form.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::gain::History;
use super::{IohfcError, IohfcGain, Plant, StateSpaceController};

/// Pre-drawn process and measurement noise, one vector per step.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSequence {
    pub w: Vec<DVector<f64>>,
    pub v: Vec<DVector<f64>>,
}

impl NoiseSequence {
    /// I.i.d. zero-mean Gaussian entries of the given variance.
    pub fn gaussian(plant: &Plant, steps: usize, variance: f64, seed: u64) -> Result<Self, IohfcError> {
        let normal = Normal::new(0.0, variance.sqrt())
            .map_err(|e| IohfcError::Shape(format!("noise variance {variance}: {e}")))?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut draw = |k: usize| DVector::from_fn(k, |_, _| normal.sample(&mut rng));
        let mut w = Vec::with_capacity(steps);
        let mut v = Vec::with_capacity(steps);
        for _ in 0..steps {
            w.push(draw(plant.n()));
            v.push(draw(plant.l()));
        }
        Ok(Self { w, v })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ControlLaw<'a> {
    StateSpace(&'a StateSpaceController),
    Iohfc(&'a IohfcGain),
}

/// Per-step samples; `d` is filled only for the history form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub x: Vec<DVector<f64>>,
    pub y: Vec<DVector<f64>>,
    pub u: Vec<DVector<f64>>,
    pub d: Vec<DVector<f64>>,
}

/// Runs `y = Cx + v`, `u = law(t, r, y)`, `x⁺ = Ax + Bu + w` for every reference sample.
pub fn simulate_with<E, F>(
    plant: &Plant,
    x0: &DVector<f64>,
    refs: &[DVector<f64>],
    noise: Option<&NoiseSequence>,
    mut law: F,
) -> Result<Trajectory, E>
where
    F: FnMut(usize, &DVector<f64>, &DVector<f64>) -> Result<DVector<f64>, E>,
{
    let mut traj = Trajectory::default();
    let mut x = x0.clone();
    for (t, r) in refs.iter().enumerate() {
        let mut y = &plant.c * &x;
        if let Some(n) = noise {
            y += &n.v[t];
        }
        let u = law(t, r, &y)?;
        let mut next = &plant.a * &x + &plant.b * &u;
        if let Some(n) = noise {
            next += &n.w[t];
        }
        traj.x.push(x);
        traj.y.push(y);
        traj.u.push(u);
        x = next;
    }
    Ok(traj)
}

fn check_dims(
    plant: &Plant,
    q: usize,
    l: usize,
    m: usize,
    x0: &DVector<f64>,
    refs: &[DVector<f64>],
) -> Result<(), IohfcError> {
    if plant.l() != l || plant.m() != m || x0.len() != plant.n() {
        return Err(IohfcError::Shape(format!(
            "plant (n={}, m={}, l={}) against controller (m={m}, l={l}) and x0 of length {}",
            plant.n(),
            plant.m(),
            plant.l(),
            x0.len()
        )));
    }
    if let Some(r) = refs.iter().find(|r| r.len() != q) {
        return Err(IohfcError::Shape(format!("reference of length {} for q = {q}", r.len())));
    }
    Ok(())
}

/// Closed loop in floating point with zero controller pre-history.
pub fn simulate_plain(
    plant: &Plant,
    law: ControlLaw<'_>,
    x0: &DVector<f64>,
    refs: &[DVector<f64>],
    noise: Option<&NoiseSequence>,
) -> Result<Trajectory, IohfcError> {
    if let Some(n) = noise {
        if n.w.len() < refs.len() || n.v.len() < refs.len() {
            return Err(IohfcError::Shape("noise sequence shorter than the horizon".into()));
        }
    }
    match law {
        ControlLaw::StateSpace(c) => {
            check_dims(plant, c.q(), c.l(), c.m(), x0, refs)?;
            let mut z = DVector::zeros(c.p());
            simulate_with(plant, x0, refs, noise, |_, r, y| {
                let u = &c.c * &z + &c.d * y + &c.f * r;
                z = &c.a * &z + &c.b * y + &c.e * r;
                Ok(u)
            })
        }
        ControlLaw::Iohfc(g) => {
            check_dims(plant, g.q(), g.l(), g.m(), x0, refs)?;
            let mut hist = History::for_gain(g);
            let mut ds = Vec::with_capacity(refs.len());
            let mut traj = simulate_with(plant, x0, refs, noise, |_, r, y| {
                let d = hist.d(r, y);
                let u: DVector<f64> = g.k() * &d;
                hist.push(r.clone(), y.clone(), u.clone());
                ds.push(d);
                Ok::<_, IohfcError>(u)
            })?;
            traj.d = ds;
            Ok(traj)
        }
    }
}

/// Closed-loop state matrix of plant and state-space controller on `[x; z]`.
pub fn closed_loop_matrix(plant: &Plant, ctrl: &StateSpaceController) -> DMatrix<f64> {
    let (n, p) = (plant.n(), ctrl.p());
    let mut out = DMatrix::zeros(n + p, n + p);
    out.view_mut((0, 0), (n, n)).copy_from(&(&plant.a + &plant.b * &ctrl.d * &plant.c));
    out.view_mut((0, n), (n, p)).copy_from(&(&plant.b * &ctrl.c));
    out.view_mut((n, 0), (p, n)).copy_from(&(&ctrl.b * &plant.c));
    out.view_mut((n, n), (p, p)).copy_from(&ctrl.a);
    out
}
