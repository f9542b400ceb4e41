//! The history feedback gain `u_t = K d_t` and its per-timestep block split.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::{hstack, matrix_power, pinv, rank};
use super::model::MatrixFile;
use super::stacks::build_stacks;
use super::{IohfcError, StateSpaceController};

/// Tolerance on `‖V_L⁺V_L − I‖` for an accepted transformation.
pub const PINV_TOLERANCE: f64 = 1e-9;

/// `K` acting on `d_t = [r_{t-L} … r_t, y_{t-L} … y_t, u_{t-L} … u_{t-1}]`.
///
/// Queue slot `i` (for `i = 0…L`) holds the samples of time `t-L+i`; its gain
/// block is `K̂_i = [K_{r,i} K_{y,i} K_{u,i}]` with `K_{u,L} = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GainFile", into = "GainFile")]
pub struct IohfcGain {
    k: DMatrix<f64>,
    length: usize,
    q: usize,
    l: usize,
    m: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl IohfcGain {
    /// Wrap an existing `m × ((L+1)(q+ℓ) + Lm)` gain.
    pub fn from_matrix(k: DMatrix<f64>, length: usize, q: usize, l: usize) -> Result<Self, IohfcError> {
        let m = k.nrows();
        let width = (length + 1) * (q + l) + length * m;
        if k.ncols() != width || m == 0 {
            return Err(IohfcError::Shape(format!(
                "gain is {}x{}, expected {m}x{width} for L = {length}, q = {q}, l = {l}",
                k.nrows(),
                k.ncols()
            )));
        }
        let mut g = Self { k, length, q, l, m, blocks: Vec::new() };
        g.blocks = (0..=length).map(|i| hstack(&[&g.k_r(i), &g.k_y(i), &g.k_u(i)])).collect();
        Ok(g)
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Block width `h = q + ℓ + m`.
    pub fn h(&self) -> usize {
        self.q + self.l + self.m
    }

    /// Length of `d_t`.
    pub fn width(&self) -> usize {
        self.k.ncols()
    }

    /// `K̂_0 … K̂_L`, each `m × h`.
    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn k_r(&self, i: usize) -> DMatrix<f64> {
        self.k.columns(self.q * i, self.q).into_owned()
    }

    pub fn k_y(&self, i: usize) -> DMatrix<f64> {
        self.k.columns(self.q * (self.length + 1) + self.l * i, self.l).into_owned()
    }

    /// Zero for `i = L`.
    pub fn k_u(&self, i: usize) -> DMatrix<f64> {
        if i == self.length {
            return DMatrix::zeros(self.m, self.m);
        }
        self.k.columns((self.q + self.l) * (self.length + 1) + self.m * i, self.m).into_owned()
    }

    /// Rebuild `K` from the `r`, `y` and `u` slices of every block.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let rs: Vec<_> = (0..=self.length).map(|i| self.k_r(i)).collect();
        let ys: Vec<_> = (0..=self.length).map(|i| self.k_y(i)).collect();
        let us: Vec<_> = (0..self.length).map(|i| self.k_u(i)).collect();
        let all: Vec<&DMatrix<f64>> = rs.iter().chain(&ys).chain(&us).collect();
        hstack(&all)
    }
}

/// `K = [C(S_L − A^L V⁺J_L)  F  C(R_L − A^L V⁺H_L)  D  C A^L V⁺]`.
///
/// Requires `L ≥ p` and `rank V_L = p`. A memoryless controller (`p = 0`)
/// yields zero history blocks around `F` and `D`.
pub fn transform(ctrl: &StateSpaceController, length: usize) -> Result<IohfcGain, IohfcError> {
    let p = ctrl.p();
    if length == 0 || length < p {
        return Err(IohfcError::InvalidLength { length, p });
    }
    let st = build_stacks(ctrl, length)?;
    let (q, l, m) = (ctrl.q(), ctrl.l(), ctrl.m());
    let k = if p == 0 {
        hstack(&[
            &DMatrix::zeros(m, length * q),
            &ctrl.f,
            &DMatrix::zeros(m, length * l),
            &ctrl.d,
            &DMatrix::zeros(m, length * m),
        ])
    } else {
        let r = rank(&st.v);
        if r < p {
            return Err(IohfcError::RankDeficient { length, rank: r, p });
        }
        let vp = pinv(&st.v);
        let resid = (&vp * &st.v - DMatrix::identity(p, p)).norm();
        if resid > PINV_TOLERANCE {
            return Err(IohfcError::PseudoInverse { length, residual: resid });
        }
        let alv = matrix_power(&ctrl.a, length) * &vp;
        hstack(&[
            &(&ctrl.c * (&st.s - &alv * &st.j)),
            &ctrl.f,
            &(&ctrl.c * (&st.r - &alv * &st.h)),
            &ctrl.d,
            &(&ctrl.c * &alv),
        ])
    };
    IohfcGain::from_matrix(k, length, q, l)
}

/// Sliding window of the last `L` references, outputs and inputs, oldest
/// first, starting from zero pre-history.
#[derive(Clone, Debug)]
pub struct History {
    r: VecDeque<DVector<f64>>,
    y: VecDeque<DVector<f64>>,
    u: VecDeque<DVector<f64>>,
}

impl History {
    pub fn zeros(length: usize, q: usize, l: usize, m: usize) -> Self {
        Self {
            r: std::iter::repeat_n(DVector::zeros(q), length).collect(),
            y: std::iter::repeat_n(DVector::zeros(l), length).collect(),
            u: std::iter::repeat_n(DVector::zeros(m), length).collect(),
        }
    }

    pub fn for_gain(g: &IohfcGain) -> Self {
        Self::zeros(g.length, g.q, g.l, g.m)
    }

    /// `d_t` given the current reference and output.
    pub fn d(&self, r_t: &DVector<f64>, y_t: &DVector<f64>) -> DVector<f64> {
        let parts: Vec<&DVector<f64>> =
            self.r.iter().chain([r_t]).chain(self.y.iter()).chain([y_t]).chain(self.u.iter()).collect();
        let len = parts.iter().map(|v| v.len()).sum();
        DVector::from_iterator(len, parts.into_iter().flat_map(|v| v.iter().copied()))
    }

    /// `d̂_0 … d̂_L`, slot `i` holding `[r; y; u]` of time `t-L+i` and a zero
    /// input in the newest slot.
    pub fn blocks(&self, r_t: &DVector<f64>, y_t: &DVector<f64>) -> Vec<DVector<f64>> {
        let m = self.u.front().map_or(0, |u| u.len());
        let zero_u = DVector::zeros(m);
        let rs = self.r.iter().chain([r_t]);
        let ys = self.y.iter().chain([y_t]);
        let us = self.u.iter().chain([&zero_u]);
        rs.zip(ys)
            .zip(us)
            .map(|((r, y), u)| {
                DVector::from_iterator(r.len() + y.len() + u.len(), r.iter().chain(y.iter()).chain(u.iter()).copied())
            })
            .collect()
    }

    /// Append time `t` and drop the oldest sample.
    pub fn push(&mut self, r_t: DVector<f64>, y_t: DVector<f64>, u_t: DVector<f64>) {
        if self.r.is_empty() {
            return;
        }
        self.r.pop_front();
        self.y.pop_front();
        self.u.pop_front();
        self.r.push_back(r_t);
        self.y.push_back(y_t);
        self.u.push_back(u_t);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct GainFile {
    K: MatrixFile,
    L: usize,
    q: usize,
    l: usize,
    m: usize,
}

impl TryFrom<GainFile> for IohfcGain {
    type Error = IohfcError;

    fn try_from(f: GainFile) -> Result<Self, IohfcError> {
        let g = IohfcGain::from_matrix(f.K.try_into()?, f.L, f.q, f.l)?;
        if g.m != f.m {
            return Err(IohfcError::Shape(format!("gain has {} rows but m = {}", g.m, f.m)));
        }
        Ok(g)
    }
}

impl From<IohfcGain> for GainFile {
    fn from(g: IohfcGain) -> Self {
        Self { K: (&g.k).into(), L: g.length, q: g.q, l: g.l, m: g.m }
    }
}
