//! State-free realization of a linear controller from its input-output history.
//!
//! A controller `z⁺ = Az + By + Er`, `u = Cz + Dy + Fr` with `(A, C)`
//! observable is rewritten as `u_t = K d_t` over a window of the last `L`
//! samples, and `K` is split into one block per queue slot for packed
//! evaluation. The plant is lifted so that `d_t` is its output.

mod gain;
mod lifted;
pub mod linalg;
mod model;
mod simulate;
mod stacks;
mod tank;

pub use gain::{transform, History, IohfcGain, PINV_TOLERANCE};
pub use lifted::{lift_plant, LiftedPlant};
pub use model::{MatrixFile, Plant, StateSpaceController};
pub use simulate::{closed_loop_matrix, simulate_plain, simulate_with, ControlLaw, NoiseSequence, Trajectory};
pub use stacks::{build_stacks, HistoryStack};
pub use tank::{tank_controller, tank_plant, TANK_LENGTH};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IohfcError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("(A, C) is not observable: observability rank {rank} < p = {p}; reduce the controller to a minimal realization first")]
    NotObservable { rank: usize, p: usize },
    #[error("data length L = {length} is invalid for a controller of order p = {p} (need L >= max(1, p))")]
    InvalidLength { length: usize, p: usize },
    #[error("V_L has rank {rank} < p = {p} for data length L = {length}")]
    RankDeficient { length: usize, rank: usize, p: usize },
    #[error("pseudoinverse check failed for L = {length}: ‖V⁺V − I‖ = {residual:e}")]
    PseudoInverse { length: usize, residual: f64 },
}
