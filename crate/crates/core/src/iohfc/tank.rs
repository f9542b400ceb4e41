//! The linearized quadruple-tank process under decentralized PI control.

use nalgebra::DMatrix;

use super::{Plant, StateSpaceController};

/// Data length used with the tank controller.
pub const TANK_LENGTH: usize = 2;

/// Plant discretized with a 1 s sampling period around the nominal levels.
pub fn tank_plant() -> Plant {
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        0.9842, 0.0,    0.0407, 0.0,
        0.0,    0.9890, 0.0,    0.0326,
        0.0,    0.0,    0.9590, 0.0,
        0.0,    0.0,    0.0,    0.9672,
    ]);
    #[rustfmt::skip]
    let b = DMatrix::from_row_slice(4, 2, &[
        0.0826, 0.0010,
        0.0005, 0.0625,
        0.0,    0.0469,
        0.0307, 0.0,
    ]);
    let c = DMatrix::from_row_slice(2, 4, &[0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
    Plant::new(a, b, c).expect("tank plant shapes are consistent")
}

/// Discrete PI controller with proportional gains 3.0, 2.7 and integral times 30, 40.
pub fn tank_controller() -> StateSpaceController {
    let diag = |a: f64, b: f64| DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b]);
    StateSpaceController::new(
        DMatrix::identity(2, 2),
        -DMatrix::<f64>::identity(2, 2),
        diag(0.1, 0.0675),
        diag(-3.0, -2.7),
        DMatrix::identity(2, 2),
        diag(3.0, 2.7),
    )
    .expect("tank controller is observable")
}
