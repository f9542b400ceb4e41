//! State-space controller and plant models with their JSON file forms.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{controllability_matrix, observability_matrix, rank};
use super::IohfcError;

/// `z⁺ = Az + By + Er`, `u = Cz + Dy + Fr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControllerFile", into = "ControllerFile")]
pub struct StateSpaceController {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

fn expect_shape(what: &str, m: &DMatrix<f64>, rows: usize, cols: usize) -> Result<(), IohfcError> {
    if m.shape() != (rows, cols) {
        return Err(IohfcError::Shape(format!("{what} is {}x{}, expected {rows}x{cols}", m.nrows(), m.ncols())));
    }
    Ok(())
}

impl StateSpaceController {
    /// Validates shapes and observability of `(A, C)`.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
        f: DMatrix<f64>,
    ) -> Result<Self, IohfcError> {
        let p = a.nrows();
        let (m, l) = d.shape();
        let q = f.ncols();
        expect_shape("A", &a, p, p)?;
        expect_shape("B", &b, p, l)?;
        expect_shape("C", &c, m, p)?;
        expect_shape("E", &e, p, q)?;
        expect_shape("F", &f, m, q)?;
        if m == 0 {
            return Err(IohfcError::Shape("controller has no outputs".into()));
        }
        let ctrl = Self { a, b, c, d, e, f };
        if p > 0 {
            let r = rank(&observability_matrix(&ctrl.a, &ctrl.c, p));
            if r < p {
                return Err(IohfcError::NotObservable { rank: r, p });
            }
        }
        Ok(ctrl)
    }

    /// Memoryless `u = Dy + Fr`.
    pub fn static_gain(d: DMatrix<f64>, f: DMatrix<f64>) -> Result<Self, IohfcError> {
        let (m, l) = d.shape();
        let q = f.ncols();
        Self::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, l), DMatrix::zeros(m, 0), d, DMatrix::zeros(0, q), f)
    }

    /// Controller state dimension.
    pub fn p(&self) -> usize {
        self.a.nrows()
    }

    /// Reference dimension.
    pub fn q(&self) -> usize {
        self.f.ncols()
    }

    /// Measured output dimension.
    pub fn l(&self) -> usize {
        self.d.ncols()
    }

    /// Control input dimension.
    pub fn m(&self) -> usize {
        self.d.nrows()
    }
}

/// `x⁺ = A_p x + B_p u (+ w)`, `y = C_p x (+ v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlantFile", into = "PlantFile")]
pub struct Plant {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl Plant {
    /// Validates shapes only; see [`Plant::is_controllable`] and
    /// [`Plant::is_observable`] for the structural checks.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self, IohfcError> {
        let n = a.nrows();
        if n == 0 {
            return Err(IohfcError::Shape("plant has no state".into()));
        }
        expect_shape("A_p", &a, n, n)?;
        expect_shape("B_p", &b, n, b.ncols())?;
        expect_shape("C_p", &c, c.nrows(), n)?;
        Ok(Self { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    pub fn l(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_controllable(&self) -> bool {
        rank(&controllability_matrix(&self.a, &self.b, self.n())) == self.n()
    }

    pub fn is_observable(&self) -> bool {
        rank(&observability_matrix(&self.a, &self.c, self.n())) == self.n()
    }

    /// Human-readable notes for violated structural assumptions.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.is_controllable() {
            out.push("plant (A_p, B_p) is not controllable".to_string());
        }
        if !self.is_observable() {
            out.push("plant (A_p, C_p) is not observable".to_string());
        }
        out
    }
}

/// Row-major matrix with explicit shape, so zero-sized blocks survive a round trip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixFile {
    fn from(m: &DMatrix<f64>) -> Self {
        Self { rows: m.nrows(), cols: m.ncols(), data: m.transpose().as_slice().to_vec() }
    }
}

impl TryFrom<MatrixFile> for DMatrix<f64> {
    type Error = IohfcError;

    fn try_from(f: MatrixFile) -> Result<Self, IohfcError> {
        if f.data.len() != f.rows * f.cols {
            return Err(IohfcError::Shape(format!("{} entries for a {}x{} matrix", f.data.len(), f.rows, f.cols)));
        }
        Ok(DMatrix::from_row_slice(f.rows, f.cols, &f.data))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ControllerFile {
    A: MatrixFile,
    B: MatrixFile,
    C: MatrixFile,
    D: MatrixFile,
    E: MatrixFile,
    F: MatrixFile,
}

impl TryFrom<ControllerFile> for StateSpaceController {
    type Error = IohfcError;

    fn try_from(f: ControllerFile) -> Result<Self, IohfcError> {
        Self::new(f.A.try_into()?, f.B.try_into()?, f.C.try_into()?, f.D.try_into()?, f.E.try_into()?, f.F.try_into()?)
    }
}

impl From<StateSpaceController> for ControllerFile {
    fn from(c: StateSpaceController) -> Self {
        Self {
            A: (&c.a).into(),
            B: (&c.b).into(),
            C: (&c.c).into(),
            D: (&c.d).into(),
            E: (&c.e).into(),
            F: (&c.f).into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct PlantFile {
    Ap: MatrixFile,
    Bp: MatrixFile,
    Cp: MatrixFile,
}

impl TryFrom<PlantFile> for Plant {
    type Error = IohfcError;

    fn try_from(f: PlantFile) -> Result<Self, IohfcError> {
        Self::new(f.Ap.try_into()?, f.Bp.try_into()?, f.Cp.try_into()?)
    }
}

impl From<Plant> for PlantFile {
    fn from(p: Plant) -> Self {
        Self { Ap: (&p.a).into(), Bp: (&p.b).into(), Cp: (&p.c).into() }
    }
}
