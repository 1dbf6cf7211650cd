//! Regular descriptor systems `F Y(k+1) = G Y(k) + V(k)`, `k >= start`.
//!
//! Solutions are assembled from the Weierstrass form of the pencil. With
//! `n = k - start` the general solution reads
//!
//! ```text
//! Y(k) = Q_p J_p^n C + Q D(k)
//! D(k) = [  sum_{i=start}^{k-1} J_p^{k-i-1} P_1 V(i)      ]
//!        [ -sum_{i=0}^{q*-1}    H_q^i       P_2 V(k+i)    ]
//! ```
//!
//! so the slow part starts at `C` on the first index and the fast part looks
//! `q* - 1` steps ahead in the input.

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::linalg::lstsq;
use crate::pencil::{is_regular, MatrixPencil, RegularityVerdict, WeierstrassForm};

/// Residual bound factor for trajectories: `1e-9 * max(1, |Y|_max)`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Consistency bound factor: `1e-8 * (1 + |Y0|_max)`.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// The input sequence `V(k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSequence {
    /// `V(k) = 0` for every `k`.
    Zero(usize),
    /// The same vector for every `k`.
    Constant(DVector<f64>),
    /// `values[j]` is `V(start + j)`; undefined outside that range.
    Indexed {
        start: i64,
        values: Vec<DVector<f64>>,
    },
}

impl InputSequence {
    pub fn at(&self, k: i64) -> Option<DVector<f64>> {
        match self {
            InputSequence::Zero(m) => Some(DVector::zeros(*m)),
            InputSequence::Constant(v) => Some(v.clone()),
            InputSequence::Indexed { start, values } => {
                let j = usize::try_from(k - start).ok()?;
                values.get(j).cloned()
            }
        }
    }

    /// True when every `V(k)` is zero.
    pub fn is_zero(&self) -> bool {
        match self {
            InputSequence::Zero(_) => true,
            InputSequence::Constant(v) => v.iter().all(|x| *x == 0.0),
            InputSequence::Indexed { values, .. } => {
                values.iter().all(|v| v.iter().all(|x| *x == 0.0))
            }
        }
    }
}

/// A regular descriptor system with its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSystem {
    pencil: MatrixPencil,
    inputs: InputSequence,
    start_index: i64,
}

impl DescriptorSystem {
    pub fn new(
        pencil: MatrixPencil,
        inputs: InputSequence,
        start_index: i64,
    ) -> Result<Self, SolverError> {
        match is_regular(&pencil) {
            RegularityVerdict::Regular => {}
            RegularityVerdict::SingularShape => {
                return Err(crate::PencilError::NonSquarePencil {
                    rows: pencil.rows(),
                    cols: pencil.cols(),
                }
                .into())
            }
            RegularityVerdict::SingularDeterminant => {
                return Err(crate::PencilError::IrregularPencil.into())
            }
        }
        let m = pencil.cols();
        let dim = match &inputs {
            InputSequence::Zero(d) => Some(*d),
            InputSequence::Constant(v) => Some(v.len()),
            InputSequence::Indexed { values, .. } => {
                values.iter().map(|v| v.len()).find(|&l| l != m)
            }
        };
        if let Some(got) = dim {
            if got != m {
                return Err(SolverError::InputDimension {
                    k: start_index,
                    got,
                    expected: m,
                });
            }
        }
        Ok(Self {
            pencil,
            inputs,
            start_index,
        })
    }

    pub fn pencil(&self) -> &MatrixPencil {
        &self.pencil
    }

    pub fn inputs(&self) -> &InputSequence {
        &self.inputs
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn dim(&self) -> usize {
        self.pencil.cols()
    }

    pub fn input(&self, k: i64) -> Result<DVector<f64>, SolverError> {
        self.inputs.at(k).ok_or(SolverError::MissingInput { k })
    }

    /// Same pencil and inputs with every input replaced by zero.
    pub fn homogeneous(&self) -> Self {
        Self {
            pencil: self.pencil.clone(),
            inputs: InputSequence::Zero(self.dim()),
            start_index: self.start_index,
        }
    }

    /// `F Y(k+1) - G Y(k) - V(k)`.
    pub fn step_residual(
        &self,
        k: i64,
        y_k: &DVector<f64>,
        y_next: &DVector<f64>,
    ) -> Result<DVector<f64>, SolverError> {
        Ok(self.pencil.f() * y_next - self.pencil.g() * y_k - self.input(k)?)
    }
}

/// `Q D(k)` for one index.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedTerm {
    pub k: i64,
    pub value: DVector<f64>,
}

/// State of a descriptor system at a given index.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub k0: i64,
    pub y0: DVector<f64>,
}

/// A solution sequence `Y(start) ... Y(horizon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start_index: i64,
    pub states: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn get(&self, k: i64) -> Option<&DVector<f64>> {
        usize::try_from(k - self.start_index)
            .ok()
            .and_then(|j| self.states.get(j))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Last index covered.
    pub fn horizon(&self) -> i64 {
        self.start_index + self.states.len() as i64 - 1
    }

    /// Largest entry modulus over the whole trajectory.
    pub fn max_abs(&self) -> f64 {
        self.states.iter().map(|y| y.amax()).fold(0.0, f64::max)
    }

    /// Largest max-norm step residual of the system equation.
    pub fn max_residual(&self, system: &DescriptorSystem) -> Result<f64, SolverError> {
        let mut worst = 0.0f64;
        for (j, pair) in self.states.windows(2).enumerate() {
            let k = self.start_index + j as i64;
            worst = worst.max(system.step_residual(k, &pair[0], &pair[1])?.amax());
        }
        Ok(worst)
    }
}

/// Outcome of the membership test `Y0 - Q D(k0) in colspan(Q_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// Least-squares minimiser of `|Q_p Z - (Y0 - Q D(k0))|`; `None` when `p = 0`.
    pub z: Option<DVector<f64>>,
}

fn check_dims(system: &DescriptorSystem, wform: &WeierstrassForm) -> Result<(), SolverError> {
    if wform.m() != system.dim() {
        return Err(SolverError::DimensionMismatch {
            got: wform.m(),
            expected: system.dim(),
        });
    }
    Ok(())
}

// Slow part of D(k): sum_{i=start}^{k-1} J^(k-1-i) P_1 V(i).
fn slow_sum(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    k: i64,
) -> Result<DVector<f64>, SolverError> {
    let start = system.start_index();
    if k < start {
        return Err(SolverError::BeforeStart { k, start });
    }
    let p1 = wform.p1();
    let mut top = DVector::zeros(wform.p());
    for i in start..k {
        top = wform.j_p() * top + &p1 * system.input(i)?;
    }
    Ok(top)
}

// Q [top; -sum_{i<q*} H^i P_2 V(k+i)].
fn with_fast_part(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    k: i64,
    p2: &DMatrix<f64>,
    top: &DVector<f64>,
) -> Result<DVector<f64>, SolverError> {
    let mut bottom = DVector::zeros(wform.q());
    let mut hpow = DMatrix::identity(wform.q(), wform.q());
    for i in 0..wform.q_star() {
        bottom -= &hpow * (p2 * system.input(k + i as i64)?);
        hpow = &hpow * wform.h_q();
    }
    let mut d = DVector::zeros(wform.m());
    d.rows_mut(0, wform.p()).copy_from(top);
    d.rows_mut(wform.p(), wform.q()).copy_from(&bottom);
    Ok(wform.q_matrix() * d)
}

/// The particular part `Q D(k)` of the general solution.
pub fn forced_term(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    k: i64,
) -> Result<ForcedTerm, SolverError> {
    check_dims(system, wform)?;
    let top = slow_sum(system, wform, k)?;
    let value = with_fast_part(system, wform, k, &wform.p2(), &top)?;
    Ok(ForcedTerm { k, value })
}

// Y(k) = Q_p J^(k - anchor) Z + Q D(k) for k in first..=horizon.
fn assemble(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    z: &DVector<f64>,
    first: i64,
    horizon: i64,
) -> Result<Trajectory, SolverError> {
    if z.len() != wform.p() {
        return Err(SolverError::DimensionMismatch {
            got: z.len(),
            expected: wform.p(),
        });
    }
    if horizon < first {
        return Err(SolverError::BeforeStart {
            k: horizon,
            start: first,
        });
    }
    let (q_p, p1, p2) = (wform.q_p(), wform.p1(), wform.p2());
    let j = wform.j_p();
    // slow state J^(k-first) Z and slow forced sum, both advanced one step at a time
    let mut x = z.clone();
    let mut top = slow_sum(system, wform, first)?;
    let mut states = Vec::with_capacity((horizon - first + 1) as usize);
    for k in first..=horizon {
        states.push(&q_p * &x + with_fast_part(system, wform, k, &p2, &top)?);
        if k < horizon {
            x = j * x;
            top = j * top + &p1 * system.input(k)?;
        }
    }
    let traj = Trajectory {
        start_index: first,
        states,
    };
    let residual = traj.max_residual(system)?;
    let bound = RESIDUAL_TOL * traj.max_abs().max(1.0);
    // NaN residuals fail too
    if residual.is_nan() || residual >= bound {
        return Err(SolverError::ResidualCheck { residual, bound });
    }
    Ok(traj)
}

/// General solution for a given slow-state constant `C` (length `p`), over
/// `start..=horizon`.
pub fn solve_general(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    c: &DVector<f64>,
    horizon: i64,
) -> Result<Trajectory, SolverError> {
    check_dims(system, wform)?;
    assemble(system, wform, c, system.start_index(), horizon)
}

/// Tests whether `ic` lies on the solution manifold at its index.
pub fn check_consistency(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    ic: &InitialCondition,
) -> Result<ConsistencyReport, SolverError> {
    check_dims(system, wform)?;
    if ic.y0.len() != system.dim() {
        return Err(SolverError::DimensionMismatch {
            got: ic.y0.len(),
            expected: system.dim(),
        });
    }
    let forced = forced_term(system, wform, ic.k0)?;
    let target = &ic.y0 - &forced.value;
    let tolerance = CONSISTENCY_TOL * (1.0 + ic.y0.amax());
    let (residual, z) = if wform.p() == 0 {
        (target.amax(), None)
    } else {
        let q_p = wform.q_p();
        let z = lstsq(&q_p, &target).ok_or_else(|| {
            crate::PencilError::NumericalBreakdown("least-squares solve failed".into())
        })?;
        ((&q_p * &z - &target).amax(), Some(z))
    };
    Ok(ConsistencyReport {
        consistent: residual < tolerance,
        residual,
        tolerance,
        z,
    })
}

/// The unique solution through a consistent initial condition, over
/// `ic.k0..=horizon`.
pub fn solve_ivp(
    system: &DescriptorSystem,
    wform: &WeierstrassForm,
    ic: &InitialCondition,
    horizon: i64,
) -> Result<Trajectory, SolverError> {
    let report = check_consistency(system, wform, ic)?;
    if !report.consistent {
        return Err(SolverError::InconsistentIC {
            residual: report.residual,
            tolerance: report.tolerance,
        });
    }
    let z = report.z.unwrap_or_else(|| DVector::zeros(0));
    assemble(system, wform, &z, ic.k0, horizon)
}
