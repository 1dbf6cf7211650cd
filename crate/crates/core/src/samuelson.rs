//! The multiplier-accelerator model as a singular discrete-time system.
//!
//! Model, for `k >= 2`:
//!
//! ```text
//! T(k) = C(k) + I(k) + G(k)          national income identity
//! C(k) = a T(k-1)                    consumption, 0 < a < 1
//! I(k) = b (C(k) - C(k-1))           investment,  b > 0
//! ```
//!
//! With `Y(k) = (T, C, I)` this is `F Y(k+1) = G Y(k) + V(k)` where
//!
//! ```text
//!     [0  0 0]       [-1  1 1]              [G(k)]
//! F = [0  1 0]   G = [ a  0 0]       V(k) = [ 0  ]
//!     [0 -b 1]       [ 0 -b 0]              [ 0  ]
//! ```
//!
//! Eliminating `C` and `I` gives the scalar recursion
//! `T(k) = a(1+b) T(k-1) - ab T(k-2) + G(k)`, which serves as the reference
//! oracle for everything else in the crate.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::descriptor::{solve_ivp, DescriptorSystem, InitialCondition, InputSequence};
use crate::error::ModelError;
use crate::pencil::{weierstrass_decompose, MatrixPencil, CLUSTER_TOL};

/// First index of the system equation; `T(0)` and `T(1)` are pre-sample.
pub const START_INDEX: i64 = 2;

/// Government expenditure `G(k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GovernmentExpenditure {
    Constant(f64),
    /// `values[j]` is `G(start + j)`.
    Sequence {
        start: i64,
        values: Vec<f64>,
    },
}

impl GovernmentExpenditure {
    pub fn at(&self, k: i64) -> Option<f64> {
        match self {
            GovernmentExpenditure::Constant(g) => Some(*g),
            GovernmentExpenditure::Sequence { start, values } => usize::try_from(k - start)
                .ok()
                .and_then(|j| values.get(j).copied()),
        }
    }
}

/// Validated model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SamuelsonParams {
    a: f64,
    b: f64,
    g: GovernmentExpenditure,
}

impl SamuelsonParams {
    pub fn new(a: f64, b: f64, g: GovernmentExpenditure) -> Result<Self, ModelError> {
        if !a.is_finite() {
            return Err(ModelError::NonFinite("a"));
        }
        if !b.is_finite() {
            return Err(ModelError::NonFinite("b"));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(ModelError::Multiplier(a));
        }
        if b <= 0.0 {
            return Err(ModelError::Accelerator(b));
        }
        let finite = match &g {
            GovernmentExpenditure::Constant(x) => x.is_finite(),
            GovernmentExpenditure::Sequence { values, .. } => values.iter().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(ModelError::NonFinite("government expenditure"));
        }
        Ok(Self { a, b, g })
    }

    /// Shorthand for constant expenditure.
    pub fn constant(a: f64, b: f64, gbar: f64) -> Result<Self, ModelError> {
        Self::new(a, b, GovernmentExpenditure::Constant(gbar))
    }

    /// Multiplier.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Accelerator.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn expenditure(&self) -> &GovernmentExpenditure {
        &self.g
    }

    pub fn expenditure_at(&self, k: i64) -> Result<f64, ModelError> {
        self.g
            .at(k)
            .ok_or(ModelError::InsufficientExpenditureData { k })
    }

    /// `(a(1+b), ab)`: the recursion is `T(k) = p T(k-1) - q T(k-2) + G(k)`.
    pub fn recursion_coefficients(&self) -> (f64, f64) {
        (self.a * (1.0 + self.b), self.a * self.b)
    }

    /// Long-run income `G / (1 - a)` for constant expenditure.
    pub fn steady_state(&self) -> Option<f64> {
        match self.g {
            GovernmentExpenditure::Constant(g) => Some(g / (1.0 - self.a)),
            GovernmentExpenditure::Sequence { .. } => None,
        }
    }
}

/// National income, consumption and investment in one year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomicState {
    pub t: f64,
    pub c: f64,
    pub i: f64,
}

impl EconomicState {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.t, self.c, self.i])
    }

    pub fn from_vector(y: &DVector<f64>) -> Self {
        Self {
            t: y[0],
            c: y[1],
            i: y[2],
        }
    }
}

/// The pencil of the model.
pub fn pencil(params: &SamuelsonParams) -> MatrixPencil {
    let (a, b) = (params.a, params.b);
    MatrixPencil::from_row_slices(
        3,
        3,
        &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -b, 1.0],
        &[-1.0, 1.0, 1.0, a, 0.0, 0.0, 0.0, -b, 0.0],
    )
    .expect("model matrices are finite and 3x3")
}

/// The descriptor system `F Y(k+1) = G Y(k) + V(k)`, `k >= 2`.
pub fn build_system(params: &SamuelsonParams) -> Result<DescriptorSystem, ModelError> {
    let embed = |g: f64| DVector::from_vec(vec![g, 0.0, 0.0]);
    let inputs = match &params.g {
        GovernmentExpenditure::Constant(g) => InputSequence::Constant(embed(*g)),
        GovernmentExpenditure::Sequence { start, values } => InputSequence::Indexed {
            start: *start,
            values: values.iter().map(|&g| embed(g)).collect(),
        },
    };
    Ok(DescriptorSystem::new(pencil(params), inputs, START_INDEX)?)
}

fn check_horizon(horizon: i64) -> Result<(), ModelError> {
    if horizon < START_INDEX {
        return Err(ModelError::Horizon {
            horizon,
            min: START_INDEX,
        });
    }
    Ok(())
}

/// Incomes `T(0) ..= T(horizon)` from the second-order recursion.
pub fn income_series(
    params: &SamuelsonParams,
    t0: f64,
    t1: f64,
    horizon: i64,
) -> Result<Vec<f64>, ModelError> {
    check_horizon(horizon)?;
    let (p, q) = params.recursion_coefficients();
    let mut t = Vec::with_capacity(horizon as usize + 1);
    t.push(t0);
    t.push(t1);
    for k in 2..=horizon {
        let j = k as usize;
        t.push(p * t[j - 1] - q * t[j - 2] + params.expenditure_at(k)?);
    }
    Ok(t)
}

/// States `k = 2 ..= horizon` from an income series starting at `T(0)`.
pub fn states_from_incomes(params: &SamuelsonParams, incomes: &[f64]) -> Vec<EconomicState> {
    let (a, ab) = (params.a, params.a * params.b);
    (2..incomes.len())
        .map(|k| EconomicState {
            t: incomes[k],
            c: a * incomes[k - 1],
            i: ab * (incomes[k - 1] - incomes[k - 2]),
        })
        .collect()
}

/// Reference solution: iterate the income recursion, then rebuild
/// consumption and investment from their behavioural equations.
/// Element `j` of the result is year `k = j + 2`.
pub fn recursion_oracle(
    params: &SamuelsonParams,
    t0: f64,
    t1: f64,
    horizon: i64,
) -> Result<Vec<EconomicState>, ModelError> {
    let incomes = income_series(params, t0, t1, horizon)?;
    Ok(states_from_incomes(params, &incomes))
}

/// The two finite eigenvalues of the model pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roots {
    pub s1: Complex64,
    pub s2: Complex64,
    /// `a²(1+b)² - 4ab`.
    pub discriminant: f64,
}

impl Roots {
    /// Roots closer than the clustering tolerance are treated as one double root.
    pub fn is_double(&self) -> bool {
        (self.s1 - self.s2).norm() < CLUSTER_TOL
    }

    pub fn spectral_radius(&self) -> f64 {
        self.s1.norm().max(self.s2.norm())
    }
}

/// Roots of `s² - a(1+b)s + ab`.
pub fn roots(params: &SamuelsonParams) -> Roots {
    let (p, q) = params.recursion_coefficients();
    let discriminant = p * p - 4.0 * q;
    let (s1, s2) = if discriminant < 0.0 {
        let re = p / 2.0;
        let im = (-discriminant).sqrt() / 2.0;
        (Complex64::new(re, im), Complex64::new(re, -im))
    } else {
        // larger root first; the smaller via the product avoids cancellation
        let big = (p + discriminant.sqrt()) / 2.0;
        (Complex64::new(big, 0.0), Complex64::new(q / big, 0.0))
    };
    let mut r = Roots {
        s1,
        s2,
        discriminant,
    };
    if r.is_double() {
        let mid = Complex64::new(p / 2.0, 0.0);
        r.s1 = mid;
        r.s2 = mid;
    }
    r
}

/// Modal form of the income path.
///
/// Distinct roots: `T(k) = c1 s1^k + c2 s2^k + sum_{i=2}^{k} h(k-i+1) G(i)`
/// with `h(n) = (s1^n - s2^n)/(s1 - s2)`. A double root `s` uses
/// `(c1 + c2 k) s^k` and `h(n) = n s^(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub roots: Roots,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ClosedForm {
    pub fn new(params: &SamuelsonParams, t0: f64, t1: f64) -> Self {
        let roots = roots(params);
        let (s1, s2) = (roots.s1, roots.s2);
        let (t0c, t1c) = (Complex64::new(t0, 0.0), Complex64::new(t1, 0.0));
        let (c1, c2) = if roots.is_double() {
            (t0c, t1c / s1 - t0c)
        } else {
            let d = s1 - s2;
            ((t1c - s2 * t0c) / d, (s1 * t0c - t1c) / d)
        };
        Self { roots, c1, c2 }
    }

    /// Free response `T_h(k)` before taking the real part.
    pub fn homogeneous_complex(&self, k: i64) -> Complex64 {
        let (s1, s2) = (self.roots.s1, self.roots.s2);
        let k32 = k as i32;
        if self.roots.is_double() {
            (self.c1 + self.c2 * k as f64) * s1.powi(k32)
        } else {
            self.c1 * s1.powi(k32) + self.c2 * s2.powi(k32)
        }
    }

    /// Impulse response `h(n)` before taking the real part.
    pub fn impulse_response_complex(&self, n: i64) -> Complex64 {
        let (s1, s2) = (self.roots.s1, self.roots.s2);
        if n <= 0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.roots.is_double() {
            s1.powi(n as i32 - 1) * n as f64
        } else {
            (s1.powi(n as i32) - s2.powi(n as i32)) / (s1 - s2)
        }
    }

    pub fn impulse_response(&self, n: i64) -> f64 {
        self.impulse_response_complex(n).re
    }

    /// Income in year `k`, with the complex residue before dropping it.
    pub fn income_complex(
        &self,
        params: &SamuelsonParams,
        k: i64,
    ) -> Result<Complex64, ModelError> {
        let mut t = self.homogeneous_complex(k);
        for i in START_INDEX..=k {
            t += self.impulse_response_complex(k - i + 1) * params.expenditure_at(i)?;
        }
        Ok(t)
    }

    pub fn income(&self, params: &SamuelsonParams, k: i64) -> Result<f64, ModelError> {
        Ok(self.income_complex(params, k)?.re)
    }
}

/// Closed-form states for `k = 2 ..= horizon`.
pub fn closed_form_trajectory(
    params: &SamuelsonParams,
    t0: f64,
    t1: f64,
    horizon: i64,
) -> Result<Vec<EconomicState>, ModelError> {
    check_horizon(horizon)?;
    let form = ClosedForm::new(params, t0, t1);
    // pre-sample incomes are the initial data themselves
    let mut incomes = vec![t0, t1];
    for k in 2..=horizon {
        incomes.push(form.income(params, k)?);
    }
    Ok(states_from_incomes(params, &incomes))
}

/// `Y(2) = (T2, a T1, ab (T1 - T0))` at `k0 = 2`.
pub fn consistent_initial_state(
    params: &SamuelsonParams,
    t0: f64,
    t1: f64,
    t2: f64,
) -> InitialCondition {
    InitialCondition {
        k0: START_INDEX,
        y0: DVector::from_vec(vec![t2, params.a * t1, params.a * params.b * (t1 - t0)]),
    }
}

/// `T(2)` continuing the recursion from `(T0, T1)`.
pub fn natural_t2(params: &SamuelsonParams, t0: f64, t1: f64) -> Result<f64, ModelError> {
    let (p, q) = params.recursion_coefficients();
    Ok(p * t1 - q * t0 + params.expenditure_at(START_INDEX)?)
}

/// Solves the model through its Weierstrass form from `Y(2)`.
///
/// `t2` defaults to the recursion continuation of `(t0, t1)`.
pub fn pencil_trajectory(
    params: &SamuelsonParams,
    t0: f64,
    t1: f64,
    t2: Option<f64>,
    horizon: i64,
) -> Result<Vec<EconomicState>, ModelError> {
    check_horizon(horizon)?;
    let system = build_system(params)?;
    let wform = weierstrass_decompose(system.pencil())?;
    let t2 = match t2 {
        Some(t) => t,
        None => natural_t2(params, t0, t1)?,
    };
    let ic = consistent_initial_state(params, t0, t1, t2);
    let traj = solve_ivp(&system, &wform, &ic, horizon)?;
    Ok(traj.states.iter().map(EconomicState::from_vector).collect())
}

/// Qualitative behaviour of the free response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub oscillatory: bool,
    pub stable: bool,
    pub spectral_radius: f64,
}

pub fn classify_regime(params: &SamuelsonParams) -> Regime {
    let r = roots(params);
    let oscillatory = r.discriminant < 0.0 && !r.is_double();
    let spectral_radius = if oscillatory {
        (params.a * params.b).sqrt()
    } else {
        r.spectral_radius()
    };
    Regime {
        oscillatory,
        stable: spectral_radius < 1.0,
        spectral_radius,
    }
}
