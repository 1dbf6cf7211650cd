//! Python bindings: pencils, Weierstrass forms, descriptor-system solves and
//! the multiplier-accelerator model. Matrices cross the boundary as lists of
//! rows, eigenvalues as Python complex numbers.

use descriptor_pencil::samuelson::{self, GovernmentExpenditure, SamuelsonParams};
use descriptor_pencil::{
    check_consistency, eigenstructure, is_regular, pencil_det_poly, solve_ivp,
    weierstrass_decompose, DescriptorSystem, InitialCondition, InputSequence, MatrixPencil,
    RegularityVerdict, WeierstrassForm,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows have different lengths"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// A matrix pencil `sF - G`.
#[pyclass(name = "MatrixPencil", frozen)]
struct PyPencil {
    inner: MatrixPencil,
}

#[pymethods]
impl PyPencil {
    #[new]
    fn new(f: Vec<Vec<f64>>, g: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = MatrixPencil::new(to_matrix(&f)?, to_matrix(&g)?).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn f(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.f())
    }

    #[getter]
    fn g(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.g())
    }

    /// Coefficients of det(sF - G), constant term first.
    fn det_poly(&self) -> PyResult<Vec<f64>> {
        Ok(pencil_det_poly(&self.inner)
            .map_err(value_err)?
            .coefficients()
            .to_vec())
    }

    /// "regular", "singular_shape" or "singular_determinant".
    fn regularity(&self) -> &'static str {
        match is_regular(&self.inner) {
            RegularityVerdict::Regular => "regular",
            RegularityVerdict::SingularShape => "singular_shape",
            RegularityVerdict::SingularDeterminant => "singular_determinant",
        }
    }

    fn is_regular(&self) -> bool {
        is_regular(&self.inner) == RegularityVerdict::Regular
    }

    /// Dict with `finite` (list of (eigenvalue, multiplicity)), `p`, `q`, `m`.
    fn eigenstructure<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let es = eigenstructure(&self.inner).map_err(value_err)?;
        let d = PyDict::new(py);
        let finite: Vec<(Complex64, usize)> = es
            .finite
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect();
        d.set_item("finite", finite)?;
        d.set_item("p", es.p)?;
        d.set_item("q", es.q)?;
        d.set_item("m", es.m)?;
        Ok(d)
    }

    fn weierstrass(&self) -> PyResult<PyWeierstrass> {
        let inner = weierstrass_decompose(&self.inner).map_err(value_err)?;
        Ok(PyWeierstrass {
            inner,
            pencil: self.inner.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!("MatrixPencil({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// `P F Q = diag(I_p, H_q)`, `P G Q = diag(J_p, I_q)`.
#[pyclass(name = "WeierstrassForm", frozen)]
struct PyWeierstrass {
    inner: WeierstrassForm,
    pencil: MatrixPencil,
}

#[pymethods]
impl PyWeierstrass {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q()
    }

    #[getter]
    fn q_star(&self) -> usize {
        self.inner.q_star()
    }

    #[getter(P)]
    fn p_matrix(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.p_matrix())
    }

    #[getter(Q)]
    fn q_matrix(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.q_matrix())
    }

    #[getter]
    fn j_p(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.j_p())
    }

    #[getter]
    fn h_q(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.h_q())
    }

    /// Max-norm residuals of the two block identities.
    fn residuals(&self) -> (f64, f64) {
        self.inner.residuals(&self.pencil)
    }
}

/// Solves `F Y(k+1) = G Y(k) + V(k)` from a consistent `y0` at `k0`.
///
/// `inputs` is either one vector used at every step or a list of vectors
/// with `inputs[j] = V(start + j)`; omitted means zero input.
#[pyfunction]
#[pyo3(signature = (pencil, y0, horizon, k0=0, start=None, inputs=None))]
fn simulate_descriptor(
    pencil: &PyPencil,
    y0: Vec<f64>,
    horizon: i64,
    k0: i64,
    start: Option<i64>,
    inputs: Option<Bound<'_, PyAny>>,
) -> PyResult<Vec<Vec<f64>>> {
    let m = pencil.inner.cols();
    let start = start.unwrap_or(k0);
    let inputs = match inputs {
        None => InputSequence::Zero(m),
        Some(obj) => {
            if let Ok(v) = obj.extract::<Vec<f64>>() {
                InputSequence::Constant(DVector::from_vec(v))
            } else {
                let values: Vec<Vec<f64>> = obj.extract()?;
                InputSequence::Indexed {
                    start,
                    values: values.into_iter().map(DVector::from_vec).collect(),
                }
            }
        }
    };
    let system = DescriptorSystem::new(pencil.inner.clone(), inputs, start).map_err(value_err)?;
    let wform = weierstrass_decompose(system.pencil()).map_err(value_err)?;
    let ic = InitialCondition {
        k0,
        y0: DVector::from_vec(y0),
    };
    let traj = solve_ivp(&system, &wform, &ic, horizon).map_err(value_err)?;
    Ok(traj
        .states
        .iter()
        .map(|y| y.iter().copied().collect())
        .collect())
}

type StateRows = Vec<(f64, f64, f64)>;

fn rows(states: &[samuelson::EconomicState]) -> StateRows {
    states.iter().map(|s| (s.t, s.c, s.i)).collect()
}

/// The multiplier-accelerator model with multiplier `a` and accelerator `b`.
///
/// Expenditure is the constant `gbar`, or `expenditure[k] = G(k)` from k = 0.
/// Trajectories are lists of `(T, C, I)` for `k = 2 ..= horizon`.
#[pyclass(name = "SamuelsonModel", frozen)]
struct PySamuelson {
    inner: SamuelsonParams,
}

#[pymethods]
impl PySamuelson {
    #[new]
    #[pyo3(signature = (a, b, gbar=1.0, expenditure=None))]
    fn new(a: f64, b: f64, gbar: f64, expenditure: Option<Vec<f64>>) -> PyResult<Self> {
        let g = match expenditure {
            Some(values) => GovernmentExpenditure::Sequence { start: 0, values },
            None => GovernmentExpenditure::Constant(gbar),
        };
        Ok(Self {
            inner: SamuelsonParams::new(a, b, g).map_err(value_err)?,
        })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    fn pencil(&self) -> PyPencil {
        PyPencil {
            inner: samuelson::pencil(&self.inner),
        }
    }

    fn roots(&self) -> (Complex64, Complex64) {
        let r = samuelson::roots(&self.inner);
        (r.s1, r.s2)
    }

    fn regime<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = samuelson::classify_regime(&self.inner);
        let d = PyDict::new(py);
        d.set_item("oscillatory", r.oscillatory)?;
        d.set_item("stable", r.stable)?;
        d.set_item("spectral_radius", r.spectral_radius)?;
        Ok(d)
    }

    /// `G / (1 - a)` for constant expenditure, else None.
    fn steady_state(&self) -> Option<f64> {
        self.inner.steady_state()
    }

    fn oracle(&self, t0: f64, t1: f64, horizon: i64) -> PyResult<StateRows> {
        samuelson::recursion_oracle(&self.inner, t0, t1, horizon)
            .map(|s| rows(&s))
            .map_err(value_err)
    }

    fn closed_form(&self, t0: f64, t1: f64, horizon: i64) -> PyResult<StateRows> {
        samuelson::closed_form_trajectory(&self.inner, t0, t1, horizon)
            .map(|s| rows(&s))
            .map_err(value_err)
    }

    /// Solution through the pencil; `t2` defaults to the recursion value.
    #[pyo3(signature = (t0, t1, horizon, t2=None))]
    fn simulate(&self, t0: f64, t1: f64, horizon: i64, t2: Option<f64>) -> PyResult<StateRows> {
        samuelson::pencil_trajectory(&self.inner, t0, t1, t2, horizon)
            .map(|s| rows(&s))
            .map_err(value_err)
    }

    /// `Y(2) = (T2, a T1, ab (T1 - T0))`.
    fn initial_state(&self, t0: f64, t1: f64, t2: f64) -> Vec<f64> {
        samuelson::consistent_initial_state(&self.inner, t0, t1, t2)
            .y0
            .iter()
            .copied()
            .collect()
    }

    /// `(consistent, residual, tolerance)` for `Y(2)` built from the incomes.
    fn check_consistency(&self, t0: f64, t1: f64, t2: f64) -> PyResult<(bool, f64, f64)> {
        let system = samuelson::build_system(&self.inner).map_err(value_err)?;
        let wform = weierstrass_decompose(system.pencil()).map_err(value_err)?;
        let ic = samuelson::consistent_initial_state(&self.inner, t0, t1, t2);
        let r = check_consistency(&system, &wform, &ic).map_err(value_err)?;
        Ok((r.consistent, r.residual, r.tolerance))
    }

    fn __repr__(&self) -> String {
        format!("SamuelsonModel(a={}, b={})", self.inner.a(), self.inner.b())
    }
}

#[pymodule]
fn descriptor_pencil_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPencil>()?;
    m.add_class::<PyWeierstrass>()?;
    m.add_class::<PySamuelson>()?;
    m.add_function(wrap_pyfunction!(simulate_descriptor, m)?)?;
    Ok(())
}
