//! Matrix pencils `sF - G`: regularity, determinant polynomial, finite and
//! infinite eigenstructure, and the Weierstrass canonical form.
//!
//! The determinant polynomial is recovered by evaluating `det(sF - G)` at
//! Chebyshev nodes and interpolating. Its degree deficiency is the algebraic
//! multiplicity of the infinite eigenvalue, and its roots (via the companion
//! matrix) are the finite eigenvalues.
//!
//! The canonical form is built from right eigenvectors of the finite
//! eigenvalues (`G Q_p = F Q_p J_p`) and from null vectors of `F` for the
//! infinite eigenvalue (`F Q_q = G Q_q H_q`). With `W = [F Q_p | G Q_q]`
//! invertible for any regular pencil, `P = W^{-1}` gives
//!
//! ```text
//! P F Q = diag(I_p, H_q)      P G Q = diag(J_p, I_q)
//! ```
//!
//! Only small dense pencils are targeted. Supported Jordan structure:
//! semi-simple finite spectrum plus at most one real 2x2 finite block, and
//! infinite chains of length at most two.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::PencilError;
use crate::linalg::{self, block_diag, hstack, lstsq, max_abs, null_space};

/// Relative tolerance used to trim trailing determinant coefficients.
pub const TRIM_TOL: f64 = 1e-10;
/// Absolute separation below which two roots count as one repeated root.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Pivot threshold for null-space extraction, relative to `|s| |F| + |G|`.
pub const NULL_SPACE_TOL: f64 = 1e-10;
/// Maximum block residual accepted for a computed canonical form.
pub const DECOMPOSITION_TOL: f64 = 1e-9;
/// Largest acceptable condition number of the interpolation system.
pub const MAX_INTERPOLATION_COND: f64 = 1e10;

/// The pencil `sF - G` for real `F`, `G` of equal shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPencil {
    f: DMatrix<f64>,
    g: DMatrix<f64>,
}

impl MatrixPencil {
    pub fn new(f: DMatrix<f64>, g: DMatrix<f64>) -> Result<Self, PencilError> {
        if f.shape() != g.shape() {
            return Err(PencilError::ShapeMismatch {
                f_rows: f.nrows(),
                f_cols: f.ncols(),
                g_rows: g.nrows(),
                g_cols: g.ncols(),
            });
        }
        if f.is_empty() {
            return Err(PencilError::Empty);
        }
        if f.iter().chain(g.iter()).any(|x| !x.is_finite()) {
            return Err(PencilError::NonFinite);
        }
        Ok(Self { f, g })
    }

    /// Builds a pencil from row-major entry lists.
    pub fn from_row_slices(
        rows: usize,
        cols: usize,
        f: &[f64],
        g: &[f64],
    ) -> Result<Self, PencilError> {
        let expected = rows * cols;
        for got in [f.len(), g.len()] {
            if got != expected {
                return Err(PencilError::DataLength { expected, got });
            }
        }
        Self::new(
            DMatrix::from_row_slice(rows, cols, f),
            DMatrix::from_row_slice(rows, cols, g),
        )
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn rows(&self) -> usize {
        self.f.nrows()
    }

    pub fn cols(&self) -> usize {
        self.f.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// `sF - G` at a real point.
    pub fn eval(&self, s: f64) -> DMatrix<f64> {
        &self.f * s - &self.g
    }

    /// `sF - G` at a complex point.
    pub fn eval_complex(&self, s: Complex64) -> DMatrix<Complex64> {
        self.f.map(|x| Complex64::new(x, 0.0)) * s - self.g.map(|x| Complex64::new(x, 0.0))
    }

    /// Scale used for relative thresholds: `max(1, |F|_max, |G|_max)`.
    pub fn scale(&self) -> f64 {
        1f64.max(max_abs(&self.f)).max(max_abs(&self.g))
    }
}

/// `det(sF - G)` as a polynomial in `s`, coefficients in ascending degree.
///
/// An empty coefficient list is the identically-zero polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct DetPolynomial {
    coefficients: Vec<f64>,
}

impl DetPolynomial {
    /// Wraps raw coefficients, dropping exact trailing zeros.
    pub fn new(mut coefficients: Vec<f64>) -> Self {
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coefficients.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> DetPolynomial {
        DetPolynomial::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coefficients
            .iter()
            .rev()
            .fold((zero, zero), |(p, dp), &c| (p * s + c, dp * s + p))
    }

    /// All complex roots, repeated according to multiplicity.
    ///
    /// Computed as eigenvalues of the companion matrix, refined by a few
    /// guarded Newton steps. Non-real roots come out as exact conjugate pairs.
    pub fn roots(&self) -> Result<Vec<Complex64>, PencilError> {
        let d = match self.degree() {
            d if d < 1 => return Ok(Vec::new()),
            d => d as usize,
        };
        let lead = self.coefficients[d];
        let mut companion = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            companion[(i, d - 1)] = -self.coefficients[i] / lead;
        }
        let raw = companion.complex_eigenvalues();
        let upper = raw.iter().filter(|z| z.im > 0.0).count();
        let lower = raw.iter().filter(|z| z.im < 0.0).count();
        if upper != lower || raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PencilError::NumericalBreakdown(
                "companion eigenvalues are not closed under conjugation".into(),
            ));
        }
        let mut roots = Vec::with_capacity(d);
        for z in raw.iter() {
            if z.im == 0.0 {
                let r = self.polish(*z);
                roots.push(Complex64::new(r.re, 0.0));
            } else if z.im > 0.0 {
                let r = self.polish(*z);
                roots.push(r);
                roots.push(r.conj());
            }
        }
        Ok(roots)
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let real = z.im == 0.0;
        for _ in 0..4 {
            let (p, dp) = self.eval_with_derivative(z);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let mut next = z - p / dp;
            if real {
                next.im = 0.0;
            }
            if self.eval_complex(next).norm() < p.norm() {
                z = next;
            } else {
                break;
            }
        }
        z
    }
}

/// Outcome of the regularity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityVerdict {
    Regular,
    SingularShape,
    SingularDeterminant,
}

fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| ((2 * i + 1) as f64 * PI / (2 * count) as f64).cos())
        .collect()
}

// Hadamard's bound on |det(sF - G)|.
fn hadamard_bound(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.norm()).product()
}

/// Determinant polynomial of a square pencil by interpolation at `m + 1`
/// Chebyshev nodes.
pub fn pencil_det_poly(pencil: &MatrixPencil) -> Result<DetPolynomial, PencilError> {
    if !pencil.is_square() {
        return Err(PencilError::NonSquarePencil {
            rows: pencil.rows(),
            cols: pencil.cols(),
        });
    }
    let m = pencil.cols();
    let nodes = chebyshev_nodes(m + 1);
    let mut vander = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut values = DVector::<f64>::zeros(m + 1);
    let mut scale = 0.0f64;
    for (i, &x) in nodes.iter().enumerate() {
        let a = pencil.eval(x);
        scale = scale.max(hadamard_bound(&a));
        values[i] = a.lu().determinant();
        let mut pow = 1.0;
        for j in 0..=m {
            vander[(i, j)] = pow;
            pow *= x;
        }
    }
    let sv = vander.clone().singular_values();
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > MAX_INTERPOLATION_COND {
        return Err(PencilError::NumericalBreakdown(format!(
            "interpolation system condition number {cond:e}"
        )));
    }
    let coeffs = vander
        .lu()
        .solve(&values)
        .ok_or_else(|| PencilError::NumericalBreakdown("singular interpolation system".into()))?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(PencilError::NumericalBreakdown(
            "non-finite determinant coefficients".into(),
        ));
    }
    let largest = coeffs.amax();
    if largest <= TRIM_TOL * scale {
        return Ok(DetPolynomial::new(Vec::new()));
    }
    let mut coefficients: Vec<f64> = coeffs.iter().copied().collect();
    while let Some(&c) = coefficients.last() {
        if c.abs() <= TRIM_TOL * largest {
            coefficients.pop();
        } else {
            break;
        }
    }
    Ok(DetPolynomial::new(coefficients))
}

/// Classifies a pencil as regular or singular. Never fails.
pub fn is_regular(pencil: &MatrixPencil) -> RegularityVerdict {
    if !pencil.is_square() {
        return RegularityVerdict::SingularShape;
    }
    match pencil_det_poly(pencil) {
        Ok(p) if p.is_zero() => RegularityVerdict::SingularDeterminant,
        Ok(_) => RegularityVerdict::Regular,
        Err(_) => {
            // Interpolation broke down; fall back to point evaluations.
            // irrational-looking points unlikely to hit an eigenvalue
            let probes = [0.371_9, -1.414_7, 2.718_9];
            let nonzero = probes.iter().any(|&s| {
                let a = pencil.eval(s);
                let bound = hadamard_bound(&a);
                bound > 0.0 && a.lu().determinant().abs() > TRIM_TOL * bound
            });
            if nonzero {
                RegularityVerdict::Regular
            } else {
                RegularityVerdict::SingularDeterminant
            }
        }
    }
}

/// A finite eigenvalue with its algebraic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteEigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Finite and infinite eigenvalue data of a regular pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    pub finite: Vec<FiniteEigenvalue>,
    /// Total finite multiplicity.
    pub p: usize,
    /// Multiplicity of the infinite eigenvalue.
    pub q: usize,
    pub m: usize,
    pub det_poly: DetPolynomial,
}

fn order_eigenvalues(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im))
}

// Separation below which two roots of `poly` near `mid` are merged.
//
// Rounding noise in the interpolated coefficients splits an exact double root
// by about 2*sqrt(2*|dp(mid)| / |p''(mid)|), which can exceed CLUSTER_TOL, so
// the threshold is widened to that noise floor (capped well below any
// meaningful separation).
fn merge_threshold(poly: &DetPolynomial, mid: Complex64) -> f64 {
    let c = poly.coefficients();
    let eta = 16.0 * c.len() as f64 * f64::EPSILON;
    let r = mid.norm();
    let noise: f64 = eta * c.iter().rev().fold(0.0, |acc, x| acc * r + x.abs());
    let second: Complex64 = c
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, &x)| x * (i * (i - 1)) as f64 * mid.powu(i as u32 - 2))
        .sum();
    let cap = 1e-4 * r.max(1.0);
    let floor = if second.norm() > 0.0 {
        2.0 * (2.0 * noise / second.norm()).sqrt()
    } else {
        cap
    };
    CLUSTER_TOL.max(floor.min(cap))
}

fn cluster_roots(poly: &DetPolynomial, mut roots: Vec<Complex64>) -> Vec<FiniteEigenvalue> {
    roots.sort_by(order_eigenvalues);
    let n = roots.len();
    // union-find over pairs closer than the merge threshold
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let mid = (roots[i] + roots[j]) / 2.0;
            if (roots[i] - roots[j]).norm() < merge_threshold(poly, mid) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(z),
            None => groups.push((r, vec![z])),
        }
    }
    let mut out: Vec<FiniteEigenvalue> = groups
        .into_iter()
        .map(|(_, members)| {
            let k = members.len();
            let sum = members.iter().fold(Complex64::new(0.0, 0.0), |s, z| s + z);
            let mut value = sum / k as f64;
            let real = members.iter().all(|z| z.im == 0.0)
                || (members.iter().any(|z| z.im > 0.0) && members.iter().any(|z| z.im < 0.0));
            if real {
                value.im = 0.0;
            }
            if k > 1 {
                // a root of multiplicity k is a simple root of the (k-1)-th derivative
                let mut d = poly.clone();
                for _ in 1..k {
                    d = d.derivative();
                }
                value = d.polish(value);
                if real {
                    value.im = 0.0;
                }
            }
            FiniteEigenvalue {
                value,
                multiplicity: k,
            }
        })
        .collect();
    out.sort_by(|a, b| order_eigenvalues(&a.value, &b.value));
    out
}

/// Finite eigenvalues (with multiplicities) and infinite multiplicity of a
/// regular pencil.
pub fn eigenstructure(pencil: &MatrixPencil) -> Result<EigenStructure, PencilError> {
    if !pencil.is_square() {
        return Err(PencilError::IrregularPencil);
    }
    let det_poly = pencil_det_poly(pencil)?;
    if det_poly.is_zero() {
        return Err(PencilError::IrregularPencil);
    }
    let m = pencil.cols();
    let degree = det_poly.degree() as usize;
    let finite = cluster_roots(&det_poly, det_poly.roots()?);
    Ok(EigenStructure {
        finite,
        p: degree,
        q: m - degree,
        m,
        det_poly,
    })
}

/// Weierstrass canonical form `P F Q = diag(I_p, H_q)`, `P G Q = diag(J_p, I_q)`.
///
/// Complex-conjugate pairs `α ± iβ` appear in `J_p` as real blocks
/// `[[α, β], [-β, α]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassForm {
    p_mat: DMatrix<f64>,
    q_mat: DMatrix<f64>,
    j_p: DMatrix<f64>,
    h_q: DMatrix<f64>,
    p: usize,
    q: usize,
    q_star: usize,
}

impl WeierstrassForm {
    /// The left transform `P`.
    pub fn p_matrix(&self) -> &DMatrix<f64> {
        &self.p_mat
    }

    /// The right transform `Q`.
    pub fn q_matrix(&self) -> &DMatrix<f64> {
        &self.q_mat
    }

    pub fn j_p(&self) -> &DMatrix<f64> {
        &self.j_p
    }

    pub fn h_q(&self) -> &DMatrix<f64> {
        &self.h_q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Nilpotency index of `H_q` (zero when there is no infinite eigenvalue).
    pub fn q_star(&self) -> usize {
        self.q_star
    }

    pub fn m(&self) -> usize {
        self.p + self.q
    }

    /// First `p` columns of `Q`.
    pub fn q_p(&self) -> DMatrix<f64> {
        self.q_mat.columns(0, self.p).into_owned()
    }

    /// Last `q` columns of `Q`.
    pub fn q_q(&self) -> DMatrix<f64> {
        self.q_mat.columns(self.p, self.q).into_owned()
    }

    /// First `p` rows of `P`.
    pub fn p1(&self) -> DMatrix<f64> {
        self.p_mat.rows(0, self.p).into_owned()
    }

    /// Last `q` rows of `P`.
    pub fn p2(&self) -> DMatrix<f64> {
        self.p_mat.rows(self.p, self.q).into_owned()
    }

    /// Max-norm residuals of the two block equations against `pencil`.
    pub fn residuals(&self, pencil: &MatrixPencil) -> (f64, f64) {
        let eye_p = DMatrix::identity(self.p, self.p);
        let eye_q = DMatrix::identity(self.q, self.q);
        let pfq = &self.p_mat * pencil.f() * &self.q_mat;
        let pgq = &self.p_mat * pencil.g() * &self.q_mat;
        (
            max_abs(&(pfq - block_diag(&eye_p, &self.h_q))),
            max_abs(&(pgq - block_diag(&self.j_p, &eye_q))),
        )
    }
}

fn unsupported(msg: impl Into<String>) -> PencilError {
    PencilError::UnsupportedJordanStructure(msg.into())
}

// Columns are scaled by one common factor per block so chains stay chains.
fn push_block(cols: &mut Vec<DVector<f64>>, block: Vec<DVector<f64>>) {
    let norm = block[0].norm();
    let norm = if norm > 0.0 { norm } else { 1.0 };
    cols.extend(block.into_iter().map(|c| c / norm));
}

struct FinitePart {
    columns: Vec<DVector<f64>>,
    j_p: DMatrix<f64>,
}

fn finite_part(pencil: &MatrixPencil, es: &EigenStructure) -> Result<FinitePart, PencilError> {
    let mut columns = Vec::new();
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    let mut jordan_used = false;
    for ev in &es.finite {
        let lambda = ev.value;
        if lambda.im < 0.0 {
            continue;
        }
        if lambda.im == 0.0 {
            let s = lambda.re;
            let a = pencil.eval(s);
            let basis = null_space(&a, pivot_tol(pencil, s.abs()));
            let nullity = basis.ncols();
            if nullity == ev.multiplicity {
                for c in basis.column_iter() {
                    push_block(&mut columns, vec![c.into_owned()]);
                    blocks.push(DMatrix::from_element(1, 1, s));
                }
            } else if ev.multiplicity == 2 && nullity == 1 && !jordan_used {
                // (G - sF) v2 = F v1
                let v1: DVector<f64> = basis.column(0).into_owned();
                let rhs = -(pencil.f() * &v1);
                let v2 = lstsq(&a, &rhs)
                    .ok_or_else(|| PencilError::NumericalBreakdown("Jordan chain solve".into()))?;
                let chain_res = (&a * &v2 - &rhs).amax();
                if chain_res > DECOMPOSITION_TOL * pencil.scale() * (1.0 + v2.amax()) {
                    return Err(unsupported(format!(
                        "no Jordan chain for eigenvalue {s} (residual {chain_res:e})"
                    )));
                }
                push_block(&mut columns, vec![v1, v2]);
                blocks.push(DMatrix::from_row_slice(2, 2, &[s, 1.0, 0.0, s]));
                jordan_used = true;
            } else {
                return Err(unsupported(format!(
                    "eigenvalue {s} has multiplicity {} but {nullity} eigenvectors",
                    ev.multiplicity
                )));
            }
        } else {
            let a = pencil.eval_complex(lambda);
            let basis = null_space(&a, pivot_tol(pencil, lambda.norm()));
            if basis.ncols() != ev.multiplicity {
                return Err(unsupported(format!(
                    "complex eigenvalue {lambda} has multiplicity {} but {} eigenvectors",
                    ev.multiplicity,
                    basis.ncols()
                )));
            }
            for c in basis.column_iter() {
                let x = c.map(|z| z.re);
                let y = c.map(|z| z.im);
                let norm = c.norm();
                columns.push(x / norm);
                columns.push(y / norm);
                blocks.push(DMatrix::from_row_slice(
                    2,
                    2,
                    &[lambda.re, lambda.im, -lambda.im, lambda.re],
                ));
            }
        }
    }
    let p: usize = blocks.iter().map(|b| b.nrows()).sum();
    if p != es.p {
        return Err(PencilError::NumericalBreakdown(format!(
            "found {p} finite eigenvectors for finite multiplicity {}",
            es.p
        )));
    }
    let mut j_p = DMatrix::zeros(p, p);
    let mut at = 0;
    for b in &blocks {
        let n = b.nrows();
        j_p.view_mut((at, at), (n, n)).copy_from(b);
        at += n;
    }
    Ok(FinitePart { columns, j_p })
}

struct InfinitePart {
    columns: Vec<DVector<f64>>,
    h_q: DMatrix<f64>,
    q_star: usize,
}

fn infinite_part(pencil: &MatrixPencil, q: usize) -> Result<InfinitePart, PencilError> {
    let m = pencil.cols();
    if q == 0 {
        return Ok(InfinitePart {
            columns: Vec::new(),
            h_q: DMatrix::zeros(0, 0),
            q_star: 0,
        });
    }
    let f = pencil.f();
    let f_tol = NULL_SPACE_TOL * max_abs(f);
    let kernel = null_space(f, f_tol);
    let d = kernel.ncols();
    if d == 0 || d > q {
        return Err(PencilError::NumericalBreakdown(format!(
            "F has nullity {d} for infinite multiplicity {q}"
        )));
    }
    if d == q {
        let mut columns = Vec::new();
        for c in kernel.column_iter() {
            push_block(&mut columns, vec![c.into_owned()]);
        }
        return Ok(InfinitePart {
            columns,
            h_q: DMatrix::zeros(q, q),
            q_star: 1,
        });
    }
    // Chain starters u1 = N c with G u1 in range(F), i.e. L G N c = 0 for the
    // left kernel L of F.
    let left = null_space(&f.transpose(), f_tol).transpose();
    let reduced = &left * pencil.g() * &kernel;
    let starters = null_space(&reduced, NULL_SPACE_TOL * max_abs(pencil.g()));
    let chains = starters.ncols();
    if d + chains != q {
        return Err(unsupported(format!(
            "infinite eigenvalue of multiplicity {q} needs chains longer than two"
        )));
    }
    // the remaining kernel directions are orthogonal to the starters
    let complement = if chains > 0 {
        null_space(&starters.transpose(), NULL_SPACE_TOL)
    } else {
        DMatrix::identity(d, d)
    };
    let mut columns = Vec::new();
    let mut h_q = DMatrix::zeros(q, q);
    let mut at = 0;
    for c in starters.column_iter() {
        let u1: DVector<f64> = &kernel * c;
        let rhs = pencil.g() * &u1;
        let u2 = lstsq(f, &rhs)
            .ok_or_else(|| PencilError::NumericalBreakdown("infinite chain solve".into()))?;
        push_block(&mut columns, vec![u1, u2]);
        h_q[(at, at + 1)] = 1.0;
        at += 2;
    }
    for c in complement.column_iter() {
        push_block(&mut columns, vec![&kernel * c]);
    }
    debug_assert_eq!(columns.len(), q);
    debug_assert!(columns.iter().all(|c| c.len() == m));
    Ok(InfinitePart {
        columns,
        h_q,
        q_star: if chains > 0 { 2 } else { 1 },
    })
}

fn columns_to_matrix(rows: usize, columns: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, columns.len());
    for (j, c) in columns.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Computes the Weierstrass canonical form of a regular pencil.
pub fn weierstrass_decompose(pencil: &MatrixPencil) -> Result<WeierstrassForm, PencilError> {
    let es = eigenstructure(pencil)?;
    let m = es.m;
    let finite = finite_part(pencil, &es)?;
    let infinite = infinite_part(pencil, es.q)?;

    let q_p = columns_to_matrix(m, &finite.columns);
    let q_q = columns_to_matrix(m, &infinite.columns);
    let w = hstack(&(pencil.f() * &q_p), &(pencil.g() * &q_q));
    let p_mat = w.try_inverse().ok_or_else(|| {
        PencilError::NumericalBreakdown("eigenvector basis does not span the space".into())
    })?;
    let form = WeierstrassForm {
        p_mat,
        q_mat: hstack(&q_p, &q_q),
        j_p: finite.j_p,
        h_q: infinite.h_q,
        p: es.p,
        q: es.q,
        q_star: infinite.q_star,
    };
    let (rf, rg) = form.residuals(pencil);
    let bound = DECOMPOSITION_TOL * pencil.scale();
    if !(rf < bound && rg < bound) {
        return Err(PencilError::NumericalBreakdown(format!(
            "canonical form residuals {rf:e}, {rg:e} exceed {bound:e}"
        )));
    }
    Ok(form)
}

// Pivot threshold for `sF - G` with `|s| = modulus`.
fn pivot_tol(pencil: &MatrixPencil, modulus: f64) -> f64 {
    NULL_SPACE_TOL * (modulus * max_abs(pencil.f()) + max_abs(pencil.g()))
}

/// Numerical rank of `F`.
pub fn rank_f(pencil: &MatrixPencil) -> usize {
    linalg::rank(pencil.f(), NULL_SPACE_TOL * max_abs(pencil.f()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pencil(n: usize, f: &[f64], g: &[f64]) -> MatrixPencil {
        MatrixPencil::from_row_slices(n, n, f, g).unwrap()
    }

    fn samuelson(a: f64, b: f64) -> MatrixPencil {
        pencil(
            3,
            &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -b, 1.0],
            &[-1.0, 1.0, 1.0, a, 0.0, 0.0, 0.0, -b, 0.0],
        )
    }

    fn eye(n: usize) -> Vec<f64> {
        DMatrix::<f64>::identity(n, n)
            .transpose()
            .as_slice()
            .to_vec()
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        let f = DMatrix::zeros(2, 2);
        let g = DMatrix::zeros(2, 3);
        assert!(matches!(
            MatrixPencil::new(f, g),
            Err(PencilError::ShapeMismatch { .. })
        ));
        assert_eq!(
            MatrixPencil::from_row_slices(1, 1, &[f64::NAN], &[0.0]),
            Err(PencilError::NonFinite)
        );
        assert_eq!(
            MatrixPencil::from_row_slices(2, 2, &[1.0], &[0.0; 4]),
            Err(PencilError::DataLength {
                expected: 4,
                got: 1
            })
        );
    }

    #[test]
    fn samuelson_det_poly() {
        let p = pencil_det_poly(&samuelson(0.5, 1.0)).unwrap();
        assert_eq!(p.degree(), 2);
        let c = p.coefficients();
        assert_relative_eq!(c[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(c[1], -1.0, max_relative = 1e-12);
        assert_relative_eq!(c[2], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_pencil_det_poly() {
        let p = pencil_det_poly(&pencil(3, &eye(3), &eye(3))).unwrap();
        let expected = [-1.0, 3.0, -3.0, 1.0];
        assert_eq!(p.degree(), 3);
        for (c, e) in p.coefficients().iter().zip(expected) {
            assert!((c - e).abs() < 1e-12, "{c} vs {e}");
        }
    }

    #[test]
    fn constant_det_poly_means_all_infinite() {
        let pen = pencil(2, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 0.0]);
        let p = pencil_det_poly(&pen).unwrap();
        assert_eq!(p.degree(), 0);
        assert!((p.coefficients()[0] + 1.0).abs() < 1e-14);
        let es = eigenstructure(&pen).unwrap();
        assert_eq!((es.p, es.q), (0, 2));
    }

    #[test]
    fn non_square_det_poly_errors() {
        let pen = MatrixPencil::from_row_slices(2, 3, &[0.0; 6], &[1.0; 6]).unwrap();
        assert_eq!(
            pencil_det_poly(&pen),
            Err(PencilError::NonSquarePencil { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn regularity_verdicts() {
        assert_eq!(is_regular(&samuelson(0.3, 2.0)), RegularityVerdict::Regular);
        assert_eq!(
            is_regular(&pencil(1, &[0.0], &[0.0])),
            RegularityVerdict::SingularDeterminant
        );
        let wide = MatrixPencil::from_row_slices(2, 3, &[1.0; 6], &[1.0; 6]).unwrap();
        assert_eq!(is_regular(&wide), RegularityVerdict::SingularShape);
        // same column in F and G: det(sF - G) vanishes identically
        let sing = pencil(2, &[1.0, 0.0, 1.0, 0.0], &[2.0, 0.0, 3.0, 0.0]);
        assert_eq!(is_regular(&sing), RegularityVerdict::SingularDeterminant);
        assert_eq!(eigenstructure(&sing), Err(PencilError::IrregularPencil));
    }

    #[test]
    fn samuelson_eigenstructure() {
        let es = eigenstructure(&samuelson(0.5, 1.0)).unwrap();
        assert_eq!((es.p, es.q, es.m), (2, 1, 3));
        assert_eq!(es.finite.len(), 2);
        let v = es.finite[0].value;
        assert!((v - Complex64::new(0.5, 0.5)).norm() < 1e-14);
        assert_eq!(es.finite[1].value, v.conj());
    }

    #[test]
    fn standard_eigenproblem() {
        let pen = pencil(2, &eye(2), &[2.0, 0.0, 0.0, 3.0]);
        let es = eigenstructure(&pen).unwrap();
        assert_eq!(es.q, 0);
        let vals: Vec<f64> = es.finite.iter().map(|e| e.value.re).collect();
        assert!((vals[0] - 2.0).abs() < 1e-13 && (vals[1] - 3.0).abs() < 1e-13);

        let w = weierstrass_decompose(&pen).unwrap();
        assert_eq!(w.q(), 0);
        assert_eq!(w.q_star(), 0);
        assert!((w.j_p() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).amax() < 1e-12);
        // Q is diagonal up to column scaling
        assert!(w.q_matrix()[(0, 1)].abs() < 1e-12 && w.q_matrix()[(1, 0)].abs() < 1e-12);
    }

    #[test]
    fn samuelson_weierstrass() {
        for (a, b) in [(0.5, 1.0), (0.5, 0.5), (0.9, 0.25), (0.1, 4.0)] {
            let pen = samuelson(a, b);
            let w = weierstrass_decompose(&pen).unwrap();
            assert_eq!((w.p(), w.q(), w.q_star()), (2, 1, 1));
            assert_eq!(w.h_q(), &DMatrix::zeros(1, 1));
            let (rf, rg) = w.residuals(&pen);
            assert!(rf < 1e-10 && rg < 1e-10, "{a} {b}: {rf:e} {rg:e}");
            // infinite eigenvector is e1
            let qq = w.q_q();
            assert!(qq[(1, 0)].abs() < 1e-14 && qq[(2, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn complex_pair_stored_as_rotation_block() {
        let w = weierstrass_decompose(&samuelson(0.5, 1.0)).unwrap();
        let j = w.j_p();
        assert!((j[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((j[(1, 1)] - 0.5).abs() < 1e-14);
        assert!((j[(0, 1)] - 0.5).abs() < 1e-14);
        assert!((j[(1, 0)] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn real_jordan_block() {
        // G = [[2, 1], [0, 2]], F = I: double eigenvalue 2 with one eigenvector
        let pen = pencil(2, &eye(2), &[2.0, 1.0, 0.0, 2.0]);
        let es = eigenstructure(&pen).unwrap();
        assert_eq!(es.finite.len(), 1);
        assert_eq!(es.finite[0].multiplicity, 2);
        let w = weierstrass_decompose(&pen).unwrap();
        assert!((w.j_p() - DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0])).amax() < 1e-9);
        let (rf, rg) = w.residuals(&pen);
        assert!(rf < 1e-9 && rg < 1e-9);
    }

    #[test]
    fn semisimple_double_root() {
        let pen = pencil(2, &eye(2), &[2.0, 0.0, 0.0, 2.0]);
        let w = weierstrass_decompose(&pen).unwrap();
        assert!((w.j_p() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0])).amax() < 1e-9);
    }

    #[test]
    fn infinite_chain_of_length_two() {
        // F = [[0,1,0],[0,0,0],[0,0,1]], G = I: nilpotent block of size 2
        let pen = pencil(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], &eye(3));
        let w = weierstrass_decompose(&pen).unwrap();
        assert_eq!((w.p(), w.q(), w.q_star()), (1, 2, 2));
        let h = w.h_q();
        assert_eq!(h * h, DMatrix::zeros(2, 2));
        assert!(h.amax() > 0.0);
        let (rf, rg) = w.residuals(&pen);
        assert!(rf < 1e-12 && rg < 1e-12);
    }

    #[test]
    fn long_infinite_chain_is_unsupported() {
        // F = nilpotent shift of size 3, G = I
        let pen = pencil(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], &eye(3));
        assert!(matches!(
            weierstrass_decompose(&pen),
            Err(PencilError::UnsupportedJordanStructure(_))
        ));
    }

    #[test]
    fn triple_root_is_unsupported() {
        let pen = pencil(3, &eye(3), &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(weierstrass_decompose(&pen).is_err());
    }

    #[test]
    fn samuelson_f_has_rank_two() {
        assert_eq!(rank_f(&samuelson(0.4, 2.0)), 2);
    }
}
