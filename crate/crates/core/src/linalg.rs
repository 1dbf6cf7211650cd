//! Small dense helpers shared by the pencil and solver modules.
//!
//! Everything here works on `nalgebra` dynamic matrices. Null spaces come from
//! a column-pivoted reduction to reduced row echelon form, which is
//! deterministic and generic over real and complex scalars.

use nalgebra::{ComplexField, DMatrix, DVector};

/// Largest entry modulus, zero for an empty matrix.
pub fn max_abs<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max)
}

/// Reduced row echelon form of `a`.
///
/// Columns whose best remaining pivot modulus is at most `tol` are treated as
/// free. Returns the reduced matrix together with the pivot
/// columns in order.
pub fn rref<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
) -> (DMatrix<T>, Vec<usize>) {
    let (rows, cols) = a.shape();
    let mut r = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (best, best_mod) = (row..rows)
            .map(|i| (i, r[(i, col)].clone().modulus()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_mod <= tol {
            continue;
        }
        r.swap_rows(best, row);
        let pivot = r[(row, col)].clone();
        for j in 0..cols {
            let v = r[(row, j)].clone() / pivot.clone();
            r[(row, j)] = v;
        }
        for i in 0..rows {
            if i == row {
                continue;
            }
            let factor = r[(i, col)].clone();
            if factor.clone().modulus() == 0.0 {
                continue;
            }
            for j in 0..cols {
                let v = r[(i, j)].clone() - factor.clone() * r[(row, j)].clone();
                r[(i, j)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, pivots)
}

/// Basis of the right null space of `a`, one column per free variable.
pub fn null_space<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let cols = a.ncols();
    let (r, pivots) = rref(a, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = DMatrix::<T>::zeros(cols, free.len());
    for (j, &f) in free.iter().enumerate() {
        basis[(f, j)] = T::one();
        for (i, &pc) in pivots.iter().enumerate() {
            basis[(pc, j)] = -r[(i, f)].clone();
        }
    }
    basis
}

/// Numerical rank from the same reduction used for null spaces.
pub fn rank<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, tol: f64) -> usize {
    rref(a, tol).1.len()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = f64::EPSILON * (a.nrows().max(a.ncols()) as f64) * smax;
    svd.solve(b, eps).ok()
}

/// Horizontal concatenation of two blocks with equal row counts.
pub fn hstack(left: &DMatrix<f64>, right: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(left.nrows(), right.nrows());
    let mut out = DMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols())
        .copy_from(right);
    out
}

/// Block-diagonal matrix `diag(top, bottom)`.
pub fn block_diag(top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
    let n = top.nrows() + bottom.nrows();
    let m = top.ncols() + bottom.ncols();
    let mut out = DMatrix::zeros(n, m);
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), top.ncols()), bottom.shape())
        .copy_from(bottom);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn null_space_of_rank_one() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let n = null_space(&a, 1e-10);
        assert_eq!(n.ncols(), 2);
        assert!(max_abs(&(&a * &n)) < 1e-14);
        assert_eq!(rank(&a, 1e-10), 1);
    }

    #[test]
    fn null_space_of_zero_matrix_is_everything() {
        let a = DMatrix::<f64>::zeros(2, 2);
        assert_eq!(null_space(&a, 1e-10), DMatrix::identity(2, 2));
    }

    #[test]
    fn complex_null_space() {
        // (i) * x - y = 0  has null vector (1, i)
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[i, -one, -one, -i]);
        let n = null_space(&a, 1e-10);
        assert_eq!(n.ncols(), 1);
        assert!(max_abs(&(&a * &n)) < 1e-14);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = lstsq(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn block_helpers() {
        let a = DMatrix::from_element(1, 1, 2.0);
        let b = DMatrix::from_element(2, 1, 3.0);
        let d = block_diag(&a, &DMatrix::identity(2, 2));
        assert_eq!(d[(0, 0)], 2.0);
        assert_eq!(d[(2, 2)], 1.0);
        assert_eq!(d[(0, 1)], 0.0);
        let h = hstack(&DMatrix::from_element(2, 1, 1.0), &b);
        assert_eq!(h.shape(), (2, 2));
        assert_eq!(h[(1, 1)], 3.0);
    }
}
