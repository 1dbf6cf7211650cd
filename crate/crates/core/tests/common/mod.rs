//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use descriptor_pencil::MatrixPencil;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID_A: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const GRID_B: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const GBAR: [f64; 3] = [0.0, 1.0, 5.0];

pub fn grid() -> Vec<(f64, f64)> {
    GRID_A
        .iter()
        .flat_map(|&a| GRID_B.iter().map(move |&b| (a, b)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Five (T0, T1) pairs in [-10, 10] for a seed.
pub fn initial_incomes(seed: u64) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    (0..5)
        .map(|_| (r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)))
        .collect()
}

pub fn samuelson_pencil(a: f64, b: f64) -> MatrixPencil {
    MatrixPencil::from_row_slices(
        3,
        3,
        &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -b, 1.0],
        &[-1.0, 1.0, 1.0, a, 0.0, 0.0, 0.0, -b, 0.0],
    )
    .unwrap()
}

/// Every pencil with m <= 3 used across the tests.
pub fn small_corpus() -> Vec<(String, MatrixPencil)> {
    let mut out = Vec::new();
    for (a, b) in grid() {
        out.push((format!("samuelson a={a} b={b}"), samuelson_pencil(a, b)));
    }
    let eye3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let fixed: Vec<(&str, usize, Vec<f64>, Vec<f64>)> = vec![
        ("identity", 3, eye3.to_vec(), eye3.to_vec()),
        (
            "all infinite",
            2,
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
        ),
        (
            "diagonal",
            2,
            vec![1.0, 0.0, 0.0, 1.0],
            vec![2.0, 0.0, 0.0, 3.0],
        ),
        (
            "jordan",
            2,
            vec![1.0, 0.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0, 2.0],
        ),
        (
            "infinite chain",
            3,
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            eye3.to_vec(),
        ),
        ("scalar", 1, vec![2.0], vec![3.0]),
    ];
    for (name, n, f, g) in fixed {
        out.push((
            name.to_string(),
            MatrixPencil::from_row_slices(n, n, &f, &g).unwrap(),
        ));
    }
    // small-integer random pencils, some with a rank-deficient F
    let mut r = rng(7);
    for j in 0..12 {
        let n = 2 + j % 2;
        let mut f: Vec<f64> = (0..n * n)
            .map(|_| r.random_range(-3i32..=3) as f64)
            .collect();
        let g: Vec<f64> = (0..n * n)
            .map(|_| r.random_range(-3i32..=3) as f64)
            .collect();
        if j % 3 == 0 {
            // last row of F repeats the first
            for c in 0..n {
                f[(n - 1) * n + c] = f[c];
            }
        }
        out.push((
            format!("random #{j}"),
            MatrixPencil::from_row_slices(n, n, &f, &g).unwrap(),
        ));
    }
    out
}

// ---- polynomial arithmetic for the cofactor oracle ----

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(p: &[f64], q: &[f64], sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len().max(q.len())];
    for (i, x) in p.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in q.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

fn cofactor_det(entries: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let n = entries.len();
    if n == 1 {
        return entries[0][0].clone();
    }
    let mut acc = Vec::new();
    for col in 0..n {
        let minor: Vec<Vec<Vec<f64>>> = entries[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = poly_mul(&entries[0][col], &cofactor_det(&minor));
        acc = poly_add(&acc, &term, if col % 2 == 0 { 1.0 } else { -1.0 });
    }
    acc
}

/// det(sF - G) by symbolic Laplace expansion, ascending coefficients,
/// exact trailing zeros removed.
pub fn symbolic_det_poly(pencil: &MatrixPencil) -> Vec<f64> {
    let n = pencil.rows();
    let entries: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| vec![-pencil.g()[(i, j)], pencil.f()[(i, j)]])
                .collect()
        })
        .collect();
    let mut p = cofactor_det(&entries);
    while p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

/// Worst coefficient mismatch: relative where the exact value is nonzero,
/// relative to the largest exact coefficient otherwise.
pub fn coefficient_mismatch(got: &[f64], exact: &[f64]) -> f64 {
    if got.len() != exact.len() {
        return f64::INFINITY;
    }
    let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    got.iter()
        .zip(exact)
        .map(|(g, e)| {
            let denom = if *e != 0.0 { e.abs() } else { scale };
            (g - e).abs() / denom
        })
        .fold(0.0, f64::max)
}
