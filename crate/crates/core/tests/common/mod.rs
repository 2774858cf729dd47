#![allow(dead_code)]

use parsimony::densela::Matrix;
use parsimony::partialmat::{PartialMatrix, Pattern, Position};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const X_DEMPSTER: f64 = -79.0 / 58527.0;
pub const X_PATHOLOGICAL: f64 = -16.0 / 929.0;

/// 4x4 with one unknown tied at (1,4) and (4,1).
pub fn example1() -> PartialMatrix {
    let v = |p: f64, q: f64| p / q;
    let rows = [
        [v(120.0, 929.0), v(4.0, 929.0), v(-15.0, 929.0), f64::NAN],
        [v(4.0, 929.0), v(124.0, 929.0), v(-1.0, 1858.0), v(-63.0, 1858.0)],
        [v(-15.0, 929.0), v(-1.0, 1858.0), v(118.0, 929.0), v(2.0, 929.0)],
        [f64::NAN, v(-63.0, 1858.0), v(2.0, 929.0), v(126.0, 929.0)],
    ];
    let specified = specified_from(&rows);
    PartialMatrix::new(Pattern::new(4, 4, specified, vec![vec![(0, 3), (3, 0)]]).unwrap())
}

pub fn example1_inverse_dempster() -> Matrix {
    Matrix::from_rows(&[
        vec![63.0 / 8.0, -0.25, 1.0, 0.0],
        vec![-0.25, 1009.0 / 126.0, -2.0 / 63.0, 2.0],
        vec![1.0, -2.0 / 63.0, 4033.0 / 504.0, -1.0 / 8.0],
        vec![0.0, 2.0, -1.0 / 8.0, 63.0 / 8.0],
    ])
    .unwrap()
}

pub fn example1_inverse_pathological() -> Matrix {
    Matrix::from_rows(&[
        vec![8.0, 0.0, 1.0, 1.0],
        vec![0.0, 8.0, 0.0, 2.0],
        vec![1.0, 0.0, 8.0, 0.0],
        vec![1.0, 2.0, 0.0, 8.0],
    ])
    .unwrap()
}

fn specified_from(rows: &[[f64; 4]; 4]) -> Vec<(Position, f64)> {
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_nan() {
                out.push(((i, j), v));
            }
        }
    }
    out
}

fn example2_specified() -> Vec<(Position, f64)> {
    let n = f64::NAN;
    specified_from(&[
        [5.0, 2.0, n, 1.0],
        [2.0, 5.0, 2.0, n],
        [n, 2.0, 5.0, 2.0],
        [1.0, n, 2.0, 5.0],
    ])
}

/// Unknowns (1,3), (2,4), (3,1), (4,2), each its own class.
pub fn example2() -> PartialMatrix {
    PartialMatrix::new(Pattern::untied(4, 4, example2_specified()).unwrap())
}

/// Ties {(1,3),(3,1)} and {(2,4),(4,2)}.
pub fn example2_symmetric() -> PartialMatrix {
    PartialMatrix::new(
        Pattern::new(
            4,
            4,
            example2_specified(),
            vec![vec![(0, 2), (2, 0)], vec![(1, 3), (3, 1)]],
        )
        .unwrap(),
    )
}

/// Ties {(1,3),(2,4)} and {(3,1),(4,2)}.
pub fn example2_toeplitz() -> PartialMatrix {
    PartialMatrix::new(
        Pattern::new(
            4,
            4,
            example2_specified(),
            vec![vec![(0, 2), (1, 3)], vec![(2, 0), (3, 1)]],
        )
        .unwrap(),
    )
}

/// The seven known completions as x = (x13, x24, x31, x42).
pub fn example2_completions() -> [[f64; 4]; 7] {
    let r13 = 13f64.sqrt();
    let lo = -1.5 * (r13 - 5.0);
    let hi = 1.5 * (5.0 + r13);
    [
        [-6.0, -6.0, -6.0, -6.0],
        [-19.0 / 5.0, 5.0, -19.0 / 5.0, 5.0],
        [1.0, 1.0, 1.0, 1.0],
        [5.0, -19.0 / 5.0, 5.0, -19.0 / 5.0],
        [5.0, 5.0, 5.0, 5.0],
        [lo, lo, hi, hi],
        [hi, hi, lo, lo],
    ]
}

pub fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

/// Index of the known completion within `tol` of `x`.
pub fn match_example2(x: &[f64], tol: f64) -> Option<usize> {
    example2_completions()
        .iter()
        .position(|c| inf_dist(c, x) < tol)
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &Matrix) -> f64 {
    let n = m.rows();
    if n == 1 {
        return m[(0, 0)];
    }
    (0..n)
        .map(|j| {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[(0, j)] * cofactor_det(&minor)
        })
        .sum()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random pattern with `unknowns` unspecified positions; `tied` groups
/// them into classes of size up to 3.
pub fn random_pattern(rng: &mut impl Rng, rows: usize, cols: usize, unknowns: usize, tied: bool) -> Pattern {
    let mut positions: Vec<Position> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
    for i in (1..positions.len()).rev() {
        positions.swap(i, rng.gen_range(0..=i));
    }
    let unknown: Vec<Position> = positions[..unknowns].to_vec();
    let specified = positions[unknowns..]
        .iter()
        .map(|&p| (p, rng.gen_range(-1.0..1.0)))
        .collect();
    let classes = if tied {
        let mut classes = Vec::new();
        let mut rest = unknown.as_slice();
        while !rest.is_empty() {
            let take = rng.gen_range(1..=3).min(rest.len());
            classes.push(rest[..take].to_vec());
            rest = &rest[take..];
        }
        classes
    } else {
        unknown.iter().map(|&p| vec![p]).collect()
    };
    Pattern::new(rows, cols, specified, classes).unwrap()
}
