//! Small dense linear algebra over a [`FieldSpec`]: row reduction, solving,
//! and minimal polynomials of square matrices.

use crate::field::{FieldSpec, Poly, Scalar};

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<Scalar>>;

pub fn identity(k: &FieldSpec, n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

pub fn mat_mul(k: &FieldSpec, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(k.zero(), |acc, l| k.add(&acc, &k.mul(&row[l], &b[l][j]))))
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(k: &FieldSpec, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = k.inv(&m[r][c]).expect("pivot is nonzero");
        for j in 0..cols {
            m[r][j] = k.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let t = k.mul(&factor, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(k: &FieldSpec, m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(k, &mut m).len()
}

/// Some `x` with `Σ_j x_j columns[j] = target`, if one exists.
pub fn solve_columns(k: &FieldSpec, columns: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = columns.len();
    let rows = target.len();
    let mut m: Matrix = (0..rows)
        .map(|i| {
            let mut row: Vec<Scalar> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(k, &mut m);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![k.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}

/// Minimal polynomial of a square matrix, monic, via the first linear
/// dependency among `I, M, M^2, ...`.
pub fn min_poly(k: &FieldSpec, m: &Matrix) -> Poly {
    let n = m.len();
    let flatten = |a: &Matrix| -> Vec<Scalar> { a.iter().flatten().cloned().collect() };
    let mut powers = vec![flatten(&identity(k, n))];
    let mut current = identity(k, n);
    for _ in 0..=n {
        current = mat_mul(k, &current, m);
        let target = flatten(&current);
        if let Some(x) = solve_columns(k, &powers, &target) {
            let mut coeffs: Vec<Scalar> = x.iter().map(|c| k.neg(c)).collect();
            coeffs.push(k.one());
            return Poly::new(coeffs);
        }
        powers.push(target);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}
