//! Exact and floating-point elimination kernels.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination with row pivoting. Every intermediate value is a minor of
/// the input, so the integer divisions are exact.
pub fn determinant_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let value = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = value;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank over the rationals of a dense integer matrix, by Bareiss elimination
/// with full column search for pivots.
pub fn rank_bareiss(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(pivot, rank);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let value = (&a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = value;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over the rationals of a sparse integer matrix given column-wise as
/// `(row, value)` lists.
///
/// Columns are reduced left to right against earlier pivots keyed by their
/// largest row index; each combination uses integer multipliers and is
/// divided by the content of the result, so entries stay small.
pub fn rank_sparse(columns: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for column in columns {
        let mut col: BTreeMap<usize, BigInt> = column
            .iter()
            .filter(|&&(_, v)| v != 0)
            .map(|&(r, v)| (r, BigInt::from(v)))
            .collect();
        loop {
            let Some((&low, _)) = col.iter().next_back() else {
                break;
            };
            let Some(pivot) = pivots.get(&low) else {
                break;
            };
            let a = pivot[&low].clone();
            let b = col[&low].clone();
            // col <- a*col - b*pivot, which cancels the entry at `low`
            let mut merged: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (&r, v) in &col {
                merged.insert(r, v * &a);
            }
            for (&r, v) in pivot {
                let entry = merged.entry(r).or_insert_with(BigInt::zero);
                *entry -= v * &b;
            }
            merged.retain(|_, v| !v.is_zero());
            let content = merged
                .values()
                .fold(BigInt::zero(), |g, v| num_integer::Integer::gcd(&g, v));
            if !content.is_zero() && !content.is_one() {
                for v in merged.values_mut() {
                    *v /= &content;
                }
            }
            col = merged;
        }
        if let Some((&low, _)) = col.iter().next_back() {
            pivots.insert(low, col);
        }
    }
    pivots.len()
}

/// `ln |det a|` by LU with partial pivoting; `None` when numerically singular.
pub fn log_abs_determinant(mut a: Vec<Vec<f64>>) -> Option<f64> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let mut log_det = 0.0;
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(pivot, k);
        let pk = a[k][k];
        log_det += pk.abs().ln();
        for i in k + 1..n {
            let factor = a[i][k] / pk;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i][j] -= factor * a[k][j];
            }
        }
    }
    Some(log_det)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() < 1e-13 {
            return None;
        }
        a.swap(pivot, k);
        b.swap(pivot, k);
        for i in k + 1..n {
            let factor = a[i][k] / a[k][k];
            if factor == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= factor * a[k][j];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let tail: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - tail) / a[k][k];
    }
    Some(x)
}

pub(crate) fn to_big(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|row| row.iter().map(|&v| BigInt::from(v)).collect()).collect()
}
