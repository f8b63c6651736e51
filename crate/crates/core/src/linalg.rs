//! Exact Gaussian elimination over Q.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
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
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut().skip(c) {
            *x *= &inv;
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let (pivot_row, row) = if i < r {
                let (lo, hi) = m.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (x, y) in row.iter_mut().zip(pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of {x : m·x = 0} for a matrix with `cols` columns, in reduced
/// echelon form (each vector has a unit entry at its own free column).
pub fn null_space(m: &Matrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<BigRational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -work[row][f].clone();
            }
            v
        })
        .collect();
    // Echelon form with respect to the coordinate order.
    let mut as_rows: Matrix = basis.clone();
    if !as_rows.is_empty() {
        rref(&mut as_rows);
        basis = as_rows
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
    }
    basis
}

/// The unique x with Σ_j x_j·columns[j] = target. The rows of the system
/// must outnumber the unknowns, be consistent, and have full column rank.
pub fn solve_columns(
    columns: &[Vec<BigRational>],
    target: &[BigRational],
) -> Result<Vec<BigRational>> {
    let k = columns.len();
    let rows = target.len();
    if k == 0 {
        return if target.iter().all(Zero::is_zero) {
            Ok(Vec::new())
        } else {
            Err(Error::Inconsistent(
                "target is not in the zero space".into(),
            ))
        };
    }
    let mut aug: Matrix = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        let locus = aug
            .iter()
            .position(|r| r[..k].iter().all(Zero::is_zero) && !r[k].is_zero())
            .unwrap_or(0);
        return Err(Error::Inconsistent(format!(
            "no solution, conflicting row {locus}"
        )));
    }
    if pivots.len() < k || rows <= k {
        return Err(Error::Underdetermined(format!(
            "rank {} for {} unknowns from {} equations",
            pivots.len(),
            k,
            rows
        )));
    }
    Ok((0..k).map(|j| aug[j][k].clone()).collect())
}
