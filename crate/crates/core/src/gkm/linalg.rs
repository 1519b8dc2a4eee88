//! Exact linear algebra over Q for small lattice computations.

use num_traits::Zero;

use crate::algebra::Q;

/// Solves `A X = B` for `X`, where `A` is `m × n` with `m ≥ n` and full column rank.
/// Returns `None` if the system is singular or inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let k = b.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();
    let mut row = 0;
    for col in 0..n {
        let piv = (row..m).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(row, piv);
        let inv = aug[row][col].recip();
        for x in aug[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m {
            if r != row && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..(n + k) {
                    let delta = &f * &aug[row][c];
                    aug[r][c] -= delta;
                }
            }
        }
        row += 1;
    }
    // leftover rows must be consistent
    for r in row..m {
        if aug[r][n..].iter().any(|x| !x.is_zero()) {
            return None;
        }
    }
    Some(aug[..n].iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank of a rational matrix.
pub fn rank(a: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, piv);
        for r in (row + 1)..m.len() {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[row][col];
                for c in col..cols {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        row += 1;
    }
    row
}

pub fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { crate::algebra::q(1) } else { Q::zero() }).collect()).collect()
}
