//! Small dense linear algebra over the prime field F_3.
//!
//! Field elements of F_q, q = 3^(2m+1), are vectors over F_3 in the
//! polynomial basis; several algorithms reduce to solving tiny F_3-linear
//! systems in those coordinates (2m+1 <= 13 unknowns). This module provides
//! exactly that: coordinate extraction and Gaussian elimination mod 3.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{FieldElement, FieldParams};

/// F_3 coordinates of x in the polynomial basis (length = field degree).
pub fn f3_coords(f: &FieldParams, x: FieldElement) -> Vec<u8> {
    let mut n = f.to_int(x);
    let mut c = Vec::with_capacity(f.degree());
    for _ in 0..f.degree() {
        c.push((n % 3) as u8);
        n /= 3;
    }
    c
}

/// Inverse of [`f3_coords`].
pub fn f3_from_coords(f: &FieldParams, c: &[u8]) -> FieldElement {
    let mut n = 0u64;
    for &d in c.iter().rev() {
        n = n * 3 + d as u64;
    }
    f.from_int(n)
}

/// Solve sum_i eps_i * basis_i = target over F_3, if possible. All vectors
/// must have the same length; returns the coefficient vector eps.
pub fn f3_solve(basis: &[Vec<u8>], target: &[u8]) -> Option<Vec<u8>> {
    let k = basis.len();
    if k == 0 {
        return if target.iter().all(|&d| d == 0) { Some(Vec::new()) } else { None };
    }
    let n = target.len();
    // Augmented system: columns are the basis vectors, RHS the target.
    let mut a: Vec<Vec<u8>> = (0..n)
        .map(|r| {
            let mut row: Vec<u8> = basis.iter().map(|b| b[r]).collect();
            row.push(target[r]);
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; k];
    let mut row = 0usize;
    for col in 0..k {
        let Some(p) = (row..n).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, p);
        // normalize pivot to 1 (invert 2 -> multiply row by 2)
        if a[row][col] == 2 {
            for v in a[row].iter_mut() {
                *v = (*v * 2) % 3;
            }
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let c = a[r][col];
                for j in 0..=k {
                    a[r][j] = (a[r][j] + (3 - c) * a[row][j]) % 3;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == n {
            break;
        }
    }
    // Inconsistency: a nonzero RHS in a zero row.
    for r in 0..n {
        if a[r][..k].iter().all(|&v| v == 0) && a[r][k] != 0 {
            return None;
        }
    }
    let mut eps = vec![0u8; k];
    for col in 0..k {
        if let Some(r) = pivot_of_col[col] {
            eps[col] = a[r][k];
        }
    }
    // Free variables default to zero; verify the solution exactly.
    for r in 0..n {
        let mut acc = 0u16;
        for (i, b) in basis.iter().enumerate() {
            acc += (eps[i] * b[r]) as u16;
        }
        if acc % 3 != target[r] as u16 % 3 {
            return None;
        }
    }
    Some(eps)
}

/// Whether the given vectors are F_3-linearly independent and span F_3^n
/// (i.e. form a basis: square count and full rank).
pub fn f3_is_basis(vectors: &[Vec<u8>]) -> bool {
    let k = vectors.len();
    if k == 0 || vectors.iter().any(|v| v.len() != k) {
        return false;
    }
    let mut a: Vec<Vec<u8>> = vectors.to_vec();
    let mut rank = 0usize;
    for col in 0..k {
        let Some(p) = (rank..k).find(|&r| a[r][col] != 0) else { continue };
        a.swap(rank, p);
        if a[rank][col] == 2 {
            for v in a[rank].iter_mut() {
                *v = (*v * 2) % 3;
            }
        }
        for r in 0..k {
            if r != rank && a[r][col] != 0 {
                let c = a[r][col];
                for j in 0..k {
                    a[r][j] = (a[r][j] + (3 - c) * a[rank][j]) % 3;
                }
            }
        }
        rank += 1;
    }
    rank == k
}
