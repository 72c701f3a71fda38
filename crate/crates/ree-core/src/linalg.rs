//! Exact dense linear algebra over F_q: matrix arithmetic, null spaces,
//! characteristic-polynomial root finding, eigenspaces, symmetric and
//! exterior squares, invariant bilinear forms, module isomorphism testing,
//! and the spinor norm.
//!
//! Convention: vectors are rows and matrices act on the right, v -> v*g.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams};
use crate::poly;

/// A square matrix over F_q, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    e: Vec<FieldElement>,
}

impl core::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{:?} ", self.e[i * self.n + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(n: usize) -> Matrix {
        Matrix { n, e: alloc::vec![FieldElement::ZERO; n * n] }
    }

    pub fn identity(f: &FieldParams, n: usize) -> Matrix {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Result<Matrix> {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Invalid("matrix rows must have length n"));
            }
            e.extend_from_slice(r);
        }
        Ok(Matrix { n, e })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.e[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.e[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.e[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_identity(&self, f: &FieldParams) -> bool {
        *self == Matrix::identity(f, self.n)
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.get(0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { d } else { FieldElement::ZERO };
                if self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn add(&self, f: &FieldParams, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let e = self.e.iter().zip(&other.e).map(|(&a, &b)| f.add(a, b)).collect();
        Matrix { n: self.n, e }
    }

    pub fn sub(&self, f: &FieldParams, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let e = self.e.iter().zip(&other.e).map(|(&a, &b)| f.sub(a, b)).collect();
        Matrix { n: self.n, e }
    }

    pub fn neg(&self, f: &FieldParams) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, f: &FieldParams, c: FieldElement) -> Matrix {
        Matrix { n: self.n, e: self.e.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, f: &FieldParams, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = f.add(m.get(i, j), f.mul(a, other.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// self^k by square and multiply (O(log k) multiplications).
    pub fn pow(&self, f: &FieldParams, mut k: u128) -> Matrix {
        let mut base = self.clone();
        let mut r = Matrix::identity(f, self.n);
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(f, &base);
            }
            base = base.mul(f, &base);
            k >>= 1;
        }
        r
    }

    pub fn trace(&self, f: &FieldParams) -> FieldElement {
        let mut t = f.zero();
        for i in 0..self.n {
            t = f.add(t, self.get(i, i));
        }
        t
    }

    pub fn det(&self, f: &FieldParams) -> FieldElement {
        let n = self.n;
        let mut a = self.rows();
        let mut det = f.one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero());
            let Some(p) = pivot else { return f.zero() };
            if p != col {
                a.swap(p, col);
                det = f.neg(det);
            }
            det = f.mul(det, a[col][col]);
            let inv = f.inv(a[col][col]).unwrap();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = f.mul(a[r][col], inv);
                for c in col..n {
                    let v = f.sub(a[r][c], f.mul(factor, a[col][c]));
                    a[r][c] = v;
                }
            }
        }
        det
    }

    pub fn inv(&self, f: &FieldParams) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.rows();
        let mut b = Matrix::identity(f, n).rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(pivot, col);
            b.swap(pivot, col);
            let inv = f.inv(a[col][col]).unwrap();
            for c in 0..n {
                a[col][c] = f.mul(a[col][c], inv);
                b[col][c] = f.mul(b[col][c], inv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col];
                for c in 0..n {
                    a[r][c] = f.sub(a[r][c], f.mul(factor, a[col][c]));
                    b[r][c] = f.sub(b[r][c], f.mul(factor, b[col][c]));
                }
            }
        }
        Matrix::from_rows(&b)
    }

    pub fn rank(&self, f: &FieldParams) -> usize {
        let mut rows = self.rows();
        rref(f, &mut rows).len()
    }

    /// c^-1 * self * c.
    pub fn conjugate(&self, f: &FieldParams, c: &Matrix) -> Result<Matrix> {
        Ok(c.inv(f)?.mul(f, self).mul(f, c))
    }

    /// Commutator self^-1 other^-1 self other.
    pub fn commutator(&self, f: &FieldParams, other: &Matrix) -> Result<Matrix> {
        Ok(self.inv(f)?.mul(f, &other.inv(f)?).mul(f, self).mul(f, other))
    }
}

/// Apply the right action v -> v*g to a row vector.
pub fn apply(f: &FieldParams, v: &[FieldElement], g: &Matrix) -> Vec<FieldElement> {
    let n = g.dim();
    debug_assert_eq!(v.len(), n);
    let mut r = alloc::vec![f.zero(); n];
    for (i, &vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..n {
            r[j] = f.add(r[j], f.mul(vi, g.get(i, j)));
        }
    }
    r
}

/// B(x, y) = x * gram * y^T for a symmetric Gram matrix.
pub fn bilinear(f: &FieldParams, gram: &Matrix, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    let mut acc = f.zero();
    for (i, &xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            acc = f.add(acc, f.mul(f.mul(xi, gram.get(i, j)), yj));
        }
    }
    acc
}

/// In-place reduced row echelon form; returns the pivot columns.
/// Zero rows are removed.
pub fn rref(f: &FieldParams, rows: &mut Vec<Vec<FieldElement>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(p, rank);
        let inv = f.inv(rows[rank][col]).unwrap();
        for c in col..ncols {
            rows[rank][c] = f.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col];
            for c in col..ncols {
                let v = f.sub(rows[r][c], f.mul(factor, rows[rank][c]));
                rows[r][c] = v;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    pivots
}

/// Basis of {x : A x = 0} (x a column vector, returned as coordinate rows),
/// where `rows` are the equations of A over `ncols` unknowns.
pub fn kernel_basis(f: &FieldParams, mut rows: Vec<Vec<FieldElement>>, ncols: usize) -> Vec<Vec<FieldElement>> {
    let pivots = rref(f, &mut rows);
    let mut basis = Vec::new();
    let mut is_pivot = alloc::vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = alloc::vec![f.zero(); ncols];
        v[free] = f.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(rows[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Solve A x = b for a column vector x (equations = rows over n unknowns).
/// Returns any solution, or None if inconsistent.
pub fn solve_linear(
    f: &FieldParams,
    a_rows: &[Vec<FieldElement>],
    b: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let ncols = a_rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<FieldElement>> = a_rows
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.contains(&ncols) {
        return None; // pivot in the augmented column
    }
    let mut x = alloc::vec![f.zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols];
    }
    Some(x)
}

/// Basis (in reduced echelon form) of the left null space {v : v g = 0}.
pub fn null_space(f: &FieldParams, g: &Matrix) -> Vec<Vec<FieldElement>> {
    let mut basis = kernel_basis(f, g.transpose().rows(), g.dim());
    rref(f, &mut basis);
    basis
}

/// Basis of the eigenspace {v : v g = lambda v}.
pub fn eigenspace(f: &FieldParams, g: &Matrix, lambda: FieldElement) -> Vec<Vec<FieldElement>> {
    let shifted = g.sub(f, &Matrix::identity(f, g.dim()).scale(f, lambda));
    null_space(f, &shifted)
}

/// Characteristic polynomial det(xI - g), monic of degree n, via Lagrange
/// interpolation at n+1 points (valid since q > n here).
pub fn char_poly(f: &FieldParams, g: &Matrix) -> Vec<FieldElement> {
    let n = g.dim();
    assert!((n as u64) < f.q());
    let points: Vec<FieldElement> = (0..=n as u64).map(|k| f.from_int(k)).collect();
    let values: Vec<FieldElement> = points
        .iter()
        .map(|&x| Matrix::identity(f, n).scale(f, x).sub(f, g).det(f))
        .collect();
    // Lagrange interpolation
    let mut p: poly::Poly = Vec::new();
    for (k, &xk) in points.iter().enumerate() {
        let mut term = alloc::vec![values[k]];
        for (j, &xj) in points.iter().enumerate() {
            if j == k {
                continue;
            }
            let denom_inv = f.inv(f.sub(xk, xj)).unwrap();
            // term *= (x - xj) / (xk - xj)
            let factor = alloc::vec![f.mul(f.neg(xj), denom_inv), denom_inv];
            term = poly::mul(f, &term, &factor);
        }
        p = poly::add(f, &p, &term);
    }
    p.resize(n + 1, f.zero());
    p
}

fn lcg_next(state: &mut u64) -> u64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    *state >> 11
}

/// All roots of p lying in F_q, via gcd with x^q - x followed by
/// Cantor-Zassenhaus equal-degree splitting. Deterministic (internally
/// seeded splitting). Returns (root, multiplicity in p).
pub fn poly_roots(f: &FieldParams, p: &[FieldElement]) -> Vec<(FieldElement, u32)> {
    let mut p = p.to_vec();
    poly::trim(&mut p);
    let mut roots: Vec<FieldElement> = Vec::new();
    if poly::deg(&p).unwrap_or(0) == 0 {
        return Vec::new();
    }
    // strip factors of x
    if p[0].is_zero() {
        roots.push(f.zero());
    }
    // s = product of distinct linear factors of p: gcd(p, x^q - x)
    let x = alloc::vec![f.zero(), f.one()];
    let xq = poly::pow_mod(f, &x, f.q() as u128, &p);
    let s = poly::gcd(f, &p, &poly::sub(f, &xq, &x));
    // split s into linear factors
    let mut stack = alloc::vec![s];
    let mut seed = 0x9e3779b97f4a7c15u64 ^ (p.len() as u64);
    while let Some(g) = stack.pop() {
        match poly::deg(&g) {
            None | Some(0) => continue,
            Some(1) => {
                // monic x + c -> root -c
                let root = f.neg(g[0]);
                if !root.is_zero() || !roots.contains(&f.zero()) {
                    if !roots.contains(&root) {
                        roots.push(root);
                    }
                }
                continue;
            }
            Some(_) => {
                loop {
                    let a = f.from_int(lcg_next(&mut seed) % f.q());
                    // h = (x + a)^((q-1)/2) - 1 mod g
                    let shifted = alloc::vec![a, f.one()];
                    let hp = poly::pow_mod(f, &shifted, ((f.q() - 1) / 2) as u128, &g);
                    let h = poly::sub(f, &hp, &alloc::vec![f.one()]);
                    let d = poly::gcd(f, &g, &h);
                    if let Some(dd) = poly::deg(&d) {
                        if dd > 0 && dd < poly::deg(&g).unwrap() {
                            let other = poly::quot(f, &g, &d);
                            stack.push(d);
                            stack.push(other);
                            break;
                        }
                    }
                }
            }
        }
    }
    // multiplicities by repeated division
    let mut out = Vec::new();
    for &r in &roots {
        let lin = alloc::vec![f.neg(r), f.one()];
        let mut m = 0u32;
        let mut q = p.clone();
        loop {
            let rem = poly::rem(f, &q, &lin);
            if !rem.is_empty() {
                break;
            }
            q = poly::quot(f, &q, &lin);
            m += 1;
        }
        if m > 0 {
            out.push((r, m));
        }
    }
    out.sort_by_key(|&(r, _)| f.to_int(r));
    out
}

/// Roots in F_q of the characteristic polynomial of g, with multiplicities.
pub fn char_poly_roots(f: &FieldParams, g: &Matrix) -> Vec<(FieldElement, u32)> {
    poly_roots(f, &char_poly(f, g))
}

/// Index pairs (i <= j) for the symmetric square basis, lexicographic.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

/// Index pairs (i < j) for the exterior square basis, lexicographic.
pub fn ext_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

/// Symmetric square: action on monomials x_i x_j (i <= j), substitution
/// x_i -> sum_k g[i][k] x_k; row (i,j) is the image of x_i x_j.
pub fn symmetric_square(f: &FieldParams, g: &Matrix) -> Matrix {
    let n = g.dim();
    let pairs = sym_pairs(n);
    let index: alloc::collections::BTreeMap<(usize, usize), usize> =
        pairs.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
    let mut m = Matrix::zero(pairs.len());
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for a in 0..n {
            for b in a..n {
                let col = index[&(a, b)];
                let v = if a == b {
                    f.mul(g.get(i, a), g.get(j, a))
                } else {
                    f.add(f.mul(g.get(i, a), g.get(j, b)), f.mul(g.get(i, b), g.get(j, a)))
                };
                let cur = m.get(r, col);
                m.set(r, col, f.add(cur, v));
            }
        }
    }
    m
}

/// Exterior square: action on e_i ^ e_j (i < j); row (i,j) is the image.
pub fn exterior_square(f: &FieldParams, g: &Matrix) -> Matrix {
    let n = g.dim();
    let pairs = ext_pairs(n);
    let index: alloc::collections::BTreeMap<(usize, usize), usize> =
        pairs.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
    let mut m = Matrix::zero(pairs.len());
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for a in 0..n {
            for b in a + 1..n {
                let col = index[&(a, b)];
                let v = f.sub(f.mul(g.get(i, a), g.get(j, b)), f.mul(g.get(i, b), g.get(j, a)));
                m.set(r, col, v);
            }
        }
    }
    m
}

/// Basis of the space of symmetric K with g K g^T = K for every generator.
pub fn invariant_bilinear_forms(f: &FieldParams, gens: &[Matrix]) -> Vec<Matrix> {
    let n = gens.first().map_or(0, |g| g.dim());
    let pairs = sym_pairs(n);
    let index: alloc::collections::BTreeMap<(usize, usize), usize> =
        pairs.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
    let nvars = pairs.len();
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for g in gens {
        for i in 0..n {
            for j in i..n {
                // (g K g^T)[i][j] - K[i][j] = 0
                let mut row = alloc::vec![f.zero(); nvars];
                for a in 0..n {
                    for b in a..n {
                        let col = index[&(a, b)];
                        let coef = if a == b {
                            f.mul(g.get(i, a), g.get(j, a))
                        } else {
                            f.add(f.mul(g.get(i, a), g.get(j, b)), f.mul(g.get(i, b), g.get(j, a)))
                        };
                        row[col] = f.add(row[col], coef);
                    }
                }
                let diag = index[&(i, j)];
                row[diag] = f.sub(row[diag], f.one());
                rows.push(row);
            }
        }
    }
    let sols = if gens.is_empty() {
        // trivial group: the whole space of symmetric matrices
        (0..nvars)
            .map(|k| {
                let mut v = alloc::vec![f.zero(); nvars];
                v[k] = f.one();
                v
            })
            .collect()
    } else {
        kernel_basis(f, rows, nvars)
    };
    sols.into_iter()
        .map(|v| {
            let mut k = Matrix::zero(n);
            for (idx, &(a, b)) in pairs.iter().enumerate() {
                k.set(a, b, v[idx]);
                k.set(b, a, v[idx]);
            }
            k
        })
        .collect()
}

/// Find invertible c with c^-1 A_i c = B_i for all i (equivalently
/// A_i c = c B_i), or None if the modules are not isomorphic.
pub fn module_isomorphism(f: &FieldParams, gens_a: &[Matrix], gens_b: &[Matrix]) -> Option<Matrix> {
    let n = gens_a.first()?.dim();
    if gens_a.len() != gens_b.len() || gens_b.iter().any(|g| g.dim() != n) {
        return None;
    }
    let nvars = n * n;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for (a, b) in gens_a.iter().zip(gens_b) {
        for i in 0..n {
            for j in 0..n {
                // (A c)[i][j] - (c B)[i][j] = 0, unknowns c[k][l] at k*n+l
                let mut row = alloc::vec![f.zero(); nvars];
                for k in 0..n {
                    row[k * n + j] = f.add(row[k * n + j], a.get(i, k));
                    row[i * n + k] = f.sub(row[i * n + k], b.get(k, j));
                }
                rows.push(row);
            }
        }
    }
    let basis = kernel_basis(f, rows, nvars);
    let to_matrix = |v: &[FieldElement]| {
        let mut m = Matrix::zero(n);
        for k in 0..n {
            for l in 0..n {
                m.set(k, l, v[k * n + l]);
            }
        }
        m
    };
    let candidates: Vec<Matrix> = basis.iter().map(|v| to_matrix(v)).collect();
    for c in &candidates {
        if !c.det(f).is_zero() {
            return Some(c.clone());
        }
    }
    // random F_q combinations of the kernel basis
    let mut seed = 0x51ab_c0de_u64 ^ (n as u64) << 8;
    for _ in 0..200 {
        if candidates.is_empty() {
            break;
        }
        let mut m = Matrix::zero(n);
        for c in &candidates {
            let coef = f.from_int(lcg_next(&mut seed) % f.q());
            m = m.add(f, &c.scale(f, coef));
        }
        if !m.det(f).is_zero() {
            return Some(m);
        }
    }
    None
}

/// Basis of the space of (possibly rectangular) intertwiners
/// {Phi (na x nb) : A_i Phi = Phi B_i for all i}, as row-major matrices.
/// With row vectors acting on the right, such Phi are the equivariant maps
/// v -> v Phi from the A-module to the B-module.
pub fn intertwiners(
    f: &FieldParams,
    gens_a: &[Matrix],
    gens_b: &[Matrix],
) -> Vec<Vec<Vec<FieldElement>>> {
    let na = gens_a.first().map_or(0, |g| g.dim());
    let nb = gens_b.first().map_or(0, |g| g.dim());
    let nvars = na * nb;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for (a, b) in gens_a.iter().zip(gens_b) {
        for i in 0..na {
            for j in 0..nb {
                // (A Phi)[i][j] - (Phi B)[i][j] = 0, unknowns phi[k][l] at k*nb+l
                let mut row = alloc::vec![f.zero(); nvars];
                for k in 0..na {
                    row[k * nb + j] = f.add(row[k * nb + j], a.get(i, k));
                }
                for l in 0..nb {
                    row[i * nb + l] = f.sub(row[i * nb + l], b.get(l, j));
                }
                rows.push(row);
            }
        }
    }
    kernel_basis(f, rows, nvars)
        .into_iter()
        .map(|v| (0..na).map(|k| v[k * nb..(k + 1) * nb].to_vec()).collect())
        .collect()
}

/// Smallest invariant subspace containing the seed vectors, as a reduced
/// echelon basis, grown by repeatedly applying the generators.
pub fn spin(f: &FieldParams, gens: &[Matrix], seeds: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    let mut basis: Vec<Vec<FieldElement>> = seeds.to_vec();
    rref(f, &mut basis);
    loop {
        let mut grew = false;
        let snapshot = basis.clone();
        for v in &snapshot {
            for g in gens {
                let w = apply(f, v, g);
                let mut trial = basis.clone();
                trial.push(w);
                rref(f, &mut trial);
                if trial.len() > basis.len() {
                    basis = trial;
                    grew = true;
                }
            }
        }
        if !grew {
            return basis;
        }
    }
}

/// Search for an invariant subspace of exactly `target_dim` by spinning
/// random vectors and eigenvectors of random algebra elements. Failure is
/// not a proof of irreducibility (Las Vegas, one-sided).
pub fn spin_invariant_submodule<R: rand_core::RngCore>(
    f: &FieldParams,
    gens: &[Matrix],
    target_dim: usize,
    attempts: usize,
    rng: &mut R,
) -> Option<Vec<Vec<FieldElement>>> {
    let n = gens.first()?.dim();
    let rand_elt = |rng: &mut R| f.from_int(rng.next_u64() % f.q());
    for _ in 0..attempts {
        // random element of the enveloping algebra: sum of short random words
        let mut z = Matrix::zero(n);
        for _ in 0..3 {
            let mut w = Matrix::identity(f, n);
            let len = 1 + (rng.next_u32() % 3) as usize;
            for _ in 0..len {
                let pick = (rng.next_u32() as usize) % gens.len();
                w = w.mul(f, &gens[pick]);
            }
            z = z.add(f, &w.scale(f, rand_elt(rng)));
        }
        let mut seeds: Vec<Vec<FieldElement>> = Vec::new();
        for (lambda, _) in char_poly_roots(f, &z) {
            for v in eigenspace(f, &z, lambda) {
                seeds.push(v);
            }
        }
        // plus one plain random vector
        let mut v = alloc::vec![f.zero(); n];
        for c in v.iter_mut() {
            *c = rand_elt(rng);
        }
        if v.iter().any(|c| !c.is_zero()) {
            seeds.push(v);
        }
        for s in seeds {
            let sub = spin(f, gens, &[s]);
            if sub.len() == target_dim {
                return Some(sub);
            }
        }
    }
    None
}

/// Reflection matrix (row action) in the anisotropic vector w:
/// x -> x - 2 B(x,w)/B(w,w) w.
pub fn reflection(f: &FieldParams, gram: &Matrix, w: &[FieldElement]) -> Result<Matrix> {
    let n = gram.dim();
    let qw = bilinear(f, gram, w, w);
    if qw.is_zero() {
        return Err(Error::Invalid("reflection vector must be anisotropic"));
    }
    let qinv = f.inv(qw)?;
    let mut m = Matrix::identity(f, n);
    for i in 0..n {
        let e_i: Vec<FieldElement> = (0..n).map(|k| if k == i { f.one() } else { f.zero() }).collect();
        let b = bilinear(f, gram, &e_i, w);
        let c = f.mul(f.add(b, b), qinv); // 2 B(e_i, w)/Q(w)
        for j in 0..n {
            let v = f.sub(m.get(i, j), f.mul(c, w[j]));
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Square classes of the reflection-vector norms in a Cartan-Dieudonne
/// decomposition of g (restricted recursion on the fixed vector's
/// perpendicular complement).
fn reflection_norms(
    f: &FieldParams,
    g: &Matrix,
    gram: &Matrix,
    out: &mut Vec<FieldElement>,
) -> Result<()> {
    let n = g.dim();
    if n == 0 || g.is_identity(f) {
        return Ok(());
    }
    // find an anisotropic vector moved by g
    let mut candidates: Vec<Vec<FieldElement>> = Vec::new();
    for i in 0..n {
        let mut e = alloc::vec![f.zero(); n];
        e[i] = f.one();
        candidates.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [f.one(), f.neg(f.one())] {
                let mut e = alloc::vec![f.zero(); n];
                e[i] = f.one();
                e[j] = s;
                candidates.push(e);
            }
        }
    }
    let mut seed = 0xfeed_5eed_u64 ^ (n as u64);
    for _ in 0..200 {
        let v: Vec<FieldElement> = (0..n).map(|_| f.from_int(lcg_next(&mut seed) % f.q())).collect();
        if v.iter().any(|c| !c.is_zero()) {
            candidates.push(v);
        }
    }
    let u = candidates
        .into_iter()
        .find(|v| !bilinear(f, gram, v, v).is_zero() && apply(f, v, g) != *v)
        .ok_or(Error::Invalid("no moved anisotropic vector found"))?;
    let gu = apply(f, &u, g);
    let w: Vec<FieldElement> = gu.iter().zip(&u).map(|(&a, &b)| f.sub(a, b)).collect();
    let qw = bilinear(f, gram, &w, &w);
    let mut g2 = g.clone();
    if !qw.is_zero() {
        let r = reflection(f, gram, &w)?;
        g2 = g2.mul(f, &r);
        out.push(qw);
    } else {
        // Q(gu - u) = 0 with Q(u) != 0 forces Q(gu + u) = 4 Q(u) != 0;
        // reflect in gu + u (sending gu to -u), then in u.
        let w2: Vec<FieldElement> = gu.iter().zip(&u).map(|(&a, &b)| f.add(a, b)).collect();
        let r1 = reflection(f, gram, &w2)?;
        let r2 = reflection(f, gram, &u)?;
        g2 = g2.mul(f, &r1).mul(f, &r2);
        out.push(bilinear(f, gram, &w2, &w2));
        out.push(bilinear(f, gram, &u, &u));
    }
    debug_assert_eq!(apply(f, &u, &g2), u);
    // restrict to the perpendicular complement of u
    let functional: Vec<Vec<FieldElement>> = alloc::vec![(0..n)
        .map(|i| {
            let mut e = alloc::vec![f.zero(); n];
            e[i] = f.one();
            bilinear(f, gram, &e, &u)
        })
        .collect()];
    let w_basis = kernel_basis(f, functional, n); // (n-1) rows
    let d = w_basis.len();
    // restricted action: w_i g2 = sum_j c[i][j] w_j
    let wt: Vec<Vec<FieldElement>> = (0..n)
        .map(|col| (0..d).map(|r| w_basis[r][col]).collect())
        .collect(); // n rows of length d: W^T
    let mut c = Matrix::zero(d);
    for i in 0..d {
        let y = apply(f, &w_basis[i], &g2);
        let x = solve_linear(f, &wt, &y).ok_or(Error::Invalid("restriction failed"))?;
        for j in 0..d {
            c.set(i, j, x[j]);
        }
    }
    let mut gram_h = Matrix::zero(d);
    for i in 0..d {
        for j in 0..d {
            gram_h.set(i, j, bilinear(f, gram, &w_basis[i], &w_basis[j]));
        }
    }
    reflection_norms(f, &c, &gram_h, out)
}

/// Spinor norm of g with respect to the form: 0 if g is in the kernel
/// Omega, 1 otherwise. Requires g orthogonal with det 1.
pub fn spinor_norm(f: &FieldParams, g: &Matrix, form: &Matrix) -> Result<u8> {
    if g.mul(f, form).mul(f, &g.transpose()) != *form {
        return Err(Error::BadShape("matrix is not orthogonal for the form"));
    }
    if g.det(f) != f.one() {
        return Err(Error::BadShape("matrix must have determinant 1"));
    }
    let mut norms = Vec::new();
    reflection_norms(f, g, form, &mut norms)?;
    let mut parity = 0u8;
    for q in norms {
        if !f.is_square(q) {
            parity ^= 1;
        }
    }
    Ok(parity)
}
