//! Dense univariate polynomials over F_q (coefficients low-degree first),
//! just enough for characteristic polynomials and root finding.

use alloc::vec::Vec;

use crate::field::{FieldElement, FieldParams};

pub(crate) type Poly = Vec<FieldElement>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn deg(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub(crate) fn add(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    let mut r = alloc::vec![f.zero(); a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        r[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        r[i] = f.add(r[i], c);
    }
    trim(&mut r);
    r
}

pub(crate) fn sub(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    let mut r = alloc::vec![f.zero(); a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        r[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        r[i] = f.sub(r[i], c);
    }
    trim(&mut r);
    r
}

pub(crate) fn mul(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = alloc::vec![f.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = f.add(r[i + j], f.mul(x, y));
        }
    }
    trim(&mut r);
    r
}

pub(crate) fn scale(f: &FieldParams, a: &Poly, c: FieldElement) -> Poly {
    let mut r: Poly = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut r);
    r
}

/// Remainder of a by b (b nonzero).
pub(crate) fn rem(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    trim(&mut r);
    let db = deg(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    while deg(&r).is_some_and(|dr| dr >= db) {
        let dr = r.len() - 1;
        let c = f.mul(r[dr], lead_inv);
        for j in 0..=db {
            let idx = dr - db + j;
            r[idx] = f.sub(r[idx], f.mul(c, b[j]));
        }
        trim(&mut r);
    }
    r
}

/// Quotient of a by b, assuming exact or truncating (standard poly division).
pub(crate) fn quot(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    trim(&mut r);
    let db = deg(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut q = alloc::vec![f.zero(); r.len().saturating_sub(db)];
    while deg(&r).is_some_and(|dr| dr >= db) {
        let dr = r.len() - 1;
        let c = f.mul(r[dr], lead_inv);
        q[dr - db] = c;
        for j in 0..=db {
            let idx = dr - db + j;
            r[idx] = f.sub(r[idx], f.mul(c, b[j]));
        }
        trim(&mut r);
    }
    trim(&mut q);
    q
}

pub(crate) fn monic(f: &FieldParams, a: &Poly) -> Poly {
    match deg(a) {
        None => Vec::new(),
        Some(d) => scale(f, a, f.inv(a[d]).unwrap()),
    }
}

pub(crate) fn gcd(f: &FieldParams, a: &Poly, b: &Poly) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// base^e mod m, by square and multiply.
pub(crate) fn pow_mod(f: &FieldParams, base: &Poly, mut e: u128, m: &Poly) -> Poly {
    let mut b = rem(f, base, m);
    let mut r = alloc::vec![f.one()];
    r = rem(f, &r, m);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(f, &mul(f, &r, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e >>= 1;
    }
    r
}
