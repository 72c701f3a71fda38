//! Constructive recognition of PSL(2, q) in its 3-dimensional symmetric
//! square representation, and constructive membership for the degree-2
//! standard copy.
//!
//! The 3-dimensional representation of PSL(2, q) in odd characteristic is
//! the symmetric square of the natural SL(2, q)-module, realized on the
//! monomial basis x^2, xy, y^2. Its image preserves the discriminant conic,
//! so a group conjugate to the image is recognized by congruence of
//! invariant bilinear forms; the change of basis is then standardized so
//! that three designated elements map exactly onto the standard torus,
//! unipotent and Weyl generators of the degree-2 copy. Membership in the
//! degree-2 copy is a Bruhat decomposition: one discrete logarithm for the
//! torus part and F_3-linear solves for the unipotent parameters, giving
//! SLPs of length O(log q).

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::arith;
use crate::error::{Error, Result};
use crate::f3;
use crate::field::{FieldElement, FieldParams};
use crate::linalg::{self, Matrix};
use crate::randgen::{self, PrGenerator};
use crate::slp::{Slp, SlpBuilder};

/// A 2x2 matrix from entries.
pub fn mat2(
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
) -> Matrix {
    let mut m = Matrix::zero(2);
    m.set(0, 0, a);
    m.set(0, 1, b);
    m.set(1, 0, c);
    m.set(1, 1, d);
    m
}

/// Standard generators of the degree-2 copy of (P)SL(2, q):
/// torus diag(w, w^-1) with w a fixed primitive element, the unipotent
/// [[1,1],[0,1]], and the Weyl element [[0,1],[-1,0]].
pub fn psl2_standard_generators(f: &FieldParams) -> [Matrix; 3] {
    let one = f.one();
    let zero = f.zero();
    let om = f.omega();
    [
        mat2(om, zero, zero, f.inv(om).expect("omega is a unit")),
        mat2(one, one, zero, one),
        mat2(zero, one, f.neg(one), zero),
    ]
}

/// The symmetric square map pi_3 : (P)SL(2, q) -> GL(3, q) on the monomial
/// basis x^2, xy, y^2.
pub fn pi3(f: &FieldParams, g: &Matrix) -> Matrix {
    debug_assert_eq!(g.dim(), 2);
    linalg::symmetric_square(f, g)
}

/// Inverse of pi_3 up to sign: given h in the image of the symmetric square
/// map, recover g (with det g = 1) such that pi3(g) = h. The sign is fixed
/// by the canonical square root.
pub fn pi3_invert(f: &FieldParams, h: &Matrix) -> Result<Matrix> {
    if h.dim() != 3 {
        return Err(Error::BadShape("pi3_invert expects a 3x3 matrix"));
    }
    let g = if !h.get(0, 0).is_zero() {
        // h11 = a^2, h12 = -ab, h21 = ac, h22 = ad + bc, with ad - bc = 1.
        let a = f.sqrt(h.get(0, 0)).map_err(|_| Error::Invalid("not a symmetric square image"))?;
        let b = f.neg(f.div(h.get(0, 1), a)?);
        let c = f.div(h.get(1, 0), a)?;
        // 2ad = h22 + 1, and 2 = -1 in characteristic 3.
        let d = f.div(f.neg(f.add(h.get(1, 1), f.one())), a)?;
        mat2(a, b, c, d)
    } else {
        // a = 0: bc = -1, h13 = b^2, h23 = bd.
        let b = f.sqrt(h.get(0, 2)).map_err(|_| Error::Invalid("not a symmetric square image"))?;
        if b.is_zero() {
            return Err(Error::Invalid("not a symmetric square image"));
        }
        let c = f.neg(f.inv(b)?);
        let d = f.div(h.get(1, 2), b)?;
        mat2(f.zero(), b, c, d)
    };
    let det = g.det(f);
    if det != f.one() || pi3(f, &g) != *h {
        return Err(Error::Invalid("not a symmetric square image"));
    }
    Ok(g)
}

/// Factored exponent of PSL(2, q), q = 3^(2m+1): element orders divide
/// 3 (q-1)/2 (q+1)/2 (the three factors are pairwise coprime).
pub fn psl2_exponent_factors(f: &FieldParams) -> Vec<(u64, u32)> {
    let q = f.q();
    let mut factors = vec![(3u64, 1u32)];
    for part in [(q - 1) / 2, (q + 1) / 2] {
        factors = arith::merge_factorizations(&factors, &arith::factorize(part));
    }
    factors
}

/// Least non-square of F_q (deterministic representative).
fn least_nonsquare(f: &FieldParams) -> FieldElement {
    for x in f.elements() {
        if !x.is_zero() && !f.is_square(x) {
            return x;
        }
    }
    unreachable!("every odd-order field has a non-square")
}

fn form_value(f: &FieldParams, form: &Matrix, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    linalg::bilinear(f, form, x, y)
}

/// Congruence-diagonalize a symmetric non-degenerate form: returns B with
/// B * form * B^T = diag(d).
fn diagonalize_form(f: &FieldParams, form: &Matrix) -> Result<(Matrix, Vec<FieldElement>)> {
    let n = form.dim();
    let mut work: Vec<Vec<FieldElement>> = Matrix::identity(f, n).rows();
    let mut basis: Vec<Vec<FieldElement>> = Vec::new();
    let mut ds: Vec<FieldElement> = Vec::new();
    while !work.is_empty() {
        // find an anisotropic vector among the remaining ones
        let mut pick = work
            .iter()
            .position(|v| !form_value(f, form, v, v).is_zero());
        if pick.is_none() {
            // all remaining are isotropic: some pair must have B(v,w) != 0,
            // and then v + w is anisotropic (Q(v+w) = 2B(v,w) in char 3).
            'outer: for i in 0..work.len() {
                for j in 0..work.len() {
                    if i != j && !form_value(f, form, &work[i], &work[j]).is_zero() {
                        let w = work[j].clone();
                        for (a, b) in work[i].iter_mut().zip(w) {
                            *a = f.add(*a, b);
                        }
                        pick = Some(i);
                        break 'outer;
                    }
                }
            }
        }
        let Some(i) = pick else {
            return Err(Error::SingularMatrix);
        };
        let v = work.remove(i);
        let qv = form_value(f, form, &v, &v);
        for w in work.iter_mut() {
            let coeff = f.div(form_value(f, form, w, &v), qv)?;
            for (a, &b) in w.iter_mut().zip(v.iter()) {
                *a = f.sub(*a, f.mul(coeff, b));
            }
        }
        basis.push(v);
        ds.push(qv);
    }
    Ok((Matrix::from_rows(&basis)?, ds))
}

/// Basis matrix P with P * form * P^T = diag(1,...,1) or diag(1,...,1,nu)
/// with nu the least non-square; returns (P, number of nu entries: 0 or 1).
fn canonical_form_basis(f: &FieldParams, form: &Matrix) -> Result<(Matrix, usize)> {
    let nu = least_nonsquare(f);
    let (b, ds) = diagonalize_form(f, form)?;
    let mut ones: Vec<Vec<FieldElement>> = Vec::new();
    let mut nus: Vec<Vec<FieldElement>> = Vec::new();
    for (row, d) in b.rows().into_iter().zip(ds) {
        if f.is_nonzero_square(d) {
            let s = f.sqrt(d)?;
            ones.push(row.iter().map(|&x| f.div(x, s).expect("s != 0")).collect());
        } else {
            let s = f.sqrt(f.div(d, nu)?)?;
            nus.push(row.iter().map(|&x| f.div(x, s).expect("s != 0")).collect());
        }
    }
    // Convert pairs of nu-entries into pairs of 1-entries: find a, b with
    // a^2 + b^2 = nu^-1 (solvable since -1 is a non-square when q = 3 mod 4).
    while nus.len() >= 2 {
        let target = f.inv(nu)?;
        let mut found = None;
        for a in f.elements() {
            let rest = f.sub(target, f.mul(a, a));
            if f.is_square(rest) {
                found = Some((a, f.sqrt(rest)?));
                break;
            }
        }
        let (a, bb) = found.ok_or(Error::NonSquare)?;
        let r2 = nus.pop().expect("len >= 2");
        let r1 = nus.pop().expect("len >= 2");
        let comb = |c1: FieldElement, c2: FieldElement| -> Vec<FieldElement> {
            r1.iter()
                .zip(&r2)
                .map(|(&x, &y)| f.add(f.mul(c1, x), f.mul(c2, y)))
                .collect()
        };
        ones.push(comb(a, bb));
        ones.push(comb(f.neg(bb), a));
    }
    let k = nus.len();
    ones.extend(nus);
    let p = Matrix::from_rows(&ones)?;
    Ok((p, k))
}

/// Find c with c * from * c^T = to or nu * to (exactly one scalar class
/// works in odd dimension); both forms symmetric non-degenerate.
fn congruence_transform(f: &FieldParams, from: &Matrix, to: &Matrix) -> Result<Matrix> {
    let nu = least_nonsquare(f);
    let (pa, ka) = canonical_form_basis(f, from)?;
    for target in [to.clone(), to.scale(f, nu)] {
        let (pt, kt) = canonical_form_basis(f, &target)?;
        if ka == kt {
            let c = pt.inv(f)?.mul(f, &pa);
            // verify
            if c.mul(f, from).mul(f, &c.transpose()) == target {
                return Ok(c);
            }
        }
    }
    Err(Error::Invalid("forms are not congruent up to scalar"))
}

/// Recognition data for a 3-dimensional symmetric-square copy of PSL(2, q).
///
/// `cob` conjugates the input group into the image of pi3 in a standardized
/// frame: the stored elements T, U, W satisfy
/// cob^-1 T cob = pi3(torus), cob^-1 U cob = pi3(unipotent),
/// cob^-1 W cob = pi3(weyl) exactly.
pub struct Psl2Context {
    f: FieldParams,
    gens: Vec<Matrix>,
    cob: Matrix,
    cob_inv: Matrix,
    std3: [Matrix; 3],
    std_slps: [Slp; 3],
    std2: [Matrix; 3],
    upper_coords: Vec<Vec<u8>>,
}

impl Psl2Context {
    pub fn field(&self) -> &FieldParams {
        &self.f
    }

    /// The input generators.
    pub fn generators(&self) -> &[Matrix] {
        &self.gens
    }

    /// The total change of basis c3: every g in the group satisfies
    /// c3^-1 g c3 in Im pi3.
    pub fn change_of_basis(&self) -> &Matrix {
        &self.cob
    }

    /// The standard elements [torus, unipotent, weyl] as members of the
    /// input group (3x3 matrices).
    pub fn standard_elements(&self) -> &[Matrix; 3] {
        &self.std3
    }

    /// SLPs of the standard elements over the input generators.
    pub fn standard_slps(&self) -> &[Slp; 3] {
        &self.std_slps
    }

    /// Map a group element to the degree-2 standard copy (defined up to
    /// sign; the returned matrix has determinant 1).
    pub fn rho(&self, g: &Matrix) -> Result<Matrix> {
        pi3_invert(&self.f, &self.cob_inv.mul(&self.f, g).mul(&self.f, &self.cob))
    }

    /// Inverse direction: the group element corresponding to a degree-2
    /// matrix (of determinant 1).
    pub fn unrho(&self, g2: &Matrix) -> Matrix {
        self.cob.mul(&self.f, &pi3(&self.f, g2)).mul(&self.f, &self.cob_inv)
    }

    /// Slot computing an upper unipotent [[1,x],[0,1]] of the degree-2 copy
    /// as a word in the standard torus (slot `t`) and unipotent (slot `u`).
    fn upper_slot(&self, b: &mut SlpBuilder, t: usize, u: usize, x: FieldElement) -> Result<usize> {
        let f = &self.f;
        if x.is_zero() {
            return Ok(b.identity());
        }
        let eps = f3::f3_solve(&self.upper_coords, &f3::f3_coords(f, x))
            .ok_or(Error::Invalid("unipotent parameter not in the F_3 span"))?;
        let mut acc: Option<usize> = None;
        for (j, &e) in eps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let up = b.pwr(u, e as u128);
            let tj = b.pwr(t, j as u128);
            let piece = b.conj(up, tj);
            acc = Some(match acc {
                None => piece,
                Some(a) => b.mul(a, piece),
            });
        }
        Ok(acc.expect("x != 0 has a nonzero coefficient"))
    }

    /// Constructive membership in the degree-2 standard copy: an SLP over
    /// the three standard generators [torus, unipotent, weyl] evaluating to
    /// +-g. Requires det g = 1.
    pub fn membership_std(&self, g: &Matrix) -> Result<Slp> {
        let f = &self.f;
        if g.dim() != 2 {
            return Err(Error::BadShape("membership_std expects a 2x2 matrix"));
        }
        if g.det(f) != f.one() {
            return Err(Error::Invalid("matrix is not in SL(2, q)"));
        }
        let om = f.omega();
        let (a, bb, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
        let mut b = SlpBuilder::new(3);
        let t = b.gen(0);
        let u = b.gen(1);
        let w = b.gen(2);
        let slot = if c.is_zero() {
            // g = diag(a, 1/a) * [[1, b/a], [0, 1]]
            let k = f.discrete_log(om, a)?;
            let tk = b.pwr(t, k as u128);
            let up = self.upper_slot(&mut b, t, u, f.div(bb, a)?)?;
            b.mul(tk, up)
        } else {
            // g = u(a/c) w diag(-c, -1/c) u(d/c)
            let x = f.div(a, c)?;
            let y = f.div(d, c)?;
            let k = f.discrete_log(om, f.neg(c))?;
            let ux = self.upper_slot(&mut b, t, u, x)?;
            let tk = b.pwr(t, k as u128);
            let uy = self.upper_slot(&mut b, t, u, y)?;
            let m1 = b.mul(ux, w);
            let m2 = b.mul(m1, tk);
            b.mul(m2, uy)
        };
        let slp = b.finish(slot);
        // verify up to sign
        let val = slp.evaluate(f, &self.std2)?;
        if val != *g && val != g.neg(f) {
            return Err(Error::Invalid("membership verification failed"));
        }
        Ok(slp)
    }

    /// Express a group element as an SLP over the input generators
    /// (exact equality on evaluation).
    pub fn express(&self, g: &Matrix) -> Result<Slp> {
        let g2 = self.rho(g)?;
        let word = self.membership_std(&g2)?;
        let slp = word.compose(&self.std_slps.to_vec())?;
        let val = slp.evaluate(&self.f, &self.gens)?;
        if val != *g {
            return Err(Error::Invalid("expression does not reproduce the element"));
        }
        Ok(slp)
    }
}

/// Free-function form of constructive membership (interface parity).
pub fn psl2_membership(ctx: &Psl2Context, g: &Matrix) -> Result<Slp> {
    ctx.membership_std(g)
}

/// pi_7: lift an element of the 3-dimensional copy through parallel
/// generator lists (e.g. the 7-dimensional centralizer generators): the SLP
/// expressing g3 over the 3-dimensional generators is evaluated on `gens7`.
pub fn pi7(ctx: &Psl2Context, g3: &Matrix, gens7: &[Matrix]) -> Result<(Matrix, Slp)> {
    let slp = ctx.express(g3)?;
    let m = slp.evaluate(ctx.field(), gens7)?;
    Ok((m, slp))
}

/// Build the (matrix, SLP-over-generators) pair of an upper unipotent of
/// parameter x, from the standard torus/unipotent pair.
fn upper_element(
    ctx: &Psl2Context,
    x: FieldElement,
) -> Result<(Matrix, Slp)> {
    let mut b = SlpBuilder::new(ctx.gens.len());
    let t = b.import(&ctx.std_slps[0])?;
    let u = b.import(&ctx.std_slps[1])?;
    // reuse upper_slot by faking the 3-generator indices: inline instead
    let f = &ctx.f;
    let slot = {
        if x.is_zero() {
            b.identity()
        } else {
            let eps = f3::f3_solve(&ctx.upper_coords, &f3::f3_coords(f, x))
                .ok_or(Error::Invalid("unipotent parameter not in the F_3 span"))?;
            let mut acc: Option<usize> = None;
            for (j, &e) in eps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let up = b.pwr(u, e as u128);
                let tj = b.pwr(t, j as u128);
                let piece = b.conj(up, tj);
                acc = Some(match acc {
                    None => piece,
                    Some(a) => b.mul(a, piece),
                });
            }
            acc.expect("x != 0")
        }
    };
    let slp = b.finish(slot);
    let m = slp.evaluate(f, &ctx.gens)?;
    Ok((m, slp))
}

/// Constructive recognition: given generators of a GL(3, q)-conjugate of
/// the symmetric-square copy of PSL(2, q), build a [`Psl2Context`].
/// Las Vegas; fails with a budget error when the group is not as promised.
pub fn recognize_psl2<R: RngCore>(
    f: &FieldParams,
    gens: &[Matrix],
    rng: &mut R,
) -> Result<Psl2Context> {
    if gens.is_empty() || gens.iter().any(|g| g.dim() != 3) {
        return Err(Error::BadShape("recognize_psl2 expects 3x3 generators"));
    }
    let om = f.omega();
    let std2 = psl2_standard_generators(f);
    // Step 1: invariant form of the input and of the standard image.
    let forms = linalg::invariant_bilinear_forms(f, gens);
    if forms.len() != 1 {
        return Err(Error::Invalid("invariant form space is not 1-dimensional"));
    }
    let form = forms.into_iter().next().expect("len 1");
    if form.det(f).is_zero() {
        return Err(Error::Invalid("invariant form is degenerate"));
    }
    let std_images: Vec<Matrix> = std2.iter().map(|g| pi3(f, g)).collect();
    let g0_forms = linalg::invariant_bilinear_forms(f, &std_images);
    debug_assert_eq!(g0_forms.len(), 1);
    let g0 = g0_forms.into_iter().next().expect("symmetric square form");
    // Step 2: congruence: cob0 * g0 * cob0^T = scalar * form, so that
    // conjugation by cob0 maps the input into the orthogonal group of g0.
    let cob0 = congruence_transform(f, &g0, &form)?;
    let cob0_inv = cob0.inv(f)?;
    for g in gens {
        let z = cob0_inv.mul(f, g).mul(f, &cob0);
        pi3_invert(f, &z).map_err(|_| Error::Invalid("generators do not land in Im pi3"))?;
    }
    let rho0 = |g: &Matrix, cob: &Matrix, cob_inv: &Matrix| -> Result<Matrix> {
        pi3_invert(f, &cob_inv.mul(f, g).mul(f, cob))
    };
    // Step 3: random search for a torus element of order (q-1)/2.
    let mut pr = PrGenerator::new(f, gens, rng)?;
    let exp = psl2_exponent_factors(f);
    let half = ((f.q() - 1) / 2) as u128;
    let mut found: Option<(Matrix, Slp)> = None;
    for _ in 0..600 {
        let (g, slp) = pr.random_element(rng);
        let ord = randgen::element_order(f, &g, &exp)
            .map_err(|_| Error::Invalid("element order does not divide the PSL(2,q) exponent"))?;
        if ord == half {
            found = Some((g, slp));
            break;
        }
    }
    let (t0, t0_slp) = found.ok_or(Error::BudgetExhausted("no torus element found"))?;
    // Power it so its eigenvalues become +-(omega, omega^-1).
    let rt0 = rho0(&t0, &cob0, &cob0_inv)?;
    let roots = linalg::char_poly_roots(f, &rt0);
    let a = roots
        .first()
        .map(|&(r, _)| r)
        .ok_or(Error::Invalid("torus element is not split"))?;
    let e = match f.discrete_log(a, om) {
        Ok(e) => e,
        Err(_) => f.discrete_log(a, f.neg(om))?,
    };
    let t_mat = t0.pow(f, e as u128);
    let t_slp = t0_slp.power(e as u128);
    // Frame: eigenvector rows of rho0(T), eigenvalue mu in {omega, -omega}
    // first.
    let rt = rho0(&t_mat, &cob0, &cob0_inv)?;
    let rt_roots: Vec<FieldElement> = linalg::char_poly_roots(f, &rt).iter().map(|&(r, _)| r).collect();
    let mu = if rt_roots.contains(&om) { om } else { f.neg(om) };
    if !rt_roots.contains(&mu) {
        return Err(Error::Invalid("powered torus element has unexpected eigenvalues"));
    }
    let v1 = linalg::eigenspace(f, &rt, mu)
        .into_iter()
        .next()
        .ok_or(Error::Invalid("missing eigenvector"))?;
    let v2 = linalg::eigenspace(f, &rt, f.inv(mu)?)
        .into_iter()
        .next()
        .ok_or(Error::Invalid("missing eigenvector"))?;
    let frame = Matrix::from_rows(&[v1, v2])?;
    let cob1 = cob0.mul(f, &pi3(f, &frame).inv(f)?);
    let cob1_inv = cob1.inv(f)?;
    // Step 4: build an upper unipotent (relative to the torus frame).
    let mut unip: Option<(Matrix, Slp, FieldElement)> = None;
    for _ in 0..600 {
        let (g1, s1) = pr.random_element(rng);
        let m = rho0(&g1, &cob1, &cob1_inv)?;
        // Either g1 is already in the Borel of e1, or combine two random
        // elements through the torus so the lower-left entry cancels.
        let (e_mat, e_slp, x) = if m.get(1, 0).is_zero() {
            if m.get(0, 1).is_zero() {
                continue; // diagonal
            }
            (g1, s1, m)
        } else {
            let (g2, s2) = pr.random_element(rng);
            let n = rho0(&g2, &cob1, &cob1_inv)?;
            if n.get(1, 0).is_zero() {
                if n.get(0, 1).is_zero() {
                    continue;
                }
                (g2, s2, n)
            } else {
                if n.get(0, 0).is_zero() || m.get(1, 1).is_zero() {
                    continue;
                }
                // want (g1 T^s g2) lower-left zero:
                // y^2 = -(M22 N21) / (M21 N11), y = omega^s
                let val = f.neg(f.div(
                    f.mul(m.get(1, 1), n.get(1, 0)),
                    f.mul(m.get(1, 0), n.get(0, 0)),
                )?);
                if !f.is_nonzero_square(val) {
                    continue;
                }
                let y = f.sqrt(val)?;
                let s = f.discrete_log(om, y)?;
                let e_mat = g1.mul(f, &t_mat.pow(f, s as u128)).mul(f, &g2);
                let e_slp = s1.multiply(&t_slp.power(s as u128))?.multiply(&s2)?;
                let x = rho0(&e_mat, &cob1, &cob1_inv)?;
                if !x.get(1, 0).is_zero() {
                    continue;
                }
                (e_mat, e_slp, x)
            }
        };
        if x.get(0, 1).is_zero() {
            continue;
        }
        // Strip the diagonal part: X * T^-k is unipotent.
        let k = f.discrete_log(om, x.get(0, 0))?;
        let u_mat = e_mat.mul(f, &t_mat.pow(f, k as u128).inv(f)?);
        let u_slp = e_slp.multiply(&t_slp.power(k as u128).invert())?;
        let ru = rho0(&u_mat, &cob1, &cob1_inv)?;
        if !ru.get(1, 0).is_zero() || ru.get(0, 0) != ru.get(1, 1) {
            continue;
        }
        let beta = f.div(ru.get(0, 1), ru.get(0, 0))?;
        if beta.is_zero() {
            continue;
        }
        unip = Some((u_mat, u_slp, beta));
        break;
    }
    let (u_mat, u_slp, beta) = unip.ok_or(Error::BudgetExhausted("no unipotent found"))?;
    // Step 5: scale the frame so the unipotent parameter becomes 1:
    // conjugating by diag(beta, 1) divides the parameter by beta.
    let d = mat2(beta, f.zero(), f.zero(), f.one());
    let cob = cob1.mul(f, &pi3(f, &d));
    let cob_inv = cob.inv(f)?;
    // Exactness checks at the pi3 level.
    if cob_inv.mul(f, &t_mat).mul(f, &cob) != pi3(f, &std2[0])
        || cob_inv.mul(f, &u_mat).mul(f, &cob) != pi3(f, &std2[1])
    {
        return Err(Error::Invalid("standardization failed"));
    }
    // F_3 solve data for unipotent parameters: basis {omega^(-2j)}.
    let om2_inv = f.inv(f.mul(om, om))?;
    let mut upper_coords = Vec::with_capacity(f.degree());
    let mut cur = f.one();
    for _ in 0..f.degree() {
        upper_coords.push(f3::f3_coords(f, cur));
        cur = f.mul(cur, om2_inv);
    }
    if !f3::f3_is_basis(&upper_coords) {
        return Err(Error::Invalid("unipotent parameter basis is degenerate"));
    }
    // Partially built context (Weyl element still missing) for helpers.
    let mut ctx = Psl2Context {
        f: f.clone(),
        gens: gens.to_vec(),
        cob,
        cob_inv,
        std3: [t_mat.clone(), u_mat.clone(), Matrix::identity(f, 3)],
        std_slps: [t_slp.clone(), u_slp.clone(), Slp::identity(gens.len())],
        std2: std2.clone(),
        upper_coords,
    };
    // Step 6: Weyl element from the Bruhat decomposition of any element in
    // general position: g = u(x) w t u(y) with t = diag(-c, -1/c), so
    // w = u(-x) g u(-y) t^-1.
    let w_target = pi3(f, &std2[2]);
    let mut done = false;
    for _ in 0..200 {
        let (g, g_slp) = pr.random_element(rng);
        let m = ctx.rho(&g)?;
        let c = m.get(1, 0);
        if c.is_zero() {
            continue;
        }
        let x = f.div(m.get(0, 0), c)?;
        let y = f.div(m.get(1, 1), c)?;
        let k = f.discrete_log(om, f.neg(c))?;
        let (ux_mat, ux_slp) = upper_element(&ctx, f.neg(x))?;
        let (uy_mat, uy_slp) = upper_element(&ctx, f.neg(y))?;
        let tk_inv = t_mat.pow(f, k as u128).inv(f)?;
        let w_mat = ux_mat.mul(f, &g).mul(f, &uy_mat).mul(f, &tk_inv);
        if ctx.cob_inv.mul(f, &w_mat).mul(f, &ctx.cob) != w_target {
            continue;
        }
        let w_slp = ux_slp
            .multiply(&g_slp)?
            .multiply(&uy_slp)?
            .multiply(&t_slp.power(k as u128).invert())?;
        ctx.std3[2] = w_mat;
        ctx.std_slps[2] = w_slp;
        done = true;
        break;
    }
    if !done {
        return Err(Error::BudgetExhausted("no Weyl element found"));
    }
    // SLP/matrix consistency of the standard elements.
    for (m, s) in ctx.std3.iter().zip(ctx.std_slps.iter()) {
        if s.evaluate(f, &ctx.gens)? != *m {
            return Err(Error::Invalid("standard element SLP mismatch"));
        }
    }
    Ok(ctx)
}
