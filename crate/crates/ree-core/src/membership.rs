//! Constructive membership testing in the standard copy of Ree(q):
//! standard generators for the unipotent radicals of the two point
//! stabilizers G_Pinf and G_P0, the row-reduction maps they afford, and the
//! main element-to-SLP algorithm.
//!
//! The preprocessing step uses the point-stabilizer machinery to obtain
//! random elements of G_Pinf and G_P0, and from a commutator of order 9 and
//! a diagonalizable element h(lambda)-conjugation produces three families
//! of unipotent generators whose a-, b- and c-coordinates form F_3-bases of
//! F_q. Writing an arbitrary S(a, b, c) over these generators is then three
//! F_3-linear solves, and the membership algorithm reduces a general group
//! element to a diagonal torus element by moving ovoid points.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::f3;
use crate::field::{FieldElement, FieldParams};
use crate::linalg::{self, Matrix};
use crate::slp::{Slp, SlpBuilder};
use crate::stabilizer::{self, GroupContext};
use crate::standard::{self, OvoidPoint, UElement};

/// One family of standard generators: parallel lists of matrices, ambient
/// SLPs, exact S(a, b, c)-coordinates (in the working frame), and the F_3
/// coordinate rows of the defining field elements.
struct Family {
    mats: Vec<Matrix>,
    slps: Vec<Slp>,
    coords: Vec<UElement>,
    basis: Vec<Vec<u8>>,
}

/// One side (G_Pinf or G_P0): the a-, b- and c-coordinate families,
/// flattened in the order A, B, C. For the G_P0 side, coordinates refer to
/// the Upsilon-conjugates of the stored matrices, which lie in U(q).
struct Side {
    a: Family,
    b: Family,
    c: Family,
}

impl Side {
    fn ngens(&self) -> usize {
        self.a.mats.len() + self.b.mats.len() + self.c.mats.len()
    }

    fn flat_mats(&self) -> Vec<Matrix> {
        let mut v = self.a.mats.clone();
        v.extend(self.b.mats.iter().cloned());
        v.extend(self.c.mats.iter().cloned());
        v
    }

    fn flat_slps(&self) -> Vec<Slp> {
        let mut v = self.a.slps.clone();
        v.extend(self.b.slps.iter().cloned());
        v.extend(self.c.slps.iter().cloned());
        v
    }

    /// Express the element with the given frame coordinates as a product of
    /// family members: three F_3-linear solves (a-part, then b-part, then
    /// the central c-part). Returns the actual matrix product and the SLP
    /// over the flattened generator list of this side.
    fn express(&self, f: &FieldParams, target: UElement) -> Result<(Matrix, Slp)> {
        let mut builder = SlpBuilder::new(self.ngens());
        let mut acc_mat = Matrix::identity(f, 7);
        let mut acc_coord = UElement { a: f.zero(), b: f.zero(), c: f.zero() };
        let mut acc_slot = builder.identity();
        let push = |fam: &Family,
                        offset: usize,
                        eps: &[u8],
                        acc_mat: &mut Matrix,
                        acc_coord: &mut UElement,
                        acc_slot: &mut usize,
                        builder: &mut SlpBuilder| {
            for (i, &e) in eps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let g = builder.gen(offset + i);
                let p = builder.pwr(g, e as u128);
                *acc_slot = builder.mul(*acc_slot, p);
                for _ in 0..e {
                    *acc_mat = acc_mat.mul(f, &fam.mats[i]);
                    *acc_coord = standard::u_mul(f, *acc_coord, fam.coords[i]);
                }
            }
        };
        let eps_a = f3::f3_solve(&self.a.basis, &f3::f3_coords(f, target.a))
            .ok_or(Error::Invalid("a-coordinate not expressible"))?;
        push(&self.a, 0, &eps_a, &mut acc_mat, &mut acc_coord, &mut acc_slot, &mut builder);
        let rem = standard::u_mul(f, standard::u_inv(f, acc_coord), target);
        if !rem.a.is_zero() {
            return Err(Error::Invalid("a-reduction failed"));
        }
        let eps_b = f3::f3_solve(&self.b.basis, &f3::f3_coords(f, rem.b))
            .ok_or(Error::Invalid("b-coordinate not expressible"))?;
        push(&self.b, self.a.mats.len(), &eps_b, &mut acc_mat, &mut acc_coord, &mut acc_slot, &mut builder);
        let rem = standard::u_mul(f, standard::u_inv(f, acc_coord), target);
        if !rem.a.is_zero() || !rem.b.is_zero() {
            return Err(Error::Invalid("b-reduction failed"));
        }
        let eps_c = f3::f3_solve(&self.c.basis, &f3::f3_coords(f, rem.c))
            .ok_or(Error::Invalid("c-coordinate not expressible"))?;
        push(
            &self.c,
            self.a.mats.len() + self.b.mats.len(),
            &eps_c,
            &mut acc_mat,
            &mut acc_coord,
            &mut acc_slot,
            &mut builder,
        );
        if acc_coord != target {
            return Err(Error::Invalid("coordinate reduction mismatch"));
        }
        Ok((acc_mat, builder.finish(acc_slot)))
    }
}

/// Standard generators for O_3(G_Pinf) and O_3(G_P0) with all cached solve
/// data, plus the Upsilon frame change for the G_P0 side.
pub struct StandardGenSets {
    f: FieldParams,
    ngens_x: usize,
    u_side: Side,
    l_side: Side,
    ups: Matrix,
}

fn subfield_order_check(f: &FieldParams, lambda: FieldElement) -> bool {
    !lambda.is_zero() && !f.in_proper_subfield(lambda)
}

/// Greedily select elements whose selected coordinate entries form an
/// F_3-basis; returns indices, or None if the candidates do not span.
fn select_basis(cands: &[Vec<u8>], n: usize) -> Option<Vec<usize>> {
    let mut chosen: Vec<Vec<u8>> = Vec::new();
    let mut idx = Vec::new();
    for (i, c) in cands.iter().enumerate() {
        if chosen.len() == n {
            break;
        }
        if c.iter().all(|&d| d == 0) {
            continue;
        }
        if f3::f3_solve(&chosen, c).is_none() {
            chosen.push(c.clone());
            idx.push(i);
        }
    }
    (chosen.len() == n).then_some(idx)
}

/// Build the three families for one stabilizer side. `frame` is the
/// identity for G_Pinf and Upsilon for G_P0 (coordinates are read off the
/// frame-conjugated matrices).
fn build_side<R: RngCore>(
    ctx: &mut GroupContext,
    point: &OvoidPoint,
    frame: &Matrix,
    rng: &mut R,
) -> Result<Option<Side>> {
    let f = ctx.field().clone();
    let n = f.degree();
    let coords_of = |m: &Matrix| -> Result<UElement> {
        standard::u_from_matrix(&f, &frame.mul(&f, m).mul(&f, frame))
    };
    let (g1, s1) = stabilizer::random_stabilizer_element(ctx, point, rng)?;
    let (g2, s2) = stabilizer::random_stabilizer_element(ctx, point, rng)?;
    let c1 = g1.commutator(&f, &g2)?;
    let c1_slp = s1.invert().multiply(&s2.invert())?.multiply(&s1)?.multiply(&s2)?;
    // |c1| = 9 iff its a-coordinate is nonzero
    let c1_coord = match coords_of(&c1) {
        Ok(c) => c,
        Err(_) => return Ok(None),
    };
    if c1_coord.a.is_zero() {
        return Ok(None);
    }
    // d: a stabilizer element diagonalizing to h(lambda), lambda in no
    // proper subfield (read off the triangularized diagonal)
    let mut d_pick = None;
    for (g, s) in [(&g1, &s1), (&g2, &s2)] {
        let m = frame.mul(&f, g).mul(&f, frame);
        if let Ok((_, lambda)) = standard::decompose_uh(&f, &m) {
            if subfield_order_check(&f, lambda) {
                d_pick = Some((g.clone(), s.clone(), lambda));
                break;
            }
        }
    }
    let Some((d, d_slp, lambda)) = d_pick else { return Ok(None) };
    // conjugates c1^(d^i) and (c1^3)^(d^i) for i = 1..n
    let mut a_mats = Vec::new();
    let mut a_slps = Vec::new();
    let mut a_coords = Vec::new();
    let mut c_mats = Vec::new();
    let mut c_slps = Vec::new();
    let mut c_coords = Vec::new();
    let c1_cube = c1.pow(&f, 3);
    let c1_cube_slp = c1_slp.power(3);
    for i in 1..=n as u128 {
        let di = d.pow(&f, i);
        let di_inv = di.inv(&f)?;
        let di_slp = d_slp.power(i);
        let conj = di_inv.mul(&f, &c1).mul(&f, &di);
        let conj_slp = di_slp.invert().multiply(&c1_slp)?.multiply(&di_slp)?;
        let Ok(cc) = coords_of(&conj) else { return Ok(None) };
        a_mats.push(conj);
        a_slps.push(conj_slp);
        a_coords.push(cc);
        let conj3 = di_inv.mul(&f, &c1_cube).mul(&f, &di);
        let conj3_slp = di_slp.invert().multiply(&c1_cube_slp)?.multiply(&di_slp)?;
        let Ok(cc3) = coords_of(&conj3) else { return Ok(None) };
        // cubes of order-9 elements are central: S(0, 0, c)
        if !cc3.a.is_zero() || !cc3.b.is_zero() {
            return Ok(None);
        }
        c_mats.push(conj3);
        c_slps.push(conj3_slp);
        c_coords.push(cc3);
    }
    let _ = lambda;
    let a_basis: Vec<Vec<u8>> = a_coords.iter().map(|c| f3::f3_coords(&f, c.a)).collect();
    let c_basis: Vec<Vec<u8>> = c_coords.iter().map(|c| f3::f3_coords(&f, c.c)).collect();
    if !f3::f3_is_basis(&a_basis) || !f3::f3_is_basis(&c_basis) {
        return Ok(None);
    }
    // commutators [c1^(d^i), c1^(d^j)] supply the b-coordinate family
    let mut b_cand_mats = Vec::new();
    let mut b_cand_slps = Vec::new();
    let mut b_cand_coords = Vec::new();
    'outer: for i in 0..n {
        for j in (i + 1)..n {
            let m = a_mats[i].commutator(&f, &a_mats[j])?;
            let s = a_slps[i]
                .invert()
                .multiply(&a_slps[j].invert())?
                .multiply(&a_slps[i])?
                .multiply(&a_slps[j])?;
            let Ok(cc) = coords_of(&m) else { return Ok(None) };
            if !cc.a.is_zero() {
                return Ok(None);
            }
            b_cand_mats.push(m);
            b_cand_slps.push(s);
            b_cand_coords.push(cc);
            if b_cand_mats.len() >= n * 3 {
                break 'outer;
            }
        }
    }
    let b_cand_basis: Vec<Vec<u8>> =
        b_cand_coords.iter().map(|c| f3::f3_coords(&f, c.b)).collect();
    let Some(pick) = select_basis(&b_cand_basis, n) else { return Ok(None) };
    let b_mats: Vec<Matrix> = pick.iter().map(|&i| b_cand_mats[i].clone()).collect();
    let b_slps: Vec<Slp> = pick.iter().map(|&i| b_cand_slps[i].clone()).collect();
    let b_coords: Vec<UElement> = pick.iter().map(|&i| b_cand_coords[i]).collect();
    let b_basis: Vec<Vec<u8>> = pick.iter().map(|&i| b_cand_basis[i].clone()).collect();
    Ok(Some(Side {
        a: Family { mats: a_mats, slps: a_slps, coords: a_coords, basis: a_basis },
        b: Family { mats: b_mats, slps: b_slps, coords: b_coords, basis: b_basis },
        c: Family { mats: c_mats, slps: c_slps, coords: c_coords, basis: c_basis },
    }))
}

/// Preprocessing: standard generators for both stabilizer sides, as SLPs
/// over the ambient generators. Las Vegas.
pub fn preprocess<R: RngCore>(ctx: &mut GroupContext, rng: &mut R) -> Result<StandardGenSets> {
    let f = ctx.field().clone();
    let ups = standard::upsilon(&f);
    let id = Matrix::identity(&f, 7);
    let pinf = standard::ovoid_infinity(&f);
    let p0 = standard::ovoid_point(&f, f.zero(), f.zero(), f.zero());
    let ngens_x = ctx.generators().len();
    let mut u_side = None;
    let mut l_side = None;
    for _ in 0..20 {
        if u_side.is_none() {
            u_side = build_side(ctx, &pinf, &id, rng)?;
        }
        if l_side.is_none() {
            l_side = build_side(ctx, &p0, &ups, rng)?;
        }
        if u_side.is_some() && l_side.is_some() {
            break;
        }
    }
    match (u_side, l_side) {
        (Some(u_side), Some(l_side)) => Ok(StandardGenSets { f, ngens_x, u_side, l_side, ups }),
        _ => Err(Error::BudgetExhausted("standard generator preprocessing failed")),
    }
}

impl StandardGenSets {
    pub fn field(&self) -> &FieldParams {
        &self.f
    }

    /// The flattened U-side generators (fixing Pinf) and their ambient SLPs.
    pub fn u_generators(&self) -> (Vec<Matrix>, Vec<Slp>) {
        (self.u_side.flat_mats(), self.u_side.flat_slps())
    }

    /// The flattened L-side generators (fixing P0) and their ambient SLPs.
    pub fn l_generators(&self) -> (Vec<Matrix>, Vec<Slp>) {
        (self.l_side.flat_mats(), self.l_side.flat_slps())
    }

    /// S(a, b, c) as a product of U-side standard generators; the SLP is
    /// over the flattened U-side list and has length O(log q).
    pub fn express_u_element(
        &self,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
    ) -> Result<(Matrix, Slp)> {
        let target = UElement { a, b, c };
        let (m, slp) = self.u_side.express(&self.f, target)?;
        debug_assert_eq!(m, standard::s_matrix(&self.f, target));
        Ok((m, slp))
    }

    /// The element of O_3(G_P0) whose Upsilon-frame coordinates are the
    /// given S(a, b, c); SLP over the flattened L-side list.
    pub fn express_l_element(&self, target: UElement) -> Result<(Matrix, Slp)> {
        let (m, slp) = self.l_side.express(&self.f, target)?;
        debug_assert_eq!(
            self.ups.mul(&self.f, &m).mul(&self.f, &self.ups),
            standard::s_matrix(&self.f, target)
        );
        Ok((m, slp))
    }

    /// Lift an SLP over the U-side generators to the ambient generators.
    pub fn u_to_x(&self, slp: &Slp) -> Result<Slp> {
        slp.compose(&self.u_side.flat_slps())
    }

    /// Lift an SLP over the L-side generators to the ambient generators.
    pub fn l_to_x(&self, slp: &Slp) -> Result<Slp> {
        slp.compose(&self.l_side.flat_slps())
    }

    /// Given g = h(lambda) S(a, b, c) in G_Pinf, produce x in O_3(G_Pinf)
    /// with x g = h(lambda).
    pub fn row_reduce_left(&self, g: &Matrix) -> Result<(Matrix, Slp, FieldElement)> {
        let f = &self.f;
        let (s, lambda) = standard::decompose_uh(f, g)?;
        let (m, slp) = self.express_u_element(
            standard::u_inv(f, s).a,
            standard::u_inv(f, s).b,
            standard::u_inv(f, s).c,
        )?;
        if m.mul(f, g) != standard::h(f, lambda)? {
            return Err(Error::NotInGroup("not of the G_Pinf shape"));
        }
        Ok((m, slp, lambda))
    }

    /// Given g = S(a, b, c) h(lambda) in G_Pinf, produce x in O_3(G_Pinf)
    /// with g x = h(lambda).
    pub fn row_reduce_right(&self, g: &Matrix) -> Result<(Matrix, Slp, FieldElement)> {
        let f = &self.f;
        let (s, lambda) = standard::decompose_uh(f, g)?;
        let target = standard::u_h_conj(f, standard::u_inv(f, s), lambda)?;
        let (m, slp) = self.express_u_element(target.a, target.b, target.c)?;
        if g.mul(f, &m) != standard::h(f, lambda)? {
            return Err(Error::NotInGroup("not of the G_Pinf shape"));
        }
        Ok((m, slp, lambda))
    }

    /// Given y in G_P0, produce z in O_3(G_P0) with y z = h(lambda).
    pub fn l_reduce_right(&self, y: &Matrix) -> Result<(Matrix, Slp, FieldElement)> {
        let f = &self.f;
        let m_tilde = self.ups.mul(f, y).mul(f, &self.ups);
        let (s, mu) = standard::decompose_uh(f, &m_tilde)?;
        let target = standard::u_h_conj(f, standard::u_inv(f, s), mu)?;
        let (zm, slp) = self.express_l_element(target)?;
        let lambda = f.inv(mu)?;
        if y.mul(f, &zm) != standard::h(f, lambda)? {
            return Err(Error::NotInGroup("not of the G_P0 shape"));
        }
        Ok((zm, slp, lambda))
    }

    /// g in O_3(G_Pinf) with P g = P0, for P != Pinf.
    pub fn map_point_to_p0(&self, p: &OvoidPoint) -> Result<(Matrix, Slp)> {
        let f = &self.f;
        let (a, b, c) = p.abc().ok_or(Error::Invalid("the point at infinity is not movable by U"))?;
        let inv = standard::u_inv(f, UElement { a, b, c });
        let (m, slp) = self.express_u_element(inv.a, inv.b, inv.c)?;
        debug_assert_eq!(
            standard::ovoid_action(f, p, &m)?,
            standard::ovoid_point(f, f.zero(), f.zero(), f.zero())
        );
        Ok((m, slp))
    }

    /// g in O_3(G_P0) with P g = Pinf, for P != P0.
    pub fn map_point_to_pinf(&self, p: &OvoidPoint) -> Result<(Matrix, Slp)> {
        let f = &self.f;
        let moved = linalg::apply(f, p.coords(), &self.ups);
        let tilde = standard::ovoid_membership(f, &moved)?;
        let (a, b, c) = tilde.abc().ok_or(Error::Invalid("point is P0"))?;
        let target = standard::u_inv(f, UElement { a, b, c });
        let (m, slp) = self.express_l_element(target)?;
        debug_assert_eq!(
            standard::ovoid_action(f, p, &m)?,
            standard::ovoid_infinity(f)
        );
        Ok((m, slp))
    }

    /// Number of ambient generators the lifted SLPs refer to.
    pub fn ambient_ngens(&self) -> usize {
        self.ngens_x
    }
}

/// Ovoid points spanned by one-dimensional eigenspaces of g (deterministic
/// order: by eigenvalue encoding).
fn line_fixed_points(f: &FieldParams, g: &Matrix) -> Vec<OvoidPoint> {
    let mut roots = linalg::char_poly_roots(f, g);
    roots.sort_by_key(|&(r, _)| f.to_int(r));
    let mut out: Vec<OvoidPoint> = Vec::new();
    for (root, _) in roots {
        let es = linalg::eigenspace(f, g, root);
        if es.len() != 1 {
            continue;
        }
        if let Ok(p) = standard::ovoid_membership(f, &es[0]) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Single-element membership pre-check: the three pointwise conditions of
/// standard-copy recognition (orthogonal group, octonion algebra, outer
/// automorphism).
pub fn in_standard_ree(ree: &standard::ReeContext, g: &Matrix) -> bool {
    let f = ree.field();
    if g.dim() != 7
        || g.det(f) != f.one()
        || g.mul(f, ree.form()).mul(f, &g.transpose()) != *ree.form()
        || linalg::spinor_norm(f, g, ree.form()) != Ok(0)
    {
        return false;
    }
    if !ree.preserves_octonion(g) {
        return false;
    }
    matches!(ree.outer_automorphism(g), Ok(image) if image == *g)
}

/// Express g in <X> = Ree(q) as an SLP over X. Errors with `NotInGroup`
/// when g fails the membership pre-check; Las Vegas on the internal
/// randomness.
pub fn element_to_slp<R: RngCore>(
    ctx: &mut GroupContext,
    sgs: &StandardGenSets,
    ree: &standard::ReeContext,
    g: &Matrix,
    rng: &mut R,
) -> Result<Slp> {
    let f = ctx.field().clone();
    if !in_standard_ree(ree, g) {
        return Err(Error::NotInGroup("element fails the Ree(q) membership test"));
    }
    let pinf = standard::ovoid_infinity(&f);
    let one = f.one();
    for _ in 0..400 {
        // find r with an ovoid eigen-point Q != Pinf for gr
        let (r, r_slp) = ctx.random_element(rng);
        let gr = g.mul(&f, &r);
        let Some(q_point) = line_fixed_points(&f, &gr)
            .into_iter()
            .find(|p| *p != pinf)
        else {
            continue;
        };
        // move Q to P0; then (gr)^(z1) fixes P0 and row-reduces to h(lambda)
        let (z1m, z1s) = sgs.map_point_to_p0(&q_point)?;
        let z1m_inv = z1m.inv(&f)?;
        let conj = z1m_inv.mul(&f, &gr).mul(&f, &z1m);
        let Ok((_z2m, z2s, lambda)) = sgs.l_reduce_right(&conj) else {
            continue;
        };
        // the trace test: x - 1 must be a nonzero square; lambda = +-1
        // (h(lambda) self-inverse) also counts as a retry
        let x = standard::h(&f, lambda)?.trace(&f);
        let xm1 = f.sub(x, one);
        if !f.is_nonzero_square(xm1) || lambda == one || lambda == f.neg(one) {
            continue;
        }
        // u = S(0, 0, sqrt((x-1)^(3t))) S(0, 1, 0)^Upsilon has trace x and
        // is conjugate to h(lambda)^(+-1)
        let c_param = f.sqrt(f.twist3(xm1))?;
        let (u1m, u1s) = sgs.express_u_element(f.zero(), f.zero(), c_param)?;
        let (u2m, u2s) =
            sgs.express_l_element(UElement { a: f.zero(), b: one, c: f.zero() })?;
        let um = u1m.mul(&f, &u2m);
        let u_slp_x = sgs.u_to_x(&u1s)?.multiply(&sgs.l_to_x(&u2s)?)?;
        if um.trace(&f) != x {
            return Err(Error::Invalid("trace identity failed"));
        }
        // fixed points of u: exactly two (u is a regular torus conjugate)
        let fixed = line_fixed_points(&f, &um);
        if fixed.len() != 2 {
            continue;
        }
        let (p1, p2) = if fixed[0].is_infinity() {
            (fixed[1].clone(), fixed[0].clone())
        } else {
            (fixed[0].clone(), fixed[1].clone())
        };
        let Ok((am, as_)) = sgs.map_point_to_p0(&p1) else { continue };
        let p2a = standard::ovoid_action(&f, &p2, &am)?;
        let Ok((bm, bs)) = sgs.map_point_to_pinf(&p2a) else { continue };
        let ab = am.mul(&f, &bm);
        let u_ab = ab.inv(&f)?.mul(&f, &um).mul(&f, &ab);
        let h_lambda = standard::h(&f, lambda)?;
        let ab_slp = sgs.u_to_x(&as_)?.multiply(&sgs.l_to_x(&bs)?)?;
        let u_ab_slp = ab_slp.invert().multiply(&u_slp_x)?.multiply(&ab_slp)?;
        let core_slp = if u_ab == h_lambda {
            u_ab_slp
        } else if u_ab == h_lambda.inv(&f)? {
            u_ab_slp.invert()
        } else {
            continue;
        };
        // g = ((u^(ab))^(+-1) z2^-1)^(z1^-1) r^-1
        let z1x = sgs.u_to_x(&z1s)?;
        let z2x = sgs.l_to_x(&z2s)?;
        let inner = core_slp.multiply(&z2x.invert())?;
        let w = z1x
            .multiply(&inner)?
            .multiply(&z1x.invert())?
            .multiply(&r_slp.invert())?;
        if w.evaluate(&f, ctx.generators())? != *g {
            return Err(Error::Invalid("SLP verification failed"));
        }
        return Ok(w);
    }
    Err(Error::BudgetExhausted("element_to_slp budget exhausted"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn setup(m: u32, seed: u64) -> (FieldParams, GroupContext, StandardGenSets, rand_chacha::ChaCha8Rng) {
        let f = FieldParams::new(m).unwrap();
        let gens = standard::standard_generators(&f);
        let mut r = rng(seed);
        let mut ctx = GroupContext::new(&f, &gens, &mut r).unwrap();
        let sgs = preprocess(&mut ctx, &mut r).unwrap();
        (f, ctx, sgs, r)
    }

    fn rand_fe(f: &FieldParams, r: &mut rand_chacha::ChaCha8Rng) -> FieldElement {
        f.from_int(r.next_u64() % f.q())
    }

    #[test]
    fn preprocess_builds_valid_standard_generators() {
        let (f, ctx, sgs, _) = setup(1, 211);
        let pinf = standard::ovoid_infinity(&f);
        let p0 = standard::ovoid_point(&f, f.zero(), f.zero(), f.zero());
        let (u_mats, u_slps) = sgs.u_generators();
        for (m, s) in u_mats.iter().zip(&u_slps) {
            assert_eq!(standard::ovoid_action(&f, &pinf, m).unwrap(), pinf);
            assert_eq!(s.evaluate(&f, ctx.generators()).unwrap(), *m);
        }
        let (l_mats, l_slps) = sgs.l_generators();
        for (m, s) in l_mats.iter().zip(&l_slps) {
            assert_eq!(standard::ovoid_action(&f, &p0, m).unwrap(), p0);
            assert_eq!(s.evaluate(&f, ctx.generators()).unwrap(), *m);
        }
    }

    #[test]
    fn h_conjugation_shifts_match_the_matrix_identity() {
        // a-coordinate of S^h(lambda) is lambda^(3t-2) times that of S
        let f = FieldParams::new(1).unwrap();
        let mut r = rng(9);
        for _ in 0..20 {
            let s = UElement {
                a: rand_fe(&f, &mut r),
                b: rand_fe(&f, &mut r),
                c: rand_fe(&f, &mut r),
            };
            let lambda = loop {
                let l = rand_fe(&f, &mut r);
                if !l.is_zero() {
                    break l;
                }
            };
            let sm = standard::s_matrix(&f, s);
            let hm = standard::h(&f, lambda).unwrap();
            let conj = hm.inv(&f).unwrap().mul(&f, &sm).mul(&f, &hm);
            let got = standard::u_from_matrix(&f, &conj).unwrap();
            let shift = f.mul(
                f.twist3(lambda),
                f.inv(f.mul(lambda, lambda)).unwrap(),
            );
            assert_eq!(got.a, f.mul(shift, s.a));
            assert_eq!(got, standard::u_h_conj(&f, s, lambda).unwrap());
        }
    }

    #[test]
    fn express_u_element_round_trips() {
        let (f, _ctx, sgs, mut r) = setup(1, 223);
        // identity
        let (m, slp) = sgs.express_u_element(f.zero(), f.zero(), f.zero()).unwrap();
        assert!(m.is_identity(&f));
        let (u_mats, _) = sgs.u_generators();
        assert!(slp.evaluate(&f, &u_mats).unwrap().is_identity(&f));
        // random triples
        for _ in 0..100 {
            let (a, b, c) = (rand_fe(&f, &mut r), rand_fe(&f, &mut r), rand_fe(&f, &mut r));
            let (m, slp) = sgs.express_u_element(a, b, c).unwrap();
            assert_eq!(m, standard::s_matrix(&f, UElement { a, b, c }));
            assert_eq!(slp.evaluate(&f, &u_mats).unwrap(), m);
            // O(log q) length
            assert!(slp.len() <= 20 * f.degree() + 10);
        }
    }

    #[test]
    fn row_reductions_round_trip() {
        let (f, _ctx, sgs, mut r) = setup(1, 227);
        // g = h(omega): x = identity
        let hom = standard::h(&f, f.omega()).unwrap();
        let (x, _, lambda) = sgs.row_reduce_right(&hom).unwrap();
        assert!(x.is_identity(&f));
        assert_eq!(lambda, f.omega());
        // g = S(1,0,0): lambda = 1
        let s100 = standard::s_matrix(
            &f,
            UElement { a: f.one(), b: f.zero(), c: f.zero() },
        );
        let (_, _, lambda) = sgs.row_reduce_right(&s100).unwrap();
        assert_eq!(lambda, f.one());
        for _ in 0..100 {
            let s = UElement {
                a: rand_fe(&f, &mut r),
                b: rand_fe(&f, &mut r),
                c: rand_fe(&f, &mut r),
            };
            let lam = loop {
                let l = rand_fe(&f, &mut r);
                if !l.is_zero() {
                    break l;
                }
            };
            let g = standard::s_matrix(&f, s).mul(&f, &standard::h(&f, lam).unwrap());
            let (x, _, lambda) = sgs.row_reduce_right(&g).unwrap();
            assert_eq!(lambda, lam);
            assert_eq!(g.mul(&f, &x), standard::h(&f, lam).unwrap());
            let (x2, _, lambda2) = sgs.row_reduce_left(&g).unwrap();
            assert_eq!(lambda2, lam);
            assert_eq!(x2.mul(&f, &g), standard::h(&f, lam).unwrap());
        }
    }

    #[test]
    fn point_maps_round_trip() {
        let (f, _ctx, sgs, mut r) = setup(1, 229);
        let p0 = standard::ovoid_point(&f, f.zero(), f.zero(), f.zero());
        let (m, _) = sgs.map_point_to_p0(&p0).unwrap();
        assert!(m.is_identity(&f));
        for _ in 0..50 {
            let p = standard::ovoid_point(
                &f,
                rand_fe(&f, &mut r),
                rand_fe(&f, &mut r),
                rand_fe(&f, &mut r),
            );
            let (m, _) = sgs.map_point_to_p0(&p).unwrap();
            assert_eq!(standard::ovoid_action(&f, &p, &m).unwrap(), p0);
            if p != p0 {
                let (m2, _) = sgs.map_point_to_pinf(&p).unwrap();
                assert_eq!(
                    standard::ovoid_action(&f, &p, &m2).unwrap(),
                    standard::ovoid_infinity(&f)
                );
            }
        }
    }

    #[test]
    fn element_to_slp_round_trips() {
        let (f, mut ctx, sgs, mut r) = setup(1, 233);
        let ree = standard::ReeContext::new(1).unwrap();
        // identity
        let id = Matrix::identity(&f, 7);
        let w = element_to_slp(&mut ctx, &sgs, &ree, &id, &mut r).unwrap();
        assert!(w.evaluate(&f, ctx.generators()).unwrap().is_identity(&f));
        for _ in 0..20 {
            let (g, _) = ctx.random_element(&mut r);
            let w = element_to_slp(&mut ctx, &sgs, &ree, &g, &mut r).unwrap();
            assert_eq!(w.evaluate(&f, ctx.generators()).unwrap(), g);
        }
        // non-member rejection
        let mut bad = Matrix::identity(&f, 7);
        bad.set(0, 0, f.omega());
        assert!(matches!(
            element_to_slp(&mut ctx, &sgs, &ree, &bad, &mut r),
            Err(Error::NotInGroup(_))
        ));
    }

    #[test]
    fn membership_at_q243_smoke() {
        let (f, mut ctx, sgs, mut r) = setup(2, 239);
        let ree = standard::ReeContext::new(2).unwrap();
        for _ in 0..3 {
            let (g, _) = ctx.random_element(&mut r);
            let w = element_to_slp(&mut ctx, &sgs, &ree, &g, &mut r).unwrap();
            assert_eq!(w.evaluate(&f, ctx.generators()).unwrap(), g);
        }
    }
}
