//! Random group elements with straight-line program tracking: product
//! replacement, normal-closure product replacement for derived-subgroup
//! elements, and exact element orders against a factored exponent.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::linalg::Matrix;
use crate::slp::{Slp, SlpBuilder};

/// Number of product-replacement slots.
pub const PR_SLOTS: usize = 10;
/// Initial mixing steps before the first element is delivered.
pub const PR_MIXING: usize = 50;

/// Product-replacement random element generator over a fixed generating set,
/// with one shared SLP instruction arena so that slot programs stay short
/// (one instruction per replacement step).
pub struct PrGenerator {
    f: FieldParams,
    gens: Vec<Matrix>,
    slots: Vec<Matrix>,
    slot_slps: Vec<usize>,
    builder: SlpBuilder,
    steps: u64,
}

impl PrGenerator {
    pub fn new<R: RngCore>(f: &FieldParams, gens: &[Matrix], rng: &mut R) -> Result<PrGenerator> {
        if gens.is_empty() {
            return Err(Error::Invalid("empty generating set"));
        }
        let mut builder = SlpBuilder::new(gens.len());
        let mut slots = Vec::with_capacity(PR_SLOTS);
        let mut slot_slps = Vec::with_capacity(PR_SLOTS);
        for i in 0..PR_SLOTS {
            let k = i % gens.len();
            slots.push(gens[k].clone());
            slot_slps.push(builder.gen(k));
        }
        let mut pr = PrGenerator {
            f: f.clone(),
            gens: gens.to_vec(),
            slots,
            slot_slps,
            builder,
            steps: 0,
        };
        for _ in 0..PR_MIXING {
            pr.step(rng);
        }
        Ok(pr)
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.gens
    }

    fn step<R: RngCore>(&mut self, rng: &mut R) -> usize {
        let n = self.slots.len();
        let i = (rng.next_u32() as usize) % n;
        let mut j = (rng.next_u32() as usize) % n;
        while j == i {
            j = (rng.next_u32() as usize) % n;
        }
        // slot_i := slot_i * slot_j or slot_j * slot_i (coin flip)
        if rng.next_u32() & 1 == 0 {
            self.slots[i] = self.slots[i].mul(&self.f, &self.slots[j]);
            self.slot_slps[i] = self.builder.mul(self.slot_slps[i], self.slot_slps[j]);
        } else {
            self.slots[i] = self.slots[j].mul(&self.f, &self.slots[i]);
            self.slot_slps[i] = self.builder.mul(self.slot_slps[j], self.slot_slps[i]);
        }
        self.steps += 1;
        i
    }

    /// Produce a (pseudo-)random element together with an SLP over the
    /// original generators.
    pub fn random_element<R: RngCore>(&mut self, rng: &mut R) -> (Matrix, Slp) {
        let i = self.step(rng);
        (self.slots[i].clone(), self.builder.finish(self.slot_slps[i]))
    }
}

/// Random elements of the derived subgroup of <gens>: normal-closure product
/// replacement seeded with generator commutators, with conjugation steps
/// mixing in the ambient generators.
pub struct DerivedPrGenerator {
    outer: PrGenerator,
    slots: Vec<Matrix>,
    slot_slps: Vec<usize>,
}

impl DerivedPrGenerator {
    pub fn new<R: RngCore>(f: &FieldParams, gens: &[Matrix], rng: &mut R) -> Result<DerivedPrGenerator> {
        let mut outer = PrGenerator::new(f, gens, rng)?;
        // seed with commutators [g_i, g_j] of distinct generator pairs
        // (and of random elements, so a single-generator input still works)
        let mut slots = Vec::new();
        let mut slot_slps = Vec::new();
        let f = outer.f.clone();
        for i in 0..gens.len() {
            for j in 0..gens.len() {
                if i == j {
                    continue;
                }
                let gi = outer.builder.gen(i);
                let gj = outer.builder.gen(j);
                slots.push(gens[i].commutator(&f, &gens[j])?);
                slot_slps.push(outer.builder.comm(gi, gj));
            }
        }
        while slots.len() < PR_SLOTS {
            let i = outer.step(rng);
            let j = outer.step(rng);
            let c = outer.slots[i].commutator(&f, &outer.slots[j])?;
            let (si, sj) = (outer.slot_slps[i], outer.slot_slps[j]);
            slots.push(c);
            slot_slps.push(outer.builder.comm(si, sj));
        }
        let mut pr = DerivedPrGenerator { outer, slots, slot_slps };
        for _ in 0..PR_MIXING {
            pr.step(rng);
        }
        Ok(pr)
    }

    fn step<R: RngCore>(&mut self, rng: &mut R) -> usize {
        let n = self.slots.len();
        let f = self.outer.f.clone();
        let i = (rng.next_u32() as usize) % n;
        if rng.next_u32() % 3 == 0 {
            // conjugate slot i by a random ambient element (normal closure)
            let k = self.outer.step(rng);
            let c = self.outer.slots[k].clone();
            let cs = self.outer.slot_slps[k];
            self.slots[i] = self.slots[i].conjugate(&f, &c).unwrap();
            self.slot_slps[i] = self.outer.builder.conj(self.slot_slps[i], cs);
        } else {
            let mut j = (rng.next_u32() as usize) % n;
            while j == i {
                j = (rng.next_u32() as usize) % n;
            }
            if rng.next_u32() & 1 == 0 {
                self.slots[i] = self.slots[i].mul(&f, &self.slots[j]);
                self.slot_slps[i] = self.outer.builder.mul(self.slot_slps[i], self.slot_slps[j]);
            } else {
                self.slots[i] = self.slots[j].mul(&f, &self.slots[i]);
                self.slot_slps[i] = self.outer.builder.mul(self.slot_slps[j], self.slot_slps[i]);
            }
        }
        i
    }

    /// Random element of the derived subgroup, with an SLP over the original
    /// (ambient) generators.
    pub fn random_element<R: RngCore>(&mut self, rng: &mut R) -> (Matrix, Slp) {
        let i = self.step(rng);
        (self.slots[i].clone(), self.outer.builder.finish(self.slot_slps[i]))
    }
}

/// The factored exponent of Ree(q): every element order divides
/// 9 (q^3 + 1)(q - 1) = 9 (q+1)(q+1-3t)(q+1+3t)(q-1).
pub fn ree_exponent_factors(f: &FieldParams) -> Vec<(u64, u32)> {
    let q = f.q();
    let t = f.t();
    let mut factors = alloc::vec![(3u64, 2u32)];
    for part in [q + 1, q + 1 - 3 * t, q + 1 + 3 * t, q - 1] {
        factors = arith::merge_factorizations(&factors, &arith::factorize(part));
    }
    factors
}

/// Exact order of g, by divisor refinement against a factored exponent.
/// Errors with `NotInGroup` if the order does not divide the exponent.
pub fn element_order(f: &FieldParams, g: &Matrix, exponent_factors: &[(u64, u32)]) -> Result<u128> {
    let mut e: u128 = 1;
    for &(p, k) in exponent_factors {
        e = e
            .checked_mul((p as u128).pow(k))
            .ok_or(Error::Invalid("exponent overflow"))?;
    }
    if !g.pow(f, e).is_identity(f) {
        return Err(Error::NotInGroup("order does not divide the group exponent"));
    }
    let mut order = e;
    for &(p, k) in exponent_factors {
        for _ in 0..k {
            let cand = order / p as u128;
            if order % p as u128 == 0 && g.pow(f, cand).is_identity(f) {
                order = cand;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// g^(order/2) when the order is even.
pub fn power_to_involution(
    f: &FieldParams,
    g: &Matrix,
    exponent_factors: &[(u64, u32)],
) -> Result<Option<Matrix>> {
    let order = element_order(f, g, exponent_factors)?;
    if order % 2 != 0 {
        return Ok(None);
    }
    Ok(Some(g.pow(f, order / 2)))
}
