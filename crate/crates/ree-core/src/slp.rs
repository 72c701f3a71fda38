//! Straight-line programs over a named generator list.
//!
//! An SLP is a list of instructions, each defining a new slot, with a
//! designated result slot. PWR is a primitive instruction so that O(log q)
//! powering costs one instruction of recorded length.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::linalg::Matrix;

/// One SLP instruction; operands refer to earlier slot indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    /// Slot := generator k.
    Ref(usize),
    /// Slot := slot i * slot j.
    Mul(usize, usize),
    /// Slot := slot i ^ -1.
    Inv(usize),
    /// Slot := slot i ^ n.
    Pwr(usize, u128),
}

/// A straight-line program: each instruction defines slot 0, 1, 2, ... in
/// order; `result` names the slot holding the program's value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    ngens: usize,
    instrs: Vec<Instr>,
    result: usize,
}

impl Slp {
    pub fn new(ngens: usize, instrs: Vec<Instr>, result: usize) -> Result<Slp> {
        for (slot, ins) in instrs.iter().enumerate() {
            let ok = match *ins {
                Instr::Ref(k) => k < ngens,
                Instr::Mul(i, j) => i < slot && j < slot,
                Instr::Inv(i) | Instr::Pwr(i, _) => i < slot,
            };
            if !ok {
                return Err(Error::Invalid("SLP instruction references a later slot"));
            }
        }
        if result >= instrs.len() {
            return Err(Error::Invalid("SLP result slot out of range"));
        }
        Ok(Slp { ngens, instrs, result })
    }

    /// The SLP computing generator k.
    pub fn generator(ngens: usize, k: usize) -> Result<Slp> {
        if k >= ngens {
            return Err(Error::Invalid("generator index out of range"));
        }
        Ok(Slp { ngens, instrs: alloc::vec![Instr::Ref(k)], result: 0 })
    }

    /// The SLP computing the identity (generator 0 to the power 0).
    pub fn identity(ngens: usize) -> Slp {
        Slp {
            ngens,
            instrs: alloc::vec![Instr::Ref(0), Instr::Pwr(0, 0)],
            result: 1,
        }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn result(&self) -> usize {
        self.result
    }

    /// Instruction count.
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Evaluate on concrete generator matrices.
    pub fn evaluate(&self, f: &FieldParams, gens: &[Matrix]) -> Result<Matrix> {
        if gens.len() != self.ngens {
            return Err(Error::Invalid("generator count mismatch"));
        }
        let mut slots: Vec<Matrix> = Vec::with_capacity(self.instrs.len());
        for ins in &self.instrs {
            let m = match *ins {
                Instr::Ref(k) => gens[k].clone(),
                Instr::Mul(i, j) => slots[i].mul(f, &slots[j]),
                Instr::Inv(i) => slots[i].inv(f)?,
                Instr::Pwr(i, n) => slots[i].pow(f, n),
            };
            slots.push(m);
        }
        Ok(slots[self.result].clone())
    }

    pub fn multiply(&self, other: &Slp) -> Result<Slp> {
        let mut b = SlpBuilder::new(self.ngens);
        let a = b.import(self)?;
        let c = b.import(other)?;
        let r = b.mul(a, c);
        Ok(b.finish(r))
    }

    pub fn invert(&self) -> Slp {
        let mut b = SlpBuilder::new(self.ngens);
        let a = b.import(self).expect("self-import cannot fail");
        let r = b.inv(a);
        b.finish(r)
    }

    pub fn power(&self, n: u128) -> Slp {
        if n == 1 {
            return self.clone();
        }
        let mut b = SlpBuilder::new(self.ngens);
        let a = b.import(self).expect("self-import cannot fail");
        let r = b.pwr(a, n);
        b.finish(r)
    }

    /// Substitute each generator reference by the corresponding SLP from
    /// `parts` (all over a common generator set). The result computes the
    /// same word with each generator k replaced by parts[k]'s value.
    pub fn compose(&self, parts: &[Slp]) -> Result<Slp> {
        if parts.len() != self.ngens {
            return Err(Error::Invalid("compose: part count mismatch"));
        }
        let inner_ngens = match parts.first() {
            Some(p) => p.ngens,
            None => return Err(Error::Invalid("compose: no parts")),
        };
        if parts.iter().any(|p| p.ngens != inner_ngens) {
            return Err(Error::Invalid("compose: inconsistent part generator counts"));
        }
        let mut b = SlpBuilder::new(inner_ngens);
        let mut part_slots: Vec<usize> = Vec::with_capacity(parts.len());
        for p in parts {
            part_slots.push(b.import(p)?);
        }
        let mut map: Vec<usize> = Vec::with_capacity(self.instrs.len());
        for ins in &self.instrs {
            let slot = match *ins {
                Instr::Ref(k) => part_slots[k],
                Instr::Mul(i, j) => b.mul(map[i], map[j]),
                Instr::Inv(i) => b.inv(map[i]),
                Instr::Pwr(i, n) => b.pwr(map[i], n),
            };
            map.push(slot);
        }
        Ok(b.finish(map[self.result]))
    }
}

/// Incremental SLP construction with structural memoization of imported
/// programs (identical sub-programs share slots) and dead-code pruning on
/// `finish`.
pub struct SlpBuilder {
    ngens: usize,
    instrs: Vec<Instr>,
    memo: alloc::collections::BTreeMap<(u8, usize, usize, u128), usize>,
}

impl SlpBuilder {
    pub fn new(ngens: usize) -> SlpBuilder {
        SlpBuilder { ngens, instrs: Vec::new(), memo: alloc::collections::BTreeMap::new() }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    fn push(&mut self, key: (u8, usize, usize, u128), ins: Instr) -> usize {
        if let Some(&slot) = self.memo.get(&key) {
            return slot;
        }
        let slot = self.instrs.len();
        self.instrs.push(ins);
        self.memo.insert(key, slot);
        slot
    }

    /// Slot holding generator k.
    pub fn gen(&mut self, k: usize) -> usize {
        debug_assert!(k < self.ngens);
        self.push((0, k, 0, 0), Instr::Ref(k))
    }

    pub fn mul(&mut self, i: usize, j: usize) -> usize {
        self.push((1, i, j, 0), Instr::Mul(i, j))
    }

    pub fn inv(&mut self, i: usize) -> usize {
        self.push((2, i, 0, 0), Instr::Inv(i))
    }

    pub fn pwr(&mut self, i: usize, n: u128) -> usize {
        self.push((3, i, 0, n), Instr::Pwr(i, n))
    }

    /// Slot for the identity element.
    pub fn identity(&mut self) -> usize {
        let g0 = self.gen(0);
        self.pwr(g0, 0)
    }

    /// j^-1 i j.
    pub fn conj(&mut self, i: usize, j: usize) -> usize {
        let ji = self.inv(j);
        let t = self.mul(ji, i);
        self.mul(t, j)
    }

    /// i^-1 j^-1 i j.
    pub fn comm(&mut self, i: usize, j: usize) -> usize {
        let ii = self.inv(i);
        let ji = self.inv(j);
        let t = self.mul(ii, ji);
        let t = self.mul(t, i);
        self.mul(t, j)
    }

    /// Append another SLP's instructions (rewriting its slot indices via the
    /// memo table) and return the slot of its result.
    pub fn import(&mut self, slp: &Slp) -> Result<usize> {
        if slp.ngens != self.ngens {
            return Err(Error::Invalid("generator count mismatch"));
        }
        let mut map: Vec<usize> = Vec::with_capacity(slp.instrs.len());
        for ins in &slp.instrs {
            let slot = match *ins {
                Instr::Ref(k) => self.gen(k),
                Instr::Mul(i, j) => self.mul(map[i], map[j]),
                Instr::Inv(i) => self.inv(map[i]),
                Instr::Pwr(i, n) => self.pwr(map[i], n),
            };
            map.push(slot);
        }
        map.get(slp.result).copied().ok_or(Error::Invalid("empty SLP"))
    }

    /// Finish with the given result slot, pruning instructions the result
    /// does not depend on.
    pub fn finish(&self, result: usize) -> Slp {
        let mut needed = alloc::vec![false; self.instrs.len()];
        let mut stack = alloc::vec![result];
        while let Some(s) = stack.pop() {
            if needed[s] {
                continue;
            }
            needed[s] = true;
            match self.instrs[s] {
                Instr::Ref(_) => {}
                Instr::Mul(i, j) => {
                    stack.push(i);
                    stack.push(j);
                }
                Instr::Inv(i) | Instr::Pwr(i, _) => stack.push(i),
            }
        }
        let mut map = alloc::vec![usize::MAX; self.instrs.len()];
        let mut out = Vec::new();
        for (s, ins) in self.instrs.iter().enumerate() {
            if !needed[s] {
                continue;
            }
            let rewritten = match *ins {
                Instr::Ref(k) => Instr::Ref(k),
                Instr::Mul(i, j) => Instr::Mul(map[i], map[j]),
                Instr::Inv(i) => Instr::Inv(map[i]),
                Instr::Pwr(i, n) => Instr::Pwr(map[i], n),
            };
            map[s] = out.len();
            out.push(rewritten);
        }
        Slp { ngens: self.ngens, instrs: out, result: map[result] }
    }
}
