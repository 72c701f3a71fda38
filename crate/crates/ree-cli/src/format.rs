//! Text file formats: matrices, generator lists, straight-line programs,
//! ovoid points, and field parameters. All numbers are decimal; field
//! elements are encoded as sum c_i 3^i over the polynomial basis, least
//! degree least significant.

use ree_core::field::FieldParams;
use ree_core::linalg::Matrix;
use ree_core::slp::{Instr, Slp};
use ree_core::standard::{self, OvoidPoint};

use crate::CliError;

fn format_error(msg: impl Into<String>) -> CliError {
    CliError { code: 3, message: msg.into() }
}

/// "m=<int>"
pub fn parse_field_params(text: &str) -> Result<FieldParams, CliError> {
    let t = text.trim();
    let m = t
        .strip_prefix("m=")
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| format_error(format!("expected \"m=<int>\", got {t:?}")))?;
    FieldParams::new(m).map_err(|e| format_error(format!("bad field parameter: {e}")))
}

pub fn write_field_params(f: &FieldParams) -> String {
    format!("m={}\n", f.m())
}

fn parse_element(f: &FieldParams, tok: &str) -> Result<ree_core::field::FieldElement, CliError> {
    let n = tok
        .parse::<u64>()
        .map_err(|_| format_error(format!("bad field element {tok:?}")))?;
    if n >= f.q() {
        return Err(format_error(format!("field element {n} out of range for q = {}", f.q())));
    }
    Ok(f.from_int(n))
}

/// Matrix: first line "dim q", then dim rows of dim space-separated
/// field-element integers.
pub fn parse_matrix<'a, I: Iterator<Item = &'a str>>(
    f: &FieldParams,
    lines: &mut I,
) -> Result<Matrix, CliError> {
    let header = lines.next().ok_or_else(|| format_error("missing matrix header"))?;
    let mut it = header.split_whitespace();
    let dim: usize = it
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format_error(format!("bad matrix header {header:?}")))?;
    let q: u64 = it
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format_error(format!("bad matrix header {header:?}")))?;
    if q != f.q() {
        return Err(format_error(format!("matrix is over q = {q}, expected q = {}", f.q())));
    }
    if dim == 0 || it.next().is_some() {
        return Err(format_error(format!("bad matrix header {header:?}")));
    }
    let mut m = Matrix::zero(dim);
    for i in 0..dim {
        let row = lines.next().ok_or_else(|| format_error("missing matrix row"))?;
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != dim {
            return Err(format_error(format!("matrix row has {} entries, expected {dim}", toks.len())));
        }
        for (j, tok) in toks.iter().enumerate() {
            m.set(i, j, parse_element(f, tok)?);
        }
    }
    Ok(m)
}

pub fn write_matrix(f: &FieldParams, m: &Matrix) -> String {
    let dim = m.dim();
    let mut out = format!("{dim} {}\n", f.q());
    for i in 0..dim {
        let row: Vec<String> = (0..dim).map(|j| f.to_int(m.get(i, j)).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_file(f: &FieldParams, text: &str) -> Result<Matrix, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let m = parse_matrix(f, &mut lines)?;
    if lines.next().is_some() {
        return Err(format_error("trailing content after matrix"));
    }
    Ok(m)
}

/// Generator list: "count n" then n matrices.
pub fn parse_generators(f: &FieldParams, text: &str) -> Result<Vec<Matrix>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| format_error("missing generator header"))?;
    let n: usize = header
        .strip_prefix("count ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format_error(format!("expected \"count n\", got {header:?}")))?;
    let mut gens = Vec::with_capacity(n);
    for _ in 0..n {
        gens.push(parse_matrix(f, &mut lines)?);
    }
    if lines.next().is_some() {
        return Err(format_error("trailing content after generators"));
    }
    Ok(gens)
}

pub fn write_generators(f: &FieldParams, gens: &[Matrix]) -> String {
    let mut out = format!("count {}\n", gens.len());
    for g in gens {
        out.push_str(&write_matrix(f, g));
    }
    out
}

/// SLP: line 1 "ngens N", then "REF k" / "MUL i j" / "INV i" / "PWR i n"
/// per instruction, final line "RESULT i".
pub fn parse_slp(text: &str) -> Result<Slp, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| format_error("missing SLP header"))?;
    let ngens: usize = header
        .strip_prefix("ngens ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format_error(format!("expected \"ngens N\", got {header:?}")))?;
    let mut instrs = Vec::new();
    let mut result = None;
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || format_error(format!("bad SLP line {line:?}"));
        let arg = |k: usize| -> Result<usize, CliError> {
            toks.get(k).and_then(|v| v.parse().ok()).ok_or_else(bad)
        };
        match toks.first().copied() {
            Some("REF") if toks.len() == 2 => instrs.push(Instr::Ref(arg(1)?)),
            Some("MUL") if toks.len() == 3 => instrs.push(Instr::Mul(arg(1)?, arg(2)?)),
            Some("INV") if toks.len() == 2 => instrs.push(Instr::Inv(arg(1)?)),
            Some("PWR") if toks.len() == 3 => {
                let n: u128 = toks[2].parse().map_err(|_| bad())?;
                instrs.push(Instr::Pwr(arg(1)?, n));
            }
            Some("RESULT") if toks.len() == 2 => {
                result = Some(arg(1)?);
                break;
            }
            _ => return Err(bad()),
        }
    }
    let result = result.ok_or_else(|| format_error("missing RESULT line"))?;
    Slp::new(ngens, instrs, result).map_err(|e| format_error(format!("invalid SLP: {e}")))
}

pub fn write_slp(slp: &Slp) -> String {
    let mut out = format!("ngens {}\n", slp.ngens());
    for ins in slp.instructions() {
        match *ins {
            Instr::Ref(k) => out.push_str(&format!("REF {k}\n")),
            Instr::Mul(i, j) => out.push_str(&format!("MUL {i} {j}\n")),
            Instr::Inv(i) => out.push_str(&format!("INV {i}\n")),
            Instr::Pwr(i, n) => out.push_str(&format!("PWR {i} {n}\n")),
        }
    }
    out.push_str(&format!("RESULT {}\n", slp.result()));
    out
}

/// Ovoid point: first line "point q", second line seven space-separated
/// field-element integers (projective coordinates).
pub fn parse_point(f: &FieldParams, text: &str) -> Result<OvoidPoint, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| format_error("missing point header"))?;
    let q: u64 = header
        .strip_prefix("point ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format_error(format!("expected \"point q\", got {header:?}")))?;
    if q != f.q() {
        return Err(format_error(format!("point is over q = {q}, expected q = {}", f.q())));
    }
    let row = lines.next().ok_or_else(|| format_error("missing point coordinates"))?;
    let toks: Vec<&str> = row.split_whitespace().collect();
    if toks.len() != 7 {
        return Err(format_error(format!("point has {} coordinates, expected 7", toks.len())));
    }
    let mut coords = Vec::with_capacity(7);
    for tok in toks {
        coords.push(parse_element(f, tok)?);
    }
    standard::ovoid_membership(f, &coords)
        .map_err(|e| format_error(format!("not an ovoid point: {e}")))
}

pub fn write_point(f: &FieldParams, p: &OvoidPoint) -> String {
    let row: Vec<String> = p.coords().iter().map(|&x| f.to_int(x).to_string()).collect();
    format!("point {}\n{}\n", f.q(), row.join(" "))
}
