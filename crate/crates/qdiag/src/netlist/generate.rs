//! Parameterized arithmetic benchmark families.
//!
//! Every generator emits standard-basis gates only; wider conjunctions and
//! disjunctions are lowered to left-leaning chains of two-input gates.
//! Constants are never needed: adders start their carry chains with
//! half-adders instead of a zero wire.

use super::{Circuit, Gate, GateKind};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Benchmark circuit family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RippleAdder,
    RippleSubtractor,
    Multiplexer,
    Demultiplexer,
    Comparator,
    BarrelShifter,
    Multiplier,
    MultioperandAdder,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::RippleAdder,
        Family::RippleSubtractor,
        Family::Multiplexer,
        Family::Demultiplexer,
        Family::Comparator,
        Family::BarrelShifter,
        Family::Multiplier,
        Family::MultioperandAdder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RippleAdder => "ripple_adder",
            Family::RippleSubtractor => "ripple_subtractor",
            Family::Multiplexer => "multiplexer",
            Family::Demultiplexer => "demultiplexer",
            Family::Comparator => "comparator",
            Family::BarrelShifter => "barrel_shifter",
            Family::Multiplier => "multiplier",
            Family::MultioperandAdder => "multioperand_adder",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenerateError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("unknown benchmark family `{0}`")]
    UnknownFamily(String),
    #[error("{family} does not support width {width}: {reason}")]
    UnsupportedWidth {
        family: Family,
        width: usize,
        reason: String,
    },
}

fn unsupported(family: Family, width: usize, reason: &str) -> GenerateError {
    GenerateError::UnsupportedWidth {
        family,
        width,
        reason: reason.to_string(),
    }
}

/// Builds the named arithmetic circuit at the given bit width.
pub fn generate_benchmark(family: Family, width: usize) -> Result<Circuit, GenerateError> {
    if width == 0 {
        return Err(unsupported(family, width, "width must be at least 1"));
    }
    let circuit = match family {
        Family::RippleAdder => ripple_adder(width),
        Family::RippleSubtractor => ripple_subtractor(width),
        Family::Multiplexer => multiplexer(width),
        Family::Demultiplexer => demultiplexer(width),
        Family::Comparator => comparator(width),
        Family::BarrelShifter => barrel_shifter(width)?,
        Family::Multiplier => multiplier(width),
        Family::MultioperandAdder => multioperand_adder(width),
    };
    Ok(circuit)
}

struct Builder {
    inputs: Vec<String>,
    outputs: Vec<String>,
    gates: Vec<Gate>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            inputs: Vec::new(),
            outputs: Vec::new(),
            gates: Vec::new(),
        }
    }

    fn input(&mut self, name: impl Into<String>) -> String {
        let name = name.into();
        self.inputs.push(name.clone());
        name
    }

    fn gate(&mut self, kind: GateKind, ins: &[&str], out: impl Into<String>) -> String {
        let out = out.into();
        self.gates.push(Gate {
            kind,
            inputs: ins.iter().map(|s| s.to_string()).collect(),
            output: out.clone(),
        });
        out
    }

    fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    fn finish(self) -> Circuit {
        Circuit::new(self.inputs, self.outputs, self.gates)
            .expect("generated benchmark violates circuit invariants")
    }

    /// sum, carry of two bits.
    fn half_adder(&mut self, x: &str, y: &str, prefix: &str) -> (String, String) {
        let s = self.gate(GateKind::Xor, &[x, y], format!("{prefix}_s"));
        let c = self.gate(GateKind::And, &[x, y], format!("{prefix}_c"));
        (s, c)
    }

    /// sum, carry of three bits; the 5-gate half-adder pair.
    fn full_adder(&mut self, x: &str, y: &str, cin: &str, prefix: &str) -> (String, String) {
        let g = self.gate(GateKind::And, &[x, y], format!("{prefix}_g"));
        let p = self.gate(GateKind::Xor, &[x, y], format!("{prefix}_p"));
        let t = self.gate(GateKind::And, &[p.as_str(), cin], format!("{prefix}_t"));
        let s = self.gate(GateKind::Xor, &[p.as_str(), cin], format!("{prefix}_s"));
        let c = self.gate(GateKind::Or, &[g.as_str(), t.as_str()], format!("{prefix}_c"));
        (s, c)
    }

    /// Adds two little-endian bit vectors, `y` shifted left by `offset`.
    /// Returns the little-endian sum bits.
    fn add_shifted(&mut self, x: &[String], y: &[String], offset: usize, prefix: &str) -> Vec<String> {
        let width = (x.len()).max(offset + y.len()) + 1;
        let mut result = Vec::new();
        let mut carry: Option<String> = None;
        for pos in 0..width {
            let xb = x.get(pos).cloned();
            let yb = if pos >= offset { y.get(pos - offset).cloned() } else { None };
            let stage = format!("{prefix}{pos}");
            let bit = match (xb, yb, carry.take()) {
                (Some(a), Some(b), Some(c)) => {
                    let (s, co) = self.full_adder(&a, &b, &c, &stage);
                    carry = Some(co);
                    Some(s)
                }
                (Some(a), Some(b), None) => {
                    let (s, co) = self.half_adder(&a, &b, &stage);
                    carry = Some(co);
                    Some(s)
                }
                (Some(a), None, Some(c)) | (None, Some(a), Some(c)) => {
                    let (s, co) = self.half_adder(&a, &c, &stage);
                    carry = Some(co);
                    Some(s)
                }
                (Some(a), None, None) | (None, Some(a), None) => Some(a),
                (None, None, Some(c)) => Some(c),
                (None, None, None) => None,
            };
            if let Some(bit) = bit {
                result.push(bit);
            }
        }
        result
    }
}

impl Builder {
    fn gate2(&mut self, kind: GateKind, a: &str, b: &str, out: impl Into<String>) -> String {
        self.gate(kind, &[a, b], out)
    }
}

fn ripple_adder(width: usize) -> Circuit {
    let mut b = Builder::new();
    if width == 1 {
        // The classic two-half-adder full adder.
        let i1 = b.input("i1");
        let i2 = b.input("i2");
        let ci = b.input("ci");
        let z1 = b.gate2(GateKind::And, &i1, &i2, "z1");
        let z2 = b.gate2(GateKind::Xor, &i1, &i2, "z2");
        let z3 = b.gate2(GateKind::And, &z2, &ci, "z3");
        let sigma = b.gate2(GateKind::Xor, &z2, &ci, "sigma");
        let co = b.gate2(GateKind::Or, &z1, &z3, "co");
        b.output(sigma);
        b.output(co);
        let _ = (z1, z3);
        return b.finish();
    }
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let bb: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    let mut carry = b.input("cin");
    let mut sums = Vec::new();
    for k in 0..width {
        let g = b.gate2(GateKind::And, &a[k], &bb[k], format!("g{k}"));
        let p = b.gate2(GateKind::Xor, &a[k], &bb[k], format!("p{k}"));
        let t = b.gate2(GateKind::And, &p, &carry, format!("t{k}"));
        let s = b.gate2(GateKind::Xor, &p, &carry, format!("s{k}"));
        let c_name = if k + 1 == width { "cout".to_string() } else { format!("c{}", k + 1) };
        carry = b.gate2(GateKind::Or, &g, &t, c_name);
        sums.push(s);
    }
    for s in sums {
        b.output(s);
    }
    b.output(carry);
    b.finish()
}

fn ripple_subtractor(width: usize) -> Circuit {
    let mut b = Builder::new();
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let bb: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    let mut borrow = b.input("bin");
    let mut diffs = Vec::new();
    for k in 0..width {
        let x = b.gate2(GateKind::Xor, &a[k], &bb[k], format!("x{k}"));
        let d = b.gate2(GateKind::Xor, &x, &borrow, format!("d{k}"));
        let na = b.gate(GateKind::Not, &[&a[k]], format!("na{k}"));
        let u = b.gate2(GateKind::And, &na, &bb[k], format!("u{k}"));
        let nx = b.gate(GateKind::Not, &[&x], format!("nx{k}"));
        let v = b.gate2(GateKind::And, &nx, &borrow, format!("v{k}"));
        let bw_name = if k + 1 == width { "bout".to_string() } else { format!("bw{}", k + 1) };
        borrow = b.gate2(GateKind::Or, &u, &v, bw_name);
        diffs.push(d);
    }
    for d in diffs {
        b.output(d);
    }
    b.output(borrow);
    b.finish()
}

/// `width` select lines choosing among `2^width` data inputs.
fn multiplexer(width: usize) -> Circuit {
    let mut b = Builder::new();
    let data: Vec<_> = (0..1usize << width).map(|i| b.input(format!("d{i}"))).collect();
    let sel: Vec<_> = (0..width).map(|k| b.input(format!("s{k}"))).collect();
    let mut current = data;
    for (level, s) in sel.iter().enumerate() {
        let ns = b.gate(GateKind::Not, &[s], format!("ns{level}"));
        let mut next = Vec::new();
        let last_level = level + 1 == width;
        for i in 0..current.len() / 2 {
            let lo = b.gate2(GateKind::And, &current[2 * i], &ns, format!("m{level}_{i}_0"));
            let hi = b.gate2(GateKind::And, &current[2 * i + 1], s, format!("m{level}_{i}_1"));
            let name = if last_level { "y".to_string() } else { format!("m{level}_{i}") };
            next.push(b.gate2(GateKind::Or, &lo, &hi, name));
        }
        current = next;
    }
    let y = current.pop().expect("mux reduces to one wire");
    b.output(y);
    b.finish()
}

/// Routes one data input to one of `2^width` outputs.
fn demultiplexer(width: usize) -> Circuit {
    let mut b = Builder::new();
    let d = b.input("d");
    let sel: Vec<_> = (0..width).map(|k| b.input(format!("s{k}"))).collect();
    let nsel: Vec<_> = sel
        .iter()
        .enumerate()
        .map(|(k, s)| b.gate(GateKind::Not, &[s], format!("ns{k}")))
        .collect();
    for i in 0..1usize << width {
        let mut cur = d.clone();
        for k in 0..width {
            let lit = if (i >> k) & 1 == 1 { &sel[k] } else { &nsel[k] };
            let name = if k + 1 == width { format!("y{i}") } else { format!("t{i}_{k}") };
            cur = b.gate2(GateKind::And, &cur, lit, name);
        }
        b.output(format!("y{i}"));
    }
    b.finish()
}

/// Unsigned comparison: outputs (lt, eq, gt).
fn comparator(width: usize) -> Circuit {
    let mut b = Builder::new();
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let bb: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    if width == 1 {
        let x = b.gate2(GateKind::Xor, &a[0], &bb[0], "x0");
        let eq = b.gate(GateKind::Not, &[&x], "eq");
        let na = b.gate(GateKind::Not, &[&a[0]], "na0");
        let lt = b.gate2(GateKind::And, &na, &bb[0], "lt");
        let nb = b.gate(GateKind::Not, &[&bb[0]], "nb0");
        let gt = b.gate2(GateKind::And, &a[0], &nb, "gt");
        b.output(lt);
        b.output(eq);
        b.output(gt);
        return b.finish();
    }
    // lt is the borrow-out of a - b; eq is the chain of per-bit equalities.
    let mut equals = Vec::new();
    let mut borrow: Option<String> = None;
    for k in 0..width {
        let x = b.gate2(GateKind::Xor, &a[k], &bb[k], format!("x{k}"));
        let e = b.gate(GateKind::Not, &[&x], format!("e{k}"));
        let na = b.gate(GateKind::Not, &[&a[k]], format!("na{k}"));
        let u = b.gate2(GateKind::And, &na, &bb[k], format!("u{k}"));
        borrow = Some(match borrow {
            None => u,
            Some(prev) => {
                let v = b.gate2(GateKind::And, &e, &prev, format!("v{k}"));
                let name = if k + 1 == width { "lt".to_string() } else { format!("bw{k}") };
                b.gate2(GateKind::Or, &u, &v, name)
            }
        });
        equals.push(e);
    }
    let lt = borrow.expect("width >= 2");
    let mut eq = equals[0].clone();
    for (k, e) in equals.iter().enumerate().skip(1) {
        let name = if k + 1 == width { "eq".to_string() } else { format!("eqc{k}") };
        eq = b.gate2(GateKind::And, &eq, e, name);
    }
    let nlt = b.gate(GateKind::Not, &[&lt], "nlt");
    let neq = b.gate(GateKind::Not, &[&eq], "neq");
    let gt = b.gate2(GateKind::And, &nlt, &neq, "gt");
    b.output(lt);
    b.output(eq);
    b.output(gt);
    b.finish()
}

/// Left-rotating barrel shifter; width must be a power of two.
fn barrel_shifter(width: usize) -> Result<Circuit, GenerateError> {
    if !width.is_power_of_two() {
        return Err(unsupported(
            Family::BarrelShifter,
            width,
            "width must be a power of two",
        ));
    }
    let mut b = Builder::new();
    let data: Vec<_> = (0..width).map(|i| b.input(format!("d{i}"))).collect();
    if width == 1 {
        // Rotation of a single bit is the identity.
        b.output(data[0].clone());
        return Ok(b.finish());
    }
    let stages = width.trailing_zeros() as usize;
    let sel: Vec<_> = (0..stages).map(|k| b.input(format!("s{k}"))).collect();
    let mut current = data;
    for (st, s) in sel.iter().enumerate() {
        let ns = b.gate(GateKind::Not, &[s], format!("ns{st}"));
        let shift = 1usize << st;
        let last = st + 1 == stages;
        let mut next = Vec::new();
        for i in 0..width {
            let keep = b.gate2(GateKind::And, &current[i], &ns, format!("r{st}_{i}_0"));
            let rotated = &current[(i + width - shift) % width];
            let take = b.gate2(GateKind::And, rotated, s, format!("r{st}_{i}_1"));
            let name = if last { format!("y{i}") } else { format!("r{st}_{i}") };
            next.push(b.gate2(GateKind::Or, &keep, &take, name));
        }
        current = next;
    }
    for wire in current {
        b.output(wire);
    }
    Ok(b.finish())
}

/// Array multiplier: partial-product rows summed by ripple adders.
fn multiplier(width: usize) -> Circuit {
    let mut b = Builder::new();
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let bb: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    if width == 1 {
        let p = b.gate2(GateKind::And, &a[0], &bb[0], "p0");
        b.output(p);
        return b.finish();
    }
    let rows: Vec<Vec<String>> = (0..width)
        .map(|i| {
            (0..width)
                .map(|j| b.gate2(GateKind::And, &a[j], &bb[i], format!("pp{i}_{j}")))
                .collect()
        })
        .collect();
    let mut acc = rows[0].clone();
    for (i, row) in rows.iter().enumerate().skip(1) {
        acc = b.add_shifted(&acc, row, i, &format!("r{i}_"));
    }
    for bit in acc {
        b.output(bit);
    }
    b.finish()
}

/// Three-operand adder: a + b + c over equal widths, sum width + 2 bits.
fn multioperand_adder(width: usize) -> Circuit {
    let mut b = Builder::new();
    let a: Vec<_> = (0..width).map(|k| b.input(format!("a{k}"))).collect();
    let bb: Vec<_> = (0..width).map(|k| b.input(format!("b{k}"))).collect();
    let c: Vec<_> = (0..width).map(|k| b.input(format!("c{k}"))).collect();
    let ab = b.add_shifted(&a, &bb, 0, "ab");
    let sum = b.add_shifted(&ab, &c, 0, "abc");
    for bit in sum {
        b.output(bit);
    }
    b.finish()
}
