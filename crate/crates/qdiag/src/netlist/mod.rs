//! Gate-level combinational circuit model.
//!
//! A [`Circuit`] is a multi-output Boolean function over named wires, built
//! from the minimal basis NOT / AND2 / OR2 / XOR2. Wider gates are expressed
//! by chaining two-input ones. Circuits are immutable after construction;
//! every invariant (single driver, acyclicity, declared wires) is checked in
//! [`Circuit::new`], so a value of this type is always well formed.

mod generate;
mod parse;

pub use generate::{generate_benchmark, Family, GenerateError};
pub use parse::{parse_bench, render_bench, ParseError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Gate function from the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    And,
    Or,
    Xor,
}

impl GateKind {
    /// Number of input wires the gate consumes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            _ => 2,
        }
    }

    /// Truth table of the gate. For NOT the second operand is ignored.
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::Not => !a,
            GateKind::And => a & b,
            GateKind::Or => a | b,
            GateKind::Xor => a ^ b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single gate: `output = kind(inputs...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<String>,
    pub output: String,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: &[&str], output: &str) -> Self {
        Gate {
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.to_string(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}({})", self.output, self.kind, self.inputs.join(", "))
    }
}

/// Errors detected while assembling or checking a circuit.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("wire `{0}` is driven more than once")]
    DuplicateDriver(String),
    #[error("wire `{0}` is declared as a primary input but also driven by a gate")]
    InputDriven(String),
    #[error("primary input `{0}` is declared twice")]
    DuplicateInput(String),
    #[error("gate input `{wire}` of gate `{gate}` is neither a primary input nor a gate output")]
    UndeclaredWire { wire: String, gate: String },
    #[error("primary output `{0}` names no existing wire")]
    UnknownOutput(String),
    #[error("gate `{gate}` has {got} inputs, {kind} takes {want}")]
    BadArity {
        gate: String,
        kind: GateKind,
        want: usize,
        got: usize,
    },
    #[error("combinational cycle through wire `{0}`")]
    Cycle(String),
    #[error("invalid wire name `{0}`")]
    BadName(String),
}

/// Wire name → Boolean value map.
///
/// Serialized as a JSON object with 0/1 values, matching the textual
/// `name=0|1` form used on the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: BTreeMap<String, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, bool)>) -> Self {
        let mut a = Assignment::new();
        for (name, value) in pairs {
            a.bindings.insert(name.to_string(), value);
        }
        a
    }

    /// Binds `wire` to `value`; an already-bound wire is a caller bug.
    pub fn bind(&mut self, wire: &str, value: bool) {
        let prev = self.bindings.insert(wire.to_string(), value);
        assert!(prev.is_none(), "wire `{wire}` bound twice");
    }

    pub fn get(&self, wire: &str) -> Option<bool> {
        self.bindings.get(wire).copied()
    }

    pub fn contains(&self, wire: &str) -> bool {
        self.bindings.contains_key(wire)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Union of two disjoint assignments.
    pub fn union(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (wire, value) in other.iter() {
            out.bind(wire, value);
        }
        out
    }

    /// Restriction to the given wires; duplicate names collapse.
    pub fn restrict(&self, wires: &[String]) -> Assignment {
        let mut out = Assignment::new();
        for w in wires {
            if let Some(v) = self.get(w) {
                if !out.contains(w) {
                    out.bind(w, v);
                }
            }
        }
        out
    }

    /// Parses the `name=0|1` comma list used by the CLI, e.g. `i1=0,i2=1`.
    pub fn parse(text: &str) -> Result<Assignment, String> {
        let mut out = Assignment::new();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(out);
        }
        for item in trimmed.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected `name=0|1`, got `{item}`"))?;
            let name = name.trim();
            if !is_valid_name(name) {
                return Err(format!("invalid wire name `{name}`"));
            }
            let value = match value.trim() {
                "0" => false,
                "1" => true,
                other => return Err(format!("value for `{name}` must be 0 or 1, got `{other}`")),
            };
            if out.contains(name) {
                return Err(format!("wire `{name}` bound twice"));
            }
            out.bind(name, value);
        }
        Ok(out)
    }
}

impl<'a> FromIterator<(&'a str, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (&'a str, bool)>>(iter: T) -> Self {
        Assignment::from_pairs(iter)
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.bindings.len()))?;
        for (wire, value) in &self.bindings {
            map.serialize_entry(wire, &(*value as u8))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AssignmentVisitor;
        impl<'de> Visitor<'de> for AssignmentVisitor {
            type Value = Assignment;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from wire names to 0 or 1")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut out = Assignment::new();
                while let Some((wire, value)) = access.next_entry::<String, u8>()? {
                    match value {
                        0 => out.bindings.insert(wire, false),
                        1 => out.bindings.insert(wire, true),
                        other => {
                            return Err(serde::de::Error::custom(format!(
                                "wire `{wire}` has value {other}, expected 0 or 1"
                            )))
                        }
                    };
                }
                Ok(out)
            }
        }
        deserializer.deserialize_map(AssignmentVisitor)
    }
}

/// A combinational circuit over named wires.
#[derive(Debug, Clone)]
pub struct Circuit {
    inputs: Vec<String>,
    outputs: Vec<String>,
    gates: Vec<Gate>,
    /// Gate index driving each non-input wire.
    driver: HashMap<String, usize>,
    /// Gate indices in dependency order, ties broken by declaration order.
    topo: Vec<usize>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs && self.gates == other.gates
    }
}

impl Eq for Circuit {}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Circuit {
    /// Builds a circuit and checks every structural invariant.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        gates: Vec<Gate>,
    ) -> Result<Circuit, CircuitError> {
        for name in inputs
            .iter()
            .chain(outputs.iter())
            .chain(gates.iter().flat_map(|g| g.inputs.iter()))
            .chain(gates.iter().map(|g| &g.output))
        {
            if !is_valid_name(name) {
                return Err(CircuitError::BadName(name.clone()));
            }
        }

        let mut input_set = BTreeSet::new();
        for input in &inputs {
            if !input_set.insert(input.clone()) {
                return Err(CircuitError::DuplicateInput(input.clone()));
            }
        }

        let mut driver = HashMap::new();
        for (idx, gate) in gates.iter().enumerate() {
            let want = gate.kind.arity();
            if gate.inputs.len() != want {
                return Err(CircuitError::BadArity {
                    gate: gate.output.clone(),
                    kind: gate.kind,
                    want,
                    got: gate.inputs.len(),
                });
            }
            if input_set.contains(&gate.output) {
                return Err(CircuitError::InputDriven(gate.output.clone()));
            }
            if driver.insert(gate.output.clone(), idx).is_some() {
                return Err(CircuitError::DuplicateDriver(gate.output.clone()));
            }
        }

        for gate in &gates {
            for wire in &gate.inputs {
                if !input_set.contains(wire) && !driver.contains_key(wire) {
                    return Err(CircuitError::UndeclaredWire {
                        wire: wire.clone(),
                        gate: gate.output.clone(),
                    });
                }
            }
        }
        for output in &outputs {
            if !input_set.contains(output) && !driver.contains_key(output) {
                return Err(CircuitError::UnknownOutput(output.clone()));
            }
        }

        let topo = toposort(&gates, &driver)?;

        Ok(Circuit {
            inputs,
            outputs,
            gates,
            driver,
            topo,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// All wire names: primary inputs plus every gate output.
    pub fn wires(&self) -> BTreeSet<String> {
        self.inputs
            .iter()
            .cloned()
            .chain(self.gates.iter().map(|g| g.output.clone()))
            .collect()
    }

    /// Index of the gate driving `wire`, if any.
    pub fn driver_of(&self, wire: &str) -> Option<usize> {
        self.driver.get(wire).copied()
    }

    /// Gate indices in dependency order: every gate appears after the gates
    /// driving its inputs. Ties are broken by declaration order, so the
    /// result is the same on every run.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Gates in topological order.
    pub fn topo_gates(&self) -> impl Iterator<Item = &Gate> {
        self.topo.iter().map(|&i| &self.gates[i])
    }

    /// Forward-propagates `alpha` through every gate.
    ///
    /// `alpha` must bind exactly the primary inputs. The result binds every
    /// wire of the circuit; its restriction to `outputs()` is the value of
    /// the circuit function.
    pub fn evaluate(&self, alpha: &Assignment) -> Result<Assignment, EvalError> {
        if alpha.len() != self.inputs.len() {
            for (wire, _) in alpha.iter() {
                if !self.inputs.iter().any(|i| i == wire) {
                    return Err(EvalError::NotAnInput(wire.to_string()));
                }
            }
        }
        let mut values = BTreeMap::new();
        for input in &self.inputs {
            let v = alpha
                .get(input)
                .ok_or_else(|| EvalError::MissingInput(input.clone()))?;
            values.insert(input.as_str(), v);
        }
        for gate in self.topo_gates() {
            let a = values[gate.inputs[0].as_str()];
            let b = if gate.kind.arity() == 2 {
                values[gate.inputs[1].as_str()]
            } else {
                false
            };
            values.insert(gate.output.as_str(), gate.kind.eval(a, b));
        }
        Ok(Assignment::from_pairs(values))
    }

    /// Evaluates and keeps only the primary outputs.
    pub fn evaluate_outputs(&self, alpha: &Assignment) -> Result<Assignment, EvalError> {
        Ok(self.evaluate(alpha)?.restrict(&self.outputs))
    }

    /// A wire name not yet used by the circuit: `base`, then `base_1`, ...
    pub(crate) fn fresh_wire(&self, base: &str, taken: &BTreeSet<String>) -> String {
        let wires = self.wires();
        if !wires.contains(base) && !taken.contains(base) {
            return base.to_string();
        }
        for n in 1.. {
            let candidate = format!("{base}_{n}");
            if !wires.contains(&candidate) && !taken.contains(&candidate) {
                return candidate;
            }
        }
        unreachable!()
    }
}

/// Errors from [`Circuit::evaluate`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no binding for primary input `{0}`")]
    MissingInput(String),
    #[error("`{0}` is bound but is not a primary input")]
    NotAnInput(String),
}

/// Kahn's algorithm with a declaration-order ready queue.
fn toposort(gates: &[Gate], driver: &HashMap<String, usize>) -> Result<Vec<usize>, CircuitError> {
    let n = gates.len();
    let mut pending_deps = vec![0usize; n];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, gate) in gates.iter().enumerate() {
        for wire in &gate.inputs {
            if let Some(&dep) = driver.get(wire) {
                pending_deps[idx] += 1;
                dependents[dep].push(idx);
            }
        }
    }

    // BTreeSet keeps the smallest declaration index first.
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| pending_deps[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&idx) = ready.iter().next() {
        ready.remove(&idx);
        order.push(idx);
        for &dep in &dependents[idx] {
            pending_deps[dep] -= 1;
            if pending_deps[dep] == 0 {
                ready.insert(dep);
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n)
            .find(|&i| pending_deps[i] > 0)
            .expect("cycle implies a stuck gate");
        return Err(CircuitError::Cycle(gates[stuck].output.clone()));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn full_adder() -> Circuit {
        // The 5-gate full adder built from two half-adders.
        Circuit::new(
            vec!["i1".into(), "i2".into(), "ci".into()],
            vec!["sigma".into(), "co".into()],
            vec![
                Gate::new(GateKind::And, &["i1", "i2"], "z1"),
                Gate::new(GateKind::Xor, &["i1", "i2"], "z2"),
                Gate::new(GateKind::And, &["z2", "ci"], "z3"),
                Gate::new(GateKind::Xor, &["z2", "ci"], "sigma"),
                Gate::new(GateKind::Or, &["z1", "z3"], "co"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn full_adder_single_carry() {
        let c = full_adder();
        let alpha = Assignment::from_pairs([("i1", false), ("i2", false), ("ci", true)]);
        let out = c.evaluate_outputs(&alpha).unwrap();
        assert_eq!(out.get("sigma"), Some(true));
        assert_eq!(out.get("co"), Some(false));
    }

    #[test]
    fn full_adder_all_ones() {
        let c = full_adder();
        let alpha = Assignment::from_pairs([("i1", true), ("i2", true), ("ci", true)]);
        let out = c.evaluate_outputs(&alpha).unwrap();
        assert_eq!(out.get("sigma"), Some(true));
        assert_eq!(out.get("co"), Some(true));
    }

    #[test]
    fn full_adder_matches_integer_addition() {
        let c = full_adder();
        for bits in 0u32..8 {
            let (i1, i2, ci) = (bits & 1 != 0, bits & 2 != 0, bits & 4 != 0);
            let alpha = Assignment::from_pairs([("i1", i1), ("i2", i2), ("ci", ci)]);
            let out = c.evaluate_outputs(&alpha).unwrap();
            let sum = i1 as u32 + i2 as u32 + ci as u32;
            assert_eq!(out.get("sigma"), Some(sum & 1 != 0));
            assert_eq!(out.get("co"), Some(sum >= 2));
        }
    }

    #[test]
    fn passthrough_circuit_is_valid() {
        let c = Circuit::new(vec!["a".into()], vec!["a".into()], vec![]).unwrap();
        let out = c
            .evaluate_outputs(&Assignment::from_pairs([("a", true)]))
            .unwrap();
        assert_eq!(out.get("a"), Some(true));
    }

    #[test]
    fn duplicate_driver_rejected() {
        let err = Circuit::new(
            vec!["a".into()],
            vec!["w".into()],
            vec![
                Gate::new(GateKind::Not, &["a"], "w"),
                Gate::new(GateKind::Not, &["a"], "w"),
            ],
        )
        .unwrap_err();
        assert_eq!(err, CircuitError::DuplicateDriver("w".into()));
    }

    #[test]
    fn undeclared_wire_rejected() {
        let err = Circuit::new(
            vec!["a".into()],
            vec!["w".into()],
            vec![Gate::new(GateKind::And, &["a", "ghost"], "w")],
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::UndeclaredWire { .. }));
    }

    #[test]
    fn cycle_rejected() {
        let err = Circuit::new(
            vec!["a".into()],
            vec!["x".into()],
            vec![
                Gate::new(GateKind::And, &["a", "y"], "x"),
                Gate::new(GateKind::Not, &["x"], "y"),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::Cycle(_)));
    }

    #[test]
    fn topo_keeps_declaration_order_when_already_sorted() {
        let c = Circuit::new(
            vec!["a".into()],
            vec!["y".into()],
            vec![
                Gate::new(GateKind::Not, &["a"], "x"),
                Gate::new(GateKind::Not, &["x"], "y"),
            ],
        )
        .unwrap();
        assert_eq!(c.topo_order(), &[0, 1]);
    }

    #[test]
    fn topo_sorts_reversed_full_adder() {
        // Same adder, gates declared output-first.
        let c = Circuit::new(
            vec!["i1".into(), "i2".into(), "ci".into()],
            vec!["sigma".into(), "co".into()],
            vec![
                Gate::new(GateKind::Or, &["z1", "z3"], "co"),
                Gate::new(GateKind::Xor, &["z2", "ci"], "sigma"),
                Gate::new(GateKind::And, &["z2", "ci"], "z3"),
                Gate::new(GateKind::Xor, &["i1", "i2"], "z2"),
                Gate::new(GateKind::And, &["i1", "i2"], "z1"),
            ],
        )
        .unwrap();
        let pos: HashMap<&str, usize> = c
            .topo_gates()
            .enumerate()
            .map(|(i, g)| (g.output.as_str(), i))
            .collect();
        // Both half-adder gates of the first stage precede the second stage.
        assert!(pos["z2"] < pos["z3"]);
        assert!(pos["z2"] < pos["sigma"]);
        assert!(pos["z1"] < pos["co"]);
        assert!(pos["z3"] < pos["co"]);
        // Dependency predicate holds pairwise.
        for (i, g) in c.topo_gates().enumerate() {
            for input in &g.inputs {
                if let Some(d) = c.driver_of(input) {
                    let dpos = c.topo_order().iter().position(|&x| x == d).unwrap();
                    assert!(dpos < i);
                }
            }
        }
    }

    #[test]
    fn missing_input_binding_is_an_error() {
        let c = full_adder();
        let alpha = Assignment::from_pairs([("i1", false), ("i2", false)]);
        assert_eq!(c.evaluate(&alpha), Err(EvalError::MissingInput("ci".into())));
    }

    #[test]
    fn assignment_parse_roundtrip() {
        let a = Assignment::parse("i1=0, i2=1,ci=1").unwrap();
        assert_eq!(a.get("i1"), Some(false));
        assert_eq!(a.get("i2"), Some(true));
        assert_eq!(a.get("ci"), Some(true));
        assert!(Assignment::parse("i1=2").is_err());
        assert!(Assignment::parse("i1=0,i1=1").is_err());
        assert!(Assignment::parse("=1").is_err());
    }

    #[test]
    fn assignment_json_uses_zero_one() {
        let a = Assignment::from_pairs([("x", true), ("y", false)]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"x":1,"y":0}"#);
        let back: Assignment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
