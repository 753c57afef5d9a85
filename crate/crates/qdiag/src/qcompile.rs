//! Compilation of switching circuits into reversible quantum oracles.
//!
//! Each primary input (including assumable fault inputs) gets one qubit;
//! each gate gets a fresh ancilla prepared in a gadget-specific basis state.
//! On every computational basis input the compiled program leaves the input
//! qubits untouched and each ancilla holding its gate's classical output, so
//! the oracle acts as a permutation on basis states.
//!
//! Gadgets:
//!
//! * NOT — ancilla `|1⟩`, `CNOT(in → anc)`
//! * AND — ancilla `|0⟩`, `CCNOT(in1, in2 → anc)`
//! * XOR — ancilla `|0⟩`, `CNOT(in1 → anc)`, `CNOT(in2 → anc)`
//! * OR  — ancilla `|1⟩`, `X` both inputs, `CCNOT(in1, in2 → anc)`, `X`
//!   both inputs again to restore them for downstream fan-out
//!
//! The full diagnosis circuit pins the known inputs with the observation,
//! prefixes every unknown (assumable) input with a Hadamard, reduces the
//! observed outputs to a single combined wire, and marks that wire's qubit
//! for measurement.

use crate::faultlab::FaultCircuit;
use crate::netlist::{Assignment, Circuit, Gate, GateKind};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

/// Default qubit budget, sized for dense statevector memory.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// One gate application. Controls are always distinct from the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumGate {
    X { target: usize },
    H { target: usize },
    Cnot { control: usize, target: usize },
    Ccnot { controls: [usize; 2], target: usize },
}

impl QuantumGate {
    pub fn target(&self) -> usize {
        match *self {
            QuantumGate::X { target }
            | QuantumGate::H { target }
            | QuantumGate::Cnot { target, .. }
            | QuantumGate::Ccnot { target, .. } => target,
        }
    }

    pub fn controls(&self) -> &[usize] {
        match self {
            QuantumGate::X { .. } | QuantumGate::H { .. } => &[],
            QuantumGate::Cnot { control, .. } => std::slice::from_ref(control),
            QuantumGate::Ccnot { controls, .. } => controls,
        }
    }

    /// Highest qubit index the gate touches.
    pub fn max_qubit(&self) -> usize {
        self.controls()
            .iter()
            .copied()
            .chain(std::iter::once(self.target()))
            .max()
            .expect("every gate has a target")
    }
}

/// An ordered gate program over labeled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    qubit_count: usize,
    labels: Vec<String>,
    init: Vec<bool>,
    program: Vec<QuantumGate>,
    wire_map: BTreeMap<String, usize>,
    fault_qubits: Vec<usize>,
    output_qubit: Option<usize>,
}

impl QuantumCircuit {
    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Wire label carried by each qubit, in qubit order: primary inputs
    /// first (fault inputs among them, in F order), then gate ancillas in
    /// topological order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Initial basis value per qubit; a set bit is prepared with an X gate.
    pub fn init(&self) -> &[bool] {
        &self.init
    }

    pub fn program(&self) -> &[QuantumGate] {
        &self.program
    }

    /// Qubit holding the final value of `wire`.
    pub fn qubit_of(&self, wire: &str) -> Option<usize> {
        self.wire_map.get(wire).copied()
    }

    /// Qubits carrying assumable inputs, in fault order.
    pub fn fault_qubits(&self) -> &[usize] {
        &self.fault_qubits
    }

    /// Qubit carrying the combined observation output, in diagnosis
    /// circuits.
    pub fn output_qubit(&self) -> Option<usize> {
        self.output_qubit
    }

    pub fn hadamard_count(&self) -> usize {
        self.program
            .iter()
            .filter(|g| matches!(g, QuantumGate::H { .. }))
            .count()
    }

    /// Program plus initialization X gates, the cost law checked in tests.
    pub fn total_gate_count(&self) -> usize {
        self.program.len() + self.init.iter().filter(|&&b| b).count()
    }

    /// OpenQASM 2.0 text of the circuit, for cross-checking in external
    /// simulators. Export only; there is no import path.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        writeln!(out, "OPENQASM 2.0;").unwrap();
        writeln!(out, "include \"qelib1.inc\";").unwrap();
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(out, "// q[{i}] = {label}").unwrap();
        }
        writeln!(out, "qreg q[{}];", self.qubit_count).unwrap();
        let measured = self.measured_qubits();
        writeln!(out, "creg c[{}];", measured.len()).unwrap();
        for (i, &bit) in self.init.iter().enumerate() {
            if bit {
                writeln!(out, "x q[{i}];").unwrap();
            }
        }
        for gate in &self.program {
            match *gate {
                QuantumGate::X { target } => writeln!(out, "x q[{target}];").unwrap(),
                QuantumGate::H { target } => writeln!(out, "h q[{target}];").unwrap(),
                QuantumGate::Cnot { control, target } => {
                    writeln!(out, "cx q[{control}],q[{target}];").unwrap()
                }
                QuantumGate::Ccnot { controls, target } => {
                    writeln!(out, "ccx q[{}],q[{}],q[{target}];", controls[0], controls[1])
                        .unwrap()
                }
            }
        }
        for (k, &q) in measured.iter().enumerate() {
            writeln!(out, "measure q[{q}] -> c[{k}];").unwrap();
        }
        out
    }

    /// Fault qubits then the combined output qubit; all qubits when the
    /// circuit is a bare oracle.
    pub fn measured_qubits(&self) -> Vec<usize> {
        if self.fault_qubits.is_empty() && self.output_qubit.is_none() {
            return (0..self.qubit_count).collect();
        }
        let mut qs = self.fault_qubits.clone();
        if let Some(o) = self.output_qubit {
            qs.push(o);
        }
        qs
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("oracle needs {needed} qubits, over the cap of {cap}")]
    QubitBudget { needed: usize, cap: usize },
    #[error("output `{0}` has no binding in beta")]
    MissingOutput(String),
    #[error("`{0}` is bound in alpha but is not a primary input")]
    NotAnInput(String),
    #[error("alpha must not bind the assumable input `{0}`")]
    BindsFault(String),
    #[error("input `{0}` has no binding in alpha")]
    MissingInput(String),
}

/// Compiles a circuit into a reversible oracle at the default qubit cap.
pub fn make_oracle(c: &Circuit) -> Result<QuantumCircuit, CompileError> {
    make_oracle_with_cap(c, DEFAULT_QUBIT_CAP)
}

/// Compiles a circuit into a reversible oracle.
///
/// Qubit order: primary inputs in declaration order, then one ancilla per
/// gate in topological order. The returned circuit has no Hadamards and no
/// measurement marks; it is the bare permutation oracle.
pub fn make_oracle_with_cap(c: &Circuit, cap: usize) -> Result<QuantumCircuit, CompileError> {
    let needed = c.inputs().len() + c.gate_count();
    if needed > cap {
        return Err(CompileError::QubitBudget { needed, cap });
    }

    let mut labels: Vec<String> = Vec::with_capacity(needed);
    let mut init = Vec::with_capacity(needed);
    let mut wire_map = BTreeMap::new();
    for input in c.inputs() {
        wire_map.insert(input.clone(), labels.len());
        labels.push(input.clone());
        init.push(false);
    }

    let mut program = Vec::new();
    for gate in c.topo_gates() {
        let ancilla = labels.len();
        labels.push(gate.output.clone());
        init.push(ancilla_init(gate.kind));
        emit_gadget(gate, &wire_map, ancilla, &mut program);
        wire_map.insert(gate.output.clone(), ancilla);
    }

    Ok(QuantumCircuit {
        qubit_count: needed,
        labels,
        init,
        program,
        wire_map,
        fault_qubits: Vec::new(),
        output_qubit: None,
    })
}

fn ancilla_init(kind: GateKind) -> bool {
    matches!(kind, GateKind::Not | GateKind::Or)
}

fn emit_gadget(
    gate: &Gate,
    wire_map: &BTreeMap<String, usize>,
    ancilla: usize,
    program: &mut Vec<QuantumGate>,
) {
    let q = |wire: &str| wire_map[wire];
    match gate.kind {
        GateKind::Not => program.push(QuantumGate::Cnot {
            control: q(&gate.inputs[0]),
            target: ancilla,
        }),
        GateKind::And => {
            let (a, b) = (q(&gate.inputs[0]), q(&gate.inputs[1]));
            if a == b {
                // AND(w, w) = w: plain copy.
                program.push(QuantumGate::Cnot { control: a, target: ancilla });
            } else {
                program.push(QuantumGate::Ccnot { controls: [a, b], target: ancilla });
            }
        }
        GateKind::Xor => {
            let (a, b) = (q(&gate.inputs[0]), q(&gate.inputs[1]));
            if a == b {
                // XOR(w, w) = 0: the |0⟩ ancilla is already the result.
            } else {
                program.push(QuantumGate::Cnot { control: a, target: ancilla });
                program.push(QuantumGate::Cnot { control: b, target: ancilla });
            }
        }
        GateKind::Or => {
            let (a, b) = (q(&gate.inputs[0]), q(&gate.inputs[1]));
            if a == b {
                // OR(w, w) = w: ancilla starts |1⟩, flip to w with X ∘ CNOT.
                program.push(QuantumGate::Cnot { control: a, target: ancilla });
                program.push(QuantumGate::X { target: ancilla });
            } else {
                program.push(QuantumGate::X { target: a });
                program.push(QuantumGate::X { target: b });
                program.push(QuantumGate::Ccnot { controls: [a, b], target: ancilla });
                program.push(QuantumGate::X { target: a });
                program.push(QuantumGate::X { target: b });
            }
        }
    }
}

/// Reduces a multi-output circuit to a single output that is 1 exactly when
/// the outputs equal `beta`: outputs observed 0 are inverted, then all are
/// folded through a left-leaning AND chain.
pub fn combine_outputs(c: &Circuit, beta: &Assignment) -> Result<Circuit, CompileError> {
    for output in c.outputs() {
        if !beta.contains(output) {
            return Err(CompileError::MissingOutput(output.clone()));
        }
    }

    let mut gates = c.gates().to_vec();
    let mut taken = BTreeSet::new();
    let mut terms = Vec::with_capacity(c.outputs().len());
    for output in c.outputs() {
        if beta.get(output).expect("checked above") {
            terms.push(output.clone());
        } else {
            let inverted = c.fresh_wire(&format!("{output}_n"), &taken);
            taken.insert(inverted.clone());
            gates.push(Gate {
                kind: GateKind::Not,
                inputs: vec![output.clone()],
                output: inverted.clone(),
            });
            terms.push(inverted);
        }
    }

    let mut acc = terms[0].clone();
    for (k, term) in terms.iter().enumerate().skip(1) {
        let name = if k + 1 == terms.len() { "obs" } else { &format!("obs{k}") };
        let wire = c.fresh_wire(name, &taken);
        taken.insert(wire.clone());
        gates.push(Gate {
            kind: GateKind::And,
            inputs: vec![acc, term.clone()],
            output: wire.clone(),
        });
        acc = wire;
    }

    Ok(Circuit::new(c.inputs().to_vec(), vec![acc], gates)
        .expect("combining outputs preserves circuit invariants"))
}

/// Builds the full diagnosis circuit for a circuit whose unknown inputs are
/// exactly those `alpha` leaves unbound.
///
/// Known inputs are initialized to their observed bits, every unknown input
/// is prefixed with a Hadamard and recorded as a fault qubit, and the
/// combined-output qubit is marked for measurement.
pub fn diagnosis_circuit_from(
    c: &Circuit,
    alpha: &Assignment,
    beta: &Assignment,
    cap: usize,
) -> Result<QuantumCircuit, CompileError> {
    for (wire, _) in alpha.iter() {
        if !c.inputs().iter().any(|i| i == wire) {
            return Err(CompileError::NotAnInput(wire.to_string()));
        }
    }
    let combined = combine_outputs(c, beta)?;
    let mut oracle = make_oracle_with_cap(&combined, cap)?;

    let mut free = Vec::new();
    for (idx, input) in combined.inputs().iter().enumerate() {
        match alpha.get(input) {
            Some(bit) => oracle.init[idx] = bit,
            None => free.push(idx),
        }
    }

    let mut program = Vec::with_capacity(free.len() + oracle.program.len());
    program.extend(free.iter().map(|&target| QuantumGate::H { target }));
    program.append(&mut oracle.program);
    oracle.program = program;
    oracle.fault_qubits = free;
    oracle.output_qubit = Some(
        oracle
            .qubit_of(&combined.outputs()[0])
            .expect("combined output wire is mapped"),
    );
    Ok(oracle)
}

/// Builds the diagnosis circuit for a fault-augmented circuit at the
/// default qubit cap: `alpha` pins the original inputs, the fault inputs go
/// into superposition.
pub fn build_diagnosis_circuit(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
) -> Result<QuantumCircuit, CompileError> {
    build_diagnosis_circuit_with_cap(fc, alpha, beta, DEFAULT_QUBIT_CAP)
}

pub fn build_diagnosis_circuit_with_cap(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
    cap: usize,
) -> Result<QuantumCircuit, CompileError> {
    for fault in fc.fault_inputs() {
        if alpha.contains(fault) {
            return Err(CompileError::BindsFault(fault.clone()));
        }
    }
    for input in fc.original_inputs() {
        if !alpha.contains(input) {
            return Err(CompileError::MissingInput(input.clone()));
        }
    }
    diagnosis_circuit_from(fc.circuit(), alpha, beta, cap)
}
