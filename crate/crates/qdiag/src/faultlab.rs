//! Stuck-at-1 fault augmentation and diagnosis scenarios.
//!
//! A fault is modeled by inserting an OR gate at a gate output: the guarded
//! wire keeps its name, the gate's real result moves to an internal wire,
//! and the OR's second operand becomes a fresh assumable primary input named
//! `<wire>_sa1`. Setting every assumable input to 0 restores the original
//! circuit; setting `<wire>_sa1` forces the wire to 1 regardless of drivers.
//!
//! Faults are placed at gate outputs only. Stuck-at-0 (an AND with a negated
//! assumable input) would be the symmetric rewriting; it is not implemented.

use crate::netlist::{Assignment, Circuit, Gate, GateKind};
use crate::util::substream_seed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// A circuit augmented with assumable fault inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultCircuit {
    circuit: Circuit,
    fault_inputs: Vec<String>,
    origin: BTreeMap<String, String>,
}

/// One diagnosis problem instance: known inputs, an injected fault set, and
/// the outputs it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub alpha: Assignment,
    pub gamma: Assignment,
    pub beta: Assignment,
    /// Substream seed this scenario was drawn from; replayable in isolation.
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaultError {
    #[error("no binding for primary input `{0}`")]
    MissingInput(String),
    #[error("no binding for fault input `{0}`")]
    MissingFault(String),
    #[error(transparent)]
    Eval(#[from] crate::netlist::EvalError),
}

/// Rewrites every gate output of `c` with a stuck-at-1 fault point.
///
/// Fault inputs are appended to the input list in topological gate order,
/// so augmenting the same circuit always yields the same qubit and CNF
/// variable layouts downstream.
pub fn augment_stuck_at_1(c: &Circuit) -> FaultCircuit {
    let mut taken = BTreeSet::new();
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    let mut fault_of: BTreeMap<String, String> = BTreeMap::new();
    for gate in c.gates() {
        let inner = c.fresh_wire(&format!("{}_ok", gate.output), &taken);
        taken.insert(inner.clone());
        renamed.insert(gate.output.clone(), inner);
        let fault = c.fresh_wire(&format!("{}_sa1", gate.output), &taken);
        taken.insert(fault.clone());
        fault_of.insert(gate.output.clone(), fault);
    }

    let fault_inputs: Vec<String> = c
        .topo_gates()
        .map(|g| fault_of[&g.output].clone())
        .collect();

    let mut gates = Vec::with_capacity(c.gate_count() * 2);
    for gate in c.gates() {
        let inner = renamed[&gate.output].clone();
        gates.push(Gate {
            kind: gate.kind,
            inputs: gate.inputs.clone(),
            output: inner.clone(),
        });
        gates.push(Gate {
            kind: GateKind::Or,
            inputs: vec![inner, fault_of[&gate.output].clone()],
            output: gate.output.clone(),
        });
    }

    let inputs: Vec<String> = c
        .inputs()
        .iter()
        .cloned()
        .chain(fault_inputs.iter().cloned())
        .collect();
    let circuit = Circuit::new(inputs, c.outputs().to_vec(), gates)
        .expect("augmentation preserves circuit invariants");

    let origin = fault_of
        .into_iter()
        .map(|(wire, fault)| (fault, wire))
        .collect();
    FaultCircuit {
        circuit,
        fault_inputs,
        origin,
    }
}

impl FaultCircuit {
    /// The augmented netlist, whose primary inputs are the original inputs
    /// followed by the fault inputs.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// The ordered set F of assumable fault inputs.
    pub fn fault_inputs(&self) -> &[String] {
        &self.fault_inputs
    }

    /// The original gate-output wire guarded by `fault`.
    pub fn origin_of(&self, fault: &str) -> Option<&str> {
        self.origin.get(fault).map(|s| s.as_str())
    }

    /// Primary inputs of the circuit before augmentation.
    pub fn original_inputs(&self) -> &[String] {
        let n = self.circuit.inputs().len() - self.fault_inputs.len();
        &self.circuit.inputs()[..n]
    }

    /// The all-healthy fault assignment.
    pub fn no_faults(&self) -> Assignment {
        Assignment::from_pairs(self.fault_inputs.iter().map(|f| (f.as_str(), false)))
    }

    /// Fault assignment setting exactly the named faults.
    pub fn faults_from<'a>(&self, active: impl IntoIterator<Item = &'a str>) -> Assignment {
        let active: BTreeSet<&str> = active.into_iter().collect();
        Assignment::from_pairs(
            self.fault_inputs
                .iter()
                .map(|f| (f.as_str(), active.contains(f.as_str()))),
        )
    }

    fn check_coverage(&self, alpha: &Assignment, gamma: &Assignment) -> Result<(), FaultError> {
        for input in self.original_inputs() {
            if !alpha.contains(input) {
                return Err(FaultError::MissingInput(input.clone()));
            }
        }
        for fault in &self.fault_inputs {
            if !gamma.contains(fault) {
                return Err(FaultError::MissingFault(fault.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Wraps a circuit with an empty fault list so encoding tests can feed a
    /// plain netlist through the diagnosis entry points.
    pub(crate) fn wrap_plain(circuit: Circuit) -> FaultCircuit {
        FaultCircuit {
            circuit,
            fault_inputs: Vec::new(),
            origin: BTreeMap::new(),
        }
    }
}

/// Evaluates the augmented circuit under `alpha ∪ gamma` and returns the
/// primary-output assignment.
pub fn inject_and_observe(
    fc: &FaultCircuit,
    alpha: &Assignment,
    gamma: &Assignment,
) -> Result<Assignment, FaultError> {
    fc.check_coverage(alpha, gamma)?;
    Ok(fc.circuit.evaluate_outputs(&alpha.union(gamma))?)
}

/// Draws `count` reproducible scenarios.
///
/// Scenario `i` uses the substream seed derived from `(seed, i)`. Its fault
/// cardinality is uniform on `1..=max_cardinality`, the fault subset uniform
/// at that cardinality, and each original input an independent fair coin.
pub fn random_scenarios(
    fc: &FaultCircuit,
    count: usize,
    max_cardinality: usize,
    seed: u64,
) -> Vec<Scenario> {
    assert!(count >= 1, "count must be at least 1");
    assert!(
        (1..=fc.fault_inputs.len()).contains(&max_cardinality),
        "max_cardinality must be in 1..=|F|"
    );
    (0..count)
        .map(|index| {
            let sub = substream_seed(seed, index as u64);
            let mut rng = ChaCha12Rng::seed_from_u64(sub);
            let alpha = Assignment::from_pairs(
                fc.original_inputs()
                    .iter()
                    .map(|name| (name.as_str(), rng.gen::<bool>())),
            );
            let cardinality = rng.gen_range(1..=max_cardinality);
            let mut picks: Vec<usize> = (0..fc.fault_inputs.len()).collect();
            picks.shuffle(&mut rng);
            picks.truncate(cardinality);
            let gamma = Assignment::from_pairs(
                fc.fault_inputs
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (f.as_str(), picks.contains(&i))),
            );
            let beta = inject_and_observe(fc, &alpha, &gamma)
                .expect("generated scenario covers all inputs");
            Scenario {
                alpha,
                gamma,
                beta,
                seed: sub,
            }
        })
        .collect()
}
