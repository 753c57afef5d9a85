//! Basis-enumeration fast path.
//!
//! Diagnosis circuits are a Hadamard prefix followed by a classical
//! permutation program. Instead of materializing the `2^q` amplitude
//! vector, this path enumerates the `2^h` settings of the Hadamard qubits
//! and pushes plain bits through the X/CNOT/CCNOT gates. Outcome
//! probabilities are exact dyadic rationals `count / 2^h`, which makes the
//! fast path both the equivalence oracle for the dense kernel and the way
//! to run oracles far beyond statevector memory.

use super::SimError;
use crate::qcompile::{QuantumCircuit, QuantumGate};
use std::collections::BTreeMap;

/// Exact outcome counts over a measured qubit subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcomes {
    /// Outcome key → number of Hadamard settings producing it. Key bit `j`
    /// is measured qubit `j` of the subset.
    pub counts: BTreeMap<u64, u64>,
    /// Total number of enumerated settings, `2^h`.
    pub total: u64,
    pub width: usize,
}

impl ExactOutcomes {
    /// Probabilities as exact dyadics `count / total`.
    pub fn probabilities(&self) -> BTreeMap<u64, f64> {
        self.counts
            .iter()
            .map(|(&k, &n)| (k, n as f64 / self.total as f64))
            .collect()
    }
}

/// Pushes one computational basis state through a classical gate program.
/// `bits` is indexed by qubit; H gates are rejected.
pub fn propagate_basis(program: &[QuantumGate], bits: &mut [bool]) -> Result<(), SimError> {
    for gate in program {
        let max = gate.max_qubit();
        if max >= bits.len() {
            return Err(SimError::GateOutOfRange {
                qubit: max,
                qubits: bits.len(),
            });
        }
        match *gate {
            QuantumGate::H { .. } => return Err(SimError::NonClassicalGate),
            QuantumGate::X { target } => bits[target] = !bits[target],
            QuantumGate::Cnot { control, target } => {
                if bits[control] {
                    bits[target] = !bits[target];
                }
            }
            QuantumGate::Ccnot { controls, target } => {
                if bits[controls[0]] && bits[controls[1]] {
                    bits[target] = !bits[target];
                }
            }
        }
    }
    Ok(())
}

/// Splits a diagnosis program into its Hadamard-prefix targets and the
/// classical remainder.
fn split_hadamard_prefix(qc: &QuantumCircuit) -> Result<(Vec<usize>, &[QuantumGate]), SimError> {
    let mut targets = Vec::new();
    let mut rest_from = 0;
    for (i, gate) in qc.program().iter().enumerate() {
        if let QuantumGate::H { target } = gate {
            if rest_from != i || targets.contains(target) {
                return Err(SimError::MalformedSuperposition);
            }
            targets.push(*target);
            rest_from = i + 1;
        }
    }
    Ok((targets, &qc.program()[rest_from..]))
}

/// Enumerates the measurement distribution of a diagnosis circuit exactly.
///
/// Every setting of the Hadamard qubits carries probability `2^(-h)`; the
/// classical remainder of the program maps it to one outcome. The result
/// matches `run_statevector` + `exact_distribution` on the same circuit and
/// subset, without ever allocating the amplitude vector.
pub fn enumerate_outcomes(
    qc: &QuantumCircuit,
    measured: &[usize],
) -> Result<ExactOutcomes, SimError> {
    assert!(!measured.is_empty(), "measured subset must be non-empty");
    let (h_qubits, classical) = split_hadamard_prefix(qc)?;
    let h = h_qubits.len();
    assert!(h <= 40, "enumeration over 2^{h} settings is not sensible");

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut bits = vec![false; qc.qubit_count()];
    for setting in 0..1u64 << h {
        bits.copy_from_slice(&vec![false; qc.qubit_count()]);
        for (k, &b) in qc.init().iter().enumerate() {
            bits[k] = b;
        }
        for (j, &q) in h_qubits.iter().enumerate() {
            bits[q] = (setting >> j) & 1 == 1;
        }
        propagate_basis(classical, &mut bits)?;
        let mut key = 0u64;
        for (j, &q) in measured.iter().enumerate() {
            key |= (bits[q] as u64) << j;
        }
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(ExactOutcomes {
        counts,
        total: 1u64 << h,
        width: measured.len(),
    })
}
