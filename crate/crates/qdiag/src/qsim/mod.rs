//! Dense statevector simulation of compiled quantum circuits.
//!
//! Amplitudes live in one contiguous complex vector of length `2^q`. Qubit
//! `k` owns bit `k` of the amplitude index; rendered bitstrings write qubit
//! 0 leftmost. The gate set (X, H, CNOT, CCNOT) needs no general matrix
//! products, so every gate is applied as a strided index-pair sweep.
//!
//! Readout comes in two first-class flavors: [`exact_distribution`] reads
//! marginal probabilities straight off the state, and [`StateVector::sample`]
//! draws seeded shots by inverse CDF. The module also hosts a
//! basis-enumeration fast path ([`basis`]) that never forms the `2^q`
//! vector; it doubles as an independent cross-check of the dense kernel and
//! as the scalability escape hatch for oracles too wide to hold in memory.

mod basis;

pub use basis::{enumerate_outcomes, propagate_basis, ExactOutcomes};

use crate::qcompile::{QuantumCircuit, QuantumGate};
use crate::util::substream_seed;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

/// Shot sampling uses this generator, seeded per run; recorded in result
/// artifacts next to the seed.
pub const GENERATOR_NAME: &str = "ChaCha12";

/// Normalization and distribution-sum tolerance.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for the `2^(-h/2)` amplitude pattern of diagnosis circuits.
pub const AMPLITUDE_PATTERN_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("{qubits} qubits exceed the statevector cap of {cap}")]
    CapExceeded { qubits: usize, cap: usize },
    #[error("gate touches qubit {qubit}, but the state has {qubits} qubits")]
    GateOutOfRange { qubit: usize, qubits: usize },
    #[error("basis propagation hit a non-classical gate (H)")]
    NonClassicalGate,
    #[error("Hadamards must form a prefix on distinct qubits")]
    MalformedSuperposition,
    #[error("debug dump is limited to 10 qubits, state has {0}")]
    DumpTooLarge(usize),
}

/// Dense complex amplitude vector over `2^q` basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
    qubits: usize,
}

impl StateVector {
    /// The all-zero basis state.
    pub fn zero(qubits: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { amps, qubits }
    }

    /// A single computational basis state; bit `k` of `index` is qubit `k`.
    pub fn basis(qubits: usize, index: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { amps, qubits }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the basis state described by per-qubit bits.
    pub fn amplitude_of(&self, bits: &[bool]) -> Complex64 {
        let index: usize = bits
            .iter()
            .enumerate()
            .map(|(k, &b)| (b as usize) << k)
            .sum();
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &QuantumGate) -> Result<(), SimError> {
        let max = gate.max_qubit();
        if max >= self.qubits {
            return Err(SimError::GateOutOfRange {
                qubit: max,
                qubits: self.qubits,
            });
        }
        let tmask = 1usize << gate.target();
        let cmask: usize = gate.controls().iter().map(|&c| 1usize << c).sum();
        match gate {
            QuantumGate::H { .. } => {
                for i in 0..self.amps.len() {
                    if i & tmask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | tmask];
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | tmask] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            _ => {
                // X and its controlled forms permute basis states.
                for i in 0..self.amps.len() {
                    if i & tmask == 0 && i & cmask == cmask {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
        }
        #[cfg(debug_assertions)]
        if self.qubits <= 12 {
            debug_assert!((self.norm_sqr() - 1.0).abs() < NORM_TOL);
        }
        Ok(())
    }

    /// Marginal outcome probabilities over a qubit subset.
    ///
    /// Key bit `j` holds the measured value of `qubits[j]`; entries with
    /// zero mass are omitted. The values sum to 1 within [`NORM_TOL`].
    pub fn exact_distribution(&self, qubits: &[usize]) -> BTreeMap<u64, f64> {
        assert!(!qubits.is_empty(), "measured subset must be non-empty");
        let mut dist = BTreeMap::new();
        for (index, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut key = 0u64;
            for (j, &q) in qubits.iter().enumerate() {
                key |= (((index >> q) & 1) as u64) << j;
            }
            *dist.entry(key).or_insert(0.0) += p;
        }
        dist
    }

    /// `shots` seeded draws from [`Self::exact_distribution`].
    pub fn sample(&self, qubits: &[usize], shots: u64, seed: u64) -> ShotHistogram {
        sample_distribution(&self.exact_distribution(qubits), qubits.len(), shots, seed)
    }

    /// JSON dump (index, real, imaginary) for small states.
    pub fn debug_json(&self) -> Result<serde_json::Value, SimError> {
        if self.qubits > 10 {
            return Err(SimError::DumpTooLarge(self.qubits));
        }
        let entries: Vec<serde_json::Value> = self
            .amps
            .iter()
            .enumerate()
            .map(|(index, a)| {
                serde_json::json!({"index": index, "real": a.re, "imaginary": a.im})
            })
            .collect();
        Ok(serde_json::Value::Array(entries))
    }
}

/// Runs a compiled circuit from its declared initialization at the default
/// 26-qubit cap.
pub fn run_statevector(qc: &QuantumCircuit) -> Result<StateVector, SimError> {
    run_statevector_capped(qc, crate::qcompile::DEFAULT_QUBIT_CAP)
}

/// Runs a compiled circuit: prepares `|0..0⟩`, applies the per-qubit
/// initialization X gates, then the program in order.
pub fn run_statevector_capped(qc: &QuantumCircuit, cap: usize) -> Result<StateVector, SimError> {
    if qc.qubit_count() > cap {
        return Err(SimError::CapExceeded {
            qubits: qc.qubit_count(),
            cap,
        });
    }
    let init_index: usize = qc
        .init()
        .iter()
        .enumerate()
        .map(|(k, &b)| (b as usize) << k)
        .sum();
    let mut state = StateVector::basis(qc.qubit_count(), init_index);
    for gate in qc.program() {
        state.apply_gate(gate)?;
    }
    #[cfg(debug_assertions)]
    debug_assert!((state.norm_sqr() - 1.0).abs() < NORM_TOL);
    Ok(state)
}

/// Measured-outcome counts over a qubit subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShotHistogram {
    /// Outcome key → occurrences. Key bit `j` is measured qubit `j` of the
    /// subset the histogram was taken over.
    pub counts: BTreeMap<u64, u64>,
    pub shots: u64,
    /// Number of measured qubits, for rendering keys.
    pub width: usize,
}

impl ShotHistogram {
    pub fn frequency(&self, key: u64) -> f64 {
        *self.counts.get(&key).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// Renders a key with measured qubit 0 leftmost.
    pub fn render_key(&self, key: u64) -> String {
        render_bits(key, self.width)
    }
}

pub(crate) fn render_bits(key: u64, width: usize) -> String {
    (0..width)
        .map(|j| if (key >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse-CDF sampling from an outcome distribution, seeded and
/// reproducible. Outcomes are cumulated in ascending key order.
pub fn sample_distribution(
    dist: &BTreeMap<u64, f64>,
    width: usize,
    shots: u64,
    seed: u64,
) -> ShotHistogram {
    assert!(shots >= 1, "need at least one shot");
    let keys: Vec<u64> = dist.keys().copied().collect();
    let mut cumulative = Vec::with_capacity(keys.len());
    let mut acc = 0.0;
    for &k in &keys {
        acc += dist[&k];
        cumulative.push(acc);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(keys.len() - 1);
        *counts.entry(keys[idx]).or_insert(0) += 1;
    }
    ShotHistogram {
        counts,
        shots,
        width,
    }
}

/// Substream seed for sharded sampling; shard `i` of master `seed` draws
/// from an independent stream.
pub fn shard_seed(seed: u64, shard: u64) -> u64 {
    substream_seed(seed, shard)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_bench, Assignment};
    use crate::qcompile::{diagnosis_circuit_from, QuantumGate, DEFAULT_QUBIT_CAP};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn hadamard_on_zero_gives_equal_superposition() {
        let mut s = StateVector::zero(1);
        s.apply_gate(&QuantumGate::H { target: 0 }).unwrap();
        assert!(close(s.amplitudes()[0].re, FRAC_1_SQRT_2, NORM_TOL));
        assert!(close(s.amplitudes()[1].re, FRAC_1_SQRT_2, NORM_TOL));
        assert_eq!(s.amplitudes()[0].im, 0.0);
    }

    #[test]
    fn x_is_an_involution() {
        let mut s = StateVector::zero(2);
        s.apply_gate(&QuantumGate::H { target: 0 }).unwrap();
        s.apply_gate(&QuantumGate::Cnot { control: 0, target: 1 }).unwrap();
        let before = s.clone();
        s.apply_gate(&QuantumGate::X { target: 1 }).unwrap();
        s.apply_gate(&QuantumGate::X { target: 1 }).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < NORM_TOL);
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        // |10⟩ in qubit-0-leftmost labels: qubit 0 = 1, qubit 1 = 0.
        let mut s = StateVector::basis(2, 0b01);
        s.apply_gate(&QuantumGate::Cnot { control: 0, target: 1 }).unwrap();
        // Expect |11⟩ = index 0b11.
        assert!(close(s.amplitudes()[0b11].re, 1.0, NORM_TOL));
    }

    #[test]
    fn all_four_gates_are_self_inverse() {
        let gates = [
            QuantumGate::X { target: 2 },
            QuantumGate::H { target: 1 },
            QuantumGate::Cnot { control: 0, target: 2 },
            QuantumGate::Ccnot { controls: [0, 1], target: 2 },
        ];
        // A non-trivial state to start from.
        let mut s = StateVector::zero(3);
        s.apply_gate(&QuantumGate::H { target: 0 }).unwrap();
        s.apply_gate(&QuantumGate::Cnot { control: 0, target: 1 }).unwrap();
        s.apply_gate(&QuantumGate::X { target: 2 }).unwrap();
        for gate in gates {
            let before = s.clone();
            s.apply_gate(&gate).unwrap();
            assert!(close(s.norm_sqr(), 1.0, NORM_TOL));
            s.apply_gate(&gate).unwrap();
            for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                assert!((a - b).norm() < NORM_TOL);
            }
        }
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let mut s = StateVector::zero(1);
        assert_eq!(
            s.apply_gate(&QuantumGate::X { target: 3 }),
            Err(SimError::GateOutOfRange { qubit: 3, qubits: 1 })
        );
    }

    fn inverter_diagnosis() -> crate::qcompile::QuantumCircuit {
        let c = parse_bench("INPUT(i)\nOUTPUT(o)\no = NOT(i)\n").unwrap();
        diagnosis_circuit_from(
            &c,
            &Assignment::new(),
            &Assignment::from_pairs([("o", true)]),
            DEFAULT_QUBIT_CAP,
        )
        .unwrap()
    }

    #[test]
    fn inverter_walkthrough_state() {
        let qc = inverter_diagnosis();
        let state = run_statevector(&qc).unwrap();
        // (|01⟩ + |10⟩) / √2, labels qubit-0-leftmost.
        let expect = [
            (vec![false, true], FRAC_1_SQRT_2),
            (vec![true, false], FRAC_1_SQRT_2),
            (vec![false, false], 0.0),
            (vec![true, true], 0.0),
        ];
        for (bits, want) in expect {
            let amp = state.amplitude_of(&bits);
            assert!(close(amp.re, want, NORM_TOL), "bits {bits:?}");
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn empty_program_all_zero_init_is_ground_state() {
        // Pass-through with a bound input and output observed 1: the
        // combiner adds nothing, so no H and no gates at all.
        let c = parse_bench("INPUT(a)\nOUTPUT(a)\n").unwrap();
        let qc = diagnosis_circuit_from(
            &c,
            &Assignment::from_pairs([("a", false)]),
            &Assignment::from_pairs([("a", true)]),
            DEFAULT_QUBIT_CAP,
        )
        .unwrap();
        assert!(qc.program().is_empty());
        let state = run_statevector(&qc).unwrap();
        assert!(close(state.amplitudes()[0].re, 1.0, NORM_TOL));
    }

    #[test]
    fn inverter_exact_distribution() {
        let qc = inverter_diagnosis();
        let state = run_statevector(&qc).unwrap();
        let dist = state.exact_distribution(&[0, 1]);
        // Outcomes 01 (key 0b10) and 10 (key 0b01), each 1/2.
        assert_eq!(dist.len(), 2);
        assert!(close(dist[&0b10], 0.5, NORM_TOL));
        assert!(close(dist[&0b01], 0.5, NORM_TOL));
        let total: f64 = dist.values().sum();
        assert!(close(total, 1.0, NORM_TOL));
    }

    #[test]
    fn full_subset_distribution_is_squared_magnitudes() {
        let mut s = StateVector::zero(2);
        s.apply_gate(&QuantumGate::H { target: 0 }).unwrap();
        s.apply_gate(&QuantumGate::Cnot { control: 0, target: 1 }).unwrap();
        let dist = s.exact_distribution(&[0, 1]);
        assert!(close(dist[&0b00], 0.5, NORM_TOL));
        assert!(close(dist[&0b11], 0.5, NORM_TOL));
        assert_eq!(dist.get(&0b01), None);
    }

    fn and_gate_diagnosis() -> crate::qcompile::QuantumCircuit {
        let c = parse_bench("INPUT(i1)\nINPUT(i2)\nOUTPUT(y)\ny = AND(i1, i2)\n").unwrap();
        diagnosis_circuit_from(
            &c,
            &Assignment::new(),
            &Assignment::from_pairs([("y", false)]),
            DEFAULT_QUBIT_CAP,
        )
        .unwrap()
    }

    #[test]
    fn and_gate_diagnosis_distribution() {
        // Four equally likely classical paths with a1 = i1∧i2, a_o = ¬a1.
        let qc = and_gate_diagnosis();
        let state = run_statevector(&qc).unwrap();
        let dist = state.exact_distribution(&[0, 1, 2, 3]);
        assert_eq!(dist.len(), 4);
        for (i1, i2) in [(0u64, 0u64), (0, 1), (1, 0), (1, 1)] {
            let a1 = i1 & i2;
            let ao = 1 - a1;
            let key = i1 | (i2 << 1) | (a1 << 2) | (ao << 3);
            assert!(close(dist[&key], 0.25, NORM_TOL), "i1={i1} i2={i2}");
        }
        // Marginal over (i1, a_o): {(0,1): 1/2, (1,1): 1/4, (1,0): 1/4}.
        let marginal = state.exact_distribution(&[0, 3]);
        assert!(close(marginal[&0b10], 0.5, NORM_TOL));
        assert!(close(marginal[&0b11], 0.25, NORM_TOL));
        assert!(close(marginal[&0b01], 0.25, NORM_TOL));
    }

    #[test]
    fn point_mass_sampling_fills_one_bin() {
        let s = StateVector::zero(4);
        let hist = s.sample(&[0, 1, 2, 3], 1000, 42);
        assert_eq!(hist.counts.len(), 1);
        assert_eq!(hist.counts[&0], 1000);
        assert_eq!(hist.shots, 1000);
    }

    #[test]
    fn sampling_is_reproducible_and_seed_sensitive() {
        let qc = inverter_diagnosis();
        let state = run_statevector(&qc).unwrap();
        let a = state.sample(&[0, 1], 10_000, 7);
        let b = state.sample(&[0, 1], 10_000, 7);
        assert_eq!(a, b);
        let c = state.sample(&[0, 1], 10_000, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn inverter_sampling_within_binomial_bound() {
        let qc = inverter_diagnosis();
        let state = run_statevector(&qc).unwrap();
        let n = 100_000u64;
        let hist = state.sample(&[0, 1], n, 20260809);
        let sigma = (n as f64 * 0.25).sqrt();
        for key in [0b10u64, 0b01u64] {
            let count = hist.counts[&key] as f64;
            assert!(
                (count - n as f64 / 2.0).abs() < 3.0 * sigma,
                "count {count} outside 3σ"
            );
        }
    }

    #[test]
    fn histogram_key_rendering_is_qubit0_leftmost() {
        let hist = ShotHistogram {
            counts: BTreeMap::from([(0b01u64, 1)]),
            shots: 1,
            width: 2,
        };
        assert_eq!(hist.render_key(0b01), "10");
        assert_eq!(hist.render_key(0b10), "01");
    }

    #[test]
    fn debug_dump_small_states_only() {
        let s = StateVector::zero(2);
        let dump = s.debug_json().unwrap();
        assert_eq!(dump.as_array().unwrap().len(), 4);
        assert_eq!(dump[0]["real"], 1.0);
        let big = StateVector::zero(11);
        assert_eq!(big.debug_json(), Err(SimError::DumpTooLarge(11)));
    }

    #[test]
    fn cap_is_enforced() {
        let c = parse_bench("INPUT(a)\nOUTPUT(a)\n").unwrap();
        let qc = diagnosis_circuit_from(
            &c,
            &Assignment::from_pairs([("a", false)]),
            &Assignment::from_pairs([("a", false)]),
            DEFAULT_QUBIT_CAP,
        )
        .unwrap();
        assert!(matches!(
            run_statevector_capped(&qc, 0),
            Err(SimError::CapExceeded { .. })
        ));
    }
}
