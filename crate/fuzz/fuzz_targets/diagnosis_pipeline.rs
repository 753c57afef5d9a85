#![no_main]

use libfuzzer_sys::fuzz_target;
use qdiag::diagnose::{quantum_diagnose, QuantumConfig};
use qdiag::faultlab::{augment_stuck_at_1, inject_and_observe};
use qdiag::netlist::{parse_bench, Assignment};
use qdiag::satdiag::circuit_health_sat;

// Differential target: on any parseable circuit small enough to enumerate,
// the SAT engine and the exact quantum engine must produce identical
// conditional fault probabilities for a consistent observation.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(circuit) = parse_bench(text) else {
        return;
    };
    if circuit.gate_count() == 0 || circuit.gate_count() > 7 || circuit.inputs().len() > 5 {
        return;
    }

    let fc = augment_stuck_at_1(&circuit);
    // Derive a deterministic observation from the input bytes.
    let mut h = 0u64;
    for &b in data {
        h = h.wrapping_mul(1099511628211).wrapping_add(b as u64);
    }
    let alpha = Assignment::from_pairs(
        fc.original_inputs()
            .iter()
            .enumerate()
            .map(|(k, n)| (n.as_str(), (h >> k) & 1 == 1)),
    );
    let gamma = Assignment::from_pairs(
        fc.fault_inputs()
            .iter()
            .enumerate()
            .map(|(k, f)| (f.as_str(), (h >> (k + 13)) & 1 == 1)),
    );
    let beta = inject_and_observe(&fc, &alpha, &gamma).expect("complete assignments");

    let sat = circuit_health_sat(&fc, &alpha, &beta, None)
        .expect("observation was produced by a real fault pattern");
    let est = quantum_diagnose(&fc, &alpha, &beta, &QuantumConfig::exact())
        .expect("within caps by the size guard");

    for fault in fc.fault_inputs() {
        let s = sat.probability_f64(fault).expect("fault counted");
        let q = est.probabilities[fault];
        assert!(
            (s - q).abs() <= 1e-9,
            "engines disagree on {fault}: sat {s} vs quantum {q}"
        );
    }
    let mass = sat.diagnoses as f64 / (1u64 << fc.fault_inputs().len()) as f64;
    assert!((est.conditioning_mass - mass).abs() <= 1e-9);
});
