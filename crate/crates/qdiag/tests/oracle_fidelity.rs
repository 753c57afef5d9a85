//! Exhaustive functional checks of compiled oracles against the classical
//! evaluator: every ancilla must end holding its gate's output and every
//! input qubit must come back unchanged, on every basis state. The dense
//! statevector kernel and the bit-propagation fast path are also checked
//! against each other, since they share no code beyond the gate list.

use qdiag::faultlab::augment_stuck_at_1;
use qdiag::netlist::{generate_benchmark, Assignment, Circuit, Family};
use qdiag::qcompile::make_oracle_with_cap;
use qdiag::qsim::{propagate_basis, StateVector};

/// Instances whose augmented circuits keep input+fault qubits ≤ 12 so the
/// basis space stays exhaustively checkable.
fn small_grid() -> Vec<(String, Circuit)> {
    let picks = [
        (Family::RippleAdder, 1),
        (Family::RippleSubtractor, 1),
        (Family::Multiplexer, 1),
        (Family::Demultiplexer, 1),
        (Family::Comparator, 1),
        (Family::BarrelShifter, 2),
        (Family::Multiplier, 1),
        (Family::Multiplier, 2),
        (Family::MultioperandAdder, 1),
    ];
    picks
        .iter()
        .map(|&(family, width)| {
            (
                format!("{family}_{width}"),
                generate_benchmark(family, width).unwrap(),
            )
        })
        .collect()
}

/// Bit-propagates the oracle program on one basis setting of the inputs and
/// checks every wire against the classical evaluation.
fn check_basis_setting(name: &str, circuit: &Circuit, qc: &qdiag::QuantumCircuit, setting: u64) {
    let m = circuit.inputs().len();
    let mut bits: Vec<bool> = qc.init().to_vec();
    for (k, bit) in bits.iter_mut().enumerate().take(m) {
        *bit = (setting >> k) & 1 == 1;
    }
    propagate_basis(qc.program(), &mut bits).unwrap();

    let alpha = Assignment::from_pairs(
        circuit
            .inputs()
            .iter()
            .enumerate()
            .map(|(k, n)| (n.as_str(), (setting >> k) & 1 == 1)),
    );
    let values = circuit.evaluate(&alpha).unwrap();

    for (k, input) in circuit.inputs().iter().enumerate() {
        assert_eq!(
            bits[k],
            (setting >> k) & 1 == 1,
            "{name}: input {input} not preserved on setting {setting:b}"
        );
    }
    for wire in circuit.wires() {
        let q = qc.qubit_of(&wire).unwrap();
        assert_eq!(
            bits[q],
            values.get(&wire).unwrap(),
            "{name}: wire {wire} wrong on setting {setting:b}"
        );
    }
}

#[test]
fn oracles_match_the_classical_evaluator_exhaustively() {
    for (name, circuit) in small_grid() {
        let fc = augment_stuck_at_1(&circuit);
        let augmented = fc.circuit();
        let m = augmented.inputs().len();
        assert!(m <= 12, "{name}: {m} input+fault qubits");
        let qc = make_oracle_with_cap(augmented, 128).unwrap();
        for setting in 0..1u64 << m {
            check_basis_setting(&name, augmented, &qc, setting);
        }
    }
}

#[test]
fn plain_oracles_match_too() {
    for (name, circuit) in small_grid() {
        let qc = make_oracle_with_cap(&circuit, 128).unwrap();
        for setting in 0..1u64 << circuit.inputs().len() {
            check_basis_setting(&name, &circuit, &qc, setting);
        }
    }
}

#[test]
fn oracle_is_a_permutation_of_basis_states() {
    // Classicality: on basis input the final state is a single basis state,
    // and distinct inputs map to distinct outputs.
    let circuit = generate_benchmark(Family::Multiplier, 2).unwrap();
    let qc = make_oracle_with_cap(&circuit, 16).unwrap();
    let q = qc.qubit_count();
    let m = circuit.inputs().len();
    let mut seen = std::collections::BTreeSet::new();
    for setting in 0..1u64 << m {
        let mut index = 0usize;
        for (k, &b) in qc.init().iter().enumerate() {
            if b {
                index |= 1 << k;
            }
        }
        for k in 0..m {
            index = (index & !(1 << k)) | (((setting >> k) & 1) as usize) << k;
        }
        let mut state = StateVector::basis(q, index);
        for gate in qc.program() {
            state.apply_gate(gate).unwrap();
        }
        let nonzero: Vec<usize> = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero.len(), 1, "setting {setting:b} not classical");
        let amp = state.amplitudes()[nonzero[0]];
        assert!((amp.re - 1.0).abs() < 1e-12 && amp.im == 0.0);
        assert!(seen.insert(nonzero[0]), "two inputs collide");
    }
}

#[test]
fn dense_kernel_agrees_with_bit_propagation() {
    // Independent implementations of the same permutation.
    for (family, width) in [
        (Family::Multiplier, 1),
        (Family::Demultiplexer, 1),
        (Family::Multiplexer, 1),
    ] {
        let circuit = generate_benchmark(family, width).unwrap();
        let fc = augment_stuck_at_1(&circuit);
        let qc = make_oracle_with_cap(fc.circuit(), 24).unwrap();
        let m = fc.circuit().inputs().len();
        for setting in 0..1u64 << m {
            let mut bits: Vec<bool> = qc.init().to_vec();
            for (k, bit) in bits.iter_mut().enumerate().take(m) {
                *bit = (setting >> k) & 1 == 1;
            }
            let mut index = 0usize;
            for (k, &b) in bits.iter().enumerate() {
                if b {
                    index |= 1 << k;
                }
            }
            propagate_basis(qc.program(), &mut bits).unwrap();

            let mut state = StateVector::basis(qc.qubit_count(), index);
            for gate in qc.program() {
                state.apply_gate(gate).unwrap();
            }
            let amp = state.amplitude_of(&bits);
            assert!(
                (amp.re - 1.0).abs() < 1e-12,
                "{family}_{width}: dense and bit paths disagree on {setting:b}"
            );
        }
    }
}

#[test]
fn degenerate_same_wire_gates_evaluate_correctly() {
    let circuit = qdiag::parse_bench(
        "INPUT(a)\nOUTPUT(w)\nOUTPUT(x)\nOUTPUT(v)\nw = AND(a, a)\nx = XOR(a, a)\nv = OR(a, a)\n",
    )
    .unwrap();
    let qc = make_oracle_with_cap(&circuit, 8).unwrap();
    for setting in 0..2u64 {
        check_basis_setting("same_wire", &circuit, &qc, setting);
    }
}
