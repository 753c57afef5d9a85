//! Fault diagnosis workbench for combinational switching circuits.
//!
//! Given a circuit, an input assignment and an observed output assignment,
//! the crate computes the conditional probability of each stuck-at-1 fault
//! two ways:
//!
//! * exactly, by CNF encoding and all-solutions SAT enumeration with
//!   blocking clauses ([`satdiag`]);
//! * approximately, by compiling the circuit into a reversible quantum
//!   oracle, putting the fault wires in superposition and reading the
//!   conditional measurement statistics off a simulated run ([`qcompile`],
//!   [`qsim`]).
//!
//! The [`diagnose`] module ties both pipelines together and quantifies their
//! disagreement with a summed squared-difference error metric.

pub mod diagnose;
pub mod faultlab;
pub mod netlist;
pub mod qcompile;
pub mod qsim;
pub mod satdiag;
mod util;

pub use diagnose::{err_metric, QuantumConfig, QuantumFaultEstimate};
pub use faultlab::{augment_stuck_at_1, FaultCircuit, Scenario};
pub use netlist::{parse_bench, render_bench, Assignment, Circuit, Gate, GateKind};
pub use qcompile::{build_diagnosis_circuit, make_oracle, QuantumCircuit, QuantumGate};
pub use qsim::{run_statevector, ShotHistogram, StateVector};
pub use satdiag::{circuit_health_sat, FaultDistribution};
