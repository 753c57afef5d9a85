//! Exact conditional fault probabilities by all-solutions SAT enumeration.
//!
//! The fault-augmented circuit is encoded to CNF gate by gate, the observed
//! inputs and outputs are pinned with unit clauses, and satisfying models
//! are enumerated with blocking clauses over the fault literals only. Every
//! model's fault projection is a diagnosis; the conditional probability of
//! fault `f` is the exact rational `n[f] / d` where `d` counts diagnoses and
//! `n[f]` those in which `f` is active. No floating point enters this
//! module's results.

mod cnf;
mod solver;

pub use cnf::CnfFormula;
pub use solver::{Lit, SolveOutcome, Solver};

use crate::faultlab::FaultCircuit;
use crate::netlist::{Assignment, GateKind};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Exact per-fault conditional probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaultDistribution {
    /// `n[f]`: diagnoses in which fault `f` is set, keyed by fault wire.
    pub counts: BTreeMap<String, u64>,
    /// `d`: total number of diagnoses. Always positive; an inconsistent
    /// observation is reported as an error, never as `d = 0`.
    pub diagnoses: u64,
}

impl FaultDistribution {
    /// Exact probability of `fault` as a (numerator, denominator) pair.
    pub fn probability(&self, fault: &str) -> Option<(u64, u64)> {
        self.counts.get(fault).map(|&n| (n, self.diagnoses))
    }

    pub fn probability_f64(&self, fault: &str) -> Option<f64> {
        self.probability(fault).map(|(n, d)| n as f64 / d as f64)
    }

    pub fn fault_names(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(|s| s.as_str())
    }

    /// JSON export with exact numerator/denominator fields per fault.
    pub fn to_json(&self) -> serde_json::Value {
        let faults: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(fault, &n)| {
                (
                    fault.clone(),
                    serde_json::json!({
                        "numerator": n,
                        "denominator": self.diagnoses,
                        "probability": n as f64 / self.diagnoses as f64,
                    }),
                )
            })
            .collect();
        serde_json::json!({
            "diagnoses": self.diagnoses,
            "faults": faults,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatDiagError {
    #[error("`{0}` is not a primary input of the circuit")]
    NotAnInput(String),
    #[error("`{0}` is not a primary output of the circuit")]
    NotAnOutput(String),
    #[error("input `{0}` has no binding in alpha")]
    MissingInput(String),
    #[error("output `{0}` has no binding in beta")]
    MissingOutput(String),
    /// The observation is consistent with no fault assignment at all.
    #[error("observation is inconsistent: no diagnosis exists")]
    InconsistentObservation,
    #[error("conflict budget exhausted after {conflicts} conflicts")]
    BudgetExceeded { conflicts: u64 },
}

/// Tseitin-style encoding of the diagnosis question.
///
/// Per gate: NOT costs 2 clauses, AND/OR cost 3, XOR costs 4. Each literal
/// of `alpha` and `beta` becomes a unit clause. Models of the result,
/// projected onto the fault inputs, are exactly the diagnoses of
/// `(fc, alpha, beta)`.
pub fn to_cnf(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
) -> Result<CnfFormula, SatDiagError> {
    for (wire, _) in alpha.iter() {
        if !fc.original_inputs().iter().any(|i| i == wire) {
            return Err(SatDiagError::NotAnInput(wire.to_string()));
        }
    }
    for input in fc.original_inputs() {
        if !alpha.contains(input) {
            return Err(SatDiagError::MissingInput(input.clone()));
        }
    }
    to_cnf_observation(fc.circuit(), alpha, beta)
}

/// Encoding of an observation over a circuit as given: `alpha` may bind any
/// subset of the primary inputs, and the unbound ones act as assumables.
pub fn to_cnf_observation(
    circuit: &crate::netlist::Circuit,
    alpha: &Assignment,
    beta: &Assignment,
) -> Result<CnfFormula, SatDiagError> {
    for (wire, _) in alpha.iter() {
        if !circuit.inputs().iter().any(|i| i == wire) {
            return Err(SatDiagError::NotAnInput(wire.to_string()));
        }
    }
    for (wire, _) in beta.iter() {
        if !circuit.outputs().iter().any(|o| o == wire) {
            return Err(SatDiagError::NotAnOutput(wire.to_string()));
        }
    }
    for output in circuit.outputs() {
        if !beta.contains(output) {
            return Err(SatDiagError::MissingOutput(output.clone()));
        }
    }

    let mut formula = CnfFormula::new();
    // Register inputs first (original, then faults), then gate outputs in
    // declaration order, for a reproducible variable layout.
    for input in circuit.inputs() {
        formula.var(input);
    }
    for gate in circuit.gates() {
        formula.var(&gate.output);
    }

    for gate in circuit.gates() {
        let w = formula.var(&gate.output);
        let a = formula.var(&gate.inputs[0]);
        match gate.kind {
            GateKind::Not => {
                formula.add_clause(vec![a, w]);
                formula.add_clause(vec![-a, -w]);
            }
            GateKind::And => {
                let b = formula.var(&gate.inputs[1]);
                formula.add_clause(vec![-a, -b, w]);
                formula.add_clause(vec![a, -w]);
                formula.add_clause(vec![b, -w]);
            }
            GateKind::Or => {
                let b = formula.var(&gate.inputs[1]);
                formula.add_clause(vec![a, b, -w]);
                formula.add_clause(vec![-a, w]);
                formula.add_clause(vec![-b, w]);
            }
            GateKind::Xor => {
                let b = formula.var(&gate.inputs[1]);
                formula.add_clause(vec![-a, -b, -w]);
                formula.add_clause(vec![a, b, -w]);
                formula.add_clause(vec![a, -b, w]);
                formula.add_clause(vec![-a, b, w]);
            }
        }
    }

    for (wire, value) in alpha.iter().chain(beta.iter()) {
        let v = formula.var(wire);
        formula.add_clause(vec![if value { v } else { -v }]);
    }
    Ok(formula)
}

/// One satisfying model, as wire-name bindings.
pub type Model = BTreeMap<String, bool>;

/// Solves a formula; the returned model is verified against every clause.
pub fn sat_solve(formula: &CnfFormula, budget: Option<u64>) -> Result<Option<Model>, SatDiagError> {
    let mut solver = Solver::new(formula.num_vars());
    solver.set_conflict_budget(budget);
    for clause in formula.clauses() {
        let lits: Vec<Lit> = clause
            .iter()
            .map(|&l| Lit::new(l.unsigned_abs() as usize - 1, l > 0))
            .collect();
        if !solver.add_clause(&lits) {
            return Ok(None);
        }
    }
    match solver.solve() {
        SolveOutcome::Sat(model) => {
            let mut values = vec![false; formula.num_vars() + 1];
            for (var0, &value) in model.iter().enumerate() {
                values[var0 + 1] = value;
            }
            assert!(formula.satisfied_by(&values), "solver returned a non-model");
            let named = (1..=formula.num_vars() as i32)
                .map(|v| (formula.name_of(v).unwrap().to_string(), values[v as usize]))
                .collect();
            Ok(Some(named))
        }
        SolveOutcome::Unsat => Ok(None),
        SolveOutcome::BudgetExceeded { conflicts } => {
            Err(SatDiagError::BudgetExceeded { conflicts })
        }
    }
}

/// Budget applied when the caller does not choose one: generous for the
/// formula sizes this crate produces, small enough to fail fast on a bug.
pub const DEFAULT_CONFLICT_BUDGET: u64 = 10_000_000;

/// Enumerates every diagnosis of `(fc, alpha, beta)` and returns the exact
/// conditional fault probabilities.
///
/// After each model, `d` is incremented once, `n[f]` once for every fault
/// the model sets, and one blocking clause over the fault literals excludes
/// the model's fault projection; the loop ends at UNSAT. Blocking on the
/// fault projection alone is enough because all other wires are
/// functionally determined by the inputs, so each diagnosis is enumerated
/// exactly once.
pub fn circuit_health_sat(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
    budget: Option<u64>,
) -> Result<FaultDistribution, SatDiagError> {
    let formula = to_cnf(fc, alpha, beta)?;
    let fault_vars: Vec<(String, usize)> = fc
        .fault_inputs()
        .iter()
        .map(|f| {
            let v = formula.lookup(f).expect("fault input is registered");
            (f.clone(), v as usize - 1)
        })
        .collect();

    let mut solver = Solver::new(formula.num_vars());
    solver.set_conflict_budget(budget.or(Some(DEFAULT_CONFLICT_BUDGET)));
    for clause in formula.clauses() {
        let lits: Vec<Lit> = clause
            .iter()
            .map(|&l| Lit::new(l.unsigned_abs() as usize - 1, l > 0))
            .collect();
        if !solver.add_clause(&lits) {
            return Err(SatDiagError::InconsistentObservation);
        }
    }

    let mut counts: BTreeMap<String, u64> =
        fc.fault_inputs().iter().map(|f| (f.clone(), 0)).collect();
    let mut diagnoses = 0u64;
    loop {
        match solver.solve() {
            SolveOutcome::Sat(model) => {
                assert!(solver.verify(&model), "solver returned a non-model");
                diagnoses += 1;
                let mut blocking = Vec::with_capacity(fault_vars.len());
                for (name, var) in &fault_vars {
                    if model[*var] {
                        *counts.get_mut(name).expect("registered fault") += 1;
                    }
                    blocking.push(Lit::new(*var, !model[*var]));
                }
                if !solver.add_clause(&blocking) {
                    break;
                }
            }
            SolveOutcome::Unsat => break,
            SolveOutcome::BudgetExceeded { conflicts } => {
                return Err(SatDiagError::BudgetExceeded { conflicts });
            }
        }
    }

    if diagnoses == 0 {
        return Err(SatDiagError::InconsistentObservation);
    }
    Ok(FaultDistribution { counts, diagnoses })
}

/// DIMACS text for the diagnosis formula; the external cross-check hatch.
pub fn export_dimacs(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
) -> Result<String, SatDiagError> {
    Ok(to_cnf(fc, alpha, beta)?.to_dimacs())
}
