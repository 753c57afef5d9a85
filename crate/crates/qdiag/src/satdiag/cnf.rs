//! CNF formulas over named circuit wires.
//!
//! Variables are positive integers in DIMACS style; a negative literal is a
//! negated variable. The variable table keeps the wire-name correspondence
//! in registration order, which downstream code relies on for reproducible
//! exports.

use std::collections::HashMap;
use std::fmt::Write as _;

/// A clause set plus the wire ↔ variable table.
#[derive(Debug, Clone, Default)]
pub struct CnfFormula {
    names: Vec<String>,
    index: HashMap<String, i32>,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        CnfFormula::default()
    }

    /// Variable for `wire`, registering it on first use. Variables start at 1.
    pub fn var(&mut self, wire: &str) -> i32 {
        if let Some(&v) = self.index.get(wire) {
            return v;
        }
        self.names.push(wire.to_string());
        let v = self.names.len() as i32;
        self.index.insert(wire.to_string(), v);
        v
    }

    pub fn lookup(&self, wire: &str) -> Option<i32> {
        self.index.get(wire).copied()
    }

    pub fn name_of(&self, var: i32) -> Option<&str> {
        if var >= 1 && (var as usize) <= self.names.len() {
            Some(&self.names[var as usize - 1])
        } else {
            None
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Adds a clause; empty clauses and unregistered variables are caller
    /// bugs, not data errors.
    pub fn add_clause(&mut self, lits: Vec<i32>) {
        assert!(!lits.is_empty(), "empty clause");
        for &lit in &lits {
            let var = lit.unsigned_abs() as usize;
            assert!(lit != 0, "literal 0 is reserved");
            assert!(var <= self.names.len(), "unregistered variable {var}");
        }
        self.clauses.push(lits);
    }

    /// Checks a total assignment (indexed by variable, entry 0 unused)
    /// against every clause.
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|&lit| values[lit.unsigned_abs() as usize] == (lit > 0))
        })
    }

    /// DIMACS text with the variable table in leading comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            writeln!(out, "c var {} {}", i + 1, name).unwrap();
        }
        writeln!(out, "p cnf {} {}", self.names.len(), self.clauses.len()).unwrap();
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            writeln!(out, "0").unwrap();
        }
        out
    }
}
