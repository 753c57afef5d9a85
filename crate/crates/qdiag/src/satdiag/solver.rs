//! A small conflict-driven clause-learning SAT solver.
//!
//! Two-literal watching, first-UIP learning, phase saving, activity-ordered
//! decisions with periodic decay, and Luby restarts. Clauses can be added
//! between `solve` calls, which is what the all-solutions enumeration in
//! [`super`] does with its blocking clauses.
//!
//! The formulas this crate produces are tiny by SAT standards, so the solver
//! favors clarity over throughput: no clause deletion, no literal-block
//! distance tracking, a plain argmax decision scan.

/// Variable index, 0-based.
pub type Var = usize;

/// Literal: variable plus sign, `code = var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit((var as u32) << 1 | (!positive as u32))
    }

    pub fn var(self) -> Var {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learned: bool,
}

type ClauseRef = usize;

/// Learned clauses accumulated across incremental solves get dropped once
/// they outnumber this; enumeration adds thousands of blocking clauses and
/// stale lemmas otherwise dominate every watch list.
const PURGE_THRESHOLD: usize = 2000;

/// Outcome of one `solve` call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Satisfying total assignment, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    /// The conflict budget ran out before an answer was reached.
    BudgetExceeded { conflicts: u64 },
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    /// For each literal code, the clauses currently watching that literal.
    watches: Vec<Vec<ClauseRef>>,
    assign: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    queue_head: usize,
    activity: Vec<f64>,
    act_inc: f64,
    saved_phase: Vec<bool>,
    conflicts: u64,
    restart_count: u64,
    budget: Option<u64>,
    learned_count: usize,
    unsat: bool,
}

impl Solver {
    pub fn new(num_vars: usize) -> Solver {
        Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); num_vars * 2],
            assign: vec![LBool::Undef; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            queue_head: 0,
            activity: vec![0.0; num_vars],
            act_inc: 1.0,
            saved_phase: vec![false; num_vars],
            conflicts: 0,
            restart_count: 0,
            budget: None,
            learned_count: 0,
            unsat: false,
        }
    }

    /// Total conflict budget across all `solve` calls; `None` is unlimited.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    fn value(&self, lit: Lit) -> LBool {
        match self.assign[lit.var()] {
            LBool::Undef => LBool::Undef,
            LBool::True => {
                if lit.is_positive() {
                    LBool::True
                } else {
                    LBool::False
                }
            }
            LBool::False => {
                if lit.is_positive() {
                    LBool::False
                } else {
                    LBool::True
                }
            }
        }
    }

    fn current_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        debug_assert_eq!(self.value(lit), LBool::Undef);
        let var = lit.var();
        self.assign[var] = if lit.is_positive() { LBool::True } else { LBool::False };
        self.level[var] = self.current_level();
        self.reason[var] = reason;
        self.saved_phase[var] = lit.is_positive();
        self.trail.push(lit);
    }

    fn backtrack(&mut self, target: u32) {
        while self.current_level() > target {
            let boundary = self.trail_lim.pop().expect("level above target");
            while self.trail.len() > boundary {
                let lit = self.trail.pop().expect("non-empty trail");
                self.assign[lit.var()] = LBool::Undef;
                self.reason[lit.var()] = None;
            }
        }
        self.queue_head = self.queue_head.min(self.trail.len());
    }

    /// Adds a clause; usable before the first `solve` and between solves.
    /// Returns `false` once the formula is known unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if self.unsat {
            return false;
        }
        self.backtrack(0);
        if self.learned_count > PURGE_THRESHOLD {
            self.purge_learned();
        }
        self.add_clause_at_root(lits)
    }

    /// `add_clause` body without the purge trigger; the solver must be at
    /// decision level 0.
    fn add_clause_at_root(&mut self, lits: &[Lit]) -> bool {
        debug_assert_eq!(self.current_level(), 0);
        // Dedupe, drop tautologies, drop literals already false at level 0.
        let mut clause: Vec<Lit> = Vec::with_capacity(lits.len());
        for &lit in lits {
            if self.value(lit) == LBool::True {
                return true; // satisfied forever
            }
            if self.value(lit) == LBool::False {
                continue; // false forever
            }
            if clause.contains(&!lit) {
                return true; // tautology
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }

        match clause.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.enqueue(clause[0], None);
                if self.propagate().is_some() {
                    self.unsat = true;
                    false
                } else {
                    true
                }
            }
            _ => {
                let idx = self.clauses.len();
                self.watches[clause[0].code()].push(idx);
                self.watches[clause[1].code()].push(idx);
                self.clauses.push(Clause {
                    lits: clause,
                    learned: false,
                });
                true
            }
        }
    }

    /// Drops every learned clause and rebuilds the watch lists from the
    /// surviving ones. Level-0 assignments stay; their reasons are cleared
    /// because conflict analysis never expands level-0 literals.
    fn purge_learned(&mut self) {
        debug_assert_eq!(self.current_level(), 0);
        let old = std::mem::take(&mut self.clauses);
        for list in &mut self.watches {
            list.clear();
        }
        for lit in &self.trail {
            self.reason[lit.var()] = None;
        }
        self.learned_count = 0;
        for clause in old {
            if clause.learned {
                continue;
            }
            if !self.add_clause_at_root(&clause.lits) {
                return;
            }
        }
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<ClauseRef> {
        while self.queue_head < self.trail.len() {
            let assigned = self.trail[self.queue_head];
            self.queue_head += 1;
            let falsified = !assigned;

            let mut pending = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            while i < pending.len() {
                let cref = pending[i];

                // Keep the falsified literal at position 1.
                if self.clauses[cref].lits[0] == falsified {
                    self.clauses[cref].lits.swap(0, 1);
                }
                let first = self.clauses[cref].lits[0];
                if self.value(first) == LBool::True {
                    i += 1;
                    continue;
                }

                // Hunt for a replacement watch.
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    let candidate = self.clauses[cref].lits[k];
                    if self.value(candidate) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[candidate.code()].push(cref);
                        pending.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }

                if self.value(first) == LBool::False {
                    // Conflict: restore the remaining watchers and report.
                    self.watches[falsified.code()].append(&mut pending);
                    self.queue_head = self.trail.len();
                    return Some(cref);
                }
                self.enqueue(first, Some(cref));
                i += 1;
            }
            self.watches[falsified.code()].append(&mut pending);
        }
        None
    }

    fn bump(&mut self, var: Var) {
        self.activity[var] += self.act_inc;
        if self.activity[var] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.act_inc *= 1e-100;
        }
    }

    fn decay(&mut self) {
        self.act_inc /= 0.95;
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    ///
    /// Relies on the propagation invariant that an implied literal sits at
    /// position 0 of its reason clause.
    fn analyze(&mut self, conflict: ClauseRef) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = Vec::new();
        let mut seen = vec![false; self.num_vars];
        let mut counter = 0usize;
        let mut confl = conflict;
        let mut trail_idx = self.trail.len();
        let mut expanding_reason = false;
        let asserting;

        loop {
            let skip = usize::from(expanding_reason);
            for idx in skip..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[idx];
                let v = q.var();
                if seen[v] || self.level[v] == 0 {
                    continue;
                }
                seen[v] = true;
                self.bump(v);
                if self.level[v] == self.current_level() {
                    counter += 1;
                } else {
                    learnt.push(q);
                }
            }

            // Walk the trail back to the next marked literal.
            loop {
                trail_idx -= 1;
                if seen[self.trail[trail_idx].var()] {
                    break;
                }
            }
            let p = self.trail[trail_idx];
            seen[p.var()] = false;
            counter -= 1;
            if counter == 0 {
                asserting = p;
                break;
            }
            confl = self.reason[p.var()].expect("implied literal has a reason");
            debug_assert_eq!(self.clauses[confl].lits[0], p);
            expanding_reason = true;
        }

        let assert_lit = !asserting;
        let mut clause = Vec::with_capacity(learnt.len() + 1);
        clause.push(assert_lit);
        clause.extend(learnt);

        let backjump = if clause.len() == 1 {
            0
        } else {
            // Second-highest level literal watches the clause.
            let mut max_idx = 1;
            for k in 2..clause.len() {
                if self.level[clause[k].var()] > self.level[clause[max_idx].var()] {
                    max_idx = k;
                }
            }
            clause.swap(1, max_idx);
            self.level[clause[1].var()]
        };
        (clause, backjump)
    }

    fn learn(&mut self, clause: Vec<Lit>) {
        let assert_lit = clause[0];
        if clause.len() == 1 {
            self.enqueue(assert_lit, None);
            return;
        }
        let idx = self.clauses.len();
        self.watches[clause[0].code()].push(idx);
        self.watches[clause[1].code()].push(idx);
        self.clauses.push(Clause {
            lits: clause,
            learned: true,
        });
        self.learned_count += 1;
        self.enqueue(assert_lit, Some(idx));
    }

    fn decide(&mut self) -> bool {
        let mut best: Option<Var> = None;
        for v in 0..self.num_vars {
            if self.assign[v] == LBool::Undef
                && best.is_none_or(|b| self.activity[v] > self.activity[b])
            {
                best = Some(v);
            }
        }
        match best {
            Some(v) => {
                self.trail_lim.push(self.trail.len());
                self.enqueue(Lit::new(v, self.saved_phase[v]), None);
                true
            }
            None => false,
        }
    }

    pub fn solve(&mut self) -> SolveOutcome {
        if self.unsat {
            return SolveOutcome::Unsat;
        }
        let mut restart_at = self.conflicts + 128 * luby(self.restarts() + 1);
        loop {
            if let Some(conflict) = self.propagate() {
                self.conflicts += 1;
                if self.current_level() == 0 {
                    self.unsat = true;
                    return SolveOutcome::Unsat;
                }
                if let Some(budget) = self.budget {
                    if self.conflicts > budget {
                        self.backtrack(0);
                        return SolveOutcome::BudgetExceeded {
                            conflicts: self.conflicts,
                        };
                    }
                }
                let (clause, backjump) = self.analyze(conflict);
                self.backtrack(backjump);
                self.learn(clause);
                self.decay();
                if self.conflicts >= restart_at {
                    self.backtrack(0);
                    self.restart_count += 1;
                    restart_at = self.conflicts + 128 * luby(self.restarts() + 1);
                }
            } else if !self.decide() {
                let model: Vec<bool> = self.assign.iter().map(|&a| a == LBool::True).collect();
                debug_assert!(self.verify(&model));
                self.backtrack(0);
                return SolveOutcome::Sat(model);
            }
        }
    }

    fn restarts(&self) -> u64 {
        self.restart_count
    }

    /// Checks `model` against every stored clause.
    pub fn verify(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .lits
                .iter()
                .any(|&lit| model[lit.var()] == lit.is_positive())
        })
    }
}

/// Luby restart sequence: 1 1 2 1 1 2 4 ...
fn luby(mut i: u64) -> u64 {
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}
