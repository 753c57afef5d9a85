//! Conditional fault probabilities from measurements, the error metric
//! against the SAT reference, and the two benchmark experiments.
//!
//! The quantum estimator measures the fault qubits together with the
//! combined output qubit and keeps only outcomes where the output read 1;
//! within that slice, the frequency of each fault qubit is its conditional
//! probability. Exact mode reads the limit distribution straight off the
//! simulator; shots mode draws `N` seeded samples first. The `Err` number
//! summed over faults is `Σ (Pr_s(f=1) − Pr_q(f=1))²`.
//!
//! Engine selection: circuits that fit the dense statevector cap run there;
//! wider ones fall back to the basis-enumeration fast path, which is exact
//! as long as the number of assumable inputs stays enumerable. Both engines
//! produce the same outcome distribution, a fact the test suites check
//! whenever both are available.

use crate::faultlab::{augment_stuck_at_1, random_scenarios, FaultCircuit, Scenario};
use crate::netlist::{generate_benchmark, Assignment, Circuit, Family, GenerateError};
use crate::qcompile::{self, diagnosis_circuit_from, CompileError, QuantumCircuit};
use crate::qsim::{
    self, enumerate_outcomes, run_statevector_capped, sample_distribution, ShotHistogram,
    SimError,
};
use crate::satdiag::{circuit_health_sat, FaultDistribution, SatDiagError};
use crate::util::substream_seed;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

/// Dense statevector limit; above it the fast path takes over.
pub const DEFAULT_DENSE_CAP: usize = qcompile::DEFAULT_QUBIT_CAP;
/// Most assumable inputs the fast path will enumerate (`2^n` settings).
pub const DEFAULT_ENUM_CAP: usize = 26;
/// Compilation budget; far above what either engine can execute, so the
/// execution caps produce the user-facing errors.
pub const DEFAULT_COMPILE_CAP: usize = 512;

/// How the quantum estimate is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Read the limit distribution from the final state.
    Exact,
    /// Draw `shots` seeded samples.
    Shots { shots: u64 },
}

/// Execution knobs for the quantum pipeline.
#[derive(Debug, Clone, Copy)]
pub struct QuantumConfig {
    pub mode: Mode,
    /// Sampling seed; unused in exact mode. Retries after a zero-mass
    /// histogram derive substream seeds from it.
    pub seed: u64,
    pub dense_cap: usize,
    pub enum_cap: usize,
    pub compile_cap: usize,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig {
            mode: Mode::Exact,
            seed: 0,
            dense_cap: DEFAULT_DENSE_CAP,
            enum_cap: DEFAULT_ENUM_CAP,
            compile_cap: DEFAULT_COMPILE_CAP,
        }
    }
}

impl QuantumConfig {
    pub fn exact() -> Self {
        QuantumConfig::default()
    }

    pub fn shots(shots: u64, seed: u64) -> Self {
        QuantumConfig {
            mode: Mode::Shots { shots },
            seed,
            ..QuantumConfig::default()
        }
    }
}

/// Per-fault conditional probabilities read from a quantum run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumFaultEstimate {
    /// `Pr(f = 1 | o = 1)` per assumable input (or `o = 0` for the
    /// healthy-branch marginal).
    pub probabilities: BTreeMap<String, f64>,
    /// Probability mass of the conditioning outcome.
    pub conditioning_mass: f64,
    /// Number of shots, or `None` for exact mode.
    pub shots: Option<u64>,
    /// Sampling seed actually used (after any retries).
    pub seed: Option<u64>,
    /// Name of the pseudo-random generator behind `seed`.
    pub generator: Option<&'static str>,
}

/// Measurement outcomes over the fault qubits plus the output qubit:
/// key bit `j` is fault `j`, the top bit is the combined output.
#[derive(Debug, Clone)]
pub enum Outcomes {
    Exact { masses: BTreeMap<u64, f64> },
    Sampled { histogram: ShotHistogram, seed: u64 },
}

impl Outcomes {
    fn masses(&self) -> BTreeMap<u64, f64> {
        match self {
            Outcomes::Exact { masses } => masses.clone(),
            Outcomes::Sampled { histogram, .. } => histogram
                .counts
                .iter()
                .map(|(&k, &n)| (k, n as f64 / histogram.shots as f64))
                .collect(),
        }
    }

    fn shots(&self) -> Option<u64> {
        match self {
            Outcomes::Exact { .. } => None,
            Outcomes::Sampled { histogram, .. } => Some(histogram.shots),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Outcomes::Exact { .. } => None,
            Outcomes::Sampled { seed, .. } => Some(*seed),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DiagnoseError {
    /// No outcome had the combined output at the conditioning value.
    #[error("no diagnosis observed: Pr(o=1) = {pr_o1}")]
    NoDiagnosisObserved { pr_o1: f64 },
    #[error("no healthy-branch mass: Pr(o=0) = 0")]
    NoHealthyMass,
    #[error("fault key sets differ: `{0}` is missing from one side")]
    KeyMismatch(String),
    #[error("instance needs {qubits} qubits and {faults} assumable inputs, over dense cap {dense_cap} and enumeration cap {enum_cap}")]
    ResourceCap {
        qubits: usize,
        faults: usize,
        dense_cap: usize,
        enum_cap: usize,
    },
    #[error("shot schedule must be non-empty and strictly increasing")]
    BadSchedule,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sat(#[from] SatDiagError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

fn conditional(
    outcomes: &Outcomes,
    fault_names: &[String],
    condition_o: bool,
) -> Result<QuantumFaultEstimate, DiagnoseError> {
    let masses = outcomes.masses();
    let output_bit = fault_names.len();
    let total: f64 = masses.values().sum();
    let slice_mass: f64 = masses
        .iter()
        .filter(|(&k, _)| ((k >> output_bit) & 1 == 1) == condition_o)
        .map(|(_, &m)| m)
        .sum();
    if slice_mass <= 0.0 {
        return Err(if condition_o {
            DiagnoseError::NoDiagnosisObserved { pr_o1: 0.0 }
        } else {
            DiagnoseError::NoHealthyMass
        });
    }
    let mut probabilities = BTreeMap::new();
    for (j, name) in fault_names.iter().enumerate() {
        let joint: f64 = masses
            .iter()
            .filter(|(&k, _)| {
                ((k >> output_bit) & 1 == 1) == condition_o && (k >> j) & 1 == 1
            })
            .map(|(_, &m)| m)
            .sum();
        probabilities.insert(name.clone(), joint / slice_mass);
    }
    Ok(QuantumFaultEstimate {
        probabilities,
        conditioning_mass: slice_mass / total,
        shots: outcomes.shots(),
        seed: outcomes.seed(),
        generator: outcomes.seed().map(|_| qsim::GENERATOR_NAME),
    })
}

/// Conditional fault probabilities given the combined output read 1, the
/// primary estimator.
pub fn fault_probabilities(
    outcomes: &Outcomes,
    fault_names: &[String],
) -> Result<QuantumFaultEstimate, DiagnoseError> {
    conditional(outcomes, fault_names, true)
}

/// The healthy-branch marginal: `Pr(f = 1 | o = 0)`, reported as-is.
pub fn marginal_health(
    outcomes: &Outcomes,
    fault_names: &[String],
) -> Result<QuantumFaultEstimate, DiagnoseError> {
    conditional(outcomes, fault_names, false)
}

/// `Err = Σ_f (Pr_s(f=1) − Pr_q(f=1))²` over identical fault key sets.
pub fn err_metric(
    ps: &FaultDistribution,
    pq: &QuantumFaultEstimate,
) -> Result<f64, DiagnoseError> {
    for name in ps.counts.keys() {
        if !pq.probabilities.contains_key(name) {
            return Err(DiagnoseError::KeyMismatch(name.clone()));
        }
    }
    for name in pq.probabilities.keys() {
        if !ps.counts.contains_key(name) {
            return Err(DiagnoseError::KeyMismatch(name.clone()));
        }
    }
    Ok(ps
        .counts
        .iter()
        .map(|(name, &n)| {
            let s = n as f64 / ps.diagnoses as f64;
            let q = pq.probabilities[name];
            (s - q) * (s - q)
        })
        .sum())
}

/// The exact measurement distribution of a compiled diagnosis circuit over
/// (fault qubits, output qubit), produced by whichever engine fits.
pub fn diagnosis_distribution(
    qc: &QuantumCircuit,
    config: &QuantumConfig,
) -> Result<BTreeMap<u64, f64>, DiagnoseError> {
    let mut measured = qc.fault_qubits().to_vec();
    measured.push(qc.output_qubit().expect("diagnosis circuits mark the output"));
    if qc.qubit_count() <= config.dense_cap {
        let state = run_statevector_capped(qc, config.dense_cap)?;
        Ok(state.exact_distribution(&measured))
    } else if qc.fault_qubits().len() <= config.enum_cap {
        Ok(enumerate_outcomes(qc, &measured)?.probabilities())
    } else {
        Err(DiagnoseError::ResourceCap {
            qubits: qc.qubit_count(),
            faults: qc.fault_qubits().len(),
            dense_cap: config.dense_cap,
            enum_cap: config.enum_cap,
        })
    }
}

/// Runs the quantum pipeline on a circuit whose unknowns are the inputs
/// `alpha` leaves unbound.
///
/// In shots mode a run that never observes `o = 1` is retried with a fresh
/// derived seed at most 3 times before the failure is reported.
pub fn quantum_diagnose_circuit(
    c: &Circuit,
    alpha: &Assignment,
    beta: &Assignment,
    config: &QuantumConfig,
) -> Result<QuantumFaultEstimate, DiagnoseError> {
    let qc = diagnosis_circuit_from(c, alpha, beta, config.compile_cap)?;
    let fault_names: Vec<String> = qc
        .fault_qubits()
        .iter()
        .map(|&q| qc.labels()[q].clone())
        .collect();
    let masses = diagnosis_distribution(&qc, config)?;
    match config.mode {
        Mode::Exact => fault_probabilities(&Outcomes::Exact { masses }, &fault_names),
        Mode::Shots { shots } => {
            let width = fault_names.len() + 1;
            let mut attempt = 0;
            loop {
                let seed = if attempt == 0 {
                    config.seed
                } else {
                    substream_seed(config.seed, attempt)
                };
                let histogram = sample_distribution(&masses, width, shots, seed);
                match fault_probabilities(&Outcomes::Sampled { histogram, seed }, &fault_names)
                {
                    Err(DiagnoseError::NoDiagnosisObserved { .. }) if attempt < 3 => {
                        attempt += 1;
                    }
                    result => return result,
                }
            }
        }
    }
}

/// Runs the quantum pipeline on a fault-augmented circuit.
pub fn quantum_diagnose(
    fc: &FaultCircuit,
    alpha: &Assignment,
    beta: &Assignment,
    config: &QuantumConfig,
) -> Result<QuantumFaultEstimate, DiagnoseError> {
    for input in fc.original_inputs() {
        if !alpha.contains(input) {
            return Err(DiagnoseError::Compile(CompileError::MissingInput(
                input.clone(),
            )));
        }
    }
    quantum_diagnose_circuit(fc.circuit(), alpha, beta, config)
}

/// One grid point of an experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub circuit: String,
    pub gates: usize,
    pub qubits: usize,
    pub scenario_seed: u64,
    /// Number of shots; `None` means exact mode.
    pub n: Option<u64>,
    pub err: Option<f64>,
    pub pr_o1: Option<f64>,
    pub t_sat_ms: f64,
    pub t_q_ms: f64,
    /// Reason this grid point produced no measurement, when it did not.
    pub skipped: Option<String>,
}

impl ExperimentRecord {
    pub const CSV_HEADER: &'static str =
        "circuit,gates,qubits,scenario_seed,N,err,pr_o1,t_sat_ms,t_q_ms";

    pub fn csv_row(&self) -> String {
        let n = self.n.map_or_else(|| "exact".to_string(), |n| n.to_string());
        let err = self.err.map_or_else(|| "NA".to_string(), |e| format!("{e:.9e}"));
        let pr = self.pr_o1.map_or_else(|| "NA".to_string(), |p| format!("{p:.9e}"));
        format!(
            "{},{},{},{},{},{},{},{:.3},{:.3}",
            self.circuit,
            self.gates,
            self.qubits,
            self.scenario_seed,
            n,
            err,
            pr,
            self.t_sat_ms,
            self.t_q_ms
        )
    }
}

/// Renders records as the standard CSV table.
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(ExperimentRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Grid definition for the error-vs-size experiment.
#[derive(Debug, Clone)]
pub struct SizeExperiment {
    pub families: Vec<Family>,
    pub widths: Vec<usize>,
    pub scenarios_per_circuit: usize,
    pub max_cardinality: usize,
    pub mode: Mode,
    pub seed: u64,
    pub quantum: QuantumConfig,
}

impl SizeExperiment {
    pub fn new(families: Vec<Family>, widths: Vec<usize>) -> Self {
        SizeExperiment {
            families,
            widths,
            scenarios_per_circuit: 10,
            max_cardinality: 2,
            mode: Mode::Shots { shots: 100_000 },
            seed: 0,
            // Experiments route mid-size oracles through the enumeration
            // engine: identical exact distribution, a fraction of the work.
            quantum: QuantumConfig {
                dense_cap: 20,
                ..QuantumConfig::default()
            },
        }
    }
}

/// The benchmark instances every stock experiment draws from: each family
/// at the widths whose diagnosis stays enumerable.
pub fn default_benchmark_grid() -> Vec<(Family, usize)> {
    vec![
        (Family::RippleAdder, 1),
        (Family::RippleAdder, 2),
        (Family::RippleSubtractor, 1),
        (Family::RippleSubtractor, 2),
        (Family::Multiplexer, 1),
        (Family::Multiplexer, 2),
        (Family::Demultiplexer, 1),
        (Family::Demultiplexer, 2),
        (Family::Comparator, 1),
        (Family::Comparator, 2),
        (Family::BarrelShifter, 2),
        (Family::Multiplier, 1),
        (Family::Multiplier, 2),
        (Family::MultioperandAdder, 1),
    ]
}

fn skipped_record(name: &str, reason: String) -> ExperimentRecord {
    ExperimentRecord {
        circuit: name.to_string(),
        gates: 0,
        qubits: 0,
        scenario_seed: 0,
        n: None,
        err: None,
        pr_o1: None,
        t_sat_ms: 0.0,
        t_q_ms: 0.0,
        skipped: Some(reason),
    }
}

/// Runs both pipelines over a family × width grid with random scenarios and
/// records one row per scenario. Instances that violate a resource cap are
/// recorded as skipped, never dropped.
pub fn run_error_vs_size(cfg: &SizeExperiment) -> Vec<ExperimentRecord> {
    let mut records = Vec::new();
    let mut instance_idx = 0u64;
    for &family in &cfg.families {
        for &width in &cfg.widths {
            let name = format!("{family}_{width}");
            let instance_seed = substream_seed(cfg.seed, instance_idx);
            instance_idx += 1;
            let circuit = match generate_benchmark(family, width) {
                Ok(c) => c,
                Err(e) => {
                    records.push(skipped_record(&name, e.to_string()));
                    continue;
                }
            };
            records.extend(run_instance(&name, &circuit, instance_seed, cfg));
        }
    }
    records
}

fn run_instance(
    name: &str,
    circuit: &Circuit,
    instance_seed: u64,
    cfg: &SizeExperiment,
) -> Vec<ExperimentRecord> {
    let fc = augment_stuck_at_1(circuit);
    let max_cardinality = cfg.max_cardinality.min(fc.fault_inputs().len().max(1));
    if fc.fault_inputs().is_empty() {
        return vec![skipped_record(name, "no gates, nothing to diagnose".into())];
    }
    let scenarios = random_scenarios(&fc, cfg.scenarios_per_circuit, max_cardinality, instance_seed);
    scenarios
        .iter()
        .map(|scenario| run_scenario(name, &fc, scenario, &cfg.mode, &cfg.quantum))
        .collect()
}

fn run_scenario(
    name: &str,
    fc: &FaultCircuit,
    scenario: &Scenario,
    mode: &Mode,
    quantum: &QuantumConfig,
) -> ExperimentRecord {
    let gates = fc.circuit().gate_count() / 2;
    let qubits = match diagnosis_circuit_from(
        fc.circuit(),
        &scenario.alpha,
        &scenario.beta,
        quantum.compile_cap,
    ) {
        Ok(qc) => qc.qubit_count(),
        Err(e) => return skipped_record(name, e.to_string()),
    };

    let sat_start = Instant::now();
    let sat = match circuit_health_sat(fc, &scenario.alpha, &scenario.beta, None) {
        Ok(dist) => dist,
        Err(e) => {
            let mut r = skipped_record(name, format!("sat engine: {e}"));
            r.gates = gates;
            r.qubits = qubits;
            r.scenario_seed = scenario.seed;
            return r;
        }
    };
    let t_sat_ms = sat_start.elapsed().as_secs_f64() * 1e3;

    let run_config = QuantumConfig {
        mode: *mode,
        seed: substream_seed(scenario.seed, 1),
        ..*quantum
    };
    let q_start = Instant::now();
    let estimate = match quantum_diagnose(fc, &scenario.alpha, &scenario.beta, &run_config) {
        Ok(est) => est,
        Err(e) => {
            let mut r = skipped_record(name, format!("quantum engine: {e}"));
            r.gates = gates;
            r.qubits = qubits;
            r.scenario_seed = scenario.seed;
            r.t_sat_ms = t_sat_ms;
            return r;
        }
    };
    let t_q_ms = q_start.elapsed().as_secs_f64() * 1e3;

    let err = err_metric(&sat, &estimate).expect("both engines key by fault wire");
    ExperimentRecord {
        circuit: name.to_string(),
        gates,
        qubits,
        scenario_seed: scenario.seed,
        n: estimate.shots,
        err: Some(err),
        pr_o1: Some(estimate.conditioning_mass),
        t_sat_ms,
        t_q_ms,
        skipped: None,
    }
}

/// One point of the shots sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotsPoint {
    pub shots: u64,
    pub median_err: f64,
}

/// Result of the error-vs-repetitions experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotsSweep {
    pub records: Vec<ExperimentRecord>,
    pub series: Vec<ShotsPoint>,
}

/// Sweeps the shot count over `schedule` (strictly increasing), running
/// `repeats` independently seeded estimates per point; reports the median
/// `Err` per point plus every underlying record.
pub fn run_error_vs_shots(
    name: &str,
    circuit: &Circuit,
    scenario: &Scenario,
    schedule: &[u64],
    repeats: usize,
    seed: u64,
    quantum: &QuantumConfig,
) -> Result<ShotsSweep, DiagnoseError> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) || repeats == 0 {
        return Err(DiagnoseError::BadSchedule);
    }
    let fc = augment_stuck_at_1(circuit);
    let gates = circuit.gate_count();

    let sat_start = Instant::now();
    let sat = circuit_health_sat(&fc, &scenario.alpha, &scenario.beta, None)?;
    let t_sat_ms = sat_start.elapsed().as_secs_f64() * 1e3;

    let qc = diagnosis_circuit_from(
        fc.circuit(),
        &scenario.alpha,
        &scenario.beta,
        quantum.compile_cap,
    )?;
    let qubits = qc.qubit_count();
    let fault_names: Vec<String> = qc
        .fault_qubits()
        .iter()
        .map(|&q| qc.labels()[q].clone())
        .collect();
    let masses = diagnosis_distribution(&qc, quantum)?;
    let width = fault_names.len() + 1;

    let mut records = Vec::new();
    let mut series = Vec::new();
    for (ni, &shots) in schedule.iter().enumerate() {
        let mut errs = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let run_seed = substream_seed(seed, (ni * repeats + r) as u64);
            let q_start = Instant::now();
            let histogram = sample_distribution(&masses, width, shots, run_seed);
            let estimate = fault_probabilities(
                &Outcomes::Sampled {
                    histogram,
                    seed: run_seed,
                },
                &fault_names,
            );
            let t_q_ms = q_start.elapsed().as_secs_f64() * 1e3;
            match estimate {
                Ok(est) => {
                    let err = err_metric(&sat, &est)?;
                    errs.push(err);
                    records.push(ExperimentRecord {
                        circuit: name.to_string(),
                        gates,
                        qubits,
                        scenario_seed: scenario.seed,
                        n: Some(shots),
                        err: Some(err),
                        pr_o1: Some(est.conditioning_mass),
                        t_sat_ms,
                        t_q_ms,
                        skipped: None,
                    });
                }
                Err(DiagnoseError::NoDiagnosisObserved { .. }) => {
                    let mut rec = skipped_record(name, "no o=1 shot in this repeat".into());
                    rec.gates = gates;
                    rec.qubits = qubits;
                    rec.scenario_seed = scenario.seed;
                    rec.n = Some(shots);
                    records.push(rec);
                }
                Err(e) => return Err(e),
            }
        }
        series.push(ShotsPoint {
            shots,
            median_err: median(&mut errs),
        });
    }
    Ok(ShotsSweep { records, series })
}

/// Median of a non-empty slice; averages the middle pair for even lengths.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN errs"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    pearson(&rx, &ry)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
