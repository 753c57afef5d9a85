//! Command-line front end for the circuit diagnosis workbench.
//!
//! Subcommands: `generate` benchmark netlists, `diagnose` an observation
//! with the SAT or quantum engine, `experiment` for the error-vs-size and
//! error-vs-shots sweeps, and `export` of the CNF or quantum-assembly
//! artifacts. JSON on stdout is the machine interface; `--pretty` renders
//! a table for humans.
//!
//! Exit codes: 0 success, 2 usage or input problems, 3 inconsistent
//! observation (no diagnosis exists), 4 resource cap exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdiag::diagnose::{
    self, run_error_vs_shots, run_error_vs_size, records_to_csv, DiagnoseError, Mode,
    QuantumConfig, SizeExperiment,
};
use qdiag::faultlab::{augment_stuck_at_1, random_scenarios};
use qdiag::netlist::{generate_benchmark, parse_bench, render_bench, Assignment, Circuit, Family};
use qdiag::satdiag::{self, SatDiagError};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qdiag", version, about = "Fault diagnosis of switching circuits, exactly by SAT and approximately by simulated quantum readout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a benchmark-family netlist in bench format.
    Generate(GenerateArgs),
    /// Compute conditional fault probabilities for one observation.
    Diagnose(DiagnoseArgs),
    /// Run the error-vs-size or error-vs-shots comparison.
    Experiment(ExperimentArgs),
    /// Export the diagnosis CNF (DIMACS) or the compiled oracle (QASM).
    Export(ExportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Benchmark family, e.g. ripple_adder.
    #[arg(long)]
    family: String,
    /// Bit width of the instance.
    #[arg(long)]
    width: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Engine {
    Sat,
    Quantum,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Shots,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Netlist path, or `-` for stdin.
    #[arg(long)]
    netlist: String,
    /// Primary input assignment, e.g. `i1=0,i2=0,ci=1`.
    #[arg(long)]
    alpha: String,
    /// Observed output assignment, e.g. `sigma=1,co=1`.
    #[arg(long)]
    beta: String,
    #[arg(long, value_enum, default_value_t = Engine::Sat)]
    engine: Engine,
    /// Quantum readout mode; exact is the default.
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Shot count; required when --mode shots.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dense-statevector qubit budget (also caps enumerated assumables).
    #[arg(long, default_value_t = qdiag::qcompile::DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,
    /// Render a table instead of JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Size,
    Shots,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: ExperimentKind,
    /// Comma-separated families for --kind size (default: all).
    #[arg(long)]
    families: Option<String>,
    /// Comma-separated widths for --kind size.
    #[arg(long, default_value = "1,2")]
    widths: String,
    /// Instance for --kind shots: a `<family>_<width>` spec or a netlist path.
    #[arg(long)]
    circuit: Option<String>,
    /// Scenarios per circuit (size) or drawn for the instance (shots).
    #[arg(long, default_value_t = 10)]
    scenarios: usize,
    /// Most faults injected per scenario.
    #[arg(long, default_value_t = 2)]
    cardinality: usize,
    /// Shot counts swept by --kind shots, comma-separated, increasing.
    #[arg(long, default_value = "64,128,256,512,1024,2048,4096,8192,16384,32768,65536")]
    schedule: String,
    /// Independent repeats per schedule point.
    #[arg(long, default_value_t = 11)]
    repeats: usize,
    /// Shots per run for --kind size; exact mode when omitted.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = qdiag::qcompile::DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    Cnf,
    Qasm,
}

#[derive(Args)]
struct ExportArgs {
    /// Netlist path, or `-` for stdin.
    #[arg(long)]
    netlist: String,
    /// May bind any subset of the inputs; unbound inputs are assumable.
    #[arg(long, default_value = "")]
    alpha: String,
    #[arg(long)]
    beta: String,
    #[arg(long, value_enum)]
    what: ExportWhat,
    /// Insert stuck-at-1 faults first, as the diagnose engines do.
    #[arg(long)]
    augment: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures mapped onto the documented exit codes.
enum CliError {
    Usage(String),
    Inconsistent(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Inconsistent(m) | CliError::Resource(m) => m,
        }
    }
}

fn usage(err: impl ToString) -> CliError {
    CliError::Usage(err.to_string())
}

impl From<SatDiagError> for CliError {
    fn from(err: SatDiagError) -> CliError {
        match err {
            SatDiagError::InconsistentObservation => CliError::Inconsistent(err.to_string()),
            SatDiagError::BudgetExceeded { .. } => CliError::Resource(err.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<DiagnoseError> for CliError {
    fn from(err: DiagnoseError) -> CliError {
        match err {
            DiagnoseError::NoDiagnosisObserved { .. } => CliError::Inconsistent(err.to_string()),
            DiagnoseError::ResourceCap { .. } => CliError::Resource(err.to_string()),
            DiagnoseError::Compile(qdiag::qcompile::CompileError::QubitBudget { .. }) => {
                CliError::Resource(err.to_string())
            }
            DiagnoseError::Sim(qdiag::qsim::SimError::CapExceeded { .. }) => {
                CliError::Resource(err.to_string())
            }
            DiagnoseError::Sat(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Diagnose(args) => cmd_diagnose(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn read_netlist(spec: &str) -> Result<Circuit, CliError> {
    let text = if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| usage(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(spec).map_err(|e| usage(format!("reading {spec}: {e}")))?
    };
    parse_bench(&text).map_err(usage)
}

fn parse_assignment(text: &str, what: &str) -> Result<Assignment, CliError> {
    Assignment::parse(text).map_err(|e| usage(format!("{what}: {e}")))
}

fn write_out(out: Option<&Path>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, payload).map_err(|e| usage(format!("writing {}: {e}", path.display())))
        }
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let family: Family = args.family.parse().map_err(usage)?;
    let circuit = generate_benchmark(family, args.width).map_err(usage)?;
    write_out(args.out.as_deref(), &render_bench(&circuit))
}

fn quantum_config(args: &DiagnoseArgs) -> Result<QuantumConfig, CliError> {
    let mode = match (args.mode, args.shots) {
        (ModeArg::Exact, None) => Mode::Exact,
        (ModeArg::Exact, Some(_)) => {
            return Err(usage("--shots requires --mode shots"));
        }
        (ModeArg::Shots, Some(n)) if n >= 1 => Mode::Shots { shots: n },
        (ModeArg::Shots, _) => {
            return Err(usage("--mode shots needs --shots N with N >= 1"));
        }
    };
    Ok(QuantumConfig {
        mode,
        seed: args.seed,
        dense_cap: args.qubit_cap,
        enum_cap: args.qubit_cap,
        compile_cap: args.qubit_cap.max(diagnose::DEFAULT_COMPILE_CAP),
    })
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<(), CliError> {
    let circuit = read_netlist(&args.netlist)?;
    let alpha = parse_assignment(&args.alpha, "--alpha")?;
    let beta = parse_assignment(&args.beta, "--beta")?;
    let fc = augment_stuck_at_1(&circuit);

    match args.engine {
        Engine::Sat => {
            let dist = satdiag::circuit_health_sat(&fc, &alpha, &beta, None)?;
            if args.pretty {
                println!("diagnoses: {}", dist.diagnoses);
                println!("{:<24} {:>10} {:>12}", "fault", "n/d", "probability");
                for name in dist.fault_names() {
                    let (n, d) = dist.probability(name).unwrap();
                    println!("{name:<24} {:>10} {:>12.6}", format!("{n}/{d}"), n as f64 / d as f64);
                }
            } else {
                let mut json = dist.to_json();
                json["engine"] = "sat".into();
                println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
            }
        }
        Engine::Quantum => {
            let config = quantum_config(&args)?;
            let est = diagnose::quantum_diagnose(&fc, &alpha, &beta, &config)?;
            if args.pretty {
                println!("Pr(o=1): {:.6}", est.conditioning_mass);
                match est.shots {
                    Some(n) => println!("shots: {n} (seed {}, {})", est.seed.unwrap(), est.generator.unwrap()),
                    None => println!("mode: exact"),
                }
                println!("{:<24} {:>12}", "fault", "probability");
                for (name, p) in &est.probabilities {
                    println!("{name:<24} {p:>12.6}");
                }
            } else {
                let mut json = serde_json::to_value(&est).expect("serializable");
                json["engine"] = "quantum".into();
                println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
            }
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>())
        .collect();
    let items = items.map_err(|e| usage(format!("{what}: {e}")))?;
    if items.is_empty() {
        return Err(usage(format!("{what}: empty list")));
    }
    Ok(items)
}

/// An instance spec is either `<family>_<width>` or a netlist path.
fn resolve_instance(spec: &str) -> Result<(String, Circuit), CliError> {
    if let Some((family_name, width)) = spec.rsplit_once('_') {
        if let (Ok(family), Ok(width)) = (family_name.parse::<Family>(), width.parse::<usize>()) {
            let circuit = generate_benchmark(family, width).map_err(usage)?;
            return Ok((spec.to_string(), circuit));
        }
    }
    let circuit = read_netlist(spec)?;
    let name = Path::new(spec)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "netlist".to_string());
    Ok((name, circuit))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    // Sweeps route oracles above 20 qubits through the enumeration engine;
    // the exact distribution is identical and the sweep stays interactive.
    let quantum = QuantumConfig {
        dense_cap: args.qubit_cap.min(20),
        enum_cap: args.qubit_cap,
        compile_cap: args.qubit_cap.max(diagnose::DEFAULT_COMPILE_CAP),
        ..QuantumConfig::default()
    };
    match args.kind {
        ExperimentKind::Size => {
            let families = match &args.families {
                Some(list) => parse_list::<Family>(list, "--families")?,
                None => Family::ALL.to_vec(),
            };
            let widths = parse_list::<usize>(&args.widths, "--widths")?;
            if args.scenarios == 0 {
                return Err(usage("--scenarios must be at least 1"));
            }
            let cfg = SizeExperiment {
                families,
                widths,
                scenarios_per_circuit: args.scenarios,
                max_cardinality: args.cardinality,
                mode: match args.shots {
                    Some(n) if n >= 1 => Mode::Shots { shots: n },
                    Some(_) => return Err(usage("--shots must be at least 1")),
                    None => Mode::Exact,
                },
                seed: args.seed,
                quantum,
            };
            let records = run_error_vs_size(&cfg);
            let payload = match args.format {
                Format::Csv => records_to_csv(&records),
                Format::Json => {
                    let json = serde_json::json!({ "records": records });
                    format!("{}\n", serde_json::to_string_pretty(&json).expect("serializable"))
                }
            };
            write_out(args.out.as_deref(), &payload)
        }
        ExperimentKind::Shots => {
            let spec = args
                .circuit
                .as_deref()
                .ok_or_else(|| usage("--kind shots requires --circuit"))?;
            let (name, circuit) = resolve_instance(spec)?;
            let schedule = parse_list::<u64>(&args.schedule, "--schedule")?;
            let fc = augment_stuck_at_1(&circuit);
            if fc.fault_inputs().is_empty() {
                return Err(usage("circuit has no gates, nothing to diagnose"));
            }
            let cardinality = args.cardinality.clamp(1, fc.fault_inputs().len());
            let scenario = random_scenarios(&fc, 1, cardinality, args.seed)
                .pop()
                .expect("one scenario");
            let sweep = run_error_vs_shots(
                &name,
                &circuit,
                &scenario,
                &schedule,
                args.repeats,
                args.seed,
                &quantum,
            )?;
            let payload = match args.format {
                Format::Csv => records_to_csv(&sweep.records),
                Format::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&sweep).expect("serializable"))
                }
            };
            write_out(args.out.as_deref(), &payload)
        }
    }
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let parsed = read_netlist(&args.netlist)?;
    let alpha = parse_assignment(&args.alpha, "--alpha")?;
    let beta = parse_assignment(&args.beta, "--beta")?;
    let circuit = if args.augment {
        augment_stuck_at_1(&parsed).circuit().clone()
    } else {
        parsed
    };
    let payload = match args.what {
        ExportWhat::Cnf => satdiag::to_cnf_observation(&circuit, &alpha, &beta)?.to_dimacs(),
        ExportWhat::Qasm => {
            let qc = qdiag::qcompile::diagnosis_circuit_from(
                &circuit,
                &alpha,
                &beta,
                diagnose::DEFAULT_COMPILE_CAP,
            )
            .map_err(|e| match e {
                qdiag::qcompile::CompileError::QubitBudget { .. } => {
                    CliError::Resource(e.to_string())
                }
                other => usage(other),
            })?;
            qc.to_qasm()
        }
    };
    write_out(args.out.as_deref(), &payload)
}
