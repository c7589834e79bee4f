//! Command-line front end. Every command prints one JSON [`RunReport`].
//!
//! Exit codes: 0 on success, 1 when a randomized procedure gave up, 2 for
//! usage and validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algorithms::grover::{grover_search, quantum_count};
use crate::algorithms::hidden_subgroup::{simon_solve, HiddenSubgroupInstance};
use crate::algorithms::interference::{deutsch, mach_zehnder};
use crate::algorithms::shor::{shor_factor, shor_order};
use crate::error::Error;
use crate::gates::{OracleFunction, PhaseAngle};
use crate::phase_estimation::{best_estimates, boosted_estimate, circular_distance, estimate_phase, extra_qubits, PhaseShiftDevice};
use crate::qft::{approximate_qft, gate_count, qft};
use crate::state::{set_max_qubits, QuantumRegister};
use crate::Complex64;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;
/// Largest register whose amplitudes are printed without `--force`.
pub const DUMP_LIMIT_QUBITS: usize = 12;
const DEFAULT_ATTEMPTS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "phasekit", version, about = "Exact simulation of interference-based quantum algorithms")]
struct Cli {
    /// Seed for the measurement RNG (required by stochastic commands).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Register size limit for this run.
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
    /// Allow state dumps above 12 qubits.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mach-Zehnder detector probabilities.
    Mz {
        #[arg(long, allow_negative_numbers = true)]
        phi0: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi1: f64,
    },
    /// Constant-or-balanced test for a one-bit function.
    Deutsch {
        /// Two-character truth table, e.g. `01`.
        #[arg(long)]
        f: String,
    },
    /// Quantum Fourier transform of a basis state.
    Qft {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: usize,
        /// Drop rotations by angles below π/2^k.
        #[arg(long)]
        approx: Option<u32>,
        #[arg(long)]
        dump_state: bool,
    },
    /// Estimate the eigenphase of diag(1, e^{2πiω}).
    PhaseEstimate {
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long)]
        bits: usize,
        /// Target failure probability; adds extra control qubits.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Multiplicative order of a modulo N.
    Order {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        n: u64,
        /// Control qubits (default 2⌈log₂N⌉ + 1).
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
        max_attempts: usize,
    },
    /// Prime factorisation.
    Factor {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
        max_attempts: usize,
    },
    /// Grover search.
    Search(SearchArgs),
    /// Count solutions of a Boolean function.
    Count {
        #[arg(long)]
        truth_table: String,
        #[arg(long)]
        precision: usize,
    },
    /// Simon's problem with hidden subgroup {0, mask}.
    Simon {
        #[arg(long)]
        n: usize,
        /// Hex mask, with or without `0x`.
        #[arg(long)]
        mask: String,
        /// Default 10·n.
        #[arg(long)]
        max_queries: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("oracle").required(true).args(["truth_table", "target"])))]
struct SearchArgs {
    /// Character i is f(i).
    #[arg(long)]
    truth_table: Option<String>,
    /// Single marked input (requires --bits).
    #[arg(long, requires = "bits")]
    target: Option<usize>,
    #[arg(long)]
    bits: Option<usize>,
    /// Known number of solutions; estimated by counting if absent.
    #[arg(long)]
    solutions: Option<u64>,
}

/// The JSON document printed by every command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub seed: Option<u64>,
    pub oracle_calls: u64,
    pub register_qubits: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(e) if e.is_algorithmic() => 1,
            _ => 2,
        }
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

struct Outcome {
    inputs: Value,
    outputs: Value,
    oracle_calls: u64,
    register_qubits: usize,
}

fn rng_for(seed: Option<u64>, command: &str) -> Result<ChaCha8Rng, CliError> {
    seed.map(ChaCha8Rng::seed_from_u64)
        .ok_or_else(|| CliError::Usage(format!("`{command}` is stochastic and needs --seed")))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Mz { .. } => "mz",
        Command::Deutsch { .. } => "deutsch",
        Command::Qft { .. } => "qft",
        Command::PhaseEstimate { .. } => "phase-estimate",
        Command::Order { .. } => "order",
        Command::Factor { .. } => "factor",
        Command::Search(_) => "search",
        Command::Count { .. } => "count",
        Command::Simon { .. } => "simon",
    }
}

fn parse_hex(s: &str) -> Result<usize, CliError> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X");
    usize::from_str_radix(digits, 16).map_err(|e| CliError::Usage(format!("mask {s:?}: {e}")))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let name = command_name(&cli.command);
    match &cli.command {
        Command::Mz { phi0, phi1 } => {
            let (p0, p1) = mach_zehnder(PhaseAngle::new(*phi0), PhaseAngle::new(*phi1));
            Ok(Outcome {
                inputs: json!({ "phi0": phi0, "phi1": phi1 }),
                outputs: json!({ "P0": p0, "P1": p1 }),
                oracle_calls: 0,
                register_qubits: 1,
            })
        }
        Command::Deutsch { f } => {
            let oracle = OracleFunction::from_bitstring(f)?;
            let v = deutsch(&oracle)?;
            Ok(Outcome {
                inputs: json!({ "f": f }),
                outputs: json!({
                    "verdict": v.verdict,
                    "measured_bit": v.measured_bit,
                    "bit_probability": v.bit_probability,
                }),
                oracle_calls: v.oracle_calls as u64,
                register_qubits: 2,
            })
        }
        Command::Qft { n, x, approx, dump_state } => qft_command(*n, *x, *approx, *dump_state, cli.force),
        Command::PhaseEstimate { omega, bits, delta } => {
            let mut rng = rng_for(cli.seed, name)?;
            if !omega.is_finite() {
                return Err(CliError::Usage("--omega must be finite".into()));
            }
            let device = PhaseShiftDevice {
                phi: PhaseAngle::from_fraction(*omega),
            };
            let target = QuantumRegister::new(1, 1)?;
            let (run, extra) = match delta {
                Some(d) => (boosted_estimate(&device, &target, *bits, *d, &mut rng)?, extra_qubits(*d)?),
                None => (estimate_phase(&device, &target, *bits, &mut rng)?, 0),
            };
            let e = run.estimate;
            Ok(Outcome {
                inputs: json!({ "omega": omega, "bits": bits, "delta": delta }),
                outputs: json!({
                    "y": e.y,
                    "omega_hat": e.omega_hat,
                    "n_bits": e.n_bits,
                    "extra_qubits": extra,
                    "probability": e.success_probability,
                    "error": circular_distance(e.omega_hat, *omega),
                    "best_estimates": best_estimates(*omega, *bits),
                }),
                oracle_calls: run.base_applications,
                register_qubits: run.register_qubits,
            })
        }
        Command::Order { a, n, precision, max_attempts } => {
            let mut rng = rng_for(cli.seed, name)?;
            let mut calls = 0;
            let mut last = None;
            for attempt in 1..=*max_attempts {
                let run = shor_order(*a, *n, *precision, &mut rng)?;
                calls += run.oracle_calls;
                if let Some(r) = run.order {
                    return Ok(Outcome {
                        inputs: json!({ "a": a, "n": n, "precision": precision }),
                        outputs: json!({
                            "order": r,
                            "y": run.y,
                            "fraction": run.fraction.map(|f| f.to_string()),
                            "precision_bits": run.precision_bits,
                            "attempts": attempt,
                        }),
                        oracle_calls: calls,
                        register_qubits: run.register_qubits,
                    });
                }
                last = Some(run);
            }
            let reason = match last {
                Some(run) => format!("no verified order (last readout y = {})", run.y),
                None => "no verified order".to_string(),
            };
            Err(CliError::Run(Error::AttemptsExhausted {
                attempts: *max_attempts,
                reason,
            }))
        }
        Command::Factor { n, max_attempts } => {
            let mut rng = rng_for(cli.seed, name)?;
            let r = shor_factor(*n, &mut rng, *max_attempts)?;
            let factors: Map<String, Value> = r
                .factors
                .prime_powers()
                .iter()
                .map(|(p, e)| (p.to_string(), json!(e)))
                .collect();
            Ok(Outcome {
                inputs: json!({ "n": n }),
                outputs: json!({ "factors": factors, "order_runs": r.order_runs }),
                oracle_calls: r.oracle_calls,
                register_qubits: r.register_qubits,
            })
        }
        Command::Search(args) => {
            let mut rng = rng_for(cli.seed, name)?;
            let (f, known, inputs) = match (&args.truth_table, args.target, args.bits) {
                (Some(table), _, _) => (
                    OracleFunction::from_bitstring(table)?,
                    args.solutions,
                    json!({ "truth_table": table, "solutions": args.solutions }),
                ),
                (None, Some(t), Some(bits)) => (
                    OracleFunction::single_target(bits, t)?,
                    Some(args.solutions.unwrap_or(1)),
                    json!({ "target": t, "bits": bits }),
                ),
                _ => return Err(CliError::Usage("search needs --truth-table or --target with --bits".into())),
            };
            let true_j = match known {
                Some(j) => j,
                None => f.count_solutions() as u64,
            };
            let r = grover_search(&f, known, &mut rng)?;
            let classical = (f.domain_size() as f64) / true_j.max(1) as f64;
            Ok(Outcome {
                inputs,
                outputs: json!({
                    "index": r.index,
                    "iterations": r.iterations,
                    "attempts": r.attempts,
                    "solutions_used": r.solutions_used,
                    "success_probability": r.success_probability,
                    "counting_calls": r.counting_calls,
                    "classical_checks": r.classical_checks,
                    "classical_expected_queries": classical,
                }),
                oracle_calls: r.oracle_calls,
                register_qubits: r.register_qubits,
            })
        }
        Command::Count { truth_table, precision } => {
            let mut rng = rng_for(cli.seed, name)?;
            let f = OracleFunction::from_bitstring(truth_table)?;
            let c = quantum_count(&f, *precision, &mut rng)?;
            let capacity = f.domain_size() as f64;
            Ok(Outcome {
                inputs: json!({ "truth_table": truth_table, "precision": precision }),
                outputs: json!({
                    "y": c.y,
                    "omega_estimate": c.omega_estimate,
                    "j_estimate": c.j_estimate,
                    "j_rounded": c.j_rounded,
                    "j_small_angle": capacity * (std::f64::consts::PI * c.omega_estimate).powi(2),
                    "grover_applications": c.grover_applications,
                }),
                oracle_calls: c.grover_applications,
                register_qubits: c.register_qubits,
            })
        }
        Command::Simon { n, mask, max_queries } => {
            let mut rng = rng_for(cli.seed, name)?;
            let m = parse_hex(mask)?;
            let inst = HiddenSubgroupInstance::from_mask(*n, m)?;
            let r = simon_solve(&inst, &mut rng, max_queries.unwrap_or(10 * n))?;
            let hex: Vec<String> = r.generators.iter().map(|g| format!("{g:#x}")).collect();
            Ok(Outcome {
                inputs: json!({ "n": n, "mask": format!("{m:#x}") }),
                outputs: json!({
                    "generators": hex,
                    "subgroup_size": r.subgroup().len(),
                    "samples": r.samples,
                    "classical_checks": r.classical_checks,
                }),
                oracle_calls: r.queries as u64,
                register_qubits: r.register_qubits,
            })
        }
    }
}

fn qft_command(n: usize, x: usize, approx: Option<u32>, dump: bool, force: bool) -> Result<Outcome, CliError> {
    if dump && n > DUMP_LIMIT_QUBITS && !force {
        return Err(CliError::Usage(format!(
            "refusing to dump {n} qubits (limit {DUMP_LIMIT_QUBITS}); pass --force"
        )));
    }
    let qubits: Vec<usize> = (0..n).collect();
    let mut exact = QuantumRegister::new(n, x)?;
    qft(&mut exact, &qubits)?;
    let dim = exact.dimension();
    let norm = 1.0 / (dim as f64).sqrt();
    let dft_error = exact
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(y, a)| {
            let phase = std::f64::consts::TAU * ((x as u128 * y as u128) % dim as u128) as f64 / dim as f64;
            (a - Complex64::from_polar(norm, phase)).norm()
        })
        .fold(0.0, f64::max);
    let mut outputs = json!({
        "gate_count": gate_count(n, approx),
        "max_dft_error": dft_error,
    });
    let state = match approx {
        Some(k) => {
            let mut a = QuantumRegister::new(n, x)?;
            approximate_qft(&mut a, &qubits, k)?;
            outputs["fidelity_to_exact"] = json!(a.fidelity(&exact));
            a
        }
        None => exact,
    };
    if dump {
        outputs["state"] = json!(state.to_pairs());
    }
    Ok(Outcome {
        inputs: json!({ "n": n, "x": x, "approx": approx }),
        outputs,
        oracle_calls: 0,
        register_qubits: n,
    })
}

/// Parses `argv` (program name first) and runs the command.
pub fn execute<I, T>(argv: I) -> Result<RunReport, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute_parsed(&cli)
}

fn execute_parsed(cli: &Cli) -> Result<RunReport, CliError> {
    if let Some(m) = cli.max_qubits {
        set_max_qubits(m)?;
    }
    let start = Instant::now();
    let out = dispatch(cli)?;
    Ok(RunReport {
        schema: SCHEMA_VERSION,
        command: command_name(&cli.command).to_string(),
        inputs: object(out.inputs),
        outputs: object(out.outputs),
        seed: cli.seed,
        oracle_calls: out.oracle_calls,
        register_qubits: out.register_qubits,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Full entry point: report on `stdout`, diagnostics on `stderr`, exit code returned.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            return 2;
        }
    };
    match execute_parsed(&cli) {
        Ok(report) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report is plain JSON");
            let _ = writeln!(stdout, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(args: &[&str]) -> RunReport {
        execute(std::iter::once("phasekit").chain(args.iter().copied())).unwrap()
    }

    fn code(args: &[&str]) -> i32 {
        let mut out = Vec::new();
        let mut err = Vec::new();
        run_with(std::iter::once("phasekit").chain(args.iter().copied()), &mut out, &mut err)
    }

    #[test]
    fn mz_pi_clicks_detector_one() {
        let r = ok(&["mz", "--phi0", "3.14159265", "--phi1", "0"]);
        assert!((r.outputs["P1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.schema, 1);
        assert_eq!(r.seed, None);
    }

    #[test]
    fn deutsch_balanced() {
        let r = ok(&["deutsch", "--f", "01"]);
        assert_eq!(r.outputs["verdict"], "balanced");
        assert_eq!(r.oracle_calls, 1);
    }

    #[test]
    fn factor_35() {
        let r = ok(&["factor", "--n", "35", "--seed", "7"]);
        assert_eq!(r.outputs["factors"], json!({"5": 1, "7": 1}));
    }

    #[test]
    fn qft_reports() {
        let r = ok(&["qft", "--n", "3", "--x", "5", "--dump-state"]);
        assert!(r.outputs["max_dft_error"].as_f64().unwrap() < 1e-12);
        assert_eq!(r.outputs["state"].as_array().unwrap().len(), 8);
        let r = ok(&["qft", "--n", "6", "--x", "9", "--approx", "2"]);
        assert!(r.outputs["fidelity_to_exact"].as_f64().unwrap() > 0.8);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["mz", "--phi0", "0", "--phi1", "0"]), 0);
        assert_eq!(code(&["bogus"]), 2);
        assert_eq!(code(&["factor", "--n", "35"]), 2);
        assert_eq!(code(&["deutsch", "--f", "0110"]), 2);
        assert_eq!(code(&["qft", "--n", "13", "--x", "0", "--dump-state"]), 2);
        assert_eq!(code(&["search", "--truth-table", "0000", "--seed", "1"]), 1);
        assert_eq!(code(&["simon", "--n", "3", "--mask", "zz", "--seed", "1"]), 2);
        assert_eq!(code(&["--help"]), 0);
    }

    #[test]
    fn stochastic_outputs_repeat() {
        for args in [
            &["order", "--a", "4", "--n", "35", "--seed", "3"][..],
            &["phase-estimate", "--omega", "0.3", "--bits", "5", "--seed", "9"],
            &["count", "--truth-table", "0110100000000000", "--precision", "5", "--seed", "1"],
            &["simon", "--n", "4", "--mask", "0xa", "--seed", "2"],
            &["search", "--target", "5", "--bits", "6", "--seed", "4"],
        ] {
            let a = ok(args);
            let b = ok(args);
            assert_eq!(
                serde_json::to_string(&a.outputs).unwrap(),
                serde_json::to_string(&b.outputs).unwrap()
            );
        }
    }
}
