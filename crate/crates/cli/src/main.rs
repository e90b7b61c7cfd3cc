//! `qcircuit`: simulate circuits, synthesize unitaries, search discrete
//! gate words, compile reversible circuits and run Turing machines.
//!
//! Every run prints a JSON report on stdout. Exit codes: 0 success,
//! 2 bad input, 3 verification failed, 4 fuel exhausted, 5 stuck, 7 I/O.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::TmMode;
use input::{read_text, Config};
use report::{exit, CliError, RunReport};

#[derive(Parser)]
#[command(name = "qcircuit", version, about = "Quantum circuit simulation and synthesis toolkit")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `key = value` file: rng, tol, eps, fuel, shots, max_len.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the JSON report to this path (`json` or `-`: stdout only).
    #[arg(long, global = true)]
    report: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file on a basis state or a state dump.
    Simulate {
        circuit: PathBuf,
        /// Basis index of the input state.
        #[arg(long)]
        input: Option<usize>,
        /// State dump file (`index bits re im` lines).
        #[arg(long)]
        state: Option<PathBuf>,
        /// `all` or a wire number.
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Compile a unitary matrix file into single-qubit and CNOT gates.
    Synthesize {
        matrix: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the circuit here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best word over a discrete gate set approximating a 2x2 unitary.
    Approx {
        matrix: PathBuf,
        /// Comma-separated gate names.
        #[arg(long, default_value = "H,S,T")]
        set: String,
        /// Do not add the adjoints of the gates.
        #[arg(long)]
        no_adjoints: bool,
        #[arg(long)]
        max_len: Option<usize>,
        /// Fail unless the error is at most this.
        #[arg(long)]
        target_error: Option<f64>,
    },
    /// Compile a truth table into a verified reversible circuit.
    Revcomp {
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turing machines.
    Tm {
        #[command(subcommand)]
        command: TmCommand,
    },
}

#[derive(Subcommand)]
enum TmCommand {
    /// Run a machine program on an input word.
    Run {
        program: PathBuf,
        #[arg(long)]
        input: Option<String>,
        /// Comma-separated numbers, encoded in unary.
        #[arg(long)]
        unary: Option<String>,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Det)]
        mode: Mode,
        /// Prune repeated configurations in nondeterministic search.
        #[arg(long)]
        dedup: bool,
        /// Include every configuration of a deterministic run.
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Det,
    Nd,
    Prob,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Synthesize { .. } => "synthesize",
            Command::Approx { .. } => "approx",
            Command::Revcomp { .. } => "revcomp",
            Command::Tm { .. } => "tm run",
        }
    }
}

fn dispatch(cli: &Cli) -> Result<RunReport, CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::parse(&read_text(p)?)?,
        None => Config::default(),
    };
    let seed = cli.seed;
    match &cli.command {
        Command::Simulate { circuit, input, state, measure, shots } => commands::simulate(
            &commands::SimulateArgs {
                circuit: circuit.clone(),
                input: *input,
                state: state.clone(),
                measure: measure.clone(),
                shots: *shots,
            },
            &cfg,
            seed,
        ),
        Command::Synthesize { matrix, tol, out } => commands::synthesize(
            &commands::SynthesizeArgs { matrix: matrix.clone(), tol: *tol, out: out.clone() },
            &cfg,
            seed,
        ),
        Command::Approx { matrix, set, no_adjoints, max_len, target_error } => commands::approx(
            &commands::ApproxArgs {
                matrix: matrix.clone(),
                set: set.clone(),
                no_adjoints: *no_adjoints,
                max_len: *max_len,
                target_error: *target_error,
            },
            &cfg,
            seed,
        ),
        Command::Revcomp { table, out } => {
            commands::revcomp(&commands::RevcompArgs { table: table.clone(), out: out.clone() }, &cfg, seed)
        }
        Command::Tm { command: TmCommand::Run { program, input, unary, fuel, mode, dedup, trace } } => {
            let mode = match mode {
                Mode::Det => TmMode::Det,
                Mode::Nd => TmMode::Nd,
                Mode::Prob => TmMode::Prob,
            };
            commands::tm_run(
                &commands::TmArgs {
                    program: program.clone(),
                    input: input.clone(),
                    unary: unary.clone(),
                    fuel: *fuel,
                    mode,
                    dedup: *dedup,
                    trace: *trace,
                },
                &cfg,
                seed,
            )
        }
    }
}

fn emit(value: &serde_json::Value, report_path: Option<&str>) -> i32 {
    let text = serde_json::to_string_pretty(value).expect("json") + "\n";
    print!("{text}");
    match report_path {
        None | Some("json") | Some("-") => exit::OK,
        Some(p) => match std::fs::write(p, &text) {
            Ok(()) => exit::OK,
            Err(e) => {
                eprintln!("io: {p}: {e}");
                exit::IO
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let err = CliError { code: exit::INPUT, kind: "usage", message: e.kind().to_string() };
            let _ = emit(&err.to_json("usage"), None);
            return ExitCode::from(exit::INPUT as u8);
        }
    };
    let (json, code) = match dispatch(&cli) {
        Ok(r) => (r.to_json(), r.exit_code),
        Err(e) => {
            eprintln!("{e}");
            (e.to_json(cli.command.name()), e.code)
        }
    };
    let write_code = emit(&json, cli.report.as_deref());
    ExitCode::from(if code == exit::OK { write_code } else { code } as u8)
}
