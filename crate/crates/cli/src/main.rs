use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kequiv_cli::bench::{self, Workload};
use kequiv_cli::gen::{generate_text, GenParams};
use kequiv_cli::problem::Problem;
use kequiv_cli::solve::{self, Engine, LineCheck};
use kequiv_cli::{read_file, CliError};

#[derive(Parser)]
#[command(name = "kequiv", version, about = "Decide and certify k-equivalence entailments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Kset,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchEngine {
    Kset,
    Naive,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkloadArg {
    Line,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Answer every query of a problem file, one line per query.
    Solve {
        problem: String,
        #[arg(long, value_enum, default_value = "kset")]
        engine: EngineArg,
    },
    /// Check the proofs in a solve transcript against the problem.
    Check { problem: String, proofs: String },
    /// Write a random problem with planted lines to standard output.
    Gen {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        lines: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        partition_rate: f64,
        #[arg(long, default_value_t = 10)]
        queries: usize,
        /// Probability of asserting each window on a line.
        #[arg(long, default_value_t = 1.0)]
        coverage: f64,
    },
    /// Time the engines and print CSV rows.
    Bench {
        #[arg(long, value_enum, default_value = "line")]
        workload: WorkloadArg,
        #[arg(long, value_enum, default_value = "kset")]
        engine: BenchEngine,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<usize>,
        /// Number of hypotheses, comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "100")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<String>,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    let mut emit = |s: &str| {
        let _ = writeln!(stdout, "{s}");
    };
    match command {
        Command::Solve { problem, engine } => {
            let p = load(&problem)?;
            let engine = match engine {
                EngineArg::Kset => Engine::Kset,
                EngineArg::Naive => Engine::Naive,
            };
            solve::solve(&p, engine)?.iter().for_each(|l| emit(l));
        }
        Command::Check { problem, proofs } => {
            let p = load(&problem)?;
            let answers = read_file(&proofs)?;
            let report = solve::check(&p, &answers)?;
            let mut failures = 0;
            for r in &report {
                match r {
                    LineCheck::Pass => emit("pass"),
                    LineCheck::Skipped => emit("skip"),
                    LineCheck::Fail(msg) => {
                        failures += 1;
                        emit(&format!("fail: {msg}"));
                    }
                }
            }
            if failures > 0 {
                return Err(CliError::Check(format!(
                    "{failures} of {} proofs failed",
                    report.len()
                )));
            }
        }
        Command::Gen {
            k,
            terms,
            lines,
            seed,
            partition_rate,
            queries,
            coverage,
        } => {
            let params = GenParams {
                partition_rate,
                queries,
                coverage,
                ..GenParams::new(k, terms, lines, seed)
            };
            let _ = stdout.write_all(generate_text(&params)?.as_bytes());
        }
        Command::Bench {
            workload,
            engine,
            k,
            n,
            seed,
            csv,
        } => {
            let w = match workload {
                WorkloadArg::Line => Workload::Line,
                WorkloadArg::Random => Workload::Random,
            };
            let engines: &[Engine] = match engine {
                BenchEngine::Kset => &[Engine::Kset],
                BenchEngine::Naive => &[Engine::Naive],
                BenchEngine::Both => &[Engine::Kset, Engine::Naive],
            };
            let mut out = vec![bench::HEADER.to_owned()];
            for &k in &k {
                for &n in &n {
                    for &e in engines {
                        out.push(bench::run(e, w, k, n, seed)?.to_csv());
                    }
                }
            }
            let text = out.join("\n") + "\n";
            match csv {
                Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?,
                None => {
                    let _ = stdout.write_all(text.as_bytes());
                }
            }
        }
    }
    Ok(())
}

fn load(path: &str) -> Result<Problem, CliError> {
    Problem::parse(&read_file(path)?).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
