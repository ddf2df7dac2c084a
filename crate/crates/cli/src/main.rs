use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use eqgrover::bench::{
    emit_table, generate_instance, records_to_csv, run_suite, theory_curve, InstanceSpec,
    SuiteConfig, PAPER_PHIS, PAPER_ROWS,
};
use eqgrover::oracle::synthesize_gate_oracle;
use eqgrover::{build_miter, check_equivalence, parse_circuit, serialize_circuit, Circuit};
use eqgrover::{CheckerConfig, OracleBackend, Verdict};

#[derive(Parser)]
#[command(
    name = "eqgrover",
    version,
    about = "Equivalence checking with simulated Grover search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check two netlists for equivalence. Exit code 0: equivalent, 1: not, 2: error.
    Check {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        phi: f64,
        #[arg(long, default_value_t = 8)]
        shots_factor: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "semantic")]
        backend: OracleBackend,
        /// Write the gate-level oracle program listing to this file.
        #[arg(long)]
        dump_oracle: Option<PathBuf>,
    },
    /// Run the benchmark sweep and write per-run records as CSV.
    Bench {
        /// Input widths, `lo..hi` (inclusive) or a single width.
        #[arg(long, default_value = "6..9")]
        bits: String,
        #[arg(long, value_delimiter = ',', default_values_t = PAPER_PHIS.to_vec())]
        phi: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        shots_factor: u64,
        #[arg(long, default_value = "semantic")]
        backend: OracleBackend,
        /// Fill the wall_ms column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        /// Also write the summary table as CSV.
        #[arg(long)]
        table_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form success probability per iteration count, as CSV.
    Theory {
        #[arg(long = "n")]
        n_states: u64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        g_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance pair with a known number of counterexamples.
    Gen {
        #[arg(long)]
        bits: usize,
        #[arg(long)]
        c: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
    },
}

fn load(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse_circuit(&text)
        .with_context(|| format!("parsing {}", path.display()))?
        .with_name(name))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_bits(spec: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .with_context(|| format!("invalid bit width `{s}`"))
    };
    let range = match spec.split_once("..") {
        Some((lo, hi)) => parse(lo)?..=parse(hi.trim_start_matches('='))?,
        None => {
            let n = parse(spec)?;
            n..=n
        }
    };
    if range.is_empty() {
        bail!("empty bit range `{spec}`");
    }
    Ok(range)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Check {
            a,
            b,
            phi,
            shots_factor,
            seed,
            backend,
            dump_oracle,
        } => {
            let (a, b) = (load(&a)?, load(&b)?);
            if let Some(path) = dump_oracle {
                let oracle = synthesize_gate_oracle(&build_miter(&a, &b)?)?;
                let listing = oracle
                    .gate_program()
                    .map(|p| p.listing())
                    .unwrap_or_default();
                emit(Some(&path), &listing)?;
            }
            let cfg = CheckerConfig {
                phi,
                shots_factor,
                seed,
                backend,
            };
            let outcome = check_equivalence(&a, &b, &cfg)?;
            print!("{}", outcome.report());
            Ok(match outcome.verdict {
                Verdict::Equivalent => ExitCode::from(0),
                Verdict::NonEquivalent => ExitCode::from(1),
            })
        }
        Command::Bench {
            bits,
            phi,
            runs,
            seed,
            shots_factor,
            backend,
            timing,
            table_out,
            out,
        } => {
            let range = parse_bits(&bits)?;
            let mut cfg = SuiteConfig::paper(seed).with_bits(range.clone());
            // Widths without a standard row get an equivalent and a single-counterexample instance.
            for n in range {
                if !PAPER_ROWS.iter().any(|(b, _)| *b == n) {
                    cfg.instances.extend([(n, 0), (n, 1)]);
                }
            }
            if phi.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                bail!("phi values must lie strictly between 0 and 1");
            }
            cfg.phis = phi;
            cfg.runs = runs;
            cfg.shots_factor = shots_factor;
            cfg.backend = backend;
            cfg.timing = timing;

            let records = run_suite(&cfg);
            emit(out.as_deref(), &records_to_csv(&records))?;
            let table = emit_table(&records);
            if let Some(path) = table_out {
                emit(Some(&path), &table.to_csv())?;
            }
            if out.is_some() {
                print!("{}", table.to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory {
            n_states,
            c,
            g_max,
            out,
        } => {
            if n_states == 0 || c > n_states {
                bail!("need N >= 1 and 0 <= c <= N (got N={n_states}, c={c})");
            }
            emit(out.as_deref(), &theory_curve(n_states, c, g_max))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            bits,
            c,
            seed,
            out_a,
            out_b,
        } => {
            let (a, b) = generate_instance(&InstanceSpec {
                n_bits: bits,
                c,
                seed,
            })?;
            emit(Some(&out_a), &(serialize_circuit(&a) + "\n"))?;
            emit(Some(&out_b), &(serialize_circuit(&b) + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
