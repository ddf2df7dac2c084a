//! Instance generation and the experiment harness: seeded sweeps over
//! instance size, counterexample count and threshold, with CSV output and a
//! per-(instance, phi) summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::checker::{check_equivalence, CheckerConfig, Verdict};
use crate::grover::success_probability;
use crate::netlist::{Circuit, Gate, GateKind, NetlistError};
use crate::oracle::OracleBackend;
use crate::qsim::derive_seed;

/// Counterexample counts per input width used for the standard suite.
pub const PAPER_ROWS: [(usize, &[u64]); 4] = [
    (6, &[0, 1, 3, 6, 13]),
    (7, &[0, 1, 6, 13, 26]),
    (8, &[0, 3, 13, 26, 51]),
    (9, &[0, 5, 26, 51, 102]),
];

pub const PAPER_PHIS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub const CSV_HEADER: &str =
    "bits,c_true,phi,run,verdict,correct,accumulated_iterations,successful_g,wall_ms";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("requested {c} counterexamples but only {n_states} assignments exist")]
    TooManyCounterexamples { c: u64, n_states: u64 },
    #[error("instance needs between 1 and 30 input bits, got {0}")]
    BadWidth(usize),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n_bits: usize,
    pub c: u64,
    pub seed: u64,
}

/// Shape of the random base circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorOptions {
    /// Gates in circuit A; `None` means `n_bits + 4`.
    pub gates: Option<usize>,
    pub outputs: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            gates: None,
            outputs: 2,
        }
    }
}

pub fn generate_instance(spec: &InstanceSpec) -> Result<(Circuit, Circuit), BenchError> {
    generate_instance_with(spec, &GeneratorOptions::default())
}

/// Circuit A is a seeded random DAG; circuit B is A with its first output
/// XOR-ed with an OR of minterms over `c` distinct assignments chosen
/// uniformly, so the pair differs on exactly those assignments.
pub fn generate_instance_with(
    spec: &InstanceSpec,
    opts: &GeneratorOptions,
) -> Result<(Circuit, Circuit), BenchError> {
    let n = spec.n_bits;
    if n == 0 || n > 30 {
        return Err(BenchError::BadWidth(n));
    }
    let n_states = 1u64 << n;
    if spec.c > n_states {
        return Err(BenchError::TooManyCounterexamples {
            c: spec.c,
            n_states,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let inputs: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let num_gates = opts.gates.unwrap_or(n + 4).max(1);
    const KINDS: [GateKind; 7] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
        GateKind::Not,
    ];
    let mut gates = Vec::with_capacity(num_gates);
    let mut signals = inputs.clone();
    for j in 0..num_gates {
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let operands: Vec<String> = if kind == GateKind::Not || signals.len() < 2 {
            vec![signals[rng.gen_range(0..signals.len())].clone()]
        } else {
            let arity = rng.gen_range(2..=3.min(signals.len()));
            sample_indices(&mut rng, signals.len(), arity)
                .into_iter()
                .map(|k| signals[k].clone())
                .collect()
        };
        let kind = if operands.len() == 1 && kind != GateKind::Not {
            GateKind::Buf
        } else {
            kind
        };
        let out = format!("g{j}");
        gates.push(Gate {
            out: out.clone(),
            kind,
            operands,
        });
        signals.push(out);
    }
    // Last gate always drives output 0; the rest are random distinct signals.
    let mut outputs = vec![format!("g{}", num_gates - 1)];
    let extra = opts.outputs.saturating_sub(1).min(signals.len() - 1);
    let others: Vec<&String> = signals[..signals.len() - 1].iter().collect();
    for k in sample_indices(&mut rng, others.len(), extra) {
        outputs.push(others[k].clone());
    }

    let a = Circuit::new(
        format!("gen_a_n{n}_c{}_s{}", spec.c, spec.seed),
        inputs.clone(),
        gates.clone(),
        outputs.clone(),
    )?;

    let mut marked: Vec<u64> = sample_indices(&mut rng, n_states as usize, spec.c as usize)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    marked.sort_unstable();

    let mut b_gates = gates;
    let literal_needed: Vec<bool> = (0..n)
        .map(|i| marked.iter().any(|&x| (x >> (n - 1 - i)) & 1 == 0))
        .collect();
    for (i, _) in literal_needed.iter().enumerate().filter(|(_, &need)| need) {
        b_gates.push(Gate::new(
            format!("inv{i}"),
            GateKind::Not,
            &[inputs[i].as_str()],
        ));
    }
    let minterms: Vec<String> = marked
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let literals: Vec<String> = (0..n)
                .map(|i| {
                    if (x >> (n - 1 - i)) & 1 == 1 {
                        inputs[i].clone()
                    } else {
                        format!("inv{i}")
                    }
                })
                .collect();
            let out = format!("mt{k}");
            let kind = if n == 1 { GateKind::Buf } else { GateKind::And };
            b_gates.push(Gate {
                out: out.clone(),
                kind,
                operands: literals,
            });
            out
        })
        .collect();
    let indicator = match minterms.len() {
        0 => {
            // constant 0
            b_gates.push(Gate::new(
                "ind",
                GateKind::Xor,
                &[inputs[0].as_str(), inputs[0].as_str()],
            ));
            "ind".to_string()
        }
        1 => minterms[0].clone(),
        _ => {
            b_gates.push(Gate {
                out: "ind".into(),
                kind: GateKind::Or,
                operands: minterms,
            });
            "ind".to_string()
        }
    };
    b_gates.push(Gate {
        out: "flip".into(),
        kind: GateKind::Xor,
        operands: vec![outputs[0].clone(), indicator],
    });
    let mut b_outputs = outputs;
    b_outputs[0] = "flip".into();
    let b = Circuit::new(
        format!("gen_b_n{n}_c{}_s{}", spec.c, spec.seed),
        inputs,
        b_gates,
        b_outputs,
    )?;
    Ok((a, b))
}

/// One check of one instance at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub n_bits: usize,
    pub c_true: u64,
    pub phi: f64,
    pub run_index: usize,
    /// `Err` carries the message of a per-record failure.
    pub verdict: Result<Verdict, String>,
    pub accumulated_iterations: u64,
    pub successful_g: Option<u64>,
    pub wall_ms: Option<f64>,
}

impl ExperimentRecord {
    pub fn correct(&self) -> bool {
        match self.verdict {
            Ok(v) => (v == Verdict::NonEquivalent) == (self.c_true > 0),
            Err(_) => false,
        }
    }

    pub fn csv_row(&self) -> String {
        let verdict = match &self.verdict {
            Ok(v) => v.to_string(),
            Err(_) => "ERROR".to_string(),
        };
        let g = self.successful_g.map(|g| g.to_string()).unwrap_or_default();
        let ms = self.wall_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n_bits,
            self.c_true,
            self.phi,
            self.run_index,
            verdict,
            self.correct(),
            self.accumulated_iterations,
            g,
            ms
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// (input bits, counterexample count) instances.
    pub instances: Vec<(usize, u64)>,
    pub phis: Vec<f64>,
    pub runs: usize,
    pub shots_factor: u64,
    pub master_seed: u64,
    pub backend: OracleBackend,
    /// Record wall-clock time per run. Off by default so output is reproducible.
    pub timing: bool,
}

impl SuiteConfig {
    /// The standard suite: widths 6..=9 with their counterexample counts.
    pub fn paper(master_seed: u64) -> Self {
        SuiteConfig {
            instances: PAPER_ROWS
                .iter()
                .flat_map(|&(bits, cs)| cs.iter().map(move |&c| (bits, c)))
                .collect(),
            phis: PAPER_PHIS.to_vec(),
            runs: 10,
            shots_factor: 8,
            master_seed,
            backend: OracleBackend::Semantic,
            timing: false,
        }
    }

    /// Restricts the instances to widths in `bits`.
    pub fn with_bits(mut self, bits: std::ops::RangeInclusive<usize>) -> Self {
        self.instances.retain(|(n, _)| bits.contains(n));
        self
    }
}

/// Seed of the circuits for instance `(bits, c)`; shared by every run and phi.
pub fn instance_seed(master: u64, bits: usize, c: u64) -> u64 {
    derive_seed(derive_seed(master ^ 0x696E_7374, bits as u64), c)
}

/// Seed of the checker for one run; shared across phi values.
pub fn run_seed(master: u64, bits: usize, c: u64, run: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(master, bits as u64), c), run as u64)
}

/// Runs the cross product of instances, thresholds and runs. Records come back
/// sorted by bits, c, phi, run regardless of scheduling.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<ExperimentRecord> {
    let mut instances = cfg.instances.clone();
    instances.sort_unstable();
    instances.dedup();
    let mut phis = cfg.phis.clone();
    phis.sort_by(f64::total_cmp);

    let circuits: Vec<_> = instances
        .par_iter()
        .map(|&(bits, c)| {
            generate_instance(&InstanceSpec {
                n_bits: bits,
                c,
                seed: instance_seed(cfg.master_seed, bits, c),
            })
            .map_err(|e| e.to_string())
        })
        .collect();

    let mut tasks = Vec::new();
    for (k, &(bits, c)) in instances.iter().enumerate() {
        for &phi in &phis {
            for run in 0..cfg.runs {
                tasks.push((k, bits, c, phi, run));
            }
        }
    }

    tasks
        .into_par_iter()
        .map(|(k, bits, c, phi, run)| {
            let start = Instant::now();
            let outcome = circuits[k].clone().and_then(|(a, b)| {
                let check = CheckerConfig {
                    phi,
                    shots_factor: cfg.shots_factor,
                    seed: run_seed(cfg.master_seed, bits, c, run),
                    backend: cfg.backend,
                };
                check_equivalence(&a, &b, &check).map_err(|e| e.to_string())
            });
            let wall_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            match outcome {
                Ok(out) => ExperimentRecord {
                    n_bits: bits,
                    c_true: c,
                    phi,
                    run_index: run,
                    verdict: Ok(out.verdict),
                    accumulated_iterations: out.accumulated_iterations,
                    successful_g: out.successful_g,
                    wall_ms,
                },
                Err(e) => ExperimentRecord {
                    n_bits: bits,
                    c_true: c,
                    phi,
                    run_index: run,
                    verdict: Err(e),
                    accumulated_iterations: 0,
                    successful_g: None,
                    wall_ms,
                },
            }
        })
        .collect()
}

/// Header plus one LF-terminated line per record.
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Per-(instance, phi) summary: `-` if any run misclassified, otherwise the
/// most common accumulated iteration count (smallest on ties).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryTable {
    pub phis: Vec<String>,
    pub rows: Vec<((usize, u64), Vec<String>)>,
}

pub fn emit_table(records: &[ExperimentRecord]) -> SummaryTable {
    let mut phis: Vec<f64> = records.iter().map(|r| r.phi).collect();
    phis.sort_by(f64::total_cmp);
    phis.dedup();

    let mut cells: BTreeMap<(usize, u64), BTreeMap<usize, Vec<&ExperimentRecord>>> =
        BTreeMap::new();
    for r in records {
        let col = phis.iter().position(|&p| p == r.phi).unwrap();
        cells
            .entry((r.n_bits, r.c_true))
            .or_default()
            .entry(col)
            .or_default()
            .push(r);
    }

    let rows = cells
        .into_iter()
        .map(|(key, by_phi)| {
            let row = (0..phis.len())
                .map(|col| match by_phi.get(&col) {
                    None => String::new(),
                    Some(rs) if rs.iter().any(|r| !r.correct()) => "-".to_string(),
                    Some(rs) => {
                        let mut freq: BTreeMap<u64, usize> = BTreeMap::new();
                        for r in rs {
                            *freq.entry(r.accumulated_iterations).or_insert(0) += 1;
                        }
                        let best = freq.values().copied().max().unwrap_or(0);
                        let modal = freq.iter().find(|(_, &n)| n == best).map(|(&v, _)| v);
                        modal.map(|v| v.to_string()).unwrap_or_default()
                    }
                })
                .collect();
            (key, row)
        })
        .collect();

    SummaryTable {
        phis: phis.iter().map(|p| p.to_string()).collect(),
        rows,
    }
}

impl SummaryTable {
    pub fn cell(&self, bits: usize, c: u64, phi: &str) -> Option<&str> {
        let col = self.phis.iter().position(|p| p == phi)?;
        self.rows
            .iter()
            .find(|(k, _)| *k == (bits, c))
            .map(|(_, row)| row[col].as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>4} {:>5} |", "bits", "c");
        for p in &self.phis {
            let _ = write!(out, " {p:>6}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(12 + 7 * self.phis.len()));
        for ((bits, c), row) in &self.rows {
            let _ = write!(out, "{bits:>4} {c:>5} |");
            for cell in row {
                let _ = write!(out, " {cell:>6}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bits,c_true");
        for p in &self.phis {
            let _ = write!(out, ",phi={p}");
        }
        out.push('\n');
        for ((bits, c), row) in &self.rows {
            let _ = writeln!(out, "{bits},{c},{}", row.join(","));
        }
        out
    }
}

/// `g,p` rows for `g = 0..=g_max`.
pub fn theory_curve(n_states: u64, c: u64, g_max: u64) -> String {
    let mut out = String::from("g,p\n");
    for g in 0..=g_max {
        let _ = writeln!(out, "{g},{}", success_probability(g, c, n_states));
    }
    out
}
