//! Phase oracles marking the counterexamples of a miter.
//!
//! Two interchangeable backends:
//!
//! * `Semantic` precomputes the miter's truth table and negates the amplitude
//!   of every marked input basis state directly. No ancillas.
//! * `Gate` is a reversible gate program: each miter gate is computed into its
//!   own fresh ancilla, a single `Z` on the indicator qubit injects the phase,
//!   then the compute block is replayed in reverse so every ancilla returns to
//!   `|0>`.
//!
//! Mapping from netlist gates onto the target ancilla `t`:
//!
//! | gate   | reversible realization                                         |
//! |--------|----------------------------------------------------------------|
//! | AND    | MCX(distinct operands -> t), CX for a single distinct operand   |
//! | NAND   | AND, then X(t)                                                 |
//! | OR     | X on operands, MCX -> t, X on operands, X(t)  (De Morgan)      |
//! | NOR    | OR without the final X(t)                                      |
//! | XOR    | one CX per operand occurrence                                  |
//! | XNOR   | XOR, then X(t)                                                 |
//! | BUF    | CX(operand -> t)                                               |
//! | NOT    | CX(operand -> t), X(t)                                         |
//! | ONEHOT | per operand: X-conjugated MCX with that operand as the only     |
//! |        | positive control; the terms are mutually exclusive             |
//!
//! Every emitted gate is self-inverse, so the uncompute block is the compute
//! block reversed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::miter::{MiterError, MiterInstance, DEFAULT_BRUTE_FORCE_LIMIT};
use crate::netlist::GateKind;
use crate::qsim::{GateOp, QuantumState, SimError, DEFAULT_MAX_QUBITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("gate oracle needs {required} qubits but the budget is {budget}")]
    BudgetExceeded { required: usize, budget: usize },
    #[error("oracle acts on {expected} qubits but the state has {got}")]
    StateMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Miter(#[from] MiterError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OracleBackend {
    #[default]
    Semantic,
    Gate,
}

impl std::str::FromStr for OracleBackend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "semantic" => Ok(OracleBackend::Semantic),
            "gate" => Ok(OracleBackend::Gate),
            other => Err(format!(
                "unknown oracle backend `{other}` (expected semantic|gate)"
            )),
        }
    }
}

impl std::fmt::Display for OracleBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleBackend::Semantic => "semantic",
            OracleBackend::Gate => "gate",
        })
    }
}

/// Counterexample basis states of a miter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    assignments: Vec<u64>,
}

impl MarkedSet {
    pub fn new(mut assignments: Vec<u64>) -> Self {
        assignments.sort_unstable();
        assignments.dedup();
        MarkedSet { assignments }
    }

    pub fn assignments(&self) -> &[u64] {
        &self.assignments
    }

    pub fn c(&self) -> usize {
        self.assignments.len()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.assignments.binary_search(&x).is_ok()
    }
}

pub fn marked_set(m: &MiterInstance) -> Result<MarkedSet, MiterError> {
    let cex = m.enumerate_counterexamples_with_limit(DEFAULT_BRUTE_FORCE_LIMIT)?;
    Ok(MarkedSet::new(cex.iter().map(|a| a.to_index()).collect()))
}

/// Reversible gate realization of a miter's phase oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct GateProgram {
    ops: Vec<GateOp>,
    num_ancillas: usize,
    result_qubit: usize,
    ancilla_map: Vec<(String, usize)>,
}

impl GateProgram {
    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn num_ancillas(&self) -> usize {
        self.num_ancillas
    }

    pub fn result_qubit(&self) -> usize {
        self.result_qubit
    }

    /// Signal name to ancilla qubit.
    pub fn ancilla_map(&self) -> &[(String, usize)] {
        &self.ancilla_map
    }

    /// One gate per line, for inspection.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (name, q) in &self.ancilla_map {
            let _ = writeln!(out, "# ancilla {q} = {name}");
        }
        for op in &self.ops {
            let _ = writeln!(out, "{op}");
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Realization {
    Semantic { marked: Vec<bool> },
    Gate(GateProgram),
}

#[derive(Debug, Clone)]
pub struct PhaseOracle {
    n_inputs: usize,
    realization: Realization,
}

/// Predicate-driven oracle over the miter's truth table.
pub fn semantic_oracle(m: &MiterInstance) -> Result<PhaseOracle, OracleError> {
    Ok(PhaseOracle {
        n_inputs: m.n_inputs(),
        realization: Realization::Semantic {
            marked: m.truth_table(DEFAULT_MAX_QUBITS)?,
        },
    })
}

/// Gate-level oracle under the default qubit budget.
pub fn synthesize_gate_oracle(m: &MiterInstance) -> Result<PhaseOracle, OracleError> {
    synthesize_gate_oracle_with_budget(m, DEFAULT_MAX_QUBITS)
}

pub fn synthesize_gate_oracle_with_budget(
    m: &MiterInstance,
    budget: usize,
) -> Result<PhaseOracle, OracleError> {
    let circuit = m.combined();
    let n = circuit.num_inputs();
    let required = n + circuit.gates().len();
    if required > budget {
        return Err(OracleError::BudgetExceeded { required, budget });
    }

    // Signal id and qubit index coincide: inputs first, then one ancilla per gate.
    let mut compute = Vec::new();
    for (j, gate) in circuit.gates().iter().enumerate() {
        emit_gate(gate.kind, circuit.operand_ids(j), n + j, &mut compute);
    }
    let result_qubit = circuit.output_ids()[0];

    let mut ops = compute.clone();
    ops.push(GateOp::z(result_qubit));
    ops.extend(compute.into_iter().rev());

    let ancilla_map = circuit
        .gates()
        .iter()
        .enumerate()
        .map(|(j, g)| (g.out.clone(), n + j))
        .collect();

    Ok(PhaseOracle {
        n_inputs: n,
        realization: Realization::Gate(GateProgram {
            ops,
            num_ancillas: circuit.gates().len(),
            result_qubit,
            ancilla_map,
        }),
    })
}

pub fn build_oracle(m: &MiterInstance, backend: OracleBackend) -> Result<PhaseOracle, OracleError> {
    match backend {
        OracleBackend::Semantic => semantic_oracle(m),
        OracleBackend::Gate => synthesize_gate_oracle(m),
    }
}

fn distinct(ids: &[usize]) -> Vec<usize> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn controlled_x(controls: &[usize], target: usize, out: &mut Vec<GateOp>) {
    match controls {
        [] => out.push(GateOp::x(target)),
        [c] => out.push(GateOp::cx(*c, target)),
        cs => out.push(GateOp::mcx(cs, target)),
    }
}

fn emit_gate(kind: GateKind, operands: &[usize], t: usize, out: &mut Vec<GateOp>) {
    match kind {
        GateKind::And | GateKind::Nand => {
            controlled_x(&distinct(operands), t, out);
            if kind == GateKind::Nand {
                out.push(GateOp::x(t));
            }
        }
        GateKind::Or | GateKind::Nor => {
            let cs = distinct(operands);
            out.extend(cs.iter().map(|&c| GateOp::x(c)));
            controlled_x(&cs, t, out);
            out.extend(cs.iter().map(|&c| GateOp::x(c)));
            if kind == GateKind::Or {
                out.push(GateOp::x(t));
            }
        }
        GateKind::Xor | GateKind::Xnor => {
            out.extend(operands.iter().map(|&c| GateOp::cx(c, t)));
            if kind == GateKind::Xnor {
                out.push(GateOp::x(t));
            }
        }
        GateKind::Buf => out.push(GateOp::cx(operands[0], t)),
        GateKind::Not => {
            out.push(GateOp::cx(operands[0], t));
            out.push(GateOp::x(t));
        }
        GateKind::OneHot => {
            let mut multiplicity: BTreeMap<usize, usize> = BTreeMap::new();
            for &q in operands {
                *multiplicity.entry(q).or_insert(0) += 1;
            }
            let qubits: Vec<usize> = multiplicity.keys().copied().collect();
            // A repeated operand that is 1 already counts twice, so only
            // single-occurrence operands can be "the one".
            for (&hot, _) in multiplicity.iter().filter(|&(_, &k)| k == 1) {
                let others: Vec<usize> = qubits.iter().copied().filter(|&q| q != hot).collect();
                out.extend(others.iter().map(|&q| GateOp::x(q)));
                controlled_x(&qubits, t, out);
                out.extend(others.iter().map(|&q| GateOp::x(q)));
            }
        }
    }
}

impl PhaseOracle {
    /// Semantic oracle over an explicit marked set on `n_inputs` qubits.
    pub fn from_marked(n_inputs: usize, marked: &MarkedSet) -> Self {
        let mut table = vec![false; 1usize << n_inputs];
        for &x in marked.assignments() {
            table[x as usize] = true;
        }
        PhaseOracle {
            n_inputs,
            realization: Realization::Semantic { marked: table },
        }
    }

    pub fn backend(&self) -> OracleBackend {
        match self.realization {
            Realization::Semantic { .. } => OracleBackend::Semantic,
            Realization::Gate(_) => OracleBackend::Gate,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn num_ancillas(&self) -> usize {
        match &self.realization {
            Realization::Semantic { .. } => 0,
            Realization::Gate(p) => p.num_ancillas,
        }
    }

    /// Qubits a state must have for [`PhaseOracle::apply`].
    pub fn total_qubits(&self) -> usize {
        self.n_inputs + self.num_ancillas()
    }

    pub fn gate_program(&self) -> Option<&GateProgram> {
        match &self.realization {
            Realization::Gate(p) => Some(p),
            Realization::Semantic { .. } => None,
        }
    }

    /// Marked predicate on input assignments, when known without simulation.
    pub fn is_marked(&self, x: u64) -> Option<bool> {
        match &self.realization {
            Realization::Semantic { marked } => marked.get(x as usize).copied(),
            Realization::Gate(_) => None,
        }
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<(), OracleError> {
        let expected = self.total_qubits();
        if state.num_qubits() != expected {
            return Err(OracleError::StateMismatch {
                expected,
                got: state.num_qubits(),
            });
        }
        match &self.realization {
            Realization::Semantic { marked } => {
                let flip = |(a, &m): (&mut Complex64, &bool)| {
                    if m {
                        *a = -*a;
                    }
                };
                state.amplitudes_mut().iter_mut().zip(marked).for_each(flip);
            }
            Realization::Gate(p) => state.apply_all(&p.ops)?,
        }
        Ok(())
    }
}
