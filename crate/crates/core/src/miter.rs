//! Miter construction: two circuits over shared inputs, one XOR per output
//! pair, OR-ed into a single indicator that is 1 exactly on distinguishing
//! assignments.
//!
//! Outputs are paired positionally, in each circuit's declared order.

use rayon::prelude::*;
use thiserror::Error;

use crate::netlist::{Assignment, Circuit, Gate, GateKind, NetlistError};

/// Default bound on input count for exhaustive enumeration (about 1M evaluations).
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MiterError {
    #[error(
        "arity mismatch: circuit A has {a_inputs} inputs/{a_outputs} outputs, \
         circuit B has {b_inputs} inputs/{b_outputs} outputs"
    )]
    ArityMismatch {
        a_inputs: usize,
        a_outputs: usize,
        b_inputs: usize,
        b_outputs: usize,
    },
    #[error("miter has no outputs to compare")]
    NoOutputs,
    #[error("{n_inputs} inputs exceed the brute-force limit of {limit}")]
    LimitExceeded { n_inputs: usize, limit: usize },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone)]
pub struct MiterInstance {
    circuit_a: Circuit,
    circuit_b: Circuit,
    combined: Circuit,
}

pub fn build_miter(a: &Circuit, b: &Circuit) -> Result<MiterInstance, MiterError> {
    if a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() {
        return Err(MiterError::ArityMismatch {
            a_inputs: a.num_inputs(),
            a_outputs: a.num_outputs(),
            b_inputs: b.num_inputs(),
            b_outputs: b.num_outputs(),
        });
    }
    if a.num_outputs() == 0 {
        return Err(MiterError::NoOutputs);
    }

    // A prefix no input name starts with keeps generated names collision free.
    let mut prefix = String::from("_");
    while a.inputs().iter().any(|i| i.starts_with(&prefix)) {
        prefix.push('_');
    }

    let inputs: Vec<String> = a.inputs().to_vec();
    let mut gates = Vec::with_capacity(a.gates().len() + b.gates().len() + a.num_outputs() + 1);

    let copy = |c: &Circuit, tag: &str, gates: &mut Vec<Gate>| -> Vec<String> {
        let signal = |id: usize| -> String {
            if id < c.num_inputs() {
                inputs[id].clone()
            } else {
                format!("{prefix}{tag}_{}", c.gates()[id - c.num_inputs()].out)
            }
        };
        for (j, g) in c.gates().iter().enumerate() {
            gates.push(Gate {
                out: format!("{prefix}{tag}_{}", g.out),
                kind: g.kind,
                operands: c.operand_ids(j).iter().map(|&id| signal(id)).collect(),
            });
        }
        c.output_ids().iter().map(|&id| signal(id)).collect()
    };
    let outs_a = copy(a, "a", &mut gates);
    let outs_b = copy(b, "b", &mut gates);

    let diffs: Vec<String> = outs_a
        .iter()
        .zip(&outs_b)
        .enumerate()
        .map(|(i, (ya, yb))| {
            let out = format!("{prefix}diff{i}");
            gates.push(Gate {
                out: out.clone(),
                kind: GateKind::Xor,
                operands: vec![ya.clone(), yb.clone()],
            });
            out
        })
        .collect();
    let indicator = if diffs.len() == 1 {
        diffs[0].clone()
    } else {
        let out = format!("{prefix}miter");
        gates.push(Gate {
            out: out.clone(),
            kind: GateKind::Or,
            operands: diffs,
        });
        out
    };

    let name = format!("miter({},{})", a.name(), b.name());
    let combined = Circuit::new(name, inputs, gates, vec![indicator])?;
    Ok(MiterInstance {
        circuit_a: a.clone(),
        circuit_b: b.clone(),
        combined,
    })
}

impl MiterInstance {
    pub fn circuit_a(&self) -> &Circuit {
        &self.circuit_a
    }

    pub fn circuit_b(&self) -> &Circuit {
        &self.circuit_b
    }

    /// The single-output indicator circuit.
    pub fn combined(&self) -> &Circuit {
        &self.combined
    }

    pub fn n_inputs(&self) -> usize {
        self.combined.num_inputs()
    }

    /// Total number of assignments, `2^n_inputs`.
    pub fn num_states(&self) -> u64 {
        1u64 << self.n_inputs()
    }

    pub fn miter_eval(&self, x: &Assignment) -> Result<bool, MiterError> {
        Ok(self.combined.evaluate(x)?[0])
    }

    /// Indicator on the assignment with numeric value `index`.
    pub fn eval_index(&self, index: u64) -> bool {
        self.combined.evaluate_index(index)[0]
    }

    /// Indicator value for every assignment, indexed by numeric value.
    pub fn truth_table(&self, limit: usize) -> Result<Vec<bool>, MiterError> {
        self.check_limit(limit)?;
        Ok((0..self.num_states())
            .into_par_iter()
            .map(|x| self.eval_index(x))
            .collect())
    }

    /// All counterexamples in ascending numeric order, under the default limit.
    pub fn enumerate_counterexamples(&self) -> Result<Vec<Assignment>, MiterError> {
        self.enumerate_counterexamples_with_limit(DEFAULT_BRUTE_FORCE_LIMIT)
    }

    pub fn enumerate_counterexamples_with_limit(
        &self,
        limit: usize,
    ) -> Result<Vec<Assignment>, MiterError> {
        let n = self.n_inputs();
        Ok(self
            .truth_table(limit)?
            .into_iter()
            .enumerate()
            .filter(|&(_, hit)| hit)
            .map(|(x, _)| Assignment::from_index(n, x as u64))
            .collect())
    }

    fn check_limit(&self, limit: usize) -> Result<(), MiterError> {
        if self.n_inputs() > limit {
            Err(MiterError::LimitExceeded {
                n_inputs: self.n_inputs(),
                limit,
            })
        } else {
            Ok(())
        }
    }
}
