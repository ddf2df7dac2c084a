//! Grover search: uniform preparation, the diffusion reflection, the iteration
//! driver, and the closed-form success probability.

use std::f64::consts::PI;

use crate::oracle::{OracleError, PhaseOracle};
use crate::qsim::{GateOp, QuantumState, SimError, DEFAULT_MAX_QUBITS};

/// Uniform superposition `H^q |0..0>`.
pub fn prepare_uniform(q: usize) -> Result<QuantumState, SimError> {
    let mut state = QuantumState::zero(q, DEFAULT_MAX_QUBITS)?;
    for k in 0..q {
        state.apply(&GateOp::h(k))?;
    }
    Ok(state)
}

/// Reflection about the uniform state over `input_qubits`, as
/// `H X MCZ X H`. This realizes `I - 2|psi0><psi0|`, i.e. the textbook
/// diffusion operator up to a global phase of -1.
pub fn apply_diffusion(state: &mut QuantumState, input_qubits: &[usize]) -> Result<(), SimError> {
    let Some((&last, rest)) = input_qubits.split_last() else {
        return Ok(());
    };
    for &q in input_qubits {
        state.apply(&GateOp::h(q))?;
        state.apply(&GateOp::x(q))?;
    }
    if rest.is_empty() {
        state.apply(&GateOp::z(last))?;
    } else {
        state.apply(&GateOp::mcz(rest, last))?;
    }
    for &q in input_qubits {
        state.apply(&GateOp::x(q))?;
        state.apply(&GateOp::h(q))?;
    }
    Ok(())
}

/// Uniform preparation over the oracle's inputs followed by `g` rounds of
/// oracle then diffusion. Ancillas, if any, trail the inputs and stay `|0>`.
pub fn run_grover(oracle: &PhaseOracle, g: u64) -> Result<QuantumState, OracleError> {
    let n = oracle.n_inputs();
    let mut state = QuantumState::zero(oracle.total_qubits(), DEFAULT_MAX_QUBITS)?;
    let inputs: Vec<usize> = (0..n).collect();
    for &q in &inputs {
        state.apply(&GateOp::h(q))?;
    }
    for _ in 0..g {
        oracle.apply(&mut state)?;
        apply_diffusion(&mut state, &inputs)?;
    }
    Ok(state)
}

/// Rotation geometry of a search with `c` marked states among `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverTheory {
    pub n: u64,
    pub c: u64,
    pub theta: f64,
}

impl GroverTheory {
    pub fn new(n: u64, c: u64) -> Self {
        assert!(
            n >= 1 && c <= n,
            "need 0 <= c <= N and N >= 1 (c={c}, N={n})"
        );
        let theta = (c as f64 / n as f64).sqrt().asin();
        GroverTheory { n, c, theta }
    }

    /// Probability of measuring any marked state after `g` iterations.
    pub fn success_probability(&self, g: u64) -> f64 {
        ((2 * g + 1) as f64 * self.theta).sin().powi(2)
    }
}

/// `sin^2((2g+1) asin(sqrt(c/N)))`.
pub fn success_probability(g: u64, c: u64, n: u64) -> f64 {
    GroverTheory::new(n, c).success_probability(g)
}

/// Iteration count that would be optimal for a single marked state:
/// `floor(pi / (4 asin(sqrt(1/N))) - 1/2)`, never below 1.
pub fn initial_iterations(n: u64) -> u64 {
    assert!(n >= 2, "need at least two states, got {n}");
    let theta1 = (1.0 / n as f64).sqrt().asin();
    let g = (PI / (4.0 * theta1) - 0.5).floor();
    (g as u64).max(1)
}
