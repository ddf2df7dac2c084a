//! Equivalence decision by descending Grover iteration counts.
//!
//! Starting from the iteration count suited to a single counterexample, each
//! attempt runs Grover search, samples `shots_factor * N` shots, and scans the
//! descending histogram for the first adjacent pair with
//! `1 - m[i+1]/m[i] > phi` (looking at most `N/2` states deep). A split is
//! resolved classically: the most frequent state is fed to the miter to learn
//! which side holds counterexamples, and every candidate on that side is
//! re-verified. If no attempt down to one iteration yields a verified
//! counterexample, the circuits are reported equivalent.
//!
//! Known blind spot: when exactly half the assignments are counterexamples,
//! every iteration count leaves the state uniform, so the verdict can only be
//! non-equivalent by way of shot noise.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::grover::{initial_iterations, run_grover};
use crate::miter::{build_miter, MiterError, MiterInstance};
use crate::netlist::{Assignment, Circuit};
use crate::oracle::{build_oracle, OracleBackend, OracleError};
use crate::qsim::{derive_seed, sample_distribution, MeasurementHistogram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("phi must lie strictly between 0 and 1, got {0}")]
    InvalidPhi(f64),
    #[error("shots factor must be at least 1")]
    InvalidShotsFactor,
    #[error("circuits have no inputs")]
    NoInputs,
    #[error(transparent)]
    Miter(#[from] MiterError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckerConfig {
    pub phi: f64,
    pub shots_factor: u64,
    pub seed: u64,
    pub backend: OracleBackend,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig {
            phi: 0.3,
            shots_factor: 8,
            seed: 0,
            backend: OracleBackend::Semantic,
        }
    }
}

impl CheckerConfig {
    pub fn validate(&self) -> Result<(), CheckError> {
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(CheckError::InvalidPhi(self.phi));
        }
        if self.shots_factor == 0 {
            return Err(CheckError::InvalidShotsFactor);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equivalent,
    NonEquivalent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "EQUIVALENT",
            Verdict::NonEquivalent => "NON_EQUIVALENT",
        })
    }
}

/// Where (if anywhere) a descending histogram separates into two groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitDecision {
    pub found: bool,
    /// Size of the top group; 0 when nothing was found.
    pub split_index: usize,
    /// The `split_index` most frequent states, most frequent first.
    pub top_group: Vec<u64>,
    /// Measured states ranked below the split.
    pub remainder: Vec<u64>,
    /// The split landed on the last measured state (`i == |m|`).
    pub all_measured_consumed: bool,
}

/// Measured states sorted by descending count, ties by ascending index.
pub fn ranked_states(h: &MeasurementHistogram) -> Vec<(u64, u64)> {
    let mut ranked: Vec<(u64, u64)> = h.counts().iter().map(|(&s, &n)| (s, n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

pub fn split_histogram(h: &MeasurementHistogram, phi: f64, n_states: u64) -> SplitDecision {
    let ranked = ranked_states(h);
    let measured = ranked.len();
    let bound = measured.min((n_states / 2) as usize);
    let split = |i: usize, consumed: bool| SplitDecision {
        found: true,
        split_index: i,
        top_group: ranked[..i].iter().map(|&(s, _)| s).collect(),
        remainder: ranked[i..].iter().map(|&(s, _)| s).collect(),
        all_measured_consumed: consumed,
    };
    for i in 1..=bound {
        if i == measured {
            return split(i, true);
        }
        let (hi, lo) = (ranked[i - 1].1 as f64, ranked[i].1 as f64);
        if 1.0 - lo / hi > phi {
            return split(i, false);
        }
    }
    SplitDecision {
        found: false,
        split_index: 0,
        top_group: Vec::new(),
        remainder: ranked.iter().map(|&(s, _)| s).collect(),
        all_measured_consumed: false,
    }
}

/// Keeps the candidates on which the miter evaluates to 1, in order.
pub fn verify_candidates(m: &MiterInstance, candidates: &[Assignment]) -> Vec<Assignment> {
    candidates
        .iter()
        .filter(|x| m.miter_eval(x).unwrap_or(false))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub g: u64,
    pub shots: u64,
    pub measured_count: usize,
    pub max_count: u64,
    pub split: SplitDecision,
    /// Counterexamples that survived classical verification in this attempt.
    pub verified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub counterexamples: Vec<Assignment>,
    pub attempts: Vec<Attempt>,
    pub accumulated_iterations: u64,
    pub successful_g: Option<u64>,
}

pub fn check_equivalence(
    a: &Circuit,
    b: &Circuit,
    cfg: &CheckerConfig,
) -> Result<CheckOutcome, CheckError> {
    cfg.validate()?;
    let m = build_miter(a, b)?;
    check_miter(&m, cfg)
}

pub fn check_miter(m: &MiterInstance, cfg: &CheckerConfig) -> Result<CheckOutcome, CheckError> {
    cfg.validate()?;
    let n = m.n_inputs();
    if n == 0 {
        return Err(CheckError::NoInputs);
    }
    let n_states = m.num_states();
    let shots = cfg.shots_factor * n_states;
    let oracle = build_oracle(m, cfg.backend)?;

    let mut attempts = Vec::new();
    let mut accumulated = 0;
    for g in (1..=initial_iterations(n_states)).rev() {
        let state = run_grover(&oracle, g)?;
        accumulated += g;
        let probs = state.leading_probabilities(n);
        let hist = sample_distribution(&probs, shots, derive_seed(cfg.seed, g));
        let split = split_histogram(&hist, cfg.phi, n_states);

        let mut verified = Vec::new();
        if split.found {
            let side = if split.all_measured_consumed || m.eval_index(split.top_group[0]) {
                &split.top_group
            } else {
                &split.remainder
            };
            let candidates: Vec<Assignment> =
                side.iter().map(|&x| Assignment::from_index(n, x)).collect();
            verified = verify_candidates(m, &candidates);
        }

        attempts.push(Attempt {
            g,
            shots,
            measured_count: hist.measured_count(),
            max_count: hist.counts().values().copied().max().unwrap_or(0),
            split,
            verified: verified.len(),
        });

        if !verified.is_empty() {
            verified.sort();
            return Ok(CheckOutcome {
                verdict: Verdict::NonEquivalent,
                counterexamples: verified,
                attempts,
                accumulated_iterations: accumulated,
                successful_g: Some(g),
            });
        }
    }

    Ok(CheckOutcome {
        verdict: Verdict::Equivalent,
        counterexamples: Vec::new(),
        attempts,
        accumulated_iterations: accumulated,
        successful_g: None,
    })
}

impl CheckOutcome {
    /// Human-readable report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", self.verdict);
        let _ = writeln!(
            out,
            "accumulated_iterations: {}",
            self.accumulated_iterations
        );
        match self.successful_g {
            Some(g) => {
                let _ = writeln!(out, "successful_g: {g}");
            }
            None => {
                let _ = writeln!(out, "successful_g: -");
            }
        }
        let _ = writeln!(out, "counterexamples: {}", self.counterexamples.len());
        for x in &self.counterexamples {
            let _ = writeln!(out, "  {x}");
        }
        let _ = writeln!(out, "attempts:");
        for at in &self.attempts {
            let split = if at.split.found {
                format!(
                    "split at {}{}",
                    at.split.split_index,
                    if at.split.all_measured_consumed {
                        " (all measured)"
                    } else {
                        ""
                    }
                )
            } else {
                "no split".to_string()
            };
            let _ = writeln!(
                out,
                "  g={} shots={} measured={} max_count={} {} verified={}",
                at.g, at.shots, at.measured_count, at.max_count, split, at.verified
            );
        }
        out
    }
}
