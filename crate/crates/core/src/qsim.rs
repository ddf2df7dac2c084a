//! Dense statevector simulation for the handful of gates Grover search needs,
//! plus seeded shot sampling.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the index of
//! a computational basis state equals the numeric value of the matching input
//! assignment. Memory is `16 * 2^q` bytes.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Default qubit ceiling: 2^26 complex doubles is 1 GiB.
pub const DEFAULT_MAX_QUBITS: usize = 26;

// Below this many amplitudes a gate runs on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{requested} qubits exceed the limit of {limit} ({bytes} bytes of amplitudes needed)")]
    LimitExceeded {
        requested: usize,
        limit: usize,
        bytes: u128,
    },
    #[error("a state needs at least one qubit")]
    NoQubits,
    #[error("qubit {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {0} is used both as control and target")]
    ControlTargetOverlap(usize),
    #[error("{kind} takes {expected} control(s), got {got}")]
    ControlCount {
        kind: OpKind,
        expected: &'static str,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    H,
    X,
    Z,
    CX,
    MCX,
    MCZ,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::H => "H",
            OpKind::X => "X",
            OpKind::Z => "Z",
            OpKind::CX => "CX",
            OpKind::MCX => "MCX",
            OpKind::MCZ => "MCZ",
        })
    }
}

/// One gate application. For `MCZ` the target is just one more qubit of the
/// symmetric all-ones phase condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateOp {
    pub kind: OpKind,
    pub target: usize,
    pub controls: Vec<usize>,
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp {
            kind: OpKind::H,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Self {
        GateOp {
            kind: OpKind::X,
            target,
            controls: Vec::new(),
        }
    }

    pub fn z(target: usize) -> Self {
        GateOp {
            kind: OpKind::Z,
            target,
            controls: Vec::new(),
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp {
            kind: OpKind::CX,
            target,
            controls: vec![control],
        }
    }

    pub fn mcx(controls: &[usize], target: usize) -> Self {
        GateOp {
            kind: OpKind::MCX,
            target,
            controls: controls.to_vec(),
        }
    }

    pub fn mcz(controls: &[usize], target: usize) -> Self {
        GateOp {
            kind: OpKind::MCZ,
            target,
            controls: controls.to_vec(),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), SimError> {
        let (expected, ok) = match self.kind {
            OpKind::H | OpKind::X | OpKind::Z => ("0", self.controls.is_empty()),
            OpKind::CX => ("exactly 1", self.controls.len() == 1),
            OpKind::MCX | OpKind::MCZ => ("at least 1", !self.controls.is_empty()),
        };
        if !ok {
            return Err(SimError::ControlCount {
                kind: self.kind,
                expected,
                got: self.controls.len(),
            });
        }
        for &q in self.controls.iter().chain(std::iter::once(&self.target)) {
            if q >= num_qubits {
                return Err(SimError::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        for (i, &c) in self.controls.iter().enumerate() {
            if c == self.target || self.controls[..i].contains(&c) {
                return Err(SimError::ControlTargetOverlap(c));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.controls.is_empty() {
            let cs: Vec<String> = self.controls.iter().map(|c| c.to_string()).collect();
            write!(f, " c[{}]", cs.join(","))?;
        }
        write!(f, " t[{}]", self.target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// `|0...0>` over `q` qubits, with the default qubit limit.
pub fn new_state(q: usize) -> Result<QuantumState, SimError> {
    QuantumState::zero(q, DEFAULT_MAX_QUBITS)
}

impl QuantumState {
    pub fn zero(q: usize, limit: usize) -> Result<Self, SimError> {
        if q == 0 {
            return Err(SimError::NoQubits);
        }
        if q > limit {
            return Err(SimError::LimitExceeded {
                requested: q,
                limit,
                bytes: 16u128 << q,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << q];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState {
            num_qubits: q,
            amps,
        })
    }

    /// Builds a state from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(SimError::NoQubits);
        }
        Ok(QuantumState {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<(), SimError> {
        op.validate(self.num_qubits)?;
        let cmask = op.controls.iter().fold(0usize, |m, &c| m | self.mask(c));
        let tmask = self.mask(op.target);
        match op.kind {
            OpKind::H => self.pairwise(tmask, 0, |a, b| {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }),
            OpKind::X | OpKind::CX | OpKind::MCX => {
                self.pairwise(tmask, cmask, std::mem::swap::<Complex64>)
            }
            OpKind::Z | OpKind::MCZ => {
                let all = cmask | tmask;
                self.for_each_indexed(|i, a| {
                    if i & all == all {
                        *a = -*a;
                    }
                });
            }
        }
        Ok(())
    }

    pub fn apply_all<'a, I: IntoIterator<Item = &'a GateOp>>(
        &mut self,
        ops: I,
    ) -> Result<(), SimError> {
        ops.into_iter().try_for_each(|op| self.apply(op))
    }

    /// Calls `f(lo, hi)` on every amplitude pair differing only in `tmask`
    /// whose indices have all `cmask` bits set.
    fn pairwise<F>(&mut self, tmask: usize, cmask: usize, f: F)
    where
        F: Fn(&mut Complex64, &mut Complex64) + Sync,
    {
        let stride = tmask << 1;
        let body = |(chunk_idx, chunk): (usize, &mut [Complex64])| {
            let base = chunk_idx * stride;
            let (lo, hi) = chunk.split_at_mut(tmask);
            for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + j) & cmask == cmask {
                    f(a, b);
                }
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(stride).enumerate().for_each(body);
        } else {
            self.amps.chunks_mut(stride).enumerate().for_each(body);
        }
    }

    fn for_each_indexed<F>(&mut self, f: F)
    where
        F: Fn(usize, &mut Complex64) + Sync + Send,
    {
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, a)| f(i, a));
        } else {
            self.amps.iter_mut().enumerate().for_each(|(i, a)| f(i, a));
        }
    }

    /// `|amplitude|^2` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the leading `k` qubits (trailing qubits
    /// summed out). The index is the value of those `k` qubits.
    pub fn leading_probabilities(&self, k: usize) -> Vec<f64> {
        assert!(k >= 1 && k <= self.num_qubits, "invalid register width {k}");
        let block = 1usize << (self.num_qubits - k);
        self.amps
            .chunks(block)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

/// Shot counts per basis state; only states with a nonzero count appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementHistogram {
    shots: u64,
    counts: BTreeMap<u64, u64>,
}

impl MeasurementHistogram {
    /// Builds a histogram from raw counts, dropping zero entries.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(counts: I) -> Self {
        let mut map = BTreeMap::new();
        for (state, n) in counts {
            if n > 0 {
                *map.entry(state).or_insert(0) += n;
            }
        }
        MeasurementHistogram {
            shots: map.values().sum(),
            counts: map,
        }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, state: u64) -> u64 {
        self.counts.get(&state).copied().unwrap_or(0)
    }

    /// Number of distinct basis states observed at least once.
    pub fn measured_count(&self) -> usize {
        self.counts.len()
    }

    /// Total-variation distance between the empirical and a reference
    /// distribution.
    pub fn tv_distance(&self, probs: &[f64]) -> f64 {
        let shots = self.shots as f64;
        0.5 * probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.count(i as u64) as f64 / shots - p).abs())
            .sum::<f64>()
    }
}

/// Draws `shots` independent samples from `probs` by inverse CDF.
pub fn sample_distribution(probs: &[f64], shots: u64, seed: u64) -> MeasurementHistogram {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        // Never land on a zero-probability state through rounding at the tail.
        let idx = if probs[idx] > 0.0 {
            idx
        } else {
            probs[..idx].iter().rposition(|&p| p > 0.0).unwrap_or(idx)
        };
        counts[idx] += 1;
    }
    MeasurementHistogram::from_counts(counts.into_iter().enumerate().map(|(i, n)| (i as u64, n)))
}

/// Measures every qubit of `state` `shots` times.
pub fn sample(state: &QuantumState, shots: u64, seed: u64) -> MeasurementHistogram {
    sample_distribution(&state.probabilities(), shots, seed)
}

/// Derives an independent sub-seed from a master seed and a task index
/// (SplitMix64 finalizer over `master ^ (index * 0x9E3779B97F4A7C15)`).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
