//! Equivalence checking of combinational circuits with a simulated Grover
//! search.
//!
//! Two circuits are joined into a miter whose single output marks the inputs
//! on which they disagree. That indicator becomes a phase oracle, Grover
//! search is run for a descending sequence of iteration counts, and the shot
//! histogram of each run is split by a ratio threshold. Any split is resolved
//! and verified classically, so reported counterexamples are always genuine.
//!
//! ```
//! use eqgrover::{check_equivalence, fixtures, CheckerConfig, Verdict};
//!
//! let a = fixtures::fig2_circuit_a();
//! let b = fixtures::fig2_circuit_b();
//! let out = check_equivalence(&a, &b, &CheckerConfig::default()).unwrap();
//! assert_eq!(out.verdict, Verdict::NonEquivalent);
//! ```

pub mod bench;
pub mod checker;
pub mod fixtures;
pub mod grover;
pub mod miter;
pub mod netlist;
pub mod oracle;
pub mod qsim;

pub use checker::{check_equivalence, CheckOutcome, CheckerConfig, Verdict};
pub use miter::{build_miter, MiterInstance};
pub use netlist::{parse_circuit, serialize_circuit, Assignment, Circuit};
pub use oracle::OracleBackend;
