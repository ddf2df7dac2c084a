//! Small circuits shipped with the crate, used by tests and the CLI.

use crate::netlist::{parse_circuit, Circuit};

pub const FIG2_A: &str = include_str!("../fixtures/fig2_a.ckt");
pub const FIG2_B: &str = include_str!("../fixtures/fig2_b.ckt");
pub const FIG2_A_PARITY: &str = include_str!("../fixtures/fig2_a_parity.ckt");
pub const PASS_THROUGH: &str = include_str!("../fixtures/pass_through.ckt");
pub const INVERTER: &str = include_str!("../fixtures/inverter.ckt");

fn load(name: &str, text: &str) -> Circuit {
    parse_circuit(text)
        .unwrap_or_else(|e| panic!("bundled fixture {name} is invalid: {e}"))
        .with_name(name)
}

/// Five-input, two-output circuit whose middle gate is one-hot.
pub fn fig2_circuit_a() -> Circuit {
    load("fig2_a", FIG2_A)
}

/// Same as [`fig2_circuit_a`] with an OR in place of the one-hot gate.
pub fn fig2_circuit_b() -> Circuit {
    load("fig2_b", FIG2_B)
}

pub fn fig2_circuit_a_parity() -> Circuit {
    load("fig2_a_parity", FIG2_A_PARITY)
}

pub fn pass_through() -> Circuit {
    load("pass_through", PASS_THROUGH)
}

pub fn inverter() -> Circuit {
    load("inverter", INVERTER)
}

/// Every bundled fixture, by name.
pub fn all() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fig2_a", FIG2_A),
        ("fig2_b", FIG2_B),
        ("fig2_a_parity", FIG2_A_PARITY),
        ("pass_through", PASS_THROUGH),
        ("inverter", INVERTER),
    ]
}
