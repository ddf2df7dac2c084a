//! Gate-level combinational netlists: parsing, validation, serialization and
//! two-valued evaluation.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! inputs x0 x1 x2
//! gate a1 = AND x0 x1
//! gate h1 = ONEHOT x1 x2 a1
//! outputs h1 a1
//! ```
//!
//! `inputs` must be the first non-comment line and `outputs` the last. Input
//! declaration order fixes bit significance: input 0 is the leftmost (most
//! significant) bit of an assignment string.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: undefined signal `{name}`")]
    UndefinedSignal { name: String, line: usize },
    #[error("line {line}: duplicate signal `{name}`")]
    DuplicateSignal { name: String, line: usize },
    #[error("line {line}: cyclic definition through `{name}`")]
    CyclicDefinition { name: String, line: usize },
    #[error("line {line}: `{name}` is used before it is defined")]
    ForwardReference { name: String, line: usize },
    #[error("gate `{name}`: {kind} takes {expected} operand(s), got {got}")]
    Arity {
        name: String,
        kind: GateKind,
        expected: &'static str,
        got: usize,
    },
    #[error("assignment has {got} bits but the circuit has {expected} inputs")]
    WidthMismatch { expected: usize, got: usize },
}

pub type Result<T, E = NetlistError> = std::result::Result<T, E>;

/// Primitive gate kinds.
///
/// `Xor` and `Xnor` over n operands are parity and its complement. `OneHot` is
/// 1 iff exactly one operand is 1; for two operands it coincides with `Xor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Xor,
    Xnor,
    Nand,
    Nor,
    Not,
    Buf,
    OneHot,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::OneHot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::OneHot => "ONEHOT",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Not | GateKind::Buf)
    }

    fn arity_ok(self, n: usize) -> bool {
        if self.is_unary() {
            n == 1
        } else {
            n >= 2
        }
    }

    /// Evaluates the gate over operand values.
    pub fn eval<I: IntoIterator<Item = bool>>(self, operands: I) -> bool {
        let mut it = operands.into_iter();
        match self {
            GateKind::And => it.all(|b| b),
            GateKind::Nand => !it.all(|b| b),
            GateKind::Or => it.any(|b| b),
            GateKind::Nor => !it.any(|b| b),
            GateKind::Xor => it.fold(false, |acc, b| acc ^ b),
            GateKind::Xnor => !it.fold(false, |acc, b| acc ^ b),
            GateKind::Not => !it.next().unwrap_or(false),
            GateKind::Buf => it.next().unwrap_or(false),
            GateKind::OneHot => it.filter(|&b| b).take(2).count() == 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub out: String,
    pub kind: GateKind,
    pub operands: Vec<String>,
}

impl Gate {
    pub fn new<S: Into<String>>(out: S, kind: GateKind, operands: &[&str]) -> Self {
        Gate {
            out: out.into(),
            kind,
            operands: operands.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// A fixed-width input assignment. Bit 0 is the most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Builds the `width`-bit assignment whose numeric value is `index`.
    pub fn from_index(width: usize, index: u64) -> Self {
        let bits = (0..width)
            .map(|i| (index >> (width - 1 - i)) & 1 == 1)
            .collect();
        Assignment { bits }
    }

    pub fn to_index(&self) -> u64 {
        self.bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit `{other}` in assignment `{s}`")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Assignment::new)
    }
}

/// A validated combinational circuit.
///
/// Signals are numbered inputs first, then gates in declaration order; every
/// gate only reads lower-numbered signals.
#[derive(Debug, Clone)]
pub struct Circuit {
    name: String,
    inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<String>,
    operand_ids: Vec<Vec<usize>>,
    output_ids: Vec<usize>,
}

impl PartialEq for Circuit {
    /// Structural equality; the name is metadata and does not participate.
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs && self.gates == other.gates && self.outputs == other.outputs
    }
}

impl Eq for Circuit {}

impl Circuit {
    /// Validates and builds a circuit from already-ordered parts.
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        gates: Vec<Gate>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        for (i, name) in inputs.iter().enumerate() {
            if ids.insert(name.as_str(), i).is_some() {
                return Err(NetlistError::DuplicateSignal {
                    name: name.clone(),
                    line: 1,
                });
            }
        }
        let gate_ids: HashMap<&str, usize> = gates
            .iter()
            .enumerate()
            .map(|(j, g)| (g.out.as_str(), j))
            .collect();

        let mut operand_ids = Vec::with_capacity(gates.len());
        for (j, gate) in gates.iter().enumerate() {
            // Header line is 1, gates follow; only used for diagnostics.
            let line = j + 2;
            if !gate.kind.arity_ok(gate.operands.len()) {
                return Err(NetlistError::Arity {
                    name: gate.out.clone(),
                    kind: gate.kind,
                    expected: if gate.kind.is_unary() {
                        "exactly 1"
                    } else {
                        "at least 2"
                    },
                    got: gate.operands.len(),
                });
            }
            let mut resolved = Vec::with_capacity(gate.operands.len());
            for op in &gate.operands {
                match ids.get(op.as_str()) {
                    Some(&id) => resolved.push(id),
                    None => {
                        return Err(match gate_ids.get(op.as_str()) {
                            Some(&k) if k >= j && reaches(&gates, &gate_ids, k, j) => {
                                NetlistError::CyclicDefinition {
                                    name: op.clone(),
                                    line,
                                }
                            }
                            Some(_) => NetlistError::ForwardReference {
                                name: op.clone(),
                                line,
                            },
                            None => NetlistError::UndefinedSignal {
                                name: op.clone(),
                                line,
                            },
                        })
                    }
                }
            }
            if ids.insert(gate.out.as_str(), inputs.len() + j).is_some() {
                return Err(NetlistError::DuplicateSignal {
                    name: gate.out.clone(),
                    line,
                });
            }
            operand_ids.push(resolved);
        }

        let line = gates.len() + 2;
        let output_ids = outputs
            .iter()
            .map(|o| {
                ids.get(o.as_str())
                    .copied()
                    .ok_or_else(|| NetlistError::UndefinedSignal {
                        name: o.clone(),
                        line,
                    })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Circuit {
            name: name.into(),
            inputs,
            gates,
            outputs,
            operand_ids,
            output_ids,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Signal ids read by gate `j`. Inputs occupy ids `0..num_inputs`, gate `j`
    /// drives id `num_inputs + j`.
    pub fn operand_ids(&self, j: usize) -> &[usize] {
        &self.operand_ids[j]
    }

    pub fn output_ids(&self) -> &[usize] {
        &self.output_ids
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<Vec<bool>> {
        if x.width() != self.num_inputs() {
            return Err(NetlistError::WidthMismatch {
                expected: self.num_inputs(),
                got: x.width(),
            });
        }
        let mut values = Vec::with_capacity(self.inputs.len() + self.gates.len());
        values.extend_from_slice(x.bits());
        Ok(self.propagate(values))
    }

    /// Evaluates on the assignment with numeric value `index`.
    pub fn evaluate_index(&self, index: u64) -> Vec<bool> {
        let n = self.num_inputs();
        let mut values = Vec::with_capacity(n + self.gates.len());
        values.extend((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1));
        self.propagate(values)
    }

    fn propagate(&self, mut values: Vec<bool>) -> Vec<bool> {
        for (gate, ops) in self.gates.iter().zip(&self.operand_ids) {
            let v = gate.kind.eval(ops.iter().map(|&id| values[id]));
            values.push(v);
        }
        self.output_ids.iter().map(|&id| values[id]).collect()
    }
}

// Whether gate `from` depends (transitively, through forward references) on
// gate `target`.
fn reaches(gates: &[Gate], gate_ids: &HashMap<&str, usize>, from: usize, target: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![false; gates.len()];
    while let Some(g) = stack.pop() {
        if g == target {
            return true;
        }
        if std::mem::replace(&mut seen[g], true) {
            continue;
        }
        for op in &gates[g].operands {
            if let Some(&k) = gate_ids.get(op.as_str()) {
                stack.push(k);
            }
        }
    }
    false
}

fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    tokens
}

fn names(tokens: &[Token<'_>], line: usize) -> Result<Vec<String>> {
    tokens
        .iter()
        .map(|t| {
            if is_valid_name(t.text) {
                Ok(t.text.to_string())
            } else {
                Err(NetlistError::Syntax {
                    line,
                    column: t.column,
                    message: format!("invalid signal name `{}`", t.text),
                })
            }
        })
        .collect()
}

/// Parses the line-oriented netlist format.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut inputs: Option<Vec<String>> = None;
    let mut gates = Vec::new();
    let mut gate_lines = Vec::new();
    let mut outputs: Option<Vec<String>> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(head) = tokens.first() else { continue };
        let syntax = |column: usize, message: String| NetlistError::Syntax {
            line,
            column,
            message,
        };
        if outputs.is_some() {
            return Err(syntax(head.column, "content after `outputs`".into()));
        }
        match head.text {
            "inputs" => {
                if inputs.is_some() {
                    return Err(syntax(head.column, "`inputs` declared twice".into()));
                }
                if tokens.len() < 2 {
                    return Err(syntax(
                        head.column,
                        "`inputs` needs at least one name".into(),
                    ));
                }
                inputs = Some(names(&tokens[1..], line)?);
            }
            "gate" | "outputs" if inputs.is_none() => {
                return Err(syntax(head.column, "`inputs` must come first".into()));
            }
            "gate" => {
                if tokens.len() < 5 {
                    return Err(syntax(
                        head.column,
                        "expected `gate <name> = <KIND> <operand>+`".into(),
                    ));
                }
                if tokens[2].text != "=" {
                    return Err(syntax(tokens[2].column, "expected `=`".into()));
                }
                let out = names(&tokens[1..2], line)?.remove(0);
                let kind = tokens[3].text.parse::<GateKind>().map_err(|_| {
                    syntax(
                        tokens[3].column,
                        format!("unknown gate kind `{}`", tokens[3].text),
                    )
                })?;
                let operands = names(&tokens[4..], line)?;
                gates.push(Gate {
                    out,
                    kind,
                    operands,
                });
                gate_lines.push(line);
            }
            "outputs" => {
                if tokens.len() < 2 {
                    return Err(syntax(
                        head.column,
                        "`outputs` needs at least one name".into(),
                    ));
                }
                outputs = Some(names(&tokens[1..], line)?);
            }
            other => {
                return Err(syntax(head.column, format!("unexpected keyword `{other}`")));
            }
        }
    }

    let inputs = inputs.ok_or(NetlistError::Syntax {
        line: last_line.max(1),
        column: 1,
        message: "missing `inputs` line".into(),
    })?;
    let outputs = outputs.ok_or(NetlistError::Syntax {
        line: last_line.max(1),
        column: 1,
        message: "missing `outputs` line".into(),
    })?;

    let out_line = last_line;
    Circuit::new("circuit", inputs, gates, outputs).map_err(|e| {
        // Rewrite synthetic line numbers to real ones.
        let real = |l: usize| match l {
            1 => 1,
            l if l - 2 < gate_lines.len() => gate_lines[l - 2],
            _ => out_line,
        };
        match e {
            NetlistError::UndefinedSignal { name, line } => NetlistError::UndefinedSignal {
                name,
                line: real(line),
            },
            NetlistError::DuplicateSignal { name, line } => NetlistError::DuplicateSignal {
                name,
                line: real(line),
            },
            NetlistError::CyclicDefinition { name, line } => NetlistError::CyclicDefinition {
                name,
                line: real(line),
            },
            NetlistError::ForwardReference { name, line } => NetlistError::ForwardReference {
                name,
                line: real(line),
            },
            other => other,
        }
    })
}

/// Canonical text form, without a trailing newline.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut lines = Vec::with_capacity(circuit.gates.len() + 2);
    lines.push(format!("inputs {}", circuit.inputs.join(" ")));
    for g in &circuit.gates {
        lines.push(format!(
            "gate {} = {} {}",
            g.out,
            g.kind,
            g.operands.join(" ")
        ));
    }
    lines.push(format!("outputs {}", circuit.outputs.join(" ")));
    lines.join("\n")
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_circuit(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn pass_through() {
        let c = parse_circuit("inputs a\noutputs a").unwrap();
        assert_eq!(c.num_inputs(), 1);
        assert!(c.gates().is_empty());
        assert_eq!(c.num_outputs(), 1);
        assert_eq!(serialize_circuit(&c), "inputs a\noutputs a");
        let x: Assignment = "0".parse().unwrap();
        assert_eq!(c.evaluate(&x).unwrap(), vec![false]);
    }

    #[test]
    fn fig2_circuit_a_shape() {
        let a = fixtures::fig2_circuit_a();
        assert_eq!(a.num_inputs(), 5);
        assert_eq!(a.num_outputs(), 2);
        assert_eq!(a.gates().len(), 3);
    }

    #[test]
    fn fig2_on_all_ones() {
        let x: Assignment = "11111".parse().unwrap();
        let a = fixtures::fig2_circuit_a();
        let b = fixtures::fig2_circuit_b();
        assert_eq!(a.evaluate(&x).unwrap(), vec![false, true]);
        assert_eq!(b.evaluate(&x).unwrap(), vec![true, true]);
    }

    // Independent truth-table model of Fig. 2 used to cross-check evaluation.
    fn fig2_model(x: u64, onehot: bool) -> (bool, bool) {
        let bit = |i: u32| (x >> (4 - i)) & 1 == 1;
        let a1 = bit(0) && bit(1);
        let ones = (2..5).filter(|&i| bit(i)).count();
        let mid = if onehot { ones == 1 } else { ones >= 1 };
        (a1 && mid, a1)
    }

    #[test]
    fn fig2_brute_force() {
        let a = fixtures::fig2_circuit_a();
        let b = fixtures::fig2_circuit_b();
        for x in 0..32u64 {
            let (a0, a1) = fig2_model(x, true);
            let (b0, b1) = fig2_model(x, false);
            assert_eq!(a.evaluate_index(x), vec![a0, a1], "A on {x:05b}");
            assert_eq!(b.evaluate_index(x), vec![b0, b1], "B on {x:05b}");
            let asg = Assignment::from_index(5, x);
            assert_eq!(a.evaluate(&asg).unwrap(), a.evaluate_index(x));
        }
    }

    #[test]
    fn self_reference_is_cyclic() {
        let err = parse_circuit("inputs a\ngate g = AND a g\noutputs g").unwrap_err();
        assert!(
            matches!(err, NetlistError::CyclicDefinition { ref name, line: 2 } if name == "g"),
            "{err:?}"
        );
    }

    #[test]
    fn mutual_cycle() {
        let err =
            parse_circuit("inputs a\ngate g = AND a h\ngate h = OR a g\noutputs h").unwrap_err();
        assert!(
            matches!(err, NetlistError::CyclicDefinition { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn forward_reference_without_cycle() {
        let err =
            parse_circuit("inputs a b\ngate g = AND a h\ngate h = OR a b\noutputs g").unwrap_err();
        assert!(matches!(err, NetlistError::ForwardReference { ref name, .. } if name == "h"));
    }

    #[test]
    fn error_paths() {
        let undefined = parse_circuit("inputs a\ngate g = AND a b\noutputs g").unwrap_err();
        assert_eq!(
            undefined,
            NetlistError::UndefinedSignal {
                name: "b".into(),
                line: 2
            }
        );
        let dup = parse_circuit("inputs a b\ngate a = AND a b\noutputs a").unwrap_err();
        assert!(matches!(dup, NetlistError::DuplicateSignal { ref name, .. } if name == "a"));
        let dup_in = parse_circuit("inputs a a\noutputs a").unwrap_err();
        assert!(matches!(dup_in, NetlistError::DuplicateSignal { .. }));
        let arity = parse_circuit("inputs a b\ngate g = NOT a b\noutputs g").unwrap_err();
        assert!(matches!(arity, NetlistError::Arity { ref name, got: 2, .. } if name == "g"));
        let arity = parse_circuit("inputs a\ngate g = AND a\noutputs g").unwrap_err();
        assert!(matches!(arity, NetlistError::Arity { got: 1, .. }));
        let out = parse_circuit("inputs a\noutputs z").unwrap_err();
        assert!(matches!(out, NetlistError::UndefinedSignal { ref name, line: 2 } if name == "z"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_circuit("inputs a\ngate g := AND a a\noutputs g").unwrap_err();
        assert_eq!(
            e,
            NetlistError::Syntax {
                line: 2,
                column: 8,
                message: "expected `=`".into()
            }
        );
        let e = parse_circuit("inputs a\ngate g = MUX a a\noutputs g").unwrap_err();
        assert!(matches!(
            e,
            NetlistError::Syntax {
                line: 2,
                column: 10,
                ..
            }
        ));
        let e = parse_circuit("outputs a").unwrap_err();
        assert!(matches!(e, NetlistError::Syntax { line: 1, .. }));
        let e = parse_circuit("inputs 1a\noutputs a").unwrap_err();
        assert!(matches!(
            e,
            NetlistError::Syntax {
                line: 1,
                column: 8,
                ..
            }
        ));
        let e = parse_circuit("inputs a\noutputs a\ngate g = NOT a").unwrap_err();
        assert!(matches!(e, NetlistError::Syntax { line: 3, .. }));
        assert!(parse_circuit("inputs a").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c =
            parse_circuit("# header\n\ninputs a b # two\n  gate g = XOR a b\noutputs g\n").unwrap();
        assert_eq!(
            serialize_circuit(&c),
            "inputs a b\ngate g = XOR a b\noutputs g"
        );
    }

    #[test]
    fn width_mismatch() {
        let c = fixtures::fig2_circuit_a();
        let err = c.evaluate(&"111".parse().unwrap()).unwrap_err();
        assert_eq!(
            err,
            NetlistError::WidthMismatch {
                expected: 5,
                got: 3
            }
        );
    }

    #[test]
    fn xor_and_onehot_semantics() {
        for x in 0..4u8 {
            let ops = [x & 2 != 0, x & 1 != 0];
            assert_eq!(GateKind::Xor.eval(ops), GateKind::OneHot.eval(ops));
        }
        for x in 0..8u8 {
            let ops = [x & 4 != 0, x & 2 != 0, x & 1 != 0];
            let same = GateKind::Xor.eval(ops) == GateKind::OneHot.eval(ops);
            assert_eq!(same, x != 7, "pattern {x:03b}");
        }
        assert!(GateKind::Xor.eval([true, true, true]));
        assert!(!GateKind::OneHot.eval([true, true, true]));
    }

    #[test]
    fn assignment_conversions() {
        let a: Assignment = "11011".parse().unwrap();
        assert_eq!(a.to_index(), 0b11011);
        assert_eq!(Assignment::from_index(5, 0b11011), a);
        assert_eq!(a.to_string(), "11011");
        assert!("10a".parse::<Assignment>().is_err());
    }
}
