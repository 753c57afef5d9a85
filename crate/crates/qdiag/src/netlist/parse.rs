//! Line-oriented bench-style netlist format.
//!
//! ```text
//! # comment
//! INPUT(i1)
//! OUTPUT(sigma)
//! z2 = XOR(i1, i2)
//! sigma = XOR(z2, ci)
//! ```
//!
//! Wire names match `[A-Za-z_][A-Za-z0-9_]*`. `parse_bench(render_bench(c))`
//! reproduces `c` exactly.

use super::{is_valid_name, Circuit, CircuitError, Gate, GateKind};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: CircuitError,
    },
    /// Whole-netlist invariant violations with no single offending line,
    /// e.g. a cycle or an undriven wire.
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

struct LineParser<'a> {
    text: &'a str,
    line: usize,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        LineParser { text, line, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let name = &self.text[start..self.pos];
        if !is_valid_name(name) {
            self.pos = start;
            return Err(self.error("expected a wire name"));
        }
        Ok(name)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            Err(self.error("trailing characters"))
        }
    }
}

/// Parses bench-format text into a checked [`Circuit`].
///
/// Declaration order of inputs, outputs and gates is preserved.
pub fn parse_bench(text: &str) -> Result<Circuit, ParseError> {
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut gates = Vec::new();
    let mut gate_lines = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let mut p = LineParser::new(content, line_no);
        let head = p.name()?;
        p.skip_ws();
        match (head, p.peek()) {
            ("INPUT", Some('(')) => {
                p.expect('(')?;
                let name = p.name()?;
                p.expect(')')?;
                p.end()?;
                inputs.push(name.to_string());
            }
            ("OUTPUT", Some('(')) => {
                p.expect('(')?;
                let name = p.name()?;
                p.expect(')')?;
                p.end()?;
                outputs.push(name.to_string());
            }
            (output, _) => {
                p.expect('=')?;
                let func = p.name()?;
                let kind = match func {
                    "NOT" => GateKind::Not,
                    "AND" => GateKind::And,
                    "OR" => GateKind::Or,
                    "XOR" => GateKind::Xor,
                    other => return Err(p.error(format!("unknown gate function `{other}`"))),
                };
                p.expect('(')?;
                let mut gate_inputs = vec![p.name()?.to_string()];
                p.skip_ws();
                while p.peek() == Some(',') {
                    p.expect(',')?;
                    gate_inputs.push(p.name()?.to_string());
                    p.skip_ws();
                }
                p.expect(')')?;
                p.end()?;
                if gate_inputs.len() != kind.arity() {
                    return Err(ParseError::Invalid {
                        line: line_no,
                        source: CircuitError::BadArity {
                            gate: output.to_string(),
                            kind,
                            want: kind.arity(),
                            got: gate_inputs.len(),
                        },
                    });
                }
                gates.push(Gate {
                    kind,
                    inputs: gate_inputs,
                    output: output.to_string(),
                });
                gate_lines.push(line_no);
            }
        }
    }

    Circuit::new(inputs, outputs, gates).map_err(|err| match &err {
        CircuitError::DuplicateDriver(w) | CircuitError::InputDriven(w) => {
            // Blame the later of the two definitions.
            let line = find_gate_line(text, w).unwrap_or(0);
            ParseError::Invalid { line, source: err }
        }
        _ => ParseError::Circuit(err),
    })
}

fn find_gate_line(text: &str, wire: &str) -> Option<usize> {
    let mut last = None;
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        if let Some((lhs, _)) = content.split_once('=') {
            if lhs.trim() == wire {
                last = Some(idx + 1);
            }
        }
    }
    last
}

/// Renders a circuit back to bench text. Inverse of [`parse_bench`].
pub fn render_bench(circuit: &Circuit) -> String {
    let mut out = String::new();
    for input in circuit.inputs() {
        writeln!(out, "INPUT({input})").unwrap();
    }
    for output in circuit.outputs() {
        writeln!(out, "OUTPUT({output})").unwrap();
    }
    for gate in circuit.gates() {
        writeln!(out, "{} = {}({})", gate.output, gate.kind, gate.inputs.join(", ")).unwrap();
    }
    out
}
