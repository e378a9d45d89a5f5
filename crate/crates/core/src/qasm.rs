//! OpenQASM 2.0 export and a reader for the subset the exporter emits.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, Op};
use crate::{Error, Result};

/// Renders a circuit as OpenQASM 2.0 with a single quantum register `q`.
pub fn to_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.n_qubits);
    for reg in &circuit.cregs {
        let _ = writeln!(out, "creg {}[{}];", reg.name, reg.size);
    }
    for op in &circuit.ops {
        match op {
            Op::Gate(g) => {
                let _ = writeln!(out, "{};", gate_text(g));
            }
            Op::Measure { qubit, creg, bit } => {
                let _ = writeln!(out, "measure q[{qubit}] -> {}[{bit}];", circuit.cregs[*creg].name);
            }
            Op::Conditional { creg, value, gate } => {
                let _ = writeln!(out, "if({}=={value}) {};", circuit.cregs[*creg].name, gate_text(gate));
            }
            Op::Barrier => out.push_str("barrier q;\n"),
        }
    }
    out
}

fn gate_text(g: &Gate) -> String {
    match *g {
        Gate::H(q) => format!("h q[{q}]"),
        Gate::X(q) => format!("x q[{q}]"),
        Gate::Y(q) => format!("y q[{q}]"),
        Gate::Z(q) => format!("z q[{q}]"),
        Gate::Phase(q, phi) => format!("u1({phi:?}) q[{q}]"),
        Gate::Ry(q, theta) => format!("ry({theta:?}) q[{q}]"),
        Gate::Cx { control, target } => format!("cx q[{control}],q[{target}]"),
        Gate::Cz(a, b) => format!("cz q[{a}],q[{b}]"),
    }
}

/// Parses the OpenQASM 2.0 subset produced by [`to_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut parser = Parser::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            parser.statement(stmt).map_err(|message| Error::Qasm {
                line: lineno + 1,
                message,
            })?;
        }
    }
    parser.circuit.ok_or(Error::Qasm {
        line: 0,
        message: "no qreg declared".into(),
    })
}

#[derive(Default)]
struct Parser {
    qreg: Option<String>,
    circuit: Option<Circuit>,
}

type Step = std::result::Result<(), String>;

impl Parser {
    fn circuit(&mut self) -> std::result::Result<&mut Circuit, String> {
        self.circuit.as_mut().ok_or_else(|| "statement before qreg".to_string())
    }

    fn statement(&mut self, stmt: &str) -> Step {
        if stmt.starts_with("OPENQASM") {
            return if stmt == "OPENQASM 2.0" {
                Ok(())
            } else {
                Err(format!("unsupported version `{stmt}`"))
            };
        }
        if stmt.starts_with("include") {
            return Ok(());
        }
        if let Some(rest) = stmt.strip_prefix("qreg ") {
            if self.circuit.is_some() {
                return Err("only one qreg is supported".into());
            }
            let (name, size) = parse_decl(rest)?;
            self.qreg = Some(name);
            self.circuit = Some(Circuit::new(size));
            return Ok(());
        }
        if let Some(rest) = stmt.strip_prefix("creg ") {
            let (name, size) = parse_decl(rest)?;
            self.circuit()?.add_creg(&name, size);
            return Ok(());
        }
        if stmt.starts_with("barrier") {
            self.circuit()?.ops.push(Op::Barrier);
            return Ok(());
        }
        if let Some(rest) = stmt.strip_prefix("measure ") {
            let (lhs, rhs) = rest.split_once("->").ok_or("measure without `->`")?;
            let qubit = self.qubit(lhs.trim())?;
            let (reg, bit) = parse_indexed(rhs.trim())?;
            let creg = self.creg_index(&reg)?;
            self.circuit()?.ops.push(Op::Measure { qubit, creg, bit });
            return Ok(());
        }
        if let Some(rest) = stmt.strip_prefix("if") {
            let rest = rest.trim_start();
            let close = rest.find(')').ok_or("unterminated if condition")?;
            let cond = rest.get(1..close).ok_or("malformed if condition")?;
            let (reg, value) = cond.split_once("==").ok_or("if condition needs `==`")?;
            let creg = self.creg_index(reg.trim())?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| format!("bad condition value `{value}`"))?;
            let gate = self.gate(rest[close + 1..].trim())?;
            self.circuit()?.ops.push(Op::Conditional { creg, value, gate });
            return Ok(());
        }
        let gate = self.gate(stmt)?;
        self.circuit()?.ops.push(Op::Gate(gate));
        Ok(())
    }

    fn creg_index(&mut self, name: &str) -> std::result::Result<usize, String> {
        self.circuit()?
            .cregs
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| format!("unknown creg `{name}`"))
    }

    fn qubit(&self, arg: &str) -> std::result::Result<usize, String> {
        let (reg, idx) = parse_indexed(arg)?;
        if Some(&reg) != self.qreg.as_ref() {
            return Err(format!("unknown qreg `{reg}`"));
        }
        Ok(idx)
    }

    fn gate(&self, stmt: &str) -> std::result::Result<Gate, String> {
        let (head, args) = match stmt.find(')') {
            Some(close) if stmt.contains('(') => (&stmt[..=close], stmt[close + 1..].trim()),
            _ => stmt.split_once(' ').ok_or_else(|| format!("cannot parse `{stmt}`"))?,
        };
        let (name, param) = match head.split_once('(') {
            Some((n, p)) => (n.trim(), Some(parse_angle(p.trim_end_matches(')'))?)),
            None => (head.trim(), None),
        };
        let qs: Vec<usize> = args
            .split(',')
            .map(|a| self.qubit(a.trim()))
            .collect::<std::result::Result<_, _>>()?;
        let one = |qs: &[usize]| -> std::result::Result<usize, String> {
            match qs {
                [q] => Ok(*q),
                _ => Err(format!("`{name}` takes one qubit")),
            }
        };
        let two = |qs: &[usize]| -> std::result::Result<(usize, usize), String> {
            match qs {
                [a, b] => Ok((*a, *b)),
                _ => Err(format!("`{name}` takes two qubits")),
            }
        };
        let need = |p: Option<f64>| p.ok_or_else(|| format!("`{name}` needs an angle"));
        Ok(match name {
            "h" => Gate::H(one(&qs)?),
            "x" => Gate::X(one(&qs)?),
            "y" => Gate::Y(one(&qs)?),
            "z" => Gate::Z(one(&qs)?),
            "u1" | "p" => Gate::Phase(one(&qs)?, need(param)?),
            "ry" => Gate::Ry(one(&qs)?, need(param)?),
            "cx" => {
                let (control, target) = two(&qs)?;
                Gate::Cx { control, target }
            }
            "cz" => {
                let (a, b) = two(&qs)?;
                Gate::Cz(a, b)
            }
            other => return Err(format!("unsupported gate `{other}`")),
        })
    }
}

fn parse_decl(rest: &str) -> std::result::Result<(String, usize), String> {
    parse_indexed(rest.trim())
}

fn parse_indexed(s: &str) -> std::result::Result<(String, usize), String> {
    let open = s
        .find('[')
        .ok_or_else(|| format!("expected `name[index]`, got `{s}`"))?;
    let close = s
        .rfind(']')
        .ok_or_else(|| format!("expected `name[index]`, got `{s}`"))?;
    let idx = s[open + 1..close]
        .trim()
        .parse()
        .map_err(|_| format!("bad index in `{s}`"))?;
    Ok((s[..open].trim().to_string(), idx))
}

/// Accepts plain floats and the forms `pi`, `k*pi`, `pi/k`, `-pi/k`.
fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => (-1.0, b.trim()),
        None => (1.0, s),
    };
    let pi = std::f64::consts::PI;
    let bad = || format!("cannot parse angle `{s}`");
    let value = if body == "pi" {
        pi
    } else if let Some(d) = body.strip_prefix("pi/") {
        pi / d.trim().parse::<f64>().map_err(|_| bad())?
    } else if let Some(k) = body.strip_suffix("*pi") {
        k.trim().parse::<f64>().map_err(|_| bad())? * pi
    } else {
        return Err(bad());
    };
    Ok(sign * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitId;

    #[test]
    fn round_trips_named_circuits() {
        for id in CircuitId::ALL {
            let c = id.circuit();
            assert_eq!(parse_qasm(&to_qasm(&c)).unwrap(), c, "{id:?}");
        }
    }

    #[test]
    fn round_trips_parametrized_gates() {
        let c = Circuit::with_gates(2, [Gate::Ry(0, 0.123456789), Gate::Phase(1, -2.5)]);
        assert_eq!(parse_qasm(&to_qasm(&c)).unwrap(), c);
    }

    #[test]
    fn pi_expressions() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_angle("pi/2").unwrap(), pi / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -pi / 4.0);
        assert_eq!(parse_angle("0.5*pi").unwrap(), 0.5 * pi);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn reports_line_of_bad_statement() {
        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nswap q[0],q[1];\n").unwrap_err();
        assert!(matches!(err, Error::Qasm { line: 3, .. }));
        assert!(parse_qasm("OPENQASM 2.0;\nh q[0];\n").is_err());
    }
}
