//! Text formats for circuits.
//!
//! The native format is line oriented:
//!
//! ```text
//! # comment
//! name qft_4
//! qubits 4
//! h 0
//! cp 0 1 1.5707963267948966
//! cx 1 2
//! measure 3
//! ```
//!
//! `qubits N` must precede any gate line; `name` is optional. Gate lines are
//! `<label> <q0> [q1] [param]` with the parameter required exactly for the
//! parametrised labels. `render_native` and `parse_circuit` round-trip.
//!
//! The OpenQASM 2.0 support is a subset: `qreg`/`creg` declarations, the
//! gates `h`, `x`, `z`, `cx`, `swap`, `cp(theta)`, `rz(theta)`, and
//! `measure q[i] -> c[i]`. Angle expressions may use numbers, `pi`, `+ - * /`
//! and parentheses. Anything else is rejected with its line number.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, GateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitFormat {
    Native,
    QasmSubset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub fn parse_circuit(text: &str, format: CircuitFormat) -> Result<Circuit, ParseError> {
    match format {
        CircuitFormat::Native => parse_native(text),
        CircuitFormat::QasmSubset => parse_qasm(text),
    }
}

/// Renders a circuit in the native format.
pub fn render_native(c: &Circuit) -> String {
    let mut out = String::new();
    if !c.name().is_empty() {
        let _ = writeln!(out, "name {}", c.name());
    }
    let _ = writeln!(out, "qubits {}", c.num_qubits());
    for g in c.gates() {
        let _ = write!(out, "{}", g.label());
        for &q in g.qubits() {
            let _ = write!(out, " {q}");
        }
        if let Some(p) = g.param() {
            let _ = write!(out, " {p}");
        }
        let _ = writeln!(out);
    }
    out
}

fn parse_native(text: &str) -> Result<Circuit, ParseError> {
    let mut name: Option<String> = None;
    let mut num_qubits: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut tok = line.split_whitespace();
        let Some(head) = tok.next() else { continue };
        match head {
            "name" => {
                let v = tok.next().ok_or_else(|| err(lineno, "missing circuit name"))?;
                if tok.next().is_some() {
                    return Err(err(lineno, "trailing tokens after name"));
                }
                name = Some(v.to_owned());
            }
            "qubits" => {
                let v = tok.next().ok_or_else(|| err(lineno, "missing qubit count"))?;
                let n: usize = v
                    .parse()
                    .map_err(|_| err(lineno, "qubit count is not a non-negative integer"))?;
                if tok.next().is_some() {
                    return Err(err(lineno, "trailing tokens after qubit count"));
                }
                if num_qubits.replace(n).is_some() {
                    return Err(err(lineno, "duplicate qubits directive"));
                }
            }
            label => {
                let Some(label) = GateLabel::from_str(label) else {
                    return Err(err(lineno, alloc::format!("unknown gate '{label}'")));
                };
                if num_qubits.is_none() {
                    return Err(err(lineno, "gate before qubits directive"));
                }
                let rest: Vec<&str> = tok.collect();
                let arity = if label.kind() == super::GateKind::Two { 2 } else { 1 };
                let want = arity + usize::from(label.takes_param());
                if rest.len() != want {
                    return Err(err(
                        lineno,
                        alloc::format!("gate '{label}' expects {want} argument(s), got {}", rest.len()),
                    ));
                }
                let mut qs = [0usize; 2];
                for (k, s) in rest[..arity].iter().enumerate() {
                    qs[k] = s
                        .parse()
                        .map_err(|_| err(lineno, alloc::format!("bad qubit index '{s}'")))?;
                }
                let param = if label.takes_param() {
                    let s = rest[arity];
                    Some(
                        s.parse::<f64>()
                            .map_err(|_| err(lineno, alloc::format!("bad parameter '{s}'")))?,
                    )
                } else {
                    None
                };
                let gate = Gate::new(label, &qs[..arity], param)
                    .map_err(|e| err(lineno, alloc::format!("{e}")))?;
                gates.push(gate);
            }
        }
    }

    let Some(n) = num_qubits else {
        return Err(err(text.lines().count() + 1, "missing qubits directive"));
    };
    Circuit::with_gates(name.unwrap_or_default(), n, gates).map_err(map_circuit_error(text))
}

fn map_circuit_error(text: &str) -> impl Fn(CircuitError) -> ParseError + '_ {
    // Out-of-range indices are only caught when the circuit is assembled;
    // report them on the offending line.
    move |e| {
        if let CircuitError::QubitOutOfRange { qubit, .. } = e {
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("");
                let mut tok = line.split_whitespace();
                let Some(head) = tok.next() else { continue };
                if GateLabel::from_str(head).is_some()
                    && tok.take(2).any(|t| t.parse() == Ok(qubit))
                {
                    return err(i + 1, alloc::format!("{e}"));
                }
            }
        }
        err(0, alloc::format!("{e}"))
    }
}

// ---- OpenQASM 2.0 subset ----

fn parse_qasm(text: &str) -> Result<Circuit, ParseError> {
    let mut qreg: Option<(String, usize)> = None;
    let mut creg: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find("//") {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("OPENQASM") {
            if !line.trim_end_matches(';').trim_end().ends_with("2.0") {
                return Err(err(lineno, "only OPENQASM 2.0 is supported"));
            }
            continue;
        }
        if line.starts_with("include") {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err(lineno, "missing ';'"))?
            .trim();
        if let Some(rest) = stmt.strip_prefix("qreg ") {
            let (name, size) = parse_reg_decl(rest, lineno)?;
            if qreg.replace((name, size)).is_some() {
                return Err(err(lineno, "multiple qreg declarations are not supported"));
            }
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("creg ") {
            let (name, size) = parse_reg_decl(rest, lineno)?;
            if creg.replace((name, size)).is_some() {
                return Err(err(lineno, "multiple creg declarations are not supported"));
            }
            continue;
        }

        let Some((ref qname, qsize)) = qreg else {
            return Err(err(lineno, "statement before qreg declaration"));
        };

        if let Some(rest) = stmt.strip_prefix("measure ") {
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| err(lineno, "measure expects 'q[i] -> c[i]'"))?;
            let q = parse_indexed(lhs.trim(), qname, qsize, lineno)?;
            let (ref cname, csize) =
                *creg.as_ref().ok_or_else(|| err(lineno, "measure before creg declaration"))?;
            parse_indexed(rhs.trim(), cname, csize, lineno)?;
            gates.push(Gate::measure(q));
            continue;
        }

        // gate applications: name[(expr)] qubit {, qubit}
        let (head, args) = match stmt.find(|ch: char| ch.is_whitespace() || ch == '(') {
            Some(p) => stmt.split_at(p),
            None => (stmt, ""),
        };
        let (param, operands) = if let Some(rest) = args.trim_start().strip_prefix('(') {
            let close = rest
                .find(')')
                .ok_or_else(|| err(lineno, "unterminated '(' in gate parameter"))?;
            let angle = eval_angle(&rest[..close], lineno)?;
            (Some(angle), &rest[close + 1..])
        } else {
            (None, args)
        };
        let mut qs: Vec<usize> = Vec::new();
        for part in operands.split(',').map(str::trim) {
            if part.is_empty() {
                continue;
            }
            qs.push(parse_indexed(part, qname, qsize, lineno)?);
        }

        let gate = match (head, param.is_some()) {
            ("h", false) => one(Gate::h, &qs, lineno)?,
            ("x", false) => one(Gate::x, &qs, lineno)?,
            ("z", false) => one(Gate::z, &qs, lineno)?,
            ("cx", false) => two(Gate::cx, &qs, lineno)?,
            ("swap", false) => two(Gate::swap, &qs, lineno)?,
            ("rz", true) => {
                let q = *single_operand(&qs, lineno)?;
                Gate::rz(q, param.unwrap())
            }
            ("cp", true) => {
                let [a, b] = pair_operands(&qs, lineno)?;
                if a == b {
                    return Err(err(lineno, "cp operands must differ"));
                }
                Gate::cp(a, b, param.unwrap())
            }
            _ => {
                return Err(err(
                    lineno,
                    alloc::format!("unsupported statement '{head}'"),
                ))
            }
        };
        gates.push(gate);
    }

    let Some((name, n)) = qreg else {
        return Err(err(text.lines().count() + 1, "missing qreg declaration"));
    };
    let _ = name;
    Circuit::with_gates("", n, gates).map_err(|e| err(0, alloc::format!("{e}")))
}

fn one(make: fn(usize) -> Gate, qs: &[usize], lineno: usize) -> Result<Gate, ParseError> {
    Ok(make(*single_operand(qs, lineno)?))
}

fn two(make: fn(usize, usize) -> Gate, qs: &[usize], lineno: usize) -> Result<Gate, ParseError> {
    let [a, b] = pair_operands(qs, lineno)?;
    if a == b {
        return Err(err(lineno, "two-qubit gate operands must differ"));
    }
    Ok(make(a, b))
}

fn single_operand(qs: &[usize], lineno: usize) -> Result<&usize, ParseError> {
    match qs {
        [q] => Ok(q),
        _ => Err(err(lineno, "expected one qubit operand")),
    }
}

fn pair_operands(qs: &[usize], lineno: usize) -> Result<[usize; 2], ParseError> {
    match qs {
        [a, b] => Ok([*a, *b]),
        _ => Err(err(lineno, "expected two qubit operands")),
    }
}

fn parse_reg_decl(rest: &str, lineno: usize) -> Result<(String, usize), ParseError> {
    let rest = rest.trim();
    let open = rest.find('[').ok_or_else(|| err(lineno, "register declaration needs [size]"))?;
    let close = rest.find(']').ok_or_else(|| err(lineno, "register declaration needs [size]"))?;
    if close < open || !rest[close + 1..].trim().is_empty() {
        return Err(err(lineno, "malformed register declaration"));
    }
    let name = rest[..open].trim();
    if name.is_empty() {
        return Err(err(lineno, "register declaration needs a name"));
    }
    let size: usize = rest[open + 1..close]
        .trim()
        .parse()
        .map_err(|_| err(lineno, "register size is not a non-negative integer"))?;
    Ok((name.to_owned(), size))
}

fn parse_indexed(s: &str, reg: &str, size: usize, lineno: usize) -> Result<usize, ParseError> {
    let open = s.find('[').ok_or_else(|| {
        err(lineno, alloc::format!("expected indexed register operand, got '{s}'"))
    })?;
    let close = s
        .find(']')
        .ok_or_else(|| err(lineno, alloc::format!("missing ']' in operand '{s}'")))?;
    if &s[..open] != reg || close < open || !s[close + 1..].trim().is_empty() {
        return Err(err(lineno, alloc::format!("unknown register in operand '{s}'")));
    }
    let idx: usize = s[open + 1..close]
        .trim()
        .parse()
        .map_err(|_| err(lineno, alloc::format!("bad index in operand '{s}'")))?;
    if idx >= size {
        return Err(err(
            lineno,
            alloc::format!("index {idx} out of range for register {reg}[{size}]"),
        ));
    }
    Ok(idx)
}

// ---- angle expressions ----
//
// expr   := term (('+' | '-') term)*
// term   := factor (('*' | '/') factor)*
// factor := number | 'pi' | '-' factor | '(' expr ')'

fn eval_angle(src: &str, lineno: usize) -> Result<f64, ParseError> {
    let tokens = lex_angle(src, lineno)?;
    let mut pos = 0usize;
    let v = parse_expr(&tokens, &mut pos, lineno)?;
    if pos != tokens.len() {
        return Err(err(lineno, alloc::format!("trailing tokens in angle '{src}'")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AngleTok {
    Num(f64),
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
}

fn lex_angle(src: &str, lineno: usize) -> Result<Vec<AngleTok>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(AngleTok::Plus);
                i += 1;
            }
            '-' => {
                out.push(AngleTok::Minus);
                i += 1;
            }
            '*' => {
                out.push(AngleTok::Star);
                i += 1;
            }
            '/' => {
                out.push(AngleTok::Slash);
                i += 1;
            }
            '(' => {
                out.push(AngleTok::Open);
                i += 1;
            }
            ')' => {
                out.push(AngleTok::Close);
                i += 1;
            }
            'p' if src[i..].starts_with("pi") => {
                out.push(AngleTok::Pi);
                i += 2;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_digit() || d == '.' {
                        i += 1;
                    } else if (d == 'e' || d == 'E')
                        && i + 1 < bytes.len()
                        && ((bytes[i + 1] as char).is_ascii_digit()
                            || bytes[i + 1] == b'+'
                            || bytes[i + 1] == b'-')
                    {
                        i += 2;
                    } else {
                        break;
                    }
                }
                let v: f64 = src[start..i]
                    .parse()
                    .map_err(|_| err(lineno, alloc::format!("bad number '{}'", &src[start..i])))?;
                out.push(AngleTok::Num(v));
            }
            _ => return Err(err(lineno, alloc::format!("bad character '{c}' in angle"))),
        }
    }
    Ok(out)
}

fn parse_expr(toks: &[AngleTok], pos: &mut usize, lineno: usize) -> Result<f64, ParseError> {
    let mut v = parse_term(toks, pos, lineno)?;
    while let Some(&op) = toks.get(*pos) {
        match op {
            AngleTok::Plus => {
                *pos += 1;
                v += parse_term(toks, pos, lineno)?;
            }
            AngleTok::Minus => {
                *pos += 1;
                v -= parse_term(toks, pos, lineno)?;
            }
            _ => break,
        }
    }
    Ok(v)
}

fn parse_term(toks: &[AngleTok], pos: &mut usize, lineno: usize) -> Result<f64, ParseError> {
    let mut v = parse_factor(toks, pos, lineno)?;
    while let Some(&op) = toks.get(*pos) {
        match op {
            AngleTok::Star => {
                *pos += 1;
                v *= parse_factor(toks, pos, lineno)?;
            }
            AngleTok::Slash => {
                *pos += 1;
                v /= parse_factor(toks, pos, lineno)?;
            }
            _ => break,
        }
    }
    Ok(v)
}

fn parse_factor(toks: &[AngleTok], pos: &mut usize, lineno: usize) -> Result<f64, ParseError> {
    match toks.get(*pos) {
        Some(AngleTok::Num(v)) => {
            *pos += 1;
            Ok(*v)
        }
        Some(AngleTok::Pi) => {
            *pos += 1;
            Ok(core::f64::consts::PI)
        }
        Some(AngleTok::Minus) => {
            *pos += 1;
            Ok(-parse_factor(toks, pos, lineno)?)
        }
        Some(AngleTok::Open) => {
            *pos += 1;
            let v = parse_expr(toks, pos, lineno)?;
            match toks.get(*pos) {
                Some(AngleTok::Close) => {
                    *pos += 1;
                    Ok(v)
                }
                _ => Err(err(lineno, "missing ')' in angle")),
            }
        }
        _ => Err(err(lineno, "malformed angle expression")),
    }
}
