//! Gate-level circuits and their decomposition into timeslices.

mod format;
mod generators;

pub use format::{parse_circuit, render_native, CircuitFormat, ParseError};
pub use generators::{gen_cuccaro, gen_ghz, gen_qft, gen_qvol};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Structural class of a gate, independent of which gate it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Unitary on one qubit.
    Single,
    /// Unitary on two distinct qubits.
    Two,
    /// Single-qubit measurement.
    Measure,
}

/// Concrete gate identity. The set matches what the generators emit and the
/// parsers accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateLabel {
    H,
    X,
    Z,
    T,
    Tdg,
    Rz,
    Cx,
    Swap,
    Cp,
    Measure,
}

impl GateLabel {
    pub fn kind(self) -> GateKind {
        match self {
            GateLabel::H
            | GateLabel::X
            | GateLabel::Z
            | GateLabel::T
            | GateLabel::Tdg
            | GateLabel::Rz => GateKind::Single,
            GateLabel::Cx | GateLabel::Swap | GateLabel::Cp => GateKind::Two,
            GateLabel::Measure => GateKind::Measure,
        }
    }

    /// Whether the gate carries a rotation angle.
    pub fn takes_param(self) -> bool {
        matches!(self, GateLabel::Rz | GateLabel::Cp)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateLabel::H => "h",
            GateLabel::X => "x",
            GateLabel::Z => "z",
            GateLabel::T => "t",
            GateLabel::Tdg => "tdg",
            GateLabel::Rz => "rz",
            GateLabel::Cx => "cx",
            GateLabel::Swap => "swap",
            GateLabel::Cp => "cp",
            GateLabel::Measure => "measure",
        }
    }

    pub fn from_str(s: &str) -> Option<GateLabel> {
        Some(match s {
            "h" => GateLabel::H,
            "x" => GateLabel::X,
            "z" => GateLabel::Z,
            "t" => GateLabel::T,
            "tdg" => GateLabel::Tdg,
            "rz" => GateLabel::Rz,
            "cx" => GateLabel::Cx,
            "swap" => GateLabel::Swap,
            "cp" => GateLabel::Cp,
            "measure" => GateLabel::Measure,
            _ => return None,
        })
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One gate application. Use the named constructors; they keep the operand
/// count consistent with the label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    label: GateLabel,
    qubits: [usize; 2],
    param: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitError {
    /// Gate touches a qubit index outside the circuit.
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    /// Two-qubit gate with identical operands.
    DuplicateOperands { qubit: usize },
    /// Operand count or parameter presence does not fit the label.
    MalformedGate { label: GateLabel },
    /// Generator size below its minimum.
    SizeTooSmall { minimum: usize },
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::QubitOutOfRange { qubit, num_qubits } => {
                write!(f, "qubit {qubit} out of range for {num_qubits}-qubit circuit")
            }
            CircuitError::DuplicateOperands { qubit } => {
                write!(f, "two-qubit gate applied twice to qubit {qubit}")
            }
            CircuitError::MalformedGate { label } => {
                write!(f, "malformed operands or parameter for gate '{label}'")
            }
            CircuitError::SizeTooSmall { minimum } => {
                write!(f, "circuit size below minimum of {minimum}")
            }
        }
    }
}

impl core::error::Error for CircuitError {}

impl Gate {
    /// Validated constructor used by the parsers.
    pub fn new(label: GateLabel, qubits: &[usize], param: Option<f64>) -> Result<Gate, CircuitError> {
        let arity = match label.kind() {
            GateKind::Single | GateKind::Measure => 1,
            GateKind::Two => 2,
        };
        if qubits.len() != arity || param.is_some() != label.takes_param() {
            return Err(CircuitError::MalformedGate { label });
        }
        if arity == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::DuplicateOperands { qubit: qubits[0] });
        }
        let qs = if arity == 2 { [qubits[0], qubits[1]] } else { [qubits[0], qubits[0]] };
        Ok(Gate { label, qubits: qs, param })
    }

    pub fn h(q: usize) -> Gate {
        Gate { label: GateLabel::H, qubits: [q, q], param: None }
    }

    pub fn x(q: usize) -> Gate {
        Gate { label: GateLabel::X, qubits: [q, q], param: None }
    }

    pub fn z(q: usize) -> Gate {
        Gate { label: GateLabel::Z, qubits: [q, q], param: None }
    }

    pub fn t(q: usize) -> Gate {
        Gate { label: GateLabel::T, qubits: [q, q], param: None }
    }

    pub fn tdg(q: usize) -> Gate {
        Gate { label: GateLabel::Tdg, qubits: [q, q], param: None }
    }

    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate { label: GateLabel::Rz, qubits: [q, q], param: Some(theta) }
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        assert_ne!(control, target, "cx operands must differ");
        Gate { label: GateLabel::Cx, qubits: [control, target], param: None }
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        assert_ne!(a, b, "swap operands must differ");
        Gate { label: GateLabel::Swap, qubits: [a, b], param: None }
    }

    pub fn cp(a: usize, b: usize, theta: f64) -> Gate {
        assert_ne!(a, b, "cp operands must differ");
        Gate { label: GateLabel::Cp, qubits: [a, b], param: Some(theta) }
    }

    pub fn measure(q: usize) -> Gate {
        Gate { label: GateLabel::Measure, qubits: [q, q], param: None }
    }

    pub fn label(&self) -> GateLabel {
        self.label
    }

    pub fn kind(&self) -> GateKind {
        self.label.kind()
    }

    /// Operand indices; length 1 or 2 depending on the kind.
    pub fn qubits(&self) -> &[usize] {
        match self.kind() {
            GateKind::Two => &self.qubits,
            _ => &self.qubits[..1],
        }
    }

    pub fn param(&self) -> Option<f64> {
        self.param
    }

    /// Operand pair of a two-qubit gate, `None` otherwise.
    pub fn pair(&self) -> Option<(usize, usize)> {
        match self.kind() {
            GateKind::Two => Some((self.qubits[0], self.qubits[1])),
            _ => None,
        }
    }
}

/// An ordered list of gates over `num_qubits` virtual qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, num_qubits: usize) -> Circuit {
        Circuit { name: name.into(), num_qubits, gates: Vec::new() }
    }

    /// Builds a circuit after checking every gate against the qubit count.
    pub fn with_gates(
        name: impl Into<String>,
        num_qubits: usize,
        gates: Vec<Gate>,
    ) -> Result<Circuit, CircuitError> {
        for g in &gates {
            for &q in g.qubits() {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits });
                }
            }
        }
        Ok(Circuit { name: name.into(), num_qubits, gates })
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        for &q in gate.qubits() {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    /// Count of two-qubit gates.
    pub fn num_two_qubit_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.kind() == GateKind::Two).count()
    }
}

/// A circuit partitioned into timeslices: consecutive groups of gates with
/// pairwise disjoint operands. Slices execute in order; gates inside a slice
/// run concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedCircuit {
    circuit: Circuit,
    slices: Vec<Vec<usize>>,
}

impl SlicedCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    /// Gate indices (into `circuit().gates()`) of slice `k`.
    pub fn slice(&self, k: usize) -> &[usize] {
        &self.slices[k]
    }

    pub fn slice_gates(&self, k: usize) -> impl Iterator<Item = &Gate> {
        self.slices[k].iter().map(move |&i| &self.circuit.gates()[i])
    }

    /// Operand pairs of the two-qubit gates in slice `k`, in gate order.
    pub fn two_qubit_pairs(&self, k: usize) -> Vec<(usize, usize)> {
        self.slice_gates(k).filter_map(|g| g.pair()).collect()
    }
}

/// Greedy as-soon-as-possible slicing: each gate lands in the earliest slice
/// after every earlier gate that shares one of its qubits.
pub fn slice_circuit(circuit: Circuit) -> SlicedCircuit {
    let mut next_free = alloc::vec![0usize; circuit.num_qubits()];
    let mut slices: Vec<Vec<usize>> = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        let at = g.qubits().iter().map(|&q| next_free[q]).max().unwrap_or(0);
        if at == slices.len() {
            slices.push(Vec::new());
        }
        slices[at].push(i);
        for &q in g.qubits() {
            next_free[q] = at + 1;
        }
    }
    SlicedCircuit { circuit, slices }
}
