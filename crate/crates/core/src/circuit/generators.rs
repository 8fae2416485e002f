//! Benchmark circuit families.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitError, Gate};

/// GHZ state preparation: `h` on qubit 0 followed by a CNOT chain.
/// `n` gates, depth `n`.
pub fn gen_ghz(n: usize) -> Result<Circuit, CircuitError> {
    if n < 1 {
        return Err(CircuitError::SizeTooSmall { minimum: 1 });
    }
    let mut gates = Vec::with_capacity(n);
    gates.push(Gate::h(0));
    for q in 0..n - 1 {
        gates.push(Gate::cx(q, q + 1));
    }
    Circuit::with_gates(format!("ghz_{n}"), n, gates)
}

/// Quantum Fourier transform: per qubit one `h` plus a controlled-phase
/// ladder from every lower qubit, then the terminal qubit-reversal swaps.
/// `n` `h` gates, `n(n-1)/2` `cp` gates, `floor(n/2)` `swap` gates.
pub fn gen_qft(n: usize) -> Result<Circuit, CircuitError> {
    if n < 1 {
        return Err(CircuitError::SizeTooSmall { minimum: 1 });
    }
    let mut gates = Vec::with_capacity(n + n * (n - 1) / 2 + n / 2);
    for i in 0..n {
        gates.push(Gate::h(i));
        for j in 0..i {
            // An integer shift caps out at 63 levels; exp2 halves exactly forever.
            let theta = PI * libm::exp2(-((i - j) as f64));
            gates.push(Gate::cp(j, i, theta));
        }
    }
    for i in 0..n / 2 {
        gates.push(Gate::swap(i, n - 1 - i));
    }
    Circuit::with_gates(format!("qft_{n}"), n, gates)
}

/// Cuccaro ripple-carry adder on two `bits`-bit registers, using
/// `2*bits + 2` qubits laid out as:
///
/// * qubit `0`: carry-in
/// * qubits `1 ..= bits`: register `a`
/// * qubits `bits+1 ..= 2*bits`: register `b`
/// * qubit `2*bits + 1`: carry-out
///
/// A MAJ ladder runs up the registers, the carry is copied out, then the
/// inverse UMA ladder runs back down. Each MAJ/UMA block is two CNOTs and a
/// Toffoli; the Toffoli is expanded into the standard network of six CNOTs
/// and nine single-qubit `h`/`t`/`tdg` gates, so the gate count stays linear
/// in `bits`.
pub fn gen_cuccaro(bits: usize) -> Result<Circuit, CircuitError> {
    if bits < 1 {
        return Err(CircuitError::SizeTooSmall { minimum: 1 });
    }
    let a = |i: usize| 1 + i;
    let b = |i: usize| 1 + bits + i;
    let cout = 2 * bits + 1;

    let mut gates = Vec::with_capacity(34 * bits + 1);
    let toffoli = |gates: &mut Vec<Gate>, c0: usize, c1: usize, tgt: usize| {
        gates.push(Gate::h(tgt));
        gates.push(Gate::cx(c1, tgt));
        gates.push(Gate::tdg(tgt));
        gates.push(Gate::cx(c0, tgt));
        gates.push(Gate::t(tgt));
        gates.push(Gate::cx(c1, tgt));
        gates.push(Gate::tdg(tgt));
        gates.push(Gate::cx(c0, tgt));
        gates.push(Gate::t(c1));
        gates.push(Gate::t(tgt));
        gates.push(Gate::h(tgt));
        gates.push(Gate::cx(c0, c1));
        gates.push(Gate::t(c0));
        gates.push(Gate::tdg(c1));
        gates.push(Gate::cx(c0, c1));
    };
    // MAJ(c, y, x): x carries the running majority.
    let maj = |gates: &mut Vec<Gate>, c: usize, y: usize, x: usize| {
        gates.push(Gate::cx(x, y));
        gates.push(Gate::cx(x, c));
        toffoli(gates, c, y, x);
    };
    // UMA(c, y, x): inverse ladder step, leaves the sum on y.
    let uma = |gates: &mut Vec<Gate>, c: usize, y: usize, x: usize| {
        toffoli(gates, c, y, x);
        gates.push(Gate::cx(x, c));
        gates.push(Gate::cx(c, y));
    };

    maj(&mut gates, 0, b(0), a(0));
    for i in 1..bits {
        maj(&mut gates, a(i - 1), b(i), a(i));
    }
    gates.push(Gate::cx(a(bits - 1), cout));
    for i in (1..bits).rev() {
        uma(&mut gates, a(i - 1), b(i), a(i));
    }
    uma(&mut gates, 0, b(0), a(0));

    Circuit::with_gates(format!("cuccaro_{bits}"), 2 * bits + 2, gates)
}

/// Quantum-volume style random circuit: `depth` layers, each pairing the
/// qubits under a fresh random permutation and applying a generic two-qubit
/// block (three CNOTs interleaved with `rz` rotations) to every pair.
/// Identical `(n, depth, seed)` arguments reproduce the same circuit.
pub fn gen_qvol(n: usize, depth: usize, seed: u64) -> Result<Circuit, CircuitError> {
    if n < 2 {
        return Err(CircuitError::SizeTooSmall { minimum: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut gates = Vec::with_capacity(depth * (n / 2) * 11);
    for _ in 0..depth {
        order.shuffle(&mut rng);
        for pair in order.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut angle = |q: usize| Gate::rz(q, rng.gen::<f64>() * 2.0 * PI);
            let (ra, rb) = (angle(a), angle(b));
            gates.push(ra);
            gates.push(rb);
            gates.push(Gate::cx(a, b));
            let (ra, rb) = (angle(a), angle(b));
            gates.push(ra);
            gates.push(rb);
            gates.push(Gate::cx(b, a));
            let (ra, rb) = (angle(a), angle(b));
            gates.push(ra);
            gates.push(rb);
            gates.push(Gate::cx(a, b));
            let (ra, rb) = (angle(a), angle(b));
            gates.push(ra);
            gates.push(rb);
        }
    }
    Circuit::with_gates(format!("qvol_{n}_d{depth}"), n, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{slice_circuit, GateKind, GateLabel};

    #[test]
    fn ghz_shape() {
        let c = gen_ghz(8).unwrap();
        assert_eq!(c.num_qubits(), 8);
        assert_eq!(c.num_gates(), 8);
        assert_eq!(c.gates()[0], Gate::h(0));
        assert_eq!(c.num_two_qubit_gates(), 7);
        // CNOT chain forces depth n.
        assert_eq!(slice_circuit(c).num_slices(), 8);
        assert!(gen_ghz(0).is_err());
        assert_eq!(gen_ghz(1).unwrap().num_gates(), 1);
    }

    #[test]
    fn qft_gate_counts() {
        for n in [1usize, 2, 3, 8, 15] {
            let c = gen_qft(n).unwrap();
            let h = c.gates().iter().filter(|g| g.label() == GateLabel::H).count();
            let cp = c.gates().iter().filter(|g| g.label() == GateLabel::Cp).count();
            let sw = c.gates().iter().filter(|g| g.label() == GateLabel::Swap).count();
            assert_eq!(h, n);
            assert_eq!(cp, n * (n - 1) / 2);
            assert_eq!(sw, n / 2);
            assert_eq!(c.num_gates(), h + cp + sw);
        }
    }

    #[test]
    fn qft_angles_halve_with_distance() {
        let c = gen_qft(4).unwrap();
        let cp_between = |j: usize, i: usize| {
            c.gates()
                .iter()
                .find(|g| g.label() == GateLabel::Cp && g.qubits() == [j, i])
                .and_then(|g| g.param())
                .unwrap()
        };
        assert_eq!(cp_between(0, 1), PI / 2.0);
        assert_eq!(cp_between(0, 2), PI / 4.0);
        assert_eq!(cp_between(0, 3), PI / 8.0);
        assert_eq!(cp_between(2, 3), PI / 2.0);
    }

    #[test]
    fn cuccaro_shape() {
        let c = gen_cuccaro(1).unwrap();
        assert_eq!(c.num_qubits(), 4);
        assert_eq!(c.num_gates(), 35);
        for bits in [2usize, 5, 127] {
            let c = gen_cuccaro(bits).unwrap();
            assert_eq!(c.num_qubits(), 2 * bits + 2);
            assert_eq!(c.num_gates(), 34 * bits + 1);
            let tq = c.num_two_qubit_gates();
            // 2 CNOTs outside + 6 inside each of the 2*bits Toffolis, plus carry copy.
            assert_eq!(tq, 16 * bits + 1);
        }
        assert!(gen_cuccaro(0).is_err());
    }

    #[test]
    fn qvol_is_seed_deterministic() {
        let a = gen_qvol(10, 6, 42).unwrap();
        let b = gen_qvol(10, 6, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_qvol(10, 6, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn qvol_layer_structure() {
        let n = 9;
        let depth = 4;
        let c = gen_qvol(n, depth, 7).unwrap();
        let per_layer = (n / 2) * 11;
        assert_eq!(c.num_gates(), depth * per_layer);
        assert_eq!(c.num_two_qubit_gates(), depth * (n / 2) * 3);
        // Within one layer the pairs are disjoint.
        for layer in c.gates().chunks_exact(per_layer) {
            let mut used = [0u8; 9];
            for g in layer.iter().filter(|g| g.kind() == GateKind::Two) {
                for &q in g.qubits() {
                    used[q] += 1;
                }
            }
            for &u in used.iter() {
                assert!(u == 0 || u == 3, "qubit used {u} times in layer");
            }
        }
        assert!(gen_qvol(1, 1, 0).is_err());
    }
}
