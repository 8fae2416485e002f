//! When does the classical network become the slow part of a teleportation?
//!
//! The classical stage of a hop grows with the packet size, which grows
//! logarithmically with the number of physical qubits, while the quantum
//! stages are size independent. This module finds the system size at which
//! the classical latency first exceeds the combined quantum stage time.

use alloc::vec::Vec;

use serde::Serialize;

use crate::netsim::{teleport_stages_for_bits, TimingParams};

/// Cap on the searched exponent: system sizes up to `2^MAX_LOG2_QUBITS`.
pub const MAX_LOG2_QUBITS: u32 = 128;

/// Smallest `k` such that a system of `2^k` physical qubits has a classical
/// stage longer than the quantum stages of one hop, or `None` when even
/// `2^MAX_LOG2_QUBITS` qubits leave the classical network faster.
///
/// A system of `2^k` qubits uses `2k + 2` packet bits. Latency is monotone
/// in `k`, so the first hit is the threshold.
pub fn bottleneck_log2_qubits(p: &TimingParams) -> Option<u32> {
    (1..=MAX_LOG2_QUBITS).find(|&k| {
        let s = teleport_stages_for_bits(2 * k + 2, p);
        s.classical_ns > s.quantum_ns()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BottleneckRow {
    pub link_width_bits: u32,
    pub clock_freq_hz: f64,
    pub delta_time: f64,
    /// `log2` of the threshold system size; `None` when the classical
    /// network never dominates below the cap.
    pub threshold_log2_qubits: Option<u32>,
}

/// Threshold for every `(width, frequency, delta_time)` combination, in the
/// given order.
pub fn sweep_bottleneck(
    widths: &[u32],
    freqs_hz: &[f64],
    deltas: &[f64],
    base: &TimingParams,
) -> Vec<BottleneckRow> {
    let mut rows = Vec::with_capacity(widths.len() * freqs_hz.len() * deltas.len());
    for &w in widths {
        for &f in freqs_hz {
            for &d in deltas {
                let p = TimingParams {
                    link_width_bits: w,
                    clock_freq_hz: f,
                    delta_time: d,
                    ..*base
                };
                rows.push(BottleneckRow {
                    link_width_bits: w,
                    clock_freq_hz: f,
                    delta_time: d,
                    threshold_log2_qubits: bottleneck_log2_qubits(&p),
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(width: u32, freq_hz: f64, delta: f64) -> TimingParams {
        TimingParams {
            link_width_bits: width,
            clock_freq_hz: freq_hz,
            delta_time: delta,
            ..TimingParams::default()
        }
    }

    #[test]
    fn narrow_slow_network_chokes_immediately() {
        // Width 1 at 10 MHz: 4 bits .. takes (2+4) cycles = 600 ns > 313.7.
        assert_eq!(bottleneck_log2_qubits(&params(1, 10e6, 1.0)), Some(1));
    }

    #[test]
    fn generous_network_never_chokes() {
        // Width 15 at 1 GHz: even 2^128 qubits need only 2*128+2 bits,
        // ceil(258/15) + 2 = 20 cycles = 20 ns << 313.7 ns.
        assert_eq!(bottleneck_log2_qubits(&params(15, 1e9, 1.0)), None);
    }

    #[test]
    fn million_qubit_example() {
        // At width 10, 100 MHz a 2^20-qubit system pays 70 ns classical vs
        // 313.7 ns quantum: no bottleneck at that size. The threshold needs
        // 2 + ceil((2k+2)/10) cycles of 10 ns to top 313.7 ns, i.e.
        // 2k+2 > 290, and k = 145 lies beyond the search cap.
        let p = params(10, 100e6, 1.0);
        let s = teleport_stages_for_bits(42, &p);
        assert!(s.classical_ns < s.quantum_ns());
        assert_eq!(bottleneck_log2_qubits(&p), None);
    }

    #[test]
    fn faster_quantum_side_lowers_the_threshold() {
        // delta_time shrinks the quantum stages, so the classical side
        // dominates earlier.
        let base = bottleneck_log2_qubits(&params(10, 100e6, 1.0));
        let sped = bottleneck_log2_qubits(&params(10, 100e6, 100.0));
        match (base, sped) {
            (None, Some(_)) => {}
            (Some(b), Some(s)) => assert!(s <= b),
            other => panic!("speedup must not raise the threshold: {other:?}"),
        }
        assert_eq!(sped, Some(1));
    }

    #[test]
    fn threshold_monotone_in_width_and_freq() {
        let freqs = [10e6, 50e6, 100e6, 500e6, 1e9];
        let widths = [1u32, 2, 5, 10, 15];
        let rank = |r: Option<u32>| r.map_or(u64::MAX, |k| k as u64);
        for &w in &widths {
            let mut prev = None;
            for &f in &freqs {
                let cur = bottleneck_log2_qubits(&params(w, f, 1.0));
                if let Some(p) = prev {
                    assert!(rank(cur) >= rank(p), "w={w} f={f}");
                }
                prev = Some(cur);
            }
        }
        for &f in &freqs {
            let mut prev = None;
            for &w in &widths {
                let cur = bottleneck_log2_qubits(&params(w, f, 1.0));
                if let Some(p) = prev {
                    assert!(rank(cur) >= rank(p), "w={w} f={f}");
                }
                prev = Some(cur);
            }
        }
    }

    #[test]
    fn sweep_covers_grid_in_order() {
        let base = TimingParams::default();
        let rows = sweep_bottleneck(&[1, 10], &[10e6, 1e9], &[1.0], &base);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].link_width_bits, 1);
        assert_eq!(rows[0].clock_freq_hz, 10e6);
        assert_eq!(rows[3].link_width_bits, 10);
        assert_eq!(rows[3].clock_freq_hz, 1e9);
        assert_eq!(rows[0].threshold_log2_qubits, Some(1));
    }
}
