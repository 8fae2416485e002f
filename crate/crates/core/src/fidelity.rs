//! Fidelity estimation: decoherence over the schedule makespan combined
//! with per-operation error rates.
//!
//! Decoherence follows the standard relaxation/dephasing envelope
//!
//! ```text
//! C(t) = exp(-t/T1) * (exp(-t/T2) / 2 + 1/2)
//! ```
//!
//! and the operational part multiplies `(1 - e)` once per executed
//! operation, teleportation overhead included. The overall estimate is the
//! product of both: a closed-form score, not a density-matrix simulation.
//! It tracks how fidelity ranks and trends across configurations rather
//! than absolute hardware numbers.

use core::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::netsim::{ScheduleResult, TimingParams};

/// Error rates and coherence times. Times in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub e_1q: f64,
    pub e_2q: f64,
    pub e_meas: f64,
    pub e_epr: f64,
    pub t1_ns: f64,
    pub t2_ns: f64,
    /// Division factor on every error rate. Coherence times are untouched.
    pub delta_improv: f64,
}

impl Default for NoiseParams {
    fn default() -> NoiseParams {
        NoiseParams {
            e_1q: 7.42e-5,
            e_2q: 7e-4,
            e_meas: 1.67e-4,
            e_epr: 9e-3,
            t1_ns: 1.2e6,
            t2_ns: 1.16e6,
            delta_improv: 1.0,
        }
    }
}

/// Coherence envelope after `t_ns` of idling. `t_ns` must be non-negative.
pub fn coherence(t_ns: f64, t1_ns: f64, t2_ns: f64) -> f64 {
    assert!(t_ns >= 0.0, "negative idle time {t_ns}");
    libm::exp(-t_ns / t1_ns) * (0.5 * libm::exp(-t_ns / t2_ns) + 0.5)
}

/// Operation tallies for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationCounts {
    pub one_q: u64,
    pub two_q: u64,
    pub meas: u64,
    pub epr: u64,
}

impl OperationCounts {
    pub fn from_circuit(c: &Circuit) -> OperationCounts {
        let mut counts = OperationCounts::default();
        for g in c.gates() {
            match g.kind() {
                GateKind::Single => counts.one_q += 1,
                GateKind::Two => counts.two_q += 1,
                GateKind::Measure => counts.meas += 1,
            }
        }
        counts
    }

    /// Operations added by `hops` single-hop teleportations: per hop one
    /// EPR pair, the sender CNOT + H and two measurements, and the
    /// receiver's conditional X/Z plus a three-CNOT SWAP.
    pub fn teleport_overhead(hops: u64) -> OperationCounts {
        OperationCounts {
            one_q: 3 * hops,
            two_q: 4 * hops,
            meas: 2 * hops,
            epr: hops,
        }
    }

    pub fn total(&self) -> u64 {
        self.one_q + self.two_q + self.meas + self.epr
    }
}

impl Add for OperationCounts {
    type Output = OperationCounts;

    fn add(self, rhs: OperationCounts) -> OperationCounts {
        OperationCounts {
            one_q: self.one_q + rhs.one_q,
            two_q: self.two_q + rhs.two_q,
            meas: self.meas + rhs.meas,
            epr: self.epr + rhs.epr,
        }
    }
}

impl AddAssign for OperationCounts {
    fn add_assign(&mut self, rhs: OperationCounts) {
        *self = *self + rhs;
    }
}

/// Product of per-operation success probabilities, error rates divided by
/// `delta_improv`.
pub fn operational_fidelity(counts: &OperationCounts, np: &NoiseParams) -> f64 {
    let d = np.delta_improv;
    libm::pow(1.0 - np.e_1q / d, counts.one_q as f64)
        * libm::pow(1.0 - np.e_2q / d, counts.two_q as f64)
        * libm::pow(1.0 - np.e_meas / d, counts.meas as f64)
        * libm::pow(1.0 - np.e_epr / d, counts.epr as f64)
}

/// Folds an improvement factor `delta` into parameter sets: quantum
/// durations and error rates shrink by `delta`; coherence times, the
/// classical network, and the already-applied per-set factors stay as they
/// are. The returned sets carry `delta_time`/`delta_improv` of 1 so the
/// factor is not applied twice downstream.
pub fn apply_improvement(
    tp: &TimingParams,
    np: &NoiseParams,
    delta: f64,
) -> (TimingParams, NoiseParams) {
    assert!(delta > 0.0, "improvement factor must be positive");
    let tp_out = TimingParams {
        t_1q_ns: tp.t_1q_ns / delta,
        t_2q_ns: tp.t_2q_ns / delta,
        t_meas_ns: tp.t_meas_ns / delta,
        t_epr_ns: tp.t_epr_ns / delta,
        clock_freq_hz: tp.clock_freq_hz,
        link_width_bits: tp.link_width_bits,
        delta_time: 1.0,
    };
    let np_out = NoiseParams {
        e_1q: np.e_1q / delta,
        e_2q: np.e_2q / delta,
        e_meas: np.e_meas / delta,
        e_epr: np.e_epr / delta,
        t1_ns: np.t1_ns,
        t2_ns: np.t2_ns,
        delta_improv: 1.0,
    };
    (tp_out, np_out)
}

/// Fidelity estimate for one scheduled run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub coherence: f64,
    pub operational: f64,
    pub overall: f64,
    pub makespan_ns: f64,
    pub counts: OperationCounts,
}

pub fn estimate(
    sr: &ScheduleResult,
    counts: &OperationCounts,
    np: &NoiseParams,
) -> FidelityReport {
    let c = coherence(sr.makespan_ns, np.t1_ns, np.t2_ns);
    let o = operational_fidelity(counts, np);
    FidelityReport {
        coherence: c,
        operational: o,
        overall: c * o,
        makespan_ns: sr.makespan_ns,
        counts: *counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gen_cuccaro;

    #[test]
    fn coherence_boundary_values() {
        assert_eq!(coherence(0.0, 1.2e6, 1.16e6), 1.0);
        // At t = T1 = T2: e^-1 * (e^-1/2 + 1/2).
        let c = coherence(1.0, 1.0, 1.0);
        let e1 = libm::exp(-1.0);
        assert!((c - e1 * (0.5 * e1 + 0.5)).abs() < 1e-15);
        // Around T1 with the default pair: roughly a quarter survives.
        let c = coherence(1.2e6, 1.2e6, 1.16e6);
        assert!((c - 0.2493).abs() < 5e-4, "{c}");
    }

    #[test]
    fn coherence_is_monotone() {
        let mut prev = coherence(0.0, 1.2e6, 1.16e6);
        for k in 1..=100 {
            let c = coherence(k as f64 * 1e4, 1.2e6, 1.16e6);
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    #[should_panic(expected = "negative idle time")]
    fn coherence_rejects_negative_time() {
        coherence(-1.0, 1.0, 1.0);
    }

    #[test]
    fn counts_from_circuit() {
        let c = gen_cuccaro(2).unwrap();
        let counts = OperationCounts::from_circuit(&c);
        assert_eq!(counts.two_q, 33);
        assert_eq!(counts.one_q, 36);
        assert_eq!(counts.meas, 0);
        assert_eq!(counts.epr, 0);
        assert_eq!(counts.total(), 69);
    }

    #[test]
    fn teleport_overhead_per_hop() {
        let o = OperationCounts::teleport_overhead(1);
        assert_eq!(o, OperationCounts { one_q: 3, two_q: 4, meas: 2, epr: 1 });
        let o = OperationCounts::teleport_overhead(10);
        assert_eq!(o.epr, 10);
        assert_eq!(o.total(), 100);
    }

    #[test]
    fn operational_fidelity_values() {
        let np = NoiseParams::default();
        let c = OperationCounts { epr: 1, ..OperationCounts::default() };
        assert_eq!(operational_fidelity(&c, &np), 1.0 - 9e-3);
        let c = OperationCounts { two_q: 1000, ..OperationCounts::default() };
        let f = operational_fidelity(&c, &np);
        assert!((f - 0.49646).abs() < 1e-4, "{f}");
        assert_eq!(operational_fidelity(&OperationCounts::default(), &np), 1.0);
    }

    #[test]
    fn improvement_divides_rates_not_coherence() {
        let tp = TimingParams::default();
        let np = NoiseParams::default();
        let (tp2, np2) = apply_improvement(&tp, &np, 10.0);
        assert_eq!(tp2.t_2q_ns, 3.0);
        assert_eq!(tp2.t_epr_ns, 13.0);
        assert_eq!(tp2.clock_freq_hz, tp.clock_freq_hz);
        assert_eq!(tp2.link_width_bits, tp.link_width_bits);
        assert_eq!(np2.e_2q, 7e-5);
        assert_eq!(np2.t1_ns, np.t1_ns);
        assert_eq!(np2.t2_ns, np.t2_ns);
        assert_eq!(tp2.delta_time, 1.0);
        assert_eq!(np2.delta_improv, 1.0);
    }

    #[test]
    fn delta_improv_acts_like_pre_divided_rates() {
        let np = NoiseParams { delta_improv: 100.0, ..NoiseParams::default() };
        let (_, np_folded) = apply_improvement(
            &TimingParams::default(),
            &NoiseParams::default(),
            100.0,
        );
        let counts = OperationCounts { one_q: 11, two_q: 7, meas: 3, epr: 2 };
        let a = operational_fidelity(&counts, &np);
        let b = operational_fidelity(&counts, &np_folded);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn estimate_combines_both_terms() {
        use crate::topology::{CoreGraph, TopologyKind};
        let g = CoreGraph::build(TopologyKind::Line, 2, 1, 64).unwrap();
        let tp = TimingParams::default();
        let np = NoiseParams::default();
        let tr = crate::mapper::Transfer { qubit: 0, src_core: 0, dst_core: 1, boundary: 0 };
        let sr = crate::netsim::schedule(&[tr], &g, &tp, &[100.0, 50.0]).unwrap();
        let counts = OperationCounts { one_q: 5, two_q: 2, meas: 0, epr: 0 }
            + OperationCounts::teleport_overhead(sr.total_tlp);
        let rep = estimate(&sr, &counts, &np);
        assert_eq!(rep.makespan_ns, sr.makespan_ns);
        assert!((rep.overall - rep.coherence * rep.operational).abs() < 1e-15);
        assert!(rep.coherence < 1.0 && rep.coherence > 0.999);
        assert_eq!(rep.counts.epr, 1);
    }
}
