//! Timing of inter-core teleportations and round-based scheduling of
//! transfers over the interconnect's parallel links.
//!
//! Teleporting one qubit across one link takes four stages: EPR pair
//! generation, the local pre-processing circuit (CNOT, H, measure), the
//! classical transmission of the measurement outcomes plus routing header,
//! and the receiver's post-processing corrections (conditional X/Z and a
//! SWAP into a computation qubit). Quantum stage durations scale with
//! `delta_time`; the classical network does not.
//!
//! A multi-hop transfer repeats the full teleportation per hop. Hops of one
//! boundary are scheduled in synchronous rounds: each round every link
//! forwards at most one queued hop per parallel link, and contended links go
//! to the transfer with the most remaining hops (ties to the lower qubit
//! index).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, SlicedCircuit};
use crate::mapper::Transfer;
use crate::topology::CoreGraph;

/// Gate and network timing. Durations in nanoseconds, frequency in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingParams {
    pub t_1q_ns: f64,
    pub t_2q_ns: f64,
    pub t_meas_ns: f64,
    /// EPR pair generation across one link.
    pub t_epr_ns: f64,
    /// Classical network clock.
    pub clock_freq_hz: f64,
    /// Parallel bits per classical network cycle.
    pub link_width_bits: u32,
    /// Division factor on every quantum duration (gate times and EPR
    /// generation). Classical timing is untouched.
    pub delta_time: f64,
}

impl Default for TimingParams {
    fn default() -> TimingParams {
        TimingParams {
            t_1q_ns: 7.9,
            t_2q_ns: 30.0,
            t_meas_ns: 40.0,
            t_epr_ns: 130.0,
            clock_freq_hz: 200e6,
            link_width_bits: 10,
            delta_time: 1.0,
        }
    }
}

/// Bits of a teleportation packet for a system of `num_physical_qubits`:
/// two measurement outcomes plus source and destination qubit addresses.
pub fn packet_size_bits(num_physical_qubits: usize) -> u32 {
    assert!(num_physical_qubits >= 2, "need at least two physical qubits");
    2 * num_physical_qubits.next_power_of_two().trailing_zeros() + 2
}

/// Network latency for `bits`: one cycle each for routing and arbitration,
/// plus the serialization cycles at the link width.
pub fn classical_latency_ns(bits: u32, p: &TimingParams) -> f64 {
    let cycles = 2 + bits.div_ceil(p.link_width_bits);
    // cycles / freq, in ns; keep the division exact for round frequencies.
    cycles as f64 * 1e9 / p.clock_freq_hz
}

/// Stage durations of one teleportation hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportStages {
    pub entangle_ns: f64,
    pub pre_ns: f64,
    pub classical_ns: f64,
    pub post_ns: f64,
}

impl TeleportStages {
    pub fn total_ns(&self) -> f64 {
        self.entangle_ns + self.pre_ns + self.classical_ns + self.post_ns
    }

    pub fn quantum_ns(&self) -> f64 {
        self.entangle_ns + self.pre_ns + self.post_ns
    }
}

/// Stage durations for a packet of `bits`, with quantum parts scaled by
/// `delta_time`.
pub fn teleport_stages_for_bits(bits: u32, p: &TimingParams) -> TeleportStages {
    let d = p.delta_time;
    TeleportStages {
        entangle_ns: p.t_epr_ns / d,
        // Sender: CNOT, Hadamard, measurement of both qubits in parallel.
        pre_ns: (p.t_2q_ns + p.t_1q_ns + p.t_meas_ns) / d,
        classical_ns: classical_latency_ns(bits, p),
        // Receiver: conditional X and Z, then a SWAP (three CNOTs) into a
        // computation qubit.
        post_ns: (2.0 * p.t_1q_ns + 3.0 * p.t_2q_ns) / d,
    }
}

pub fn teleport_stages(num_physical_qubits: usize, p: &TimingParams) -> TeleportStages {
    teleport_stages_for_bits(packet_size_bits(num_physical_qubits), p)
}

/// Duration of each timeslice: the longest gate in it, `delta_time` applied.
pub fn slice_durations_ns(sc: &SlicedCircuit, p: &TimingParams) -> Vec<f64> {
    (0..sc.num_slices())
        .map(|k| {
            sc.slice_gates(k)
                .map(|g| match g.kind() {
                    GateKind::Single => p.t_1q_ns,
                    GateKind::Two => p.t_2q_ns,
                    GateKind::Measure => p.t_meas_ns,
                })
                .fold(0.0f64, f64::max)
                / p.delta_time
        })
        .collect()
}

/// A link instance on an edge: `slot` counts the parallel links `0..l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QLinkId {
    pub edge: usize,
    pub slot: usize,
}

/// One hop of one transfer over one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopEvent {
    /// Index into the transfer list handed to [`schedule`].
    pub transfer: usize,
    pub qubit: usize,
    pub boundary: usize,
    pub src_core: usize,
    pub dst_core: usize,
    pub link: QLinkId,
    pub start_ns: f64,
    pub end_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryStats {
    pub boundary: usize,
    pub transfers: usize,
    pub hops: usize,
    /// Synchronous rounds needed at this boundary.
    pub rounds: usize,
    pub start_ns: f64,
    pub duration_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleResult {
    pub events: Vec<HopEvent>,
    pub boundaries: Vec<BoundaryStats>,
    /// Total quantum computation time: the sum of slice durations.
    pub computation_ns: f64,
    /// Computation plus all boundary communication.
    pub makespan_ns: f64,
    /// Total hops over all transfers.
    pub total_tlp: u64,
    /// Sum over boundaries of the rounds actually needed; what the hop
    /// count becomes once parallel links absorb concurrent traffic.
    pub sequential_tlp: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    BoundaryOutOfRange { boundary: usize, num_boundaries: usize },
    CoreOutOfRange { core: usize },
    EmptyTransfer { qubit: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::BoundaryOutOfRange { boundary, num_boundaries } => {
                write!(f, "transfer at boundary {boundary} but circuit has {num_boundaries}")
            }
            SimError::CoreOutOfRange { core } => write!(f, "core {core} outside the topology"),
            SimError::EmptyTransfer { qubit } => {
                write!(f, "transfer of qubit {qubit} between identical cores")
            }
        }
    }
}

impl core::error::Error for SimError {}

/// Schedules `transfers` between the slices whose durations are
/// `slice_times_ns`, over the links of `g`.
///
/// Every hop of a boundary takes the same time (the full teleport stage
/// sum), so the boundary runs in synchronous rounds. A round grants each
/// edge up to `parallel_links` waiting hops, highest remaining hop count
/// first, qubit index breaking ties.
pub fn schedule(
    transfers: &[Transfer],
    g: &CoreGraph,
    p: &TimingParams,
    slice_times_ns: &[f64],
) -> Result<ScheduleResult, SimError> {
    let num_boundaries = slice_times_ns.len().saturating_sub(1);
    let hop_ns = teleport_stages(g.total_physical_qubits(), p).total_ns();

    // Transfer indices per boundary, preserving input order.
    let mut by_boundary: Vec<Vec<usize>> = vec![Vec::new(); num_boundaries];
    for (i, t) in transfers.iter().enumerate() {
        if t.boundary >= num_boundaries {
            return Err(SimError::BoundaryOutOfRange {
                boundary: t.boundary,
                num_boundaries,
            });
        }
        for &c in &[t.src_core, t.dst_core] {
            if c >= g.num_cores() {
                return Err(SimError::CoreOutOfRange { core: c });
            }
        }
        if t.src_core == t.dst_core {
            return Err(SimError::EmptyTransfer { qubit: t.qubit });
        }
        by_boundary[t.boundary].push(i);
    }

    let links = g.parallel_links();
    let mut events: Vec<HopEvent> = Vec::new();
    let mut boundaries: Vec<BoundaryStats> = Vec::with_capacity(num_boundaries);
    let mut total_tlp = 0u64;
    let mut sequential_tlp = 0u64;
    let mut clock = slice_times_ns.first().copied().unwrap_or(0.0);
    let computation_ns: f64 = slice_times_ns.iter().sum();

    struct Active {
        transfer: usize,
        path: Vec<usize>,
        pos: usize,
    }

    let mut edge_queue: Vec<Vec<usize>> = vec![Vec::new(); g.edges().len()];
    for b in 0..num_boundaries {
        let mut active: Vec<Active> = Vec::with_capacity(by_boundary[b].len());
        for &i in &by_boundary[b] {
            let t = &transfers[i];
            let path = g
                .route(t.src_core, t.dst_core)
                .expect("validated transfer endpoints route");
            total_tlp += (path.len() - 1) as u64;
            active.push(Active { transfer: i, path, pos: 0 });
        }
        let num_transfers = active.len();
        let mut hops = 0usize;
        let mut rounds = 0usize;
        let mut in_flight = num_transfers;

        while in_flight > 0 {
            // Queue every unfinished transfer at its next edge.
            for (a_idx, a) in active.iter().enumerate() {
                if a.pos + 1 < a.path.len() {
                    let e = g
                        .edge_index(a.path[a.pos], a.path[a.pos + 1])
                        .expect("route follows edges");
                    edge_queue[e].push(a_idx);
                }
            }
            let start = clock + rounds as f64 * hop_ns;
            let end = start + hop_ns;
            for (e, queue) in edge_queue.iter_mut().enumerate() {
                if queue.is_empty() {
                    continue;
                }
                queue.sort_by_key(|&a_idx| {
                    let a = &active[a_idx];
                    let remaining = a.path.len() - 1 - a.pos;
                    (core::cmp::Reverse(remaining), transfers[a.transfer].qubit)
                });
                for (slot, &a_idx) in queue.iter().take(links).enumerate() {
                    let a = &mut active[a_idx];
                    let t = &transfers[a.transfer];
                    events.push(HopEvent {
                        transfer: a.transfer,
                        qubit: t.qubit,
                        boundary: b,
                        src_core: a.path[a.pos],
                        dst_core: a.path[a.pos + 1],
                        link: QLinkId { edge: e, slot },
                        start_ns: start,
                        end_ns: end,
                    });
                    a.pos += 1;
                    hops += 1;
                    if a.pos == a.path.len() - 1 {
                        in_flight -= 1;
                    }
                }
                queue.clear();
            }
            rounds += 1;
        }

        let duration = rounds as f64 * hop_ns;
        boundaries.push(BoundaryStats {
            boundary: b,
            transfers: num_transfers,
            hops,
            rounds,
            start_ns: clock,
            duration_ns: duration,
        });
        sequential_tlp += rounds as u64;
        clock += duration + slice_times_ns[b + 1];
    }

    Ok(ScheduleResult {
        events,
        boundaries,
        computation_ns,
        makespan_ns: clock,
        total_tlp,
        sequential_tlp,
    })
}

/// Re-derives `(total_tlp, sequential_tlp, makespan_ns)` from the event
/// list and boundary stats of `r`, independent of the stored counters.
pub fn count_stats(r: &ScheduleResult) -> (u64, u64, f64) {
    let total = r.events.len() as u64;
    let mut sequential = 0u64;
    let mut comm = 0.0f64;
    for b in &r.boundaries {
        let mut starts: Vec<u64> = r
            .events
            .iter()
            .filter(|e| e.boundary == b.boundary)
            .map(|e| e.start_ns.to_bits())
            .collect();
        starts.sort_unstable();
        starts.dedup();
        sequential += starts.len() as u64;
        comm += r
            .events
            .iter()
            .filter(|e| e.boundary == b.boundary)
            .map(|e| e.end_ns)
            .fold(b.start_ns, f64::max)
            - b.start_ns;
    }
    (total, sequential, r.computation_ns + comm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyKind;

    fn t(qubit: usize, src: usize, dst: usize, boundary: usize) -> Transfer {
        Transfer { qubit, src_core: src, dst_core: dst, boundary }
    }

    #[test]
    fn packet_sizes() {
        assert_eq!(packet_size_bits(2), 4);
        assert_eq!(packet_size_bits(320), 20);
        assert_eq!(packet_size_bits(1024), 22);
        assert_eq!(packet_size_bits(1 << 20), 42);
        assert_eq!(packet_size_bits((1 << 20) + 1), 44);
    }

    #[test]
    fn classical_latency_examples() {
        // 2^20 physical qubits, width 10, 100 MHz: 42 bits -> 5 cycles
        // serialization + 2 overhead = 7 cycles = 70 ns.
        let p = TimingParams {
            clock_freq_hz: 100e6,
            link_width_bits: 10,
            ..TimingParams::default()
        };
        assert_eq!(classical_latency_ns(packet_size_bits(1 << 20), &p), 70.0);
        // 320 qubits, width 10, 200 MHz: 20 bits -> 2 + 2 = 4 cycles = 20 ns.
        let p = TimingParams { clock_freq_hz: 200e6, ..p };
        assert_eq!(classical_latency_ns(packet_size_bits(320), &p), 20.0);
    }

    #[test]
    fn stage_durations_at_defaults() {
        let p = TimingParams { clock_freq_hz: 100e6, ..TimingParams::default() };
        let s = teleport_stages(1 << 20, &p);
        assert_eq!(s.entangle_ns, 130.0);
        assert!((s.pre_ns - 77.9).abs() < 1e-12);
        assert!((s.post_ns - 105.8).abs() < 1e-12);
        assert_eq!(s.classical_ns, 70.0);
        assert!((s.quantum_ns() - 313.7).abs() < 1e-12);
        assert!((s.total_ns() - 383.7).abs() < 1e-12);
    }

    #[test]
    fn delta_time_scales_quantum_stages_only() {
        let p = TimingParams { delta_time: 100.0, ..TimingParams::default() };
        let s = teleport_stages(320, &p);
        assert!((s.entangle_ns - 1.3).abs() < 1e-12);
        assert!((s.pre_ns - 0.779).abs() < 1e-12);
        assert!((s.post_ns - 1.058).abs() < 1e-12);
        assert_eq!(s.classical_ns, 20.0);
    }

    #[test]
    fn slice_durations_take_slowest_gate() {
        use crate::circuit::{slice_circuit, Circuit, Gate};
        let c = Circuit::with_gates(
            "t",
            3,
            alloc::vec![Gate::h(0), Gate::cx(1, 2), Gate::measure(0), Gate::h(1)],
        )
        .unwrap();
        let sc = slice_circuit(c);
        let p = TimingParams::default();
        assert_eq!(slice_durations_ns(&sc, &p), alloc::vec![30.0, 40.0]);
        let p = TimingParams { delta_time: 10.0, ..p };
        assert_eq!(slice_durations_ns(&sc, &p), alloc::vec![3.0, 4.0]);
    }

    fn line(cores: usize, links: usize) -> CoreGraph {
        CoreGraph::build(TopologyKind::Line, cores, links, 64).unwrap()
    }

    #[test]
    fn single_transfer_single_hop() {
        let g = line(2, 1);
        let p = TimingParams::default();
        let hop = teleport_stages(g.total_physical_qubits(), &p).total_ns();
        let r = schedule(&[t(0, 0, 1, 0)], &g, &p, &[10.0, 20.0]).unwrap();
        assert_eq!(r.events.len(), 1);
        assert_eq!(r.events[0].start_ns, 10.0);
        assert_eq!(r.events[0].end_ns, 10.0 + hop);
        assert_eq!(r.total_tlp, 1);
        assert_eq!(r.sequential_tlp, 1);
        assert_eq!(r.computation_ns, 30.0);
        assert!((r.makespan_ns - (30.0 + hop)).abs() < 1e-9);
        assert_eq!(r.boundaries[0].rounds, 1);
    }

    #[test]
    fn contention_serializes_on_one_link() {
        // Two transfers over the same edge, one link: two rounds.
        let g = line(2, 1);
        let p = TimingParams::default();
        let r = schedule(&[t(0, 0, 1, 0), t(1, 0, 1, 0)], &g, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(r.total_tlp, 2);
        assert_eq!(r.sequential_tlp, 2);
        assert_eq!(r.boundaries[0].rounds, 2);
        // Lower qubit index goes first on equal remaining hops.
        assert_eq!(r.events[0].qubit, 0);
        assert_eq!(r.events[1].qubit, 1);
        assert!(r.events[1].start_ns > r.events[0].start_ns);
    }

    #[test]
    fn parallel_links_absorb_contention() {
        let g = line(2, 2);
        let p = TimingParams::default();
        let r = schedule(&[t(0, 0, 1, 0), t(1, 0, 1, 0)], &g, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(r.sequential_tlp, 1);
        assert_eq!(r.boundaries[0].rounds, 1);
        assert_eq!(r.events[0].link, QLinkId { edge: 0, slot: 0 });
        assert_eq!(r.events[1].link, QLinkId { edge: 0, slot: 1 });
        assert_eq!(r.events[0].start_ns, r.events[1].start_ns);
    }

    #[test]
    fn disjoint_edges_share_a_round() {
        // 0->1 and 2->3 on a 4-core line: different edges, same round.
        let g = line(4, 1);
        let p = TimingParams::default();
        let r = schedule(&[t(0, 0, 1, 0), t(1, 2, 3, 0)], &g, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(r.total_tlp, 2);
        assert_eq!(r.sequential_tlp, 1);
    }

    #[test]
    fn longest_remaining_path_wins_arbitration() {
        // Transfer A: 0 -> 3 (3 hops), transfer B: 0 -> 1 (1 hop); A has
        // the higher qubit index but more remaining hops, so A goes first.
        let g = line(4, 1);
        let p = TimingParams::default();
        let r = schedule(&[t(5, 0, 1, 0), t(9, 0, 3, 0)], &g, &p, &[0.0, 0.0]).unwrap();
        let first = r.events.iter().find(|e| e.start_ns == 0.0).unwrap();
        assert_eq!(first.qubit, 9);
        // B slides into round 1 next to A's second hop: 3 rounds total.
        assert_eq!(r.boundaries[0].rounds, 3);
        assert_eq!(r.total_tlp, 4);
    }

    #[test]
    fn multi_hop_transfer_repeats_stages() {
        let g = line(4, 1);
        let p = TimingParams::default();
        let hop = teleport_stages(g.total_physical_qubits(), &p).total_ns();
        let r = schedule(&[t(0, 0, 3, 0)], &g, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(r.events.len(), 3);
        for (k, e) in r.events.iter().enumerate() {
            assert!((e.start_ns - k as f64 * hop).abs() < 1e-9);
            assert_eq!(e.src_core, k);
            assert_eq!(e.dst_core, k + 1);
        }
        assert!((r.makespan_ns - 3.0 * hop).abs() < 1e-9);
    }

    #[test]
    fn boundaries_accumulate_into_makespan() {
        let g = line(3, 1);
        let p = TimingParams::default();
        let hop = teleport_stages(g.total_physical_qubits(), &p).total_ns();
        let slice_times = [5.0, 7.0, 9.0];
        let transfers = [t(0, 0, 1, 0), t(1, 2, 0, 1)];
        let r = schedule(&transfers, &g, &p, &slice_times).unwrap();
        assert_eq!(r.computation_ns, 21.0);
        // boundary 0: 1 round; boundary 1: 2 rounds (2 hops, same direction).
        assert_eq!(r.boundaries[0].rounds, 1);
        assert_eq!(r.boundaries[1].rounds, 2);
        assert!((r.makespan_ns - (21.0 + 3.0 * hop)).abs() < 1e-9);
        // Second boundary starts after slice 1 and the first boundary.
        assert!((r.boundaries[1].start_ns - (5.0 + hop + 7.0)).abs() < 1e-9);
    }

    #[test]
    fn no_transfers_is_pure_computation() {
        let g = line(3, 1);
        let p = TimingParams::default();
        let r = schedule(&[], &g, &p, &[5.0, 7.0, 9.0]).unwrap();
        assert_eq!(r.total_tlp, 0);
        assert_eq!(r.sequential_tlp, 0);
        assert_eq!(r.makespan_ns, 21.0);
        assert!(r.events.is_empty());
    }

    #[test]
    fn count_stats_matches_stored_counters() {
        let g = line(4, 2);
        let p = TimingParams::default();
        let transfers = [
            t(0, 0, 3, 0),
            t(1, 0, 1, 0),
            t(2, 3, 1, 0),
            t(3, 1, 2, 1),
            t(4, 2, 1, 1),
        ];
        let r = schedule(&transfers, &g, &p, &[1.0, 2.0, 3.0]).unwrap();
        let (total, seq, makespan) = count_stats(&r);
        assert_eq!(total, r.total_tlp);
        assert_eq!(seq, r.sequential_tlp);
        assert!((makespan - r.makespan_ns).abs() < 1e-9);
    }

    #[test]
    fn schedule_rejects_bad_transfers() {
        let g = line(3, 1);
        let p = TimingParams::default();
        assert!(matches!(
            schedule(&[t(0, 0, 1, 5)], &g, &p, &[1.0, 1.0]),
            Err(SimError::BoundaryOutOfRange { boundary: 5, num_boundaries: 1 })
        ));
        assert!(matches!(
            schedule(&[t(0, 0, 7, 0)], &g, &p, &[1.0, 1.0]),
            Err(SimError::CoreOutOfRange { core: 7 })
        ));
        assert!(matches!(
            schedule(&[t(3, 1, 1, 0)], &g, &p, &[1.0, 1.0]),
            Err(SimError::EmptyTransfer { qubit: 3 })
        ));
    }

    #[test]
    fn more_links_never_need_more_rounds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let p = TimingParams::default();
        for kind in [TopologyKind::Line, TopologyKind::Ring, TopologyKind::Grid] {
            for _ in 0..40 {
                let n = rng.gen_range(kind.min_size().max(3)..10);
                let transfers: Vec<Transfer> = (0..rng.gen_range(1..25))
                    .map(|q| {
                        let src = rng.gen_range(0..n);
                        let mut dst = rng.gen_range(0..n);
                        while dst == src {
                            dst = rng.gen_range(0..n);
                        }
                        t(q, src, dst, 0)
                    })
                    .collect();
                let mut prev = u64::MAX;
                for links in 1..=5 {
                    let g = CoreGraph::build(kind, n, links, 64).unwrap();
                    let r = schedule(&transfers, &g, &p, &[0.0, 0.0]).unwrap();
                    assert!(
                        r.sequential_tlp <= prev,
                        "{kind} n={n} links={links}: {} > {prev}",
                        r.sequential_tlp
                    );
                    assert!(r.sequential_tlp <= r.total_tlp);
                    prev = r.sequential_tlp;
                }
            }
        }
    }

    #[test]
    fn rounds_meet_pigeonhole_bound() {
        // k transfers over one edge with l links need ceil(k/l) rounds.
        let p = TimingParams::default();
        for l in 1..=5usize {
            for k in 1..=11usize {
                let g = line(2, l);
                let transfers: Vec<Transfer> = (0..k).map(|q| t(q, 0, 1, 0)).collect();
                let r = schedule(&transfers, &g, &p, &[0.0, 0.0]).unwrap();
                assert_eq!(r.sequential_tlp as usize, k.div_ceil(l), "k={k} l={l}");
            }
        }
    }
}
