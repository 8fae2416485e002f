//! Placement of virtual qubits onto cores, one assignment problem per
//! timeslice.
//!
//! For every slice each virtual qubit gets a core, subject to per-core
//! computation capacity, so that the operands of every two-qubit gate in the
//! slice share a core. Costs count the inter-core hops a unit must travel
//! from where its qubits sat in the previous slice, so the solver trades
//! fresh teleportations against keeping qubits where they are.
//!
//! Each slice runs two assignment passes:
//!
//! 1. gate pass: one row per two-qubit gate of the slice, one column per
//!    *pair slot* (a core repeated once per two free qubits);
//! 2. filler pass: one row per remaining virtual qubit, one column per
//!    remaining single slot.
//!
//! The gate pass hands its occupancy to the filler pass, so capacities hold
//! exactly. Surplus slots simply stay free; the solver covers rows only.

mod hungarian;

pub use hungarian::{solve as solve_assignment, Assignment, AssignmentError, CostMatrix};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::SlicedCircuit;
use crate::topology::CoreGraph;

/// Core index per virtual qubit within one timeslice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub slice: usize,
    /// `cores[q]` is the core of virtual qubit `q`.
    pub cores: Vec<usize>,
}

impl Placement {
    pub fn core_of(&self, qubit: usize) -> usize {
        self.cores[qubit]
    }
}

/// One qubit moving between cores at the boundary after a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub qubit: usize,
    pub src_core: usize,
    pub dst_core: usize,
    /// Boundary index `b`: the move happens between slices `b` and `b + 1`.
    pub boundary: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapError {
    /// Total computation capacity below the number of virtual qubits.
    InsufficientCapacity { required: usize, available: i64 },
    /// Some core keeps no computation qubit at all.
    DeadCore { core: usize, capacity: i64 },
    /// A slice holds more two-qubit gates than the pair slots can host.
    SlicePairOverflow { slice: usize, pairs: usize, pair_slots: usize },
    Assignment(AssignmentError),
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::InsufficientCapacity { required, available } => {
                write!(f, "{required} virtual qubits exceed total capacity {available}")
            }
            MapError::DeadCore { core, capacity } => {
                write!(f, "core {core} has computation capacity {capacity}")
            }
            MapError::SlicePairOverflow { slice, pairs, pair_slots } => {
                write!(
                    f,
                    "slice {slice} has {pairs} two-qubit gates but only {pair_slots} pair slots"
                )
            }
            MapError::Assignment(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MapError {}

impl From<AssignmentError> for MapError {
    fn from(e: AssignmentError) -> MapError {
        MapError::Assignment(e)
    }
}

/// A unit to place: either both operands of a two-qubit gate, or one
/// unpaired qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementUnit {
    Pair(usize, usize),
    Lone(usize),
}

impl PlacementUnit {
    fn width(self) -> usize {
        match self {
            PlacementUnit::Pair(..) => 2,
            PlacementUnit::Lone(_) => 1,
        }
    }
}

/// Hop cost of placing `unit` on `core`, given the previous placement:
/// the distance from each operand's previous core, or infinity when the
/// core lacks `remaining_capacity` for the unit.
pub fn op_cost(
    unit: PlacementUnit,
    core: usize,
    prev: &Placement,
    g: &CoreGraph,
    remaining_capacity: usize,
) -> f64 {
    if remaining_capacity < unit.width() {
        return f64::INFINITY;
    }
    match unit {
        PlacementUnit::Pair(a, b) => {
            (g.distance(prev.core_of(a), core) + g.distance(prev.core_of(b), core)) as f64
        }
        PlacementUnit::Lone(q) => g.distance(prev.core_of(q), core) as f64,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MapOptions {
    /// When set, adds a tiny deterministic jitter (below `1e-6` per entry)
    /// to every cost so equal-cost placements break ties differently per
    /// seed. Hop costs are integers and jitter totals stay below any real
    /// cost difference, so only tie selection changes.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingResult {
    pub placements: Vec<Placement>,
    pub transfers: Vec<Transfer>,
}

/// Maps every timeslice of `sc` onto `g`.
pub fn map_circuit(
    sc: &SlicedCircuit,
    g: &CoreGraph,
    opts: &MapOptions,
) -> Result<MappingResult, MapError> {
    let n = sc.circuit().num_qubits();
    let caps = check_capacity(g, n)?;
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);

    let mut prev = seed_placement(sc, g, &caps);
    let mut placements: Vec<Placement> = Vec::with_capacity(sc.num_slices());

    for k in 0..sc.num_slices() {
        let pairs = sc.two_qubit_pairs(k);
        if k > 0 && pairs.is_empty() {
            // Staying put costs zero for every qubit and zero cost is only
            // attained at the previous core, so the solve is a no-op.
            let mut p = prev.clone();
            p.slice = k;
            placements.push(p.clone());
            prev = p;
            continue;
        }
        let next = place_slice(k, &pairs, &prev, g, &caps, n, &mut rng)?;
        placements.push(next.clone());
        prev = next;
    }

    let transfers = extract_transfers(&placements);
    Ok(MappingResult { placements, transfers })
}

fn check_capacity(g: &CoreGraph, n: usize) -> Result<Vec<usize>, MapError> {
    let mut caps = Vec::with_capacity(g.num_cores());
    let mut total = 0i64;
    for c in 0..g.num_cores() {
        let cap = g.capacity(c);
        if cap < 1 {
            return Err(MapError::DeadCore { core: c, capacity: cap });
        }
        total += cap;
        caps.push(cap as usize);
    }
    if total < n as i64 {
        return Err(MapError::InsufficientCapacity { required: n, available: total });
    }
    Ok(caps)
}

/// Initial guess refined by the slice-0 solve: operand pairs of slice 0 go
/// round-robin over cores with room for both, remaining qubits fill free
/// slots first-fit in index order.
fn seed_placement(sc: &SlicedCircuit, g: &CoreGraph, caps: &[usize]) -> Placement {
    let n = sc.circuit().num_qubits();
    let num_cores = g.num_cores();
    let mut cores = vec![usize::MAX; n];
    let mut free = caps.to_vec();
    let mut cursor = 0usize;

    if sc.num_slices() > 0 {
        for (a, b) in sc.two_qubit_pairs(0) {
            let mut placed = false;
            for step in 0..num_cores {
                let c = (cursor + step) % num_cores;
                if free[c] >= 2 {
                    cores[a] = c;
                    cores[b] = c;
                    free[c] -= 2;
                    cursor = (c + 1) % num_cores;
                    placed = true;
                    break;
                }
            }
            if !placed {
                // No core fits a pair; leave both for the single-slot fill.
                // The slice solve reports the overflow if it is real.
                break;
            }
        }
    }
    let mut next_core = 0usize;
    for q in 0..n {
        if cores[q] != usize::MAX {
            continue;
        }
        while free[next_core] == 0 {
            next_core += 1;
        }
        cores[q] = next_core;
        free[next_core] -= 1;
    }
    Placement { slice: 0, cores }
}

fn place_slice(
    k: usize,
    pairs: &[(usize, usize)],
    prev: &Placement,
    g: &CoreGraph,
    caps: &[usize],
    n: usize,
    rng: &mut Option<ChaCha8Rng>,
) -> Result<Placement, MapError> {
    let num_cores = g.num_cores();
    let mut cores = vec![usize::MAX; n];
    let mut used = vec![0usize; num_cores];
    // Per-row jitter indexed by core; slots of one core are interchangeable.
    let mut jit = vec![0.0f64; num_cores];
    let mut draw = |jit: &mut Vec<f64>| {
        if let Some(r) = rng.as_mut() {
            for j in jit.iter_mut() {
                *j = r.gen::<f64>() * 1e-6;
            }
        }
    };

    // Gate pass over pair slots.
    if !pairs.is_empty() {
        let slot_core = expand_slots(|c| caps[c] / 2, num_cores);
        if pairs.len() > slot_core.len() {
            return Err(MapError::SlicePairOverflow {
                slice: k,
                pairs: pairs.len(),
                pair_slots: slot_core.len(),
            });
        }
        let mut m = CostMatrix::zeros(pairs.len(), slot_core.len());
        for (r, &(a, b)) in pairs.iter().enumerate() {
            let (pa, pb) = (prev.core_of(a), prev.core_of(b));
            draw(&mut jit);
            for (s, &c) in slot_core.iter().enumerate() {
                let base = (g.distance(pa, c) + g.distance(pb, c)) as f64;
                m.set(r, s, base + jit[c]);
            }
        }
        let sol = hungarian::solve(&m)?;
        for (r, &(a, b)) in pairs.iter().enumerate() {
            let c = slot_core[sol.col_of[r]];
            cores[a] = c;
            cores[b] = c;
            used[c] += 2;
        }
    }

    // Filler pass over the remaining single slots.
    let lones: Vec<usize> = (0..n).filter(|&q| cores[q] == usize::MAX).collect();
    if !lones.is_empty() {
        let slot_core = expand_slots(|c| caps[c] - used[c], num_cores);
        debug_assert!(lones.len() <= slot_core.len());
        let mut m = CostMatrix::zeros(lones.len(), slot_core.len());
        for (r, &q) in lones.iter().enumerate() {
            let p = prev.core_of(q);
            draw(&mut jit);
            for (s, &c) in slot_core.iter().enumerate() {
                m.set(r, s, g.distance(p, c) as f64 + jit[c]);
            }
        }
        let sol = hungarian::solve(&m)?;
        for (r, &q) in lones.iter().enumerate() {
            cores[q] = slot_core[sol.col_of[r]];
        }
    }

    Ok(Placement { slice: k, cores })
}

fn expand_slots(per_core: impl Fn(usize) -> usize, num_cores: usize) -> Vec<usize> {
    let mut slot_core = Vec::new();
    for c in 0..num_cores {
        for _ in 0..per_core(c) {
            slot_core.push(c);
        }
    }
    slot_core
}

/// Transfers implied by consecutive placements: one per qubit whose core
/// changes across a boundary, ordered by boundary then qubit index.
pub fn extract_transfers(placements: &[Placement]) -> Vec<Transfer> {
    let mut out = Vec::new();
    for w in placements.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for (q, (&src, &dst)) in a.cores.iter().zip(&b.cores).enumerate() {
            if src != dst {
                out.push(Transfer { qubit: q, src_core: src, dst_core: dst, boundary: a.slice });
            }
        }
    }
    out
}

/// Panics on any violated placement invariant; used by tests and callers
/// that want a hard check after mapping.
pub fn validate_mapping(sc: &SlicedCircuit, g: &CoreGraph, res: &MappingResult) {
    let n = sc.circuit().num_qubits();
    assert_eq!(res.placements.len(), sc.num_slices(), "one placement per slice");
    for (k, p) in res.placements.iter().enumerate() {
        assert_eq!(p.slice, k);
        assert_eq!(p.cores.len(), n);
        let mut load = vec![0i64; g.num_cores()];
        for &c in &p.cores {
            assert!(c < g.num_cores(), "core index {c} out of range");
            load[c] += 1;
        }
        for (c, &l) in load.iter().enumerate() {
            assert!(
                l <= g.capacity(c),
                "slice {k}: core {c} holds {l} qubits over capacity {}",
                g.capacity(c)
            );
        }
        for (a, b) in sc.two_qubit_pairs(k) {
            assert_eq!(
                p.core_of(a),
                p.core_of(b),
                "slice {k}: operands {a},{b} on different cores"
            );
        }
    }
    for t in &res.transfers {
        assert_ne!(t.src_core, t.dst_core);
        assert_eq!(res.placements[t.boundary].core_of(t.qubit), t.src_core);
        assert_eq!(res.placements[t.boundary + 1].core_of(t.qubit), t.dst_core);
    }
}
