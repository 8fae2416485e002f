//! Core interconnect topologies.
//!
//! Cores are indexed `0..num_cores`. Every edge carries `parallel_links`
//! independent links, and each link consumes one communication qubit plus one
//! buffer qubit on both of its endpoint cores, so a core with degree `d`
//! keeps `qubits_per_core - 2 * parallel_links * d` qubits for computation.
//!
//! Grids are row-major and almost square: for `n` cores the shape is
//! `r x c` with `c = ceil(sqrt(n))` and `r` the smallest row count with
//! `r * c >= n`; the last row may be partially filled.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    Line,
    Ring,
    Star,
    Grid,
    AllToAll,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 5] = [
        TopologyKind::Line,
        TopologyKind::Ring,
        TopologyKind::Star,
        TopologyKind::Grid,
        TopologyKind::AllToAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Line => "line",
            TopologyKind::Ring => "ring",
            TopologyKind::Star => "star",
            TopologyKind::Grid => "grid",
            TopologyKind::AllToAll => "all-to-all",
        }
    }

    pub fn from_str(s: &str) -> Option<TopologyKind> {
        Some(match s {
            "line" => TopologyKind::Line,
            "ring" => TopologyKind::Ring,
            "star" => TopologyKind::Star,
            "grid" => TopologyKind::Grid,
            "all-to-all" | "alltoall" | "all_to_all" => TopologyKind::AllToAll,
            _ => return None,
        })
    }

    /// Smallest buildable core count.
    pub fn min_size(self) -> usize {
        match self {
            TopologyKind::Ring => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    TooFewCores { kind: TopologyKind, num_cores: usize, minimum: usize },
    NoParallelLinks,
    CoreOutOfRange { core: usize, num_cores: usize },
    /// Routing from a core to itself.
    TrivialRoute { core: usize },
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::TooFewCores { kind, num_cores, minimum } => {
                write!(f, "{kind} topology needs at least {minimum} cores, got {num_cores}")
            }
            TopologyError::NoParallelLinks => write!(f, "parallel link count must be at least 1"),
            TopologyError::CoreOutOfRange { core, num_cores } => {
                write!(f, "core {core} out of range for {num_cores} cores")
            }
            TopologyError::TrivialRoute { core } => {
                write!(f, "route from core {core} to itself")
            }
        }
    }
}

impl core::error::Error for TopologyError {}

/// An interconnect of quantum cores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreGraph {
    kind: TopologyKind,
    num_cores: usize,
    parallel_links: usize,
    qubits_per_core: usize,
    grid_dims: Option<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl CoreGraph {
    pub fn build(
        kind: TopologyKind,
        num_cores: usize,
        parallel_links: usize,
        qubits_per_core: usize,
    ) -> Result<CoreGraph, TopologyError> {
        if num_cores < kind.min_size() {
            return Err(TopologyError::TooFewCores {
                kind,
                num_cores,
                minimum: kind.min_size(),
            });
        }
        if parallel_links == 0 {
            return Err(TopologyError::NoParallelLinks);
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut grid_dims = None;
        match kind {
            TopologyKind::Line => {
                for i in 0..num_cores - 1 {
                    edges.push((i, i + 1));
                }
            }
            TopologyKind::Ring => {
                for i in 0..num_cores - 1 {
                    edges.push((i, i + 1));
                }
                edges.push((0, num_cores - 1));
            }
            TopologyKind::Star => {
                for i in 1..num_cores {
                    edges.push((0, i));
                }
            }
            TopologyKind::Grid => {
                let (rows, cols) = grid_shape(num_cores);
                grid_dims = Some((rows, cols));
                for i in 0..num_cores {
                    let (r, c) = (i / cols, i % cols);
                    if c + 1 < cols && i + 1 < num_cores && (i + 1) / cols == r {
                        edges.push((i, i + 1));
                    }
                    if r + 1 < rows && i + cols < num_cores {
                        edges.push((i, i + cols));
                    }
                }
            }
            TopologyKind::AllToAll => {
                for i in 0..num_cores {
                    for j in i + 1..num_cores {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.sort_unstable();
        let mut neighbors = vec![Vec::new(); num_cores];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        Ok(CoreGraph {
            kind,
            num_cores,
            parallel_links,
            qubits_per_core,
            grid_dims,
            edges,
            neighbors,
        })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn num_cores(&self) -> usize {
        self.num_cores
    }

    pub fn parallel_links(&self) -> usize {
        self.parallel_links
    }

    pub fn qubits_per_core(&self) -> usize {
        self.qubits_per_core
    }

    /// `(rows, cols)` for grids, `None` otherwise.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        self.grid_dims
    }

    /// Undirected edges as `(low, high)` pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, core: usize) -> &[usize] {
        &self.neighbors[core]
    }

    pub fn degree(&self, core: usize) -> usize {
        self.neighbors[core].len()
    }

    /// Position of `(a, b)` in `edges()`, either operand order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    /// Computation capacity of a core: total qubits minus the communication
    /// and buffer qubits its links consume. May be zero or negative; the
    /// caller decides what counts as feasible.
    pub fn capacity(&self, core: usize) -> i64 {
        self.qubits_per_core as i64 - 2 * self.parallel_links as i64 * self.degree(core) as i64
    }

    pub fn capacities(&self) -> Vec<i64> {
        (0..self.num_cores).map(|c| self.capacity(c)).collect()
    }

    pub fn total_capacity(&self) -> i64 {
        (0..self.num_cores).map(|c| self.capacity(c)).sum()
    }

    /// Physical qubits in the whole system, computation and communication.
    pub fn total_physical_qubits(&self) -> usize {
        self.num_cores * self.qubits_per_core
    }

    /// Hop distance between two cores, in closed form per topology.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.num_cores && b < self.num_cores);
        if a == b {
            return 0;
        }
        match self.kind {
            TopologyKind::Line => a.abs_diff(b),
            TopologyKind::Ring => {
                let d = a.abs_diff(b);
                d.min(self.num_cores - d)
            }
            TopologyKind::Star => {
                if a == 0 || b == 0 {
                    1
                } else {
                    2
                }
            }
            TopologyKind::Grid => {
                let cols = self.grid_dims.unwrap().1;
                (a / cols).abs_diff(b / cols) + (a % cols).abs_diff(b % cols)
            }
            TopologyKind::AllToAll => 1,
        }
    }

    /// Deterministic route from `src` to `dst` as the full core sequence,
    /// always of length `distance(src, dst) + 1`.
    ///
    /// * line: stepwise
    /// * ring: shorter arc, ties broken toward increasing indices
    /// * star: through the hub (core 0)
    /// * grid: along the row first, then the column; flipped when the
    ///   row-first leg would leave the partial last row
    /// * all-to-all: direct
    pub fn route(&self, src: usize, dst: usize) -> Result<Vec<usize>, TopologyError> {
        for &c in &[src, dst] {
            if c >= self.num_cores {
                return Err(TopologyError::CoreOutOfRange { core: c, num_cores: self.num_cores });
            }
        }
        if src == dst {
            return Err(TopologyError::TrivialRoute { core: src });
        }
        let mut path = Vec::with_capacity(self.distance(src, dst) + 1);
        path.push(src);
        match self.kind {
            TopologyKind::Line => extend_linear(&mut path, src, dst),
            TopologyKind::Ring => {
                let n = self.num_cores;
                let fwd = (dst + n - src) % n; // steps when increasing
                let back = n - fwd;
                let mut cur = src;
                if fwd <= back {
                    for _ in 0..fwd {
                        cur = (cur + 1) % n;
                        path.push(cur);
                    }
                } else {
                    for _ in 0..back {
                        cur = (cur + n - 1) % n;
                        path.push(cur);
                    }
                }
            }
            TopologyKind::Star => {
                if src != 0 && dst != 0 {
                    path.push(0);
                }
                path.push(dst);
            }
            TopologyKind::Grid => {
                let cols = self.grid_dims.unwrap().1;
                let (r1, c1) = (src / cols, src % cols);
                let (r2, c2) = (dst / cols, dst % cols);
                // Row-first turns at (r1, c2); that cell only exists when it
                // is inside the core count (the last row can be short).
                let row_first_ok = r1 * cols + c2 < self.num_cores;
                if row_first_ok {
                    let mut cur = src;
                    while cur % cols != c2 {
                        cur = step_toward(cur, r1 * cols + c2, 1);
                        path.push(cur);
                    }
                    while cur / cols != r2 {
                        cur = step_toward(cur, dst, cols);
                        path.push(cur);
                    }
                } else {
                    // Column-first: the turn cell (r2, c1) is in a fully
                    // populated row whenever row-first is blocked.
                    let mut cur = src;
                    while cur / cols != r2 {
                        cur = step_toward(cur, r2 * cols + c1, cols);
                        path.push(cur);
                    }
                    while cur % cols != c2 {
                        cur = step_toward(cur, dst, 1);
                        path.push(cur);
                    }
                }
            }
            TopologyKind::AllToAll => path.push(dst),
        }
        debug_assert_eq!(path.len(), self.distance(src, dst) + 1);
        debug_assert!(path.windows(2).all(|w| self.edge_index(w[0], w[1]).is_some()));
        Ok(path)
    }
}

fn extend_linear(path: &mut Vec<usize>, src: usize, dst: usize) {
    let mut cur = src;
    while cur != dst {
        cur = if dst > cur { cur + 1 } else { cur - 1 };
        path.push(cur);
    }
}

fn step_toward(cur: usize, target: usize, stride: usize) -> usize {
    if target > cur {
        cur + stride
    } else {
        cur - stride
    }
}

/// Grid shape for `n` cores: `cols = ceil(sqrt(n))`, rows as few as fit.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut cols = 1usize;
    while cols * cols < n {
        cols += 1;
    }
    let rows = n.div_ceil(cols);
    (rows, cols)
}

/// Per-core degrees of a topology without materialising the graph.
fn degree_profile(kind: TopologyKind, n: usize, mut visit: impl FnMut(usize)) {
    match kind {
        TopologyKind::Line => {
            visit(1);
            for _ in 1..n - 1 {
                visit(2);
            }
            visit(1);
        }
        TopologyKind::Ring => {
            for _ in 0..n {
                visit(2);
            }
        }
        TopologyKind::Star => {
            visit(n - 1);
            for _ in 1..n {
                visit(1);
            }
        }
        TopologyKind::Grid => {
            let (rows, cols) = grid_shape(n);
            for i in 0..n {
                let (r, c) = (i / cols, i % cols);
                let mut d = 0;
                if c > 0 {
                    d += 1;
                }
                if c + 1 < cols && i + 1 < n && (i + 1) / cols == r {
                    d += 1;
                }
                if r > 0 {
                    d += 1;
                }
                if r + 1 < rows && i + cols < n {
                    d += 1;
                }
                visit(d);
            }
        }
        TopologyKind::AllToAll => {
            for _ in 0..n {
                visit(n - 1);
            }
        }
    }
}

pub const MIN_CORES_SEARCH_CAP: usize = 1024;

/// Smallest core count for which every core keeps at least one computation
/// qubit and the total computation capacity reaches `num_virtual` qubits.
/// `None` when no count up to [`MIN_CORES_SEARCH_CAP`] works (adding cores
/// to a dense topology can shrink capacity instead of growing it).
pub fn min_cores(
    kind: TopologyKind,
    qubits_per_core: usize,
    parallel_links: usize,
    num_virtual: usize,
) -> Option<usize> {
    let q = qubits_per_core as i64;
    let l = parallel_links as i64;
    for n in kind.min_size()..=MIN_CORES_SEARCH_CAP {
        let mut min_cap = i64::MAX;
        let mut total = 0i64;
        degree_profile(kind, n, |d| {
            let cap = q - 2 * l * d as i64;
            min_cap = min_cap.min(cap);
            total += cap;
        });
        if min_cap >= 1 && total >= num_virtual as i64 {
            return Some(n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::VecDeque;
    use proptest::prelude::*;

    fn bfs_distance(g: &CoreGraph, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; g.num_cores()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(c) = queue.pop_front() {
            for &n in g.neighbors(c) {
                if dist[n] == usize::MAX {
                    dist[n] = dist[c] + 1;
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    #[test]
    fn edge_counts() {
        let cases = [
            (TopologyKind::Line, 6, 5),
            (TopologyKind::Ring, 6, 6),
            (TopologyKind::Star, 6, 5),
            (TopologyKind::Grid, 6, 7),
            (TopologyKind::Grid, 9, 12),
            (TopologyKind::AllToAll, 6, 15),
        ];
        for (kind, n, want) in cases {
            let g = CoreGraph::build(kind, n, 1, 64).unwrap();
            assert_eq!(g.edges().len(), want, "{kind} {n}");
            let deg_sum: usize = (0..n).map(|c| g.degree(c)).sum();
            assert_eq!(deg_sum, 2 * want);
        }
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(grid_shape(2), (1, 2));
        assert_eq!(grid_shape(4), (2, 2));
        assert_eq!(grid_shape(5), (2, 3));
        assert_eq!(grid_shape(6), (2, 3));
        assert_eq!(grid_shape(7), (3, 3));
        assert_eq!(grid_shape(9), (3, 3));
        assert_eq!(grid_shape(10), (3, 4));
        assert_eq!(grid_shape(12), (3, 4));
        assert_eq!(grid_shape(13), (4, 4));
    }

    #[test]
    fn build_limits() {
        assert!(CoreGraph::build(TopologyKind::Ring, 2, 1, 64).is_err());
        assert!(CoreGraph::build(TopologyKind::Line, 1, 1, 64).is_err());
        assert!(CoreGraph::build(TopologyKind::Line, 2, 0, 64).is_err());
        assert!(CoreGraph::build(TopologyKind::Ring, 3, 1, 64).is_ok());
    }

    #[test]
    fn capacity_examples() {
        // Star hub with 8 leaves and 3 links per edge: 64 - 2*3*8.
        let g = CoreGraph::build(TopologyKind::Star, 9, 3, 64).unwrap();
        assert_eq!(g.capacity(0), 16);
        assert_eq!(g.capacity(1), 58);
        // Line ends vs middle.
        let g = CoreGraph::build(TopologyKind::Line, 5, 1, 64).unwrap();
        assert_eq!(g.capacity(0), 62);
        assert_eq!(g.capacity(2), 60);
        assert_eq!(g.total_capacity(), 304);
        // Dense graphs can go non-positive.
        let g = CoreGraph::build(TopologyKind::AllToAll, 8, 5, 64).unwrap();
        assert_eq!(g.capacity(0), 64 - 2 * 5 * 7);
        assert!(g.capacity(0) < 0);
        let g = CoreGraph::build(TopologyKind::AllToAll, 6, 5, 64).unwrap();
        assert_eq!(g.capacity(3), 14);
    }

    #[test]
    fn distance_matches_bfs_everywhere() {
        for kind in TopologyKind::ALL {
            for n in kind.min_size()..=24 {
                let g = CoreGraph::build(kind, n, 1, 64).unwrap();
                for src in 0..n {
                    let dist = bfs_distance(&g, src);
                    for dst in 0..n {
                        assert_eq!(
                            g.distance(src, dst),
                            dist[dst],
                            "{kind} n={n} {src}->{dst}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn routes_are_shortest_paths() {
        for kind in TopologyKind::ALL {
            for n in kind.min_size()..=16 {
                let g = CoreGraph::build(kind, n, 1, 64).unwrap();
                for src in 0..n {
                    for dst in 0..n {
                        if src == dst {
                            assert!(g.route(src, dst).is_err());
                            continue;
                        }
                        let path = g.route(src, dst).unwrap();
                        assert_eq!(path[0], src);
                        assert_eq!(*path.last().unwrap(), dst);
                        assert_eq!(path.len(), g.distance(src, dst) + 1);
                        for w in path.windows(2) {
                            assert!(
                                g.edge_index(w[0], w[1]).is_some(),
                                "{kind} n={n}: {:?} not an edge",
                                w
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ring_route_tie_goes_forward() {
        let g = CoreGraph::build(TopologyKind::Ring, 6, 1, 64).unwrap();
        assert_eq!(g.route(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(g.route(4, 1).unwrap(), vec![4, 5, 0, 1]);
    }

    #[test]
    fn grid_route_detours_around_missing_cells() {
        // 7 cores in a 3x3 shell: last row holds only core 6.
        let g = CoreGraph::build(TopologyKind::Grid, 7, 1, 64).unwrap();
        // Row-first from 4 to 6 would turn at (1, 0): fine.
        assert_eq!(g.route(4, 6).unwrap(), vec![4, 3, 6]);
        // Row-first from 2 to 6 turns at (0, 0); still valid.
        assert_eq!(g.route(2, 6).unwrap(), vec![2, 1, 0, 3, 6]);
        // From 6 to 2 the row-first turn cell (2, 2) is missing.
        assert_eq!(g.route(6, 2).unwrap(), vec![6, 3, 0, 1, 2]);
        assert_eq!(g.distance(6, 2), 4);
    }

    #[test]
    fn min_cores_known_sizes() {
        assert_eq!(min_cores(TopologyKind::Line, 64, 1, 256), Some(5));
        assert_eq!(min_cores(TopologyKind::AllToAll, 64, 1, 256), Some(5));
        assert_eq!(min_cores(TopologyKind::AllToAll, 64, 2, 256), Some(6));
        assert_eq!(min_cores(TopologyKind::Line, 64, 4, 256), Some(5));
        assert_eq!(min_cores(TopologyKind::Line, 64, 5, 256), Some(6));
        assert_eq!(min_cores(TopologyKind::Grid, 64, 5, 256), Some(7));
        assert_eq!(min_cores(TopologyKind::Star, 64, 5, 256), Some(6));
        // Dense topologies saturate: more cores never help.
        assert_eq!(min_cores(TopologyKind::AllToAll, 64, 6, 256), None);
    }

    #[test]
    fn min_cores_result_is_feasible_and_tight() {
        for kind in TopologyKind::ALL {
            for l in 1..=5 {
                let Some(n) = min_cores(kind, 64, l, 256) else { continue };
                let g = CoreGraph::build(kind, n, l, 64).unwrap();
                assert!(g.capacities().iter().all(|&c| c >= 1), "{kind} l={l}");
                assert!(g.total_capacity() >= 256, "{kind} l={l}");
                if n > kind.min_size() {
                    let g = CoreGraph::build(kind, n - 1, l, 64).unwrap();
                    let ok = g.capacities().iter().all(|&c| c >= 1)
                        && g.total_capacity() >= 256;
                    assert!(!ok, "{kind} l={l}: {n} not minimal");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn degree_profile_matches_built_graph(
            kind_idx in 0usize..5,
            n in 2usize..=64,
        ) {
            let kind = TopologyKind::ALL[kind_idx];
            prop_assume!(n >= kind.min_size());
            let g = CoreGraph::build(kind, n, 1, 64).unwrap();
            let mut degrees = Vec::new();
            degree_profile(kind, n, |d| degrees.push(d));
            let built: Vec<usize> = (0..n).map(|c| g.degree(c)).collect();
            prop_assert_eq!(degrees, built);
        }

        #[test]
        fn capacity_formula(kind_idx in 0usize..5, n in 3usize..=32, l in 1usize..=5, q in 1usize..=128) {
            let kind = TopologyKind::ALL[kind_idx];
            let g = CoreGraph::build(kind, n, l, q).unwrap();
            for c in 0..n {
                prop_assert_eq!(g.capacity(c), q as i64 - 2 * (l * g.degree(c)) as i64);
            }
        }
    }
}
