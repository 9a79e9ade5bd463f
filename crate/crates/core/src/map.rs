//! The planar map of a meandric system and graph-distance estimates.
//!
//! Vertices are the points on the line; edges join consecutive points and
//! the two ends of every arc. Multi-edges are kept (degree counts them) and
//! are harmless for distances.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::arcs::{is_sentinel, Side};
use crate::system::{MeandricSystem, Variant};

/// Distance to an unreachable vertex.
pub const INF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Meander,
    Mcrt,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::Meander => "meander",
            MapKind::Mcrt => "mcrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarMap {
    pub kind: MapKind,
    /// Position of vertex 0.
    pub offset: i64,
    /// Whether the two rays of the line are joined into one edge.
    pub wrap_edge: bool,
    starts: Vec<u32>,
    adj: Vec<u32>,
}

impl PlanarMap {
    /// CSR map from an undirected edge list.
    pub fn from_edges(kind: MapKind, n: usize, offset: i64, wrap_edge: bool, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0u32; n + 1];
        for &(a, b) in edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut starts = vec![0u32; n + 1];
        for v in 0..n {
            starts[v + 1] = starts[v] + deg[v];
        }
        let mut fill = starts.clone();
        let mut adj = vec![0u32; starts[n] as usize];
        for &(a, b) in edges {
            adj[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        PlanarMap { kind, offset, wrap_edge, starts, adj }
    }

    /// Map of a system: line segments, matched arcs of both sides, and the
    /// wrap edge for finite uniform systems.
    pub fn build(sys: &MeandricSystem) -> Self {
        let n = sys.n_points();
        let mut edges = Vec::with_capacity(2 * n + 1);
        for i in 1..n {
            edges.push(((i - 1) as u32, i as u32));
        }
        let wrap = sys.variant == Variant::Finite && n >= 2;
        if wrap {
            edges.push((0, (n - 1) as u32));
        }
        for side in [Side::Upper, Side::Lower] {
            for (i, &p) in sys.diagram(side).partner.iter().enumerate() {
                if !is_sentinel(p) && (p as usize) > i {
                    edges.push((i as u32, p));
                }
            }
        }
        PlanarMap::from_edges(MapKind::Meander, n, sys.offset(), wrap, &edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.starts.len() - 1
    }

    /// Edge count with multiplicity.
    pub fn n_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.starts[v] as usize..self.starts[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn position(&self, v: usize) -> i64 {
        self.offset + v as i64
    }

    pub fn vertex(&self, pos: i64) -> Option<usize> {
        let i = pos - self.offset;
        (0 <= i && (i as usize) < self.n_vertices()).then_some(i as usize)
    }

    /// Undirected edges `(a, b)` with `a <= b`, with multiplicity, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for v in 0..self.n_vertices() {
            for &w in self.neighbors(v) {
                if (v as u32) < w || (v as u32 == w && out.last() != Some(&(w, w))) {
                    out.push((v as u32, w));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Same vertices, each multi-edge collapsed to one.
    pub fn simple(&self) -> PlanarMap {
        let mut e = self.edges();
        e.dedup();
        PlanarMap::from_edges(self.kind, self.n_vertices(), self.offset, self.wrap_edge, &e)
    }

    /// Submap induced by positions `[lo, hi]`: every edge with an endpoint
    /// outside is dropped.
    pub fn induced(&self, lo: i64, hi: i64) -> PlanarMap {
        let lo = lo.max(self.offset);
        let hi = hi.min(self.offset + self.n_vertices() as i64 - 1);
        if hi < lo {
            return PlanarMap::from_edges(self.kind, 0, lo, false, &[]);
        }
        let a = (lo - self.offset) as u32;
        let b = (hi - self.offset) as u32;
        let edges: Vec<(u32, u32)> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| a <= u && v <= b)
            .map(|(u, v)| (u - a, v - a))
            .collect();
        PlanarMap::from_edges(self.kind, (b - a + 1) as usize, lo, false, &edges)
    }
}

/// Reusable BFS scratch space; one per worker.
#[derive(Debug, Clone, Default)]
pub struct Bfs {
    pub dist: Vec<u32>,
    queue: VecDeque<u32>,
}

impl Bfs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multi-source BFS; returns the last vertex reached (a farthest one).
    pub fn run(&mut self, map: &PlanarMap, sources: &[u32]) -> Option<u32> {
        self.dist.clear();
        self.dist.resize(map.n_vertices(), INF);
        self.queue.clear();
        for &s in sources {
            if self.dist[s as usize] == INF {
                self.dist[s as usize] = 0;
                self.queue.push_back(s);
            }
        }
        let mut last = None;
        while let Some(v) = self.queue.pop_front() {
            last = Some(v);
            let d = self.dist[v as usize] + 1;
            for &w in map.neighbors(v as usize) {
                if self.dist[w as usize] == INF {
                    self.dist[w as usize] = d;
                    self.queue.push_back(w);
                }
            }
        }
        last
    }
}

/// Graph distances from a source set; `INF` where unreachable.
pub fn bfs_distance(map: &PlanarMap, sources: &[u32]) -> Vec<u32> {
    let mut b = Bfs::new();
    b.run(map, sources);
    b.dist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMethod {
    Exact,
    DoubleSweep,
}

impl DiameterMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DiameterMethod::Exact => "exact",
            DiameterMethod::DoubleSweep => "double_sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    /// A realized distance, hence a lower bound; the diameter itself when
    /// the method is exact.
    pub lower_bound: u32,
    pub method: DiameterMethod,
}

/// Maps with at most this many vertices get the all-pairs diameter.
pub const EXACT_DIAMETER_VERTICES: usize = 2000;

/// Diameter of the component of vertex 0: exact for small maps, otherwise
/// the best of `sweeps` iterated BFS sweeps, each restarted at the farthest
/// vertex of the previous one.
pub fn map_diameter_estimate(map: &PlanarMap, sweeps: usize) -> DiameterEstimate {
    let n = map.n_vertices();
    if n == 0 {
        return DiameterEstimate { lower_bound: 0, method: DiameterMethod::Exact };
    }
    let mut bfs = Bfs::new();
    if n <= EXACT_DIAMETER_VERTICES {
        let mut best = 0;
        for s in 0..n as u32 {
            bfs.run(map, &[s]);
            best = best.max(bfs.dist.iter().copied().filter(|&d| d != INF).max().unwrap_or(0));
        }
        return DiameterEstimate { lower_bound: best, method: DiameterMethod::Exact };
    }
    let mut best = 0;
    let mut src = 0u32;
    for _ in 0..sweeps.max(2) {
        let far = bfs.run(map, &[src]).unwrap_or(src);
        let d = bfs.dist[far as usize];
        if d <= best && src != 0 {
            break;
        }
        best = best.max(d);
        src = far;
    }
    DiameterEstimate { lower_bound: best, method: DiameterMethod::DoubleSweep }
}

/// Lower bound on the largest map distance between two vertices of a loop,
/// from up to `budget` BFS runs. The first source is the loop's first
/// vertex, the next is the loop vertex farthest from it, and the rest are
/// spread evenly along the loop. Exact when `budget >= loop.len()`.
pub fn loop_graph_diameter(map: &PlanarMap, loop_vertices: &[u32], budget: usize) -> u32 {
    if loop_vertices.is_empty() || budget == 0 {
        return 0;
    }
    let mut bfs = Bfs::new();
    let mut best = 0;
    let mut sweep = |bfs: &mut Bfs, s: u32| -> u32 {
        bfs.run(map, &[s]);
        let (mut far, mut fd) = (s, 0);
        for &v in loop_vertices {
            let d = bfs.dist[v as usize];
            if d != INF && d > fd {
                far = v;
                fd = d;
            }
        }
        best = best.max(fd);
        far
    };
    if budget >= loop_vertices.len() {
        for &s in loop_vertices {
            sweep(&mut bfs, s);
        }
        return best;
    }
    let far = sweep(&mut bfs, loop_vertices[0]);
    if budget >= 2 {
        sweep(&mut bfs, far);
    }
    let rest = budget.saturating_sub(2);
    for i in 0..rest {
        let idx = (i + 1) * loop_vertices.len() / (rest + 1);
        sweep(&mut bfs, loop_vertices[idx]);
    }
    best
}
