//! Simple undirected weighted graphs built from timestamped interactions.
//!
//! Nodes are dense `u32` ids local to one graph. Every graph also remembers
//! the raw id each local node came from, so subgraphs and train splits can be
//! mapped back to the labels of the original edge list.

mod io;
mod stats;
mod traversal;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use io::{parse_edge_list, write_edge_list, Column, EdgeList, EdgeListFormat};
pub use stats::{network_stats, NetworkStats};
pub(crate) use traversal::WalkLevels;
pub use traversal::{
    bfs_distances, ego_edge_set, hop_distance, mean_reachable_distance, mean_shortest_distance,
    walk_weight, UNREACHABLE,
};

/// Local node id inside one [`WeightedGraph`].
pub type NodeId = u32;

/// Unordered node pair, always stored as `(min, max)`.
pub type Pair = (NodeId, NodeId);

#[inline]
pub fn canonical(x: NodeId, y: NodeId) -> Pair {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

/// One recorded interaction between raw node ids `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub u: u32,
    pub v: u32,
    pub w: f64,
    pub t: f64,
}

impl TemporalEdge {
    pub fn new(u: u32, v: u32, w: f64, t: f64) -> Self {
        TemporalEdge { u, v, w, t }
    }
}

/// How repeated interactions between the same pair collapse into one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    SumWeights,
    #[default]
    CountInteractions,
    KeepMaxWeight,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" | "sum-weights" => Ok(Aggregation::SumWeights),
            "count" | "count-interactions" => Ok(Aggregation::CountInteractions),
            "max" | "keep-max-weight" => Ok(Aggregation::KeepMaxWeight),
            _ => Err(Error::InvalidParameter(format!(
                "unknown aggregation `{s}` (expected sum-weights, count-interactions or keep-max-weight)"
            ))),
        }
    }
}

/// A simple edge between local nodes `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: f64,
    pub t: f64,
}

/// Immutable simple undirected graph with per-edge weight and timestamp.
///
/// Adjacency is kept in CSR form with neighbor lists sorted ascending, and
/// node strengths are cached at construction.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    raw_ids: Vec<u32>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    nbrs: Vec<NodeId>,
    nbr_w: Vec<f64>,
    nbr_edge: Vec<u32>,
    strength: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph on `raw_ids.len()` nodes from simple edges given in
    /// local ids. Edge endpoints may come in either order; the edge list must
    /// not contain duplicates or self-loops.
    pub fn from_parts(raw_ids: Vec<u32>, edges: Vec<Edge>) -> Result<Self> {
        let n = raw_ids.len();
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                let (u, v) = canonical(e.u, e.v);
                Edge { u, v, ..e }
            })
            .collect();
        for e in &edges {
            if e.u == e.v {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on node {}",
                    e.u
                )));
            }
            if e.v as usize >= n {
                return Err(Error::UnknownNode(e.v));
            }
            if !(e.w >= 0.0 && e.w.is_finite()) || !e.t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has weight {} and timestamp {}",
                    e.u, e.v, e.w, e.t
                )));
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if edges
            .windows(2)
            .any(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v))
        {
            return Err(Error::InvalidParameter("duplicate edge".into()));
        }
        Ok(Self::assemble(raw_ids, edges))
    }

    /// `edges` must already be canonical, sorted and duplicate free.
    fn assemble(raw_ids: Vec<u32>, edges: Vec<Edge>) -> Self {
        let n = raw_ids.len();
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u as usize] += 1;
            degree[e.v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = offsets[n];
        let mut nbrs = vec![0; total];
        let mut nbr_edge = vec![0u32; total];
        let mut fill = offsets[..n].to_vec();
        // Edges are sorted by (u, v): pushing in this order leaves every
        // neighbor list sorted, because for node x the lower neighbors arrive
        // (as `v` side) before the higher ones (as `u` side).
        for (idx, e) in edges.iter().enumerate() {
            let (u, v) = (e.u as usize, e.v as usize);
            nbrs[fill[v]] = e.u;
            nbr_edge[fill[v]] = idx as u32;
            fill[v] += 1;
            nbrs[fill[u]] = e.v;
            nbr_edge[fill[u]] = idx as u32;
            fill[u] += 1;
        }
        let nbr_w: Vec<f64> = nbr_edge.iter().map(|&e| edges[e as usize].w).collect();
        let strength = (0..n)
            .map(|x| nbr_w[offsets[x]..offsets[x + 1]].iter().sum())
            .collect();
        WeightedGraph {
            raw_ids,
            edges,
            offsets,
            nbrs,
            nbr_w,
            nbr_edge,
            strength,
        }
    }

    pub fn empty() -> Self {
        Self::assemble(Vec::new(), Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.raw_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_ids.is_empty()
    }

    pub fn contains(&self, x: NodeId) -> bool {
        (x as usize) < self.raw_ids.len()
    }

    pub fn check_node(&self, x: NodeId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownNode(x))
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.raw_ids.len() as NodeId
    }

    /// Raw id (index into the source edge list's label table) of local node `x`.
    pub fn raw_id(&self, x: NodeId) -> u32 {
        self.raw_ids[x as usize]
    }

    pub fn raw_ids(&self) -> &[u32] {
        &self.raw_ids
    }

    /// Local id for a raw id, if the node is present.
    pub fn local_id(&self, raw: u32) -> Option<NodeId> {
        // raw ids are strictly increasing for graphs made by `build_graph` and
        // its subgraphs; fall back to a scan otherwise.
        match self.raw_ids.binary_search(&raw) {
            Ok(i) => Some(i as NodeId),
            Err(_) if !self.raw_ids.windows(2).all(|p| p[0] < p[1]) => self
                .raw_ids
                .iter()
                .position(|&r| r == raw)
                .map(|i| i as NodeId),
            Err(_) => None,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    #[inline]
    pub fn neighbors(&self, x: NodeId) -> &[NodeId] {
        let x = x as usize;
        &self.nbrs[self.offsets[x]..self.offsets[x + 1]]
    }

    /// Weights aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn neighbor_weights(&self, x: NodeId) -> &[f64] {
        let x = x as usize;
        &self.nbr_w[self.offsets[x]..self.offsets[x + 1]]
    }

    /// Edge indices aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn neighbor_edges(&self, x: NodeId) -> &[u32] {
        let x = x as usize;
        &self.nbr_edge[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub fn adjacency(&self, x: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.neighbors(x)
            .iter()
            .copied()
            .zip(self.neighbor_weights(x).iter().copied())
    }

    #[inline]
    pub fn degree(&self, x: NodeId) -> usize {
        let x = x as usize;
        self.offsets[x + 1] - self.offsets[x]
    }

    #[inline]
    pub fn strength(&self, x: NodeId) -> f64 {
        self.strength[x as usize]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn edge_index(&self, x: NodeId, y: NodeId) -> Option<usize> {
        if !self.contains(x) || !self.contains(y) {
            return None;
        }
        let (a, b) = if self.degree(x) <= self.degree(y) {
            (x, y)
        } else {
            (y, x)
        };
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.neighbor_edges(a)[i] as usize)
    }

    #[inline]
    pub fn has_edge(&self, x: NodeId, y: NodeId) -> bool {
        self.edge_index(x, y).is_some()
    }

    pub fn weight(&self, x: NodeId, y: NodeId) -> Option<f64> {
        self.edge_index(x, y).map(|e| self.edges[e].w)
    }

    pub fn timestamp(&self, x: NodeId, y: NodeId) -> Option<f64> {
        self.edge_index(x, y).map(|e| self.edges[e].t)
    }

    /// Same topology and timestamps with new edge weights, indexed like
    /// [`edges`](Self::edges).
    pub fn with_weights(&self, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), self.edges.len());
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| Edge { w, ..*e })
            .collect();
        Self::assemble(self.raw_ids.clone(), edges)
    }

    /// Graph with the edges flagged in `removed` dropped; the node set is kept.
    pub fn without_edges(&self, removed: &[bool]) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(removed)
            .filter(|(_, &r)| !r)
            .map(|(e, _)| *e)
            .collect();
        Self::assemble(self.raw_ids.clone(), edges)
    }

    /// Subgraph induced on `keep` (sorted ascending, no duplicates). Local ids
    /// are renumbered in the order of `keep`.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Self {
        let mut map = vec![NodeId::MAX; self.node_count()];
        for (i, &x) in keep.iter().enumerate() {
            map[x as usize] = i as NodeId;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.u as usize] != NodeId::MAX && map[e.v as usize] != NodeId::MAX)
            .map(|e| Edge {
                u: map[e.u as usize],
                v: map[e.v as usize],
                ..*e
            })
            .collect::<Vec<_>>();
        let raw = keep.iter().map(|&x| self.raw_ids[x as usize]).collect();
        // `keep` is ascending, so the relabelled edges stay sorted
        Self::assemble(raw, edges)
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s as NodeId);
            let mut comp = Vec::new();
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &y in self.neighbors(x) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }
}

/// Collapses interactions into one simple edge per unordered pair.
///
/// The node set is every raw id appearing in `edges`, numbered in ascending
/// raw-id order. Edge timestamp is the latest aggregated interaction.
pub fn build_graph(edges: &[TemporalEdge], aggregation: Aggregation) -> WeightedGraph {
    let mut raw: Vec<u32> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    raw.sort_unstable();
    raw.dedup();
    let local = |r: u32| raw.binary_search(&r).unwrap() as NodeId;

    let mut keyed: Vec<(Pair, usize)> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| (canonical(local(e.u), local(e.v)), i))
        .collect();
    // stable on input order within a pair, so sums are reproducible
    keyed.sort_by_key(|&(p, _)| p);

    let mut simple: Vec<Edge> = Vec::new();
    for (pair, i) in keyed {
        let e = &edges[i];
        match simple.last_mut() {
            Some(last) if (last.u, last.v) == pair => {
                last.w = match aggregation {
                    Aggregation::SumWeights => last.w + e.w,
                    Aggregation::CountInteractions => last.w + 1.0,
                    Aggregation::KeepMaxWeight => last.w.max(e.w),
                };
                last.t = last.t.max(e.t);
            }
            _ => simple.push(Edge {
                u: pair.0,
                v: pair.1,
                w: match aggregation {
                    Aggregation::CountInteractions => 1.0,
                    _ => e.w,
                },
                t: e.t,
            }),
        }
    }
    WeightedGraph::assemble(raw, simple)
}

/// Induced subgraph on the largest connected component. Ties go to the
/// component holding the smallest node id.
pub fn giant_component(g: &WeightedGraph) -> WeightedGraph {
    let comps = g.components();
    if comps.len() <= 1 {
        return g.clone();
    }
    let mut best = &comps[0];
    for c in &comps[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    g.induced_subgraph(best)
}
