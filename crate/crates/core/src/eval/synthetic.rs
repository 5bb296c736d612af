//! Seeded generators for self-contained experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{canonical, TemporalEdge};

/// Preferential-attachment growth.
///
/// Starts from a clique on `edges_per_node + 1` nodes, then every further
/// node links to `edges_per_node` distinct existing nodes picked with
/// probability proportional to degree. Weights are 1 and each edge's
/// timestamp is its insertion index, so the edge count is
/// `m(m+1)/2 + m(nodes − m − 1)`.
pub fn generate_synthetic(
    nodes: usize,
    edges_per_node: usize,
    seed: u64,
) -> Result<Vec<TemporalEdge>> {
    let m = edges_per_node;
    if nodes < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 nodes, got {nodes}"
        )));
    }
    if m == 0 || m + 1 > nodes {
        return Err(Error::InvalidParameter(format!(
            "edges per node must be in 1..={} for {nodes} nodes, got {m}",
            nodes - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut growth = Growth::default();
    for u in 0..=m as u32 {
        for v in u + 1..=m as u32 {
            growth.push(u, v, 1.0);
        }
    }
    for new in (m + 1) as u32..nodes as u32 {
        growth.attach(&mut rng, new, m, 1.0);
    }
    Ok(growth.edges)
}

/// Growth plus densification: a preferential-attachment backbone (two links
/// per arriving node) interleaved with links among existing nodes, mostly
/// closing triangles. All nodes have arrived by 80% of the timeline, so a
/// late temporal cut still has probe links between known nodes.
///
/// Weights are integers in 1..=5; timestamps are insertion indices.
pub fn generate_evolving(nodes: usize, edges: usize, seed: u64) -> Result<Vec<TemporalEdge>> {
    const M: usize = 2;
    if nodes < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 nodes, got {nodes}"
        )));
    }
    let backbone = 3 + M * (nodes - 3);
    let capacity = nodes * (nodes - 1) / 2;
    if edges < backbone || edges > capacity / 2 {
        return Err(Error::InvalidParameter(format!(
            "{edges} edges infeasible for {nodes} nodes (need {backbone}..={})",
            capacity / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut growth = Growth::default();
    for (u, v) in [(0, 1), (0, 2), (1, 2)] {
        let w = rng.gen_range(1..=5) as f64;
        growth.push(u, v, w);
    }
    let arrivals = nodes - 3;
    let horizon = (edges as f64 * 0.8) as usize;
    let mut next = 3usize;
    while growth.edges.len() < edges {
        let live_pairs = next * (next - 1) / 2;
        let due = next < nodes && {
            let k = next - 3;
            growth.edges.len() >= k * horizon / arrivals
                || edges - growth.edges.len() <= M * (nodes - next)
                || 2 * growth.edges.len() >= live_pairs
        };
        if due {
            let w = rng.gen_range(1..=5) as f64;
            growth.attach(&mut rng, next as u32, M, w);
            next += 1;
        } else {
            let w = rng.gen_range(1..=5) as f64;
            growth.densify(&mut rng, next as u32, w)?;
        }
    }
    Ok(growth.edges)
}

#[derive(Default)]
struct Growth {
    edges: Vec<TemporalEdge>,
    present: HashSet<(u32, u32)>,
    /// Every edge endpoint, so a uniform pick is degree-proportional.
    endpoints: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl Growth {
    fn push(&mut self, u: u32, v: u32, w: f64) {
        let t = self.edges.len() as f64;
        self.edges.push(TemporalEdge::new(u, v, w, t));
        self.present.insert(canonical(u, v));
        self.endpoints.extend([u, v]);
        let hi = u.max(v) as usize;
        if self.adj.len() <= hi {
            self.adj.resize(hi + 1, Vec::new());
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
    }

    fn attach(&mut self, rng: &mut ChaCha8Rng, new: u32, m: usize, w: f64) {
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = *self.endpoints.choose(rng).expect("seed graph has edges");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            self.push(t, new, w);
        }
    }

    /// One new link among nodes `0..live`: a triadic closure two times in
    /// three, otherwise a degree-biased pair.
    fn densify(&mut self, rng: &mut ChaCha8Rng, live: u32, w: f64) -> Result<()> {
        for _ in 0..10_000 {
            let a = *self.endpoints.choose(rng).unwrap();
            let c = if rng.gen_bool(2.0 / 3.0) {
                let b = *self.adj[a as usize].choose(rng).unwrap();
                *self.adj[b as usize].choose(rng).unwrap()
            } else {
                let c = *self.endpoints.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    c
                } else {
                    rng.gen_range(0..live)
                }
            };
            if a != c && !self.present.contains(&canonical(a, c)) {
                self.push(a, c, w);
                return Ok(());
            }
        }
        Err(Error::InvalidParameter(
            "could not place another edge; graph too dense".into(),
        ))
    }
}
