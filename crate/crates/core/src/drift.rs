//! Spatial-temporal position drift.
//!
//! Each node treats its incident edge weights as its current similarities and
//! compares them with the influence its neighbors exert on it. Influence
//! combines a spatial factor (the total edge weight of a neighbor's ego
//! network, fused across neighbors that are linked to each other) with a
//! temporal factor (a logistic recency score of the connecting edge). The
//! weight mass of every node is then redistributed in proportion to the
//! normalised influence, and the two endpoint views of each edge are
//! averaged.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};

pub const DEFAULT_ITERATIONS: u32 = 3;
pub const MAX_ITERATIONS: u32 = 50;

/// How the two per-endpoint updates of an edge become one weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetrization {
    #[default]
    Average,
    /// Keep only the lower-id endpoint's view (diagnostics).
    OneSided,
}

impl std::str::FromStr for Symmetrization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" => Ok(Symmetrization::Average),
            "one-sided" | "onesided" => Ok(Symmetrization::OneSided),
            _ => Err(Error::InvalidParameter(format!(
                "unknown symmetrization `{s}` (expected average or one-sided)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemporalMode {
    #[default]
    UseTimestamps,
    /// Ignore timestamps; every edge gets the same recency.
    Uniform,
}

impl std::str::FromStr for TemporalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "use-timestamps" | "timestamps" => Ok(TemporalMode::UseTimestamps),
            "uniform" => Ok(TemporalMode::Uniform),
            _ => Err(Error::InvalidParameter(format!(
                "unknown temporal mode `{s}` (expected use-timestamps or uniform)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftConfig {
    pub iterations: u32,
    pub symmetrization: Symmetrization,
    pub temporal: TemporalMode,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            iterations: DEFAULT_ITERATIONS,
            symmetrization: Symmetrization::Average,
            temporal: TemporalMode::UseTimestamps,
        }
    }
}

impl DriftConfig {
    pub fn with_iterations(iterations: u32) -> Self {
        DriftConfig {
            iterations,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations > MAX_ITERATIONS {
            return Err(Error::TooManyIterations(self.iterations));
        }
        Ok(())
    }
}

/// Influence of every neighbor of `center`, aligned with `neighbors`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceField {
    pub center: NodeId,
    pub neighbors: Vec<NodeId>,
    /// Spatial attractiveness, fused inside connected-neighbor sets.
    pub attractiveness: Vec<f64>,
    /// Logistic recency of the edge to each neighbor, in (0, 1).
    pub temporal: Vec<f64>,
    /// Combined influence in [0, 1].
    pub influence: Vec<f64>,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Total weight of the edges among `{j} ∪ Γ(j)`.
pub fn attractiveness(g: &WeightedGraph, j: NodeId) -> Result<f64> {
    g.check_node(j)?;
    let mut ego = Vec::new();
    ego_edges_into(g, j, &mut ego);
    Ok(ego.iter().map(|&e| g.edge(e as usize).w).sum())
}

/// Ego edge indices of `j`, ascending.
fn ego_edges_into(g: &WeightedGraph, j: NodeId, out: &mut Vec<u32>) {
    out.clear();
    let nb = g.neighbors(j);
    out.extend_from_slice(g.neighbor_edges(j));
    for &m in nb {
        for (&n, &e) in g.neighbors(m).iter().zip(g.neighbor_edges(m)) {
            if n > m && nb.binary_search(&n).is_ok() {
                out.push(e);
            }
        }
    }
    out.sort_unstable();
}

/// Connected components of the subgraph induced on `Γ(a)` (center left out),
/// members ascending, components ordered by smallest member.
pub fn neighbor_components(g: &WeightedGraph, a: NodeId) -> Result<Vec<Vec<NodeId>>> {
    g.check_node(a)?;
    let nb = g.neighbors(a);
    let labels = component_labels(g, nb);
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    let mut slot = vec![usize::MAX; nb.len()];
    for (i, &root) in labels.iter().enumerate() {
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(nb[i]);
    }
    Ok(groups)
}

/// Union-find over positions in the sorted neighbor list `nb`; returns the
/// root position of each entry. Roots are the smallest member position.
fn component_labels(g: &WeightedGraph, nb: &[NodeId]) -> Vec<usize> {
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut parent: Vec<usize> = (0..nb.len()).collect();
    for (i, &m) in nb.iter().enumerate() {
        for &n in g.neighbors(m) {
            if n <= m {
                continue;
            }
            if let Ok(k) = nb.binary_search(&n) {
                let (ri, rk) = (find(&mut parent, i), find(&mut parent, k));
                if ri != rk {
                    let (lo, hi) = (ri.min(rk), ri.max(rk));
                    parent[hi] = lo;
                }
            }
        }
    }
    (0..nb.len()).map(|i| find(&mut parent, i)).collect()
}

/// Fused attractiveness of a connected-neighbor set `members` of center `a`.
///
/// The fused value AI(f) is the weight of the union of the members' ego
/// edge sets; each member receives `|NC| · AI(f)` in proportion to its
/// independent attractiveness (equal shares if those are all zero).
pub fn fused_attractiveness(
    g: &WeightedGraph,
    a: NodeId,
    members: &[NodeId],
) -> Result<Vec<(NodeId, f64)>> {
    g.check_node(a)?;
    for &m in members {
        g.check_node(m)?;
        if !g.has_edge(a, m) {
            return Err(Error::InvalidParameter(format!(
                "node {m} is not a neighbor of {a}"
            )));
        }
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut ctx = EgoContext::lazy(g);
    let shares = ctx.fuse(&sorted);
    Ok(sorted.into_iter().zip(shares).collect())
}

/// Recency of each edge at `a`: `σ((t − t̄) / (2Δt))` with `Δt = (max t − min t)/|N(a)|`.
/// Degenerate spreads (and uniform mode) give 0.5 everywhere.
pub fn temporal_importance(
    g: &WeightedGraph,
    a: NodeId,
    mode: TemporalMode,
) -> Result<Vec<(NodeId, f64)>> {
    g.check_node(a)?;
    let pi = recency(g, a, mode);
    Ok(g.neighbors(a).iter().copied().zip(pi).collect())
}

fn recency(g: &WeightedGraph, a: NodeId, mode: TemporalMode) -> Vec<f64> {
    let k = g.degree(a);
    if k == 0 {
        return Vec::new();
    }
    if mode == TemporalMode::Uniform {
        return vec![0.5; k];
    }
    let times: Vec<f64> = g
        .neighbor_edges(a)
        .iter()
        .map(|&e| g.edge(e as usize).t)
        .collect();
    let (lo, hi) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });
    let dt = (hi - lo) / k as f64;
    if !(dt > 0.0) {
        return vec![0.5; k];
    }
    let mean = times.iter().sum::<f64>() / k as f64;
    times
        .iter()
        .map(|&t| logistic((t - mean) / (2.0 * dt)))
        .collect()
}

/// Spatial-temporal influence of every neighbor on `a`.
pub fn combined_influence(
    g: &WeightedGraph,
    a: NodeId,
    mode: TemporalMode,
) -> Result<InfluenceField> {
    g.check_node(a)?;
    let mut ctx = EgoContext::lazy(g);
    Ok(ctx.influence(a, mode))
}

/// `Δs(a, j)` for each neighbor `j`: the gap between the current weight and
/// `a`'s total weight redistributed by normalised influence.
pub fn drift_delta(g: &WeightedGraph, a: NodeId, mode: TemporalMode) -> Result<Vec<(NodeId, f64)>> {
    g.check_node(a)?;
    let mut ctx = EgoContext::lazy(g);
    let field = ctx.influence(a, mode);
    let targets = redistribute(g.neighbor_weights(a), &field.influence);
    Ok(g.neighbors(a)
        .iter()
        .zip(targets.iter().zip(g.neighbor_weights(a)))
        .map(|(&j, (&target, &s))| (j, target - s))
        .collect())
}

/// One-sided updated similarities `s + Δs = (Σ s) · A_j / Σ A`.
/// A node with zero total weight (or zero total influence) keeps its weights.
fn redistribute(weights: &[f64], influence: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mass: f64 = influence.iter().sum();
    if !(total > 0.0) || !(mass > 0.0) {
        return weights.to_vec();
    }
    influence.iter().map(|&a| total * (a / mass)).collect()
}

/// One synchronous drift round: every influence field and update is computed
/// from `g`, then each edge takes the configured combination of its two
/// endpoint views. Topology and timestamps are untouched.
pub fn drift_step(g: &WeightedGraph, cfg: &DriftConfig) -> WeightedGraph {
    let ego = EgoTable::build(g);
    let targets: Vec<Vec<f64>> = g
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map_init(
            || EgoContext::cached(g, &ego),
            |ctx, &a| {
                let field = ctx.influence(a, cfg.temporal);
                redistribute(g.neighbor_weights(a), &field.influence)
            },
        )
        .collect();

    let m = g.edge_count();
    let mut from_low = vec![0.0; m];
    let mut from_high = vec![0.0; m];
    for a in g.nodes() {
        for (&e, &t) in g.neighbor_edges(a).iter().zip(&targets[a as usize]) {
            if g.edge(e as usize).u == a {
                from_low[e as usize] = t;
            } else {
                from_high[e as usize] = t;
            }
        }
    }
    let weights: Vec<f64> = match cfg.symmetrization {
        Symmetrization::Average => from_low
            .iter()
            .zip(&from_high)
            .map(|(a, b)| 0.5 * (a + b))
            .collect(),
        Symmetrization::OneSided => from_low,
    };
    g.with_weights(&weights)
}

/// `cfg.iterations` drift rounds; zero rounds returns a copy of `g`.
pub fn drift_iterate(g: &WeightedGraph, cfg: &DriftConfig) -> Result<WeightedGraph> {
    cfg.validate()?;
    let mut cur = g.clone();
    for _ in 0..cfg.iterations {
        cur = drift_step(&cur, cfg);
    }
    Ok(cur)
}

/// Ego edge lists and independent attractiveness of every node.
struct EgoTable {
    offsets: Vec<usize>,
    edges: Vec<u32>,
    ai: Vec<f64>,
}

impl EgoTable {
    fn build(g: &WeightedGraph) -> Self {
        let per_node: Vec<(Vec<u32>, f64)> = g
            .nodes()
            .collect::<Vec<_>>()
            .par_iter()
            .map_init(Vec::new, |buf, &j| {
                ego_edges_into(g, j, buf);
                let ai = buf.iter().map(|&e| g.edge(e as usize).w).sum();
                (buf.clone(), ai)
            })
            .collect();
        let mut offsets = Vec::with_capacity(per_node.len() + 1);
        offsets.push(0);
        let mut edges = Vec::new();
        let mut ai = Vec::with_capacity(per_node.len());
        for (list, a) in per_node {
            edges.extend_from_slice(&list);
            offsets.push(edges.len());
            ai.push(a);
        }
        EgoTable { offsets, edges, ai }
    }
}

/// Computes influence fields either from a prebuilt [`EgoTable`] or on
/// demand. Both paths sum identical edge lists in identical order.
struct EgoContext<'a> {
    g: &'a WeightedGraph,
    table: Option<&'a EgoTable>,
    stamp: Vec<u32>,
    epoch: u32,
    buf: Vec<u32>,
}

impl<'a> EgoContext<'a> {
    fn lazy(g: &'a WeightedGraph) -> Self {
        EgoContext {
            g,
            table: None,
            stamp: Vec::new(),
            epoch: 0,
            buf: Vec::new(),
        }
    }

    fn cached(g: &'a WeightedGraph, table: &'a EgoTable) -> Self {
        EgoContext {
            table: Some(table),
            ..Self::lazy(g)
        }
    }

    fn independent(&mut self, j: NodeId) -> f64 {
        match self.table {
            Some(t) => t.ai[j as usize],
            None => {
                ego_edges_into(self.g, j, &mut self.buf);
                self.buf.iter().map(|&e| self.g.edge(e as usize).w).sum()
            }
        }
    }

    /// Fused shares for the sorted member set of one connected-neighbor set.
    fn fuse(&mut self, members: &[NodeId]) -> Vec<f64> {
        if self.stamp.len() != self.g.edge_count() {
            self.stamp = vec![0; self.g.edge_count()];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut fused = 0.0;
        for &m in members {
            let list: &[u32] = match self.table {
                Some(t) => &t.edges[t.offsets[m as usize]..t.offsets[m as usize + 1]],
                None => {
                    ego_edges_into(self.g, m, &mut self.buf);
                    &self.buf
                }
            };
            for &e in list {
                if self.stamp[e as usize] != self.epoch {
                    self.stamp[e as usize] = self.epoch;
                    fused += self.g.edge(e as usize).w;
                }
            }
        }
        let independent: Vec<f64> = members.iter().map(|&m| self.independent(m)).collect();
        let total: f64 = independent.iter().sum();
        let size = members.len() as f64;
        if total > 0.0 {
            independent
                .iter()
                .map(|&ai| size * fused * (ai / total))
                .collect()
        } else {
            vec![fused; members.len()]
        }
    }

    fn influence(&mut self, a: NodeId, mode: TemporalMode) -> InfluenceField {
        let g = self.g;
        let nb = g.neighbors(a);
        let labels = component_labels(g, nb);
        let mut attractiveness = vec![0.0; nb.len()];
        let mut done = vec![false; nb.len()];
        for i in 0..nb.len() {
            if done[i] {
                continue;
            }
            let root = labels[i];
            let positions: Vec<usize> = (i..nb.len()).filter(|&k| labels[k] == root).collect();
            if positions.len() == 1 {
                attractiveness[i] = self.independent(nb[i]);
            } else {
                let members: Vec<NodeId> = positions.iter().map(|&k| nb[k]).collect();
                for (&k, share) in positions.iter().zip(self.fuse(&members)) {
                    attractiveness[k] = share;
                }
            }
            for k in positions {
                done[k] = true;
            }
        }

        let temporal = recency(g, a, mode);
        let max_ai = attractiveness.iter().cloned().fold(0.0, f64::max);
        let max_pi = temporal.iter().cloned().fold(0.0, f64::max);
        let influence = attractiveness
            .iter()
            .zip(&temporal)
            .map(|(&ai, &pi)| {
                let spatial = if max_ai > 0.0 { ai / max_ai } else { 1.0 };
                spatial * (pi / max_pi)
            })
            .collect();
        InfluenceField {
            center: a,
            neighbors: nb.to_vec(),
            attractiveness,
            temporal,
            influence,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, WeightedGraph};

    fn graph(n: u32, edges: &[(u32, u32, f64, f64)]) -> WeightedGraph {
        let edges = edges
            .iter()
            .map(|&(u, v, w, t)| Edge { u, v, w, t })
            .collect();
        WeightedGraph::from_parts((0..n).collect(), edges).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn attractiveness_examples() {
        let tri = graph(3, &[(0, 1, 1.0, 0.0), (0, 2, 1.0, 0.0), (1, 2, 1.0, 0.0)]);
        assert_eq!(attractiveness(&tri, 0).unwrap(), 3.0);
        let pair = graph(2, &[(0, 1, 2.0, 0.0)]);
        assert_eq!(attractiveness(&pair, 0).unwrap(), 2.0);
        let iso = graph(3, &[(1, 2, 1.0, 0.0)]);
        assert_eq!(attractiveness(&iso, 0).unwrap(), 0.0);
    }

    #[test]
    fn components_of_the_neighborhood() {
        // center 0; neighbors 1 (i), 2 (j), 3 (m), 4 (n); only m-n linked
        let g = graph(
            5,
            &[
                (0, 1, 1.0, 0.0),
                (0, 2, 1.0, 0.0),
                (0, 3, 1.0, 0.0),
                (0, 4, 1.0, 0.0),
                (3, 4, 1.0, 0.0),
            ],
        );
        assert_eq!(
            neighbor_components(&g, 0).unwrap(),
            vec![vec![1], vec![2], vec![3, 4]]
        );
        let star = graph(4, &[(0, 1, 1.0, 0.0), (0, 2, 1.0, 0.0), (0, 3, 1.0, 0.0)]);
        assert_eq!(neighbor_components(&star, 0).unwrap().len(), 3);
        let k4 = graph(
            4,
            &[
                (0, 1, 1.0, 0.0),
                (0, 2, 1.0, 0.0),
                (0, 3, 1.0, 0.0),
                (1, 2, 1.0, 0.0),
                (2, 3, 1.0, 0.0),
                (1, 3, 1.0, 0.0),
            ],
        );
        assert_eq!(neighbor_components(&k4, 0).unwrap(), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn fusion_splits_in_proportion() {
        // center 0 with linked neighbors 1 and 2
        let g = graph(
            5,
            &[
                (0, 1, 1.0, 0.0),
                (0, 2, 1.0, 0.0),
                (1, 2, 1.0, 0.0),
                (1, 3, 2.0, 0.0),
                (2, 4, 0.5, 0.0),
            ],
        );
        let ai1 = attractiveness(&g, 1).unwrap(); // 1 + 1 + 2 + (0-2) = 5
        let ai2 = attractiveness(&g, 2).unwrap(); // 1 + 1 + 0.5 + (0-1) = 3.5
        assert_eq!((ai1, ai2), (5.0, 3.5));
        let fused = fused_attractiveness(&g, 0, &[2, 1]).unwrap();
        // union of both ego edge sets = all five edges
        let f = 5.5;
        assert!(close(fused[0].1, 2.0 * f * ai1 / (ai1 + ai2)));
        assert!(close(fused[1].1, 2.0 * f * ai2 / (ai1 + ai2)));
        assert!(close(fused[0].1 + fused[1].1, 2.0 * f));
        assert!(fused_attractiveness(&g, 0, &[3]).is_err());
    }

    #[test]
    fn fusion_arithmetic_example() {
        // AI'(m)=4, AI'(n)=2, AI(f)=5 gives 20/3 and 10/3
        let shares: Vec<f64> = [4.0, 2.0]
            .iter()
            .map(|&ai| 2.0 * 5.0 * (ai / 6.0))
            .collect();
        assert!(close(shares[0], 20.0 / 3.0));
        assert!(close(shares[1], 10.0 / 3.0));
    }

    #[test]
    fn recency_examples() {
        let g = graph(3, &[(0, 1, 1.0, 0.0), (0, 2, 1.0, 10.0)]);
        let pi = temporal_importance(&g, 0, TemporalMode::UseTimestamps).unwrap();
        assert!((pi[0].1 - 0.3775).abs() < 1e-4);
        assert!((pi[1].1 - 0.6225).abs() < 1e-4);
        assert!(close(pi[1].1, logistic(0.5)));
        let flat = graph(3, &[(0, 1, 1.0, 4.0), (0, 2, 1.0, 4.0)]);
        let pi = temporal_importance(&flat, 0, TemporalMode::UseTimestamps).unwrap();
        assert!(pi.iter().all(|p| p.1 == 0.5));
        let pi = temporal_importance(&g, 1, TemporalMode::UseTimestamps).unwrap();
        assert_eq!(pi, vec![(0, 0.5)]);
        let pi = temporal_importance(&g, 0, TemporalMode::Uniform).unwrap();
        assert!(pi.iter().all(|p| p.1 == 0.5));
    }

    #[test]
    fn influence_double_normalisation() {
        // center 0: neighbor 1 also links to 3 (AI 3), neighbor 2 is a leaf (AI 1)
        let g = graph(4, &[(0, 1, 1.0, 0.0), (0, 2, 1.0, 0.0), (1, 3, 2.0, 0.0)]);
        let f = combined_influence(&g, 0, TemporalMode::Uniform).unwrap();
        assert_eq!(f.attractiveness, vec![3.0, 1.0]);
        assert_eq!(f.influence, vec![1.0, 1.0 / 3.0]);
        let f = combined_influence(&g, 0, TemporalMode::UseTimestamps).unwrap();
        assert_eq!(f.temporal, vec![0.5, 0.5]);
    }

    #[test]
    fn all_zero_weights_fall_back_to_temporal_factor() {
        let g = graph(3, &[(0, 1, 0.0, 0.0), (0, 2, 0.0, 9.0)]);
        let f = combined_influence(&g, 0, TemporalMode::UseTimestamps).unwrap();
        assert_eq!(f.influence[1], 1.0);
        assert!(f.influence[0] > 0.0 && f.influence[0] < 1.0);
        let d = drift_delta(&g, 0, TemporalMode::UseTimestamps).unwrap();
        assert!(d.iter().all(|x| x.1 == 0.0));
    }

    #[test]
    fn delta_example() {
        // s(a,j)=1, s(a,k)=3 with equal influence: both move to 2
        assert_eq!(redistribute(&[1.0, 3.0], &[0.5, 0.5]), vec![2.0, 2.0]);
        let g = graph(3, &[(0, 1, 1.0, 0.0), (0, 2, 3.0, 0.0)]);
        // leaves 1 and 2 have AI 1 and 3, so influence is proportional to weight
        let d = drift_delta(&g, 0, TemporalMode::Uniform).unwrap();
        assert!(d.iter().all(|x| x.1.abs() < 1e-15));
        let d = drift_delta(&g, 1, TemporalMode::Uniform).unwrap();
        assert_eq!(d, vec![(0, 0.0)]);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let g = graph(3, &[(0, 1, 1.0, 0.0), (1, 2, 5.0, 3.0)]);
        let out = drift_iterate(&g, &DriftConfig::with_iterations(0)).unwrap();
        assert_eq!(out.edges(), g.edges());
        assert!(drift_iterate(&g, &DriftConfig::with_iterations(51)).is_err());
    }

    #[test]
    fn one_sided_uses_lower_endpoint() {
        let g = graph(3, &[(0, 1, 1.0, 0.0), (0, 2, 3.0, 0.0), (1, 2, 1.0, 5.0)]);
        let cfg = DriftConfig {
            symmetrization: Symmetrization::OneSided,
            ..DriftConfig::with_iterations(1)
        };
        let out = drift_step(&g, &cfg);
        let d0 = drift_delta(&g, 0, TemporalMode::UseTimestamps).unwrap();
        assert!(close(out.weight(0, 1).unwrap(), 1.0 + d0[0].1));
        assert!(close(out.weight(0, 2).unwrap(), 3.0 + d0[1].1));
    }
}
