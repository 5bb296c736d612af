//! Weighted local similarity indices.
//!
//! All indices are evaluated one source row at a time: [`Scorer::row`] fills
//! the scores of every node reachable from `x` within the index's range. A
//! pair is always scored from its smaller endpoint, so single-pair queries,
//! [`score_pairs`] and the evaluation pipeline see bit-identical values and
//! every index is exactly symmetric.

mod ranking;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    canonical, mean_reachable_distance, NodeId, Pair, WalkLevels, WeightedGraph, UNREACHABLE,
};

use ranking::TopK;
pub use ranking::{rank_cmp, ScoredPair, ScoredPairList};

/// Default weight of the longer walks in WLP and WSD.
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexTag {
    Wcn,
    Waa,
    Wra,
    Wlp,
    Wsd,
}

impl IndexTag {
    pub const ALL: [IndexTag; 5] = [
        IndexTag::Wcn,
        IndexTag::Waa,
        IndexTag::Wra,
        IndexTag::Wlp,
        IndexTag::Wsd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexTag::Wcn => "WCN",
            IndexTag::Waa => "WAA",
            IndexTag::Wra => "WRA",
            IndexTag::Wlp => "WLP",
            IndexTag::Wsd => "WSD",
        }
    }
}

impl fmt::Display for IndexTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown index `{s}` (valid: WCN, WAA, WRA, WLP, WSD)"
                ))
            })
    }
}

/// An index together with its free parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexKind {
    pub tag: IndexTag,
    pub epsilon: f64,
    /// Fixed WSD path range instead of `max(ceil(<d>), 2)`.
    pub s_cap_override: Option<u32>,
}

impl IndexKind {
    pub fn new(tag: IndexTag) -> Self {
        IndexKind {
            tag,
            epsilon: DEFAULT_EPSILON,
            s_cap_override: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_path_range(mut self, cap: u32) -> Self {
        self.s_cap_override = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be a finite non-negative number, got {}",
                self.epsilon
            )));
        }
        if self.s_cap_override == Some(0) {
            return Err(Error::InvalidParameter(
                "path range must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl From<IndexTag> for IndexKind {
    fn from(tag: IndexTag) -> Self {
        IndexKind::new(tag)
    }
}

/// WSD path range for a graph with mean hop distance `mean_distance`.
pub fn path_range(mean_distance: f64) -> u32 {
    (mean_distance.ceil() as u32).max(2)
}

/// Scores pairs of one graph under one index.
#[derive(Debug, Clone)]
pub struct Scorer<'g> {
    g: &'g WeightedGraph,
    kind: IndexKind,
    s_max: u32,
    log_strength: Vec<f64>,
}

impl<'g> Scorer<'g> {
    /// Builds a scorer; for WSD without an explicit range this runs an
    /// all-pairs BFS to get the mean distance.
    pub fn new(g: &'g WeightedGraph, kind: IndexKind) -> Result<Self> {
        let needs_distance = kind.tag == IndexTag::Wsd && kind.s_cap_override.is_none();
        let mean = if needs_distance {
            mean_reachable_distance(g)
        } else {
            0.0
        };
        Self::with_mean_distance(g, kind, mean)
    }

    /// Builds a scorer with a precomputed mean hop distance (only WSD uses it).
    pub fn with_mean_distance(
        g: &'g WeightedGraph,
        kind: IndexKind,
        mean_distance: f64,
    ) -> Result<Self> {
        kind.validate()?;
        let s_max = kind
            .s_cap_override
            .unwrap_or_else(|| path_range(mean_distance));
        let log_strength = if kind.tag == IndexTag::Waa {
            g.strengths().iter().map(|s| s.ln_1p()).collect()
        } else {
            Vec::new()
        };
        Ok(Scorer {
            g,
            kind,
            s_max,
            log_strength,
        })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.g
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    /// Longest shortest-path distance WSD still scores.
    pub fn path_range(&self) -> u32 {
        self.s_max
    }

    pub fn workspace(&self) -> RowWorkspace {
        RowWorkspace::new(self.g.node_count())
    }

    /// Score of the unordered pair `{x, y}`.
    pub fn score(&self, x: NodeId, y: NodeId) -> Result<f64> {
        let mut ws = self.workspace();
        self.score_with(x, y, &mut ws)
    }

    pub fn score_with(&self, x: NodeId, y: NodeId, ws: &mut RowWorkspace) -> Result<f64> {
        self.g.check_node(x)?;
        self.g.check_node(y)?;
        if x == y {
            return Err(Error::InvalidParameter(format!(
                "pair ({x}, {x}) is not a node pair"
            )));
        }
        let (a, b) = canonical(x, y);
        self.row(a, ws);
        Ok(ws.get(b))
    }

    /// The WSD combination `(W^s + ε·W^(s+1)) / mean_strength` evaluated at a
    /// caller-chosen distance and denominator, bypassing the BFS. Used to check
    /// the algebraic reductions of the index.
    pub fn structure_score_at(
        &self,
        x: NodeId,
        y: NodeId,
        distance: usize,
        mean_strength: f64,
    ) -> Result<f64> {
        self.g.check_node(x)?;
        self.g.check_node(y)?;
        if distance == 0 {
            return Err(Error::InvalidParameter("distance must be positive".into()));
        }
        let (a, b) = canonical(x, y);
        let mut walks = WalkLevels::new(self.g.node_count());
        walks.expand(self.g, a, distance + 1);
        let raw = walks.value(distance, b) + self.kind.epsilon * walks.value(distance + 1, b);
        Ok(raw / mean_strength)
    }

    /// Fills `ws` with the scores of `x` against every node in range.
    /// Nodes not listed in [`RowWorkspace::targets`] score 0.
    pub fn row(&self, x: NodeId, ws: &mut RowWorkspace) {
        ws.reset();
        match self.kind.tag {
            IndexTag::Wcn | IndexTag::Waa | IndexTag::Wra => self.neighbor_row(x, ws),
            IndexTag::Wlp => self.local_path_row(x, ws),
            IndexTag::Wsd => self.structure_row(x, ws),
        }
        ws.finish();
    }

    fn neighbor_row(&self, x: NodeId, ws: &mut RowWorkspace) {
        let g = self.g;
        for (z, wxz) in g.adjacency(x) {
            let sz = g.strength(z);
            // the numerator never exceeds s(z), so s(z) = 0 means a zero term
            let denom = match self.kind.tag {
                IndexTag::Wcn => 1.0,
                IndexTag::Waa => self.log_strength[z as usize],
                _ => sz,
            };
            for (y, wzy) in g.adjacency(z) {
                if y == x {
                    continue;
                }
                let term = wxz + wzy;
                let contribution = if denom > 0.0 { term / denom } else { 0.0 };
                ws.add(y, contribution);
            }
        }
    }

    fn local_path_row(&self, x: NodeId, ws: &mut RowWorkspace) {
        let eps = self.kind.epsilon;
        ws.walks.expand(self.g, x, 3);
        let RowWorkspace {
            walks,
            vals,
            seen,
            touched,
            ..
        } = ws;
        for len in [2, 3] {
            for &y in walks.touched(len) {
                if y != x && !seen[y as usize] {
                    seen[y as usize] = true;
                    touched.push(y);
                    vals[y as usize] = walks.value(2, y) + eps * walks.value(3, y);
                }
            }
        }
    }

    fn structure_row(&self, x: NodeId, ws: &mut RowWorkspace) {
        let g = self.g;
        let eps = self.kind.epsilon;
        let s_max = self.s_max as usize;
        ws.shortest_paths(g, x, s_max);
        ws.walks.expand(g, x, s_max);
        let RowWorkspace {
            walks,
            vals,
            seen,
            touched,
            dist,
            paths,
            interior,
            reached,
            ..
        } = ws;
        for &y in reached.iter() {
            let yi = y as usize;
            let d = dist[yi] as usize;
            if d == 0 {
                continue;
            }
            let next = if d == s_max {
                walks.pull(g, d + 1, y)
            } else {
                walks.value(d + 1, y)
            };
            // adjacent pairs have no intermediate nodes; leave them unnormalised
            let mean_strength = if d >= 2 {
                interior[yi] / (paths[yi] * (d - 1) as f64)
            } else {
                1.0
            };
            let raw = walks.value(d, y) + eps * next;
            let score = if mean_strength > 0.0 {
                raw / mean_strength
            } else {
                0.0
            };
            seen[yi] = true;
            touched.push(y);
            vals[yi] = score;
        }
    }
}

/// Per-thread scratch space for [`Scorer::row`].
#[derive(Debug)]
pub struct RowWorkspace {
    vals: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<NodeId>,
    walks: WalkLevels,
    dist: Vec<u32>,
    paths: Vec<f64>,
    interior: Vec<f64>,
    reached: Vec<NodeId>,
    frontier: Vec<NodeId>,
}

impl RowWorkspace {
    pub fn new(n: usize) -> Self {
        RowWorkspace {
            vals: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
            walks: WalkLevels::new(n),
            dist: Vec::new(),
            paths: Vec::new(),
            interior: Vec::new(),
            reached: Vec::new(),
            frontier: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &y in &self.touched {
            self.vals[y as usize] = 0.0;
            self.seen[y as usize] = false;
        }
        self.touched.clear();
    }

    #[inline]
    fn add(&mut self, y: NodeId, v: f64) {
        let yi = y as usize;
        if !self.seen[yi] {
            self.seen[yi] = true;
            self.touched.push(y);
        }
        self.vals[yi] += v;
    }

    fn finish(&mut self) {
        self.touched.sort_unstable();
    }

    /// Score of the current row's source against `y`.
    #[inline]
    pub fn get(&self, y: NodeId) -> f64 {
        self.vals[y as usize]
    }

    /// Nodes with a computed score, ascending. Everything else scores 0.
    pub fn targets(&self) -> &[NodeId] {
        &self.touched
    }

    /// BFS to depth `max_depth` recording, per reached node, the number of
    /// shortest paths from `src` and the summed strength of their interior
    /// nodes (each occurrence on each path counted).
    fn shortest_paths(&mut self, g: &WeightedGraph, src: NodeId, max_depth: usize) {
        let n = g.node_count();
        if self.dist.len() != n {
            self.dist = vec![UNREACHABLE; n];
            self.paths = vec![0.0; n];
            self.interior = vec![0.0; n];
        }
        for &y in &self.reached {
            self.dist[y as usize] = UNREACHABLE;
            self.paths[y as usize] = 0.0;
            self.interior[y as usize] = 0.0;
        }
        self.reached.clear();
        self.frontier.clear();

        let s = src as usize;
        self.dist[s] = 0;
        self.paths[s] = 1.0;
        self.reached.push(src);
        self.frontier.push(src);
        let mut next = Vec::new();
        for depth in 1..=max_depth as u32 {
            next.clear();
            for &u in &self.frontier {
                let ui = u as usize;
                let carried_paths = self.paths[ui];
                let carried_interior = if u == src {
                    0.0
                } else {
                    self.interior[ui] + carried_paths * g.strength(u)
                };
                for &v in g.neighbors(u) {
                    let vi = v as usize;
                    if self.dist[vi] == UNREACHABLE {
                        self.dist[vi] = depth;
                        next.push(v);
                        self.reached.push(v);
                    }
                    if self.dist[vi] == depth {
                        self.paths[vi] += carried_paths;
                        self.interior[vi] += carried_interior;
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            std::mem::swap(&mut self.frontier, &mut next);
        }
    }
}

fn scorer_for(g: &WeightedGraph, kind: IndexKind) -> Result<Scorer<'_>> {
    Scorer::new(g, kind)
}

pub fn score_wcn(g: &WeightedGraph, x: NodeId, y: NodeId) -> Result<f64> {
    scorer_for(g, IndexTag::Wcn.into())?.score(x, y)
}

pub fn score_waa(g: &WeightedGraph, x: NodeId, y: NodeId) -> Result<f64> {
    scorer_for(g, IndexTag::Waa.into())?.score(x, y)
}

pub fn score_wra(g: &WeightedGraph, x: NodeId, y: NodeId) -> Result<f64> {
    scorer_for(g, IndexTag::Wra.into())?.score(x, y)
}

pub fn score_wlp(g: &WeightedGraph, x: NodeId, y: NodeId, epsilon: f64) -> Result<f64> {
    scorer_for(g, IndexKind::new(IndexTag::Wlp).with_epsilon(epsilon))?.score(x, y)
}

/// WSD with the path range derived from the graph's mean hop distance.
pub fn score_wsd(g: &WeightedGraph, x: NodeId, y: NodeId, epsilon: f64) -> Result<f64> {
    scorer_for(g, IndexKind::new(IndexTag::Wsd).with_epsilon(epsilon))?.score(x, y)
}

/// Scores `pairs` (any orientation; duplicates collapse) and ranks them.
pub fn score_pairs(g: &WeightedGraph, kind: IndexKind, pairs: &[Pair]) -> Result<ScoredPairList> {
    let scorer = Scorer::new(g, kind)?;
    score_pairs_with(&scorer, pairs)
}

pub fn score_pairs_with(scorer: &Scorer<'_>, pairs: &[Pair]) -> Result<ScoredPairList> {
    let g = scorer.graph();
    let mut canon = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        g.check_node(x)?;
        g.check_node(y)?;
        if x == y {
            return Err(Error::InvalidParameter(format!(
                "pair ({x}, {x}) is not a node pair"
            )));
        }
        canon.push(canonical(x, y));
    }
    canon.sort_unstable();
    canon.dedup();

    let groups: Vec<&[Pair]> = canon.chunk_by(|a, b| a.0 == b.0).collect();
    let entries: Vec<ScoredPair> = groups
        .par_iter()
        .map_init(
            || scorer.workspace(),
            |ws, group| {
                scorer.row(group[0].0, ws);
                group
                    .iter()
                    .map(|&(x, y)| ScoredPair {
                        x,
                        y,
                        score: ws.get(y),
                    })
                    .collect::<Vec<_>>()
            },
        )
        .flatten()
        .collect();
    Ok(ScoredPairList::from_entries(entries))
}

/// The first `k` non-edges of the graph in ranking order. Every pair not
/// adjacent in the graph is a candidate, so pairs scoring 0 fill the tail in
/// ascending pair order once the positive scores run out.
pub fn top_candidates(scorer: &Scorer<'_>, k: usize) -> ScoredPairList {
    let scan = scan_rows(scorer, k, &[]);
    ScoredPairList::from_entries(scan.top)
}

/// Output of [`scan_rows`].
pub(crate) struct RowScan {
    /// Best `k` non-edges in ranking order, zero-score filler included.
    pub top: Vec<ScoredPair>,
    /// Scores of the requested pairs, aligned with the request slice.
    pub requested: Vec<f64>,
}

/// One pass over source rows that both ranks the top `k` non-edges and
/// scores a batch of requested pairs. `requests` must be canonical, sorted
/// and unique.
pub(crate) fn scan_rows(scorer: &Scorer<'_>, k: usize, requests: &[Pair]) -> RowScan {
    let g = scorer.graph();
    let n = g.node_count();
    let mut starts = vec![0usize; n + 1];
    for &(x, _) in requests {
        starts[x as usize + 1] += 1;
    }
    for i in 0..n {
        starts[i + 1] += starts[i];
    }
    let sources: Vec<NodeId> = if k > 0 {
        g.nodes().collect()
    } else {
        g.nodes()
            .filter(|&x| starts[x as usize + 1] > starts[x as usize])
            .collect()
    };

    struct Acc {
        rows: Vec<(NodeId, Vec<f64>)>,
        top: TopK,
    }
    let acc = sources
        .par_iter()
        .map_init(
            || scorer.workspace(),
            |ws, &x| {
                scorer.row(x, ws);
                let wanted = &requests[starts[x as usize]..starts[x as usize + 1]];
                let vals: Vec<f64> = wanted.iter().map(|&(_, y)| ws.get(y)).collect();
                let mut cands = Vec::new();
                if k > 0 {
                    let nb = g.neighbors(x);
                    for &y in ws.targets() {
                        let score = ws.get(y);
                        if y > x && score > 0.0 && nb.binary_search(&y).is_err() {
                            cands.push(ScoredPair { x, y, score });
                        }
                    }
                }
                (x, vals, cands)
            },
        )
        .fold(
            || Acc {
                rows: Vec::new(),
                top: TopK::new(k),
            },
            |mut acc, (x, vals, cands)| {
                if !vals.is_empty() {
                    acc.rows.push((x, vals));
                }
                cands.into_iter().for_each(|c| acc.top.offer(c));
                acc
            },
        )
        .reduce(
            || Acc {
                rows: Vec::new(),
                top: TopK::new(k),
            },
            |mut a, b| {
                a.rows.extend(b.rows);
                a.top = a.top.merge(b.top);
                a
            },
        );

    let mut rows = acc.rows;
    rows.sort_unstable_by_key(|r| r.0);
    let requested = rows.into_iter().flat_map(|r| r.1).collect();
    let mut top = acc.top.into_sorted();
    if top.len() < k {
        fill_with_zeros(g, &mut top, k);
    }
    RowScan { top, requested }
}

/// Appends zero-score non-edges in ascending pair order, skipping pairs
/// already in `top`, until `top` holds `k` entries or candidates run out.
fn fill_with_zeros(g: &WeightedGraph, top: &mut Vec<ScoredPair>, k: usize) {
    let mut taken: Vec<Pair> = top.iter().map(|p| (p.x, p.y)).collect();
    taken.sort_unstable();
    let n = g.node_count() as NodeId;
    for x in 0..n {
        let nb = g.neighbors(x);
        for y in x + 1..n {
            if top.len() == k {
                return;
            }
            if nb.binary_search(&y).is_err() && taken.binary_search(&(x, y)).is_err() {
                top.push(ScoredPair { x, y, score: 0.0 });
            }
        }
    }
}
