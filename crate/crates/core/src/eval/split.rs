use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{
    build_graph, canonical, giant_component, Aggregation, NodeId, Pair, TemporalEdge, WeightedGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Temporal,
    Random,
}

impl SplitKind {
    pub fn name(self) -> &'static str {
        match self {
            SplitKind::Temporal => "temporal",
            SplitKind::Random => "random",
        }
    }
}

/// Known links and held-out links over one node set.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub kind: SplitKind,
    /// Connected training graph; its nodes are the retained node set.
    pub train: WeightedGraph,
    /// Held-out pairs in `train`'s local ids, canonical, sorted and unique.
    /// None of them is a training edge.
    pub probe: Vec<Pair>,
}

impl SplitResult {
    pub fn retained_nodes(&self) -> impl Iterator<Item = NodeId> {
        self.train.nodes()
    }

    /// Number of unordered pairs over the retained nodes.
    pub fn universe_size(&self) -> u64 {
        let n = self.train.node_count() as u64;
        n * n.saturating_sub(1) / 2
    }
}

fn check_fraction(train_fraction: f64) -> Result<()> {
    if train_fraction > 0.0 && train_fraction < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )))
    }
}

/// Earliest `train_fraction` of the interactions (stable by timestamp) form
/// the training graph, reduced to its giant component; later interactions
/// become probe pairs unless they repeat a training edge or touch a node
/// outside the training graph.
pub fn temporal_split(
    edges: &[TemporalEdge],
    train_fraction: f64,
    aggregation: Aggregation,
) -> Result<SplitResult> {
    check_fraction(train_fraction)?;
    if edges.len() < 2 || edges.iter().all(|e| e.t == edges[0].t) {
        return Err(Error::NoTemporalSpread);
    }
    let mut order: Vec<&TemporalEdge> = edges.iter().collect();
    order.sort_by(|a, b| a.t.total_cmp(&b.t));
    let cut = ((train_fraction * order.len() as f64).round() as usize).clamp(1, order.len() - 1);

    let early: Vec<TemporalEdge> = order[..cut].iter().map(|e| **e).collect();
    let train = giant_component(&build_graph(&early, aggregation));
    let mut probe: Vec<Pair> = order[cut..]
        .iter()
        .filter_map(|e| {
            let (x, y) = (train.local_id(e.u)?, train.local_id(e.v)?);
            (x != y && !train.has_edge(x, y)).then(|| canonical(x, y))
        })
        .collect();
    probe.sort_unstable();
    probe.dedup();
    if probe.is_empty() {
        return Err(Error::EmptyProbe);
    }
    Ok(SplitResult {
        kind: SplitKind::Temporal,
        train,
        probe,
    })
}

/// Random hold-out of `round((1 − train_fraction)·M)` simple edges of the
/// giant component. Edges are visited in a seeded random order and an edge
/// is held out only if the remaining graph stays connected.
pub fn random_split(
    edges: &[TemporalEdge],
    train_fraction: f64,
    seed: u64,
    aggregation: Aggregation,
) -> Result<SplitResult> {
    check_fraction(train_fraction)?;
    let full = giant_component(&build_graph(edges, aggregation));
    let wanted = ((1.0 - train_fraction) * full.edge_count() as f64).round() as usize;
    if wanted == 0 {
        return Err(Error::EmptyProbe);
    }
    let removed = remove_keeping_connected(&full, wanted, seed)?;
    let probe = full
        .edges()
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| r)
        .map(|(e, _)| (e.u, e.v))
        .collect();
    Ok(SplitResult {
        kind: SplitKind::Random,
        train: full.without_edges(&removed),
        probe,
    })
}

/// Drops `round(ratio·M)` edges without disconnecting the graph.
///
/// The visiting order depends only on `seed` and the graph, so for one seed
/// the links dropped at a smaller ratio are a subset of those dropped at a
/// larger one.
pub fn delete_links(train: &WeightedGraph, ratio: f64, seed: u64) -> Result<WeightedGraph> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::InvalidParameter(format!(
            "deletion ratio must be in [0, 1), got {ratio}"
        )));
    }
    let wanted = (ratio * train.edge_count() as f64).round() as usize;
    if wanted == 0 {
        return Ok(train.clone());
    }
    let removed = remove_keeping_connected(train, wanted, seed)?;
    Ok(train.without_edges(&removed))
}

/// Marks `wanted` edges for removal, visiting edges in seeded random order
/// and skipping any whose removal would separate its endpoints.
fn remove_keeping_connected(g: &WeightedGraph, wanted: usize, seed: u64) -> Result<Vec<bool>> {
    let m = g.edge_count();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut removed = vec![false; m];
    let mut search = Reach::new(g.node_count());
    let mut count = 0;
    for e in order {
        if count == wanted {
            break;
        }
        removed[e] = true;
        let edge = g.edge(e);
        if search.connected(g, &removed, edge.u, edge.v) {
            count += 1;
        } else {
            removed[e] = false;
        }
    }
    if count < wanted {
        return Err(Error::Connectivity {
            budget: m,
            removed: count,
            wanted,
        });
    }
    Ok(removed)
}

/// Reusable early-exit BFS over the edges not marked removed.
struct Reach {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<NodeId>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Reach {
            mark: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    fn connected(&mut self, g: &WeightedGraph, removed: &[bool], src: NodeId, dst: NodeId) -> bool {
        self.epoch += 1;
        self.queue.clear();
        self.queue.push(src);
        self.mark[src as usize] = self.epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for (&v, &e) in g.neighbors(u).iter().zip(g.neighbor_edges(u)) {
                if removed[e as usize] || self.mark[v as usize] == self.epoch {
                    continue;
                }
                if v == dst {
                    return true;
                }
                self.mark[v as usize] = self.epoch;
                self.queue.push(v);
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: u32, v: u32, t: f64) -> TemporalEdge {
        TemporalEdge::new(u, v, 1.0, t)
    }

    #[test]
    fn temporal_counting() {
        // nine train interactions on a path 0..9 plus one new chord
        let mut edges: Vec<TemporalEdge> = (0..9).map(|i| e(i, i + 1, i as f64)).collect();
        edges.push(e(0, 5, 20.0));
        let s = temporal_split(&edges, 0.9, Aggregation::CountInteractions).unwrap();
        assert_eq!(s.train.edge_count(), 9);
        assert_eq!(s.probe, vec![(0, 5)]);
        assert_eq!(s.universe_size(), 45);
    }

    #[test]
    fn temporal_drops_repeats_and_new_nodes() {
        let edges = vec![
            e(0, 1, 0.0),
            e(1, 2, 1.0),
            e(2, 3, 2.0),
            e(1, 0, 3.0),  // repeats a train edge
            e(3, 99, 4.0), // new node
            e(0, 3, 5.0),
        ];
        let s = temporal_split(&edges, 0.5, Aggregation::CountInteractions).unwrap();
        assert_eq!(s.probe, vec![(0, 3)]);
        let only_repeats = vec![e(0, 1, 0.0), e(1, 2, 1.0), e(0, 1, 2.0)];
        assert!(matches!(
            temporal_split(&only_repeats, 0.6, Aggregation::CountInteractions),
            Err(Error::EmptyProbe)
        ));
        let flat = vec![e(0, 1, 3.0), e(1, 2, 3.0)];
        assert!(matches!(
            temporal_split(&flat, 0.5, Aggregation::CountInteractions),
            Err(Error::NoTemporalSpread)
        ));
    }

    #[test]
    fn random_split_keeps_train_connected() {
        let mut edges = Vec::new();
        for u in 0..8 {
            for v in u + 1..8 {
                edges.push(e(u, v, 0.0));
            }
        }
        let a = random_split(&edges, 0.9, 3, Aggregation::CountInteractions).unwrap();
        let b = random_split(&edges, 0.9, 3, Aggregation::CountInteractions).unwrap();
        assert_eq!(a.probe, b.probe);
        assert_eq!(a.probe.len(), 3);
        assert!(a.train.is_connected());
        assert_eq!(a.train.node_count(), 8);
        assert!(a.probe.iter().all(|&(x, y)| !a.train.has_edge(x, y)));
        assert!(random_split(&edges, 1.0, 3, Aggregation::CountInteractions).is_err());
    }

    #[test]
    fn tree_cannot_be_split() {
        let path: Vec<TemporalEdge> = (0..20).map(|i| e(i, i + 1, 0.0)).collect();
        let err = random_split(&path, 0.9, 1, Aggregation::CountInteractions).unwrap_err();
        assert!(matches!(
            err,
            Error::Connectivity {
                removed: 0,
                wanted: 2,
                ..
            }
        ));
    }

    #[test]
    fn deletion_is_nested_and_connected() {
        let mut edges = Vec::new();
        for u in 0..10 {
            for v in u + 1..10 {
                edges.push(e(u, v, 0.0));
            }
        }
        let g = build_graph(&edges, Aggregation::CountInteractions);
        assert_eq!(delete_links(&g, 0.0, 9).unwrap().edges(), g.edges());
        let half = delete_links(&g, 0.5, 9).unwrap();
        assert_eq!(half.edge_count(), 22);
        assert!(half.is_connected());
        let fifth = delete_links(&g, 0.2, 9).unwrap();
        assert!(half.edges().iter().all(|x| fifth.has_edge(x.u, x.v)));
    }
}
