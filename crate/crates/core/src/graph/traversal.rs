use rayon::prelude::*;

use super::{canonical, NodeId, WeightedGraph};
use crate::error::{Error, Result};

/// Distance marker for nodes a BFS never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Hop distances from `src` to every node.
pub fn bfs_distances(g: &WeightedGraph, src: NodeId) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.node_count()];
    let mut queue = Vec::with_capacity(g.node_count());
    bfs_into(g, src, &mut dist, &mut queue);
    dist
}

/// BFS reusing caller buffers; `dist` must be all `UNREACHABLE` on entry.
/// Leaves the visit order in `queue`.
fn bfs_into(g: &WeightedGraph, src: NodeId, dist: &mut [u32], queue: &mut Vec<NodeId>) {
    queue.clear();
    dist[src as usize] = 0;
    queue.push(src);
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let d = dist[x as usize] + 1;
        for &y in g.neighbors(x) {
            if dist[y as usize] == UNREACHABLE {
                dist[y as usize] = d;
                queue.push(y);
            }
        }
    }
}

/// Shortest hop count between `x` and `y`; `None` when unreachable.
pub fn hop_distance(g: &WeightedGraph, x: NodeId, y: NodeId) -> Result<Option<u32>> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y {
        return Ok(Some(0));
    }
    let d = bfs_distances(g, x)[y as usize];
    Ok((d != UNREACHABLE).then_some(d))
}

/// (sum of distances, reachable ordered pairs, unreachable ordered pairs)
fn distance_totals(g: &WeightedGraph) -> (u64, u64, u64) {
    let n = g.node_count();
    (0..n as NodeId)
        .into_par_iter()
        .map_init(
            || (vec![UNREACHABLE; n], Vec::with_capacity(n)),
            |(dist, queue), s| {
                bfs_into(g, s, dist, queue);
                let sum: u64 = queue.iter().map(|&x| dist[x as usize] as u64).sum();
                let reached = queue.len() as u64 - 1;
                for &x in queue.iter() {
                    dist[x as usize] = UNREACHABLE;
                }
                (sum, reached, (n as u64 - 1) - reached)
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

/// Average hop distance over all unordered pairs of distinct nodes.
///
/// Fails on a disconnected graph; call it on the giant component.
pub fn mean_shortest_distance(g: &WeightedGraph) -> Result<f64> {
    if g.node_count() < 2 {
        return Ok(0.0);
    }
    let (sum, reached, missing) = distance_totals(g);
    if missing > 0 {
        return Err(Error::Disconnected);
    }
    Ok(sum as f64 / reached as f64)
}

/// Average hop distance over reachable pairs only; 0 when no pair is
/// reachable. Equals [`mean_shortest_distance`] on connected graphs.
pub fn mean_reachable_distance(g: &WeightedGraph) -> f64 {
    if g.node_count() < 2 {
        return 0.0;
    }
    let (sum, reached, _) = distance_totals(g);
    if reached == 0 {
        0.0
    } else {
        sum as f64 / reached as f64
    }
}

/// Indices of the edges with both endpoints in `{j} ∪ Γ(j)`, ascending.
pub fn ego_edge_set(g: &WeightedGraph, j: NodeId) -> Result<Vec<usize>> {
    g.check_node(j)?;
    let nb = g.neighbors(j);
    let mut out: Vec<usize> = g.neighbor_edges(j).iter().map(|&e| e as usize).collect();
    for &m in nb {
        for (&n, &e) in g.neighbors(m).iter().zip(g.neighbor_edges(m)) {
            if n > m && nb.binary_search(&n).is_ok() {
                out.push(e as usize);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Total weight of all length-`length` walks between `x` and `y`, i.e. the
/// `(x, y)` entry of the weight matrix raised to `length`. Computed by sparse
/// expansion from the smaller endpoint, so the result is symmetric bit for bit.
pub fn walk_weight(g: &WeightedGraph, x: NodeId, y: NodeId, length: usize) -> Result<f64> {
    g.check_node(x)?;
    g.check_node(y)?;
    if !(2..=5).contains(&length) {
        return Err(Error::WalkLength(length));
    }
    let (a, b) = canonical(x, y);
    let mut levels = WalkLevels::new(g.node_count());
    levels.expand(g, a, length);
    Ok(levels.value(length, b))
}

/// Dense per-level walk vectors from one source node, reused across sources.
///
/// Level `k` holds row `source` of `W^k`. Each level's touched list is kept
/// sorted, so accumulation order (and therefore every rounding) depends only
/// on the graph.
#[derive(Debug, Default)]
pub(crate) struct WalkLevels {
    n: usize,
    vals: Vec<Vec<f64>>,
    seen: Vec<Vec<bool>>,
    touched: Vec<Vec<NodeId>>,
    used: usize,
}

impl WalkLevels {
    pub(crate) fn new(n: usize) -> Self {
        WalkLevels {
            n,
            ..Default::default()
        }
    }

    fn ensure(&mut self, levels: usize) {
        while self.vals.len() < levels {
            self.vals.push(vec![0.0; self.n]);
            self.seen.push(vec![false; self.n]);
            self.touched.push(Vec::new());
        }
    }

    fn clear(&mut self) {
        for k in 0..self.used {
            for &y in &self.touched[k] {
                self.vals[k][y as usize] = 0.0;
                self.seen[k][y as usize] = false;
            }
            self.touched[k].clear();
        }
        self.used = 0;
    }

    /// Fills levels `0..=max_len` for walks starting at `src`.
    pub(crate) fn expand(&mut self, g: &WeightedGraph, src: NodeId, max_len: usize) {
        self.clear();
        self.ensure(max_len + 1);
        self.vals[0][src as usize] = 1.0;
        self.seen[0][src as usize] = true;
        self.touched[0].push(src);
        self.used = 1;
        for k in 1..=max_len {
            self.push_level(g, k);
        }
    }

    fn push_level(&mut self, g: &WeightedGraph, k: usize) {
        let (lower, upper) = self.vals.split_at_mut(k);
        let (prev, cur) = (&lower[k - 1], &mut upper[0]);
        let seen = &mut self.seen[k];
        let (tl, tu) = self.touched.split_at_mut(k);
        let (from, to) = (&tl[k - 1], &mut tu[0]);
        for &z in from {
            let vz = prev[z as usize];
            for (y, w) in g.adjacency(z) {
                let yi = y as usize;
                if !seen[yi] {
                    seen[yi] = true;
                    to.push(y);
                }
                cur[yi] += vz * w;
            }
        }
        if to.len() * 16 > self.n {
            to.clear();
            to.extend((0..self.n as NodeId).filter(|&y| seen[y as usize]));
        } else {
            to.sort_unstable();
        }
        self.used = self.used.max(k + 1);
    }

    #[inline]
    pub(crate) fn value(&self, len: usize, y: NodeId) -> f64 {
        self.vals[len][y as usize]
    }

    pub(crate) fn touched(&self, len: usize) -> &[NodeId] {
        &self.touched[len]
    }

    /// Level `len` entry at `y` pulled from level `len - 1`, for callers that
    /// only need a few entries of the last level. Bit-identical to pushing,
    /// since both sum neighbor contributions in ascending order.
    #[inline]
    pub(crate) fn pull(&self, g: &WeightedGraph, len: usize, y: NodeId) -> f64 {
        let prev = &self.vals[len - 1];
        let mut acc = 0.0;
        for (z, w) in g.adjacency(y) {
            if self.seen[len - 1][z as usize] {
                acc += prev[z as usize] * w;
            }
        }
        acc
    }
}
