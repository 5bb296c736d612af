//! Test-only brute-force references and random graph builders.
//!
//! Nothing here calls into the scoring or traversal code under test: graphs
//! are read once into dense matrices and every quantity is recomputed by
//! enumeration.
#![allow(dead_code)]

use driftlink::graph::{Edge, NodeId, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REL_TOL: f64 = 1e-12;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Dense copy of a graph: adjacency flags plus weights.
pub struct Dense {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
    pub w: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
}

impl Dense {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let n = g.node_count();
        let mut adj = vec![vec![false; n]; n];
        let mut w = vec![vec![0.0; n]; n];
        let mut t = vec![vec![0.0; n]; n];
        for e in g.edges() {
            let (u, v) = (e.u as usize, e.v as usize);
            adj[u][v] = true;
            adj[v][u] = true;
            w[u][v] = e.w;
            w[v][u] = e.w;
            t[u][v] = e.t;
            t[v][u] = e.t;
        }
        Dense { n, adj, w, t }
    }

    pub fn strength(&self, z: usize) -> f64 {
        (0..self.n)
            .filter(|&k| self.adj[z][k])
            .map(|k| self.w[z][k])
            .sum()
    }

    pub fn degree(&self, z: usize) -> usize {
        (0..self.n).filter(|&k| self.adj[z][k]).count()
    }

    /// Weight matrix raised to `k` by repeated dense multiplication.
    pub fn weight_power(&self, k: usize) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut acc: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..k {
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        s += acc[i][m] * self.w[m][j];
                    }
                    next[i][j] = s;
                }
            }
            acc = next;
        }
        acc
    }

    /// Floyd-Warshall hop distances; `usize::MAX` for unreachable.
    pub fn hops(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
            for j in 0..n {
                if self.adj[i][j] {
                    d[i][j] = 1;
                }
            }
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][m] + d[m][j] < d[i][j] {
                        d[i][j] = d[i][m] + d[m][j];
                    }
                }
            }
        }
        for row in d.iter_mut() {
            for x in row.iter_mut() {
                if *x >= inf {
                    *x = usize::MAX;
                }
            }
        }
        d
    }

    pub fn mean_reachable_hops(&self) -> f64 {
        let d = self.hops();
        let (mut sum, mut count) = (0usize, 0usize);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if d[i][j] != usize::MAX {
                    sum += d[i][j];
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            sum as f64 / count as f64
        }
    }

    fn common(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&z| z != x && z != y && self.adj[x][z] && self.adj[z][y])
            .collect()
    }

    pub fn wcn(&self, x: usize, y: usize) -> f64 {
        self.common(x, y)
            .iter()
            .map(|&z| self.w[x][z] + self.w[z][y])
            .sum()
    }

    pub fn waa(&self, x: usize, y: usize) -> f64 {
        self.common(x, y)
            .iter()
            .map(|&z| {
                let d = (1.0 + self.strength(z)).ln();
                if d > 0.0 {
                    (self.w[x][z] + self.w[z][y]) / d
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn wra(&self, x: usize, y: usize) -> f64 {
        self.common(x, y)
            .iter()
            .map(|&z| {
                let s = self.strength(z);
                if s > 0.0 {
                    (self.w[x][z] + self.w[z][y]) / s
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn wlp(&self, x: usize, y: usize, eps: f64) -> f64 {
        self.weight_power(2)[x][y] + eps * self.weight_power(3)[x][y]
    }

    /// Every shortest path from `x` to `y` as a node sequence.
    pub fn shortest_paths(&self, x: usize, y: usize) -> Vec<Vec<usize>> {
        let d = self.hops();
        let target = d[x][y];
        let mut out = Vec::new();
        if target == usize::MAX {
            return out;
        }
        let mut stack = vec![x];
        self.extend_paths(&mut stack, y, target, &mut out);
        out
    }

    fn extend_paths(&self, path: &mut Vec<usize>, y: usize, len: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() - 1 == len {
            if last == y {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..self.n {
            if self.adj[last][next] {
                path.push(next);
                self.extend_paths(path, y, len, out);
                path.pop();
            }
        }
    }

    /// WSD with the path range from `cap` or from the mean reachable distance.
    pub fn wsd(&self, x: usize, y: usize, eps: f64, cap: Option<usize>) -> f64 {
        let s_max = cap.unwrap_or_else(|| (self.mean_reachable_hops().ceil() as usize).max(2));
        let d = self.hops()[x][y];
        if d == usize::MAX || d > s_max {
            return 0.0;
        }
        let mean = if d >= 2 {
            let interior: Vec<f64> = self
                .shortest_paths(x, y)
                .iter()
                .flat_map(|p| {
                    p[1..p.len() - 1]
                        .iter()
                        .map(|&z| self.strength(z))
                        .collect::<Vec<_>>()
                })
                .collect();
            interior.iter().sum::<f64>() / interior.len() as f64
        } else {
            1.0
        };
        let raw = self.weight_power(d)[x][y] + eps * self.weight_power(d + 1)[x][y];
        if mean > 0.0 {
            raw / mean
        } else {
            0.0
        }
    }
}

impl Dense {
    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        (0..self.n).filter(|&k| self.adj[a][k]).collect()
    }

    /// Unordered edges `{p, q}` with both ends in `{j} ∪ Γ(j)`.
    pub fn ego_edges(&self, j: usize) -> Vec<(usize, usize)> {
        let mut members = self.neighbors(j);
        members.push(j);
        let mut out = Vec::new();
        for &p in &members {
            for &q in &members {
                if p < q && self.adj[p][q] {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn attractiveness(&self, j: usize) -> f64 {
        self.ego_edges(j).iter().map(|&(p, q)| self.w[p][q]).sum()
    }

    /// Components of Γ(a) by flood fill, each sorted, ordered by first member.
    pub fn neighbor_components(&self, a: usize) -> Vec<Vec<usize>> {
        let nb = self.neighbors(a);
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for &s in &nb {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let c = comp[i];
                for &k in &nb {
                    if !seen[k] && self.adj[c][k] {
                        seen[k] = true;
                        comp.push(k);
                    }
                }
                i += 1;
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Weight of the union of the members' ego edge sets.
    pub fn fused_total(&self, members: &[usize]) -> f64 {
        let mut all: Vec<(usize, usize)> =
            members.iter().flat_map(|&m| self.ego_edges(m)).collect();
        all.sort();
        all.dedup();
        all.iter().map(|&(p, q)| self.w[p][q]).sum()
    }

    /// Spatial attractiveness of each neighbor of `a`, in neighbor order.
    pub fn spatial(&self, a: usize) -> Vec<f64> {
        let nb = self.neighbors(a);
        let mut out = vec![0.0; nb.len()];
        for comp in self.neighbor_components(a) {
            let indep: Vec<f64> = comp.iter().map(|&m| self.attractiveness(m)).collect();
            let fused = if comp.len() > 1 {
                self.fused_total(&comp)
            } else {
                0.0
            };
            let total: f64 = indep.iter().sum();
            for (k, &m) in comp.iter().enumerate() {
                let pos = nb.iter().position(|&x| x == m).unwrap();
                out[pos] = if comp.len() == 1 {
                    indep[k]
                } else if total > 0.0 {
                    comp.len() as f64 * fused * indep[k] / total
                } else {
                    fused
                };
            }
        }
        out
    }

    pub fn recency(&self, a: usize, uniform: bool) -> Vec<f64> {
        let nb = self.neighbors(a);
        let ts: Vec<f64> = nb.iter().map(|&j| self.t[a][j]).collect();
        let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if uniform || nb.is_empty() || hi == lo {
            return vec![0.5; nb.len()];
        }
        let dt = (hi - lo) / nb.len() as f64;
        let mean = ts.iter().sum::<f64>() / ts.len() as f64;
        ts.iter()
            .map(|&t| 1.0 / (1.0 + (-(t - mean) / (2.0 * dt)).exp()))
            .collect()
    }

    pub fn influence(&self, a: usize, uniform: bool) -> Vec<f64> {
        let ai = self.spatial(a);
        let pi = self.recency(a, uniform);
        let max_ai = ai.iter().cloned().fold(0.0, f64::max);
        let max_pi = pi.iter().cloned().fold(0.0, f64::max);
        ai.iter()
            .zip(&pi)
            .map(|(&x, &p)| if max_ai > 0.0 { x / max_ai } else { 1.0 } * p / max_pi)
            .collect()
    }

    /// One-sided updated weight of each edge at `a`, in neighbor order.
    pub fn one_sided(&self, a: usize, uniform: bool) -> Vec<f64> {
        let nb = self.neighbors(a);
        let s: Vec<f64> = nb.iter().map(|&j| self.w[a][j]).collect();
        let total: f64 = s.iter().sum();
        let inf = self.influence(a, uniform);
        let mass: f64 = inf.iter().sum();
        if total <= 0.0 || mass <= 0.0 {
            return s;
        }
        inf.iter().map(|&x| total * x / mass).collect()
    }

    /// Weight matrix after one averaged drift round.
    pub fn drift_step(&self, uniform: bool) -> Vec<Vec<f64>> {
        let mut view = vec![vec![0.0; self.n]; self.n];
        for a in 0..self.n {
            for (j, v) in self
                .neighbors(a)
                .into_iter()
                .zip(self.one_sided(a, uniform))
            {
                view[a][j] = v;
            }
        }
        let mut out = vec![vec![0.0; self.n]; self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                if self.adj[a][b] {
                    out[a][b] = 0.5 * (view[a][b] + view[b][a]);
                }
            }
        }
        out
    }
}

/// Random simple graph on `n` nodes with edge probability `p`, weights in
/// (0, 5] (one in ten edges weighs 0 when `zeros`), timestamps in [0, 100).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, zeros: bool) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(p) {
                let w = if zeros && rng.gen_bool(0.1) {
                    0.0
                } else {
                    rng.gen_range(0.01..5.0)
                };
                let t = rng.gen_range(0.0..100.0f64).floor();
                edges.push(Edge { u, v, w, t });
            }
        }
    }
    WeightedGraph::from_parts((0..n as u32).collect(), edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_graph(n: usize, pairs: &[(u32, u32)]) -> WeightedGraph {
    let edges = pairs
        .iter()
        .map(|&(u, v)| Edge {
            u,
            v,
            w: 1.0,
            t: 0.0,
        })
        .collect();
    WeightedGraph::from_parts((0..n as u32).collect(), edges).unwrap()
}
