use super::{mean_shortest_distance, NodeId, WeightedGraph};
use crate::error::Result;

/// Structural summary of a (connected) network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkStats {
    pub nodes: usize,
    pub links: usize,
    pub mean_degree: f64,
    pub mean_distance: f64,
    pub clustering: f64,
    pub weighted_clustering: f64,
    /// Degree assortativity; NaN when all edge endpoints share one degree.
    pub assortativity: f64,
    pub heterogeneity: f64,
}

/// Computes N, M, ⟨k⟩, ⟨d⟩, C, C_w (Barrat), r (Newman) and H = ⟨k²⟩/⟨k⟩².
///
/// Expects the giant component; a disconnected graph is an error.
pub fn network_stats(g: &WeightedGraph) -> Result<NetworkStats> {
    let n = g.node_count();
    let m = g.edge_count();
    let mean_distance = mean_shortest_distance(g)?;
    let nf = n.max(1) as f64;

    let mut clustering = 0.0;
    let mut weighted = 0.0;
    for i in g.nodes() {
        let (c, cw) = local_clustering(g, i);
        clustering += c;
        weighted += cw;
    }

    let k1: f64 = g.nodes().map(|x| g.degree(x) as f64).sum::<f64>() / nf;
    let k2: f64 = g.nodes().map(|x| (g.degree(x) as f64).powi(2)).sum::<f64>() / nf;

    Ok(NetworkStats {
        nodes: n,
        links: m,
        mean_degree: 2.0 * m as f64 / nf,
        mean_distance,
        clustering: clustering / nf,
        weighted_clustering: weighted / nf,
        assortativity: assortativity(g),
        heterogeneity: if k1 > 0.0 { k2 / (k1 * k1) } else { f64::NAN },
    })
}

/// (unweighted, Barrat-weighted) local clustering of node `i`; 0 below degree 2.
fn local_clustering(g: &WeightedGraph, i: NodeId) -> (f64, f64) {
    let k = g.degree(i);
    if k < 2 {
        return (0.0, 0.0);
    }
    let nb = g.neighbors(i);
    let w = g.neighbor_weights(i);
    let mut triangles = 0usize;
    let mut weight_sum = 0.0;
    for (a, &j) in nb.iter().enumerate() {
        for &h in g.neighbors(j) {
            if h > j {
                if let Ok(b) = nb.binary_search(&h) {
                    triangles += 1;
                    weight_sum += w[a] + w[b];
                }
            }
        }
    }
    let wedges = k * (k - 1) / 2;
    let c = triangles as f64 / wedges as f64;
    // Barrat sums ordered (j, h) pairs with (w_ij + w_ih)/2, i.e. once per
    // unordered triangle with the full sum.
    let s = g.strength(i);
    let cw = if s > 0.0 {
        weight_sum / (s * (k - 1) as f64)
    } else {
        0.0
    };
    (c, cw)
}

fn assortativity(g: &WeightedGraph) -> f64 {
    let m = g.edge_count();
    if m == 0 {
        return f64::NAN;
    }
    let (mut prod, mut half_sum, mut half_sq) = (0.0, 0.0, 0.0);
    for e in g.edges() {
        let (j, k) = (g.degree(e.u) as f64, g.degree(e.v) as f64);
        prod += j * k;
        half_sum += 0.5 * (j + k);
        half_sq += 0.5 * (j * j + k * k);
    }
    let mf = m as f64;
    let mean = half_sum / mf;
    let num = prod / mf - mean * mean;
    let den = half_sq / mf - mean * mean;
    if den.abs() < 1e-12 * (half_sq / mf).max(1.0) {
        f64::NAN
    } else {
        num / den
    }
}
