use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{canonical, NodeId, Pair, WeightedGraph};
use crate::similarity::ScoredPairList;

/// Largest probe × nonexistent product the exact AUC will enumerate.
pub const EXACT_AUC_LIMIT: u128 = 10_000_000;

/// Default number of sampled AUC comparisons.
pub const DEFAULT_AUC_SAMPLES: usize = 100_000;

/// Outcome counts of AUC comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AucTally {
    /// Probe pair scored strictly higher.
    pub higher: u64,
    pub ties: u64,
    pub total: u64,
}

impl AucTally {
    pub fn record(&mut self, probe: f64, nonexistent: f64) {
        self.total += 1;
        if probe > nonexistent {
            self.higher += 1;
        } else if probe == nonexistent {
            self.ties += 1;
        }
    }

    /// `(n' + 0.5·n'') / n`.
    pub fn value(&self) -> f64 {
        (self.higher as f64 + 0.5 * self.ties as f64) / self.total as f64
    }
}

/// Canonical, sorted, unique copy of `pairs`.
pub fn normalize_pairs(pairs: &[Pair]) -> Vec<Pair> {
    let mut out: Vec<Pair> = pairs.iter().map(|&(x, y)| canonical(x, y)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Uniform draws from the pairs of `g` that are neither edges nor probe
/// pairs. Draws are by rejection unless those pairs are a small share of
/// the universe, in which case they are listed once.
pub struct NonexistentSampler<'a> {
    g: &'a WeightedGraph,
    probe: &'a [Pair],
    listed: Option<Vec<Pair>>,
}

impl<'a> NonexistentSampler<'a> {
    /// `probe` must be canonical, sorted and unique.
    pub fn new(g: &'a WeightedGraph, probe: &'a [Pair]) -> Result<Self> {
        let count = nonexistent_count(g, probe);
        if count == 0 {
            return Err(Error::EmptyUniverse);
        }
        let universe = universe_size(g);
        let listed = (count * 8 < universe).then(|| nonexistent_pairs(g, probe));
        Ok(NonexistentSampler { g, probe, listed })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Pair {
        if let Some(list) = &self.listed {
            return list[rng.gen_range(0..list.len())];
        }
        let n = self.g.node_count() as NodeId;
        loop {
            let x = rng.gen_range(0..n);
            let mut y = rng.gen_range(0..n - 1);
            if y >= x {
                y += 1;
            }
            let p = canonical(x, y);
            if !self.g.has_edge(p.0, p.1) && self.probe.binary_search(&p).is_err() {
                return p;
            }
        }
    }
}

fn universe_size(g: &WeightedGraph) -> u128 {
    let n = g.node_count() as u128;
    n * n.saturating_sub(1) / 2
}

fn nonexistent_count(g: &WeightedGraph, probe: &[Pair]) -> u128 {
    let probe_non_edges = probe.iter().filter(|p| !g.has_edge(p.0, p.1)).count();
    universe_size(g) - g.edge_count() as u128 - probe_non_edges as u128
}

/// Every pair of `g` that is neither an edge nor in `probe`, ascending.
pub fn nonexistent_pairs(g: &WeightedGraph, probe: &[Pair]) -> Vec<Pair> {
    let n = g.node_count() as NodeId;
    let mut out = Vec::new();
    for x in 0..n {
        let nb = g.neighbors(x);
        for y in x + 1..n {
            if nb.binary_search(&y).is_err() && probe.binary_search(&(x, y)).is_err() {
                out.push((x, y));
            }
        }
    }
    out
}

/// Every non-edge of `g`, ascending.
pub fn candidate_pairs(g: &WeightedGraph) -> Vec<Pair> {
    nonexistent_pairs(g, &[])
}

/// `n` seeded (probe, nonexistent) comparison pairs.
pub fn draw_comparisons(
    g: &WeightedGraph,
    probe: &[Pair],
    n: usize,
    seed: u64,
) -> Result<Vec<(Pair, Pair)>> {
    if probe.is_empty() {
        return Err(Error::EmptyProbe);
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "AUC needs at least one comparison".into(),
        ));
    }
    let sampler = NonexistentSampler::new(g, probe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let p = probe[rng.gen_range(0..probe.len())];
            (p, sampler.sample(&mut rng))
        })
        .collect())
}

/// Sampled AUC over `n` comparisons between a uniform probe pair and a
/// uniform nonexistent pair of `train`.
pub fn auc_sampled<F>(
    train: &WeightedGraph,
    probe: &[Pair],
    n: usize,
    seed: u64,
    mut score: F,
) -> Result<f64>
where
    F: FnMut(Pair) -> f64,
{
    let probe = normalize_pairs(probe);
    let mut tally = AucTally::default();
    for (p, q) in draw_comparisons(train, &probe, n, seed)? {
        tally.record(score(p), score(q));
    }
    Ok(tally.value())
}

/// Guard for [`auc_exact`]: errors if the comparison count exceeds the limit.
pub fn check_exact_size(train: &WeightedGraph, probe: &[Pair]) -> Result<()> {
    if probe.is_empty() {
        return Err(Error::EmptyProbe);
    }
    let non = nonexistent_count(train, probe);
    if non == 0 {
        return Err(Error::EmptyUniverse);
    }
    let comparisons = probe.len() as u128 * non;
    if comparisons > EXACT_AUC_LIMIT {
        return Err(Error::ExactAucTooLarge(comparisons));
    }
    Ok(())
}

/// Exact AUC: every probe pair against every nonexistent pair, ties
/// counting half.
pub fn auc_exact<F>(train: &WeightedGraph, probe: &[Pair], mut score: F) -> Result<f64>
where
    F: FnMut(Pair) -> f64,
{
    let probe = normalize_pairs(probe);
    check_exact_size(train, &probe)?;
    let probe_scores: Vec<f64> = probe.iter().map(|&p| score(p)).collect();
    let non_scores: Vec<f64> = nonexistent_pairs(train, &probe)
        .into_iter()
        .map(score)
        .collect();
    Ok(rank_auc(&probe_scores, &non_scores))
}

/// Mann-Whitney statistic of two score samples with half credit for ties.
pub fn rank_auc(probe_scores: &[f64], nonexistent_scores: &[f64]) -> f64 {
    let mut sorted = nonexistent_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tally = AucTally::default();
    for &p in probe_scores {
        let below = sorted.partition_point(|&s| s < p) as u64;
        let up_to = sorted.partition_point(|&s| s <= p) as u64;
        tally.higher += below;
        tally.ties += up_to - below;
    }
    tally.total = probe_scores.len() as u64 * sorted.len() as u64;
    tally.value()
}

/// Share of probe pairs among the first `l` entries of `ranked`.
pub fn precision_at_l(ranked: &ScoredPairList, probe: &[Pair], l: usize) -> Result<f64> {
    if l == 0 || l > ranked.len() {
        return Err(Error::PrecisionCutoff {
            l,
            available: ranked.len(),
        });
    }
    let probe = normalize_pairs(probe);
    Ok(probe_hits(ranked.top(l).iter().map(|p| (p.x, p.y)), &probe) as f64 / l as f64)
}

pub(crate) fn probe_hits(pairs: impl Iterator<Item = Pair>, probe: &[Pair]) -> usize {
    pairs.filter(|p| probe.binary_search(p).is_ok()).count()
}
