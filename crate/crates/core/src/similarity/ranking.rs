use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use crate::error::Result;
use crate::graph::NodeId;
use crate::util::format_significant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredPair {
    pub x: NodeId,
    pub y: NodeId,
    pub score: f64,
}

/// Ranking order: descending score, then ascending `(x, y)`.
#[inline]
pub fn rank_cmp(a: &ScoredPair, b: &ScoredPair) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| (a.x, a.y).cmp(&(b.x, b.y)))
}

/// Scored candidate pairs in ranking order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredPairList {
    entries: Vec<ScoredPair>,
}

impl ScoredPairList {
    /// Sorts `entries` into ranking order. Pairs must be canonical (`x < y`)
    /// and unique.
    pub fn from_entries(mut entries: Vec<ScoredPair>) -> Self {
        entries.sort_by(rank_cmp);
        debug_assert!(entries.iter().all(|p| p.x < p.y && p.score.is_finite()));
        ScoredPairList { entries }
    }

    pub fn entries(&self) -> &[ScoredPair] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ScoredPair> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self, k: usize) -> &[ScoredPair] {
        &self.entries[..k.min(self.entries.len())]
    }

    /// Writes `x,y,score` rows (12 significant digits) for the first `limit`
    /// entries, naming nodes with `label`.
    pub fn write_csv<W, F>(&self, out: W, limit: usize, label: F) -> Result<()>
    where
        W: Write,
        F: Fn(NodeId) -> String,
    {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "score"])?;
        for p in self.top(limit) {
            w.write_record([label(p.x), label(p.y), format_significant(p.score, 12)])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ScoredPairList {
    type Item = &'a ScoredPair;
    type IntoIter = std::slice::Iter<'a, ScoredPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Heap entry ordered so the worst-ranked pair sits on top.
#[derive(Debug, Clone, Copy)]
struct Ranked(ScoredPair);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        rank_cmp(&self.0, &other.0) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_cmp(&self.0, &other.0)
    }
}

/// The best `k` pairs seen so far under [`rank_cmp`]. The result does not
/// depend on the order pairs are offered in.
#[derive(Debug, Clone)]
pub(crate) struct TopK {
    k: usize,
    heap: BinaryHeap<Ranked>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        TopK {
            k,
            heap: BinaryHeap::new(),
        }
    }

    pub(crate) fn offer(&mut self, p: ScoredPair) {
        if self.heap.len() < self.k {
            self.heap.push(Ranked(p));
        } else if let Some(mut worst) = self.heap.peek_mut() {
            if rank_cmp(&p, &worst.0) == Ordering::Less {
                *worst = Ranked(p);
            }
        }
    }

    pub(crate) fn merge(mut self, other: TopK) -> TopK {
        if self.heap.len() < other.heap.len() {
            return other.merge(self);
        }
        for r in other.heap {
            self.offer(r.0);
        }
        self
    }

    pub(crate) fn into_sorted(self) -> Vec<ScoredPair> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|r| r.0)
            .collect()
    }
}
