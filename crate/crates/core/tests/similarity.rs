mod common;

use common::{random_graph, rel_close, rng, unit_graph, Dense, REL_TOL};
use driftlink::graph::{hop_distance, walk_weight, NodeId, Pair, WeightedGraph};
use driftlink::similarity::{score_pairs, IndexKind, IndexTag, Scorer};
use proptest::prelude::*;
use rand::Rng;

fn all_pairs(n: usize) -> Vec<Pair> {
    let mut out = Vec::new();
    for x in 0..n as NodeId {
        for y in x + 1..n as NodeId {
            out.push((x, y));
        }
    }
    out
}

fn oracle(d: &Dense, tag: IndexTag, x: usize, y: usize, eps: f64) -> f64 {
    match tag {
        IndexTag::Wcn => d.wcn(x, y),
        IndexTag::Waa => d.waa(x, y),
        IndexTag::Wra => d.wra(x, y),
        IndexTag::Wlp => d.wlp(x, y, eps),
        IndexTag::Wsd => d.wsd(x, y, eps, None),
    }
}

#[test]
fn indices_match_brute_force() {
    let mut r = rng(11);
    for _ in 0..60 {
        let n = r.gen_range(2..=10);
        let p = r.gen_range(0.15..0.8);
        let g = random_graph(&mut r, n, p, true);
        let dense = Dense::from_graph(&g);
        let eps = if r.gen_bool(0.5) {
            1e-3
        } else {
            r.gen_range(0.0..1.0)
        };
        for tag in IndexTag::ALL {
            let scorer = Scorer::new(&g, IndexKind::new(tag).with_epsilon(eps)).unwrap();
            for (x, y) in all_pairs(n) {
                let got = scorer.score(x, y).unwrap();
                let want = oracle(&dense, tag, x as usize, y as usize, eps);
                assert!(
                    rel_close(got, want, REL_TOL),
                    "{tag} ({x},{y}) got {got} want {want}"
                );
            }
        }
    }
}

#[test]
fn walk_weight_matches_matrix_power() {
    let mut r = rng(12);
    for _ in 0..40 {
        let n = r.gen_range(2..=12);
        let p = r.gen_range(0.2..0.7);
        let g = random_graph(&mut r, n, p, false);
        let dense = Dense::from_graph(&g);
        for len in 2..=5 {
            let power = dense.weight_power(len);
            for (x, y) in all_pairs(n) {
                let got = walk_weight(&g, x, y, len).unwrap();
                assert!(rel_close(got, power[x as usize][y as usize], REL_TOL));
                assert_eq!(got.to_bits(), walk_weight(&g, y, x, len).unwrap().to_bits());
            }
        }
    }
}

#[test]
fn hop_distance_agrees_with_floyd_warshall() {
    let mut r = rng(13);
    for _ in 0..30 {
        let n = r.gen_range(2..=12);
        let p = r.gen_range(0.1..0.5);
        let g = random_graph(&mut r, n, p, false);
        let hops = Dense::from_graph(&g).hops();
        for x in 0..n as NodeId {
            for y in 0..n as NodeId {
                let want = hops[x as usize][y as usize];
                let got = hop_distance(&g, x, y).unwrap();
                assert_eq!(got.map(|d| d as usize).unwrap_or(usize::MAX), want);
            }
        }
    }
}

#[test]
fn wcn_ranks_like_common_neighbor_count_on_unit_graphs() {
    let mut r = rng(14);
    for _ in 0..30 {
        let n = r.gen_range(4..=12);
        let mut g = random_graph(&mut r, n, 0.4, false);
        g = g.with_weights(&vec![1.0; g.edge_count()]);
        let dense = Dense::from_graph(&g);
        let pairs = all_pairs(n);
        let ranked = score_pairs(&g, IndexTag::Wcn.into(), &pairs).unwrap();
        let mut by_count: Vec<(usize, Pair)> = pairs
            .iter()
            .map(|&(x, y)| {
                let c = (0..n)
                    .filter(|&z| dense.adj[x as usize][z] && dense.adj[z][y as usize])
                    .count();
                (c, (x, y))
            })
            .collect();
        by_count.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let got: Vec<Pair> = ranked.iter().map(|p| (p.x, p.y)).collect();
        let want: Vec<Pair> = by_count.iter().map(|c| c.1).collect();
        assert_eq!(got, want);
        for (p, c) in ranked.iter().zip(&by_count) {
            assert_eq!(p.score, 2.0 * c.0 as f64);
        }
    }
}

#[test]
fn wsd_reduces_to_wlp_with_forced_distance_and_denominator() {
    let mut r = rng(15);
    for _ in 0..50 {
        let n = r.gen_range(2..=10);
        let p = r.gen_range(0.2..0.8);
        let g = random_graph(&mut r, n, p, false);
        let eps = r.gen_range(0.0..2.0);
        let wsd = Scorer::new(&g, IndexKind::new(IndexTag::Wsd).with_epsilon(eps)).unwrap();
        let wlp = Scorer::new(&g, IndexKind::new(IndexTag::Wlp).with_epsilon(eps)).unwrap();
        for (x, y) in all_pairs(n) {
            let forced = wsd.structure_score_at(x, y, 2, 1.0).unwrap();
            assert_eq!(forced.to_bits(), wlp.score(x, y).unwrap().to_bits());
        }
    }
}

/// Circulant graph on `n` nodes: every node links to the nodes `j` steps away.
fn circulant(n: usize, jumps: &[usize]) -> WeightedGraph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for &j in jumps {
            let k = (i + j) % n;
            let p = (i.min(k) as u32, i.max(k) as u32);
            if p.0 != p.1 && !pairs.contains(&p) {
                pairs.push(p);
            }
        }
    }
    unit_graph(n, &pairs)
}

#[test]
fn wsd_ranks_like_wra_when_common_neighbors_share_degree() {
    let mut r = rng(16);
    for _ in 0..20 {
        let n = r.gen_range(8..=16);
        let mut jumps: Vec<usize> = vec![1];
        for j in 2..n / 2 {
            if r.gen_bool(0.4) {
                jumps.push(j);
            }
        }
        let g = circulant(n, &jumps);
        let at_two: Vec<Pair> = all_pairs(n)
            .into_iter()
            .filter(|&(x, y)| hop_distance(&g, x, y).unwrap() == Some(2))
            .collect();
        if at_two.is_empty() {
            continue;
        }
        let wsd_kind = IndexKind::new(IndexTag::Wsd)
            .with_epsilon(0.0)
            .with_path_range(2);
        let wsd = score_pairs(&g, wsd_kind, &at_two).unwrap();
        let wra = score_pairs(&g, IndexTag::Wra.into(), &at_two).unwrap();
        let order = |l: &driftlink::similarity::ScoredPairList| {
            l.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>()
        };
        assert_eq!(order(&wsd), order(&wra));
        for (a, b) in wsd.iter().zip(wra.iter()) {
            assert!(rel_close(2.0 * a.score, b.score, 1e-12));
        }
    }
}

#[test]
fn score_pairs_is_deterministic_across_thread_counts() {
    let mut r = rng(17);
    let g = random_graph(&mut r, 60, 0.08, false);
    let pairs = all_pairs(60);
    for tag in IndexTag::ALL {
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let wide = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = serial.install(|| score_pairs(&g, tag.into(), &pairs).unwrap());
        let b = wide.install(|| score_pairs(&g, tag.into(), &pairs).unwrap());
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_symmetric_finite_non_negative(seed in any::<u64>(), n in 2usize..14, p in 0.1f64..0.9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, p, true);
        for tag in IndexTag::ALL {
            let scorer = Scorer::new(&g, tag.into()).unwrap();
            for (x, y) in all_pairs(n) {
                let a = scorer.score(x, y).unwrap();
                let b = scorer.score(y, x).unwrap();
                prop_assert_eq!(a.to_bits(), b.to_bits());
                prop_assert!(a.is_finite() && a >= 0.0);
            }
        }
    }
}
