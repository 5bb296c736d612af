use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use crate::drift::{drift_step, DriftConfig};
use crate::error::{Error, Result};
use crate::graph::{Aggregation, Pair, TemporalEdge, WeightedGraph};
use crate::similarity::{scan_rows, IndexKind, IndexTag, Scorer};
use crate::util::derive_seed;

use super::metrics::{
    check_exact_size, draw_comparisons, nonexistent_pairs, normalize_pairs, probe_hits, rank_auc,
    AucTally, DEFAULT_AUC_SAMPLES,
};
use super::split::{delete_links, random_split, temporal_split, SplitKind, SplitResult};

// seed stream tags
const SPLIT: u64 = 1;
const DELETE: u64 = 2;
const AUC: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Random 90/10 style hold-out of a static network.
    StaticRandom,
    /// Timestamp-ordered hold-out of an evolving network.
    EvolvingTemporal,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::StaticRandom => "static-random",
            Protocol::EvolvingTemporal => "evolving-temporal",
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static-random" | "random" | "static" => Ok(Protocol::StaticRandom),
            "evolving-temporal" | "temporal" | "evolving" => Ok(Protocol::EvolvingTemporal),
            _ => Err(Error::InvalidParameter(format!(
                "unknown protocol `{s}` (expected static-random or evolving-temporal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AucMethod {
    Sampled { samples: usize },
    Exact,
}

impl Default for AucMethod {
    fn default() -> Self {
        AucMethod::Sampled {
            samples: DEFAULT_AUC_SAMPLES,
        }
    }
}

impl fmt::Display for AucMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AucMethod::Sampled { samples } => write!(f, "sampled({samples})"),
            AucMethod::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub train_fraction: f64,
    pub aggregation: Aggregation,
    pub indices: Vec<IndexKind>,
    /// Drift applied to every training graph before scoring.
    pub drift: Option<DriftConfig>,
    /// With drift on, also evaluate the undrifted training graph.
    pub compare_original: bool,
    pub deletion_ratios: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub auc: AucMethod,
    /// Precision cutoff; defaults to the probe size.
    pub precision_l: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            protocol: Protocol::EvolvingTemporal,
            train_fraction: 0.9,
            aggregation: Aggregation::default(),
            indices: IndexTag::ALL.iter().map(|&t| IndexKind::new(t)).collect(),
            drift: None,
            compare_original: false,
            deletion_ratios: vec![0.0],
            trials: 15,
            seed: 1,
            auc: AucMethod::default(),
            precision_l: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::InvalidParameter(
                "no similarity index selected".into(),
            ));
        }
        for k in &self.indices {
            k.validate()?;
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.deletion_ratios.is_empty() {
            return Err(Error::InvalidParameter("no deletion ratio given".into()));
        }
        if let Some(r) = self
            .deletion_ratios
            .iter()
            .find(|r| !(0.0..1.0).contains(*r))
        {
            return Err(Error::InvalidParameter(format!(
                "deletion ratio must be in [0, 1), got {r}"
            )));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if let AucMethod::Sampled { samples: 0 } = self.auc {
            return Err(Error::InvalidParameter(
                "AUC needs at least one sample".into(),
            ));
        }
        if self.precision_l == Some(0) {
            return Err(Error::InvalidParameter(
                "precision cutoff must be positive".into(),
            ));
        }
        if let Some(d) = &self.drift {
            d.validate()?;
        }
        Ok(())
    }
}

/// Wall-clock milliseconds per pipeline stage for one record.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub split_ms: f64,
    pub delete_ms: f64,
    /// Time spent reaching this record's drift iteration count.
    pub drift_ms: f64,
    pub score_ms: f64,
}

/// Metrics of one (deletion ratio, trial, drift setting, index) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub split: SplitKind,
    pub ratio_index: usize,
    pub ratio: f64,
    pub trial: usize,
    pub index_position: usize,
    pub index: IndexKind,
    /// Drift iterations applied, `None` when drift is off.
    pub drift: Option<u32>,
    pub auc: f64,
    pub auc_method: AucMethod,
    pub precision: f64,
    pub l: usize,
    /// Probe pairs among the top `l`.
    pub hits: usize,
    pub probe_size: usize,
    pub train_nodes: usize,
    pub train_edges: usize,
    pub timings: StageTimings,
}

/// AUC and precision of one index on one training graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexMetrics {
    pub auc: f64,
    pub precision: f64,
    pub l: usize,
    pub hits: usize,
}

/// Scores `train` under `kind` and measures it against `probe`.
///
/// Precision ranks every non-edge of `train`; AUC compares probe pairs with
/// pairs that are neither edges nor probe pairs.
pub fn evaluate_index(
    train: &WeightedGraph,
    probe: &[Pair],
    kind: IndexKind,
    auc: AucMethod,
    auc_seed: u64,
    precision_l: Option<usize>,
) -> Result<IndexMetrics> {
    let probe = normalize_pairs(probe);
    if probe.is_empty() {
        return Err(Error::EmptyProbe);
    }
    let l = precision_l.unwrap_or(probe.len());
    let n = train.node_count() as u128;
    let candidates = n * n.saturating_sub(1) / 2 - train.edge_count() as u128;
    if l == 0 || l as u128 > candidates {
        return Err(Error::PrecisionCutoff {
            l,
            available: candidates.min(usize::MAX as u128) as usize,
        });
    }

    let (requests, comparisons) = match auc {
        AucMethod::Sampled { samples } => {
            let comparisons = draw_comparisons(train, &probe, samples, auc_seed)?;
            let wanted: Vec<Pair> = comparisons.iter().flat_map(|&(p, q)| [p, q]).collect();
            (normalize_pairs(&wanted), Some(comparisons))
        }
        AucMethod::Exact => {
            check_exact_size(train, &probe)?;
            let mut all = nonexistent_pairs(train, &probe);
            all.extend_from_slice(&probe);
            all.sort_unstable();
            (all, None)
        }
    };

    let scorer = Scorer::new(train, kind)?;
    let scan = scan_rows(&scorer, l, &requests);
    let lookup = |p: Pair| scan.requested[requests.binary_search(&p).expect("pair was requested")];

    let auc = match comparisons {
        Some(comparisons) => {
            let mut tally = AucTally::default();
            for (p, q) in comparisons {
                tally.record(lookup(p), lookup(q));
            }
            tally.value()
        }
        None => {
            let (mut probe_scores, mut non_scores) = (Vec::new(), Vec::new());
            for (p, &s) in requests.iter().zip(&scan.requested) {
                if probe.binary_search(p).is_ok() {
                    probe_scores.push(s);
                } else {
                    non_scores.push(s);
                }
            }
            rank_auc(&probe_scores, &non_scores)
        }
    };
    let hits = probe_hits(scan.top.iter().map(|p| (p.x, p.y)), &probe);
    Ok(IndexMetrics {
        auc,
        precision: hits as f64 / l as f64,
        l,
        hits,
    })
}

fn split_for(edges: &[TemporalEdge], cfg: &ExperimentConfig, trial: usize) -> Result<SplitResult> {
    match cfg.protocol {
        Protocol::EvolvingTemporal => temporal_split(edges, cfg.train_fraction, cfg.aggregation),
        Protocol::StaticRandom => random_split(
            edges,
            cfg.train_fraction,
            derive_seed(cfg.seed, &[SPLIT, trial as u64]),
            cfg.aggregation,
        ),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs the full matrix: every trial, deletion ratio, drift setting and
/// index. Records come back ordered by ratio, drift setting, index, trial.
pub fn run_experiment(
    edges: &[TemporalEdge],
    cfg: &ExperimentConfig,
) -> Result<Vec<MetricsReport>> {
    run_experiment_with(edges, cfg, |_| {})
}

/// [`run_experiment`] that also hands every record to `on_record` as soon as
/// it is computed, so callers keep partial results if a later cell fails.
pub fn run_experiment_with<F>(
    edges: &[TemporalEdge],
    cfg: &ExperimentConfig,
    on_record: F,
) -> Result<Vec<MetricsReport>>
where
    F: FnMut(&MetricsReport),
{
    let (template, variants) = match cfg.drift {
        Some(d) if cfg.compare_original => (d, vec![None, Some(d.iterations)]),
        Some(d) => (d, vec![Some(d.iterations)]),
        None => (DriftConfig::default(), vec![None]),
    };
    run_variants(edges, cfg, template, &variants, on_record)
}

/// Core loop. `variants` lists drift iteration counts (`None` = off) in
/// ascending order; drifted graphs are built incrementally per trial.
fn run_variants(
    edges: &[TemporalEdge],
    cfg: &ExperimentConfig,
    template: DriftConfig,
    variants: &[Option<u32>],
    mut on_record: impl FnMut(&MetricsReport),
) -> Result<Vec<MetricsReport>> {
    cfg.validate()?;
    template.validate()?;
    let mut records = Vec::new();
    for trial in 0..cfg.trials {
        let start = Instant::now();
        let split =
            split_for(edges, cfg, trial).map_err(|e| e.in_cell(format!("trial {trial}: split")))?;
        let split_ms = elapsed_ms(start);

        for (ri, &ratio) in cfg.deletion_ratios.iter().enumerate() {
            let cell = |what: &str| format!("ratio {ratio}, trial {trial}: {what}");
            let start = Instant::now();
            let train = delete_links(
                &split.train,
                ratio,
                derive_seed(cfg.seed, &[DELETE, trial as u64]),
            )
            .map_err(|e| e.in_cell(cell("link deletion")))?;
            let delete_ms = elapsed_ms(start);

            let mut drifted = train.clone();
            let mut done = 0u32;
            let mut drift_ms = 0.0;
            for &variant in variants {
                if let Some(k) = variant {
                    let start = Instant::now();
                    while done < k {
                        drifted = drift_step(&drifted, &template);
                        done += 1;
                    }
                    drift_ms += elapsed_ms(start);
                }
                let g = if variant.is_some() { &drifted } else { &train };
                for (ii, &kind) in cfg.indices.iter().enumerate() {
                    let seed = derive_seed(cfg.seed, &[AUC, ri as u64, trial as u64, ii as u64]);
                    let start = Instant::now();
                    let m = evaluate_index(g, &split.probe, kind, cfg.auc, seed, cfg.precision_l)
                        .map_err(|e| e.in_cell(cell(kind.tag.name())))?;
                    let record = MetricsReport {
                        split: split.kind,
                        ratio_index: ri,
                        ratio,
                        trial,
                        index_position: ii,
                        index: kind,
                        drift: variant,
                        auc: m.auc,
                        auc_method: cfg.auc,
                        precision: m.precision,
                        l: m.l,
                        hits: m.hits,
                        probe_size: split.probe.len(),
                        train_nodes: g.node_count(),
                        train_edges: g.edge_count(),
                        timings: StageTimings {
                            split_ms,
                            delete_ms,
                            drift_ms: if variant.is_some() { drift_ms } else { 0.0 },
                            score_ms: elapsed_ms(start),
                        },
                    };
                    on_record(&record);
                    records.push(record);
                }
            }
        }
    }
    records.sort_by_key(|r| (r.ratio_index, r.drift, r.index_position, r.trial));
    Ok(records)
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_sd(values: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, sd, n)
}

/// Per-(ratio, index, drift setting) averages over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub ratio: f64,
    pub index: IndexKind,
    pub drift: Option<u32>,
    pub trials: usize,
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub precision_mean: f64,
    pub precision_sd: f64,
    pub score_ms_mean: f64,
    pub drift_ms_mean: f64,
}

/// Groups records (in the order [`run_experiment`] returns them) into one
/// row per ratio, drift setting and index.
pub fn summarize(records: &[MetricsReport]) -> Vec<SummaryRow> {
    records
        .chunk_by(|a, b| {
            (a.ratio_index, a.drift, a.index_position) == (b.ratio_index, b.drift, b.index_position)
        })
        .map(|cell| {
            let (auc_mean, auc_sd, trials) = mean_sd(cell.iter().map(|r| r.auc));
            let (precision_mean, precision_sd, _) = mean_sd(cell.iter().map(|r| r.precision));
            SummaryRow {
                ratio: cell[0].ratio,
                index: cell[0].index,
                drift: cell[0].drift,
                trials,
                auc_mean,
                auc_sd,
                precision_mean,
                precision_sd,
                score_ms_mean: mean_sd(cell.iter().map(|r| r.timings.score_ms)).0,
                drift_ms_mean: mean_sd(cell.iter().map(|r| r.timings.drift_ms)).0,
            }
        })
        .collect()
}

/// Drifted and undrifted averages of one (ratio, index) side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub ratio: f64,
    pub index: IndexKind,
    pub iterations: u32,
    pub auc_drift: f64,
    pub auc_original: f64,
    pub precision_drift: f64,
    pub precision_original: f64,
}

/// Pairs each drifted summary row with the undrifted row of the same cell.
pub fn compare_drift(summary: &[SummaryRow]) -> Vec<ComparisonRow> {
    let mut out = Vec::new();
    for row in summary {
        let Some(iterations) = row.drift else {
            continue;
        };
        let original = summary.iter().find(|o| {
            o.drift.is_none() && o.ratio.to_bits() == row.ratio.to_bits() && o.index == row.index
        });
        if let Some(o) = original {
            out.push(ComparisonRow {
                ratio: row.ratio,
                index: row.index,
                iterations,
                auc_drift: row.auc_mean,
                auc_original: o.auc_mean,
                precision_drift: row.precision_mean,
                precision_original: o.precision_mean,
            });
        }
    }
    out
}

/// Metrics averaged over every index and trial of one drift setting and
/// deletion ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub drift: Option<u32>,
    pub ratio: f64,
    pub cells: usize,
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub precision_mean: f64,
    pub precision_sd: f64,
}

/// Aggregates records into one row per (drift setting, ratio).
pub fn sweep_rows(records: &[MetricsReport]) -> Vec<SweepRow> {
    let mut keys: Vec<(Option<u32>, usize)> =
        records.iter().map(|r| (r.drift, r.ratio_index)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(drift, ri)| {
            let cell: Vec<&MetricsReport> = records
                .iter()
                .filter(|r| r.drift == drift && r.ratio_index == ri)
                .collect();
            let (auc_mean, auc_sd, cells) = mean_sd(cell.iter().map(|r| r.auc));
            let (precision_mean, precision_sd, _) = mean_sd(cell.iter().map(|r| r.precision));
            SweepRow {
                drift,
                ratio: cell[0].ratio,
                cells,
                auc_mean,
                auc_sd,
                precision_mean,
                precision_sd,
            }
        })
        .collect()
}

/// Output of [`sweep_iterations`].
#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub records: Vec<MetricsReport>,
}

/// Repeats the evaluation for every drift iteration count in `iterations`.
/// Symmetrization and temporal mode come from `cfg.drift` when set.
/// Requires timestamped data.
pub fn sweep_iterations(
    edges: &[TemporalEdge],
    cfg: &ExperimentConfig,
    iterations: RangeInclusive<u32>,
) -> Result<Sweep> {
    sweep_iterations_with(edges, cfg, iterations, |_| {})
}

/// [`sweep_iterations`] with a per-record callback, as in [`run_experiment_with`].
pub fn sweep_iterations_with<F>(
    edges: &[TemporalEdge],
    cfg: &ExperimentConfig,
    iterations: RangeInclusive<u32>,
    on_record: F,
) -> Result<Sweep>
where
    F: FnMut(&MetricsReport),
{
    if edges.len() < 2 || edges.iter().all(|e| e.t == edges[0].t) {
        return Err(Error::NoTemporalSpread);
    }
    let template = cfg.drift.unwrap_or_default();
    let variants: Vec<Option<u32>> = iterations.map(Some).collect();
    if variants.is_empty() {
        return Err(Error::InvalidParameter("empty iteration range".into()));
    }
    let records = run_variants(edges, cfg, template, &variants, on_record)?;
    Ok(Sweep {
        rows: sweep_rows(&records),
        records,
    })
}
