//! Train/probe splits, link deletion, AUC and precision, and the repeated
//! trial experiment runner.

mod experiment;
mod metrics;
pub mod report;
mod split;
mod synthetic;

pub use experiment::{
    compare_drift, evaluate_index, run_experiment, run_experiment_with, summarize,
    sweep_iterations, sweep_iterations_with, sweep_rows, AucMethod, ComparisonRow,
    ExperimentConfig, IndexMetrics, MetricsReport, Protocol, StageTimings, SummaryRow, Sweep,
    SweepRow,
};
pub use metrics::{
    auc_exact, auc_sampled, candidate_pairs, check_exact_size, draw_comparisons, nonexistent_pairs,
    normalize_pairs, precision_at_l, rank_auc, AucTally, NonexistentSampler, DEFAULT_AUC_SAMPLES,
    EXACT_AUC_LIMIT,
};
pub use split::{delete_links, random_split, temporal_split, SplitKind, SplitResult};
pub use synthetic::{generate_evolving, generate_synthetic};
