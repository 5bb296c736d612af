//! CSV tables for experiment output.
//!
//! Metric tables hold no wall-clock values, so reruns with the same seed are
//! byte-identical; timings go to their own table. Reals are written with 12
//! significant digits.

use std::io::Write;

use crate::error::Result;
use crate::util::format_significant;

use super::experiment::{ComparisonRow, MetricsReport, SummaryRow, SweepRow};

fn real(v: f64) -> String {
    format_significant(v, 12)
}

fn drift_label(d: Option<u32>) -> String {
    d.map_or_else(|| "off".to_string(), |k| k.to_string())
}

pub const TRIALS_HEADER: [&str; 14] = [
    "split",
    "ratio",
    "trial",
    "index",
    "epsilon",
    "drift",
    "auc",
    "auc_method",
    "precision",
    "l",
    "hits",
    "probe_size",
    "train_nodes",
    "train_edges",
];

/// One row per record.
pub fn write_trials_csv<W: Write>(records: &[MetricsReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIALS_HEADER)?;
    for r in records {
        w.write_record([
            r.split.name().to_string(),
            real(r.ratio),
            r.trial.to_string(),
            r.index.tag.name().to_string(),
            real(r.index.epsilon),
            drift_label(r.drift),
            real(r.auc),
            r.auc_method.to_string(),
            real(r.precision),
            r.l.to_string(),
            r.hits.to_string(),
            r.probe_size.to_string(),
            r.train_nodes.to_string(),
            r.train_edges.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-stage milliseconds, one row per record.
pub fn write_timings_csv<W: Write>(records: &[MetricsReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ratio",
        "trial",
        "index",
        "drift",
        "split_ms",
        "delete_ms",
        "drift_ms",
        "score_ms",
    ])?;
    for r in records {
        let t = &r.timings;
        w.write_record([
            real(r.ratio),
            r.trial.to_string(),
            r.index.tag.name().to_string(),
            drift_label(r.drift),
            format!("{:.3}", t.split_ms),
            format!("{:.3}", t.delete_ms),
            format!("{:.3}", t.drift_ms),
            format!("{:.3}", t.score_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ratio",
        "index",
        "drift",
        "trials",
        "auc_mean",
        "auc_sd",
        "precision_mean",
        "precision_sd",
    ])?;
    for r in rows {
        w.write_record([
            real(r.ratio),
            r.index.tag.name().to_string(),
            drift_label(r.drift),
            r.trials.to_string(),
            real(r.auc_mean),
            real(r.auc_sd),
            real(r.precision_mean),
            real(r.precision_sd),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ratio",
        "index",
        "iterations",
        "auc_drift",
        "auc_original",
        "precision_drift",
        "precision_original",
    ])?;
    for r in rows {
        w.write_record([
            real(r.ratio),
            r.index.tag.name().to_string(),
            r.iterations.to_string(),
            real(r.auc_drift),
            real(r.auc_original),
            real(r.precision_drift),
            real(r.precision_original),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "iterations",
        "ratio",
        "cells",
        "auc_mean",
        "auc_sd",
        "precision_mean",
        "precision_sd",
    ])?;
    for r in rows {
        w.write_record([
            drift_label(r.drift),
            real(r.ratio),
            r.cells.to_string(),
            real(r.auc_mean),
            real(r.auc_sd),
            real(r.precision_mean),
            real(r.precision_sd),
        ])?;
    }
    w.flush()?;
    Ok(())
}
