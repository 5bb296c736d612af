use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use driftlink::drift::{
    drift_iterate, DriftConfig, Symmetrization, TemporalMode, DEFAULT_ITERATIONS,
};
use driftlink::eval::{self, report, AucMethod, ExperimentConfig, MetricsReport, Protocol};
use driftlink::graph::{
    build_graph, giant_component, network_stats, parse_edge_list, write_edge_list, Aggregation,
    EdgeList, EdgeListFormat, WeightedGraph,
};
use driftlink::similarity::{top_candidates, IndexKind, IndexTag, Scorer, DEFAULT_EPSILON};
use driftlink::util::format_significant;

use crate::config::ConfigFile;
use crate::{Cli, Command, DataArgs, DriftArgs, EvalArgs, Failure, IndexArgs};

const DEFAULT_OUT_DIR: &str = "driftlink-out";
const DEFAULT_TOP_K: usize = 100;

pub fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(workers) = file.pick(cli.workers, "workers")? {
        if workers == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }

    match cli.command {
        Command::Stats { data, output } => stats(&file, &data, output),
        Command::Predict {
            data,
            index,
            drift,
            top_k,
            output,
        } => predict(&file, &data, &index, &drift, top_k, output),
        Command::Drift {
            data,
            drift,
            output,
        } => drift_cmd(&file, &data, &drift, output),
        Command::Evaluate {
            data,
            index,
            drift,
            eval,
            compare_original,
        } => evaluate(&file, &data, &index, &drift, &eval, compare_original),
        Command::SweepIterations {
            data,
            index,
            drift,
            eval,
            min_iterations,
            max_iterations,
        } => sweep(
            &file,
            &data,
            &index,
            &drift,
            &eval,
            min_iterations,
            max_iterations,
        ),
    }
}

struct Dataset {
    list: EdgeList,
    aggregation: Aggregation,
}

impl Dataset {
    fn load(file: &ConfigFile, args: &DataArgs) -> Result<Self, Failure> {
        let path: PathBuf = file
            .pick(args.dataset.clone(), "dataset")?
            .ok_or_else(|| Failure::Usage("--dataset is required".into()))?;
        let format: EdgeListFormat = file
            .choice(args.format.as_deref(), "format")?
            .unwrap_or_default();
        let aggregation: Aggregation = file
            .choice(args.aggregation.as_deref(), "aggregation")?
            .unwrap_or_default();

        let handle = File::open(&path)
            .map_err(|e| Failure::Data(format!("cannot open {}: {e}", path.display())))?;
        let list = parse_edge_list(BufReader::new(handle), &format).map_err(|e| match e {
            driftlink::Error::Io(io) => {
                Failure::Data(format!("cannot read {}: {io}", path.display()))
            }
            other => Failure::Data(format!("{}: {other}", path.display())),
        })?;
        if list.edges.is_empty() {
            return Err(Failure::Data(format!(
                "{} contains no edges",
                path.display()
            )));
        }
        Ok(Dataset { list, aggregation })
    }

    fn graph(&self) -> WeightedGraph {
        build_graph(&self.list.edges, self.aggregation)
    }

    fn label(&self, g: &WeightedGraph, x: u32) -> String {
        self.list.labels[g.raw_id(x) as usize].clone()
    }
}

fn indices(file: &ConfigFile, args: &IndexArgs, default: &str) -> Result<Vec<IndexKind>, Failure> {
    let wanted: String = file
        .pick(args.index.clone(), "index")?
        .unwrap_or_else(|| default.to_string());
    let epsilon: f64 = file
        .pick(args.epsilon, "epsilon")?
        .unwrap_or(DEFAULT_EPSILON);
    let tags: Vec<IndexTag> = if wanted.trim().eq_ignore_ascii_case("all") {
        IndexTag::ALL.to_vec()
    } else {
        wanted.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<IndexTag>())
            .collect::<Result<_, _>>()?
    };
    if tags.is_empty() {
        return Err(Failure::Usage("no index given".into()));
    }
    let kinds: Vec<IndexKind> = tags
        .into_iter()
        .map(|t| IndexKind::new(t).with_epsilon(epsilon))
        .collect();
    for k in &kinds {
        k.validate()?;
    }
    Ok(kinds)
}

/// Requested iteration count plus the symmetrization and temporal settings.
fn drift_settings(
    file: &ConfigFile,
    args: &DriftArgs,
) -> Result<(Option<u32>, DriftConfig), Failure> {
    let iterations: Option<u32> = file.pick(args.drift_iterations, "drift-iterations")?;
    let symmetrization: Symmetrization = file
        .choice(args.symmetrization.as_deref(), "symmetrization")?
        .unwrap_or_default();
    let temporal: TemporalMode = file
        .choice(args.temporal_mode.as_deref(), "temporal-mode")?
        .unwrap_or_default();
    let cfg = DriftConfig {
        iterations: iterations.unwrap_or(DEFAULT_ITERATIONS),
        symmetrization,
        temporal,
    };
    cfg.validate()?;
    Ok((iterations, cfg))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn stats(file: &ConfigFile, data: &DataArgs, output: Option<PathBuf>) -> Result<(), Failure> {
    let ds = Dataset::load(file, data)?;
    let g = giant_component(&ds.graph());
    let s = network_stats(&g)?;
    let output: Option<PathBuf> = file.pick(output, "output")?;
    let mut out = open_output(output.as_deref())?;
    let fmt = |v: f64| format_significant(v, 12);
    writeln!(
        out,
        "nodes,links,mean_degree,mean_distance,clustering,weighted_clustering,assortativity,heterogeneity"
    )
    .map_err(io_failure)?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        s.nodes,
        s.links,
        fmt(s.mean_degree),
        fmt(s.mean_distance),
        fmt(s.clustering),
        fmt(s.weighted_clustering),
        fmt(s.assortativity),
        fmt(s.heterogeneity)
    )
    .map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

fn predict(
    file: &ConfigFile,
    data: &DataArgs,
    index: &IndexArgs,
    drift: &DriftArgs,
    top_k: Option<usize>,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let kinds = indices(file, index, "WSD")?;
    let [kind] = kinds[..] else {
        return Err(Failure::Usage("predict takes a single index".into()));
    };
    let (iterations, drift_cfg) = drift_settings(file, drift)?;
    let top_k: usize = file.pick(top_k, "top-k")?.unwrap_or(DEFAULT_TOP_K);
    let output: Option<PathBuf> = file.pick(output, "output")?;

    let ds = Dataset::load(file, data)?;
    let mut g = ds.graph();
    if let Some(it) = iterations {
        g = drift_iterate(
            &g,
            &DriftConfig {
                iterations: it,
                ..drift_cfg
            },
        )?;
    }
    let scorer = Scorer::new(&g, kind)?;
    let ranked = top_candidates(&scorer, top_k);

    let mut out = open_output(output.as_deref())?;
    writeln!(
        out,
        "# index={} epsilon={} drift_iterations={} nodes={} links={}",
        kind.tag,
        kind.epsilon,
        iterations.map_or("off".to_string(), |i| i.to_string()),
        g.node_count(),
        g.edge_count()
    )
    .map_err(io_failure)?;
    ranked.write_csv(&mut out, top_k, |x| ds.label(&g, x))?;
    out.flush().map_err(io_failure)
}

fn drift_cmd(
    file: &ConfigFile,
    data: &DataArgs,
    drift: &DriftArgs,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let (_, cfg) = drift_settings(file, drift)?;
    let output: Option<PathBuf> = file.pick(output, "output")?;
    let ds = Dataset::load(file, data)?;
    let g = drift_iterate(&ds.graph(), &cfg)?;
    let mut out = open_output(output.as_deref())?;
    write_edge_list(&g, &ds.list.labels, &mut out)?;
    out.flush().map_err(io_failure)
}

fn experiment_config(
    file: &ConfigFile,
    data: &DataArgs,
    index: &IndexArgs,
    eval_args: &EvalArgs,
) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig {
        indices: indices(file, index, "all")?,
        ..ExperimentConfig::default()
    };
    if let Some(p) = file.choice::<Protocol>(eval_args.protocol.as_deref(), "protocol")? {
        cfg.protocol = p;
    }
    if let Some(a) = file.choice::<Aggregation>(data.aggregation.as_deref(), "aggregation")? {
        cfg.aggregation = a;
    }
    if let Some(f) = file.pick(eval_args.train_fraction, "train-fraction")? {
        cfg.train_fraction = f;
    }
    if let Some(list) = file.pick::<String>(eval_args.delete_ratio.clone(), "delete-ratio")? {
        cfg.deletion_ratios = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Failure::Usage(format!("bad deletion ratio `{}`: {e}", s.trim())))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(t) = file.pick(eval_args.trials, "trials")? {
        cfg.trials = t;
    }
    if let Some(s) = file.pick(eval_args.seed, "seed")? {
        cfg.seed = s;
    }
    if let Some(n) = file.pick(eval_args.auc_samples, "auc-samples")? {
        cfg.auc = if n == 0 {
            AucMethod::Exact
        } else {
            AucMethod::Sampled { samples: n }
        };
    }
    cfg.precision_l = file.pick(eval_args.precision_l, "precision-l")?;
    Ok(cfg)
}

fn out_dir(file: &ConfigFile, args: &EvalArgs) -> Result<PathBuf, Failure> {
    let dir = match file.pick::<PathBuf>(args.out_dir.clone(), "out-dir")? {
        Some(d) => d,
        None => std::env::var_os("DRIFTLINK_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    };
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_file<F>(dir: &Path, name: &str, write: F) -> Result<PathBuf, Failure>
where
    F: FnOnce(&mut BufWriter<File>) -> driftlink::Result<()>,
{
    let path = dir.join(name);
    let f = File::create(&path)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    write(&mut w)?;
    w.flush().map_err(io_failure)?;
    Ok(path)
}

fn sort_records(records: &mut [MetricsReport]) {
    records.sort_by(|a, b| {
        (a.ratio_index, a.drift, a.index_position, a.trial).cmp(&(
            b.ratio_index,
            b.drift,
            b.index_position,
            b.trial,
        ))
    });
}

fn write_records(dir: &Path, records: &[MetricsReport]) -> Result<(), Failure> {
    write_file(dir, "trials.csv", |w| report::write_trials_csv(records, w))?;
    write_file(dir, "timings.csv", |w| {
        report::write_timings_csv(records, w)
    })?;
    Ok(())
}

/// Writes whatever finished before a failure, then reports the failure.
fn salvage(dir: &Path, mut partial: Vec<MetricsReport>, err: driftlink::Error) -> Failure {
    sort_records(&mut partial);
    if !partial.is_empty() {
        if let Err(f) = write_records(dir, &partial) {
            eprintln!("driftlink: could not save partial results: {f}");
        } else {
            eprintln!(
                "driftlink: wrote {} completed records to {}",
                partial.len(),
                dir.display()
            );
        }
    }
    Failure::from(err)
}

fn evaluate(
    file: &ConfigFile,
    data: &DataArgs,
    index: &IndexArgs,
    drift: &DriftArgs,
    eval_args: &EvalArgs,
    compare_original: bool,
) -> Result<(), Failure> {
    let mut cfg = experiment_config(file, data, index, eval_args)?;
    let (iterations, drift_cfg) = drift_settings(file, drift)?;
    cfg.drift = iterations.map(|it| DriftConfig {
        iterations: it,
        ..drift_cfg
    });
    cfg.compare_original = file
        .pick(compare_original.then_some(true), "compare-original")?
        .unwrap_or(false);
    if cfg.compare_original && cfg.drift.is_none() {
        return Err(Failure::Usage(
            "--compare-original needs --drift-iterations".into(),
        ));
    }
    cfg.validate()?;
    let dir = out_dir(file, eval_args)?;
    let ds = Dataset::load(file, data)?;

    let mut partial = Vec::new();
    let records = match eval::run_experiment_with(&ds.list.edges, &cfg, |r| partial.push(r.clone()))
    {
        Ok(r) => r,
        Err(e) => return Err(salvage(&dir, partial, e)),
    };
    write_records(&dir, &records)?;
    let summary = eval::summarize(&records);
    write_file(&dir, "summary.csv", |w| {
        report::write_summary_csv(&summary, w)
    })?;
    if cfg.compare_original {
        let rows = eval::compare_drift(&summary);
        write_file(&dir, "comparison.csv", |w| {
            report::write_comparison_csv(&rows, w)
        })?;
    }
    report::write_summary_csv(&summary, io::stdout().lock())?;
    Ok(())
}

fn sweep(
    file: &ConfigFile,
    data: &DataArgs,
    index: &IndexArgs,
    drift: &DriftArgs,
    eval_args: &EvalArgs,
    min_iterations: Option<u32>,
    max_iterations: Option<u32>,
) -> Result<(), Failure> {
    let mut cfg = experiment_config(file, data, index, eval_args)?;
    let (_, drift_cfg) = drift_settings(file, drift)?;
    cfg.drift = Some(drift_cfg);
    let lo: u32 = file.pick(min_iterations, "min-iterations")?.unwrap_or(0);
    let hi: u32 = file.pick(max_iterations, "max-iterations")?.unwrap_or(5);
    if lo > hi {
        return Err(Failure::Usage(format!(
            "min-iterations {lo} exceeds max-iterations {hi}"
        )));
    }
    DriftConfig {
        iterations: hi,
        ..drift_cfg
    }
    .validate()?;
    cfg.validate()?;
    let dir = out_dir(file, eval_args)?;
    let ds = Dataset::load(file, data)?;

    let mut partial = Vec::new();
    let result =
        eval::sweep_iterations_with(&ds.list.edges, &cfg, lo..=hi, |r| partial.push(r.clone()));
    let sweep = match result {
        Ok(s) => s,
        Err(e) => return Err(salvage(&dir, partial, e)),
    };
    write_records(&dir, &sweep.records)?;
    write_file(&dir, "sweep.csv", |w| {
        report::write_sweep_csv(&sweep.rows, w)
    })?;
    report::write_sweep_csv(&sweep.rows, io::stdout().lock())?;
    Ok(())
}
