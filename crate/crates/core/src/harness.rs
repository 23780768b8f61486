//! Experiment orchestration: learner construction, the prequential loop,
//! learning-rate selection, permutation sweeps, cross-validation and CSV I/O.
//!
//! Seeds: evaluation run `i` uses `seed + i` for `i < permutations`; the
//! selection runs use `seed + permutations + j` for `j < selection_runs`, so
//! the two sets never overlap.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::acog::{AcogError, AcogParams, CovarianceMode, GaussianModel, UpdateRule};
use crate::baselines::{Baseline, LinearModel};
use crate::data::{self, DataError, Dataset};
use crate::learner::{Learner, LearnerError};
use crate::losses::{self, CostModel, CostModelError, LossVariant, Metric, RhoMode};
use crate::metrics::{self, ConfusionCounts, EmptyClassPolicy, MetricsError};
use crate::sacog::{SketchOptions, SketchParams, SketchedModel, SparseSketchedModel};
use crate::sketch::SketchError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    CostModel(#[from] CostModelError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Acog(#[from] AcogError),
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Csv(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgoKind {
    Perceptron,
    Pa1,
    Cog,
    Acog,
    AcogDiag,
    Sacog,
    Ssacog,
}

impl AlgoKind {
    /// Whether the loss variant matters for this family.
    pub fn uses_loss(self) -> bool {
        !matches!(self, AlgoKind::Perceptron | AlgoKind::Pa1)
    }

    /// Perceptron has no tunable parameter; the grid is skipped for it.
    pub fn tunable(self) -> bool {
        self != AlgoKind::Perceptron
    }
}

/// A learner family plus loss variant, e.g. `acog2-diag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Algo {
    pub kind: AlgoKind,
    pub variant: LossVariant,
}

impl Algo {
    pub fn new(kind: AlgoKind, variant: LossVariant) -> Self {
        Self { kind, variant }
    }

    /// Parses an id. A trailing digit fixes the variant; without it `loss`
    /// is used (default variant I). A digit that contradicts `loss` is an error.
    pub fn parse(id: &str, loss: Option<LossVariant>) -> Result<Self, HarnessError> {
        let bad = || HarnessError::Config(format!("unknown algorithm '{id}'"));
        let (stem, diag) = match id.strip_suffix("-diag") {
            Some(s) => (s, true),
            None => (id, false),
        };
        let (base, digit) = match stem.chars().last() {
            Some(c @ ('1' | '2')) => (&stem[..stem.len() - 1], LossVariant::from_index(c as u8 - b'0')),
            _ => (stem, None),
        };
        let kind = match (base, diag) {
            ("perceptron", false) => AlgoKind::Perceptron,
            ("pa", false) if digit == Some(LossVariant::I) => AlgoKind::Pa1,
            ("pa1", false) => AlgoKind::Pa1,
            ("cog", false) => AlgoKind::Cog,
            ("acog", false) => AlgoKind::Acog,
            ("acog", true) => AlgoKind::AcogDiag,
            ("sacog", false) => AlgoKind::Sacog,
            ("ssacog", false) => AlgoKind::Ssacog,
            _ => return Err(bad()),
        };
        let digit = if kind == AlgoKind::Pa1 { None } else { digit };
        if !kind.uses_loss() && digit.is_some() {
            return Err(bad());
        }
        let variant = match (digit, loss) {
            (Some(d), Some(l)) if d != l => {
                return Err(HarnessError::Config(format!(
                    "algorithm '{id}' conflicts with --loss {}",
                    l.index()
                )))
            }
            (Some(d), _) => d,
            (None, Some(l)) => l,
            (None, None) => LossVariant::I,
        };
        Ok(Self { kind, variant })
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.variant.index();
        match self.kind {
            AlgoKind::Perceptron => write!(f, "perceptron"),
            AlgoKind::Pa1 => write!(f, "pa1"),
            AlgoKind::Cog => write!(f, "cog{v}"),
            AlgoKind::Acog => write!(f, "acog{v}"),
            AlgoKind::AcogDiag => write!(f, "acog{v}-diag"),
            AlgoKind::Sacog => write!(f, "sacog{v}"),
            AlgoKind::Ssacog => write!(f, "ssacog{v}"),
        }
    }
}

impl FromStr for Algo {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::parse(s, None)
    }
}

/// `10^-5, ..., 10^5`.
pub fn default_eta_grid() -> Vec<f64> {
    (-5..=5).map(|e| 10f64.powi(e)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub algo: Algo,
    pub metric: Metric,
    pub alpha: (f64, f64),
    pub costs: (f64, f64),
    pub rho_mode: RhoMode,
    /// Learning rates to select from; the aggressiveness cap for PA-I.
    pub eta_grid: Vec<f64>,
    pub gamma: f64,
    pub sketch: SketchOptions,
    pub update_rule: UpdateRule,
    pub permutations: usize,
    pub selection_runs: usize,
    pub seed: u64,
    /// 0 for the online protocol, otherwise the number of CV folds.
    pub folds: usize,
    pub empty_class: EmptyClassPolicy,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>, algo: Algo, metric: Metric) -> Self {
        Self {
            dataset: dataset.into(),
            algo,
            metric,
            alpha: (0.5, 0.5),
            costs: (0.9, 0.1),
            rho_mode: RhoMode::Oracle,
            eta_grid: default_eta_grid(),
            gamma: 1.0,
            sketch: SketchOptions::default(),
            update_rule: UpdateRule::NewSigma,
            permutations: 20,
            selection_runs: 3,
            seed: 0,
            folds: 0,
            empty_class: EmptyClassPolicy::Error,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.eta_grid.is_empty() {
            return Err(HarnessError::Config("eta grid is empty".into()));
        }
        if let Some(bad) = self.eta_grid.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(HarnessError::Config(format!("eta {bad} is not positive")));
        }
        if self.permutations == 0 {
            return Err(HarnessError::Config("permutations must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(HarnessError::Config(format!("gamma {} is not positive", self.gamma)));
        }
        if self.folds == 1 {
            return Err(HarnessError::Config("folds must be 0 or at least 2".into()));
        }
        self.cost_model()?;
        Ok(())
    }

    pub fn cost_model(&self) -> Result<CostModel, CostModelError> {
        CostModel::new(self.metric, self.alpha, self.costs, self.rho_mode)
    }

    fn eval_seeds(&self) -> Vec<u64> {
        (0..self.permutations as u64).map(|i| self.seed + i).collect()
    }

    fn selection_seeds(&self) -> Vec<u64> {
        let base = self.seed + self.permutations as u64;
        (0..self.selection_runs.max(1) as u64).map(|j| base + j).collect()
    }
}

/// Builds a fresh learner of the configured family.
pub fn build_learner(
    cfg: &ExperimentConfig,
    eta: f64,
    dim: usize,
) -> Result<Box<dyn Learner>, HarnessError> {
    let v = cfg.algo.variant;
    let sketch_params = SketchParams {
        eta,
        gamma: cfg.gamma,
        variant: v,
    };
    let acog = |mode| {
        let params = AcogParams {
            update_rule: cfg.update_rule,
            ..AcogParams::new(eta, cfg.gamma, v)
        };
        GaussianModel::init(dim, mode, params)
    };
    Ok(match cfg.algo.kind {
        AlgoKind::Perceptron => Box::new(LinearModel::new(dim, Baseline::Perceptron)),
        AlgoKind::Pa1 => Box::new(LinearModel::new(dim, Baseline::PassiveAggressive { c: eta })),
        AlgoKind::Cog => Box::new(LinearModel::new(dim, Baseline::Cog { eta, variant: v })),
        AlgoKind::Acog => Box::new(acog(CovarianceMode::Full)?),
        AlgoKind::AcogDiag => Box::new(acog(CovarianceMode::Diagonal)?),
        AlgoKind::Sacog => Box::new(SketchedModel::new(dim, sketch_params, cfg.sketch)?),
        AlgoKind::Ssacog => Box::new(SparseSketchedModel::new(dim, sketch_params, cfg.sketch)?),
    })
}

/// One row of a per-round trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub round: u64,
    pub cum_loss: f64,
    pub mistakes_pos: u64,
    pub mistakes_neg: u64,
    /// Weighted sum so far; a class not yet seen counts as perfect.
    pub sum: f64,
    pub cost: f64,
}

/// Outcome of one pass over one permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub eta: f64,
    pub counts: ConfusionCounts,
    pub sum: f64,
    pub cost: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// `sum_t loss_t(mu_t)` with each round's `rho`.
    pub cum_loss: f64,
    pub elapsed_ms: f64,
    pub trace: Option<Vec<TraceRow>>,
}

/// Streams `ds` in the order given by `permutation(n, seed)` through a fresh
/// learner: predict with the pre-update weights, reveal, update.
pub fn run_single(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    eta: f64,
    seed: u64,
    trace: bool,
) -> Result<RunResult, HarnessError> {
    let learner = build_learner(cfg, eta, ds.dim())?;
    run_single_with(cfg, ds, eta, seed, trace, learner)
}

/// [`run_single`] with a caller-supplied learner.
pub fn run_single_with<L: Learner + ?Sized>(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    eta: f64,
    seed: u64,
    trace: bool,
    mut learner: Box<L>,
) -> Result<RunResult, HarnessError> {
    let start = Instant::now();
    let mut cm = cfg.cost_model()?;
    let counts_all = Some((ds.t_pos(), ds.t_neg()));
    let fixed_rho = match cfg.rho_mode {
        RhoMode::Laplace => None,
        _ => Some(cm.resolve_rho(counts_all)?),
    };
    let (ap, an) = cfg.alpha;
    let (cp, cn) = cfg.costs;
    let mut cc = ConfusionCounts::default();
    let mut cum_loss = 0.0;
    let mut rows = trace.then(|| Vec::with_capacity(ds.len()));
    let examples = ds.examples();
    for (t, &i) in data::permutation(ds.len(), seed).iter().enumerate() {
        let ex = &examples[i];
        let rho = match fixed_rho {
            Some(r) => r,
            None => cm.resolve_rho(counts_all)?,
        };
        let score = learner.score(&ex.features);
        cc.record(crate::data::Label::from_score(score), ex.label);
        cum_loss += losses::loss(cfg.algo.variant, score, ex.label, rho);
        learner.update(&ex.features, ex.label, rho)?;
        cm.observe_label(ex.label);
        if let Some(rows) = rows.as_mut() {
            rows.push(TraceRow {
                round: t as u64 + 1,
                cum_loss,
                mistakes_pos: cc.m_pos,
                mistakes_neg: cc.m_neg,
                sum: metrics::sum_metric_with(&cc, ap, an, EmptyClassPolicy::Perfect)?,
                cost: metrics::cost_metric(&cc, cp, cn),
            });
        }
    }
    let sum = metrics::sum_metric_with(&cc, ap, an, cfg.empty_class)?;
    Ok(RunResult {
        seed,
        eta,
        counts: cc,
        sum,
        cost: metrics::cost_metric(&cc, cp, cn),
        sensitivity: cc.sensitivity().unwrap_or(f64::NAN),
        specificity: cc.specificity().unwrap_or(f64::NAN),
        cum_loss,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: rows,
    })
}

fn target(cfg: &ExperimentConfig, r: &RunResult) -> f64 {
    match cfg.metric {
        Metric::Sum => r.sum,
        Metric::Cost => r.cost,
    }
}

/// Mean selection-run metric for one grid value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridScore {
    pub eta: f64,
    pub mean: f64,
}

/// Picks the grid value with the best mean metric over the selection runs
/// (max sum or min cost). Ties and non-finite scores go to the smaller eta.
pub fn grid_select(cfg: &ExperimentConfig, ds: &Dataset) -> Result<(f64, Vec<GridScore>), HarnessError> {
    cfg.validate()?;
    let mut grid = cfg.eta_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if !cfg.algo.kind.tunable() || grid.len() == 1 {
        return Ok((grid[0], Vec::new()));
    }
    let seeds = cfg.selection_seeds();
    let jobs: Vec<(f64, u64)> = grid
        .iter()
        .flat_map(|&eta| seeds.iter().map(move |&s| (eta, s)))
        .collect();
    let results: Vec<f64> = jobs
        .par_iter()
        .map(|&(eta, s)| run_single(cfg, ds, eta, s, false).map(|r| target(cfg, &r)))
        .collect::<Result<_, _>>()?;
    let scores: Vec<GridScore> = grid
        .iter()
        .zip(results.chunks(seeds.len()))
        .map(|(&eta, vals)| GridScore {
            eta,
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
        })
        .collect();
    let better = |a: f64, b: f64| match cfg.metric {
        Metric::Sum => a > b,
        Metric::Cost => a < b,
    };
    let mut best: Option<GridScore> = None;
    for s in &scores {
        if !s.mean.is_finite() {
            continue;
        }
        if best.is_none_or(|b| better(s.mean, b.mean)) {
            best = Some(*s);
        }
    }
    let eta = best.map_or(grid[0], |b| b.eta);
    log::info!("selected eta = {eta} for {}", cfg.algo);
    Ok((eta, scores))
}

/// One emitted CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub run_id: String,
    pub seed: u64,
    pub eta: f64,
    pub sum: f64,
    pub cost: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub mistakes_pos: u64,
    pub mistakes_neg: u64,
    pub elapsed_ms: f64,
}

impl RunRow {
    fn from_result(run_id: String, r: &RunResult) -> Self {
        Self {
            run_id,
            seed: r.seed,
            eta: r.eta,
            sum: r.sum,
            cost: r.cost,
            sensitivity: r.sensitivity,
            specificity: r.specificity,
            mistakes_pos: r.counts.m_pos,
            mistakes_neg: r.counts.m_neg,
            elapsed_ms: r.elapsed_ms,
        }
    }
}

/// Mean and sample std of a column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.collect();
        let (mean, std) = metrics::mean_std(&v);
        Self { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub eta: f64,
    pub sum: Stat,
    pub cost: Stat,
    pub sensitivity: Stat,
    pub specificity: Stat,
    pub mistakes_pos: Stat,
    pub mistakes_neg: Stat,
    pub elapsed_ms: Stat,
}

impl Aggregate {
    pub fn from_rows(eta: f64, rows: &[RunRow]) -> Self {
        Self {
            eta,
            sum: Stat::of(rows.iter().map(|r| r.sum)),
            cost: Stat::of(rows.iter().map(|r| r.cost)),
            sensitivity: Stat::of(rows.iter().map(|r| r.sensitivity)),
            specificity: Stat::of(rows.iter().map(|r| r.specificity)),
            mistakes_pos: Stat::of(rows.iter().map(|r| r.mistakes_pos as f64)),
            mistakes_neg: Stat::of(rows.iter().map(|r| r.mistakes_neg as f64)),
            elapsed_ms: Stat::of(rows.iter().map(|r| r.elapsed_ms)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub eta: f64,
    pub grid: Vec<GridScore>,
    /// Sorted by seed (fold index in CV mode).
    pub rows: Vec<RunRow>,
    pub aggregate: Aggregate,
}

/// Grid selection followed by `permutations` evaluation runs in parallel.
pub fn run_experiment(cfg: &ExperimentConfig, ds: &Dataset) -> Result<RunReport, HarnessError> {
    let (eta, grid) = grid_select(cfg, ds)?;
    let mut results: Vec<RunResult> = cfg
        .eval_seeds()
        .par_iter()
        .map(|&s| run_single(cfg, ds, eta, s, false))
        .collect::<Result<_, _>>()?;
    results.sort_by_key(|r| r.seed);
    let rows: Vec<RunRow> = results
        .iter()
        .enumerate()
        .map(|(i, r)| RunRow::from_result(i.to_string(), r))
        .collect();
    let aggregate = Aggregate::from_rows(eta, &rows);
    Ok(RunReport {
        config: cfg.clone(),
        eta,
        grid,
        rows,
        aggregate,
    })
}

/// Loads the configured dataset and dispatches to the online or CV protocol.
pub fn run_from_config(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    cfg.validate()?;
    let ds = data::load_dataset(&cfg.dataset)?;
    if cfg.folds >= 2 {
        run_cv(cfg, &ds)
    } else {
        run_experiment(cfg, &ds)
    }
}

/// `folds`-fold cross-validation. The learning rate comes from
/// [`grid_select`] on the online protocol; each fold then trains one pass
/// over a seeded permutation of the other folds and scores the held-out fold
/// with frozen weights.
pub fn run_cv(cfg: &ExperimentConfig, ds: &Dataset) -> Result<RunReport, HarnessError> {
    let (eta, grid) = grid_select(cfg, ds)?;
    let mut report = run_cv_with(cfg, ds, eta, |dim| build_learner(cfg, eta, dim))?;
    report.grid = grid;
    Ok(report)
}

/// [`run_cv`] at a fixed `eta` with a learner factory.
pub fn run_cv_with<F>(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    eta: f64,
    make: F,
) -> Result<RunReport, HarnessError>
where
    F: Fn(usize) -> Result<Box<dyn Learner>, HarnessError> + Sync,
{
    let folds = ds.split_folds(cfg.folds, cfg.seed)?;
    let (ap, an) = cfg.alpha;
    let (cp, cn) = cfg.costs;
    let rows: Vec<RunRow> = (0..folds.len())
        .into_par_iter()
        .map(|k| -> Result<RunRow, HarnessError> {
            let start = Instant::now();
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            let order = data::permutation(train.len(), cfg.seed.wrapping_add(k as u64));
            let train_ds = ds.subset(&order.iter().map(|&i| train[i]).collect::<Vec<_>>())?;
            let mut cm = cfg.cost_model()?;
            let counts = Some((train_ds.t_pos(), train_ds.t_neg()));
            let mut learner = make(ds.dim())?;
            for ex in train_ds.examples() {
                let rho = cm.resolve_rho(counts)?;
                learner.update(&ex.features, ex.label, rho)?;
                cm.observe_label(ex.label);
            }
            let mut cc = ConfusionCounts::default();
            for &i in &folds[k] {
                let ex = &ds.examples()[i];
                cc.record(learner.predict(&ex.features), ex.label);
            }
            Ok(RunRow {
                run_id: k.to_string(),
                seed: cfg.seed,
                eta,
                sum: metrics::sum_metric_with(&cc, ap, an, cfg.empty_class)?,
                cost: metrics::cost_metric(&cc, cp, cn),
                sensitivity: cc.sensitivity().unwrap_or(f64::NAN),
                specificity: cc.specificity().unwrap_or(f64::NAN),
                mistakes_pos: cc.m_pos,
                mistakes_neg: cc.m_neg,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<_, _>>()?;
    let aggregate = Aggregate::from_rows(eta, &rows);
    Ok(RunReport {
        config: cfg.clone(),
        eta,
        grid: Vec::new(),
        rows,
        aggregate,
    })
}

pub const CSV_COLUMNS: [&str; 10] = [
    "run_id",
    "seed",
    "eta",
    "sum",
    "cost",
    "sensitivity",
    "specificity",
    "mistakes_pos",
    "mistakes_neg",
    "elapsed_ms",
];

const STD_COLUMNS: [&str; 7] = [
    "sum_std",
    "cost_std",
    "sensitivity_std",
    "specificity_std",
    "mistakes_pos_std",
    "mistakes_neg_std",
    "elapsed_ms_std",
];

pub const AGGREGATE_ID: &str = "aggregate";

/// Writes the report: header, one row per run, then the aggregate row
/// (`run_id = aggregate`, empty seed, means in the main columns and sample
/// standard deviations in the `*_std` columns).
pub fn write_csv<W: Write>(report: &RunReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let header: Vec<&str> = CSV_COLUMNS.iter().chain(STD_COLUMNS.iter()).copied().collect();
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec = vec![
            r.run_id.clone(),
            r.seed.to_string(),
            r.eta.to_string(),
            r.sum.to_string(),
            r.cost.to_string(),
            r.sensitivity.to_string(),
            r.specificity.to_string(),
            r.mistakes_pos.to_string(),
            r.mistakes_neg.to_string(),
            r.elapsed_ms.to_string(),
        ];
        rec.extend(std::iter::repeat_n(String::new(), STD_COLUMNS.len()));
        w.write_record(&rec)?;
    }
    let a = &report.aggregate;
    let stats = [
        a.sum,
        a.cost,
        a.sensitivity,
        a.specificity,
        a.mistakes_pos,
        a.mistakes_neg,
        a.elapsed_ms,
    ];
    let mut rec = vec![AGGREGATE_ID.to_string(), String::new(), a.eta.to_string()];
    rec.extend(stats.iter().map(|s| s.mean.to_string()));
    rec.extend(stats.iter().map(|s| s.std.to_string()));
    w.write_record(&rec)?;
    w.flush().map_err(|e| HarnessError::Csv(e.to_string()))?;
    Ok(())
}

pub fn emit_csv(report: &RunReport, path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(report, std::io::BufWriter::new(file))
}

/// Rows and aggregate recovered from [`write_csv`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub rows: Vec<RunRow>,
    pub aggregate: Aggregate,
}

pub fn parse_csv<R: Read>(input: R) -> Result<ParsedCsv, HarnessError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = CSV_COLUMNS.iter().chain(STD_COLUMNS.iter()).copied().collect();
    if header != expected {
        return Err(HarnessError::Csv(format!("unexpected header {header:?}")));
    }
    let f = |s: &str| -> Result<f64, HarnessError> {
        s.parse().map_err(|_| HarnessError::Csv(format!("bad number '{s}'")))
    };
    let u = |s: &str| -> Result<u64, HarnessError> {
        s.parse().map_err(|_| HarnessError::Csv(format!("bad integer '{s}'")))
    };
    let mut rows = Vec::new();
    let mut aggregate = None;
    for rec in rd.records() {
        let rec = rec?;
        if &rec[0] == AGGREGATE_ID {
            let st = |i: usize| -> Result<Stat, HarnessError> {
                Ok(Stat {
                    mean: f(&rec[3 + i])?,
                    std: f(&rec[10 + i])?,
                })
            };
            aggregate = Some(Aggregate {
                eta: f(&rec[2])?,
                sum: st(0)?,
                cost: st(1)?,
                sensitivity: st(2)?,
                specificity: st(3)?,
                mistakes_pos: st(4)?,
                mistakes_neg: st(5)?,
                elapsed_ms: st(6)?,
            });
        } else {
            rows.push(RunRow {
                run_id: rec[0].to_string(),
                seed: u(&rec[1])?,
                eta: f(&rec[2])?,
                sum: f(&rec[3])?,
                cost: f(&rec[4])?,
                sensitivity: f(&rec[5])?,
                specificity: f(&rec[6])?,
                mistakes_pos: u(&rec[7])?,
                mistakes_neg: u(&rec[8])?,
                elapsed_ms: f(&rec[9])?,
            });
        }
    }
    let aggregate = aggregate.ok_or_else(|| HarnessError::Csv("missing aggregate row".into()))?;
    Ok(ParsedCsv { rows, aggregate })
}

pub const TRACE_COLUMNS: [&str; 6] = ["round", "cum_loss", "mistakes_pos", "mistakes_neg", "sum", "cost"];

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            r.cum_loss.to_string(),
            r.mistakes_pos.to_string(),
            r.mistakes_neg.to_string(),
            r.sum.to_string(),
            r.cost.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.to_string()))?;
    Ok(())
}
