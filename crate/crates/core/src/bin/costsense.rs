use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use costsense::acog::UpdateRule;
use costsense::data;
use costsense::harness::{self, Algo, ExperimentConfig, HarnessError, RunReport};
use costsense::losses::{LossVariant, Metric, RhoMode};
use costsense::metrics::EmptyClassPolicy;
use costsense::sacog::SketchOptions;
use costsense::sketch::SketchInit;

#[derive(Parser)]
#[command(name = "costsense", version, about = "Cost-sensitive online classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a learning rate, then evaluate over seeded permutations (or CV folds).
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Sum,
    Cost,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    New,
    Old,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Canonical,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmptyArg {
    Error,
    Perfect,
}

#[derive(Args)]
struct RunArgs {
    /// LIBSVM-format dataset with labels +1/-1.
    #[arg(long)]
    dataset: PathBuf,
    /// perceptron, pa1, cog, acog, acog-diag, sacog, ssacog; a trailing 1/2 picks the loss.
    #[arg(long)]
    algo: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    loss: Option<u8>,
    #[arg(long, value_enum, default_value = "sum")]
    metric: MetricArg,
    #[arg(long = "alpha-p", requires = "alpha_n")]
    alpha_p: Option<f64>,
    #[arg(long = "alpha-n", requires = "alpha_p")]
    alpha_n: Option<f64>,
    #[arg(long, requires = "cn")]
    cp: Option<f64>,
    #[arg(long, requires = "cp")]
    cn: Option<f64>,
    /// oracle, laplace or fixed:R
    #[arg(long = "rho-mode", default_value = "oracle", value_parser = parse_rho)]
    rho_mode: RhoMode,
    /// Comma-separated learning rates (aggressiveness caps for pa1).
    #[arg(long = "eta-grid", value_delimiter = ',')]
    eta_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long = "sketch-size", default_value_t = 5)]
    sketch_size: usize,
    #[arg(long = "sketch-init", value_enum, default_value = "canonical")]
    sketch_init: InitArg,
    /// Advance the sketch only every k rounds.
    #[arg(long = "sketch-lazy")]
    sketch_lazy: Option<usize>,
    /// Advance the sketch only on rounds with positive loss.
    #[arg(long = "sketch-on-loss-only")]
    sketch_on_loss_only: bool,
    #[arg(long = "update-rule", value_enum, default_value = "new")]
    update_rule: RuleArg,
    #[arg(long, default_value_t = 20)]
    permutations: usize,
    #[arg(long = "selection-runs", default_value_t = 3)]
    selection_runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 0 runs the online protocol; k >= 2 runs k-fold cross-validation.
    #[arg(long, default_value_t = 0)]
    folds: usize,
    #[arg(long = "empty-class", value_enum, default_value = "error")]
    empty_class: EmptyArg,
    /// CSV report destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-round trace of the first evaluation permutation.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn parse_rho(s: &str) -> Result<RhoMode, String> {
    match s {
        "oracle" => Ok(RhoMode::Oracle),
        "laplace" => Ok(RhoMode::Laplace),
        _ => {
            let r = s
                .strip_prefix("fixed:")
                .ok_or_else(|| format!("expected oracle, laplace or fixed:R, got '{s}'"))?;
            r.parse::<f64>()
                .map(RhoMode::Fixed)
                .map_err(|e| format!("bad rho '{r}': {e}"))
        }
    }
}

fn config(a: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let loss = a.loss.and_then(LossVariant::from_index);
    let algo = Algo::parse(&a.algo, loss)?;
    let metric = match a.metric {
        MetricArg::Sum => Metric::Sum,
        MetricArg::Cost => Metric::Cost,
    };
    let mut cfg = ExperimentConfig::new(&a.dataset, algo, metric);
    if let (Some(p), Some(n)) = (a.alpha_p, a.alpha_n) {
        cfg.alpha = (p, n);
    }
    if let (Some(p), Some(n)) = (a.cp, a.cn) {
        cfg.costs = (p, n);
    }
    cfg.rho_mode = a.rho_mode;
    if let Some(g) = &a.eta_grid {
        cfg.eta_grid = g.clone();
    }
    cfg.gamma = a.gamma;
    cfg.sketch = SketchOptions {
        size: a.sketch_size,
        init: match a.sketch_init {
            InitArg::Canonical => SketchInit::Canonical,
            InitArg::Random => SketchInit::Random { seed: a.seed },
        },
        lazy: a.sketch_lazy,
        on_loss_only: a.sketch_on_loss_only,
    };
    cfg.update_rule = match a.update_rule {
        RuleArg::New => UpdateRule::NewSigma,
        RuleArg::Old => UpdateRule::OldSigma,
    };
    cfg.permutations = a.permutations;
    cfg.selection_runs = a.selection_runs;
    cfg.seed = a.seed;
    cfg.folds = a.folds;
    cfg.empty_class = match a.empty_class {
        EmptyArg::Error => EmptyClassPolicy::Error,
        EmptyArg::Perfect => EmptyClassPolicy::Perfect,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(r: &RunReport) {
    let a = &r.aggregate;
    let mode = if r.config.folds >= 2 {
        format!("{}-fold cv", r.config.folds)
    } else {
        format!("{} permutations", r.rows.len())
    };
    println!("algo {}  eta {}  ({mode})", r.config.algo, r.eta);
    println!("{:<14} {:>10} {:>10}", "", "mean", "std");
    let pct = |name: &str, s: harness::Stat| {
        println!("{:<14} {:>10.3} {:>10.3}", name, 100.0 * s.mean, 100.0 * s.std)
    };
    pct("sum (%)", a.sum);
    pct("sensitivity %", a.sensitivity);
    pct("specificity %", a.specificity);
    println!("{:<14} {:>10.3} {:>10.3}", "Cost(10^2)", a.cost.mean / 100.0, a.cost.std / 100.0);
    println!("{:<14} {:>10.1} {:>10.1}", "time (ms)", a.elapsed_ms.mean, a.elapsed_ms.std);
}

fn run(a: &RunArgs) -> Result<(), HarnessError> {
    let cfg = config(a)?;
    let ds = data::load_dataset(&cfg.dataset)?;
    let report = if cfg.folds >= 2 {
        harness::run_cv(&cfg, &ds)?
    } else {
        harness::run_experiment(&cfg, &ds)?
    };
    if let Some(path) = &a.out {
        harness::emit_csv(&report, path)?;
    }
    if let Some(path) = &a.trace {
        let r = harness::run_single(&cfg, &ds, report.eta, cfg.seed, true)?;
        let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        harness::write_trace(r.trace.as_deref().unwrap_or_default(), std::io::BufWriter::new(file))?;
    }
    print_summary(&report);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
