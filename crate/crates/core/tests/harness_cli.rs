mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use costsense::harness::{self, Algo, ExperimentConfig, AGGREGATE_ID, CSV_COLUMNS};
use costsense::losses::Metric;

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_costsense"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// CSV text with every elapsed-time column blanked.
fn without_elapsed(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let drop: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("elapsed_ms")).collect();
    let keep = |l: &str| {
        l.split(',')
            .enumerate()
            .map(|(i, f)| if drop.contains(&i) { "" } else { f })
            .collect::<Vec<_>>()
            .join(",")
    };
    std::iter::once(keep(&header.join(",")))
        .chain(lines.map(keep))
        .collect::<Vec<_>>()
        .join("\n")
}

fn german_path() -> Option<String> {
    let p = common::data_dir().join("german.numer");
    p.exists().then(|| p.display().to_string())
}

#[test]
fn cli_output_is_deterministic() {
    let Some(ds) = german_path() else { return };
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let o = cli(&[
            "run", "--dataset", &ds, "--algo", "ssacog2", "--permutations", "4",
            "--eta-grid", "0.1,1,10", "--seed", "11", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(without_elapsed(&outs[0]), without_elapsed(&outs[1]));
    assert!(!outs[0].contains('\r'));
    assert!(outs[0].starts_with(&CSV_COLUMNS.join(",")));
}

#[test]
fn cli_rejects_bad_arguments() {
    for args in [
        &["run", "--dataset", "nope.txt", "--algo", "acog2"][..],
        &["run", "--dataset", "x", "--algo", "acog3"],
        &["run", "--dataset", "x", "--algo", "acog1", "--loss", "2"],
        &["run", "--dataset", "x", "--algo", "cog", "--rho-mode", "fixed:abc"],
    ] {
        let o = cli(args);
        assert!(!o.status.success(), "{args:?} should fail");
    }
}

#[test]
fn cli_writes_trace() {
    let Some(ds) = german_path() else { return };
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = cli(&[
        "run", "--dataset", &ds, "--algo", "cog2", "--metric", "cost", "--permutations", "1",
        "--eta-grid", "1", "--trace", trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(trace).unwrap();
    assert_eq!(text.lines().count(), 1001);
    assert!(text.starts_with(&harness::TRACE_COLUMNS.join(",")));
}

fn german_cfg(path: &Path, algo: &str, metric: Metric) -> ExperimentConfig {
    ExperimentConfig::new(path, algo.parse::<Algo>().unwrap(), metric)
}

#[test]
fn aggregate_recomputes_from_csv_rows() {
    let Some(ds) = common::german() else { return };
    let path = common::data_dir().join("german.numer");
    let mut cfg = german_cfg(&path, "acog2", Metric::Sum);
    cfg.permutations = 7;
    cfg.eta_grid = vec![1.0, 10.0];
    let report = harness::run_experiment(&cfg, &ds).unwrap();
    let mut buf = Vec::new();
    harness::write_csv(&report, &mut buf).unwrap();
    let parsed = harness::parse_csv(buf.as_slice()).unwrap();
    assert_eq!(parsed.rows, report.rows);
    let sums: Vec<f64> = parsed.rows.iter().map(|r| r.sum).collect();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    assert!((parsed.aggregate.sum.mean - mean).abs() <= 1e-12);
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sums.len() - 1) as f64;
    assert!((parsed.aggregate.sum.std - var.sqrt()).abs() <= 1e-12);
    let seeds: Vec<u64> = parsed.rows.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, (0..7).collect::<Vec<_>>());
    assert!(String::from_utf8(buf).unwrap().contains(&format!("\n{AGGREGATE_ID},")));
}

#[test]
fn evaluation_order_does_not_change_results() {
    let Some(ds) = common::german() else { return };
    let path = common::data_dir().join("german.numer");
    let mut cfg = german_cfg(&path, "acog1", Metric::Cost);
    cfg.permutations = 6;
    cfg.eta_grid = vec![1.0];
    let report = harness::run_experiment(&cfg, &ds).unwrap();
    for r in report.rows.iter().rev() {
        let single = harness::run_single(&cfg, &ds, 1.0, r.seed, false).unwrap();
        assert_eq!(single.sum.to_bits(), r.sum.to_bits());
        assert_eq!(single.cost.to_bits(), r.cost.to_bits());
    }
}

#[test]
fn acog2_single_german_pass_is_fast() {
    let Some(ds) = common::german() else { return };
    let path = common::data_dir().join("german.numer");
    let cfg = german_cfg(&path, "acog2", Metric::Sum);
    let start = Instant::now();
    let r = harness::run_single(&cfg, &ds, 10.0, 0, false).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(r.counts.t_pos + r.counts.t_neg, 1000);
}

#[test]
fn acog2_diag_cross_validation_on_german() {
    let Some(ds) = common::german() else { return };
    let path = common::data_dir().join("german.numer");
    let mut cfg = german_cfg(&path, "acog2-diag", Metric::Sum);
    cfg.folds = 5;
    let report = harness::run_cv(&cfg, &ds).unwrap();
    assert_eq!(report.rows.len(), 5);
    let sum = 100.0 * report.aggregate.sum.mean;
    assert!((sum - 66.036).abs() <= 5.0, "cv sum {sum}");
}
