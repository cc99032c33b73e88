//! End-to-end checks of the CLI: CSV schemas, value round trips, config
//! precedence, and binary exit codes.

use std::path::Path;
use std::process::Command as Process;

use iascan::cli::{execute, parse_args, ExperimentSpec};
use iascan::dist::triangular_pmf;

fn spec(args: &[&str]) -> ExperimentSpec {
    let mut argv = vec!["iascan".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    parse_args(argv).unwrap()
}

fn run(args: &[&str], out: &Path) -> (String, String) {
    let mut args = args.to_vec();
    let out_str = out.display().to_string();
    args.push("--out");
    args.push(&out_str);
    let spec = spec(&args);
    let mut stdout = Vec::new();
    execute(&spec, &mut stdout).unwrap();
    (
        std::fs::read_to_string(out).unwrap(),
        String::from_utf8(stdout).unwrap(),
    )
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn dist_csv_round_trips_triangular_values() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, summary) = run(
        &["dist", "--dist", "triangular", "--N", "17", "--L", "8"],
        &dir.path().join("dist.csv"),
    );
    assert!(csv.ends_with('\n'));
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["index", "probability"]);
    assert_eq!(rows.len(), 17);
    let expected = triangular_pmf(17, 8).unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        let parsed: f64 = row[1].parse().unwrap();
        assert!(
            (parsed - expected.prob(i + 1)).abs() <= 1e-12,
            "sector {}: {} vs {}",
            i + 1,
            parsed,
            expected.prob(i + 1)
        );
    }
    assert!(summary.contains("17 rows"));
}

#[test]
fn dist_arrival_rows_follow_truncation_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = run(
        &["dist", "--arrival", "--mu", "0.1", "--tail-tol", "1e-9"],
        &dir.path().join("arr.csv"),
    );
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["index", "probability"]);
    assert_eq!(rows.len(), 208);
    let w1: f64 = rows[0][1].parse().unwrap();
    assert!((w1 - (1.0 - (-0.1f64).exp())).abs() < 1e-12);
}

#[test]
fn sequence_smbi_starts_at_triangular_peak() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = run(
        &[
            "sequence", "--strategy", "smbi", "--L", "10", "--mu", "0.1", "--horizon", "40",
        ],
        &dir.path().join("seq.csv"),
    );
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["slot", "sector"]);
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0], ["1", "9"]);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        let sector: usize = row[1].parse().unwrap();
        assert!((1..=17).contains(&sector));
    }
}

#[test]
fn analytic_summary_schema_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let pmf_path = dir.path().join("pmf.csv");
    let out = dir.path().join("analytic.csv");
    let args = [
        "analytic",
        "--strategy",
        "mlri",
        "--dist",
        "uniform",
        "--N",
        "17",
        "--pmf-out",
    ];
    let mut argv: Vec<&str> = args.to_vec();
    let pmf_str = pmf_path.display().to_string();
    argv.push(&pmf_str);
    let (csv, summary) = run(&argv, &out);
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["quantity", "value"]);
    let quantities: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(quantities, ["mean", "variance", "censored_mass"]);
    let mean: f64 = rows[0][1].parse().unwrap();
    assert!((mean - 16.0).abs() < 1e-9);
    assert!(summary.contains("mean=16.0"));

    let (pmf_header, pmf_rows) = parse_csv(&std::fs::read_to_string(&pmf_path).unwrap());
    assert_eq!(pmf_header, ["tau", "probability"]);
    assert_eq!(pmf_rows.len(), 171); // tau-max defaults to 10*N
    let m0: f64 = pmf_rows[0][1].parse().unwrap();
    assert!((m0 - 17.0 * (1.0 / 17.0) * (1.0 / 17.0)).abs() < 1e-12);
}

#[test]
fn simulate_histogram_consistent_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, summary) = run(
        &[
            "simulate", "--strategy", "ea", "--trials", "5000", "--seed", "3",
        ],
        &dir.path().join("hist.csv"),
    );
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["tau", "count", "frequency"]);
    let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 5000);
    for row in &rows {
        let count: u64 = row[1].parse().unwrap();
        let freq: f64 = row[2].parse().unwrap();
        assert!((freq - count as f64 / 5000.0).abs() < 1e-12);
    }
    assert!(summary.contains("censored=0"));
}

#[test]
fn sweep_l_has_all_strategies_per_l() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = run(
        &[
            "sweep-L", "--L", "2:6:2", "--mu", "0.1", "--trials", "500", "--seed", "1",
        ],
        &dir.path().join("sweep.csv"),
    );
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["param", "strategy", "mean", "std_error", "censored"]);
    assert_eq!(rows.len(), 9);
    for (i, l) in [2.0, 4.0, 6.0].iter().enumerate() {
        for (j, strategy) in ["ea", "mlri", "smbi"].iter().enumerate() {
            let row = &rows[3 * i + j];
            let param: f64 = row[0].parse().unwrap();
            assert_eq!(param, *l);
            assert_eq!(row[1], *strategy);
            let _: f64 = row[2].parse().unwrap();
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "N=17\nmu=0.5\ntrials=800\nstrategy=ea\n# comment\n").unwrap();
    let out = dir.path().join("h.csv");
    let cfg_str = cfg.display().to_string();
    let (csv, summary) = run(
        &["simulate", "--config", &cfg_str, "--trials", "1200"],
        &out,
    );
    // Flag wins over config for trials; strategy comes from the config.
    let (_, rows) = parse_csv(&csv);
    let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1200);
    assert!(summary.contains("strategy=ea"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_iascan");
    let dir = tempfile::tempdir().unwrap();

    let bad = Process::new(bin)
        .args(["simulate", "--strategy", "ea", "--trials", "0"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--trials"));

    let unknown = Process::new(bin)
        .args(["simulate", "--bogus"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let out = dir.path().join("h.csv");
    let good = Process::new(bin)
        .args([
            "simulate",
            "--strategy",
            "smbi",
            "--trials",
            "400",
            "--out",
            out.to_str().unwrap(),
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(good.status.code(), Some(0), "{:?}", good);
    assert!(String::from_utf8_lossy(&good.stdout).contains("mean="));
    assert!(out.exists());

    let unwritable = Process::new(bin)
        .args([
            "simulate",
            "--strategy",
            "ea",
            "--trials",
            "10",
            "--out",
            "/nonexistent-dir/h.csv",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unwritable.stderr).contains("/nonexistent-dir/h.csv"));
}
