use std::process::Command;

use commest::cli::{
    run_bounds, run_simulate, run_verify, ExperimentConfig, BOUNDS_CSV_HEADER, SIMULATE_CSV_HEADER,
};
use commest::infotheory::SUITE_CSV_HEADER;

fn column(header: &str, row: &str, name: &str) -> String {
    let i = header.split(',').position(|h| h == name).unwrap();
    row.split(',').nth(i).unwrap().to_string()
}

fn num(header: &str, row: &str, name: &str) -> f64 {
    column(header, row, name).parse().unwrap()
}

fn commest(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_commest")).args(args).output().unwrap()
}

#[test]
fn onebit_sweep_tracks_d_over_m() {
    let cfg = ExperimentConfig::parse(
        "protocol = onebit\nfamily = bounded\nm = 25\nm = 100\nm = 400\nn = 1\nd = 8\ntheta = 0\ntrials = 4000\nseed = 3\n",
    )
    .unwrap();
    let rows = run_simulate(&cfg);
    assert_eq!(rows[0], SIMULATE_CSV_HEADER);
    assert_eq!(rows.len(), 4);
    for (row, m) in rows[1..].iter().zip([25.0, 100.0, 400.0]) {
        let mse = num(SIMULATE_CSV_HEADER, row, "mse_mean");
        let se = num(SIMULATE_CSV_HEADER, row, "mse_stderr");
        assert!((mse - 8.0 / m).abs() <= 3.0 * se, "{row}");
        assert_eq!(num(SIMULATE_CSV_HEADER, row, "centralized_rate"), 8.0 / m);
        assert_eq!(column(SIMULATE_CSV_HEADER, row, "bound_id"), "prop2");
        assert_eq!(column(SIMULATE_CSV_HEADER, row, "error"), "");
    }
}

#[test]
fn gaussian_row_matches_protocol_numbers() {
    let cfg = ExperimentConfig::parse(
        "protocol = gauss_qavg\nfamily = gaussian\nsigma = 1\nm = 16\nn = 64\nd = 4\ntheta = 0.25\ntrials = 3000\n",
    )
    .unwrap();
    let rows = run_simulate(&cfg);
    let row = &rows[1];
    let ratio = num(SIMULATE_CSV_HEADER, row, "mse_mean") / (4.0 / 1024.0);
    assert!((0.85..=1.35).contains(&ratio));
    assert_eq!(num(SIMULATE_CSV_HEADER, row, "bits_max"), 768.0);
    assert_eq!(num(SIMULATE_CSV_HEADER, row, "centralized_rate"), 1.0 / 256.0);
    let lower = num(SIMULATE_CSV_HEADER, row, "bound_lower");
    assert!(lower > 0.0 && lower <= 1.0 / 256.0);
}

#[test]
fn row_errors_do_not_stop_the_sweep() {
    // single_mean needs exactly one machine: the m = 2 point fails, m = 1 runs
    let cfg = ExperimentConfig::parse(
        "protocol = single_mean\nfamily = unit_interval\nbudget_bits = 6\nm = 2\nm = 1\nn = 50\nd = 1\ntheta = 0.4\ntrials = 20\n",
    )
    .unwrap();
    let rows = run_simulate(&cfg);
    let width = SIMULATE_CSV_HEADER.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));
    assert!(!column(SIMULATE_CSV_HEADER, &rows[1], "error").is_empty());
    assert_eq!(column(SIMULATE_CSV_HEADER, &rows[1], "mse_mean"), "NaN");
    assert_eq!(column(SIMULATE_CSV_HEADER, &rows[2], "error"), "");
}

#[test]
fn bounds_rows() {
    let out = run_bounds(
        "formula,d,m,n,sigma2,budget\nthm2,4,16,64,1,16\nprop3_budget,2,4,8,,\nthm2,4,16,abc,1,16\n",
    )
    .unwrap();
    assert_eq!(out[0], BOUNDS_CSV_HEADER);
    assert!((num(BOUNDS_CSV_HEADER, &out[1], "value") - 0.004508).abs() < 1e-6);
    let terms = column(BOUNDS_CSV_HEADER, &out[2], "terms");
    assert!(terms.contains("log2_reading="));
    assert!((num(BOUNDS_CSV_HEADER, &out[2], "value") - 60.05).abs() < 0.01);
    assert_eq!(column(BOUNDS_CSV_HEADER, &out[3], "value"), "NaN");
    assert!(column(BOUNDS_CSV_HEADER, &out[3], "error").contains("field n"));
}

#[test]
fn verify_suites_hold() {
    let (rows, ok) = run_verify("pinsker", 10_000, 0).unwrap();
    assert!(ok);
    assert_eq!(rows.len(), 10_001);
    assert_eq!(rows[0], SUITE_CSV_HEADER);
    let (rows, ok) = run_verify("chain", 1000, 0).unwrap();
    assert!(ok && rows.len() == 1001);
    assert!(run_verify("foo", 10, 0).is_err());
}

#[test]
fn exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();

    let out = commest(&["verify", "chain", "--count", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(SUITE_CSV_HEADER));
    assert_eq!(text.lines().count(), 201);

    assert_eq!(commest(&["verify", "foo"]).status.code(), Some(2));
    assert_eq!(commest(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(commest(&["simulate"]).status.code(), Some(2));

    // empty grid: configuration error and no output file
    let cfg = dir.path().join("empty.cfg");
    let target = dir.path().join("never.csv");
    std::fs::write(&cfg, "protocol = onebit\nfamily = bounded\nn = 1\nd = 2\ntrials = 10\n").unwrap();
    let out = commest(&["simulate", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line"));
    assert!(!target.exists());

    // hints go to stderr; the CSV file stays clean
    let cfg = dir.path().join("ok.cfg");
    let target = dir.path().join("ok.csv");
    std::fs::write(&cfg, "protocol = onebit\nfamily = bounded\nm = 10\nn = 1\nd = 2\ntheta = 0.5\ntrials = 50\n").unwrap();
    let out = commest(&[
        "simulate",
        cfg.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
        "--gnuplot-hints",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("gnuplot"));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&target).unwrap();
    assert_eq!(csv.lines().next(), Some(SIMULATE_CSV_HEADER));
    assert_eq!(csv.lines().count(), 2);

    let queries = dir.path().join("q.csv");
    std::fs::write(&queries, "formula,d,m,n,sigma2,budget\nthm2,4,16,64,1,16\n").unwrap();
    let out = commest(&["bounds", queries.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with(BOUNDS_CSV_HEADER));
    std::fs::write(&queries, "formula,wat\n").unwrap();
    assert_eq!(commest(&["bounds", queries.to_str().unwrap()]).status.code(), Some(2));
}
