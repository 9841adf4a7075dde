//! The `qstirling` binary: CSV schemas, embedded configuration, determinism
//! and exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use qstirling::cli::{
    embedded_config, ledger_columns, parse_csv, DISTANCE_COLUMNS, ORACLE_COLUMNS, RATES_COLUMNS, SPECTRUM_COLUMNS,
    TRAJECTORY_COLUMNS,
};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qstirling-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn qstirling(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qstirling"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (h, rows) = parse_csv(text);
    let i = h.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn spectrum_matches_at_resonance() {
    let dir = scratch("spectrum");
    assert!(qstirling(&dir, &["spectrum"]).status.success());
    let text = read(&dir, "spectrum.csv");
    let (h, _) = parse_csv(&text);
    assert_eq!(h, SPECTRUM_COLUMNS);
    let (w, c, hot) = (column(&text, "omega"), column(&text, "G_cold"), column(&text, "G_hot"));
    let k = w.iter().enumerate().min_by(|a, b| (a.1 - 0.6).abs().total_cmp(&(b.1 - 0.6).abs())).unwrap().0;
    assert!((c[k] - hot[k]).abs() / hot[k] < 0.03);
}

#[test]
fn oracles_report() {
    let dir = scratch("oracles");
    let out = qstirling(&dir, &["oracles"]);
    assert!(out.status.success());
    let text = read(&dir, "oracles.csv");
    assert_eq!(parse_csv(&text).0, ORACLE_COLUMNS);
    let eta = column(&text, "eta");
    let carnot = column(&text, "eta_carnot");
    assert_eq!(eta.len(), 4);
    assert!(eta.iter().zip(&carnot).all(|(e, c)| e < c));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ss: eta=0.282234"));
}

#[test]
fn cycle_writes_trajectory_ledger_and_distances() {
    let dir = scratch("cycle");
    let out = qstirling(&dir, &["cycle", "--set", "tau_ab=0.5", "--set", "tau_cd=0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = read(&dir, "trajectory.csv");
    assert_eq!(parse_csv(&traj).0, TRAJECTORY_COLUMNS);
    let (_, rows) = parse_csv(&traj);
    let strokes: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(strokes.into_iter().collect::<Vec<_>>(), ["ab", "bc", "cd", "da"]);
    for (n, (pe, pg)) in column(&traj, "n").iter().zip(column(&traj, "p_e").iter().zip(column(&traj, "p_g"))) {
        assert!(n.abs() <= 0.5 && (pe + pg - 1.0).abs() < 1e-10);
    }

    let ledger = read(&dir, "cycle_ledger.csv");
    let (h, rows) = parse_csv(&ledger);
    assert_eq!(h, ledger_columns());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].last().unwrap(), "ok");
    assert!(column(&ledger, "first_law_residual")[0] < 1e-4);
    let cfg = embedded_config(&ledger).unwrap();
    assert_eq!((cfg.tau_ab, cfg.tau_cd), (0.5, 0.5));

    let dist = read(&dir, "cycle_distances.csv");
    assert_eq!(parse_csv(&dist).0, DISTANCE_COLUMNS);
}

#[test]
fn rates_track_markov_values_for_slow_strokes() {
    let dir = scratch("rates");
    assert!(qstirling(&dir, &["rates", "--tau", "5"]).status.success());
    let text = read(&dir, "rates.csv");
    assert_eq!(parse_csv(&text).0, RATES_COLUMNS);
    let (g, m) = (column(&text, "gamma_down"), column(&text, "gamma_down_markov"));
    let t = column(&text, "t");
    assert!(t.windows(2).all(|w| w[1] >= w[0]));
    let mid = g.len() / 8;
    assert!((g[mid] - m[mid]).abs() / m[mid] < 0.1, "{} vs {}", g[mid], m[mid]);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for dir in [&a, &b] {
        std::fs::create_dir_all(dir).unwrap();
        std::fs::write(dir.join("run.cfg"), "sweep_points = 3\nsweep_min = 0.1\nsweep_max = 2\n").unwrap();
        // same relative output path, so the embedded configs agree too
        let out = Command::new(env!("CARGO_BIN_EXE_qstirling"))
            .args(["sweep", "--mode", "symmetric", "--config", "run.cfg", "--out", "out"])
            .current_dir(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["ledger_symmetric.csv", "distances_symmetric.csv"] {
        assert_eq!(read(&a.join("out"), f), read(&b.join("out"), f), "{f}");
    }
    let (_, rows) = parse_csv(&read(&a.join("out"), "ledger_symmetric.csv"));
    assert_eq!(rows.len(), 3);
}

#[test]
fn bad_configuration_exits_nonzero_and_names_the_key() {
    let dir = scratch("bad");
    for (args, key) in [
        (vec!["cycle", "--set", "g_hot=1"], "g_hot"),
        (vec!["cycle", "--set", "omega_2=0.3"], "omega_2"),
        (vec!["spectrum", "--set", "beta_c=-5"], "beta_c"),
    ] {
        let out = qstirling(&dir, &args);
        assert!(!out.status.success());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{err}");
    }
    assert!(!qstirling(&dir, &["sweep", "--mode", "sideways"]).status.success());
    assert!(!qstirling(&dir, &["rates", "--tau", "-2"]).status.success());
}
