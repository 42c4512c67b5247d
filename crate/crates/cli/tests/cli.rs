use std::process::{Command, Output};

use qhje::io::{action_from_table, eigen_from_table, momentum_from_table, Table};
use qhje::qhj::Provenance;
use qhje::spectrum::shooting_oracle;
use qhje::PotentialModel;

fn qhje(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhje"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn table(out: &Output) -> Table {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Table::from_csv_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn oscillator_levels_zero_to_five() {
    let rows = eigen_from_table(&table(&qhje(&["eigen", "--n", "0..5"]))).unwrap();
    assert_eq!(rows.len(), 6);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r.n, k);
        assert!((r.energy - (k as f64 + 0.5)).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn quartic_bracket_matches_shooting() {
    let rows = eigen_from_table(&table(&qhje(&[
        "--model",
        "quartic",
        "--m",
        "0.5",
        "eigen",
        "--bracket",
        "0.5:1.5",
    ])))
    .unwrap();
    assert_eq!(rows.len(), 1);
    let oracle =
        shooting_oracle(&PotentialModel::quartic(0.5, 1.0, 1.0).unwrap(), (0.5, 1.5)).unwrap();
    assert!((rows[0].energy - oracle.energy).abs() < 1e-6 * oracle.energy);
    assert_eq!(rows[0].n, oracle.n);
}

#[test]
fn exit_codes() {
    assert_eq!(
        qhje(&["eigen", "--bracket", "0.6:0.7"]).status.code(),
        Some(2)
    );
    assert_eq!(qhje(&["figure", "12"]).status.code(), Some(2));
    assert_eq!(
        qhje(&["--model", "quartic", "figure", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(qhje(&["eigen", "--bracket", "1-2"]).status.code(), Some(1));
    assert_eq!(qhje(&["action", "--grid", "199"]).status.code(), Some(1));
    assert_eq!(qhje(&["--hbar", "-1", "eigen"]).status.code(), Some(1));
    assert_eq!(qhje(&["nonsense"]).status.code(), Some(1));
    assert_eq!(qhje(&["--help"]).status.code(), Some(0));
}

#[test]
fn action_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("action.csv");
    let out = qhje(&["action", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let field = action_from_table(&Table::from_csv_str(&text).unwrap()).unwrap();
    assert_eq!(field.len(), 1000);
    assert_eq!(qhje::io::action_table(&field).to_csv_string(), text);
    let pi = std::f64::consts::PI;
    assert!((field.real[field.len() - 1] - field.real[0] - 2.5 * pi).abs() < 1e-6);
}

#[test]
fn momentum_provenance_follows_path() {
    for (path, want) in [
        ("special", Provenance::Special),
        ("general", Provenance::General),
        ("classical", Provenance::Classical),
    ] {
        let p =
            momentum_from_table(&table(&qhje(&["momentum", "--n", "3", "--path", path]))).unwrap();
        assert_eq!(p.provenance, want);
    }
}

#[test]
fn coarse_export_has_one_row_per_bin() {
    let t = table(&qhje(&["coarse", "--n", "20", "--bins", "20"]));
    assert_eq!(t.len(), 20);
    assert!(t.has_column("classical"));
    let t = table(&qhje(&[
        "coarse",
        "--n",
        "10",
        "--bins",
        "12",
        "--source",
        "energy-derivative",
    ]));
    assert_eq!(t.len(), 12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"harmonic\"\nomega = 2.0\nn = \"0..2\"\n").unwrap();
    let rows =
        eigen_from_table(&table(&qhje(&["--config", cfg.to_str().unwrap(), "eigen"]))).unwrap();
    let e: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    for (k, v) in e.iter().enumerate() {
        assert!((v - 2.0 * (k as f64 + 0.5)).abs() < 1e-8);
    }
    let rows = eigen_from_table(&table(&qhje(&[
        "--config",
        cfg.to_str().unwrap(),
        "--omega",
        "1",
        "eigen",
    ])))
    .unwrap();
    assert!((rows[0].energy - 0.5).abs() < 1e-8);
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(
        qhje(&["--config", cfg.to_str().unwrap(), "eigen"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn json_output() {
    let out = qhje(&["--format", "json", "eigen", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["columns"][1], "E");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn commands_are_deterministic() {
    for args in [
        &["eigen", "--n", "0..3"][..],
        &["momentum", "--n", "4"],
        &["coarse", "--n", "6"],
    ] {
        assert_eq!(qhje(args).stdout, qhje(args).stdout);
    }
}

#[test]
fn figure_with_extra_series_writes_suffixed_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig9.csv");
    assert_eq!(
        qhje(&["figure", "9", "--out", path.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let main = Table::load(&path).unwrap();
    let curve = Table::load(&dir.path().join("fig9_classical.csv")).unwrap();
    assert_eq!(main.len(), 20);
    assert!(curve.has_column("p_C"));
}
