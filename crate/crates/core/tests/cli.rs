use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wsn_sim::output::{read_csv, write_csv, AlivePoint, ComparisonRecord, EnergyPoint, RunSummary};

fn wsn_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsn-sim")).args(args).output().expect("failed to launch wsn-sim")
}

fn ok(args: &[&str]) -> String {
    let out = wsn_sim(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&["simulate", "--strategy", "diffusion", "--seed", "1", "--out", path(&out)]);
    for f in ["summary.csv", "alive_curve.csv", "energy_trace.csv", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }

    let summary: Vec<RunSummary> = read_csv(&out.join("summary.csv")).unwrap();
    let s = &summary[0];
    let (first, last) = (s.first_death.unwrap(), s.last_death.unwrap());
    let expected = (100.0 * first as f64 / last as f64 * 100.0).round() / 100.0;
    assert_eq!(s.utility_pct, Some(expected));

    let curve: Vec<AlivePoint> = read_csv(&out.join("alive_curve.csv")).unwrap();
    assert_eq!(curve.first(), Some(&AlivePoint { round: 1, alive_count: 100 }));
    assert_eq!(curve.last(), Some(&AlivePoint { round: last, alive_count: 0 }));

    let text = fs::read_to_string(out.join("alive_curve.csv")).unwrap();
    assert!(text.starts_with("round,alive_count\n1,100\n"));
    let trace = fs::read_to_string(out.join("energy_trace.csv")).unwrap();
    assert!(trace.starts_with("round,node_id,energy_uj\n"));
}

#[test]
fn csv_outputs_reserialize_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = dir.path().join("small.cfg");
    fs::write(&config, "nodes=20\ninitial_energy=1e8\ntrace_stride=7\n").unwrap();
    ok(&["simulate", "--config", path(&config), "--seed", "4", "--out", path(&out)]);

    fn check<T: serde::Serialize + serde::de::DeserializeOwned>(file: &Path) {
        let rows: Vec<T> = read_csv(file).unwrap();
        let copy = file.with_extension("copy");
        write_csv(&copy, &rows).unwrap();
        assert_eq!(fs::read(file).unwrap(), fs::read(&copy).unwrap(), "{}", file.display());
    }
    check::<RunSummary>(&out.join("summary.csv"));
    check::<AlivePoint>(&out.join("alive_curve.csv"));
    check::<EnergyPoint>(&out.join("energy_trace.csv"));
}

#[test]
fn manifest_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let config = dir.path().join("c.cfg");
    fs::write(&config, "nodes=15, initial_energy=2e8, strategy=mte\n").unwrap();
    ok(&["simulate", "--config", path(&config), "--seed", "12", "--out", path(&a)]);
    ok(&["simulate", "--config", path(&a.join("manifest.json")), "--out", path(&b)]);
    for f in ["summary.csv", "alive_curve.csv", "energy_trace.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.cfg");
    fs::write(&config, "nodes=5\ninitial_energy=1e7\n").unwrap();
    ok(&["simulate", "--config", path(&config), "--format", "json", "--out", path(dir.path())]);
    let text = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let rows: Vec<RunSummary> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].nodes, 5);
}

#[test]
fn compare_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.cfg");
    fs::write(&config, "nodes=10\ninitial_energy=1e8\n").unwrap();
    let out = dir.path().join("cmp");
    let stdout = ok(&[
        "compare",
        "--strategies",
        "direct,mte,diffusion",
        "--seeds",
        "1..10",
        "--config",
        path(&config),
        "--out",
        path(&out),
    ]);
    assert!(stdout.contains("diffusion"));
    let rows: Vec<ComparisonRecord> = read_csv(&out.join("summary.csv")).unwrap();
    assert_eq!(rows.iter().filter(|r| r.row == "run").count(), 30);
    assert_eq!(rows.iter().filter(|r| r.row == "mean").count(), 3);

    let again = dir.path().join("cmp2");
    ok(&["compare", "--seeds", "1..10", "--config", path(&config), "--out", path(&again)]);
    assert_eq!(fs::read(out.join("summary.csv")).unwrap(), fs::read(again.join("summary.csv")).unwrap());
}

#[test]
fn exported_topology_drives_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.cfg");
    fs::write(&config, "nodes=12\ninitial_energy=1e8\n").unwrap();
    let topo = dir.path().join("topo.csv");
    ok(&["export-topology", "--config", path(&config), "--seed", "3", "--out", path(&topo)]);
    let text = fs::read_to_string(&topo).unwrap();
    assert!(text.starts_with("node_id,x,y\n0,"));
    assert_eq!(text.lines().count(), 13);

    let (seeded, imported) = (dir.path().join("seeded"), dir.path().join("imported"));
    ok(&["simulate", "--config", path(&config), "--seed", "3", "--out", path(&seeded)]);
    ok(&["simulate", "--config", path(&config), "--seed", "3", "--topology", path(&topo), "--out", path(&imported)]);
    assert_eq!(
        fs::read(seeded.join("alive_curve.csv")).unwrap(),
        fs::read(imported.join("alive_curve.csv")).unwrap()
    );
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "nodes=0\n").unwrap();
    let out = wsn_sim(&["simulate", "--config", path(&config), "--out", path(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodes"));

    let out = wsn_sim(&["simulate", "--strategy", "leach", "--out", path(dir.path())]);
    assert!(!out.status.success());

    let out = wsn_sim(&["simulate", "--config", "/nonexistent/cfg", "--out", path(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/cfg"));

    fs::write(&config, "warp_speed=9\n").unwrap();
    let out = wsn_sim(&["compare", "--config", path(&config), "--out", path(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("valid keys"));
}
