use std::path::{Path, PathBuf};
use std::process::Command;

use softplast::scenario::{builtin, builtin_names, run_scenario, sweep, Manifest, ScenarioConfig, SweepParam};

fn in_dir(name: &str, dir: &Path) -> ScenarioConfig {
    let mut cfg = builtin(name).unwrap();
    cfg.output.dir = dir.to_string_lossy().into_owned();
    cfg
}

fn read_all(paths: &[PathBuf]) -> Vec<(String, Vec<u8>)> {
    paths
        .iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p).unwrap()))
        .collect()
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in ["fig-c", "incremental"] {
        let ra = run_scenario(&in_dir(name, a.path())).unwrap();
        let rb = run_scenario(&in_dir(name, b.path())).unwrap();
        assert!(!ra.csv.is_empty() && !ra.svg.is_empty());
        assert_eq!(read_all(&ra.csv), read_all(&rb.csv), "{name}");
        assert_eq!(read_all(&ra.svg), read_all(&rb.svg), "{name}");
    }
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_dir("fig-b", dir.path());
    let first = run_scenario(&cfg).unwrap();
    let text = std::fs::read_to_string(first.dir.join("manifest.toml")).unwrap();
    let m = Manifest::parse(&text).unwrap();
    assert_eq!(m.config, cfg);
    assert_eq!(m.version, env!("CARGO_PKG_VERSION"));
    let again = run_scenario(&m.config).unwrap();
    assert_eq!(first.diagnostics, again.diagnostics);
    assert_eq!(read_all(&first.csv), read_all(&again.csv));
}

#[test]
fn csv_headers_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_scenario(&in_dir("fig-a", dir.path())).unwrap();
    for p in &run.csv {
        let text = std::fs::read_to_string(p).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.chars().next().unwrap().is_ascii_alphabetic(), "{}", p.display());
        let Some(row) = lines.next() else { continue };
        let last = row.rsplit(',').next().unwrap();
        assert!(last.contains("e") && last.split('e').next().unwrap().len() >= 17, "{row}");
    }
}

#[test]
fn single_value_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let rep = sweep(&in_dir("fig-a", dir.path()), SweepParam::Eps, &[5e-3], 1).unwrap();
    assert_eq!(rep.rows.len(), 1);
    assert!(rep.rows[0].failure.is_none());
    assert_eq!(rep.decreasing(), None);
    assert!(rep.table.exists());
}

#[test]
fn eps_sweep_error_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let rep = sweep(&in_dir("fig-a", dir.path()), SweepParam::Eps, &[1e-2, 5e-3, 2.5e-3], 3).unwrap();
    assert!(rep.rows.iter().all(|r| r.failure.is_none()));
    assert_eq!(rep.decreasing(), Some(true));
    let table = std::fs::read_to_string(&rep.table).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn failed_sweep_point_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let rep = sweep(&in_dir("incremental", dir.path()), SweepParam::Tau, &[1e-3, 1.0], 2).unwrap();
    assert!(rep.rows[0].failure.is_none());
    assert!(rep.rows[1].failure.is_some());
}

#[test]
fn scenario_files_match_builtins() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for (name, _) in builtin_names() {
        let cfg = ScenarioConfig::load(&root.join(format!("{name}.toml")), &[]).unwrap();
        assert_eq!(cfg, builtin(name).unwrap(), "{name}");
    }
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_softplast")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();

    let ok = cli(&["run", "fig-a", "--out", &out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("fig-a").join("manifest.toml").exists());

    let bad = cli(&["run", "fig-a", "--set", "material.mu=-1", "--out", &out]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("material.mu"));

    assert_eq!(cli(&["run", "no-such-scenario"]).status.code(), Some(1));

    let list = cli(&["list-scenarios"]);
    assert_eq!(list.status.code(), Some(0));
    let text = String::from_utf8_lossy(&list.stdout);
    assert!(builtin_names().iter().all(|(n, _)| text.contains(n)));

    let sw = cli(&["sweep", "fig-a", "--param", "eps", "--values", "1e-2,5e-3", "--out", &out]);
    assert_eq!(sw.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&sw.stdout).contains("error decreasing: true"));
}
