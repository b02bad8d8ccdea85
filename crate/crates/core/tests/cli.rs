use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dtnsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtnsim"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn dtnsim")
}

const SMALL: &str = "map.grid = 5 5 20\ngroup1.count = 2\ngroup2.count = 8\nrouter = epidemic\n\
                     buffer = 20KB\ntraffic = high\nend_time = 3600\nseed = 4\n";

#[test]
fn run_writes_log_occupancy_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), SMALL).unwrap();
    let out = dtnsim(&["run", "--config", "s.cfg", "--out", "a"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let log = fs::read_to_string(dir.path().join("a/events.log")).unwrap();
    assert!(log.starts_with("0.0000 CREATE M1 n"));
    assert!(log.ends_with('\n'));
    let occ = fs::read_to_string(dir.path().join("a/occupancy.csv")).unwrap();
    assert!(occ.starts_with("time,mean_occupancy_pct\n"));
    assert_eq!(occ.lines().count(), 1 + 361);
    let man = fs::read_to_string(dir.path().join("a/manifest.txt")).unwrap();
    assert!(man.contains("seed = 4\n"));
    assert!(man.contains("nodes = 10\n"));
    assert!(man.lines().any(|l| l.starts_with("config_hash = ") && l.len() == "config_hash = ".len() + 64));

    let out = dtnsim(&["run", "--config", "s.cfg", "--out", "b"], dir.path());
    assert!(out.status.success());
    assert_eq!(log, fs::read_to_string(dir.path().join("b/events.log")).unwrap());

    let out = dtnsim(&["run", "--config", "s.cfg", "--seed", "5", "--out", "c"], dir.path());
    assert!(out.status.success());
    assert_ne!(log, fs::read_to_string(dir.path().join("c/events.log")).unwrap());
}

#[test]
fn run_refuses_sweeps_and_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sweep.cfg"), SMALL.replace("seed = 4", "seed = [1; 2]")).unwrap();
    let out = dtnsim(&["run", "--config", "sweep.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 runs"));

    fs::write(dir.path().join("bad.cfg"), SMALL.replace("router = epidemic", "router = wav")).unwrap();
    let out = dtnsim(&["run", "--config", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown router 'wav'"));

    fs::write(dir.path().join("typo.cfg"), format!("{SMALL}bufer = 1MB\n")).unwrap();
    let out = dtnsim(&["run", "--config", "typo.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bufer"));
}

#[test]
fn batch_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SMALL
        .replace("router = epidemic", "router = [epidemic; wave]")
        .replace("group2.count = 8", "group2.count = [8; 18]");
    fs::write(dir.path().join("b.cfg"), cfg).unwrap();
    let out = dtnsim(&["batch", "--config", "b.cfg", "--jobs", "2", "--out", "runs"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let index = fs::read_to_string(dir.path().join("runs/index.csv")).unwrap();
    let rows: Vec<&str> = index.lines().collect();
    assert_eq!(rows[0], "run,status,seed,group2.count,router,dir,error");
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1], "0,ok,4,8,epidemic,run_000,");
    assert_eq!(rows[4], "3,ok,7,18,wave,run_003,");

    let first = fs::read(dir.path().join("runs/run_002/events.log")).unwrap();
    let out = dtnsim(&["batch", "--config", "b.cfg", "--jobs", "1", "--out", "again"], dir.path());
    assert!(out.status.success());
    assert_eq!(first, fs::read(dir.path().join("again/run_002/events.log")).unwrap());

    let out = dtnsim(&["analyze", "--logs", "runs", "--out", "tables"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = dir.path().join("tables");
    for f in [
        "table_saturation_times.csv",
        "table_occupancy.csv",
        "table_unsaturated.csv",
        "table_messages.csv",
        "ema_series.csv",
    ] {
        assert!(t.join(f).exists(), "{f}");
    }
    let unsat = fs::read_to_string(t.join("table_unsaturated.csv")).unwrap();
    assert_eq!(unsat.lines().count(), 5);
    assert!(unsat.lines().nth(1).unwrap().starts_with("run_000,ok,epidemic,4,20000,8,"));
    assert!(t.join("run_000/series_M1.csv").exists());

    let out = dtnsim(&["analyze", "--logs", "runs", "--out", "x", "--alpha", "0"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn analyze_single_run_with_node_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("r")).unwrap();
    fs::write(
        dir.path().join("r/events.log"),
        "0.0000 CREATE M1 n0 -\n0.1000 SEND_START M1 n0 n1\n0.1000 RECEIVED M1 n0 n1\n",
    )
    .unwrap();
    let out = dtnsim(&["analyze", "--logs", "r", "--nodes", "2", "--out", "t"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = fs::read_to_string(dir.path().join("t/table_messages.csv")).unwrap();
    assert_eq!(s.lines().nth(1).unwrap(), "r,M1,n0,0.0000,100.0000,2,0,0.1000");
    let series = fs::read_to_string(dir.path().join("t/r/series_M1.csv")).unwrap();
    assert_eq!(series, "time,saturation_pct\n0.0000,50.0000\n0.1000,100.0000\n");
}
