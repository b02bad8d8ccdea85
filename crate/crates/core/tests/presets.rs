use std::path::PathBuf;

use dtnsim::engine::{load_config_file, run, EventKind, MapSource};
use dtnsim::RouterKind;

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}

#[test]
fn traffic_presets_sweep_buffers_and_populations() {
    for name in ["one.cfg", "moderate.cfg", "high.cfg"] {
        let runs = load_config_file(&preset(name)).unwrap();
        assert_eq!(runs.len(), 16, "{name}");
        let mut counts: Vec<usize> = runs.iter().map(|c| c.groups[1].count).collect();
        counts.sort();
        counts.dedup();
        assert_eq!(counts, [95, 495, 995, 2995]);
        let mut buffers: Vec<u64> = runs.iter().map(|c| c.buffer).collect();
        buffers.sort();
        buffers.dedup();
        assert_eq!(buffers, [500_000, 5_000_000]);
        assert!(runs.iter().all(|c| c.groups[0].count == 5 && c.end_time == 9000.0));
        assert!(runs.iter().any(|c| c.router == RouterKind::Wave));
        assert!(matches!(runs[0].map, MapSource::Grid { rows: 29, cols: 29, .. }));
        for (i, c) in runs.iter().enumerate() {
            assert_eq!(c.run_index, i);
            assert_eq!(c.seed, 1 + i as u64);
        }
    }
}

#[test]
fn grid_small_runs_quickly() {
    let runs = load_config_file(&preset("grid-small.cfg")).unwrap();
    assert_eq!(runs.len(), 1);
    let out = run(&runs[0]).unwrap();
    assert_eq!(out.count(EventKind::Create), 1);
    assert_eq!(out.count(EventKind::Received), out.count(EventKind::SendStart));
}

#[test]
fn wkt_sample_resolves_relative_paths() {
    let runs = load_config_file(&preset("sample-streets.cfg")).unwrap();
    assert_eq!(runs.len(), 2);
    match &runs[0].map {
        MapSource::Wkt { files, .. } => assert!(files[0].exists()),
        m => panic!("unexpected map {m:?}"),
    }
    let mut cfg = runs[0].clone();
    cfg.end_time = 1200.0;
    cfg.traffic.window = 600.0;
    let out = run(&cfg).unwrap();
    assert!(out.count(EventKind::Create) > 0);
    assert!(out.count(EventKind::Received) > 0);
}
