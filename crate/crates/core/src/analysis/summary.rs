use std::fs;
use std::path::{Path, PathBuf};

use super::{
    ema, parse_event_log, peak_decline, read_occupancy_csv, saturation, time_to_full_saturation, AnalysisError,
    SaturationSeries,
};

use crate::engine::{EventRecord, OccupancySample};

/// Outputs of one run as found on disk. Missing pieces stay `None`.
#[derive(Debug, Clone, Default)]
pub struct RunData {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub nodes: Option<usize>,
    pub records: Option<Vec<EventRecord>>,
    pub occupancy: Option<Vec<OccupancySample>>,
    pub error: Option<String>,
}

/// Per-run aggregates behind the summary tables.
#[derive(Debug, Clone, Default)]
pub struct SummaryRow {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub status: String,
    pub nodes: Option<usize>,
    pub series: Vec<SaturationSeries>,
    pub times_to_full: Vec<Option<f64>>,
    pub max_avg_occupancy: Option<f64>,
    pub decline: Option<(f64, f64)>,
}

impl SummaryRow {
    pub fn messages(&self) -> usize {
        self.series.len()
    }

    pub fn unsaturated(&self) -> usize {
        self.times_to_full.iter().filter(|t| t.is_none()).count()
    }

    pub fn redeliveries(&self) -> usize {
        self.series.iter().map(|s| s.redeliveries).sum()
    }

    fn saturated_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.times_to_full.iter().flatten().copied().collect();
        t.sort_by(f64::total_cmp);
        t
    }

    pub fn median_time_to_full(&self) -> Option<f64> {
        let t = self.saturated_times();
        match t.len() {
            0 => None,
            n if n % 2 == 1 => Some(t[n / 2]),
            n => Some((t[n / 2 - 1] + t[n / 2]) / 2.0),
        }
    }
}

/// Run directories below `logs`: `logs` itself if it holds a run, otherwise
/// its subdirectories that do, sorted by name.
pub fn discover_runs(logs: &Path) -> Result<Vec<PathBuf>, AnalysisError> {
    let is_run = |d: &Path| d.join("events.log").exists() || d.join("manifest.txt").exists();
    if is_run(logs) {
        return Ok(vec![logs.to_path_buf()]);
    }
    let io = |source| AnalysisError::Io {
        path: logs.to_path_buf(),
        source,
    };
    let mut dirs = Vec::new();
    for entry in fs::read_dir(logs).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_dir() && is_run(&path) {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn read_manifest(path: &Path) -> Option<Vec<(String, String)>> {
    let text = fs::read_to_string(path).ok()?;
    Some(
        text.lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    )
}

/// Reads a run directory. `nodes` overrides the node count from the manifest.
pub fn load_run(dir: &Path, nodes: Option<usize>) -> RunData {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let manifest = read_manifest(&dir.join("manifest.txt")).unwrap_or_default();
    let get = |k: &str| manifest.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    let mut params = Vec::new();
    for k in ["router", "seed", "buffer"] {
        if let Some(v) = get(k) {
            params.push((k.to_string(), v));
        }
    }
    params.extend(
        manifest
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("param.").map(|p| (p.to_string(), v.clone())))
            .filter(|(k, _)| !["router", "seed", "buffer"].contains(&k.as_str())),
    );
    let mut data = RunData {
        name,
        params,
        nodes: nodes.or_else(|| get("nodes").and_then(|v| v.parse().ok())),
        ..Default::default()
    };
    let log = dir.join("events.log");
    if log.exists() {
        match parse_event_log(&log) {
            Ok(r) => data.records = Some(r),
            Err(e) => data.error = Some(e.to_string()),
        }
    }
    let occ = dir.join("occupancy.csv");
    if occ.exists() {
        match read_occupancy_csv(&occ) {
            Ok(o) => data.occupancy = Some(o),
            Err(e) => data.error = Some(e.to_string()),
        }
    }
    data
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

pub fn summarize_run(run: &RunData) -> SummaryRow {
    let mut row = SummaryRow {
        name: run.name.clone(),
        params: run.params.clone(),
        status: "ok".into(),
        nodes: run.nodes,
        ..Default::default()
    };
    if let Some(e) = &run.error {
        row.status = format!("error: {e}");
        return row;
    }
    match (&run.records, run.nodes) {
        (None, _) => row.status = "absent".into(),
        (Some(_), None) => row.status = "error: unknown node count".into(),
        (Some(records), Some(n)) => match saturation(records, n) {
            Ok(series) => {
                row.times_to_full = series.iter().map(time_to_full_saturation).collect();
                row.series = series;
            }
            Err(e) => row.status = format!("error: {e}"),
        },
    }
    if let Some(o) = &run.occupancy {
        row.max_avg_occupancy = o.iter().map(|s| s.mean_occupancy_pct).reduce(f64::max);
        row.decline = peak_decline(o, 0.9);
    }
    row
}

/// Writes the summary tables, per-message series and the EMA of
/// time-to-saturation into `out`, one row per run.
pub fn summarize(runs: &[RunData], out: &Path, alpha: f64) -> Result<Vec<SummaryRow>, AnalysisError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| AnalysisError::Io { path: p, source }
    };
    fs::create_dir_all(out).map_err(io(out))?;
    let rows: Vec<SummaryRow> = runs.iter().map(summarize_run).collect();

    let mut keys: Vec<String> = Vec::new();
    for r in &rows {
        for (k, _) in &r.params {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let lead = |r: &SummaryRow| -> Vec<String> {
        let mut v = vec![r.name.clone(), r.status.clone()];
        for k in &keys {
            v.push(
                r.params
                    .iter()
                    .find(|(pk, _)| pk == k)
                    .map(|(_, pv)| pv.clone())
                    .unwrap_or_default(),
            );
        }
        v
    };
    let header = |extra: &[&str]| -> Vec<String> {
        let mut h = vec!["run".to_string(), "status".to_string()];
        h.extend(keys.iter().cloned());
        h.extend(extra.iter().map(|s| s.to_string()));
        h
    };

    let mut w = csv::Writer::from_path(out.join("table_saturation_times.csv"))?;
    w.write_record(header(&[
        "nodes",
        "messages",
        "saturated",
        "first_time_to_full",
        "median_time_to_full",
        "max_time_to_full",
    ]))?;
    for r in &rows {
        let mut v = lead(r);
        let sat = r.saturated_times();
        v.extend([
            r.nodes.map(|n| n.to_string()).unwrap_or_default(),
            r.messages().to_string(),
            sat.len().to_string(),
            opt(r.times_to_full.first().copied().flatten()),
            opt(r.median_time_to_full()),
            opt(sat.last().copied()),
        ]);
        w.write_record(v)?;
    }
    w.flush().map_err(io(out))?;

    let mut w = csv::Writer::from_path(out.join("table_occupancy.csv"))?;
    w.write_record(header(&["max_avg_occupancy_pct", "peak_time", "decline_90_time"]))?;
    for r in &rows {
        let mut v = lead(r);
        v.extend([
            r.max_avg_occupancy.map(|x| format!("{x:.6}")).unwrap_or_default(),
            opt(r.decline.map(|d| d.0)),
            opt(r.decline.map(|d| d.1)),
        ]);
        w.write_record(v)?;
    }
    w.flush().map_err(io(out))?;

    let mut w = csv::Writer::from_path(out.join("table_unsaturated.csv"))?;
    w.write_record(header(&["messages", "unsaturated", "redeliveries"]))?;
    for r in &rows {
        let mut v = lead(r);
        v.extend([
            r.messages().to_string(),
            r.unsaturated().to_string(),
            r.redeliveries().to_string(),
        ]);
        w.write_record(v)?;
    }
    w.flush().map_err(io(out))?;

    let mut w = csv::Writer::from_path(out.join("table_messages.csv"))?;
    w.write_record([
        "run",
        "message",
        "creator",
        "created_at",
        "final_pct",
        "unique_receivers",
        "redeliveries",
        "time_to_full",
    ])?;
    let mut e = csv::Writer::from_path(out.join("ema_series.csv"))?;
    e.write_record(["run", "message", "created_at", "time_to_full", "ema"])?;
    for r in &rows {
        for (s, t) in r.series.iter().zip(&r.times_to_full) {
            w.write_record([
                r.name.clone(),
                s.message.to_string(),
                s.creator.to_string(),
                format!("{:.4}", s.created_at),
                format!("{:.4}", s.final_pct()),
                s.unique_receivers.to_string(),
                s.redeliveries.to_string(),
                opt(*t),
            ])?;
        }
        let sat: Vec<(&SaturationSeries, f64)> = r
            .series
            .iter()
            .zip(&r.times_to_full)
            .filter_map(|(s, t)| t.map(|t| (s, t)))
            .collect();
        let smoothed = ema(&sat.iter().map(|p| p.1).collect::<Vec<_>>(), alpha);
        for ((s, t), m) in sat.iter().zip(smoothed) {
            e.write_record([
                r.name.clone(),
                s.message.to_string(),
                format!("{:.4}", s.created_at),
                format!("{t:.4}"),
                format!("{m:.4}"),
            ])?;
        }
        if !r.series.is_empty() {
            let dir = out.join(&r.name);
            fs::create_dir_all(&dir).map_err(io(&dir))?;
            for s in &r.series {
                let mut sw = csv::Writer::from_path(dir.join(format!("series_{}.csv", s.message)))?;
                sw.write_record(["time", "saturation_pct"])?;
                for (t, p) in &s.points {
                    sw.write_record([format!("{t:.4}"), format!("{p:.4}")])?;
                }
                sw.flush().map_err(io(&dir))?;
            }
        }
    }
    w.flush().map_err(io(out))?;
    e.flush().map_err(io(out))?;
    Ok(rows)
}
