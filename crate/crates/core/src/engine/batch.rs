use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::sim::{run, EngineError};

/// Outcome of one run in a batch.
#[derive(Debug, Clone)]
pub struct BatchEntry {
    pub run_index: usize,
    pub seed: u64,
    pub swept: Vec<(String, String)>,
    pub dir: PathBuf,
    pub error: Option<String>,
}

pub fn run_dir_name(index: usize) -> String {
    format!("run_{index:03}")
}

/// Runs every config on up to `jobs` threads, writing each into
/// `out/run_NNN/` and a summary into `out/index.csv`. A failing run is
/// recorded in the index and does not stop the others.
pub fn run_batch(configs: &[ScenarioConfig], out: &Path, jobs: usize) -> Result<Vec<BatchEntry>, EngineError> {
    std::fs::create_dir_all(out).map_err(|source| EngineError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| EngineError::Invalid(format!("thread pool: {e}")))?;
    let entries: Vec<BatchEntry> = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| {
                let dir = out.join(run_dir_name(cfg.run_index));
                let result = run(cfg).and_then(|o| o.write_to(&dir));
                if let Err(e) = &result {
                    log::error!("run {} failed: {e}", cfg.run_index);
                } else {
                    log::info!("run {} done", cfg.run_index);
                }
                BatchEntry {
                    run_index: cfg.run_index,
                    seed: cfg.seed,
                    swept: cfg.swept.clone(),
                    dir,
                    error: result.err().map(|e| e.to_string()),
                }
            })
            .collect()
    });
    write_index(&entries, &out.join("index.csv"))?;
    Ok(entries)
}

/// `run,status,seed,<swept keys...>,dir,error`
pub fn write_index(entries: &[BatchEntry], path: &Path) -> Result<(), EngineError> {
    let io = |e: csv::Error| EngineError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let keys: Vec<&str> = entries
        .first()
        .map(|e| e.swept.iter().map(|(k, _)| k.as_str()).collect())
        .unwrap_or_default();
    let mut header = vec!["run", "status", "seed"];
    header.extend(&keys);
    header.extend(["dir", "error"]);
    w.write_record(&header).map_err(io)?;
    for e in entries {
        let mut row = vec![
            e.run_index.to_string(),
            if e.error.is_none() { "ok" } else { "failed" }.to_string(),
            e.seed.to_string(),
        ];
        row.extend(e.swept.iter().map(|(_, v)| v.clone()));
        row.push(e.dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        row.push(e.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| EngineError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
