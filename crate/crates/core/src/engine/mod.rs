//! Scenario configuration, the fixed-timestep simulation loop, event logs
//! and batch execution.

mod batch;
mod config;
mod eventlog;
mod sim;

pub use batch::{run_batch, run_dir_name, write_index, BatchEntry};
pub use config::{
    load_config, load_config_file, load_config_in, parse_bytes, ConfigError, GroupConfig, MapSource,
    ScenarioConfig,
};
pub use eventlog::{log_time, write_event_log, write_records, EventKind, EventRecord};
pub use sim::{build_map, run, EngineError, OccupancySample, RunOutput, Simulation, TRAFFIC_STREAM};
