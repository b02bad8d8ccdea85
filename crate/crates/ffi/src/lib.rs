//! C interface to the `dtnsim` simulator.
//!
//! Every fallible call returns a [`DtnStatus`]. On failure the message is kept
//! per thread and can be read with [`dtnsim_last_error`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dtnsim::engine::{load_config, run, EventKind, RunOutput, ScenarioConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    OutOfRange = 4,
    Engine = 5,
    Io = 6,
    InvalidArgument = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtnEventKind {
    Create = 0,
    SendStart = 1,
    Received = 2,
    Aborted = 3,
    DropBuffer = 4,
    DropTtl = 5,
    DropCustody = 6,
    RejectTooLarge = 7,
}

impl From<DtnEventKind> for EventKind {
    fn from(k: DtnEventKind) -> Self {
        match k {
            DtnEventKind::Create => EventKind::Create,
            DtnEventKind::SendStart => EventKind::SendStart,
            DtnEventKind::Received => EventKind::Received,
            DtnEventKind::Aborted => EventKind::Aborted,
            DtnEventKind::DropBuffer => EventKind::DropBuffer,
            DtnEventKind::DropTtl => EventKind::DropTtl,
            DtnEventKind::DropCustody => EventKind::DropCustody,
            DtnEventKind::RejectTooLarge => EventKind::RejectTooLarge,
        }
    }
}

/// Parsed configuration, expanded into one entry per sweep combination.
pub struct DtnScenario {
    runs: Vec<ScenarioConfig>,
}

/// Results of one finished run.
pub struct DtnRun {
    output: RunOutput,
    log: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: DtnStatus, message: impl Into<String>) -> DtnStatus {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
    status
}

fn guard(f: impl FnOnce() -> DtnStatus) -> DtnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(DtnStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, DtnStatus> {
    if p.is_null() {
        return Err(fail(DtnStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DtnStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dtnsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dtnsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses configuration text. Relative map paths resolve against the
/// current directory.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_scenario_parse(text: *const c_char, out: *mut *mut DtnScenario) -> DtnStatus {
    guard(|| {
        if out.is_null() {
            return fail(DtnStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_config(text) {
            Ok(runs) => {
                *out = Box::into_raw(Box::new(DtnScenario { runs }));
                DtnStatus::Ok
            }
            Err(e) => fail(DtnStatus::Config, e.to_string()),
        }
    })
}

/// Number of runs the scenario expands to, or 0 for NULL.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_scenario_len(scenario: *const DtnScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.runs.len())
}

/// Overrides the seed of run `index`.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_scenario_set_seed(scenario: *mut DtnScenario, index: usize, seed: u64) -> DtnStatus {
    let Some(s) = scenario.as_mut() else {
        return fail(DtnStatus::NullArgument, "scenario is null");
    };
    match s.runs.get_mut(index) {
        Some(c) => {
            c.seed = seed;
            DtnStatus::Ok
        }
        None => fail(DtnStatus::OutOfRange, format!("run {index} of {}", s.runs.len())),
    }
}

/// # Safety
/// `scenario` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_scenario_free(scenario: *mut DtnScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs entry `index` of the scenario to completion.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run(scenario: *const DtnScenario, index: usize, out: *mut *mut DtnRun) -> DtnStatus {
    guard(|| {
        if out.is_null() {
            return fail(DtnStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(s) = scenario.as_ref() else {
            return fail(DtnStatus::NullArgument, "scenario is null");
        };
        let Some(cfg) = s.runs.get(index) else {
            return fail(DtnStatus::OutOfRange, format!("run {index} of {}", s.runs.len()));
        };
        match run(cfg) {
            Ok(output) => {
                let log = output.event_log();
                *out = Box::into_raw(Box::new(DtnRun { output, log }));
                DtnStatus::Ok
            }
            Err(e) => fail(DtnStatus::Engine, e.to_string()),
        }
    })
}

/// # Safety
/// `run` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_free(run: *mut DtnRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Total number of event records, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_record_count(run: *const DtnRun) -> usize {
    run.as_ref().map_or(0, |r| r.output.records.len())
}

/// Number of records of one kind, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_count(run: *const DtnRun, kind: DtnEventKind) -> usize {
    run.as_ref().map_or(0, |r| r.output.count(kind.into()))
}

/// Highest sampled mean buffer occupancy in percent, or NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_max_occupancy(run: *const DtnRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.output.max_avg_occupancy())
}

/// Borrows the event log text. The bytes are not NUL-terminated and live as
/// long as the run handle.
///
/// # Safety
/// `run` must be a live handle; `data` and `len` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_event_log(run: *const DtnRun, data: *mut *const u8, len: *mut usize) -> DtnStatus {
    let Some(r) = run.as_ref() else {
        return fail(DtnStatus::NullArgument, "run is null");
    };
    if data.is_null() || len.is_null() {
        return fail(DtnStatus::NullArgument, "data or len is null");
    }
    *data = r.log.as_ptr();
    *len = r.log.len();
    DtnStatus::Ok
}

/// Writes the event log, occupancy report and manifest into `dir`.
///
/// # Safety
/// `run` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_run_write(run: *const DtnRun, dir: *const c_char) -> DtnStatus {
    guard(|| {
        let Some(r) = run.as_ref() else {
            return fail(DtnStatus::NullArgument, "run is null");
        };
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(s) => return s,
        };
        match r.output.write_to(Path::new(dir)) {
            Ok(()) => DtnStatus::Ok,
            Err(e) => fail(DtnStatus::Io, e.to_string()),
        }
    })
}

/// Exponential moving average of `values` into `out`, both `len` long.
/// `alpha` must lie in (0, 1].
///
/// # Safety
/// `values` and `out` must point to `len` doubles each, or may be NULL when
/// `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn dtnsim_ema(values: *const f64, len: usize, alpha: f64, out: *mut f64) -> DtnStatus {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return fail(DtnStatus::InvalidArgument, format!("alpha {alpha} is outside (0, 1]"));
    }
    if len == 0 {
        return DtnStatus::Ok;
    }
    if values.is_null() || out.is_null() {
        return fail(DtnStatus::NullArgument, "values or out is null");
    }
    let input = std::slice::from_raw_parts(values, len);
    let smoothed = dtnsim::ema(input, alpha);
    std::slice::from_raw_parts_mut(out, len).copy_from_slice(&smoothed);
    DtnStatus::Ok
}
