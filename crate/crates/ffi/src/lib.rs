//! C ABI over the `starris` simulator.
//!
//! Conventions:
//! - Every fallible function returns a `StarrisStatus` code (`0` is success)
//!   and writes results through out-pointers. On failure the thread-local
//!   message from `starris_last_error_message` explains why.
//! - Objects are opaque handles created by `*_new`/`*_parse`/`*_generate`/
//!   `*_run` and released with the matching `*_free`. Passing NULL to a
//!   `*_free` is a no-op.
//! - Complex vectors cross the boundary as interleaved `double` arrays
//!   `[re0, im0, re1, im1, ...]` of length `2 * len`.
//! - Panics never unwind into C; they are reported as `STARRIS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use starris::channel_model::{evaluate_metrics, MetricReport, StarRisState};
use starris::harness::{self, Method, SweepResult, SweepSpec, SweepVariable};
use starris::linalg::{CVec, C64};
use starris::scenario::{self, ChannelSet, ScenarioConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarrisStatus {
    Ok = 0,
    /// Invalid configuration, geometry or dimensions.
    Config = 1,
    /// The optimization problem has no feasible point.
    Infeasible = 2,
    /// File-system, CSV or plot output failure.
    Io = 3,
    NullPointer = 4,
    /// Argument out of range or not valid UTF-8.
    InvalidArgument = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

/// Method codes accepted by `starris_run_method` and `starris_sweep_run`.
pub const STARRIS_METHOD_SAFE_ISAC: u32 = 0;
pub const STARRIS_METHOD_RANDOM_PHASE_STAR: u32 = 1;
pub const STARRIS_METHOD_REFLECT_ONLY_RIS: u32 = 2;

/// Scenario configuration handle.
pub struct StarrisConfig(ScenarioConfig);

/// One channel realization.
pub struct StarrisChannels(ChannelSet);

/// Rows of a finished sweep.
pub struct StarrisSweep(SweepResult);

/// Linear-scale metrics of one STAR-RIS configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StarrisMetrics {
    pub sum_rate: f64,
    pub gamma_sd: f64,
    pub gamma_sr: f64,
    pub p_det_malicious: f64,
    pub p_det_isac: f64,
    pub comm_gain: f64,
    pub jam_gain: f64,
}

impl From<&MetricReport> for StarrisMetrics {
    fn from(m: &MetricReport) -> Self {
        Self {
            sum_rate: m.sum_rate,
            gamma_sd: m.gamma_sd,
            gamma_sr: m.gamma_sr,
            p_det_malicious: m.p_det_malicious,
            p_det_isac: m.p_det_isac,
            comm_gain: m.comm_gain,
            jam_gain: m.jam_gain,
        }
    }
}

/// One sweep row; same fields as the CSV.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StarrisRow {
    /// One of the `STARRIS_METHOD_*` codes.
    pub method: u32,
    pub sweep_value: f64,
    pub trial: usize,
    pub jam_gain_db: f64,
    pub malicious_sinr_db: f64,
    pub comm_gain_db: f64,
    pub sum_rate: f64,
    pub p_det_malicious: f64,
    pub p_det_isac: f64,
    pub feasible_flag: bool,
    pub wall_time_ms: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(StarrisStatus, String);

impl From<starris::Error> for Failure {
    fn from(e: starris::Error) -> Self {
        let code = match e.exit_code() {
            2 => StarrisStatus::Infeasible,
            3 => StarrisStatus::Io,
            _ => StarrisStatus::Config,
        };
        Failure(code, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f` behind a panic guard and turns its outcome into a status code.
fn call<F: FnOnce() -> Result<(), Failure>>(f: F) -> StarrisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            StarrisStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            StarrisStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(StarrisStatus::NullPointer, format!("`{what}` is NULL"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(StarrisStatus::InvalidArgument, msg.into())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_complex(p: *const f64, len: usize, what: &str) -> Result<CVec, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(p, 2 * len);
    Ok(CVec::from_iterator(len, raw.chunks_exact(2).map(|c| C64::new(c[0], c[1]))))
}

unsafe fn write_complex(out: *mut f64, v: &CVec) {
    if out.is_null() {
        return;
    }
    let dst = std::slice::from_raw_parts_mut(out, 2 * v.len());
    for (slot, z) in dst.chunks_exact_mut(2).zip(v.iter()) {
        slot[0] = z.re;
        slot[1] = z.im;
    }
}

fn method_from_code(code: u32) -> Result<Method, Failure> {
    Method::ALL.get(code as usize).copied().ok_or_else(|| invalid(format!("unknown method code {code}")))
}

fn method_code(m: Method) -> u32 {
    Method::ALL.iter().position(|&x| x == m).unwrap_or(0) as u32
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn starris_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn starris_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default scenario. Never returns NULL.
#[no_mangle]
pub extern "C" fn starris_config_new() -> *mut StarrisConfig {
    Box::into_raw(Box::new(StarrisConfig(ScenarioConfig::default())))
}

/// Parses `key = value` text on top of the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_config_parse(text: *const c_char, out: *mut *mut StarrisConfig) -> StarrisStatus {
    call(|| {
        let cfg = scenario::parse_config(string(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(StarrisConfig(cfg))), "out")
    })
}

/// Reads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_config_read(path: *const c_char, out: *mut *mut StarrisConfig) -> StarrisStatus {
    call(|| {
        let cfg = scenario::read_config(Path::new(string(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(StarrisConfig(cfg))), "out")
    })
}

/// Sets one key using the file syntax (`"p_j", "30 dBm"`). Not validated
/// until `starris_config_validate` or first use.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn starris_config_set(
    cfg: *mut StarrisConfig,
    key: *const c_char,
    value: *const c_char,
) -> StarrisStatus {
    call(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        scenario::set_value(&mut cfg.0, string(key, "key")?, string(value, "value")?)?;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn starris_config_validate(cfg: *const StarrisConfig) -> StarrisStatus {
    call(|| Ok(deref(cfg, "cfg")?.0.validate()?))
}

/// Number of STAR-RIS elements `L`.
///
/// # Safety
/// `cfg` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn starris_config_n_ris(cfg: *const StarrisConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.n_ris)
}

/// # Safety
/// `cfg` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn starris_config_clone(cfg: *const StarrisConfig) -> *mut StarrisConfig {
    match cfg.as_ref() {
        Some(c) => Box::into_raw(Box::new(StarrisConfig(c.0.clone()))),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn starris_config_free(cfg: *mut StarrisConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Draws one channel realization from the configuration's seed.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_channels_generate(
    cfg: *const StarrisConfig,
    out: *mut *mut StarrisChannels,
) -> StarrisStatus {
    call(|| {
        let ch = scenario::generate_channels(&deref(cfg, "cfg")?.0)?;
        write_out(out, Box::into_raw(Box::new(StarrisChannels(ch))), "out")
    })
}

/// # Safety
/// `ch` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn starris_channels_n_ris(ch: *const StarrisChannels) -> usize {
    ch.as_ref().map_or(0, |c| c.0.n_ris())
}

/// # Safety
/// `ch` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn starris_channels_free(ch: *mut StarrisChannels) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Radar detection probability at SINR `gamma >= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_detection_probability(gamma: f64, out: *mut f64) -> StarrisStatus {
    call(|| write_out(out, starris::channel_model::detection_probability(gamma)?, "out"))
}

/// Metrics of given phase vectors (`len` elements each, interleaved) with
/// the configuration's energy split.
///
/// # Safety
/// Handles must be live; `psi_t` and `psi_r` must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn starris_evaluate_metrics(
    ch: *const StarrisChannels,
    cfg: *const StarrisConfig,
    psi_t: *const f64,
    psi_r: *const f64,
    len: usize,
    out: *mut StarrisMetrics,
) -> StarrisStatus {
    call(|| {
        let ch = &deref(ch, "ch")?.0;
        let cfg = &deref(cfg, "cfg")?.0;
        if len != ch.n_ris() {
            return Err(invalid(format!("len {len} does not match n_ris {}", ch.n_ris())));
        }
        let state = StarRisState::with_config(cfg, read_complex(psi_t, len, "psi_t")?, read_complex(psi_r, len, "psi_r")?)?;
        let m = evaluate_metrics(ch, &state, cfg)?;
        write_out(out, StarrisMetrics::from(&m), "out")
    })
}

/// Runs one method on one channel realization. `out_psi_t` and `out_psi_r`
/// may be NULL; otherwise they receive `2 * n_ris` doubles.
///
/// # Safety
/// Handles must be live; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_run_method(
    ch: *const StarrisChannels,
    cfg: *const StarrisConfig,
    method: u32,
    out_metrics: *mut StarrisMetrics,
    out_psi_t: *mut f64,
    out_psi_r: *mut f64,
    out_feasible: *mut bool,
) -> StarrisStatus {
    call(|| {
        let ch = &deref(ch, "ch")?.0;
        let cfg = &deref(cfg, "cfg")?.0;
        let outcome = harness::run_method(method_from_code(method)?, ch, cfg)?;
        write_out(out_metrics, StarrisMetrics::from(&outcome.metrics), "out_metrics")?;
        write_complex(out_psi_t, &outcome.state.psi_t);
        write_complex(out_psi_r, &outcome.state.psi_r);
        if !out_feasible.is_null() {
            out_feasible.write(outcome.feasible);
        }
        Ok(())
    })
}

/// Monte-Carlo sweep. `variable` is `"n_jam"`, `"detector_distance"` or
/// `"n_ris"`; `values` must be strictly increasing; `methods` lists method
/// codes. Trials run in parallel.
///
/// # Safety
/// `cfg` must be live; `values` and `methods` must hold the given counts.
#[no_mangle]
pub unsafe extern "C" fn starris_sweep_run(
    cfg: *const StarrisConfig,
    variable: *const c_char,
    values: *const f64,
    n_values: usize,
    n_trials: usize,
    methods: *const u32,
    n_methods: usize,
    seed: u64,
    out: *mut *mut StarrisSweep,
) -> StarrisStatus {
    call(|| {
        let base = deref(cfg, "cfg")?.0.clone();
        let variable: SweepVariable = string(variable, "variable")?.parse()?;
        if values.is_null() || methods.is_null() {
            return Err(null(if values.is_null() { "values" } else { "methods" }));
        }
        let values = std::slice::from_raw_parts(values, n_values).to_vec();
        let methods = std::slice::from_raw_parts(methods, n_methods)
            .iter()
            .map(|&c| method_from_code(c))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = SweepSpec { variable, values, n_trials, methods, base, seed_base: seed, record_timing: false };
        let result = harness::run_sweep(&spec)?;
        write_out(out, Box::into_raw(Box::new(StarrisSweep(result))), "out")
    })
}

/// # Safety
/// `sweep` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn starris_sweep_len(sweep: *const StarrisSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.rows.len())
}

/// # Safety
/// `sweep` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starris_sweep_row(sweep: *const StarrisSweep, index: usize, out: *mut StarrisRow) -> StarrisStatus {
    call(|| {
        let rows = &deref(sweep, "sweep")?.0.rows;
        let r = rows.get(index).ok_or_else(|| invalid(format!("row {index} out of range ({} rows)", rows.len())))?;
        let row = StarrisRow {
            method: method_code(r.method),
            sweep_value: r.sweep_value,
            trial: r.trial,
            jam_gain_db: r.jam_gain_db,
            malicious_sinr_db: r.malicious_sinr_db,
            comm_gain_db: r.comm_gain_db,
            sum_rate: r.sum_rate,
            p_det_malicious: r.p_det_malicious,
            p_det_isac: r.p_det_isac,
            feasible_flag: r.feasible_flag,
            wall_time_ms: r.wall_time_ms,
        };
        write_out(out, row, "out")
    })
}

/// Writes the sweep as CSV (same format as the command-line tool).
///
/// # Safety
/// `sweep` must be live; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn starris_sweep_write_csv(sweep: *const StarrisSweep, path: *const c_char) -> StarrisStatus {
    call(|| {
        let res = &deref(sweep, "sweep")?.0;
        harness::write_csv_file(Path::new(string(path, "path")?), res)?;
        Ok(())
    })
}

/// # Safety
/// `sweep` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn starris_sweep_free(sweep: *mut StarrisSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}
