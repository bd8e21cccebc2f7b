//! Monte-Carlo sweeps comparing the optimized surface against the two
//! benchmarks on identical channel draws.

mod plots;
mod table;

pub use plots::{emit_plots, PLOT_METRICS};
pub use table::{read_csv, write_csv, write_csv_file, CSV_HEADER};

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel_model::{evaluate_metrics, random_phases, MetricReport, StarRisState};
use crate::concealment::{solve_concealment, ConcealmentOptions};
use crate::error::{Error, Result};
use crate::jamming::{solve_p2_with_amp, ManifoldPoint, PenaltyOptions};
use crate::linalg::CVec;
use crate::report::{SolveReport, Termination};
use crate::scenario::{generate_channels, linear_to_db, ChannelSet, ScenarioConfig};

/// Set by a signal handler; sweeps stop scheduling new cells once raised.
pub static INTERRUPTED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    SafeIsac,
    RandomPhaseStar,
    ReflectOnlyRis,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SafeIsac, Method::RandomPhaseStar, Method::ReflectOnlyRis];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SafeIsac => "safe_isac",
            Method::RandomPhaseStar => "random_phase_star",
            Method::ReflectOnlyRis => "reflect_only_ris",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    NJam,
    DetectorDistance,
    NRis,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::NJam => "n_jam",
            SweepVariable::DetectorDistance => "detector_distance",
            SweepVariable::NRis => "n_ris",
        }
    }

    /// Configuration for one sweep point.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 && v <= 1e6 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{} must be a positive integer, got {v}", self.as_str())))
            }
        };
        match self {
            SweepVariable::NJam => cfg.n_jam = count(value)?,
            SweepVariable::NRis => cfg.n_ris = count(value)?,
            SweepVariable::DetectorDistance => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::Config(format!("detector_distance must be positive, got {value}")));
                }
                cfg.geometry.set_detector_distance(value);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_jam" => Ok(SweepVariable::NJam),
            "detector_distance" => Ok(SweepVariable::DetectorDistance),
            "n_ris" => Ok(SweepVariable::NRis),
            _ => Err(Error::Config(format!("unknown sweep variable '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub n_trials: usize,
    pub methods: Vec<Method>,
    pub base: ScenarioConfig,
    pub seed_base: u64,
    /// Write measured solve times; otherwise `wall_time_ms` is 0 so the
    /// output is reproducible byte for byte.
    pub record_timing: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::Config("need at least one trial".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("need at least one method".into()));
        }
        self.base.validate()?;
        for &v in &self.values {
            self.variable.apply(&self.base, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
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

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// The sweep stopped early on an interrupt.
    pub partial: bool,
}

impl SweepResult {
    pub fn any_feasible(&self) -> bool {
        self.rows.iter().any(|r| r.feasible_flag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub metrics: MetricReport,
    pub state: StarRisState,
    pub report: SolveReport,
    pub feasible: bool,
}

/// `splitmix64` finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial. It does not depend on the sweep value, so every point
/// of a sweep sees the same underlying random draws (common random numbers).
pub fn trial_seed(seed_base: u64, trial: usize) -> u64 {
    seed_base ^ splitmix64(trial as u64)
}

/// Solver-side random streams of a trial, disjoint from the channel streams.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum SolverStream {
    ReflectionPhases = 101,
    TransmissionPhases = 102,
    Concealment = 103,
}

fn solver_rng(seed: u64, stream: SolverStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Sensing floor check with the relative slack used throughout.
fn meets_floor(m: &MetricReport, cfg: &ScenarioConfig) -> bool {
    m.gamma_sr >= cfg.gamma_min * (1.0 - 1e-6)
}

/// Run one method on one channel realization. Randomness comes from streams
/// keyed by `cfg.seed`; solver failures surface as `feasible = false`.
pub fn run_method(method: Method, ch: &ChannelSet, cfg: &ScenarioConfig) -> Result<MethodOutcome> {
    let l = ch.n_ris();
    let start_r = random_phases(l, &mut solver_rng(cfg.seed, SolverStream::ReflectionPhases));
    let random_t = random_phases(l, &mut solver_rng(cfg.seed, SolverStream::TransmissionPhases));
    match method {
        Method::RandomPhaseStar => {
            let state = StarRisState::with_config(cfg, random_t, start_r)?;
            let metrics = evaluate_metrics(ch, &state, cfg)?;
            let feasible = meets_floor(&metrics, cfg) && metrics.comm_gain >= cfg.g_th;
            Ok(MethodOutcome { metrics, state, report: SolveReport::new(Termination::Converged), feasible })
        }
        Method::SafeIsac => {
            let p2 = solve_p2_with_amp(ch, cfg, cfg.amp_r(), ManifoldPoint { psi_r: start_r }, &PenaltyOptions::default())?;
            let mut rng = solver_rng(cfg.seed, SolverStream::Concealment);
            let (psi_t, conc_ok, report) = match solve_concealment(ch, cfg, &ConcealmentOptions::default(), &mut rng) {
                Ok((sol, _)) => (sol.psi_t, sol.report.feasible, merge_reports(p2.report.clone(), sol.report)),
                Err(e) => {
                    log::warn!("concealment failed (seed {}): {e}", cfg.seed);
                    let mut r = p2.report.clone();
                    r.termination = Termination::Infeasible;
                    r.feasible = false;
                    (random_t, false, r)
                }
            };
            let state = StarRisState::with_config(cfg, psi_t, p2.point.psi_r)?;
            let metrics = evaluate_metrics(ch, &state, cfg)?;
            let feasible = p2.report.feasible && conc_ok && meets_floor(&metrics, cfg);
            Ok(MethodOutcome { metrics, state, report, feasible })
        }
        Method::ReflectOnlyRis => {
            let p2 = solve_p2_with_amp(ch, cfg, 1.0, ManifoldPoint { psi_r: start_r }, &PenaltyOptions::default())?;
            let ones = CVec::from_element(l, crate::linalg::ONE);
            let state = StarRisState::new(ones, p2.point.psi_r, 0.0, 1.0)?;
            let metrics = evaluate_metrics(ch, &state, cfg)?;
            let feasible = p2.report.feasible && meets_floor(&metrics, cfg);
            Ok(MethodOutcome { metrics, state, report: p2.report, feasible })
        }
    }
}

fn merge_reports(mut a: SolveReport, b: SolveReport) -> SolveReport {
    a.iterations += b.iterations;
    a.objective_trace.extend(b.objective_trace);
    a.residual_trace.extend(b.residual_trace);
    a.feasible &= b.feasible;
    if a.termination.is_success() {
        a.termination = b.termination;
    }
    a
}

fn row_from(method: Method, value: f64, trial: usize, out: &MethodOutcome, ms: f64) -> SweepRow {
    let m = &out.metrics;
    SweepRow {
        method,
        sweep_value: value,
        trial,
        jam_gain_db: linear_to_db(m.jam_gain),
        malicious_sinr_db: linear_to_db(m.gamma_sd),
        comm_gain_db: linear_to_db(m.comm_gain),
        sum_rate: m.sum_rate,
        p_det_malicious: m.p_det_malicious,
        p_det_isac: m.p_det_isac,
        feasible_flag: out.feasible,
        wall_time_ms: ms,
    }
}

fn failed_row(method: Method, value: f64, trial: usize) -> SweepRow {
    SweepRow {
        method,
        sweep_value: value,
        trial,
        jam_gain_db: f64::NAN,
        malicious_sinr_db: f64::NAN,
        comm_gain_db: f64::NAN,
        sum_rate: f64::NAN,
        p_det_malicious: f64::NAN,
        p_det_isac: f64::NAN,
        feasible_flag: false,
        wall_time_ms: 0.0,
    }
}

fn run_cell(spec: &SweepSpec, value: f64, trial: usize) -> Result<Vec<SweepRow>> {
    let mut cfg = spec.variable.apply(&spec.base, value)?;
    cfg.seed = trial_seed(spec.seed_base, trial);
    let ch = generate_channels(&cfg)?;
    let mut rows = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let t0 = Instant::now();
        let out = run_method(method, &ch, &cfg);
        let ms = if spec.record_timing { t0.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        rows.push(match out {
            Ok(o) => row_from(method, value, trial, &o, ms),
            Err(e) => {
                log::warn!("{method} failed at {}={value}, trial {trial}: {e}", spec.variable.as_str());
                failed_row(method, value, trial)
            }
        });
    }
    Ok(rows)
}

/// Run every (value, trial) cell in parallel; rows come back sorted by
/// (method, value, trial) whatever the execution order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cells: Vec<(f64, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.n_trials).map(move |t| (v, t)))
        .collect();
    let per_cell: Vec<Option<Result<Vec<SweepRow>>>> = cells
        .par_iter()
        .map(|&(v, t)| {
            if INTERRUPTED.load(Ordering::Relaxed) {
                None
            } else {
                Some(run_cell(spec, v, t))
            }
        })
        .collect();
    let mut result = SweepResult::default();
    for cell in per_cell {
        match cell {
            Some(rows) => result.rows.extend(rows?),
            None => result.partial = true,
        }
    }
    result.rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.sweep_value.total_cmp(&b.sweep_value))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(result)
}

/// Per (method, value): trial mean and standard error of one column.
pub fn summarize<F: Fn(&SweepRow) -> f64>(result: &SweepResult, metric: F) -> Vec<(Method, f64, f64, f64)> {
    let mut groups: Vec<(Method, f64, Vec<f64>)> = Vec::new();
    for r in &result.rows {
        let v = metric(r);
        match groups.iter_mut().find(|(m, x, _)| *m == r.method && *x == r.sweep_value) {
            Some(g) => g.2.push(v),
            None => groups.push((r.method, r.sweep_value, vec![v])),
        }
    }
    groups
        .into_iter()
        .map(|(m, x, vals)| {
            let finite: Vec<f64> = vals.into_iter().filter(|v| v.is_finite()).collect();
            let n = finite.len() as f64;
            let mean = finite.iter().sum::<f64>() / n;
            let se = if finite.len() > 1 {
                (finite.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            (m, x, mean, se)
        })
        .collect()
}
