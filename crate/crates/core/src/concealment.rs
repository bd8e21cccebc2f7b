//! Target concealment: choose the transmission phases `ψ_t` that minimize the
//! malicious detector's SINR while the ISAC receiver keeps its sensing floor.
//!
//! The ratio objective is handled by Dinkelbach iterations over semidefinite
//! relaxations of the lifted variable `Y = ψψᴴ`; a rank-one point is then
//! recovered by Gaussian randomization.
//!
//! Quadratic forms follow the composition used by the channel model, where a
//! sensing row is `a_t · Gᵀ(f ∘ ψ)`. With `A = a_t·diag(f)·G` this gives
//! `‖h‖² = ψᴴ conj(A Aᴴ) ψ`, so every `Q` below is the conjugate of `A Aᴴ`.

use std::io::Write;

use rand::Rng;

use crate::channel_model::random_phases;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, matmul, scale_rows, unit_modulus, CMat, CVec, C64};
use crate::report::{SolveReport, Termination};
use crate::scenario::{ChannelSet, ScenarioConfig};
use crate::sdp::{solve_sdp_with, ConstraintMatrix, SdpOptions, SdpProblem, SdpStatus, Sense};

/// Randomization draws when the caller does not choose.
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcealmentProblem {
    /// `‖h_s‖² = ψᴴ Q_s ψ` (transmitter→target through the surface).
    pub q_s: CMat,
    /// `‖i_eff‖² = ψᴴ Q_m ψ` (transmitter→malicious detector).
    pub q_m: CMat,
    /// `‖h_rj‖² = ψᴴ Q_r ψ` (jammer→ISAC receiver).
    pub q_r: CMat,
    /// Low-rank factors with `Q_x = B_x B_xᴴ`, used for fast evaluation.
    b_s: CMat,
    b_m: CMat,
    b_r: CMat,
    pub zeta_sq: f64,
    pub p_d: f64,
    /// Power on the probing-path term (`p_s`, or `p_c` when so configured).
    pub p_s: f64,
    pub p_c: f64,
    pub p_j: f64,
    pub sigma_d_sq: f64,
    pub d_sq: f64,
    pub r_sq: f64,
    pub h_rd_sq: f64,
    pub gamma_min: f64,
}

fn factor(f: &CVec, g: &CMat, amp: f64) -> CMat {
    (scale_rows(f, g) * C64::new(amp, 0.0)).map(|z| z.conj())
}

fn gram(b: &CMat) -> CMat {
    hermitian_part(&matmul(b, &b.adjoint()))
}

pub fn build_problem(ch: &ChannelSet, cfg: &ScenarioConfig) -> Result<ConcealmentProblem> {
    ch.check_shapes()?;
    if ch.n_ris() != cfg.n_ris {
        return Err(Error::dim(format!(
            "channels have L = {}, configuration says {}",
            ch.n_ris(),
            cfg.n_ris
        )));
    }
    let amp = cfg.amp_t();
    let b_s = factor(&ch.f_t, &ch.g_b, amp);
    let b_m = factor(&ch.f_m, &ch.g_b, amp);
    let b_r = factor(&ch.f_r, &ch.g_j, amp);
    Ok(ConcealmentProblem {
        q_s: gram(&b_s),
        q_m: gram(&b_m),
        q_r: gram(&b_r),
        b_s,
        b_m,
        b_r,
        zeta_sq: cfg.zeta_sq,
        p_d: cfg.p_d,
        p_s: cfg.probing_power(),
        p_c: cfg.p_c,
        p_j: cfg.p_j,
        sigma_d_sq: cfg.sigma_d_sq,
        d_sq: ch.d().norm_sqr(),
        r_sq: ch.r().norm_sqr(),
        h_rd_sq: ch.h_rd.norm_sqr(),
        gamma_min: cfg.gamma_min,
    })
}

/// `ψᴴ B Bᴴ ψ = ‖Bᴴψ‖²`
fn factored_form(b: &CMat, psi: &CVec) -> f64 {
    b.ad_mul(psi).norm_squared()
}

/// The three traces `Tr(Q_s Y)`, `Tr(Q_m Y)`, `Tr(Q_r Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traces {
    pub s: f64,
    pub m: f64,
    pub r: f64,
}

impl ConcealmentProblem {
    pub fn len(&self) -> usize {
        self.q_s.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn traces_of_vector(&self, psi: &CVec) -> Traces {
        Traces {
            s: factored_form(&self.b_s, psi),
            m: factored_form(&self.b_m, psi),
            r: factored_form(&self.b_r, psi),
        }
    }

    pub fn traces_of_matrix(&self, y: &CMat) -> Traces {
        let tr = |q: &CMat| crate::linalg::trace_product(q, y).re;
        Traces { s: tr(&self.q_s), m: tr(&self.q_m), r: tr(&self.q_r) }
    }

    /// Numerator of the malicious SINR.
    pub fn numerator(&self, t: Traces) -> f64 {
        self.zeta_sq * self.p_d * self.d_sq * self.d_sq + self.zeta_sq * self.p_s * self.d_sq * t.s
    }

    /// Denominator of the malicious SINR.
    pub fn denominator(&self, t: Traces) -> f64 {
        self.sigma_d_sq + self.p_c * t.m
    }

    pub fn gamma_sd(&self, t: Traces) -> f64 {
        self.numerator(t) / self.denominator(t)
    }

    pub fn gamma_sr(&self, t: Traces) -> f64 {
        (self.p_s * self.zeta_sq * self.r_sq * t.s + self.zeta_sq * self.p_d * self.d_sq * self.r_sq)
            / (self.sigma_d_sq + self.p_d * self.h_rd_sq + self.p_j * t.r)
    }

    /// Sensing floor as a single trace inequality `Tr(A Y) ≥ b`.
    pub fn sensing_row(&self) -> (CMat, f64) {
        let a = &self.q_s * C64::new(self.p_s * self.zeta_sq * self.r_sq, 0.0)
            - &self.q_r * C64::new(self.gamma_min * self.p_j, 0.0);
        let b = self.gamma_min * (self.sigma_d_sq + self.p_d * self.h_rd_sq)
            - self.zeta_sq * self.p_d * self.d_sq * self.r_sq;
        (a, b)
    }

    /// Signed slack of the sensing floor in trace form (non-negative when met).
    pub fn sensing_slack(&self, t: Traces) -> f64 {
        let lhs = self.p_s * self.zeta_sq * self.r_sq * t.s - self.gamma_min * self.p_j * t.r;
        let (_, b) = self.sensing_row();
        lhs - b
    }

    /// Constant part of `N − λD`, outside the SDP objective.
    pub fn parametric_constant(&self, lambda: f64) -> f64 {
        self.zeta_sq * self.p_d * self.d_sq * self.d_sq - lambda * self.sigma_d_sq
    }
}

/// The relaxed parametric problem `min N(Y) − λ D(Y)` (up to its constant).
/// Row 0 is the sensing floor, rows `1..=L` fix the diagonal.
pub fn parametric_sdp(p: &ConcealmentProblem, lambda_s: f64) -> SdpProblem {
    let c = &p.q_s * C64::new(p.zeta_sq * p.p_s * p.d_sq, 0.0) - &p.q_m * C64::new(lambda_s * p.p_c, 0.0);
    let mut sdp = SdpProblem::new(c);
    let (a, b) = p.sensing_row();
    sdp.constrain(ConstraintMatrix::Dense(a), Sense::Ge, b);
    add_unit_diagonal(&mut sdp);
    sdp
}

fn add_unit_diagonal(sdp: &mut SdpProblem) {
    for l in 0..sdp.dim {
        sdp.constrain(ConstraintMatrix::unit_diagonal(l), Sense::Eq, 1.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinkelbachStep {
    pub lambda: f64,
    /// Optimal value of `N − λD` over the relaxed set.
    pub f_value: f64,
    /// `f_value / max(N, λD)`, the scale-free convergence measure.
    pub f_relative: f64,
    pub sdp_status: SdpStatus,
    /// Largest constraint violation of the SDP solution.
    pub constraint_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachState {
    /// Final ratio `N(Y)/D(Y)` of the returned relaxed point.
    pub lambda_s: f64,
    pub iteration: usize,
    pub f_value: f64,
    pub f_relative: f64,
    pub trace: Vec<DinkelbachStep>,
    /// Certified lower bound on the relaxed minimum, from the dual of the
    /// last parametric SDP.
    pub lower_bound: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy)]
pub struct DinkelbachOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub sdp: SdpOptions,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 50, sdp: SdpOptions { tol: 1e-9, max_iter: 200 } }
    }
}

/// Relative margin under which the sensing floor counts as unreachable.
const FEASIBILITY_MARGIN: f64 = 1e-9;

/// Establish a feasible starting ratio.
///
/// A random phase vector that already meets the floor certifies feasibility
/// on its own. Otherwise the relaxation maximizing the floor's left-hand
/// side decides: if even that misses the floor, the problem is infeasible
/// and the error reports by how much.
fn initial_lambda<R: Rng + ?Sized>(p: &ConcealmentProblem, opts: &DinkelbachOptions, rng: &mut R) -> Result<f64> {
    let psi = random_phases(p.len(), rng);
    let t = p.traces_of_vector(&psi);
    if p.sensing_slack(t) >= 0.0 {
        return Ok(p.gamma_sd(t));
    }
    let (a, b) = p.sensing_row();
    let mut sdp = SdpProblem::new(-a);
    add_unit_diagonal(&mut sdp);
    let sol = solve_sdp_with(&sdp, opts.sdp)?;
    let y = &sol.y;
    let t = p.traces_of_matrix(y);
    let best = -sol.objective_value;
    let scale = best.abs() + b.abs();
    if sol.status == SdpStatus::Infeasible || best - b < -FEASIBILITY_MARGIN * scale {
        let best_gamma = p.gamma_sr(t);
        return Err(Error::Infeasible(format!(
            "sensing floor unreachable: best relaxed ISAC SINR {best_gamma:.6e} < gamma_min {:.6e}",
            p.gamma_min
        )));
    }
    Ok(p.gamma_sd(t))
}

/// Dinkelbach iterations over the semidefinite relaxation.
///
/// Starts from the ratio of a feasible point, so every `F(λ_k) ≤ 0` and the
/// λ sequence is nonincreasing.
pub fn dinkelbach_solve<R: Rng + ?Sized>(
    p: &ConcealmentProblem,
    opts: &DinkelbachOptions,
    rng: &mut R,
) -> Result<(CMat, DinkelbachState)> {
    if p.is_empty() {
        return Err(Error::dim("concealment problem with L = 0"));
    }
    let mut lambda = initial_lambda(p, opts, rng)?;
    let mut state = DinkelbachState {
        lambda_s: lambda,
        iteration: 0,
        f_value: f64::NAN,
        f_relative: f64::NAN,
        trace: Vec::new(),
        lower_bound: f64::NEG_INFINITY,
        termination: Termination::MaxIterations,
    };
    let mut best_y: Option<CMat> = None;
    for k in 0..opts.max_iter {
        let sdp = parametric_sdp(p, lambda);
        let sol = solve_sdp_with(&sdp, opts.sdp)?;
        if sol.status == SdpStatus::Infeasible {
            return Err(Error::Infeasible(format!("parametric relaxation infeasible at lambda = {lambda:.6e}")));
        }
        let t = p.traces_of_matrix(&sol.y);
        let (n, d) = (p.numerator(t), p.denominator(t));
        let f = n - lambda * d;
        let f_rel = f / n.abs().max(lambda * d).max(f64::MIN_POSITIVE);
        let residual = sdp.constraint_violation(&sol.y);
        state.trace.push(DinkelbachStep {
            lambda,
            f_value: f,
            f_relative: f_rel,
            sdp_status: sol.status,
            constraint_residual: residual,
        });
        state.iteration = k + 1;
        state.f_value = f;
        state.f_relative = f_rel;
        let dual_f = sol.dual_objective + p.parametric_constant(lambda);
        state.lower_bound = lambda + dual_f.min(0.0) / p.sigma_d_sq;

        let next = n / d;
        if next < lambda || best_y.is_none() {
            best_y = Some(sol.y);
            state.lambda_s = next.min(lambda);
        }
        if f_rel.abs() <= opts.tol {
            state.termination = Termination::Converged;
            break;
        }
        if next >= lambda {
            // No decrease left within solver accuracy.
            state.termination = Termination::ObjectiveStall;
            break;
        }
        lambda = next;
    }
    state.lower_bound = state.lower_bound.min(state.lambda_s);
    let y = best_y.expect("at least one Dinkelbach iteration");
    Ok((y, state))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcealmentSolution {
    pub psi_t: CVec,
    pub gamma_sd: f64,
    pub gamma_sr: f64,
    /// Lower bound on any unit-modulus point's malicious SINR under the
    /// sensing floor.
    pub relaxed_bound: f64,
    pub report: SolveReport,
}

/// `Y = V diag(w) Vᴴ` → `V diag(√w⁺)`, so `F Fᴴ = Y` for PSD `Y`.
/// Eigenvalues at roundoff level are treated as zero; their square roots
/// would otherwise perturb every draw by `O(√ε)`.
fn psd_factor(y: &CMat) -> (CMat, CVec) {
    let eig = hermitian_part(y).symmetric_eigen();
    let n = y.nrows();
    let mut f = eig.eigenvectors.clone();
    let lead = eig.eigenvalues.imax();
    let floor = 1e-12 * eig.eigenvalues[lead].max(0.0);
    for j in 0..n {
        let w = eig.eigenvalues[j];
        let s = if w > floor { w.sqrt() } else { 0.0 };
        for i in 0..n {
            f[(i, j)] *= s;
        }
    }
    let v = eig.eigenvectors.column(lead).into_owned();
    (f, v)
}

/// Recover a unit-modulus `ψ_t` from a relaxed solution.
///
/// Candidate 0 is the phase-projected leading eigenvector of `Y`; candidates
/// `1..=n_samples` are projected draws from `CN(0, Y)`. The winner is the
/// feasible candidate with the smallest malicious SINR (lowest index on
/// ties); with no feasible candidate, the smallest floor violation wins and
/// the report says so.
pub fn gaussian_randomization<R: Rng + ?Sized>(
    y: &CMat,
    p: &ConcealmentProblem,
    n_samples: usize,
    relaxed_bound: f64,
    rng: &mut R,
) -> Result<ConcealmentSolution> {
    let l = p.len();
    if y.shape() != (l, l) {
        return Err(Error::dim(format!("Y is {:?}, problem has L = {l}", y.shape())));
    }
    let (f, lead) = psd_factor(y);
    // (feasible, key, psi, traces); key is γ_sd when feasible, else the violation.
    let mut best: Option<(bool, f64, CVec, Traces)> = None;
    let mut consider = |psi: CVec| {
        let t = p.traces_of_vector(&psi);
        let slack = p.sensing_slack(t);
        let feasible = slack >= 0.0;
        let key = if feasible { p.gamma_sd(t) } else { -slack };
        let better = match &best {
            None => true,
            Some((bf, bk, _, _)) => (feasible && !bf) || (feasible == *bf && key < *bk),
        };
        if better {
            best = Some((feasible, key, psi, t));
        }
    };
    consider(unit_modulus(&lead));
    for _ in 0..n_samples {
        let w = CVec::from_fn(l, |_, _| crate::scenario::complex_normal(rng));
        consider(unit_modulus(&(&f * w)));
    }
    let (feasible, _, psi, t) = best.expect("leading eigenvector is always a candidate");
    let mut report = SolveReport::new(if feasible { Termination::Converged } else { Termination::NoFeasibleCandidate });
    report.feasible = feasible;
    report.iterations = n_samples + 1;
    Ok(ConcealmentSolution {
        psi_t: psi,
        gamma_sd: p.gamma_sd(t),
        gamma_sr: p.gamma_sr(t),
        relaxed_bound,
        report,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConcealmentOptions {
    pub dinkelbach: DinkelbachOptions,
    pub n_samples: usize,
}

impl Default for ConcealmentOptions {
    fn default() -> Self {
        Self { dinkelbach: DinkelbachOptions::default(), n_samples: DEFAULT_SAMPLES }
    }
}

/// Full pipeline: build, Dinkelbach over the relaxation, randomize. The
/// report carries the λ trace and per-iteration constraint residuals.
pub fn solve_concealment<R: Rng + ?Sized>(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    opts: &ConcealmentOptions,
    rng: &mut R,
) -> Result<(ConcealmentSolution, DinkelbachState)> {
    let p = build_problem(ch, cfg)?;
    let (y, state) = dinkelbach_solve(&p, &opts.dinkelbach, rng)?;
    let mut sol = gaussian_randomization(&y, &p, opts.n_samples, state.lower_bound, rng)?;
    for step in &state.trace {
        sol.report.push(step.lambda, step.constraint_residual);
    }
    sol.report.iterations = state.iteration;
    if sol.report.feasible && !state.termination.is_success() {
        sol.report.termination = state.termination;
    }
    Ok((sol, state))
}

/// Per-iteration Dinkelbach trace as CSV.
pub fn write_trace<W: Write>(out: W, state: &DinkelbachState) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["iteration", "lambda", "F_lambda", "sdp_status", "constraint_residual"])?;
    for (i, s) in state.trace.iter().enumerate() {
        let status = match s.sdp_status {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::MaxIter => "max_iter",
        };
        w.write_record([
            i.to_string(),
            format!("{:e}", s.lambda),
            format!("{:e}", s.f_value),
            status.to_string(),
            format!("{:e}", s.constraint_residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::{effective_sense_channels, StarRisState};
    use crate::scenario::generate_channels;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg(l: usize, seed: u64) -> ScenarioConfig {
        ScenarioConfig { n_ris: l, seed, ..Default::default() }
    }

    #[test]
    fn zero_target_link_gives_zero_q_s() {
        let cfg = small_cfg(4, 1);
        let mut ch = generate_channels(&cfg).unwrap();
        ch.f_t.fill(C64::new(0.0, 0.0));
        let p = build_problem(&ch, &cfg).unwrap();
        assert_eq!(p.q_s.norm(), 0.0);
    }

    #[test]
    fn scalar_quadratic_form() {
        let cfg = ScenarioConfig { n_ris: 1, n_tx: 1, beta_t: 0.5, ..Default::default() };
        let mut ch = generate_channels(&cfg).unwrap();
        ch.f_t[0] = C64::new(2.0, 0.0);
        ch.g_b[(0, 0)] = C64::new(3.0, 0.0);
        let p = build_problem(&ch, &cfg).unwrap();
        // |2·3|² with the transmission power fraction 0.5 folded in.
        assert!((p.q_s[(0, 0)].re - 18.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_forms_match_composed_channels() {
        let cfg = small_cfg(12, 3);
        let ch = generate_channels(&cfg).unwrap();
        let p = build_problem(&ch, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let psi = random_phases(12, &mut rng);
            let ris = StarRisState::with_config(&cfg, psi.clone(), psi.clone()).unwrap();
            let (_, h_rj, h_s, i_eff) = effective_sense_channels(&ch, &ris).unwrap();
            let full = psi.clone() * psi.adjoint();
            for (q, b, v) in [(&p.q_s, &p.b_s, &h_s), (&p.q_m, &p.b_m, &i_eff), (&p.q_r, &p.b_r, &h_rj)] {
                let want = v.norm_squared();
                let via_q = crate::linalg::quad_form(q, &psi);
                let via_b = factored_form(b, &psi);
                let via_y = crate::linalg::trace_product(q, &full).re;
                for got in [via_q, via_b, via_y] {
                    assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn parametric_structure() {
        let cfg = small_cfg(6, 4);
        let ch = generate_channels(&cfg).unwrap();
        let p = build_problem(&ch, &cfg).unwrap();
        let sdp = parametric_sdp(&p, 0.0);
        let want = &p.q_s * C64::new(p.zeta_sq * p.p_s * p.d_sq, 0.0);
        assert_eq!(sdp.objective, want);
        assert_eq!(sdp.constraints.len(), 7);
        let diag = sdp.constraints[1..]
            .iter()
            .filter(|c| c.sense == Sense::Eq && c.rhs == 1.0)
            .count();
        assert_eq!(diag, 6);
    }

    #[test]
    fn write_trace_header() {
        let state = DinkelbachState {
            lambda_s: 1.0,
            iteration: 1,
            f_value: 0.0,
            f_relative: 0.0,
            trace: vec![DinkelbachStep {
                lambda: 1.0,
                f_value: 0.0,
                f_relative: 0.0,
                sdp_status: SdpStatus::Optimal,
                constraint_residual: 0.0,
            }],
            lower_bound: 1.0,
            termination: Termination::Converged,
        };
        let mut buf = Vec::new();
        write_trace(&mut buf, &state).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,lambda,F_lambda,sdp_status,constraint_residual\n0,"));
    }
}
