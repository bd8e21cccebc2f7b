//! Jamming suppression: choose the reflection phases `ψ_r` that minimize the
//! residual jamming gain `‖J_eff‖²_F` while keeping `‖H_eff‖²_F ≥ G_th`.
//!
//! The gain floor enters through a penalty weight `λ_r`; each penalized
//! problem is minimized by Riemannian Polak-Ribière conjugate gradient on the
//! product of unit circles.

use std::io::Write;

use crate::channel_model::{effective_comm_channels, StarRisState};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, matmul, scale_rows, CMat, CVec, C64};
use crate::report::{SolveReport, Termination};
use crate::scenario::{ChannelSet, ScenarioConfig};

/// Penalized objective `‖J_eff‖² + λ_r (G_th − ‖H_eff‖²)`.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyProblem<'a> {
    pub ch: &'a ChannelSet,
    pub g_th: f64,
    pub lambda_r: f64,
    pub amp_r: f64,
    /// Use `max(0, G_th − ‖H_eff‖²)` instead of the signed gap.
    pub clip: bool,
}

impl<'a> PenaltyProblem<'a> {
    pub fn new(ch: &'a ChannelSet, cfg: &ScenarioConfig, lambda_r: f64) -> Self {
        Self { ch, g_th: cfg.g_th, lambda_r, amp_r: cfg.amp_r(), clip: cfg.clip_penalty }
    }

    fn composed(&self, x: &ManifoldPoint) -> (CMat, CMat) {
        let a = C64::new(self.amp_r, 0.0);
        let ch = self.ch;
        let h_eff = &ch.h + matmul(&ch.f_c, &scale_rows(&x.psi_r, &ch.g_b)) * a;
        let j_eff = &ch.j + matmul(&ch.f_c, &scale_rows(&x.psi_r, &ch.g_j)) * a;
        (h_eff, j_eff)
    }

    fn penalty_active(&self, gap: f64) -> bool {
        !self.clip || gap > 0.0
    }
}

/// A point of the circle manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    pub psi_r: CVec,
}

impl ManifoldPoint {
    pub fn new(psi_r: CVec) -> Result<Self> {
        if let Some((i, z)) = psi_r.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::Config(format!("psi_r[{i}] has modulus {}", z.norm())));
        }
        Ok(Self { psi_r })
    }

    pub fn len(&self) -> usize {
        self.psi_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi_r.is_empty()
    }
}

pub fn penalty_objective(p: &PenaltyProblem, x: &ManifoldPoint) -> f64 {
    let (h_eff, j_eff) = p.composed(x);
    objective_from(p, &h_eff, &j_eff)
}

fn objective_from(p: &PenaltyProblem, h_eff: &CMat, j_eff: &CMat) -> f64 {
    let gap = p.g_th - frobenius_sq(h_eff);
    let pen = if p.clip { gap.max(0.0) } else { gap };
    frobenius_sq(j_eff) + p.lambda_r * pen
}

/// `g_l = Σ_k Σ_m conj(F[k,l]) E[k,m] conj(G[l,m])`, the diagonal of `Fᴴ E Gᴴ`.
fn diag_sandwich(f: &CMat, e: &CMat, g: &CMat) -> CVec {
    let fe = f.ad_mul(e);
    CVec::from_fn(f.ncols(), |l, _| {
        (0..g.ncols()).map(|m| fe[(l, m)] * g[(l, m)].conj()).sum()
    })
}

/// Gradient with respect to `conj(ψ_r)`; the derivative of `f` along `v` is
/// `2·Re(gᴴ v)`.
pub fn euclidean_gradient(p: &PenaltyProblem, x: &ManifoldPoint) -> CVec {
    let (h_eff, j_eff) = p.composed(x);
    gradient_from(p, &h_eff, &j_eff)
}

fn gradient_from(p: &PenaltyProblem, h_eff: &CMat, j_eff: &CMat) -> CVec {
    let a = C64::new(p.amp_r, 0.0);
    let mut g = diag_sandwich(&p.ch.f_c, j_eff, &p.ch.g_j) * a;
    let gap = p.g_th - frobenius_sq(h_eff);
    if p.lambda_r != 0.0 && p.penalty_active(gap) {
        g -= diag_sandwich(&p.ch.f_c, h_eff, &p.ch.g_b) * (a * p.lambda_r);
    }
    g
}

/// Projection onto the tangent space of the circles at `x`.
pub fn riemannian_gradient(x: &ManifoldPoint, egrad: &CVec) -> CVec {
    project(&x.psi_r, egrad)
}

fn project(psi: &CVec, v: &CVec) -> CVec {
    CVec::from_fn(psi.len(), |l, _| {
        let radial = (v[l].conj() * psi[l]).re;
        v[l] - psi[l] * radial
    })
}

/// Entrywise renormalization of `ψ + t·v`.
pub fn retract(x: &ManifoldPoint, v: &CVec, t: f64) -> ManifoldPoint {
    let psi = CVec::from_fn(x.len(), |l, _| {
        let z = x.psi_r[l] + v[l] * t;
        let r = z.norm();
        if r > 0.0 && r.is_finite() {
            z / r
        } else {
            x.psi_r[l]
        }
    });
    ManifoldPoint { psi_r: psi }
}

/// `Re(aᴴ b)`
fn inner(a: &CVec, b: &CVec) -> f64 {
    a.dotc(b).re
}

/// Snapshot handed to an observer after every accepted step (and once at
/// the start, with `step = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct CgState {
    pub point: ManifoldPoint,
    /// Riemannian gradient of the normalized objective `f / scale`.
    pub riem_grad: CVec,
    pub direction: CVec,
    pub beta_pr: f64,
    pub step: f64,
    /// Unscaled penalty objective.
    pub objective: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Stop when the (normalized) Riemannian gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step lowers the normalized objective by less.
    pub f_tol: f64,
    pub max_iter: usize,
    pub armijo_c1: f64,
    pub shrink: f64,
    pub initial_step: f64,
    pub max_backtracks: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            f_tol: 1e-10,
            max_iter: 1000,
            armijo_c1: 1e-4,
            shrink: 0.5,
            initial_step: 1.0,
            max_backtracks: 50,
        }
    }
}

/// Objective scale: the typical per-phase curvature at the start, i.e. the
/// radial gradient size plus the largest per-element quadratic coefficient.
/// A unit step then moves a phase by roughly its one-dimensional Newton
/// step. Tolerances apply to `f / scale`.
fn objective_scale(p: &PenaltyProblem, egrad0: &CVec) -> f64 {
    let ch = p.ch;
    let a2 = p.amp_r * p.amp_r;
    let mut curv = 0.0_f64;
    for l in 0..ch.n_ris() {
        let fc = ch.f_c.column(l).norm_squared();
        curv = curv.max(a2 * fc * (ch.g_j.row(l).norm_squared() + p.lambda_r.abs() * ch.g_b.row(l).norm_squared()));
    }
    let gmean = egrad0.iter().map(|z| z.norm()).sum::<f64>() / egrad0.len().max(1) as f64;
    let s = 2.0 * curv + gmean;
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

pub fn pr_cg_solve(p: &PenaltyProblem, x0: ManifoldPoint, opts: &CgOptions) -> (ManifoldPoint, SolveReport) {
    pr_cg_solve_observed(p, x0, opts, |_| {})
}

struct Eval {
    f: f64,
    rgrad: CVec,
}

fn evaluate(p: &PenaltyProblem, x: &ManifoldPoint, scale: f64) -> Eval {
    let (h_eff, j_eff) = p.composed(x);
    let f = objective_from(p, &h_eff, &j_eff) / scale;
    let eg = gradient_from(p, &h_eff, &j_eff) / C64::new(scale, 0.0);
    Eval { f, rgrad: project(&x.psi_r, &eg) }
}

/// Riemannian PR conjugate gradient with Armijo backtracking. The observer
/// sees the start point and every accepted iterate.
pub fn pr_cg_solve_observed<F: FnMut(&CgState)>(
    p: &PenaltyProblem,
    x0: ManifoldPoint,
    opts: &CgOptions,
    mut observer: F,
) -> (ManifoldPoint, SolveReport) {
    let l = x0.len();
    let scale = objective_scale(p, &euclidean_gradient(p, &x0));
    let mut x = x0;
    let mut cur = evaluate(p, &x, scale);
    let mut dir = -&cur.rgrad;
    let mut beta = 0.0;
    let mut report = SolveReport::new(Termination::MaxIterations);
    report.push(cur.f * scale, cur.rgrad.norm());
    observer(&CgState {
        point: x.clone(),
        riem_grad: cur.rgrad.clone(),
        direction: dir.clone(),
        beta_pr: 0.0,
        step: 0.0,
        objective: cur.f * scale,
        iteration: 0,
    });
    if cur.rgrad.norm() <= opts.grad_tol {
        report.iterations = 1;
        report.termination = Termination::GradientTolerance;
        return (x, report);
    }
    let mut since_reset = 0;
    let mut iteration = 0;
    while iteration < opts.max_iter {
        iteration += 1;
        let mut slope = 2.0 * inner(&cur.rgrad, &dir);
        let mut steepest = beta == 0.0;
        if !(slope < 0.0) {
            dir = -&cur.rgrad;
            slope = -2.0 * cur.rgrad.norm_squared();
            steepest = true;
        }
        let mut accepted = None;
        let mut t = opts.initial_step;
        for _ in 0..opts.max_backtracks {
            let cand = retract(&x, &dir, t);
            let e = evaluate(p, &cand, scale);
            if e.f <= cur.f + opts.armijo_c1 * t * slope {
                accepted = Some((cand, e));
                break;
            }
            t *= opts.shrink;
        }
        let Some((x_new, new)) = accepted else {
            if steepest {
                report.termination = Termination::LineSearchFailure;
                break;
            }
            // Restart from steepest descent once before giving up.
            dir = -&cur.rgrad;
            beta = 0.0;
            since_reset = 0;
            continue;
        };
        let decrease = cur.f - new.f;
        since_reset += 1;
        let old_grad = project(&x_new.psi_r, &cur.rgrad);
        let old_dir = project(&x_new.psi_r, &dir);
        beta = if since_reset >= l {
            since_reset = 0;
            0.0
        } else {
            inner(&new.rgrad, &(&new.rgrad - &old_grad)) / cur.rgrad.norm_squared()
        };
        if !beta.is_finite() {
            beta = 0.0;
        }
        dir = -&new.rgrad + old_dir * C64::new(beta, 0.0);
        x = x_new;
        cur = new;
        report.push(cur.f * scale, cur.rgrad.norm());
        observer(&CgState {
            point: x.clone(),
            riem_grad: cur.rgrad.clone(),
            direction: dir.clone(),
            beta_pr: beta,
            step: t,
            objective: cur.f * scale,
            iteration,
        });
        if cur.rgrad.norm() <= opts.grad_tol {
            report.termination = Termination::GradientTolerance;
            break;
        }
        if decrease <= opts.f_tol {
            report.termination = Termination::ObjectiveStall;
            break;
        }
    }
    report.iterations = iteration;
    (x, report)
}

/// One row of the optional CG trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub beta_pr: f64,
    pub lambda_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P2Solution {
    pub point: ManifoldPoint,
    pub report: SolveReport,
    /// Penalty weight of the last round.
    pub lambda_r: f64,
    pub rounds: usize,
    pub trace: Vec<CgRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct PenaltyOptions {
    pub cg: CgOptions,
    pub initial_lambda: f64,
    pub growth: f64,
    pub max_rounds: usize,
    /// Relative violation `(G_th − ‖H_eff‖²)/G_th` tolerated as feasible.
    pub feasibility_tol: f64,
}

impl Default for PenaltyOptions {
    fn default() -> Self {
        Self { cg: CgOptions::default(), initial_lambda: 1.0, growth: 10.0, max_rounds: 8, feasibility_tol: 1e-6 }
    }
}

/// Outer penalty loop around [`pr_cg_solve`], warm-started between rounds.
pub fn solve_p2(ch: &ChannelSet, cfg: &ScenarioConfig, x0: ManifoldPoint, opts: &PenaltyOptions) -> Result<P2Solution> {
    solve_p2_with_amp(ch, cfg, cfg.amp_r(), x0, opts)
}

/// As [`solve_p2`] with an explicit reflection amplitude.
pub fn solve_p2_with_amp(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    amp_r: f64,
    x0: ManifoldPoint,
    opts: &PenaltyOptions,
) -> Result<P2Solution> {
    if x0.len() != ch.n_ris() {
        return Err(Error::dim(format!("start point has {} phases, L = {}", x0.len(), ch.n_ris())));
    }
    let mut lambda = opts.initial_lambda;
    let mut x = x0;
    let mut trace = Vec::new();
    let mut total = SolveReport::new(Termination::MaxIterations);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let p = PenaltyProblem { amp_r, ..PenaltyProblem::new(ch, cfg, lambda) };
        let (x_new, rep) = pr_cg_solve_observed(&p, x, &opts.cg, |s| {
            trace.push(CgRecord {
                iteration: s.iteration,
                objective: s.objective,
                grad_norm: s.riem_grad.norm(),
                step: s.step,
                beta_pr: s.beta_pr,
                lambda_r: lambda,
            })
        });
        x = x_new;
        let (h_eff, _) = p.composed(&x);
        let gap = cfg.g_th - frobenius_sq(&h_eff);
        total.iterations += rep.iterations;
        total.objective_trace.extend(&rep.objective_trace);
        total.residual_trace.extend(std::iter::repeat_n(gap.max(0.0), rep.objective_trace.len()));
        total.termination = rep.termination;
        let feasible = gap <= opts.feasibility_tol * cfg.g_th;
        total.feasible = feasible;
        if feasible {
            break;
        }
        if rounds >= opts.max_rounds {
            total.termination = Termination::InfeasibleAfterPenaltyCap;
            break;
        }
        lambda *= opts.growth;
    }
    Ok(P2Solution { point: x, report: total, lambda_r: lambda, rounds, trace })
}

/// `‖J_eff‖²` and `‖H_eff‖²` at a reflection point.
pub fn gains(ch: &ChannelSet, x: &ManifoldPoint, amp_r: f64) -> Result<(f64, f64)> {
    let ones = CVec::from_element(x.len(), C64::new(1.0, 0.0));
    let state = StarRisState::new(ones, x.psi_r.clone(), 0.0, amp_r)?;
    let (h_eff, j_eff) = effective_comm_channels(ch, &state)?;
    Ok((frobenius_sq(&j_eff), frobenius_sq(&h_eff)))
}

/// CG trace as CSV.
pub fn write_trace<W: Write>(out: W, trace: &[CgRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["iteration", "objective", "grad_norm", "step", "beta_pr", "lambda_r"])?;
    for r in trace {
        w.write_record([
            r.iteration.to_string(),
            format!("{:e}", r.objective),
            format!("{:e}", r.grad_norm),
            format!("{:e}", r.step),
            format!("{:e}", r.beta_pr),
            format!("{:e}", r.lambda_r),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::{evaluate_metrics, random_phases};
    use crate::scenario::generate_channels;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(z: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(z, 0.0))
    }

    fn random_point(l: usize, seed: u64) -> ManifoldPoint {
        ManifoldPoint { psi_r: random_phases(l, &mut ChaCha8Rng::seed_from_u64(seed)) }
    }

    fn random_tangent(x: &ManifoldPoint, rng: &mut ChaCha8Rng) -> CVec {
        let v = CVec::from_fn(x.len(), |_, _| crate::scenario::complex_normal(rng));
        project(&x.psi_r, &v)
    }

    #[test]
    fn zero_penalty_matches_metrics() {
        let cfg = ScenarioConfig { n_ris: 8, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let x = random_point(8, 1);
        let p = PenaltyProblem::new(&ch, &cfg, 0.0);
        let ris = StarRisState::with_config(&cfg, x.psi_r.clone(), x.psi_r.clone()).unwrap();
        let m = evaluate_metrics(&ch, &ris, &cfg).unwrap();
        let f = penalty_objective(&p, &x);
        assert!((f - m.jam_gain).abs() <= 1e-12 * m.jam_gain);
    }

    #[test]
    fn naive_recomputation() {
        let cfg = ScenarioConfig { n_ris: 6, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let x = random_point(6, 2);
        let p = PenaltyProblem::new(&ch, &cfg, 3.0);
        let a = cfg.amp_r();
        let (k, n, nj) = (ch.n_users(), ch.n_tx(), ch.n_jam());
        let entry = |direct: &CMat, g: &CMat, i: usize, j: usize| {
            direct[(i, j)] + (0..6).map(|l| ch.f_c[(i, l)] * x.psi_r[l] * g[(l, j)] * a).sum::<C64>()
        };
        let mut jj = 0.0;
        let mut hh = 0.0;
        for i in 0..k {
            for j in 0..nj {
                jj += entry(&ch.j, &ch.g_j, i, j).norm_sqr();
            }
            for j in 0..n {
                hh += entry(&ch.h, &ch.g_b, i, j).norm_sqr();
            }
        }
        let want = jj + 3.0 * (cfg.g_th - hh);
        assert!((penalty_objective(&p, &x) - want).abs() <= 1e-12 * want.abs());
    }

    fn scalar_channels(f_c: f64, g_j: f64) -> ChannelSet {
        let cfg = ScenarioConfig { n_ris: 1, n_tx: 1, n_jam: 1, n_users: 1, ..Default::default() };
        let mut ch = generate_channels(&cfg).unwrap();
        ch.h = scalar(0.0);
        ch.j = scalar(0.0);
        ch.g_b = scalar(0.0);
        ch.f_c = scalar(f_c);
        ch.g_j = scalar(g_j);
        ch
    }

    #[test]
    fn zero_surface_link_has_zero_gradient() {
        let ch = scalar_channels(0.0, 1.0);
        let p = PenaltyProblem { ch: &ch, g_th: 1.0, lambda_r: 1.0, amp_r: 1.0, clip: false };
        let x = ManifoldPoint { psi_r: CVec::from_element(1, C64::new(1.0, 0.0)) };
        assert_eq!(euclidean_gradient(&p, &x).norm(), 0.0);
    }

    #[test]
    fn scalar_gradient_matches_wirtinger() {
        // f(ψ) = |ψ|², ∂f/∂conj(ψ) = ψ.
        let ch = scalar_channels(1.0, 1.0);
        let p = PenaltyProblem { ch: &ch, g_th: 0.0, lambda_r: 0.0, amp_r: 1.0, clip: false };
        let psi = C64::from_polar(1.0, 0.3);
        let x = ManifoldPoint { psi_r: CVec::from_element(1, psi) };
        let g = euclidean_gradient(&p, &x);
        assert!((g[0] - psi).norm() < 1e-15);
        // Euclidean central difference along a complex direction.
        let v = C64::new(0.4, -0.7);
        let h = 1e-6;
        let f = |z: C64| {
            let pt = ManifoldPoint { psi_r: CVec::from_element(1, z) };
            penalty_objective(&p, &pt)
        };
        let fd = (f(psi + v * h) - f(psi - v * h)) / (2.0 * h);
        let an = 2.0 * (g[0].conj() * v).re;
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-12));
    }

    #[test]
    fn directional_derivatives_match_finite_differences() {
        let cfg = ScenarioConfig { n_ris: 16, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PenaltyProblem::new(&ch, &cfg, 2.5);
        let x = random_point(16, 6);
        let g = euclidean_gradient(&p, &x);
        for _ in 0..20 {
            let v = random_tangent(&x, &mut rng);
            let fd = crate::selftest::richardson(|t| penalty_objective(&p, &retract(&x, &v, t)), 1e-3);
            let an = 2.0 * (g.dotc(&v)).re;
            assert!((fd - an).abs() <= 1e-6 * an.abs(), "{fd} vs {an}");
        }
    }

    #[test]
    fn projection_properties() {
        let x = random_point(10, 7);
        let radial = x.psi_r.map(|z| z * 2.5);
        assert!(riemannian_gradient(&x, &radial).norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = random_tangent(&x, &mut rng);
        assert!((riemannian_gradient(&x, &t) - &t).norm() < 1e-14);
        for l in 0..10 {
            assert!((x.psi_r[l].conj() * t[l]).re.abs() < 1e-12);
        }
    }

    #[test]
    fn retraction_is_second_order() {
        let x = random_point(12, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v = random_tangent(&x, &mut rng);
        assert_eq!(retract(&x, &v, 0.0), x);
        let err = |t: f64| (retract(&x, &v, t).psi_r - (&x.psi_r + &v * C64::new(t, 0.0))).norm();
        let ts: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let logs: Vec<(f64, f64)> = ts.iter().map(|&t| (t.ln(), err(t).ln())).collect();
        for w in logs.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
        }
        for t in [0.1, 3.0, -7.0] {
            let y = retract(&x, &v, t);
            assert!(y.psi_r.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-15));
        }
    }

    #[test]
    fn stationary_start_returns_immediately() {
        // F_c = 0: objective constant, gradient identically zero.
        let ch = scalar_channels(0.0, 1.0);
        let p = PenaltyProblem { ch: &ch, g_th: 1.0, lambda_r: 1.0, amp_r: 1.0, clip: false };
        let x0 = ManifoldPoint { psi_r: CVec::from_element(1, C64::from_polar(1.0, 1.0)) };
        let (x, rep) = pr_cg_solve(&p, x0.clone(), &CgOptions::default());
        assert_eq!(x, x0);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.termination, Termination::GradientTolerance);
    }

    #[test]
    fn cg_lowers_jamming_gain() {
        let cfg = ScenarioConfig { n_ris: 24, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let p = PenaltyProblem::new(&ch, &cfg, 0.0);
        let x0 = random_point(24, 11);
        let f0 = penalty_objective(&p, &x0);
        let mut last = f64::INFINITY;
        let (x, rep) = pr_cg_solve_observed(&p, x0, &CgOptions::default(), |s| {
            assert!(s.objective <= last * (1.0 + 1e-14));
            last = s.objective;
        });
        assert!(penalty_objective(&p, &x) < f0);
        assert!(rep.termination.is_success(), "{}", rep.termination);
    }

    #[test]
    fn vacuous_floor_needs_one_round() {
        let cfg = ScenarioConfig { n_ris: 8, g_th: 0.0, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let sol = solve_p2(&ch, &cfg, random_point(8, 12), &PenaltyOptions::default()).unwrap();
        assert_eq!(sol.rounds, 1);
        assert_eq!(sol.lambda_r, 1.0);
        assert!(sol.report.feasible);
    }

    #[test]
    fn trace_csv_header() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,objective,grad_norm,step,beta_pr,lambda_r\n");
    }
}
