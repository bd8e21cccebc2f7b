//! Cross-checks of the two solvers against independently formulated oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starris::channel_model::{evaluate_metrics, random_phases, StarRisState};
use starris::concealment::{
    build_problem, dinkelbach_solve, gaussian_randomization, parametric_sdp, ConcealmentProblem, DinkelbachOptions,
};
use starris::jamming::{gains, pr_cg_solve, solve_p2, CgOptions, ManifoldPoint, PenaltyOptions, PenaltyProblem};
use starris::linalg::{CMat, CVec, C64};
use starris::report::Termination;
use starris::scenario::{generate_channels, ChannelSet, ScenarioConfig};
use starris::sdp::{solve_sdp, ConstraintMatrix, SdpProblem, SdpStatus, Sense};

fn setup(l: usize, seed: u64) -> (ScenarioConfig, ChannelSet) {
    let cfg = ScenarioConfig { n_ris: l, seed, ..Default::default() };
    let ch = generate_channels(&cfg).unwrap();
    (cfg, ch)
}

fn block_diag(a: &CMat, corner: f64) -> CMat {
    let n = a.nrows();
    let mut m = CMat::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m[(n, n)] = C64::new(corner, 0.0);
    m
}

/// The relaxed ratio minimum as one homogenized SDP: substitute `Z = tY`
/// with `D(Z, t) = 1`, so `min N/D` becomes linear. The scalar `t` rides in
/// the last diagonal entry of an `(L+1)`-dimensional variable.
fn charnes_cooper(p: &ConcealmentProblem) -> f64 {
    let l = p.len();
    let mut sdp = SdpProblem::new(block_diag(
        &(&p.q_s * C64::new(p.zeta_sq * p.p_s * p.d_sq, 0.0)),
        p.zeta_sq * p.p_d * p.d_sq * p.d_sq,
    ));
    sdp.constrain(ConstraintMatrix::Dense(block_diag(&(&p.q_m * C64::new(p.p_c, 0.0)), p.sigma_d_sq)), Sense::Eq, 1.0);
    let (a, b) = p.sensing_row();
    sdp.constrain(ConstraintMatrix::Dense(block_diag(&a, -b)), Sense::Ge, 0.0);
    for i in 0..l {
        sdp.constrain(ConstraintMatrix::Sparse(vec![(i, i, C64::new(1.0, 0.0)), (l, l, C64::new(-1.0, 0.0))]), Sense::Eq, 0.0);
    }
    let sol = solve_sdp(&sdp, 1e-10).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    sol.objective_value
}

#[test]
fn dinkelbach_matches_homogenized_relaxation() {
    for seed in 0..6 {
        let (cfg, ch) = setup(6, 100 + seed);
        let p = build_problem(&ch, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, st) = dinkelbach_solve(&p, &DinkelbachOptions::default(), &mut rng).unwrap();
        let oracle = charnes_cooper(&p);
        let rel = (st.lambda_s - oracle).abs() / oracle;
        assert!(rel <= 1e-5, "seed {seed}: dinkelbach {} vs oracle {oracle} (rel {rel:.2e})", st.lambda_s);
        assert!(st.lower_bound <= oracle * (1.0 + 1e-6));
    }
}

#[test]
fn constant_ratio_converges_immediately() {
    let (mut cfg, mut ch) = setup(5, 7);
    let kappa = 0.7;
    ch.f_m = &ch.f_t * C64::new(kappa, 0.0);
    // Match the constant terms so N = c·D for every Y.
    let d2 = ch.d().norm_sqr();
    cfg.sigma_d_sq = cfg.p_d * d2 * cfg.p_c * kappa * kappa / cfg.p_s;
    cfg.gamma_min = 1e-15;
    let c = cfg.zeta_sq * cfg.p_s * d2 / (cfg.p_c * kappa * kappa);
    let p = build_problem(&ch, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (_, st) = dinkelbach_solve(&p, &DinkelbachOptions::default(), &mut rng).unwrap();
    assert!(st.iteration <= 2, "{} iterations", st.iteration);
    assert!((st.lambda_s - c).abs() <= 1e-9 * c, "{} vs {c}", st.lambda_s);
}

#[test]
fn relaxation_lower_bounds_phase_grid() {
    let levels = 64;
    let grid: Vec<C64> =
        (0..levels).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / levels as f64)).collect();
    for seed in 0..10 {
        let (cfg, ch) = setup(2, 200 + seed);
        let p = build_problem(&ch, &cfg).unwrap();
        let mut best = f64::INFINITY;
        for &a in &grid {
            for &b in &grid {
                let t = p.traces_of_vector(&CVec::from_vec(vec![a, b]));
                if p.sensing_slack(t) >= 0.0 {
                    best = best.min(p.gamma_sd(t));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, st) = dinkelbach_solve(&p, &DinkelbachOptions::default(), &mut rng).unwrap();
        assert!(st.lambda_s <= best + 1e-6 * best.abs().max(1e-12), "seed {seed}: {} > grid {best}", st.lambda_s);
    }
}

#[test]
fn rank_one_relaxation_is_recovered() {
    let (cfg, ch) = setup(8, 9);
    let p = build_problem(&ch, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_phases(8, &mut rng);
    let y = &psi * psi.adjoint();
    let ratio = p.gamma_sd(p.traces_of_vector(&psi));
    let sol = gaussian_randomization(&y, &p, 50, ratio, &mut rng).unwrap();
    let phase = sol.psi_t[0] / psi[0];
    assert!((sol.psi_t.clone() - &psi * phase).norm() <= 1e-10);
    assert!((sol.gamma_sd - ratio).abs() <= 1e-8 * ratio);
}

#[test]
fn sensing_row_reproduces_isac_sinr() {
    let (cfg, ch) = setup(6, 11);
    let p = build_problem(&ch, &cfg).unwrap();
    let (a, b) = p.sensing_row();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let psi_t = random_phases(6, &mut rng);
        let psi_r = random_phases(6, &mut rng);
        let state = StarRisState::with_config(&cfg, psi_t.clone(), psi_r).unwrap();
        let gamma_sr = evaluate_metrics(&ch, &state, &cfg).unwrap().gamma_sr;
        let y = &psi_t * psi_t.adjoint();
        let lhs = ConstraintMatrix::Dense(a.clone()).inner(&y) - b;
        // Tr(AY) − b = (γ_sr − γ_min) · (σ_d² + p_d|h_rd|² + p_j‖h_rj‖²)
        let t = p.traces_of_vector(&psi_t);
        let denom = p.sigma_d_sq + p.p_d * p.h_rd_sq + p.p_j * t.r;
        let want = (gamma_sr - p.gamma_min) * denom;
        assert!((lhs - want).abs() <= 1e-9 * want.abs().max(b.abs()), "{lhs} vs {want}");
        assert_eq!(lhs >= 0.0, gamma_sr >= p.gamma_min);
    }
    let sdp = parametric_sdp(&p, 0.0);
    assert_eq!(sdp.constraints.len(), 7);
}

/// `‖H_eff‖_F ≤ ‖H‖_F + amp·Σ_l ‖F_c[:,l]‖·‖G_b[l,:]‖` for any phases.
fn gain_ceiling(ch: &ChannelSet, amp: f64) -> f64 {
    let s: f64 = (0..ch.n_ris()).map(|l| ch.f_c.column(l).norm() * ch.g_b.row(l).norm()).sum();
    (ch.h.norm() + amp * s).powi(2)
}

#[test]
fn penalty_loop_feasibility_cases() {
    let (mut cfg, ch) = setup(12, 13);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x0 = ManifoldPoint { psi_r: random_phases(12, &mut rng) };

    cfg.g_th = 0.0;
    let free = solve_p2(&ch, &cfg, x0.clone(), &PenaltyOptions::default()).unwrap();
    assert_eq!((free.rounds, free.lambda_r), (1, 1.0));
    assert!(free.report.feasible);

    let (_, h_gain) = gains(&ch, &free.point, cfg.amp_r()).unwrap();
    cfg.g_th = 0.5 * h_gain;
    let half = solve_p2(&ch, &cfg, x0.clone(), &PenaltyOptions::default()).unwrap();
    assert_eq!(half.rounds, 1);
    assert!(half.report.feasible);

    cfg.g_th = 1.01 * gain_ceiling(&ch, cfg.amp_r());
    let capped = solve_p2(&ch, &cfg, x0, &PenaltyOptions::default()).unwrap();
    assert_eq!(capped.report.termination, Termination::InfeasibleAfterPenaltyCap);
    assert!(!capped.report.feasible);
    assert_eq!(capped.rounds, PenaltyOptions::default().max_rounds);
}

#[test]
fn cg_lowers_jamming_from_random_start() {
    let mut wins = 0;
    for seed in 0..100 {
        let (cfg, ch) = setup(48, 500 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = ManifoldPoint { psi_r: random_phases(48, &mut rng) };
        let p = PenaltyProblem::new(&ch, &cfg, 1.0);
        let (x, _) = pr_cg_solve(&p, x0.clone(), &CgOptions::default());
        let before = gains(&ch, &x0, cfg.amp_r()).unwrap().0;
        let after = gains(&ch, &x, cfg.amp_r()).unwrap().0;
        wins += usize::from(after < before);
    }
    assert!(wins >= 99, "{wins}/100");
}

#[test]
fn random_lambda_start_still_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for seed in 0..10 {
        let (cfg, ch) = setup(rng.random_range(3..10), 900 + seed);
        let p = build_problem(&ch, &cfg).unwrap();
        let (_, st) = dinkelbach_solve(&p, &DinkelbachOptions::default(), &mut rng).unwrap();
        assert!(st.trace.windows(2).all(|w| w[1].lambda <= w[0].lambda), "seed {seed}");
        assert!(st.lower_bound <= st.lambda_s);
    }
}
