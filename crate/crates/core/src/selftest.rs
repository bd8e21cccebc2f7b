//! Runtime oracle checks behind the `selftest` command. Each check compares
//! a solver against an independent computation on a small seeded instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel_model::{detection_probability, effective_sense_channels, random_phases, StarRisState};
use crate::concealment::{build_problem, dinkelbach_solve, gaussian_randomization, DinkelbachOptions};
use crate::harness::{run_sweep, write_csv, Method, SweepSpec, SweepVariable};
use crate::jamming::{euclidean_gradient, penalty_objective, retract, riemannian_gradient, ManifoldPoint, PenaltyProblem};
use crate::linalg::{min_eigenvalue, CMat, CVec, C64};
use crate::scenario::{complex_normal, generate_channels, ScenarioConfig};
use crate::sdp::{solve_sdp, ConstraintMatrix, SdpProblem, SdpStatus, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn detection_model() -> Check {
    let one = detection_probability(1.0).unwrap_or(f64::NAN);
    let tiny = detection_probability(1e-12).unwrap_or(f64::NAN);
    let grid: Vec<f64> = (0..1000).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 999.0)).collect();
    let vals: Vec<f64> = grid.iter().map(|&g| detection_probability(g).unwrap_or(f64::NAN)).collect();
    let monotone = vals.windows(2).all(|w| w[1] > w[0]);
    let ok = (one - 0.5).abs() < 1e-15 && (tiny - (-1f64).exp()).abs() < 1e-9 && monotone;
    check("detection_probability", ok, format!("P(1) = {one}, P(1e-12) = {tiny:.12}, monotone = {monotone}"))
}

fn sdp_min_eigenvalue() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 6;
    let a = CMat::from_fn(n, n, |_, _| complex_normal(&mut rng));
    let c = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut p = SdpProblem::new(c.clone());
    p.constrain(ConstraintMatrix::Dense(CMat::identity(n, n)), Sense::Eq, 1.0);
    match solve_sdp(&p, 1e-9) {
        Ok(sol) => {
            let want = min_eigenvalue(&c);
            let err = (sol.objective_value - want).abs();
            check("sdp_min_eigenvalue", sol.status == SdpStatus::Optimal && err <= 1e-7, format!("error {err:.2e}"))
        }
        Err(e) => check("sdp_min_eigenvalue", false, e.to_string()),
    }
}

/// Central difference at 0 with one Richardson step, error `O(h⁴)`. The
/// penalty objective carries a large constant offset from the direct links,
/// so small steps lose digits to cancellation.
pub fn richardson<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn gradient_fd() -> Check {
    let cfg = ScenarioConfig { n_ris: 16, seed: 21, ..Default::default() };
    let Ok(ch) = generate_channels(&cfg) else { return check("gradient_finite_difference", false, "channels".into()) };
    let p = PenaltyProblem::new(&ch, &cfg, 1.7);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let x = ManifoldPoint { psi_r: random_phases(16, &mut rng) };
    let g = euclidean_gradient(&p, &x);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let v = riemannian_gradient(&x, &CVec::from_fn(16, |_, _| complex_normal(&mut rng)));
        let fd = richardson(|t| penalty_objective(&p, &retract(&x, &v, t)), 1e-3);
        let an = 2.0 * g.dotc(&v).re;
        worst = worst.max((fd - an).abs() / an.abs());
    }
    check("gradient_finite_difference", worst <= 1e-6, format!("worst relative error {worst:.2e}"))
}

fn quadratic_forms() -> Check {
    let cfg = ScenarioConfig { n_ris: 10, seed: 31, ..Default::default() };
    let (Ok(ch), mut rng) = (generate_channels(&cfg), ChaCha8Rng::seed_from_u64(32)) else {
        return check("quadratic_forms", false, "channels".into());
    };
    let Ok(p) = build_problem(&ch, &cfg) else { return check("quadratic_forms", false, "build".into()) };
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let psi = random_phases(10, &mut rng);
        let Ok(ris) = StarRisState::with_config(&cfg, psi.clone(), psi.clone()) else { continue };
        let Ok((_, _, h_s, _)) = effective_sense_channels(&ch, &ris) else { continue };
        let want = h_s.norm_squared();
        worst = worst.max((p.traces_of_vector(&psi).s - want).abs() / want);
    }
    check("quadratic_forms", worst <= 1e-10, format!("worst relative error {worst:.2e}"))
}

fn dinkelbach() -> Check {
    let cfg = ScenarioConfig { n_ris: 8, seed: 41, ..Default::default() };
    let Ok(ch) = generate_channels(&cfg) else { return check("dinkelbach", false, "channels".into()) };
    let Ok(p) = build_problem(&ch, &cfg) else { return check("dinkelbach", false, "build".into()) };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    match dinkelbach_solve(&p, &DinkelbachOptions::default(), &mut rng) {
        Ok((y, st)) => {
            let monotone = st.trace.windows(2).all(|w| w[1].lambda <= w[0].lambda);
            let sol = gaussian_randomization(&y, &p, 200, st.lower_bound, &mut rng);
            let ordered = sol.as_ref().map(|s| s.relaxed_bound <= s.gamma_sd + 1e-8).unwrap_or(false);
            let ok = monotone && ordered && st.f_relative.abs() <= 1e-6;
            check(
                "dinkelbach",
                ok,
                format!("{} iterations, |F| = {:.1e}, monotone = {monotone}, bound ordered = {ordered}", st.iteration, st.f_relative.abs()),
            )
        }
        Err(e) => check("dinkelbach", false, e.to_string()),
    }
}

fn determinism() -> Check {
    let spec = SweepSpec {
        variable: SweepVariable::NJam,
        values: vec![2.0, 4.0],
        n_trials: 2,
        methods: Method::ALL.to_vec(),
        base: ScenarioConfig { n_ris: 8, ..Default::default() },
        seed_base: 51,
        record_timing: false,
    };
    let render = || -> Option<Vec<u8>> {
        let r = run_sweep(&spec).ok()?;
        let mut buf = Vec::new();
        write_csv(&mut buf, &r).ok()?;
        Some(buf)
    };
    let (a, b) = (render(), render());
    let ok = a.is_some() && a == b;
    check("sweep_determinism", ok, format!("{} bytes", a.map(|v| v.len()).unwrap_or(0)))
}

pub fn run_all() -> Vec<Check> {
    vec![detection_model(), sdp_min_eigenvalue(), gradient_fd(), quadratic_forms(), dinkelbach(), determinism()]
}
