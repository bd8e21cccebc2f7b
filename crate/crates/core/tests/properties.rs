use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use starris::channel_model::{detection_probability, random_phases};
use starris::concealment::{build_problem, solve_concealment, ConcealmentOptions};
use starris::harness::{read_csv, write_csv, Method, SweepResult, SweepRow};
use starris::jamming::{retract, riemannian_gradient, ManifoldPoint};
use starris::linalg::{CVec, C64};
use starris::scenario::{db_to_linear, generate_channels, linear_to_db, ScenarioConfig};

fn complex_vec(len: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), len)
        .prop_map(|v| CVec::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn point_and_vec(max_len: usize) -> impl Strategy<Value = (CVec, CVec)> {
    (1..=max_len).prop_flat_map(|l| {
        (prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, l), complex_vec(l)).prop_map(|(ph, v)| {
            (CVec::from_iterator(ph.len(), ph.iter().map(|&t| C64::from_polar(1.0, t))), v)
        })
    })
}

proptest! {
    #[test]
    fn retraction_stays_on_circle((psi, v) in point_and_vec(24), t in -100.0..100.0f64) {
        let x = ManifoldPoint { psi_r: psi };
        let y = retract(&x, &v, t);
        for z in y.psi_r.iter() {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn projection_is_tangent_and_idempotent((psi, g) in point_and_vec(24)) {
        let x = ManifoldPoint { psi_r: psi.clone() };
        let r = riemannian_gradient(&x, &g);
        for (p, z) in psi.iter().zip(r.iter()) {
            prop_assert!((p.conj() * z).re.abs() <= 1e-12 * g.norm().max(1.0));
        }
        let rr = riemannian_gradient(&x, &r);
        prop_assert!((rr - &r).norm() <= 1e-12 * r.norm().max(1.0));
    }

    #[test]
    fn radial_gradient_projects_to_zero((psi, _) in point_and_vec(16), c in -5.0..5.0f64) {
        let x = ManifoldPoint { psi_r: psi.clone() };
        let r = riemannian_gradient(&x, &(&psi * C64::new(c, 0.0)));
        prop_assert!(r.norm() <= 1e-12);
    }

    #[test]
    fn detection_probability_is_monotone(a in 0.0..1e6f64, b in 0.0..1e6f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (pl, ph) = (detection_probability(lo).unwrap(), detection_probability(hi).unwrap());
        prop_assert!(pl <= ph);
        prop_assert!(((-1f64).exp() - 1e-15..=1.0).contains(&pl));
    }

    #[test]
    fn decibel_round_trip(x in 1e-30..1e30f64) {
        prop_assert!((db_to_linear(linear_to_db(x)) / x - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn csv_round_trips_rows(
        vals in prop::collection::vec((any::<f64>(), 0usize..1000, any::<bool>(), 0usize..3), 1..20)
    ) {
        let rows: Vec<SweepRow> = vals.iter().map(|&(v, trial, flag, m)| SweepRow {
            method: Method::ALL[m],
            sweep_value: v,
            trial,
            jam_gain_db: v,
            malicious_sinr_db: -v,
            comm_gain_db: v * 0.5,
            sum_rate: v.abs(),
            p_det_malicious: 0.25,
            p_det_isac: 0.75,
            feasible_flag: flag,
            wall_time_ms: 0.0,
        }).collect();
        let res = SweepResult { rows: rows.clone(), partial: false };
        let mut buf = Vec::new();
        write_csv(&mut buf, &res).unwrap();
        let back = read_csv(&buf[..]).unwrap();
        prop_assert_eq!(back.rows.len(), rows.len());
        for (a, b) in rows.iter().zip(&back.rows) {
            prop_assert_eq!(a.method, b.method);
            prop_assert_eq!(a.trial, b.trial);
            prop_assert_eq!(a.feasible_flag, b.feasible_flag);
            prop_assert!(a.jam_gain_db.to_bits() == b.jam_gain_db.to_bits() || (a.jam_gain_db.is_nan() && b.jam_gain_db.is_nan()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn concealment_invariants(seed in 0u64..10_000, l in 2usize..10, phi in prop::collection::vec(0.0..6.3f64, 10)) {
        let cfg = ScenarioConfig { n_ris: l, seed, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        let p = build_problem(&ch, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sol, _) = solve_concealment(&ch, &cfg, &ConcealmentOptions::default(), &mut rng).unwrap();
        for z in sol.psi_t.iter() {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-12);
        }
        prop_assert!(sol.relaxed_bound <= sol.gamma_sd + 1e-8);
        if sol.report.feasible {
            prop_assert!(sol.gamma_sr >= p.gamma_min * (1.0 - 1e-6));
        }
        let base = p.traces_of_vector(&sol.psi_t);
        for &ph in &phi {
            let t = p.traces_of_vector(&(&sol.psi_t * C64::from_polar(1.0, ph)));
            prop_assert!((p.gamma_sd(t) / p.gamma_sd(base) - 1.0).abs() <= 1e-10);
            prop_assert!((p.gamma_sr(t) / p.gamma_sr(base) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn random_phases_are_unit_modulus(seed in any::<u64>(), l in 1usize..200) {
        let v = random_phases(l, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(v.len(), l);
        for z in v.iter() {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-15);
        }
    }
}
