use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{distance, ScenarioConfig, D0, PL0};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};

/// Line-of-sight parameters of a target link: path gain (amplitude),
/// elevation and azimuth in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosGeometry {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
}

/// `α·exp(jπ(cos β sin φ + sin β sin φ))`
pub fn los_channel(g: LosGeometry) -> C64 {
    let phase = PI * (g.beta.cos() * g.phi.sin() + g.beta.sin() * g.phi.sin());
    C64::from_polar(g.alpha, phase)
}

/// Linear power path loss `PL0 · (dist / d0)^(-exponent)`.
pub fn path_loss(dist: f64, exponent: f64) -> f64 {
    PL0 * (dist / D0).powf(-exponent)
}

/// All static channels of one realization.
///
/// Row vectors (`f_r`, `f_t`, `f_m`) are stored as length-L column vectors.
/// The transmitter→target direct path is blocked and has no field: it is
/// exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Transmitter→users, K×N.
    pub h: CMat,
    /// Jammer→users, K×N_j.
    pub j: CMat,
    /// STAR-RIS→users, K×L.
    pub f_c: CMat,
    /// Transmitter→STAR-RIS, L×N.
    pub g_b: CMat,
    /// Jammer→STAR-RIS, L×N_j.
    pub g_j: CMat,
    /// STAR-RIS→ISAC receiver.
    pub f_r: CVec,
    /// STAR-RIS→target.
    pub f_t: CVec,
    /// STAR-RIS→malicious detector.
    pub f_m: CVec,
    /// ISAC receiver↔malicious detector.
    pub h_rd: C64,
    /// Detector↔target.
    pub los_d: LosGeometry,
    /// ISAC receiver↔target.
    pub los_r: LosGeometry,
    /// Where the users were dropped for this realization.
    pub user_positions: Vec<[f64; 2]>,
}

impl ChannelSet {
    pub fn n_users(&self) -> usize {
        self.h.nrows()
    }
    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }
    pub fn n_jam(&self) -> usize {
        self.j.ncols()
    }
    pub fn n_ris(&self) -> usize {
        self.f_c.ncols()
    }

    /// LoS channel `d` between detector and target.
    pub fn d(&self) -> C64 {
        los_channel(self.los_d)
    }

    /// LoS channel `r` between ISAC receiver and target.
    pub fn r(&self) -> C64 {
        los_channel(self.los_r)
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (k, n, nj, l) = (self.n_users(), self.n_tx(), self.n_jam(), self.n_ris());
        let ok = self.j.nrows() == k
            && self.f_c.nrows() == k
            && self.g_b.shape() == (l, n)
            && self.g_j.shape() == (l, nj)
            && self.f_r.len() == l
            && self.f_t.len() == l
            && self.f_m.len() == l;
        if ok {
            Ok(())
        } else {
            Err(Error::dim(format!(
                "inconsistent channel set (K={k}, N={n}, N_j={nj}, L={l})"
            )))
        }
    }
}

/// Fading law for the entries of one link.
#[derive(Debug, Clone, Copy)]
pub struct LinkDraw {
    /// Linear power path loss.
    pub path_loss: f64,
    /// Rician factor; `None` draws Rayleigh entries.
    pub rician_k: Option<f64>,
}

impl LinkDraw {
    /// One channel coefficient; `los` is the unit-modulus deterministic
    /// component (ignored for Rayleigh links).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, los: C64) -> C64 {
        let scatter = complex_normal(rng);
        let amp = self.path_loss.sqrt();
        match self.rician_k {
            Some(k) => {
                let los_w = (k / (k + 1.0)).sqrt();
                let nlos_w = (1.0 / (k + 1.0)).sqrt();
                (los * los_w + scatter * nlos_w) * amp
            }
            None => scatter * amp,
        }
    }
}

/// Circularly-symmetric `CN(0, 1)` draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

// Each link draws from its own ChaCha stream so that changing one node (for
// instance the detector position) leaves every other link untouched.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    Users = 1,
    H = 2,
    J = 3,
    FC = 4,
    GB = 5,
    GJ = 6,
    FR = 7,
    FT = 8,
    FM = 9,
    HRD = 10,
}

fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Half-wavelength ULA response toward azimuth `phi`.
fn steering(n: usize, phi: f64) -> Vec<C64> {
    (0..n)
        .map(|i| C64::from_polar(1.0, PI * i as f64 * phi.sin()))
        .collect()
}

fn azimuth(from: [f64; 2], to: [f64; 2]) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0])
}

fn link_distance(a: (&str, [f64; 2]), b: (&str, [f64; 2])) -> Result<f64> {
    let d = distance(a.1, b.1);
    if d <= 1e-9 {
        Err(Error::DegenerateGeometry(a.0.to_string(), b.0.to_string()))
    } else {
        Ok(d)
    }
}

fn drop_users(cfg: &ScenarioConfig) -> Vec<[f64; 2]> {
    let mut rng = stream_rng(cfg.seed, Stream::Users);
    let c = cfg.geometry.users;
    let radius = cfg.geometry.user_radius;
    (0..cfg.n_users)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let r = radius * u.sqrt();
            let t = 2.0 * PI * v;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect()
}

/// Synthesizes one channel realization. Pure in `cfg` (including the seed).
pub fn generate_channels(cfg: &ScenarioConfig) -> Result<ChannelSet> {
    cfg.validate()?;
    let g = &cfg.geometry;
    let ple = cfg.path_loss_exponents;
    let (k, n, nj, l) = (cfg.n_users, cfg.n_tx, cfg.n_jam, cfg.n_ris);
    let rician = Some(cfg.rician_k);

    let tx = ("transmitter", g.transmitter);
    let jam = ("jammer", g.jammer);
    let ris = ("star_ris", g.star_ris);
    let target = ("target", g.target);
    let rx = ("isac_receiver", g.isac_receiver);
    let det = ("malicious_detector", g.malicious_detector);

    let users = drop_users(cfg);

    // Direct Rayleigh links toward the users, one row per user.
    let direct_rows = |src: (&str, [f64; 2]), cols: usize, stream: Stream| -> Result<CMat> {
        let mut rng = stream_rng(cfg.seed, stream);
        let mut out = CMat::zeros(k, cols);
        let mut pls = Vec::with_capacity(k);
        for u in &users {
            pls.push(path_loss(link_distance(src, ("user", *u))?, ple.direct));
        }
        for c in 0..cols {
            for (r, pl) in pls.iter().enumerate() {
                let draw = LinkDraw { path_loss: *pl, rician_k: None };
                out[(r, c)] = draw.sample(&mut rng, C64::new(1.0, 0.0));
            }
        }
        Ok(out)
    };
    let h = direct_rows(tx, n, Stream::H)?;
    let j = direct_rows(jam, nj, Stream::J)?;

    // STAR-RIS → users.
    let f_c = {
        let mut rng = stream_rng(cfg.seed, Stream::FC);
        let mut rows = Vec::with_capacity(k);
        for u in &users {
            let pl = path_loss(link_distance(ris, ("user", *u))?, ple.ris);
            rows.push((pl, steering(l, azimuth(g.star_ris, *u))));
        }
        let mut out = CMat::zeros(k, l);
        for c in 0..l {
            for (r, (pl, a)) in rows.iter().enumerate() {
                let draw = LinkDraw { path_loss: *pl, rician_k: rician };
                out[(r, c)] = draw.sample(&mut rng, a[c].conj());
            }
        }
        out
    };

    // Array → STAR-RIS links (L × cols).
    let to_ris = |src: (&str, [f64; 2]), cols: usize, stream: Stream| -> Result<CMat> {
        let pl = path_loss(link_distance(src, ris)?, ple.ris);
        let a_ris = steering(l, azimuth(g.star_ris, src.1));
        let a_src = steering(cols, azimuth(src.1, g.star_ris));
        let draw = LinkDraw { path_loss: pl, rician_k: rician };
        let mut rng = stream_rng(cfg.seed, stream);
        let mut out = CMat::zeros(l, cols);
        for c in 0..cols {
            for r in 0..l {
                out[(r, c)] = draw.sample(&mut rng, a_ris[r] * a_src[c].conj());
            }
        }
        Ok(out)
    };
    let g_b = to_ris(tx, n, Stream::GB)?;
    let g_j = to_ris(jam, nj, Stream::GJ)?;

    // STAR-RIS → single-antenna node.
    let from_ris = |dst: (&str, [f64; 2]), stream: Stream| -> Result<CVec> {
        let pl = path_loss(link_distance(ris, dst)?, ple.ris);
        let a = steering(l, azimuth(g.star_ris, dst.1));
        let draw = LinkDraw { path_loss: pl, rician_k: rician };
        let mut rng = stream_rng(cfg.seed, stream);
        Ok(CVec::from_iterator(l, a.iter().map(|x| draw.sample(&mut rng, x.conj()))))
    };
    let f_r = from_ris(rx, Stream::FR)?;
    let f_t = from_ris(target, Stream::FT)?;
    let f_m = from_ris(det, Stream::FM)?;

    let h_rd = {
        let pl = path_loss(link_distance(rx, det)?, ple.direct);
        let mut rng = stream_rng(cfg.seed, Stream::HRD);
        LinkDraw { path_loss: pl, rician_k: None }.sample(&mut rng, C64::new(1.0, 0.0))
    };

    let los_to_target = |node: (&str, [f64; 2])| -> Result<LosGeometry> {
        let dist = link_distance(node, target)?;
        Ok(LosGeometry {
            alpha: path_loss(dist, ple.los).sqrt(),
            beta: 0.0,
            phi: azimuth(g.target, node.1),
        })
    };
    let los_d = los_to_target(det)?;
    let los_r = los_to_target(rx)?;

    let set = ChannelSet { h, j, f_c, g_b, g_j, f_r, f_t, f_m, h_rd, los_d, los_r, user_positions: users };
    set.check_shapes()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn los_channel_examples() {
        let z = los_channel(LosGeometry { alpha: 1.0, beta: 0.0, phi: 0.0 });
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-15);

        let z = los_channel(LosGeometry { alpha: 2.0, beta: 0.0, phi: FRAC_PI_2 });
        assert!((z - C64::new(-2.0, 0.0)).norm() < 1e-12);

        let g = LosGeometry { alpha: 0.5, beta: FRAC_PI_4, phi: FRAC_PI_6 };
        let z = los_channel(g);
        // Hand evaluation: phase = π (cos π/4 + sin π/4) sin π/6 = π·√2·½.
        let phase = PI * (2f64.sqrt() / 2.0 + 2f64.sqrt() / 2.0) * 0.5;
        assert!((z.norm() - 0.5).abs() < 1e-15);
        assert!((z - C64::from_polar(0.5, phase)).norm() < 1e-14);
    }

    #[test]
    fn same_seed_same_channels() {
        let cfg = ScenarioConfig::default();
        assert_eq!(generate_channels(&cfg).unwrap(), generate_channels(&cfg).unwrap());
        let other = ScenarioConfig { seed: 1, ..cfg.clone() };
        assert_ne!(generate_channels(&cfg).unwrap().h, generate_channels(&other).unwrap().h);
    }

    #[test]
    fn shapes_follow_config() {
        let cfg = ScenarioConfig { n_users: 4, n_tx: 16, n_ris: 48, n_jam: 4, ..Default::default() };
        let ch = generate_channels(&cfg).unwrap();
        assert_eq!(ch.h.shape(), (4, 16));
        assert_eq!(ch.g_b.shape(), (48, 16));
        assert_eq!(ch.j.shape(), (4, 4));
        assert_eq!(ch.f_c.shape(), (4, 48));
        assert_eq!(ch.g_j.shape(), (48, 4));
        assert_eq!(ch.f_m.len(), 48);
    }

    #[test]
    fn unit_distance_entry_power_matches_reference_loss() {
        // Monte-Carlo estimate of E|h|² at d0 with exponent 2; both fading laws
        // have unit normalized power.
        let pl = path_loss(1.0, 2.0);
        assert!((pl - 1e-3).abs() < 1e-18);
        for rician_k in [None, Some(2.0)] {
            let draw = LinkDraw { path_loss: pl, rician_k };
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let n = 100_000;
            let mean: f64 = (0..n)
                .map(|i| draw.sample(&mut rng, C64::from_polar(1.0, i as f64)).norm_sqr())
                .sum::<f64>()
                / n as f64;
            assert!((mean / 1e-3 - 1.0).abs() < 0.02, "mean power {mean}");
        }
    }

    #[test]
    fn coincident_nodes_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.geometry.isac_receiver = cfg.geometry.malicious_detector;
        assert!(matches!(generate_channels(&cfg), Err(Error::DegenerateGeometry(..))));
    }

    #[test]
    fn detector_move_leaves_other_links_untouched() {
        let cfg = ScenarioConfig::default();
        let mut moved = cfg.clone();
        moved.geometry.set_detector_distance(45.0);
        let a = generate_channels(&cfg).unwrap();
        let b = generate_channels(&moved).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.j, b.j);
        assert_eq!(a.g_j, b.g_j);
        assert_eq!(a.f_c, b.f_c);
        assert_ne!(a.f_m, b.f_m);
    }

    #[test]
    fn jammer_columns_nest_across_antenna_counts() {
        let small = ScenarioConfig { n_jam: 2, ..Default::default() };
        let big = ScenarioConfig { n_jam: 6, ..Default::default() };
        let a = generate_channels(&small).unwrap();
        let b = generate_channels(&big).unwrap();
        assert_eq!(a.j, b.j.columns(0, 2).into_owned());
    }
}
