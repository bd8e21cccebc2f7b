//! Scenario configuration, node geometry and seeded channel synthesis.

mod channels;
mod config_file;

pub use channels::complex_normal;
pub use channels::{generate_channels, los_channel, path_loss, ChannelSet, LinkDraw, LosGeometry};
pub use config_file::{parse_config, parse_power, read_config, set_value};

use crate::error::{Error, Result};

/// Reference path loss at 1 m, linear (-30 dB).
pub const PL0: f64 = 1e-3;
/// Reference distance in meters.
pub const D0: f64 = 1.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// 2-D node placement in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub transmitter: [f64; 2],
    pub jammer: [f64; 2],
    /// Center of the disc the users are dropped in.
    pub users: [f64; 2],
    pub user_radius: f64,
    pub star_ris: [f64; 2],
    pub target: [f64; 2],
    pub isac_receiver: [f64; 2],
    pub malicious_detector: [f64; 2],
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            transmitter: [0.0, 0.0],
            jammer: [40.0, -20.0],
            users: [60.0, 0.0],
            user_radius: 10.0,
            star_ris: [50.0, 10.0],
            target: [70.0, 20.0],
            isac_receiver: [75.0, 15.0],
            malicious_detector: [90.0, 20.0],
        }
    }
}

impl Geometry {
    pub const NODE_NAMES: [&'static str; 7] = [
        "transmitter",
        "jammer",
        "users",
        "star_ris",
        "target",
        "isac_receiver",
        "malicious_detector",
    ];

    pub fn node(&self, name: &str) -> Option<[f64; 2]> {
        Some(match name {
            "transmitter" => self.transmitter,
            "jammer" => self.jammer,
            "users" => self.users,
            "star_ris" => self.star_ris,
            "target" => self.target,
            "isac_receiver" => self.isac_receiver,
            "malicious_detector" => self.malicious_detector,
            _ => return None,
        })
    }

    pub fn node_mut(&mut self, name: &str) -> Option<&mut [f64; 2]> {
        Some(match name {
            "transmitter" => &mut self.transmitter,
            "jammer" => &mut self.jammer,
            "users" => &mut self.users,
            "star_ris" => &mut self.star_ris,
            "target" => &mut self.target,
            "isac_receiver" => &mut self.isac_receiver,
            "malicious_detector" => &mut self.malicious_detector,
            _ => return None,
        })
    }

    pub fn detector_distance(&self) -> f64 {
        distance(self.target, self.malicious_detector)
    }

    /// Moves the malicious detector along the target→detector axis so that it
    /// sits `dist` meters from the target. A detector placed on the target
    /// falls back to the +x axis.
    pub fn set_detector_distance(&mut self, dist: f64) {
        let dx = self.malicious_detector[0] - self.target[0];
        let dy = self.malicious_detector[1] - self.target[1];
        let norm = dx.hypot(dy);
        let (ux, uy) = if norm > 0.0 { (dx / norm, dy / norm) } else { (1.0, 0.0) };
        self.malicious_detector = [self.target[0] + dist * ux, self.target[1] + dist * uy];
    }
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Path-loss exponents per link class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossExponents {
    /// Rayleigh links that bypass the surface (tx→users, jammer→users, receiver↔detector).
    pub direct: f64,
    /// Rician links with one end on the STAR-RIS.
    pub ris: f64,
    /// Line-of-sight target links (detector↔target, receiver↔target).
    pub los: f64,
}

impl Default for PathLossExponents {
    fn default() -> Self {
        Self { direct: 3.5, ris: 2.2, los: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// ISAC transmitter antennas.
    pub n_tx: usize,
    /// Jammer antennas.
    pub n_jam: usize,
    /// Downlink users.
    pub n_users: usize,
    /// STAR-RIS elements.
    pub n_ris: usize,
    /// Communication transmit power, W.
    pub p_c: f64,
    /// Probing power, W.
    pub p_s: f64,
    /// Jamming power, W.
    pub p_j: f64,
    /// Malicious detector probing power, W.
    pub p_d: f64,
    /// Noise variance at the users, W.
    pub sigma_n_sq: f64,
    /// Noise variance at both sensing receivers, W.
    pub sigma_d_sq: f64,
    /// Second moment of the target RCS.
    pub zeta_sq: f64,
    /// Communication gain floor on `‖H_eff‖²_F`.
    pub g_th: f64,
    /// Sensing SINR floor at the ISAC receiver.
    pub gamma_min: f64,
    /// Weights of the joint objective. Carried for completeness: after the
    /// problem separates into its two subspaces neither solver reads them.
    pub w1: f64,
    pub w2: f64,
    /// Energy-splitting power fractions; amplitudes are their square roots.
    pub beta_t: f64,
    pub beta_r: f64,
    pub geometry: Geometry,
    pub path_loss_exponents: PathLossExponents,
    /// Rician factor (linear) of the RIS-adjacent links.
    pub rician_k: f64,
    pub seed: u64,
    /// Use `p_c` instead of `p_s` for the probing-path term of the
    /// concealment subproblem.
    pub p12_uses_pc: bool,
    /// Clip the gain-floor penalty at zero (exact penalty) instead of
    /// rewarding over-satisfaction.
    pub clip_penalty: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_tx: 16,
            n_jam: 4,
            n_users: 4,
            n_ris: 32,
            p_c: db_to_linear(6.0),
            p_s: db_to_linear(8.0),
            p_j: dbm_to_watts(30.0),
            p_d: dbm_to_watts(30.0),
            sigma_n_sq: dbm_to_watts(-120.0),
            sigma_d_sq: dbm_to_watts(-60.0),
            zeta_sq: 1.0,
            g_th: 1e-8,
            gamma_min: db_to_linear(-40.0),
            w1: 1.0,
            w2: 1.0,
            beta_t: 0.5,
            beta_r: 0.5,
            geometry: Geometry::default(),
            path_loss_exponents: PathLossExponents::default(),
            rician_k: db_to_linear(3.0),
            seed: 0,
            p12_uses_pc: false,
            clip_penalty: false,
        }
    }
}

impl ScenarioConfig {
    pub fn amp_t(&self) -> f64 {
        self.beta_t.sqrt()
    }

    pub fn amp_r(&self) -> f64 {
        self.beta_r.sqrt()
    }

    /// Power used on the probing-path term of the concealment subproblem.
    pub fn probing_power(&self) -> f64 {
        if self.p12_uses_pc {
            self.p_c
        } else {
            self.p_s
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_tx", self.n_tx),
            ("n_jam", self.n_jam),
            ("n_users", self.n_users),
            ("n_ris", self.n_ris),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        let positive = [
            ("p_c", self.p_c),
            ("p_s", self.p_s),
            ("p_j", self.p_j),
            ("p_d", self.p_d),
            ("sigma_n_sq", self.sigma_n_sq),
            ("sigma_d_sq", self.sigma_d_sq),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let non_negative = [
            ("zeta_sq", self.zeta_sq),
            ("g_th", self.g_th),
            ("w1", self.w1),
            ("w2", self.w2),
            ("rician_k", self.rician_k),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.gamma_min > 0.0 && self.gamma_min.is_finite()) {
            return Err(Error::Config(format!("gamma_min must be positive, got {}", self.gamma_min)));
        }
        for (name, b) in [("beta_t", self.beta_t), ("beta_r", self.beta_r)] {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {b}")));
            }
        }
        if self.beta_t + self.beta_r > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "beta_t + beta_r = {} exceeds 1 (energy splitting must be passive)",
                self.beta_t + self.beta_r
            )));
        }
        for name in Geometry::NODE_NAMES {
            let p = self.geometry.node(name).expect("known node");
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::Config(format!("geometry.{name} has non-finite coordinates")));
            }
        }
        if !(self.geometry.user_radius >= 0.0 && self.geometry.user_radius.is_finite()) {
            return Err(Error::Config("geometry.user_radius must be non-negative".into()));
        }
        let ple = self.path_loss_exponents;
        for (name, v) in [("direct", ple.direct), ("ris", ple.ris), ("los", ple.los)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("path_loss_exponents.{name} must be non-negative")));
            }
        }
        Ok(())
    }
}
