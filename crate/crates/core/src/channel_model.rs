//! Effective channels through the STAR-RIS and the closed-form performance
//! metrics evaluated on them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, log_det_hpd, matmul, scale_rows, CMat, CVec, C64};
use crate::scenario::{ChannelSet, ScenarioConfig};

/// Tolerance on `|ψ_l| = 1` accepted when a state is constructed.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

/// Transmission and reflection phase vectors plus the energy-splitting
/// amplitudes applied to each subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct StarRisState {
    pub psi_t: CVec,
    pub psi_r: CVec,
    pub amp_t: f64,
    pub amp_r: f64,
}

impl StarRisState {
    pub fn new(psi_t: CVec, psi_r: CVec, amp_t: f64, amp_r: f64) -> Result<Self> {
        if psi_t.len() != psi_r.len() {
            return Err(Error::dim(format!(
                "psi_t has {} elements, psi_r has {}",
                psi_t.len(),
                psi_r.len()
            )));
        }
        for (name, v) in [("psi_t", &psi_t), ("psi_r", &psi_r)] {
            if let Some((i, z)) = v.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL) {
                return Err(Error::Config(format!("{name}[{i}] has modulus {}", z.norm())));
            }
        }
        if !(amp_t >= 0.0 && amp_r >= 0.0 && amp_t * amp_t + amp_r * amp_r <= 1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "amplitudes ({amp_t}, {amp_r}) violate energy splitting"
            )));
        }
        Ok(Self { psi_t, psi_r, amp_t, amp_r })
    }

    /// State with the configured amplitudes.
    pub fn with_config(cfg: &ScenarioConfig, psi_t: CVec, psi_r: CVec) -> Result<Self> {
        Self::new(psi_t, psi_r, cfg.amp_t(), cfg.amp_r())
    }

    /// All phases zero.
    pub fn zero_phase(l: usize, amp_t: f64, amp_r: f64) -> Self {
        let ones = CVec::from_element(l, C64::new(1.0, 0.0));
        Self { psi_t: ones.clone(), psi_r: ones, amp_t, amp_r }
    }

    pub fn len(&self) -> usize {
        self.psi_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi_t.is_empty()
    }
}

/// I.i.d. uniform phases.
pub fn random_phases<R: Rng + ?Sized>(l: usize, rng: &mut R) -> CVec {
    CVec::from_fn(l, |_, _| {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        C64::from_polar(1.0, theta)
    })
}

/// Effective channels of both subspaces. Row vectors are stored as column
/// vectors holding the row's entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub h_eff: CMat,
    pub j_eff: CMat,
    /// Transmitter→ISAC receiver through the transmission subspace (1×N).
    pub h_rt: CVec,
    /// Jammer→ISAC receiver (1×N_j).
    pub h_rj: CVec,
    /// Transmitter→target (1×N).
    pub h_s: CVec,
    /// Transmitter→malicious detector (1×N).
    pub i_eff: CVec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    /// bits/s/Hz
    pub sum_rate: f64,
    pub gamma_sd: f64,
    pub gamma_sr: f64,
    pub p_det_malicious: f64,
    pub p_det_isac: f64,
    /// `‖H_eff‖²_F`
    pub comm_gain: f64,
    /// `‖J_eff‖²_F`
    pub jam_gain: f64,
}

/// The scalar powers entering the two sensing SINRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingPowers {
    pub zeta_sq: f64,
    pub p_d: f64,
    pub p_s: f64,
    pub p_c: f64,
    pub p_j: f64,
    pub sigma_d_sq: f64,
}

impl From<&ScenarioConfig> for SensingPowers {
    fn from(cfg: &ScenarioConfig) -> Self {
        Self {
            zeta_sq: cfg.zeta_sq,
            p_d: cfg.p_d,
            p_s: cfg.p_s,
            p_c: cfg.p_c,
            p_j: cfg.p_j,
            sigma_d_sq: cfg.sigma_d_sq,
        }
    }
}

fn check_len(ch: &ChannelSet, ris: &StarRisState) -> Result<()> {
    ch.check_shapes()?;
    if ris.psi_t.len() != ch.n_ris() || ris.psi_r.len() != ch.n_ris() {
        return Err(Error::dim(format!(
            "STAR-RIS state has {} elements, channels have L = {}",
            ris.psi_t.len(),
            ch.n_ris()
        )));
    }
    Ok(())
}

/// `H + a_r F_c diag(ψ_r) G_b` and `J + a_r F_c diag(ψ_r) G_j`.
pub fn effective_comm_channels(ch: &ChannelSet, ris: &StarRisState) -> Result<(CMat, CMat)> {
    check_len(ch, ris)?;
    let amp = C64::new(ris.amp_r, 0.0);
    let h_eff = &ch.h + matmul(&ch.f_c, &scale_rows(&ris.psi_r, &ch.g_b)) * amp;
    let j_eff = &ch.j + matmul(&ch.f_c, &scale_rows(&ris.psi_r, &ch.g_j)) * amp;
    Ok((h_eff, j_eff))
}

/// `a_t · f diag(ψ_t) G` as the entries of a row vector.
fn cascade_row(f: &CVec, psi: &CVec, g: &CMat, amp: f64) -> CVec {
    let w = f.component_mul(psi);
    g.transpose() * w * C64::new(amp, 0.0)
}

/// Sensing-side effective channels. Returns `(h_rt, h_rj, h_s, i_eff)`.
pub fn effective_sense_channels(ch: &ChannelSet, ris: &StarRisState) -> Result<(CVec, CVec, CVec, CVec)> {
    check_len(ch, ris)?;
    let a = ris.amp_t;
    let psi = &ris.psi_t;
    Ok((
        cascade_row(&ch.f_r, psi, &ch.g_b, a),
        cascade_row(&ch.f_r, psi, &ch.g_j, a),
        cascade_row(&ch.f_t, psi, &ch.g_b, a),
        cascade_row(&ch.f_m, psi, &ch.g_b, a),
    ))
}

pub fn effective_channels(ch: &ChannelSet, ris: &StarRisState) -> Result<EffectiveChannels> {
    let (h_eff, j_eff) = effective_comm_channels(ch, ris)?;
    let (h_rt, h_rj, h_s, i_eff) = effective_sense_channels(ch, ris)?;
    Ok(EffectiveChannels { h_eff, j_eff, h_rt, h_rj, h_s, i_eff })
}

/// Sum rate under jamming, bits/s/Hz:
/// `log2 det(σ²I + p_j JJᴴ + p_c HHᴴ) − log2 det(σ²I + p_j JJᴴ)`.
pub fn sum_rate(h_eff: &CMat, j_eff: &CMat, p_c: f64, p_j: f64, sigma_n_sq: f64) -> Result<f64> {
    if h_eff.nrows() != j_eff.nrows() {
        return Err(Error::dim(format!(
            "H_eff has {} rows, J_eff has {}",
            h_eff.nrows(),
            j_eff.nrows()
        )));
    }
    if !(sigma_n_sq > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let k = h_eff.nrows();
    let mut interference = matmul(j_eff, &j_eff.adjoint()) * C64::new(p_j, 0.0);
    for i in 0..k {
        interference[(i, i)] += sigma_n_sq;
    }
    let total = &interference + matmul(h_eff, &h_eff.adjoint()) * C64::new(p_c, 0.0);
    let ld_total = log_det_hpd(&total).ok_or(Error::NotPositiveDefinite)?;
    let ld_interf = log_det_hpd(&interference).ok_or(Error::NotPositiveDefinite)?;
    Ok(((ld_total - ld_interf) / std::f64::consts::LN_2).max(0.0))
}

/// SINR at the malicious detector.
pub fn sinr_malicious(ch: &ChannelSet, eff: &EffectiveChannels, pw: &SensingPowers) -> f64 {
    let d2 = ch.d().norm_sqr();
    let hs2 = eff.h_s.norm_squared();
    let ie2 = eff.i_eff.norm_squared();
    (pw.zeta_sq * pw.p_d * d2 * d2 + pw.zeta_sq * pw.p_s * d2 * hs2) / (pw.sigma_d_sq + pw.p_c * ie2)
}

/// SINR at the ISAC receiver. `r` is a scalar LoS channel, so its norm is
/// the modulus.
pub fn sinr_isac(ch: &ChannelSet, eff: &EffectiveChannels, pw: &SensingPowers) -> f64 {
    let d2 = ch.d().norm_sqr();
    let r2 = ch.r().norm_sqr();
    let hs2 = eff.h_s.norm_squared();
    let hrj2 = eff.h_rj.norm_squared();
    (pw.p_s * pw.zeta_sq * r2 * hs2 + pw.zeta_sq * pw.p_d * d2 * r2)
        / (pw.sigma_d_sq + pw.p_d * ch.h_rd.norm_sqr() + pw.p_j * hrj2)
}

/// Detection probability `(1 + γ)^(-1/γ)`, continuous at γ = 0 where it
/// takes the limit `e^{-1}`.
pub fn detection_probability(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::NegativeSinr(gamma));
    }
    if gamma == 0.0 {
        return Ok((-1.0f64).exp());
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    Ok((-gamma.ln_1p() / gamma).exp())
}

pub fn evaluate_metrics(ch: &ChannelSet, ris: &StarRisState, cfg: &ScenarioConfig) -> Result<MetricReport> {
    let eff = effective_channels(ch, ris)?;
    metrics_from_effective(ch, &eff, cfg)
}

/// Metrics for already-composed channels.
pub fn metrics_from_effective(ch: &ChannelSet, eff: &EffectiveChannels, cfg: &ScenarioConfig) -> Result<MetricReport> {
    let pw = SensingPowers::from(cfg);
    let rate = sum_rate(&eff.h_eff, &eff.j_eff, cfg.p_c, cfg.p_j, cfg.sigma_n_sq)?;
    let gamma_sd = sinr_malicious(ch, eff, &pw);
    let gamma_sr = sinr_isac(ch, eff, &pw);
    Ok(MetricReport {
        sum_rate: rate,
        gamma_sd,
        gamma_sr,
        p_det_malicious: detection_probability(gamma_sd)?,
        p_det_isac: detection_probability(gamma_sr)?,
        comm_gain: frobenius_sq(&eff.h_eff),
        jam_gain: frobenius_sq(&eff.j_eff),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_channels, LosGeometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(z: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(z, 0.0))
    }

    fn cvec(vals: &[f64]) -> CVec {
        CVec::from_iterator(vals.len(), vals.iter().map(|v| C64::new(*v, 0.0)))
    }

    fn scalar_channels() -> ChannelSet {
        ChannelSet {
            h: scalar(1.0),
            j: scalar(1.0),
            f_c: scalar(2.0),
            g_b: scalar(3.0),
            g_j: scalar(1.0),
            f_r: cvec(&[1.0]),
            f_t: cvec(&[1.0]),
            f_m: cvec(&[1.0]),
            h_rd: C64::new(0.0, 0.0),
            los_d: LosGeometry { alpha: 1.0, beta: 0.0, phi: 0.0 },
            los_r: LosGeometry { alpha: 1.0, beta: 0.0, phi: 0.0 },
            user_positions: vec![[0.0, 0.0]],
        }
    }

    #[test]
    fn scalar_composition() {
        let ch = scalar_channels();
        let ris = StarRisState::zero_phase(1, 1.0, 1.0);
        let (h, _) = effective_comm_channels(&ch, &ris).unwrap();
        assert!((h[(0, 0)] - C64::new(7.0, 0.0)).norm() < 1e-15);
        let (_, _, hs, _) = effective_sense_channels(&ch, &ris).unwrap();
        assert!((hs[0] - C64::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_ris_channel_leaves_direct_path() {
        let mut ch = generate_channels(&ScenarioConfig::default()).unwrap();
        ch.f_c.fill(C64::new(0.0, 0.0));
        ch.f_t.fill(C64::new(0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = ch.n_ris();
        let ris = StarRisState::new(random_phases(l, &mut rng), random_phases(l, &mut rng), 0.7, 0.7).unwrap();
        let eff = effective_channels(&ch, &ris).unwrap();
        assert_eq!(eff.h_eff, ch.h);
        assert_eq!(eff.j_eff, ch.j);
        assert!(eff.h_s.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn sum_rate_scalar_cases() {
        let r = sum_rate(&scalar(1.0), &scalar(0.0), 1.0, 0.0, 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let r = sum_rate(&scalar(1.0), &scalar(1.0), 3.0, 1.0, 1.0).unwrap();
        assert!((r - 2.5f64.log2()).abs() < 1e-14);
        assert!((r - 1.321928).abs() < 1e-6);
        assert!(matches!(
            sum_rate(&scalar(1.0), &scalar(1.0), 1.0, 1.0, 0.0),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn detection_probability_values() {
        assert_eq!(detection_probability(1.0).unwrap(), 0.5);
        assert!((detection_probability(0.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert!((detection_probability(1e-12).unwrap() - (-1f64).exp()).abs() < 1e-9);
        assert!((detection_probability(3.0).unwrap() - 0.629961).abs() < 1e-6);
        assert!(matches!(detection_probability(-0.1), Err(Error::NegativeSinr(_))));
    }

    #[test]
    fn sinr_hand_cases() {
        let ch = scalar_channels();
        let eff = EffectiveChannels {
            h_eff: scalar(0.0),
            j_eff: scalar(0.0),
            h_rt: cvec(&[0.0]),
            h_rj: cvec(&[0.0]),
            h_s: cvec(&[1.0]),
            i_eff: cvec(&[0.0]),
        };
        let pw = SensingPowers { zeta_sq: 1.0, p_d: 1.0, p_s: 0.0, p_c: 0.0, p_j: 0.0, sigma_d_sq: 1.0 };
        assert!((sinr_malicious(&ch, &eff, &pw) - 1.0).abs() < 1e-15);
        let pw1 = SensingPowers { p_s: 1.0, ..pw };
        assert!((sinr_isac(&ch, &eff, &pw1) - 2.0).abs() < 1e-15);
        let silent = SensingPowers { zeta_sq: 0.0, ..pw1 };
        assert_eq!(sinr_malicious(&ch, &eff, &silent), 0.0);
        let no_probe = SensingPowers { p_s: 0.0, p_d: 0.0, ..pw1 };
        assert_eq!(sinr_isac(&ch, &eff, &no_probe), 0.0);
    }

    #[test]
    fn state_rejects_off_circle_phase() {
        let bad = cvec(&[1.0, 0.5]);
        let good = cvec(&[1.0, 1.0]);
        assert!(StarRisState::new(bad, good.clone(), 0.5, 0.5).is_err());
        assert!(StarRisState::new(good.clone(), good, 0.9, 0.9).is_err());
    }
}
