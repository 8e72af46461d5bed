//! Received power, power factors and spectral efficiency.
//!
//! Powers here are relative: path weights sum to one, so the received power
//! with ideal isotropic antennas equals one and the directional received
//! power is directly the antenna factor. Distance-dependent attenuation
//! enters separately through the environment factor, the ratio of the
//! free-space loss to the multipath-model loss. Spectral efficiency is the
//! Shannon capacity of the equivalent link with both factors applied to the
//! free-space SNR.

use crate::antenna::{array_pattern, ArrayGeometry, ElementParams, Gain, RadiationPattern};
use crate::channel::{ChannelError, PathLossModel};
use crate::db_to_lin;
use crate::geom::{wrap_deg, BeamOrientation};
use crate::scattering::{Condition, Ensemble, LinkScenario, PathRealization};
use crate::sum::Neumaier;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("empty path list")]
    EmptyPathList,
    #[error("reference power is zero")]
    ZeroReferencePower,
    #[error("negative argument: {0}")]
    NegativeArgument(f64),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Antenna(#[from] crate::antenna::AntennaError),
}

/// A pattern fixed to a mount azimuth; gains are queried in global angles.
#[derive(Clone, Copy)]
pub struct OrientedAntenna<'a> {
    pub pattern: &'a RadiationPattern,
    pub mount_azimuth_deg: f64,
}

impl OrientedAntenna<'_> {
    #[inline]
    pub fn gain_dbi(&self, az_deg: f64, el_deg: f64) -> f64 {
        self.pattern
            .gain_dbi(wrap_deg(az_deg - self.mount_azimuth_deg), el_deg)
    }
}

/// Sum of path weights through both antenna patterns (linear, relative).
///
/// With unit-sum weights and isotropic 0 dBi patterns this returns one: the
/// omnidirectional multipath reference power.
pub fn received_power(
    paths: &[PathRealization],
    tx: &OrientedAntenna,
    rx: &OrientedAntenna,
) -> Result<f64, LinkError> {
    if paths.is_empty() {
        return Err(LinkError::EmptyPathList);
    }
    let mut acc = Neumaier::new();
    for p in paths {
        let g_t = db_to_lin(tx.gain_dbi(p.aod.azimuth_deg(), p.aod.elevation_deg()));
        let g_r = db_to_lin(rx.gain_dbi(p.aoa.azimuth_deg(), p.aoa.elevation_deg()));
        acc.add(p.power_weight * g_t * g_r);
    }
    Ok(acc.value())
}

/// Antenna configuration of the link: the base-station panel (boresight
/// toward the receiver, electronically steered) and the terminal element
/// (mechanically rotated).
#[derive(Clone, Copy, Debug)]
pub struct AntennaSetup {
    pub tx_geometry: ArrayGeometry,
    pub tx_element: ElementParams,
    pub rx_element: ElementParams,
}

impl AntennaSetup {
    pub fn default_link() -> Self {
        Self {
            tx_geometry: ArrayGeometry::gnodeb_12x8(),
            tx_element: ElementParams::gnodeb(),
            rx_element: ElementParams::ue(),
        }
    }

    /// Transmit pattern for a beam direction `alpha` (degrees from the OX
    /// axis). The panel boresight points at the receiver (azimuth 180), so
    /// the electrical steering angle is `alpha - 180`; scan loss is part of
    /// the steered pattern.
    pub fn tx_pattern(&self, alpha_deg: f64) -> Result<RadiationPattern, LinkError> {
        Ok(array_pattern(
            self.tx_geometry,
            self.tx_element,
            BeamOrientation::horizontal(wrap_deg(alpha_deg - 180.0)),
        )?)
    }

    /// Receive pattern (orientation-independent; the terminal rotates
    /// mechanically, which is applied as the mount azimuth).
    pub fn rx_pattern(&self) -> Result<RadiationPattern, LinkError> {
        Ok(RadiationPattern::element(self.rx_element)?)
    }
}

/// Transmit boresight azimuth: the panel faces the receiver.
pub const TX_MOUNT_AZ_DEG: f64 = 180.0;

/// Ensemble-mean received power over all trials (linear mean, compensated,
/// trial order fixed).
pub fn mean_received_power(
    ensemble: &Ensemble,
    tx: &OrientedAntenna,
    rx: &OrientedAntenna,
) -> Result<f64, LinkError> {
    let mut acc = Neumaier::new();
    for trial in &ensemble.trials {
        acc.add(received_power(trial, tx, rx)?);
    }
    Ok(acc.value() / ensemble.trials.len() as f64)
}

/// Relative power factor in dB: ensemble-mean received power at beam
/// directions `(alpha, beta)` over the aligned reference `(180, 0)`.
pub fn relative_power_factor(
    alpha_deg: f64,
    beta_deg: f64,
    ensemble: &Ensemble,
    setup: &AntennaSetup,
) -> Result<f64, LinkError> {
    let rx_pattern = setup.rx_pattern()?;
    let tx_ref = setup.tx_pattern(180.0)?;
    let reference = mean_received_power(
        ensemble,
        &OrientedAntenna { pattern: &tx_ref, mount_azimuth_deg: TX_MOUNT_AZ_DEG },
        &OrientedAntenna { pattern: &rx_pattern, mount_azimuth_deg: 0.0 },
    )?;
    if reference <= 0.0 {
        return Err(LinkError::ZeroReferencePower);
    }
    let tx = setup.tx_pattern(alpha_deg)?;
    let directional = mean_received_power(
        ensemble,
        &OrientedAntenna { pattern: &tx, mount_azimuth_deg: TX_MOUNT_AZ_DEG },
        &OrientedAntenna { pattern: &rx_pattern, mount_azimuth_deg: beta_deg },
    )?;
    Ok(10.0 * (directional / reference).log10())
}

/// How the environment factor is computed from the two path-loss models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnvFactorMode {
    /// Ratio of free-space loss to multipath-model loss (default).
    #[default]
    LossRatio,
    /// Squared ratio: sensitivity variant treating the power ratio and the
    /// loss ratio as independent factors.
    LossRatioSquared,
}

/// Environment factor value plus the path-loss validity marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvFactor {
    pub linear: f64,
    pub within_validity: bool,
}

/// Environment factor: free-space over multipath median loss, linear.
///
/// The multipath model is the urban-macro median for the scenario's
/// condition; free space is evaluated at the 3D range.
pub fn environment_factor(
    scenario: &LinkScenario,
    mode: EnvFactorMode,
) -> Result<EnvFactor, LinkError> {
    let free = PathLossModel::FreeSpace.evaluate(
        scenario.d_m,
        scenario.f_c_hz,
        scenario.h_tx_m,
        scenario.h_rx_m,
    )?;
    let mp_model = match scenario.condition {
        Condition::Los => PathLossModel::UmaLos,
        Condition::Nlos => PathLossModel::UmaNlos,
    };
    let mp = mp_model.evaluate(scenario.d_m, scenario.f_c_hz, scenario.h_tx_m, scenario.h_rx_m)?;
    let ratio_db = free.db - mp.db;
    let db = match mode {
        EnvFactorMode::LossRatio => ratio_db,
        EnvFactorMode::LossRatioSquared => 2.0 * ratio_db,
    };
    Ok(EnvFactor {
        linear: db_to_lin(db),
        within_validity: free.within_validity && mp.within_validity,
    })
}

/// Modified Shannon spectral efficiency, bit/s/Hz: capacity of the link
/// with the antenna and environment factors applied to the free-space SNR.
pub fn spectral_efficiency(k_a: f64, k_e: f64, snr: f64) -> Result<f64, LinkError> {
    for v in [k_a, k_e, snr] {
        if v < 0.0 || !v.is_finite() {
            return Err(LinkError::NegativeArgument(v));
        }
    }
    Ok((1.0 + k_a * k_e * snr).log2())
}

/// The power chain of one link evaluation, all linear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    /// Directional multipath received power.
    pub p_s: f64,
    /// Omnidirectional multipath received power.
    pub p_m: f64,
    /// Free-space received power.
    pub p_f: f64,
    /// Noise power (unity: everything is SNR-referred).
    pub p_n: f64,
    pub k_a: f64,
    pub k_e: f64,
    pub snr: f64,
    pub snr_0: f64,
}

impl LinkBudget {
    /// Assemble the chain from the directional power, the omni reference,
    /// the environment factor and the free-space SNR. The chain identity
    /// `snr_0 = k_a * k_e * snr` holds by construction.
    pub fn from_components(p_s: f64, p_m: f64, k_e: f64, snr: f64) -> Self {
        let k_a = p_s / p_m;
        Self {
            p_s,
            p_m,
            p_f: snr,
            p_n: 1.0,
            k_a,
            k_e,
            snr,
            snr_0: k_a * k_e * snr,
        }
    }
}

/// Spectral efficiency of one orientation at one SNR point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEfficiencyResult {
    /// Free-space baseline, bit/s/Hz.
    pub c_f: f64,
    /// Modified-Shannon value, bit/s/Hz.
    pub c_0: f64,
    pub snr_db: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub distance_m: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{scaled_tdl, TdlModel};
    use crate::scattering::{MonteCarloConfig, PathKind};

    const SIGMA: f64 = 266e-9;

    fn scenario(condition: Condition) -> LinkScenario {
        LinkScenario { d_m: 100.0, h_tx_m: 7.0, h_rx_m: 1.5, f_c_hz: 28e9, condition }
    }

    fn one_direct_path(weight: f64) -> Vec<PathRealization> {
        vec![PathRealization {
            scatterer: None,
            aod: BeamOrientation::horizontal(180.0),
            aoa: BeamOrientation::horizontal(0.0),
            delay_s: 333e-9,
            power_weight: weight,
            kind: PathKind::Direct,
            tap_index: 0,
        }]
    }

    #[test]
    fn isotropic_antennas_return_weight_sum() {
        let iso = RadiationPattern::isotropic(0.0);
        let tx = OrientedAntenna { pattern: &iso, mount_azimuth_deg: 180.0 };
        let rx = OrientedAntenna { pattern: &iso, mount_azimuth_deg: 0.0 };
        let profile = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        let cfg = MonteCarloConfig { paths_per_ellipsoid: 10, trials: 4, seed: 9 };
        let paths =
            crate::scattering::realize_paths(&profile, &scenario(Condition::Nlos), &cfg, 0)
                .unwrap();
        let p = received_power(&paths, &tx, &rx).unwrap();
        assert!((p - 1.0).abs() < 1e-12, "omni power {p}");
    }

    #[test]
    fn single_aligned_path_multiplies_gains() {
        // Hand product of the rated gains: 25.68 + 3.75 dB = 10^2.943.
        let tx_pat = RadiationPattern::isotropic(25.68);
        let rx_pat = RadiationPattern::isotropic(3.75);
        let tx = OrientedAntenna { pattern: &tx_pat, mount_azimuth_deg: 180.0 };
        let rx = OrientedAntenna { pattern: &rx_pat, mount_azimuth_deg: 0.0 };
        let w = 0.25;
        let p = received_power(&one_direct_path(w), &tx, &rx).unwrap();
        let expected = 10f64.powf(2.943) * w;
        assert!(((p - expected) / expected).abs() < 1e-12, "{p} vs {expected}");
    }

    #[test]
    fn empty_path_list_rejected() {
        let iso = RadiationPattern::isotropic(0.0);
        let tx = OrientedAntenna { pattern: &iso, mount_azimuth_deg: 0.0 };
        let err = received_power(&[], &tx, &tx).unwrap_err();
        assert_eq!(err, LinkError::EmptyPathList);
    }

    #[test]
    fn path_sum_is_order_independent() {
        let profile = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        let cfg = MonteCarloConfig { paths_per_ellipsoid: 10, trials: 1, seed: 3 };
        let mut paths =
            crate::scattering::realize_paths(&profile, &scenario(Condition::Nlos), &cfg, 0)
                .unwrap();
        let setup = AntennaSetup::default_link();
        let tx_pat = setup.tx_pattern(207.0).unwrap();
        let rx_pat = setup.rx_pattern().unwrap();
        let tx = OrientedAntenna { pattern: &tx_pat, mount_azimuth_deg: TX_MOUNT_AZ_DEG };
        let rx = OrientedAntenna { pattern: &rx_pat, mount_azimuth_deg: -31.0 };
        let fwd = received_power(&paths, &tx, &rx).unwrap();
        paths.reverse();
        let rev = received_power(&paths, &tx, &rx).unwrap();
        assert!(((fwd - rev) / fwd).abs() < 1e-12);
    }

    #[test]
    fn reference_orientation_gives_zero_db() {
        let profile = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        let cfg = MonteCarloConfig { paths_per_ellipsoid: 4, trials: 8, seed: 11 };
        let ens = Ensemble::generate(&profile, &scenario(Condition::Nlos), &cfg).unwrap();
        let k = relative_power_factor(180.0, 0.0, &ens, &AntennaSetup::default_link()).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn weight_scaling_cancels_in_power_factor() {
        let profile = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        let cfg = MonteCarloConfig { paths_per_ellipsoid: 4, trials: 6, seed: 5 };
        let mut ens = Ensemble::generate(&profile, &scenario(Condition::Nlos), &cfg).unwrap();
        let setup = AntennaSetup::default_link();
        let k1 = relative_power_factor(150.0, 20.0, &ens, &setup).unwrap();
        for trial in &mut ens.trials {
            for p in trial {
                p.power_weight *= 7.25;
            }
        }
        let k2 = relative_power_factor(150.0, 20.0, &ens, &setup).unwrap();
        assert!((k1 - k2).abs() < 1e-12, "{k1} vs {k2}");
    }

    #[test]
    fn environment_factor_has_expected_values() {
        // Degenerate same-model ratio is unity.
        let s = scenario(Condition::Los);
        let free = PathLossModel::FreeSpace
            .evaluate(s.d_m, s.f_c_hz, s.h_tx_m, s.h_rx_m)
            .unwrap();
        assert_eq!(free.db, free.db);
        // Spreadsheet oracle: Friis at the 3D range minus the urban-macro
        // LOS value, 101.40414 - 100.95759 = 0.44655 dB.
        let ke = environment_factor(&s, EnvFactorMode::LossRatio).unwrap();
        let oracle = db_to_lin(0.446_554_043_905_815_2);
        assert!(
            ((ke.linear - oracle) / oracle).abs() < 1e-3,
            "K_e {} vs oracle {oracle}",
            ke.linear
        );
        // NLOS is always below one.
        for d in [50.0, 100.0, 250.0] {
            let s = LinkScenario { d_m: d, ..scenario(Condition::Nlos) };
            let ke = environment_factor(&s, EnvFactorMode::LossRatio).unwrap();
            assert!(ke.linear < 1.0, "NLOS K_e {} at {d} m", ke.linear);
        }
        // The squared mode doubles the dB value.
        let sq = environment_factor(&s, EnvFactorMode::LossRatioSquared).unwrap();
        assert!(((sq.linear - ke.linear * ke.linear) / sq.linear).abs() < 1e-12);
    }

    #[test]
    fn spectral_efficiency_basics() {
        assert_eq!(spectral_efficiency(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(spectral_efficiency(1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(spectral_efficiency(-1.0, 1.0, 1.0).is_err());
        // With unity factors this is the plain Shannon formula.
        let snr = db_to_lin(17.0);
        let c = spectral_efficiency(1.0, 1.0, snr).unwrap();
        assert!((c - (1.0 + snr).log2()).abs() < 1e-15);
    }

    #[test]
    fn budget_chain_is_consistent() {
        let b = LinkBudget::from_components(431.7, 1.0, 0.87, db_to_lin(20.0));
        let direct = spectral_efficiency(b.k_a, b.k_e, b.snr).unwrap();
        let chained = (1.0 + b.snr_0).log2();
        assert!(((direct - chained) / direct).abs() < 1e-12);
        assert_eq!(b.p_n, 1.0);
        assert!((b.k_a - b.p_s / b.p_m).abs() < 1e-15);
    }

    #[test]
    fn efficiency_monotone_in_each_factor() {
        let base = spectral_efficiency(2.0, 0.5, 10.0).unwrap();
        assert!(spectral_efficiency(2.1, 0.5, 10.0).unwrap() > base);
        assert!(spectral_efficiency(2.0, 0.6, 10.0).unwrap() > base);
        assert!(spectral_efficiency(2.0, 0.5, 11.0).unwrap() > base);
    }

    #[test]
    fn oriented_antenna_rotates_mount() {
        let pat = RadiationPattern::element(ElementParams::ue()).unwrap();
        let ant = OrientedAntenna { pattern: &pat, mount_azimuth_deg: 30.0 };
        assert_eq!(ant.gain_dbi(30.0, 0.0), pat.gain_dbi(0.0, 0.0));
        assert_eq!(ant.gain_dbi(75.0, 0.0), pat.gain_dbi(45.0, 0.0));
    }
}
