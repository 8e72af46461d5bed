//! Power-delay profiles and path-loss models.
//!
//! Tap tables live in `data/tdl_taps.txt` (embedded and checksummed); this
//! module scales them to a requested RMS delay spread and enforces the
//! profile-wide Rician split for the line-of-sight table. Path loss covers
//! free space plus the urban-macro median models used by the environment
//! factor.

use crate::sum::compensated_sum;
use crate::SPEED_OF_LIGHT;
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

/// Embedded tap-table data file. `data/tdl_taps.txt` in the repository is
/// the single source of truth; this constant is byte-identical to it.
pub const TDL_DATA: &str = include_str!("../data/tdl_taps.txt");

/// SHA-256 of [`TDL_DATA`], verified once at first load.
pub const TDL_DATA_SHA256: &str =
    "8e6f4027636b5ab0ed21768f1adc78532d49a294799ed710b5c0e55f8128f4b6";

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("unknown TDL model name: {0}")]
    UnknownModel(String),
    #[error("negative RMS delay spread: {0}")]
    NegativeDelaySpread(f64),
    #[error("nonpositive input to path loss: {0}")]
    NonpositiveInput(String),
}

/// Supported tapped-delay-line models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TdlModel {
    /// Rayleigh-only table (non-line-of-sight).
    TdlB,
    /// Table with a direct first tap (line-of-sight).
    TdlD,
}

impl fmt::Display for TdlModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdlModel::TdlB => write!(f, "TDL-B"),
            TdlModel::TdlD => write!(f, "TDL-D"),
        }
    }
}

impl FromStr for TdlModel {
    type Err = ChannelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TDL-B" | "TDLB" | "B" => Ok(TdlModel::TdlB),
            "TDL-D" | "TDLD" | "D" => Ok(TdlModel::TdlD),
            other => Err(ChannelError::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TapKind {
    Direct,
    Scattered,
}

/// One resolved tap: absolute excess delay, normalized linear power, kind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tap {
    pub delay_s: f64,
    pub power: f64,
    pub kind: TapKind,
}

/// A discretized power-delay profile with its dispersion metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct TapProfile {
    pub taps: Vec<Tap>,
    pub sigma_tau_s: f64,
    /// Direct-to-scattered power ratio in dB; `None` when no direct tap.
    pub rician_kappa_db: Option<f64>,
    pub model: TdlModel,
}

impl TapProfile {
    /// Sum of tap powers (should be 1 after construction).
    pub fn total_power(&self) -> f64 {
        compensated_sum(self.taps.iter().map(|t| t.power))
    }

    pub fn direct_tap(&self) -> Option<&Tap> {
        self.taps.iter().find(|t| t.kind == TapKind::Direct)
    }

    pub fn scattered_power(&self) -> f64 {
        compensated_sum(
            self.taps
                .iter()
                .filter(|t| t.kind == TapKind::Scattered)
                .map(|t| t.power),
        )
    }
}

/// RMS delay spread of a tap set: second central moment of the delay
/// distribution weighted by power.
pub fn rms_delay_spread(taps: &[Tap]) -> f64 {
    let total = compensated_sum(taps.iter().map(|t| t.power));
    let mean = compensated_sum(taps.iter().map(|t| t.power * t.delay_s)) / total;
    let second = compensated_sum(taps.iter().map(|t| t.power * t.delay_s * t.delay_s)) / total;
    (second - mean * mean).max(0.0).sqrt()
}

struct RawTap {
    norm_delay: f64,
    power_db: f64,
    kind: TapKind,
}

struct RawTable {
    taps: Vec<RawTap>,
    kappa_db: Option<f64>,
}

struct RawTables {
    tdl_b: RawTable,
    tdl_d: RawTable,
}

fn raw_tables() -> &'static RawTables {
    static TABLES: OnceLock<RawTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let digest = Sha256::digest(TDL_DATA.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(
            hex, TDL_DATA_SHA256,
            "embedded tap-table data does not match its recorded checksum"
        );
        parse_tables(TDL_DATA)
    })
}

fn parse_tables(text: &str) -> RawTables {
    let mut tdl_b = RawTable { taps: Vec::new(), kappa_db: None };
    let mut tdl_d = RawTable { taps: Vec::new(), kappa_db: None };
    let mut current: Option<TdlModel> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "model" => {
                current = Some(fields[1].parse().expect("bad model name in tap table"));
            }
            "kappa_db" => {
                let k: f64 = fields[1].parse().expect("bad kappa value in tap table");
                match current.expect("kappa before model header") {
                    TdlModel::TdlB => tdl_b.kappa_db = Some(k),
                    TdlModel::TdlD => tdl_d.kappa_db = Some(k),
                }
            }
            _ => {
                assert_eq!(fields.len(), 4, "malformed tap row: {line}");
                let tap = RawTap {
                    norm_delay: fields[1].parse().expect("bad delay"),
                    power_db: fields[2].parse().expect("bad power"),
                    kind: match fields[3] {
                        "direct" => TapKind::Direct,
                        "scattered" => TapKind::Scattered,
                        other => panic!("bad tap kind: {other}"),
                    },
                };
                match current.expect("tap row before model header") {
                    TdlModel::TdlB => tdl_b.taps.push(tap),
                    TdlModel::TdlD => tdl_d.taps.push(tap),
                }
            }
        }
    }
    RawTables { tdl_b, tdl_d }
}

/// Build a tap profile scaled to the requested RMS delay spread.
///
/// Taps are sorted by delay. Powers are normalized to sum to one; for the
/// line-of-sight table the direct tap receives `kappa/(1+kappa)` of the
/// total and the scattered taps share the remainder in their tabulated
/// proportions, making the profile-wide direct-to-scattered ratio equal the
/// table's Rician factor exactly. Delays are then scaled so the recomputed
/// RMS delay spread equals `sigma_tau_s`.
pub fn scaled_tdl(model: TdlModel, sigma_tau_s: f64) -> Result<TapProfile, ChannelError> {
    if sigma_tau_s < 0.0 || !sigma_tau_s.is_finite() {
        return Err(ChannelError::NegativeDelaySpread(sigma_tau_s));
    }
    let tables = raw_tables();
    let raw = match model {
        TdlModel::TdlB => &tables.tdl_b,
        TdlModel::TdlD => &tables.tdl_d,
    };

    let mut order: Vec<usize> = (0..raw.taps.len()).collect();
    order.sort_by(|&a, &b| {
        raw.taps[a]
            .norm_delay
            .partial_cmp(&raw.taps[b].norm_delay)
            .unwrap()
    });

    let lin: Vec<f64> = order
        .iter()
        .map(|&i| 10f64.powf(raw.taps[i].power_db / 10.0))
        .collect();
    let kinds: Vec<TapKind> = order.iter().map(|&i| raw.taps[i].kind).collect();

    let powers: Vec<f64> = match raw.kappa_db {
        Some(kappa_db) => {
            let kappa = 10f64.powf(kappa_db / 10.0);
            let scattered_raw = compensated_sum(
                lin.iter()
                    .zip(&kinds)
                    .filter(|(_, k)| **k == TapKind::Scattered)
                    .map(|(p, _)| *p),
            );
            lin.iter()
                .zip(&kinds)
                .map(|(p, k)| match k {
                    TapKind::Direct => kappa / (1.0 + kappa),
                    TapKind::Scattered => p / scattered_raw / (1.0 + kappa),
                })
                .collect()
        }
        None => {
            let total = compensated_sum(lin.iter().copied());
            lin.iter().map(|p| p / total).collect()
        }
    };

    // Scale delays against the profile's own unit-power RMS spread so the
    // output profile reproduces sigma_tau exactly.
    let unit_taps: Vec<Tap> = order
        .iter()
        .zip(&powers)
        .zip(&kinds)
        .map(|((&i, &p), &k)| Tap {
            delay_s: raw.taps[i].norm_delay,
            power: p,
            kind: k,
        })
        .collect();
    let unit_rms = rms_delay_spread(&unit_taps);
    let scale = if unit_rms > 0.0 { sigma_tau_s / unit_rms } else { 0.0 };

    let taps: Vec<Tap> = unit_taps
        .into_iter()
        .map(|t| Tap { delay_s: t.delay_s * scale, ..t })
        .collect();

    Ok(TapProfile {
        taps,
        sigma_tau_s,
        rician_kappa_db: raw.kappa_db,
        model,
    })
}

/// Path-loss value plus a marker for evaluations outside the model's stated
/// validity range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossDb {
    pub db: f64,
    pub within_validity: bool,
}

/// Median path-loss models selectable for the environment factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathLossModel {
    FreeSpace,
    UmaLos,
    UmaNlos,
}

impl PathLossModel {
    /// Evaluate the model at a ground distance `d_2d_m`.
    ///
    /// Shadow fading is excluded throughout: these are median losses.
    pub fn evaluate(
        &self,
        d_2d_m: f64,
        f_c_hz: f64,
        h_tx_m: f64,
        h_rx_m: f64,
    ) -> Result<PathLossDb, ChannelError> {
        match self {
            PathLossModel::FreeSpace => {
                let d_3d = (d_2d_m * d_2d_m + (h_tx_m - h_rx_m).powi(2)).sqrt();
                Ok(PathLossDb {
                    db: free_space_path_loss(d_3d, f_c_hz)?,
                    within_validity: true,
                })
            }
            PathLossModel::UmaLos => uma_path_loss(d_2d_m, f_c_hz, true, h_tx_m, h_rx_m),
            PathLossModel::UmaNlos => uma_path_loss(d_2d_m, f_c_hz, false, h_tx_m, h_rx_m),
        }
    }
}

/// Friis free-space loss at range `d_m`, dB.
pub fn free_space_path_loss(d_m: f64, f_c_hz: f64) -> Result<f64, ChannelError> {
    if d_m <= 0.0 {
        return Err(ChannelError::NonpositiveInput(format!("distance {d_m} m")));
    }
    if f_c_hz <= 0.0 {
        return Err(ChannelError::NonpositiveInput(format!("frequency {f_c_hz} Hz")));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * d_m * f_c_hz / SPEED_OF_LIGHT).log10())
}

/// Urban-macro median path loss, dB.
///
/// Deterministic median form of the standard urban-macro model; the
/// non-line-of-sight value is lower-bounded by the line-of-sight one, so
/// NLOS >= LOS at any geometry. Evaluations outside the nominal validity
/// ranges (for example transmitter heights below the nominal base-station
/// height) still return a value, flagged via `within_validity = false`.
pub fn uma_path_loss(
    d_2d_m: f64,
    f_c_hz: f64,
    los: bool,
    h_tx_m: f64,
    h_rx_m: f64,
) -> Result<PathLossDb, ChannelError> {
    if d_2d_m <= 0.0 || f_c_hz <= 0.0 {
        return Err(ChannelError::NonpositiveInput(format!(
            "distance {d_2d_m} m / frequency {f_c_hz} Hz"
        )));
    }
    let f_ghz = f_c_hz / 1e9;
    let d_3d = (d_2d_m * d_2d_m + (h_tx_m - h_rx_m).powi(2)).sqrt();
    // Effective-height breakpoint with the 1 m environment height.
    let d_bp = 4.0 * (h_tx_m - 1.0).max(0.0) * (h_rx_m - 1.0).max(0.0) * f_c_hz / SPEED_OF_LIGHT;

    let pl_los = if d_2d_m <= d_bp {
        28.0 + 22.0 * d_3d.log10() + 20.0 * f_ghz.log10()
    } else {
        28.0 + 40.0 * d_3d.log10() + 20.0 * f_ghz.log10()
            - 9.0 * (d_bp * d_bp + (h_tx_m - h_rx_m).powi(2)).log10()
    };

    let db = if los {
        pl_los
    } else {
        let pl_nlos =
            13.54 + 39.08 * d_3d.log10() + 20.0 * f_ghz.log10() - 0.6 * (h_rx_m - 1.5);
        pl_los.max(pl_nlos)
    };

    let within_validity = (10.0..=5000.0).contains(&d_2d_m)
        && (1.5..=22.5).contains(&h_rx_m)
        && (h_tx_m - 25.0).abs() < 1e-9;

    Ok(PathLossDb { db, within_validity })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA: f64 = 266e-9;

    #[test]
    fn embedded_data_matches_checksum() {
        // Forces the OnceLock init, which asserts the checksum.
        let _ = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
    }

    #[test]
    fn scaled_profiles_reproduce_requested_delay_spread() {
        for model in [TdlModel::TdlB, TdlModel::TdlD] {
            let p = scaled_tdl(model, SIGMA).unwrap();
            let rms = rms_delay_spread(&p.taps);
            assert!(
                ((rms - SIGMA) / SIGMA).abs() < 0.005,
                "{model}: rms {rms} vs {SIGMA}"
            );
        }
    }

    #[test]
    fn profiles_are_normalized_and_sorted() {
        for model in [TdlModel::TdlB, TdlModel::TdlD] {
            let p = scaled_tdl(model, SIGMA).unwrap();
            assert!((p.total_power() - 1.0).abs() < 1e-12);
            assert_eq!(p.taps[0].delay_s, 0.0);
            for w in p.taps.windows(2) {
                assert!(w[0].delay_s < w[1].delay_s, "delays not strictly increasing");
            }
            assert!(p.taps.iter().all(|t| t.delay_s >= 0.0));
        }
    }

    #[test]
    fn tdl_d_has_one_direct_tap_with_exact_rician_split() {
        let p = scaled_tdl(TdlModel::TdlD, SIGMA).unwrap();
        let direct: Vec<&Tap> = p.taps.iter().filter(|t| t.kind == TapKind::Direct).collect();
        assert_eq!(direct.len(), 1);
        assert_eq!(p.taps[0].kind, TapKind::Direct);
        let ratio = direct[0].power / p.scattered_power();
        let kappa = 10f64.powf(13.3 / 10.0);
        assert!(
            ((ratio - kappa) / kappa).abs() < 1e-9,
            "Rician split {ratio} vs {kappa}"
        );
        assert_eq!(p.rician_kappa_db, Some(13.3));
    }

    #[test]
    fn tdl_b_has_no_direct_tap() {
        let p = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        assert!(p.taps.iter().all(|t| t.kind == TapKind::Scattered));
        assert_eq!(p.rician_kappa_db, None);
        assert_eq!(p.taps.len(), 23);
    }

    #[test]
    fn zero_spread_collapses_delays_only() {
        let z = scaled_tdl(TdlModel::TdlB, 0.0).unwrap();
        let n = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        assert!(z.taps.iter().all(|t| t.delay_s == 0.0));
        for (a, b) in z.taps.iter().zip(&n.taps) {
            assert_eq!(a.power, b.power);
        }
    }

    #[test]
    fn delay_scaling_is_linear() {
        let one = scaled_tdl(TdlModel::TdlD, SIGMA).unwrap();
        let two = scaled_tdl(TdlModel::TdlD, 2.0 * SIGMA).unwrap();
        for (a, b) in one.taps.iter().zip(&two.taps) {
            assert_eq!(b.delay_s, 2.0 * a.delay_s);
        }
    }

    #[test]
    fn renormalization_is_idempotent() {
        let p = scaled_tdl(TdlModel::TdlB, SIGMA).unwrap();
        let total = p.total_power();
        let renorm: Vec<f64> = p.taps.iter().map(|t| t.power / total).collect();
        for (t, r) in p.taps.iter().zip(&renorm) {
            assert!((t.power - r).abs() <= f64::EPSILON * t.power);
        }
    }

    #[test]
    fn negative_spread_rejected() {
        assert!(matches!(
            scaled_tdl(TdlModel::TdlB, -1.0),
            Err(ChannelError::NegativeDelaySpread(_))
        ));
    }

    #[test]
    fn unknown_model_name_rejected() {
        assert!(matches!(
            "TDL-Q".parse::<TdlModel>(),
            Err(ChannelError::UnknownModel(_))
        ));
    }

    #[test]
    fn friis_matches_hand_evaluation() {
        // Hand-evaluated: 20*log10(4*pi*100*28e9/c) = 101.39094 dB.
        let pl = free_space_path_loss(100.0, 28e9).unwrap();
        assert!((pl - 101.39094384872776).abs() < 0.01, "friis {pl}");
        // +6.02 dB per distance doubling and per frequency doubling.
        let d2 = free_space_path_loss(200.0, 28e9).unwrap() - pl;
        assert!((d2 - 6.0206).abs() < 1e-3);
        let f2 = free_space_path_loss(100.0, 56e9).unwrap() - pl;
        assert!((f2 - 6.0206).abs() < 1e-3);
    }

    #[test]
    fn friis_rejects_nonpositive_inputs() {
        assert!(free_space_path_loss(0.0, 28e9).is_err());
        assert!(free_space_path_loss(100.0, -1.0).is_err());
    }

    #[test]
    fn uma_los_matches_spreadsheet_oracle() {
        // Spreadsheet evaluation of the urban-macro LOS median formula at
        // (100 m, 28 GHz, 7 m, 1.5 m): 28 + 22*log10(sqrt(100^2+5.5^2))
        // + 20*log10(28) = 100.957590 dB.
        let pl = uma_path_loss(100.0, 28e9, true, 7.0, 1.5).unwrap();
        assert!((pl.db - 100.95758996234629).abs() < 0.01, "uma los {}", pl.db);
        // Heights are below the nominal base-station height: flagged.
        assert!(!pl.within_validity);
    }

    #[test]
    fn uma_nlos_never_below_los() {
        for d in [20.0, 50.0, 100.0, 250.0, 800.0] {
            let l = uma_path_loss(d, 28e9, true, 7.0, 1.5).unwrap().db;
            let n = uma_path_loss(d, 28e9, false, 7.0, 1.5).unwrap().db;
            assert!(n >= l, "NLOS {n} < LOS {l} at {d} m");
        }
    }

    #[test]
    fn uma_los_monotone_on_distance_grid() {
        let mut prev = 0.0;
        let mut d = 50.0;
        while d <= 250.0 {
            let pl = uma_path_loss(d, 28e9, true, 7.0, 1.5).unwrap().db;
            assert!(pl > prev, "not monotone at {d}");
            prev = pl;
            d += 25.0;
        }
    }

    #[test]
    fn free_space_increases_six_db_per_doubling_over_range() {
        // Strictly increasing over [10, 1000] m plus the doubling law.
        let mut prev = free_space_path_loss(10.0, 28e9).unwrap();
        let mut d = 20.0;
        while d <= 1000.0 {
            let pl = free_space_path_loss(d, 28e9).unwrap();
            assert!(pl > prev);
            let half = free_space_path_loss(d / 2.0, 28e9).unwrap();
            assert!((pl - half - 6.0206).abs() < 1e-3);
            prev = pl;
            d += 10.0;
        }
    }
}
