//! Experiment configuration: TOML schema, defaults and validation.
//!
//! Unknown keys are hard errors; a 20-parameter experiment must not
//! silently ignore a typo. The defaults reproduce the reference scenario:
//! 28 GHz carrier, 7 m / 1.5 m antenna heights, scaled TDL profiles at
//! 266 ns, a 12x8 panel against a single-element terminal, 1-degree
//! orientation grids, 10 paths per ellipsoid and 360 trials.

use anyhow::{bail, Context, Result};
use mmbeam_core::antenna::{ArrayGeometry, ElementParams};
use mmbeam_core::link::{AntennaSetup, EnvFactorMode};
use mmbeam_core::scattering::{Condition, LinkScenario, MonteCarloConfig};
use mmbeam_core::sweep::SweepGrid;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    pub antenna: AntennaSection,
    pub channel: ChannelSection,
    pub monte_carlo: MonteCarloSection,
    pub sweep: SweepSection,
    pub outputs: OutputsSection,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// "los", "nlos" or "both".
    pub condition: String,
    pub f_c_hz: f64,
    pub h_tx_m: f64,
    pub h_rx_m: f64,
    /// Distance used for the orientation sweep and the SNR curves.
    pub sweep_distance_m: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AntennaSection {
    pub tx_rows: usize,
    pub tx_cols: usize,
    pub tx_row_spacing_wl: f64,
    pub tx_col_spacing_wl: f64,
    pub tx_element_hpbw_az_deg: f64,
    pub tx_element_hpbw_el_deg: f64,
    pub tx_element_front_back_db: f64,
    pub tx_element_sidelobe_db: f64,
    pub tx_element_peak_gain_dbi: f64,
    pub rx_element_hpbw_az_deg: f64,
    pub rx_element_hpbw_el_deg: f64,
    pub rx_element_front_back_db: f64,
    pub rx_element_sidelobe_db: f64,
    pub rx_element_peak_gain_dbi: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub sigma_tau_ns: f64,
    /// "ratio" (default reading) or "ratio-squared" (sensitivity variant).
    pub env_factor_mode: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub paths_per_ellipsoid: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha_start_deg: f64,
    pub alpha_stop_deg: f64,
    pub alpha_step_deg: f64,
    pub beta_start_deg: f64,
    pub beta_stop_deg: f64,
    pub beta_step_deg: f64,
    pub distances_m: Vec<f64>,
    pub snr_db: Vec<f64>,
    /// SNR used for the efficiency-versus-distance comparison.
    pub distance_snr_db: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    pub directory: String,
    pub heatmap_svg: bool,
    pub pattern_cuts: bool,
    pub debug_paths: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let grid = SweepGrid::default_grid();
        let setup = AntennaSetup::default_link();
        Self {
            scenario: ScenarioSection {
                condition: "both".into(),
                f_c_hz: 28e9,
                h_tx_m: 7.0,
                h_rx_m: 1.5,
                sweep_distance_m: 100.0,
            },
            antenna: AntennaSection {
                tx_rows: setup.tx_geometry.n_rows,
                tx_cols: setup.tx_geometry.n_cols,
                tx_row_spacing_wl: setup.tx_geometry.row_spacing_wl,
                tx_col_spacing_wl: setup.tx_geometry.col_spacing_wl,
                tx_element_hpbw_az_deg: setup.tx_element.hpbw_azimuth_deg,
                tx_element_hpbw_el_deg: setup.tx_element.hpbw_elevation_deg,
                tx_element_front_back_db: setup.tx_element.front_back_ratio_db,
                tx_element_sidelobe_db: setup.tx_element.sidelobe_floor_db,
                tx_element_peak_gain_dbi: setup.tx_element.peak_gain_dbi,
                rx_element_hpbw_az_deg: setup.rx_element.hpbw_azimuth_deg,
                rx_element_hpbw_el_deg: setup.rx_element.hpbw_elevation_deg,
                rx_element_front_back_db: setup.rx_element.front_back_ratio_db,
                rx_element_sidelobe_db: setup.rx_element.sidelobe_floor_db,
                rx_element_peak_gain_dbi: setup.rx_element.peak_gain_dbi,
            },
            channel: ChannelSection { sigma_tau_ns: 266.0, env_factor_mode: "ratio".into() },
            monte_carlo: MonteCarloSection { paths_per_ellipsoid: 10, trials: 360, seed: 1 },
            sweep: SweepSection {
                alpha_start_deg: grid.alpha_start_deg,
                alpha_stop_deg: grid.alpha_stop_deg,
                alpha_step_deg: grid.alpha_step_deg,
                beta_start_deg: grid.beta_start_deg,
                beta_stop_deg: grid.beta_stop_deg,
                beta_step_deg: grid.beta_step_deg,
                distances_m: grid.distances_m,
                snr_db: grid.snr_db,
                distance_snr_db: 20.0,
            },
            outputs: OutputsSection {
                directory: "out".into(),
                heatmap_svg: true,
                pattern_cuts: false,
                debug_paths: false,
            },
        }
    }
}

/// Which link conditions an experiment covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionSelect {
    One(Condition),
    Both,
}

impl ConditionSelect {
    pub fn conditions(&self) -> Vec<Condition> {
        match self {
            ConditionSelect::One(c) => vec![*c],
            ConditionSelect::Both => vec![Condition::Los, Condition::Nlos],
        }
    }
}

/// Everything derived from a validated config, ready to run.
#[derive(Debug)]
pub struct ResolvedConfig {
    pub conditions: ConditionSelect,
    pub setup: AntennaSetup,
    pub grid: SweepGrid,
    pub mc: MonteCarloConfig,
    pub sigma_tau_s: f64,
    pub env_mode: EnvFactorMode,
    pub scenario_template: LinkScenario,
    pub distance_snr_db: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("invalid configuration")?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Validate every field against the module preconditions and resolve
    /// into runnable pieces. Nothing is computed before this passes.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let conditions = match self.scenario.condition.to_ascii_lowercase().as_str() {
            "los" => ConditionSelect::One(Condition::Los),
            "nlos" => ConditionSelect::One(Condition::Nlos),
            "both" => ConditionSelect::Both,
            other => bail!("scenario.condition: unknown value {other:?} (use los, nlos or both)"),
        };
        if !(self.scenario.f_c_hz > 0.0) {
            bail!("scenario.f_c_hz: must be positive");
        }
        if !(self.scenario.h_tx_m > 0.0) || !(self.scenario.h_rx_m > 0.0) {
            bail!("scenario.h_tx_m / scenario.h_rx_m: heights must be positive");
        }
        if !(self.scenario.sweep_distance_m > 0.0) {
            bail!("scenario.sweep_distance_m: must be positive");
        }
        if self.channel.sigma_tau_ns < 0.0 {
            bail!("channel.sigma_tau_ns: must be non-negative");
        }
        let env_mode = match self.channel.env_factor_mode.as_str() {
            "ratio" => EnvFactorMode::LossRatio,
            "ratio-squared" => EnvFactorMode::LossRatioSquared,
            other => bail!("channel.env_factor_mode: unknown value {other:?}"),
        };

        let tx_element = ElementParams {
            hpbw_azimuth_deg: self.antenna.tx_element_hpbw_az_deg,
            hpbw_elevation_deg: self.antenna.tx_element_hpbw_el_deg,
            front_back_ratio_db: self.antenna.tx_element_front_back_db,
            sidelobe_floor_db: self.antenna.tx_element_sidelobe_db,
            peak_gain_dbi: self.antenna.tx_element_peak_gain_dbi,
        };
        tx_element
            .validate()
            .map_err(|e| anyhow::anyhow!("antenna.tx_element: {e}"))?;
        let rx_element = ElementParams {
            hpbw_azimuth_deg: self.antenna.rx_element_hpbw_az_deg,
            hpbw_elevation_deg: self.antenna.rx_element_hpbw_el_deg,
            front_back_ratio_db: self.antenna.rx_element_front_back_db,
            sidelobe_floor_db: self.antenna.rx_element_sidelobe_db,
            peak_gain_dbi: self.antenna.rx_element_peak_gain_dbi,
        };
        rx_element
            .validate()
            .map_err(|e| anyhow::anyhow!("antenna.rx_element: {e}"))?;
        let tx_geometry = ArrayGeometry {
            n_rows: self.antenna.tx_rows,
            n_cols: self.antenna.tx_cols,
            row_spacing_wl: self.antenna.tx_row_spacing_wl,
            col_spacing_wl: self.antenna.tx_col_spacing_wl,
        };
        tx_geometry
            .validate()
            .map_err(|e| anyhow::anyhow!("antenna.tx geometry: {e}"))?;

        let grid = SweepGrid {
            alpha_start_deg: self.sweep.alpha_start_deg,
            alpha_stop_deg: self.sweep.alpha_stop_deg,
            alpha_step_deg: self.sweep.alpha_step_deg,
            beta_start_deg: self.sweep.beta_start_deg,
            beta_stop_deg: self.sweep.beta_stop_deg,
            beta_step_deg: self.sweep.beta_step_deg,
            distances_m: self.sweep.distances_m.clone(),
            snr_db: self.sweep.snr_db.clone(),
        };
        grid.validate().map_err(|e| {
            anyhow::anyhow!(
                "sweep.{}: {e}",
                match e.to_string() {
                    s if s.contains("alpha") => "alpha_step_deg",
                    s if s.contains("beta") => "beta_step_deg",
                    s if s.contains("distance") => "distances_m",
                    s if s.contains("SNR") => "snr_db",
                    _ => "grid",
                }
            )
        })?;

        let mc = MonteCarloConfig {
            paths_per_ellipsoid: self.monte_carlo.paths_per_ellipsoid,
            trials: self.monte_carlo.trials,
            seed: self.monte_carlo.seed,
        };
        mc.validate()
            .map_err(|e| anyhow::anyhow!("monte_carlo: {e}"))?;

        if !(self.sweep.distance_snr_db.is_finite()) {
            bail!("sweep.distance_snr_db: must be finite");
        }
        if self.outputs.directory.is_empty() {
            bail!("outputs.directory: must not be empty");
        }

        let scenario_template = LinkScenario {
            d_m: self.scenario.sweep_distance_m,
            h_tx_m: self.scenario.h_tx_m,
            h_rx_m: self.scenario.h_rx_m,
            f_c_hz: self.scenario.f_c_hz,
            condition: Condition::Nlos, // per-run condition is substituted
        };
        scenario_template
            .validate()
            .map_err(|e| anyhow::anyhow!("scenario: {e}"))?;

        Ok(ResolvedConfig {
            conditions,
            setup: AntennaSetup { tx_geometry, tx_element, rx_element },
            grid,
            mc,
            sigma_tau_s: self.channel.sigma_tau_ns * 1e-9,
            env_mode,
            scenario_template,
            distance_snr_db: self.sweep.distance_snr_db,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_resolve() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
        back.resolve().unwrap();
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let mut text = ExperimentConfig::default().to_toml();
        text.push_str("\n[extra_section]\nfoo = 1\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = ExperimentConfig::default()
            .to_toml()
            .replace("sigma_tau_ns", "sigma_tau_nanos");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(format!("{err:#}").contains("sigma_tau_nanos"), "{err:#}");
    }

    #[test]
    fn bad_step_names_offending_field() {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep.alpha_step_deg = 0.7;
        let err = cfg.resolve().unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("alpha_step_deg"), "{msg}");
    }

    #[test]
    fn condition_values_parse() {
        for (s, n) in [("los", 1), ("nlos", 1), ("both", 2)] {
            let mut cfg = ExperimentConfig::default();
            cfg.scenario.condition = s.into();
            assert_eq!(cfg.resolve().unwrap().conditions.conditions().len(), n);
        }
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.condition = "sometimes".into();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn defaults_match_reference_scenario() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.scenario.f_c_hz, 28e9);
        assert_eq!(cfg.scenario.h_tx_m, 7.0);
        assert_eq!(cfg.scenario.h_rx_m, 1.5);
        assert_eq!(cfg.channel.sigma_tau_ns, 266.0);
        assert_eq!(cfg.monte_carlo.paths_per_ellipsoid, 10);
        assert_eq!(cfg.monte_carlo.trials, 360);
        assert_eq!(cfg.sweep.alpha_start_deg, 90.0);
        assert_eq!(cfg.sweep.alpha_stop_deg, 270.0);
        assert_eq!(cfg.sweep.beta_start_deg, -90.0);
        assert_eq!(cfg.sweep.beta_stop_deg, 90.0);
        assert_eq!(cfg.sweep.alpha_step_deg, 1.0);
        assert_eq!(cfg.sweep.distances_m, vec![50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0, 225.0, 250.0]);
        assert_eq!(cfg.antenna.tx_rows, 12);
        assert_eq!(cfg.antenna.tx_cols, 8);
    }
}
