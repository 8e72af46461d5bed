//! Beam-orientation sweeps, optimum search and efficiency curves.
//!
//! A sweep evaluates the relative power factor on a full (alpha, beta) grid
//! against one shared scatterer ensemble, so orientation effects are not
//! confounded with sampling noise. Steered transmit patterns are built once
//! per alpha and cached in a [`SweepContext`]; they do not depend on the
//! scenario, so one context serves every distance and condition of an
//! experiment.
//!
//! Determinism: per-trial grids are computed in parallel but reduced in
//! trial order with compensated sums, so a `(config, seed)` pair always
//! produces bit-identical results.

use crate::antenna::RadiationPattern;
use crate::channel::TapProfile;
use crate::db_to_lin;
use crate::geom::wrap_deg;
use crate::link::{
    environment_factor, spectral_efficiency, AntennaSetup, EnvFactorMode, LinkError,
    OrientedAntenna, TX_MOUNT_AZ_DEG,
};
use crate::scattering::{Ensemble, LinkScenario, MonteCarloConfig, ScatterError};
use crate::sum::Neumaier;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
}

/// Axis and point lists of the experiment grids.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub alpha_start_deg: f64,
    pub alpha_stop_deg: f64,
    pub alpha_step_deg: f64,
    pub beta_start_deg: f64,
    pub beta_stop_deg: f64,
    pub beta_step_deg: f64,
    pub distances_m: Vec<f64>,
    pub snr_db: Vec<f64>,
}

impl SweepGrid {
    /// The experiment defaults: alpha 90..270, beta -90..90, both at 1 deg;
    /// distances 50..250 in 25 m steps; SNR 0..30 dB in 2 dB steps.
    pub fn default_grid() -> Self {
        Self {
            alpha_start_deg: 90.0,
            alpha_stop_deg: 270.0,
            alpha_step_deg: 1.0,
            beta_start_deg: -90.0,
            beta_stop_deg: 90.0,
            beta_step_deg: 1.0,
            distances_m: (0..9).map(|i| 50.0 + 25.0 * i as f64).collect(),
            snr_db: (0..=15).map(|i| 2.0 * i as f64).collect(),
        }
    }

    fn axis(start: f64, stop: f64, step: f64, name: &str) -> Result<Vec<f64>, SweepError> {
        if !(step > 0.0) {
            return Err(SweepError::InvalidGrid(format!("{name} step must be positive")));
        }
        if stop < start {
            return Err(SweepError::InvalidGrid(format!("{name} range is reversed")));
        }
        let span = stop - start;
        let n = span / step;
        if (n - n.round()).abs() > 1e-9 {
            return Err(SweepError::InvalidGrid(format!(
                "{name} step {step} does not divide the range [{start}, {stop}]"
            )));
        }
        let count = n.round() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    }

    pub fn alphas(&self) -> Result<Vec<f64>, SweepError> {
        Self::axis(self.alpha_start_deg, self.alpha_stop_deg, self.alpha_step_deg, "alpha")
    }

    pub fn betas(&self) -> Result<Vec<f64>, SweepError> {
        Self::axis(self.beta_start_deg, self.beta_stop_deg, self.beta_step_deg, "beta")
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let alphas = self.alphas()?;
        let betas = self.betas()?;
        if alphas.is_empty() || betas.is_empty() {
            return Err(SweepError::InvalidGrid("empty angular grid".into()));
        }
        if self.distances_m.is_empty() {
            return Err(SweepError::InvalidGrid("empty distance list".into()));
        }
        if self.distances_m.iter().any(|d| *d <= 0.0) {
            return Err(SweepError::InvalidGrid("distances must be positive".into()));
        }
        if self.snr_db.is_empty() {
            return Err(SweepError::InvalidGrid("empty SNR list".into()));
        }
        // The aligned reference must be on the grid; the power factor is
        // defined against it.
        let has_ref_alpha = alphas.iter().any(|a| (a - 180.0).abs() < 1e-9);
        let has_ref_beta = betas.iter().any(|b| b.abs() < 1e-9);
        if !has_ref_alpha || !has_ref_beta {
            return Err(SweepError::InvalidGrid(
                "grid must contain the aligned orientation (180, 0)".into(),
            ));
        }
        for a in &alphas {
            if wrap_deg(a - 180.0).abs() > 90.0 + 1e-9 {
                return Err(SweepError::InvalidGrid(format!(
                    "alpha {a} steers beyond 90 deg from boresight"
                )));
            }
        }
        Ok(())
    }
}

/// Steered transmit patterns for every alpha of a grid, plus the receive
/// element. Building these dominates sweep setup, so they are computed once
/// and shared.
pub struct SweepContext {
    pub setup: AntennaSetup,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    tx_patterns: Vec<RadiationPattern>,
    rx_pattern: RadiationPattern,
}

impl SweepContext {
    pub fn new(setup: AntennaSetup, grid: &SweepGrid) -> Result<Self, SweepError> {
        grid.validate()?;
        let alphas = grid.alphas()?;
        let betas = grid.betas()?;
        let tx_patterns: Result<Vec<_>, LinkError> = alphas
            .par_iter()
            .map(|&a| setup.tx_pattern(a))
            .collect();
        Ok(Self {
            setup,
            alphas,
            betas,
            tx_patterns: tx_patterns?,
            rx_pattern: setup.rx_pattern()?,
        })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn tx_pattern_at(&self, alpha_index: usize) -> &RadiationPattern {
        &self.tx_patterns[alpha_index]
    }

    pub fn rx_pattern(&self) -> &RadiationPattern {
        &self.rx_pattern
    }
}

/// Location and value of a sweep optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optimum {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub k_db: f64,
}

/// Output of one beam sweep: the relative-power grid and derived figures.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub alphas_deg: Vec<f64>,
    pub betas_deg: Vec<f64>,
    /// Relative power factor, dB, row-major over (alpha, beta).
    pub k_db: Vec<f64>,
    /// Ensemble-mean received power, linear, same layout.
    pub mean_power: Vec<f64>,
    pub optimum: Optimum,
    /// Mean received power at the aligned orientation (the antenna factor
    /// of the straight beams).
    pub k_a_straight: f64,
    /// Mean received power at the optimum orientation.
    pub k_a_optimal: f64,
    pub distance_m: f64,
}

impl SweepResult {
    #[inline]
    pub fn index(&self, alpha_index: usize, beta_index: usize) -> usize {
        alpha_index * self.betas_deg.len() + beta_index
    }

    pub fn k_at(&self, alpha_index: usize, beta_index: usize) -> f64 {
        self.k_db[self.index(alpha_index, beta_index)]
    }
}

/// Relative power factor over the full orientation grid for one scenario.
///
/// One ensemble is generated per `(scenario, seed)` and reused for every
/// grid cell. The optimum is the grid argmax; exact ties resolve toward the
/// smallest `|beta|`, then the smallest `|alpha - 180|`.
pub fn beam_sweep(
    ctx: &SweepContext,
    scenario: &LinkScenario,
    profile: &TapProfile,
    cfg: &MonteCarloConfig,
) -> Result<SweepResult, SweepError> {
    scenario.validate()?;
    cfg.validate()?;
    let ensemble = Ensemble::generate(profile, scenario, cfg)?;
    beam_sweep_over(ctx, scenario, &ensemble)
}

/// Sweep against an existing ensemble (shared-ensemble contract).
pub fn beam_sweep_over(
    ctx: &SweepContext,
    scenario: &LinkScenario,
    ensemble: &Ensemble,
) -> Result<SweepResult, SweepError> {
    let n_a = ctx.alphas.len();
    let n_b = ctx.betas.len();
    let cells = n_a * n_b;

    // Per-trial power grids in parallel, then an ordered compensated
    // reduction over trials.
    let trial_grids: Vec<Vec<f64>> = ensemble
        .trials
        .par_iter()
        .map(|paths| trial_power_grid(ctx, paths))
        .collect();

    let mut mean_power = vec![0.0f64; cells];
    let inv_m = 1.0 / ensemble.trials.len() as f64;
    let mut acc = vec![Neumaier::new(); cells];
    for grid in &trial_grids {
        for (a, v) in acc.iter_mut().zip(grid) {
            a.add(*v);
        }
    }
    for (m, a) in mean_power.iter_mut().zip(&acc) {
        *m = a.value() * inv_m;
    }

    let ref_a = ctx
        .alphas
        .iter()
        .position(|a| (a - 180.0).abs() < 1e-9)
        .expect("validated grid contains alpha = 180");
    let ref_b = ctx
        .betas
        .iter()
        .position(|b| b.abs() < 1e-9)
        .expect("validated grid contains beta = 0");
    let reference = mean_power[ref_a * n_b + ref_b];
    if reference <= 0.0 {
        return Err(SweepError::Link(LinkError::ZeroReferencePower));
    }

    let k_db: Vec<f64> = mean_power
        .iter()
        .map(|p| 10.0 * (p / reference).log10())
        .collect();

    // Argmax with alignment-favouring tie breaks.
    let mut best = (0usize, 0usize);
    let mut best_k = f64::NEG_INFINITY;
    for ia in 0..n_a {
        for ib in 0..n_b {
            let k = k_db[ia * n_b + ib];
            if k > best_k || (k == best_k && tie_break(ctx, (ia, ib), best)) {
                best_k = k;
                best = (ia, ib);
            }
        }
    }

    let optimum = Optimum {
        alpha_deg: ctx.alphas[best.0],
        beta_deg: ctx.betas[best.1],
        k_db: best_k,
    };
    Ok(SweepResult {
        alphas_deg: ctx.alphas.clone(),
        betas_deg: ctx.betas.clone(),
        k_a_straight: reference,
        k_a_optimal: mean_power[best.0 * n_b + best.1],
        k_db,
        mean_power,
        optimum,
        distance_m: scenario.d_m,
    })
}

fn tie_break(ctx: &SweepContext, cand: (usize, usize), incumbent: (usize, usize)) -> bool {
    let beta_c = ctx.betas[cand.1].abs();
    let beta_i = ctx.betas[incumbent.1].abs();
    if beta_c != beta_i {
        return beta_c < beta_i;
    }
    let alpha_c = (ctx.alphas[cand.0] - 180.0).abs();
    let alpha_i = (ctx.alphas[incumbent.0] - 180.0).abs();
    alpha_c < alpha_i
}

/// Power grid of a single trial: factorized as (alpha x path) transmit
/// gains times (beta x path) receive gains.
fn trial_power_grid(ctx: &SweepContext, paths: &[crate::scattering::PathRealization]) -> Vec<f64> {
    let n_a = ctx.alphas.len();
    let n_b = ctx.betas.len();
    let n_p = paths.len();

    // Weighted transmit gains per (alpha, path).
    let mut wt = vec![0.0f64; n_a * n_p];
    for (ia, pattern) in ctx.tx_patterns.iter().enumerate() {
        let tx = OrientedAntenna { pattern, mount_azimuth_deg: TX_MOUNT_AZ_DEG };
        let row = &mut wt[ia * n_p..(ia + 1) * n_p];
        for (ip, p) in paths.iter().enumerate() {
            row[ip] = p.power_weight
                * db_to_lin(tx.gain_dbi(p.aod.azimuth_deg(), p.aod.elevation_deg()));
        }
    }

    // Receive gains per (beta, path).
    let mut rg = vec![0.0f64; n_b * n_p];
    for (ib, &beta) in ctx.betas.iter().enumerate() {
        let rx = OrientedAntenna { pattern: &ctx.rx_pattern, mount_azimuth_deg: beta };
        let row = &mut rg[ib * n_p..(ib + 1) * n_p];
        for (ip, p) in paths.iter().enumerate() {
            row[ip] = db_to_lin(rx.gain_dbi(p.aoa.azimuth_deg(), p.aoa.elevation_deg()));
        }
    }

    let mut grid = vec![0.0f64; n_a * n_b];
    for ia in 0..n_a {
        let t_row = &wt[ia * n_p..(ia + 1) * n_p];
        for ib in 0..n_b {
            let r_row = &rg[ib * n_p..(ib + 1) * n_p];
            let mut acc = Neumaier::new();
            for ip in 0..n_p {
                acc.add(t_row[ip] * r_row[ip]);
            }
            grid[ia * n_b + ib] = acc.value();
        }
    }
    grid
}

/// Spectral-efficiency-versus-SNR curves for the straight and optimal
/// orientations of a completed sweep.
#[derive(Clone, Debug)]
pub struct EfficiencyCurves {
    pub snr_db: Vec<f64>,
    pub c_straight: Vec<f64>,
    pub c_optimal: Vec<f64>,
}

pub fn efficiency_curves(
    scenario: &LinkScenario,
    sweep: &SweepResult,
    snr_db: &[f64],
    env_mode: EnvFactorMode,
) -> Result<EfficiencyCurves, SweepError> {
    let k_e = environment_factor(scenario, env_mode)?.linear;
    let mut c_straight = Vec::with_capacity(snr_db.len());
    let mut c_optimal = Vec::with_capacity(snr_db.len());
    for &s in snr_db {
        let snr = db_to_lin(s);
        c_straight.push(spectral_efficiency(sweep.k_a_straight, k_e, snr)?);
        c_optimal.push(spectral_efficiency(sweep.k_a_optimal, k_e, snr)?);
    }
    Ok(EfficiencyCurves { snr_db: snr_db.to_vec(), c_straight, c_optimal })
}

/// Spectral efficiency versus distance at a fixed SNR, for straight and
/// optimal orientations; one sweep per distance.
#[derive(Clone, Debug)]
pub struct DistanceCurves {
    pub distances_m: Vec<f64>,
    pub c_straight: Vec<f64>,
    pub c_optimal: Vec<f64>,
    pub snr_db: f64,
}

pub fn distance_comparison(
    ctx: &SweepContext,
    template: &LinkScenario,
    profile: &TapProfile,
    cfg: &MonteCarloConfig,
    distances_m: &[f64],
    snr_db: f64,
    env_mode: EnvFactorMode,
) -> Result<DistanceCurves, SweepError> {
    let snr = db_to_lin(snr_db);
    let mut c_straight = Vec::with_capacity(distances_m.len());
    let mut c_optimal = Vec::with_capacity(distances_m.len());
    for &d in distances_m {
        let scenario = LinkScenario { d_m: d, ..*template };
        let sweep = beam_sweep(ctx, &scenario, profile, cfg)?;
        let k_e = environment_factor(&scenario, env_mode)?.linear;
        c_straight.push(spectral_efficiency(sweep.k_a_straight, k_e, snr)?);
        c_optimal.push(spectral_efficiency(sweep.k_a_optimal, k_e, snr)?);
    }
    Ok(DistanceCurves {
        distances_m: distances_m.to_vec(),
        c_straight,
        c_optimal,
        snr_db,
    })
}
