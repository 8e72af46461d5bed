//! Experiment runner: validates a configuration file, runs the configured
//! sweeps and writes CSV tables, optional SVG heatmaps and a
//! reproducibility manifest.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.

mod config;
mod outputs;
mod svg;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::{ExperimentConfig, ResolvedConfig};
use mmbeam_core::antenna::{array_pattern, pattern_cut_csv, RadiationPattern};
use mmbeam_core::geom::BeamOrientation;
use mmbeam_core::scattering::{Condition, Ensemble, LinkScenario};
use mmbeam_core::sweep::{
    beam_sweep_over, distance_comparison, efficiency_curves, SweepContext, SweepResult,
};
use outputs::{fmt_f64, write_text};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Output-directory override; takes precedence over `outputs.directory`.
const OUTPUT_DIR_ENV: &str = "MMBEAM_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "mmbeam", version, about = "mmWave downlink beam-orientation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a configuration and run the experiment.
    Run { config: PathBuf },
    /// Validate a configuration and exit.
    Validate { config: PathBuf },
    /// Print the default configuration (the reference scenario).
    Defaults,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Defaults => {
            print!("{}", ExperimentConfig::default().to_toml());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("configuration OK");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Command::Run { config } => {
            let (cfg, resolved) = match load(&config) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            };
            match run(&cfg, &resolved) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

fn load(path: &PathBuf) -> Result<(ExperimentConfig, ResolvedConfig)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let resolved = cfg.resolve()?;
    Ok((cfg, resolved))
}

fn run(cfg: &ExperimentConfig, resolved: &ResolvedConfig) -> Result<()> {
    let started = Instant::now();
    let out_dir = std::env::var(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|_| PathBuf::from(&cfg.outputs.directory));

    eprintln!("building steered patterns ({} alphas)", resolved.grid.alphas()?.len());
    let ctx = SweepContext::new(resolved.setup, &resolved.grid)?;

    let profile_for = |condition: Condition| {
        let model = match condition {
            Condition::Los => mmbeam_core::channel::TdlModel::TdlD,
            Condition::Nlos => mmbeam_core::channel::TdlModel::TdlB,
        };
        mmbeam_core::channel::scaled_tdl(model, resolved.sigma_tau_s)
    };

    let mut nlos_sweep: Option<SweepResult> = None;
    let mut snr_curve_sweep: Option<(Condition, SweepResult)> = None;

    for condition in resolved.conditions.conditions() {
        let scenario = LinkScenario { condition, ..resolved.scenario_template };
        let profile = profile_for(condition)?;
        let env = mmbeam_core::link::environment_factor(&scenario, resolved.env_mode)?;
        if !env.within_validity {
            eprintln!(
                "warning: path-loss model evaluated outside its nominal validity range \
                 (D = {} m, heights {} / {} m)",
                scenario.d_m, scenario.h_tx_m, scenario.h_rx_m
            );
        }

        eprintln!("sweeping {condition} at D = {} m", scenario.d_m);
        let ensemble = Ensemble::generate(&profile, &scenario, &resolved.mc)?;
        let sweep = beam_sweep_over(&ctx, &scenario, &ensemble)?;

        let name = format!("k_grid_{condition}.csv");
        write_text(&out_dir, &name, &outputs::k_grid_csv(&sweep))?;
        if cfg.outputs.heatmap_svg {
            let title = format!(
                "Relative power factor K(alpha, beta), {condition}, D = {} m",
                scenario.d_m
            );
            write_text(
                &out_dir,
                &format!("k_grid_{condition}.svg"),
                &svg::heatmap_svg(&sweep, &title),
            )?;
        }
        if cfg.outputs.debug_paths {
            write_text(&out_dir, &format!("paths_{condition}.csv"), &paths_debug_csv(&ensemble))?;
        }

        if condition == Condition::Nlos {
            nlos_sweep = Some(sweep.clone());
        }
        // SNR curves follow the most interesting available condition: the
        // non-line-of-sight one when present, else line-of-sight.
        if snr_curve_sweep.is_none() || condition == Condition::Nlos {
            snr_curve_sweep = Some((condition, sweep));
        }
    }

    if let Some((condition, sweep)) = &snr_curve_sweep {
        let scenario = LinkScenario { condition: *condition, ..resolved.scenario_template };
        let curves = efficiency_curves(&scenario, sweep, &resolved.grid.snr_db, resolved.env_mode)?;
        write_text(&out_dir, "se_vs_snr.csv", &outputs::se_vs_snr_csv(&curves))?;
    }

    // Distance comparison runs under non-line-of-sight when it is part of
    // the experiment (straight and optimal orientations per distance).
    if nlos_sweep.is_some() {
        let template = LinkScenario { condition: Condition::Nlos, ..resolved.scenario_template };
        let profile = profile_for(Condition::Nlos)?;
        eprintln!("distance comparison over {:?} m", resolved.grid.distances_m);
        let curves = distance_comparison(
            &ctx,
            &template,
            &profile,
            &resolved.mc,
            &resolved.grid.distances_m,
            resolved.distance_snr_db,
            resolved.env_mode,
        )?;
        write_text(&out_dir, "se_vs_distance.csv", &outputs::se_vs_distance_csv(&curves))?;
    }

    if cfg.outputs.pattern_cuts {
        write_text(&out_dir, "pattern_cuts.csv", &pattern_cuts(resolved)?)?;
    }

    let manifest = outputs::manifest_toml(
        &cfg.to_toml(),
        resolved.mc.seed,
        started.elapsed().as_secs_f64(),
    );
    write_text(&out_dir, "manifest.toml", &manifest)?;
    eprintln!("wrote outputs to {}", out_dir.display());
    Ok(())
}

/// Horizontal-cut gains of the terminal element and the panel steered to
/// 0, 15 and 30 degrees, stacked with a label column.
fn pattern_cuts(resolved: &ResolvedConfig) -> Result<String> {
    let mut out = String::from("pattern,azimuth_deg,elevation_deg,gain_dbi\n");
    fn add(label: &str, pattern: &RadiationPattern, out: &mut String) {
        for line in pattern_cut_csv(pattern, 0.5).lines().skip(1) {
            out.push_str(label);
            out.push(',');
            out.push_str(line);
            out.push('\n');
        }
    }
    let ue = RadiationPattern::element(resolved.setup.rx_element)?;
    add("ue", &ue, &mut out);
    for phi0 in [0.0, 15.0, 30.0] {
        let p = array_pattern(
            resolved.setup.tx_geometry,
            resolved.setup.tx_element,
            BeamOrientation::horizontal(phi0),
        )?;
        add(&format!("panel_{phi0:.0}"), &p, &mut out);
    }
    Ok(out)
}

/// Per-trial path dump: trial, tap, position, angles, delay, weight.
fn paths_debug_csv(ensemble: &Ensemble) -> String {
    let mut out = String::from("trial,tap,x,y,z,aod_az,aoa_az,delay_s,weight\n");
    for (t, trial) in ensemble.trials.iter().enumerate() {
        for p in trial {
            let (x, y, z) = match p.scatterer {
                Some(s) => (fmt_f64(s.x), fmt_f64(s.y), fmt_f64(s.z)),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{t},{},{x},{y},{z},{},{},{},{}\n",
                p.tap_index,
                fmt_f64(p.aod.azimuth_deg()),
                fmt_f64(p.aoa.azimuth_deg()),
                fmt_f64(p.delay_s),
                fmt_f64(p.power_weight)
            ));
        }
    }
    out
}
