//! CSV tables, the heatmap files and the reproducibility manifest.
//!
//! Column orders are frozen:
//! - heatmaps: `alpha_deg,beta_deg,k_db`
//! - curves: `x,y_straight,y_optimal`
//!
//! Values are printed with 17 significant digits, so parsing an emitted CSV
//! recovers the in-memory numbers exactly.

use anyhow::{Context, Result};
use mmbeam_core::sweep::{DistanceCurves, EfficiencyCurves, SweepResult};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Shortest-exact float formatting (17 significant digits upper bound).
pub fn fmt_f64(v: f64) -> String {
    // 17 significant digits always round-trip for f64.
    format!("{v:.16e}")
}

pub fn k_grid_csv(result: &SweepResult) -> String {
    let mut out = String::from("alpha_deg,beta_deg,k_db\n");
    for (ia, a) in result.alphas_deg.iter().enumerate() {
        for (ib, b) in result.betas_deg.iter().enumerate() {
            let _ = writeln!(out, "{a},{b},{}", fmt_f64(result.k_at(ia, ib)));
        }
    }
    out
}

pub fn se_vs_snr_csv(curves: &EfficiencyCurves) -> String {
    let mut out = String::from("x,y_straight,y_optimal\n");
    for i in 0..curves.snr_db.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            curves.snr_db[i],
            fmt_f64(curves.c_straight[i]),
            fmt_f64(curves.c_optimal[i])
        );
    }
    out
}

pub fn se_vs_distance_csv(curves: &DistanceCurves) -> String {
    let mut out = String::from("x,y_straight,y_optimal\n");
    for i in 0..curves.distances_m.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            curves.distances_m[i],
            fmt_f64(curves.c_straight[i]),
            fmt_f64(curves.c_optimal[i])
        );
    }
    out
}

/// Parse a `k_grid` CSV back into (alpha, beta, k) triples.
#[cfg(test)]
pub fn parse_k_grid_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = || -> Result<f64> {
            parts
                .next()
                .context("short row")?
                .parse::<f64>()
                .context("bad number")
        };
        rows.push((next()?, next()?, next()?));
    }
    Ok(rows)
}

/// Reproducibility manifest: the full config echo plus run metadata. The
/// config echo alone is sufficient to re-run the experiment.
pub fn manifest_toml(config_echo: &str, seed: u64, wall_seconds: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[run]");
    let _ = writeln!(out, "tool_version = {:?}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "seed = {seed}");
    let _ = writeln!(out, "wall_seconds = {wall_seconds}");
    let _ = writeln!(out);
    let _ = writeln!(out, "# Full configuration echo; feed this file back to `run`.");
    for line in config_echo.lines() {
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mmbeam_core::sweep::Optimum;

    #[test]
    fn csv_round_trip_is_exact() {
        let alphas = vec![179.0, 180.0, 181.0];
        let betas = vec![-1.0, 0.0, 1.0];
        let k: Vec<f64> = (0..9)
            .map(|i| (i as f64 * 0.123456789).sin() * 7.3)
            .collect();
        let result = SweepResult {
            alphas_deg: alphas.clone(),
            betas_deg: betas.clone(),
            mean_power: k.iter().map(|v| 10f64.powf(v / 10.0)).collect(),
            k_db: k.clone(),
            optimum: Optimum { alpha_deg: 180.0, beta_deg: 0.0, k_db: 0.0 },
            k_a_straight: 1.0,
            k_a_optimal: 1.0,
            distance_m: 100.0,
        };
        let csv = k_grid_csv(&result);
        let rows = parse_k_grid_csv(&csv).unwrap();
        assert_eq!(rows.len(), 9);
        for (ia, a) in alphas.iter().enumerate() {
            for (ib, b) in betas.iter().enumerate() {
                let row = rows[ia * 3 + ib];
                assert_eq!(row.0, *a);
                assert_eq!(row.1, *b);
                assert_eq!(row.2, k[ia * 3 + ib], "value not recovered exactly");
            }
        }
    }

    #[test]
    fn manifest_contains_every_config_line() {
        let echo = "[scenario]\ncondition = \"both\"\nf_c_hz = 28000000000.0";
        let m = manifest_toml(echo, 17, 1.25);
        for line in echo.lines() {
            assert!(m.contains(line), "missing config line {line:?}");
        }
        assert!(m.contains("seed = 17"));
    }
}
