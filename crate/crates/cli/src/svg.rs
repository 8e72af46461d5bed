//! Self-contained SVG heatmaps of a relative-power grid.
//!
//! One rect per grid cell, axes in degrees, and a vertical color legend in
//! dB. No imaging dependency: the output is plain XML, stable enough to
//! diff in tests.

use mmbeam_core::sweep::SweepResult;
use std::fmt::Write;

pub const CELL_PX: f64 = 4.0;
pub const MARGIN_LEFT: f64 = 70.0;
pub const MARGIN_TOP: f64 = 40.0;
pub const MARGIN_BOTTOM: f64 = 60.0;
pub const LEGEND_W: f64 = 70.0;

/// Perceptually ordered dark-to-bright color stops (blue/green/yellow).
const STOPS: [(f64, [f64; 3]); 5] = [
    (0.0, [68.0, 1.0, 84.0]),
    (0.25, [59.0, 82.0, 139.0]),
    (0.5, [33.0, 145.0, 140.0]),
    (0.75, [94.0, 201.0, 98.0]),
    (1.0, [253.0, 231.0, 37.0]),
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mut lo = STOPS[0];
    let mut hi = STOPS[STOPS.len() - 1];
    for w in STOPS.windows(2) {
        if t >= w[0].0 && t <= w[1].0 {
            lo = w[0];
            hi = w[1];
            break;
        }
    }
    let f = if hi.0 > lo.0 { (t - lo.0) / (hi.0 - lo.0) } else { 0.0 };
    let c: Vec<u8> = (0..3)
        .map(|i| (lo.1[i] + f * (hi.1[i] - lo.1[i])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Pixel position of a cell's top-left corner.
pub fn cell_origin(alpha_index: usize, beta_index: usize, n_betas: usize) -> (f64, f64) {
    (
        MARGIN_LEFT + alpha_index as f64 * CELL_PX,
        MARGIN_TOP + (n_betas - 1 - beta_index) as f64 * CELL_PX,
    )
}

/// Render the grid as a standalone SVG document.
///
/// A constant grid degenerates to a single color; the legend then spans a
/// one-dB band centered on the value.
pub fn heatmap_svg(result: &SweepResult, title: &str) -> String {
    let n_a = result.alphas_deg.len();
    let n_b = result.betas_deg.len();
    let plot_w = n_a as f64 * CELL_PX;
    let plot_h = n_b as f64 * CELL_PX;
    let width = MARGIN_LEFT + plot_w + LEGEND_W + 30.0;
    let height = MARGIN_TOP + plot_h + MARGIN_BOTTOM;

    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    for &k in &result.k_db {
        k_min = k_min.min(k);
        k_max = k_max.max(k);
    }
    if !(k_max > k_min) {
        k_min -= 0.5;
        k_max += 0.5;
    }
    let span = k_max - k_min;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" \
         width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    let _ = write!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        xml_escape(title)
    );

    for ia in 0..n_a {
        for ib in 0..n_b {
            let k = result.k_at(ia, ib);
            let (x, y) = cell_origin(ia, ib, n_b);
            let _ = write!(
                svg,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL_PX}\" height=\"{CELL_PX}\" \
                 fill=\"{}\"/>\n",
                color((k - k_min) / span)
            );
        }
    }

    // Axis ticks every 30 degrees.
    let font = "font-family=\"sans-serif\" font-size=\"11\"";
    for (i, &a) in result.alphas_deg.iter().enumerate() {
        if (a / 30.0 - (a / 30.0).round()).abs() < 1e-9 {
            let x = MARGIN_LEFT + (i as f64 + 0.5) * CELL_PX;
            let y = MARGIN_TOP + plot_h;
            let _ = write!(
                svg,
                "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
                 <text x=\"{x:.1}\" y=\"{:.1}\" {font} text-anchor=\"middle\">{a:.0}</text>\n",
                y + 5.0,
                y + 18.0
            );
        }
    }
    for (i, &b) in result.betas_deg.iter().enumerate() {
        if (b / 30.0 - (b / 30.0).round()).abs() < 1e-9 {
            let (_, y) = cell_origin(0, i, n_b);
            let y = y + 0.5 * CELL_PX;
            let _ = write!(
                svg,
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{MARGIN_LEFT:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>\n\
                 <text x=\"{:.1}\" y=\"{:.1}\" {font} text-anchor=\"end\">{b:.0}</text>\n",
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                y + 4.0
            );
        }
    }
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" {font} text-anchor=\"middle\">alpha (deg)</text>\n\
         <text x=\"16\" y=\"{:.1}\" {font} text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">beta (deg)</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        MARGIN_TOP + plot_h + 38.0,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Legend: vertical gradient in 40 bands with 5 labeled ticks.
    let lx = MARGIN_LEFT + plot_w + 20.0;
    let bands = 40;
    let band_h = plot_h / bands as f64;
    for i in 0..bands {
        let t = 1.0 - (i as f64 + 0.5) / bands as f64;
        let _ = write!(
            svg,
            "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"16\" height=\"{:.2}\" fill=\"{}\"/>\n",
            MARGIN_TOP + i as f64 * band_h,
            band_h + 0.5,
            color(t)
        );
    }
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let y = MARGIN_TOP + plot_h * (1.0 - t);
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" {font}>{:.1} dB</text>\n",
            lx + 20.0,
            y + 4.0,
            k_min + t * span
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
