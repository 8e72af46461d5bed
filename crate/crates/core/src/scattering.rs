//! Multi-ellipsoidal scatter geometry and Monte Carlo path generation.
//!
//! Each scattered tap of a power-delay profile defines a confocal prolate
//! spheroid with the transmitter and receiver at its foci: every point on
//! the surface produces exactly the tap's excess delay. Scatterers are
//! drawn on the upper (above-ground) half of each surface by casting rays
//! from the transmitter focus: the departure azimuth is uniform over the
//! full circle and the departure elevation is uniform over the elevations
//! that reach the above-ground part of the surface. The elevation law is an
//! explicit modeling choice, kept behind `draw_elevation_range` so it can
//! be swapped without touching callers.
//!
//! Trials are mutually independent: trial `t` consumes the ChaCha stream
//! `t` of the experiment seed, so results depend only on `(seed, trial)`
//! and never on thread scheduling.

use crate::channel::{TapKind, TapProfile};
use crate::geom::{BeamOrientation, Vec3};
use crate::sum::compensated_sum;
use crate::SPEED_OF_LIGHT;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Excess path length below which an ellipsoid is treated as collapsed onto
/// the transmitter-receiver segment, meters.
pub const DEGENERATE_EXCESS_M: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ScatterError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),
    #[error("trial index {trial} out of range (trial count {count})")]
    TrialOutOfRange { trial: usize, count: usize },
    #[error("profile has no realizable paths")]
    NoPaths,
}

/// Line-of-sight condition of a link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Los,
    Nlos,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::Los => write!(f, "los"),
            Condition::Nlos => write!(f, "nlos"),
        }
    }
}

/// Geometry of one transmitter-receiver link.
///
/// The transmitter sits at the coordinate origin at height `h_tx_m`; the
/// receiver sits on the negative OX side at ground distance `d_m`, so the
/// direction transmitter-to-receiver has azimuth 180 deg and
/// receiver-to-transmitter azimuth 0 deg (the aligned orientations).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkScenario {
    pub d_m: f64,
    pub h_tx_m: f64,
    pub h_rx_m: f64,
    pub f_c_hz: f64,
    pub condition: Condition,
}

impl LinkScenario {
    pub fn validate(&self) -> Result<(), ScatterError> {
        if !(self.d_m > 0.0) {
            return Err(ScatterError::InvalidScenario(format!("distance {} m", self.d_m)));
        }
        if !(self.h_tx_m > 0.0) || !(self.h_rx_m > 0.0) {
            return Err(ScatterError::InvalidScenario("heights must be positive".into()));
        }
        if !(self.f_c_hz > 0.0) {
            return Err(ScatterError::InvalidScenario(format!("carrier {} Hz", self.f_c_hz)));
        }
        Ok(())
    }

    pub fn tx_position(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.h_tx_m)
    }

    pub fn rx_position(&self) -> Vec3 {
        Vec3::new(-self.d_m, 0.0, self.h_rx_m)
    }

    /// Straight-line transmitter-receiver distance including the height
    /// difference.
    pub fn d_3d_m(&self) -> f64 {
        (self.d_m * self.d_m + (self.h_tx_m - self.h_rx_m).powi(2)).sqrt()
    }
}

/// One confocal scattering surface, tied to a scattered tap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid {
    /// Position of the tap in the delay-sorted profile.
    pub tap_index: usize,
    pub semi_major_m: f64,
    /// Distance between the foci (the 3D transmitter-receiver distance).
    pub focal_separation_m: f64,
    pub tap_power: f64,
}

impl Ellipsoid {
    /// Excess path length over the direct line, meters.
    pub fn excess_path_m(&self) -> f64 {
        2.0 * self.semi_major_m - self.focal_separation_m
    }

    /// True when the surface collapses onto the focal segment (zero excess
    /// delay); such taps produce no surface scatterers.
    pub fn is_degenerate(&self) -> bool {
        self.excess_path_m() < DEGENERATE_EXCESS_M
    }

    pub fn semi_minor_m(&self) -> f64 {
        let f = self.focal_separation_m / 2.0;
        (self.semi_major_m * self.semi_major_m - f * f).max(0.0).sqrt()
    }
}

/// One ellipsoid per scattered tap, ordered by delay. Direct taps produce
/// no ellipsoid.
pub fn build_ellipsoids(profile: &TapProfile, scenario: &LinkScenario) -> Vec<Ellipsoid> {
    let d_3d = scenario.d_3d_m();
    profile
        .taps
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind == TapKind::Scattered)
        .map(|(i, t)| Ellipsoid {
            tap_index: i,
            semi_major_m: (d_3d + SPEED_OF_LIGHT * t.delay_s) / 2.0,
            focal_separation_m: d_3d,
            tap_power: t.power,
        })
        .collect()
}

/// Monte Carlo sizing: paths per ellipsoid, trial count, seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub paths_per_ellipsoid: usize,
    pub trials: usize,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<(), ScatterError> {
        if self.paths_per_ellipsoid == 0 {
            return Err(ScatterError::InvalidConfig("paths per ellipsoid must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(ScatterError::InvalidConfig("trial count must be >= 1".into()));
        }
        Ok(())
    }
}

/// RNG stream for one trial: stream `trial` of the experiment seed.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Scattered,
}

/// One propagation path of a trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathRealization {
    /// Scatterer position; `None` for the direct path.
    pub scatterer: Option<Vec3>,
    /// Departure angles at the transmitter.
    pub aod: BeamOrientation,
    /// Arrival angles at the receiver.
    pub aoa: BeamOrientation,
    pub delay_s: f64,
    pub power_weight: f64,
    pub kind: PathKind,
    /// Index of the originating tap in the delay-sorted profile.
    pub tap_index: usize,
}

/// Prolate spheroid in focus-centered form, ready for ray casting from the
/// transmitter focus.
struct SpheroidFrame {
    tx: Vec3,
    center: Vec3,
    // Orthonormal frame: u along the focal axis, v/w transverse.
    u: Vec3,
    v: Vec3,
    w: Vec3,
    a2: f64,
    b2: f64,
}

impl SpheroidFrame {
    fn new(e: &Ellipsoid, scenario: &LinkScenario) -> Self {
        let tx = scenario.tx_position();
        let rx = scenario.rx_position();
        let axis = rx.sub(&tx);
        let u = axis.normalized();
        // Horizontal transverse direction; the axis is never vertical here.
        let v = Vec3::new(0.0, 0.0, 1.0).cross(&u).normalized();
        let w = u.cross(&v);
        let b = e.semi_minor_m();
        Self {
            tx,
            center: tx.add(&axis.scale(0.5)),
            u,
            v,
            w,
            a2: e.semi_major_m * e.semi_major_m,
            b2: b * b,
        }
    }

    /// Cast a ray from the transmitter focus; returns the surface point.
    /// The focus is interior, so exactly one forward intersection exists.
    fn cast(&self, az_deg: f64, el_deg: f64) -> Vec3 {
        let dir = BeamOrientation::new(az_deg, el_deg).unit_vector();
        let o = self.tx.sub(&self.center);
        let (ou, ov, ow) = (o.dot(&self.u), o.dot(&self.v), o.dot(&self.w));
        let (du, dv, dw) = (dir.dot(&self.u), dir.dot(&self.v), dir.dot(&self.w));
        let qa = du * du / self.a2 + (dv * dv + dw * dw) / self.b2;
        let qb = 2.0 * (ou * du / self.a2 + (ov * dv + ow * dw) / self.b2);
        let qc = ou * ou / self.a2 + (ov * ov + ow * ow) / self.b2 - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        debug_assert!(disc > 0.0 && qc < 0.0, "ray cast from a non-interior focus");
        let t = (-qb + disc.sqrt()) / (2.0 * qa);
        self.tx.add(&dir.scale(t))
    }
}

/// Elevation interval (degrees) from which departures toward the
/// above-ground half of the surface are drawn, for a given departure
/// azimuth.
///
/// Lower bound: the elevation at which the cast ray grazes the ground
/// plane, found by bisection (the interval upper edge always reaches the
/// zenith because the focus is interior and above ground).
fn draw_elevation_range(frame_az_deg: f64, frame: &SpheroidFrame) -> (f64, f64) {
    let z_at = |el: f64| frame.cast(frame_az_deg, el).z;
    if z_at(-90.0) >= 0.0 {
        return (-90.0, 90.0);
    }
    // z is negative straight down and positive at the horizontal, so a
    // crossing exists in between.
    let mut lo = -90.0;
    let mut hi = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if z_at(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, 90.0)
}

/// Draw `count` scatterer positions on the above-ground half of the
/// surface.
pub fn draw_scatterers(
    e: &Ellipsoid,
    scenario: &LinkScenario,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec3> {
    assert!(!e.is_degenerate(), "cannot draw scatterers on a degenerate ellipsoid");
    let frame = SpheroidFrame::new(e, scenario);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let az = rng.gen_range(0.0..360.0);
        let (el_min, el_max) = draw_elevation_range(az, &frame);
        let mut point = None;
        for _ in 0..64 {
            let el = rng.gen_range(el_min..=el_max);
            let p = frame.cast(az, el);
            if p.z >= 0.0 {
                point = Some(p);
                break;
            }
            // Measure-zero guard: the bisected bound can leave slivers of
            // below-ground elevations when the cut is strongly tilted.
        }
        points.push(point.expect("no above-ground intersection after redraws"));
    }
    points
}

/// All propagation paths of one trial.
///
/// Line-of-sight profiles contribute one direct path carrying the direct
/// tap's power; each non-degenerate scattered tap contributes
/// `paths_per_ellipsoid` surface paths sharing the tap power equally.
/// Degenerate (zero-excess) scattered taps collapse onto the direct segment
/// and are excluded from scatter generation; the remaining weights are
/// renormalized so the total is exactly one.
pub fn realize_paths(
    profile: &TapProfile,
    scenario: &LinkScenario,
    cfg: &MonteCarloConfig,
    trial: usize,
) -> Result<Vec<PathRealization>, ScatterError> {
    scenario.validate()?;
    cfg.validate()?;
    if trial >= cfg.trials {
        return Err(ScatterError::TrialOutOfRange { trial, count: cfg.trials });
    }

    let tx = scenario.tx_position();
    let rx = scenario.rx_position();
    let d_3d = scenario.d_3d_m();
    let ellipsoids = build_ellipsoids(profile, scenario);

    let include_direct = scenario.condition == Condition::Los;
    let direct_power: f64 = if include_direct {
        profile.direct_tap().map(|t| t.power).unwrap_or(0.0)
    } else {
        0.0
    };
    let kept_scatter: f64 = compensated_sum(
        ellipsoids
            .iter()
            .filter(|e| !e.is_degenerate())
            .map(|e| e.tap_power),
    );
    let total_kept = direct_power + kept_scatter;
    if total_kept <= 0.0 {
        return Err(ScatterError::NoPaths);
    }
    let renorm = 1.0 / total_kept;

    let mut rng = trial_rng(cfg.seed, trial);
    let mut paths = Vec::new();

    if include_direct && direct_power > 0.0 {
        let (aod_az, aod_el) = Vec3::direction_angles(&tx, &rx);
        let (aoa_az, aoa_el) = Vec3::direction_angles(&rx, &tx);
        let direct_tap_index = profile
            .taps
            .iter()
            .position(|t| t.kind == TapKind::Direct)
            .expect("direct power implies a direct tap");
        paths.push(PathRealization {
            scatterer: None,
            aod: BeamOrientation::new(aod_az, aod_el),
            aoa: BeamOrientation::new(aoa_az, aoa_el),
            delay_s: d_3d / SPEED_OF_LIGHT,
            power_weight: direct_power * renorm,
            kind: PathKind::Direct,
            tap_index: direct_tap_index,
        });
    }

    let l = cfg.paths_per_ellipsoid;
    for e in &ellipsoids {
        if e.is_degenerate() {
            continue;
        }
        let weight = e.tap_power * renorm / l as f64;
        let delay = 2.0 * e.semi_major_m / SPEED_OF_LIGHT;
        for p in draw_scatterers(e, scenario, l, &mut rng) {
            let (aod_az, aod_el) = Vec3::direction_angles(&tx, &p);
            let (aoa_az, aoa_el) = Vec3::direction_angles(&rx, &p);
            paths.push(PathRealization {
                scatterer: Some(p),
                aod: BeamOrientation::new(aod_az, aod_el),
                aoa: BeamOrientation::new(aoa_az, aoa_el),
                delay_s: delay,
                power_weight: weight,
                kind: PathKind::Scattered,
                tap_index: e.tap_index,
            });
        }
    }

    if paths.is_empty() {
        return Err(ScatterError::NoPaths);
    }
    Ok(paths)
}

/// The full set of per-trial path lists for one scenario.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub trials: Vec<Vec<PathRealization>>,
}

impl Ensemble {
    /// Generate all trials in parallel; output order is by trial index, so
    /// the result is independent of scheduling.
    pub fn generate(
        profile: &TapProfile,
        scenario: &LinkScenario,
        cfg: &MonteCarloConfig,
    ) -> Result<Self, ScatterError> {
        let trials: Result<Vec<_>, _> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| realize_paths(profile, scenario, cfg, t))
            .collect();
        Ok(Self { trials: trials? })
    }

    pub fn trial_count(&self) -> usize {
        self.trials.len()
    }
}
