//! Link-level simulator for a millimeter-wave downlink with steerable
//! antenna beams.
//!
//! The crate models the downlink between a base-station panel array and a
//! single-element terminal in an urban macro setting:
//!
//! - [`antenna`] — parametric element patterns, steered rectangular array
//!   patterns, beamwidth and directivity measurement;
//! - [`channel`] — scaled tapped-delay-line power-delay profiles and the
//!   free-space / urban-macro path-loss models;
//! - [`scattering`] — per-tap confocal ellipsoid geometry and seeded Monte
//!   Carlo generation of propagation paths with departure/arrival angles;
//! - [`link`] — received power, relative power factor, environment factor
//!   and modified-Shannon spectral efficiency;
//! - [`sweep`] — beam-orientation grids, optimum search, efficiency-vs-SNR
//!   and efficiency-vs-distance curves.
//!
//! All randomness is derived from an explicit 64-bit seed; a given
//! `(seed, trial)` pair always reproduces the same realization regardless of
//! thread count or execution order.

pub mod antenna;
pub mod channel;
pub mod geom;
pub mod link;
pub mod scattering;
pub mod sum;
pub mod sweep;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Convert a decibel quantity to its linear ratio.
#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear ratio to decibels.
#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
