//! Orbit input, propagation and Earth-fixed geometry.

mod frames;
mod kepler;
mod propagate;
mod sgp4;
mod time;
mod tle;

pub use frames::{ecef_to_geodetic, geodetic_to_ecef, teme_to_ecef, GeodeticPoint};
pub use kepler::KeplerJ2;
pub use propagate::{propagate, propagate_with, EcefState, PropagatorKind, SatellitePropagator};
pub use sgp4::{Sgp4, Sgp4Failure};
pub use time::{gmst_from_jd, EpochUtc, JD_J2000, SECONDS_PER_DAY};
pub use tle::{parse_tle_catalog, tle_checksum, TleCatalog, TleDiagnostic, TleRecord};

use thiserror::Error;

pub type Vec3 = [f64; 3];

/// Earth gravitational parameter (WGS84/EGM96), km^3/s^2.
pub const MU_EARTH_KM3_S2: f64 = 398_600.4418;
pub const WGS84_A_M: f64 = 6_378_137.0;
pub const WGS84_A_KM: f64 = WGS84_A_M / 1000.0;
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// IUGG mean Earth radius, metres.
pub const MEAN_EARTH_RADIUS_M: f64 = 6_371_008.8;
/// Earth rotation rate, rad/s.
pub const OMEGA_EARTH: f64 = 7.292_115_146_706_979e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AstroError {
    #[error("invalid TLE: {0}")]
    InvalidTle(String),
    #[error("invalid epoch: {0}")]
    InvalidEpoch(String),
    #[error("invalid geodetic point: {0}")]
    InvalidGeodetic(String),
    #[error("propagation of NORAD {norad_id} failed at {epoch}: {reason}")]
    Propagation {
        norad_id: u32,
        epoch: EpochUtc,
        reason: String,
    },
    #[error("satellite coincides with the station; elevation is undefined")]
    CoincidentPoints,
}

pub fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
