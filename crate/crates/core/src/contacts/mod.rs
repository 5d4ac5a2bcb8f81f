//! Satellite to station visibility windows above an elevation mask.

mod output;
mod search;

pub use output::{write_contacts_csv, CONTACTS_CSV_HEADER};
pub use search::{clip_contacts, find_contacts, find_contacts_for_scenario, ContactReport, ContactSearch};

use serde::{Deserialize, Serialize};

use crate::astro::{dot, geodetic_to_ecef, norm, sub, AstroError, EpochUtc, GeodeticPoint, Vec3, MEAN_EARTH_RADIUS_M};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactWindow {
    pub id: u32,
    pub satellite_id: u32,
    pub station_id: u32,
    pub provider_id: u32,
    pub start: EpochUtc,
    pub end: EpochUtc,
    /// `end - start`, seconds.
    pub duration: f64,
    /// bits/s
    pub data_rate: f64,
    /// degrees
    pub max_elevation: f64,
}

impl ContactWindow {
    /// Closed-interval overlap.
    pub fn overlaps(&self, other: &ContactWindow) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn data_volume(&self) -> f64 {
        self.data_rate * self.duration
    }
}

/// Elevation of the satellite above the station's geodetic horizon, degrees.
pub fn elevation(sat_ecef: Vec3, station: &GeodeticPoint) -> Result<f64, AstroError> {
    let site = geodetic_to_ecef(station);
    let los = sub(sat_ecef, site);
    let range = norm(los);
    if range < 1e-6 {
        return Err(AstroError::CoincidentPoints);
    }
    Ok(elevation_from(los, range, station.up()))
}

pub(crate) fn elevation_from(los: Vec3, range: f64, up: Vec3) -> f64 {
    (dot(los, up) / range).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Earth-central half-angle of the region that sees a satellite at
/// `altitude_m` above `min_elevation_deg`, radians. Spherical Earth of mean
/// radius.
pub fn coverage_cone_radius(altitude_m: f64, min_elevation_deg: f64) -> f64 {
    let eps = min_elevation_deg.to_radians();
    let ratio = MEAN_EARTH_RADIUS_M / (MEAN_EARTH_RADIUS_M + altitude_m.max(0.0));
    ((ratio * eps.cos()).clamp(-1.0, 1.0).acos() - eps).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> GeodeticPoint {
        GeodeticPoint::new(0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn zenith_is_ninety() {
        let el = elevation([6_378_137.0 + 500_000.0, 0.0, 0.0], &origin()).unwrap();
        assert!((el - 90.0).abs() < 1e-12);
    }

    #[test]
    fn horizon_plane_is_zero() {
        let el = elevation([6_378_137.0, 1_000_000.0, 250_000.0], &origin()).unwrap();
        assert!(el.abs() < 1e-9, "{el}");
    }

    #[test]
    fn antipodal_overhead_is_minus_ninety() {
        let el = elevation([-6_378_137.0 - 500_000.0, 0.0, 0.0], &origin()).unwrap();
        assert!((el + 90.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_is_an_error() {
        assert!(elevation([6_378_137.0, 0.0, 0.0], &origin()).is_err());
    }

    #[test]
    fn cone_limits() {
        assert!(coverage_cone_radius(525e3, 90.0).abs() < 1e-12);
        assert!(coverage_cone_radius(0.0, 10.0).abs() < 1e-12);
        assert!(coverage_cone_radius(1e-3, 0.0) < 1e-3);
    }

    #[test]
    fn cone_matches_geometry_root() {
        // At the cone edge, a satellite at the given height is seen at exactly
        // the mask elevation; solve that condition by bisection on the angle.
        let (h, eps) = (525e3, 10f64);
        let r = MEAN_EARTH_RADIUS_M;
        let el_at = |lam: f64| {
            let (x, y) = ((r + h) * lam.cos() - r, (r + h) * lam.sin());
            x.atan2(y).to_degrees()
        };
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if el_at(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lam = coverage_cone_radius(h, eps);
        assert!((lam - lo).abs() < 1e-12, "{lam} vs {lo}");
    }
}
