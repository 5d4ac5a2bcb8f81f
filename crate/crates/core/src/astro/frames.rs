use serde::{Deserialize, Serialize};

use super::{AstroError, Vec3, OMEGA_EARTH, WGS84_A_M, WGS84_F};

/// Latitude/longitude in degrees, altitude in metres above the WGS84 ellipsoid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl GeodeticPoint {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, AstroError> {
        let p = GeodeticPoint {
            latitude,
            longitude,
            altitude,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AstroError> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(AstroError::InvalidGeodetic(format!(
                "latitude {} outside [-90, 90]",
                self.latitude
            )));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(AstroError::InvalidGeodetic(format!(
                "longitude {} outside [-180, 180]",
                self.longitude
            )));
        }
        if !self.altitude.is_finite() {
            return Err(AstroError::InvalidGeodetic("altitude is not finite".into()));
        }
        Ok(())
    }

    /// Local up unit vector (ellipsoid normal) in ECEF.
    pub fn up(&self) -> Vec3 {
        let (sl, cl) = self.latitude.to_radians().sin_cos();
        let (so, co) = self.longitude.to_radians().sin_cos();
        [cl * co, cl * so, sl]
    }
}

fn e2() -> f64 {
    WGS84_F * (2.0 - WGS84_F)
}

pub fn geodetic_to_ecef(point: &GeodeticPoint) -> Vec3 {
    let (sl, cl) = point.latitude.to_radians().sin_cos();
    let (so, co) = point.longitude.to_radians().sin_cos();
    let e2 = e2();
    let n = WGS84_A_M / (1.0 - e2 * sl * sl).sqrt();
    [
        (n + point.altitude) * cl * co,
        (n + point.altitude) * cl * so,
        (n * (1.0 - e2) + point.altitude) * sl,
    ]
}

/// Inverse of [`geodetic_to_ecef`] by fixed-point iteration on latitude.
pub fn ecef_to_geodetic(r: Vec3) -> GeodeticPoint {
    let e2 = e2();
    let p = r[0].hypot(r[1]);
    let longitude = r[1].atan2(r[0]).to_degrees();
    if p < 1e-9 {
        let b = WGS84_A_M * (1.0 - WGS84_F);
        let latitude = if r[2] >= 0.0 { 90.0 } else { -90.0 };
        return GeodeticPoint {
            latitude,
            longitude: 0.0,
            altitude: r[2].abs() - b,
        };
    }
    let mut lat = r[2].atan2(p * (1.0 - e2));
    let mut h = 0.0;
    for _ in 0..50 {
        let (s, c) = lat.sin_cos();
        let n = WGS84_A_M / (1.0 - e2 * s * s).sqrt();
        h = if c.abs() > 1e-3 {
            p / c - n
        } else {
            r[2] / s - n * (1.0 - e2)
        };
        let next = r[2].atan2(p * (1.0 - e2 * n / (n + h)));
        let done = (next - lat).abs() < 1e-14;
        lat = next;
        if done {
            break;
        }
    }
    GeodeticPoint {
        latitude: lat.to_degrees(),
        longitude,
        altitude: h,
    }
}

/// Rotate a TEME state into the Earth-fixed frame by GMST only.
pub fn teme_to_ecef(r: Vec3, v: Vec3, gmst: f64) -> (Vec3, Vec3) {
    let (s, c) = gmst.sin_cos();
    let rot = |x: Vec3| [c * x[0] + s * x[1], -s * x[0] + c * x[1], x[2]];
    let re = rot(r);
    let vr = rot(v);
    let ve = [
        vr[0] + OMEGA_EARTH * re[1],
        vr[1] - OMEGA_EARTH * re[0],
        vr[2],
    ];
    (re, ve)
}
