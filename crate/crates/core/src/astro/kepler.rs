use std::f64::consts::TAU;

use super::tle::TleRecord;
use super::{Vec3, MU_EARTH_KM3_S2, WGS84_A_KM};

const J2: f64 = 1.082_626_68e-3;

/// Two-body propagation with secular J2 drift of node, perigee and mean anomaly.
///
/// Initialised directly from TLE mean elements; drag is ignored.
#[derive(Clone, Debug)]
pub struct KeplerJ2 {
    a_km: f64,
    e: f64,
    i: f64,
    raan0: f64,
    argp0: f64,
    m0: f64,
    n: f64,
    raan_dot: f64,
    argp_dot: f64,
}

impl KeplerJ2 {
    pub fn new(tle: &TleRecord) -> Self {
        let n = tle.mean_motion * TAU / 86_400.0;
        let a_km = (MU_EARTH_KM3_S2 / (n * n)).cbrt();
        let e = tle.eccentricity;
        let i = tle.inclination.to_radians();
        let p = a_km * (1.0 - e * e);
        let k = n * J2 * (WGS84_A_KM / p).powi(2);
        let ci = i.cos();
        KeplerJ2 {
            a_km,
            e,
            i,
            raan0: tle.raan.to_radians(),
            argp0: tle.arg_perigee.to_radians(),
            m0: tle.mean_anomaly.to_radians(),
            n,
            raan_dot: -1.5 * k * ci,
            argp_dot: 0.75 * k * (5.0 * ci * ci - 1.0),
        }
    }

    pub fn semi_major_axis_km(&self) -> f64 {
        self.a_km
    }

    /// Inertial position (km) and velocity (km/s) `dt` seconds after epoch.
    pub fn propagate(&self, dt: f64) -> (Vec3, Vec3) {
        let raan = self.raan0 + self.raan_dot * dt;
        let argp = self.argp0 + self.argp_dot * dt;
        let m = (self.m0 + self.n * dt).rem_euclid(TAU);
        let e = self.e;

        let mut ea = if e < 0.8 { m } else { std::f64::consts::PI };
        for _ in 0..30 {
            let f = ea - e * ea.sin() - m;
            let step = f / (1.0 - e * ea.cos());
            ea -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        let (se, ce) = ea.sin_cos();
        let b = (1.0 - e * e).sqrt();
        let r = self.a_km * (1.0 - e * ce);
        let xp = self.a_km * (ce - e);
        let yp = self.a_km * b * se;
        let vfac = (MU_EARTH_KM3_S2 * self.a_km).sqrt() / r;
        let vxp = -vfac * se;
        let vyp = vfac * b * ce;

        let (so, co) = raan.sin_cos();
        let (sw, cw) = argp.sin_cos();
        let (si, ci) = self.i.sin_cos();
        let px = [co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si];
        let qx = [-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si];
        let pos = [
            xp * px[0] + yp * qx[0],
            xp * px[1] + yp * qx[1],
            xp * px[2] + yp * qx[2],
        ];
        let vel = [
            vxp * px[0] + vyp * qx[0],
            vxp * px[1] + vyp * qx[1],
            vxp * px[2] + vyp * qx[2],
        ];
        (pos, vel)
    }
}
