use serde::{Deserialize, Serialize};

use super::frames::teme_to_ecef;
use super::kepler::KeplerJ2;
use super::sgp4::{Sgp4, Sgp4Failure};
use super::tle::TleRecord;
use super::{AstroError, EpochUtc, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorKind {
    #[default]
    Sgp4,
    KeplerJ2,
}

/// Earth-fixed state: metres and metres per second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcefState {
    pub epoch: EpochUtc,
    pub position: Vec3,
    pub velocity: Vec3,
}

#[derive(Clone, Debug)]
enum Engine {
    Sgp4(Box<Sgp4>),
    KeplerJ2(KeplerJ2),
}

/// A TLE record with its propagator initialised once, for repeated queries.
#[derive(Clone, Debug)]
pub struct SatellitePropagator {
    norad_id: u32,
    epoch: EpochUtc,
    engine: Engine,
}

impl SatellitePropagator {
    pub fn new(record: &TleRecord, kind: PropagatorKind) -> Result<Self, AstroError> {
        let engine = match kind {
            PropagatorKind::Sgp4 => Engine::Sgp4(Box::new(Sgp4::new(record).map_err(|f| {
                failure(record.norad_id, record.epoch, f)
            })?)),
            PropagatorKind::KeplerJ2 => Engine::KeplerJ2(KeplerJ2::new(record)),
        };
        Ok(SatellitePropagator {
            norad_id: record.norad_id,
            epoch: record.epoch,
            engine,
        })
    }

    pub fn norad_id(&self) -> u32 {
        self.norad_id
    }

    /// Inertial (TEME) position and velocity in km and km/s.
    pub fn inertial_km(&self, epoch: EpochUtc) -> Result<(Vec3, Vec3), AstroError> {
        let dt = epoch - self.epoch;
        match &self.engine {
            Engine::Sgp4(s) => s
                .propagate(dt / 60.0)
                .map_err(|f| failure(self.norad_id, epoch, f)),
            Engine::KeplerJ2(k) => {
                let (r, v) = k.propagate(dt);
                if super::norm(r) < super::WGS84_A_KM * (1.0 - super::WGS84_F) {
                    return Err(failure(self.norad_id, epoch, Sgp4Failure::Decayed));
                }
                Ok((r, v))
            }
        }
    }

    pub fn state(&self, epoch: EpochUtc) -> Result<EcefState, AstroError> {
        let (r, v) = self.inertial_km(epoch)?;
        let (re, ve) = teme_to_ecef(r, v, epoch.gmst());
        Ok(EcefState {
            epoch,
            position: re.map(|x| x * 1000.0),
            velocity: ve.map(|x| x * 1000.0),
        })
    }

    /// Earth-fixed position in metres.
    pub fn position(&self, epoch: EpochUtc) -> Result<Vec3, AstroError> {
        Ok(self.state(epoch)?.position)
    }
}

fn failure(norad_id: u32, epoch: EpochUtc, f: Sgp4Failure) -> AstroError {
    AstroError::Propagation {
        norad_id,
        epoch,
        reason: f.to_string(),
    }
}

/// SGP4 propagation of `record` to `epoch`, rotated to the Earth-fixed frame.
///
/// Accuracy degrades with distance from the element epoch; beyond roughly 30
/// days the result is geometry-grade only.
pub fn propagate(record: &TleRecord, epoch: EpochUtc) -> Result<EcefState, AstroError> {
    propagate_with(record, epoch, PropagatorKind::Sgp4)
}

pub fn propagate_with(
    record: &TleRecord,
    epoch: EpochUtc,
    kind: PropagatorKind,
) -> Result<EcefState, AstroError> {
    SatellitePropagator::new(record, kind)?.state(epoch)
}
