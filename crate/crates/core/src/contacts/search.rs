use crate::astro::{
    geodetic_to_ecef, norm, sub, AstroError, EpochUtc, PropagatorKind, SatellitePropagator, Vec3,
};
use crate::exec::Execution;
use crate::model::{Satellite, Scenario, StationLocation};

use super::{elevation_from, ContactWindow};

/// Sampled local maxima this close below the mask are searched for short passes.
const PEAK_MARGIN_DEG: f64 = 5.0;
const BOUNDARY_TOL_S: f64 = 1e-3;
const PEAK_TOL_S: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct ContactSearch {
    pub start: EpochUtc,
    pub end: EpochUtc,
    pub min_elevation_deg: f64,
    pub coarse_step_s: f64,
    pub propagator: PropagatorKind,
    pub execution: Execution,
}

impl ContactSearch {
    pub fn for_scenario(scenario: &Scenario, execution: Execution) -> Self {
        ContactSearch {
            start: scenario.t_sim_start,
            end: scenario.t_sim_end,
            min_elevation_deg: scenario.contact.min_elevation_deg,
            coarse_step_s: scenario.contact.coarse_step_s,
            propagator: scenario.contact.propagator,
            execution,
        }
    }

    fn sample_times(&self) -> Vec<EpochUtc> {
        let span = self.end - self.start;
        let n = (span / self.coarse_step_s).ceil() as usize;
        let mut times: Vec<EpochUtc> = (0..n)
            .map(|k| self.start + k as f64 * self.coarse_step_s)
            .filter(|t| *t < self.end)
            .collect();
        times.push(self.end);
        times
    }
}

#[derive(Clone, Debug, Default)]
pub struct ContactReport {
    pub contacts: Vec<ContactWindow>,
    /// Satellites dropped because propagation failed, with the reason.
    pub excluded: Vec<(u32, String)>,
}

struct Site {
    id: u32,
    provider_id: u32,
    data_rate: f64,
    ecef: Vec3,
    up: Vec3,
}

struct Track {
    satellite_id: u32,
    data_rate: f64,
    propagator: SatellitePropagator,
    samples: Vec<Vec3>,
}

pub fn find_contacts_for_scenario(scenario: &Scenario, execution: Execution) -> ContactReport {
    find_contacts(
        &scenario.satellites,
        &scenario.stations,
        &ContactSearch::for_scenario(scenario, execution),
    )
}

/// All visibility windows of every satellite over every station.
///
/// Elevation is sampled every `coarse_step_s`; rise and set times are refined
/// by root bracketing, and sampled near-misses are searched for short passes.
/// Windows are clipped to the search interval and numbered in
/// (satellite, start, station) order.
pub fn find_contacts(
    satellites: &[Satellite],
    stations: &[StationLocation],
    search: &ContactSearch,
) -> ContactReport {
    assert!(search.coarse_step_s > 0.0, "coarse step must be positive");
    assert!(search.end > search.start, "search interval must be non-empty");
    let times = search.sample_times();
    let sites: Vec<Site> = stations
        .iter()
        .map(|s| Site {
            id: s.id,
            provider_id: s.provider_id,
            data_rate: s.data_rate,
            ecef: geodetic_to_ecef(&s.geodetic),
            up: s.geodetic.up(),
        })
        .collect();

    let tracks: Vec<Result<Track, (u32, String)>> = search.execution.map(satellites, |sat| {
        let fail = |e: AstroError| (sat.id, e.to_string());
        let propagator = SatellitePropagator::new(&sat.tle, search.propagator).map_err(fail)?;
        let samples = times
            .iter()
            .map(|t| propagator.position(*t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        Ok(Track {
            satellite_id: sat.id,
            data_rate: sat.data_rate,
            propagator,
            samples,
        })
    });

    let mut report = ContactReport::default();
    let mut good = Vec::new();
    for t in tracks {
        match t {
            Ok(track) => good.push(track),
            Err(e) => {
                log::warn!("satellite {} excluded from contact search: {}", e.0, e.1);
                report.excluded.push(e);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..good.len())
        .flat_map(|a| (0..sites.len()).map(move |b| (a, b)))
        .collect();
    let found = search.execution.map(&pairs, |&(a, b)| {
        (a, pair_windows(&good[a], &sites[b], &times, search))
    });

    let mut failed = vec![None; good.len()];
    let mut contacts = Vec::new();
    for (a, res) in found {
        match res {
            Ok(ws) => contacts.extend(ws),
            Err(e) => failed[a] = Some(e.to_string()),
        }
    }
    for (a, reason) in failed.into_iter().enumerate() {
        if let Some(reason) = reason {
            let id = good[a].satellite_id;
            contacts.retain(|c: &ContactWindow| c.satellite_id != id);
            report.excluded.push((id, reason));
        }
    }
    report.excluded.sort_by_key(|e| e.0);
    report.contacts = number(contacts);
    report
}

fn number(mut contacts: Vec<ContactWindow>) -> Vec<ContactWindow> {
    contacts.sort_by(|x, y| {
        (x.satellite_id, x.start, x.station_id).cmp(&(y.satellite_id, y.start, y.station_id))
    });
    for (k, c) in contacts.iter_mut().enumerate() {
        c.id = k as u32;
    }
    contacts
}

/// Restricts windows to `[start, end]`, drops empty ones and renumbers.
pub fn clip_contacts(contacts: &[ContactWindow], start: EpochUtc, end: EpochUtc) -> Vec<ContactWindow> {
    let clipped = contacts
        .iter()
        .filter_map(|c| {
            let s = c.start.max(start);
            let e = c.end.min(end);
            (e > s).then(|| ContactWindow {
                start: s,
                end: e,
                duration: e - s,
                ..c.clone()
            })
        })
        .collect();
    number(clipped)
}

fn pair_windows(
    track: &Track,
    site: &Site,
    times: &[EpochUtc],
    search: &ContactSearch,
) -> Result<Vec<ContactWindow>, AstroError> {
    let mask = search.min_elevation_deg;
    let el_of = |r: Vec3| {
        let los = sub(r, site.ecef);
        elevation_from(los, norm(los).max(1e-9), site.up)
    };
    let el_at = |t: EpochUtc| -> Result<f64, AstroError> { Ok(el_of(track.propagator.position(t)?)) };
    let els: Vec<f64> = track.samples.iter().map(|r| el_of(*r)).collect();
    let n = els.len();
    let visible = |k: usize| els[k] >= mask;

    let mut spans: Vec<(EpochUtc, EpochUtc, f64)> = Vec::new();
    let mut k = 0;
    while k < n {
        if visible(k) {
            let a = k;
            while k + 1 < n && visible(k + 1) {
                k += 1;
            }
            let b = k;
            let start = if a == 0 {
                times[0]
            } else {
                crossing(&el_at, mask, times[a - 1], times[a])?
            };
            let end = if b == n - 1 {
                times[n - 1]
            } else {
                crossing(&el_at, mask, times[b + 1], times[b])?
            };
            let peak = (a..=b).max_by(|x, y| els[*x].total_cmp(&els[*y])).unwrap();
            let lo = if peak > 0 { times[peak - 1] } else { times[peak] }.max(start);
            let hi = if peak + 1 < n { times[peak + 1] } else { times[peak] }.min(end);
            let (_, top) = golden_max(&el_at, lo, hi)?;
            spans.push((start, end, top.max(els[peak])));
        } else if els[k] >= mask - PEAK_MARGIN_DEG
            && (k == 0 || els[k] >= els[k - 1])
            && (k + 1 == n || els[k] >= els[k + 1])
        {
            let lo = if k > 0 { times[k - 1] } else { times[k] };
            let hi = if k + 1 < n { times[k + 1] } else { times[k] };
            let (tp, top) = golden_max(&el_at, lo, hi)?;
            if top >= mask {
                let start = if tp <= lo { lo } else { crossing(&el_at, mask, lo, tp)? };
                let end = if tp >= hi { hi } else { crossing(&el_at, mask, hi, tp)? };
                spans.push((start, end, top));
            }
        }
        k += 1;
    }

    Ok(spans
        .into_iter()
        .filter(|(s, e, _)| e > s)
        .map(|(start, end, max_elevation)| ContactWindow {
            id: 0,
            satellite_id: track.satellite_id,
            station_id: site.id,
            provider_id: site.provider_id,
            start,
            end,
            duration: end - start,
            data_rate: site.data_rate.min(track.data_rate),
            max_elevation,
        })
        .collect())
}

/// Mask crossing between `out` (below the mask) and `inside` (at or above it),
/// returned on the visible side of the final bracket.
fn crossing<F>(el_at: &F, mask: f64, out: EpochUtc, inside: EpochUtc) -> Result<EpochUtc, AstroError>
where
    F: Fn(EpochUtc) -> Result<f64, AstroError>,
{
    // Illinois variant of regula falsi on offsets from `out`.
    let (mut a, mut b) = (0.0, inside - out);
    let (mut fa, mut fb) = (el_at(out)? - mask, el_at(inside)? - mask);
    if fa >= 0.0 {
        return Ok(out);
    }
    let mut side = 0i8;
    for _ in 0..100 {
        if (b - a).abs() <= BOUNDARY_TOL_S {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c - a.min(b) > 0.0 && a.max(b) - c > 0.0) {
            c = 0.5 * (a + b);
        }
        let fc = el_at(out + c)? - mask;
        if fc >= 0.0 {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Ok(out + b)
}

fn golden_max<F>(el_at: &F, lo: EpochUtc, hi: EpochUtc) -> Result<(EpochUtc, f64), AstroError>
where
    F: Fn(EpochUtc) -> Result<f64, AstroError>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0, hi - lo);
    if b <= 0.0 {
        return Ok((lo, el_at(lo)?));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (el_at(lo + c)?, el_at(lo + d)?);
    while b - a > PEAK_TOL_S {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = el_at(lo + c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = el_at(lo + d)?;
        }
    }
    let (t, f) = if fc > fd { (c, fc) } else { (d, fd) };
    let (fa, fb) = (el_at(lo)?, el_at(hi)?);
    if fa >= f && fa >= fb {
        Ok((lo, fa))
    } else if fb >= f {
        Ok((hi, fb))
    } else {
        Ok((lo + t, f))
    }
}
