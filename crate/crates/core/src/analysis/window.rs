use std::io::Write;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::astro::{EpochUtc, TleRecord, SECONDS_PER_DAY};
use crate::contacts::{clip_contacts, find_contacts, ContactSearch, ContactWindow};
use crate::exec::Execution;
use crate::model::{sample_satellites, ContactSettings, StationLocation};
use crate::solver::metrics::satellite_gaps;

/// Simulation spans, days.
pub const DEFAULT_WINDOW_DAYS: [u32; 13] = [1, 2, 3, 5, 7, 10, 20, 30, 50, 60, 90, 100, 180];

pub const WINDOW_CSV_HEADER: [&str; 4] = ["window_days", "mean_gap_s", "mean_contact_s", "contacts_per_day"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub window_days: u32,
    pub mean_gap: f64,
    pub mean_contact_duration: f64,
    pub mean_contacts_per_day: f64,
    /// Satellites in the sample.
    pub sample_size: usize,
    /// Satellites with at least two contacts, the ones behind `mean_gap`.
    pub gap_samples: usize,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample averages of per-satellite contact statistics over a window of
/// `days`, with contacts from all stations merged per satellite.
pub fn window_stats(contacts: &[ContactWindow], satellite_ids: &[u32], days: u32) -> WindowStats {
    let refs: Vec<&ContactWindow> = contacts.iter().collect();
    let gaps = satellite_gaps(&refs);
    let mut gap_means = Vec::new();
    let mut duration_means = Vec::new();
    let mut per_day = Vec::new();
    for id in satellite_ids {
        if let Some(g) = gaps.get(id).and_then(|g| mean(g)) {
            gap_means.push(g);
        }
        let durations: Vec<f64> = contacts.iter().filter(|c| c.satellite_id == *id).map(|c| c.duration).collect();
        if let Some(d) = mean(&durations) {
            duration_means.push(d);
        }
        per_day.push(durations.len() as f64 / days as f64);
    }
    WindowStats {
        window_days: days,
        mean_gap: mean(&gap_means).unwrap_or(0.0),
        mean_contact_duration: mean(&duration_means).unwrap_or(0.0),
        mean_contacts_per_day: mean(&per_day).unwrap_or(0.0),
        sample_size: satellite_ids.len(),
        gap_samples: gap_means.len(),
    }
}

/// Contact statistics of `sample` catalog satellites for each window length.
///
/// Contacts are searched once over the longest window starting at `start`
/// and clipped for the shorter ones. Satellites whose propagation fails are
/// dropped from the sample.
pub fn window_stability_study(
    catalog: &[TleRecord],
    stations: &[StationLocation],
    durations: &[u32],
    sample: usize,
    seed: u64,
    start: EpochUtc,
    settings: &ContactSettings,
    execution: Execution,
) -> Result<Vec<WindowStats>, AnalysisError> {
    let Some(&longest) = durations.iter().max() else {
        return Err(AnalysisError::Input("no window durations given".into()));
    };
    if durations.contains(&0) {
        return Err(AnalysisError::Input("window durations must be positive".into()));
    }
    if sample == 0 {
        return Err(AnalysisError::Input("sample size must be positive".into()));
    }
    let satellites = sample_satellites(catalog, sample, seed)?;
    let search = ContactSearch {
        start,
        end: start + longest as f64 * SECONDS_PER_DAY,
        min_elevation_deg: settings.min_elevation_deg,
        coarse_step_s: settings.coarse_step_s,
        propagator: settings.propagator,
        execution,
    };
    let report = find_contacts(&satellites, stations, &search);
    for (id, why) in &report.excluded {
        log::warn!("satellite {id} left out of the window study: {why}");
    }
    let ids: Vec<u32> = satellites
        .iter()
        .map(|s| s.id)
        .filter(|id| !report.excluded.iter().any(|(x, _)| x == id))
        .collect();
    if ids.is_empty() {
        return Err(AnalysisError::Input("every sampled satellite failed to propagate".into()));
    }
    let mut days: Vec<u32> = durations.to_vec();
    days.sort_unstable();
    days.dedup();
    Ok(execution.map(&days, |d| {
        let clipped = clip_contacts(&report.contacts, start, start + *d as f64 * SECONDS_PER_DAY);
        window_stats(&clipped, &ids, *d)
    }))
}

pub fn write_window_csv<W: Write>(out: W, stats: &[WindowStats]) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WINDOW_CSV_HEADER)?;
    for s in stats {
        w.write_record([
            s.window_days.to_string(),
            s.mean_gap.to_string(),
            s.mean_contact_duration.to_string(),
            s.mean_contacts_per_day.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;

    /// One 600 s pass every `period` seconds for `days` days.
    fn periodic(days: u32, period: f64) -> Vec<ContactWindow> {
        let s = toy::single_station();
        let n = (days as f64 * SECONDS_PER_DAY / period).round() as u32;
        (0..n).map(|k| toy::contact(&s, k, 0, 0, k as f64 * period + 100.0, k as f64 * period + 700.0)).collect()
    }

    #[test]
    fn periodic_pattern_gives_identical_stats_at_multiples() {
        let period = SECONDS_PER_DAY / 4.0;
        let base = window_stats(&periodic(1, period), &[0], 1);
        assert_eq!(base.mean_gap, period - 600.0);
        assert_eq!(base.mean_contact_duration, 600.0);
        assert_eq!(base.mean_contacts_per_day, 4.0);
        for days in [2, 3, 7] {
            let s = window_stats(&periodic(days, period), &[0], days);
            assert_eq!((s.mean_gap, s.mean_contact_duration, s.mean_contacts_per_day), (base.mean_gap, base.mean_contact_duration, base.mean_contacts_per_day));
        }
    }

    #[test]
    fn satellite_without_gaps_is_counted_but_not_averaged() {
        let mut s = toy::single_station();
        s.satellites.push(toy::satellite(1));
        let cs = vec![
            toy::contact(&s, 0, 0, 0, 0.0, 100.0),
            toy::contact(&s, 1, 0, 0, 1_100.0, 1_300.0),
            toy::contact(&s, 2, 1, 0, 5_000.0, 5_400.0),
        ];
        let w = window_stats(&cs, &[0, 1, 2], 1);
        assert_eq!(w.sample_size, 3);
        assert_eq!(w.gap_samples, 1);
        assert_eq!(w.mean_gap, 1_000.0);
        // Satellite means 150 and 400; satellite 2 has no contacts.
        assert_eq!(w.mean_contact_duration, 275.0);
        assert_eq!(w.mean_contacts_per_day, 1.0);
    }

    #[test]
    fn overlapping_contacts_on_two_stations_give_zero_gap() {
        let s = toy::two_stations();
        let cs = vec![toy::contact(&s, 0, 0, 0, 0.0, 600.0), toy::contact(&s, 1, 0, 1, 300.0, 900.0)];
        assert_eq!(window_stats(&cs, &[0], 1).mean_gap, 0.0);
    }

    #[test]
    fn study_is_deterministic_and_sorted() {
        let ds = crate::model::bundled_station_dataset();
        let stations: Vec<StationLocation> = ds.stations.into_iter().take(12).collect();
        let cat = crate::astro::parse_tle_catalog(include_str!("../../data/sample_catalog.tle"));
        let start = EpochUtc::parse_iso("2024-09-11T00:00:00Z").unwrap();
        let run = |exec| {
            window_stability_study(&cat.records, &stations, &[2, 1], 2, 5, start, &ContactSettings::default(), exec).unwrap()
        };
        let a = run(Execution::Sequential);
        assert_eq!(a, run(Execution::Parallel));
        assert_eq!(a.iter().map(|w| w.window_days).collect::<Vec<_>>(), vec![1, 2]);
        assert!(a.iter().all(|w| w.sample_size == 2 && w.mean_gap >= 0.0));
        let mut buf = Vec::new();
        write_window_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("window_days,mean_gap_s,mean_contact_s,contacts_per_day\n"));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let start = EpochUtc::parse_iso("2024-09-11T00:00:00Z").unwrap();
        let r = window_stability_study(&[], &[], &[], 1, 0, start, &ContactSettings::default(), Execution::Sequential);
        assert!(matches!(r, Err(AnalysisError::Input(_))));
    }
}
