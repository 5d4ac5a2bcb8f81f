//! Small hand-built scenarios with explicit contact windows.

use std::collections::BTreeSet;

use crate::astro::{EpochUtc, GeodeticPoint, TleRecord};
use crate::contacts::ContactWindow;
use crate::model::{Band, Provider, Satellite, Scenario, StationLocation, StationStatus};

pub fn provider(id: u32, name: &str, integration_cost: f64) -> Provider {
    Provider {
        id,
        name: name.to_string(),
        integration_cost,
    }
}

/// Per-pass priced S/X station on the equator.
pub fn station(id: u32, provider_id: u32, name: &str) -> StationLocation {
    StationLocation {
        id,
        provider_id,
        name: name.to_string(),
        country: "Nowhere".to_string(),
        geodetic: GeodeticPoint {
            latitude: 0.0,
            longitude: id as f64,
            altitude: 0.0,
        },
        bands: BTreeSet::from([Band::S, Band::X]),
        status: StationStatus::Operational,
        data_rate: 1.0e9,
        setup_cost: 1_000.0,
        monthly_cost: 100.0,
        license_cost: 10.0,
        per_pass_cost: 1.0,
        per_minute_cost: 0.0,
    }
}

pub fn satellite(id: u32) -> Satellite {
    let epoch = EpochUtc::parse_iso("2024-09-10T00:00:00Z").expect("constant epoch");
    let tle = TleRecord::from_elements(
        Some(&format!("TOY-{id}")),
        90_000 + id,
        epoch,
        97.5,
        10.0 * id as f64,
        0.001,
        90.0,
        0.0,
        15.2,
        1e-4,
    )
    .expect("valid toy elements");
    Satellite {
        id,
        name: format!("TOY-{id}"),
        tle,
        data_rate: 1.0e9,
        supported_bands: BTreeSet::from([Band::S, Band::X]),
    }
}

/// Contact from `start` to `end` seconds after the scenario's simulation start.
pub fn contact(
    scenario: &Scenario,
    id: u32,
    satellite_id: u32,
    station_id: u32,
    start: f64,
    end: f64,
) -> ContactWindow {
    let st = scenario.station(station_id).expect("toy station exists");
    let sat = scenario.satellite(satellite_id).expect("toy satellite exists");
    ContactWindow {
        id,
        satellite_id,
        station_id,
        provider_id: st.provider_id,
        start: scenario.t_sim_start + start,
        end: scenario.t_sim_start + end,
        duration: end - start,
        data_rate: st.data_rate.min(sat.data_rate),
        max_elevation: 45.0,
    }
}

/// One provider, one station, one satellite.
pub fn single_station() -> Scenario {
    Scenario::new(
        vec![provider(0, "Acme", 5_000.0)],
        vec![station(0, 0, "Alpha")],
        vec![satellite(0)],
    )
}

/// Two providers with one station each and one satellite.
pub fn two_stations() -> Scenario {
    Scenario::new(
        vec![provider(0, "Acme", 5_000.0), provider(1, "Bolt", 5_000.0)],
        vec![station(0, 0, "Alpha"), station(1, 1, "Bravo")],
        vec![satellite(0)],
    )
}

/// Seeded small instance with at most `max_binaries` binary variables once
/// built: random contacts over two or three stations, one or two satellites,
/// a random objective and random optional families.
pub fn random_instance(seed: u64, max_binaries: usize) -> (Scenario, Vec<ContactWindow>) {
    use crate::formulation::build_model;
    use crate::model::Objective;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective = [Objective::MinCost, Objective::MaxData, Objective::MinMaxGap][rng.random_range(0..3)];
    let mut n_contacts = rng.random_range(2..=6usize);
    loop {
        let n_stations = rng.random_range(2..=3u32);
        let mut s = Scenario::new(
            vec![provider(0, "Acme", rng.random_range(1_000.0..9_000.0)), provider(1, "Bolt", rng.random_range(1_000.0..9_000.0))],
            (0..n_stations)
                .map(|k| {
                    let mut st = station(k, k % 2, ["Alpha", "Bravo", "Charlie"][k as usize]);
                    st.setup_cost = rng.random_range(500.0..2_000.0);
                    st.monthly_cost = rng.random_range(50.0..150.0);
                    st.license_cost = rng.random_range(0.0..50.0);
                    if rng.random_bool(0.5) {
                        st.per_pass_cost = 0.0;
                        st.per_minute_cost = rng.random_range(0.5..3.0);
                    }
                    st.data_rate = rng.random_range(0.5e9..1.5e9);
                    st
                })
                .collect(),
            (0..rng.random_range(1..=2u32)).map(satellite).collect(),
        );
        s.config.objective = objective;
        s.config.t_period = s.t_sim();
        s.config.t_min = 120.0;
        s.config.d_s_min = Some([0.0, 5e10, 2e11][rng.random_range(0..3)]);
        s.config.e_max = Some([150.0, 400.0, 1e6][rng.random_range(0..3)]);
        if rng.random_bool(0.2) {
            s.config.p_max = Some(1);
        }
        if rng.random_bool(0.2) {
            s.config.m_max = Some(1);
        }
        let n_sats = s.satellites.len() as u32;
        let mut cs: Vec<ContactWindow> = (0..n_contacts)
            .map(|_| {
                let start = rng.random_range(0.0..4_000.0f64).round();
                let dur = rng.random_range(60.0..900.0f64).round();
                contact(&s, 0, rng.random_range(0..n_sats), rng.random_range(0..n_stations), start, start + dur)
            })
            .collect();
        cs.sort_by(|a, b| (a.satellite_id, a.start, a.station_id).cmp(&(b.satellite_id, b.start, b.station_id)));
        for (k, c) in cs.iter_mut().enumerate() {
            c.id = k as u32;
        }
        let model = build_model(&s, &cs).expect("random instance builds");
        if model.binary_count() <= max_binaries || n_contacts <= 1 {
            return (s, cs);
        }
        n_contacts -= 1;
    }
}
