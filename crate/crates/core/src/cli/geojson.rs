use serde_json::{json, Value};

use crate::astro::GeodeticPoint;
use crate::contacts::coverage_cone_radius;
use crate::model::{Scenario, StationLocation};

const SEGMENTS: usize = 64;

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn wrap_lon(lon: f64) -> f64 {
    let w = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 && lon > 0.0 { 180.0 } else { w }
}

/// Closed ring of `[lon, lat]` points on the small circle of angular radius
/// `radius_rad` around `center`, on a sphere.
pub fn coverage_polygon(center: &GeodeticPoint, radius_rad: f64) -> Vec<[f64; 2]> {
    let (lat0, lon0) = (center.latitude.to_radians(), center.longitude.to_radians());
    let mut ring: Vec<[f64; 2]> = (0..SEGMENTS)
        .map(|k| {
            let bearing = 2.0 * std::f64::consts::PI * k as f64 / SEGMENTS as f64;
            let lat = (lat0.sin() * radius_rad.cos() + lat0.cos() * radius_rad.sin() * bearing.cos()).asin();
            let lon = lon0
                + (bearing.sin() * radius_rad.sin() * lat0.cos()).atan2(radius_rad.cos() - lat0.sin() * lat.sin());
            [round6(wrap_lon(lon.to_degrees())), round6(lat.to_degrees())]
        })
        .collect();
    ring.push(ring[0]);
    ring
}

fn station_features(scenario: &Scenario, st: &StationLocation, radius: f64) -> [Value; 2] {
    let props = json!({
        "station_id": st.id,
        "station": st.name,
        "provider": scenario.provider_name(st.provider_id),
        "country": st.country,
    });
    let point = json!({
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [round6(st.geodetic.longitude), round6(st.geodetic.latitude)]},
        "properties": props,
    });
    let mut cone_props = props;
    cone_props["kind"] = json!("coverage_cone");
    let cone = json!({
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [coverage_polygon(&st.geodetic, radius)]},
        "properties": cone_props,
    });
    [point, cone]
}

/// FeatureCollection with a point and a coverage-cone polygon per station in
/// `station_ids`, for a satellite at `altitude_km`.
pub fn stations_geojson(
    scenario: &Scenario,
    station_ids: impl IntoIterator<Item = u32>,
    altitude_km: f64,
) -> Value {
    let radius = coverage_cone_radius(altitude_km * 1000.0, scenario.contact.min_elevation_deg);
    let features: Vec<Value> = station_ids
        .into_iter()
        .filter_map(|id| scenario.station(id))
        .flat_map(|st| station_features(scenario, st, radius))
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}
