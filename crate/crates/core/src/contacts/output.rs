use std::io::Write;

use super::ContactWindow;
use crate::model::Scenario;

pub const CONTACTS_CSV_HEADER: [&str; 9] = [
    "id",
    "satellite",
    "provider",
    "station",
    "start_iso",
    "end_iso",
    "duration_s",
    "data_rate_bps",
    "max_elevation_deg",
];

pub fn write_contacts_csv<W: Write>(
    writer: W,
    contacts: &[ContactWindow],
    scenario: &Scenario,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CONTACTS_CSV_HEADER)?;
    for c in contacts {
        let sat = scenario
            .satellite(c.satellite_id)
            .map(|s| s.name.clone())
            .unwrap_or_else(|| c.satellite_id.to_string());
        let station = scenario
            .station(c.station_id)
            .map(|s| s.name.clone())
            .unwrap_or_else(|| c.station_id.to_string());
        w.write_record([
            c.id.to_string(),
            sat,
            scenario.provider_name(c.provider_id).to_string(),
            station,
            c.start.to_iso(),
            c.end.to_iso(),
            format!("{:.3}", c.duration),
            format!("{}", c.data_rate),
            format!("{:.3}", c.max_elevation),
        ])?;
    }
    w.flush()?;
    Ok(())
}
