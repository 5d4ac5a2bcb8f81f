//! Writes a deterministic synthetic TLE catalog to stdout.
//!
//! ```text
//! cargo run --example synth_catalog > crates/core/data/sample_catalog.tle
//! ```

use gsopt::astro::{EpochUtc, TleRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MU: f64 = 398_600.4418;
const R_EARTH: f64 = 6_378.137;

fn mean_motion_rev_day(altitude_km: f64) -> f64 {
    let a = R_EARTH + altitude_km;
    (MU / (a * a * a)).sqrt() * 86_400.0 / std::f64::consts::TAU
}

/// Sun-synchronous inclination for a circular orbit at `altitude_km`.
fn sso_inclination(altitude_km: f64) -> f64 {
    let a = R_EARTH + altitude_km;
    let n = (MU / (a * a * a)).sqrt();
    let j2 = 1.082_63e-3;
    let rate = 360.0_f64.to_radians() / (365.2422 * 86_400.0);
    let cos_i = -rate / (1.5 * n * j2 * (R_EARTH / a).powi(2));
    cos_i.acos().to_degrees()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epoch = EpochUtc::parse_iso("2024-09-10T00:00:00Z")?;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_910);
    let mut norad = 70_001u32;
    let mut out = String::new();

    let families: [(&str, usize, f64, f64, Option<f64>); 5] = [
        ("SSO", 90, 450.0, 650.0, None),
        ("ISS-LIKE", 20, 400.0, 440.0, Some(51.6)),
        ("SHELL53", 40, 530.0, 570.0, Some(53.0)),
        ("POLAR", 30, 700.0, 900.0, Some(87.5)),
        ("MID70", 20, 580.0, 620.0, Some(70.0)),
    ];
    for (family, count, lo, hi, incl) in families {
        for k in 0..count {
            let alt = rng.random_range(lo..hi);
            let inclination = incl.unwrap_or_else(|| sso_inclination(alt));
            let record = TleRecord::from_elements(
                Some(&format!("{family}-{:03}", k + 1)),
                norad,
                epoch + rng.random_range(-43_200.0..0.0),
                inclination + rng.random_range(-0.05..0.05),
                rng.random_range(0.0..360.0),
                rng.random_range(0.0001..0.0020),
                rng.random_range(0.0..360.0),
                rng.random_range(0.0..360.0),
                mean_motion_rev_day(alt),
                rng.random_range(1e-5..3e-4),
            )?;
            norad += 1;
            out.push_str(&format!("{}\n{}\n{}\n", record.name.as_deref().unwrap_or(""), record.line1(), record.line2()));
        }
    }

    // Objects outside the 300-1000 km experiment band.
    for (name, alt, incl) in [("LOW-DECAY", 250.0, 51.6), ("MEO-HIGH", 1_400.0, 52.0), ("LEO-EDGE", 1_150.0, 99.0)] {
        let record = TleRecord::from_elements(Some(name), norad, epoch, incl, 10.0, 0.001, 0.0, 0.0, mean_motion_rev_day(alt), 1e-4)?;
        norad += 1;
        out.push_str(&format!("{name}\n{}\n{}\n", record.line1(), record.line2()));
    }
    print!("{out}");
    Ok(())
}
