//! Synthetic GB-like winter fixture: a conventional fleet, seven winters of
//! hourly demand and wind load factor, and per-winter ACS peaks.
//!
//! The data are made up. Magnitudes echo a large island system: a fleet
//! with COPT mean near 58.8 GW and standard deviation near 1.9 GW, demand
//! rescaled to a 55.55 GW ACS peak, and a handful of cold, still spells
//! that hold most of the coincident high-demand, low-wind hours.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::distribution::GenUnit;
use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, DemandSeries, Timestamp, WindSeries};

pub const ACS_TARGET_MW: f64 = 55_550.0;
pub const FIRST_WINTER: i32 = 2005;
pub const WINTERS: usize = 7;

/// Unit type, count, capacity (MW) and availability.
const FLEET: &[(&str, usize, f64, f64)] = &[
    ("ccgt", 72, 440.0, 0.87),
    ("coal", 36, 505.0, 0.85),
    ("nuclear", 16, 580.0, 0.84),
    ("pumped", 8, 300.0, 0.95),
    ("ocgt", 40, 110.0, 0.92),
    ("biomass", 6, 330.0, 0.88),
];

/// A cold, still spell: winter index, first day, length in days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spell {
    pub winter: usize,
    pub month: u32,
    pub day: u32,
    pub days: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub winters: usize,
    /// Day-to-day demand anomaly, as a fraction of the ACS peak.
    pub weather_sd: f64,
    /// Extra demand during a spell, as a fraction of the ACS peak.
    pub spell_uplift: f64,
    pub spells: Vec<Spell>,
    /// Load factors are rounded to this resolution.
    pub lf_resolution: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 20_140_101,
            winters: WINTERS,
            weather_sd: 0.022,
            spell_uplift: 0.035,
            spells: vec![
                Spell { winter: 3, month: 2, day: 1, days: 6 },
                Spell { winter: 4, month: 1, day: 5, days: 7 },
                Spell { winter: 5, month: 12, day: 1, days: 6 },
            ],
            lf_resolution: 0.001,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub units: Vec<GenUnit>,
    /// Raw hourly demand, before ACS rescaling.
    pub demand: DemandSeries,
    pub wind: WindSeries,
    pub acs: HashMap<String, f64>,
}

pub fn winter_label(year: i32) -> String {
    format!("{}-{:02}", year, (year + 1) % 100)
}

pub fn fleet() -> Vec<GenUnit> {
    let mut units = Vec::new();
    for &(kind, count, cap, avail) in FLEET {
        for i in 0..count {
            units.push(GenUnit {
                name: format!("{kind}-{:02}", i + 1),
                capacity_mw: cap,
                availability: avail,
            });
        }
    }
    units
}

/// Within-day demand shape, peaking at 1 in the early evening.
fn daily_shape(hour: u32) -> f64 {
    const SHAPE: [f64; 24] = [
        0.66, 0.63, 0.61, 0.60, 0.60, 0.62, 0.70, 0.80, 0.86, 0.87, 0.87, 0.86, 0.85, 0.84, 0.84, 0.86, 0.93, 1.00,
        0.99, 0.95, 0.90, 0.84, 0.77, 0.70,
    ];
    SHAPE[hour as usize]
}

fn weekday_factor(date: NaiveDate) -> f64 {
    match date.weekday() {
        chrono::Weekday::Sat => 0.91,
        chrono::Weekday::Sun => 0.88,
        _ => 1.0,
    }
}

/// Slow seasonal swing, highest in mid January.
fn seasonal(date: NaiveDate, winter_start: i32) -> f64 {
    let mid = NaiveDate::from_ymd_opt(winter_start + 1, 1, 15).unwrap();
    let days = (date - mid).num_days() as f64;
    0.915 + 0.055 * (days * std::f64::consts::PI / 180.0).cos().max(-1.0)
}

fn holiday_factor(date: NaiveDate) -> f64 {
    match (date.month(), date.day()) {
        (12, 24..=31) | (1, 1) => 0.86,
        _ => 1.0,
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn generate(params: &SynthParams) -> Result<SynthData> {
    if params.winters == 0 || params.lf_resolution.is_nan() || params.lf_resolution <= 0.0 {
        return Err(Error::Config("synthetic fixture needs winters and a positive resolution".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let std_normal = Normal::new(0.0, 1.0).unwrap();

    let mut timestamps: Vec<Timestamp> = Vec::new();
    let mut demand = Vec::new();
    let mut winter_ids = Vec::new();
    let mut load_factor = Vec::new();
    let mut acs = HashMap::new();

    for w in 0..params.winters {
        let year = FIRST_WINTER + w as i32;
        let label = winter_label(year);
        // historical peaks drift upwards a little each winter
        let acs_w = 53_600.0 + 420.0 * w as f64 + 300.0 * std_normal.sample(&mut rng);
        acs.insert(label.clone(), acs_w.round());

        let first = NaiveDate::from_ymd_opt(year, 11, 1).unwrap();
        let last = NaiveDate::from_ymd_opt(year + 1, 3, 31).unwrap();
        let spells: Vec<(NaiveDate, NaiveDate)> = params
            .spells
            .iter()
            .filter(|s| s.winter == w)
            .map(|s| {
                let y = if s.month >= 7 { year } else { year + 1 };
                let start = NaiveDate::from_ymd_opt(y, s.month, s.day).expect("valid spell date");
                (start, start + Duration::days(s.days as i64))
            })
            .collect();

        let mut anomaly = 0.0;
        let mut wind_state: f64 = std_normal.sample(&mut rng);
        let mut date = first;
        while date <= last {
            anomaly = 0.75 * anomaly + params.weather_sd * (1.0f64 - 0.75 * 0.75).sqrt() * std_normal.sample(&mut rng);
            let in_spell = spells.iter().any(|&(a, b)| date >= a && date < b);
            let level = seasonal(date, year) + anomaly + if in_spell { params.spell_uplift } else { 0.0 };
            for hour in 0..24 {
                let t = Utc.from_utc_datetime(&date.and_hms_opt(hour, 0, 0).unwrap());
                let noise = 0.004 * std_normal.sample(&mut rng);
                let norm = daily_shape(hour) * weekday_factor(date) * holiday_factor(date) * level + noise;
                timestamps.push(t);
                // rounded to what the CSV holds, so files and memory agree
                demand.push(((norm * acs_w).max(0.0) * 10.0).round() / 10.0);
                winter_ids.push(label.clone());

                wind_state = 0.9 * wind_state + (1.0f64 - 0.9 * 0.9).sqrt() * std_normal.sample(&mut rng);
                let z = if in_spell { -1.3 + 0.3 * wind_state } else { wind_state };
                let lf = logistic(-0.9 + 1.4 * z);
                load_factor.push(((lf / params.lf_resolution).round() * params.lf_resolution).clamp(0.0, 1.0));
            }
            date += Duration::days(1);
        }
    }

    let demand = DemandSeries::new(timestamps.clone(), demand, winter_ids)?;
    let wind = WindSeries::new(timestamps, load_factor)?;
    Ok(SynthData {
        units: fleet(),
        demand,
        wind,
        acs,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::file(path, e))
}

/// Writes `units.csv`, `demand.csv`, `wind.csv`, `acs.csv` and a runnable
/// `config.toml` into `dir`.
pub fn write_fixture(data: &SynthData, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;

    let mut s = String::from("name,capacity_mw,availability\n");
    for u in &data.units {
        writeln!(s, "{},{},{}", u.name, u.capacity_mw, u.availability).unwrap();
    }
    write_file(&dir.join("units.csv"), &s)?;

    let mut s = String::from("timestamp,demand_mw,winter_id\n");
    for i in 0..data.demand.len() {
        writeln!(
            s,
            "{},{:.1},{}",
            format_timestamp(&data.demand.timestamps[i]),
            data.demand.demand_mw[i],
            data.demand.winter_id[i]
        )
        .unwrap();
    }
    write_file(&dir.join("demand.csv"), &s)?;

    let mut s = String::from("timestamp,load_factor\n");
    for (t, lf) in data.wind.timestamps.iter().zip(&data.wind.load_factor) {
        writeln!(s, "{},{lf:.3}", format_timestamp(t)).unwrap();
    }
    write_file(&dir.join("wind.csv"), &s)?;

    let mut winters: Vec<_> = data.acs.iter().collect();
    winters.sort_by(|a, b| a.0.cmp(b.0));
    let mut s = String::from("winter_id,acs_peak_mw\n");
    for (w, v) in winters {
        writeln!(s, "{w},{v}").unwrap();
    }
    write_file(&dir.join("acs.csv"), &s)?;

    write_file(&dir.join("config.toml"), &fixture_config())
}

fn fixture_config() -> String {
    format!(
        r#"# Synthetic GB-like scenario.
[data]
units = "units.csv"
demand = "demand.csv"
wind = "wind.csv"
acs = "acs.csv"

[scenario]
acs_target_mw = {ACS_TARGET_MW:.1}
response_adjustment_mw = 700.0
installed_wind_mw = [0.0, 5000.0, 10000.0, 15000.0, 20000.0, 25000.0, 30000.0]
model = "independence"
grid_step_mw = 1.0

[season]
weeks_per_winter = 20

[lambda]
d1_norm = 0.95
d2_norm = 1.03
l1 = 1.0
l2 = 0.5

[bootstrap]
enabled = false
n_replicates = 1000
ci_level = 0.95
seed = 1

[loess]
span = 0.75
threshold_norm = 0.9
"#
    )
}
