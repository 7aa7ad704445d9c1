//! Loading and preprocessing of demand and wind series, and the
//! season/block structure used for resampling.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, TimeZone, Timelike, Utc, Weekday};
use serde::Deserialize;

use crate::error::{ensure, Error, Result};

pub type Timestamp = DateTime<Utc>;

const HOURS_PER_WEEK: usize = 168;

/// Hourly (or, before conversion, half-hourly) demand observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSeries {
    pub timestamps: Vec<Timestamp>,
    pub demand_mw: Vec<f64>,
    pub winter_id: Vec<String>,
}

impl DemandSeries {
    pub fn new(timestamps: Vec<Timestamp>, demand_mw: Vec<f64>, winter_id: Vec<String>) -> Result<Self> {
        ensure!(
            timestamps.len() == demand_mw.len() && timestamps.len() == winter_id.len(),
            Data,
            "demand columns have different lengths"
        );
        check_increasing(&timestamps, "demand")?;
        if let Some(i) = demand_mw.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Data(format!(
                "demand at {} is {}, expected a finite nonnegative value",
                timestamps[i], demand_mw[i]
            )));
        }
        if let Some(i) = winter_id.iter().position(|w| w.is_empty()) {
            return Err(Error::Data(format!("demand at {} has no winter id", timestamps[i])));
        }
        Ok(DemandSeries {
            timestamps,
            demand_mw,
            winter_id,
        })
    }

    pub fn len(&self) -> usize {
        self.demand_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand_mw.is_empty()
    }
}

/// Hourly wind load factors.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSeries {
    pub timestamps: Vec<Timestamp>,
    pub load_factor: Vec<f64>,
}

impl WindSeries {
    pub fn new(timestamps: Vec<Timestamp>, load_factor: Vec<f64>) -> Result<Self> {
        ensure!(
            timestamps.len() == load_factor.len(),
            Data,
            "wind columns have different lengths"
        );
        check_increasing(&timestamps, "wind")?;
        if let Some(i) = load_factor.iter().position(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Data(format!(
                "load factor at {} is {}, expected a value in [0, 1]",
                timestamps[i], load_factor[i]
            )));
        }
        Ok(WindSeries {
            timestamps,
            load_factor,
        })
    }

    pub fn len(&self) -> usize {
        self.load_factor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.load_factor.is_empty()
    }
}

fn check_increasing(timestamps: &[Timestamp], what: &str) -> Result<()> {
    if let Some(w) = timestamps.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Data(format!(
            "{what} timestamps not strictly increasing at {}",
            w[1]
        )));
    }
    Ok(())
}

/// Converts half-hourly demand to hourly by taking the larger half-hour of
/// each clock hour.
pub fn halfhourly_to_hourly(series: &DemandSeries) -> Result<DemandSeries> {
    ensure!(
        series.len().is_multiple_of(2),
        Data,
        "half-hourly demand has an odd number of records ({})",
        series.len()
    );
    let n = series.len() / 2;
    let mut timestamps = Vec::with_capacity(n);
    let mut demand = Vec::with_capacity(n);
    let mut winters = Vec::with_capacity(n);
    for pair in 0..n {
        let (a, b) = (2 * pair, 2 * pair + 1);
        let t = series.timestamps[a];
        ensure!(
            t.minute() == 0 && t.second() == 0 && series.timestamps[b] == t + Duration::minutes(30),
            Data,
            "half-hourly records at {} and {} do not form a clock hour",
            t,
            series.timestamps[b]
        );
        ensure!(
            series.winter_id[a] == series.winter_id[b],
            Data,
            "half-hours at {t} carry different winter ids"
        );
        timestamps.push(t);
        demand.push(series.demand_mw[a].max(series.demand_mw[b]));
        winters.push(series.winter_id[a].clone());
    }
    DemandSeries::new(timestamps, demand, winters)
}

/// Multiplies each winter's demand by `acs_target / acs_winter`.
pub fn rescale_demand(
    series: &DemandSeries,
    acs_by_winter: &HashMap<String, f64>,
    acs_target: f64,
) -> Result<DemandSeries> {
    ensure!(
        acs_target.is_finite() && acs_target > 0.0,
        InvalidArgument,
        "ACS target must be positive, got {acs_target}"
    );
    let mut out = series.clone();
    for (d, w) in out.demand_mw.iter_mut().zip(&series.winter_id) {
        let acs = *acs_by_winter
            .get(w)
            .ok_or_else(|| Error::Data(format!("no ACS peak given for winter {w:?}")))?;
        ensure!(
            acs.is_finite() && acs > 0.0,
            Data,
            "ACS peak for winter {w:?} must be positive, got {acs}"
        );
        *d *= acs_target / acs;
    }
    Ok(out)
}

/// Adds a constant to every demand value.
pub fn add_response_adjustment(series: &DemandSeries, adj_mw: f64) -> Result<DemandSeries> {
    ensure!(
        adj_mw.is_finite() && adj_mw >= 0.0,
        InvalidArgument,
        "response adjustment must be nonnegative, got {adj_mw}"
    );
    let mut out = series.clone();
    out.demand_mw.iter_mut().for_each(|d| *d += adj_mw);
    Ok(out)
}

/// Available wind MW for a given installed capacity.
pub fn wind_to_capacity(load_factor: &[f64], installed_mw: f64) -> Result<Vec<f64>> {
    ensure!(
        installed_mw.is_finite() && installed_mw >= 0.0,
        InvalidArgument,
        "installed capacity must be nonnegative, got {installed_mw}"
    );
    Ok(load_factor.iter().map(|lf| lf * installed_mw).collect())
}

/// Season window and block rules.
///
/// Each winter's season starts at 00:00 UTC on the first Sunday in November
/// and runs for `weeks_per_winter` Sunday-to-Saturday weeks. The Christmas
/// block is the week containing 25 December plus the following week, when
/// both fall inside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonSpec {
    pub weeks_per_winter: usize,
    /// Drop incomplete weeks instead of failing.
    pub allow_gaps: bool,
}

impl Default for SeasonSpec {
    fn default() -> Self {
        SeasonSpec {
            weeks_per_winter: 20,
            allow_gaps: false,
        }
    }
}

impl SeasonSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.weeks_per_winter >= 3,
            InvalidArgument,
            "weeks_per_winter must be at least 3, got {}",
            self.weeks_per_winter
        );
        Ok(())
    }

    pub fn hours_per_season(&self) -> usize {
        self.weeks_per_winter * HOURS_PER_WEEK
    }

    /// Index of the first week of the Christmas block, if it fits.
    fn christmas_week(&self, season_year: i32) -> Option<usize> {
        let start = first_sunday_in_november(season_year);
        let xmas = NaiveDate::from_ymd_opt(season_year, 12, 25).unwrap();
        let week = ((xmas - start).num_days() / 7) as usize;
        (week + 1 < self.weeks_per_winter).then_some(week)
    }
}

pub fn first_sunday_in_november(year: i32) -> NaiveDate {
    let nov1 = NaiveDate::from_ymd_opt(year, 11, 1).unwrap();
    let offset = (7 - nov1.weekday().num_days_from_sunday()) % 7;
    nov1 + Duration::days(offset as i64)
}

fn season_start(season_year: i32) -> Timestamp {
    let day = first_sunday_in_november(season_year);
    debug_assert_eq!(day.weekday(), Weekday::Sun);
    Utc.from_utc_datetime(&day.and_hms_opt(0, 0, 0).unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Normal,
    Christmas,
}

/// A contiguous run of observations resampled as a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub start: usize,
    pub len: usize,
    pub winter: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Coincident demand and wind observations cut into resampling blocks.
///
/// Demand is stored in MW after any preprocessing; wind is stored as load
/// factor and scaled to MW on demand, so one series serves a whole capacity
/// sweep. Besides the demand blocks (one-week normal, two-week Christmas)
/// the series records its one-week wind blocks, in which Christmas weeks
/// have no special status.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    timestamps: Vec<Timestamp>,
    demand_mw: Vec<f64>,
    load_factor: Vec<f64>,
    winters: Vec<String>,
    winter: Vec<usize>,
    blocks: Vec<Block>,
    block_id: Vec<usize>,
    weeks: Vec<std::ops::Range<usize>>,
}

impl PairedSeries {
    /// Builds a series from columns and consecutive block lengths.
    ///
    /// Blocks must partition the observations and each must lie within one
    /// winter. A Christmas block must have even length; its halves are its
    /// two wind weeks.
    pub fn from_blocks(
        timestamps: Vec<Timestamp>,
        demand_mw: Vec<f64>,
        load_factor: Vec<f64>,
        winter_id: Vec<String>,
        blocks: &[(BlockKind, usize)],
    ) -> Result<Self> {
        let n = demand_mw.len();
        ensure!(n > 0, Data, "paired series is empty");
        ensure!(
            timestamps.len() == n && load_factor.len() == n && winter_id.len() == n,
            Data,
            "paired series columns have different lengths"
        );
        ensure!(
            demand_mw.iter().all(|d| d.is_finite() && *d >= 0.0),
            Data,
            "demand values must be finite and nonnegative"
        );
        ensure!(
            load_factor.iter().all(|l| (0.0..=1.0).contains(l)),
            Data,
            "load factors must lie in [0, 1]"
        );
        let total: usize = blocks.iter().map(|b| b.1).sum();
        ensure!(
            total == n,
            Data,
            "block lengths sum to {total} but the series has {n} observations"
        );

        let mut winters: Vec<String> = Vec::new();
        let mut winter = Vec::with_capacity(n);
        for w in &winter_id {
            let idx = match winters.iter().position(|x| x == w) {
                Some(i) => i,
                None => {
                    winters.push(w.clone());
                    winters.len() - 1
                }
            };
            winter.push(idx);
        }

        let mut out_blocks = Vec::with_capacity(blocks.len());
        let mut block_id = Vec::with_capacity(n);
        let mut weeks = Vec::new();
        let mut start = 0;
        for (id, &(kind, len)) in blocks.iter().enumerate() {
            ensure!(len > 0, Data, "block {id} is empty");
            let w = winter[start];
            ensure!(
                winter[start..start + len].iter().all(|&x| x == w),
                Data,
                "block {id} spans more than one winter"
            );
            match kind {
                BlockKind::Normal => weeks.push(start..start + len),
                BlockKind::Christmas => {
                    ensure!(len % 2 == 0, Data, "Christmas block {id} has odd length {len}");
                    weeks.push(start..start + len / 2);
                    weeks.push(start + len / 2..start + len);
                }
            }
            out_blocks.push(Block {
                kind,
                start,
                len,
                winter: w,
            });
            block_id.extend(std::iter::repeat_n(id, len));
            start += len;
        }

        Ok(PairedSeries {
            timestamps,
            demand_mw,
            load_factor,
            winters,
            winter,
            blocks: out_blocks,
            block_id,
            weeks,
        })
    }

    pub fn len(&self) -> usize {
        self.demand_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand_mw.is_empty()
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn demand_mw(&self) -> &[f64] {
        &self.demand_mw
    }

    pub fn load_factor(&self) -> &[f64] {
        &self.load_factor
    }

    pub fn winter_ids(&self) -> &[String] {
        &self.winters
    }

    pub fn winter_id(&self, i: usize) -> &str {
        &self.winters[self.winter[i]]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_id(&self) -> &[usize] {
        &self.block_id
    }

    /// One-week wind blocks.
    pub fn weeks(&self) -> &[std::ops::Range<usize>] {
        &self.weeks
    }

    pub fn block_count(&self, kind: BlockKind) -> usize {
        self.blocks.iter().filter(|b| b.kind == kind).count()
    }

    pub fn wind_mw(&self, installed_mw: f64) -> Result<Vec<f64>> {
        wind_to_capacity(&self.load_factor, installed_mw)
    }

    pub fn demand_series(&self) -> DemandSeries {
        DemandSeries {
            timestamps: self.timestamps.clone(),
            demand_mw: self.demand_mw.clone(),
            winter_id: (0..self.len()).map(|i| self.winter_id(i).to_string()).collect(),
        }
    }

    pub fn wind_series(&self) -> WindSeries {
        WindSeries {
            timestamps: self.timestamps.clone(),
            load_factor: self.load_factor.clone(),
        }
    }

    /// Copy of the series whose blocks are replaced, slot by slot, by the
    /// source blocks in `picks`.
    pub(crate) fn gather_blocks(&self, picks: &[usize]) -> PairedSeries {
        debug_assert_eq!(picks.len(), self.blocks.len());
        let n = picks.iter().map(|&b| self.blocks[b].len).sum();
        let mut out = PairedSeries {
            timestamps: Vec::with_capacity(n),
            demand_mw: Vec::with_capacity(n),
            load_factor: Vec::with_capacity(n),
            winters: self.winters.clone(),
            winter: Vec::with_capacity(n),
            blocks: Vec::with_capacity(picks.len()),
            block_id: Vec::with_capacity(n),
            weeks: Vec::with_capacity(self.weeks.len()),
        };
        for (slot, &src) in picks.iter().enumerate() {
            let b = &self.blocks[src];
            let start = out.demand_mw.len();
            let r = b.range();
            out.timestamps.extend_from_slice(&self.timestamps[r.clone()]);
            out.demand_mw.extend_from_slice(&self.demand_mw[r.clone()]);
            out.load_factor.extend_from_slice(&self.load_factor[r.clone()]);
            out.winter.extend_from_slice(&self.winter[r]);
            out.block_id.extend(std::iter::repeat_n(slot, b.len));
            match b.kind {
                BlockKind::Normal => out.weeks.push(start..start + b.len),
                BlockKind::Christmas => {
                    out.weeks.push(start..start + b.len / 2);
                    out.weeks.push(start + b.len / 2..start + b.len);
                }
            }
            out.blocks.push(Block {
                kind: b.kind,
                start,
                len: b.len,
                winter: b.winter,
            });
        }
        out
    }
}

/// Inner-joins demand and wind on timestamps within each winter's season
/// window and assigns resampling blocks.
pub fn align_and_block(demand: &DemandSeries, wind: &WindSeries, spec: &SeasonSpec) -> Result<PairedSeries> {
    spec.validate()?;
    ensure!(!demand.is_empty(), Data, "demand series is empty");
    ensure!(!wind.is_empty(), Data, "wind series is empty");

    // winters in order of first appearance, with the year the season starts
    let mut winters: Vec<(String, i32)> = Vec::new();
    for (t, w) in demand.timestamps.iter().zip(&demand.winter_id) {
        if !winters.iter().any(|(x, _)| x == w) {
            let year = if t.month() >= 7 { t.year() } else { t.year() - 1 };
            winters.push((w.clone(), year));
        }
    }
    winters.sort_by_key(|(_, y)| *y);
    if let Some(pair) = winters.windows(2).find(|p| p[0].1 == p[1].1) {
        return Err(Error::Data(format!(
            "winters {:?} and {:?} start in the same year",
            pair[0].0, pair[1].0
        )));
    }

    let wind_index: HashMap<Timestamp, usize> =
        wind.timestamps.iter().enumerate().map(|(i, t)| (*t, i)).collect();

    let mut timestamps = Vec::new();
    let mut demand_mw = Vec::new();
    let mut load_factor = Vec::new();
    let mut winter_id = Vec::new();
    let mut blocks = Vec::new();

    for (name, year) in &winters {
        let start = season_start(*year);
        let weeks = spec.weeks_per_winter;
        // hour slot -> (demand, load factor)
        let mut slots: Vec<Option<(f64, f64)>> = vec![None; weeks * HOURS_PER_WEEK];
        let mut overlap = 0usize;
        for i in (0..demand.len()).filter(|&i| &demand.winter_id[i] == name) {
            let t = demand.timestamps[i];
            if t < start {
                continue;
            }
            let offset = t - start;
            if offset.num_seconds() % 3600 != 0 {
                return Err(Error::Data(format!("demand timestamp {t} is not on the hour")));
            }
            let hour = offset.num_hours() as usize;
            if hour >= slots.len() {
                continue;
            }
            if let Some(&j) = wind_index.get(&t) {
                slots[hour] = Some((demand.demand_mw[i], wind.load_factor[j]));
                overlap += 1;
            }
        }
        ensure!(
            overlap > 0,
            Data,
            "winter {name:?} has no coincident demand and wind data in its season window"
        );

        let complete: Vec<bool> = (0..weeks)
            .map(|k| slots[k * HOURS_PER_WEEK..(k + 1) * HOURS_PER_WEEK].iter().all(Option::is_some))
            .collect();
        if !spec.allow_gaps {
            if let Some(k) = complete.iter().position(|c| !c) {
                let missing = slots[k * HOURS_PER_WEEK..(k + 1) * HOURS_PER_WEEK]
                    .iter()
                    .filter(|s| s.is_none())
                    .count();
                return Err(Error::Data(format!(
                    "winter {name:?} week {} is missing {missing} hours (use allow-gaps to drop incomplete weeks)",
                    k + 1
                )));
            }
        }

        let xmas = spec.christmas_week(*year);
        let mut k = 0;
        while k < weeks {
            let (kind, span) = if Some(k) == xmas {
                (BlockKind::Christmas, 2)
            } else {
                (BlockKind::Normal, 1)
            };
            if complete[k..k + span].iter().all(|c| *c) {
                for hour in k * HOURS_PER_WEEK..(k + span) * HOURS_PER_WEEK {
                    let (d, lf) = slots[hour].unwrap();
                    timestamps.push(start + Duration::hours(hour as i64));
                    demand_mw.push(d);
                    load_factor.push(lf);
                    winter_id.push(name.clone());
                }
                blocks.push((kind, span * HOURS_PER_WEEK));
            }
            k += span;
        }
    }

    ensure!(!blocks.is_empty(), Data, "no complete weeks remain after alignment");
    PairedSeries::from_blocks(timestamps, demand_mw, load_factor, winter_id, &blocks)
}

pub fn parse_timestamp(text: &str) -> Result<Timestamp> {
    let text = text.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Ok(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(text, fmt) {
            return Ok(Utc.from_utc_datetime(&t));
        }
    }
    Err(Error::Data(format!("cannot parse timestamp {text:?}")))
}

pub fn format_timestamp(t: &Timestamp) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

#[derive(Deserialize)]
struct DemandRow {
    timestamp: String,
    demand_mw: f64,
    winter_id: String,
}

#[derive(Deserialize)]
struct WindRow {
    timestamp: String,
    load_factor: f64,
}

#[derive(Deserialize)]
struct AcsRow {
    winter_id: String,
    acs_peak_mw: f64,
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(reader: R, columns: &[&str]) -> Result<Vec<(usize, T)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Data(e.to_string()))?.clone();
    for col in columns {
        ensure!(headers.iter().any(|h| h == *col), Data, "missing column {col:?}");
    }
    rdr.deserialize::<T>()
        .enumerate()
        .map(|(row, rec)| {
            rec.map(|r| (row + 2, r))
                .map_err(|e| Error::Data(format!("line {}: {e}", row + 2)))
        })
        .collect()
}

/// Reads `timestamp,demand_mw,winter_id`.
pub fn read_demand<R: Read>(reader: R) -> Result<DemandSeries> {
    let rows = read_rows::<_, DemandRow>(reader, &["timestamp", "demand_mw", "winter_id"])?;
    let mut timestamps = Vec::with_capacity(rows.len());
    let mut demand = Vec::with_capacity(rows.len());
    let mut winters = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        timestamps.push(parse_timestamp(&row.timestamp).map_err(|e| Error::Data(format!("line {line}: {e}")))?);
        demand.push(row.demand_mw);
        winters.push(row.winter_id);
    }
    DemandSeries::new(timestamps, demand, winters)
}

/// Reads `timestamp,load_factor`.
pub fn read_wind<R: Read>(reader: R) -> Result<WindSeries> {
    let rows = read_rows::<_, WindRow>(reader, &["timestamp", "load_factor"])?;
    let mut timestamps = Vec::with_capacity(rows.len());
    let mut lf = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        timestamps.push(parse_timestamp(&row.timestamp).map_err(|e| Error::Data(format!("line {line}: {e}")))?);
        lf.push(row.load_factor);
    }
    WindSeries::new(timestamps, lf)
}

/// Reads `winter_id,acs_peak_mw`.
pub fn read_acs<R: Read>(reader: R) -> Result<HashMap<String, f64>> {
    let rows = read_rows::<_, AcsRow>(reader, &["winter_id", "acs_peak_mw"])?;
    let mut map = HashMap::new();
    for (line, row) in rows {
        ensure!(
            row.acs_peak_mw.is_finite() && row.acs_peak_mw > 0.0,
            Data,
            "line {line}: ACS peak must be positive, got {}",
            row.acs_peak_mw
        );
        if map.insert(row.winter_id.clone(), row.acs_peak_mw).is_some() {
            return Err(Error::Data(format!("line {line}: duplicate winter {:?}", row.winter_id)));
        }
    }
    Ok(map)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::file(path, e))
}

pub fn load_demand(path: &Path) -> Result<DemandSeries> {
    read_demand(open(path)?).map_err(|e| Error::file(path, e))
}

pub fn load_wind(path: &Path) -> Result<WindSeries> {
    read_wind(open(path)?).map_err(|e| Error::file(path, e))
}

pub fn load_acs(path: &Path) -> Result<HashMap<String, f64>> {
    read_acs(open(path)?).map_err(|e| Error::file(path, e))
}
