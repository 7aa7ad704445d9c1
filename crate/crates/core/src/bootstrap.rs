//! Block bootstrap of paired demand/wind series with percentile intervals.
//!
//! Replicate `r` draws from its own ChaCha8 stream keyed by `(seed, r)`, so
//! replicate vectors do not depend on how replicates are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::ingest::{BlockKind, DemandSeries, PairedSeries, WindSeries};
use crate::numeric::quantile_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Demand and wind move together inside each block.
    PairedBlocks,
    /// Demand blocks and one-week wind blocks are drawn independently.
    IndependentBlocks,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapSpec {
    pub n_replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        BootstrapSpec {
            n_replicates: 1000,
            ci_level: 0.95,
            seed: 0,
            scheme: Scheme::PairedBlocks,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_replicates >= 1, Config, "n_replicates must be at least 1");
        ensure!(
            self.ci_level > 0.0 && self.ci_level < 1.0,
            Config,
            "ci_level must lie in (0, 1), got {}",
            self.ci_level
        );
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub point_estimate: f64,
    pub replicates: Vec<f64>,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl BootstrapResult {
    /// Percentile interval of `replicates` around `point_estimate`.
    pub fn from_replicates(point_estimate: f64, replicates: Vec<f64>, ci_level: f64) -> Result<Self> {
        ensure!(!replicates.is_empty(), InvalidArgument, "no replicates");
        ensure!(
            ci_level > 0.0 && ci_level < 1.0,
            InvalidArgument,
            "ci_level must lie in (0, 1), got {ci_level}"
        );
        ensure!(
            replicates.iter().all(|v| !v.is_nan()),
            Numerical,
            "a replicate statistic is NaN"
        );
        let mut sorted = replicates.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(BootstrapResult {
            point_estimate,
            ci_lo: quantile_sorted(&sorted, 0.5 * (1.0 - ci_level)),
            ci_hi: quantile_sorted(&sorted, 0.5 * (1.0 + ci_level)),
            replicates,
        })
    }

    pub fn median(&self) -> f64 {
        crate::numeric::median(&self.replicates)
    }
}

/// Which part of a replicate a random stream drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Demand = 0,
    Wind = 1,
}

/// Generator for one stream of replicate `r`.
pub fn replicate_rng(seed: u64, replicate: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate.wrapping_mul(2).wrapping_add(stream as u64));
    rng
}

fn indices_by_kind(series: &PairedSeries, kind: BlockKind) -> Vec<usize> {
    series
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.kind == kind)
        .map(|(i, _)| i)
        .collect()
}

/// Replaces each block by one drawn uniformly with replacement from all
/// blocks of the same kind, pooled across winters.
pub fn resample_paired<R: Rng + ?Sized>(series: &PairedSeries, rng: &mut R) -> Result<PairedSeries> {
    let normal = indices_by_kind(series, BlockKind::Normal);
    let christmas = indices_by_kind(series, BlockKind::Christmas);
    let mut picks = Vec::with_capacity(series.blocks().len());
    for b in series.blocks() {
        let pool = match b.kind {
            BlockKind::Normal => &normal,
            BlockKind::Christmas => &christmas,
        };
        ensure!(!pool.is_empty(), Data, "no {:?} blocks to resample from", b.kind);
        picks.push(pool[rng.random_range(0..pool.len())]);
    }
    Ok(series.gather_blocks(&picks))
}

fn pick_weeks<R: Rng + ?Sized>(series: &PairedSeries, rng: &mut R) -> Result<Vec<std::ops::Range<usize>>> {
    let weeks = series.weeks();
    ensure!(!weeks.is_empty(), Data, "no wind weeks to resample from");
    Ok((0..weeks.len())
        .map(|_| weeks[rng.random_range(0..weeks.len())].clone())
        .collect())
}

/// Draws one-week wind blocks uniformly with replacement, as many as the
/// series has, and returns their load factors.
pub fn resample_wind_weeks<R: Rng + ?Sized>(series: &PairedSeries, rng: &mut R) -> Result<Vec<f64>> {
    let lf = series.load_factor();
    Ok(pick_weeks(series, rng)?
        .into_iter()
        .flat_map(|w| lf[w].iter().copied())
        .collect())
}

/// Demand resampled as in `resample_paired`, wind resampled in one-week
/// blocks on a separate stream.
pub fn resample_independent<R: Rng + ?Sized, S: Rng + ?Sized>(
    series: &PairedSeries,
    demand_rng: &mut R,
    wind_rng: &mut S,
) -> Result<(DemandSeries, WindSeries)> {
    let demand = resample_paired(series, demand_rng)?.demand_series();
    let mut timestamps = Vec::with_capacity(series.len());
    let mut load_factor = Vec::with_capacity(series.len());
    for w in pick_weeks(series, wind_rng)? {
        timestamps.extend_from_slice(&series.timestamps()[w.clone()]);
        load_factor.extend_from_slice(&series.load_factor()[w]);
    }
    Ok((demand, WindSeries { timestamps, load_factor }))
}

/// Checks that a series has the block composition of a configured season.
pub fn check_composition(series: &PairedSeries, normal: usize, christmas: usize, weeks: usize) -> Result<()> {
    let (n, c, w) = (
        series.block_count(BlockKind::Normal),
        series.block_count(BlockKind::Christmas),
        series.weeks().len(),
    );
    ensure!(
        (n, c, w) == (normal, christmas, weeks),
        Data,
        "block counts {n} normal, {c} Christmas, {w} wind weeks do not match the expected {normal}, {christmas}, {weeks}"
    );
    Ok(())
}

/// Demand and wind columns handed to a statistic. Under the paired scheme
/// they are aligned hour by hour; under the independent scheme only their
/// marginals are meaningful.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub demand_mw: &'a [f64],
    pub load_factor: &'a [f64],
}

fn draw(series: &PairedSeries, spec: &BootstrapSpec, r: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut demand_rng = replicate_rng(spec.seed, r as u64, Stream::Demand);
    let resampled = resample_paired(series, &mut demand_rng)?;
    match spec.scheme {
        Scheme::PairedBlocks => Ok((resampled.demand_mw().to_vec(), resampled.load_factor().to_vec())),
        Scheme::IndependentBlocks => {
            let mut wind_rng = replicate_rng(spec.seed, r as u64, Stream::Wind);
            let lf = resample_wind_weeks(series, &mut wind_rng)?;
            Ok((resampled.demand_mw().to_vec(), lf))
        }
    }
}

/// Bootstrap of several statistics computed together from each replicate.
/// `statistic` must return the same number of values on every sample.
pub fn bootstrap_many<F>(series: &PairedSeries, spec: &BootstrapSpec, statistic: F) -> Result<Vec<BootstrapResult>>
where
    F: Fn(Sample<'_>) -> Result<Vec<f64>> + Sync,
{
    spec.validate()?;
    let point = statistic(Sample {
        demand_mw: series.demand_mw(),
        load_factor: series.load_factor(),
    })?;
    // collected by index so the reported failure is the lowest replicate
    let per_replicate: Vec<Vec<f64>> = (0..spec.n_replicates)
        .into_par_iter()
        .map(|r| {
            let wrap = |e: Error| Error::Replicate {
                replicate: r,
                source: Box::new(e),
            };
            let (demand, lf) = draw(series, spec, r).map_err(wrap)?;
            let values = statistic(Sample {
                demand_mw: &demand,
                load_factor: &lf,
            })
            .map_err(wrap)?;
            if values.len() != point.len() {
                return Err(wrap(Error::InvalidArgument(format!(
                    "statistic returned {} values, expected {}",
                    values.len(),
                    point.len()
                ))));
            }
            Ok(values)
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    point
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let reps = per_replicate.iter().map(|v| v[j]).collect();
            BootstrapResult::from_replicates(p, reps, spec.ci_level)
        })
        .collect()
}

pub fn bootstrap_ci<F>(series: &PairedSeries, spec: &BootstrapSpec, statistic: F) -> Result<BootstrapResult>
where
    F: Fn(Sample<'_>) -> Result<f64> + Sync,
{
    let mut out = bootstrap_many(series, spec, |s| statistic(s).map(|v| vec![v]))?;
    Ok(out.pop().unwrap())
}
