//! Exact discrete distributions on a uniform MW grid.
//!
//! The available conventional capacity `X` is built here as the sum of
//! independent two-state units (a capacity outage probability table). All
//! queries used in the risk folds (`cdf`, `expected_shortfall`) are O(1)
//! lookups into prefix sums computed once at construction.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{ensure, Error, Result};
use crate::numeric::{grid_index, CompensatedSum};

/// Points closer than this (in grid units) below a grid point are snapped
/// onto it, so that `0.3` lands on the third point of a `0.1` MW grid.
const GRID_SNAP: f64 = 1e-9;

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A conventional generating unit that is either fully available or fully
/// out.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GenUnit {
    pub name: String,
    pub capacity_mw: f64,
    pub availability: f64,
}

impl GenUnit {
    pub fn new(name: impl Into<String>, capacity_mw: f64, availability: f64) -> Result<Self> {
        let unit = GenUnit {
            name: name.into(),
            capacity_mw,
            availability,
        };
        unit.validate()?;
        Ok(unit)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.capacity_mw.is_finite() && self.capacity_mw >= 0.0,
            InvalidArgument,
            "unit {:?}: capacity must be finite and nonnegative, got {}",
            self.name,
            self.capacity_mw
        );
        ensure!(
            self.availability.is_finite() && (0.0..=1.0).contains(&self.availability),
            InvalidArgument,
            "unit {:?}: availability must lie in [0, 1], got {}",
            self.name,
            self.availability
        );
        Ok(())
    }
}

/// Probability mass on the grid `origin_mw + i * step_mw`, `i = 0..len`.
///
/// The first and last masses are always nonzero. Masses are never
/// renormalized: a total that drifts from one signals a bug.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    origin_mw: f64,
    step_mw: f64,
    probs: Vec<f64>,
    // prefix sums of p_i and of i * p_i
    cum: Vec<f64>,
    cum_index: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(origin_mw: f64, step_mw: f64, probs: Vec<f64>) -> Result<Self> {
        ensure!(
            step_mw.is_finite() && step_mw > 0.0,
            InvalidArgument,
            "grid step must be positive and finite, got {step_mw}"
        );
        ensure!(
            origin_mw.is_finite(),
            InvalidArgument,
            "grid origin must be finite, got {origin_mw}"
        );
        ensure!(
            probs.iter().all(|p| p.is_finite() && *p >= 0.0),
            InvalidArgument,
            "probabilities must be finite and nonnegative"
        );
        let first = probs.iter().position(|&p| p > 0.0).ok_or_else(|| {
            Error::InvalidArgument("distribution has no positive mass".to_string())
        })?;
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap();
        let probs = if first == 0 && last + 1 == probs.len() {
            probs
        } else {
            probs[first..=last].to_vec()
        };
        let origin_mw = origin_mw + first as f64 * step_mw;

        let mut cum = Vec::with_capacity(probs.len());
        let mut cum_index = Vec::with_capacity(probs.len());
        let mut mass = CompensatedSum::new();
        let mut first_moment = CompensatedSum::new();
        for (i, &p) in probs.iter().enumerate() {
            mass.add(p);
            first_moment.add(i as f64 * p);
            cum.push(mass.value());
            cum_index.push(first_moment.value());
        }
        let total = mass.value();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Numerical(format!(
                "probability mass {total} differs from 1 by more than {MASS_TOLERANCE}"
            )));
        }
        Ok(DiscreteDistribution {
            origin_mw,
            step_mw,
            probs,
            cum,
            cum_index,
        })
    }

    /// Single atom at `value_mw`.
    pub fn point_mass(value_mw: f64, step_mw: f64) -> Result<Self> {
        Self::new(value_mw, step_mw, vec![1.0])
    }

    /// Builds a distribution from `(value, probability)` pairs whose values
    /// all lie on a common grid of spacing `step_mw`.
    pub fn from_atoms(step_mw: f64, atoms: &[(f64, f64)]) -> Result<Self> {
        ensure!(!atoms.is_empty(), InvalidArgument, "no atoms given");
        ensure!(
            atoms.iter().all(|(v, _)| v.is_finite()),
            InvalidArgument,
            "atom values must be finite"
        );
        let origin = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let mut probs: Vec<f64> = Vec::new();
        for &(value, p) in atoms {
            let offset = (value - origin) / step_mw;
            let idx = offset.round();
            ensure!(
                (offset - idx).abs() <= 1e-6,
                InvalidArgument,
                "atom {value} is not on the {step_mw} MW grid anchored at {origin}"
            );
            let idx = idx as usize;
            if probs.len() <= idx {
                probs.resize(idx + 1, 0.0);
            }
            probs[idx] += p;
        }
        Self::new(origin, step_mw, probs)
    }

    pub fn origin_mw(&self) -> f64 {
        self.origin_mw
    }

    pub fn step_mw(&self) -> f64 {
        self.step_mw
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn value_at(&self, index: usize) -> f64 {
        self.origin_mw + index as f64 * self.step_mw
    }

    pub fn min_value(&self) -> f64 {
        self.origin_mw
    }

    pub fn max_value(&self) -> f64 {
        self.value_at(self.probs.len() - 1)
    }

    /// `(value, probability)` for every grid point in the support.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.value_at(i), p))
    }

    /// Index of the last grid point `<= x`, or `None` below the support.
    #[inline]
    fn floor_index(&self, x: f64) -> Option<usize> {
        let u = (x - self.origin_mw) / self.step_mw + GRID_SNAP;
        if u < 0.0 {
            None
        } else {
            // truncation is floor for u >= 0 and avoids a libm call
            Some((u as usize).min(self.probs.len() - 1))
        }
    }

    /// `Pr(X <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        ensure!(x.is_finite(), InvalidArgument, "cdf argument must be finite, got {x}");
        Ok(self.cdf_unchecked(x))
    }

    /// `cdf` without the finiteness check, for inner loops over validated
    /// atoms.
    #[inline]
    pub fn cdf_unchecked(&self, x: f64) -> f64 {
        match self.floor_index(x) {
            None => 0.0,
            Some(k) if k + 1 == self.probs.len() => 1.0,
            Some(k) => self.cum[k].min(1.0),
        }
    }

    /// `E[max(level - X, 0)]`.
    pub fn expected_shortfall(&self, level: f64) -> Result<f64> {
        ensure!(
            level.is_finite(),
            InvalidArgument,
            "shortfall level must be finite, got {level}"
        );
        Ok(self.expected_shortfall_unchecked(level))
    }

    #[inline]
    pub fn expected_shortfall_unchecked(&self, level: f64) -> f64 {
        match self.floor_index(level) {
            None => 0.0,
            Some(k) => {
                let v = (level - self.origin_mw) * self.cum[k] - self.step_mw * self.cum_index[k];
                v.max(0.0)
            }
        }
    }

    /// Exact mean and population standard deviation.
    pub fn moments(&self) -> (f64, f64) {
        let mean_index = self.cum_index[self.probs.len() - 1];
        let var_index: CompensatedSum = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let d = i as f64 - mean_index;
                p * d * d
            })
            .sum();
        (
            self.origin_mw + self.step_mw * mean_index,
            self.step_mw * var_index.value().max(0.0).sqrt(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }
}

fn same_step(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Distribution of the sum of independent draws from `a` and `b`.
pub fn convolve(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<DiscreteDistribution> {
    ensure!(
        same_step(a.step_mw, b.step_mw),
        InvalidArgument,
        "cannot convolve grids with steps {} and {}",
        a.step_mw,
        b.step_mw
    );
    let mut probs = vec![0.0; a.len() + b.len() - 1];
    for (i, &pa) in a.probs.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b.probs.iter().enumerate() {
            probs[i + j] += pa * pb;
        }
    }
    DiscreteDistribution::new(a.origin_mw + b.origin_mw, a.step_mw, probs)
}

/// Distribution of `delta - V` for `V ~ dist`.
pub fn negate_and_shift(dist: &DiscreteDistribution, delta: f64) -> Result<DiscreteDistribution> {
    ensure!(delta.is_finite(), InvalidArgument, "shift must be finite, got {delta}");
    let mut probs = dist.probs.clone();
    probs.reverse();
    DiscreteDistribution::new(delta - dist.max_value(), dist.step_mw, probs)
}

/// Capacity outage probability table: the distribution of total available
/// capacity of independent two-state units.
///
/// Each capacity is rounded half-up to a multiple of `step_mw` first. Units
/// are folded in a canonical order so the result does not depend on the
/// order of `units`.
pub fn build_copt(units: &[GenUnit], step_mw: f64) -> Result<DiscreteDistribution> {
    ensure!(!units.is_empty(), InvalidArgument, "unit list is empty");
    ensure!(
        step_mw.is_finite() && step_mw > 0.0,
        InvalidArgument,
        "grid step must be positive and finite, got {step_mw}"
    );
    for unit in units {
        unit.validate()?;
    }

    let mut steps: Vec<(usize, f64)> = units
        .iter()
        .map(|u| (grid_index(u.capacity_mw, step_mw) as usize, u.availability))
        .filter(|&(k, _)| k > 0)
        .collect();
    steps.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let total: usize = steps.iter().map(|s| s.0).sum();
    let mut probs = Vec::with_capacity(total + 1);
    probs.push(1.0);
    for &(k, p) in &steps {
        let old_len = probs.len();
        probs.resize(old_len + k, 0.0);
        for j in (0..old_len).rev() {
            let v = probs[j];
            probs[j + k] += p * v;
            probs[j] = (1.0 - p) * v;
        }
    }
    DiscreteDistribution::new(0.0, step_mw, probs)
}

/// Reads a unit list with header `name,capacity_mw,availability`.
pub fn read_units<R: Read>(reader: R) -> Result<Vec<GenUnit>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Data(format!("unit list: {e}")))?
        .clone();
    for col in ["name", "capacity_mw", "availability"] {
        ensure!(
            headers.iter().any(|h| h == col),
            Data,
            "unit list: missing column {col:?}"
        );
    }
    let mut units = Vec::new();
    for (row, record) in rdr.deserialize::<GenUnit>().enumerate() {
        let unit = record.map_err(|e| Error::Data(format!("unit list line {}: {e}", row + 2)))?;
        unit.validate()
            .map_err(|e| Error::Data(format!("unit list line {}: {e}", row + 2)))?;
        units.push(unit);
    }
    ensure!(!units.is_empty(), Data, "unit list contains no units");
    Ok(units)
}

pub fn load_units(path: &Path) -> Result<Vec<GenUnit>> {
    let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    read_units(file).map_err(|e| Error::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(atoms: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::from_atoms(1.0, atoms).unwrap()
    }

    fn assert_atoms(d: &DiscreteDistribution, expected: &[(f64, f64)]) {
        let got: Vec<(f64, f64)> = d.atoms().filter(|a| a.1 != 0.0).collect();
        assert_eq!(got.len(), expected.len(), "{got:?}");
        for ((gv, gp), (ev, ep)) in got.iter().zip(expected) {
            assert!((gv - ev).abs() < 1e-9, "{got:?}");
            assert!((gp - ep).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn single_unit_copt() {
        let d = build_copt(&[GenUnit::new("a", 10.0, 0.9).unwrap()], 1.0).unwrap();
        assert_atoms(&d, &[(0.0, 0.1), (10.0, 0.9)]);
    }

    #[test]
    fn two_unit_copt() {
        let u = GenUnit::new("a", 10.0, 0.9).unwrap();
        let d = build_copt(&[u.clone(), u], 1.0).unwrap();
        assert_atoms(&d, &[(0.0, 0.01), (10.0, 0.18), (20.0, 0.81)]);
    }

    #[test]
    fn copt_rounds_capacities_to_grid() {
        let d = build_copt(&[GenUnit::new("a", 14.9, 0.5).unwrap()], 10.0).unwrap();
        assert_atoms(&d, &[(0.0, 0.5), (10.0, 0.5)]);
        let d = build_copt(&[GenUnit::new("a", 15.0, 0.5).unwrap()], 10.0).unwrap();
        assert_atoms(&d, &[(0.0, 0.5), (20.0, 0.5)]);
    }

    #[test]
    fn copt_trims_certain_units() {
        let d = build_copt(
            &[
                GenUnit::new("always", 50.0, 1.0).unwrap(),
                GenUnit::new("never", 30.0, 0.0).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.min_value(), 50.0);
    }

    #[test]
    fn copt_rejects_bad_input() {
        assert!(build_copt(&[], 1.0).is_err());
        let bad = GenUnit {
            name: "x".into(),
            capacity_mw: f64::NAN,
            availability: 0.5,
        };
        assert!(build_copt(&[bad], 1.0).is_err());
        let bad = GenUnit {
            name: "x".into(),
            capacity_mw: 10.0,
            availability: 1.5,
        };
        assert!(build_copt(&[bad], 1.0).is_err());
        assert!(GenUnit::new("x", 10.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_examples() {
        let d = dist(&[(0.0, 0.1), (100.0, 0.9)]);
        assert_eq!(d.cdf(50.0).unwrap(), 0.1);
        assert_eq!(d.cdf(100.0).unwrap(), 1.0);
        assert_eq!(d.cdf(-1.0).unwrap(), 0.0);
        assert_eq!(d.cdf(0.0).unwrap(), 0.1);
        assert_eq!(d.cdf(1e9).unwrap(), 1.0);
        assert!(d.cdf(f64::NAN).is_err());
        assert!(d.cdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn cdf_snaps_fractional_grids() {
        let d = DiscreteDistribution::new(0.0, 0.1, vec![0.25; 4]).unwrap();
        assert_eq!(d.cdf(0.3 - 1e-15).unwrap(), 1.0);
        assert_eq!(d.cdf(0.2).unwrap(), 0.75);
    }

    #[test]
    fn convolve_examples() {
        let half = dist(&[(0.0, 0.5), (10.0, 0.5)]);
        let c = convolve(&half, &half).unwrap();
        assert_atoms(&c, &[(0.0, 0.25), (10.0, 0.5), (20.0, 0.25)]);

        let id = DiscreteDistribution::point_mass(0.0, 1.0).unwrap();
        let d = dist(&[(3.0, 0.2), (7.0, 0.8)]);
        assert_eq!(convolve(&id, &d).unwrap().probs(), d.probs());

        let other = DiscreteDistribution::point_mass(0.0, 2.0).unwrap();
        assert!(convolve(&d, &other).is_err());
    }

    #[test]
    fn convolve_adds_means() {
        let a = dist(&[(3.0, 0.2), (7.0, 0.3), (8.0, 0.5)]);
        let b = dist(&[(-4.0, 0.6), (10.0, 0.4)]);
        let c = convolve(&a, &b).unwrap();
        assert!((c.mean() - (a.mean() + b.mean())).abs() < 1e-9);
    }

    #[test]
    fn negate_and_shift_examples() {
        let d = negate_and_shift(&dist(&[(10.0, 1.0)]), 0.0).unwrap();
        assert_atoms(&d, &[(-10.0, 1.0)]);
        let d = negate_and_shift(&dist(&[(0.0, 0.5), (10.0, 0.5)]), 10.0).unwrap();
        assert_atoms(&d, &[(0.0, 0.5), (10.0, 0.5)]);
        let src = dist(&[(1.0, 0.2), (4.0, 0.7), (9.0, 0.1)]);
        let d = negate_and_shift(&src, 3.5).unwrap();
        assert!((d.mean() - (3.5 - src.mean())).abs() < 1e-12);
    }

    #[test]
    fn moments_examples() {
        let (m, s) = dist(&[(0.0, 0.5), (10.0, 0.5)]).moments();
        assert!((m - 5.0).abs() < 1e-12 && (s - 5.0).abs() < 1e-12);
        let (m, s) = dist(&[(42.0, 1.0)]).moments();
        assert_eq!((m, s), (42.0, 0.0));
    }

    #[test]
    fn expected_shortfall_examples() {
        assert_eq!(dist(&[(100.0, 1.0)]).expected_shortfall(150.0).unwrap(), 50.0);
        let d = dist(&[(0.0, 0.5), (100.0, 0.5)]);
        assert_eq!(d.expected_shortfall(50.0).unwrap(), 25.0);
        assert_eq!(d.expected_shortfall(-3.0).unwrap(), 0.0);
        assert!(d.expected_shortfall(f64::NAN).is_err());
    }

    #[test]
    fn rejects_mass_defect() {
        assert!(DiscreteDistribution::new(0.0, 1.0, vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(DiscreteDistribution::new(0.0, 1.0, vec![0.0, 0.0]).is_err());
        assert!(DiscreteDistribution::new(0.0, 1.0, vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn reads_unit_csv() {
        let text = "name,capacity_mw,availability\nccgt1, 500, 0.87\nnuc,1200,0.8\n";
        let units = read_units(text.as_bytes()).unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!(units[1].capacity_mw, 1200.0);

        assert!(read_units("name,capacity_mw,availability\n".as_bytes()).is_err());
        let err = read_units("name,capacity_mw,availability\na,10,2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(read_units("name,capacity\na,10\n".as_bytes()).is_err());
    }
}
