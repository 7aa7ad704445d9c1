//! Estimated joint distribution of demand `D` and available wind `Y`.
//!
//! Three estimators share one interface, a weighted multiset of net-demand
//! atoms `d - y`:
//!
//! * **hindcast**: the empirical distribution of the paired observations,
//!   `N` atoms `d_t - y_t` of weight `1/N`;
//! * **independence**: the product of the two empirical marginals,
//!   `N_d * N_y` atoms `d_t - y_s`;
//! * **rescaled**: wind conditional on demand is the marginal scaled by
//!   `lambda(d)`, giving atoms `d_t - lambda(d_t) y_s`.
//!
//! Product models are never materialized by the risk folds. [`JointModel::expect`]
//! streams them as an outer loop over demand atoms and an inner loop over
//! distinct wind values, with compensated summation at both levels and fixed
//! chunk boundaries so the result does not depend on the thread count.

mod loess;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numeric::CompensatedSum;

pub use loess::{loess_fit, LoessFit};

/// Observations per parallel work item. Fixed so that partial sums, and
/// hence results, are identical for any number of threads.
const CHUNK: usize = 512;

/// Piecewise-linear demand-dependent wind scaling factor.
///
/// With `d = (demand - demand_offset_mw) / acs_ref_mw`, the factor is `l1`
/// up to `d1_norm`, `l2` from `d2_norm`, and linear in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFunction {
    pub d1_norm: f64,
    pub d2_norm: f64,
    pub l1: f64,
    pub l2: f64,
    pub acs_ref_mw: f64,
    /// Subtracted from model demand before normalizing, so that a constant
    /// adjustment added to demand does not move the thresholds.
    #[serde(default)]
    pub demand_offset_mw: f64,
}

impl ScalingFunction {
    pub fn new(d1_norm: f64, d2_norm: f64, l1: f64, l2: f64, acs_ref_mw: f64) -> Result<Self> {
        let sf = ScalingFunction {
            d1_norm,
            d2_norm,
            l1,
            l2,
            acs_ref_mw,
            demand_offset_mw: 0.0,
        };
        sf.validate()?;
        Ok(sf)
    }

    /// The pessimistic bound used for GB winter studies: full wind below 95%
    /// of ACS peak, falling linearly to half at 103%.
    pub fn pessimistic(acs_ref_mw: f64) -> Result<Self> {
        Self::new(0.95, 1.03, 1.0, 0.5, acs_ref_mw)
    }

    /// `lambda == 1` everywhere; the rescaled model then equals independence.
    pub fn identity(acs_ref_mw: f64) -> Result<Self> {
        Self::new(0.95, 1.03, 1.0, 1.0, acs_ref_mw)
    }

    pub fn with_offset(mut self, demand_offset_mw: f64) -> Result<Self> {
        self.demand_offset_mw = demand_offset_mw;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.acs_ref_mw.is_finite() && self.acs_ref_mw > 0.0,
            InvalidArgument,
            "lambda: ACS reference must be positive, got {}",
            self.acs_ref_mw
        );
        ensure!(
            self.d1_norm.is_finite() && self.d2_norm.is_finite() && self.d1_norm < self.d2_norm,
            InvalidArgument,
            "lambda: need d1_norm < d2_norm, got {} and {}",
            self.d1_norm,
            self.d2_norm
        );
        ensure!(
            0.0 < self.l2 && self.l2 <= self.l1 && self.l1 <= 1.0,
            InvalidArgument,
            "lambda: need 0 < l2 <= l1 <= 1, got l1 = {} and l2 = {}",
            self.l1,
            self.l2
        );
        ensure!(
            self.demand_offset_mw.is_finite(),
            InvalidArgument,
            "lambda: demand offset must be finite"
        );
        Ok(())
    }

    pub fn eval(&self, demand_mw: f64) -> Result<f64> {
        self.validate()?;
        ensure!(
            demand_mw.is_finite() && demand_mw >= 0.0,
            InvalidArgument,
            "lambda: demand must be finite and nonnegative, got {demand_mw}"
        );
        Ok(self.eval_unchecked(demand_mw))
    }

    #[inline]
    pub fn eval_unchecked(&self, demand_mw: f64) -> f64 {
        let d = (demand_mw - self.demand_offset_mw) / self.acs_ref_mw;
        if d <= self.d1_norm {
            self.l1
        } else if d >= self.d2_norm {
            self.l2
        } else {
            self.l1 + (d - self.d1_norm) / (self.d2_norm - self.d1_norm) * (self.l2 - self.l1)
        }
    }

    pub fn is_identity(&self) -> bool {
        self.l1 == 1.0 && self.l2 == 1.0
    }
}

/// Evaluates the scaling function at one demand level.
pub fn lambda_eval(sf: &ScalingFunction, demand_mw: f64) -> Result<f64> {
    sf.eval(demand_mw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hindcast,
    Independence,
    Rescaled,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Hindcast, ModelKind::Independence, ModelKind::Rescaled];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Hindcast => "hindcast",
            ModelKind::Independence => "independence",
            ModelKind::Rescaled => "rescaled",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hindcast" => Ok(ModelKind::Hindcast),
            "independence" => Ok(ModelKind::Independence),
            "rescaled" => Ok(ModelKind::Rescaled),
            other => Err(Error::Config(format!(
                "unknown model {other:?}, expected hindcast, independence or rescaled"
            ))),
        }
    }
}

/// Materialized net-demand atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct NetDemandAtoms {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NetDemandAtoms {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Paired {
        demand: Vec<f64>,
        wind: Vec<f64>,
    },
    Product {
        demand: Vec<f64>,
        /// `lambda(d_t)` per demand atom; all ones for independence.
        lambda: Vec<f64>,
        /// Distinct wind values, ascending, with their multiplicities.
        wind_values: Vec<f64>,
        wind_counts: Vec<f64>,
        /// `wind_counts / n_wind`; exactly 1 for a single distinct value.
        wind_weights: Vec<f64>,
        n_wind: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    kind: ModelKind,
    repr: Repr,
    scaling: Option<ScalingFunction>,
}

fn check_values(values: &[f64], what: &str) -> Result<()> {
    ensure!(!values.is_empty(), InvalidArgument, "{what} series is empty");
    ensure!(
        values.iter().all(|v| v.is_finite() && *v >= 0.0),
        InvalidArgument,
        "{what} values must be finite and nonnegative"
    );
    Ok(())
}

impl JointModel {
    /// Empirical joint distribution of paired observations.
    pub fn hindcast(demand_mw: &[f64], wind_mw: &[f64]) -> Result<Self> {
        check_values(demand_mw, "demand")?;
        check_values(wind_mw, "wind")?;
        ensure!(
            demand_mw.len() == wind_mw.len(),
            InvalidArgument,
            "hindcast needs paired series, got {} demand and {} wind values",
            demand_mw.len(),
            wind_mw.len()
        );
        Ok(JointModel {
            kind: ModelKind::Hindcast,
            repr: Repr::Paired {
                demand: demand_mw.to_vec(),
                wind: wind_mw.to_vec(),
            },
            scaling: None,
        })
    }

    pub fn independence(demand_mw: &[f64], wind_mw: &[f64]) -> Result<Self> {
        Self::product(ModelKind::Independence, demand_mw, wind_mw, None)
    }

    pub fn rescaled(demand_mw: &[f64], wind_mw: &[f64], scaling: ScalingFunction) -> Result<Self> {
        scaling.validate()?;
        Self::product(ModelKind::Rescaled, demand_mw, wind_mw, Some(scaling))
    }

    /// Builds a model of the given kind; `scaling` is required for
    /// `Rescaled` and ignored otherwise.
    pub fn build(
        kind: ModelKind,
        demand_mw: &[f64],
        wind_mw: &[f64],
        scaling: Option<&ScalingFunction>,
    ) -> Result<Self> {
        match kind {
            ModelKind::Hindcast => Self::hindcast(demand_mw, wind_mw),
            ModelKind::Independence => Self::independence(demand_mw, wind_mw),
            ModelKind::Rescaled => {
                let sf = scaling.ok_or_else(|| {
                    Error::Config("rescaled model requires a scaling function".to_string())
                })?;
                Self::rescaled(demand_mw, wind_mw, *sf)
            }
        }
    }

    fn product(
        kind: ModelKind,
        demand_mw: &[f64],
        wind_mw: &[f64],
        scaling: Option<ScalingFunction>,
    ) -> Result<Self> {
        check_values(demand_mw, "demand")?;
        check_values(wind_mw, "wind")?;
        let mut sorted = wind_mw.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut wind_values: Vec<f64> = Vec::new();
        let mut wind_counts: Vec<f64> = Vec::new();
        for v in sorted {
            if wind_values.last() == Some(&v) {
                *wind_counts.last_mut().unwrap() += 1.0;
            } else {
                wind_values.push(v);
                wind_counts.push(1.0);
            }
        }
        let lambda = match &scaling {
            Some(sf) => demand_mw.iter().map(|&d| sf.eval_unchecked(d)).collect(),
            None => vec![1.0; demand_mw.len()],
        };
        Ok(JointModel {
            kind,
            repr: Repr::Product {
                demand: demand_mw.to_vec(),
                lambda,
                wind_values,
                wind_weights: wind_counts.iter().map(|c| c / wind_mw.len() as f64).collect(),
                wind_counts,
                n_wind: wind_mw.len(),
            },
            scaling,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn scaling(&self) -> Option<&ScalingFunction> {
        self.scaling.as_ref()
    }

    pub fn demand(&self) -> &[f64] {
        match &self.repr {
            Repr::Paired { demand, .. } | Repr::Product { demand, .. } => demand,
        }
    }

    /// Number of atoms in the (possibly unmaterialized) multiset.
    pub fn atom_count(&self) -> usize {
        match &self.repr {
            Repr::Paired { demand, .. } => demand.len(),
            Repr::Product { demand, n_wind, .. } => demand.len() * n_wind,
        }
    }

    /// The same demand atoms with wind removed (`Y == 0`).
    pub fn demand_only(&self) -> JointModel {
        let demand = self.demand().to_vec();
        let wind = vec![0.0; demand.len()];
        JointModel {
            kind: ModelKind::Hindcast,
            repr: Repr::Paired { demand, wind },
            scaling: None,
        }
    }

    /// Largest wind value any atom can subtract.
    pub fn max_wind(&self) -> f64 {
        match &self.repr {
            Repr::Paired { wind, .. } => wind.iter().copied().fold(0.0, f64::max),
            Repr::Product {
                wind_values, lambda, ..
            } => {
                let lmax = lambda.iter().copied().fold(0.0, f64::max);
                wind_values.last().copied().unwrap_or(0.0) * lmax
            }
        }
    }

    /// Smallest and largest atom value.
    pub fn net_demand_range(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Paired { demand, wind } => demand
                .iter()
                .zip(wind)
                .map(|(d, y)| d - y)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v))),
            Repr::Product {
                demand,
                lambda,
                wind_values,
                ..
            } => {
                let ymin = wind_values[0];
                let ymax = *wind_values.last().unwrap();
                demand
                    .iter()
                    .zip(lambda)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&d, &l)| {
                        (lo.min(d - l * ymax), hi.max(d - l * ymin))
                    })
            }
        }
    }

    /// Net demand of each paired observation, in observation order.
    /// `None` for product models.
    pub fn hindcast_net_demand(&self) -> Option<Vec<f64>> {
        match &self.repr {
            Repr::Paired { demand, wind } => Some(demand.iter().zip(wind).map(|(d, y)| d - y).collect()),
            Repr::Product { .. } => None,
        }
    }

    /// `sum_atoms weight * f(value)`, streamed.
    pub fn expect<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        match &self.repr {
            Repr::Paired { demand, wind } => {
                let partials: Vec<CompensatedSum> = demand
                    .par_chunks(CHUNK)
                    .zip(wind.par_chunks(CHUNK))
                    .map(|(d, y)| d.iter().zip(y).map(|(d, y)| f(d - y)).sum())
                    .collect();
                let mut total = CompensatedSum::new();
                partials.iter().for_each(|p| total.merge(p));
                total.value() / demand.len() as f64
            }
            Repr::Product {
                demand,
                lambda,
                wind_values,
                wind_weights,
                ..
            } => {
                let partials: Vec<CompensatedSum> = demand
                    .par_chunks(CHUNK)
                    .zip(lambda.par_chunks(CHUNK))
                    .map(|(d, l)| {
                        let mut outer = CompensatedSum::new();
                        for (&d, &l) in d.iter().zip(l) {
                            let mut inner = CompensatedSum::new();
                            for (&y, &w) in wind_values.iter().zip(wind_weights) {
                                inner.add(w * f(d - l * y));
                            }
                            outer.add(inner.value());
                        }
                        outer
                    })
                    .collect();
                let mut total = CompensatedSum::new();
                partials.iter().for_each(|p| total.merge(p));
                total.value() / demand.len() as f64
            }
        }
    }

    /// Materializes every atom. Product models produce `N_d * N_y` atoms,
    /// so this is meant for small models and tests.
    pub fn net_demand_atoms(&self) -> NetDemandAtoms {
        match &self.repr {
            Repr::Paired { demand, wind } => {
                let w = 1.0 / demand.len() as f64;
                NetDemandAtoms {
                    values: demand.iter().zip(wind).map(|(d, y)| d - y).collect(),
                    weights: vec![w; demand.len()],
                }
            }
            Repr::Product {
                demand,
                lambda,
                wind_values,
                wind_counts,
                n_wind,
                ..
            } => {
                let w = 1.0 / (demand.len() as f64 * *n_wind as f64);
                let mut values = Vec::with_capacity(demand.len() * n_wind);
                for (&d, &l) in demand.iter().zip(lambda) {
                    for (&y, &c) in wind_values.iter().zip(wind_counts) {
                        for _ in 0..c as usize {
                            values.push(d - l * y);
                        }
                    }
                }
                let n = values.len();
                NetDemandAtoms {
                    values,
                    weights: vec![w; n],
                }
            }
        }
    }

    /// Marginal wind CDF implied by the rescaled model,
    /// `(1/N_d) sum_t F_Y(y / lambda(d_t))`, at each grid point.
    pub fn implied_wind_marginal(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let Repr::Product {
            demand,
            lambda,
            wind_values,
            wind_counts,
            n_wind,
            ..
        } = &self.repr
        else {
            return Err(Error::InvalidArgument(
                "implied wind marginal needs a rescaled model".to_string(),
            ));
        };
        ensure!(
            self.kind == ModelKind::Rescaled,
            InvalidArgument,
            "implied wind marginal needs a rescaled model, got {}",
            self.kind
        );
        ensure!(
            grid.iter().all(|g| g.is_finite()),
            InvalidArgument,
            "grid values must be finite"
        );
        let mut cum = Vec::with_capacity(wind_counts.len());
        let mut acc = 0.0;
        for c in wind_counts {
            acc += c;
            cum.push(acc);
        }
        let n_wind = *n_wind as f64;
        let empirical_cdf = |y: f64| -> f64 {
            let k = wind_values.partition_point(|&w| w <= y);
            if k == 0 {
                0.0
            } else {
                cum[k - 1] / n_wind
            }
        };
        Ok(grid
            .iter()
            .map(|&y| {
                let s: CompensatedSum = lambda.iter().map(|&l| empirical_cdf(y / l)).sum();
                s.value() / demand.len() as f64
            })
            .collect())
    }
}

/// Free-function form of [`JointModel::net_demand_atoms`].
pub fn net_demand_atoms(model: &JointModel) -> NetDemandAtoms {
    model.net_demand_atoms()
}

/// Free-function form of [`JointModel::implied_wind_marginal`].
pub fn implied_wind_marginal(model: &JointModel, grid: &[f64]) -> Result<Vec<f64>> {
    model.implied_wind_marginal(grid)
}
