//! Capacity value of the wind fleet: equivalent firm capacity (EFC) and
//! effective load carrying capability (ELCC).
//!
//! Both metrics solve `risk(shift) = target` where risk is the LOLP of the
//! model with all atoms shifted by a uniform MW amount. That risk is a step
//! function of the shift, so exact equality usually has no solution. We
//! evaluate it on the MW grid of the capacity distribution (anchored at 0),
//! interpolate `log(risk)` linearly between grid points, and bisect on the
//! interpolant. Where a grid value is zero the interpolation is linear in
//! risk instead.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::error::{ensure, Error, Result};
use crate::jointmodel::JointModel;
use crate::risk;

pub const DEFAULT_TOL_MW: f64 = 0.1;

/// Relative slack under which a target risk counts as equal to the
/// no-wind baseline.
const SAME_RISK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Efc,
    Elcc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityValueResult {
    pub metric: Metric,
    pub value_mw: f64,
    #[serde(rename = "pct_installed")]
    pub value_pct_installed: Option<f64>,
    pub target_risk: f64,
    pub achieved_risk: f64,
    pub iterations: usize,
    /// Width of the interval on which the interpolated risk equals the
    /// target; the reported value is its midpoint.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub plateau_mw: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl CapacityValueResult {
    /// Fills in the value as a percentage of installed capacity; left empty
    /// for zero installed capacity.
    pub fn with_installed(mut self, installed_mw: f64) -> Self {
        self.value_pct_installed = (installed_mw > 0.0).then(|| 100.0 * self.value_mw / installed_mw);
        self
    }
}

/// Risk as a function of a uniform shift, cached on grid points.
struct RiskCurve<'a> {
    copt: &'a DiscreteDistribution,
    model: &'a JointModel,
    /// +1 adds the shift to every atom, -1 subtracts it
    direction: f64,
    step: f64,
    cache: RefCell<HashMap<i64, f64>>,
}

impl<'a> RiskCurve<'a> {
    fn new(copt: &'a DiscreteDistribution, model: &'a JointModel, direction: f64) -> Self {
        RiskCurve {
            copt,
            model,
            direction,
            step: copt.step_mw(),
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn at_grid(&self, k: i64) -> f64 {
        if let Some(&r) = self.cache.borrow().get(&k) {
            return r;
        }
        let r = risk::lolp_shifted(self.copt, self.model, self.direction * k as f64 * self.step);
        self.cache.borrow_mut().insert(k, r);
        r
    }

    fn at(&self, shift: f64) -> f64 {
        let u = shift / self.step;
        let k = u.floor();
        let theta = u - k;
        let k = k as i64;
        let r0 = self.at_grid(k);
        if theta == 0.0 {
            return r0;
        }
        let r1 = self.at_grid(k + 1);
        if r0 > 0.0 && r1 > 0.0 {
            ((1.0 - theta) * r0.ln() + theta * r1.ln()).exp()
        } else {
            (1.0 - theta) * r0 + theta * r1
        }
    }
}

/// Bisection on a nonincreasing `f` for the interval where `f == target`.
/// Returns `(midpoint, iterations, plateau width)`.
fn solve_nonincreasing<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, usize, f64)> {
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo >= target && f_hi <= target) {
        return Err(Error::Numerical(format!(
            "root not bracketed: risk {f_lo:e} at {lo} MW and {f_hi:e} at {hi} MW, target {target:e}"
        )));
    }
    let mut iterations = 0;
    // smallest x with f(x) <= target
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if f(mid) > target {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
        debug_assert!(f(a) >= target && f(b) <= target);
    }
    let lower = 0.5 * (a + b);
    // largest x with f(x) >= target
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if f(mid) >= target {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let upper = 0.5 * (a + b);
    let plateau = if upper - lower > tol { upper - lower } else { 0.0 };
    Ok((0.5 * (lower + upper), iterations, plateau))
}

fn check_tol(tol_mw: f64) -> Result<()> {
    ensure!(
        tol_mw.is_finite() && tol_mw > 0.0,
        InvalidArgument,
        "solver tolerance must be positive, got {tol_mw}"
    );
    Ok(())
}

fn round_up_to_grid(v: f64, step: f64) -> f64 {
    (v / step).ceil().max(1.0) * step
}

/// LOLP with wind replaced by `firm_mw` of perfectly reliable capacity.
/// Wind in `demand_only_model` is ignored.
pub fn risk_with_firm(copt: &DiscreteDistribution, demand_only_model: &JointModel, firm_mw: f64) -> Result<f64> {
    ensure!(firm_mw.is_finite(), InvalidArgument, "firm capacity must be finite");
    let demand = demand_only_model.demand_only();
    Ok(risk::lolp_shifted(copt, &demand, -firm_mw))
}

/// Equivalent firm capacity of the wind in `model_with_wind`.
pub fn efc(copt: &DiscreteDistribution, model_with_wind: &JointModel, tol_mw: f64) -> Result<CapacityValueResult> {
    check_tol(tol_mw)?;
    let target = risk::lolp(copt, model_with_wind);
    let demand = model_with_wind.demand_only();
    let curve = RiskCurve::new(copt, &demand, -1.0);
    let baseline = curve.at(0.0);
    if target <= 0.0 {
        return Err(Error::Numerical(
            "risk with wind is zero, so the equivalent firm capacity is unbounded".to_string(),
        ));
    }

    if target >= baseline * (1.0 - SAME_RISK) {
        if target > baseline * (1.0 + 1e-9) {
            return Err(Error::Numerical(format!(
                "risk with wind ({target:e}) exceeds risk without it ({baseline:e})"
            )));
        }
        return Ok(CapacityValueResult {
            metric: Metric::Efc,
            value_mw: 0.0,
            value_pct_installed: None,
            target_risk: target,
            achieved_risk: baseline,
            iterations: 0,
            plateau_mw: 0.0,
        });
    }

    let max_demand = demand.net_demand_range().1;
    let hi = round_up_to_grid(max_demand - copt.min_value() + copt.step_mw(), copt.step_mw());
    let (value, iterations, plateau) = solve_nonincreasing(|v| curve.at(v), target, 0.0, hi, tol_mw)?;
    Ok(CapacityValueResult {
        metric: Metric::Efc,
        value_mw: value,
        value_pct_installed: None,
        target_risk: target,
        achieved_risk: curve.at(value),
        iterations,
        plateau_mw: plateau,
    })
}

/// Effective load carrying capability: the extra uniform demand the wind
/// supports at the no-wind risk level.
pub fn elcc(
    copt: &DiscreteDistribution,
    model_with_wind: &JointModel,
    demand_only_model: &JointModel,
    tol_mw: f64,
) -> Result<CapacityValueResult> {
    check_tol(tol_mw)?;
    let baseline = risk::lolp(copt, &demand_only_model.demand_only());
    if baseline <= 0.0 {
        return Err(Error::Numerical(
            "risk without wind is zero, so the load carrying capability is unbounded".to_string(),
        ));
    }
    let curve = RiskCurve::new(copt, model_with_wind, 1.0);
    let start = curve.at(0.0);
    if start >= baseline * (1.0 - SAME_RISK) {
        if start > baseline * (1.0 + 1e-9) {
            return Err(Error::Numerical(format!(
                "risk with wind ({start:e}) exceeds risk without it ({baseline:e})"
            )));
        }
        return Ok(CapacityValueResult {
            metric: Metric::Elcc,
            value_mw: 0.0,
            value_pct_installed: None,
            target_risk: baseline,
            achieved_risk: start,
            iterations: 0,
            plateau_mw: 0.0,
        });
    }

    let min_net = model_with_wind.net_demand_range().0;
    let hi = round_up_to_grid(copt.max_value() - min_net + copt.step_mw(), copt.step_mw());
    let (value, iterations, plateau) = solve_nonincreasing(|e| -curve.at(e), -baseline, 0.0, hi, tol_mw)?;
    Ok(CapacityValueResult {
        metric: Metric::Elcc,
        value_mw: value,
        value_pct_installed: None,
        target_risk: baseline,
        achieved_risk: curve.at(value),
        iterations,
        plateau_mw: plateau,
    })
}
