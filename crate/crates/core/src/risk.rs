//! Adequacy indices from a conventional-capacity distribution and a joint
//! demand/wind model.
//!
//! Loss of load is `X <= D - Y`: a margin of exactly zero counts as a
//! shortfall.

use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::error::{ensure, Error, Result};
use crate::jointmodel::{JointModel, ModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskIndices {
    pub lolp: f64,
    #[serde(rename = "lole_hours")]
    pub lole: f64,
    #[serde(rename = "epu_mw")]
    pub epu: f64,
    #[serde(rename = "eeu_mwh")]
    pub eeu: f64,
    pub n_periods: usize,
}

/// `Pr(X <= D - Y)`.
pub fn lolp(copt: &DiscreteDistribution, model: &JointModel) -> f64 {
    model.expect(|v| copt.cdf_unchecked(v))
}

/// `E[max(D - Y - X, 0)]`.
pub fn epu(copt: &DiscreteDistribution, model: &JointModel) -> f64 {
    model.expect(|v| copt.expected_shortfall_unchecked(v))
}

/// LOLP of the model with every atom shifted by `shift_mw`.
pub fn lolp_shifted(copt: &DiscreteDistribution, model: &JointModel, shift_mw: f64) -> f64 {
    model.expect(|v| copt.cdf_unchecked(v + shift_mw))
}

pub fn season_indices(copt: &DiscreteDistribution, model: &JointModel, n_periods: usize) -> Result<RiskIndices> {
    ensure!(n_periods > 0, InvalidArgument, "n_periods must be positive");
    let lolp = lolp(copt, model);
    let epu = epu(copt, model);
    Ok(RiskIndices {
        lolp,
        lole: lolp * n_periods as f64,
        epu,
        eeu: epu * n_periods as f64,
        n_periods,
    })
}

/// Per-observation LOLP contributions of a hindcast model, sorted by net
/// demand descending. Ties keep observation order.
fn ranked_contributions(copt: &DiscreteDistribution, model: &JointModel) -> Result<Vec<f64>> {
    ensure!(
        model.kind() == ModelKind::Hindcast,
        InvalidArgument,
        "top-n share is defined for hindcast models only, got {}",
        model.kind()
    );
    let net = model.hindcast_net_demand().expect("hindcast model is paired");
    let mut order: Vec<usize> = (0..net.len()).collect();
    order.sort_by(|&a, &b| net[b].total_cmp(&net[a]).then(a.cmp(&b)));
    Ok(order.into_iter().map(|i| copt.cdf_unchecked(net[i])).collect())
}

/// Fraction of hindcast LOLE contributed by the `n` observations with the
/// highest net demand.
pub fn top_n_share(copt: &DiscreteDistribution, model: &JointModel, n: usize) -> Result<f64> {
    let curve = top_n_curve(copt, model, n)?;
    Ok(*curve.last().unwrap())
}

/// `top_n_share` for `n = 1..=n_max`.
pub fn top_n_curve(copt: &DiscreteDistribution, model: &JointModel, n_max: usize) -> Result<Vec<f64>> {
    let contrib = ranked_contributions(copt, model)?;
    ensure!(
        n_max >= 1 && n_max <= contrib.len(),
        InvalidArgument,
        "n must lie in 1..={}, got {n_max}",
        contrib.len()
    );
    let total: f64 = contrib.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical(
            "LOLP is zero, so the top-n share is undefined".to_string(),
        ));
    }
    let mut acc = 0.0;
    let mut curve = Vec::with_capacity(n_max);
    for (i, c) in contrib.iter().take(n_max).enumerate() {
        acc += c;
        // the full sum is 1 by definition; summation order must not say otherwise
        curve.push(if i + 1 == contrib.len() { 1.0 } else { (acc / total).min(1.0) });
    }
    Ok(curve)
}
