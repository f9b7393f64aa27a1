//! Price setting on top of TCO: `price = tco * (1 + mu)`.
//!
//! The margin `mu` is a management input and may be negative (loss-leader or
//! zero-margin offers). For competition- or value-driven prices the market
//! price is given instead and the implied margin is reported.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Issue, Result};
use crate::scenario::Scenario;

pub fn price(tco: f64, mu: f64) -> Result<f64> {
    if !(tco.is_finite() && tco >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tco must be >= 0 (got {tco})"
        )));
    }
    if !(mu.is_finite() && mu > -1.0) {
        return Err(Error::InvalidArgument(format!(
            "margin must be > -1, otherwise the price is not positive (got {mu})"
        )));
    }
    Ok(tco * (1.0 + mu))
}

/// Margin at which `price(tco, mu) == market_price`.
pub fn implied_margin(market_price: f64, tco: f64) -> Result<f64> {
    if !(tco.is_finite() && tco > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "implied margin needs tco > 0 (got {tco})"
        )));
    }
    Ok(market_price / tco - 1.0)
}

/// Uniform monthly fee that recovers `price(tco, mu)` over `tenant_months`.
pub fn subscription_fee(tco: f64, mu: f64, tenant_months: u64) -> Result<f64> {
    if tenant_months == 0 {
        return Err(Error::InvalidArgument("tenant_months must be > 0".into()));
    }
    Ok(price(tco, mu)? / tenant_months as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingStrategy {
    #[default]
    CostBased,
    CompetitionOriented,
    ValueBasedInput,
}

impl fmt::Display for PricingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PricingStrategy::CostBased => "cost_based",
            PricingStrategy::CompetitionOriented => "competition_oriented",
            PricingStrategy::ValueBasedInput => "value_based_input",
        })
    }
}

/// `[pricing]` section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingPolicy {
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub strategy: PricingStrategy,
    /// Competitor price level or customer willingness to pay over the
    /// horizon; required unless the strategy is cost based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market_price: Option<f64>,
}

impl PricingPolicy {
    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        match self.strategy {
            PricingStrategy::CostBased => {
                if !(self.mu.is_finite() && self.mu > -1.0) {
                    issues.push(Issue::new(format!("{scope}.mu"), "must be > -1"));
                }
            }
            _ => match self.market_price {
                None => issues.push(Issue::new(
                    format!("{scope}.market_price"),
                    format!("required for strategy {}", self.strategy),
                )),
                Some(p) if !(p.is_finite() && p > 0.0) => {
                    issues.push(Issue::new(format!("{scope}.market_price"), "must be > 0"))
                }
                Some(_) => {}
            },
        }
        issues
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingDecision {
    pub mu: f64,
    pub strategy: PricingStrategy,
    pub price_total: f64,
    /// `None` when nobody is billed (zero tenant-months).
    pub monthly_fee_per_tenant: Option<f64>,
    pub tenant_months: u64,
}

pub fn decide(tco: f64, policy: &PricingPolicy, tenant_months: u64) -> Result<PricingDecision> {
    let mu = match (policy.strategy, policy.market_price) {
        (PricingStrategy::CostBased, _) => policy.mu,
        (_, Some(market)) => implied_margin(market, tco)?,
        (strategy, None) => {
            return Err(Error::InvalidArgument(format!(
                "strategy {strategy} needs a market_price"
            )))
        }
    };
    let price_total = price(tco, mu)?;
    let monthly_fee_per_tenant = match tenant_months {
        0 => None,
        n => Some(subscription_fee(tco, mu, n)?),
    };
    Ok(PricingDecision {
        mu,
        strategy: policy.strategy,
        price_total,
        monthly_fee_per_tenant,
        tenant_months,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensitivityParameter {
    /// Per-tenant usage volume (documents, storage, CPU load).
    UsageMultiplier,
    /// Tenants in every onboarding wave.
    TenantCountMultiplier,
    /// Every catalog price.
    RateMultiplier,
}

impl SensitivityParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SensitivityParameter::UsageMultiplier => "usage_multiplier",
            SensitivityParameter::TenantCountMultiplier => "tenant_count_multiplier",
            SensitivityParameter::RateMultiplier => "rate_multiplier",
        }
    }
}

impl FromStr for SensitivityParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "usage_multiplier" => Ok(SensitivityParameter::UsageMultiplier),
            "tenant_count_multiplier" => Ok(SensitivityParameter::TenantCountMultiplier),
            "rate_multiplier" => Ok(SensitivityParameter::RateMultiplier),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

impl fmt::Display for SensitivityParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `[sensitivity]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySettings {
    pub parameter: String,
    pub grid: Vec<f64>,
}

impl SensitivitySettings {
    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        if let Err(e) = self.parameter.parse::<SensitivityParameter>() {
            issues.push(Issue::new(format!("{scope}.parameter"), e.to_string()));
        }
        if let Err(e) = check_grid(&self.grid) {
            issues.push(Issue::new(format!("{scope}.grid"), e.to_string()));
        }
        issues
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("grid must not be empty".into()));
    }
    if let Some(bad) = grid.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "grid values must be > 0 (got {bad})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    pub parameter: SensitivityParameter,
    pub grid: Vec<f64>,
    pub tco_curve: Vec<f64>,
    pub price_curve: Vec<f64>,
    pub capex_total: f64,
    /// Relative TCO change per relative change of the driver, at 1.
    pub elasticity: f64,
    /// Step used for the elasticity difference quotient.
    pub step: f64,
}

const DEFAULT_STEP: f64 = 0.01;

/// Smallest positive spacing between distinct grid values.
fn grid_step(grid: &[f64]) -> f64 {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.min(d)))
        })
        .unwrap_or(DEFAULT_STEP)
}

/// Re-runs the full pipeline at each grid multiplier of `parameter`.
/// Grid points are evaluated in parallel; results keep grid order.
pub fn sensitivity(
    scenario: &Scenario,
    parameter: &str,
    grid: &[f64],
) -> Result<SensitivityResult> {
    let parameter: SensitivityParameter = parameter.parse()?;
    check_grid(grid)?;

    let eval = |s: f64| -> Result<(f64, f64)> {
        let estimate = scenario.with_multiplier(parameter, s).evaluate()?;
        Ok((estimate.tco.tco, estimate.pricing.price_total))
    };
    let points: Vec<(f64, f64)> = grid.par_iter().map(|&s| eval(s)).collect::<Result<_>>()?;

    let step = grid_step(grid);
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (base_tco, _) = eval(1.0)?;
    let slope = if lo >= 1.0 || 1.0 - step <= 0.0 {
        (eval(1.0 + step)?.0 - base_tco) / step
    } else if hi <= 1.0 {
        (base_tco - eval(1.0 - step)?.0) / step
    } else {
        (eval(1.0 + step)?.0 - eval(1.0 - step)?.0) / (2.0 * step)
    };
    let elasticity = if base_tco > 0.0 {
        slope / base_tco
    } else {
        0.0
    };

    let capex_total = scenario.capex.iter().map(|c| c.amount).sum();
    Ok(SensitivityResult {
        parameter,
        grid: grid.to_vec(),
        tco_curve: points.iter().map(|p| p.0).collect(),
        price_curve: points.iter().map(|p| p.1).collect(),
        capex_total,
        elasticity,
        step,
    })
}
