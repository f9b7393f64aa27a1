//! Scenario files and the end-to-end estimation pipeline.
//!
//! A scenario is one self-contained TOML document holding the price catalog,
//! the typical tenant's usage, the onboarding schedule, workload calibration,
//! the CapEx ledger and the pricing policy. Every section is validated before
//! any phase runs; all violations are reported together.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{PriceCatalog, Redundancy, Tier};
use crate::costing::{
    capex_issues, cohort_aggregate, compute_cost, tco, tenant_age_cost_profile, CapexItem,
    CostBreakdown, TcoReport, TenantAgeCostProfile, YearCost,
};
use crate::error::{Error, Issue, Result};
use crate::numeric::check_non_negative;
use crate::pricing::{
    self, PricingDecision, PricingPolicy, SensitivityParameter, SensitivitySettings,
};
use crate::rightscale::{
    build_scaling_plan, evaluate_mix, MixEvaluation, MixPolicy, ScalingPlan, ScalingPolicy,
    WorkloadCalibration,
};
use crate::workload::{forecast, tenant_months, CohortSchedule, GrowthForecast, UsageProfile};

/// `[storage]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageOptions {
    #[serde(default = "default_redundancy")]
    pub redundancy: Redundancy,
    #[serde(default = "default_tier")]
    pub tier: Tier,
    /// Per-age blob write cost in euros, replacing the rate-based figure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write_override: Option<Vec<f64>>,
    /// GB per tenant-year moved within the region.
    #[serde(default)]
    pub in_region_gb: f64,
    /// GB per tenant-year moved out of the region.
    #[serde(default)]
    pub cross_region_gb: f64,
}

fn default_redundancy() -> Redundancy {
    Redundancy::Local
}

fn default_tier() -> Tier {
    Tier::Cool
}

impl Default for StorageOptions {
    fn default() -> Self {
        Self {
            redundancy: default_redundancy(),
            tier: default_tier(),
            write_override: None,
            in_region_gb: 0.0,
            cross_region_gb: 0.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    horizon: Option<i64>,
    catalog: Option<PriceCatalog>,
    profile: Option<UsageProfile>,
    schedule: Option<CohortSchedule>,
    calibration: Option<WorkloadCalibration>,
    #[serde(default)]
    capex: Vec<CapexItem>,
    #[serde(default)]
    storage: StorageOptions,
    #[serde(default)]
    scaling: ScalingPolicy,
    mix: Option<MixPolicy>,
    #[serde(default)]
    pricing: PricingPolicy,
    sensitivity: Option<SensitivitySettings>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub horizon: u32,
    pub catalog: PriceCatalog,
    pub profile: UsageProfile,
    pub schedule: CohortSchedule,
    pub calibration: WorkloadCalibration,
    pub capex: Vec<CapexItem>,
    pub storage: StorageOptions,
    pub scaling: ScalingPolicy,
    pub mix: Option<MixPolicy>,
    pub pricing: PricingPolicy,
    pub sensitivity: Option<SensitivitySettings>,
}

/// Everything the pipeline produces for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub forecast: GrowthForecast,
    pub plan: ScalingPlan,
    pub age_costs: TenantAgeCostProfile,
    pub tco: TcoReport,
    pub tenant_months: u64,
    pub pricing: PricingDecision,
    pub mix: Option<MixEvaluation>,
}

impl Estimate {
    pub fn breakdown(&self) -> &CostBreakdown {
        &self.tco.per_year
    }
}

impl Scenario {
    pub fn from_toml(source: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(source).map_err(|e| Error::from_toml(e, source))?;
        let mut issues = Vec::new();

        let horizon = match raw.horizon {
            Some(h) if h >= 1 && h <= i64::from(u16::MAX) => Some(h as u32),
            Some(h) => {
                issues.push(Issue::new("horizon", format!("must be >= 1 (got {h})")));
                None
            }
            None => {
                issues.push(Issue::new("horizon", "missing"));
                None
            }
        };
        for (name, present) in [
            ("catalog", raw.catalog.is_some()),
            ("profile", raw.profile.is_some()),
            ("schedule", raw.schedule.is_some()),
            ("calibration", raw.calibration.is_some()),
        ] {
            if !present {
                issues.push(Issue::new(name, "section missing"));
            }
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }

        let scenario = Scenario {
            horizon: horizon.expect("checked above"),
            catalog: raw.catalog.expect("checked above"),
            profile: raw.profile.expect("checked above"),
            schedule: raw.schedule.expect("checked above"),
            calibration: raw.calibration.expect("checked above"),
            capex: raw.capex,
            storage: raw.storage,
            scaling: raw.scaling,
            mix: raw.mix,
            pricing: raw.pricing,
            sensitivity: raw.sensitivity,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&source)
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    fn issues(&self) -> Vec<Issue> {
        let mut issues = self.catalog.issues("catalog");
        issues.extend(self.profile.issues("profile"));
        issues.extend(self.schedule.issues("schedule", self.horizon));
        issues.extend(self.calibration.issues("calibration"));
        issues.extend(capex_issues(&self.capex, "capex"));
        if let Some(mix) = &self.mix {
            issues.extend(mix.issues("mix"));
        }
        issues.extend(self.pricing.issues("pricing"));
        if let Some(s) = &self.sensitivity {
            issues.extend(s.issues("sensitivity"));
        }

        let st = &self.storage;
        if self.catalog.lookup_blob(st.redundancy, st.tier).is_err() {
            issues.push(Issue::new(
                "storage",
                format!(
                    "catalog has no blob rate for ({}, {})",
                    st.redundancy, st.tier
                ),
            ));
        }
        if self.catalog.lookup_table(st.redundancy).is_err() {
            issues.push(Issue::new(
                "storage",
                format!("catalog has no table rate for {}", st.redundancy),
            ));
        }
        if let Some(o) = &st.write_override {
            if o.len() < self.horizon as usize {
                issues.push(Issue::new(
                    "storage.write_override",
                    format!("needs {} entries (got {})", self.horizon, o.len()),
                ));
            }
            if o.iter().any(|v| !check_non_negative(*v)) {
                issues.push(Issue::new("storage.write_override", "entries must be >= 0"));
            }
        }
        for (name, v) in [
            ("in_region_gb", st.in_region_gb),
            ("cross_region_gb", st.cross_region_gb),
        ] {
            if !check_non_negative(v) {
                issues.push(Issue::new(format!("storage.{name}"), "must be >= 0"));
            }
        }

        if self.scaling.min_cores < 1 {
            issues.push(Issue::new("scaling.min_cores", "must be >= 1"));
        } else if let Err(e) = crate::rightscale::select_sku(&self.catalog, &self.scaling) {
            issues.push(Issue::new("scaling", e.to_string()));
        }
        issues
    }

    /// Runs usage estimation, right-scaling, costing and pricing in order.
    pub fn evaluate(&self) -> Result<Estimate> {
        let horizon = self.horizon;
        let forecast = forecast(&self.profile, horizon)?;

        let reserved_fraction = self.mix.as_ref().map_or(0.0, |m| m.reserved_fraction);
        let plan = build_scaling_plan(
            &self.catalog,
            &self.schedule,
            &self.calibration,
            horizon,
            &self.scaling,
            reserved_fraction,
        )?;

        let age_costs = tenant_age_cost_profile(
            &forecast,
            &self.catalog,
            self.storage.redundancy,
            self.storage.tier,
            horizon,
            self.storage.write_override.as_deref(),
        )?;
        let blob = cohort_aggregate(&age_costs.blob_totals(), &self.schedule, horizon)?;
        let table = cohort_aggregate(&age_costs.table_totals(), &self.schedule, horizon)?;
        let rule = &self.catalog.transfer;
        let transfer_per_tenant = self.storage.in_region_gb * rule.in_region_rate
            + self.storage.cross_region_gb * rule.cross_region_rate;
        let transfer = cohort_aggregate(
            &vec![transfer_per_tenant; horizon as usize],
            &self.schedule,
            horizon,
        )?;
        let compute = compute_cost(&plan, &plan.vm_type);

        let years = (0..horizon as usize)
            .map(|i| YearCost {
                year: i as u32 + 1,
                storage_blob: blob[i],
                storage_table: table[i],
                compute_web: compute[i].web,
                compute_worker: compute[i].worker,
                transfer: transfer[i],
            })
            .collect();
        let tco = tco(self.capex.clone(), CostBreakdown { years });

        let tenant_months = tenant_months(&self.schedule, horizon);
        let pricing = pricing::decide(tco.tco, &self.pricing, tenant_months)?;

        let mix = match &self.mix {
            Some(policy) => {
                let demand: Vec<f64> = plan
                    .years
                    .iter()
                    .map(|y| f64::from(y.web_vm_count + y.worker_vm_count))
                    .collect();
                let discount = policy
                    .reserved_discount
                    .unwrap_or(plan.vm_type.reserved_discount);
                Some(evaluate_mix(
                    &demand,
                    policy.reserved_fraction,
                    plan.vm_type.annual_cost,
                    discount,
                )?)
            }
            None => None,
        };

        Ok(Estimate {
            forecast,
            plan,
            age_costs,
            tco,
            tenant_months,
            pricing,
            mix,
        })
    }

    /// Copy of the scenario with one driver scaled by `factor`.
    pub fn with_multiplier(&self, parameter: SensitivityParameter, factor: f64) -> Scenario {
        let mut s = self.clone();
        match parameter {
            SensitivityParameter::UsageMultiplier => {
                s.profile = self.profile.scaled(factor);
                s.calibration = self.calibration.with_usage_scale(factor);
                s.storage.in_region_gb *= factor;
                s.storage.cross_region_gb *= factor;
                if let Some(o) = &mut s.storage.write_override {
                    o.iter_mut().for_each(|v| *v *= factor);
                }
            }
            SensitivityParameter::TenantCountMultiplier => {
                s.schedule = self.schedule.scaled(factor);
            }
            SensitivityParameter::RateMultiplier => {
                s.catalog = self.catalog.scaled(factor);
                if let Some(o) = &mut s.storage.write_override {
                    o.iter_mut().for_each(|v| *v *= factor);
                }
            }
        }
        s
    }

    /// Scenario with a different redundancy level. A write override is
    /// carried over in proportion to the two levels' write rates.
    fn with_redundancy(&self, redundancy: Redundancy) -> Scenario {
        let mut s = self.clone();
        s.storage.redundancy = redundancy;
        if redundancy != self.storage.redundancy {
            let base = self
                .catalog
                .lookup_blob(self.storage.redundancy, self.storage.tier);
            let alt = self.catalog.lookup_blob(redundancy, self.storage.tier);
            s.storage.write_override = match (&self.storage.write_override, base, alt) {
                (Some(o), Ok(base), Ok(alt)) if base.write_rate > 0.0 => {
                    let ratio = alt.write_rate / base.write_rate;
                    Some(o.iter().map(|v| v * ratio).collect())
                }
                _ => None,
            };
        }
        s
    }

    pub fn compare(&self, axis: CompareAxis) -> Result<Comparison> {
        let mut alternatives = Vec::new();
        match axis {
            CompareAxis::Redundancy => {
                for r in Redundancy::ALL {
                    let usable = self.catalog.lookup_blob(r, self.storage.tier).is_ok()
                        && self.catalog.lookup_table(r).is_ok();
                    if usable {
                        alternatives.push(Alternative {
                            label: r.to_string(),
                            baseline: r == self.storage.redundancy,
                            estimate: self.with_redundancy(r).evaluate()?,
                        });
                    }
                }
            }
            CompareAxis::VmType => {
                let baseline = crate::rightscale::select_sku(&self.catalog, &self.scaling)?
                    .name
                    .clone();
                for sku in self
                    .catalog
                    .compute
                    .iter()
                    .filter(|s| s.cores >= self.scaling.min_cores)
                {
                    let mut s = self.clone();
                    s.scaling.vm_type = Some(sku.name.clone());
                    alternatives.push(Alternative {
                        label: sku.name.clone(),
                        baseline: sku.name == baseline,
                        estimate: s.evaluate()?,
                    });
                }
                alternatives.sort_by(|a, b| {
                    a.compute_total()
                        .total_cmp(&b.compute_total())
                        .then_with(|| a.label.cmp(&b.label))
                });
            }
        }
        Ok(Comparison { axis, alternatives })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareAxis {
    Redundancy,
    VmType,
}

impl FromStr for CompareAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "redundancy" => Ok(CompareAxis::Redundancy),
            "vm_type" => Ok(CompareAxis::VmType),
            other => Err(Error::InvalidArgument(format!(
                "unknown compare axis `{other}` (expected redundancy or vm_type)"
            ))),
        }
    }
}

impl fmt::Display for CompareAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareAxis::Redundancy => "redundancy",
            CompareAxis::VmType => "vm_type",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub label: String,
    pub baseline: bool,
    pub estimate: Estimate,
}

impl Alternative {
    pub fn compute_total(&self) -> f64 {
        self.estimate
            .breakdown()
            .years
            .iter()
            .map(YearCost::compute)
            .sum()
    }

    pub fn opex_total(&self) -> f64 {
        self.estimate.tco.opex_total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub axis: CompareAxis,
    pub alternatives: Vec<Alternative>,
}

impl Comparison {
    pub fn baseline(&self) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| a.baseline)
    }

    /// OpEx difference of each alternative against the baseline.
    pub fn deltas(&self) -> Vec<f64> {
        let base = self.baseline().map_or(0.0, Alternative::opex_total);
        self.alternatives
            .iter()
            .map(|a| a.opex_total() - base)
            .collect()
    }
}
