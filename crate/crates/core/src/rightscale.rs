//! Right-scaling: fit the forecast tenant population onto a machine profile.
//!
//! Each role (web front end, asynchronous worker) is sized independently.
//! Load is linear in tenants, so a role's capacity is a number of tenants per
//! VM and the fleet for a year is `ceil(occupancy / capacity)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{ComputeSku, PriceCatalog};
use crate::error::{Error, Issue, Result};
use crate::numeric::{check_non_negative, snapped_ceil};
use crate::workload::{occupancy_series, CohortSchedule, OccupancyBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Web,
    Worker,
}

impl Role {
    /// Web requests are served from the live population; the worker's batch
    /// queue is sized for every tenant onboarded so far.
    pub fn default_basis(self) -> OccupancyBasis {
        match self {
            Role::Web => OccupancyBasis::Average,
            Role::Worker => OccupancyBasis::EndOfYear,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Web => "web",
            Role::Worker => "worker",
        })
    }
}

fn default_headroom() -> f64 {
    1.0
}

fn default_min_instances() -> u32 {
    1
}

/// Measured CPU profile of one role plus the sizing policy applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleCalibration {
    /// Peak CPU fraction of one VM consumed per tenant.
    #[serde(default)]
    pub peak_cpu_load: f64,
    #[serde(default)]
    pub avg_cpu_load: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizing_basis: Option<OccupancyBasis>,
    /// Highest planned CPU utilisation per VM; the latency proxy.
    #[serde(default = "default_headroom")]
    pub headroom_target: f64,
    /// Tenants per VM, bypassing the CPU-derived capacity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_override: Option<f64>,
    #[serde(default = "default_min_instances")]
    pub min_instances: u32,
}

impl RoleCalibration {
    pub fn with_capacity(capacity: f64, basis: OccupancyBasis, min_instances: u32) -> Self {
        Self {
            peak_cpu_load: 0.0,
            avg_cpu_load: 0.0,
            sizing_basis: Some(basis),
            headroom_target: 1.0,
            capacity_override: Some(capacity),
            min_instances,
        }
    }

    fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        if !(0.0..=1.0).contains(&self.avg_cpu_load) || !(0.0..=1.0).contains(&self.peak_cpu_load) {
            issues.push(Issue::new(scope, "cpu loads must lie in [0, 1]"));
        } else if self.avg_cpu_load > self.peak_cpu_load {
            issues.push(Issue::new(
                format!("{scope}.avg_cpu_load"),
                "must not exceed peak_cpu_load",
            ));
        }
        if !(self.headroom_target > 0.0 && self.headroom_target <= 1.0) {
            issues.push(Issue::new(
                format!("{scope}.headroom_target"),
                format!("must lie in (0, 1] (got {})", self.headroom_target),
            ));
        }
        if let Some(cap) = self.capacity_override {
            if !(cap.is_finite() && cap > 0.0) {
                issues.push(Issue::new(
                    format!("{scope}.capacity_override"),
                    format!("must be > 0 (got {cap})"),
                ));
            }
        } else if self.peak_cpu_load == 0.0 {
            issues.push(Issue::new(
                format!("{scope}.peak_cpu_load"),
                "must be > 0 when no capacity_override is set",
            ));
        }
        issues
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadCalibration {
    pub web: RoleCalibration,
    pub worker: RoleCalibration,
}

impl WorkloadCalibration {
    pub fn role(&self, role: Role) -> &RoleCalibration {
        match role {
            Role::Web => &self.web,
            Role::Worker => &self.worker,
        }
    }

    pub fn basis(&self, role: Role) -> OccupancyBasis {
        self.role(role).sizing_basis.unwrap_or(role.default_basis())
    }

    /// Calibration for tenants whose usage is `factor` times the measured
    /// one: capacity shrinks by the same factor.
    pub fn with_usage_scale(&self, factor: f64) -> Self {
        let scale = |r: &RoleCalibration| RoleCalibration {
            peak_cpu_load: r.peak_cpu_load * factor,
            avg_cpu_load: r.avg_cpu_load * factor,
            capacity_override: r.capacity_override.map(|c| c / factor),
            ..r.clone()
        };
        Self {
            web: scale(&self.web),
            worker: scale(&self.worker),
        }
    }

    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = self.web.issues(&format!("{scope}.web"));
        issues.extend(self.worker.issues(&format!("{scope}.worker")));
        issues
    }
}

/// Tenants one VM of the role can host.
pub fn tenants_per_vm(calibration: &WorkloadCalibration, role: Role) -> Result<f64> {
    let r = calibration.role(role);
    if let Some(cap) = r.capacity_override {
        return Ok(cap);
    }
    if r.peak_cpu_load <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{role} role has zero per-tenant CPU load and no capacity_override"
        )));
    }
    Ok(r.headroom_target / r.peak_cpu_load)
}

/// `max(min_instances, ceil(occupancy / capacity))` per year.
pub fn vm_counts(occupancy: &[f64], capacity: f64, min_instances: u32) -> Result<Vec<u32>> {
    if !(capacity.is_finite() && capacity > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "capacity must be > 0 (got {capacity})"
        )));
    }
    occupancy
        .iter()
        .map(|&occ| {
            if !check_non_negative(occ) {
                return Err(Error::InvalidArgument(format!(
                    "occupancy must be >= 0 (got {occ})"
                )));
            }
            let needed = snapped_ceil(occ / capacity);
            Ok((needed as u32).max(min_instances))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanYear {
    pub year: u32,
    pub web_occupancy: f64,
    pub worker_occupancy: f64,
    pub web_vm_count: u32,
    pub worker_vm_count: u32,
    pub reserved_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPlan {
    pub vm_type: ComputeSku,
    pub web_capacity: f64,
    pub worker_capacity: f64,
    pub years: Vec<PlanYear>,
}

impl ScalingPlan {
    pub fn web_counts(&self) -> Vec<u32> {
        self.years.iter().map(|y| y.web_vm_count).collect()
    }

    pub fn worker_counts(&self) -> Vec<u32> {
        self.years.iter().map(|y| y.worker_vm_count).collect()
    }
}

fn default_min_cores() -> u32 {
    1
}

/// `[scaling]` section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingPolicy {
    #[serde(default = "default_min_cores")]
    pub min_cores: u32,
    /// Pin a SKU by name instead of picking the cheapest qualifying one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vm_type: Option<String>,
}

impl Default for ScalingPolicy {
    fn default() -> Self {
        Self {
            min_cores: default_min_cores(),
            vm_type: None,
        }
    }
}

/// `[mix]` section of a scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixPolicy {
    #[serde(default)]
    pub reserved_fraction: f64,
    /// Falls back to the selected SKU's `reserved_discount`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserved_discount: Option<f64>,
}

impl MixPolicy {
    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        if !(0.0..=1.0).contains(&self.reserved_fraction) {
            issues.push(Issue::new(
                format!("{scope}.reserved_fraction"),
                "must lie in [0, 1]",
            ));
        }
        if let Some(d) = self.reserved_discount {
            if !(0.0..=1.0).contains(&d) {
                issues.push(Issue::new(
                    format!("{scope}.reserved_discount"),
                    "must lie in [0, 1]",
                ));
            }
        }
        issues
    }
}

pub fn select_sku<'a>(catalog: &'a PriceCatalog, policy: &ScalingPolicy) -> Result<&'a ComputeSku> {
    match &policy.vm_type {
        Some(name) => {
            let sku = catalog.sku(name)?;
            if sku.cores < policy.min_cores {
                return Err(Error::InvalidArgument(format!(
                    "vm_type {name:?} has {} cores, below min_cores {}",
                    sku.cores, policy.min_cores
                )));
            }
            Ok(sku)
        }
        None => catalog.cheapest_sku(policy.min_cores),
    }
}

pub fn build_scaling_plan(
    catalog: &PriceCatalog,
    schedule: &CohortSchedule,
    calibration: &WorkloadCalibration,
    horizon: u32,
    policy: &ScalingPolicy,
    reserved_fraction: f64,
) -> Result<ScalingPlan> {
    let sku = select_sku(catalog, policy)?;
    let web_capacity = tenants_per_vm(calibration, Role::Web)?;
    let worker_capacity = tenants_per_vm(calibration, Role::Worker)?;
    let web_occ = occupancy_series(schedule, horizon, calibration.basis(Role::Web));
    let worker_occ = occupancy_series(schedule, horizon, calibration.basis(Role::Worker));
    let web = vm_counts(&web_occ, web_capacity, calibration.web.min_instances)?;
    let worker = vm_counts(
        &worker_occ,
        worker_capacity,
        calibration.worker.min_instances,
    )?;

    let years = (0..horizon as usize)
        .map(|i| PlanYear {
            year: i as u32 + 1,
            web_occupancy: web_occ[i],
            worker_occupancy: worker_occ[i],
            web_vm_count: web[i],
            worker_vm_count: worker[i],
            reserved_fraction,
        })
        .collect();
    Ok(ScalingPlan {
        vm_type: sku.clone(),
        web_capacity,
        worker_capacity,
        years,
    })
}

/// Outcome of serving a demand profile with a reserved core plus on-demand
/// overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct MixEvaluation {
    pub reserved_count: u32,
    /// Share of the reserved instances busy in each period.
    pub utilization_series: Vec<f64>,
    pub total_cost: f64,
    /// Everything on demand.
    pub baseline_cost: f64,
    pub savings_fraction: f64,
}

/// Reserved instances are paid every period at the discounted rate, busy or
/// not; demand above the reserved pool is bought on demand at full rate.
/// `unit_cost` is the full price of one instance for one period.
pub fn evaluate_mix(
    demand: &[f64],
    reserved_fraction: f64,
    unit_cost: f64,
    reserved_discount: f64,
) -> Result<MixEvaluation> {
    if let Some(bad) = demand.iter().find(|d| !check_non_negative(**d)) {
        return Err(Error::InvalidArgument(format!(
            "demand must be >= 0 (got {bad})"
        )));
    }
    if !(0.0..=1.0).contains(&reserved_fraction) {
        return Err(Error::InvalidArgument(
            "reserved_fraction must lie in [0, 1]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&reserved_discount) {
        return Err(Error::InvalidArgument(
            "reserved_discount must lie in [0, 1]".into(),
        ));
    }
    if !check_non_negative(unit_cost) {
        return Err(Error::InvalidArgument("unit cost must be >= 0".into()));
    }

    let peak = demand.iter().copied().fold(0.0, f64::max);
    let reserved_count = snapped_ceil(reserved_fraction * peak) as u32;
    let reserved = f64::from(reserved_count);

    let mut on_demand_units = 0.0;
    let utilization_series = demand
        .iter()
        .map(|&d| {
            on_demand_units += (d - reserved).max(0.0);
            if reserved_count == 0 {
                0.0
            } else {
                d.min(reserved) / reserved
            }
        })
        .collect();

    let reserved_cost = reserved * unit_cost * (1.0 - reserved_discount) * demand.len() as f64;
    let total_cost = reserved_cost + on_demand_units * unit_cost;
    let baseline_cost = demand.iter().sum::<f64>() * unit_cost;
    let savings_fraction = if baseline_cost > 0.0 {
        1.0 - total_cost / baseline_cost
    } else {
        0.0
    };
    Ok(MixEvaluation {
        reserved_count,
        utilization_series,
        total_cost,
        baseline_cost,
        savings_fraction,
    })
}
