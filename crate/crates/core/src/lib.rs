//! Cost estimation for migrating a multi-tenant SaaS product to the cloud.
//!
//! The crate follows the estimation flow end to end:
//!
//! 1. usage estimation ([`workload`]): project a typical tenant's usage over
//!    the planning horizon and model onboarding cohorts;
//! 2. IaaS configuration ([`rightscale`]): pick a VM type and size the web and
//!    worker fleets from tenant occupancy;
//! 3. cost estimation ([`costing`]): per-tenant storage costs by tenant age,
//!    fleet OpEx per calendar year, the CapEx ledger and TCO;
//! 4. pricing ([`pricing`]): `price = tco * (1 + mu)`, implied margins,
//!    subscription fees and sensitivity sweeps.
//!
//! [`scenario`] ties the phases together from a single TOML scenario file and
//! [`report`] renders the results as plain-text or CSV tables.

pub mod catalog;
pub mod costing;
pub mod error;
pub mod pricing;
pub mod report;
pub mod rightscale;
pub mod scenario;
pub mod workload;

mod numeric;

pub use catalog::{BlobRate, ComputeSku, PriceCatalog, Redundancy, TableRate, Tier, TransferRule};
pub use costing::{CapexItem, CostBreakdown, TcoReport, TenantAgeCostProfile};
pub use error::{Error, Issue, Result};
pub use pricing::{PricingDecision, PricingStrategy, SensitivityParameter, SensitivityResult};
pub use rightscale::{MixEvaluation, Role, ScalingPlan, WorkloadCalibration};
pub use scenario::{Estimate, Scenario};
pub use workload::{CohortSchedule, Convention, GrowthForecast, OccupancyBasis, UsageProfile};
