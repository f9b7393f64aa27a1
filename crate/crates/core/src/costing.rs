//! OpEx per tenant age and per calendar year, the CapEx ledger, and TCO.
//!
//! Storage space is a stock: a tenant's data accumulates linearly, so during
//! its `k`-th year it holds on average `(k - 1/2)` years' worth of data.
//! Transactions, writes and transfers are flows and cost the same every year.
//! Fleet costs are the convolution of the per-age costs with the onboarding
//! schedule; a tenant is billed its age-1 cost in its onboarding year.

use serde::{Deserialize, Serialize};

use crate::catalog::{ComputeSku, PriceCatalog, Redundancy, Tier};
use crate::error::{Error, Issue, Result};
use crate::numeric::check_non_negative;
use crate::rightscale::ScalingPlan;
use crate::workload::{CohortSchedule, GrowthForecast};

const MONTHS_PER_YEAR: f64 = 12.0;
const TX_UNIT: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapexItem {
    pub label: String,
    pub amount: f64,
}

pub(crate) fn capex_issues(items: &[CapexItem], scope: &str) -> Vec<Issue> {
    items
        .iter()
        .enumerate()
        .filter(|(_, item)| !check_non_negative(item.amount))
        .map(|(i, item)| {
            Issue::new(
                format!("{scope}[{i}] ({:?})", item.label),
                format!("amount must be >= 0 (got {})", item.amount),
            )
        })
        .collect()
}

/// Space cost during the `age_year`-th year of a tenant whose stored volume
/// grows by `annual_increment_gb` per year.
pub fn storage_space_cost(annual_increment_gb: f64, space_rate: f64, age_year: u32) -> f64 {
    (f64::from(age_year) - 0.5) * annual_increment_gb * MONTHS_PER_YEAR * space_rate
}

pub fn transaction_cost(annual_ops: f64, tx_rate_per_10k: f64) -> f64 {
    annual_ops / TX_UNIT * tx_rate_per_10k
}

pub fn data_write_cost(annual_gb_written: f64, write_rate: f64) -> f64 {
    annual_gb_written * write_rate
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AgeCost {
    pub age: u32,
    pub blob_space: f64,
    pub blob_tx: f64,
    pub blob_write: f64,
    pub table_space: f64,
    pub table_tx: f64,
}

impl AgeCost {
    pub fn blob_total(&self) -> f64 {
        self.blob_space + self.blob_tx + self.blob_write
    }

    pub fn table_total(&self) -> f64 {
        self.table_space + self.table_tx
    }

    pub fn total(&self) -> f64 {
        self.blob_total() + self.table_total()
    }
}

/// Storage cost of one tenant by age (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct TenantAgeCostProfile {
    pub redundancy: Redundancy,
    pub tier: Tier,
    pub ages: Vec<AgeCost>,
}

impl TenantAgeCostProfile {
    pub fn blob_totals(&self) -> Vec<f64> {
        self.ages.iter().map(AgeCost::blob_total).collect()
    }

    pub fn table_totals(&self) -> Vec<f64> {
        self.ages.iter().map(AgeCost::table_total).collect()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.ages.iter().map(AgeCost::total).collect()
    }
}

/// Per-age costs for one tenant. `write_override`, when given, replaces the
/// computed blob write cost for each age.
pub fn tenant_age_cost_profile(
    forecast: &GrowthForecast,
    catalog: &PriceCatalog,
    redundancy: Redundancy,
    tier: Tier,
    horizon: u32,
    write_override: Option<&[f64]>,
) -> Result<TenantAgeCostProfile> {
    let blob = catalog.lookup_blob(redundancy, tier)?;
    let table = catalog.lookup_table(redundancy)?;
    if let Some(overrides) = write_override {
        if overrides.len() < horizon as usize {
            return Err(Error::invalid(
                "storage.write_override",
                format!("needs {horizon} entries (got {})", overrides.len()),
            ));
        }
    }

    let docs = forecast.annual_increment_docs;
    let ages = (1..=horizon)
        .map(|age| AgeCost {
            age,
            blob_space: storage_space_cost(forecast.annual_increment_blob_gb, blob.space_rate, age),
            blob_tx: transaction_cost(docs, blob.tx_rate),
            blob_write: match write_override {
                Some(o) => o[age as usize - 1],
                None => data_write_cost(forecast.annual_increment_blob_gb, blob.write_rate),
            },
            table_space: storage_space_cost(
                forecast.annual_increment_table_gb,
                table.space_rate,
                age,
            ),
            table_tx: transaction_cost(docs, table.put_rate),
        })
        .collect();
    Ok(TenantAgeCostProfile {
        redundancy,
        tier,
        ages,
    })
}

/// Fleet cost per calendar year: every wave is billed the per-age cost that
/// matches its age in that year.
pub fn cohort_aggregate(
    age_profile: &[f64],
    schedule: &CohortSchedule,
    horizon: u32,
) -> Result<Vec<f64>> {
    if age_profile.len() < horizon as usize {
        return Err(Error::InvalidArgument(format!(
            "age profile covers {} years, horizon is {horizon}",
            age_profile.len()
        )));
    }
    Ok((1..=horizon)
        .map(|year| {
            schedule
                .waves
                .iter()
                .filter(|w| w.year >= 1 && w.year <= year)
                .map(|w| f64::from(w.count) * age_profile[(year - w.year) as usize])
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleCost {
    pub web: f64,
    pub worker: f64,
}

/// Full annual price for each year's fleet.
pub fn compute_cost(plan: &ScalingPlan, sku: &ComputeSku) -> Vec<RoleCost> {
    plan.years
        .iter()
        .map(|y| RoleCost {
            web: f64::from(y.web_vm_count) * sku.annual_cost,
            worker: f64::from(y.worker_vm_count) * sku.annual_cost,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct YearCost {
    pub year: u32,
    pub storage_blob: f64,
    pub storage_table: f64,
    pub compute_web: f64,
    pub compute_worker: f64,
    pub transfer: f64,
}

impl YearCost {
    pub fn storage_fleet(&self) -> f64 {
        self.storage_blob + self.storage_table
    }

    pub fn compute(&self) -> f64 {
        self.compute_web + self.compute_worker
    }

    pub fn total(&self) -> f64 {
        self.storage_fleet() + self.compute() + self.transfer
    }
}

/// OpEx per calendar year.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostBreakdown {
    pub years: Vec<YearCost>,
}

impl CostBreakdown {
    pub fn opex_total(&self) -> f64 {
        self.years.iter().map(YearCost::total).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcoReport {
    pub capex: Vec<CapexItem>,
    pub capex_total: f64,
    pub opex_total: f64,
    pub tco: f64,
    pub per_year: CostBreakdown,
    pub horizon: u32,
}

impl TcoReport {
    /// Each CapEx item's share of the CapEx total (0 when the total is 0).
    pub fn capex_shares(&self) -> Vec<(&str, f64)> {
        self.capex
            .iter()
            .map(|item| {
                let share = if self.capex_total > 0.0 {
                    item.amount / self.capex_total
                } else {
                    0.0
                };
                (item.label.as_str(), share)
            })
            .collect()
    }
}

pub fn tco(capex: Vec<CapexItem>, breakdown: CostBreakdown) -> TcoReport {
    let capex_total = capex.iter().map(|c| c.amount).sum();
    let opex_total = breakdown.opex_total();
    TcoReport {
        capex,
        capex_total,
        opex_total,
        tco: capex_total + opex_total,
        horizon: breakdown.years.len() as u32,
        per_year: breakdown,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::catalog::{load_catalog, tests::AZURE_CATALOG};
    use crate::workload::{forecast, tests::arb_schedule, tests::typical_tenant, Convention};
    use proptest::prelude::*;

    fn cents(x: f64) -> f64 {
        (x * 100.0).round() / 100.0
    }

    pub(crate) fn migration_capex() -> Vec<CapexItem> {
        [
            (
                "Implementation consultancy costs - business analysis",
                16_078.0,
            ),
            (
                "Implementation consultancy costs - security design",
                27_237.0,
            ),
            (
                "Implementation consultancy costs - design and development",
                80_662.0,
            ),
            ("Project management and implementation design", 16_265.0),
            ("Development and Testing", 17_465.0),
            ("Non-staff or non-contractor costs", 10_940.0),
        ]
        .into_iter()
        .map(|(label, amount)| CapexItem {
            label: label.into(),
            amount,
        })
        .collect()
    }

    /// Each tenant billed individually by its own age.
    pub(crate) fn per_tenant_oracle(
        age: &[f64],
        schedule: &CohortSchedule,
        horizon: u32,
    ) -> Vec<f64> {
        let tenants: Vec<u32> = schedule
            .waves
            .iter()
            .flat_map(|w| std::iter::repeat_n(w.year, w.count as usize))
            .collect();
        (1..=horizon)
            .map(|year| {
                tenants
                    .iter()
                    .filter(|&&onboard| onboard <= year)
                    .map(|&onboard| age[(year - onboard) as usize])
                    .sum()
            })
            .collect()
    }

    /// Per-age costs on a 1/64-euro grid, so sums are exact in f64 and the
    /// oracle comparison can be bitwise.
    pub(crate) fn arb_age_vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0u32..64_000).prop_map(|k| f64::from(k) / 64.0), len)
    }

    #[test]
    fn table_storage_space() {
        let lr: Vec<f64> = (1..=3)
            .map(|k| cents(storage_space_cost(0.380, 0.059, k)))
            .collect();
        assert_eq!(lr, vec![0.13, 0.40, 0.67]);
        let gr: Vec<f64> = (1..=3)
            .map(|k| cents(storage_space_cost(0.380, 0.085, k)))
            .collect();
        assert_eq!(gr, vec![0.19, 0.58, 0.97]);
        assert_eq!(storage_space_cost(0.0, 0.3, 7), 0.0);
    }

    #[test]
    fn transactions_and_writes() {
        assert_eq!(cents(transaction_cost(176_105.0, 0.084)), 1.48);
        assert!((transaction_cost(176_105.0, 0.169) - 2.976_174_5).abs() < 1e-9);
        assert_eq!(cents(transaction_cost(176_105.0, 0.003)), 0.05);
        assert_eq!(cents(data_write_cost(117.0, 0.002)), 0.23);
        assert_eq!(data_write_cost(0.0, 0.004), 0.0);
        assert_eq!(cents(data_write_cost(10.0, 0.004)), 0.04);
    }

    #[test]
    fn space_cost_follows_odd_progression() {
        for k in 1..10 {
            let ratio = storage_space_cost(3.7, 0.02, k) / storage_space_cost(3.7, 0.02, 1);
            assert!((ratio - f64::from(2 * k - 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn blob_profile_is_close_to_published() {
        let catalog = load_catalog(AZURE_CATALOG).unwrap();
        let f = forecast(&typical_tenant(), 3).unwrap();
        let write = [1.48, 4.43, 7.39];
        let p =
            tenant_age_cost_profile(&f, &catalog, Redundancy::Local, Tier::Cool, 3, Some(&write))
                .unwrap();
        for (got, want) in p
            .ages
            .iter()
            .map(|a| a.blob_space)
            .zip([8.87, 26.60, 44.33])
        {
            assert!((got - want).abs() <= 0.05 * want, "{got} vs {want}");
        }
        for (got, want) in p.blob_totals().iter().zip([11.83, 32.52, 53.21]) {
            assert!((got - want).abs() <= 0.05 * want, "{got} vs {want}");
        }
        assert!(p.ages.iter().all(|a| cents(a.blob_tx) == 1.48));
        let table: Vec<f64> = p.table_totals().into_iter().map(cents).collect();
        for (got, want) in table.iter().zip([0.19, 0.46, 0.73]) {
            assert!((got - want).abs() <= 0.01 + 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_forecast_costs_nothing() {
        let catalog = load_catalog(AZURE_CATALOG).unwrap();
        let f = forecast(&crate::workload::UsageProfile::zero(), 3).unwrap();
        let p =
            tenant_age_cost_profile(&f, &catalog, Redundancy::Geo, Tier::Cool, 3, None).unwrap();
        assert!(p.totals().iter().all(|t| *t == 0.0));
    }

    #[test]
    fn short_write_override_rejected() {
        let catalog = load_catalog(AZURE_CATALOG).unwrap();
        let f = forecast(&typical_tenant(), 3).unwrap();
        let err =
            tenant_age_cost_profile(&f, &catalog, Redundancy::Local, Tier::Cool, 3, Some(&[1.0]))
                .unwrap_err();
        assert!(err.to_string().contains("write_override"));
    }

    #[test]
    fn fleet_storage_from_published_tenant_totals() {
        let s = CohortSchedule::uniform(80, 3, Convention::MidYear);
        let lr = cohort_aggregate(&[11.83, 32.52, 53.21], &s, 3).unwrap();
        for (got, want) in lr.iter().zip([946.40, 3_548.00, 7_804.80]) {
            assert!((got - want).abs() < 1e-9);
        }
        let gr = cohort_aggregate(&[23.73, 65.25, 106.77], &s, 3).unwrap();
        for (got, want) in gr.iter().zip([1_898.0, 7_118.0, 15_660.0]) {
            assert!((got - want).abs() <= 1.0);
        }
        let single = CohortSchedule {
            waves: vec![crate::workload::Wave { year: 2, count: 1 }],
            convention: Convention::MidYear,
        };
        assert_eq!(
            cohort_aggregate(&[1.0, 2.0, 3.0], &single, 3).unwrap(),
            vec![0.0, 1.0, 2.0]
        );
        assert!(cohort_aggregate(&[1.0], &s, 3).is_err());
    }

    #[test]
    fn capex_ledger() {
        let report = tco(migration_capex(), CostBreakdown::default());
        assert_eq!(report.capex_total, 168_647.0);
        let shares = report.capex_shares();
        assert!((shares[2].1 * 100.0 - 47.83).abs() <= 0.01);
        assert!((shares[1].1 * 100.0 - 16.15).abs() <= 0.01);
        assert_eq!(tco(Vec::new(), CostBreakdown::default()).tco, 0.0);
    }

    #[test]
    fn tco_from_published_fleet_costs() {
        // Published fleet cells, local-redundant storage.
        let storage = [946.0, 3_548.0, 7_805.0];
        let web = [9_536.0, 28_606.0, 47_676.0];
        let worker = [3_179.0, 6_357.0, 9_536.0];
        let years = (0..3)
            .map(|i| YearCost {
                year: i as u32 + 1,
                storage_blob: storage[i],
                compute_web: web[i],
                compute_worker: worker[i],
                ..Default::default()
            })
            .collect();
        let r = tco(migration_capex(), CostBreakdown { years });
        assert!((r.tco - 285_836.0).abs() <= 3.0);
        assert_eq!(r.tco, r.capex_total + r.opex_total);
    }

    proptest! {
        #[test]
        fn cohort_matches_per_tenant_enumeration(
            (h, s, age) in (1u32..7).prop_flat_map(|h| (Just(h), arb_schedule(h), arb_age_vector(h as usize)))
        ) {
            prop_assert_eq!(cohort_aggregate(&age, &s, h).unwrap(), per_tenant_oracle(&age, &s, h));
        }

        #[test]
        fn capex_partition_additivity(amounts in prop::collection::vec(0.0f64..1e6, 0..10), split in 0usize..10, opex in 0.0f64..1e6) {
            let items: Vec<CapexItem> = amounts.iter().map(|a| CapexItem { label: "x".into(), amount: *a }).collect();
            let split = split.min(items.len());
            let breakdown = CostBreakdown { years: vec![YearCost { year: 1, transfer: opex, ..Default::default() }] };
            let whole = tco(items.clone(), breakdown.clone());
            let left = tco(items[..split].to_vec(), breakdown.clone());
            let right = tco(items[split..].to_vec(), breakdown);
            prop_assert!((whole.capex_total - (left.capex_total + right.capex_total)).abs() <= 1e-6);
            prop_assert_eq!(whole.tco, whole.capex_total + whole.opex_total);
        }

        #[test]
        fn space_cost_ratio_equals_rate_ratio(gb in 0.001f64..1e4, r1 in 0.001f64..1.0, r2 in 0.001f64..1.0, age in 1u32..10) {
            let ratio = storage_space_cost(gb, r1, age) / storage_space_cost(gb, r2, age);
            prop_assert!((ratio - r1 / r2).abs() <= 1e-12 * (r1 / r2));
        }
    }
}
