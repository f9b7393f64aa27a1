//! Report tables, rendered as aligned text or written as CSV.
//!
//! Cells keep full-precision values until rendering, where monetary amounts
//! are rounded half-up to cents. Text and CSV output share the same rendered
//! strings.

use std::fs;
use std::path::{Path, PathBuf};

use crate::catalog::Redundancy;
use crate::costing::YearCost;
use crate::error::{Error, Result};
use crate::pricing::SensitivityResult;
use crate::rightscale::ScalingPlan;
use crate::scenario::{Comparison, Estimate, Scenario};
use crate::workload::CohortSchedule;

/// Half-up rounding to cents.
pub fn round_cents(x: f64) -> f64 {
    let r = (x * 100.0).round() / 100.0;
    // avoid "-0.00"
    r + 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Count(u64),
    Money(f64),
    Fixed(f64, usize),
    Percent(f64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Count(n) => n.to_string(),
            Cell::Money(x) => format!("{:.2}", round_cents(*x)),
            Cell::Fixed(x, decimals) => {
                let scale = 10f64.powi(*decimals as i32);
                format!("{:.*}", *decimals, (x * scale).round() / scale + 0.0)
            }
            Cell::Percent(x) => format!("{:.2}", round_cents(x * 100.0)),
        }
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Cell::Text(_))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem for CSV output.
    pub name: String,
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &str, title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn rendered_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let rendered = self.rendered_rows();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let numeric: Vec<bool> = (0..self.headers.len())
            .map(|c| self.rows.first().is_some_and(|r| r[c].is_numeric()))
            .collect();

        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .zip(&numeric)
                .map(|((cell, &w), &num)| {
                    if num {
                        format!("{cell:>w$}")
                    } else {
                        format!("{cell:<w$}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };

        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        out.push_str(&line(&self.headers));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &rendered {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.headers)?;
        for row in self.rendered_rows() {
            w.write_record(&row)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: self.name.clone(),
            source,
        })?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_text(&self) -> String {
        self.tables
            .iter()
            .map(Table::to_text)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Writes `<dir>/<table>.csv` for every table and returns the paths.
    pub fn write_csv_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| Error::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for table in &self.tables {
            let path = dir.join(format!("{}.csv", table.name));
            let file = fs::File::create(&path).map_err(io(&path))?;
            table.write_csv(file)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn redundancy_tag(r: Redundancy) -> &'static str {
    match r {
        Redundancy::Local => "LR",
        Redundancy::Geo => "GR",
    }
}

pub fn forecast_table(estimate: &Estimate) -> Table {
    let mut t = Table::new(
        "forecast",
        "Forecasted input parameters (per tenant)",
        &[
            "End year",
            "Number of documents",
            "Document table size (GB)",
            "Number of image blobs",
            "Image blobs size (GB)",
        ],
    );
    for y in &estimate.forecast.years {
        t.push(vec![
            Cell::Count(u64::from(y.year)),
            Cell::Fixed(y.cumulative_docs, 0),
            Cell::Fixed(y.cumulative_table_gb, 3),
            Cell::Fixed(y.cumulative_docs, 0),
            Cell::Fixed(y.cumulative_blob_gb, 0),
        ]);
    }
    t
}

pub fn capex_table(estimate: &Estimate) -> Table {
    let mut t = Table::new(
        "capex",
        "Migration and implementation costs",
        &["Implementation phase", "Cost", "Share (%)"],
    );
    for (item, (_, share)) in estimate.tco.capex.iter().zip(estimate.tco.capex_shares()) {
        t.push(vec![
            item.label.as_str().into(),
            Cell::Money(item.amount),
            Cell::Percent(share),
        ]);
    }
    let total_share = if estimate.tco.capex_total > 0.0 {
        1.0
    } else {
        0.0
    };
    t.push(vec![
        "Total".into(),
        Cell::Money(estimate.tco.capex_total),
        Cell::Percent(total_share),
    ]);
    t
}

pub fn blob_cost_table(estimate: &Estimate) -> Table {
    let p = &estimate.age_costs;
    let mut t = Table::new(
        "blob_costs",
        format!(
            "Blob storage costs per tenant ({} redundancy, {} tier)",
            p.redundancy, p.tier
        ),
        &[
            "End year",
            "Space cost",
            "Transactions cost",
            "Data access write cost",
            "Total cost",
        ],
    );
    for a in &p.ages {
        t.push(vec![
            Cell::Count(u64::from(a.age)),
            Cell::Money(a.blob_space),
            Cell::Money(a.blob_tx),
            Cell::Money(a.blob_write),
            Cell::Money(a.blob_total()),
        ]);
    }
    t
}

pub fn table_cost_table(estimate: &Estimate) -> Table {
    let p = &estimate.age_costs;
    let mut t = Table::new(
        "table_costs",
        format!(
            "Table storage costs per tenant ({} redundancy)",
            p.redundancy
        ),
        &["End year", "Space Cost", "Transactions Cost", "Total Cost"],
    );
    for a in &p.ages {
        t.push(vec![
            Cell::Count(u64::from(a.age)),
            Cell::Money(a.table_space),
            Cell::Money(a.table_tx),
            Cell::Money(a.table_total()),
        ]);
    }
    t
}

pub fn scaling_table(plan: &ScalingPlan, schedule: &CohortSchedule) -> Table {
    let mut t = Table::new(
        "scaling_plan",
        format!(
            "Scaling plan: VM type {} ({} cores, {:.2}/year); {:.3} tenants per web VM, {:.3} per worker VM",
            plan.vm_type.name,
            plan.vm_type.cores,
            round_cents(plan.vm_type.annual_cost),
            plan.web_capacity,
            plan.worker_capacity
        ),
        &[
            "End year",
            "Clients migrated",
            "Web occupancy",
            "Worker occupancy",
            "Number of VMs (WeR)",
            "Number of VMs (WoR)",
            "Reserved fraction",
        ],
    );
    for y in &plan.years {
        t.push(vec![
            Cell::Count(u64::from(y.year)),
            Cell::Count(schedule.onboarded_in(y.year)),
            Cell::Fixed(y.web_occupancy, 2),
            Cell::Fixed(y.worker_occupancy, 2),
            Cell::Count(u64::from(y.web_vm_count)),
            Cell::Count(u64::from(y.worker_vm_count)),
            Cell::Fixed(y.reserved_fraction, 2),
        ]);
    }
    t
}

pub fn fleet_cost_table(estimate: &Estimate, schedule: &CohortSchedule) -> Table {
    let tag = redundancy_tag(estimate.age_costs.redundancy);
    let blob = format!("Blob storage ({tag})");
    let table = format!("Table storage ({tag})");
    let storage = format!("Storage costs ({tag})");
    let mut t = Table::new(
        "fleet_costs",
        "Fleet compute and storage costs",
        &[
            "End year",
            "Clients migrated",
            "Number of VMs (WeR)",
            "Number of VMs (WoR)",
            &blob,
            &table,
            &storage,
            "Compute costs (WS)",
            "Compute costs (IP)",
            "Transfer costs",
            "Total OpEx",
        ],
    );
    for (y, p) in estimate.breakdown().years.iter().zip(&estimate.plan.years) {
        t.push(vec![
            Cell::Count(u64::from(y.year)),
            Cell::Count(schedule.onboarded_in(y.year)),
            Cell::Count(u64::from(p.web_vm_count)),
            Cell::Count(u64::from(p.worker_vm_count)),
            Cell::Money(y.storage_blob),
            Cell::Money(y.storage_table),
            Cell::Money(y.storage_fleet()),
            Cell::Money(y.compute_web),
            Cell::Money(y.compute_worker),
            Cell::Money(y.transfer),
            Cell::Money(y.total()),
        ]);
    }
    let sum = |f: fn(&YearCost) -> f64| estimate.breakdown().years.iter().map(f).sum::<f64>();
    t.push(vec![
        "Total".into(),
        Cell::Count(schedule.waves.iter().map(|w| u64::from(w.count)).sum()),
        "".into(),
        "".into(),
        Cell::Money(sum(|y| y.storage_blob)),
        Cell::Money(sum(|y| y.storage_table)),
        Cell::Money(sum(YearCost::storage_fleet)),
        Cell::Money(sum(|y| y.compute_web)),
        Cell::Money(sum(|y| y.compute_worker)),
        Cell::Money(sum(|y| y.transfer)),
        Cell::Money(sum(YearCost::total)),
    ]);
    t
}

pub fn mix_table(estimate: &Estimate) -> Option<Table> {
    let mix = estimate.mix.as_ref()?;
    let mut t = Table::new(
        "instance_mix",
        format!(
            "Reserved/on-demand mix: {} reserved, cost {:.2} vs {:.2} all on-demand, savings {:.2}%",
            mix.reserved_count,
            round_cents(mix.total_cost),
            round_cents(mix.baseline_cost),
            round_cents(mix.savings_fraction * 100.0)
        ),
        &["End year", "Demand (VMs)", "Reserved VMs", "Reserved utilization (%)"],
    );
    for (p, u) in estimate.plan.years.iter().zip(&mix.utilization_series) {
        t.push(vec![
            Cell::Count(u64::from(p.year)),
            Cell::Count(u64::from(p.web_vm_count + p.worker_vm_count)),
            Cell::Count(u64::from(mix.reserved_count)),
            Cell::Percent(*u),
        ]);
    }
    Some(t)
}

pub fn tco_table(estimate: &Estimate) -> Table {
    let r = &estimate.tco;
    let mut t = Table::new("tco", "Total cost of ownership", &["Item", "Amount"]);
    t.push(vec![
        "Horizon (years)".into(),
        Cell::Count(u64::from(r.horizon)),
    ]);
    t.push(vec!["CapEx".into(), Cell::Money(r.capex_total)]);
    t.push(vec!["OpEx".into(), Cell::Money(r.opex_total)]);
    t.push(vec!["TCO".into(), Cell::Money(r.tco)]);
    t
}

pub fn pricing_table(estimate: &Estimate) -> Table {
    let p = &estimate.pricing;
    let mut t = Table::new("pricing", "Pricing", &["Item", "Value"]);
    t.push(vec!["Strategy".into(), p.strategy.to_string().into()]);
    t.push(vec![
        "Margin mu".into(),
        Cell::Fixed(p.mu, 4).render().into(),
    ]);
    t.push(vec![
        "Price".into(),
        Cell::Money(p.price_total).render().into(),
    ]);
    t.push(vec![
        "Tenant-months".into(),
        p.tenant_months.to_string().into(),
    ]);
    let fee = p
        .monthly_fee_per_tenant
        .map_or_else(|| "n/a".to_string(), |f| Cell::Money(f).render());
    t.push(vec!["Monthly fee per tenant".into(), fee.into()]);
    t
}

pub fn sensitivity_table(result: &SensitivityResult) -> Table {
    let mut t = Table::new(
        "sensitivity",
        format!(
            "Sensitivity to {}: elasticity {:.4} (step {})",
            result.parameter, result.elasticity, result.step
        ),
        &["Multiplier", "TCO", "Price", "Elasticity"],
    );
    for ((g, tco), price) in result
        .grid
        .iter()
        .zip(&result.tco_curve)
        .zip(&result.price_curve)
    {
        t.push(vec![
            Cell::Fixed(*g, 4),
            Cell::Money(*tco),
            Cell::Money(*price),
            Cell::Fixed(result.elasticity, 4),
        ]);
    }
    t
}

pub fn comparison_table(cmp: &Comparison) -> Table {
    let mut t = Table::new(
        "comparison",
        format!("Comparison by {}", cmp.axis),
        &[
            "Alternative",
            "End year",
            "Blob storage",
            "Table storage",
            "Storage total",
            "Compute",
            "Total OpEx",
            "Delta vs baseline",
        ],
    );
    let base_years: Vec<YearCost> = cmp
        .baseline()
        .map(|b| b.estimate.breakdown().years.clone())
        .unwrap_or_default();
    for (alt, delta) in cmp.alternatives.iter().zip(cmp.deltas()) {
        let label = if alt.baseline {
            format!("{} (baseline)", alt.label)
        } else {
            alt.label.clone()
        };
        for (i, y) in alt.estimate.breakdown().years.iter().enumerate() {
            let base = base_years.get(i).map_or(0.0, YearCost::total);
            t.push(vec![
                label.as_str().into(),
                Cell::Count(u64::from(y.year)),
                Cell::Money(y.storage_blob),
                Cell::Money(y.storage_table),
                Cell::Money(y.storage_fleet()),
                Cell::Money(y.compute()),
                Cell::Money(y.total()),
                Cell::Money(y.total() - base),
            ]);
        }
        let years = &alt.estimate.breakdown().years;
        let sum = |f: fn(&YearCost) -> f64| years.iter().map(f).sum::<f64>();
        t.push(vec![
            label.as_str().into(),
            "Total".into(),
            Cell::Money(sum(|y| y.storage_blob)),
            Cell::Money(sum(|y| y.storage_table)),
            Cell::Money(sum(YearCost::storage_fleet)),
            Cell::Money(sum(YearCost::compute)),
            Cell::Money(alt.opex_total()),
            Cell::Money(delta),
        ]);
    }
    t
}

/// Full report for `estimate`, with a sensitivity table when given.
pub fn estimate_report(
    scenario: &Scenario,
    estimate: &Estimate,
    sensitivity: Option<&SensitivityResult>,
) -> Report {
    let mut tables = vec![
        forecast_table(estimate),
        scaling_table(&estimate.plan, &scenario.schedule),
        blob_cost_table(estimate),
        table_cost_table(estimate),
        fleet_cost_table(estimate, &scenario.schedule),
    ];
    tables.extend(mix_table(estimate));
    tables.push(capex_table(estimate));
    tables.push(tco_table(estimate));
    tables.push(pricing_table(estimate));
    tables.extend(sensitivity.map(sensitivity_table));
    Report { tables }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn migration() -> Scenario {
        Scenario::from_toml(include_str!("../scenarios/dms_migration.toml")).unwrap()
    }

    #[test]
    fn cent_rounding_is_half_up() {
        assert_eq!(Cell::Money(9_535.08).render(), "9535.08");
        assert_eq!(Cell::Money(0.125).render(), "0.13");
        assert_eq!(Cell::Money(2.976_174_5).render(), "2.98");
        assert_eq!(Cell::Money(-0.001).render(), "0.00");
        assert_eq!(Cell::Percent(0.478_29).render(), "47.83");
        assert_eq!(Cell::Fixed(0.380_386_8, 3).render(), "0.380");
    }

    #[test]
    fn fleet_table_layout() {
        let s = migration();
        let e = s.evaluate().unwrap();
        let t = fleet_cost_table(&e, &s.schedule);
        assert_eq!(t.headers[2], "Number of VMs (WeR)");
        assert_eq!(t.headers[6], "Storage costs (LR)");
        let rows = t.rendered_rows();
        assert_eq!(rows[0][2], "6");
        assert_eq!(rows[2][3], "6");
        assert_eq!(rows[0][7], "9535.08");
        assert_eq!(rows[3][0], "Total");
    }

    #[test]
    fn text_and_csv_carry_identical_values() {
        let s = migration();
        let e = s.evaluate().unwrap();
        let report = estimate_report(&s, &e, None);
        for table in &report.tables {
            let mut buf = Vec::new();
            table.write_csv(&mut buf).unwrap();
            let mut rdr = csv::Reader::from_reader(buf.as_slice());
            let csv_rows: Vec<Vec<String>> = rdr
                .records()
                .map(|r| r.unwrap().iter().map(str::to_string).collect())
                .collect();
            assert_eq!(csv_rows, table.rendered_rows());
            let text = table.to_text();
            for row in table.rendered_rows() {
                for cell in row {
                    assert!(text.contains(&cell));
                }
            }
        }
    }

    #[test]
    fn csv_directory_output() {
        let s = migration();
        let e = s.evaluate().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = estimate_report(&s, &e, None)
            .write_csv_dir(dir.path())
            .unwrap();
        assert!(paths.iter().any(|p| p.ends_with("fleet_costs.csv")));
        let fleet = fs::read_to_string(dir.path().join("fleet_costs.csv")).unwrap();
        assert!(fleet.starts_with("End year,Clients migrated,Number of VMs (WeR)"));
    }
}
