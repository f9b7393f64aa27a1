//! Provider price catalog: compute SKUs, blob and table storage rates, and
//! data-transfer rules.
//!
//! Catalogs are plain values. Once loaded and validated they are never
//! mutated, so a single catalog can back any number of concurrent scenario
//! evaluations.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Issue, Result};
use crate::numeric::check_non_negative;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Redundancy {
    Local,
    Geo,
}

impl Redundancy {
    pub const ALL: [Redundancy; 2] = [Redundancy::Local, Redundancy::Geo];

    pub fn as_str(self) -> &'static str {
        match self {
            Redundancy::Local => "local",
            Redundancy::Geo => "geo",
        }
    }
}

impl fmt::Display for Redundancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Cool,
    General,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Cool => "cool",
            Tier::General => "general",
        })
    }
}

/// A VM flavour with its annualised on-demand price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeSku {
    pub name: String,
    pub cores: u32,
    /// Euros per VM-year.
    pub annual_cost: f64,
    /// Discount for reserved capacity, as a fraction of `annual_cost`.
    #[serde(default)]
    pub reserved_discount: f64,
}

/// Blob storage rates for one (redundancy, tier) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobRate {
    pub redundancy: Redundancy,
    pub tier: Tier,
    /// Euros per GB-month stored.
    pub space_rate: f64,
    /// Euros per 10,000 transactions.
    pub tx_rate: f64,
    /// Euros per GB written.
    #[serde(default)]
    pub write_rate: f64,
}

/// Table storage rates for one redundancy level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRate {
    pub redundancy: Redundancy,
    /// Euros per GB-month stored.
    pub space_rate: f64,
    /// Euros per 10,000 PUT transactions.
    pub put_rate: f64,
}

/// Euros per GB moved. In-region traffic is normally free.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferRule {
    #[serde(default)]
    pub in_region_rate: f64,
    #[serde(default)]
    pub cross_region_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceCatalog {
    #[serde(default)]
    pub compute: Vec<ComputeSku>,
    #[serde(default)]
    pub blob: Vec<BlobRate>,
    #[serde(default)]
    pub table: Vec<TableRate>,
    #[serde(default)]
    pub transfer: TransferRule,
    /// Informational only; no conversion is ever applied.
    #[serde(default = "default_currency")]
    pub currency: String,
}

fn default_currency() -> String {
    "EUR".to_string()
}

/// Parses and validates a catalog document (the contents of a scenario's
/// `[catalog]` section, with `compute`, `blob`, `table` and `transfer` at the
/// top level).
pub fn load_catalog(source: &str) -> Result<PriceCatalog> {
    let catalog: PriceCatalog = toml::from_str(source).map_err(|e| Error::from_toml(e, source))?;
    catalog.validate()?;
    Ok(catalog)
}

impl PriceCatalog {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("catalog values are always representable in TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues("catalog");
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    /// Collects every invariant violation, with entries prefixed by `scope`.
    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        let mut rate = |entry: String, field: &str, value: f64| {
            if !check_non_negative(value) {
                issues.push(Issue::new(
                    entry,
                    format!("{field} must be a finite value >= 0 (got {value})"),
                ));
            }
        };

        for (i, sku) in self.compute.iter().enumerate() {
            let entry = format!("{scope}.compute[{i}] ({:?})", sku.name);
            rate(entry.clone(), "annual_cost", sku.annual_cost);
            rate(entry, "reserved_discount", sku.reserved_discount);
        }
        for (i, b) in self.blob.iter().enumerate() {
            let entry = format!("{scope}.blob[{i}] ({}, {})", b.redundancy, b.tier);
            rate(entry.clone(), "space_rate", b.space_rate);
            rate(entry.clone(), "tx_rate", b.tx_rate);
            rate(entry, "write_rate", b.write_rate);
        }
        for (i, t) in self.table.iter().enumerate() {
            let entry = format!("{scope}.table[{i}] ({})", t.redundancy);
            rate(entry.clone(), "space_rate", t.space_rate);
            rate(entry, "put_rate", t.put_rate);
        }
        rate(
            format!("{scope}.transfer"),
            "in_region_rate",
            self.transfer.in_region_rate,
        );
        rate(
            format!("{scope}.transfer"),
            "cross_region_rate",
            self.transfer.cross_region_rate,
        );

        for (section, empty) in [
            ("compute", self.compute.is_empty()),
            ("blob", self.blob.is_empty()),
            ("table", self.table.is_empty()),
        ] {
            if empty {
                issues.push(Issue::new(
                    format!("{scope}.{section}"),
                    "section missing or empty",
                ));
            }
        }

        let mut names = HashSet::new();
        for (i, sku) in self.compute.iter().enumerate() {
            if sku.name.trim().is_empty() {
                issues.push(Issue::new(
                    format!("{scope}.compute[{i}]"),
                    "name must not be empty",
                ));
            }
            if sku.cores == 0 {
                issues.push(Issue::new(
                    format!("{scope}.compute[{i}] ({:?})", sku.name),
                    "cores must be >= 1",
                ));
            }
            if sku.reserved_discount > 1.0 {
                issues.push(Issue::new(
                    format!("{scope}.compute[{i}] ({:?})", sku.name),
                    "reserved_discount must be <= 1",
                ));
            }
            if !names.insert(sku.name.as_str()) {
                issues.push(Issue::new(
                    format!("{scope}.compute[{i}] ({:?})", sku.name),
                    "duplicate SKU name",
                ));
            }
        }

        let mut pairs = HashSet::new();
        for (i, b) in self.blob.iter().enumerate() {
            if !pairs.insert((b.redundancy, b.tier)) {
                issues.push(Issue::new(
                    format!("{scope}.blob[{i}] ({}, {})", b.redundancy, b.tier),
                    "duplicate (redundancy, tier) entry",
                ));
            }
        }
        let mut levels = HashSet::new();
        for (i, t) in self.table.iter().enumerate() {
            if !levels.insert(t.redundancy) {
                issues.push(Issue::new(
                    format!("{scope}.table[{i}] ({})", t.redundancy),
                    "duplicate redundancy entry",
                ));
            }
        }
        issues
    }

    pub fn lookup_blob(&self, redundancy: Redundancy, tier: Tier) -> Result<&BlobRate> {
        self.blob
            .iter()
            .find(|b| b.redundancy == redundancy && b.tier == tier)
            .ok_or_else(|| Error::NotFound(format!("blob rate for ({redundancy}, {tier})")))
    }

    pub fn lookup_table(&self, redundancy: Redundancy) -> Result<&TableRate> {
        self.table
            .iter()
            .find(|t| t.redundancy == redundancy)
            .ok_or_else(|| Error::NotFound(format!("table rate for {redundancy}")))
    }

    pub fn sku(&self, name: &str) -> Result<&ComputeSku> {
        self.compute
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::NotFound(format!("compute SKU {name:?}")))
    }

    /// Cheapest SKU offering at least `min_cores`. Ties go to fewer cores,
    /// then to the lexicographically smaller name.
    pub fn cheapest_sku(&self, min_cores: u32) -> Result<&ComputeSku> {
        if min_cores == 0 {
            return Err(Error::InvalidArgument("min_cores must be >= 1".into()));
        }
        self.compute
            .iter()
            .filter(|s| s.cores >= min_cores)
            .min_by(|a, b| {
                a.annual_cost
                    .total_cmp(&b.annual_cost)
                    .then(a.cores.cmp(&b.cores))
                    .then_with(|| a.name.cmp(&b.name))
            })
            .ok_or_else(|| Error::NotFound(format!("compute SKU with at least {min_cores} cores")))
    }

    /// Copy with every monetary rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PriceCatalog {
        let mut out = self.clone();
        for sku in &mut out.compute {
            sku.annual_cost *= factor;
        }
        for b in &mut out.blob {
            b.space_rate *= factor;
            b.tx_rate *= factor;
            b.write_rate *= factor;
        }
        for t in &mut out.table {
            t.space_rate *= factor;
            t.put_rate *= factor;
        }
        out.transfer.in_region_rate *= factor;
        out.transfer.cross_region_rate *= factor;
        out
    }
}
