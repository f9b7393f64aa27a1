//! Per-tenant usage, its linear projection over the horizon, and tenant
//! onboarding cohorts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Issue, Result};
use crate::numeric::check_non_negative;

/// Bytes per (decimal) kilobyte.
pub const KB: f64 = 1_000.0;
/// Bytes per (decimal) gigabyte.
pub const GB: f64 = 1_000_000_000.0;

const MONTHS_PER_YEAR: u64 = 12;

/// Usage of one typical tenant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsageProfile {
    /// Documents (one table entity and one image blob each) per year. When
    /// absent the annual driver is `entities_per_month * 12`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub docs_per_year: Option<f64>,
    pub entities_per_month: f64,
    pub peak_entities_per_day: f64,
    pub peak_entities_per_hour: f64,
    /// Bytes per table entity.
    pub entity_size: f64,
    /// Kilobytes per scanned image.
    pub image_size: f64,
    /// Bytes per template file.
    #[serde(default)]
    pub template_size: f64,
}

impl UsageProfile {
    pub fn zero() -> Self {
        Self {
            docs_per_year: Some(0.0),
            entities_per_month: 0.0,
            peak_entities_per_day: 0.0,
            peak_entities_per_hour: 0.0,
            entity_size: 0.0,
            image_size: 0.0,
            template_size: 0.0,
        }
    }

    pub fn annual_docs(&self) -> f64 {
        self.docs_per_year
            .unwrap_or(self.entities_per_month * MONTHS_PER_YEAR as f64)
    }

    /// Scales every volume driver (counts, not unit sizes) by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            docs_per_year: self.docs_per_year.map(|d| d * factor),
            entities_per_month: self.entities_per_month * factor,
            peak_entities_per_day: self.peak_entities_per_day * factor,
            peak_entities_per_hour: self.peak_entities_per_hour * factor,
            ..self.clone()
        }
    }

    pub(crate) fn issues(&self, scope: &str) -> Vec<Issue> {
        let mut issues = Vec::new();
        let fields = [
            ("docs_per_year", self.docs_per_year.unwrap_or(0.0)),
            ("entities_per_month", self.entities_per_month),
            ("peak_entities_per_day", self.peak_entities_per_day),
            ("peak_entities_per_hour", self.peak_entities_per_hour),
            ("entity_size", self.entity_size),
            ("image_size", self.image_size),
            ("template_size", self.template_size),
        ];
        for (name, value) in fields {
            if !check_non_negative(value) {
                issues.push(Issue::new(
                    format!("{scope}.{name}"),
                    format!("must be a finite value >= 0 (got {value})"),
                ));
            }
        }
        if self.peak_entities_per_hour > self.peak_entities_per_day {
            issues.push(Issue::new(
                format!("{scope}.peak_entities_per_hour"),
                "must not exceed peak_entities_per_day",
            ));
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastYear {
    pub year: u32,
    pub cumulative_docs: f64,
    pub cumulative_table_gb: f64,
    pub cumulative_blob_gb: f64,
}

/// Linear multi-year projection of one tenant's stored data.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthForecast {
    pub annual_increment_docs: f64,
    pub annual_increment_table_gb: f64,
    pub annual_increment_blob_gb: f64,
    pub years: Vec<ForecastYear>,
}

impl GrowthForecast {
    pub fn horizon(&self) -> u32 {
        self.years.len() as u32
    }
}

pub fn forecast(profile: &UsageProfile, horizon_years: u32) -> Result<GrowthForecast> {
    if horizon_years < 1 {
        return Err(Error::InvalidArgument("horizon_years must be >= 1".into()));
    }
    let docs = profile.annual_docs();
    let table_gb = docs * profile.entity_size / GB;
    let blob_gb = docs * profile.image_size * KB / GB;
    let years = (1..=horizon_years)
        .map(|year| {
            let k = f64::from(year);
            ForecastYear {
                year,
                cumulative_docs: k * docs,
                cumulative_table_gb: k * table_gb,
                cumulative_blob_gb: k * blob_gb,
            }
        })
        .collect();
    Ok(GrowthForecast {
        annual_increment_docs: docs,
        annual_increment_table_gb: table_gb,
        annual_increment_blob_gb: blob_gb,
        years,
    })
}

/// When, within its onboarding year, a wave of tenants goes live.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    MidYear,
    StartOfYear,
}

impl Convention {
    /// Months active during the onboarding year.
    fn first_year_months(self) -> u64 {
        match self {
            Convention::MidYear => 6,
            Convention::StartOfYear => 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wave {
    /// 1-based year of onboarding.
    pub year: u32,
    pub count: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortSchedule {
    #[serde(default)]
    pub waves: Vec<Wave>,
    #[serde(default)]
    pub convention: Convention,
}

/// How a year's tenant population is summarised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OccupancyBasis {
    /// Tenant-months in the year divided by 12.
    #[serde(rename = "average_occupancy", alias = "average")]
    Average,
    /// Tenants onboarded by the end of the year.
    #[serde(rename = "end_of_year_occupancy", alias = "end_of_year")]
    EndOfYear,
}

impl CohortSchedule {
    pub fn uniform(per_year: u32, years: u32, convention: Convention) -> Self {
        Self {
            waves: (1..=years)
                .map(|year| Wave {
                    year,
                    count: per_year,
                })
                .collect(),
            convention,
        }
    }

    pub fn validate(&self, horizon: u32) -> Result<()> {
        let issues = self.issues("schedule", horizon);
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub(crate) fn issues(&self, scope: &str, horizon: u32) -> Vec<Issue> {
        let mut issues = Vec::new();
        for (i, w) in self.waves.iter().enumerate() {
            if w.count < 1 {
                issues.push(Issue::new(
                    format!("{scope}.waves[{i}].count"),
                    "must be >= 1",
                ));
            }
            if w.year < 1 || w.year > horizon {
                issues.push(Issue::new(
                    format!("{scope}.waves[{i}].year"),
                    format!("must be within 1..={horizon} (got {})", w.year),
                ));
            }
        }
        issues
    }

    /// Tenants onboarded in `year`.
    pub fn onboarded_in(&self, year: u32) -> u64 {
        self.waves
            .iter()
            .filter(|w| w.year == year)
            .map(|w| u64::from(w.count))
            .sum()
    }

    /// Copy with each wave's tenant count multiplied by `factor`, rounded to
    /// whole tenants. Waves that round to zero are dropped.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            waves: self
                .waves
                .iter()
                .map(|w| Wave {
                    year: w.year,
                    count: (f64::from(w.count) * factor).round() as u32,
                })
                .filter(|w| w.count > 0)
                .collect(),
            convention: self.convention,
        }
    }
}

pub fn occupancy_series(
    schedule: &CohortSchedule,
    horizon: u32,
    basis: OccupancyBasis,
) -> Vec<f64> {
    (1..=horizon)
        .map(|year| {
            schedule
                .waves
                .iter()
                .filter(|w| w.year <= year)
                .map(|w| {
                    let n = f64::from(w.count);
                    match basis {
                        OccupancyBasis::EndOfYear => n,
                        OccupancyBasis::Average if w.year == year => {
                            n * schedule.convention.first_year_months() as f64
                                / MONTHS_PER_YEAR as f64
                        }
                        OccupancyBasis::Average => n,
                    }
                })
                .sum()
        })
        .collect()
}

/// Total tenant-months within the horizon.
pub fn tenant_months(schedule: &CohortSchedule, horizon: u32) -> u64 {
    schedule
        .waves
        .iter()
        .filter(|w| w.year >= 1 && w.year <= horizon)
        .map(|w| {
            let later_years = u64::from(horizon - w.year);
            u64::from(w.count)
                * (schedule.convention.first_year_months() + later_years * MONTHS_PER_YEAR)
        })
        .sum()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Month-by-month enumeration: which tenants are live in month `m`
    /// (0-based across the horizon).
    pub(crate) fn month_grid(schedule: &CohortSchedule, horizon: u32) -> Vec<u64> {
        let start_offset = match schedule.convention {
            Convention::MidYear => 6,
            Convention::StartOfYear => 0,
        };
        (0..u64::from(horizon) * 12)
            .map(|m| {
                schedule
                    .waves
                    .iter()
                    .filter(|w| m >= u64::from(w.year - 1) * 12 + start_offset)
                    .map(|w| u64::from(w.count))
                    .sum()
            })
            .collect()
    }

    pub(crate) fn oracle_tenant_months(schedule: &CohortSchedule, horizon: u32) -> u64 {
        month_grid(schedule, horizon).iter().sum()
    }

    fn oracle_average_occupancy(schedule: &CohortSchedule, horizon: u32) -> Vec<f64> {
        month_grid(schedule, horizon)
            .chunks(12)
            .map(|year| year.iter().sum::<u64>() as f64 / 12.0)
            .collect()
    }

    pub(crate) fn typical_tenant() -> UsageProfile {
        UsageProfile {
            docs_per_year: Some(176_105.0),
            entities_per_month: 14_675.0,
            peak_entities_per_day: 3_551.0,
            peak_entities_per_hour: 1_137.0,
            entity_size: 2_160.0,
            image_size: 666.0,
            template_size: 2_200.0,
        }
    }

    #[test]
    fn forecast_matches_published_projection() {
        let f = forecast(&typical_tenant(), 3).unwrap();
        let table: Vec<f64> = f.years.iter().map(|y| y.cumulative_table_gb).collect();
        let blob: Vec<f64> = f.years.iter().map(|y| y.cumulative_blob_gb).collect();
        let docs: Vec<f64> = f.years.iter().map(|y| y.cumulative_docs).collect();
        for (got, want) in table.iter().zip([0.380, 0.761, 1.141]) {
            assert!((got - want).abs() <= 0.001, "{got} vs {want}");
        }
        for (got, want) in blob.iter().zip([117.0, 235.0, 352.0]) {
            assert!((got - want).abs() <= 1.0, "{got} vs {want}");
        }
        for (got, want) in docs.iter().zip([176_105.0, 352_210.0, 528_314.0]) {
            assert!((got - want).abs() <= 1.0, "{got} vs {want}");
        }
        assert_eq!(f.annual_increment_docs, 176_105.0);
    }

    #[test]
    fn forecast_falls_back_to_monthly_entities() {
        let p = UsageProfile {
            docs_per_year: None,
            ..typical_tenant()
        };
        assert_eq!(forecast(&p, 1).unwrap().annual_increment_docs, 176_100.0);
    }

    #[test]
    fn zero_profile_forecasts_zero() {
        let f = forecast(&UsageProfile::zero(), 4).unwrap();
        assert_eq!(f.horizon(), 4);
        assert!(f.years.iter().all(|y| y.cumulative_docs == 0.0
            && y.cumulative_blob_gb == 0.0
            && y.cumulative_table_gb == 0.0));
    }

    #[test]
    fn forecast_unit_scaling() {
        let p = UsageProfile {
            docs_per_year: Some(1.0),
            entity_size: 1e9,
            ..UsageProfile::zero()
        };
        let f = forecast(&p, 2).unwrap();
        assert_eq!(f.years[0].cumulative_table_gb, 1.0);
        assert_eq!(f.years[1].cumulative_table_gb, 2.0);
    }

    #[test]
    fn forecast_rejects_zero_horizon() {
        assert!(forecast(&typical_tenant(), 0).is_err());
    }

    #[test]
    fn profile_invariants() {
        let mut p = typical_tenant();
        p.peak_entities_per_hour = 5_000.0;
        p.entity_size = -1.0;
        let issues = p.issues("profile");
        assert_eq!(issues.len(), 2);
        assert!(issues[0].entry.ends_with("entity_size"));
    }

    #[test]
    fn occupancy_of_uniform_waves() {
        let s = CohortSchedule::uniform(80, 3, Convention::MidYear);
        assert_eq!(
            occupancy_series(&s, 3, OccupancyBasis::Average),
            vec![40.0, 120.0, 200.0]
        );
        assert_eq!(oracle_average_occupancy(&s, 3), vec![40.0, 120.0, 200.0]);
        assert_eq!(
            occupancy_series(&s, 3, OccupancyBasis::EndOfYear),
            vec![80.0, 160.0, 240.0]
        );
        let empty = CohortSchedule::default();
        assert_eq!(
            occupancy_series(&empty, 2, OccupancyBasis::Average),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn tenant_months_examples() {
        let s = CohortSchedule::uniform(80, 3, Convention::MidYear);
        assert_eq!(oracle_tenant_months(&s, 3), 4_320);
        assert_eq!(tenant_months(&s, 3), 4_320);
        let one = CohortSchedule::uniform(1, 1, Convention::StartOfYear);
        assert_eq!(tenant_months(&one, 1), 12);
        assert_eq!(tenant_months(&CohortSchedule::default(), 5), 0);
    }

    #[test]
    fn schedule_validation() {
        let s = CohortSchedule {
            waves: vec![Wave { year: 4, count: 0 }],
            convention: Convention::MidYear,
        };
        let Err(Error::Validation(issues)) = s.validate(3) else {
            panic!()
        };
        assert_eq!(issues.len(), 2);
    }

    pub(crate) fn arb_schedule(horizon: u32) -> impl Strategy<Value = CohortSchedule> {
        (
            prop::collection::vec((1..=horizon, 1u32..500), 0..8),
            prop::bool::ANY,
        )
            .prop_map(|(waves, mid)| CohortSchedule {
                waves: waves
                    .into_iter()
                    .map(|(year, count)| Wave { year, count })
                    .collect(),
                convention: if mid {
                    Convention::MidYear
                } else {
                    Convention::StartOfYear
                },
            })
    }

    proptest! {
        #[test]
        fn tenant_months_match_month_grid((h, s) in (1u32..8).prop_flat_map(|h| (Just(h), arb_schedule(h)))) {
            prop_assert_eq!(tenant_months(&s, h), oracle_tenant_months(&s, h));
            prop_assert_eq!(occupancy_series(&s, h, OccupancyBasis::Average), oracle_average_occupancy(&s, h));
        }

        #[test]
        fn average_never_exceeds_end_of_year((h, s) in (1u32..8).prop_flat_map(|h| (Just(h), arb_schedule(h)))) {
            let avg = occupancy_series(&s, h, OccupancyBasis::Average);
            let eoy = occupancy_series(&s, h, OccupancyBasis::EndOfYear);
            for (a, e) in avg.iter().zip(&eoy) {
                prop_assert!(a <= e);
            }
            for w in eoy.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }

        #[test]
        fn doubling_waves_doubles_everything((h, s) in (1u32..8).prop_flat_map(|h| (Just(h), arb_schedule(h)))) {
            let doubled = s.scaled(2.0);
            prop_assert_eq!(tenant_months(&doubled, h), 2 * tenant_months(&s, h));
            for basis in [OccupancyBasis::Average, OccupancyBasis::EndOfYear] {
                let a = occupancy_series(&s, h, basis);
                let b = occupancy_series(&doubled, h, basis);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert_eq!(2.0 * x, *y);
                }
            }
        }

        #[test]
        fn forecast_is_linear(docs in 0.0f64..1e7, entity in 0.0f64..1e5, image in 0.0f64..1e4, h in 1u32..10) {
            let p = UsageProfile { docs_per_year: Some(docs), entity_size: entity, image_size: image, ..UsageProfile::zero() };
            let f = forecast(&p, h).unwrap();
            let first = f.years[0];
            for y in &f.years {
                let k = f64::from(y.year);
                prop_assert!((y.cumulative_table_gb - k * first.cumulative_table_gb).abs() <= 1e-9 * y.cumulative_table_gb.max(1.0));
                prop_assert!((y.cumulative_blob_gb - k * first.cumulative_blob_gb).abs() <= 1e-9 * y.cumulative_blob_gb.max(1.0));
            }
        }
    }
}
