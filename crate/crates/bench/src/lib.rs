//! Shared fixtures for the benchmarks.

use saas_tco::Scenario;

/// The bundled migration scenario.
pub const MIGRATION_SCENARIO: &str = include_str!("../../core/scenarios/dms_migration.toml");

pub fn migration_scenario() -> Scenario {
    Scenario::from_toml(MIGRATION_SCENARIO).expect("bundled scenario is valid")
}
