//! Built-in reference data: the catheter inventories, derived emission
//! factors, calibrated location profiles and the three named scenarios.
//!
//! The loader functions panic if the embedded data fails to parse; the data
//! is compiled in and covered by tests.

use crate::boundary::BoundaryRubric;
use crate::categories::CategoryMap;
use crate::factors::FactorStore;
use crate::gwp::GwpTable;
use crate::model::ProductSystem;
use crate::scenario::{parse_scenarios, LocationProfiles, ScenarioParams};

pub const VIRGIN_JSON: &str = include_str!("../fixtures/virgin.json");
pub const REMANUFACTURED_JSON: &str = include_str!("../fixtures/remanufactured.json");
pub const FACTORS_JSON: &str = include_str!("../fixtures/factors.json");
pub const GWP_JSON: &str = include_str!("../fixtures/gwp.json");
pub const LOCATIONS_JSON: &str = include_str!("../fixtures/locations.json");
pub const SCENARIOS_JSON: &str = include_str!("../fixtures/scenarios.json");
pub const CATEGORIES_JSON: &str = include_str!("../fixtures/categories.json");
pub const RUBRIC_JSON: &str = include_str!("../fixtures/rubric.json");
pub const SCHEME_BAD_JSON: &str = include_str!("../fixtures/scheme-bad.json");

pub fn rubric() -> BoundaryRubric {
    BoundaryRubric::from_json(RUBRIC_JSON).expect("embedded rubric")
}

pub fn virgin_system() -> ProductSystem {
    ProductSystem::from_json(VIRGIN_JSON, &rubric()).expect("embedded virgin inventory")
}

pub fn remanufactured_system() -> ProductSystem {
    ProductSystem::from_json(REMANUFACTURED_JSON, &rubric()).expect("embedded remanufactured inventory")
}

pub fn factor_store() -> FactorStore {
    FactorStore::from_json(FACTORS_JSON).expect("embedded factors")
}

pub fn gwp_table() -> GwpTable {
    GwpTable::from_json(GWP_JSON).expect("embedded GWP table")
}

pub fn category_map() -> CategoryMap {
    CategoryMap::from_json(CATEGORIES_JSON).expect("embedded category map")
}

pub fn location_profiles() -> LocationProfiles {
    LocationProfiles::from_json(LOCATIONS_JSON).expect("embedded location profiles")
}

pub fn scenarios() -> Vec<ScenarioParams> {
    parse_scenarios(SCENARIOS_JSON).expect("embedded scenarios")
}
