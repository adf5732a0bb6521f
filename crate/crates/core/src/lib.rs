//! Life-cycle emission engine for virgin and remanufactured single-use
//! medical devices.
//!
//! Inventories ([`model::ProductSystem`]) are evaluated against an
//! [`factors::FactorStore`] by [`engine::system_emissions`]. On top of that sit
//! burdened multi-turn metrics, location/rejection/turn sensitivity analysis,
//! buy-back scheme sizing and CSV/markdown reporting.

pub mod boundary;
pub mod buyback;
pub mod categories;
pub mod engine;
pub mod factors;
pub mod fixtures;
pub mod gwp;
pub mod metrics;
pub mod model;
pub mod quality;
pub mod report;
pub mod scenario;
pub mod units;
pub mod validate;

pub use boundary::{BoundaryClass, BoundaryRubric};
pub use buyback::{scheme_emissions, scheme_saving, simulate_fleet, solve_injection, SchemeResult, SchemeSpec};
pub use categories::{category_breakdown, compare_systems, CategoryMap};
pub use engine::{system_emissions, EmissionBreakdown};
pub use factors::{EmissionFactor, FactorStore};
pub use metrics::{life_saving, per_life, per_turn, TurnProfile};
pub use model::{MaterialFlow, ProductSystem, SystemKind};
pub use scenario::{apply_location, apply_rejection, run_scenarios, sweep_univariate, Location, RejectionMode};
pub use units::{Quantity, Unit};
