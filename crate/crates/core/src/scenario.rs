//! Sensitivity analysis over remanufacturing location, rejection rate and
//! number of turns.
//!
//! Transformations never mutate their input: each returns a fresh
//! [`ProductSystem`]. Sweeps evaluate every grid point from the same base and
//! may run in parallel; results are ordered by grid index.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{system_emissions, EmissionBreakdown, EngineError};
use crate::factors::FactorStore;
use crate::metrics::{life_saving, per_life, per_turn, MetricsError, TurnProfile};
use crate::model::{FactorRef, LifeStage, MaterialFlow, ModelError, ProductSystem, SystemKind};
use crate::units::{Quantity, Unit};

/// Incineration region used by per-success rejection accounting.
pub const PER_SUCCESS_INCINERATION_REGION: &str = "CH";

/// Boundary category that marks end-of-life treatment flows.
pub const WASTE_CATEGORY: &str = "waste-management";

/// Stages on the user side; their electricity is never re-pointed by a location.
const USER_SIDE_STAGES: &[&str] = &["use"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("malformed scenario input: {0}")]
    Parse(String),
    #[error("rejection rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("rejection rate {0} leaves no successful device under per-success accounting")]
    RejectAll(f64),
    #[error("number of turns must be at least 1")]
    ZeroTurns,
    #[error("unknown location `{0}` (expected DE, UK or USA)")]
    UnknownLocation(String),
    #[error("no location profile for {0}")]
    MissingProfile(Location),
    #[error("location profile {0} listed twice")]
    DuplicateProfile(Location),
    #[error("location {location} has no {direction} transport leg")]
    MissingLeg { location: Location, direction: LegDirection },
    #[error("transport leg `{mode}` has invalid distance {distance}")]
    InvalidDistance { mode: String, distance: f64 },
    #[error("no emission factor for `{flow}` in region {region}")]
    MissingFactor { flow: String, region: String },
    #[error("system `{0}` has no end-of-life incineration flow")]
    NoIncinerationFlow(String),
    #[error("system `{0}` has more than one end-of-life incineration flow")]
    AmbiguousIncineration(String),
    #[error("scenario name `{0}` is used twice")]
    DuplicateScenario(String),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep over {param} got a {got} grid value")]
    GridMismatch { param: SweepParam, got: SweepParam },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    #[serde(rename = "DE")]
    De,
    #[serde(rename = "UK")]
    Uk,
    #[serde(rename = "USA")]
    Usa,
}

impl Location {
    pub const ALL: [Location; 3] = [Location::De, Location::Uk, Location::Usa];

    pub fn code(self) -> &'static str {
        match self {
            Location::De => "DE",
            Location::Uk => "UK",
            Location::Usa => "USA",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Location {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DE" => Ok(Location::De),
            "UK" | "GB" => Ok(Location::Uk),
            "USA" | "US" => Ok(Location::Usa),
            _ => Err(ScenarioError::UnknownLocation(s.to_string())),
        }
    }
}

/// How rejected devices are charged to each remanufactured device.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectionMode {
    /// Incinerated mass per remanufactured unit is `R × device mass`.
    #[default]
    Amortized,
    /// Incinerated mass per successful unit is `R / (1 − R) × device mass`,
    /// charged at the CH incineration factor.
    PerSuccess,
}

impl fmt::Display for RejectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectionMode::Amortized => "amortized",
            RejectionMode::PerSuccess => "per-success",
        })
    }
}

impl FromStr for RejectionMode {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amortized" => Ok(RejectionMode::Amortized),
            "per-success" => Ok(RejectionMode::PerSuccess),
            other => Err(ScenarioError::Parse(format!("unknown rejection mode `{other}`"))),
        }
    }
}

fn check_rate(rate: f64, mode: RejectionMode) -> Result<(), ScenarioError> {
    if !rate.is_finite() || !(0.0..=1.0).contains(&rate) {
        return Err(ScenarioError::InvalidRate(rate));
    }
    if mode == RejectionMode::PerSuccess && rate >= 1.0 {
        return Err(ScenarioError::RejectAll(rate));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub name: String,
    pub location: Location,
    pub rejection_rate: f64,
    pub turns: u32,
    #[serde(default)]
    pub rejection_mode: RejectionMode,
}

impl ScenarioParams {
    pub fn new(
        name: impl Into<String>,
        location: Location,
        rejection_rate: f64,
        turns: u32,
        rejection_mode: RejectionMode,
    ) -> Result<Self, ScenarioError> {
        let p = Self {
            name: name.into(),
            location,
            rejection_rate,
            turns,
            rejection_mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        check_rate(self.rejection_rate, self.rejection_mode)?;
        if self.turns == 0 {
            return Err(ScenarioError::ZeroTurns);
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct ScenarioDocument {
    #[serde(default)]
    scenarios: Vec<ScenarioParams>,
}

/// Parses `{"scenarios": [...]}`; names must be unique.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioParams>, ScenarioError> {
    let doc: ScenarioDocument = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let mut seen = HashSet::new();
    for s in &doc.scenarios {
        if !seen.insert(s.name.as_str()) {
            return Err(ScenarioError::DuplicateScenario(s.name.clone()));
        }
        s.validate()?;
    }
    Ok(doc.scenarios)
}

// ---------------------------------------------------------------------------
// Location profiles
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegDirection {
    /// Used device travelling to the remanufacturer.
    Inbound,
    /// Remanufactured device travelling back to the user.
    Outbound,
}

impl fmt::Display for LegDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LegDirection::Inbound => "inbound",
            LegDirection::Outbound => "outbound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportLeg {
    /// Transport flow name, also the factor name (`container ship`, `lorry`).
    pub mode: String,
    pub direction: LegDirection,
    pub distance_km: f64,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectricitySetting {
    pub region: String,
    /// Calibrated kg CO2eq/kWh pinned on the re-pointed flows instead of a store lookup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationProfile {
    pub location: Location,
    pub legs: Vec<TransportLeg>,
    pub electricity: ElectricitySetting,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incineration_region: Option<String>,
    /// Calibration targets this profile was fitted to.
    #[serde(default)]
    pub constraints: Vec<String>,
}

impl LocationProfile {
    fn check(&self, kind: SystemKind) -> Result<(), ScenarioError> {
        for leg in &self.legs {
            if !leg.distance_km.is_finite() || leg.distance_km < 0.0 {
                return Err(ScenarioError::InvalidDistance {
                    mode: leg.mode.clone(),
                    distance: leg.distance_km,
                });
            }
        }
        if kind == SystemKind::Remanufactured {
            for direction in [LegDirection::Inbound, LegDirection::Outbound] {
                if !self.legs.iter().any(|l| l.direction == direction) {
                    return Err(ScenarioError::MissingLeg {
                        location: self.location,
                        direction,
                    });
                }
            }
        }
        if let Some(f) = self.electricity.factor {
            if !f.is_finite() || f < 0.0 {
                return Err(ScenarioError::Parse(format!("electricity factor {f} for {}", self.location)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct LocationProfiles {
    profiles: Vec<LocationProfile>,
}

#[derive(Deserialize)]
struct LocationDocument {
    locations: Vec<LocationProfile>,
}

impl LocationProfiles {
    pub fn new(profiles: Vec<LocationProfile>) -> Result<Self, ScenarioError> {
        let mut seen = HashSet::new();
        for p in &profiles {
            if !seen.insert(p.location) {
                return Err(ScenarioError::DuplicateProfile(p.location));
            }
            p.check(SystemKind::Virgin)?;
        }
        Ok(Self { profiles })
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: LocationDocument = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        Self::new(doc.locations)
    }

    pub fn get(&self, location: Location) -> Result<&LocationProfile, ScenarioError> {
        self.profiles
            .iter()
            .find(|p| p.location == location)
            .ok_or(ScenarioError::MissingProfile(location))
    }

    pub fn iter(&self) -> impl Iterator<Item = &LocationProfile> {
        self.profiles.iter()
    }
}

fn require_factor(store: &FactorStore, flow: &str, region: &str, unit: Unit) -> Result<(), ScenarioError> {
    store
        .lookup(flow, region, unit)
        .map(|_| ())
        .map_err(|_| ScenarioError::MissingFactor {
            flow: flow.to_string(),
            region: region.to_string(),
        })
}

/// Moves remanufacturing to `profile`'s location.
///
/// Transport flows (kg·km) are replaced by the profile's legs, merged per
/// (mode, region). Facility electricity is re-pointed at the profile's region,
/// or pinned to its calibrated factor. Everything else is left as is.
pub fn apply_location(
    sys: &ProductSystem,
    profile: &LocationProfile,
    store: &FactorStore,
) -> Result<ProductSystem, ScenarioError> {
    profile.check(sys.kind())?;

    // merged legs, first-seen order
    let mut merged: Vec<(String, String, f64)> = Vec::new();
    for leg in &profile.legs {
        match merged.iter_mut().find(|(m, r, _)| *m == leg.mode && *r == leg.region) {
            Some(entry) => entry.2 += leg.distance_km,
            None => merged.push((leg.mode.clone(), leg.region.clone(), leg.distance_km)),
        }
    }
    for (mode, region, _) in &merged {
        require_factor(store, mode, region, Unit::MassDistance)?;
    }

    let transport_template = sys.flows().find(|f| f.quantity.unit() == Unit::MassDistance).cloned();
    let transport_stage = transport_template.as_ref().map(|f| f.stage.clone());
    let mass = sys.device_mass_kg();
    let mut new_transport = Vec::with_capacity(merged.len());
    for (mode, region, distance) in merged {
        let quantity = Quantity::mass_distance(mass, distance).map_err(|source| ModelError::Quantity {
            stage: "Transport".into(),
            flow: mode.clone(),
            source,
        })?;
        let template = sys
            .flows()
            .find(|f| f.quantity.unit() == Unit::MassDistance && f.name == mode)
            .or(transport_template.as_ref());
        let flow = match template {
            Some(t) => t
                .clone()
                .with_quantity(quantity)
                .with_region(region)
                .with_factor(FactorRef::Lookup(mode.clone())),
            None => MaterialFlow::new(mode.clone(), "Transport", quantity, region, "manufacture"),
        };
        new_transport.push(MaterialFlow { name: mode, ..flow });
    }

    let electricity = &profile.electricity;
    let mut stages = Vec::with_capacity(sys.stages().len() + 1);
    for stage in sys.stages() {
        let user_side = USER_SIDE_STAGES.iter().any(|s| stage.name.eq_ignore_ascii_case(s));
        let mut flows = Vec::with_capacity(stage.flows.len());
        for flow in &stage.flows {
            if flow.quantity.unit() == Unit::MassDistance {
                continue;
            }
            let mut flow = flow.clone();
            if flow.quantity.unit() == Unit::Energy && !user_side {
                match electricity.factor {
                    Some(value) => {
                        flow.region = electricity.region.clone();
                        flow.factor = FactorRef::Fixed {
                            value,
                            source: format!("{} location calibration", profile.location),
                        };
                    }
                    None if flow.region != electricity.region => {
                        require_factor(store, &flow.name, &electricity.region, Unit::Energy)?;
                        flow.region = electricity.region.clone();
                        flow.factor = FactorRef::Lookup(flow.name.clone());
                    }
                    None => {}
                }
            }
            if let Some(region) = &profile.incineration_region {
                if flow.category == WASTE_CATEGORY && flow.region != *region {
                    let name = flow.factor_name().unwrap_or(&flow.name).to_string();
                    require_factor(store, &name, region, flow.quantity.unit())?;
                    flow.region = region.clone();
                }
            }
            flows.push(flow);
        }
        if transport_stage.as_deref() == Some(stage.name.as_str()) {
            flows.append(&mut new_transport);
        }
        stages.push(LifeStage {
            name: stage.name.clone(),
            manual: stage.manual,
            flows,
        });
    }
    if !new_transport.is_empty() {
        stages.insert(0, LifeStage::new("Transport", new_transport));
    }
    Ok(sys.with_stages(stages)?)
}

/// Sets the end-of-life incineration mass for rejection rate `rate`.
pub fn apply_rejection(sys: &ProductSystem, rate: f64, mode: RejectionMode) -> Result<ProductSystem, ScenarioError> {
    check_rate(rate, mode)?;
    let targets = sys
        .flows()
        .filter(|f| f.category == WASTE_CATEGORY && f.quantity.unit() == Unit::Mass)
        .count();
    match targets {
        0 => return Err(ScenarioError::NoIncinerationFlow(sys.name().to_string())),
        1 => {}
        _ => return Err(ScenarioError::AmbiguousIncineration(sys.name().to_string())),
    }
    let mass = sys.device_mass_kg();
    let incinerated = match mode {
        RejectionMode::Amortized => rate * mass,
        RejectionMode::PerSuccess => rate / (1.0 - rate) * mass,
    };
    let quantity = Quantity::mass(incinerated).map_err(|_| ScenarioError::InvalidRate(rate))?;
    Ok(sys.map_flows(|f| {
        if f.category == WASTE_CATEGORY && f.quantity.unit() == Unit::Mass {
            let mut f = f.clone().with_quantity(quantity);
            if mode == RejectionMode::PerSuccess {
                f.region = PER_SUCCESS_INCINERATION_REGION.to_string();
                if let FactorRef::Fixed { .. } = f.factor {
                    f.factor = FactorRef::Lookup(f.name.clone());
                }
            }
            f
        } else {
            f.clone()
        }
    })?)
}

// ---------------------------------------------------------------------------
// Baseline, sweeps and named scenarios
// ---------------------------------------------------------------------------

/// Everything a sensitivity run evaluates against.
#[derive(Debug, Clone, Copy)]
pub struct Baseline<'a> {
    /// Burden-free virgin emission, kg CO2eq.
    pub virgin_emission: f64,
    /// Remanufactured inventory as shipped (baseline location and rejection).
    pub reman: &'a ProductSystem,
    pub store: &'a FactorStore,
    pub locations: &'a LocationProfiles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "L")]
    Location,
    #[serde(rename = "R")]
    RejectionRate,
    #[serde(rename = "N")]
    Turns,
}

impl SweepParam {
    pub fn code(self) -> &'static str {
        match self {
            SweepParam::Location => "L",
            SweepParam::RejectionRate => "R",
            SweepParam::Turns => "N",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SweepParam {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "L" | "l" | "location" => Ok(SweepParam::Location),
            "R" | "r" | "rejection" | "rejection-rate" => Ok(SweepParam::RejectionRate),
            "N" | "n" | "turns" => Ok(SweepParam::Turns),
            other => Err(ScenarioError::Parse(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SweepValue {
    Location(Location),
    Rate(f64),
    Turns(u32),
}

impl SweepValue {
    pub fn param(&self) -> SweepParam {
        match self {
            SweepValue::Location(_) => SweepParam::Location,
            SweepValue::Rate(_) => SweepParam::RejectionRate,
            SweepValue::Turns(_) => SweepParam::Turns,
        }
    }
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Location(l) => write!(f, "{l}"),
            SweepValue::Rate(r) => write!(f, "{r}"),
            SweepValue::Turns(n) => write!(f, "{n}"),
        }
    }
}

/// Settings held fixed while one parameter varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSettings {
    /// Turns used for the per-life and per-turn columns of L and R sweeps.
    pub turns: u32,
    /// Accounting used by R sweeps.
    pub mode: RejectionMode,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            turns: 1,
            mode: RejectionMode::PerSuccess,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: SweepParam,
    pub value: SweepValue,
    /// Burden-free remanufactured emission at this point.
    pub total: f64,
    pub per_life: f64,
    pub per_turn: f64,
}

fn evaluate_point(value: SweepValue, base: &Baseline<'_>, settings: SweepSettings) -> Result<SweepPoint, ScenarioError> {
    let (total, turns) = match value {
        SweepValue::Location(l) => {
            let sys = apply_location(base.reman, base.locations.get(l)?, base.store)?;
            (system_emissions(&sys, base.store)?.total, settings.turns)
        }
        SweepValue::Rate(r) => {
            let sys = apply_rejection(base.reman, r, settings.mode)?;
            (system_emissions(&sys, base.store)?.total, settings.turns)
        }
        SweepValue::Turns(n) => (system_emissions(base.reman, base.store)?.total, n),
    };
    let profile = TurnProfile::new(base.virgin_emission, total, turns)?;
    Ok(SweepPoint {
        param: value.param(),
        value,
        total,
        per_life: per_life(&profile),
        per_turn: per_turn(&profile),
    })
}

/// Varies one parameter over `grid`; other parameters stay at the baseline.
pub fn sweep_univariate(
    param: SweepParam,
    grid: &[SweepValue],
    base: &Baseline<'_>,
    settings: SweepSettings,
) -> Result<Vec<SweepPoint>, ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    if settings.turns == 0 {
        return Err(ScenarioError::ZeroTurns);
    }
    for v in grid {
        if v.param() != param {
            return Err(ScenarioError::GridMismatch { param, got: v.param() });
        }
    }
    grid.par_iter().map(|v| evaluate_point(*v, base, settings)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub params: ScenarioParams,
    pub breakdown: EmissionBreakdown,
    /// Burden-free remanufactured emission.
    pub e_reman: f64,
    pub per_life: f64,
    pub per_turn: f64,
    /// Per-life saving against `turns` virgin devices.
    pub life_saving: f64,
}

pub fn run_scenario(params: &ScenarioParams, base: &Baseline<'_>) -> Result<ScenarioOutcome, ScenarioError> {
    params.validate()?;
    let located = apply_location(base.reman, base.locations.get(params.location)?, base.store)?;
    let rejected = apply_rejection(&located, params.rejection_rate, params.rejection_mode)?;
    let breakdown = system_emissions(&rejected, base.store)?;
    let profile = TurnProfile::new(base.virgin_emission, breakdown.total, params.turns)?;
    Ok(ScenarioOutcome {
        params: params.clone(),
        e_reman: breakdown.total,
        per_life: per_life(&profile),
        per_turn: per_turn(&profile),
        life_saving: life_saving(&profile)?,
        breakdown,
    })
}

/// Location, then rejection, then turn metrics, for each named scenario.
pub fn run_scenarios(named: &[ScenarioParams], base: &Baseline<'_>) -> Result<Vec<ScenarioOutcome>, ScenarioError> {
    let mut seen = HashSet::new();
    for s in named {
        if !seen.insert(s.name.as_str()) {
            return Err(ScenarioError::DuplicateScenario(s.name.clone()));
        }
    }
    named.par_iter().map(|p| run_scenario(p, base)).collect()
}
