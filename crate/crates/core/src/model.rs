//! Product systems: life stages holding classified, quality-scored flows.
//!
//! Input documents are parsed into [`SystemDocument`] first. That raw form is
//! what [`crate::validate::validate_system`] audits; [`SystemDocument::into_system`]
//! then builds an immutable [`ProductSystem`] and rejects anything that breaks
//! its invariants.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{classify_flow, BoundaryClass, BoundaryRubric, ClassificationError};
use crate::quality::{score_quality, QualityDimensions, QualityScore};
use crate::units::{Quantity, QuantityError, Unit};

/// Regions that appear in the reference inventories. Others are accepted with a warning.
pub const KNOWN_REGIONS: &[&str] = &["GLO", "RER", "US-WECC", "GB", "CH", "RoW", "CA-QC", "Europe"];

/// Fallback region for factor lookups.
pub const GLOBAL_REGION: &str = "GLO";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed product system document: {0}")]
    Parse(String),
    #[error("flow `{stage}/{flow}`: {source}")]
    Quantity {
        stage: String,
        flow: String,
        source: QuantityError,
    },
    #[error("flow `{stage}/{flow}` gives neither `magnitude` nor both `mass_kg` and `distance_km`")]
    MissingMagnitude { stage: String, flow: String },
    #[error(transparent)]
    Classification(#[from] ClassificationError),
    #[error("stage `{0}` appears more than once")]
    DuplicateStage(String),
    #[error("flow `{flow}` appears more than once in stage `{stage}`")]
    DuplicateFlow { stage: String, flow: String },
    #[error("stage `{0}` has no flows and is not marked manual")]
    EmptyStage(String),
    #[error("flow `{stage}/{flow}` has an empty region")]
    EmptyRegion { stage: String, flow: String },
    #[error("flow `{stage}/{flow}` has time range {start}..{end} ending before it starts")]
    TimeRange {
        stage: String,
        flow: String,
        start: i32,
        end: i32,
    },
    #[error("device mass must be positive, got {0}")]
    DeviceMass(f64),
    #[error("{kind} system may not contain a `{stage}` stage")]
    KindViolation { kind: SystemKind, stage: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Virgin,
    Remanufactured,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Virgin => "virgin",
            SystemKind::Remanufactured => "remanufactured",
        })
    }
}

impl SystemKind {
    /// Stage name this kind of system must not carry (case-insensitive).
    ///
    /// Virgin devices are never remanufactured; remanufactured devices enter
    /// burden-free under the cut-off rule, so they carry no production stage.
    pub fn forbidden_stage(self) -> &'static str {
        match self {
            SystemKind::Virgin => "remanufacturing",
            SystemKind::Remanufactured => "production",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Input,
    Output,
}

/// Where a flow's emission factor comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FactorRef {
    /// Look up `(name, flow region, flow unit)` in the factor store.
    Lookup(String),
    /// A calibrated value pinned on the flow itself.
    Fixed { value: f64, source: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialFlow {
    pub name: String,
    pub stage: String,
    pub quantity: Quantity,
    pub direction: Direction,
    pub region: String,
    pub category: String,
    pub boundary: BoundaryClass,
    pub quality: QualityScore,
    pub time_range: (i32, i32),
    pub factor: FactorRef,
}

impl MaterialFlow {
    /// An included input flow with uniform `good` quality; used when
    /// transformations synthesise flows that have no document row.
    pub fn new(
        name: impl Into<String>,
        stage: impl Into<String>,
        quantity: Quantity,
        region: impl Into<String>,
        category: impl Into<String>,
    ) -> Self {
        let name = name.into();
        Self {
            factor: FactorRef::Lookup(name.clone()),
            name,
            stage: stage.into(),
            quantity,
            direction: Direction::Input,
            region: region.into(),
            category: category.into(),
            boundary: BoundaryClass::AttributableIncluded,
            quality: score_quality(QualityDimensions::uniform(crate::quality::Rating::Good)),
            time_range: (0, 0),
        }
    }

    pub fn with_boundary(mut self, boundary: BoundaryClass) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_factor(mut self, factor: FactorRef) -> Self {
        self.factor = factor;
        self
    }

    pub fn with_quality(mut self, quality: QualityScore) -> Self {
        self.quality = quality;
        self
    }

    pub fn with_time_range(mut self, start: i32, end: i32) -> Self {
        self.time_range = (start, end);
        self
    }

    pub fn with_quantity(mut self, quantity: Quantity) -> Self {
        self.quantity = quantity;
        self
    }

    pub fn with_region(mut self, region: impl Into<String>) -> Self {
        self.region = region.into();
        self
    }

    /// Factor name used for store lookups, if any.
    pub fn factor_name(&self) -> Option<&str> {
        match &self.factor {
            FactorRef::Lookup(name) => Some(name),
            FactorRef::Fixed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifeStage {
    pub name: String,
    /// Manual stages may legitimately carry no flows (labour is not inventoried).
    pub manual: bool,
    pub flows: Vec<MaterialFlow>,
}

impl LifeStage {
    pub fn new(name: impl Into<String>, flows: Vec<MaterialFlow>) -> Self {
        let name = name.into();
        let flows = flows
            .into_iter()
            .map(|mut f| {
                f.stage = name.clone();
                f
            })
            .collect();
        Self {
            name,
            manual: false,
            flows,
        }
    }

    pub fn manual(mut self) -> Self {
        self.manual = true;
        self
    }
}

/// One functional unit's cradle-to-grave inventory. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSystem {
    name: String,
    kind: SystemKind,
    stages: Vec<LifeStage>,
    device_mass_kg: f64,
    functional_unit: String,
}

impl ProductSystem {
    pub fn new(
        name: impl Into<String>,
        kind: SystemKind,
        device_mass_kg: f64,
        functional_unit: impl Into<String>,
        stages: Vec<LifeStage>,
    ) -> Result<Self, ModelError> {
        if !device_mass_kg.is_finite() || device_mass_kg <= 0.0 {
            return Err(ModelError::DeviceMass(device_mass_kg));
        }
        let mut stage_names = HashSet::new();
        for stage in &stages {
            if !stage_names.insert(stage.name.to_lowercase()) {
                return Err(ModelError::DuplicateStage(stage.name.clone()));
            }
            if stage.name.eq_ignore_ascii_case(kind.forbidden_stage()) {
                return Err(ModelError::KindViolation {
                    kind,
                    stage: stage.name.clone(),
                });
            }
            if stage.flows.is_empty() && !stage.manual {
                return Err(ModelError::EmptyStage(stage.name.clone()));
            }
            let mut flow_names = HashSet::new();
            for flow in &stage.flows {
                if !flow_names.insert(flow.name.as_str()) {
                    return Err(ModelError::DuplicateFlow {
                        stage: stage.name.clone(),
                        flow: flow.name.clone(),
                    });
                }
                if flow.region.trim().is_empty() {
                    return Err(ModelError::EmptyRegion {
                        stage: stage.name.clone(),
                        flow: flow.name.clone(),
                    });
                }
                if flow.time_range.1 < flow.time_range.0 {
                    return Err(ModelError::TimeRange {
                        stage: stage.name.clone(),
                        flow: flow.name.clone(),
                        start: flow.time_range.0,
                        end: flow.time_range.1,
                    });
                }
            }
        }
        let stages = stages
            .into_iter()
            .map(|s| LifeStage::new(s.name.clone(), s.flows).manual_if(s.manual))
            .collect();
        Ok(Self {
            name: name.into(),
            kind,
            stages,
            device_mass_kg,
            functional_unit: functional_unit.into(),
        })
    }

    /// A system with no stages at all.
    pub fn empty(name: impl Into<String>, kind: SystemKind, device_mass_kg: f64) -> Result<Self, ModelError> {
        Self::new(name, kind, device_mass_kg, "", Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn stages(&self) -> &[LifeStage] {
        &self.stages
    }

    pub fn device_mass_kg(&self) -> f64 {
        self.device_mass_kg
    }

    pub fn functional_unit(&self) -> &str {
        &self.functional_unit
    }

    pub fn flows(&self) -> impl Iterator<Item = &MaterialFlow> {
        self.stages.iter().flat_map(|s| s.flows.iter())
    }

    pub fn stage(&self, name: &str) -> Option<&LifeStage> {
        self.stages.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn flow(&self, stage: &str, name: &str) -> Option<&MaterialFlow> {
        self.stage(stage)?.flows.iter().find(|f| f.name == name)
    }

    /// Rebuilds the system with new stages, re-checking every invariant.
    pub fn with_stages(&self, stages: Vec<LifeStage>) -> Result<Self, ModelError> {
        Self::new(
            self.name.clone(),
            self.kind,
            self.device_mass_kg,
            self.functional_unit.clone(),
            stages,
        )
    }

    /// Applies `f` to every flow, keeping the stage layout.
    pub fn map_flows<F>(&self, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(&MaterialFlow) -> MaterialFlow,
    {
        let stages = self
            .stages
            .iter()
            .map(|s| LifeStage {
                name: s.name.clone(),
                manual: s.manual,
                flows: s.flows.iter().map(&mut f).collect(),
            })
            .collect();
        self.with_stages(stages)
    }

    pub fn from_json(text: &str, rubric: &BoundaryRubric) -> Result<Self, ModelError> {
        SystemDocument::from_json(text)?.into_system(rubric)
    }
}

impl LifeStage {
    fn manual_if(mut self, manual: bool) -> Self {
        self.manual = manual;
        self
    }
}

// ---------------------------------------------------------------------------
// Document form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowDocument {
    pub name: String,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_km: Option<f64>,
    pub unit: String,
    pub region: String,
    #[serde(default)]
    pub category: String,
    pub quality: QualityDimensions,
    pub time_range: [i32; 2],
    /// Factor name in the store; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDocument {
    pub name: String,
    #[serde(default)]
    pub manual: bool,
    #[serde(default)]
    pub flows: Vec<FlowDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub name: String,
    pub kind: SystemKind,
    pub device_mass_kg: f64,
    #[serde(default)]
    pub functional_unit: String,
    #[serde(default)]
    pub stages: Vec<StageDocument>,
}

impl FlowDocument {
    /// Resolves the quantity; transport work may be given as mass and distance.
    pub fn quantity(&self, stage: &str) -> Result<Quantity, ModelError> {
        let wrap = |source| ModelError::Quantity {
            stage: stage.to_string(),
            flow: self.name.clone(),
            source,
        };
        let unit: Unit = self.unit.parse().map_err(wrap)?;
        match (unit, self.magnitude, self.mass_kg, self.distance_km) {
            (Unit::MassDistance, None, Some(m), Some(d)) => Quantity::mass_distance(m, d).map_err(wrap),
            (_, Some(x), _, _) => Quantity::new(x, unit).map_err(wrap),
            _ => Err(ModelError::MissingMagnitude {
                stage: stage.to_string(),
                flow: self.name.clone(),
            }),
        }
    }
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn into_system(self, rubric: &BoundaryRubric) -> Result<ProductSystem, ModelError> {
        let mut stages = Vec::with_capacity(self.stages.len());
        for stage in self.stages {
            let mut flows = Vec::with_capacity(stage.flows.len());
            for doc in stage.flows {
                let quantity = doc.quantity(&stage.name)?;
                let boundary = classify_flow(&doc.name, &doc.category, rubric)?;
                let factor = FactorRef::Lookup(doc.factor.clone().unwrap_or_else(|| doc.name.clone()));
                flows.push(MaterialFlow {
                    name: doc.name,
                    stage: stage.name.clone(),
                    quantity,
                    direction: doc.direction,
                    region: doc.region.trim().to_string(),
                    category: doc.category.trim().to_string(),
                    boundary,
                    quality: score_quality(doc.quality),
                    time_range: (doc.time_range[0], doc.time_range[1]),
                    factor,
                });
            }
            stages.push(LifeStage {
                name: stage.name,
                manual: stage.manual,
                flows,
            });
        }
        ProductSystem::new(
            self.name,
            self.kind,
            self.device_mass_kg,
            self.functional_unit,
            stages,
        )
    }
}

/// Per-rating flow counts, in rating order from poor to very good.
pub fn quality_summary(sys: &ProductSystem) -> BTreeMap<crate::quality::Rating, usize> {
    let mut counts = BTreeMap::new();
    for f in sys.flows() {
        *counts.entry(f.quality.overall).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::quality::Rating;

    #[test]
    fn fixture_systems_build() {
        let v = fixtures::virgin_system();
        assert_eq!(v.kind(), SystemKind::Virgin);
        assert_eq!(v.flows().count(), 15);
        assert!((v.device_mass_kg() - 0.1189).abs() < 1e-12);
        let r = fixtures::remanufactured_system();
        assert_eq!(r.flows().count(), 15);
    }

    #[test]
    fn polyamide_quality_is_fair() {
        let v = fixtures::virgin_system();
        let f = v.flow("Production", "polyamide").unwrap();
        assert_eq!(f.quality.overall, Rating::Fair);
    }

    #[test]
    fn transport_given_as_mass_and_distance() {
        let v = fixtures::virgin_system();
        let ship = v.flow("Transport", "container ship").unwrap();
        assert_eq!(ship.quantity.unit(), Unit::MassDistance);
        assert!((ship.quantity.magnitude() - 0.1189 * 18760.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_duplicate_flow_in_stage() {
        let v = fixtures::virgin_system();
        let mut stages = v.stages().to_vec();
        let dup = stages[0].flows[0].clone();
        stages[0].flows.push(dup);
        assert!(matches!(v.with_stages(stages), Err(ModelError::DuplicateFlow { .. })));
    }

    #[test]
    fn rejects_negative_magnitude() {
        let text = fixtures::VIRGIN_JSON.replacen("\"magnitude\": 0.1081", "\"magnitude\": -0.1081", 1);
        assert_ne!(text, fixtures::VIRGIN_JSON);
        let err = ProductSystem::from_json(&text, &fixtures::rubric()).unwrap_err();
        assert!(matches!(err, ModelError::Quantity { .. }), "{err}");
        assert!(err.to_string().contains("polysulfone"));
    }

    #[test]
    fn rejects_non_positive_device_mass() {
        assert!(matches!(
            ProductSystem::empty("x", SystemKind::Virgin, 0.0),
            Err(ModelError::DeviceMass(_))
        ));
    }

    #[test]
    fn kind_constraints() {
        let flow = MaterialFlow::new("x", "", Quantity::mass(1.0).unwrap(), "GLO", "manufacture");
        let reman_stage = LifeStage::new("Remanufacturing", vec![flow.clone()]);
        assert!(matches!(
            ProductSystem::new("v", SystemKind::Virgin, 0.1, "", vec![reman_stage.clone()]),
            Err(ModelError::KindViolation { .. })
        ));
        let production = LifeStage::new("Production", vec![flow]);
        assert!(matches!(
            ProductSystem::new("r", SystemKind::Remanufactured, 0.1, "", vec![production]),
            Err(ModelError::KindViolation { .. })
        ));
        assert!(ProductSystem::new("r", SystemKind::Remanufactured, 0.1, "", vec![reman_stage]).is_ok());
    }

    #[test]
    fn empty_stage_requires_manual_flag() {
        let empty = LifeStage::new("Packaging", vec![]);
        assert!(matches!(
            ProductSystem::new("v", SystemKind::Virgin, 0.1, "", vec![empty.clone()]),
            Err(ModelError::EmptyStage(_))
        ));
        assert!(ProductSystem::new("v", SystemKind::Virgin, 0.1, "", vec![empty.manual()]).is_ok());
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            SystemDocument::from_json("{\"name\": "),
            Err(ModelError::Parse(_))
        ));
    }
}
