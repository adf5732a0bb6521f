//! Emission factors keyed by (flow, region, unit), with a single-step
//! fallback to the global region.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::GLOBAL_REGION;
use crate::units::Unit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("malformed factor document: {0}")]
    Parse(String),
    #[error("duplicate factor ({flow}, {region}, {unit})")]
    Duplicate { flow: String, region: String, unit: Unit },
    #[error("factor ({flow}, {region}, {unit}) has invalid value {value}")]
    InvalidValue {
        flow: String,
        region: String,
        unit: Unit,
        value: f64,
    },
    #[error("factor for `{flow}` has unknown unit `{unit}`")]
    UnknownUnit { flow: String, unit: String },
    #[error("no emission factor for ({flow}, {region}, {unit}) or its {GLOBAL_REGION} fallback")]
    Unresolved { flow: String, region: String, unit: Unit },
}

/// kg CO2eq per unit of flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmissionFactor {
    pub flow_name: String,
    pub region: String,
    pub unit: Unit,
    pub value: f64,
    pub source: String,
    pub time_range: (i32, i32),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FactorRecord {
    flow: String,
    region: String,
    unit: String,
    value: f64,
    #[serde(default)]
    source: String,
    #[serde(default)]
    time_range: Option<[i32; 2]>,
}

#[derive(Debug, Deserialize)]
struct FactorDocument {
    #[serde(default)]
    factors: Vec<FactorRecord>,
}

type Key = (String, String, Unit);

/// Immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct FactorStore {
    factors: BTreeMap<Key, EmissionFactor>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LookupOutcome<'a> {
    Exact(&'a EmissionFactor),
    /// The requested region had no entry; the global factor was used.
    Fallback(&'a EmissionFactor),
}

impl<'a> LookupOutcome<'a> {
    pub fn factor(self) -> &'a EmissionFactor {
        match self {
            LookupOutcome::Exact(f) | LookupOutcome::Fallback(f) => f,
        }
    }

    pub fn is_fallback(self) -> bool {
        matches!(self, LookupOutcome::Fallback(_))
    }
}

impl FactorStore {
    pub fn new(factors: impl IntoIterator<Item = EmissionFactor>) -> Result<Self, FactorError> {
        let mut map = BTreeMap::new();
        for f in factors {
            if !f.value.is_finite() || f.value < 0.0 {
                return Err(FactorError::InvalidValue {
                    flow: f.flow_name,
                    region: f.region,
                    unit: f.unit,
                    value: f.value,
                });
            }
            let key = (f.flow_name.clone(), f.region.clone(), f.unit);
            if map.contains_key(&key) {
                return Err(FactorError::Duplicate {
                    flow: f.flow_name,
                    region: f.region,
                    unit: f.unit,
                });
            }
            map.insert(key, f);
        }
        Ok(Self { factors: map })
    }

    /// Parses `{"factors": [{flow, region, unit, value, source, time_range}]}`.
    pub fn from_json(text: &str) -> Result<Self, FactorError> {
        let doc: FactorDocument = serde_json::from_str(text).map_err(|e| FactorError::Parse(e.to_string()))?;
        let factors = doc
            .factors
            .into_iter()
            .map(|r| {
                let unit = r.unit.parse::<Unit>().map_err(|_| FactorError::UnknownUnit {
                    flow: r.flow.clone(),
                    unit: r.unit.clone(),
                })?;
                let tr = r.time_range.unwrap_or([0, 0]);
                Ok(EmissionFactor {
                    flow_name: r.flow,
                    region: r.region,
                    unit,
                    value: r.value,
                    source: r.source,
                    time_range: (tr[0], tr[1]),
                })
            })
            .collect::<Result<Vec<_>, FactorError>>()?;
        Self::new(factors)
    }

    pub fn to_json(&self) -> String {
        let factors: Vec<FactorRecord> = self
            .factors
            .values()
            .map(|f| FactorRecord {
                flow: f.flow_name.clone(),
                region: f.region.clone(),
                unit: f.unit.symbol().to_string(),
                value: f.value,
                source: f.source.clone(),
                time_range: Some([f.time_range.0, f.time_range.1]),
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "factors": factors })).expect("serialisable")
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmissionFactor> {
        self.factors.values()
    }

    pub fn get(&self, flow: &str, region: &str, unit: Unit) -> Option<&EmissionFactor> {
        self.factors.get(&(flow.to_string(), region.to_string(), unit))
    }

    /// Exact match, else the global-region factor with the same unit.
    pub fn lookup(&self, flow: &str, region: &str, unit: Unit) -> Result<LookupOutcome<'_>, FactorError> {
        if let Some(f) = self.get(flow, region, unit) {
            return Ok(LookupOutcome::Exact(f));
        }
        if region != GLOBAL_REGION {
            if let Some(f) = self.get(flow, GLOBAL_REGION, unit) {
                return Ok(LookupOutcome::Fallback(f));
            }
        }
        Err(FactorError::Unresolved {
            flow: flow.to_string(),
            region: region.to_string(),
            unit,
        })
    }

    /// True when `flow` has factors, but none in `unit`.
    pub fn has_flow_other_unit(&self, flow: &str, unit: Unit) -> bool {
        self.factors.keys().any(|(f, _, u)| f == flow && *u != unit)
    }
}
