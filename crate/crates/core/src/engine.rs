//! Burden-free emission evaluation of a product system.
//!
//! Each included flow contributes `magnitude × factor`; excluded flows
//! contribute exactly zero. The breakdown keeps per-flow, per-stage and
//! per-boundary-category subtotals, all summing to the same total.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::factors::{FactorError, FactorStore, LookupOutcome};
use crate::model::{FactorRef, MaterialFlow, ProductSystem};
use crate::units::Unit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("flow `{stage}/{flow}`: {source}")]
    Factor {
        stage: String,
        flow: String,
        source: FactorError,
    },
    #[error("flow `{stage}/{flow}` is measured in {unit} but factor `{factor}` is not")]
    UnitMismatch {
        stage: String,
        flow: String,
        factor: String,
        unit: Unit,
    },
    #[error("flow `{stage}/{flow}` has invalid pinned factor {value}")]
    InvalidFixedFactor { stage: String, flow: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogLevel {
    Info,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub level: LogLevel,
    pub message: String,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            LogLevel::Info => "info",
            LogLevel::Warning => "warning",
        };
        write!(f, "{level}: {}", self.message)
    }
}

/// Per-evaluation notes: region fallbacks, skipped excluded flows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ComputationLog {
    pub entries: Vec<LogEntry>,
}

impl ComputationLog {
    pub fn info(&mut self, message: impl Into<String>) {
        self.entries.push(LogEntry {
            level: LogLevel::Info,
            message: message.into(),
        });
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.entries.push(LogEntry {
            level: LogLevel::Warning,
            message: message.into(),
        });
    }

    pub fn warnings(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| e.level == LogLevel::Warning)
    }
}

/// kg CO2eq of one flow.
pub fn flow_emission(flow: &MaterialFlow, store: &FactorStore, log: &mut ComputationLog) -> Result<f64, EngineError> {
    if !flow.boundary.is_included() {
        log.warn(format!(
            "flow `{}/{}` is outside the system boundary ({}); counted as 0",
            flow.stage, flow.name, flow.category
        ));
        return Ok(0.0);
    }
    let value = match &flow.factor {
        FactorRef::Fixed { value, source } => {
            if !value.is_finite() || *value < 0.0 {
                return Err(EngineError::InvalidFixedFactor {
                    stage: flow.stage.clone(),
                    flow: flow.name.clone(),
                    value: *value,
                });
            }
            log.info(format!("flow `{}/{}` uses pinned factor {value} ({source})", flow.stage, flow.name));
            *value
        }
        FactorRef::Lookup(name) => {
            let unit = flow.quantity.unit();
            match store.lookup(name, &flow.region, unit) {
                Ok(outcome) => {
                    if let LookupOutcome::Fallback(f) = outcome {
                        log.warn(format!(
                            "flow `{}/{}`: no `{name}` factor for {}, fell back to {}",
                            flow.stage, flow.name, flow.region, f.region
                        ));
                    }
                    outcome.factor().value
                }
                Err(_) if store.has_flow_other_unit(name, unit) => {
                    return Err(EngineError::UnitMismatch {
                        stage: flow.stage.clone(),
                        flow: flow.name.clone(),
                        factor: name.clone(),
                        unit,
                    })
                }
                Err(source) => {
                    return Err(EngineError::Factor {
                        stage: flow.stage.clone(),
                        flow: flow.name.clone(),
                        source,
                    })
                }
            }
        }
    };
    Ok(flow.quantity.magnitude() * value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowEmission {
    pub stage: String,
    pub flow: String,
    /// Boundary rubric category of the flow.
    pub category: String,
    pub kg_co2eq: f64,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmissionBreakdown {
    pub system: String,
    /// One row per flow, in system order.
    pub flows: Vec<FlowEmission>,
    /// Stage subtotals, in system order.
    pub per_stage: Vec<(String, f64)>,
    pub per_category: BTreeMap<String, f64>,
    pub total: f64,
    pub log: ComputationLog,
}

impl EmissionBreakdown {
    pub fn flow(&self, stage: &str, name: &str) -> Option<f64> {
        self.flows
            .iter()
            .find(|f| f.stage.eq_ignore_ascii_case(stage) && f.flow == name)
            .map(|f| f.kg_co2eq)
    }

    pub fn stage(&self, name: &str) -> Option<f64> {
        self.per_stage
            .iter()
            .find(|(s, _)| s.eq_ignore_ascii_case(name))
            .map(|(_, v)| *v)
    }
}

/// Evaluates every flow of `sys`; the total is the burden-free per-turn emission.
pub fn system_emissions(sys: &ProductSystem, store: &FactorStore) -> Result<EmissionBreakdown, EngineError> {
    let mut log = ComputationLog::default();
    let mut flows = Vec::new();
    let mut per_stage = Vec::with_capacity(sys.stages().len());
    let mut per_category: BTreeMap<String, f64> = BTreeMap::new();

    for stage in sys.stages() {
        let mut stage_total = 0.0;
        for flow in &stage.flows {
            let kg = flow_emission(flow, store, &mut log)?;
            stage_total += kg;
            *per_category.entry(flow.category.clone()).or_insert(0.0) += kg;
            flows.push(FlowEmission {
                stage: stage.name.clone(),
                flow: flow.name.clone(),
                category: flow.category.clone(),
                kg_co2eq: kg,
                proportion: 0.0,
            });
        }
        per_stage.push((stage.name.clone(), stage_total));
    }

    let total: f64 = flows.iter().map(|f| f.kg_co2eq).sum();
    if total > 0.0 {
        for f in &mut flows {
            f.proportion = f.kg_co2eq / total;
        }
    }

    Ok(EmissionBreakdown {
        system: sys.name().to_string(),
        flows,
        per_stage,
        per_category,
        total,
        log,
    })
}

/// Evaluates several systems concurrently; output order matches input order.
pub fn evaluate_all(systems: &[ProductSystem], store: &FactorStore) -> Vec<Result<EmissionBreakdown, EngineError>> {
    systems.par_iter().map(|s| system_emissions(s, store)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryClass;
    use crate::fixtures;
    use crate::model::{LifeStage, SystemKind};
    use crate::units::Quantity;

    #[test]
    fn polysulfone_row() {
        let sys = fixtures::virgin_system();
        let store = fixtures::factor_store();
        let flow = sys.flow("Production", "polysulfone").unwrap();
        let kg = flow_emission(flow, &store, &mut ComputationLog::default()).unwrap();
        assert!((kg - 0.85250).abs() <= 1e-5);
    }

    #[test]
    fn container_ship_row() {
        let sys = fixtures::virgin_system();
        let store = fixtures::factor_store();
        let flow = sys.flow("Transport", "container ship").unwrap();
        let kg = flow_emission(flow, &store, &mut ComputationLog::default()).unwrap();
        assert!((kg - 0.02102).abs() <= 1e-5);
    }

    #[test]
    fn zero_magnitude_gives_zero() {
        let store = fixtures::factor_store();
        let flow = MaterialFlow::new("polysulfone", "Production", Quantity::mass(0.0).unwrap(), "GLO", "raw-materials");
        assert_eq!(flow_emission(&flow, &store, &mut ComputationLog::default()).unwrap(), 0.0);
    }

    #[test]
    fn excluded_flow_counts_zero_with_warning() {
        let store = fixtures::factor_store();
        let flow = MaterialFlow::new("polysulfone", "Production", Quantity::mass(5.0).unwrap(), "GLO", "staff-transport")
            .with_boundary(BoundaryClass::Excluded);
        let mut log = ComputationLog::default();
        assert_eq!(flow_emission(&flow, &store, &mut log).unwrap(), 0.0);
        assert_eq!(log.warnings().count(), 1);
    }

    #[test]
    fn fallback_is_logged() {
        let store = fixtures::factor_store();
        let flow = MaterialFlow::new("polysulfone", "Production", Quantity::mass(1.0).unwrap(), "CH", "raw-materials");
        let mut log = ComputationLog::default();
        let kg = flow_emission(&flow, &store, &mut log).unwrap();
        assert!((kg - 7.8862).abs() < 1e-4);
        assert!(log.warnings().next().unwrap().message.contains("fell back to GLO"));
    }

    #[test]
    fn unresolved_and_unit_mismatch_errors_name_the_flow() {
        let store = fixtures::factor_store();
        let missing = MaterialFlow::new("unobtainium", "Production", Quantity::mass(1.0).unwrap(), "GLO", "raw-materials");
        let err = flow_emission(&missing, &store, &mut ComputationLog::default()).unwrap_err();
        assert!(matches!(err, EngineError::Factor { .. }));
        assert!(err.to_string().contains("unobtainium"));

        let wrong_unit = MaterialFlow::new("polysulfone", "Production", Quantity::energy(1.0).unwrap(), "GLO", "raw-materials");
        let err = flow_emission(&wrong_unit, &store, &mut ComputationLog::default()).unwrap_err();
        assert!(matches!(err, EngineError::UnitMismatch { .. }), "{err}");
    }

    #[test]
    fn virgin_and_reman_totals() {
        let store = fixtures::factor_store();
        let v = system_emissions(&fixtures::virgin_system(), &store).unwrap();
        let r = system_emissions(&fixtures::remanufactured_system(), &store).unwrap();
        assert!((v.total - 1.53477).abs() <= 1e-4, "{}", v.total);
        assert!((r.total - 0.61221).abs() <= 1e-4, "{}", r.total);
        assert!(v.log.entries.is_empty());
    }

    #[test]
    fn empty_system_totals_zero() {
        let sys = ProductSystem::empty("nothing", SystemKind::Virgin, 0.1).unwrap();
        let bd = system_emissions(&sys, &fixtures::factor_store()).unwrap();
        assert_eq!(bd.total, 0.0);
        assert!(bd.flows.is_empty());
    }

    #[test]
    fn manual_stage_without_flows_contributes_zero() {
        let sys = ProductSystem::new(
            "labour",
            SystemKind::Virgin,
            0.1,
            "",
            vec![LifeStage::new("Packaging", vec![]).manual()],
        )
        .unwrap();
        let bd = system_emissions(&sys, &fixtures::factor_store()).unwrap();
        assert_eq!(bd.stage("Packaging"), Some(0.0));
    }

    #[test]
    fn parallel_evaluation_preserves_order() {
        let store = fixtures::factor_store();
        let systems = vec![fixtures::remanufactured_system(), fixtures::virgin_system()];
        let out = evaluate_all(&systems, &store);
        assert_eq!(out[0].as_ref().unwrap().system, "remanufactured-catheter");
        assert_eq!(out[1].as_ref().unwrap().system, "virgin-catheter");
    }
}
