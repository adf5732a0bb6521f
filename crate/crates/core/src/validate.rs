//! Audit of product-system documents and factor coverage.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::boundary::{classify_flow, BoundaryClass, BoundaryRubric};
use crate::factors::{FactorStore, LookupOutcome};
use crate::model::{FactorRef, ProductSystem, SystemDocument, KNOWN_REGIONS};
use crate::units::Unit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}: {}", self.severity, self.code, self.subject, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.error_count() == 0
    }

    pub fn error_count(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings.len() - self.error_count()
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }

    fn error(&mut self, code: &'static str, subject: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            severity: Severity::Error,
            code,
            subject: subject.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, code: &'static str, subject: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            severity: Severity::Warning,
            code,
            subject: subject.into(),
            message: message.into(),
        });
    }
}

/// Audits a product-system document. Pure: the same document always yields
/// the same report, in document order.
pub fn validate_system(doc: &SystemDocument, rubric: &BoundaryRubric) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !doc.device_mass_kg.is_finite() || doc.device_mass_kg <= 0.0 {
        report.error(
            "device-mass",
            &doc.name,
            format!("device mass must be positive, got {}", doc.device_mass_kg),
        );
    }

    let forbidden = doc.kind.forbidden_stage();
    let mut stage_names = HashSet::new();
    // factor name -> first unit seen, for cross-flow unit consistency
    let mut factor_units: BTreeMap<String, (Unit, String)> = BTreeMap::new();

    for stage in &doc.stages {
        if !stage_names.insert(stage.name.to_lowercase()) {
            report.error("duplicate-stage", &stage.name, "stage name appears more than once");
        }
        if stage.name.eq_ignore_ascii_case(forbidden) {
            report.error(
                "kind-violation",
                &stage.name,
                format!("a {} system may not contain this stage", doc.kind),
            );
        }
        if stage.flows.is_empty() && !stage.manual {
            report.error("empty-stage", &stage.name, "stage has no flows and is not marked manual");
        }

        let mut flow_names = HashSet::new();
        for flow in &stage.flows {
            let subject = format!("{}/{}", stage.name, flow.name);
            if !flow_names.insert(flow.name.as_str()) {
                report.error("duplicate-flow", &subject, "flow name appears more than once in its stage");
            }

            let quantity = match flow.quantity(&stage.name) {
                Ok(q) => Some(q),
                Err(e) => {
                    report.error("quantity", &subject, e.to_string());
                    None
                }
            };

            if flow.region.trim().is_empty() {
                report.error("missing-region", &subject, "region is empty");
            } else if !KNOWN_REGIONS.contains(&flow.region.trim()) {
                report.warn(
                    "unknown-region",
                    &subject,
                    format!("region `{}` is not in the known-region list", flow.region),
                );
            }

            if flow.time_range[1] < flow.time_range[0] {
                report.error(
                    "time-range",
                    &subject,
                    format!("time range {}..{} is reversed", flow.time_range[0], flow.time_range[1]),
                );
            }

            match classify_flow(&flow.name, &flow.category, rubric) {
                Ok(BoundaryClass::Excluded) => {
                    if quantity.is_none_or(|q| q.magnitude() > 0.0) {
                        report.error(
                            "excluded-flow",
                            &subject,
                            format!("category `{}` is outside the system boundary but carries a quantity", flow.category),
                        );
                    }
                }
                Ok(_) => {}
                Err(e) => report.error("classification", &subject, e.to_string()),
            }

            if let Some(q) = quantity {
                let key = flow.factor.clone().unwrap_or_else(|| flow.name.clone());
                match factor_units.get(&key) {
                    Some((unit, first)) if *unit != q.unit() => report.error(
                        "unit-mismatch",
                        &subject,
                        format!("factor `{key}` used in {} instead of {} (first seen at {first})", q.unit(), unit),
                    ),
                    Some(_) => {}
                    None => {
                        factor_units.insert(key, (q.unit(), subject.clone()));
                    }
                }
            }
        }
    }

    report
}

/// Checks that every included flow of a built system resolves a factor of
/// the right unit. Region fallbacks are reported as warnings.
pub fn validate_factor_coverage(sys: &ProductSystem, store: &FactorStore) -> ValidationReport {
    let mut report = ValidationReport::default();
    for flow in sys.flows() {
        if !flow.boundary.is_included() {
            continue;
        }
        let subject = format!("{}/{}", flow.stage, flow.name);
        let FactorRef::Lookup(name) = &flow.factor else {
            continue;
        };
        match store.lookup(name, &flow.region, flow.quantity.unit()) {
            Ok(LookupOutcome::Exact(_)) => {}
            Ok(LookupOutcome::Fallback(f)) => report.warn(
                "region-fallback",
                &subject,
                format!("no `{}` factor for {}, using {}", name, flow.region, f.region),
            ),
            Err(e) => {
                let code = if store.has_flow_other_unit(name, flow.quantity.unit()) {
                    "unit-mismatch"
                } else {
                    "unresolved-factor"
                };
                report.error(code, &subject, e.to_string());
            }
        }
    }
    report
}
