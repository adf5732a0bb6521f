//! System-boundary rubric: which process categories are counted.
//!
//! The default rubric follows the NHS medical-device accounting guidance:
//! attributable and non-attributable processes are included, staff and
//! patient transport, infrastructure, software and ancillary products are
//! excluded.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryClass {
    AttributableIncluded,
    NonAttributableIncluded,
    Excluded,
}

impl BoundaryClass {
    pub fn is_included(self) -> bool {
        !matches!(self, BoundaryClass::Excluded)
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundaryClass::AttributableIncluded => "attributable-included",
            BoundaryClass::NonAttributableIncluded => "non-attributable-included",
            BoundaryClass::Excluded => "excluded",
        }
    }
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassificationError {
    #[error("flow `{flow}` has no boundary category")]
    MissingCategory { flow: String },
    #[error("flow `{flow}` references unknown boundary category `{category}`")]
    UnknownCategory { flow: String, category: String },
    #[error("boundary rubric lists category `{0}` twice")]
    DuplicateCategory(String),
    #[error("malformed boundary rubric: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RubricEntry {
    pub category: String,
    pub class: BoundaryClass,
    #[serde(default)]
    pub description: String,
}

#[derive(Deserialize)]
struct RubricDocument {
    rubric: Vec<RubricEntry>,
}

/// Category name → boundary class.
#[derive(Debug, Clone, Default)]
pub struct BoundaryRubric {
    entries: BTreeMap<String, RubricEntry>,
}

impl BoundaryRubric {
    pub fn new(entries: impl IntoIterator<Item = RubricEntry>) -> Result<Self, ClassificationError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if map.contains_key(&e.category) {
                return Err(ClassificationError::DuplicateCategory(e.category));
            }
            map.insert(e.category.clone(), e);
        }
        Ok(Self { entries: map })
    }

    pub fn from_json(text: &str) -> Result<Self, ClassificationError> {
        let doc: RubricDocument =
            serde_json::from_str(text).map_err(|e| ClassificationError::Parse(e.to_string()))?;
        Self::new(doc.rubric)
    }

    pub fn get(&self, category: &str) -> Option<&RubricEntry> {
        self.entries.get(category)
    }

    pub fn categories(&self) -> impl Iterator<Item = &RubricEntry> {
        self.entries.values()
    }
}

/// Looks up the boundary class for a flow's category.
pub fn classify_flow(
    flow_name: &str,
    category: &str,
    rubric: &BoundaryRubric,
) -> Result<BoundaryClass, ClassificationError> {
    let category = category.trim();
    if category.is_empty() {
        return Err(ClassificationError::MissingCategory {
            flow: flow_name.to_string(),
        });
    }
    rubric
        .get(category)
        .map(|e| e.class)
        .ok_or_else(|| ClassificationError::UnknownCategory {
            flow: flow_name.to_string(),
            category: category.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn waste_management_is_attributable() {
        let rubric = fixtures::rubric();
        assert_eq!(
            classify_flow("plastic incineration", "waste-management", &rubric).unwrap(),
            BoundaryClass::AttributableIncluded
        );
    }

    #[test]
    fn staff_transport_is_excluded() {
        let rubric = fixtures::rubric();
        let class = classify_flow("staff transport", "staff-transport", &rubric).unwrap();
        assert_eq!(class, BoundaryClass::Excluded);
        assert!(!class.is_included());
    }

    #[test]
    fn empty_category_names_the_flow() {
        let rubric = fixtures::rubric();
        let err = classify_flow("mystery", "  ", &rubric).unwrap_err();
        assert_eq!(
            err,
            ClassificationError::MissingCategory {
                flow: "mystery".into()
            }
        );
        assert!(err.to_string().contains("mystery"));
    }

    #[test]
    fn unknown_category_is_an_error() {
        let rubric = fixtures::rubric();
        assert!(matches!(
            classify_flow("x", "teleportation", &rubric),
            Err(ClassificationError::UnknownCategory { .. })
        ));
    }

    #[test]
    fn duplicate_rubric_categories_rejected() {
        let text = r#"{"rubric":[{"category":"a","class":"excluded"},{"category":"a","class":"excluded"}]}"#;
        assert!(matches!(
            BoundaryRubric::from_json(text),
            Err(ClassificationError::DuplicateCategory(_))
        ));
    }
}
