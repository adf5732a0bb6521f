//! Reporting categories (plastic, waste, electricity, ...) and
//! system-versus-system comparison.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EmissionBreakdown;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CategoryError {
    #[error("malformed category map: {0}")]
    Parse(String),
    #[error("flow `{flow}` is assigned to both `{first}` and `{second}`")]
    Ambiguous { flow: String, first: String, second: String },
    #[error("category `{0}` listed twice")]
    DuplicateCategory(String),
    #[error("flow `{stage}/{flow}` is not assigned to any category")]
    Unmapped { stage: String, flow: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEntry {
    pub category: String,
    pub members: Vec<String>,
}

#[derive(Deserialize)]
struct CategoryDocument {
    categories: Vec<CategoryEntry>,
}

/// Flow name → reporting category. Each flow belongs to exactly one category.
#[derive(Debug, Clone, Default)]
pub struct CategoryMap {
    order: Vec<String>,
    by_flow: HashMap<String, String>,
}

impl CategoryMap {
    pub fn new(entries: impl IntoIterator<Item = CategoryEntry>) -> Result<Self, CategoryError> {
        let mut order = Vec::new();
        let mut by_flow: HashMap<String, String> = HashMap::new();
        for entry in entries {
            if order.contains(&entry.category) {
                return Err(CategoryError::DuplicateCategory(entry.category));
            }
            for member in entry.members {
                if let Some(first) = by_flow.get(&member) {
                    return Err(CategoryError::Ambiguous {
                        flow: member,
                        first: first.clone(),
                        second: entry.category,
                    });
                }
                by_flow.insert(member, entry.category.clone());
            }
            order.push(entry.category);
        }
        Ok(Self { order, by_flow })
    }

    pub fn from_json(text: &str) -> Result<Self, CategoryError> {
        let doc: CategoryDocument = serde_json::from_str(text).map_err(|e| CategoryError::Parse(e.to_string()))?;
        Self::new(doc.categories)
    }

    pub fn category_of(&self, flow: &str) -> Option<&str> {
        self.by_flow.get(flow).map(String::as_str)
    }

    pub fn categories(&self) -> &[String] {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryTotals {
    pub system: String,
    /// Every category of the map, in map order; unused categories are 0.
    pub totals: Vec<(String, f64)>,
    pub total: f64,
}

impl CategoryTotals {
    pub fn get(&self, category: &str) -> Option<f64> {
        self.totals.iter().find(|(c, _)| c == category).map(|(_, v)| *v)
    }
}

pub fn category_breakdown(bd: &EmissionBreakdown, map: &CategoryMap) -> Result<CategoryTotals, CategoryError> {
    let mut sums: BTreeMap<&str, f64> = map.categories().iter().map(|c| (c.as_str(), 0.0)).collect();
    for row in &bd.flows {
        let category = map.category_of(&row.flow).ok_or_else(|| CategoryError::Unmapped {
            stage: row.stage.clone(),
            flow: row.flow.clone(),
        })?;
        *sums.get_mut(category).expect("category from map") += row.kg_co2eq;
    }
    let totals = map
        .categories()
        .iter()
        .map(|c| (c.clone(), sums[c.as_str()]))
        .collect();
    Ok(CategoryTotals {
        system: bd.system.clone(),
        totals,
        total: bd.total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryDelta {
    pub category: String,
    pub baseline: f64,
    pub alternative: f64,
    /// alternative − baseline
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub baseline: String,
    pub alternative: String,
    pub rows: Vec<CategoryDelta>,
    pub baseline_total: f64,
    pub alternative_total: f64,
    pub delta_total: f64,
    /// 1 − alternative/baseline; `None` when the baseline total is zero.
    pub relative_saving: Option<f64>,
}

/// Per-category deltas `b − a` and the relative saving of `b` over `a`.
pub fn compare_systems(a: &CategoryTotals, b: &CategoryTotals) -> Comparison {
    let mut names: Vec<&str> = a.totals.iter().map(|(c, _)| c.as_str()).collect();
    for (c, _) in &b.totals {
        if !names.contains(&c.as_str()) {
            names.push(c);
        }
    }
    let rows = names
        .into_iter()
        .map(|c| {
            let x = a.get(c).unwrap_or(0.0);
            let y = b.get(c).unwrap_or(0.0);
            CategoryDelta {
                category: c.to_string(),
                baseline: x,
                alternative: y,
                delta: y - x,
            }
        })
        .collect();
    let relative_saving = if a.total != 0.0 {
        Some(1.0 - b.total / a.total)
    } else if b.total == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Comparison {
        baseline: a.system.clone(),
        alternative: b.system.clone(),
        rows,
        baseline_total: a.total,
        alternative_total: b.total,
        delta_total: b.total - a.total,
        relative_saving,
    }
}
