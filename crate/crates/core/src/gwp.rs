//! Multi-gas aggregation into kg CO2eq via global warming potentials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GwpError {
    #[error("malformed GWP table: {0}")]
    Parse(String),
    #[error("gas `{0}` is not in the GWP table")]
    UnknownGas(String),
    #[error("gas `{0}` listed twice in the GWP table")]
    Duplicate(String),
    #[error("GWP for `{gas}` must be positive, got {value}")]
    NonPositive { gas: String, value: f64 },
    #[error("GWP for CO2 must be exactly 1, got {0}")]
    Co2NotUnity(f64),
    #[error("mass of `{gas}` must be finite and non-negative, got {mass}")]
    InvalidMass { gas: String, mass: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwpEntry {
    pub gas: String,
    #[serde(rename = "value")]
    pub gwp: f64,
}

#[derive(Deserialize)]
struct GwpDocument {
    gwp: Vec<GwpEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct GwpTable {
    entries: BTreeMap<String, f64>,
}

impl GwpTable {
    pub fn new(entries: impl IntoIterator<Item = GwpEntry>) -> Result<Self, GwpError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if !e.gwp.is_finite() || e.gwp <= 0.0 {
                return Err(GwpError::NonPositive { gas: e.gas, value: e.gwp });
            }
            if e.gas == "CO2" && e.gwp != 1.0 {
                return Err(GwpError::Co2NotUnity(e.gwp));
            }
            if map.insert(e.gas.clone(), e.gwp).is_some() {
                return Err(GwpError::Duplicate(e.gas));
            }
        }
        Ok(Self { entries: map })
    }

    pub fn from_json(text: &str) -> Result<Self, GwpError> {
        let doc: GwpDocument = serde_json::from_str(text).map_err(|e| GwpError::Parse(e.to_string()))?;
        Self::new(doc.gwp)
    }

    pub fn get(&self, gas: &str) -> Option<f64> {
        self.entries.get(gas).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Σ mass × GWP over `(gas, kg)` pairs.
pub fn gwp_aggregate<S: AsRef<str>>(masses: &[(S, f64)], table: &GwpTable) -> Result<f64, GwpError> {
    masses.iter().try_fold(0.0, |acc, (gas, kg)| {
        let gas = gas.as_ref();
        if !kg.is_finite() || *kg < 0.0 {
            return Err(GwpError::InvalidMass {
                gas: gas.to_string(),
                mass: *kg,
            });
        }
        let gwp = table.get(gas).ok_or_else(|| GwpError::UnknownGas(gas.to_string()))?;
        Ok(acc + kg * gwp)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> GwpTable {
        GwpTable::new([
            GwpEntry { gas: "CO2".into(), gwp: 1.0 },
            GwpEntry { gas: "G".into(), gwp: 10.0 },
        ])
        .unwrap()
    }

    #[test]
    fn co2_identity() {
        assert_eq!(gwp_aggregate(&[("CO2", 2.0)], &table()).unwrap(), 2.0);
    }

    #[test]
    fn empty_sum() {
        let none: [(&str, f64); 0] = [];
        assert_eq!(gwp_aggregate(&none, &table()).unwrap(), 0.0);
    }

    #[test]
    fn mixed_gases() {
        // 1.0 * 1 + 0.5 * 10
        assert_eq!(gwp_aggregate(&[("CO2", 1.0), ("G", 0.5)], &table()).unwrap(), 6.0);
    }

    #[test]
    fn unknown_gas() {
        assert_eq!(
            gwp_aggregate(&[("XYZ", 1.0)], &table()),
            Err(GwpError::UnknownGas("XYZ".into()))
        );
    }

    #[test]
    fn table_invariants() {
        assert!(matches!(
            GwpTable::new([GwpEntry { gas: "CO2".into(), gwp: 1.1 }]),
            Err(GwpError::Co2NotUnity(_))
        ));
        assert!(matches!(
            GwpTable::new([GwpEntry { gas: "CH4".into(), gwp: 0.0 }]),
            Err(GwpError::NonPositive { .. })
        ));
        let t = GwpTable::from_json(crate::fixtures::GWP_JSON).unwrap();
        assert_eq!(t.get("CO2"), Some(1.0));
    }

    proptest! {
        #[test]
        fn linear_over_concatenation(
            a in proptest::collection::vec((0usize..2, 0.0f64..100.0), 0..8),
            b in proptest::collection::vec((0usize..2, 0.0f64..100.0), 0..8),
        ) {
            let names = ["CO2", "G"];
            let a: Vec<_> = a.into_iter().map(|(i, m)| (names[i], m)).collect();
            let b: Vec<_> = b.into_iter().map(|(i, m)| (names[i], m)).collect();
            let mut ab = a.clone();
            ab.extend(b.iter().cloned());
            let t = table();
            let lhs = gwp_aggregate(&ab, &t).unwrap();
            let rhs = gwp_aggregate(&a, &t).unwrap() + gwp_aggregate(&b, &t).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
