//! Synthetic inventories for property tests; no reference data involved.

#![allow(dead_code)]

use proptest::prelude::*;
use remanlca_core::factors::{EmissionFactor, FactorStore};
use remanlca_core::model::{LifeStage, MaterialFlow, ProductSystem, SystemKind};
use remanlca_core::units::{Quantity, Unit};

const CATEGORIES: [&str; 3] = ["raw-materials", "manufacture", "waste-management"];

/// One synthetic flow: stage index, category index, magnitude, factor.
pub type FlowSpec = (usize, usize, f64, f64);

pub fn flow_specs() -> impl Strategy<Value = Vec<FlowSpec>> {
    proptest::collection::vec((0usize..3, 0usize..3, 0.0f64..1000.0, 0.0f64..10.0), 1..24)
}

pub fn build(specs: &[FlowSpec]) -> (ProductSystem, FactorStore) {
    let mut stages: Vec<Vec<MaterialFlow>> = vec![Vec::new(); 3];
    let mut factors = Vec::new();
    for (i, &(stage, cat, magnitude, factor)) in specs.iter().enumerate() {
        let name = format!("f{i}");
        stages[stage].push(MaterialFlow::new(
            name.clone(),
            "",
            Quantity::mass(magnitude).unwrap(),
            "GLO",
            CATEGORIES[cat],
        ));
        factors.push(EmissionFactor {
            flow_name: name,
            region: "GLO".into(),
            unit: Unit::Mass,
            value: factor,
            source: "synthetic".into(),
            time_range: (2020, 2020),
        });
    }
    let stages = stages
        .into_iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .map(|(i, f)| LifeStage::new(format!("S{i}"), f))
        .collect();
    let sys = ProductSystem::new("synthetic", SystemKind::Virgin, 1.0, "one unit", stages).unwrap();
    (sys, FactorStore::new(factors).unwrap())
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
