//! Per-flow and per-stage emissions of the two catheter inventories.

use approx::assert_abs_diff_eq;
use remanlca_core::engine::system_emissions;
use remanlca_core::fixtures;

const VIRGIN_FLOWS: &[(&str, &str, f64)] = &[
    ("Production", "polyamide", 0.02934),
    ("Production", "ethylene glycol", 0.00261),
    ("Production", "polyethylene LD", 0.00077),
    ("Production", "polysulfone", 0.85250),
    ("Production", "polyurethane", 0.00419),
    ("Production", "electricity", 0.01077),
    ("Sterilisation", "carbon dioxide", 0.00229),
    ("Sterilisation", "ethylene oxide", 0.00034),
    ("Sterilisation", "electricity", 0.14908),
    ("Packaging", "polyethylene HD", 0.04798),
    ("Packaging", "carton box", 0.10390),
    ("Transport", "container ship", 0.02102),
    ("Transport", "lorry", 0.01510),
    ("Use", "electricity", 0.01586),
    ("Incineration", "plastic incineration", 0.27902),
];

const VIRGIN_STAGES: &[(&str, f64)] = &[
    ("Production", 0.90018),
    ("Sterilisation", 0.15171),
    ("Packaging", 0.15188),
    ("Transport", 0.03612),
    ("Use", 0.01586),
    ("Incineration", 0.27902),
];

const REMAN_FLOWS: &[(&str, &str, f64)] = &[
    ("Transport", "container ship", 0.04203),
    ("Transport", "lorry", 0.03020),
    ("Remanufacturing", "hydrogen peroxide", 0.03497),
    ("Remanufacturing", "sodium bicarbonate", 0.01861),
    ("Remanufacturing", "sodium cumenesulphonate", 0.00084),
    ("Remanufacturing", "tap water", 0.00232),
    ("Remanufacturing", "water, ultrapure", 0.00368),
    ("Remanufacturing", "electricity", 0.08561),
    ("Incineration", "plastic incineration", 0.09426),
    ("Sterilisation", "carbon dioxide", 0.00229),
    ("Sterilisation", "ethylene oxide", 0.00034),
    ("Sterilisation", "electricity", 0.14919),
    ("Packaging", "polyethylene HD", 0.04798),
    ("Packaging", "carton box", 0.08403),
    ("Use", "electricity", 0.01586),
];

const REMAN_STAGES: &[(&str, f64)] = &[
    ("Transport", 0.07223),
    ("Remanufacturing", 0.14603),
    ("Incineration", 0.09426),
    ("Sterilisation", 0.15182),
    ("Packaging", 0.13201),
    ("Use", 0.01586),
];

#[test]
fn virgin_flows() {
    let bd = system_emissions(&fixtures::virgin_system(), &fixtures::factor_store()).unwrap();
    assert_eq!(bd.flows.len(), VIRGIN_FLOWS.len());
    for &(stage, flow, kg) in VIRGIN_FLOWS {
        let got = bd.flow(stage, flow).unwrap_or_else(|| panic!("missing {stage}/{flow}"));
        assert_abs_diff_eq!(got, kg, epsilon = 1e-5);
    }
}

#[test]
fn virgin_stages() {
    let bd = system_emissions(&fixtures::virgin_system(), &fixtures::factor_store()).unwrap();
    for &(stage, kg) in VIRGIN_STAGES {
        assert_abs_diff_eq!(bd.stage(stage).unwrap(), kg, epsilon = 1e-5);
    }
    assert_abs_diff_eq!(bd.total, 1.53477, epsilon = 1e-4);
}

#[test]
fn reman_flows() {
    let bd = system_emissions(&fixtures::remanufactured_system(), &fixtures::factor_store()).unwrap();
    assert_eq!(bd.flows.len(), REMAN_FLOWS.len());
    for &(stage, flow, kg) in REMAN_FLOWS {
        let got = bd.flow(stage, flow).unwrap_or_else(|| panic!("missing {stage}/{flow}"));
        assert_abs_diff_eq!(got, kg, epsilon = 1e-5);
    }
}

#[test]
fn reman_stages() {
    let bd = system_emissions(&fixtures::remanufactured_system(), &fixtures::factor_store()).unwrap();
    for &(stage, kg) in REMAN_STAGES {
        assert_abs_diff_eq!(bd.stage(stage).unwrap(), kg, epsilon = 1e-5);
    }
    assert_abs_diff_eq!(bd.total, 0.61221, epsilon = 1e-4);
}

#[test]
fn proportions_match_printed_percentages() {
    let bd = system_emissions(&fixtures::virgin_system(), &fixtures::factor_store()).unwrap();
    let row = bd.flows.iter().find(|f| f.flow == "polysulfone").unwrap();
    assert_abs_diff_eq!(row.proportion, 0.5555, epsilon = 1e-4);
    let sum: f64 = bd.flows.iter().map(|f| f.proportion).sum();
    assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
}
