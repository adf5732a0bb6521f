mod common;

use common::{build, flow_specs, rel_close};
use proptest::prelude::*;
use remanlca_core::buyback::solve_injection;
use remanlca_core::engine::system_emissions;
use remanlca_core::fixtures;
use remanlca_core::report::{breakdown_report, parse_csv};
use remanlca_core::scenario::{
    apply_location, apply_rejection, sweep_univariate, Baseline, Location, RejectionMode, SweepParam, SweepSettings,
    SweepValue,
};
use remanlca_core::units::Unit;

proptest! {
    #[test]
    fn flow_stage_category_totals_agree(specs in flow_specs()) {
        let (sys, store) = build(&specs);
        let bd = system_emissions(&sys, &store).unwrap();
        let by_flow: f64 = bd.flows.iter().map(|f| f.kg_co2eq).sum();
        let by_stage: f64 = bd.per_stage.iter().map(|(_, v)| v).sum();
        let by_cat: f64 = bd.per_category.values().sum();
        prop_assert!(rel_close(by_flow, bd.total, 1e-9));
        prop_assert!(rel_close(by_stage, bd.total, 1e-9));
        prop_assert!(rel_close(by_cat, bd.total, 1e-9));
    }

    #[test]
    fn scaling_every_quantity_scales_total(specs in flow_specs(), k in 0.0f64..50.0) {
        let (sys, store) = build(&specs);
        let scaled = sys.map_flows(|f| f.clone().with_quantity(f.quantity.scaled(k).unwrap())).unwrap();
        let a = system_emissions(&sys, &store).unwrap().total;
        let b = system_emissions(&scaled, &store).unwrap().total;
        prop_assert!(rel_close(b, k * a, 1e-9) || (b - k * a).abs() < 1e-12);
    }

    #[test]
    fn splitting_a_flow_preserves_total(specs in flow_specs(), frac in 0.0f64..=1.0) {
        let (sys, store) = build(&specs);
        let mut split = specs.clone();
        let (stage, cat, m, f) = split[0];
        split[0] = (stage, cat, m * frac, f);
        split.push((stage, cat, m * (1.0 - frac), f));
        let (sys2, store2) = build(&split);
        let a = system_emissions(&sys, &store).unwrap().total;
        let b = system_emissions(&sys2, &store2).unwrap().total;
        prop_assert!(rel_close(a, b, 1e-9) || (a - b).abs() < 1e-12);
    }

    #[test]
    fn injection_monotone_in_turns_and_rate(u in 1u64..50_000, n in 1u32..10, r in 0.0f64..=1.0, dr in 0.0f64..0.3) {
        let c = solve_injection(u, n, r).unwrap();
        prop_assert!(solve_injection(u, n + 1, r).unwrap() <= c);
        prop_assert!(solve_injection(u, n, (r + dr).min(1.0)).unwrap() >= c);
    }

    #[test]
    fn location_and_rejection_commute(loc in 0usize..3, r in 0.0f64..0.95, per_success in any::<bool>()) {
        let store = fixtures::factor_store();
        let profiles = fixtures::location_profiles();
        let profile = profiles.get(Location::ALL[loc]).unwrap();
        let mode = if per_success { RejectionMode::PerSuccess } else { RejectionMode::Amortized };
        let reman = fixtures::remanufactured_system();
        let a = apply_rejection(&apply_location(&reman, profile, &store).unwrap(), r, mode).unwrap();
        let b = apply_location(&apply_rejection(&reman, r, mode).unwrap(), profile, &store).unwrap();
        let ta = system_emissions(&a, &store).unwrap().total;
        let tb = system_emissions(&b, &store).unwrap().total;
        prop_assert!(rel_close(ta, tb, 1e-12));
    }

    #[test]
    fn sweep_results_do_not_depend_on_grid_order(mut rates in proptest::collection::vec(0.0f64..0.9, 1..8)) {
        let store = fixtures::factor_store();
        let profiles = fixtures::location_profiles();
        let reman = fixtures::remanufactured_system();
        let base = Baseline { virgin_emission: 1.53477, reman: &reman, store: &store, locations: &profiles };
        let grid: Vec<_> = rates.iter().copied().map(SweepValue::Rate).collect();
        let forward = sweep_univariate(SweepParam::RejectionRate, &grid, &base, SweepSettings::default()).unwrap();
        rates.reverse();
        let grid: Vec<_> = rates.iter().copied().map(SweepValue::Rate).collect();
        let backward = sweep_univariate(SweepParam::RejectionRate, &grid, &base, SweepSettings::default()).unwrap();
        for (f, b) in forward.iter().zip(backward.iter().rev()) {
            prop_assert_eq!(f, b);
        }
    }

    #[test]
    fn csv_round_trip(specs in flow_specs()) {
        let (sys, store) = build(&specs);
        let bd = system_emissions(&sys, &store).unwrap();
        let (_, rows) = parse_csv(&breakdown_report(&bd).to_csv().unwrap()).unwrap();
        for (row, f) in rows.iter().zip(&bd.flows) {
            let v: f64 = row[3].parse().unwrap();
            prop_assert!((v - f.kg_co2eq).abs() <= 1e-5);
        }
        let total: f64 = rows.last().unwrap()[3].parse().unwrap();
        prop_assert!((total - bd.total).abs() <= 1e-5);
    }
}

#[test]
fn only_transport_and_electricity_differ_between_locations() {
    let store = fixtures::factor_store();
    let profiles = fixtures::location_profiles();
    let reman = fixtures::remanufactured_system();
    let located: Vec<_> = Location::ALL
        .iter()
        .map(|l| apply_location(&reman, profiles.get(*l).unwrap(), &store).unwrap())
        .collect();
    for sys in &located {
        for flow in sys.flows() {
            let unit = flow.quantity.unit();
            if unit == Unit::MassDistance || unit == Unit::Energy {
                continue;
            }
            let original = reman.flow(&flow.stage, &flow.name).unwrap();
            assert_eq!(flow, original, "{}/{} changed", flow.stage, flow.name);
        }
        let use_stage = sys.flow("Use", "electricity").unwrap();
        assert_eq!(use_stage, reman.flow("Use", "electricity").unwrap());
    }
}

#[test]
fn zero_rejection_means_no_incineration() {
    let store = fixtures::factor_store();
    for mode in [RejectionMode::Amortized, RejectionMode::PerSuccess] {
        let sys = apply_rejection(&fixtures::remanufactured_system(), 0.0, mode).unwrap();
        let bd = system_emissions(&sys, &store).unwrap();
        assert_eq!(bd.flow("Incineration", "plastic incineration"), Some(0.0));
    }
}

#[test]
fn per_success_curve_increasing_and_convex() {
    let store = fixtures::factor_store();
    let reman = fixtures::remanufactured_system();
    let totals: Vec<f64> = (0..=90)
        .map(|i| {
            let sys = apply_rejection(&reman, f64::from(i) / 100.0, RejectionMode::PerSuccess).unwrap();
            system_emissions(&sys, &store).unwrap().total
        })
        .collect();
    for w in totals.windows(3) {
        assert!(w[1] > w[0] && w[2] > w[1]);
        assert!(w[2] - 2.0 * w[1] + w[0] > 0.0);
    }
}
