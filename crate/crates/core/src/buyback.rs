//! Long-term buy-back schemes.
//!
//! A scheme delivers `U` uses from an initial injection of `C` virgin
//! devices. Every used device is collected; a fraction `R` is rejected at each
//! remanufacturing step and a device is retired after `N` uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::metrics::{check_emission, MetricsError};

/// Upper bound on turns per device; keeps cohort tables and simulations bounded.
pub const MAX_TURNS: u32 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuybackError {
    #[error("malformed scheme input: {0}")]
    Parse(String),
    #[error("scheme must deliver at least one use")]
    ZeroUses,
    #[error("number of turns must be at least 1")]
    ZeroTurns,
    #[error("number of turns {0} exceeds the supported maximum of {MAX_TURNS}")]
    TooManyTurns(u32),
    #[error("rejection rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error(transparent)]
    Emission(#[from] MetricsError),
    #[error("injection {injection} is outside 1..={uses}")]
    InvalidInjection { injection: u64, uses: u64 },
    #[error("simulation needs at least one replication")]
    ZeroReplications,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub uses: u64,
    pub turns: u32,
    pub rejection_rate: f64,
    pub e_virgin: f64,
    pub e_reman: f64,
}

impl SchemeSpec {
    pub fn new(uses: u64, turns: u32, rejection_rate: f64, e_virgin: f64, e_reman: f64) -> Result<Self, BuybackError> {
        let s = Self {
            name: None,
            uses,
            turns,
            rejection_rate,
            e_virgin,
            e_reman,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<(), BuybackError> {
        check_params(self.uses, self.turns, self.rejection_rate)?;
        check_emission("virgin", self.e_virgin)?;
        check_emission("remanufactured", self.e_reman)?;
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemeDocument {
    Many { schemes: Vec<SchemeSpec> },
    One(SchemeSpec),
}

/// Parses either a single scheme object or `{"schemes": [...]}`.
pub fn parse_schemes(text: &str) -> Result<Vec<SchemeSpec>, BuybackError> {
    let doc: SchemeDocument = serde_json::from_str(text).map_err(|e| BuybackError::Parse(e.to_string()))?;
    let schemes = match doc {
        SchemeDocument::Many { schemes } => schemes,
        SchemeDocument::One(s) => vec![s],
    };
    for s in &schemes {
        s.validate()?;
    }
    Ok(schemes)
}

fn check_params(uses: u64, turns: u32, rate: f64) -> Result<(), BuybackError> {
    if uses == 0 {
        return Err(BuybackError::ZeroUses);
    }
    if turns == 0 {
        return Err(BuybackError::ZeroTurns);
    }
    if turns > MAX_TURNS {
        return Err(BuybackError::TooManyTurns(turns));
    }
    if !rate.is_finite() || !(0.0..=1.0).contains(&rate) {
        return Err(BuybackError::InvalidRate(rate));
    }
    Ok(())
}

/// Expected uses delivered by one virgin device: Σ_{n=1..N} (1 − R)^{n−1}.
pub fn expected_lifetime_uses(turns: u32, rate: f64) -> f64 {
    let survive = 1.0 - rate;
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..turns {
        sum += term;
        term *= survive;
    }
    sum
}

/// Smallest injection whose expected delivered uses reach `uses`.
pub fn solve_injection(uses: u64, turns: u32, rate: f64) -> Result<u64, BuybackError> {
    check_params(uses, turns, rate)?;
    let q = uses as f64 / expected_lifetime_uses(turns, rate);
    let nearest = q.round();
    // quotients that are integers up to rounding noise must not round up
    let c = if (q - nearest).abs() <= 1e-12 * q.max(1.0) {
        nearest
    } else {
        q.ceil()
    };
    Ok((c as u64).clamp(1, uses))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CohortRow {
    /// Turn index, 1 = virgin use.
    pub turn: u32,
    /// Expected uses delivered at this turn.
    pub uses: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeResult {
    pub injection: u64,
    /// kg CO2eq over all `U` uses.
    pub total: f64,
    /// kg CO2eq per use.
    pub per_turn: f64,
    pub cohort: Vec<CohortRow>,
    /// Expected uses the injection delivers; at least `U`.
    pub delivered: f64,
}

pub fn scheme_emissions(spec: &SchemeSpec) -> Result<SchemeResult, BuybackError> {
    spec.validate()?;
    let injection = solve_injection(spec.uses, spec.turns, spec.rejection_rate)?;
    emissions_for_injection(spec, injection)
}

/// Scheme emissions for an explicitly chosen injection.
pub fn emissions_for_injection(spec: &SchemeSpec, injection: u64) -> Result<SchemeResult, BuybackError> {
    spec.validate()?;
    if injection == 0 || injection > spec.uses {
        return Err(BuybackError::InvalidInjection {
            injection,
            uses: spec.uses,
        });
    }
    let survive = 1.0 - spec.rejection_rate;
    let mut cohort = Vec::with_capacity(spec.turns as usize);
    let mut devices = injection as f64;
    for turn in 1..=spec.turns {
        cohort.push(CohortRow { turn, uses: devices });
        devices *= survive;
    }
    let delivered = cohort.iter().map(|r| r.uses).sum();
    let total = injection as f64 * spec.e_virgin + (spec.uses - injection) as f64 * spec.e_reman;
    Ok(SchemeResult {
        injection,
        total,
        per_turn: total / spec.uses as f64,
        cohort,
        delivered,
    })
}

/// Saving against delivering every use with a virgin device.
pub fn scheme_saving(spec: &SchemeSpec) -> Result<f64, BuybackError> {
    let result = scheme_emissions(spec)?;
    if spec.e_virgin == 0.0 {
        return Err(MetricsError::ZeroVirginEmission.into());
    }
    Ok(1.0 - result.total / (spec.uses as f64 * spec.e_virgin))
}

/// Mean with a two-sided 95% Student-t interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_dev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self {
                mean,
                std_dev: 0.0,
                ci_low: mean,
                ci_high: mean,
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std_dev = var.sqrt();
        let t = StudentsT::new(0.0, 1.0, n - 1.0)
            .expect("degrees of freedom are positive")
            .inverse_cdf(0.975);
        let half = t * std_dev / n.sqrt();
        Self {
            mean,
            std_dev,
            ci_low: mean - half,
            ci_high: mean + half,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FleetSummary {
    pub injection: u64,
    pub replications: u32,
    pub seed: u64,
    pub uses: Estimate,
    pub emissions: Estimate,
    /// Analytic expectation `C·Σ(1 − R)^{n−1}`.
    pub expected_uses: f64,
}

/// (uses, virgin uses) for one replication.
fn replicate(injection: u64, turns: u32, rate: f64, seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let survive = 1.0 - rate;
    let mut uses = 0;
    for _ in 0..injection {
        uses += 1;
        for _ in 1..turns {
            if !rng.gen_bool(survive) {
                break;
            }
            uses += 1;
        }
    }
    (uses, injection)
}

/// Monte Carlo fleet of `injection` devices; replication `i` uses seed `seed + i`.
pub fn simulate_fleet(
    spec: &SchemeSpec,
    injection: u64,
    seed: u64,
    replications: u32,
) -> Result<FleetSummary, BuybackError> {
    spec.validate()?;
    if replications == 0 {
        return Err(BuybackError::ZeroReplications);
    }
    let runs: Vec<(u64, u64)> = (0..replications)
        .into_par_iter()
        .map(|i| replicate(injection, spec.turns, spec.rejection_rate, seed.wrapping_add(u64::from(i))))
        .collect();
    let uses: Vec<f64> = runs.iter().map(|&(u, _)| u as f64).collect();
    let emissions: Vec<f64> = runs
        .iter()
        .map(|&(u, v)| v as f64 * spec.e_virgin + (u - v) as f64 * spec.e_reman)
        .collect();
    Ok(FleetSummary {
        injection,
        replications,
        seed,
        uses: Estimate::from_samples(&uses),
        emissions: Estimate::from_samples(&emissions),
        expected_uses: injection as f64 * expected_lifetime_uses(spec.turns, spec.rejection_rate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EV: f64 = 1.53477;
    const ER: f64 = 0.61221;

    fn spec(turns: u32, rate: f64) -> SchemeSpec {
        SchemeSpec::new(1000, turns, rate, EV, ER).unwrap()
    }

    #[test]
    fn injections_for_named_scenarios() {
        assert_eq!(solve_injection(1000, 3, 0.5).unwrap(), 572);
        assert_eq!(solve_injection(1000, 4, 0.15).unwrap(), 314);
        assert_eq!(solve_injection(1000, 5, 0.0).unwrap(), 200);
    }

    #[test]
    fn single_turn_needs_all_virgin() {
        for r in [0.0, 0.3, 1.0] {
            assert_eq!(solve_injection(777, 1, r).unwrap(), 777);
        }
        assert_eq!(solve_injection(777, 4, 1.0).unwrap(), 777);
    }

    #[test]
    fn scheme_totals() {
        let bad = scheme_emissions(&spec(3, 0.5)).unwrap();
        assert!((bad.total - 1139.914).abs() < 1e-3);
        assert!((bad.per_turn - 1.140).abs() < 1e-3);
        let avg = scheme_emissions(&spec(4, 0.15)).unwrap();
        assert!((avg.total - 901.894).abs() < 1e-3);
        let good = scheme_emissions(&spec(5, 0.0)).unwrap();
        assert!((good.total - 796.722).abs() < 1e-3);
        assert!((scheme_saving(&spec(5, 0.0)).unwrap() - 0.481).abs() < 1e-3);
        assert!((scheme_saving(&spec(3, 0.5)).unwrap() - 0.257).abs() < 1e-3);
    }

    #[test]
    fn all_virgin_scheme_saves_nothing() {
        assert_eq!(scheme_saving(&spec(1, 0.2)).unwrap(), 0.0);
    }

    #[test]
    fn turns_are_capped() {
        assert_eq!(solve_injection(10, MAX_TURNS + 1, 0.1), Err(BuybackError::TooManyTurns(MAX_TURNS + 1)));
        assert_eq!(solve_injection(10, MAX_TURNS, 0.0).unwrap(), 1);
    }

    #[test]
    fn zero_virgin_emission_saving_errors() {
        let s = SchemeSpec::new(10, 2, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(scheme_saving(&s), Err(BuybackError::Emission(_))));
    }

    #[test]
    fn cohort_rows() {
        let r = scheme_emissions(&spec(3, 0.5)).unwrap();
        let uses: Vec<f64> = r.cohort.iter().map(|c| c.uses).collect();
        assert_eq!(uses, vec![572.0, 286.0, 143.0]);
        assert_eq!(r.delivered, 1001.0);
    }

    #[test]
    fn parse_single_and_list() {
        let one = parse_schemes(crate::fixtures::SCHEME_BAD_JSON).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].uses, 1000);
        let many = parse_schemes(
            r#"{"schemes":[{"name":"a","uses":10,"turns":2,"rejection_rate":0.1,"e_virgin":1,"e_reman":0.5}]}"#,
        )
        .unwrap();
        assert_eq!(many[0].name.as_deref(), Some("a"));
        assert!(matches!(parse_schemes("{"), Err(BuybackError::Parse(_))));
        assert!(matches!(
            parse_schemes(r#"{"uses":0,"turns":2,"rejection_rate":0.1,"e_virgin":1,"e_reman":0.5}"#),
            Err(BuybackError::ZeroUses)
        ));
    }

    #[test]
    fn deterministic_fleet_has_zero_variance() {
        let s = SchemeSpec::new(1000, 5, 0.0, EV, ER).unwrap();
        let f = simulate_fleet(&s, 200, 7, 20).unwrap();
        assert_eq!(f.uses.mean, 1000.0);
        assert_eq!(f.uses.std_dev, 0.0);
        assert_eq!(f.uses.ci_low, f.uses.ci_high);
        assert!((f.emissions.mean - (200.0 * EV + 800.0 * ER)).abs() < 1e-9);
    }

    #[test]
    fn fleet_covers_analytic_mean() {
        let f = simulate_fleet(&spec(3, 0.5), 572, 42, 1000).unwrap();
        assert_eq!(f.expected_uses, 1001.0);
        assert!(f.uses.contains(1001.0), "{:?}", f.uses);
    }

    #[test]
    fn same_seed_same_summary() {
        let a = simulate_fleet(&spec(3, 0.5), 572, 9, 50).unwrap();
        let b = simulate_fleet(&spec(3, 0.5), 572, 9, 50).unwrap();
        assert_eq!(a, b);
        let c = simulate_fleet(&spec(3, 0.5), 572, 10, 50).unwrap();
        assert_ne!(a.uses.mean, c.uses.mean);
    }

    #[test]
    fn invalid_simulation_inputs() {
        assert_eq!(simulate_fleet(&spec(3, 0.5), 572, 1, 0), Err(BuybackError::ZeroReplications));
        assert!(matches!(
            emissions_for_injection(&spec(3, 0.5), 0),
            Err(BuybackError::InvalidInjection { .. })
        ));
    }

    proptest! {
        #[test]
        fn injection_monotone(u in 1u64..100_000, n in 1u32..8, r in 0.0f64..=1.0, dr in 0.0f64..0.2) {
            let c = solve_injection(u, n, r).unwrap();
            prop_assert!(solve_injection(u, n + 1, r).unwrap() <= c);
            let r2 = (r + dr).min(1.0);
            prop_assert!(solve_injection(u, n, r2).unwrap() >= c);
            prop_assert!(c <= u);
        }

        #[test]
        fn overshoot_bounded_by_one_lifetime(u in 1u64..100_000, n in 1u32..8, r in 0.0f64..=1.0) {
            let c = solve_injection(u, n, r).unwrap();
            let sigma = expected_lifetime_uses(n, r);
            let delivered = c as f64 * sigma;
            let tol = 1e-9 * u as f64;
            prop_assert!(delivered >= u as f64 - tol);
            prop_assert!(delivered < u as f64 + sigma + tol);
        }

        #[test]
        fn scheme_never_exceeds_all_virgin(n in 1u32..8, r in 0.0f64..=1.0, ev in 0.0f64..5.0, frac in 0.0f64..=1.0) {
            let s = SchemeSpec::new(1000, n, r, ev, ev * frac).unwrap();
            let res = scheme_emissions(&s).unwrap();
            prop_assert!(res.total <= 1000.0 * ev * (1.0 + 1e-12));
        }
    }
}
