//! Physical units and non-negative quantities for inventory flows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantityError {
    #[error("magnitude must be a finite non-negative number, got {0}")]
    Negative(f64),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
}

/// Denominator unit of a flow quantity or an emission factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Unit {
    /// kg
    Mass,
    /// kWh
    Energy,
    /// kg·km, the resolved product of a transported mass and a distance.
    MassDistance,
    /// item
    Count,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Mass => "kg",
            Unit::Energy => "kWh",
            Unit::MassDistance => "kg*km",
            Unit::Count => "item",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = QuantityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "kg" => Ok(Unit::Mass),
            "kWh" | "kwh" => Ok(Unit::Energy),
            "kg*km" | "kg·km" | "kgkm" | "kg km" => Ok(Unit::MassDistance),
            "item" | "items" | "count" => Ok(Unit::Count),
            other => Err(QuantityError::UnknownUnit(other.to_string())),
        }
    }
}

impl TryFrom<String> for Unit {
    type Error = QuantityError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Unit> for String {
    fn from(unit: Unit) -> Self {
        unit.symbol().to_string()
    }
}

/// A non-negative magnitude tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    magnitude: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(magnitude: f64, unit: Unit) -> Result<Self, QuantityError> {
        if !magnitude.is_finite() || magnitude < 0.0 {
            return Err(QuantityError::Negative(magnitude));
        }
        // normalise -0.0
        Ok(Self { magnitude: magnitude + 0.0, unit })
    }

    pub fn mass(kg: f64) -> Result<Self, QuantityError> {
        Self::new(kg, Unit::Mass)
    }

    pub fn energy(kwh: f64) -> Result<Self, QuantityError> {
        Self::new(kwh, Unit::Energy)
    }

    /// Transport work: both factors must be non-negative, the product is stored.
    pub fn mass_distance(mass_kg: f64, distance_km: f64) -> Result<Self, QuantityError> {
        if !mass_kg.is_finite() || mass_kg < 0.0 {
            return Err(QuantityError::Negative(mass_kg));
        }
        if !distance_km.is_finite() || distance_km < 0.0 {
            return Err(QuantityError::Negative(distance_km));
        }
        Self::new(mass_kg * distance_km, Unit::MassDistance)
    }

    pub fn count(items: f64) -> Result<Self, QuantityError> {
        Self::new(items, Unit::Count)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Same unit, magnitude multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self, QuantityError> {
        Self::new(self.magnitude * k, self.unit)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_unit_symbols() {
        assert_eq!("kg".parse::<Unit>().unwrap(), Unit::Mass);
        assert_eq!("kWh".parse::<Unit>().unwrap(), Unit::Energy);
        assert_eq!("kg·km".parse::<Unit>().unwrap(), Unit::MassDistance);
        assert_eq!("kg*km".parse::<Unit>().unwrap(), Unit::MassDistance);
        assert!(matches!("t".parse::<Unit>(), Err(QuantityError::UnknownUnit(_))));
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(Quantity::mass(-1e-9).is_err());
        assert!(Quantity::energy(f64::NAN).is_err());
        assert!(Quantity::mass_distance(0.1189, -1.0).is_err());
        assert!(Quantity::mass_distance(-0.1189, -1.0).is_err());
    }

    #[test]
    fn mass_distance_stores_product() {
        let q = Quantity::mass_distance(0.1189, 18760.0).unwrap();
        assert_eq!(q.unit(), Unit::MassDistance);
        assert!((q.magnitude() - 2230.564).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn constructed_quantities_are_non_negative(x in -1e6f64..1e6, k in 0.0f64..1e3) {
            match Quantity::mass(x) {
                Ok(q) => {
                    prop_assert!(q.magnitude() >= 0.0);
                    prop_assert!(q.scaled(k).unwrap().magnitude() >= 0.0);
                }
                Err(_) => prop_assert!(x < 0.0),
            }
        }
    }
}
