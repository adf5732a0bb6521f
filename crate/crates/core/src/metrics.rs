//! Burdened metrics over a device's turns.
//!
//! A device with `N` turns is used once as a virgin device and `N − 1` times
//! after remanufacturing. Its whole-life emission is
//! `E_virgin + (N − 1)·E_reman`, and the per-turn figure divides that by `N`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("number of turns must be at least 1")]
    ZeroTurns,
    #[error("{name} emission must be finite and non-negative, got {value}")]
    InvalidEmission { name: &'static str, value: f64 },
    #[error("virgin emission is zero; savings are undefined")]
    ZeroVirginEmission,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurnProfile {
    e_virgin: f64,
    e_reman: f64,
    turns: u32,
}

impl TurnProfile {
    pub fn new(e_virgin: f64, e_reman: f64, turns: u32) -> Result<Self, MetricsError> {
        check_emission("virgin", e_virgin)?;
        check_emission("remanufactured", e_reman)?;
        if turns == 0 {
            return Err(MetricsError::ZeroTurns);
        }
        Ok(Self {
            e_virgin,
            e_reman,
            turns,
        })
    }

    pub fn e_virgin(&self) -> f64 {
        self.e_virgin
    }

    pub fn e_reman(&self) -> f64 {
        self.e_reman
    }

    pub fn turns(&self) -> u32 {
        self.turns
    }

    pub fn with_turns(&self, turns: u32) -> Result<Self, MetricsError> {
        Self::new(self.e_virgin, self.e_reman, turns)
    }
}

pub(crate) fn check_emission(name: &'static str, value: f64) -> Result<(), MetricsError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(MetricsError::InvalidEmission { name, value })
    }
}

/// Burdened whole-life emission.
pub fn per_life(p: &TurnProfile) -> f64 {
    p.e_virgin + f64::from(p.turns - 1) * p.e_reman
}

/// Burdened emission per use.
pub fn per_turn(p: &TurnProfile) -> f64 {
    per_life(p) / f64::from(p.turns)
}

/// Fractional saving against using `N` virgin devices.
pub fn life_saving(p: &TurnProfile) -> Result<f64, MetricsError> {
    if p.e_virgin == 0.0 {
        return Err(MetricsError::ZeroVirginEmission);
    }
    Ok(1.0 - per_life(p) / (f64::from(p.turns) * p.e_virgin))
}
