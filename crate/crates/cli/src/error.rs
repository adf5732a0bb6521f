use std::fmt;

use remanlca_core::buyback::BuybackError;
use remanlca_core::categories::CategoryError;
use remanlca_core::engine::EngineError;
use remanlca_core::factors::FactorError;
use remanlca_core::metrics::MetricsError;
use remanlca_core::model::ModelError;
use remanlca_core::report::ReportError;
use remanlca_core::scenario::ScenarioError;

/// Command failure, carrying the process exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Inputs parsed but break a rule (exit 1).
    Validation(String),
    /// Missing file or malformed input (exit 2).
    Input(String),
    /// Evaluation failed (exit 3).
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Input(_) => 2,
            CliError::Computation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Input(m) => write!(f, "bad input: {m}"),
            CliError::Computation(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(_) => CliError::Input(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::Parse(_) => CliError::Input(e.to_string()),
            FactorError::Unresolved { .. } => CliError::Computation(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CategoryError> for CliError {
    fn from(e: CategoryError) -> Self {
        match e {
            CategoryError::Parse(_) => CliError::Input(e.to_string()),
            CategoryError::Unmapped { .. } => CliError::Computation(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Parse(_) | ScenarioError::UnknownLocation(_) => CliError::Input(e.to_string()),
            ScenarioError::Model(m) => m.into(),
            ScenarioError::Engine(_)
            | ScenarioError::Metrics(_)
            | ScenarioError::MissingFactor { .. }
            | ScenarioError::NoIncinerationFlow(_)
            | ScenarioError::AmbiguousIncineration(_) => CliError::Computation(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BuybackError> for CliError {
    fn from(e: BuybackError) -> Self {
        match e {
            BuybackError::Parse(_) => CliError::Input(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Computation(e.to_string())
    }
}
