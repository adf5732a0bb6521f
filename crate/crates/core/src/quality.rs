//! Qualitative data-quality appraisal of inventory flows.
//!
//! Each flow is rated on five dimensions (technology, age, geography,
//! completeness, reliability). The overall score is the worst of the five.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Ordered so that `Poor < Fair < Good < VeryGood`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rating {
    Poor,
    Fair,
    Good,
    VeryGood,
}

impl Rating {
    pub fn label(self) -> &'static str {
        match self {
            Rating::Poor => "poor",
            Rating::Fair => "fair",
            Rating::Good => "good",
            Rating::VeryGood => "very-good",
        }
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The five rated dimensions, as they appear in input documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityDimensions {
    pub technology: Rating,
    pub age: Rating,
    pub geography: Rating,
    pub completeness: Rating,
    pub reliability: Rating,
}

impl QualityDimensions {
    pub fn uniform(rating: Rating) -> Self {
        Self {
            technology: rating,
            age: rating,
            geography: rating,
            completeness: rating,
            reliability: rating,
        }
    }

    fn iter(&self) -> impl Iterator<Item = Rating> {
        [
            self.technology,
            self.age,
            self.geography,
            self.completeness,
            self.reliability,
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QualityScore {
    pub dimensions: QualityDimensions,
    pub overall: Rating,
}

pub fn score_quality(dims: QualityDimensions) -> QualityScore {
    let overall = dims.iter().min().expect("five dimensions");
    QualityScore {
        dimensions: dims,
        overall,
    }
}

impl QualityScore {
    pub fn rescore(&self) -> QualityScore {
        score_quality(self.dimensions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rating() -> impl Strategy<Value = Rating> {
        prop_oneof![
            Just(Rating::Poor),
            Just(Rating::Fair),
            Just(Rating::Good),
            Just(Rating::VeryGood)
        ]
    }

    #[test]
    fn all_very_good() {
        let s = score_quality(QualityDimensions::uniform(Rating::VeryGood));
        assert_eq!(s.overall, Rating::VeryGood);
    }

    #[test]
    fn worst_dimension_wins() {
        let s = score_quality(QualityDimensions {
            technology: Rating::Good,
            age: Rating::Good,
            geography: Rating::Fair,
            completeness: Rating::Good,
            reliability: Rating::Good,
        });
        assert_eq!(s.overall, Rating::Fair);
    }

    #[test]
    fn parses_kebab_case() {
        let r: Rating = serde_json::from_str("\"very-good\"").unwrap();
        assert_eq!(r, Rating::VeryGood);
        assert!(serde_json::from_str::<Rating>("\"excellent\"").is_err());
    }

    proptest! {
        #[test]
        fn overall_is_min_and_idempotent(a in rating(), b in rating(), c in rating(), d in rating(), e in rating()) {
            let dims = QualityDimensions { technology: a, age: b, geography: c, completeness: d, reliability: e };
            let s = score_quality(dims);
            let min = [a, b, c, d, e].into_iter().min().unwrap();
            prop_assert_eq!(s.overall, min);
            prop_assert_eq!(s.rescore(), s);
        }
    }
}
