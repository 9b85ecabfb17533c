use serde::{Deserialize, Serialize};

use super::samples::{majority, Samples};
use super::ClassDistribution;

/// Predicts the training majority; the distribution is the empirical class
/// frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroR {
    pub label: u8,
    pub frequencies: ClassDistribution,
}

impl ZeroR {
    pub(crate) fn fit(s: &Samples) -> Self {
        let c = s.all_counts();
        ZeroR {
            label: majority(c),
            frequencies: ClassDistribution::from_scores(c[0], c[1]),
        }
    }

    pub(crate) fn dist(&self) -> ClassDistribution {
        self.frequencies
    }
}
