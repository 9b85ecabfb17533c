use serde::{Deserialize, Serialize};

use crate::classifiers::ClassDistribution;
use crate::error::{Error, Result};

/// Relative resolution below which two class scores count as tied.
pub const TIE_RESOLUTION: f64 = 1e-12;

/// Argmax over two class scores; ties within [`TIE_RESOLUTION`] of the
/// larger score go to label 0.
pub fn argmax_scores(scores: [f64; 2]) -> u8 {
    let scale = scores[0].abs().max(scores[1].abs());
    u8::from(scores[1] - scores[0] > TIE_RESOLUTION * scale)
}

/// Class with the most votes; ties go to label 0.
pub fn plurality(votes: &[u8]) -> u8 {
    let ones = votes.iter().filter(|&&v| v == 1).count();
    u8::from(ones > votes.len() - ones)
}

/// Vote fractions as a distribution (uniform when there are no votes).
pub fn vote_distribution(votes: &[u8]) -> ClassDistribution {
    let ones = votes.iter().filter(|&&v| v == 1).count();
    ClassDistribution::from_scores((votes.len() - ones) as f64, ones as f64)
}

/// Averages member distributions and takes the argmax (ties to label 0).
pub fn vote_predict(dists: &[ClassDistribution]) -> u8 {
    crate::classifiers::average_distributions(dists).label()
}

/// Weighted plurality: the predicted class is
/// `argmax_c sum_k w_k * [P_k = c]` with ties going to label 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedVote {
    pub weights: Vec<f64>,
}

impl WeightedVote {
    /// Weights must be finite and non-negative.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::numeric(format!(
                "vote weight {w} is not a finite non-negative number"
            )));
        }
        Ok(WeightedVote { weights })
    }

    /// Per-class weight sums.
    pub fn scores(&self, votes: &[u8]) -> Result<[f64; 2]> {
        if votes.len() != self.weights.len() {
            return Err(Error::data(format!(
                "{} votes for {} weights",
                votes.len(),
                self.weights.len()
            )));
        }
        let mut s = [0.0; 2];
        for (&v, &w) in votes.iter().zip(&self.weights) {
            s[usize::from(v == 1)] += w;
        }
        Ok(s)
    }

    pub fn decide(&self, votes: &[u8]) -> Result<u8> {
        Ok(argmax_scores(self.scores(votes)?))
    }

    /// Normalized scores whose argmax agrees with [`WeightedVote::decide`].
    pub fn distribution(&self, votes: &[u8]) -> Result<ClassDistribution> {
        let s = self.scores(votes)?;
        Ok(scores_distribution(s))
    }
}

/// Normalized class scores, with near-ties pinned to an exact tie so the
/// distribution's argmax matches [`argmax_scores`].
pub(crate) fn scores_distribution(s: [f64; 2]) -> ClassDistribution {
    let d = ClassDistribution::from_scores(s[0], s[1]);
    if argmax_scores(s) != d.label() {
        ClassDistribution::UNIFORM
    } else {
        d
    }
}
