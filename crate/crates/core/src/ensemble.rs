//! Finite-ensemble estimators: averaged member entropy and Jensen–Shannon
//! divergence.

use thiserror::Error;

use crate::distributions::{Categorical, SecondOrder};
use crate::error::{Error, Result};
use crate::measures::{kl_nats, Scale, UncertaintyTriple, Unit};
use crate::scalar::{entropy_nats, Real};

/// Predictions of `M` ensemble members with optional weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePrediction<T> {
    members: Vec<Categorical<T>>,
    weights: Vec<T>,
}

impl<T: Real> EnsemblePrediction<T> {
    /// Uniformly weighted ensemble.
    pub fn new(members: Vec<Categorical<T>>) -> Result<Self> {
        check_members(&members)?;
        let w = T::one() / T::lit(members.len() as f64);
        let weights = vec![w; members.len()];
        Ok(Self { members, weights })
    }

    pub fn with_weights(members: Vec<Categorical<T>>, weights: Vec<T>) -> Result<Self> {
        check_members(&members)?;
        if weights.len() != members.len() {
            return Err(Error::WeightCountMismatch {
                weights: weights.len(),
                components: members.len(),
            });
        }
        let mut sum = T::zero();
        for (index, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::NonPositiveWeight {
                    index,
                    value: w.as_f64(),
                });
            }
            sum = sum + w;
        }
        if (sum - T::one()).abs() > T::lit(T::RENORM_TOLERANCE) {
            return Err(Error::SumNotOne { sum: sum.as_f64() });
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self { members, weights })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let members = rows
            .iter()
            .map(|r| Categorical::from_f64(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[Categorical<T>] {
        &self.members
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn k(&self) -> usize {
        self.members[0].k()
    }

    /// Weighted mean of the members.
    pub fn mean(&self) -> Vec<T> {
        let mut acc = vec![T::zero(); self.k()];
        for (w, m) in self.weights.iter().zip(&self.members) {
            for (a, &p) in acc.iter_mut().zip(m.probs()) {
                *a = *a + *w * p;
            }
        }
        acc
    }

    /// The equivalent level-2 distribution: an empirical ensemble for
    /// uniform weights, otherwise a mixture of point masses.
    pub fn to_second_order(&self) -> Result<SecondOrder<T>> {
        let uniform = self.weights.windows(2).all(|w| w[0] == w[1]);
        if uniform {
            crate::distributions::Ensemble::new(self.members.clone()).map(SecondOrder::Ensemble)
        } else {
            let comps = self
                .members
                .iter()
                .cloned()
                .map(SecondOrder::PointMass)
                .collect();
            crate::distributions::Mixture::new(self.weights.clone(), comps)
                .map(SecondOrder::Mixture)
        }
    }

    fn mean_member_entropy_nats(&self) -> T {
        self.weights
            .iter()
            .zip(&self.members)
            .map(|(&w, m)| w * entropy_nats(m.probs()))
            .sum()
    }
}

fn check_members<T: Real>(members: &[Categorical<T>]) -> Result<()> {
    let first = members.first().ok_or(Error::EmptyEnsemble)?;
    if let Some(m) = members.iter().find(|m| m.k() != first.k()) {
        return Err(Error::DimensionMismatch {
            expected: first.k(),
            found: m.k(),
        });
    }
    Ok(())
}

/// Weighted Jensen–Shannon divergence `Σ_i w_i KL(θ⁽ⁱ⁾ ‖ Σ_j w_j θ⁽ʲ⁾)`.
pub fn js_divergence<T: Real>(e: &EnsemblePrediction<T>, unit: Unit) -> T {
    unit.from_nats(js_nats(e))
}

fn js_nats<T: Real>(e: &EnsemblePrediction<T>) -> T {
    let mean = e.mean();
    let sum: T = e
        .weights
        .iter()
        .zip(&e.members)
        .map(|(&w, m)| w * kl_nats(m.probs(), &mean))
        .sum();
    sum.max(T::zero())
}

/// Entropy of the mean, mean member entropy, and Jensen–Shannon divergence.
/// All terms are finite sums, so `error_bound` is 0.
pub fn ensemble_decompose<T: Real>(
    e: &EnsemblePrediction<T>,
    scale: Scale,
) -> UncertaintyTriple<T> {
    let k = e.k();
    let mean = e.mean();
    let total = entropy_nats(&mean);
    UncertaintyTriple {
        total: scale.apply(total, k),
        aleatoric: scale.apply(e.mean_member_entropy_nats(), k),
        epistemic: scale.apply(js_nats(e), k),
        unit: scale.unit,
        normalized: scale.normalized,
        error_bound: T::zero(),
    }
}

/// Failure to read a plain-text prediction matrix. Line numbers are 1-based
/// and count every physical line, comments included.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: Error },
    #[error("no prediction rows found")]
    Empty,
}

impl MatrixError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Parse { line, .. } | Self::Invalid { line, .. } => Some(*line),
            Self::Empty => None,
        }
    }
}

/// Parses one member per line, whitespace-separated probabilities, with
/// `#` starting a comment and blank lines ignored.
pub fn parse_matrix<T: Real>(text: &str) -> Result<EnsemblePrediction<T>, MatrixError> {
    let mut members: Vec<Categorical<T>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| MatrixError::Parse {
                    line,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let member =
            Categorical::from_f64(&row).map_err(|source| MatrixError::Invalid { line, source })?;
        if let Some(first) = members.first() {
            if first.k() != member.k() {
                return Err(MatrixError::Invalid {
                    line,
                    source: Error::DimensionMismatch {
                        expected: first.k(),
                        found: member.k(),
                    },
                });
            }
        }
        members.push(member);
    }
    if members.is_empty() {
        return Err(MatrixError::Empty);
    }
    EnsemblePrediction::new(members).map_err(|source| MatrixError::Invalid { line: 0, source })
}
