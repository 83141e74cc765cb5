//! Level-1 (categorical) and level-2 (second-order) distributions.
//!
//! A [`Categorical`] is a point on the probability simplex. A
//! [`SecondOrder`] distribution is a probability measure over such points.
//! All values are validated on construction and immutable afterwards.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Maximum nesting depth accepted for mixtures in a raw [`DistributionSpec`].
pub const MAX_MIXTURE_DEPTH: usize = 8;

/// A categorical distribution over `K >= 2` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical<T> {
    probs: Vec<T>,
}

impl<T: Real> Categorical<T> {
    /// Validates `probs`, renormalizing when the sum is off by no more than
    /// [`Real::RENORM_TOLERANCE`].
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewOutcomes(probs.len()));
        }
        let sum = check_weights(&probs, |index, value| Error::NegativeProbability {
            index,
            value,
        })?;
        let mut probs = probs;
        renormalize(&mut probs, sum)?;
        Ok(Self { probs })
    }

    pub fn from_f64(probs: &[f64]) -> Result<Self> {
        Self::new(probs.iter().map(|&p| T::lit(p)).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewOutcomes(k));
        }
        let p = T::one() / T::lit(k as f64);
        Ok(Self { probs: vec![p; k] })
    }

    /// Binary distribution `(p, 1 - p)`.
    pub fn bernoulli(p: T) -> Result<Self> {
        Self::new(vec![p, T::one() - p])
    }

    /// Builds from a vector already known to lie on the simplex.
    pub(crate) fn from_simplex_unchecked(probs: Vec<T>) -> Self {
        debug_assert!(probs.len() >= 2);
        Self { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.probs
    }
}

/// Dirichlet distribution with strictly positive concentration parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet<T> {
    alpha: Vec<T>,
    gammas: Vec<Gamma<f64>>,
}

impl<T: Real> Dirichlet<T> {
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::TooFewOutcomes(alpha.len()));
        }
        for (index, &a) in alpha.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if a <= T::zero() {
                return Err(Error::NonPositiveConcentration {
                    index,
                    value: a.as_f64(),
                });
            }
        }
        let gammas = alpha
            .iter()
            .map(|a| Gamma::new(a.as_f64(), 1.0).expect("shape checked positive"))
            .collect();
        Ok(Self { alpha, gammas })
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Total concentration `α₀ = Σ α_k`.
    pub fn concentration(&self) -> T {
        self.alpha.iter().copied().sum()
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn mean(&self) -> Categorical<T> {
        let total = self.concentration();
        Categorical::from_simplex_unchecked(self.alpha.iter().map(|&a| a / total).collect())
    }

    fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<T>) {
        loop {
            out.clear();
            let mut sum = 0.0;
            for g in &self.gammas {
                let x = g.sample(rng);
                sum += x;
                out.push(T::lit(x));
            }
            // All draws underflowing is possible only for tiny concentrations.
            if sum > 0.0 && sum.is_finite() {
                let sum = T::lit(sum);
                for x in out.iter_mut() {
                    *x = *x / sum;
                }
                return;
            }
        }
    }
}

/// Uniform distribution over binary categoricals `(θ₁, 1 - θ₁)` with
/// `θ₁ ∈ [lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUniform<T> {
    lo: T,
    hi: T,
}

impl<T: Real> IntervalUniform<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        let ok = lo.is_finite() && hi.is_finite() && T::zero() <= lo && lo <= hi && hi <= T::one();
        if !ok {
            return Err(Error::InvalidInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mean(&self) -> Categorical<T> {
        let m = (self.lo + self.hi) / T::lit(2.0);
        Categorical::from_simplex_unchecked(vec![m, T::one() - m])
    }
}

/// Finite mixture. Nested mixtures are flattened on construction, so the
/// components of a built mixture are never mixtures themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<T> {
    weights: Vec<T>,
    components: Vec<SecondOrder<T>>,
}

impl<T: Real> Mixture<T> {
    pub fn new(weights: Vec<T>, components: Vec<SecondOrder<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        if weights.len() != components.len() {
            return Err(Error::WeightCountMismatch {
                weights: weights.len(),
                components: components.len(),
            });
        }
        for (index, &w) in weights.iter().enumerate() {
            if w.is_finite() && w <= T::zero() {
                return Err(Error::NonPositiveWeight {
                    index,
                    value: w.as_f64(),
                });
            }
        }
        let sum = check_weights(&weights, |index, value| Error::NonPositiveWeight {
            index,
            value,
        })?;
        let mut weights = weights;
        renormalize(&mut weights, sum)?;

        let k = components[0].k();
        if let Some(c) = components.iter().find(|c| c.k() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: c.k(),
            });
        }

        let mut flat_weights = Vec::with_capacity(weights.len());
        let mut flat_components = Vec::with_capacity(components.len());
        for (w, c) in weights.into_iter().zip(components) {
            match c {
                SecondOrder::Mixture(inner) => {
                    for (iw, ic) in inner.weights.into_iter().zip(inner.components) {
                        flat_weights.push(w * iw);
                        flat_components.push(ic);
                    }
                }
                other => {
                    flat_weights.push(w);
                    flat_components.push(other);
                }
            }
        }
        Ok(Self {
            weights: flat_weights,
            components: flat_components,
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn components(&self) -> &[SecondOrder<T>] {
        &self.components
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &SecondOrder<T>)> {
        self.weights.iter().copied().zip(self.components.iter())
    }

    pub fn k(&self) -> usize {
        self.components[0].k()
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> &SecondOrder<T> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (w, c) in self.iter() {
            acc += w.as_f64();
            if u < acc {
                return c;
            }
        }
        self.components.last().expect("non-empty mixture")
    }
}

/// Empirical distribution placing mass `1/M` on each member.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    members: Vec<Categorical<T>>,
}

impl<T: Real> Ensemble<T> {
    pub fn new(members: Vec<Categorical<T>>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyEnsemble)?;
        let k = first.k();
        if let Some(m) = members.iter().find(|m| m.k() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: m.k(),
            });
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Categorical<T>] {
        &self.members
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

    pub fn mean(&self) -> Categorical<T> {
        let m = T::lit(self.members.len() as f64);
        let mut acc = vec![T::zero(); self.k()];
        for member in &self.members {
            for (a, &p) in acc.iter_mut().zip(member.probs()) {
                *a = *a + p;
            }
        }
        Categorical::from_simplex_unchecked(acc.into_iter().map(|a| a / m).collect())
    }
}

/// A second-order (level-2) distribution: a probability measure on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub enum SecondOrder<T> {
    PointMass(Categorical<T>),
    Dirichlet(Dirichlet<T>),
    IntervalUniform(IntervalUniform<T>),
    Mixture(Mixture<T>),
    Ensemble(Ensemble<T>),
}

impl<T: Real> SecondOrder<T> {
    pub fn point(probs: &[f64]) -> Result<Self> {
        Categorical::from_f64(probs).map(Self::PointMass)
    }

    pub fn dirichlet(alpha: &[f64]) -> Result<Self> {
        Dirichlet::new(alpha.iter().map(|&a| T::lit(a)).collect()).map(Self::Dirichlet)
    }

    pub fn interval_uniform(lo: f64, hi: f64) -> Result<Self> {
        IntervalUniform::new(T::lit(lo), T::lit(hi)).map(Self::IntervalUniform)
    }

    pub fn mixture(weights: &[f64], components: Vec<SecondOrder<T>>) -> Result<Self> {
        Mixture::new(weights.iter().map(|&w| T::lit(w)).collect(), components).map(Self::Mixture)
    }

    pub fn ensemble(members: &[Vec<f64>]) -> Result<Self> {
        let members = members
            .iter()
            .map(|m| Categorical::from_f64(m))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(members).map(Self::Ensemble)
    }

    /// Number of outcomes `K` of the level-1 distributions.
    pub fn k(&self) -> usize {
        match self {
            Self::PointMass(c) => c.k(),
            Self::Dirichlet(d) => d.k(),
            Self::IntervalUniform(_) => 2,
            Self::Mixture(m) => m.k(),
            Self::Ensemble(e) => e.k(),
        }
    }

    /// True when the measure has finite support (point masses, ensembles and
    /// mixtures of those), so expectations are finite sums.
    pub fn is_discrete(&self) -> bool {
        match self {
            Self::PointMass(_) | Self::Ensemble(_) => true,
            Self::IntervalUniform(u) => u.width() == T::zero(),
            Self::Dirichlet(_) => false,
            Self::Mixture(m) => m.components().iter().all(|c| c.is_discrete()),
        }
    }

    /// Mean of `θ` under this measure, computed exactly from the parameters.
    pub fn predictive_mean(&self) -> Categorical<T> {
        match self {
            Self::PointMass(c) => c.clone(),
            Self::Dirichlet(d) => d.mean(),
            Self::IntervalUniform(u) => u.mean(),
            Self::Ensemble(e) => e.mean(),
            Self::Mixture(m) => {
                let mut acc = vec![T::zero(); m.k()];
                for (w, c) in m.iter() {
                    for (a, &p) in acc.iter_mut().zip(c.predictive_mean().probs()) {
                        *a = *a + w * p;
                    }
                }
                Categorical::from_simplex_unchecked(acc)
            }
        }
    }

    /// Draws `n` independent level-1 distributions.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Categorical<T>> {
        let mut buf = Vec::with_capacity(self.k());
        (0..n)
            .map(|_| {
                self.draw_into(rng, &mut buf);
                Categorical::from_simplex_unchecked(buf.clone())
            })
            .collect()
    }

    /// Writes one draw into `out`, reusing its allocation.
    pub(crate) fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<T>) {
        match self {
            Self::PointMass(c) => {
                out.clear();
                out.extend_from_slice(c.probs());
            }
            Self::Dirichlet(d) => d.draw_into(rng, out),
            Self::IntervalUniform(u) => {
                let x: f64 = rng.random();
                let t = u.lo() + u.width() * T::lit(x);
                out.clear();
                out.push(t);
                out.push(T::one() - t);
            }
            Self::Ensemble(e) => {
                let i = rng.random_range(0..e.len());
                out.clear();
                out.extend_from_slice(e.members()[i].probs());
            }
            Self::Mixture(m) => m.pick(rng).draw_into(rng, out),
        }
    }

    /// Validates a raw description into a distribution.
    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        let depth = spec.mixture_depth();
        if depth > MAX_MIXTURE_DEPTH {
            return Err(Error::NestingTooDeep {
                depth,
                limit: MAX_MIXTURE_DEPTH,
            });
        }
        Self::from_spec_unchecked_depth(spec)
    }

    fn from_spec_unchecked_depth(spec: &DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::Point { theta } => Self::point(theta),
            DistributionSpec::Dirichlet { alpha } => Self::dirichlet(alpha),
            DistributionSpec::IntervalUniform { lo, hi } => Self::interval_uniform(*lo, *hi),
            DistributionSpec::Ensemble { members } => Self::ensemble(members),
            DistributionSpec::Mixture {
                weights,
                components,
            } => {
                let components = components
                    .iter()
                    .map(Self::from_spec_unchecked_depth)
                    .collect::<Result<Vec<_>>>()?;
                Self::mixture(weights, components)
            }
        }
    }

    /// Raw description of this (already flattened) distribution.
    pub fn to_spec(&self) -> DistributionSpec {
        let v = |xs: &[T]| xs.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        match self {
            Self::PointMass(c) => DistributionSpec::Point {
                theta: v(c.probs()),
            },
            Self::Dirichlet(d) => DistributionSpec::Dirichlet {
                alpha: v(d.alpha()),
            },
            Self::IntervalUniform(u) => DistributionSpec::IntervalUniform {
                lo: u.lo().as_f64(),
                hi: u.hi().as_f64(),
            },
            Self::Ensemble(e) => DistributionSpec::Ensemble {
                members: e.members().iter().map(|m| v(m.probs())).collect(),
            },
            Self::Mixture(m) => DistributionSpec::Mixture {
                weights: v(m.weights()),
                components: m.components().iter().map(|c| c.to_spec()).collect(),
            },
        }
    }
}

/// Validates a raw description into a distribution.
pub fn validate<T: Real>(spec: &DistributionSpec) -> Result<SecondOrder<T>> {
    SecondOrder::from_spec(spec)
}

/// JSON wire format for second-order distributions, e.g.
/// `{"kind":"dirichlet","alpha":[2,2]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Point {
        theta: Vec<f64>,
    },
    Dirichlet {
        alpha: Vec<f64>,
    },
    IntervalUniform {
        lo: f64,
        hi: f64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<DistributionSpec>,
    },
    Ensemble {
        members: Vec<Vec<f64>>,
    },
}

impl DistributionSpec {
    /// Number of nested mixture levels; 0 for non-mixtures.
    pub fn mixture_depth(&self) -> usize {
        match self {
            Self::Mixture { components, .. } => {
                1 + components
                    .iter()
                    .map(Self::mixture_depth)
                    .max()
                    .unwrap_or(0)
            }
            _ => 0,
        }
    }
}

/// Checks entries are finite and non-negative, returning their sum.
fn check_weights<T: Real>(xs: &[T], negative: impl Fn(usize, f64) -> Error) -> Result<T> {
    let mut sum = T::zero();
    for (index, &x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if x < T::zero() {
            return Err(negative(index, x.as_f64()));
        }
        sum = sum + x;
    }
    Ok(sum)
}

fn renormalize<T: Real>(xs: &mut [T], sum: T) -> Result<()> {
    if (sum - T::one()).abs() > T::lit(T::RENORM_TOLERANCE) {
        return Err(Error::SumNotOne { sum: sum.as_f64() });
    }
    // Drift at rounding level is left alone so validation is idempotent.
    let rounding = T::epsilon() * T::lit(xs.len() as f64);
    if (sum - T::one()).abs() > rounding {
        for x in xs.iter_mut() {
            *x = *x / sum;
        }
    }
    Ok(())
}
