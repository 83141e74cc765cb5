//! Entropy-based uncertainty measures and their additive decomposition
//!
//! `total = aleatoric + epistemic`, where total is the entropy of the
//! predictive mean, aleatoric the expected entropy of `θ` under `Q`, and
//! epistemic the mutual information between outcome and `θ`.

use serde::{Deserialize, Serialize};

use crate::distributions::{Categorical, SecondOrder};
use crate::error::{Error, Result};
use crate::integrate::{expect, EngineConfig, EntropyIntegrand, ExpectationResult, Integrand};
use crate::scalar::{entropy_nats, Real};

/// Logarithm base of reported values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    #[default]
    Bits,
    Nats,
}

impl Unit {
    pub fn from_nats<T: Real>(self, nats: T) -> T {
        match self {
            Unit::Nats => nats,
            Unit::Bits => nats / T::LN_2(),
        }
    }

    /// `log K` in this unit.
    pub fn log_k<T: Real>(self, k: usize) -> T {
        self.from_nats(T::lit(k as f64).ln())
    }
}

/// Unit and normalization applied to reported values. Normalized values are
/// divided by `log K`, so their maximum is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scale {
    pub unit: Unit,
    pub normalized: bool,
}

impl Default for Scale {
    fn default() -> Self {
        Self {
            unit: Unit::Bits,
            normalized: true,
        }
    }
}

impl Scale {
    pub fn new(unit: Unit, normalized: bool) -> Self {
        Self { unit, normalized }
    }

    pub fn raw(unit: Unit) -> Self {
        Self::new(unit, false)
    }

    /// Factor that converts a value in nats for a `K`-outcome problem.
    pub fn factor<T: Real>(self, k: usize) -> T {
        if self.normalized {
            T::one() / T::lit(k as f64).ln()
        } else {
            self.unit.from_nats(T::one())
        }
    }

    /// Converts a result in nats with the same arithmetic as [`Scale::apply`].
    pub fn apply_result<T: Real>(self, r: ExpectationResult<T>, k: usize) -> ExpectationResult<T> {
        ExpectationResult {
            value: self.apply(r.value, k),
            error_bound: self.apply(r.error_bound, k),
            ..r
        }
    }

    pub fn apply<T: Real>(self, nats: T, k: usize) -> T {
        if self.normalized {
            nats / T::lit(k as f64).ln()
        } else {
            self.unit.from_nats(nats)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyTriple<T> {
    pub total: T,
    pub aleatoric: T,
    pub epistemic: T,
    pub unit: Unit,
    pub normalized: bool,
    /// Numerical error estimate carried by each entry.
    pub error_bound: T,
}

impl<T: Real> UncertaintyTriple<T> {
    /// `total − epistemic`: the aleatoric part implied by additivity.
    pub fn total_minus_epistemic(&self) -> T {
        self.total - self.epistemic
    }

    /// `|total − aleatoric − epistemic|`.
    pub fn identity_gap(&self) -> T {
        (self.total - self.aleatoric - self.epistemic).abs()
    }

    /// Largest identity gap tolerated for this triple.
    pub fn identity_tolerance(&self) -> T {
        (T::lit(2.0) * self.error_bound).max(T::lit(1e-9))
    }

    pub fn scale(&self) -> Scale {
        Scale::new(self.unit, self.normalized)
    }
}

/// Range of `H(θ)` over the support of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds<T> {
    pub lower: T,
    pub upper: T,
    pub unit: Unit,
    pub normalized: bool,
}

impl<T: Real> EntropyBounds<T> {
    pub fn contains(&self, x: T, slack: T) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }
}

/// How the epistemic term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpistemicMethod {
    /// Total minus aleatoric.
    #[default]
    Residual,
    /// `E_{θ∼Q}[KL(θ ‖ predictive mean)]` evaluated directly.
    ExpectedKl,
}

/// `−Σ θ_k log θ_k` with `0 · log 0 = 0`.
pub fn shannon_entropy<T: Real>(theta: &Categorical<T>, unit: Unit) -> T {
    unit.from_nats(entropy_nats(theta.probs()))
}

/// `KL(p ‖ q) = Σ p_k log(p_k / q_k)`; positive infinity when `p_k > 0`
/// where `q_k = 0`.
pub fn kl_divergence<T: Real>(p: &Categorical<T>, q: &Categorical<T>, unit: Unit) -> Result<T> {
    if p.k() != q.k() {
        return Err(Error::DimensionMismatch {
            expected: p.k(),
            found: q.k(),
        });
    }
    Ok(unit.from_nats(kl_nats(p.probs(), q.probs())))
}

pub(crate) fn kl_nats<T: Real>(p: &[T], q: &[T]) -> T {
    let mut sum = T::zero();
    for (&pk, &qk) in p.iter().zip(q) {
        if pk <= T::zero() {
            continue;
        }
        if qk <= T::zero() {
            return T::infinity();
        }
        sum = sum + pk * (pk / qk).ln();
    }
    sum
}

/// Entropy of the predictive mean. Always exact.
pub fn total_uncertainty<T: Real>(q: &SecondOrder<T>, scale: Scale) -> T {
    scale.apply(entropy_nats(q.predictive_mean().probs()), q.k())
}

/// Expected entropy `E_{θ∼Q}[H(θ)]`.
pub fn aleatoric_uncertainty<T: Real>(
    q: &SecondOrder<T>,
    scale: Scale,
    config: &EngineConfig,
) -> Result<ExpectationResult<T>> {
    let r = expect(q, &EntropyIntegrand, config)?;
    Ok(scale.apply_result(r, q.k()))
}

struct KlToMean<'a, T> {
    mean: &'a [T],
}

impl<T: Real> Integrand<T> for KlToMean<'_, T> {
    fn eval(&self, theta: &[T]) -> T {
        kl_nats(theta, self.mean)
    }
}

/// Mutual information between outcome and `θ`.
pub fn epistemic_mutual_information<T: Real>(
    q: &SecondOrder<T>,
    scale: Scale,
    method: EpistemicMethod,
    config: &EngineConfig,
) -> Result<ExpectationResult<T>> {
    match method {
        EpistemicMethod::Residual => {
            let total = total_uncertainty(q, scale);
            let aleatoric = aleatoric_uncertainty(q, scale, config)?;
            Ok(ExpectationResult {
                value: (total - aleatoric.value).max(T::zero()),
                ..aleatoric
            })
        }
        EpistemicMethod::ExpectedKl => {
            let mean = q.predictive_mean();
            let integrand = KlToMean { mean: mean.probs() };
            let r = expect(q, &integrand, config)?;
            Ok(scale.apply_result(r, q.k()))
        }
    }
}

/// Total, aleatoric and epistemic uncertainty of `Q`.
///
/// Epistemic is the residual `total − aleatoric`. With
/// `config.cross_check` set, the expected-KL form is evaluated as well and
/// a [`Error::ConsistencyFailure`] is raised if the two differ by more
/// than ten times their combined error bounds.
pub fn decompose<T: Real>(
    q: &SecondOrder<T>,
    scale: Scale,
    config: &EngineConfig,
) -> Result<UncertaintyTriple<T>> {
    let total = total_uncertainty(q, scale);
    let aleatoric = aleatoric_uncertainty(q, scale, config)?;
    let epistemic = (total - aleatoric.value).max(T::zero());

    if config.cross_check {
        let direct = epistemic_mutual_information(q, scale, EpistemicMethod::ExpectedKl, config)?;
        let allowed =
            (T::lit(10.0) * (aleatoric.error_bound + direct.error_bound)).max(T::lit(1e-9));
        if (epistemic - direct.value).abs() > allowed {
            return Err(Error::ConsistencyFailure {
                residual: epistemic.as_f64(),
                direct: direct.value.as_f64(),
                allowed: allowed.as_f64(),
            });
        }
    }

    Ok(UncertaintyTriple {
        total,
        aleatoric: aleatoric.value,
        epistemic,
        unit: scale.unit,
        normalized: scale.normalized,
        error_bound: aleatoric.error_bound,
    })
}

/// Minimum and maximum of `H(θ)` over the support of `Q`.
pub fn aleatoric_bounds<T: Real>(q: &SecondOrder<T>, scale: Scale) -> EntropyBounds<T> {
    let (lo, hi) = bounds_nats(q);
    let k = q.k();
    EntropyBounds {
        lower: scale.apply(lo, k),
        upper: scale.apply(hi, k),
        unit: scale.unit,
        normalized: scale.normalized,
    }
}

fn bounds_nats<T: Real>(q: &SecondOrder<T>) -> (T, T) {
    match q {
        SecondOrder::PointMass(c) => {
            let h = entropy_nats(c.probs());
            (h, h)
        }
        SecondOrder::Ensemble(e) => min_max(e.members().iter().map(|m| entropy_nats(m.probs()))),
        SecondOrder::IntervalUniform(u) => {
            let hb = |t: T| entropy_nats(&[t, T::one() - t]);
            let (a, b) = (hb(u.lo()), hb(u.hi()));
            let half = T::lit(0.5);
            let upper = if u.lo() <= half && half <= u.hi() {
                T::LN_2()
            } else {
                a.max(b)
            };
            (a.min(b), upper)
        }
        SecondOrder::Dirichlet(d) => (T::zero(), T::lit(d.k() as f64).ln()),
        SecondOrder::Mixture(m) => {
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            for c in m.components() {
                let (l, h) = bounds_nats(c);
                lo = lo.min(l);
                hi = hi.max(h);
            }
            (lo, hi)
        }
    }
}

fn min_max<T: Real>(xs: impl Iterator<Item = T>) -> (T, T) {
    xs.fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}
