//! Expectations `E_{θ∼Q}[f(θ)]` over second-order distributions.
//!
//! Four engines are available and [`expect`] picks one per distribution:
//!
//! | distribution            | engine                                   |
//! |-------------------------|------------------------------------------|
//! | point mass, ensemble    | exact finite sum                         |
//! | Dirichlet               | closed form if the integrand has one, else Monte Carlo |
//! | interval uniform        | adaptive Simpson quadrature              |
//! | mixture                 | linear split over components             |
//!
//! Monte Carlo draws come from `ChaCha8Rng`. A run of `n` samples with seed
//! `s` is cut into chunks of [`MC_CHUNK`] samples; chunk `i` uses the
//! generator seeded with [`derive_seed`]`(s, i)`. Chunks may be evaluated
//! in parallel and are always combined in chunk order, so results are
//! bit-identical for a fixed seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::SecondOrder;
use crate::error::{Error, Result};
use crate::measures::Unit;
use crate::scalar::{entropy_nats, Real};
use crate::special::digamma;

/// Samples per Monte Carlo chunk.
pub const MC_CHUNK: usize = 8192;

/// Maximum bisection depth of the adaptive quadrature.
pub const MAX_QUADRATURE_DEPTH: u32 = 60;

// Forced bisections before the convergence test is trusted.
const MIN_QUADRATURE_DEPTH: u32 = 3;

/// How an expectation was evaluated. Ordered from most to least precise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationResult<T> {
    pub value: T,
    /// Absolute error estimate; 0 for exact and closed-form results.
    pub error_bound: T,
    pub method: Method,
    /// Number of integrand evaluations (or samples).
    pub evaluations: usize,
}

impl<T: Real> ExpectationResult<T> {
    pub fn exact(value: T, evaluations: usize) -> Self {
        Self {
            value,
            error_bound: T::zero(),
            method: Method::Exact,
            evaluations,
        }
    }

    pub fn closed_form(value: T) -> Self {
        Self {
            value,
            error_bound: T::zero(),
            method: Method::ClosedForm,
            evaluations: 0,
        }
    }

    /// Multiplies value and error bound by a non-negative factor.
    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error_bound: self.error_bound * factor.abs(),
            ..self
        }
    }
}

/// Engine settings shared by every expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Absolute tolerance for quadrature, in nats.
    pub tolerance: f64,
    /// Evaluation budget for one quadrature call.
    pub max_evals: usize,
    /// Samples per Monte Carlo estimate.
    pub mc_samples: usize,
    pub seed: u64,
    /// Whether `decompose` also evaluates the expected-KL form of the
    /// mutual information and checks it against the residual.
    pub cross_check: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_evals: 2_000_000,
            mc_samples: 100_000,
            seed: 0,
            cross_check: true,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.mc_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "mc_samples must be at least 2, got {}",
                self.mc_samples
            )));
        }
        if self.max_evals < 5 {
            return Err(Error::InvalidArgument(
                "max_evals must be at least 5".into(),
            ));
        }
        Ok(())
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

/// A function of a level-1 distribution to be averaged over `Q`.
///
/// Any `Fn(&[T]) -> T` is an integrand. Types may additionally supply a
/// closed form of the expectation under a Dirichlet.
pub trait Integrand<T: Real>: Sync {
    fn eval(&self, theta: &[T]) -> T;

    fn dirichlet_closed_form(&self, _alpha: &[T]) -> Option<T> {
        None
    }
}

impl<T: Real, F: Fn(&[T]) -> T + Sync> Integrand<T> for F {
    fn eval(&self, theta: &[T]) -> T {
        self(theta)
    }
}

/// Shannon entropy of `θ` in nats.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyIntegrand;

impl<T: Real> Integrand<T> for EntropyIntegrand {
    fn eval(&self, theta: &[T]) -> T {
        entropy_nats(theta)
    }

    fn dirichlet_closed_form(&self, alpha: &[T]) -> Option<T> {
        Some(dirichlet_expected_entropy_nats(alpha))
    }
}

/// Evaluates `E_{θ∼Q}[f(θ)]`.
pub fn expect<T: Real, F: Integrand<T> + ?Sized>(
    q: &SecondOrder<T>,
    f: &F,
    config: &EngineConfig,
) -> Result<ExpectationResult<T>> {
    config.validate()?;
    expect_inner(q, f, config)
}

fn expect_inner<T: Real, F: Integrand<T> + ?Sized>(
    q: &SecondOrder<T>,
    f: &F,
    config: &EngineConfig,
) -> Result<ExpectationResult<T>> {
    match q {
        SecondOrder::PointMass(c) => Ok(ExpectationResult::exact(f.eval(c.probs()), 1)),
        SecondOrder::Ensemble(e) => {
            let m = T::lit(e.len() as f64);
            let (mut sum, mut lo, mut hi) = (T::zero(), T::infinity(), T::neg_infinity());
            for c in e.members() {
                let v = f.eval(c.probs());
                sum = sum + v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            // An average cannot leave the range of its terms; rounding can.
            Ok(ExpectationResult::exact(clamp(sum / m, lo, hi), e.len()))
        }
        SecondOrder::Dirichlet(d) => match f.dirichlet_closed_form(d.alpha()) {
            Some(v) => Ok(ExpectationResult::closed_form(v)),
            None => mc_expect(q, f, config.mc_samples, config.seed),
        },
        SecondOrder::IntervalUniform(u) => {
            let width = u.width();
            if width == T::zero() {
                let t = u.lo();
                return Ok(ExpectationResult::exact(f.eval(&[t, T::one() - t]), 1));
            }
            let g = |t: T| f.eval(&[t, T::one() - t]);
            let tol = config.tolerance * width.as_f64();
            let integral = quadrature_with_budget(&g, u.lo(), u.hi(), tol, config.max_evals)?;
            Ok(integral.scaled(width.recip()))
        }
        SecondOrder::Mixture(m) => {
            let mut value = T::zero();
            let mut error_bound = T::zero();
            let mut method = Method::Exact;
            let mut evaluations = 0;
            let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
            for (i, (w, c)) in m.iter().enumerate() {
                let sub = config.with_seed(derive_seed(config.seed, i as u64));
                let r = expect_inner(c, f, &sub)?;
                lo = lo.min(r.value);
                hi = hi.max(r.value);
                value = value + w * r.value;
                error_bound = error_bound + w * r.error_bound;
                method = method.max(r.method);
                evaluations += r.evaluations;
            }
            Ok(ExpectationResult {
                value: clamp(value, lo, hi),
                error_bound,
                method,
                evaluations,
            })
        }
    }
}

fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    if x.is_nan() {
        x
    } else {
        x.max(lo).min(hi)
    }
}

/// `E[H(θ)]` for `θ ∼ Dir(α)` in nats:
/// `ψ(α₀ + 1) − Σ_k (α_k / α₀) ψ(α_k + 1)`.
fn dirichlet_expected_entropy_nats<T: Real>(alpha: &[T]) -> T {
    let total: T = alpha.iter().copied().sum();
    let weighted: T = alpha
        .iter()
        .map(|&a| a / total * digamma(a + T::one()))
        .sum();
    digamma(total + T::one()) - weighted
}

/// Expected Shannon entropy of `θ ∼ Dir(α)` in the requested unit.
///
/// Panics if any `α_k` is not strictly positive.
pub fn dirichlet_expected_entropy<T: Real>(alpha: &[T], unit: Unit) -> T {
    assert!(
        alpha.iter().all(|&a| a > T::zero()),
        "Dirichlet concentrations must be positive"
    );
    unit.from_nats(dirichlet_expected_entropy_nats(alpha))
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute `tolerance`.
pub fn quadrature_1d<T: Real, F: Fn(T) -> T + ?Sized>(
    f: &F,
    a: T,
    b: T,
    tolerance: f64,
) -> Result<ExpectationResult<T>> {
    quadrature_with_budget(f, a, b, tolerance, EngineConfig::default().max_evals)
}

/// [`quadrature_1d`] with an explicit evaluation budget.
pub fn quadrature_with_budget<T: Real, F: Fn(T) -> T + ?Sized>(
    f: &F,
    a: T,
    b: T,
    tolerance: f64,
    max_evals: usize,
) -> Result<ExpectationResult<T>> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidArgument(format!(
            "quadrature bounds out of order: a={a}, b={b}"
        )));
    }
    if a == b {
        return Ok(ExpectationResult {
            value: T::zero(),
            error_bound: T::zero(),
            method: Method::Quadrature,
            evaluations: 0,
        });
    }

    let floor = T::MIN_TOLERANCE * (b - a).as_f64().max(1.0);
    let tol = T::lit(tolerance.max(floor));
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / T::lit(2.0);
    let fm = f(m);
    let mut state = Simpson {
        f,
        evals: 3,
        max_evals,
        error: T::zero(),
    };
    let whole = simpson(a, b, fa, fm, fb);
    let value = state.refine(a, b, fa, fm, fb, whole, tol, 0)?;
    if !value.is_finite() {
        return Err(Error::IntegrationFailure(
            "integrand produced a non-finite value".into(),
        ));
    }
    if state.error > tol {
        return Err(Error::IntegrationFailure(format!(
            "error estimate {} exceeds tolerance {} at maximum depth",
            state.error, tol
        )));
    }
    Ok(ExpectationResult {
        value,
        error_bound: state.error,
        method: Method::Quadrature,
        evaluations: state.evals,
    })
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

struct Simpson<'a, T, F: ?Sized> {
    f: &'a F,
    evals: usize,
    max_evals: usize,
    error: T,
}

impl<T: Real, F: Fn(T) -> T + ?Sized> Simpson<'_, T, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> Result<T> {
        let two = T::lit(2.0);
        let m = (a + b) / two;
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        let fifteen = T::lit(15.0);

        let converged = depth >= MIN_QUADRATURE_DEPTH && delta.abs() <= fifteen * tol;
        let bottomed_out = depth >= MAX_QUADRATURE_DEPTH || m <= a || m >= b;
        if converged || bottomed_out {
            self.error = self.error + delta.abs() / fifteen;
            return Ok(left + right + delta / fifteen);
        }
        if self.evals >= self.max_evals {
            return Err(Error::IntegrationFailure(format!(
                "evaluation budget of {} exhausted",
                self.max_evals
            )));
        }
        let half = tol / two;
        let l = self.refine(a, m, fa, flm, fm, left, half, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, half, depth + 1)?;
        Ok(l + r)
    }
}

/// Monte Carlo estimate of `E_{θ∼Q}[f(θ)]` from `n_samples` draws.
///
/// The error bound is three sample standard errors.
pub fn mc_expect<T: Real, F: Integrand<T> + ?Sized>(
    q: &SecondOrder<T>,
    f: &F,
    n_samples: usize,
    seed: u64,
) -> Result<ExpectationResult<T>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least 2 samples, got {n_samples}"
        )));
    }
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partials: Vec<Moments<T>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = MC_CHUNK.min(n_samples - i * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut buf = Vec::with_capacity(q.k());
            let mut acc = Moments::default();
            for _ in 0..len {
                q.draw_into(&mut rng, &mut buf);
                acc.push(f.eval(&buf));
            }
            acc
        })
        .collect();
    let total = partials
        .into_iter()
        .fold(Moments::default(), |acc, p| acc.merge(&p));

    let n = T::lit(total.count as f64);
    let variance = total.m2 / (n - T::one());
    let stderr = (variance / n).sqrt();
    Ok(ExpectationResult {
        value: total.mean,
        error_bound: T::lit(3.0) * stderr,
        method: Method::MonteCarlo,
        evaluations: total.count,
    })
}

/// Running mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    count: usize,
    mean: T,
    m2: T,
}

impl<T: Real> Default for Moments<T> {
    fn default() -> Self {
        Self {
            count: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Real> Moments<T> {
    fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::lit(self.count as f64);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    fn merge(self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let (na, nb, n) = (
            T::lit(self.count as f64),
            T::lit(other.count as f64),
            T::lit(count as f64),
        );
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }
}

/// Derives an independent 64-bit seed for sub-stream `index` (SplitMix64 mix).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
