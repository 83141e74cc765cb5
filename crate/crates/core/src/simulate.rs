//! Learning curves of a conjugate Dirichlet–categorical learner.
//!
//! Outcomes are drawn i.i.d. from a ground-truth categorical `θ*`, the
//! Dirichlet posterior is updated after each draw, and the uncertainty
//! decomposition of the posterior is recorded at scheduled sample sizes.
//! Replication `r` draws from `ChaCha8Rng` seeded with
//! `derive_seed(seed, r)`; curves are averaged in replication order, so a
//! fixed seed gives bit-identical output even though replications run in
//! parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{Categorical, Dirichlet, SecondOrder};
use crate::error::{Error, Result};
use crate::integrate::{derive_seed, EngineConfig};
use crate::measures::{aleatoric_bounds, decompose, EntropyBounds, Scale, UncertaintyTriple};
use crate::scalar::Real;

/// Sample sizes at which the default curve is evaluated.
pub const DEFAULT_SCHEDULE: [usize; 13] =
    [0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 5000, 10000];

pub const DEFAULT_REPLICATIONS: usize = 200;

/// Dirichlet parameters of the learner: prior plus observed counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesState<T> {
    counts: Vec<T>,
}

impl<T: Real> BayesState<T> {
    pub fn new(counts: Vec<T>) -> Result<Self> {
        Dirichlet::new(counts).map(|d| Self {
            counts: d.alpha().to_vec(),
        })
    }

    /// The uniform prior `(1, …, 1)`.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![T::one(); k])
    }

    pub fn counts(&self) -> &[T] {
        &self.counts
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    /// Conjugate update after observing outcome `outcome` (0-based).
    pub fn update(&self, outcome: usize) -> Result<Self> {
        let mut next = self.clone();
        next.observe(outcome)?;
        Ok(next)
    }

    pub fn observe(&mut self, outcome: usize) -> Result<()> {
        let k = self.k();
        let c = self
            .counts
            .get_mut(outcome)
            .ok_or(Error::IndexOutOfRange { index: outcome, k })?;
        *c = *c + T::one();
        Ok(())
    }

    pub fn posterior(&self) -> SecondOrder<T> {
        SecondOrder::Dirichlet(Dirichlet::new(self.counts.clone()).expect("counts stay positive"))
    }
}

/// Conjugate update after observing outcome `outcome` (0-based).
pub fn bayes_update<T: Real>(state: &BayesState<T>, outcome: usize) -> Result<BayesState<T>> {
    state.update(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub n: usize,
    /// Decomposition averaged over replications.
    pub triple: UncertaintyTriple<T>,
    /// Support bounds on aleatoric uncertainty, widest over replications.
    pub bounds: EntropyBounds<T>,
    pub replications: usize,
}

impl<T: Real> CurvePoint<T> {
    pub fn total_minus_epistemic(&self) -> T {
        self.triple.total_minus_epistemic()
    }
}

/// Parameters of a learning-curve experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve<T> {
    pub theta_star: Categorical<T>,
    pub prior: BayesState<T>,
    pub schedule: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub scale: Scale,
}

impl<T: Real> LearningCurve<T> {
    /// Uniform prior, default schedule and replications, seed 0.
    pub fn new(theta_star: Categorical<T>) -> Self {
        let k = theta_star.k();
        Self {
            prior: BayesState::uniform(k).expect("k >= 2"),
            theta_star,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            replications: DEFAULT_REPLICATIONS,
            seed: 0,
            scale: Scale::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.prior.k() != self.theta_star.k() {
            return Err(Error::DimensionMismatch {
                expected: self.theta_star.k(),
                found: self.prior.k(),
            });
        }
        if self.replications == 0 {
            return Err(Error::InvalidArgument(
                "replications must be at least 1".into(),
            ));
        }
        check_schedule(&self.schedule)
    }

    pub fn run(&self) -> Result<Vec<CurvePoint<T>>> {
        self.check()?;
        let config = EngineConfig {
            cross_check: false,
            ..EngineConfig::default()
        };
        let cumulative: Vec<f64> = self
            .theta_star
            .probs()
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p.as_f64();
                Some(*acc)
            })
            .collect();

        let runs: Vec<Vec<(UncertaintyTriple<T>, EntropyBounds<T>)>> = (0..self.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, r as u64));
                let mut state = self.prior.clone();
                let mut seen = 0;
                let mut out = Vec::with_capacity(self.schedule.len());
                for &n in &self.schedule {
                    while seen < n {
                        state.observe(draw_outcome(&mut rng, &cumulative))?;
                        seen += 1;
                    }
                    let q = state.posterior();
                    out.push((
                        decompose(&q, self.scale, &config)?,
                        aleatoric_bounds(&q, self.scale),
                    ));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;

        let reps = T::lit(self.replications as f64);
        let points = self
            .schedule
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let (first_triple, first_bounds) = runs[0][i];
                let mut sum = [T::zero(); 4];
                let mut bounds = first_bounds;
                for run in &runs {
                    let (t, b) = &run[i];
                    sum[0] = sum[0] + t.total;
                    sum[1] = sum[1] + t.aleatoric;
                    sum[2] = sum[2] + t.epistemic;
                    sum[3] = sum[3] + t.error_bound;
                    bounds.lower = bounds.lower.min(b.lower);
                    bounds.upper = bounds.upper.max(b.upper);
                }
                CurvePoint {
                    n,
                    triple: UncertaintyTriple {
                        total: sum[0] / reps,
                        aleatoric: sum[1] / reps,
                        epistemic: sum[2] / reps,
                        error_bound: sum[3] / reps,
                        ..first_triple
                    },
                    bounds,
                    replications: self.replications,
                }
            })
            .collect();
        Ok(points)
    }
}

/// Runs a learning curve with normalized bits.
pub fn learning_curve<T: Real>(
    theta_star: &Categorical<T>,
    prior: &BayesState<T>,
    schedule: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<CurvePoint<T>>> {
    LearningCurve {
        theta_star: theta_star.clone(),
        prior: prior.clone(),
        schedule: schedule.to_vec(),
        replications,
        seed,
        scale: Scale::default(),
    }
    .run()
}

/// A schedule must be non-empty, start at 0, and increase strictly.
pub fn check_schedule(schedule: &[usize]) -> Result<()> {
    match schedule.first() {
        None => return Err(Error::InvalidSchedule("schedule is empty".into())),
        Some(&first) if first != 0 => {
            return Err(Error::InvalidSchedule(format!(
                "schedule must start at 0, starts at {first}"
            )))
        }
        _ => {}
    }
    if let Some(w) = schedule.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule(format!(
            "schedule must increase strictly, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn draw_outcome<R: Rng + ?Sized>(rng: &mut R, cumulative: &[f64]) -> usize {
    let u: f64 = rng.random();
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_examples() {
        let s = BayesState::<f64>::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(bayes_update(&s, 0).unwrap().counts(), &[2.0, 1.0]);
        let s = BayesState::<f64>::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(s.update(1).unwrap().counts(), &[2.0, 4.0]);
        assert!(matches!(
            s.update(2),
            Err(Error::IndexOutOfRange { index: 2, k: 2 })
        ));
        assert!(BayesState::<f64>::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn updates_commute() {
        let prior = BayesState::<f64>::uniform(3).unwrap();
        let outcomes = [0, 2, 2, 1, 0, 2];
        let fwd = outcomes
            .iter()
            .fold(prior.clone(), |s, &o| s.update(o).unwrap());
        let rev = outcomes
            .iter()
            .rev()
            .fold(prior, |s, &o| s.update(o).unwrap());
        assert_eq!(fwd, rev);
        assert_eq!(fwd.counts(), &[3.0, 2.0, 4.0]);
    }

    #[test]
    fn schedule_validation() {
        assert!(check_schedule(&DEFAULT_SCHEDULE).is_ok());
        assert!(check_schedule(&[]).is_err());
        assert!(check_schedule(&[1, 2]).is_err());
        assert!(check_schedule(&[0, 5, 5]).is_err());
        assert!(check_schedule(&[0, 5, 3]).is_err());
    }

    #[test]
    fn curve_at_zero_is_prior_decomposition() {
        let theta = Categorical::<f64>::from_f64(&[0.9, 0.1]).unwrap();
        let prior = BayesState::uniform(2).unwrap();
        let curve = learning_curve(&theta, &prior, &[0, 3], 4, 99).unwrap();
        let t = curve[0].triple;
        assert_eq!(t.total, 1.0);
        assert!((t.aleatoric - 0.721_347_520_444_481_7).abs() < 1e-12);
        assert!((t.epistemic - 0.278_652_479_555_518_3).abs() < 1e-12);
        assert_eq!(curve[1].n, 3);
        assert_eq!(curve[1].replications, 4);
    }

    #[test]
    fn curve_rejects_bad_parameters() {
        let theta = Categorical::<f64>::from_f64(&[0.3, 0.7]).unwrap();
        let prior = BayesState::uniform(2).unwrap();
        assert!(learning_curve(&theta, &prior, &[0, 2, 1], 1, 0).is_err());
        assert!(learning_curve(&theta, &prior, &[0], 0, 0).is_err());
        let prior3 = BayesState::uniform(3).unwrap();
        assert!(learning_curve(&theta, &prior3, &[0], 1, 0).is_err());
    }
}
