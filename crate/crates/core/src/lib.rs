//! Second-order predictive distributions and the entropy-based
//! decomposition of predictive uncertainty into total, aleatoric and
//! epistemic parts.
//!
//! The library is generic over the scalar type through [`Real`]; the
//! `*64` / `*32` aliases below fix it to `f64` or `f32`.
//!
//! ```
//! use uqdecomp::{decompose, EngineConfig, Scale, SecondOrder64};
//!
//! let q = SecondOrder64::interval_uniform(0.0, 1.0).unwrap();
//! let t = decompose(&q, Scale::default(), &EngineConfig::default()).unwrap();
//! assert_eq!(t.total, 1.0);
//! assert!((t.aleatoric - 0.721348).abs() < 1e-6);
//! ```

pub mod distributions;
pub mod ensemble;
pub mod error;
pub mod integrate;
pub mod measures;
pub mod scalar;
pub mod simulate;
pub mod special;

pub use distributions::{
    validate, Categorical, Dirichlet, DistributionSpec, Ensemble, IntervalUniform, Mixture,
    SecondOrder,
};
pub use ensemble::{
    ensemble_decompose, js_divergence, parse_matrix, EnsemblePrediction, MatrixError,
};
pub use error::{Error, Result};
pub use integrate::{
    dirichlet_expected_entropy, expect, mc_expect, quadrature_1d, EngineConfig, EntropyIntegrand,
    ExpectationResult, Integrand, Method,
};
pub use measures::{
    aleatoric_bounds, aleatoric_uncertainty, decompose, epistemic_mutual_information,
    kl_divergence, shannon_entropy, total_uncertainty, EntropyBounds, EpistemicMethod, Scale,
    UncertaintyTriple, Unit,
};
pub use scalar::Real;
pub use simulate::{bayes_update, learning_curve, BayesState, CurvePoint, LearningCurve};
pub use special::digamma;

pub type Categorical64 = Categorical<f64>;
pub type SecondOrder64 = SecondOrder<f64>;
pub type EnsemblePrediction64 = EnsemblePrediction<f64>;
pub type UncertaintyTriple64 = UncertaintyTriple<f64>;
pub type EntropyBounds64 = EntropyBounds<f64>;
pub type ExpectationResult64 = ExpectationResult<f64>;
pub type BayesState64 = BayesState<f64>;
pub type CurvePoint64 = CurvePoint<f64>;

pub type Categorical32 = Categorical<f32>;
pub type SecondOrder32 = SecondOrder<f32>;
pub type EnsemblePrediction32 = EnsemblePrediction<f32>;
pub type UncertaintyTriple32 = UncertaintyTriple<f32>;
pub type EntropyBounds32 = EntropyBounds<f32>;
pub type ExpectationResult32 = ExpectationResult<f32>;
pub type BayesState32 = BayesState<f32>;
pub type CurvePoint32 = CurvePoint<f32>;
