//! Digamma function.

use crate::scalar::Real;

// B_{2k} / (2k) for k = 1..7.
const ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

const RECURRENCE_THRESHOLD: f64 = 10.0;

/// Digamma ψ(x) = d/dx ln Γ(x).
///
/// Arguments below 10 are raised with ψ(x) = ψ(x + 1) − 1/x before the
/// asymptotic series is applied. Negative non-integers use reflection;
/// poles (0, −1, −2, …) return NaN.
pub fn digamma<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::infinity() {
        return x;
    }
    if x <= T::zero() {
        if x == x.floor() {
            return T::nan();
        }
        let pi = T::PI();
        return digamma(T::one() - x) - pi / (pi * x).tan();
    }

    let mut x = x;
    let mut shift = T::zero();
    let threshold = T::lit(RECURRENCE_THRESHOLD);
    while x < threshold {
        shift = shift - x.recip();
        x = x + T::one();
    }

    let inv2 = (x * x).recip();
    let mut series = T::zero();
    for &c in ASYMPTOTIC.iter().rev() {
        series = (series + T::lit(c)) * inv2;
    }
    shift + x.ln() - T::lit(0.5) / x - series
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn known_values() {
        assert!((digamma(1.0f64) + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(0.5f64) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ψ(n) = H_{n-1} − γ
        let mut harmonic = 0.0;
        for n in 1..40u32 {
            let expected = harmonic - EULER_GAMMA;
            assert!((digamma(n as f64) - expected).abs() < 1e-13, "psi({n})");
            harmonic += 1.0 / n as f64;
        }
    }

    #[test]
    fn recurrence_holds_across_threshold() {
        for &x in &[0.1, 0.73, 2.5, 5.99, 6.0, 6.01, 17.3, 1234.5] {
            let lhs: f64 = digamma(x + 1.0);
            let rhs = digamma(x) + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn poles_and_reflection() {
        assert!(digamma(0.0f64).is_nan());
        assert!(digamma(-3.0f64).is_nan());
        // cot(−π/2) = 0, so ψ(−0.5) = ψ(1.5) = 2 − γ − 2 ln 2
        assert!((digamma(-0.5f64) - 0.036_489_973_978_576_52).abs() < 1e-13);
    }

    #[test]
    fn f32_precision() {
        assert!((digamma(1.0f32) + EULER_GAMMA as f32).abs() < 1e-6);
    }
}
