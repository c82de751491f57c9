//! The upper-bound growth profile in the ambient dimension, and the
//! recursion integral that drives its case analysis.
//!
//! The bound on N_d(X, δ) grows like X^e, optionally times log X, with
//! the exponent depending on d mod 4. The profile feeds the integral
//! ∫_2^{4X} f_d(t) t^{−d/2−1} dt, whose boundedness or log growth is
//! exactly what separates the cases.

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Recursion depth cap for the adaptive integrator; 2^40 panels is far
/// beyond what the smooth integrands here ever need.
const MAX_DEPTH: u32 = 40;

/// Growth profile f_d(X) = X^exponent · (log X if log_factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundProfile {
    pub d: u32,
    pub exponent: Rational64,
    pub log_factor: bool,
}

impl BoundProfile {
    /// f_d(t) as a floating value; `t` must be positive and finite.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { what: "profile argument" });
        }
        if t <= 0.0 {
            return Err(Error::Precondition(format!(
                "profile argument t = {t} must be positive"
            )));
        }
        let e = *self.exponent.numer() as f64 / *self.exponent.denom() as f64;
        let base = t.powf(e);
        Ok(if self.log_factor { base * t.ln() } else { base })
    }
}

/// The case table: exponent d/2 when d ≡ 3 (mod 4), else (d−1)/2, with
/// a log factor exactly when d ≡ 0 (mod 4).
pub fn bound_profile(d: u32) -> Result<BoundProfile> {
    if d == 0 {
        return Err(Error::Precondition("dimension d must be at least 1".into()));
    }
    let (exponent, log_factor) = match d % 4 {
        3 => (Rational64::new(d as i64, 2), false),
        0 => (Rational64::new(d as i64 - 1, 2), true),
        _ => (Rational64::new(d as i64 - 1, 2), false),
    };
    Ok(BoundProfile { d, exponent, log_factor })
}

/// ∫_2^{4X} f_d(t) t^{−d/2−1} dt to relative accuracy well below 10⁻⁶.
///
/// Integrated in log coordinates (t = e^u), where the integrand is
/// e^{pu} or u·e^{pu} with p = exponent − d/2 ∈ {0, −1/2}: smooth,
/// slowly varying, ideal for adaptive Simpson.
///
/// # Errors
/// `d` = 0 or `X` < 1 (or non-finite).
pub fn recursion_integral(d: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "integral endpoint X" });
    }
    if x < 1.0 {
        return Err(Error::Precondition(format!("X = {x} must be at least 1")));
    }
    let profile = bound_profile(d)?;
    let p_rat = profile.exponent - Rational64::new(d as i64, 2);
    let p = *p_rat.numer() as f64 / *p_rat.denom() as f64;
    let log_factor = profile.log_factor;
    let f = |u: f64| {
        let base = (p * u).exp();
        if log_factor {
            base * u
        } else {
            base
        }
    };

    let a = 2f64.ln();
    let b = (4.0 * x).ln();
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson_panel(&f, a, fa, b, fb);
    // absolute budget chosen from the first estimate; the integrands
    // are positive, so this yields the relative target
    let eps = 1e-9 * whole.abs().max(1e-12);
    Ok(adaptive(&f, a, fa, m, fm, b, fb, whole, eps, MAX_DEPTH))
}

/// Simpson estimate over [a, b] plus the midpoint sample it used.
fn simpson_panel<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson_panel(f, a, fa, m, fm);
    let (right, rm, frm) = simpson_panel(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        // Richardson term upgrades the pair to the Boole-level estimate
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1)
        + adaptive(f, m, fm, rm, frm, b, fb, right, 0.5 * eps, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn profile(d: u32) -> (Rational64, bool) {
        let p = bound_profile(d).unwrap();
        (p.exponent, p.log_factor)
    }

    #[test]
    fn case_table_examples() {
        assert_eq!(profile(1), (Rational64::new(0, 1), false));
        assert_eq!(profile(2), (Rational64::new(1, 2), false));
        assert_eq!(profile(3), (Rational64::new(3, 2), false));
        assert_eq!(profile(4), (Rational64::new(3, 2), true));
        assert_eq!(profile(5), (Rational64::new(2, 1), false));
        assert_eq!(profile(7), (Rational64::new(7, 2), false));
        assert_eq!(profile(100), (Rational64::new(99, 2), true));
        assert!(bound_profile(0).is_err());
    }

    #[test]
    fn evaluate_matches_hand_values() {
        let p3 = bound_profile(3).unwrap();
        assert!((p3.evaluate(4.0).unwrap() - 8.0).abs() < 1e-12);
        let p4 = bound_profile(4).unwrap();
        let t = std::f64::consts::E;
        assert!((p4.evaluate(t).unwrap() - t.powf(1.5)).abs() < 1e-12);
        assert!(p4.evaluate(0.0).is_err());
        assert!(p4.evaluate(f64::INFINITY).is_err());
    }

    // closed forms below are antiderivatives checked by differentiation,
    // independent of the quadrature

    #[test]
    fn integrand_power_minus_three_halves() {
        // d = 1: ∫_2^{4X} t^{−3/2} dt = √2 − X^{−1/2}
        for x in [1e3f64, 1e6, 37.5] {
            let want = SQRT_2 - x.powf(-0.5);
            let got = recursion_integral(1, x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "x = {x}: got {got}, want {want}"
            );
        }
        // d = 5 has the same integrand
        let a = recursion_integral(5, 1e4).unwrap();
        let b = recursion_integral(1, 1e4).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(a < SQRT_2);
    }

    #[test]
    fn integrand_log_case() {
        // d = 3: ∫_2^{4X} t^{−1} dt = log(2X)
        for x in [1e3f64, 1e6] {
            let want = (2.0 * x).ln();
            let got = recursion_integral(3, x).unwrap();
            assert!(((got - want) / want).abs() < 1e-9);
        }
    }

    #[test]
    fn integrand_with_log_factor() {
        // d = 4: ∫_2^{4X} t^{−3/2} ln t dt, antiderivative −2t^{−1/2}(ln t + 2)
        let x = 1e3f64;
        let upper = 4.0 * x;
        let want = SQRT_2 * (2f64.ln() + 2.0) - 2.0 * upper.powf(-0.5) * (upper.ln() + 2.0);
        let got = recursion_integral(4, x).unwrap();
        assert!(((got - want) / want).abs() < 1e-9, "got {got}, want {want}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(recursion_integral(0, 10.0).is_err());
        assert!(recursion_integral(1, 0.5).is_err());
        assert!(recursion_integral(1, f64::NAN).is_err());
        // X = 1 is allowed and gives a genuine interval [2, 4]
        assert!(recursion_integral(1, 1.0).unwrap() > 0.0);
    }
}
