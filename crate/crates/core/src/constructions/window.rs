//! The interval "window" tests.
//!
//! For a positive integer `a` and a real `r > 0`, if `r/a` lies in
//! `[3δ, 2(1−δ)]` then `√(a² + r)` lies strictly between `a + δ` and
//! `a + 1 − δ`, so its gap to the nearest integer exceeds `δ`. The
//! l^p analogue replaces the window with
//! `[p·δ·(3/2)^{p−1}·a^{p−1}, p(1−δ)·a^{p−1}]` and the conclusion with
//! `‖(a^p + r)^{1/p}‖ > δ`.
//!
//! The Euclidean test is fully exact: `r` is lifted to a rational (every
//! finite f64 is one) and all comparisons are integer comparisons. When
//! the window holds, the strictly stronger bracketing conclusion is
//! re-derived in rational arithmetic and asserted; it is a theorem, so a
//! failure would indicate a bug, not bad input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::geometry::frac_gap;
use crate::rational::{rational_from_f64, Delta};

/// Does `r/a` lie in the window `[3δ, 2(1−δ)]`? When it does, the
/// bracketing `a + δ < √(a² + r) < a + 1 − δ` is asserted exactly.
///
/// # Errors
/// `a = 0`, or `r` not a positive finite real.
pub fn window_check_euclid(a: u64, r: f64, delta: &Delta) -> Result<bool> {
    if a == 0 {
        return Err(Error::Precondition("window base a must be a positive integer".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Precondition(format!("window offset r = {r} must be positive")));
    }
    let r_rat = rational_from_f64(r, "window offset r")?;
    Ok(window_euclid_rational(&BigInt::from(a), &r_rat, delta))
}

/// Exact-integer form used on lattice pairs: `a` the coordinate gap,
/// `r` the integer squared offset.
pub fn window_check_euclid_exact(a: u128, r: u128, delta: &Delta) -> Result<bool> {
    if a == 0 || r == 0 {
        return Err(Error::Precondition("window arguments a, r must be positive".into()));
    }
    Ok(window_euclid_rational(
        &BigInt::from(a),
        &BigRational::from_integer(BigInt::from(r)),
        delta,
    ))
}

fn window_euclid_rational(a: &BigInt, r: &BigRational, delta: &Delta) -> bool {
    let a_rat = BigRational::from_integer(a.clone());
    let d = delta.rational();
    let three_delta_a = d * BigRational::from_integer(BigInt::from(3)) * &a_rat;
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let upper = &two * (&one - d) * &a_rat;
    let inside = &three_delta_a <= r && r <= &upper;
    if inside {
        // a + δ < √(a² + r) < a + 1 − δ, squared and rearranged:
        // 2aδ + δ² < r  and  r < 2a(1−δ) + (1−δ)²
        let lo = &two * &a_rat * d + d * d;
        let hi_term = &one - d;
        let hi = &two * &a_rat * &hi_term + &hi_term * &hi_term;
        assert!(
            &lo < r && r < &hi,
            "window held but the bracketing failed for a={a}, r={r}, delta={delta}"
        );
    }
    inside
}

/// l^p window test, `p > 1`. For `p = 2` this is exactly the Euclidean
/// window, so that case delegates to the exact path. When the window
/// holds, `‖(a^p + r)^{1/p}‖ > δ` is asserted with an outward-rounded
/// floating evaluation.
///
/// # Errors
/// `p ≤ 1` or non-finite, `a = 0`, or `r` not a positive finite real.
pub fn window_check_lp(p: f64, a: u64, r: f64, delta: &Delta) -> Result<bool> {
    if !p.is_finite() {
        return Err(Error::NonFinite { what: "window exponent p" });
    }
    if p <= 1.0 {
        return Err(Error::Precondition(format!("window exponent p = {p} must exceed 1")));
    }
    if p == 2.0 {
        return window_check_euclid(a, r, delta);
    }
    if a == 0 {
        return Err(Error::Precondition("window base a must be a positive integer".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Precondition(format!("window offset r = {r} must be positive")));
    }
    let d = delta.as_f64();
    let a_pow = (a as f64).powf(p - 1.0);
    let lower = p * d * 1.5f64.powf(p - 1.0) * a_pow;
    let upper = p * (1.0 - d) * a_pow;
    let inside = lower <= r && r <= upper;
    if inside {
        let value = ((a as f64).powf(p) + r).powf(1.0 / p);
        let gap = frac_gap(value)?;
        // powf chain error is a few ulps of the result; the window's
        // guaranteed margin is on the order of delta and dwarfs it
        let slack = 8.0 * f64::EPSILON * value + 1e-12;
        assert!(
            gap - slack > d,
            "lp window held but the gap assertion failed: p={p}, a={a}, r={r}, gap={gap}"
        );
    }
    Ok(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: i64, q: i64) -> Delta {
        Delta::from_ratio(p, q).unwrap()
    }

    #[test]
    fn euclid_examples() {
        // r/a = 0.3 ∈ [0.3, 1.8], and √103 ≈ 10.14889 has gap ≈ 0.14889
        assert!(window_check_euclid(10, 3.0, &d(1, 10)).unwrap());
        // r/a = 1 ∈ [0.9, 1.4], √2 − 1 > 0.3
        assert!(window_check_euclid(1, 1.0, &d(3, 10)).unwrap());
        // r/a = 0.02 < 0.3
        assert!(!window_check_euclid(5, 0.1, &d(1, 10)).unwrap());
    }

    #[test]
    fn euclid_exact_matches_float_form() {
        let delta = d(1, 10);
        assert_eq!(
            window_check_euclid_exact(10, 3, &delta).unwrap(),
            window_check_euclid(10, 3.0, &delta).unwrap()
        );
        assert!(window_check_euclid_exact(8, 9, &delta).unwrap()); // r/a = 1.125
        assert!(!window_check_euclid_exact(8, 1, &delta).unwrap()); // r/a = 0.125
    }

    #[test]
    fn lp_examples() {
        // p=3, a=2, delta=0.1: window [2.7, 10.8]
        assert!(window_check_lp(3.0, 2, 4.0, &d(1, 10)).unwrap());
        assert!(!window_check_lp(3.0, 2, 0.5, &d(1, 10)).unwrap());
        // p=2 must agree with the Euclidean form
        for (a, r) in [(1u64, 1.0), (5, 0.1), (10, 3.0), (7, 9.25)] {
            assert_eq!(
                window_check_lp(2.0, a, r, &d(1, 10)).unwrap(),
                window_check_euclid(a, r, &d(1, 10)).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(window_check_euclid(0, 1.0, &d(1, 10)).is_err());
        assert!(window_check_euclid(1, 0.0, &d(1, 10)).is_err());
        assert!(window_check_lp(1.0, 1, 1.0, &d(1, 10)).is_err());
        assert!(window_check_lp(0.5, 1, 1.0, &d(1, 10)).is_err());
    }
}
