//! Lower-bound point set builders.
//!
//! Two constructions are implemented. The digit-expansion family
//! ([`build_sarkozy3d`]) places `(k−1)^{2(t+1)}` integer-lattice points in
//! a 3-ball of radius `X` so that every pairwise squared distance
//! `a² + r` falls in the window of [`window_check_euclid`], which forces
//! every distance gap above `delta`. The snowflake lift
//! ([`snowflake_lift`]) turns integers `{1, …, M}` into a 4-dimensional
//! set by pairing each integer with a scaled fractal curve value.

mod snowflake;
mod window;

pub use snowflake::{
    build_snowflake_curve, empirical_bilipschitz, lift_constants, rescale_curve, snowflake_lift,
    Bilipschitz, LiftParams, RescaledCurve, SnowflakeCurve,
};
pub use window::{window_check_euclid, window_check_euclid_exact, window_check_lp};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ArithMode, Point, PointSet};
use crate::rational::{rational_from_f64, Delta};

/// Default cap on materialized construction size.
pub const DEFAULT_POINT_CAP: u128 = 10_000_000;

/// The integers `(k, t)` determined by `(X, delta)`:
/// `1/(48k⁵) ≥ delta > 1/(48(k+1)⁵)` and `16k^{2t+4} ≤ X < 16k^{2(t+1)+4}`.
#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub x: f64,
    pub delta: Delta,
    pub k: u32,
    pub t: u32,
}

impl ConstructionParams {
    /// Number of points the construction emits, `(k−1)^{2(t+1)}`.
    pub fn count(&self) -> BigUint {
        BigUint::from(self.k as u64 - 1).pow(2 * (self.t + 1))
    }

    /// The two guarantees that follow from the defining inequalities:
    /// `k^{2t} > X/(16k⁶)` and `k > delta^{−1/5}/3`, both evaluated in
    /// exact rational arithmetic.
    pub fn derived_guarantees(&self) -> Result<(bool, bool)> {
        let x = rational_from_f64(self.x, "X")?;
        let k = BigInt::from(self.k);
        let growth = BigRational::from_integer(BigInt::from(16) * k.pow(2 * self.t + 6)) > x;
        // k > delta^{−1/5}/3  ⇔  (3k)⁵ · delta > 1
        let lhs = BigRational::from_integer((BigInt::from(3) * &k).pow(5)) * self.delta.rational();
        let size = lhs > BigRational::one();
        Ok((growth, size))
    }
}

/// One emitted point with the digit strings that produced it:
/// `x = Σ αᵢ kⁱ`, `y = Σ βᵢ kⁱ`, `z = 8(Σ αᵢ k^{2i+2} + Σ βᵢ k^{2i+3})`.
#[derive(Debug, Clone)]
pub struct DigitPoint {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub point: Point,
}

/// Picks the unique `(k, t)` for `(X, delta)`.
///
/// # Errors
/// `delta > 1/11664` (no admissible `k ≥ 3`), or `X < 1/delta`.
pub fn choose_params(x: f64, delta: &Delta) -> Result<ConstructionParams> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "X" });
    }
    let x_rat = rational_from_f64(x, "X")?;
    let max_delta = BigRational::new(BigInt::one(), BigInt::from(11664));
    if delta.rational() > &max_delta {
        return Err(Error::Precondition(format!(
            "delta = {delta} exceeds 1/11664 = 1/(48*3^5), the largest admissible value"
        )));
    }
    let inv_delta = delta.rational().recip();
    if x_rat < inv_delta {
        return Err(Error::Precondition(format!(
            "X = {x} is below 1/delta = {}; the construction needs X >= 1/delta",
            inv_delta
        )));
    }

    // largest k with 1/(48k⁵) ≥ delta; unique since the bounds nest
    let fits = |k: u32| -> bool {
        // 48 k⁵ delta ≤ 1
        BigRational::from_integer(BigInt::from(48) * BigInt::from(k).pow(5)) * delta.rational()
            <= BigRational::one()
    };
    debug_assert!(fits(3));
    let mut k = 3u32;
    while fits(k + 1) {
        k += 1;
    }

    // unique t with 16 k^{2t+4} ≤ X < 16 k^{2t+6}
    let below = |t: u32| -> bool {
        BigRational::from_integer(BigInt::from(16) * BigInt::from(k).pow(2 * t + 4)) <= x_rat
    };
    debug_assert!(below(0), "X >= 1/delta >= 48k^5 > 16k^4");
    let mut t = 0u32;
    while below(t + 1) {
        t += 1;
    }

    let params = ConstructionParams { x, delta: delta.clone(), k, t };
    let (growth, size) = params.derived_guarantees()?;
    assert!(growth && size, "derived guarantees must follow from the defining inequalities");
    Ok(params)
}

/// Evaluates the point for one digit-string pair.
///
/// # Errors
/// Wrong digit-string length, a digit above `k−2`, or coordinates beyond
/// the exact-arithmetic range.
pub fn digit_point(params: &ConstructionParams, alpha: &[u32], beta: &[u32]) -> Result<DigitPoint> {
    let len = params.t as usize + 1;
    if alpha.len() != len || beta.len() != len {
        return Err(Error::Precondition(format!(
            "digit strings must have length t+1 = {len}, got {} and {}",
            alpha.len(),
            beta.len()
        )));
    }
    let top = params.k - 2;
    if let Some(&d) = alpha.iter().chain(beta).find(|&&d| d > top) {
        return Err(Error::Precondition(format!(
            "digit {d} exceeds k-2 = {top}"
        )));
    }
    let k = params.k as i64;
    let overflow = || Error::Precondition("construction coordinates exceed the exact range".into());
    let mut x: i64 = 0;
    let mut y: i64 = 0;
    let mut z: i64 = 0;
    let mut k_i: i64 = 1; // k^i
    let mut k_2i2: i64 = k.checked_mul(k).ok_or_else(overflow)?; // k^{2i+2}
    for i in 0..len {
        let (a, b) = (alpha[i] as i64, beta[i] as i64);
        x = a.checked_mul(k_i).and_then(|v| x.checked_add(v)).ok_or_else(overflow)?;
        y = b.checked_mul(k_i).and_then(|v| y.checked_add(v)).ok_or_else(overflow)?;
        let za = a.checked_mul(k_2i2).ok_or_else(overflow)?;
        let zb = b.checked_mul(k_2i2).and_then(|v| v.checked_mul(k)).ok_or_else(overflow)?;
        z = z.checked_add(za).and_then(|v| v.checked_add(zb)).ok_or_else(overflow)?;
        if i + 1 < len {
            k_i = k_i.checked_mul(k).ok_or_else(overflow)?;
            k_2i2 = k_2i2.checked_mul(k).and_then(|v| v.checked_mul(k)).ok_or_else(overflow)?;
        }
    }
    z = z.checked_mul(8).ok_or_else(overflow)?;
    Ok(DigitPoint {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        point: Point::lattice(vec![x, y, z])?,
    })
}

/// Builds the full digit-expansion set for `(X, delta)` under the
/// default materialization cap.
pub fn build_sarkozy3d(x: f64, delta: &Delta) -> Result<(PointSet, ConstructionParams)> {
    build_sarkozy3d_with_cap(x, delta, DEFAULT_POINT_CAP)
}

/// As [`build_sarkozy3d`] with an explicit cap on the number of points.
///
/// # Errors
/// As [`choose_params`]; additionally when the count `(k−1)^{2(t+1)}`
/// exceeds `cap` (the count is still reported in the error).
pub fn build_sarkozy3d_with_cap(
    x: f64,
    delta: &Delta,
    cap: u128,
) -> Result<(PointSet, ConstructionParams)> {
    let params = choose_params(x, delta)?;
    let count_big = params.count();
    let count = count_big.to_u128().unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CountExceedsCap { count, cap });
    }
    let count = count as usize;
    let len = params.t as usize + 1;
    let base = (params.k - 1) as u64;

    let points: Vec<Point> = (0..count)
        .into_par_iter()
        .map(|idx| {
            // decode idx in base (k−1): alpha digits first, then beta
            let mut digits = vec![0u32; 2 * len];
            let mut rest = idx as u64;
            for d in digits.iter_mut() {
                *d = (rest % base) as u32;
                rest /= base;
            }
            let (alpha, beta) = digits.split_at(len);
            digit_point(&params, alpha, beta).map(|dp| dp.point)
        })
        .collect::<Result<_>>()?;

    let set = PointSet::new_unchecked(points, ArithMode::ExactLattice, x)?;
    Ok((set, params))
}
