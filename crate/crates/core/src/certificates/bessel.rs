//! Bessel functions of the first kind for the orders the spherical
//! machinery needs: ν = (d−1)/2 with 1 ≤ d ≤ 8, so ν ∈ {0, 1/2, …, 7/2}.
//!
//! Two regimes: the ascending power series up to the crossover, the
//! Hankel asymptotic expansion beyond it. For half-integer orders the
//! asymptotic series terminates and is exact; for integer orders its
//! smallest term at the crossover is ~e^{−2x} ≈ 7·10⁻¹³, which keeps
//! the evaluator within 10⁻¹⁰ of the envelope everywhere up to 10⁵.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Switch point between the power series and the asymptotic expansion.
pub const SERIES_CUTOFF: f64 = 14.0;

/// Γ(ν+1) for ν = idx/2, idx = 0..=7.
const GAMMA_NU_PLUS_1: [f64; 8] = {
    const SQRT_PI: f64 = 1.772_453_850_905_516;
    [
        1.0,                    // Γ(1)
        0.5 * SQRT_PI,          // Γ(3/2)
        1.0,                    // Γ(2)
        0.75 * SQRT_PI,         // Γ(5/2)
        2.0,                    // Γ(3)
        1.875 * SQRT_PI,        // Γ(7/2)
        6.0,                    // Γ(4)
        6.5625 * SQRT_PI,       // Γ(9/2)
    ]
};

/// (cos(lπ/4), sin(lπ/4)) for l mod 8; all entries exact or 0.5 ulp.
const QUARTER_TABLE: [(f64, f64); 8] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// cos(theta − l·π/4) by angle addition against the exact quarter
/// table, so the phase shift itself introduces no cancellation.
pub fn cos_quarter_phase(theta: f64, l: u32) -> f64 {
    let (c, s) = QUARTER_TABLE[(l % 8) as usize];
    theta.cos() * c + theta.sin() * s
}

/// sin(theta − l·π/4), same scheme.
pub fn sin_quarter_phase(theta: f64, l: u32) -> f64 {
    let (c, s) = QUARTER_TABLE[(l % 8) as usize];
    theta.sin() * c - theta.cos() * s
}

/// Doubled order as a table index, rejecting unsupported ν.
fn half_order_index(nu: f64) -> Result<usize> {
    let doubled = 2.0 * nu;
    if doubled.fract() != 0.0 || !(0.0..=7.0).contains(&doubled) {
        return Err(Error::Precondition(format!(
            "order nu = {nu} is not in {{0, 1/2, ..., 7/2}}"
        )));
    }
    Ok(doubled as usize)
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "bessel argument" });
    }
    if x < 0.0 {
        return Err(Error::Negative { what: "bessel argument" });
    }
    Ok(())
}

/// J_ν(x) for ν ∈ {0, 1/2, …, 7/2} and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if x <= SERIES_CUTOFF {
        bessel_j_series(nu, x)
    } else {
        bessel_j_asymptotic(nu, x)
    }
}

/// Γ(ν+1) for a supported order.
pub(crate) fn gamma_nu_plus_1(nu: f64) -> Result<f64> {
    Ok(GAMMA_NU_PLUS_1[half_order_index(nu)?])
}

/// The series factor Σ_m (−q)^m / (m! (ν+1)_m) with q = (x/2)²; the
/// full series value is (x/2)^ν / Γ(ν+1) times this.
fn series_sum(nu: f64, x: f64) -> f64 {
    let q = (x / 2.0) * (x / 2.0);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for m in 0..400 {
        let m1 = (m + 1) as f64;
        term *= -q / (m1 * (m1 + nu));
        sum += term;
        if term.abs() < 1e-25 {
            break;
        }
    }
    sum
}

/// Ascending series Σ (−1)^m (x/2)^{ν+2m} / (m! Γ(ν+m+1)).
///
/// Intended for x below [`SERIES_CUTOFF`]; it converges for all x but
/// loses accuracy to cancellation as x grows.
pub fn bessel_j_series(nu: f64, x: f64) -> Result<f64> {
    let idx = half_order_index(nu)?;
    check_argument(x)?;
    if x == 0.0 {
        return Ok(if idx == 0 { 1.0 } else { 0.0 });
    }
    Ok((x / 2.0).powf(nu) / GAMMA_NU_PLUS_1[idx] * series_sum(nu, x))
}

/// r^{−ν}·J_ν(a·r) for a > 0, r > 0.
///
/// Finite for arbitrarily small r: in the series regime the pole
/// cancels against the prefactor, leaving (a/2)^ν/Γ(ν+1) · Σ, so no
/// intermediate overflows even when r^{−ν} alone would.
pub fn bessel_j_scaled(nu: f64, a: f64, r: f64) -> Result<f64> {
    let idx = half_order_index(nu)?;
    if !(a.is_finite() && r.is_finite() && a > 0.0 && r > 0.0) {
        return Err(Error::Precondition(
            "scaled bessel needs finite positive scale and radius".into(),
        ));
    }
    let x = a * r;
    if x <= SERIES_CUTOFF {
        Ok((a / 2.0).powf(nu) / GAMMA_NU_PLUS_1[idx] * series_sum(nu, x))
    } else {
        Ok(r.powf(-nu) * bessel_j_asymptotic(nu, x)?)
    }
}

/// Hankel expansion √(2/πx)·(P cos ω − Q sin ω), ω = x − (2ν+1)π/4,
/// truncated at its smallest term.
///
/// Exact for half-integer ν (the expansion terminates); for integer ν
/// it is the standard asymptotic form, accurate past [`SERIES_CUTOFF`].
pub fn bessel_j_asymptotic(nu: f64, x: f64) -> Result<f64> {
    let idx = half_order_index(nu)?;
    check_argument(x)?;
    if x == 0.0 {
        return Err(Error::Precondition(
            "asymptotic bessel form is undefined at x = 0".into(),
        ));
    }
    let mu = (idx * idx) as f64; // 4ν²
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut b = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..=60u32 {
        let odd = (2 * k - 1) as f64;
        b *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if b == 0.0 {
            break;
        }
        // the series is asymptotic: stop at the smallest term
        if b.abs() >= prev {
            break;
        }
        match k % 4 {
            1 => q += b,
            2 => p -= b,
            3 => q -= b,
            _ => p += b,
        }
        prev = b.abs();
        if prev < 1e-20 {
            break;
        }
    }
    let ell = idx as u32 + 1; // phase (2ν+1)π/4
    let cos_w = cos_quarter_phase(x, ell);
    let sin_w = sin_quarter_phase(x, ell);
    Ok((2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w))
}

/// Leading asymptotic term √(2/πx)·cos(x − (2ν+1)π/4); the phase is
/// the one the negativity certificates are built around.
pub fn bessel_j_leading(nu: f64, x: f64) -> Result<f64> {
    let idx = half_order_index(nu)?;
    check_argument(x)?;
    if x == 0.0 {
        return Err(Error::Precondition(
            "leading asymptotic form is undefined at x = 0".into(),
        ));
    }
    Ok((2.0 / (PI * x)).sqrt() * cos_quarter_phase(x, idx as u32 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.0, 0.0).unwrap(), 0.0);
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1.0, 2.0).unwrap() - 0.576_724_807_756_873_4).abs() < 1e-14);
    }

    #[test]
    fn half_order_is_elementary() {
        // J_{1/2}(x) = √(2/πx)·sin x; tolerance is the 10⁻¹⁰ accuracy
        // contract relative to the envelope (series cancellation near
        // the crossover costs a couple of digits, e.g. ~6·10⁻¹³ at 13)
        for &x in &[0.3, 0.7, 5.0, 13.0, 50.0, 4000.0] {
            let envelope = (2.0 / (PI * x)).sqrt();
            let want = envelope * x.sin();
            let got = bessel_j(0.5, x).unwrap();
            assert!((got - want).abs() < 1e-10 * envelope, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn regimes_agree_at_the_crossover() {
        for idx in 0..8 {
            let nu = idx as f64 / 2.0;
            let s = bessel_j_series(nu, SERIES_CUTOFF).unwrap();
            let a = bessel_j_asymptotic(nu, SERIES_CUTOFF).unwrap();
            assert!((s - a).abs() < 1e-11, "nu = {nu}: {s} vs {a}");
        }
    }

    #[test]
    fn leading_term_dominates_for_large_x() {
        for idx in 0..8 {
            let nu = idx as f64 / 2.0;
            let full = bessel_j(nu, 90_000.0).unwrap();
            let lead = bessel_j_leading(nu, 90_000.0).unwrap();
            // corrections are O(1/x) relative to the envelope
            assert!((full - lead).abs() < 1e-3 * (2.0 / (PI * 90_000.0)).sqrt());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(bessel_j(0.3, 1.0).is_err());
        assert!(bessel_j(4.0, 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
        assert!(bessel_j(1.0, f64::NAN).is_err());
        assert!(bessel_j_asymptotic(1.0, 0.0).is_err());
        assert!(bessel_j_scaled(1.0, 2.0 * PI, 0.0).is_err());
    }

    #[test]
    fn scaled_form_cancels_the_pole() {
        // against the direct product where it is representable
        for &(nu, r) in &[(0.5f64, 0.3f64), (2.0, 1.7), (3.5, 4.0)] {
            let a = 2.0 * PI;
            let want = r.powf(-nu) * bessel_j(nu, a * r).unwrap();
            let got = bessel_j_scaled(nu, a, r).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
        // r small enough that r^{−ν} alone overflows
        let tiny = bessel_j_scaled(3.5, 2.0 * PI, 1e-200).unwrap();
        assert!(tiny.is_finite());
        // limit r → 0 is (a/2)^ν / Γ(ν+1)
        let limit = (std::f64::consts::PI).powf(3.5) / GAMMA_NU_PLUS_1[7];
        assert!((tiny - limit).abs() < 1e-9 * limit);
    }

    #[test]
    fn quarter_phase_matches_direct_subtraction() {
        for l in 0..16u32 {
            for &theta in &[0.1, 1.0, 2.5, 6.0] {
                let want = (theta - l as f64 * PI / 4.0).cos();
                assert!((cos_quarter_phase(theta, l) - want).abs() < 1e-14);
                let want_s = (theta - l as f64 * PI / 4.0).sin();
                assert!((sin_quarter_phase(theta, l) - want_s).abs() < 1e-14);
            }
        }
    }
}
