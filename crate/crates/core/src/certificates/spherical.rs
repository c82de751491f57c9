//! Spherical-measure calibration and the pair-sum positivity energy.
//!
//! The uniform measure on S^d ⊂ R^{d+1} has Fourier transform
//! C_d (k|y|)^{−ν} J_ν(2πk|y|) with ν = (d−1)/2 and a constant the
//! theory leaves unnamed. We pin C_d down by Monte-Carlo at a single
//! reference radius and then require the fitted constant to reproduce
//! independent estimates at other radii within three standard errors.
//! With C_d in hand, the energy n + C_d k^{−ν} Σ_{i≠j} r^{−ν}J_ν(2πkr)
//! equals the spherical integral of |Σ_j e^{2πik⟨p_j,ω⟩}|² and must be
//! nonnegative, a free consistency check on any point set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::certificates::bessel::{bessel_j_scaled, gamma_nu_plus_1};
use crate::error::{Error, Result};
use crate::geometry::{distance, NormSpec, PointSet};

/// Samples used to fit the constant at the reference radius.
pub const CALIBRATION_SAMPLES: u64 = 10_000_000;

/// Samples per independent cross-check radius.
const CHECK_SAMPLES: u64 = 2_000_000;

/// Samples per RNG block; blocks are seeded independently, so the
/// estimate is bitwise reproducible for any thread count.
const BLOCK_SAMPLES: u64 = 1 << 16;

/// A reference radius is usable only if the transform does not vanish
/// there; J_{1/2}(2π) = 0 exactly, so d = 2 falls back to 3/4.
const REFERENCE_FLOOR: f64 = 0.05;

/// A calibrated spherical constant with its Monte-Carlo uncertainty.
#[derive(Debug, Clone)]
pub struct SphericalConstant {
    pub d: u32,
    pub nu: f64,
    pub value: f64,
    pub std_err: f64,
    pub reference_radius: f64,
    pub samples: u64,
}

/// One evaluation of the energy identity.
#[derive(Debug, Clone)]
pub struct BesselDiagnostic {
    pub d: u32,
    pub nu: f64,
    pub c_d: f64,
    pub k: u32,
    pub energy: f64,
}

pub(crate) fn box_muller<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]: log stays finite
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Mean and standard error of `f` over uniform samples of S^d.
///
/// Sampling is by normalized Gaussians; the sample stream is split
/// into fixed blocks with per-block seeds and the partial sums are
/// folded in block order, so the result depends only on `seed`.
pub fn sphere_average<F>(d: u32, samples: u64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(samples >= 2, "need at least two samples for a standard error");
    let dim = d as usize + 1;
    let blocks = samples.div_ceil(BLOCK_SAMPLES);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let count = BLOCK_SAMPLES.min(samples - b * BLOCK_SAMPLES);
            let mut coords = vec![0.0f64; dim];
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in 0..count {
                loop {
                    let mut i = 0;
                    while i < dim {
                        let (z0, z1) = box_muller(&mut rng);
                        coords[i] = z0;
                        if i + 1 < dim {
                            coords[i + 1] = z1;
                        }
                        i += 2;
                    }
                    let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        for c in coords.iter_mut() {
                            *c /= norm;
                        }
                        break;
                    }
                }
                let v = f(&coords);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (variance / n).sqrt())
}

/// The transform factor (k|y|)^{−ν} J_ν(2πk|y|) at k = 1.
fn transform_factor(nu: f64, radius: f64) -> Result<f64> {
    bessel_j_scaled(nu, 2.0 * std::f64::consts::PI, radius)
}

/// Calibrates C_d against Monte-Carlo sphere integrals.
///
/// Fits at one reference radius with [`CALIBRATION_SAMPLES`] samples,
/// then demands agreement at independent radii and in the |y| → 0
/// limit (where the transform must tend to 1), each within three
/// combined standard errors.
///
/// # Errors
/// `d` outside 1..=8, or any cross-check residual beyond its limit.
pub fn spherical_constant(d: u32) -> Result<SphericalConstant> {
    if !(1..=8).contains(&d) {
        return Err(Error::Precondition(format!(
            "spherical dimension d = {d} is outside 1..=8"
        )));
    }
    let nu = (d as f64 - 1.0) / 2.0;
    let seed = 0x5EED_0000_u64 + d as u64;

    let mut reference_radius = 1.0;
    if transform_factor(nu, reference_radius)?.abs() < REFERENCE_FLOOR {
        reference_radius = 0.75;
    }
    let factor = transform_factor(nu, reference_radius)?;

    let (mean, se) = sphere_average(d, CALIBRATION_SAMPLES, seed, |w| {
        (2.0 * std::f64::consts::PI * reference_radius * w[0]).cos()
    });
    let value = mean / factor;
    let std_err = se / factor.abs();

    // independent radii the fit must reproduce
    let mut radii = vec![0.5, 2.0];
    if reference_radius != 1.0 {
        radii.push(1.0);
    }
    for (i, &radius) in radii.iter().enumerate() {
        let (check_mean, check_se) =
            sphere_average(d, CHECK_SAMPLES, seed ^ ((0xC0FFEE + i as u64) << 8), |w| {
                (2.0 * std::f64::consts::PI * radius * w[0]).cos()
            });
        let predicted_factor = transform_factor(nu, radius)?;
        let residual = (check_mean - value * predicted_factor).abs();
        let limit = 3.0
            * (check_se * check_se + (std_err * predicted_factor) * (std_err * predicted_factor))
                .sqrt();
        if residual > limit {
            return Err(Error::Calibration { residual, limit, radius });
        }
    }

    // |y| → 0: C_d · π^ν/Γ(ν+1) must be 1, since the integral of the
    // normalized measure is 1
    let zero_limit_factor = std::f64::consts::PI.powf(nu) / gamma_nu_plus_1(nu)?;
    let residual = (value * zero_limit_factor - 1.0).abs();
    let limit = 3.0 * std_err * zero_limit_factor;
    if residual > limit {
        return Err(Error::Calibration { residual, limit, radius: 0.0 });
    }

    Ok(SphericalConstant {
        d,
        nu,
        value,
        std_err,
        reference_radius,
        samples: CALIBRATION_SAMPLES,
    })
}

/// n + C_d k^{−ν} Σ_{i≠j} r_{ij}^{−ν} J_ν(2πk r_{ij}) for a point set
/// in R^{d+1}; equals a spherical integral of a squared modulus, so a
/// correct C_d forces it ≥ 0 up to evaluation error.
///
/// # Errors
/// Empty set, dimension outside 2..=9, k = 0, a non-positive or
/// non-finite constant, or a coincident pair.
pub fn bessel_energy(s: &PointSet, k: u32, c_d: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if k == 0 {
        return Err(Error::Precondition("frequency k must be at least 1".into()));
    }
    if !c_d.is_finite() || c_d <= 0.0 {
        return Err(Error::Precondition("C_d must be finite and positive".into()));
    }
    let dim = s.dim().expect("nonempty");
    if !(2..=9).contains(&dim) {
        return Err(Error::Precondition(format!(
            "points live in R^{dim}; the energy needs R^(d+1) with 1 <= d <= 8"
        )));
    }
    let nu = (dim as f64 - 2.0) / 2.0;
    let a = 2.0 * std::f64::consts::PI * k as f64;
    let points = s.points();

    // fixed-order compensated sum keeps the result reproducible
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let r = distance(&points[i], &points[j], &NormSpec::Euclidean)?.value;
            if r == 0.0 {
                return Err(Error::CoincidentPoints { i, j });
            }
            let term = bessel_j_scaled(nu, a, r)?;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    let n = points.len() as f64;
    Ok(n + c_d * (k as f64).powf(-nu) * 2.0 * sum)
}

/// Packages one energy evaluation with its parameters.
pub fn bessel_diagnostic(s: &PointSet, k: u32, c_d: f64) -> Result<BesselDiagnostic> {
    let dim = s.dim().ok_or(Error::EmptySet)?;
    Ok(BesselDiagnostic {
        d: dim as u32 - 1,
        nu: (dim as f64 - 2.0) / 2.0,
        c_d,
        k,
        energy: bessel_energy(s, k, c_d)?,
    })
}
