//! Negativity certificates for phased cosine polynomials.
//!
//! A certificate pins down a polynomial T(x) = Σ c_k cos(kx − ℓπ/4)
//! with c on the probability simplex and T ≤ −A on the whole interval
//! I_δ = [2πδ, 2π(1−δ)]. Such a T exists exactly when ℓ ≢ 2 (mod 4);
//! in the excluded residue the uniform measure on I_δ integrates every
//! admissible term to zero, which is what [`lebesgue_witness_check`]
//! verifies in closed form.
//!
//! The continuum claim rests on an elementary transfer: |T′| ≤ Σ k·c_k
//! =: D, so a grid of step h certifies max T ≤ max_grid T + D·h/2.
//! Emission searches the LP optimum on a coarse grid, then re-evaluates
//! the candidate on progressively finer grids until the transfer term
//! is dominated; checking re-runs the same inequality on a fresh grid
//! of at least twice the density, independent of the solver.

use std::f64::consts::PI;

use crate::certificates::bessel::{cos_quarter_phase, sin_quarter_phase};
use crate::certificates::lp::solve_min_max;
use crate::error::{Error, Result};
use crate::rational::Delta;

/// Degrees tried, in order, by [`certify_with_schedule`].
pub const DEGREE_SCHEDULE: [usize; 5] = [4, 8, 16, 32, 64];

/// Grid margins at or below this are treated as "no negative
/// polynomial on this grid": refining can only shrink them further.
pub const MARGIN_FLOOR: f64 = 1e-9;

/// Densest evaluation grid the transfer loop will try.
const EVAL_CAP: usize = 1 << 26;

/// Additional LP grid refinements after the first attempt.
const LP_REFINEMENTS: usize = 2;

/// LP grid sized so that degree-m oscillations cannot alias between
/// grid points.
pub fn default_grid_points(m: usize) -> usize {
    (32 * m).max(1024)
}

/// A checked uniform-negativity certificate for T on I_δ.
#[derive(Debug, Clone)]
pub struct TrigCertificate {
    pub delta: Delta,
    pub ell: u32,
    /// Degree m; `coeffs[k-1]` multiplies cos(kx − ℓπ/4).
    pub degree: usize,
    /// Nonnegative, summing to 1.
    pub coeffs: Vec<f64>,
    /// Continuum margin: T ≤ −margin on all of I_δ.
    pub margin: f64,
    /// Step of the certifying grid.
    pub grid_step: f64,
    /// Uniform bound on |T′|; at least Σ k·c_k.
    pub derivative_bound: f64,
}

/// Result of a certification attempt.
#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    Certificate(TrigCertificate),
    /// No positive continuum margin was achieved; carries the best
    /// grid margin seen across all attempted grids.
    Infeasible { best_margin: f64 },
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&TrigCertificate> {
        match self {
            CertifyOutcome::Certificate(c) => Some(c),
            CertifyOutcome::Infeasible { .. } => None,
        }
    }
}

/// T(x) = Σ c_k cos(kx − ℓπ/4).
pub fn eval_poly(coeffs: &[f64], ell: u32, x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(ki, &c)| c * cos_quarter_phase((ki + 1) as f64 * x, ell))
        .sum()
}

/// Max of T over {x0 + j·h : 0 ≤ j < n}.
///
/// Each frequency advances by an incremental rotation using
/// 2·sin²(θ/2) rather than a multiplier near 2 (the naive three-term
/// recurrence drifts in phase by O(ε/θ) per step, fatal for the tiny
/// steps of fine grids), reseeded from true cosines at block
/// boundaries. Rotations preserve amplitude, so the evaluation error
/// stays near 10⁻¹², far under any margin the certificates carry.
fn grid_max(coeffs: &[f64], ell: u32, x0: f64, h: f64, n: usize) -> f64 {
    const BLOCK: usize = 1024;
    let m = coeffs.len();
    // per-frequency rotation constants: d = 2 sin²(θ/2), s = sin θ
    let mut rot_d = vec![0.0f64; m];
    let mut rot_s = vec![0.0f64; m];
    for ki in 0..m {
        let theta = (ki + 1) as f64 * h;
        let half = (0.5 * theta).sin();
        rot_d[ki] = 2.0 * half * half;
        rot_s[ki] = theta.sin();
    }
    let mut cos_v = vec![0.0f64; m];
    let mut sin_v = vec![0.0f64; m];

    let mut tmax = f64::NEG_INFINITY;
    let mut start = 0usize;
    while start < n {
        let len = BLOCK.min(n - start);
        let xb = x0 + start as f64 * h;
        for ki in 0..m {
            if coeffs[ki] == 0.0 {
                continue;
            }
            let k = (ki + 1) as f64;
            cos_v[ki] = cos_quarter_phase(k * xb, ell);
            sin_v[ki] = sin_quarter_phase(k * xb, ell);
        }
        for _ in 0..len {
            let mut val = 0.0f64;
            for ki in 0..m {
                let ck = coeffs[ki];
                if ck == 0.0 {
                    continue;
                }
                let (u, v) = (cos_v[ki], sin_v[ki]);
                val += ck * u;
                cos_v[ki] = u - (rot_d[ki] * u + rot_s[ki] * v);
                sin_v[ki] = v - (rot_d[ki] * v - rot_s[ki] * u);
            }
            tmax = tmax.max(val);
        }
        start += len;
    }
    tmax
}

struct Interval {
    x0: f64,
    width: f64,
}

impl Interval {
    fn of(delta: &Delta) -> Interval {
        let d = delta.as_f64();
        Interval { x0: 2.0 * PI * d, width: 2.0 * PI * (1.0 - 2.0 * d) }
    }

    fn step(&self, n: usize) -> f64 {
        self.width / (n - 1) as f64
    }
}

/// Searches for a degree-m negativity certificate at the given LP grid
/// resolution.
///
/// The LP maximizes the grid margin; a positive grid margin is then
/// converted into a continuum margin by evaluating the candidate on
/// finer grids until D·h ≤ margin, so the emitted margin is at least
/// half the grid margin. If the grid margin never clears
/// [`MARGIN_FLOOR`] (after up to two grid refinements), the call
/// reports infeasibility with the best margin seen; for ℓ ≡ 2 (mod 4)
/// this is the expected outcome.
///
/// # Errors
/// `ell` = 0, `m` = 0, `grid_points` < 2m, or an internal LP failure.
pub fn certify_negative_polynomial(
    delta: &Delta,
    ell: u32,
    m: usize,
    grid_points: usize,
) -> Result<CertifyOutcome> {
    if ell == 0 {
        return Err(Error::Precondition("ell must be a positive integer".into()));
    }
    if m == 0 {
        return Err(Error::Precondition("degree m must be at least 1".into()));
    }
    if grid_points < 2 * m {
        return Err(Error::Precondition(format!(
            "grid_points = {grid_points} is below the minimum 2m = {}",
            2 * m
        )));
    }
    let iv = Interval::of(delta);
    let mut n_lp = grid_points;
    let mut best_margin = f64::NEG_INFINITY;

    for _ in 0..=LP_REFINEMENTS {
        let h_lp = iv.step(n_lp);
        let g: Vec<Vec<f64>> = (0..n_lp)
            .map(|j| {
                let x = iv.x0 + j as f64 * h_lp;
                (1..=m).map(|k| cos_quarter_phase(k as f64 * x, ell)).collect()
            })
            .collect();
        let sol = solve_min_max(&g)?;
        let a_grid = -grid_max(&sol.coeffs, ell, iv.x0, h_lp, n_lp);
        best_margin = best_margin.max(a_grid);
        if a_grid <= MARGIN_FLOOR {
            // more grid points only add constraints; refining cannot
            // resurrect a margin this small
            break;
        }

        let d_bound: f64 = sol
            .coeffs
            .iter()
            .enumerate()
            .map(|(ki, &c)| (ki + 1) as f64 * c)
            .sum();
        let mut n_eval = n_lp.max(8192).next_power_of_two();
        while n_eval <= EVAL_CAP {
            let h = iv.step(n_eval);
            let a_eval = -grid_max(&sol.coeffs, ell, iv.x0, h, n_eval);
            best_margin = best_margin.max(a_eval);
            if a_eval <= MARGIN_FLOOR {
                // the coarse-grid margin was an aliasing artifact
                break;
            }
            if d_bound * h <= a_eval {
                return Ok(CertifyOutcome::Certificate(TrigCertificate {
                    delta: delta.clone(),
                    ell,
                    degree: m,
                    coeffs: sol.coeffs,
                    margin: a_eval - d_bound * h / 2.0,
                    grid_step: h,
                    derivative_bound: d_bound,
                }));
            }
            n_eval *= 2;
        }
        n_lp = 2 * n_lp - 1;
    }

    Ok(CertifyOutcome::Infeasible { best_margin })
}

/// Runs the degree schedule up to `max_degree`, returning the first
/// certificate found, else the best infeasibility report.
pub fn certify_with_schedule(delta: &Delta, ell: u32, max_degree: usize) -> Result<CertifyOutcome> {
    if max_degree == 0 {
        return Err(Error::Precondition("max_degree must be at least 1".into()));
    }
    let degrees: Vec<usize> = {
        let scheduled: Vec<usize> =
            DEGREE_SCHEDULE.iter().copied().filter(|&m| m <= max_degree).collect();
        if scheduled.is_empty() {
            vec![max_degree]
        } else {
            scheduled
        }
    };
    let mut best_margin = f64::NEG_INFINITY;
    for m in degrees {
        match certify_negative_polynomial(delta, ell, m, default_grid_points(m))? {
            CertifyOutcome::Certificate(c) => return Ok(CertifyOutcome::Certificate(c)),
            CertifyOutcome::Infeasible { best_margin: b } => best_margin = best_margin.max(b),
        }
    }
    Ok(CertifyOutcome::Infeasible { best_margin })
}

/// Independent re-verification of a certificate on a fresh grid of at
/// least twice the density. Returns false on any violated inequality;
/// never errs.
pub fn check_certificate(cert: &TrigCertificate) -> bool {
    let m = cert.degree;
    if m == 0 || cert.coeffs.len() != m {
        return false;
    }
    if cert.coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return false;
    }
    let total: f64 = cert.coeffs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return false;
    }
    if !(cert.margin.is_finite() && cert.margin > 0.0) {
        return false;
    }
    if !(cert.grid_step.is_finite() && cert.grid_step > 0.0) {
        return false;
    }
    let d_recomputed: f64 = cert
        .coeffs
        .iter()
        .enumerate()
        .map(|(ki, &c)| (ki + 1) as f64 * c)
        .sum();
    if !cert.derivative_bound.is_finite() || cert.derivative_bound < d_recomputed - 1e-12 {
        return false;
    }

    let iv = Interval::of(&cert.delta);
    let steps = (iv.width / cert.grid_step).ceil() as usize;
    let n_fresh = 2 * steps.max(1) + 1;
    let h_fresh = iv.step(n_fresh);
    let max_fresh = grid_max(&cert.coeffs, cert.ell, iv.x0, h_fresh, n_fresh);
    max_fresh + d_recomputed * h_fresh / 2.0 <= -cert.margin / 2.0
}

/// Closed-form witness that the uniform measure on I_δ annihilates
/// every cos(kx − ℓπ/4) when ℓ ≡ 2 (mod 4): both endpoint evaluations
/// of sin(kx − ℓπ/4)/k agree to 10⁻¹² for k = 1..k_max.
///
/// # Errors
/// `ell` ≢ 2 (mod 4), or `k_max` = 0.
pub fn lebesgue_witness_check(delta: &Delta, ell: u32, k_max: u32) -> Result<bool> {
    if ell % 4 != 2 {
        return Err(Error::Precondition(format!(
            "ell = {ell} is not congruent to 2 modulo 4"
        )));
    }
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let d = delta.as_f64();
    for k in 1..=k_max {
        let theta_hi = 2.0 * PI * k as f64 * (1.0 - d);
        let theta_lo = 2.0 * PI * k as f64 * d;
        let integral =
            (sin_quarter_phase(theta_hi, ell) - sin_quarter_phase(theta_lo, ell)) / k as f64;
        if integral.abs() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: i64, q: i64) -> Delta {
        Delta::from_ratio(p, q).unwrap()
    }

    #[test]
    fn grid_max_matches_direct_evaluation() {
        let coeffs = [0.25, 0.0, 0.5, 0.25];
        for &(x0, h, n) in &[(0.3, 1e-3, 5000usize), (2.0, 1e-5, 40000)] {
            let fast = grid_max(&coeffs, 3, x0, h, n);
            let direct = (0..n)
                .map(|j| eval_poly(&coeffs, 3, x0 + j as f64 * h))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((fast - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn single_term_candidate_fails_at_quarter() {
        // T(x) = cos(x − π/4) peaks at √2/2 on [π/2, 3π/2]
        let out = certify_negative_polynomial(&d(1, 4), 1, 1, 1024).unwrap();
        match out {
            CertifyOutcome::Infeasible { best_margin } => {
                assert!((best_margin + 0.5f64.sqrt()).abs() < 1e-9);
            }
            CertifyOutcome::Certificate(_) => panic!("degree 1 cannot certify ell = 1"),
        }
    }

    #[test]
    fn low_degree_certificate_at_wide_delta() {
        let out = certify_negative_polynomial(&d(3, 10), 8, 4, 1024).unwrap();
        let cert = out.certificate().expect("ell = 8 is certifiable");
        assert!(cert.margin > 0.4);
        assert!(check_certificate(cert));

        let mut negated = cert.clone();
        negated.coeffs[0] = -negated.coeffs[0];
        assert!(!check_certificate(&negated));

        let mut inflated = cert.clone();
        inflated.margin *= 10.0;
        assert!(!check_certificate(&inflated));

        let mut weak_derivative = cert.clone();
        weak_derivative.derivative_bound = 0.0;
        assert!(!check_certificate(&weak_derivative));
    }

    #[test]
    fn residue_two_is_infeasible() {
        let out = certify_negative_polynomial(&d(1, 10), 2, 8, 1024).unwrap();
        match out {
            CertifyOutcome::Infeasible { best_margin } => assert!(best_margin <= 1e-8),
            CertifyOutcome::Certificate(_) => panic!("ell = 2 must not certify"),
        }
    }

    #[test]
    fn schedule_stops_at_first_working_degree() {
        let out = certify_with_schedule(&d(3, 10), 8, 64).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.degree, 4);
    }

    #[test]
    fn witness_vanishes_only_in_the_right_residue() {
        assert!(lebesgue_witness_check(&d(1, 10), 2, 50).unwrap());
        assert!(lebesgue_witness_check(&d(3, 10), 6, 50).unwrap());
        assert!(lebesgue_witness_check(&d(1, 4), 2, 200).unwrap());
        assert!(lebesgue_witness_check(&d(1, 10), 3, 10).is_err());
        assert!(lebesgue_witness_check(&d(1, 10), 4, 10).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(certify_negative_polynomial(&d(1, 10), 0, 4, 1024).is_err());
        assert!(certify_negative_polynomial(&d(1, 10), 3, 0, 1024).is_err());
        assert!(certify_negative_polynomial(&d(1, 10), 3, 8, 8).is_err());
        assert!(certify_with_schedule(&d(1, 10), 3, 0).is_err());
    }

    #[test]
    fn poly_is_periodic() {
        let coeffs = [0.3, 0.2, 0.5];
        for &x in &[0.0, 0.7, 3.1, 5.9] {
            let a = eval_poly(&coeffs, 5, x);
            let b = eval_poly(&coeffs, 5, x + 2.0 * PI);
            assert!((a - b).abs() < 1e-12);
        }
    }
}
