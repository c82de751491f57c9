//! Midpoint-displacement snowflake curve and the 4-dimensional lift.
//!
//! The lift needs a curve φ with two-sided bounds
//! `c·|s−t|^{1/2} ≤ |φ(s)−φ(t)| ≤ C·|s−t|^{1/2}` on the pairs it uses.
//! Rather than appeal to an abstract embedding theorem we build a
//! concrete fractal by displacing dyadic midpoints with amplitude
//! `eta·2^{−n/2}` at level n (the exponent 1/2 is what makes the curve
//! a snowflake) and then *measure* the constants on exactly the finite
//! pair set the lift consumes. The lift is therefore unconditionally
//! valid for those pairs; no global bilipschitz claim is made.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ArithMode, Point, PointSet};
use crate::rational::{rational_from_f64, Delta};

/// Deepest refinement the table supports.
pub const MAX_LEVELS: u32 = 28;

/// Lower ratios than this are treated as a self-intersection.
const DEGENERACY_FLOOR: f64 = 1e-12;

/// Resolution of the diagnostic pair set measured at build time.
const BUILD_SAMPLE_LEVEL: u32 = 5;

type Vec3 = [f64; 3];

/// Empirical two-sided snowflake constants on a declared pair set.
#[derive(Debug, Clone)]
pub struct Bilipschitz {
    /// Smallest observed ratio `|φ(s)−φ(t)| / |s−t|^{1/2}`.
    pub lower: f64,
    /// Largest observed ratio.
    pub upper: f64,
    /// `2·lower² / (3·upper² + 2·lower²)`, the largest delta the lift
    /// can serve with these constants. Always in (0, 2/5].
    pub delta_phi: Delta,
}

/// A fractal curve φ: [0,1] → R³ tabulated at the dyadic grid
/// `j·2^{−levels}`, with diagnostic constants measured on a coarse
/// subsample of the table.
#[derive(Debug, Clone)]
pub struct SnowflakeCurve {
    levels: u32,
    eta: f64,
    values: Vec<Vec3>,
    bilipschitz: Bilipschitz,
}

impl SnowflakeCurve {
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Table of φ at `j·2^{−levels}`, length `2^levels + 1`.
    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    /// Constants measured on the build-time sample pairs. The lift
    /// re-measures on the pairs it actually uses; these are diagnostic.
    pub fn bilipschitz(&self) -> &Bilipschitz {
        &self.bilipschitz
    }
}

/// The recentered and stretched curve φ̃ tabulated on {−M,…,M}:
/// `φ̃(x) = √(2M)·(φ(x/2M + 1/2) − φ(1/2))`, so `φ̃(0) = 0` exactly.
#[derive(Debug, Clone)]
pub struct RescaledCurve {
    m: u64,
    values: Vec<Vec3>,
}

impl RescaledCurve {
    pub fn m(&self) -> u64 {
        self.m
    }

    /// φ̃ at an integer parameter in [−M, M].
    pub fn value(&self, x: i64) -> Vec3 {
        assert!(x.unsigned_abs() <= self.m, "parameter outside [-M, M]");
        self.values[(x + self.m as i64) as usize]
    }
}

/// The scale chosen for one lift run.
#[derive(Debug, Clone)]
pub struct LiftParams {
    pub m: u64,
    /// Left endpoint `√(3·delta)/c_emp` of the admissible interval.
    pub lambda: f64,
    pub delta: Delta,
    /// Constants measured on all pairs of {0,…,M} for this run.
    pub constants: Bilipschitz,
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// 2^{−m/2} without accumulating powf error: exact halvings times at
/// most one factor of 1/√2.
fn inv_sqrt_pow2(m: u32) -> f64 {
    let whole = 0.5f64.powi((m / 2) as i32);
    if m % 2 == 1 {
        whole * std::f64::consts::FRAC_1_SQRT_2
    } else {
        whole
    }
}

/// Unit displacement direction for a midpoint of the segment `v`,
/// cycling through an orthonormal frame of the plane orthogonal to `v`:
/// even levels take the Gram-Schmidt image of the least-aligned axis,
/// odd levels its cross product with the segment direction.
fn frame_vector(v: Vec3, level_index: u32) -> Vec3 {
    let len = norm(v);
    if len == 0.0 {
        // degenerate segment: any frame will do
        return if level_index % 2 == 0 {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
    }
    let vhat = [v[0] / len, v[1] / len, v[2] / len];
    let axis = (0..3).min_by(|&i, &j| vhat[i].abs().total_cmp(&vhat[j].abs())).unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    // |vhat[axis]| ≤ 1/√3, so the rejection below cannot vanish
    let proj = vhat[axis];
    let mut u1 = [
        e[0] - proj * vhat[0],
        e[1] - proj * vhat[1],
        e[2] - proj * vhat[2],
    ];
    let n1 = norm(u1);
    u1 = [u1[0] / n1, u1[1] / n1, u1[2] / n1];
    if level_index % 2 == 0 {
        u1
    } else {
        cross(vhat, u1)
    }
}

/// Builds the curve table by midpoint displacement.
///
/// Level 0 is the straight segment from the origin to (1,0,0); passing
/// from level n to n+1 sets each new midpoint to the segment mean plus
/// `eta·2^{−(n+1)/2}` times the frame direction of index n. `eta = 0`
/// is allowed and degenerates to the straight segment.
///
/// # Errors
/// `levels` outside 1..=28, or `eta` negative or non-finite.
pub fn build_snowflake_curve(levels: u32, eta: f64) -> Result<SnowflakeCurve> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Error::Precondition(format!(
            "levels = {levels} outside the supported range 1..={MAX_LEVELS}"
        )));
    }
    if !eta.is_finite() {
        return Err(Error::NonFinite { what: "eta" });
    }
    if eta < 0.0 {
        return Err(Error::Negative { what: "eta" });
    }

    let n_table = (1usize << levels) + 1;
    let mut values = vec![[0.0f64; 3]; n_table];
    values[n_table - 1] = [1.0, 0.0, 0.0];

    let mut step = 1usize << levels;
    for n in 0..levels {
        let half = step / 2;
        let amplitude = eta * inv_sqrt_pow2(n + 1);
        let mids: Vec<Vec3> = (0..1usize << n)
            .into_par_iter()
            .map(|j| {
                let a = values[j * step];
                let b = values[j * step + step];
                let u = frame_vector(sub(b, a), n);
                [
                    (a[0] + b[0]) / 2.0 + amplitude * u[0],
                    (a[1] + b[1]) / 2.0 + amplitude * u[1],
                    (a[2] + b[2]) / 2.0 + amplitude * u[2],
                ]
            })
            .collect();
        for (j, mid) in mids.into_iter().enumerate() {
            values[j * step + half] = mid;
        }
        step = half;
    }

    // diagnostic constants on a coarse all-pairs subsample of the table
    let sample_level = levels.min(BUILD_SAMPLE_LEVEL);
    let stride = 1usize << (levels - sample_level);
    let sampled: Vec<(f64, Vec3)> = (0..=(1usize << sample_level))
        .map(|j| (j as f64 / (1u64 << sample_level) as f64, values[j * stride]))
        .collect();
    let pairs = all_pairs(sampled.len());
    let bilipschitz = empirical_bilipschitz(&sampled, &pairs)?;

    Ok(SnowflakeCurve { levels, eta, values, bilipschitz })
}

/// All index pairs (i, j) with i < j < n.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Evaluates φ̃ on the integers of [−M, M].
///
/// A parameter `x/2M + 1/2` generally falls between two dyadic table
/// points; the final sub-step is resolved by linear interpolation,
/// which is harmless because the lift measures its constants on the
/// interpolated values themselves.
///
/// # Errors
/// `m = 0`, or a table too shallow to give each integer its own
/// dyadic cell (`2^levels < 2M`).
pub fn rescale_curve(curve: &SnowflakeCurve, m: u64) -> Result<RescaledCurve> {
    if m == 0 {
        return Err(Error::Precondition("M must be a positive integer".into()));
    }
    let need = (2 * m).next_power_of_two().trailing_zeros();
    if (1u64 << curve.levels) < 2 * m {
        return Err(Error::InsufficientLevels { have: curve.levels, need });
    }

    let table = &curve.values;
    let top = (table.len() - 1) as f64;
    let center = table[(table.len() - 1) / 2];
    let scale = (2.0 * m as f64).sqrt();

    let values = (-(m as i64)..=m as i64)
        .map(|x| {
            let u = x as f64 / (2.0 * m as f64) + 0.5;
            let pos = u * top;
            let j0 = pos.floor() as usize;
            let raw = if j0 >= table.len() - 1 {
                table[table.len() - 1]
            } else {
                let frac = pos - j0 as f64;
                let (a, b) = (table[j0], table[j0 + 1]);
                [
                    a[0] + frac * (b[0] - a[0]),
                    a[1] + frac * (b[1] - a[1]),
                    a[2] + frac * (b[2] - a[2]),
                ]
            };
            [
                scale * (raw[0] - center[0]),
                scale * (raw[1] - center[1]),
                scale * (raw[2] - center[2]),
            ]
        })
        .collect();

    Ok(RescaledCurve { m, values })
}

/// Measures the extreme ratios `|φ̃(s)−φ̃(t)| / |s−t|^{1/2}` over the
/// given pairs of table entries.
///
/// # Errors
/// Empty pair set, an index out of range, a pair with equal
/// parameters, or a vanishing lower constant (self-intersection).
pub fn empirical_bilipschitz(
    values: &[(f64, Vec3)],
    pairs: &[(usize, usize)],
) -> Result<Bilipschitz> {
    if pairs.is_empty() {
        return Err(Error::Precondition("pair set is empty".into()));
    }
    let entry = |i: usize| -> Result<(f64, Vec3)> {
        values.get(i).copied().ok_or_else(|| {
            Error::Precondition(format!("pair index {i} outside the value table"))
        })
    };
    let ratio = |&(i, j): &(usize, usize)| -> Result<f64> {
        let (s, fs) = entry(i)?;
        let (t, ft) = entry(j)?;
        if s == t {
            return Err(Error::Precondition(format!(
                "pair ({i}, {j}) has equal parameters {s}"
            )));
        }
        Ok(norm(sub(fs, ft)) / (s - t).abs().sqrt())
    };
    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    for pair in pairs {
        let r = ratio(pair)?;
        lower = lower.min(r);
        upper = upper.max(r);
    }
    if lower <= DEGENERACY_FLOOR {
        return Err(Error::DegenerateCurve { ratio: lower, floor: DEGENERACY_FLOOR });
    }
    let dphi = 2.0 * lower * lower / (3.0 * upper * upper + 2.0 * lower * lower);
    Ok(Bilipschitz {
        lower,
        upper,
        delta_phi: Delta::new(rational_from_f64(dphi, "delta_phi")?)?,
    })
}

/// Rescales to [−M, M] and measures constants on all pairs of
/// {0,…,M}, the exact pair set the lift consumes.
pub fn lift_constants(curve: &SnowflakeCurve, m: u64) -> Result<(RescaledCurve, Bilipschitz)> {
    let rescaled = rescale_curve(curve, m)?;
    let values: Vec<(f64, Vec3)> = (0..=m as i64)
        .map(|x| (x as f64, rescaled.value(x)))
        .collect();
    let pairs = all_pairs(values.len());
    let constants = empirical_bilipschitz(&values, &pairs)?;
    Ok((rescaled, constants))
}

/// Lifts {1,…,M} to the 4-dimensional set {(n, λ·φ̃(n))}.
///
/// λ is pinned to the left endpoint `√(3·delta)/c_emp` of the
/// admissible interval. For every pair the lifted squared distance is
/// `a² + r` with `a = |n − n′|` and `r = λ²|φ̃(n)−φ̃(n′)|²`, and the
/// measured constants place `r/a` inside `[3δ, 2(1−δ)]`, so the
/// distance gap exceeds delta; the returned set carries the
/// containment radius `√(M² + 2M)`.
///
/// # Errors
/// `m = 0`, rescaling errors, or `delta` above the measured
/// `delta_phi` (the error reports the achievable value).
pub fn snowflake_lift(
    m: u64,
    curve: &SnowflakeCurve,
    delta: &Delta,
) -> Result<(PointSet, LiftParams)> {
    let (rescaled, constants) = lift_constants(curve, m)?;
    if delta.rational() > constants.delta_phi.rational() {
        return Err(Error::DeltaExceedsPhi {
            delta: delta.to_string(),
            delta_phi: constants.delta_phi.to_string(),
        });
    }
    let lambda = (3.0 * delta.as_f64()).sqrt() / constants.lower;
    // right endpoint of the admissible interval, up to rounding slop
    let upper_end = (2.0 * (1.0 - delta.as_f64())).sqrt() / constants.upper;
    assert!(
        lambda <= upper_end * (1.0 + 1e-9),
        "lambda interval empty despite delta <= delta_phi"
    );

    let points = (1..=m as i64)
        .map(|n| {
            let v = rescaled.value(n);
            Point::float(vec![n as f64, lambda * v[0], lambda * v[1], lambda * v[2]])
        })
        .collect::<Result<Vec<_>>>()?;
    let radius = ((m * m + 2 * m) as f64).sqrt();
    let set = PointSet::new(points, ArithMode::CertifiedFloat, radius)?;
    let params = LiftParams { m, lambda, delta: delta.clone(), constants };
    Ok((set, params))
}
