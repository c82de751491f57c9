//! Brute-force oracles and executable lemma checks.
//!
//! Everything here exists to catch the main code lying. The clique
//! solver computes exact maxima on small candidate sets, the generators
//! produce seeded valid sets for property sweeps, and the two lemma
//! checks re-derive, on concrete data, inequalities the constructions
//! rely on: the one-dimensional torus bound and the slab projection
//! step that trades one dimension for a halved gap parameter.

mod clique;

pub use clique::{max_valid_subset, CLIQUE_CAP};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificates::spherical::box_muller;
use crate::error::{Error, Result};
use crate::geometry::{pair_gap, ArithMode, NormSpec, Point, PointSet};
use crate::rational::{ceil_rational, rational_from_f64, Delta};

/// Sampling attempts per requested point before the generator gives up.
const ATTEMPTS_PER_POINT: u64 = 400;

/// Pair-compatibility graph of a candidate set: vertices are point
/// indices, an edge means the pair's distance gap clears delta under
/// the set's declared arithmetic mode.
#[derive(Debug, Clone)]
pub struct CompatibilityGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl CompatibilityGraph {
    /// Builds the graph by deciding every unordered pair.
    ///
    /// # Errors
    /// Exact-lattice candidates with a non-Euclidean norm.
    pub fn build(candidates: &PointSet, delta: &Delta, norm: &NormSpec) -> Result<Self> {
        if candidates.mode() == ArithMode::ExactLattice && *norm != NormSpec::Euclidean {
            return Err(Error::ExactNeedsEuclidean);
        }
        let n = candidates.len();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            for j in (i + 1)..n {
                let (_, ok) = pair_gap(candidates, i, j, delta, norm);
                if ok {
                    rows[i * words + j / 64] |= 1u64 << (j % 64);
                    rows[j * words + i / 64] |= 1u64 << (i % 64);
                }
            }
        }
        Ok(CompatibilityGraph { n, words, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "vertex out of range");
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Number of unordered edges.
    pub fn edge_count(&self) -> u64 {
        let ones: u64 = self.rows.iter().map(|w| w.count_ones() as u64).sum();
        ones / 2
    }

    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }
}

/// Seeded random-order greedy insertion: shuffle the indices, keep each
/// candidate compatible with everything kept so far. Output is sorted
/// and passes pairwise verification; deterministic given the seed.
pub fn greedy_valid_subset(
    candidates: &PointSet,
    delta: &Delta,
    norm: &NormSpec,
    seed: u64,
) -> Result<Vec<usize>> {
    if candidates.mode() == ArithMode::ExactLattice && *norm != NormSpec::Euclidean {
        return Err(Error::ExactNeedsEuclidean);
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut chosen: Vec<usize> = Vec::new();
    for &i in &order {
        if chosen.iter().all(|&j| pair_gap(candidates, i, j, delta, norm).1) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exact slab index of a coordinate for slab width delta/2: half-open
/// slabs ((k−1)·w, k·w], so boundary points fall to the lower slab.
fn slab_index(coord: &BigRational, delta: &Delta) -> BigInt {
    // idx = ceil(x / w) with w = delta/2; exact in big integers
    let scaled = coord * BigRational::new(BigInt::from(2) * delta.denom(), delta.numer().clone());
    scaled.ceil().to_integer()
}

fn coord_rational(p: &Point, i: usize) -> Result<BigRational> {
    match p {
        Point::Lattice(c) => Ok(BigRational::from_integer(BigInt::from(c[i]))),
        Point::Float(c) => rational_from_f64(c[i], "point coordinate"),
    }
}

/// Executable torus bound for one-dimensional sets.
///
/// Returns `None` when the check does not apply (empty set, dimension
/// other than 1, or a set that is not valid at delta in the first
/// place). Otherwise projects to R/Z and reports whether the
/// projections are pairwise delta-separated in the torus metric and
/// the count respects |S| · delta ≤ 1.
pub fn torus_bound_check(s: &PointSet, delta: &Delta) -> Option<bool> {
    if s.dim() != Some(1) {
        return None;
    }
    let valid = crate::geometry::pairwise_verify(s, delta, &NormSpec::Euclidean).ok()?;
    if !valid.pass {
        return None;
    }

    let proj: Vec<f64> = s
        .points()
        .iter()
        .map(|p| p.coord_f64(0).rem_euclid(1.0))
        .collect();
    let d = delta.as_f64();
    for (i, &a) in proj.iter().enumerate() {
        for &b in proj.iter().skip(i + 1) {
            let lin = (a - b).abs();
            let torus = lin.min(1.0 - lin);
            if torus < d {
                return Some(false);
            }
        }
    }

    // |S| ≤ 1/delta, exactly: n·p ≤ q
    let count_ok = BigInt::from(s.len()) * delta.numer() <= *delta.denom();
    Some(count_ok)
}

/// Executable slab-projection step.
///
/// Returns `None` when the check does not apply (empty set, dimension
/// below 2, or input not valid at delta). Otherwise splits the set
/// into slabs of width delta/2 along the first coordinate, drops that
/// coordinate, and reports whether every projected slab is a valid set
/// at delta/2 and the number of occupied slabs respects ⌈4X/delta⌉.
pub fn slab_project_check(s: &PointSet, delta: &Delta) -> Option<bool> {
    let dim = s.dim()?;
    if dim < 2 {
        return None;
    }
    let valid = crate::geometry::pairwise_verify(s, delta, &NormSpec::Euclidean).ok()?;
    if !valid.pass {
        return None;
    }

    let mut slabs: std::collections::BTreeMap<BigInt, Vec<Point>> = std::collections::BTreeMap::new();
    for p in s.points() {
        let x0 = coord_rational(p, 0).ok()?;
        let idx = slab_index(&x0, delta);
        let projected = match p {
            Point::Lattice(c) => Point::Lattice(c[1..].to_vec()),
            Point::Float(c) => Point::Float(c[1..].to_vec()),
        };
        slabs.entry(idx).or_default().push(projected);
    }

    let radius = s.radius_bound();
    let four_x_over_delta =
        rational_from_f64(radius, "radius_bound").ok()? * BigRational::new(BigInt::from(4), BigInt::from(1))
            / BigRational::new(delta.numer().clone(), delta.denom().clone());
    if BigInt::from(slabs.len()) > ceil_rational(&four_x_over_delta) {
        return Some(false);
    }

    let half = delta.half();
    for points in slabs.into_values() {
        if points.len() < 2 {
            continue;
        }
        let projected = match PointSet::new(points, s.mode(), radius) {
            Ok(set) => set,
            // identical projections inside one slab: injectivity fails
            Err(Error::DuplicatePoint { .. }) => return Some(false),
            Err(_) => return None,
        };
        let report = crate::geometry::pairwise_verify(&projected, &half, &NormSpec::Euclidean).ok()?;
        if !report.pass {
            return Some(false);
        }
    }
    Some(true)
}

/// One uniform sample from the ball of radius `x` in R^d.
fn sample_in_ball<R: Rng>(rng: &mut R, d: usize, x: f64) -> Vec<f64> {
    // Gaussian direction plus U^{1/d} radius is uniform in the ball
    let mut coords = vec![0.0f64; d];
    loop {
        let mut i = 0;
        while i < d {
            let (z0, z1) = box_muller(rng);
            coords[i] = z0;
            if i + 1 < d {
                coords[i + 1] = z1;
            }
            i += 2;
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let u: f64 = rng.gen();
            let scale = x * u.powf(1.0 / d as f64) / norm;
            for c in coords.iter_mut() {
                *c *= scale;
            }
            return coords;
        }
    }
}

/// Seeded rejection sampler for valid sets: draws uniform points in
/// the ball B_d(0, X) and keeps those compatible with everything kept
/// so far. May return fewer than `target` points once the attempt
/// budget runs out; the output always passes pairwise verification.
///
/// # Errors
/// `d` = 0, `target` = 0, or a non-positive or non-finite `x`.
pub fn random_valid_set(
    d: usize,
    x: f64,
    delta: &Delta,
    target: usize,
    seed: u64,
) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::Precondition("dimension d must be at least 1".into()));
    }
    if target == 0 {
        return Err(Error::Precondition("target point count must be at least 1".into()));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::NonFinite { what: "ball radius X" });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(target);
    let budget = ATTEMPTS_PER_POINT * target as u64;
    let mut attempts = 0;
    while points.len() < target && attempts < budget {
        attempts += 1;
        let candidate = Point::float(sample_in_ball(&mut rng, d, x))?;
        let compatible = points.iter().all(|q| {
            float_pair_ok(&candidate, q, delta)
        });
        if compatible && !points.contains(&candidate) {
            points.push(candidate);
        }
    }
    PointSet::new(points, ArithMode::CertifiedFloat, x)
}

/// The certified-float acceptance rule, applied to a loose pair.
fn float_pair_ok(p: &Point, q: &Point, delta: &Delta) -> bool {
    let (Point::Float(a), Point::Float(b)) = (p, q) else {
        unreachable!("generator emits float points only");
    };
    let dist = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let gap = (dist - dist.round()).abs();
    gap - crate::geometry::float_distance_slack(a.len(), dist) >= delta.as_f64()
}
