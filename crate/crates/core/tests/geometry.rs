//! Integration checks for the gap predicate and the all-pairs verifier.
//!
//! The centerpiece is an independent high-precision square-root oracle:
//! `sqrt_gap_at_least` decides with pure integer arithmetic, and here we
//! re-decide each instance from fifty decimal digits of the root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use intgap::geometry::{distance, frac_gap, sqrt_gap_at_least};
use intgap::{pairwise_verify, ArithMode, Delta, NormSpec, Point, PointSet};

fn d(p: i64, q: i64) -> Delta {
    Delta::from_ratio(p, q).unwrap()
}

/// `‖√n‖` as an exact rational accurate to 10⁻⁵⁰: take the integer
/// square root of n·10¹⁰⁰, i.e. ⌊√n · 10⁵⁰⌋, and read the gap off its
/// last fifty digits. The gap map is 1-Lipschitz, so the result is
/// within 10⁻⁵⁰ of the true gap.
fn fifty_digit_gap(n: u128) -> BigRational {
    let scale = BigInt::from(10u32).pow(50);
    let root = (BigInt::from(n) * &scale * &scale).sqrt();
    let frac = BigRational::new(&root % &scale, scale);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if frac <= half {
        frac
    } else {
        BigRational::one() - frac
    }
}

#[test]
fn sqrt_gap_examples() {
    assert!(!sqrt_gap_at_least(4, &d(1, 10))); // √4 is an integer
    assert!(sqrt_gap_at_least(2, &d(1, 4))); // √2 − 1 > 1/4
    assert!(sqrt_gap_at_least(103, &d(1, 10))); // √103 ≈ 10.14889
    let gap_103 = fifty_digit_gap(103);
    let want = BigRational::new(BigInt::from(14889), BigInt::from(100_000));
    assert!((gap_103 - want).abs() < BigRational::new(BigInt::one(), BigInt::from(100_000)));
}

#[test]
fn sqrt_gap_matches_fifty_digit_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A5A_0001);
    let exclusion = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(30));
    let mut checked = 0u32;
    while checked < 10_000 {
        let n: u128 = rng.gen_range(1..=1_000_000_000_000);
        let q: i64 = rng.gen_range(3..=1_000_000);
        let p: i64 = rng.gen_range(1..=(q - 1) / 2);
        let delta = d(p, q);
        let gap = fifty_digit_gap(n);
        // borderline instances are excluded: there the 10⁻⁵⁰ oracle
        // error could decide differently from the exact predicate
        if (&gap - delta.rational()).abs() < exclusion {
            continue;
        }
        let oracle = &gap >= delta.rational();
        assert_eq!(
            sqrt_gap_at_least(n, &delta),
            oracle,
            "disagreement at n={n}, delta={delta}"
        );
        checked += 1;
    }
}

#[test]
fn distance_examples() {
    let p = Point::lattice(vec![0, 0]).unwrap();
    let q = Point::lattice(vec![3, 4]).unwrap();
    let dist = distance(&p, &q, &NormSpec::Euclidean).unwrap();
    assert_eq!(dist.value, 5.0);
    assert_eq!(dist.squared_lattice, Some(25));

    let z = Point::float(vec![0.0, 0.0, 0.0]).unwrap();
    let same = distance(&z, &z, &NormSpec::Euclidean).unwrap();
    assert_eq!(same.value, 0.0);
    assert_eq!(same.squared_lattice, None);

    // (1+1)^{1/3} to 30 digits: 1.25992104989487316476721060728
    let a = Point::float(vec![1.0, 0.0]).unwrap();
    let b = Point::float(vec![0.0, 1.0]).unwrap();
    let cube = distance(&a, &b, &NormSpec::lp(3.0).unwrap()).unwrap();
    assert!((cube.value - 1.259_921_049_894_873_16).abs() < 1e-15);
    assert_eq!(cube.squared_lattice, None);
}

#[test]
fn verifier_examples() {
    let single = PointSet::new(
        vec![Point::lattice(vec![7, 0]).unwrap()],
        ArithMode::ExactLattice,
        10.0,
    )
    .unwrap();
    let report = pairwise_verify(&single, &d(1, 10), &NormSpec::Euclidean).unwrap();
    assert!(report.pass);
    assert_eq!(report.pair_count, 0);
    assert_eq!(report.min_gap, 0.5);
    assert_eq!(report.worst_pair, None);

    let unit = PointSet::new(
        vec![Point::lattice(vec![0]).unwrap(), Point::lattice(vec![1]).unwrap()],
        ArithMode::ExactLattice,
        2.0,
    )
    .unwrap();
    let report = pairwise_verify(&unit, &d(1, 10), &NormSpec::Euclidean).unwrap();
    assert!(!report.pass);
    assert_eq!(report.min_gap, 0.0);
    assert_eq!(report.worst_pair, Some((0, 1)));
}

/// Draws a small exact-lattice set with distinct points.
fn random_lattice_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointSet {
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let coords: Vec<i64> = (0..dim).map(|_| rng.gen_range(-40..=40)).collect();
        let candidate = Point::lattice(coords).unwrap();
        if !points.contains(&candidate) {
            points.push(candidate);
        }
    }
    PointSet::new(points, ArithMode::ExactLattice, 100.0).unwrap()
}

#[test]
fn exact_verdict_is_identical_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A5A_0002);
    let delta = d(1, 8);
    for _ in 0..5 {
        let set = random_lattice_set(&mut rng, 24, 3);
        let reports: Vec<_> = [1usize, 2, 4]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                pool.install(|| pairwise_verify(&set, &delta, &NormSpec::Euclidean).unwrap())
            })
            .collect();
        for r in &reports[1..] {
            assert_eq!(r.pass, reports[0].pass);
            assert_eq!(r.min_gap.to_bits(), reports[0].min_gap.to_bits());
            assert_eq!(r.worst_pair, reports[0].worst_pair);
        }
    }
}

#[test]
fn worst_pair_attains_the_minimum_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A5A_0003);
    for _ in 0..10 {
        let set = random_lattice_set(&mut rng, 12, 2);
        let report = pairwise_verify(&set, &d(1, 10), &NormSpec::Euclidean).unwrap();
        let (i, j) = report.worst_pair.unwrap();
        let dist = distance(&set.points()[i], &set.points()[j], &NormSpec::Euclidean).unwrap();
        let gap = frac_gap(dist.value).unwrap();
        assert_eq!(gap.to_bits(), report.min_gap.to_bits());
    }
}

proptest! {
    // Dyadic t and moderate integer shifts keep t + m exactly
    // representable, so periodicity must hold bit for bit.
    #[test]
    fn frac_gap_is_periodic(numer in 0u64..(1 << 20), shift in 0u64..1024) {
        let t = numer as f64 / (1u64 << 20) as f64;
        let gap = frac_gap(t).unwrap();
        let shifted = frac_gap(t + shift as f64).unwrap();
        prop_assert_eq!(gap.to_bits(), shifted.to_bits());
    }

    #[test]
    fn frac_gap_stays_in_the_half_interval(t in 0.0..1e12f64) {
        let gap = frac_gap(t).unwrap();
        prop_assert!((0.0..=0.5).contains(&gap));
    }

    // frac_gap(m ± delta) = delta for dyadic delta in [0, 1/2]
    #[test]
    fn frac_gap_recovers_dyadic_offsets(m in 1u64..1000, numer in 0u64..=(1 << 19)) {
        let delta = numer as f64 / (1u64 << 20) as f64;
        prop_assert_eq!(frac_gap(m as f64 + delta).unwrap(), delta);
        prop_assert_eq!(frac_gap(m as f64 - delta).unwrap(), delta);
    }

    #[test]
    fn verify_is_permutation_invariant(seed in 0u64..500, n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = random_lattice_set(&mut rng, n, 2);
        let delta = d(1, 7);
        let base = pairwise_verify(&set, &delta, &NormSpec::Euclidean).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let shuffled = PointSet::new(
            order.iter().map(|&i| set.points()[i].clone()).collect(),
            ArithMode::ExactLattice,
            100.0,
        ).unwrap();
        let moved = pairwise_verify(&shuffled, &delta, &NormSpec::Euclidean).unwrap();

        prop_assert_eq!(base.pass, moved.pass);
        prop_assert_eq!(base.min_gap.to_bits(), moved.min_gap.to_bits());
        prop_assert_eq!(base.pair_count, moved.pair_count);
    }
}
