//! Exact maximum valid subsets on small candidate sets.
//!
//! A valid subset is a clique of the pair-compatibility graph, so the
//! solver is a branch-and-bound maximum-clique search with a greedy
//! coloring bound. The hard size cap keeps the exact search at desk
//! scale; larger inputs belong to the greedy heuristic.

use crate::error::{Error, Result};
use crate::geometry::{NormSpec, PointSet};
use crate::oracles::CompatibilityGraph;
use crate::rational::Delta;

/// Exact-mode size cap; beyond it the search space is no longer a
/// sub-second certainty and only the greedy subset is offered.
pub const CLIQUE_CAP: usize = 60;

/// Indices of a maximum subset of `candidates` that is valid at
/// `delta`: no subset of larger size is valid, and the returned one
/// passes pairwise verification. Output indices are sorted; ties
/// between equal-size maxima are broken deterministically.
///
/// # Errors
/// More than [`CLIQUE_CAP`] candidates, or exact-lattice candidates
/// with a non-Euclidean norm.
pub fn max_valid_subset(
    candidates: &PointSet,
    delta: &Delta,
    norm: &NormSpec,
) -> Result<Vec<usize>> {
    let n = candidates.len();
    if n > CLIQUE_CAP {
        return Err(Error::CliqueCapExceeded { n, cap: CLIQUE_CAP });
    }
    let graph = CompatibilityGraph::build(candidates, delta, norm)?;
    // n ≤ 60, so one word per adjacency row suffices
    let adj: Vec<u64> = (0..n).map(|i| graph.row(i)[0]).collect();
    let full = if n == 0 { 0 } else { u64::MAX >> (64 - n) };

    let mut best = Vec::new();
    let mut cur = Vec::with_capacity(n);
    expand(&adj, full, &mut cur, &mut best);
    best.sort_unstable();
    Ok(best)
}

/// Greedy coloring of the vertices in `cand`, returned grouped by
/// color class: `order[i]` has color `colors[i]`, colors ascending.
/// Any clique inside `cand` has size at most the largest color.
fn color_sort(adj: &[u64], cand: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::with_capacity(cand.count_ones() as usize);
    let mut colors = Vec::with_capacity(order.capacity());
    let mut uncolored = cand;
    let mut color = 0usize;
    while uncolored != 0 {
        color += 1;
        let mut avail = uncolored;
        while avail != 0 {
            let v = avail.trailing_zeros() as usize;
            let bit = 1u64 << v;
            avail &= !bit & !adj[v]; // neighbors cannot share the class
            uncolored &= !bit;
            order.push(v);
            colors.push(color);
        }
    }
    (order, colors)
}

fn expand(adj: &[u64], mut cand: u64, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
    if cand == 0 {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        return;
    }
    let (order, colors) = color_sort(adj, cand);
    for i in (0..order.len()).rev() {
        // colors ascend, so every unprocessed vertex is bounded too
        if cur.len() + colors[i] <= best.len() {
            return;
        }
        let v = order[i];
        cur.push(v);
        expand(adj, cand & adj[v], cur, best);
        cur.pop();
        cand &= !(1u64 << v);
    }
}
