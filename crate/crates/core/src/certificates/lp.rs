//! Dense simplex solver for the negativity LP.
//!
//! The search problem is: over probability vectors c ∈ R^m, make
//! max_j (Gc)_j as negative as possible, where G is the n×m matrix of
//! phased cosines on a grid. We solve the equivalent equality-form
//! program
//!
//!   minimize t  subject to  Σ_j w_j = 1,  (Gᵀw)_k + t − s_k = 0,
//!                           w ≥ 0, s ≥ 0, t free,
//!
//! whose optimum equals the best margin and whose row multipliers are
//! the optimal coefficients. The basis has m+1 rows (m ≤ 64 in
//! practice), small enough that a fresh partial-pivoting LU per
//! iteration is both fast and self-correcting; no factor updates are
//! maintained. The caller never trusts the multipliers blindly: it
//! clamps, renormalizes, and recomputes the margin from the
//! coefficients directly.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-11;
const STALL_LIMIT: u32 = 60;

/// Optimal data recovered from the solved program.
pub(crate) struct LpSolution {
    /// Optimal objective (the best achievable grid margin, negated max).
    /// Diagnostic only: callers must recompute margins from `coeffs`
    /// rather than trust solver arithmetic.
    #[allow(dead_code)]
    pub objective: f64,
    /// Row multipliers clamped to the simplex: c ≥ 0, Σ c = 1.
    pub coeffs: Vec<f64>,
}

/// Dense LU with partial pivoting; solves both Mx = b and Mᵀy = c.
struct Lu {
    n: usize,
    /// L below the diagonal (unit diagonal implicit), U on and above.
    f: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(m: &[f64], n: usize) -> Result<Lu> {
        let mut f = m.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut best = col;
            let mut best_abs = f[col * n + col].abs();
            for row in col + 1..n {
                let a = f[row * n + col].abs();
                if a > best_abs {
                    best = row;
                    best_abs = a;
                }
            }
            if best_abs < PIVOT_TOL {
                return Err(Error::LpFailure("singular basis matrix".into()));
            }
            if best != col {
                for k in 0..n {
                    f.swap(col * n + k, best * n + k);
                }
                perm.swap(col, best);
            }
            let pivot = f[col * n + col];
            for row in col + 1..n {
                let factor = f[row * n + col] / pivot;
                f[row * n + col] = factor;
                for k in col + 1..n {
                    f[row * n + k] -= factor * f[col * n + k];
                }
            }
        }
        Ok(Lu { n, f, perm })
    }

    /// x with Mx = b.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for k in 0..i {
                x[i] -= self.f[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.f[i * n + k] * x[k];
            }
            x[i] /= self.f[i * n + i];
        }
        x
    }

    /// y with Mᵀy = c.
    fn solve_transposed(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Uᵀ z = c (forward), then Lᵀ v = z (backward), then undo P
        let mut z = c.to_vec();
        for i in 0..n {
            for k in 0..i {
                z[i] -= self.f[k * n + i] * z[k];
            }
            z[i] /= self.f[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] -= self.f[k * n + i] * z[k];
            }
        }
        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

/// Variable ids: 0..n are the w_j, n is t, n+1..=n+m are the s_k.
struct Program<'a> {
    /// Grid rows: g[j][k−1] = phased cosine of frequency k at point j.
    g: &'a [Vec<f64>],
    n: usize,
    m: usize,
}

impl Program<'_> {
    fn rows(&self) -> usize {
        self.m + 1
    }

    fn t_id(&self) -> usize {
        self.n
    }

    /// Constraint column of a variable.
    fn column(&self, id: usize, out: &mut [f64]) {
        out.fill(0.0);
        if id < self.n {
            out[0] = 1.0;
            for k in 0..self.m {
                out[k + 1] = self.g[id][k];
            }
        } else if id == self.n {
            for v in out.iter_mut().skip(1) {
                *v = 1.0;
            }
        } else {
            out[id - self.n] = -1.0;
        }
    }

    fn cost(&self, id: usize) -> f64 {
        if id == self.t_id() {
            1.0
        } else {
            0.0
        }
    }

    fn basis_matrix(&self, basis: &[usize]) -> Vec<f64> {
        let rows = self.rows();
        let mut mat = vec![0.0; rows * rows];
        let mut col = vec![0.0; rows];
        for (bi, &id) in basis.iter().enumerate() {
            self.column(id, &mut col);
            for r in 0..rows {
                mat[r * rows + bi] = col[r];
            }
        }
        mat
    }
}

/// Maximizes the negativity margin of Σ c_k g_{jk} over the simplex.
///
/// Returns the optimal margin value and coefficients; `g` must be a
/// nonempty rectangular array. The margin can be ≤ 0 (no feasible
/// negative polynomial on this grid).
pub(crate) fn solve_min_max(g: &[Vec<f64>]) -> Result<LpSolution> {
    let n = g.len();
    if n == 0 {
        return Err(Error::LpFailure("empty grid".into()));
    }
    let m = g[0].len();
    if m == 0 || g.iter().any(|row| row.len() != m) {
        return Err(Error::LpFailure("ragged or empty coefficient matrix".into()));
    }
    let prog = Program { g, n, m };
    let rows = prog.rows();

    // start at w_0 = 1 with the tightest slack removed: feasible by choice of k0
    let k0 = (0..m)
        .min_by(|&a, &b| g[0][a].total_cmp(&g[0][b]))
        .expect("m >= 1");
    let mut basis: Vec<usize> = Vec::with_capacity(rows);
    basis.push(0);
    basis.push(prog.t_id());
    basis.extend((0..m).filter(|&k| k != k0).map(|k| prog.t_id() + 1 + k));

    let mut rhs = vec![0.0; rows];
    rhs[0] = 1.0;
    let cost_basis: Vec<f64> = basis.iter().map(|&id| prog.cost(id)).collect();
    let mut cost_b = cost_basis;

    let mut in_basis = vec![false; n + m + 1];
    for &id in &basis {
        in_basis[id] = true;
    }

    let mut best_obj = f64::INFINITY;
    let mut stall = 0u32;
    let max_iters = 5000 + 2 * n;
    let mut col_buf = vec![0.0; rows];
    let mut last_good: Option<(f64, Vec<f64>)> = None;

    for _ in 0..max_iters {
        // Degenerate vertices can drive the basis numerically singular.
        // The multipliers of the previous iterate are still a feasible
        // candidate, and the caller recomputes every margin from the
        // coefficients, so surfacing the last good iterate is sound.
        let lu = match Lu::factor(&prog.basis_matrix(&basis), rows) {
            Ok(lu) => lu,
            Err(e) => {
                if let Some((obj, pi)) = last_good {
                    return Ok(finish(&prog, obj, &pi));
                }
                return Err(e);
            }
        };
        let x_b = lu.solve(&rhs);
        let pi = lu.solve_transposed(&cost_b);

        let objective: f64 = basis
            .iter()
            .zip(&x_b)
            .filter(|(&id, _)| id == prog.t_id())
            .map(|(_, &v)| v)
            .sum();
        if objective < best_obj - 1e-13 {
            best_obj = objective;
            stall = 0;
        } else {
            stall += 1;
        }
        last_good = Some((objective, pi.clone()));
        let bland = stall > STALL_LIMIT;

        // price: w_j has reduced cost −π₀ − Σ_k π_{k+1} g_{jk}; s_k has π_{k+1}
        let mut entering: Option<(usize, f64)> = None;
        let consider = |id: usize, d: f64, entering: &mut Option<(usize, f64)>| {
            if d < -COST_TOL {
                match entering {
                    Some((_, best)) if !bland && d >= *best => {}
                    Some(_) if bland => {}
                    _ => *entering = Some((id, d)),
                }
            }
        };
        for j in 0..n {
            if in_basis[j] {
                continue;
            }
            let mut d = -pi[0];
            for k in 0..m {
                d -= pi[k + 1] * g[j][k];
            }
            consider(j, d, &mut entering);
            if bland && entering.is_some() {
                break;
            }
        }
        if !(bland && entering.is_some()) {
            for k in 0..m {
                let id = prog.t_id() + 1 + k;
                if in_basis[id] {
                    continue;
                }
                consider(id, pi[k + 1], &mut entering);
                if bland && entering.is_some() {
                    break;
                }
            }
        }

        let Some((enter_id, _)) = entering else {
            return Ok(finish(&prog, objective, &pi));
        };

        prog.column(enter_id, &mut col_buf);
        let u = lu.solve(&col_buf);

        // ratio test; the free variable t never leaves
        let mut leave: Option<(usize, f64)> = None;
        for (bi, &uid) in basis.iter().enumerate() {
            if uid == prog.t_id() || u[bi] <= RATIO_TOL {
                continue;
            }
            let ratio = x_b[bi].max(0.0) / u[bi];
            let better = match leave {
                None => true,
                Some((lbi, lr)) => {
                    ratio < lr - 1e-13 || (ratio < lr + 1e-13 && basis[bi] < basis[lbi])
                }
            };
            if better {
                leave = Some((bi, ratio));
            }
        }
        let Some((leave_bi, _)) = leave else {
            return Err(Error::LpFailure(
                "unbounded direction in a program that is bounded by construction".into(),
            ));
        };

        in_basis[basis[leave_bi]] = false;
        in_basis[enter_id] = true;
        basis[leave_bi] = enter_id;
        cost_b[leave_bi] = prog.cost(enter_id);
    }

    // Exhausting the iteration budget means a heavily degenerate optimum.
    // The best iterate is still a valid candidate for the same reason as
    // above: every margin is re-derived from the coefficients downstream.
    match last_good {
        Some((obj, pi)) => Ok(finish(&prog, obj, &pi)),
        None => Err(Error::LpFailure(format!(
            "simplex made no progress within {max_iters} iterations"
        ))),
    }
}

/// Clamp the multipliers onto the simplex and package the solution.
fn finish(prog: &Program, objective: f64, pi: &[f64]) -> LpSolution {
    let mut coeffs: Vec<f64> = (0..prog.m).map(|k| pi[k + 1].max(0.0)).collect();
    let total: f64 = coeffs.iter().sum();
    if total > 0.0 {
        for c in &mut coeffs {
            *c /= total;
        }
    } else {
        // no mass recovered: fall back to the uniform candidate
        coeffs.fill(1.0 / prog.m as f64);
    }
    LpSolution { objective, coeffs }
}
