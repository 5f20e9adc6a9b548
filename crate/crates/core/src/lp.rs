//! Phase-1 simplex for small dense feasibility problems `A x = b, x ≥ 0`.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-12;

/// Outcome of a feasibility search.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    /// Sum of artificial variables at the optimum: zero when feasible.
    pub residual: f64,
    /// Best point found; satisfies the constraints when `residual` is zero.
    pub x: Vec<f64>,
}

/// Minimizes the total violation of `A x = b` over `x ≥ 0` with one
/// artificial variable per row. Bland's rule keeps the search finite on
/// degenerate problems.
///
/// # Panics
/// When row lengths disagree with each other or with `b`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Feasibility {
    let m = a.len();
    assert_eq!(m, b.len(), "one right-hand side per row");
    let n = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == n), "ragged constraint matrix");

    // Tableau columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of minimizing the artificial sum.
    let mut cost = vec![0.0; width];
    for row in &t {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // Phase 1 is bounded below by zero, so some row always qualifies.
        let Some(r) = leave else { break };
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }

    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width - 1].max(0.0);
        }
    }
    Feasibility { residual: -cost[width - 1], x }
}

fn pivot(t: &mut [Vec<f64>], cost: &mut [f64], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && row[c] != 0.0 {
            let f = row[c];
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
        }
    }
    let f = cost[c];
    for (v, pr) in cost.iter_mut().zip(&pivot_row) {
        *v -= f * pr;
    }
}
