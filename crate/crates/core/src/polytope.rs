//! Exact convex-hull membership with separating-hyperplane certificates.
//!
//! Membership of a point `w` in the convex hull of a vertex list is decided
//! by the linear program
//!
//! ```text
//! maximize   z'w - z0
//! subject to z'v - z0 <= 0   for every hull vertex v
//!            z'w - z0 <= 1
//! ```
//!
//! solved in rational arithmetic with Bland's anti-cycling rule. The
//! optimum is 0 exactly when `w` lies in the hull; otherwise it is positive
//! and the optimal `(z, z0)` is a separating hyperplane, returned as a
//! checkable certificate. The bound `z'w - z0 <= 1` is artificial and only
//! keeps the program bounded.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    DimensionMismatch { expected: usize, got: usize },
    EmptyHull,
}

impl fmt::Display for PolytopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolytopeError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            PolytopeError::EmptyHull => write!(f, "vertex list is empty"),
        }
    }
}

impl core::error::Error for PolytopeError {}

/// Outcome of a membership test.
///
/// An `Outside` verdict carries a rational hyperplane with
/// `z'v <= z0` for every hull vertex `v` and `z'w > z0` for the query
/// point; both inequalities can be re-verified exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipCertificate {
    Inside,
    Outside { z: Vec<Rational>, z0: Rational },
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipCertificate::Inside)
    }
}

/// Decides whether `w` lies in the convex hull of `vertices`.
pub fn lp_membership(
    w: &[Rational],
    vertices: &[Vec<Rational>],
) -> Result<MembershipCertificate, PolytopeError> {
    if vertices.is_empty() {
        return Err(PolytopeError::EmptyHull);
    }
    let dim = w.len();
    for v in vertices {
        if v.len() != dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }

    // Free variables (z, z0) are split into positive and negative parts:
    // columns 0..dim are z+, dim..2dim are z-, then z0+, z0-.
    let nv = 2 * dim + 2;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(vertices.len() + 1);
    let push_row = |point: &[Rational], rhs: Rational, rows: &mut Vec<Vec<Rational>>| {
        let mut row = Vec::with_capacity(nv + 1);
        row.extend(point.iter().cloned());
        row.extend(point.iter().map(|c| -c));
        row.push(-Rational::one());
        row.push(Rational::one());
        row.push(rhs);
        rows.push(row);
    };
    for v in vertices {
        push_row(v, Rational::zero(), &mut rows);
    }
    push_row(w, Rational::one(), &mut rows);

    let mut objective = Vec::with_capacity(nv);
    objective.extend(w.iter().cloned());
    objective.extend(w.iter().map(|c| -c));
    objective.push(-Rational::one());
    objective.push(Rational::one());

    let solution = simplex_max(&objective, rows, nv);
    let opt: Rational = objective
        .iter()
        .zip(&solution)
        .map(|(c, x)| c * x)
        .sum();
    debug_assert!(opt >= Rational::zero());
    if opt.is_zero() {
        return Ok(MembershipCertificate::Inside);
    }
    let z: Vec<Rational> = (0..dim)
        .map(|i| &solution[i] - &solution[dim + i])
        .collect();
    let z0 = &solution[2 * dim] - &solution[2 * dim + 1];
    debug_assert!(verify_certificate(w, vertices, &z, &z0));
    Ok(MembershipCertificate::Outside { z, z0 })
}

/// Re-checks an `Outside` certificate exactly.
pub fn verify_certificate(
    w: &[Rational],
    vertices: &[Vec<Rational>],
    z: &[Rational],
    z0: &Rational,
) -> bool {
    let dot = |p: &[Rational]| -> Rational { z.iter().zip(p).map(|(a, b)| a * b).sum() };
    vertices.iter().all(|v| dot(v) <= *z0) && dot(w) > *z0
}

/// Primal simplex, maximization, constraints `Ax <= b` with `b >= 0` and
/// `x >= 0`. Bland's rule on both the entering and leaving choices, so it
/// terminates on degenerate tableaus. Returns the optimal solution vector.
///
/// `rows` holds `[A | b]`; slacks are appended internally. The objective
/// must be bounded on the feasible region (the membership LP always is).
fn simplex_max(objective: &[Rational], mut rows: Vec<Vec<Rational>>, nv: usize) -> Vec<Rational> {
    let m = rows.len();
    let total = nv + m;
    // append slack columns before the rhs
    for (i, row) in rows.iter_mut().enumerate() {
        let rhs = row.pop().expect("row has rhs");
        debug_assert!(rhs >= Rational::zero());
        for j in 0..m {
            row.push(if i == j { Rational::one() } else { Rational::zero() });
        }
        row.push(rhs);
    }
    let mut basis: Vec<usize> = (nv..total).collect();
    // reduced-cost row: cost[j] = -objective_j for structural vars
    let mut cost: Vec<Rational> = (0..total)
        .map(|j| {
            if j < nv {
                -objective[j].clone()
            } else {
                Rational::zero()
            }
        })
        .collect();

    loop {
        // Bland: smallest-index column with negative reduced cost
        let Some(enter) = cost.iter().position(|c| *c < Rational::zero()) else {
            break;
        };
        // leaving row: minimum ratio, ties by smallest basic variable index
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[enter] > Rational::zero() {
                let ratio = &row[total] / &row[enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("membership LP is bounded");

        // pivot
        let pivot = rows[leave][enter].clone();
        for x in rows[leave].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = rows[leave].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == leave {
                continue;
            }
            let factor = row[enter].clone();
            if !factor.is_zero() {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        let factor = cost[enter].clone();
        if !factor.is_zero() {
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        basis[leave] = enter;
    }

    let mut solution = vec![Rational::zero(); nv];
    for (i, &var) in basis.iter().enumerate() {
        if var < nv {
            solution[var] = rows[i][total].clone();
        }
    }
    solution
}

/// Exact nonnegative-definiteness of a symmetric rational matrix by
/// Cholesky-style pivoting: eliminate on each diagonal entry in turn; every
/// pivot must be >= 0, and a zero pivot forces its whole row and column to
/// vanish.
pub fn is_nonneg_definite(matrix: &[Vec<Rational>]) -> bool {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    for k in 0..n {
        debug_assert_eq!(a[k].len(), n);
        if a[k][k] < Rational::zero() {
            return false;
        }
        if a[k][k].is_zero() {
            if (k..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        let pivot = a[k][k].clone();
        for i in (k + 1)..n {
            let factor = &a[i][k] / &pivot;
            for j in k..n {
                let sub = &factor * &a[k][j];
                a[i][j] -= sub;
            }
        }
    }
    true
}
