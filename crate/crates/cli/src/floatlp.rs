//! Floating-point twin of the exact membership LP, used only to triage
//! Monte Carlo samples. Same tableau as the exact solver, but f64
//! arithmetic and Dantzig's entering rule for speed. Anything ambiguous is
//! escalated to the exact solver by the caller.

const COST_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERS: usize = 20_000;

/// Optimum of the membership LP (maximize `z'w - z0` over the hull
/// constraints), or `None` if the solve degenerated (cycling cap, tiny
/// pivots). On success the value is ~0 for interior points and ~1 for
/// exterior ones.
pub fn float_lp_optimum(w: &[f64], vertices: &[Vec<f64>]) -> Option<f64> {
    let dim = w.len();
    let nv = 2 * dim + 2;
    let m = vertices.len() + 1;
    let total = nv + m;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let push_row = |point: &[f64], rhs: f64, rows: &mut Vec<Vec<f64>>, idx: usize| {
        let mut row = Vec::with_capacity(total + 1);
        row.extend_from_slice(point);
        row.extend(point.iter().map(|c| -c));
        row.push(-1.0);
        row.push(1.0);
        for j in 0..m {
            row.push(if idx == j { 1.0 } else { 0.0 });
        }
        row.push(rhs);
        rows.push(row);
    };
    for (i, v) in vertices.iter().enumerate() {
        push_row(v, 0.0, &mut rows, i);
    }
    push_row(w, 1.0, &mut rows, m - 1);

    let mut cost: Vec<f64> = Vec::with_capacity(total);
    cost.extend(w.iter().map(|c| -c));
    cost.extend(w.iter().copied());
    cost.push(1.0);
    cost.push(-1.0);
    cost.resize(total, 0.0);
    let mut objective = 0.0f64;
    let mut basis: Vec<usize> = (nv..total).collect();

    for _ in 0..MAX_ITERS {
        // Dantzig: most negative reduced cost enters
        let mut enter = None;
        let mut best = -COST_TOL;
        for (j, c) in cost.iter().enumerate() {
            if *c < best {
                best = *c;
                enter = Some(j);
            }
        }
        let Some(enter) = enter else {
            return Some(objective);
        };
        let mut leave = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in rows.iter().enumerate() {
            if row[enter] > PIVOT_TOL {
                let ratio = row[total] / row[enter];
                if ratio < best_ratio {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // numerically unbounded: hand over to the exact solver
            return None;
        };

        let pivot = rows[leave][enter];
        for x in rows[leave].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = rows[leave].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == leave {
                continue;
            }
            let factor = row[enter];
            if factor != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                }
            }
        }
        let factor = cost[enter];
        if factor != 0.0 {
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
            objective -= factor * pivot_row[total];
        }
        basis[leave] = enter;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_membership() {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let inside = float_lp_optimum(&[0.25, 0.25], &verts).unwrap();
        assert!(inside.abs() < 1e-9, "{inside}");
        let outside = float_lp_optimum(&[0.75, 0.75], &verts).unwrap();
        assert!((outside - 1.0).abs() < 1e-9, "{outside}");
        let vertex = float_lp_optimum(&[1.0, 0.0], &verts).unwrap();
        assert!(vertex.abs() < 1e-9, "{vertex}");
    }
}
