//! Monte Carlo estimation of extendible-volume ratios.
//!
//! The ambient polytope (the full moment body at order/length n) is a
//! simplex on its canonical vertices, so uniform barycentric weights give
//! uniform points. Each sample is triaged by the float LP — the membership
//! optimum is exactly 0 (inside) or 1 (outside), so anything not clearly at
//! either end escalates to the exact solver — and an audit subsample of 1%
//! is always re-verified exactly.

use std::thread;

use exchkit_core::dfpe::{extendibility_vertices, DfpeError, DfpeOrder};
use exchkit_core::markov::{gamma_vertex, phi, MarkovError};
use exchkit_core::polytope::lp_membership;
use exchkit_core::rational::Rational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_EPSILON: f64 = 1e-9;
const AUDIT_STRIDE: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub ratio: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    /// Samples re-verified by the exact LP (the audit subsample plus any
    /// float escalations).
    pub audit_checked: u64,
    /// Audit samples where the float verdict disagreed with the exact one.
    /// The exact verdict is what gets counted either way.
    pub audit_mismatches: u64,
}

/// A uniform point of the standard `dim`-simplex (so `dim + 1` barycentric
/// weights) by sorted-uniform spacings.
pub fn sample_simplex<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    assert!(dim >= 1);
    let mut cuts: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(dim + 1);
    let mut prev = 0.0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

fn to_float(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().expect("finite rational")).collect()
}

/// Exact rational barycentric weights matching the float sample: each f64
/// converted exactly, then renormalized so they sum to exactly 1 (keeping
/// the point inside the ambient simplex).
fn exact_barycentric(bary: &[f64]) -> Vec<Rational> {
    let exact: Vec<Rational> = bary
        .iter()
        .map(|&b| Rational::from_float(b.max(0.0)).expect("finite weight"))
        .collect();
    let total: Rational = exact.iter().sum();
    exact.into_iter().map(|b| b / &total).collect()
}

fn combine(bary: &[f64], vertices: &[Vec<f64>]) -> Vec<f64> {
    let dim = vertices[0].len();
    let mut point = vec![0.0; dim];
    for (b, v) in bary.iter().zip(vertices) {
        for (p, x) in point.iter_mut().zip(v) {
            *p += b * x;
        }
    }
    point
}

fn combine_exact(bary: &[Rational], vertices: &[Vec<Rational>]) -> Vec<Rational> {
    let dim = vertices[0].len();
    let mut point = vec![Rational::zero(); dim];
    for (b, v) in bary.iter().zip(vertices) {
        for (p, x) in point.iter_mut().zip(v) {
            *p += b * x;
        }
    }
    point
}

/// Core sampling loop, shared by the ME and DFPE entry points.
pub fn estimate_ratio(
    ambient: &[Vec<Rational>],
    projected: &[Vec<Rational>],
    samples: u64,
    seed: u64,
    workers: usize,
    epsilon: f64,
) -> VolumeEstimate {
    assert!(samples >= 1 && workers >= 1);
    let ambient_f: Vec<Vec<f64>> = ambient.iter().map(|v| to_float(v)).collect();
    let projected_f: Vec<Vec<f64>> = projected.iter().map(|v| to_float(v)).collect();
    let dim = ambient.len() - 1;

    let worker_share = |w: u64| -> u64 {
        samples / workers as u64 + u64::from(w < samples % workers as u64)
    };
    let results: Vec<(u64, u64, u64)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let ambient_f = &ambient_f;
                let projected_f = &projected_f;
                let share = worker_share(w);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(w);
                    let mut hits = 0u64;
                    let mut checked = 0u64;
                    let mut mismatches = 0u64;
                    for i in 0..share {
                        let bary = sample_simplex(dim, &mut rng);
                        let point = combine(&bary, ambient_f);
                        let float_verdict = float_lp_verdict(
                            crate::floatlp::float_lp_optimum(&point, projected_f),
                            epsilon,
                        );
                        let audit = i % AUDIT_STRIDE == 0;
                        let inside = if float_verdict.is_none() || audit {
                            checked += 1;
                            let exact_bary = exact_barycentric(&bary);
                            let exact_point = combine_exact(&exact_bary, ambient);
                            let exact = lp_membership(&exact_point, projected)
                                .expect("dimensions agree")
                                .is_inside();
                            if let Some(f) = float_verdict {
                                if f != exact {
                                    mismatches += 1;
                                }
                            }
                            exact
                        } else {
                            float_verdict.unwrap()
                        };
                        if inside {
                            hits += 1;
                        }
                    }
                    (hits, checked, mismatches)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let hits: u64 = results.iter().map(|r| r.0).sum();
    let audit_checked: u64 = results.iter().map(|r| r.1).sum();
    let audit_mismatches: u64 = results.iter().map(|r| r.2).sum();
    let ratio = hits as f64 / samples as f64;
    VolumeEstimate {
        ratio,
        std_error: (ratio * (1.0 - ratio) / samples as f64).sqrt(),
        samples,
        hits,
        seed,
        audit_checked,
        audit_mismatches,
    }
}

/// Decisive float verdict, or `None` when the optimum is in the ambiguous
/// band (or the float solve failed). The exact optimum is 0 or 1, so the
/// band between `epsilon` and 1/2 only appears through rounding.
fn float_lp_verdict(optimum: Option<f64>, epsilon: f64) -> Option<bool> {
    let f = optimum?;
    if f.abs() <= epsilon {
        Some(true)
    } else if f >= 0.5 {
        Some(false)
    } else {
        None
    }
}

/// Vol(Γ^{(n)}_r) / Vol(Γ_n) by Monte Carlo.
pub fn volume_ratio_me(
    n: u32,
    r: u32,
    samples: u64,
    seed: u64,
    workers: usize,
    epsilon: f64,
) -> Result<VolumeEstimate, MarkovError> {
    if r < n || n < 2 {
        return Err(MarkovError::IndexOutOfRange);
    }
    let ambient: Vec<Vec<Rational>> = phi(n)
        .iter()
        .map(|m| gamma_vertex(m, n).map(|g| g.values().to_vec()))
        .collect::<Result<_, _>>()?;
    let projected: Vec<Vec<Rational>> = phi(r)
        .iter()
        .map(|m| gamma_vertex(m, n).map(|g| g.values().to_vec()))
        .collect::<Result<_, _>>()?;
    Ok(estimate_ratio(
        &ambient, &projected, samples, seed, workers, epsilon,
    ))
}

/// Vol(Λ^{(n)}_r) / Vol(Λ_n) by Monte Carlo.
pub fn volume_ratio_dfpe(
    n: &DfpeOrder,
    r: &DfpeOrder,
    samples: u64,
    seed: u64,
    workers: usize,
    epsilon: f64,
) -> Result<VolumeEstimate, DfpeError> {
    let ambient: Vec<Vec<Rational>> = extendibility_vertices(n, n)?
        .into_iter()
        .map(|v| v.values().to_vec())
        .collect();
    let projected: Vec<Vec<Rational>> = extendibility_vertices(n, r)?
        .into_iter()
        .map(|v| v.values().to_vec())
        .collect();
    Ok(estimate_ratio(
        &ambient, &projected, samples, seed, workers, epsilon,
    ))
}
