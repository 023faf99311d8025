//! Brute-force cross-checks for the closed-form machinery.
//!
//! Everything here works at the level of raw binary sequences and a
//! different LP pivot rule (Dantzig entering with a lexicographic ratio
//! test, against the membership solver's Bland), so agreement with the
//! dfpe/markov/polytope modules is evidence, not tautology. The price is
//! exponential cost, capped by a hard size bound.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::multi_index_range;
use crate::dfpe::DfpeDistribution;
use crate::markov::{self, MeDistribution, TransitionCountMatrix};
use crate::rational::Rational;

/// Enumeration cost cap, in total sequence bits.
const MAX_BITS: u32 = 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    TooLarge,
    InvalidTarget,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge => write!(f, "instance exceeds the brute-force size cap"),
            OracleError::InvalidTarget => write!(f, "target order is not an extension"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Class size of a transition-count matrix by explicit enumeration of all
/// binary sequences with its start state and length.
pub fn oracle_whittle(m: &TransitionCountMatrix) -> Result<BigInt, OracleError> {
    let len = m.len();
    if len > MAX_BITS {
        return Err(OracleError::TooLarge);
    }
    let target = m.counts();
    let start = m.start_state() as u32;
    let mut count = 0u64;
    // bit i of `rest` is x_{i+2}; x_1 is the fixed start state
    for rest in 0u64..(1u64 << (len - 1)) {
        let mut prev = start;
        let mut c = [[0u32; 2]; 2];
        for i in 0..(len - 1) {
            let next = ((rest >> i) & 1) as u32;
            c[prev as usize][next as usize] += 1;
            prev = next;
        }
        if c == target {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}

/// Feasibility of `A x = b, x >= 0` by a phase-I simplex over the
/// artificial basis: Dantzig's most-negative entering rule, lexicographic
/// ratio test for termination.
fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> bool {
    let m = a.len();
    let nc = if m == 0 { 0 } else { a[0].len() };
    // tableau rows: [A | I | b], signs flipped so b >= 0
    let total = nc + m;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < Rational::zero();
        let mut row: Vec<Rational> = a[i]
            .iter()
            .map(|x| if flip { -x } else { x.clone() })
            .collect();
        for j in 0..m {
            row.push(if i == j { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -&b[i] } else { b[i].clone() });
        rows.push(row);
    }
    // maximize -(sum of artificials); with the artificial basis the
    // reduced cost of structural column j is sum_i A[i][j]
    let mut cost: Vec<Rational> = (0..total)
        .map(|j| {
            if j < nc {
                rows.iter().map(|r| &r[j]).sum()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut objective: Rational = -rows.iter().map(|r| &r[total]).sum::<Rational>();

    loop {
        // Dantzig: most positive reduced cost enters
        let enter = match cost
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > Rational::zero())
            .max_by(|(_, x), (_, y)| x.partial_cmp(y).unwrap())
        {
            Some((j, _)) => j,
            None => break,
        };
        // lexicographic ratio test: minimize (b_i, row_i) / pivot entry
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if rows[i][enter] <= Rational::zero() {
                continue;
            }
            let Some(best) = leave else {
                leave = Some(i);
                continue;
            };
            let ratio_i = &rows[i][total] / &rows[i][enter];
            let ratio_b = &rows[best][total] / &rows[best][enter];
            if ratio_i < ratio_b {
                leave = Some(i);
            } else if ratio_i == ratio_b {
                // tie: compare the scaled rows column by column
                for j in 0..total {
                    let vi = &rows[i][j] / &rows[i][enter];
                    let vb = &rows[best][j] / &rows[best][enter];
                    if vi < vb {
                        leave = Some(i);
                        break;
                    }
                    if vi > vb {
                        break;
                    }
                }
            }
        }
        let Some(leave) = leave else {
            // unbounded phase-I cannot happen; treat defensively
            break;
        };

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
            objective += factor * &pivot_row[total];
        }
    }
    objective.is_zero()
}

/// Decides r-extendibility of a partially exchangeable law by searching for
/// an extending law directly: one variable per extension class, coupled to
/// the given weights through prefix tallies obtained by enumerating every
/// sequence of every class.
pub fn oracle_dfpe_extendible(d: &DfpeDistribution, r: &[u32]) -> Result<bool, OracleError> {
    let n = d.order().groups();
    if r.len() != n.len() || r.iter().zip(n).any(|(ri, ni)| ri < ni) {
        return Err(OracleError::InvalidTarget);
    }
    let bits: u32 = r.iter().sum();
    if bits > MAX_BITS {
        return Err(OracleError::TooLarge);
    }
    let classes_r = multi_index_range(r);
    let classes_n = multi_index_range(n);
    let col_of = |k: &[u32]| crate::combinatorics::lex_offset(r, k);
    let row_of = |l: &[u32]| crate::combinatorics::lex_offset(n, l);

    // tally[l][k]: sequences of extension class k whose per-group prefix
    // (first n_i bits of group i) lands in class l; size[k]: class size
    let mut tally = vec![vec![BigInt::zero(); classes_r.len()]; classes_n.len()];
    let mut size = vec![BigInt::zero(); classes_r.len()];
    for word in 0u64..(1u64 << bits) {
        let mut full = Vec::with_capacity(n.len());
        let mut prefix = Vec::with_capacity(n.len());
        let mut pos = 0u32;
        for (ri, ni) in r.iter().zip(n) {
            let mut kf = 0u32;
            let mut kp = 0u32;
            for j in 0..*ri {
                if (word >> (pos + j)) & 1 == 1 {
                    kf += 1;
                    if j < *ni {
                        kp += 1;
                    }
                }
            }
            pos += ri;
            full.push(kf);
            prefix.push(kp);
        }
        let col = col_of(&full);
        tally[row_of(&prefix)][col] += 1;
        size[col] += 1;
    }

    let a: Vec<Vec<Rational>> = tally
        .iter()
        .map(|row| {
            row.iter()
                .zip(&size)
                .map(|(t, s)| Rational::new(t.clone(), s.clone()))
                .collect()
        })
        .collect();
    Ok(feasible(&a, d.weights()))
}

/// Decides r-extendibility of a Markov exchangeable law the same way:
/// variables over length-r transition-count classes, prefix tallies by raw
/// sequence enumeration.
pub fn oracle_me_extendible(d: &MeDistribution, r: u32) -> Result<bool, OracleError> {
    let n = d.len();
    if r < n {
        return Err(OracleError::InvalidTarget);
    }
    if r > MAX_BITS {
        return Err(OracleError::TooLarge);
    }
    let phi_r = markov::phi(r);
    let phi_n = markov::phi(n);
    let find = |list: &[TransitionCountMatrix], c: [[u32; 2]; 2]| -> usize {
        list.iter()
            .position(|m| m.counts() == c)
            .expect("counts of an enumerated sequence are a valid class")
    };

    let mut tally = vec![vec![BigInt::zero(); phi_r.len()]; phi_n.len()];
    let mut size_r = vec![BigInt::zero(); phi_r.len()];
    for rest in 0u64..(1u64 << (r - 1)) {
        let mut prev = 0u32;
        let mut full = [[0u32; 2]; 2];
        let mut prefix = [[0u32; 2]; 2];
        for i in 0..(r - 1) {
            let next = ((rest >> i) & 1) as u32;
            full[prev as usize][next as usize] += 1;
            if i < n - 1 {
                prefix[prev as usize][next as usize] += 1;
            }
            prev = next;
        }
        let col = find(&phi_r, full);
        tally[find(&phi_n, prefix)][col] += 1;
        size_r[col] += 1;
    }

    let a: Vec<Vec<Rational>> = tally
        .iter()
        .map(|row| {
            row.iter()
                .zip(&size_r)
                .map(|(t, s)| Rational::new(t.clone(), s.clone()))
                .collect()
        })
        .collect();
    // each row of `a` yields the marginal class weight of its prefix class
    Ok(feasible(&a, d.weights()))
}
