//! Markov exchangeable binary sequences.
//!
//! A length-n binary sequence starting in state 0 is summarized by its 2x2
//! transition-count matrix N; Markov exchangeable laws put equal mass on
//! every sequence in a class [0,N]. This module enumerates the class space
//! Phi(0,n), counts class sizes (Whittle), converts between class weights
//! and the gamma coordinates w_{0,a,b}, marginalizes, and decides
//! r-extendibility by exact LP membership in the projected gamma polytope.
//!
//! The start state is fixed to 0 throughout, mirroring the convention
//! P(X_1 = 0) = 1; only the mixed-moment recovery takes start-1 data, and
//! it takes that data explicitly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::{binom, binom_signed};
use crate::polytope::{self, MembershipCertificate, PolytopeError};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkovError {
    FlowImbalance,
    NotIrreducible,
    NegativeCount,
    LengthMismatch { expected: usize, got: usize },
    NegativeWeight(TransitionCountMatrix),
    NotNormalized(Rational),
    IndexOutOfRange,
    SignConditionViolated(TransitionCountMatrix),
    InvalidMatrix,
    IndependenceViolated,
}

impl fmt::Display for MarkovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkovError::FlowImbalance => write!(f, "FlowImbalance"),
            MarkovError::NotIrreducible => write!(f, "NotIrreducible"),
            MarkovError::NegativeCount => write!(f, "NegativeCount"),
            MarkovError::LengthMismatch { expected, got } => {
                write!(f, "LengthMismatch: expected {expected} values, got {got}")
            }
            MarkovError::NegativeWeight(m) => write!(f, "NegativeWeight at {m}"),
            MarkovError::NotNormalized(s) => write!(f, "NotNormalized: weights sum to {s}"),
            MarkovError::IndexOutOfRange => write!(f, "IndexOutOfRange"),
            MarkovError::SignConditionViolated(m) => write!(f, "SignConditionViolated at {m}"),
            MarkovError::InvalidMatrix => write!(f, "InvalidMatrix"),
            MarkovError::IndependenceViolated => write!(f, "IndependenceViolated"),
        }
    }
}

impl core::error::Error for MarkovError {}

impl From<PolytopeError> for MarkovError {
    fn from(_: PolytopeError) -> Self {
        MarkovError::IndexOutOfRange
    }
}

/// First kind: the sequence returns to its start state. Second kind: it
/// ends in the other state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatrixKind {
    First,
    Second,
}

/// A validated 2x2 transition-count matrix with its start state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionCountMatrix {
    n00: u32,
    n01: u32,
    n10: u32,
    n11: u32,
    start: u8,
}

impl TransitionCountMatrix {
    /// Validates counts against the Eulerian flow-balance conditions and
    /// irreducibility of the visited-state graph.
    pub fn new(counts: [[i64; 2]; 2], start: u8) -> Result<Self, MarkovError> {
        debug_assert!(start <= 1);
        if counts.iter().flatten().any(|&c| c < 0) {
            return Err(MarkovError::NegativeCount);
        }
        let (n00, n01, n10, n11) = (
            counts[0][0] as u32,
            counts[0][1] as u32,
            counts[1][0] as u32,
            counts[1][1] as u32,
        );
        let m = TransitionCountMatrix {
            n00,
            n01,
            n10,
            n11,
            start,
        };
        // flow balance: either all states balanced, or one surplus exit at
        // the start and one surplus entry at the end
        let (cross_out, cross_in) = if start == 0 { (n01, n10) } else { (n10, n01) };
        if cross_out != cross_in && cross_out != cross_in + 1 {
            return Err(MarkovError::FlowImbalance);
        }
        if n01 == 0 && n10 == 0 {
            // only the start state can be visited
            let off_diag = if start == 0 { n11 } else { n00 };
            if off_diag > 0 {
                return Err(MarkovError::NotIrreducible);
            }
        }
        Ok(m)
    }

    pub fn counts(&self) -> [[u32; 2]; 2] {
        [[self.n00, self.n01], [self.n10, self.n11]]
    }

    pub fn start_state(&self) -> u8 {
        self.start
    }

    /// Implied sequence length, 1 + total transitions.
    pub fn len(&self) -> u32 {
        1 + self.n00 + self.n01 + self.n10 + self.n11
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kind(&self) -> MatrixKind {
        let (cross_out, cross_in) = if self.start == 0 {
            (self.n01, self.n10)
        } else {
            (self.n10, self.n01)
        };
        if cross_out == cross_in {
            MatrixKind::First
        } else {
            MatrixKind::Second
        }
    }

    /// Ending state, determined by the start state and the kind.
    pub fn ending_state(&self) -> u8 {
        match self.kind() {
            MatrixKind::First => self.start,
            MatrixKind::Second => 1 - self.start,
        }
    }

    fn le(&self, other: &TransitionCountMatrix) -> bool {
        self.n00 <= other.n00
            && self.n01 <= other.n01
            && self.n10 <= other.n10
            && self.n11 <= other.n11
    }
}

impl fmt::Display for TransitionCountMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]@{}",
            self.n00, self.n01, self.n10, self.n11, self.start
        )
    }
}

/// All transition-count matrices of length-n sequences starting in 0, as
/// (first kind, second kind), each sorted by (n01, n00) ascending.
pub fn enumerate_phi(n: u32) -> (Vec<TransitionCountMatrix>, Vec<TransitionCountMatrix>) {
    assert!(n >= 1, "sequence length must be >= 1");
    let t = n - 1; // transitions
    let mut first = Vec::new();
    // n01 = n10 = 0: the start state is never left
    first.push(TransitionCountMatrix {
        n00: t,
        n01: 0,
        n10: 0,
        n11: 0,
        start: 0,
    });
    let mut k = 1;
    while 2 * k <= t {
        for n00 in 0..=(t - 2 * k) {
            first.push(TransitionCountMatrix {
                n00,
                n01: k,
                n10: k,
                n11: t - 2 * k - n00,
                start: 0,
            });
        }
        k += 1;
    }
    let mut second = Vec::new();
    let mut k = 0;
    while 2 * k + 1 <= t {
        for n00 in 0..=(t - 2 * k - 1) {
            second.push(TransitionCountMatrix {
                n00,
                n01: k + 1,
                n10: k,
                n11: t - 2 * k - 1 - n00,
                start: 0,
            });
        }
        k += 1;
    }
    (first, second)
}

/// Phi(0,n) in the canonical order: first kind then second kind.
pub fn phi(n: u32) -> Vec<TransitionCountMatrix> {
    let (mut first, second) = enumerate_phi(n);
    first.extend(second);
    first
}

/// Size of the class [x1, N]: binary closed form of Whittle's count.
pub fn whittle_count(m: &TransitionCountMatrix) -> BigInt {
    let n0 = (m.n00 + m.n01) as i64;
    let n1 = (m.n10 + m.n11) as i64;
    if m.ending_state() == 0 {
        binom_signed(n0, m.n00 as i64) * binom_signed(n1 - 1, m.n11 as i64)
    } else {
        binom_signed(n0 - 1, m.n00 as i64) * binom_signed(n1, m.n11 as i64)
    }
}

/// Whittle's count through the determinant formula, used as a cross-check
/// of the closed form.
pub fn whittle_count_determinant(m: &TransitionCountMatrix) -> BigInt {
    let n0 = (m.n00 + m.n01) as u64;
    let n1 = (m.n10 + m.n11) as u64;
    let det = if m.ending_state() == 0 {
        if n1 == 0 {
            Rational::one()
        } else {
            Rational::new(BigInt::from(m.n10), BigInt::from(n1))
        }
    } else if n0 == 0 {
        Rational::one()
    } else {
        Rational::new(BigInt::from(m.n01), BigInt::from(n0))
    };
    let factorial = |x: u64| -> BigInt {
        let mut acc = BigInt::one();
        for i in 2..=x {
            acc *= BigInt::from(i);
        }
        acc
    };
    let num = factorial(n0) * factorial(n1);
    let den = factorial(m.n00 as u64)
        * factorial(m.n01 as u64)
        * factorial(m.n10 as u64)
        * factorial(m.n11 as u64);
    let count = det * Rational::new(num, den);
    debug_assert!(count.is_integer());
    count.to_integer()
}

/// Number of length-`target` sequences that extend a prefix with counts `k`
/// into the class of `n`; 0 when the combination is infeasible. Both
/// matrices must start in 0.
fn suffix_count(n: &TransitionCountMatrix, k: &TransitionCountMatrix) -> BigInt {
    if !k.le(n) {
        return BigInt::zero();
    }
    let n0 = (n.n00 + n.n01) as i64;
    let n1 = (n.n10 + n.n11) as i64;
    let k0 = (k.n00 + k.n01) as i64;
    let k1 = (k.n10 + k.n11) as i64;
    let d00 = (n.n00 - k.n00) as i64;
    let d11 = (n.n11 - k.n11) as i64;
    if n.ending_state() == 0 {
        binom_signed(n0 - k0, d00) * binom_signed(n1 - k1 - 1, d11)
    } else {
        binom_signed(n0 - k0 - 1, d00) * binom_signed(n1 - k1, d11)
    }
}

/// A Markov exchangeable law of length n, start state fixed to 0, stored
/// densely over the canonical order of Phi(0,n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeDistribution {
    n: u32,
    weights: Vec<Rational>,
}

impl MeDistribution {
    pub fn new(n: u32, weights: Vec<Rational>) -> Result<Self, MarkovError> {
        let matrices = phi(n);
        if weights.len() != matrices.len() {
            return Err(MarkovError::LengthMismatch {
                expected: matrices.len(),
                got: weights.len(),
            });
        }
        for (m, w) in matrices.iter().zip(&weights) {
            if *w < Rational::zero() {
                return Err(MarkovError::NegativeWeight(*m));
            }
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(MarkovError::NotNormalized(sum));
        }
        Ok(MeDistribution { n, weights })
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn matrices(&self) -> Vec<TransitionCountMatrix> {
        phi(self.n)
    }

    /// Per-sequence probabilities p = w / |class|, aligned with the
    /// canonical Phi order.
    pub fn point_probs(&self) -> Vec<Rational> {
        self.matrices()
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w / Rational::from_integer(whittle_count(m)))
            .collect()
    }

    /// Point probability of the length-k prefix class `k_mat` (k <= n).
    pub fn marginal_point_prob(&self, k_mat: &TransitionCountMatrix) -> Rational {
        let mut acc = Rational::zero();
        for (m, p) in self.matrices().iter().zip(self.point_probs()) {
            if p.is_zero() {
                continue;
            }
            let count = suffix_count(m, k_mat);
            if !count.is_zero() {
                acc += Rational::from_integer(count) * p;
            }
        }
        acc
    }

    /// The k-step marginal law, 1 <= k <= n.
    pub fn marginalize(&self, k: u32) -> Result<MeDistribution, MarkovError> {
        if k < 1 || k > self.n {
            return Err(MarkovError::IndexOutOfRange);
        }
        let weights = phi(k)
            .iter()
            .map(|km| {
                Rational::from_integer(whittle_count(km)) * self.marginal_point_prob(km)
            })
            .collect();
        MeDistribution::new(k, weights)
    }

    /// The gamma coordinates w_{0,a,b} of this law.
    pub fn gamma(&self) -> GammaPoint {
        let values = l_pairs(self.n)
            .iter()
            .map(|&(a, b)| self.marginal_point_prob(&pair_matrix(self.n, a, b)))
            .collect();
        GammaPoint {
            n: self.n,
            values,
        }
    }
}

/// The index set L_n of gamma coordinates: all (a,b) with a+b <= n-2 in
/// lexicographic order, then the special pair (n-1, 0) last.
pub fn l_pairs(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    if n >= 2 {
        for a in 0..=(n - 2) {
            for b in 0..=(n - 2 - a) {
                out.push((a, b));
            }
        }
    }
    out.push((n - 1, 0));
    out
}

/// The prefix matrix whose point probability is w_{0,a,b}: `a` zero-stay
/// transitions, one 0->1 transition, `b` one-stay transitions — except the
/// special pair (n-1,0), which is the all-zeros sequence of length n.
fn pair_matrix(n: u32, a: u32, b: u32) -> TransitionCountMatrix {
    if a + b == n - 1 {
        debug_assert_eq!((a, b), (n - 1, 0));
        TransitionCountMatrix {
            n00: n - 1,
            n01: 0,
            n10: 0,
            n11: 0,
            start: 0,
        }
    } else {
        TransitionCountMatrix {
            n00: a,
            n01: 1,
            n10: 0,
            n11: b,
            start: 0,
        }
    }
}

/// The w_{0,a,b} coordinates of a length-n ME law (or of a projected
/// vertex). These are moment-like: they do not sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPoint {
    n: u32,
    values: Vec<Rational>,
}

impl GammaPoint {
    pub fn new(n: u32, values: Vec<Rational>) -> Result<Self, MarkovError> {
        let expected = l_pairs(n).len();
        if values.len() != expected {
            return Err(MarkovError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(GammaPoint { n, values })
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, a: u32, b: u32) -> Option<&Rational> {
        l_pairs(self.n)
            .iter()
            .position(|&p| p == (a, b))
            .map(|i| &self.values[i])
    }

    /// Reconstructed point probabilities over Phi(0,n), through the
    /// difference-operator inverse. Negative entries are the sign-condition
    /// violations; this does not check them.
    fn point_probs(&self) -> Vec<(TransitionCountMatrix, Rational)> {
        let index: BTreeMap<(u32, u32), usize> = l_pairs(self.n)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        phi(self.n)
            .into_iter()
            .map(|m| {
                let p = if m.n01 == 0 {
                    // the all-zeros class carries the special coordinate
                    self.values[index[&(self.n - 1, 0)]].clone()
                } else {
                    let c = m.n01 - 1;
                    let d = m.n10;
                    let mut acc = Rational::zero();
                    for i in 0..=c {
                        for j in 0..=d {
                            let mut coeff = binom(c as u64, i as i64) * binom(d as u64, j as i64);
                            if (i + j) % 2 == 1 {
                                coeff = -coeff;
                            }
                            let v = &self.values[index[&(m.n00 + i, m.n11 + j)]];
                            acc += Rational::from_integer(coeff) * v;
                        }
                    }
                    acc
                };
                (m, p)
            })
            .collect()
    }

    /// Matrices whose reconstructed point probability is negative; empty
    /// exactly when the point satisfies the gamma sign conditions.
    pub fn check_conditions(&self) -> Vec<TransitionCountMatrix> {
        self.point_probs()
            .into_iter()
            .filter(|(_, p)| *p < Rational::zero())
            .map(|(m, _)| m)
            .collect()
    }

    /// Inverse of `MeDistribution::gamma`: recovers the class weights,
    /// failing on a sign-condition violation or if the reconstructed
    /// weights do not normalize (the gamma coordinates do not pin the
    /// total mass by themselves).
    pub fn to_weights(&self) -> Result<MeDistribution, MarkovError> {
        let mut weights = Vec::new();
        for (m, p) in self.point_probs() {
            if p < Rational::zero() {
                return Err(MarkovError::SignConditionViolated(m));
            }
            weights.push(Rational::from_integer(whittle_count(&m)) * p);
        }
        MeDistribution::new(self.n, weights)
    }
}

/// The projection onto the L_n coordinates of the gamma vertex of the
/// extremal law concentrated on the class of `m` (a matrix of some length
/// r >= n, start 0).
pub fn gamma_vertex(m: &TransitionCountMatrix, n: u32) -> Result<GammaPoint, MarkovError> {
    if m.start != 0 || m.len() < n || n < 1 {
        return Err(MarkovError::InvalidMatrix);
    }
    let count = Rational::from_integer(whittle_count(m));
    let values = l_pairs(n)
        .iter()
        .map(|&(a, b)| {
            Rational::from_integer(suffix_count(m, &pair_matrix(n, a, b))) / &count
        })
        .collect();
    Ok(GammaPoint { n, values })
}

/// Decides whether `d` is (at least) r-extendible, r >= n.
pub fn me_extendible(
    d: &MeDistribution,
    r: u32,
) -> Result<MembershipCertificate, MarkovError> {
    if r < d.len() {
        return Err(MarkovError::IndexOutOfRange);
    }
    let point = d.gamma();
    let vertices: Vec<Vec<Rational>> = phi(r)
        .iter()
        .map(|m| gamma_vertex(m, d.len()).map(|g| g.values))
        .collect::<Result<_, _>>()?;
    Ok(polytope::lp_membership(&point.values, &vertices)?)
}

/// Inputs for mixed-moment recovery: the law must have its first state
/// independent of the transition-count statistic, and both start-state
/// blocks are supplied explicitly.
///
/// `gamma0` carries the w_{0,a,b} of the law conditioned on starting in 0;
/// `p1_blocks[b]` is the unconditional probability of the sequence that
/// starts in 1 and makes exactly `b` one-stay transitions and nothing else.
#[derive(Debug, Clone)]
pub struct MixedMomentInput {
    pub q0: Rational,
    pub q1: Rational,
    pub gamma0: GammaPoint,
    pub p1_blocks: Vec<Rational>,
}

/// Recovers the mixed moments m_{a,b} for a+b <= n-1 by the one-step
/// recurrence, verifying every consistency relation the inputs make
/// checkable.
pub fn me_mixed_moments(
    input: &MixedMomentInput,
) -> Result<BTreeMap<(u32, u32), Rational>, MarkovError> {
    let n = input.gamma0.len();
    if input.q0 <= Rational::zero() || input.q1 <= Rational::zero() {
        return Err(MarkovError::IndependenceViolated);
    }
    if &input.q0 + &input.q1 != Rational::one() {
        return Err(MarkovError::IndependenceViolated);
    }
    if input.p1_blocks.len() != n as usize {
        return Err(MarkovError::LengthMismatch {
            expected: n as usize,
            got: input.p1_blocks.len(),
        });
    }
    let mut m: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for b in 0..n {
        m.insert((0, b), &input.p1_blocks[b as usize] / &input.q1);
    }
    if m[&(0, 0)] != Rational::one() {
        return Err(MarkovError::IndependenceViolated);
    }
    for a in 1..n {
        for b in 0..(n - a) {
            let gamma = input
                .gamma0
                .value(a - 1, b)
                .ok_or(MarkovError::IndexOutOfRange)?;
            let val = &m[&(a - 1, b)] - gamma;
            m.insert((a, b), val);
        }
    }
    // consistency induced by the independence assumption
    for (&(a, b), v) in &m {
        if *v < Rational::zero() || *v > Rational::one() {
            return Err(MarkovError::IndependenceViolated);
        }
        if a > 0 && *v > m[&(a - 1, b)] {
            return Err(MarkovError::IndependenceViolated);
        }
        if b > 0 && *v > m[&(a, b - 1)] {
            return Err(MarkovError::IndependenceViolated);
        }
    }
    Ok(m)
}

/// Necessary conditions for infinite extendibility of an X_1-independent
/// ME law, phrased on its mixed moments: nonnegative even central moments
/// and a nonnegative-definite 2x2 covariance matrix of the would-be
/// mixing pair. Necessary only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeInfiniteReport {
    pub even_violations: Vec<(u32, u32)>,
    pub psd: bool,
    pub cov_matrix: Vec<Vec<Rational>>,
}

pub fn me_infinite_necessary(m: &BTreeMap<(u32, u32), Rational>) -> MeInfiniteReport {
    let max_order = m.keys().map(|&(a, b)| a + b).max().unwrap_or(0);
    let mean0 = m.get(&(1, 0)).cloned().unwrap_or_else(Rational::zero);
    let mean1 = m.get(&(0, 1)).cloned().unwrap_or_else(Rational::zero);
    let moment = |a: u32, b: u32| -> Rational {
        if (a, b) == (0, 0) {
            Rational::one()
        } else {
            m[&(a, b)].clone()
        }
    };
    let pow = |base: &Rational, e: u32| -> Rational {
        let mut acc = Rational::one();
        for _ in 0..e {
            acc *= base;
        }
        acc
    };
    let cov = |a: u32, b: u32| -> Rational {
        let mut acc = Rational::zero();
        for i in 0..=a {
            for j in 0..=b {
                let mut coeff = Rational::from_integer(
                    binom(a as u64, i as i64) * binom(b as u64, j as i64),
                ) * pow(&mean0, i)
                    * pow(&mean1, j);
                if (i + j) % 2 == 1 {
                    coeff = -coeff;
                }
                acc += coeff * moment(a - i, b - j);
            }
        }
        acc
    };
    let mut even_violations = Vec::new();
    for a in (0..=max_order).step_by(2) {
        for b in (0..=(max_order - a)).step_by(2) {
            if a + b < 2 {
                continue;
            }
            if cov(a, b) < Rational::zero() {
                even_violations.push((a, b));
            }
        }
    }
    let cov_matrix = vec![
        vec![cov(2, 0), cov(1, 1)],
        vec![cov(1, 1), cov(0, 2)],
    ];
    let psd = polytope::is_nonneg_definite(&cov_matrix);
    MeInfiniteReport {
        even_violations,
        psd,
        cov_matrix,
    }
}


#[cfg(test)]
pub(crate) use tests::{iid_start0, point_mass};
