//! Partially exchangeable binary distributions in the sense of de Finetti.
//!
//! A distribution of order (n_1,...,n_g) is carried by the weights
//! `w^{(n)}_{k}` of the per-group success counts. This module converts
//! exactly among the three parameterizations (class weights, moments
//! `w_{k}`, generalized covariances), marginalizes, builds the vertices of
//! the moment polytope and its projections, and decides r-extendibility by
//! exact LP membership.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::{binom, falling, lex_offset, multi_index_range, MultiIndex};
use crate::polytope::{self, MembershipCertificate, PolytopeError};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DfpeError {
    NegativeWeight(MultiIndex),
    NotNormalized(Rational),
    LengthMismatch { expected: usize, got: usize },
    IndexOutOfRange,
    SignConditionViolated(MultiIndex),
    /// Target order has a different number of groups or is not
    /// componentwise >= the source order.
    OrderMismatch,
    InvalidOrder,
}

impl fmt::Display for DfpeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DfpeError::NegativeWeight(k) => write!(f, "NegativeWeight at {k}"),
            DfpeError::NotNormalized(sum) => write!(f, "NotNormalized: weights sum to {sum}"),
            DfpeError::LengthMismatch { expected, got } => {
                write!(f, "LengthMismatch: expected {expected} values, got {got}")
            }
            DfpeError::IndexOutOfRange => write!(f, "IndexOutOfRange"),
            DfpeError::SignConditionViolated(k) => {
                write!(f, "SignConditionViolated at {k}")
            }
            DfpeError::OrderMismatch => write!(f, "OrderMismatch"),
            DfpeError::InvalidOrder => write!(f, "InvalidOrder: each group size must be >= 1"),
        }
    }
}

impl core::error::Error for DfpeError {}

impl From<PolytopeError> for DfpeError {
    fn from(_: PolytopeError) -> Self {
        DfpeError::OrderMismatch
    }
}

/// Group sizes (n_1,...,n_g), each >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DfpeOrder(Vec<u32>);

impl DfpeOrder {
    pub fn new(group_sizes: Vec<u32>) -> Result<Self, DfpeError> {
        if group_sizes.is_empty() || group_sizes.iter().any(|&n| n == 0) {
            return Err(DfpeError::InvalidOrder);
        }
        Ok(DfpeOrder(group_sizes))
    }

    pub fn groups(&self) -> &[u32] {
        &self.0
    }

    pub fn g(&self) -> usize {
        self.0.len()
    }

    /// Number of classes, (n_1+1)...(n_g+1).
    pub fn dim(&self) -> usize {
        self.0.iter().map(|&n| n as usize + 1).product()
    }

    /// Canonical lexicographic index list.
    pub fn indices(&self) -> Vec<MultiIndex> {
        multi_index_range(&self.0)
    }

    pub fn offset(&self, k: &[u32]) -> usize {
        lex_offset(&self.0, k)
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        k.0.len() == self.0.len() && k.0.iter().zip(&self.0).all(|(ki, ni)| ki <= ni)
    }

    pub fn le(&self, other: &DfpeOrder) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for DfpeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Number of sequences in the class with per-group counts `k`:
/// the product of binomials C(n_i, k_i).
pub fn class_count(order: &DfpeOrder, k: &MultiIndex) -> Result<BigInt, DfpeError> {
    if !order.contains(k) {
        return Err(DfpeError::IndexOutOfRange);
    }
    Ok(k.0
        .iter()
        .zip(order.groups())
        .map(|(&ki, &ni)| binom(ni as u64, ki as i64))
        .product())
}

/// A validated DFPE distribution: nonnegative weights summing to exactly 1,
/// stored densely in the canonical lexicographic index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfpeDistribution {
    order: DfpeOrder,
    weights: Vec<Rational>,
}

impl DfpeDistribution {
    pub fn new(order: DfpeOrder, weights: Vec<Rational>) -> Result<Self, DfpeError> {
        if weights.len() != order.dim() {
            return Err(DfpeError::LengthMismatch {
                expected: order.dim(),
                got: weights.len(),
            });
        }
        for (idx, w) in order.indices().iter().zip(&weights) {
            if *w < Rational::zero() {
                return Err(DfpeError::NegativeWeight(idx.clone()));
            }
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(DfpeError::NotNormalized(sum));
        }
        Ok(DfpeDistribution { order, weights })
    }

    pub fn order(&self) -> &DfpeOrder {
        &self.order
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, k: &MultiIndex) -> &Rational {
        &self.weights[self.order.offset(&k.0)]
    }

    /// Per-sequence probabilities p = w / class count.
    pub fn point_probs(&self) -> Vec<Rational> {
        self.order
            .indices()
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| {
                let count = class_count(&self.order, k).expect("index in range");
                w / Rational::from_integer(count)
            })
            .collect()
    }

    /// Law of the initial (m_1,...,m_g) sub-groups, by the hypergeometric
    /// marginalization formula. Groups with m_i = 0 are dropped from the
    /// output order; at least one m_i must be >= 1.
    pub fn marginalize(&self, m: &[u32]) -> Result<DfpeDistribution, DfpeError> {
        let n = self.order.groups();
        if m.len() != n.len() || m.iter().zip(n).any(|(mi, ni)| mi > ni) {
            return Err(DfpeError::IndexOutOfRange);
        }
        let kept: Vec<usize> = (0..m.len()).filter(|&i| m[i] >= 1).collect();
        if kept.is_empty() {
            return Err(DfpeError::IndexOutOfRange);
        }
        let out_order = DfpeOrder::new(kept.iter().map(|&i| m[i]).collect())?;
        let mut out = vec![Rational::zero(); out_order.dim()];
        for (k, w) in self.order.indices().iter().zip(&self.weights) {
            if w.is_zero() {
                continue;
            }
            for (pos, l) in out_order.indices().iter().enumerate() {
                let mut coeff = Rational::one();
                let mut feasible = true;
                for (slot, &i) in kept.iter().enumerate() {
                    let (ki, ni, mi, li) =
                        (k.0[i] as u64, n[i] as u64, m[i] as u64, l.0[slot] as u64);
                    let num = binom(ki, li as i64) * binom(ni - ki, mi as i64 - li as i64);
                    if num.is_zero() {
                        feasible = false;
                        break;
                    }
                    coeff *= Rational::new(num, binom(ni, mi as i64));
                }
                if feasible {
                    out[pos] += coeff * w;
                }
            }
        }
        DfpeDistribution::new(out_order, out)
    }

    /// The moment parameterization w_{k} = E[prod of k_i variables from
    /// each group].
    pub fn moments(&self) -> MomentVector {
        let n = self.order.groups();
        let indices = self.order.indices();
        let mut values = Vec::with_capacity(indices.len());
        for k in &indices {
            let mut acc = Rational::zero();
            for (i, w) in indices.iter().zip(&self.weights) {
                if w.is_zero() {
                    continue;
                }
                let mut coeff = Rational::one();
                let mut nonzero = true;
                for ((&ki, &ii), &ni) in k.0.iter().zip(&i.0).zip(n) {
                    let num = falling(ii as u64, ki as u64);
                    if num.is_zero() {
                        nonzero = false;
                        break;
                    }
                    coeff *= Rational::new(num, falling(ni as u64, ki as u64));
                }
                if nonzero {
                    acc += coeff * w;
                }
            }
            values.push(acc);
        }
        MomentVector {
            order: self.order.clone(),
            values,
        }
    }
}

/// The w_{k} coordinates of a point of the moment polytope; the all-zero
/// coordinate is fixed to 1 so the space is affine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentVector {
    order: DfpeOrder,
    values: Vec<Rational>,
}

impl MomentVector {
    pub fn new(order: DfpeOrder, values: Vec<Rational>) -> Result<Self, DfpeError> {
        if values.len() != order.dim() {
            return Err(DfpeError::LengthMismatch {
                expected: order.dim(),
                got: values.len(),
            });
        }
        if !values[0].is_one() {
            return Err(DfpeError::SignConditionViolated(MultiIndex(vec![
                0;
                order.g()
            ])));
        }
        Ok(MomentVector { order, values })
    }

    pub fn order(&self) -> &DfpeOrder {
        &self.order
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, k: &MultiIndex) -> &Rational {
        &self.values[self.order.offset(&k.0)]
    }

    /// Marginal mean of group i (coordinate with a single 1).
    pub fn mean(&self, group: usize) -> Rational {
        let mut k = vec![0u32; self.order.g()];
        k[group] = 1;
        self.values[self.order.offset(&k)].clone()
    }

    /// Signed difference (-1)^{sum(n-k)} D^{n-k}(w_k); nonnegativity for
    /// every k characterizes membership in the moment polytope.
    fn signed_difference(&self, k: &MultiIndex) -> Rational {
        let n = self.order.groups();
        let bound: Vec<u32> = n.iter().zip(&k.0).map(|(ni, ki)| ni - ki).collect();
        let mut acc = Rational::zero();
        for j in multi_index_range(&bound) {
            let mut coeff: BigInt = bound
                .iter()
                .zip(&j.0)
                .map(|(&bi, &ji)| binom(bi as u64, ji as i64))
                .product();
            if j.sum() % 2 == 1 {
                coeff = -coeff;
            }
            let shifted: Vec<u32> = k.0.iter().zip(&j.0).map(|(a, b)| a + b).collect();
            acc += Rational::from_integer(coeff) * &self.values[self.order.offset(&shifted)];
        }
        acc
    }

    /// All multi-indices violating the sign conditions; empty exactly when
    /// the vector lies in the moment polytope.
    pub fn check_conditions(&self) -> Vec<MultiIndex> {
        self.order
            .indices()
            .into_iter()
            .filter(|k| self.signed_difference(k) < Rational::zero())
            .collect()
    }

    /// Inverse of `DfpeDistribution::moments`: recovers the class weights
    /// through the difference operator, failing if some weight would be
    /// negative.
    pub fn to_weights(&self) -> Result<DfpeDistribution, DfpeError> {
        let n = self.order.groups();
        let indices = self.order.indices();
        let mut weights = Vec::with_capacity(indices.len());
        for k in &indices {
            let diff = self.signed_difference(k);
            if diff < Rational::zero() {
                return Err(DfpeError::SignConditionViolated(k.clone()));
            }
            let count: BigInt = k
                .0
                .iter()
                .zip(n)
                .map(|(&ki, &ni)| binom(ni as u64, ki as i64))
                .product();
            weights.push(Rational::from_integer(count) * diff);
        }
        DfpeDistribution::new(self.order.clone(), weights)
    }

    /// Generalized covariances via the alternating binomial sum.
    pub fn to_covariances(&self) -> CovarianceVector {
        let means: Vec<Rational> = (0..self.order.g()).map(|i| self.mean(i)).collect();
        let indices = self.order.indices();
        let mut entries = Vec::with_capacity(indices.len());
        for k in &indices {
            let mut acc = Rational::zero();
            for i in multi_index_range(&k.0) {
                let mut coeff = Rational::one();
                for ((&ki, &ii), mean) in k.0.iter().zip(&i.0).zip(&means) {
                    coeff *= Rational::from_integer(binom(ki as u64, ii as i64))
                        * pow_rational(mean, ii);
                }
                if i.sum() % 2 == 1 {
                    coeff = -coeff;
                }
                let rest: Vec<u32> = k.0.iter().zip(&i.0).map(|(a, b)| a - b).collect();
                acc += coeff * &self.values[self.order.offset(&rest)];
            }
            entries.push(acc);
        }
        CovarianceVector {
            order: self.order.clone(),
            means,
            entries,
        }
    }
}

fn pow_rational(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Mean vector plus generalized covariances Cov_{k}. Stored densely in the
/// canonical layout with the conventional entries Cov_{0,...,0} = 1 and 0
/// at every single-1 index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceVector {
    order: DfpeOrder,
    means: Vec<Rational>,
    entries: Vec<Rational>,
}

/// Necessary conditions for an infinite de Finetti-style mixture: every
/// even-order covariance must be nonnegative, and the pairwise covariance
/// matrix of the would-be mixing variables must be nonnegative definite.
/// These are necessary conditions only; passing them proves nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfiniteNecessaryReport {
    pub even_cov_violations: Vec<MultiIndex>,
    pub psd: bool,
    /// Groups (by position) included in the covariance matrix: those with
    /// n_i >= 2, since the diagonal needs a second-order covariance.
    pub psd_groups: Vec<usize>,
    pub cov_matrix: Vec<Vec<Rational>>,
}

impl CovarianceVector {
    pub fn new(
        order: DfpeOrder,
        means: Vec<Rational>,
        entries: Vec<Rational>,
    ) -> Result<Self, DfpeError> {
        if means.len() != order.g() || entries.len() != order.dim() {
            return Err(DfpeError::LengthMismatch {
                expected: order.dim(),
                got: entries.len(),
            });
        }
        let mut entries = entries;
        // enforce the conventional entries
        entries[0] = Rational::one();
        for i in 0..order.g() {
            let mut k = vec![0u32; order.g()];
            k[i] = 1;
            entries[order.offset(&k)] = Rational::zero();
        }
        Ok(CovarianceVector {
            order,
            means,
            entries,
        })
    }

    pub fn order(&self) -> &DfpeOrder {
        &self.order
    }

    pub fn means(&self) -> &[Rational] {
        &self.means
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn covariance(&self, k: &MultiIndex) -> &Rational {
        &self.entries[self.order.offset(&k.0)]
    }

    /// Inverse binomial transform back to the moment parameterization.
    pub fn to_moments(&self) -> MomentVector {
        let indices = self.order.indices();
        let mut values = Vec::with_capacity(indices.len());
        for k in &indices {
            let mut acc = Rational::zero();
            for i in multi_index_range(&k.0) {
                let mut coeff = Rational::one();
                for ((&ki, &ii), mean) in k.0.iter().zip(&i.0).zip(&self.means) {
                    coeff *= Rational::from_integer(binom(ki as u64, ii as i64))
                        * pow_rational(mean, ii);
                }
                let rest: Vec<u32> = k.0.iter().zip(&i.0).map(|(a, b)| a - b).collect();
                acc += coeff * &self.entries[self.order.offset(&rest)];
            }
            values.push(acc);
        }
        MomentVector {
            order: self.order.clone(),
            values,
        }
    }

    pub fn check_infinite_necessary(&self) -> InfiniteNecessaryReport {
        let n = self.order.groups();
        let mut even_cov_violations = Vec::new();
        for k in self.order.indices() {
            if k.sum() == 0 || k.0.iter().any(|ki| ki % 2 == 1) {
                continue;
            }
            if *self.covariance(&k) < Rational::zero() {
                even_cov_violations.push(k);
            }
        }
        let psd_groups: Vec<usize> = (0..self.order.g()).filter(|&i| n[i] >= 2).collect();
        let mut cov_matrix = Vec::with_capacity(psd_groups.len());
        for &i in &psd_groups {
            let mut row = Vec::with_capacity(psd_groups.len());
            for &j in &psd_groups {
                let mut k = vec![0u32; self.order.g()];
                if i == j {
                    k[i] = 2;
                } else {
                    k[i] = 1;
                    k[j] = 1;
                }
                row.push(self.entries[self.order.offset(&k)].clone());
            }
            cov_matrix.push(row);
        }
        let psd = polytope::is_nonneg_definite(&cov_matrix);
        InfiniteNecessaryReport {
            even_cov_violations,
            psd,
            psd_groups,
            cov_matrix,
        }
    }
}

/// The projected vertex of the extendibility polytope: image in the order-n
/// coordinates of the extremal order-r distribution concentrated on class
/// `k`.
pub fn lambda_vertex(
    k: &MultiIndex,
    r: &DfpeOrder,
    n: &DfpeOrder,
) -> Result<MomentVector, DfpeError> {
    if !r.contains(k) || !n.le(r) {
        return Err(DfpeError::IndexOutOfRange);
    }
    let mut values = Vec::with_capacity(n.dim());
    for l in n.indices() {
        if l.0.iter().zip(&k.0).any(|(li, ki)| li > ki) {
            values.push(Rational::zero());
            continue;
        }
        let mut coord = Rational::one();
        for ((&li, &ki), &ri) in l.0.iter().zip(&k.0).zip(r.groups()) {
            coord *= Rational::new(
                falling(ki as u64, li as u64),
                falling(ri as u64, li as u64),
            );
        }
        values.push(coord);
    }
    Ok(MomentVector {
        order: n.clone(),
        values,
    })
}

/// All vertices of the projection of the order-r moment polytope onto the
/// order-n coordinates, in canonical order of `k`. The theorem behind this
/// guarantees every one of them really is a vertex; no deduplication is
/// needed.
pub fn extendibility_vertices(
    n: &DfpeOrder,
    r: &DfpeOrder,
) -> Result<Vec<MomentVector>, DfpeError> {
    if !n.le(r) {
        return Err(DfpeError::OrderMismatch);
    }
    r.indices()
        .iter()
        .map(|k| lambda_vertex(k, r, n))
        .collect()
}

/// Decides whether `dist` is (at least) r-extendible.
pub fn dfpe_extendible(
    dist: &DfpeDistribution,
    r: &DfpeOrder,
) -> Result<MembershipCertificate, DfpeError> {
    if !dist.order().le(r) {
        return Err(DfpeError::OrderMismatch);
    }
    let point = dist.moments();
    let vertices: Vec<Vec<Rational>> = extendibility_vertices(dist.order(), r)?
        .into_iter()
        .map(|v| v.values)
        .collect();
    Ok(polytope::lp_membership(&point.values, &vertices)?)
}

/// Result of a frontier search up to `max_r`.
///
/// `confirmed` holds orders that are extendible while no one-step extension
/// is; `unresolved` holds orders that are maximal within the search box but
/// still extendible toward its boundary, so the bound was too small to
/// settle them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierReport {
    pub confirmed: Vec<DfpeOrder>,
    pub unresolved: Vec<DfpeOrder>,
}

impl FrontierReport {
    pub fn bound_too_small(&self) -> bool {
        !self.unresolved.is_empty()
    }
}

/// Breadth-first search for all maximal extendible orders below `max_r`,
/// pruning through downward closure of extendibility.
pub fn extendibility_frontier(
    dist: &DfpeDistribution,
    max_r: &DfpeOrder,
) -> Result<FrontierReport, DfpeError> {
    let n = dist.order().clone();
    if !n.le(max_r) {
        return Err(DfpeError::OrderMismatch);
    }
    let g = n.g();
    let mut status: BTreeMap<Vec<u32>, bool> = BTreeMap::new();
    status.insert(n.groups().to_vec(), true);
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    queue.push_back(n.groups().to_vec());
    while let Some(r) = queue.pop_front() {
        for i in 0..g {
            let mut succ = r.clone();
            succ[i] += 1;
            if succ[i] > max_r.groups()[i] || status.contains_key(&succ) {
                continue;
            }
            // downward closure: all in-range predecessors must be extendible
            let pruned = (0..g).any(|j| {
                if succ[j] == 0 || succ[j] - 1 < n.groups()[j] {
                    return false;
                }
                let mut pred = succ.clone();
                pred[j] -= 1;
                status.get(&pred) == Some(&false)
            });
            let extendible = if pruned {
                false
            } else {
                dfpe_extendible(dist, &DfpeOrder(succ.clone()))?.is_inside()
            };
            status.insert(succ.clone(), extendible);
            if extendible {
                queue.push_back(succ);
            }
        }
    }

    let mut confirmed = Vec::new();
    let mut unresolved = Vec::new();
    for (r, &ext) in &status {
        if !ext {
            continue;
        }
        let mut any_ext_succ = false;
        let mut any_untested_succ = false;
        for i in 0..g {
            let mut succ = r.clone();
            succ[i] += 1;
            if succ[i] > max_r.groups()[i] {
                any_untested_succ = true;
            } else if status.get(&succ) == Some(&true) {
                any_ext_succ = true;
            }
        }
        if any_ext_succ {
            continue;
        }
        if any_untested_succ {
            unresolved.push(DfpeOrder(r.clone()));
        } else {
            confirmed.push(DfpeOrder(r.clone()));
        }
    }
    Ok(FrontierReport {
        confirmed,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    pub(crate) fn paper_example() -> DfpeDistribution {
        // lexicographic (k1,k2): rows k1=0,1,2 over k2=0,1,2
        let w = [
            (3, 16),
            (3, 16),
            (0, 1),
            (1, 16),
            (3, 16),
            (0, 1),
            (1, 16),
            (0, 1),
            (5, 16),
        ];
        DfpeDistribution::new(
            DfpeOrder::new(vec![2, 2]).unwrap(),
            w.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
        .unwrap()
    }

    fn iid_fair(order: &[u32]) -> DfpeDistribution {
        let order = DfpeOrder::new(order.to_vec()).unwrap();
        let weights = order
            .indices()
            .iter()
            .map(|k| {
                let count = class_count(&order, k).unwrap();
                let total: u32 = order.groups().iter().sum();
                Rational::new(count, BigInt::from(2u64).pow(total))
            })
            .collect();
        DfpeDistribution::new(order, weights).unwrap()
    }

    #[test]
    fn validation_errors() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        let mut w = vec![Rational::zero(); 9];
        w[0] = rat(15, 16);
        assert!(matches!(
            DfpeDistribution::new(order.clone(), w),
            Err(DfpeError::NotNormalized(_))
        ));
        let mut w = vec![Rational::zero(); 9];
        w[0] = rat(2, 1);
        w[1] = rat(-1, 1);
        assert!(matches!(
            DfpeDistribution::new(order.clone(), w),
            Err(DfpeError::NegativeWeight(_))
        ));
        assert!(matches!(
            DfpeDistribution::new(order, vec![Rational::one(); 4]),
            Err(DfpeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_point_mass_is_valid() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        let mut w = vec![Rational::zero(); 9];
        w[0] = Rational::one();
        let d = DfpeDistribution::new(order, w).unwrap();
        assert!(d.point_probs()[0].is_one());
    }

    #[test]
    fn class_counts() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        assert_eq!(
            class_count(&order, &MultiIndex(vec![1, 1])).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            class_count(&order, &MultiIndex(vec![0, 0])).unwrap(),
            BigInt::one()
        );
        let order31 = DfpeOrder::new(vec![3, 1]).unwrap();
        assert_eq!(
            class_count(&order31, &MultiIndex(vec![2, 0])).unwrap(),
            BigInt::from(3)
        );
        assert!(class_count(&order, &MultiIndex(vec![3, 0])).is_err());
    }

    #[test]
    fn paper_example_moment_table() {
        let mv = paper_example().moments();
        let expect = [
            (1, 1),
            (1, 2),
            (5, 16),
            (1, 2),
            (23, 64),
            (5, 16),
            (3, 8),
            (5, 16),
            (5, 16),
        ];
        let expect: Vec<Rational> = expect.iter().map(|&(n, d)| rat(n, d)).collect();
        assert_eq!(mv.values(), &expect[..]);
    }

    #[test]
    fn paper_example_point_probs() {
        let d = paper_example();
        let idx = d.order().offset(&[1, 1]);
        assert_eq!(d.point_probs()[idx], rat(3, 64));
    }

    #[test]
    fn iid_moments_are_products() {
        let mv = iid_fair(&[2, 2]).moments();
        for k in mv.order().indices() {
            assert_eq!(*mv.value(&k), rat(1, 1 << k.sum()));
        }
    }

    #[test]
    fn moment_weight_round_trip_on_paper_example() {
        let d = paper_example();
        assert_eq!(d.moments().to_weights().unwrap(), d);
    }

    #[test]
    fn all_ones_moments_give_point_mass() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        let mv = MomentVector::new(order.clone(), vec![Rational::one(); 9]).unwrap();
        assert!(mv.check_conditions().is_empty());
        let d = mv.to_weights().unwrap();
        assert!(d.weight(&MultiIndex(vec![2, 2])).is_one());
    }

    #[test]
    fn invalid_moments_are_detected() {
        // g = 1: w_1 = 1 forces w_2 = 1; w_2 = 0 breaks the second
        // difference condition.
        let order = DfpeOrder::new(vec![2]).unwrap();
        let mv = MomentVector::new(
            order,
            vec![Rational::one(), Rational::one(), Rational::zero()],
        )
        .unwrap();
        let violations = mv.check_conditions();
        assert!(!violations.is_empty());
        assert!(mv.to_weights().is_err());
    }

    #[test]
    fn paper_example_covariances() {
        let cv = paper_example().moments().to_covariances();
        assert_eq!(*cv.covariance(&MultiIndex(vec![2, 0])), rat(1, 8));
        assert_eq!(*cv.covariance(&MultiIndex(vec![0, 2])), rat(1, 16));
        assert_eq!(*cv.covariance(&MultiIndex(vec![2, 2])), rat(1, 32));
        let c11 = cv.covariance(&MultiIndex(vec![1, 1]));
        let det = rat(1, 8) * rat(1, 16) - c11 * c11;
        assert_eq!(det, rat(-17, 4096));
    }

    #[test]
    fn iid_covariances_vanish() {
        let cv = iid_fair(&[3, 2]).moments().to_covariances();
        for k in cv.order().indices() {
            if k.sum() >= 2 {
                assert!(cv.covariance(&k).is_zero(), "Cov at {k} should be 0");
            }
        }
        let report = cv.check_infinite_necessary();
        assert!(report.even_cov_violations.is_empty());
        assert!(report.psd);
    }

    #[test]
    fn covariance_round_trip() {
        let mv = paper_example().moments();
        assert_eq!(mv.to_covariances().to_moments(), mv);
    }

    #[test]
    fn zero_covariances_give_product_moments() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        let cv = CovarianceVector::new(
            order.clone(),
            vec![rat(1, 2), rat(1, 2)],
            vec![Rational::zero(); 9],
        )
        .unwrap();
        let mv = cv.to_moments();
        for k in order.indices() {
            assert_eq!(*mv.value(&k), rat(1, 1 << k.sum()));
        }
        // zero means: everything vanishes except the constant
        let cv0 = CovarianceVector::new(
            order.clone(),
            vec![Rational::zero(), Rational::zero()],
            vec![Rational::zero(); 9],
        )
        .unwrap();
        let mv0 = cv0.to_moments();
        for k in order.indices() {
            if k.sum() == 0 {
                assert!(mv0.value(&k).is_one());
            } else {
                assert!(mv0.value(&k).is_zero());
            }
        }
    }

    #[test]
    fn paper_example_fails_psd() {
        let report = paper_example().moments().to_covariances().check_infinite_necessary();
        assert!(report.even_cov_violations.is_empty());
        assert!(!report.psd);
    }

    #[test]
    fn constructed_even_cov_violation() {
        let order = DfpeOrder::new(vec![2, 2]).unwrap();
        let mut entries = vec![Rational::zero(); 9];
        entries[order.offset(&[2, 0])] = rat(-1, 100);
        let cv = CovarianceVector::new(order, vec![rat(1, 2), rat(1, 2)], entries).unwrap();
        let report = cv.check_infinite_necessary();
        assert_eq!(report.even_cov_violations, vec![MultiIndex(vec![2, 0])]);
    }

    #[test]
    fn lambda_vertex_values() {
        let r = DfpeOrder::new(vec![2, 2]).unwrap();
        let n = DfpeOrder::new(vec![1, 1]).unwrap();
        let v = lambda_vertex(&MultiIndex(vec![1, 0]), &r, &n).unwrap();
        assert_eq!(*v.value(&MultiIndex(vec![1, 0])), rat(1, 2));
        assert!(v.value(&MultiIndex(vec![0, 1])).is_zero());
        assert!(v.value(&MultiIndex(vec![1, 1])).is_zero());

        let zero = lambda_vertex(&MultiIndex(vec![0, 0]), &r, &n).unwrap();
        assert!(zero.values()[1..].iter().all(|c| c.is_zero()));
        assert!(zero.values()[0].is_one());

        let full = lambda_vertex(&MultiIndex(vec![2, 2]), &r, &r).unwrap();
        assert!(full.values().iter().all(|c| c.is_one()));
    }

    #[test]
    fn vertex_counts() {
        let n = DfpeOrder::new(vec![2, 2]).unwrap();
        let r = DfpeOrder::new(vec![4, 2]).unwrap();
        assert_eq!(extendibility_vertices(&n, &r).unwrap().len(), 15);
        // r = n: the vertices of the moment polytope itself
        assert_eq!(extendibility_vertices(&n, &n).unwrap().len(), 9);
    }

    #[test]
    fn g1_exchangeable_projection_vertices() {
        let n = DfpeOrder::new(vec![1]).unwrap();
        let r = DfpeOrder::new(vec![2]).unwrap();
        let verts = extendibility_vertices(&n, &r).unwrap();
        let coords: Vec<Rational> = verts
            .iter()
            .map(|v| v.value(&MultiIndex(vec![1])).clone())
            .collect();
        assert_eq!(coords, vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
    }

    #[test]
    fn paper_example_extendibility_verdicts() {
        let d = paper_example();
        let r42 = DfpeOrder::new(vec![4, 2]).unwrap();
        let r52 = DfpeOrder::new(vec![5, 2]).unwrap();
        let r23 = DfpeOrder::new(vec![2, 3]).unwrap();
        assert!(dfpe_extendible(&d, &r42).unwrap().is_inside());
        assert!(!dfpe_extendible(&d, &r52).unwrap().is_inside());
        assert!(!dfpe_extendible(&d, &r23).unwrap().is_inside());
    }

    #[test]
    fn iid_is_extendible_everywhere_tested() {
        let d = iid_fair(&[2, 2]);
        for r in [[3u32, 3], [5, 2], [4, 4]] {
            let r = DfpeOrder::new(r.to_vec()).unwrap();
            assert!(dfpe_extendible(&d, &r).unwrap().is_inside());
        }
    }

    #[test]
    fn frontier_of_paper_example() {
        let d = paper_example();
        let max_r = DfpeOrder::new(vec![8, 8]).unwrap();
        let report = extendibility_frontier(&d, &max_r).unwrap();
        assert_eq!(report.confirmed, vec![DfpeOrder::new(vec![4, 2]).unwrap()]);
        assert!(report.unresolved.is_empty());
    }

    #[test]
    fn frontier_bound_too_small_for_iid() {
        let d = iid_fair(&[1, 1]);
        let max_r = DfpeOrder::new(vec![3, 3]).unwrap();
        let report = extendibility_frontier(&d, &max_r).unwrap();
        assert!(report.confirmed.is_empty());
        assert!(report.bound_too_small());
    }

    #[test]
    fn frontier_of_deterministic_point_mass() {
        let order = DfpeOrder::new(vec![1, 1]).unwrap();
        let mut w = vec![Rational::zero(); 4];
        let pos = order.offset(&[1, 1]);
        w[pos] = Rational::one();
        let d = DfpeDistribution::new(order, w).unwrap();
        let max_r = DfpeOrder::new(vec![4, 4]).unwrap();
        let report = extendibility_frontier(&d, &max_r).unwrap();
        assert!(report.confirmed.is_empty());
        assert!(report.bound_too_small());
    }

    #[test]
    fn marginalize_identity_and_iid() {
        let d = paper_example();
        assert_eq!(d.marginalize(&[2, 2]).unwrap(), d);
        let m = iid_fair(&[2, 2]).marginalize(&[1, 1]).unwrap();
        assert!(m.weights().iter().all(|w| *w == rat(1, 4)));
    }

    #[test]
    fn marginalize_drops_empty_groups() {
        let d = paper_example();
        let m = d.marginalize(&[2, 0]).unwrap();
        assert_eq!(m.order().groups(), &[2]);
        // marginal of group 1: row sums of the weight table
        assert_eq!(*m.weight(&MultiIndex(vec![0])), rat(3, 8));
        assert_eq!(*m.weight(&MultiIndex(vec![1])), rat(1, 4));
        assert_eq!(*m.weight(&MultiIndex(vec![2])), rat(3, 8));
    }
}

#[cfg(test)]
pub(crate) use tests::paper_example;
