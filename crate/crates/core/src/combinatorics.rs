//! Combinatorial primitives and the canonical multi-index ordering shared
//! by every other module.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Binomial coefficient with the out-of-range convention: 0 when `k < 0`
/// or `k > n`.
pub fn binom(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = k as u64;
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient where the top argument may be -1.
///
/// Whittle's binary closed form uses factors like `C(n1+ - 1, n11)`; when a
/// state is never visited the top argument is -1 with bottom 0, which must
/// count as 1.
pub fn binom_signed(n: i64, k: i64) -> BigInt {
    if n == -1 {
        return if k == 0 { BigInt::one() } else { BigInt::zero() };
    }
    debug_assert!(n >= 0);
    binom(n as u64, k)
}

/// Falling factorial (i)_k = i(i-1)...(i-k+1), with (i)_0 = 1 and 0 when
/// k > i.
pub fn falling(i: u64, k: u64) -> BigInt {
    if k > i {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= BigInt::from(i - j);
    }
    acc
}

/// A point of the index lattice 0 <= k_i <= n_i, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise comparison (partial order of the lattice, not the
    /// lexicographic total order used for storage).
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        MultiIndex(v.to_vec())
    }
}

/// All tuples with 0 <= k_i <= limits_i, in lexicographic order.
///
/// This is the single canonical layout of every dense coordinate vector in
/// the crate, including the file formats.
pub fn multi_index_range(limits: &[u32]) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(limits.iter().map(|&n| n as usize + 1).product());
    let mut cur = alloc::vec![0u32; limits.len()];
    loop {
        out.push(MultiIndex(cur.clone()));
        // lexicographic increment with per-position limits
        let mut pos = limits.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < limits[pos] {
                cur[pos] += 1;
                for c in &mut cur[pos + 1..] {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Position of `k` in `multi_index_range(limits)` (mixed-radix value).
pub fn lex_offset(limits: &[u32], k: &[u32]) -> usize {
    debug_assert_eq!(limits.len(), k.len());
    let mut off = 0usize;
    for (ki, ni) in k.iter().zip(limits) {
        debug_assert!(ki <= ni);
        off = off * (*ni as usize + 1) + *ki as usize;
    }
    off
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn binom_basics() {
        assert_eq!(binom(4, 2), BigInt::from(6));
        assert_eq!(binom(7, 0), BigInt::one());
        assert_eq!(binom(2, 3), BigInt::zero());
        assert_eq!(binom(2, -1), BigInt::zero());
        assert_eq!(binom_signed(-1, 0), BigInt::one());
        assert_eq!(binom_signed(-1, 2), BigInt::zero());
    }

    #[test]
    fn falling_basics() {
        assert_eq!(falling(4, 2), BigInt::from(12));
        assert_eq!(falling(3, 0), BigInt::one());
        assert_eq!(falling(2, 3), BigInt::zero());
    }

    #[test]
    fn binom_is_falling_over_factorial() {
        for n in 0..10u64 {
            for k in 0..=n {
                let mut kfact = BigInt::one();
                for j in 1..=k {
                    kfact *= BigInt::from(j);
                }
                assert_eq!(binom(n, k as i64) * kfact, falling(n, k));
            }
        }
    }

    #[test]
    fn range_enumeration() {
        let r = multi_index_range(&[1, 1]);
        let expect: Vec<MultiIndex> = vec![
            MultiIndex(vec![0, 0]),
            MultiIndex(vec![0, 1]),
            MultiIndex(vec![1, 0]),
            MultiIndex(vec![1, 1]),
        ];
        assert_eq!(r, expect);
        assert_eq!(multi_index_range(&[2]).len(), 3);
        assert_eq!(multi_index_range(&[2, 2]).len(), 9);
    }

    #[test]
    fn range_is_sorted_and_offsets_match() {
        let limits = [2u32, 3, 1];
        let r = multi_index_range(&limits);
        for w in r.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, k) in r.iter().enumerate() {
            assert_eq!(lex_offset(&limits, &k.0), i);
        }
    }
}
