//! Exact-arithmetic toolkit for finite binary partially exchangeable
//! (de Finetti) and Markov exchangeable distributions.
//!
//! The crate represents distributions through their sufficient-statistic
//! weights, converts among the weight / moment / covariance
//! parameterizations, and decides r-extendibility exactly as a polytope
//! membership question solved by a rational simplex method.
//!
//! Everything here is `no_std` + `alloc`: all values are rationals, all
//! decisions are exact. Floating point (Monte Carlo volume estimation,
//! file IO, the CLI) lives in the companion `exchkit` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod dfpe;
pub mod markov;
pub mod oracle;
pub mod polytope;
pub mod rational;

pub use combinatorics::{binom, falling, multi_index_range, MultiIndex};
pub use dfpe::{CovarianceVector, DfpeDistribution, DfpeOrder, MomentVector};
pub use markov::{GammaPoint, MeDistribution, TransitionCountMatrix};
pub use polytope::MembershipCertificate;
pub use rational::Rational;
