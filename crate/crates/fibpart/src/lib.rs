//! Desk-scale verification toolkit for the combinatorics of the golden ratio.
//!
//! The crate provides exact integer machinery for:
//!
//! * the lower and upper Wythoff sequences and floors of the form
//!   `floor((a*phi + b)*n + c)`, with no floating point anywhere ([`wythoff`]);
//! * generalized Beatty sequences `f[i,j](n) = F(i+1)*a(n) + F(i)*n - j`,
//!   their ranges, block bifurcation, and the two standard families of
//!   Fibonacci-like partitions of the natural numbers ([`gbs`]);
//! * piecewise permutations of the natural numbers defined by affine golden
//!   pieces on range partitions, including a built-in catalog of elements of
//!   order 2, 4, 6 and infinite order ([`perm`]);
//! * the greedy minimum-excludant matrix whose rows are pairwise "difference
//!   disjoint", with an incremental engine, a literal oracle, a closed form
//!   for its third row, and coverage reporting ([`mex`]);
//! * finite cyclic difference matrices, their orthogonal arrays, and a
//!   prefix-mode check of the integer-group analogue ([`oa`]);
//! * one-dimensional clustering (complete linkage, silhouette, k-means) used
//!   to estimate the asymptotic slopes of matrix rows ([`cluster`]);
//! * cross-checks of generated sequences against b-files in OEIS format,
//!   with committed offline fixtures ([`oeis`]);
//! * a small expression language for bounded verification of floor-function
//!   identities, plus a shipped corpus of claims ([`dsl`]).
//!
//! All sequence arithmetic is `i128` with explicit overflow reporting, so a
//! verified range means exactly what it says.

pub mod cluster;
pub mod dsl;
pub mod gbs;
pub mod golden;
pub mod mex;
pub mod oa;
pub mod oeis;
pub mod perm;
pub mod report;
pub mod wythoff;

pub use report::{FailureWitness, IdentityOutcome, IdentityReport};
