//! Exact computations in the multilinear part of the two-sided ideal of
//! identities generated by the power `x^n` in the free associative algebra
//! over a field of characteristic zero.
//!
//! The degree-`m` multilinear space `V_m` is identified with the group
//! algebra `F[S_m]`; its intersection `W_{n,m}` with the ideal is an
//! `S_m`-bimodule spanned by symmetrizations `P_O` over ordered set
//! partitions `O` of `{1..m}` into `n` blocks.  This crate computes the
//! irreducible decomposition of `W_{n,m}`, its dimension, the index where
//! `W_{n,m}` first fills all of `V_m`, polynomial-dimension fits along the
//! diagonals `m = n + K`, and a collection of independent upper and lower
//! bounds used to cross-check everything.
//!
//! All arithmetic is exact: `i64`/`BigInt` for counting, `BigRational` for
//! linear algebra, word-sized prime fields for the fast rank path.  No
//! floating point anywhere.

pub mod algebra;
pub mod bounds;
pub mod combinatorics;
pub mod decomposition;
pub mod error;
pub mod glk;
pub mod linalg;
pub mod multilinear;
pub mod perm;
pub mod stability;
pub mod substitution;
pub mod words;

pub use error::{Error, Result};
