//! Exact-arithmetic computations with submeasures on finite Boolean algebras
//! and with groups of labeled partitions of unity.
//!
//! Everything is computed over exact rationals (or Gaussian rationals where
//! complex scalars appear); there is no floating point anywhere in
//! evaluation, classification, optimization, or certificate checking, so
//! every emitted certificate replays bit-exactly.
//!
//! The main pieces:
//!
//! - [`algebra`]: powerset Boolean algebras on named atoms, partitions of
//!   unity, two-valued homomorphisms, ideals/quotients, and join-monoid
//!   homomorphisms.
//! - [`submeasure`]: set functions `φ: 𝒜 → ℚ≥0` in several representations
//!   with a uniform exact evaluator, classification (monotone, subadditive,
//!   submodular, additive, strictly positive), diffuseness, and pullbacks.
//! - [`lp`]: a dense exact-rational two-phase simplex with Bland's rule,
//!   returning verified primal/dual pairs.
//! - [`pathology`]: the maximal dominated measure `M(φ)` with primal/dual
//!   certificates, the ratio `κ(φ) = M(φ)/φ(1)`, greedy measures extracted
//!   from submodular functions, covering witnesses, and benchmark generators.
//! - [`pugroup`]: group oracles (Cayley tables, cyclic groups, ℤ, additive
//!   ℚ), the convolution group of labeled partitions of unity with its
//!   pseudometrics, subgroup decompositions, lifting operators, escape
//!   dynamics, Følner checks, and positive-type function lifting.
//! - [`records`]: the shared structured text formats used by the CLI.
//! - [`sampling`]: seeded, reproducible random instances for checks.
//! - [`selftest`]: the built-in verification suites.

pub mod algebra;
pub mod error;
pub mod lp;
pub mod pathology;
pub mod pugroup;
pub mod rational;
pub mod records;
pub mod sampling;
pub mod selftest;
pub mod submeasure;

pub use error::{Error, Result};
