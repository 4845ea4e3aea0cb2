//! Partial ideals and invariant families of projections in finite-dimensional
//! von Neumann algebras `M_{n_1}(ℂ) ⊕ … ⊕ M_{n_K}(ℂ)`.
//!
//! The crate computes with commutative subalgebras through their atoms,
//! evaluates the families of projections induced by a projection or a
//! central projection, and builds checkable certificates:
//!
//! * [`covering::main_lemma_cover`] covers the central carrier of `q` by a
//!   commuting part of its unitary orbit plus one conjugate of `q`;
//! * [`families::verify_theorem`] checks that an invariant family is the
//!   family of its value at the center;
//! * [`families::find_invariance_violation`] exhibits `(V, u)` breaking
//!   invariance for any non-central projection.
//!
//! All randomness is seeded; every check is a pure function of its inputs.

pub mod algebra;
pub mod commutative;
pub mod covering;
pub mod families;
pub mod json;
pub mod linalg;
pub mod random;
pub mod sampling;

pub use algebra::{BlockAlgebra, BlockElement, CentralProjection, ProjectionElement, RankVector};
pub use commutative::{CommutativeIdeal, CommutativeSubalgebra, Side};
pub use covering::{CoverCertificate, PartialOrthWitness};
pub use families::{CheckReport, FamilyRule, FamilyTable, TheoremReport, Verdict, ViolationWitness};
pub use linalg::{CMatrix, Tolerance};
