//! Kernel for an intersection-typed lambda calculus with strong pairs,
//! projections and explicit coercions, parametric in a subtype theory
//! (CD, CDS, CDV, BCD) and in the relation that strong-pair components
//! must satisfy on their untyped skeletons (alpha, beta, beta-eta).
//!
//! The crate provides the subtype decision procedures with reified
//! derivations, reduction under plain, synchronous and parallel closures,
//! type reconstruction for the ten admitted systems, the bridge to
//! Curry-style type assignment, coercion elimination, and the forgetful
//! embedding into the simply typed calculus with pairs.

pub mod curry;
pub mod lambda;
pub mod reduce;
pub mod stlc;
pub mod subtype;
pub mod syntax;
pub mod term;
pub mod translate;
pub mod ty;
pub mod typing;

pub use lambda::{alpha_eq, normalize, rel_check, LambdaTerm, NormMode, Rel, RelVerdict};
pub use subtype::{derive_subtype, subtype, validate_subderiv, SubDeriv};
pub use syntax::{parse_basis, parse_lambda, parse_term, parse_type, ParseError};
pub use term::{essence, free_vars, is_synchronous, subst_d, Proj, Term};
pub use ty::{flatten, theory_leq, well_formed, Theory, TheoryId, TypeExpr};
pub use typing::{check, derivation, infer, system_leq, Basis, SystemId, TypingError};
