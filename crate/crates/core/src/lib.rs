//! Real evolution algebras of dimension 2 and 3.
//!
//! An evolution algebra is a commutative algebra with a distinguished
//! ("natural") basis in which all cross products vanish:
//!
//! ```text
//! e_i · e_j = 0           (i ≠ j)
//! e_i · e_i = Σ_k a_ik e_k
//! ```
//!
//! The matrix `(a_ik)` of structural constants determines the algebra.
//! This crate provides:
//!
//! - the structure-matrix representation, products, derived-subalgebra
//!   dimension and natural basis changes ([`algebra`]);
//! - the quadratic evolution operator `F(x) = x²`, its fixed points and the
//!   evolution algebra generated by its Jacobian at a point ([`dynamics`]);
//! - classification of 2-dimensional algebras into the seven canonical
//!   families, with verified basis-change witnesses ([`classify2`]);
//! - classification of 3-dimensional algebras with one-dimensional derived
//!   subalgebra into the thirteen classical canonical forms ([`classify3`]);
//! - a generic numeric isomorphism search producing verified witnesses
//!   ([`iso`]);
//! - the shared matrix file format ([`io`]).

pub mod algebra;
pub mod classify2;
pub mod classify3;
pub mod dynamics;
pub mod io;
pub mod iso;
pub mod roots;

pub use algebra::{AlgebraError, BasisChange, EvolutionAlgebra, Tolerances};
pub use classify2::{classify2, Class2, Classification2};
pub use classify3::{classify3, Class3, Classification3};
pub use dynamics::{fixed_points, FixedPointReport, SolverOptions};
pub use iso::{iso_search, verify_iso, IsoOptions, IsoResult};
