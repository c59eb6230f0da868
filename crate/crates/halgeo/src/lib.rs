//! A workbench for equational and logical geometry over finite algebras.
//!
//! The crate builds, for a finite algebra `H` and finite variable sorts, the
//! affine spaces of points `Hom(W(X), H)`, the extended boolean algebras of
//! point sets living on them (with quantifiers, term equalities and
//! substitution transports), and the multi-sorted formula algebra evaluated
//! into them by the value homomorphism. On top of that sit the two Galois
//! correspondences — equations against algebraic sets and formulas against
//! definable sets — plus deciders for isotypy, homogeneity and related
//! finiteness properties, all by exact exhaustive computation at desk scale.
//!
//! Organization:
//!
//! - [`syntax`]: signatures, sorts, free-algebra terms, substitutions, parsing
//! - [`algebra`]: finite algebras by operation tables, points, evaluation
//! - [`morphisms`]: automorphism and isomorphism backtracking search
//! - [`congruence`]: finitely presented point-closed congruences
//! - [`pointset`]: bit-vector point sets with quantifiers and transports
//! - [`axioms`]: semantic verification of the transport/quantifier laws
//! - [`formula`]: the sorted formula algebra, evaluation, normalization
//! - [`family`]: bounded enumerations of terms and formulas used as oracles
//! - [`geometry`]: equation and formula systems, solution sets, closures
//! - [`isotypy`]: type partitions, orbit partitions, isotypy and homogeneity
//! - [`library`]: stock small algebras

pub mod algebra;
pub mod axioms;
pub mod congruence;
pub mod error;
pub mod family;
pub mod formula;
pub mod geometry;
pub mod isotypy;
pub mod library;
pub mod morphisms;
pub mod pointset;
pub mod syntax;

pub use algebra::{FiniteAlgebra, Point, PointIndex, DEFAULT_POINT_CAP};
pub use error::{Error, Result};
pub use formula::Formula;
pub use pointset::PointSet;
pub use syntax::{OpSymbol, Substitution, Term, TermNode, VarSort, VarietySpec};
