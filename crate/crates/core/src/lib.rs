//! Finite structures over relational signatures, Horn theories over them, and
//! the constructions of their categories of models.
//!
//! - [`structure`]: signatures, edges, structures, morphisms, transport.
//! - [`theory`]: Horn formulas and theories, satisfaction, the variable
//!   condition.
//! - [`saturate`]: closure under a theory, free models, reflection with
//!   equality.
//! - [`catops`]: lifts, products, pullbacks, equalizers, coproducts,
//!   coequalizers.
//! - [`extensivity`]: instance checks for extensivity and distributivity,
//!   representing objects.
//! - [`quantale`]: finite quantales, their generated theories, distance
//!   matrices.
//!
//! Rounds of saturation, hom enumeration and batch suites run on rayon when
//! the `parallel` feature is on (the default); [`Parallelism`] selects the
//! mode per call.

pub mod builtin;
pub mod catops;
mod engine;
pub mod error;
pub mod extensivity;
pub mod gen;
pub mod hom;
pub mod par;
pub mod quantale;
pub mod saturate;
pub mod structure;
pub mod suite;
pub mod theory;
pub mod universal;
mod unionfind;

pub use error::{Error, Result};
pub use par::Parallelism;
pub use structure::{Carrier, Edge, EdgeSet, ElementId, ElementMap, Morphism, Signature, Structure, SymbolId};
pub use theory::{Formula, Theory, EQUALITY};
