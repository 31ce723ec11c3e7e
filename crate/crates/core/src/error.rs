use thiserror::Error;

use crate::structure::Edge;
use crate::theory::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown relation symbol in edge {0}")]
    UnknownSymbol(Edge),

    #[error("edge {edge} has {found} arguments but its symbol has arity {expected}")]
    ArityMismatch {
        edge: Edge,
        expected: usize,
        found: usize,
    },

    #[error("edge {edge} mentions `{element}`, which is not in the carrier")]
    ForeignElement { edge: Edge, element: String },

    #[error("element `{0}` is not in the domain of the map")]
    UnmappedElement(String),

    #[error("map sends `{element}` to `{image}`, which is not in the codomain carrier")]
    ImageOutsideCodomain { element: String, image: String },

    #[error("map is defined on `{0}`, which is not in the domain carrier")]
    ExtraneousElement(String),

    #[error("relation symbol `{0}` must have positive arity")]
    ZeroArity(String),

    #[error("the symbol `=` is reserved and cannot be declared in a signature")]
    ReservedSymbol,

    #[error("premise {0} uses the reserved equality symbol")]
    EqualityPremise(Edge),

    #[error("the theory has an equality axiom; this operation needs a theory without equality")]
    EqualityAxiomPresent,

    #[error("the theory violates the variable condition: {}", summarize(.0))]
    VariableConditionViolated(Vec<Violation>),

    #[error("structure is not a model: {0}")]
    NotAModel(String),

    #[error("map is not a morphism: {0}")]
    NotAMorphism(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("the met flavor is undefined for a quantale whose unit is its bottom element")]
    TrivialUnit,

    #[error("invalid quantale: {}", .0.join("; "))]
    InvalidQuantale(Vec<String>),

    #[error("distance matrix is not a V-category: {0}")]
    NotVCat(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("enumeration too large: {0}")]
    TooLarge(String),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
