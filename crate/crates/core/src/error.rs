use thiserror::Error;

use crate::values::Category;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point labels must be nonempty")]
    EmptyLabel,
    #[error("duplicate point label `{0}`")]
    DuplicatePoint(String),
    #[error("spaces with more than {max} points are not supported (got {got})")]
    TooManyPoints { got: usize, max: usize },
    #[error("generators do not cover the point set")]
    GeneratorsDoNotCover,
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("`{0}` is not an open set of the space")]
    NotAnOpen(String),
    #[error("not a basis: {0}")]
    NotABasis(String),
    #[error("map is not continuous: preimage of {0} is not open")]
    NotContinuous(String),
    #[error("spaces do not match: {0}")]
    SpaceMismatch(String),

    #[error("expected {expected:?} values, found {found:?}")]
    MixedCategories { expected: Category, found: Category },
    #[error("operation requires {expected:?} values, found {found:?}")]
    WrongCategory { expected: Category, found: Category },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element label `{0}`")]
    DuplicateElement(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("index poset is not filtered: {0}")]
    NotFiltered(String),
    #[error("cone does not commute with the diagram arrows")]
    IncompatibleCone,

    #[error("sections and restrictions disagree: {0}")]
    ValueMismatch(String),
    #[error("family is not compatible: {0}")]
    IncompatibleFamily(String),
    #[error("`{0}` is not a section over the given open")]
    NotASection(String),
    #[error("presheaf is not a sheaf: {0}")]
    NotASheaf(String),
    #[error("space is not irreducible")]
    NotIrreducible,
    #[error("pair is not an inverse image: {0}")]
    NotInverseImagePair(String),
    #[error("cocycle condition violated: {0}")]
    CocycleViolation(String),
    #[error("candidate is not a gluing of the datum: {0}")]
    NotAGluing(String),

    #[error("enumeration of {what} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("cross-reference error: {0}")]
    CrossReference(String),
}
