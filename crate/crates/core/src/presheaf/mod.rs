//! Presheaves, morphisms of presheaves, and the sheaf condition.

mod basis;
mod hom;
mod limits;
#[allow(clippy::module_inception)]
mod presheaf;
mod sheaf;
mod simple;

pub use basis::{
    extend_from_basis, extend_morphism_from_basis, morphism_determined_by_basis, refine_basis,
    sheaf_to_extension, BasisExtension, BasisPresheaf, BasisRefinement, SheafComparison,
};
pub use hom::enumerate_presheaf_morphisms;
pub use limits::{limit_of_sheaves, SheafDiagram, SheafLimit};
pub use presheaf::{FunctorialityViolation, Presheaf, PresheafMorphism};
pub use sheaf::{FailureKind, SheafFailure, SheafReport, Witness, DEFAULT_MAX_COVERINGS};
pub use simple::{check_simple_equivalence, is_constant_presheaf, SimpleReport};
