//! Direct and inverse images along continuous maps, and sheafification.

mod direct;
mod inverse;
mod psi;

pub use direct::{
    open_embedding_stalk_inverse, pushforward, pushforward_morphism, pushforward_support_bound,
    stalk_comparison,
};
pub use inverse::{
    canonical_comparison, check_adjunction, check_adjunction_naturality, composition_iso, counit, flat,
    is_germ_family, pullback, pullback_morphism, pullback_morphism_via_sharp, pullback_stalk_iso, sharp,
    sharp_with, sheafify, AdjunctionWitness, CompositionIso, InverseImage, SheafGluer,
};
pub use psi::{psi_morphism_from_basis_family, psi_morphism_from_family, PsiFamily, PsiMorphism};
