//! Finite sets and finite abelian groups, with the limits and colimits every
//! sheaf construction reduces to.

mod diagram;
mod hom;
mod object;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use diagram::{
    colimit_factor, filtered_colimit, limit, mediating_morphism, ColimitCocone, Diagram, LimitCone,
    Orientation, Poset,
};
pub use hom::{enumerate_morphisms, DEFAULT_MAX_HOMS};
pub use object::{ValueMorphism, ValueObject};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    FinSet,
    FinAb,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::FinSet => "FinSet",
            Category::FinAb => "FinAb",
        })
    }
}
