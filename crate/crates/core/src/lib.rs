//! Sheaves on finite topological spaces with values in finite sets and finite
//! abelian groups.

pub mod error;
pub mod fixtures;
pub mod functors;
pub mod gluing;
pub mod io;
pub mod labels;
pub mod presheaf;
pub mod stalks;
pub mod topology;
pub mod values;

pub use error::{Error, Result};
