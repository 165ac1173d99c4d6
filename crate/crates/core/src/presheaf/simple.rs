use std::sync::Arc;

use super::Presheaf;
use crate::error::{Error, Result};
use crate::functors::sheafify;

/// Every nonempty open receives the global sections bijectively.
pub fn is_constant_presheaf(p: &Presheaf) -> bool {
    let space = p.space();
    let x = space.whole();
    (0..space.open_count())
        .filter(|&u| !space.open(u).is_empty())
        .all(|u| p.res(u, x).is_bijective())
}

/// Outcome of comparing constancy, the sheaf property and local simplicity on
/// an irreducible space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleReport {
    pub constant: bool,
    pub empty_terminal: bool,
    pub sheaf: bool,
    /// The unit into the sheafification is an isomorphism.
    pub sheafification_iso: bool,
    /// Every point has an open neighbourhood on which the restriction is constant.
    pub locally_simple: bool,
    /// A constant presheaf with terminal sections over `∅` is a sheaf equal to its sheafification.
    pub constant_implies_sheaf: bool,
    /// A locally simple sheaf is constant.
    pub locally_simple_implies_constant: bool,
}

impl SimpleReport {
    pub fn holds(&self) -> bool {
        self.constant_implies_sheaf && self.locally_simple_implies_constant
    }
}

pub fn check_simple_equivalence(p: &Arc<Presheaf>) -> Result<SimpleReport> {
    let space = p.space();
    if !space.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let constant = is_constant_presheaf(p);
    let empty_terminal = p.sections(space.empty_open()).is_terminal();
    let sheaf = p.is_sheaf();
    let sheafification_iso = sheafify(p)?.unit.is_iso();
    let mut locally_simple = sheaf;
    for x in 0..space.len() {
        let mut found = false;
        for u in space.neighborhoods(x) {
            if is_constant_presheaf(&p.restrict_to_open(u)?) {
                found = true;
                break;
            }
        }
        locally_simple &= found;
    }
    Ok(SimpleReport {
        constant,
        empty_terminal,
        sheaf,
        sheafification_iso,
        locally_simple,
        constant_implies_sheaf: !(constant && empty_terminal) || (sheaf && sheafification_iso),
        locally_simple_implies_constant: !locally_simple || constant,
    })
}
