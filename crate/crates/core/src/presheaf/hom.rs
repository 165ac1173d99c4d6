use std::sync::Arc;

use super::{Presheaf, PresheafMorphism};
use crate::error::{Error, Result};
use crate::topology::OpenId;
use crate::values::{Category, ValueMorphism};

/// Every morphism `source → target`, ordered lexicographically by component
/// tables over opens in id order.
pub fn enumerate_presheaf_morphisms(
    source: &Arc<Presheaf>,
    target: &Arc<Presheaf>,
    cap: usize,
) -> Result<Vec<PresheafMorphism>> {
    if source.category() != target.category() {
        return Err(Error::MixedCategories { expected: source.category(), found: target.category() });
    }
    if source.space() != target.space() {
        return Err(Error::SpaceMismatch("presheaves live on different spaces".into()));
    }
    let space = source.space();
    let slots: Vec<(OpenId, usize)> = (0..space.open_count())
        .flat_map(|u| (0..source.sections(u).len()).map(move |s| (u, s)))
        .collect();
    let below: Vec<Vec<OpenId>> = (0..space.open_count())
        .map(|v| space.opens_within(v).into_iter().filter(|&u| u != v).collect())
        .collect();
    let mut comps: Vec<Vec<usize>> = (0..space.open_count())
        .map(|u| vec![usize::MAX; source.sections(u).len()])
        .collect();
    let mut out = Vec::new();
    let ctx = Search { source, target, slots: &slots, below: &below, cap };
    ctx.run(0, &mut comps, &mut out)?;
    Ok(out)
}

struct Search<'a> {
    source: &'a Arc<Presheaf>,
    target: &'a Arc<Presheaf>,
    slots: &'a [(OpenId, usize)],
    below: &'a [Vec<OpenId>],
    cap: usize,
}

impl Search<'_> {
    fn run(&self, k: usize, comps: &mut Vec<Vec<usize>>, out: &mut Vec<PresheafMorphism>) -> Result<()> {
        if k == self.slots.len() {
            if out.len() == self.cap {
                return Err(Error::CapExceeded { what: "presheaf morphisms", cap: self.cap });
            }
            let components = comps
                .iter()
                .enumerate()
                .map(|(u, c)| {
                    ValueMorphism::new_unchecked(self.source.sections(u).clone(), self.target.sections(u).clone(), c.clone())
                })
                .collect();
            out.push(PresheafMorphism::new_unchecked(self.source.clone(), self.target.clone(), components));
            return Ok(());
        }
        let (v, s) = self.slots[k];
        let (src, tgt) = (self.source.sections(v), self.target.sections(v));
        let group = self.source.category() == Category::FinAb;
        for t in 0..tgt.len() {
            if group && s == src.zero() && t != tgt.zero() {
                continue;
            }
            let natural = self.below[v]
                .iter()
                .all(|&u| self.target.restrict(u, v, t) == comps[u][self.source.restrict(u, v, s)]);
            if !natural {
                continue;
            }
            comps[v][s] = t;
            let additive = !group
                || (0..=s).all(|a| {
                    (0..=s).all(|b| {
                        let c = src.add(a, b);
                        c > s || comps[v][c] == tgt.add(comps[v][a], comps[v][b])
                    })
                });
            if additive {
                self.run(k + 1, comps, out)?;
            }
        }
        comps[v][s] = usize::MAX;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::values::ValueObject;

    #[test]
    fn endomorphisms_of_constant_sheaf() {
        let p = Arc::new(fixtures::sierpinski_constant(2));
        // determined by the component on the whole space: 4 maps of a 2-set
        assert_eq!(enumerate_presheaf_morphisms(&p, &p, 100).unwrap().len(), 4);
        let g = Arc::new(Presheaf::constant(Arc::new(fixtures::sierpinski()), Arc::new(ValueObject::cyclic(2))));
        assert_eq!(enumerate_presheaf_morphisms(&g, &g, 100).unwrap().len(), 2);
    }
}
