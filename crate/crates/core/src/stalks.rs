//! Stalks and germs.
//!
//! On a finite space every point has a smallest open neighbourhood, so the stalk
//! at `x` is realised as the sections over that open. The general quotient of
//! neighbourhood sections is also available and agrees with it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{BasisPresheaf, Presheaf, PresheafMorphism};
use crate::topology::{Basis, OpenId, PointId, PointSet};
use crate::values::{filtered_colimit, Category, Diagram, Orientation, Poset, ValueMorphism, ValueObject};

/// A stalk with its canonical maps from the sections over each neighbourhood.
#[derive(Debug, Clone)]
pub struct Stalk {
    pub point: PointId,
    pub object: Arc<ValueObject>,
    pub neighborhoods: Vec<OpenId>,
    pub canonical: Vec<ValueMorphism>,
}

impl Stalk {
    pub fn canonical_at(&self, u: OpenId) -> Option<&ValueMorphism> {
        let i = self.neighborhoods.iter().position(|&v| v == u)?;
        Some(&self.canonical[i])
    }

    /// The germ of `s ∈ F(u)`.
    pub fn germ(&self, u: OpenId, s: usize) -> Result<usize> {
        let c = self
            .canonical_at(u)
            .ok_or_else(|| Error::UnknownPoint(format!("open id {u} is not a neighbourhood of the point")))?;
        if s >= c.source().len() {
            return Err(Error::NotASection(format!("element {s}")));
        }
        Ok(c.apply(s))
    }
}

/// A germ with its representative over the smallest neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub point: PointId,
    pub class: usize,
    pub label: String,
    pub representative: (OpenId, usize),
}

fn check_point(p: &Presheaf, x: PointId) -> Result<()> {
    if x >= p.space().len() {
        return Err(Error::UnknownPoint(format!("point index {x}")));
    }
    Ok(())
}

/// The stalk as the sections over the smallest neighbourhood of `x`.
pub fn stalk(p: &Presheaf, x: PointId) -> Result<Stalk> {
    check_point(p, x)?;
    let space = p.space();
    let ux = space.minimal_open(x);
    let neighborhoods = space.neighborhoods(x);
    let canonical = neighborhoods.iter().map(|&u| p.res(ux, u).clone()).collect();
    Ok(Stalk { point: x, object: p.sections(ux).clone(), neighborhoods, canonical })
}

/// The stalk as the quotient of all neighbourhood sections by eventual agreement.
pub fn stalk_by_germ_quotient(p: &Presheaf, x: PointId) -> Result<Stalk> {
    check_point(p, x)?;
    let space = p.space();
    let neighborhoods = space.neighborhoods(x);
    germ_quotient(space.as_ref(), p.category(), &neighborhoods, &|u| p.sections(u).clone(), &|u, v| {
        p.res(u, v).clone()
    })
    .map(|(object, canonical)| Stalk { point: x, object, neighborhoods, canonical })
}

#[allow(clippy::type_complexity)]
fn germ_quotient(
    space: &crate::topology::FiniteSpace,
    category: Category,
    index: &[OpenId],
    sections: &dyn Fn(OpenId) -> Arc<ValueObject>,
    res: &dyn Fn(OpenId, OpenId) -> ValueMorphism,
) -> Result<(Arc<ValueObject>, Vec<ValueMorphism>)> {
    let labels: Vec<String> = index.iter().map(|&u| space.open_key(u)).collect();
    let mut relations = Vec::new();
    let mut arrows = Vec::new();
    for (i, &a) in index.iter().enumerate() {
        for (j, &b) in index.iter().enumerate() {
            // smaller neighbourhoods sit higher
            if i != j && space.is_subset(b, a) {
                relations.push((i, j));
                arrows.push(((i, j), res(b, a)));
            }
        }
    }
    let poset = Poset::new(labels, &relations)?;
    let objects = index.iter().map(|&u| sections(u)).collect();
    let diagram = Diagram::new(category, poset, Orientation::Covariant, objects, arrows)?;
    let colim = filtered_colimit(&diagram)?;
    Ok((colim.object, colim.injections))
}

pub fn germ_of(p: &Presheaf, u: OpenId, s: usize, x: PointId) -> Result<Germ> {
    check_point(p, x)?;
    let space = p.space();
    if u >= space.open_count() || !space.open(u).contains(x) {
        return Err(Error::UnknownPoint(format!("`{}` is not in the open", space.label(x))));
    }
    if s >= p.sections(u).len() {
        return Err(Error::NotASection(format!("element {s} over {}", space.open_key(u))));
    }
    let ux = space.minimal_open(x);
    let class = p.restrict(ux, u, s);
    Ok(Germ { point: x, class, label: p.sections(ux).label(class).to_owned(), representative: (ux, class) })
}

/// The map of stalks induced by `m`, defined on representatives and checked to be well defined.
pub fn stalk_map(m: &PresheafMorphism, source: &Stalk, target: &Stalk) -> Result<ValueMorphism> {
    let mut map: Vec<Option<usize>> = vec![None; source.object.len()];
    for (i, &u) in source.neighborhoods.iter().enumerate() {
        let tc = target
            .canonical_at(u)
            .ok_or_else(|| Error::SpaceMismatch("stalks at different points".into()))?;
        for s in 0..m.source().sections(u).len() {
            let germ = source.canonical[i].apply(s);
            let image = tc.apply(m.component(u).apply(s));
            match map[germ] {
                Some(prev) if prev != image => {
                    return Err(Error::IncompatibleFamily("induced stalk map is not well defined".into()))
                }
                _ => map[germ] = Some(image),
            }
        }
    }
    let map = map
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::IncompatibleFamily("stalk element without representative".into())))
        .collect::<Result<Vec<_>>>()?;
    ValueMorphism::new(source.object.clone(), target.object.clone(), map)
}

pub fn stalk_of_morphism(m: &PresheafMorphism, x: PointId) -> Result<ValueMorphism> {
    stalk_map(m, &stalk(m.source(), x)?, &stalk(m.target(), x)?)
}

/// The colimit over basis neighbourhoods only, with its comparison map to [`stalk`].
pub fn stalk_via_basis(p: &Presheaf, basis: &Basis, x: PointId) -> Result<(Stalk, ValueMorphism)> {
    check_point(p, x)?;
    let space = p.space();
    let neighborhoods = basis.neighborhoods(x);
    let (object, canonical) =
        germ_quotient(space.as_ref(), p.category(), &neighborhoods, &|u| p.sections(u).clone(), &|u, v| {
            p.res(u, v).clone()
        })?;
    let partial = Stalk { point: x, object, neighborhoods, canonical };
    let full = stalk(p, x)?;
    let comparison = compare_on_representatives(&partial, &full, &|u, s| p.restrict(space.minimal_open(x), u, s))?;
    Ok((partial, comparison))
}

/// The stalk of a basis presheaf, with the comparison map to the stalk of its extension.
pub fn basis_presheaf_stalk(bp: &BasisPresheaf, x: PointId) -> Result<(Stalk, ValueMorphism)> {
    let basis = bp.basis();
    let space = basis.space();
    if x >= space.len() {
        return Err(Error::UnknownPoint(format!("point index {x}")));
    }
    let neighborhoods = basis.neighborhoods(x);
    let (object, canonical) =
        germ_quotient(space.as_ref(), bp.category(), &neighborhoods, &|u| bp.sections(u).clone(), &|u, v| {
            bp.res(u, v).clone()
        })?;
    let partial = Stalk { point: x, object, neighborhoods, canonical };
    let ext = crate::presheaf::extend_from_basis(bp)?;
    let full = stalk(&ext.presheaf, x)?;
    let ux = space.minimal_open(x);
    let can = ext.can(ux).expect("the smallest neighbourhood is a basis open").inverse().expect("bijective");
    let comparison = compare_on_representatives(&partial, &full, &|u, s| can.apply(bp.res(ux, u).apply(s)))?;
    Ok((partial, comparison))
}

fn compare_on_representatives(
    from: &Stalk,
    to: &Stalk,
    send: &dyn Fn(OpenId, usize) -> usize,
) -> Result<ValueMorphism> {
    let mut map = vec![None; from.object.len()];
    for (i, &u) in from.neighborhoods.iter().enumerate() {
        for s in 0..from.canonical[i].source().len() {
            let germ = from.canonical[i].apply(s);
            let image = send(u, s);
            match map[germ] {
                Some(prev) if prev != image => {
                    return Err(Error::IncompatibleFamily("comparison is not well defined".into()))
                }
                _ => map[germ] = Some(image),
            }
        }
    }
    let map = map.into_iter().map(|v| v.expect("every germ has a representative")).collect();
    ValueMorphism::new(from.object.clone(), to.object.clone(), map)
}

/// Points with a nonzero stalk.
pub fn support(p: &Presheaf) -> Result<PointSet> {
    if p.category() != Category::FinAb {
        return Err(Error::WrongCategory { expected: Category::FinAb, found: p.category() });
    }
    let space = p.space();
    Ok((0..space.len()).filter(|&x| p.sections(space.minimal_open(x)).len() > 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn sierpinski_stalks() {
        let p = fixtures::sierpinski_sheaf();
        let space = p.space();
        let one = space.point("1").unwrap();
        let zero = space.point("0").unwrap();
        assert_eq!(stalk(&p, one).unwrap().object.len(), p.sections(space.open_by_key("{1}").unwrap()).len());
        assert_eq!(stalk(&p, zero).unwrap().object.len(), p.sections(space.whole()).len());
        let q = stalk_by_germ_quotient(&p, zero).unwrap();
        assert_eq!(q.object.len(), p.sections(space.whole()).len());
    }

    #[test]
    fn constant_on_disc2_collapses() {
        let d = Arc::new(fixtures::disc2());
        let p = Presheaf::constant(d.clone(), Arc::new(ValueObject::set(["s", "t"]).unwrap()));
        let q = stalk_by_germ_quotient(&p, d.point("1").unwrap()).unwrap();
        assert_eq!(q.object.len(), 2);
    }

    #[test]
    fn support_examples() {
        let p = fixtures::sierpinski_z2_closed();
        let space = p.space();
        assert_eq!(space.set_labels(support(&p).unwrap()), ["0"]);
        assert!(matches!(support(&fixtures::sierpinski_sheaf()), Err(Error::WrongCategory { .. })));
    }

    #[test]
    fn germ_locality() {
        let p = fixtures::pc4_locally_constant(2);
        let space = p.space();
        let x = space.point("x").unwrap();
        let whole = space.whole();
        for s in 0..p.sections(whole).len() {
            let g = germ_of(&p, whole, s, x).unwrap();
            let v = space.open_by_key("{a,b,x}").unwrap();
            assert_eq!(germ_of(&p, v, p.restrict(v, whole, s), x).unwrap(), g);
        }
        assert!(matches!(germ_of(&p, space.open_by_key("{a}").unwrap(), 0, x), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn basis_stalk_comparison() {
        let p = fixtures::pc4_locally_constant(2);
        let basis = Basis::generators(p.space().clone()).unwrap();
        let x = p.space().point("x").unwrap();
        let (_, cmp) = stalk_via_basis(&p, &basis, x).unwrap();
        assert!(cmp.is_bijective());
    }
}
