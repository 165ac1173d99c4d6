use std::collections::BTreeMap;
use std::sync::Arc;

use super::presheaf::complete_restrictions;
use super::sheaf::{CoveringProblem, SheafReport};
use super::{Presheaf, PresheafMorphism};
use crate::error::{Error, Result};
use crate::topology::{Basis, OpenId};
use crate::values::{limit, Category, Diagram, LimitCone, Orientation, Poset, ValueMorphism, ValueObject};

/// A presheaf defined only on the members of a basis.
#[derive(Debug, Clone)]
pub struct BasisPresheaf {
    basis: Basis,
    category: Category,
    sections: BTreeMap<OpenId, Arc<ValueObject>>,
    res: BTreeMap<(OpenId, OpenId), ValueMorphism>,
}

impl BasisPresheaf {
    pub fn new(
        basis: Basis,
        category: Category,
        sections: Vec<(OpenId, Arc<ValueObject>)>,
        restrictions: Vec<((OpenId, OpenId), ValueMorphism)>,
    ) -> Result<Self> {
        let space = basis.space().clone();
        let mut table = BTreeMap::new();
        for (u, obj) in sections {
            if !basis.contains(u) {
                return Err(Error::ValueMismatch(format!("{} is not a basis open", space.open_key(u))));
            }
            if obj.category() != category {
                return Err(Error::MixedCategories { expected: category, found: obj.category() });
            }
            table.insert(u, obj);
        }
        if let Some(&m) = basis.members().iter().find(|m| !table.contains_key(m)) {
            return Err(Error::ValueMismatch(format!("no section object for {}", space.open_key(m))));
        }
        let res = complete_restrictions(&space, basis.members(), &|u| table[&u].clone(), restrictions)?;
        Ok(BasisPresheaf { basis, category, sections: table, res })
    }

    /// The data of `p` on the members of `basis`.
    pub fn from_presheaf(p: &Presheaf, basis: &Basis) -> Result<Self> {
        if **basis.space() != **p.space() {
            return Err(Error::SpaceMismatch("basis and presheaf live on different spaces".into()));
        }
        let members = basis.members();
        let sections = members.iter().map(|&u| (u, p.sections(u).clone())).collect();
        let mut maps = Vec::new();
        for &v in members {
            for &u in members {
                if p.space().is_subset(u, v) {
                    maps.push(((u, v), p.res(u, v).clone()));
                }
            }
        }
        Self::new(basis.clone(), p.category(), sections, maps)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn sections(&self, u: OpenId) -> &Arc<ValueObject> {
        &self.sections[&u]
    }

    /// Panics unless both opens are members and `small ⊆ big`.
    pub fn res(&self, small: OpenId, big: OpenId) -> &ValueMorphism {
        &self.res[&(small, big)]
    }

    pub fn restrictions(&self) -> impl Iterator<Item = (&(OpenId, OpenId), &ValueMorphism)> {
        self.res.iter()
    }

    /// Functoriality over basis inclusions.
    pub fn is_valid(&self) -> bool {
        let space = self.basis.space();
        let m = self.basis.members();
        m.iter().all(|&u| self.res(u, u).is_identity())
            && m.iter().all(|&w| {
                m.iter().filter(|&&v| space.is_subset(v, w)).all(|&v| {
                    m.iter().filter(|&&u| space.is_subset(u, v)).all(|&u| {
                        let (vw, uv, uw) = (self.res(v, w), self.res(u, v), self.res(u, w));
                        vw.map().iter().zip(uw.map()).all(|(&b, &c)| uv.apply(b) == c)
                    })
                })
            })
    }

    /// Sheaf condition for coverings of basis opens by basis opens, with
    /// compatibility tested on every basis open inside each overlap.
    pub fn check_f0(&self) -> SheafReport {
        let space = self.basis.space();
        let mut failures = Vec::new();
        for &u in self.basis.members() {
            let coverings = self.basis.antichain_coverings(u, usize::MAX).expect("no cap");
            for cov in coverings {
                let parts = &cov.parts;
                let overlaps: Vec<Vec<Vec<OpenId>>> = parts
                    .iter()
                    .map(|&a| {
                        parts
                            .iter()
                            .map(|&b| self.basis.members_within(space.intersect(a, b)))
                            .collect()
                    })
                    .collect();
                let image = |i: usize, s: usize| self.res(parts[i], u).apply(s);
                let agree = |i: usize, a: usize, j: usize, b: usize| {
                    overlaps[i][j]
                        .iter()
                        .all(|&v| self.res(v, parts[i]).apply(a) == self.res(v, parts[j]).apply(b))
                };
                failures.extend(
                    CoveringProblem {
                        open: u,
                        parts,
                        sections: self.sections(u).len(),
                        part_sizes: parts.iter().map(|&q| self.sections(q).len()).collect(),
                        image: &image,
                        agree: &agree,
                    }
                    .failures(false),
                );
            }
        }
        SheafReport::from_failures(failures)
    }
}

/// A basis presheaf extended to every open by limits over the basis opens inside it.
#[derive(Debug, Clone)]
pub struct BasisExtension {
    pub source: BasisPresheaf,
    pub presheaf: Arc<Presheaf>,
    members: Vec<Vec<OpenId>>,
    cones: Vec<LimitCone>,
}

impl BasisExtension {
    /// Basis opens inside `u`; the positions of a family.
    pub fn members_within(&self, u: OpenId) -> &[OpenId] {
        &self.members[u]
    }

    pub fn family(&self, u: OpenId, e: usize) -> &[usize] {
        self.cones[u].family(e)
    }

    pub fn element_of(&self, u: OpenId, family: &[usize]) -> Option<usize> {
        self.cones[u].element_of(family)
    }

    /// The projection from the extension at `u` to the basis open `v ⊆ u`.
    pub fn projection(&self, u: OpenId, v: OpenId) -> Option<&ValueMorphism> {
        let pos = self.members[u].iter().position(|&m| m == v)?;
        Some(&self.cones[u].projections[pos])
    }

    /// The canonical identification at a basis open.
    pub fn can(&self, u: OpenId) -> Option<&ValueMorphism> {
        self.projection(u, u)
    }
}

pub fn extend_from_basis(bp: &BasisPresheaf) -> Result<BasisExtension> {
    let space = bp.basis.space().clone();
    let n = space.open_count();
    let mut members = Vec::with_capacity(n);
    let mut cones = Vec::with_capacity(n);
    for u in 0..n {
        let inside = bp.basis.members_within(u);
        let labels: Vec<String> = inside.iter().map(|&m| space.open_key(m)).collect();
        let mut relations = Vec::new();
        let mut arrows = Vec::new();
        for (i, &a) in inside.iter().enumerate() {
            for (j, &b) in inside.iter().enumerate() {
                if i != j && space.is_subset(a, b) {
                    relations.push((i, j));
                    arrows.push(((i, j), bp.res(a, b).clone()));
                }
            }
        }
        let poset = Poset::new(labels, &relations)?;
        let objects = inside.iter().map(|&m| bp.sections(m).clone()).collect();
        let diagram = Diagram::new(bp.category, poset, Orientation::Contravariant, objects, arrows)?;
        cones.push(limit(&diagram)?);
        members.push(inside);
    }
    let objects: Vec<Arc<ValueObject>> = cones.iter().map(|c| c.object.clone()).collect();
    let mut maps = Vec::new();
    for v in 0..n {
        for u in space.opens_within(v) {
            let positions: Vec<usize> = members[u]
                .iter()
                .map(|m| members[v].iter().position(|x| x == m).expect("members of a smaller open"))
                .collect();
            let map = (0..objects[v].len())
                .map(|e| {
                    let fam = cones[v].family(e);
                    let sub: Vec<usize> = positions.iter().map(|&p| fam[p]).collect();
                    cones[u].element_of(&sub).expect("subfamily of a compatible family is compatible")
                })
                .collect();
            maps.push(((u, v), ValueMorphism::new_unchecked(objects[v].clone(), objects[u].clone(), map)));
        }
    }
    let presheaf = Arc::new(Presheaf::new(space, bp.category, objects, maps)?);
    Ok(BasisExtension { source: bp.clone(), presheaf, members, cones })
}

/// Extends a family of maps on basis opens to a morphism of the extensions.
pub fn extend_morphism_from_basis(
    source: &BasisExtension,
    target: &BasisExtension,
    family: &BTreeMap<OpenId, ValueMorphism>,
) -> Result<PresheafMorphism> {
    let basis = source.source.basis();
    if basis != target.source.basis() {
        return Err(Error::SpaceMismatch("extensions over different bases".into()));
    }
    let space = basis.space();
    for &m in basis.members() {
        let f = family
            .get(&m)
            .ok_or_else(|| Error::IncompatibleFamily(format!("no map at {}", space.open_key(m))))?;
        if **f.source() != **source.source.sections(m) || **f.target() != **target.source.sections(m) {
            return Err(Error::ValueMismatch(format!("map at {} has the wrong ends", space.open_key(m))));
        }
    }
    for &v in basis.members() {
        for &u in basis.members_within(v).iter() {
            let (fu, fv) = (&family[&u], &family[&v]);
            let (rs, rt) = (source.source.res(u, v), target.source.res(u, v));
            let ok = (0..rs.source().len()).all(|s| fu.apply(rs.apply(s)) == rt.apply(fv.apply(s)));
            if !ok {
                return Err(Error::IncompatibleFamily(format!(
                    "maps do not commute along {} ⊆ {}",
                    space.open_key(u),
                    space.open_key(v)
                )));
            }
        }
    }
    let components = (0..space.open_count())
        .map(|u| {
            let inside = source.members_within(u);
            let map = (0..source.presheaf.sections(u).len())
                .map(|e| {
                    let fam: Vec<usize> = source
                        .family(u, e)
                        .iter()
                        .zip(inside)
                        .map(|(&a, m)| family[m].apply(a))
                        .collect();
                    target.element_of(u, &fam).expect("image of a compatible family is compatible")
                })
                .collect();
            ValueMorphism::new(source.presheaf.sections(u).clone(), target.presheaf.sections(u).clone(), map)
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMorphism::new(source.presheaf.clone(), target.presheaf.clone(), components)
}

/// Whether two morphisms agree on every basis open.
pub fn morphism_determined_by_basis(u: &PresheafMorphism, v: &PresheafMorphism, basis: &Basis) -> bool {
    basis.members().iter().all(|&m| u.component(m).map() == v.component(m).map())
}

/// A sheaf, the extension of its basis data, and the mutually inverse
/// comparison maps `theta: F → F'` and `psi: F' → F`.
#[derive(Debug, Clone)]
pub struct SheafComparison {
    pub extension: BasisExtension,
    pub theta: PresheafMorphism,
    pub psi: PresheafMorphism,
}

/// Restricts a sheaf to `basis` and extends it back.
pub fn sheaf_to_extension(sheaf: &Arc<Presheaf>, basis: &Basis) -> Result<SheafComparison> {
    let bp = BasisPresheaf::from_presheaf(sheaf, basis)?;
    let extension = extend_from_basis(&bp)?;
    let space = sheaf.space();
    let mut theta = Vec::new();
    let mut psi = Vec::new();
    for u in 0..space.open_count() {
        let inside = extension.members_within(u);
        let map: Vec<usize> = (0..sheaf.sections(u).len())
            .map(|s| {
                let fam: Vec<usize> = inside.iter().map(|&m| sheaf.restrict(m, u, s)).collect();
                extension.element_of(u, &fam).expect("restrictions of a section are compatible")
            })
            .collect();
        let t = ValueMorphism::new(sheaf.sections(u).clone(), extension.presheaf.sections(u).clone(), map)?;
        // gluing in a sheaf: each compatible family has exactly one preimage
        let p = t.inverse().ok_or_else(|| {
            Error::NotASheaf(format!("sections over {} are not glued from basis sections", space.open_key(u)))
        })?;
        theta.push(t);
        psi.push(p);
    }
    let theta = PresheafMorphism::new(sheaf.clone(), extension.presheaf.clone(), theta)?;
    let psi = PresheafMorphism::new(extension.presheaf.clone(), sheaf.clone(), psi)?;
    Ok(SheafComparison { extension, theta, psi })
}

/// Extensions of a basis presheaf over its own basis and over a smaller one,
/// with the comparison maps `zeta: coarse → fine` and `xi: fine → coarse`.
#[derive(Debug, Clone)]
pub struct BasisRefinement {
    pub coarse: BasisExtension,
    pub fine: BasisExtension,
    pub zeta: PresheafMorphism,
    pub xi: PresheafMorphism,
}

/// Compares the extension over the basis of `bp` with the extension over `smaller`.
pub fn refine_basis(bp: &BasisPresheaf, smaller: &Basis) -> Result<BasisRefinement> {
    let space = bp.basis.space().clone();
    if let Some(&m) = smaller.members().iter().find(|&&m| !bp.basis.contains(m)) {
        return Err(Error::NotABasis(format!("{} is not in the larger basis", space.open_key(m))));
    }
    let restricted = BasisPresheaf::new(
        smaller.clone(),
        bp.category,
        smaller.members().iter().map(|&m| (m, bp.sections(m).clone())).collect(),
        bp.res
            .iter()
            .filter(|((u, v), _)| smaller.contains(*u) && smaller.contains(*v))
            .map(|(&k, m)| (k, m.clone()))
            .collect(),
    )?;
    let coarse = extend_from_basis(bp)?;
    let fine = extend_from_basis(&restricted)?;

    // gluing of fine-basis sections inside a coarse basis open w
    let glue = |w: OpenId, values: &dyn Fn(OpenId) -> usize| -> Result<usize> {
        let inside = smaller.members_within(w);
        let mut found = None;
        for t in 0..bp.sections(w).len() {
            if inside.iter().all(|&v| bp.res(v, w).apply(t) == values(v)) {
                if found.is_some() {
                    return Err(Error::NotASheaf(format!("two gluings over {}", space.open_key(w))));
                }
                found = Some(t);
            }
        }
        found.ok_or_else(|| Error::NotASheaf(format!("no gluing over {}", space.open_key(w))))
    };

    let mut zeta = Vec::new();
    let mut xi = Vec::new();
    for u in 0..space.open_count() {
        let (cm, fm) = (coarse.members_within(u), fine.members_within(u));
        let positions: Vec<usize> = fm.iter().map(|m| cm.iter().position(|x| x == m).expect("sub-basis")).collect();
        let zmap = (0..coarse.presheaf.sections(u).len())
            .map(|e| {
                let fam = coarse.family(u, e);
                let sub: Vec<usize> = positions.iter().map(|&p| fam[p]).collect();
                fine.element_of(u, &sub).expect("subfamily is compatible")
            })
            .collect();
        zeta.push(ValueMorphism::new(coarse.presheaf.sections(u).clone(), fine.presheaf.sections(u).clone(), zmap)?);
        let xmap = (0..fine.presheaf.sections(u).len())
            .map(|e| {
                let fam = fine.family(u, e);
                let value_at = |v: OpenId| fam[fm.iter().position(|&x| x == v).expect("inside u")];
                let coarse_fam = cm.iter().map(|&w| glue(w, &value_at)).collect::<Result<Vec<_>>>()?;
                coarse
                    .element_of(u, &coarse_fam)
                    .ok_or_else(|| Error::NotASheaf(format!("glued family over {} is not compatible", space.open_key(u))))
            })
            .collect::<Result<Vec<_>>>()?;
        xi.push(ValueMorphism::new(fine.presheaf.sections(u).clone(), coarse.presheaf.sections(u).clone(), xmap)?);
    }
    let zeta = PresheafMorphism::new(coarse.presheaf.clone(), fine.presheaf.clone(), zeta)?;
    let xi = PresheafMorphism::new(fine.presheaf.clone(), coarse.presheaf.clone(), xi)?;
    Ok(BasisRefinement { coarse, fine, zeta, xi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(xs: &[&str]) -> Arc<ValueObject> {
        Arc::new(ValueObject::set(xs.iter().copied()).unwrap())
    }

    fn disc2_basis_presheaf() -> BasisPresheaf {
        let d = Arc::new(fixtures::disc2());
        let basis = Basis::generators(d.clone()).unwrap();
        let (one, two) = (d.open_by_key("{1}").unwrap(), d.open_by_key("{2}").unwrap());
        BasisPresheaf::new(basis, Category::FinSet, vec![(one, set(&["s"])), (two, set(&["t", "u"]))], vec![]).unwrap()
    }

    #[test]
    fn disc2_extension() {
        let bp = disc2_basis_presheaf();
        assert!(bp.check_f0().verdict);
        let ext = extend_from_basis(&bp).unwrap();
        let p = &ext.presheaf;
        let space = p.space();
        assert_eq!(p.sections(space.whole()).len(), 2);
        assert_eq!(p.sections(space.empty_open()).len(), 1);
        assert!(p.is_sheaf());
        for &m in bp.basis().members() {
            assert!(ext.can(m).unwrap().is_bijective());
        }
    }

    #[test]
    fn f0_on_all_opens_matches_sheaf_check() {
        let p = fixtures::disc2_g2_failure();
        let bp = BasisPresheaf::from_presheaf(&p, &Basis::all_opens(p.space().clone())).unwrap();
        assert_eq!(bp.check_f0(), p.check_sheaf());
    }

    #[test]
    fn product_morphism_extension() {
        let bp = disc2_basis_presheaf();
        let space = bp.basis().space().clone();
        let (one, two) = (space.open_by_key("{1}").unwrap(), space.open_by_key("{2}").unwrap());
        let target = BasisPresheaf::new(
            bp.basis().clone(),
            Category::FinSet,
            vec![(one, set(&["s'"])), (two, set(&["t'"]))],
            vec![],
        )
        .unwrap();
        let (e1, e2) = (extend_from_basis(&bp).unwrap(), extend_from_basis(&target).unwrap());
        let mut fam = BTreeMap::new();
        fam.insert(one, ValueMorphism::new(bp.sections(one).clone(), target.sections(one).clone(), vec![0]).unwrap());
        fam.insert(two, ValueMorphism::new(bp.sections(two).clone(), target.sections(two).clone(), vec![0, 0]).unwrap());
        let m = extend_morphism_from_basis(&e1, &e2, &fam).unwrap();
        assert_eq!(m.component(space.whole()).map(), [0, 0]);

        let ids: BTreeMap<_, _> = bp
            .basis()
            .members()
            .iter()
            .map(|&v| (v, ValueMorphism::identity(bp.sections(v).clone())))
            .collect();
        assert!(extend_morphism_from_basis(&e1, &e1, &ids).unwrap().is_identity());
    }

    #[test]
    fn round_trip_through_basis() {
        let p = Arc::new(fixtures::pc4_locally_constant(2));
        let basis = Basis::generators(p.space().clone()).unwrap();
        let cmp = sheaf_to_extension(&p, &basis).unwrap();
        assert!(cmp.theta.then(&cmp.psi).unwrap().is_identity());
        assert!(cmp.psi.then(&cmp.theta).unwrap().is_identity());
    }

    #[test]
    fn refinement_round_trip() {
        let p = fixtures::pc4_locally_constant(2);
        let all = Basis::all_opens(p.space().clone());
        let bp = BasisPresheaf::from_presheaf(&p, &all).unwrap();
        let smaller = Basis::generators(p.space().clone()).unwrap();
        let r = refine_basis(&bp, &smaller).unwrap();
        assert!(r.zeta.then(&r.xi).unwrap().is_identity());
        assert!(r.xi.then(&r.zeta).unwrap().is_identity());
    }
}
