use std::sync::Arc;

use super::{Presheaf, PresheafMorphism};
use crate::error::{Error, Result};
use crate::values::{
    limit, mediating_morphism, Diagram, LimitCone, Orientation, Poset, ValueMorphism, ValueObject,
};

/// Sheaves on one space indexed by a poset; the morphism attached to `i ≤ j`
/// runs from the sheaf at `j` to the sheaf at `i`.
#[derive(Debug, Clone)]
pub struct SheafDiagram {
    poset: Poset,
    sheaves: Vec<Arc<Presheaf>>,
    arrows: Vec<Vec<Option<PresheafMorphism>>>,
}

impl SheafDiagram {
    /// Identities may be omitted; every strict relation needs a morphism.
    pub fn new(
        poset: Poset,
        sheaves: Vec<Arc<Presheaf>>,
        arrows: Vec<((usize, usize), PresheafMorphism)>,
    ) -> Result<Self> {
        let n = poset.len();
        if sheaves.len() != n {
            return Err(Error::MalformedDiagram(format!("{} sheaves for {} indices", sheaves.len(), n)));
        }
        if sheaves.is_empty() {
            return Err(Error::MalformedDiagram("a diagram of sheaves needs at least one index".into()));
        }
        for s in &sheaves[1..] {
            if s.space() != sheaves[0].space() {
                return Err(Error::SpaceMismatch("sheaves of a diagram live on one space".into()));
            }
            if s.category() != sheaves[0].category() {
                return Err(Error::MixedCategories { expected: sheaves[0].category(), found: s.category() });
            }
        }
        if let Some(i) = sheaves.iter().position(|s| !s.is_sheaf()) {
            return Err(Error::NotASheaf(format!("index `{}`", poset.labels()[i])));
        }
        let mut table: Vec<Vec<Option<PresheafMorphism>>> = vec![vec![None; n]; n];
        for ((i, j), m) in arrows {
            if i >= n || j >= n || !poset.leq(i, j) {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) is not a relation")));
            }
            if **m.source() != *sheaves[j] || **m.target() != *sheaves[i] {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) has the wrong ends")));
            }
            if table[i][j].replace(m).is_some() {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) given twice")));
            }
        }
        for (i, row) in table.iter_mut().enumerate() {
            match &row[i] {
                Some(m) if !m.is_identity() => {
                    return Err(Error::MalformedDiagram(format!("arrow ({i}, {i}) is not the identity")))
                }
                Some(_) => {}
                None => row[i] = Some(PresheafMorphism::identity(sheaves[i].clone())),
            }
        }
        for (i, j) in poset.strict_pairs() {
            if table[i][j].is_none() {
                return Err(Error::MalformedDiagram(format!(
                    "missing arrow for `{}` ≤ `{}`",
                    poset.labels()[i],
                    poset.labels()[j]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if poset.leq(i, j) && poset.leq(j, k) {
                        let (ij, jk, ik) = (
                            table[i][j].as_ref().expect("present"),
                            table[j][k].as_ref().expect("present"),
                            table[i][k].as_ref().expect("present"),
                        );
                        if jk.then(ij)? != *ik {
                            return Err(Error::MalformedDiagram(format!("arrows do not compose along ({i}, {j}, {k})")));
                        }
                    }
                }
            }
        }
        Ok(SheafDiagram { poset, sheaves, arrows: table })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn sheaves(&self) -> &[Arc<Presheaf>] {
        &self.sheaves
    }

    pub fn arrow(&self, i: usize, j: usize) -> Option<&PresheafMorphism> {
        self.arrows[i][j].as_ref()
    }
}

/// The open-wise limit of a diagram of sheaves with its projections.
#[derive(Debug, Clone)]
pub struct SheafLimit {
    pub presheaf: Arc<Presheaf>,
    pub projections: Vec<PresheafMorphism>,
    cones: Vec<LimitCone>,
}

impl SheafLimit {
    /// The unique morphism from `source` through which `cone` factors.
    pub fn mediate(&self, source: &Arc<Presheaf>, cone: &[PresheafMorphism]) -> Result<PresheafMorphism> {
        if cone.len() != self.projections.len() {
            return Err(Error::IncompatibleCone);
        }
        if cone.iter().any(|c| c.source() != source) {
            return Err(Error::IncompatibleCone);
        }
        let components = (0..source.space().open_count())
            .map(|u| {
                let comps: Vec<ValueMorphism> = cone.iter().map(|c| c.component(u).clone()).collect();
                let m = mediating_morphism(&comps, &self.cones[u])?;
                Ok(ValueMorphism::new_unchecked(source.sections(u).clone(), self.presheaf.sections(u).clone(), m.map().to_vec()))
            })
            .collect::<Result<Vec<_>>>()?;
        PresheafMorphism::new(source.clone(), self.presheaf.clone(), components)
    }
}

pub fn limit_of_sheaves(d: &SheafDiagram) -> Result<SheafLimit> {
    let space = d.sheaves[0].space().clone();
    let category = d.sheaves[0].category();
    let n = d.poset.len();
    let mut cones = Vec::with_capacity(space.open_count());
    for u in 0..space.open_count() {
        let objects = d.sheaves.iter().map(|s| s.sections(u).clone()).collect();
        let arrows = d
            .poset
            .strict_pairs()
            .into_iter()
            .map(|(i, j)| ((i, j), d.arrows[i][j].as_ref().expect("present").component(u).clone()))
            .collect();
        let diagram = Diagram::new(category, d.poset.clone(), Orientation::Contravariant, objects, arrows)?;
        cones.push(limit(&diagram)?);
    }
    let objects: Vec<Arc<ValueObject>> = cones.iter().map(|c| c.object.clone()).collect();
    let mut maps = Vec::new();
    for v in 0..space.open_count() {
        for u in space.opens_within(v) {
            let map = (0..objects[v].len())
                .map(|e| {
                    let fam: Vec<usize> = (0..n).map(|l| d.sheaves[l].restrict(u, v, cones[v].family(e)[l])).collect();
                    cones[u].element_of(&fam).expect("restriction preserves compatibility")
                })
                .collect();
            maps.push(((u, v), ValueMorphism::new_unchecked(objects[v].clone(), objects[u].clone(), map)));
        }
    }
    let presheaf = Arc::new(Presheaf::new(space.clone(), category, objects, maps)?);
    let projections = (0..n)
        .map(|l| {
            let comps = cones.iter().map(|c| c.projections[l].clone()).collect();
            PresheafMorphism::new(presheaf.clone(), d.sheaves[l].clone(), comps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SheafLimit { presheaf, projections, cones })
}
