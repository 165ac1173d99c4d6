use std::collections::BTreeMap;
use std::sync::Arc;

use super::direct::{check_source, check_target, pushforward};
use crate::error::{Error, Result};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::topology::{Basis, ContinuousMap, OpenId};
use crate::values::ValueMorphism;

/// A morphism `G → ψ_*F` for `G` on the target and `F` on the source of `ψ`.
#[derive(Debug, Clone)]
pub struct PsiMorphism {
    pub map: ContinuousMap,
    pub source: Arc<Presheaf>,
    pub target: Arc<Presheaf>,
    pub body: PresheafMorphism,
}

impl PsiMorphism {
    pub fn new(map: ContinuousMap, source: Arc<Presheaf>, target: Arc<Presheaf>, body: PresheafMorphism) -> Result<Self> {
        check_target(&map, &source)?;
        check_source(&map, &target)?;
        if body.source() != &source {
            return Err(Error::IncompatibleFamily("body does not start at the source presheaf".into()));
        }
        if **body.target() != pushforward(&map, &target)? {
            return Err(Error::IncompatibleFamily("body does not end at the direct image".into()));
        }
        Ok(PsiMorphism { map, source, target, body })
    }

    /// `u_{U,V}: G(V) → F(U)`, defined when `U ⊆ ψ⁻¹(V)`.
    pub fn component(&self, u: OpenId, v: OpenId) -> Result<ValueMorphism> {
        let pre = self.map.preimage_open(v)?;
        let space = self.map.source();
        if !space.is_subset(u, pre) {
            return Err(Error::IncompatibleFamily(format!(
                "{} does not map into {}",
                space.open_key(u),
                self.map.target().open_key(v)
            )));
        }
        self.body.component(v).then(self.target.res(u, pre))
    }

    /// Every `u_{U,V}`.
    pub fn family(&self) -> PsiFamily {
        let mut family = PsiFamily::default();
        for v in 0..self.map.target().open_count() {
            let pre = self.map.preimage_open(v).expect("continuous");
            for u in self.map.source().opens_within(pre) {
                family.insert(u, v, self.component(u, v).expect("inside the preimage"));
            }
        }
        family
    }
}

/// Maps `G(V) → F(U)` indexed by `(U, V)`.
#[derive(Debug, Clone, Default)]
pub struct PsiFamily {
    maps: BTreeMap<(OpenId, OpenId), ValueMorphism>,
}

impl PsiFamily {
    pub fn insert(&mut self, u: OpenId, v: OpenId, m: ValueMorphism) {
        self.maps.insert((u, v), m);
    }

    pub fn get(&self, u: OpenId, v: OpenId) -> Option<&ValueMorphism> {
        self.maps.get(&(u, v))
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((OpenId, OpenId), &ValueMorphism)> {
        self.maps.iter().map(|(&k, m)| (k, m))
    }

    /// The entries with `U` and `V` both basis members.
    pub fn restrict_to_bases(&self, source: &Basis, target: &Basis) -> PsiFamily {
        let maps = self
            .maps
            .iter()
            .filter(|((u, v), _)| source.contains(*u) && target.contains(*v))
            .map(|(&k, m)| (k, m.clone()))
            .collect();
        PsiFamily { maps }
    }
}

fn check_entries(map: &ContinuousMap, g: &Presheaf, f: &Presheaf, family: &PsiFamily) -> Result<()> {
    let (xs, ys) = (map.source(), map.target());
    for ((u, v), m) in family.iter() {
        if u >= xs.open_count() || v >= ys.open_count() {
            return Err(Error::IncompatibleFamily(format!("open id out of range in ({u}, {v})")));
        }
        if !xs.open(u).is_subset(map.preimage(ys.open(v))) {
            return Err(Error::IncompatibleFamily(format!("{} does not map into {}", xs.open_key(u), ys.open_key(v))));
        }
        if **m.source() != **g.sections(v) || **m.target() != **f.sections(u) {
            return Err(Error::IncompatibleFamily(format!(
                "map for ({}, {}) has the wrong ends",
                xs.open_key(u),
                ys.open_key(v)
            )));
        }
    }
    // u_{U,V} ∘ ρ^G_{V,V'} = ρ^F_{U,U'} ∘ u_{U',V'} whenever U ⊆ U' and V ⊆ V'
    for ((u, v), small) in family.iter() {
        for ((u2, v2), big) in family.iter() {
            if !xs.is_subset(u, u2) || !ys.is_subset(v, v2) {
                continue;
            }
            let left = g.res(v, v2).then(small)?;
            let right = big.then(f.res(u, u2))?;
            if left.map() != right.map() {
                return Err(Error::IncompatibleFamily(format!(
                    "square ({}, {}) → ({}, {}) does not commute",
                    xs.open_key(u2),
                    ys.open_key(v2),
                    xs.open_key(u),
                    ys.open_key(v)
                )));
            }
        }
    }
    Ok(())
}

/// The ψ-morphism with `u_V = u_{ψ⁻¹(V),V}`; the family must contain those entries.
pub fn psi_morphism_from_family(
    map: &ContinuousMap,
    g: &Arc<Presheaf>,
    f: &Arc<Presheaf>,
    family: &PsiFamily,
) -> Result<PsiMorphism> {
    check_target(map, g)?;
    check_source(map, f)?;
    check_entries(map, g, f, family)?;
    let pushed = Arc::new(pushforward(map, f)?);
    let components = (0..map.target().open_count())
        .map(|v| {
            let pre = map.preimage_open(v)?;
            family.get(pre, v).cloned().ok_or_else(|| {
                Error::IncompatibleFamily(format!("no map for the preimage of {}", map.target().open_key(v)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let body = PresheafMorphism::new(g.clone(), pushed, components)?;
    Ok(PsiMorphism { map: map.clone(), source: g.clone(), target: f.clone(), body })
}

/// The ψ-morphism of sheaves determined by its entries on basis pairs.
///
/// For `s ∈ G(W)` the local sections `u_{U,V}(s|_V)` over basis pairs with
/// `V ⊆ W` are glued in `F` over the preimage of `W`.
pub fn psi_morphism_from_basis_family(
    map: &ContinuousMap,
    g: &Arc<Presheaf>,
    f: &Arc<Presheaf>,
    source_basis: &Basis,
    target_basis: &Basis,
    family: &PsiFamily,
) -> Result<PsiMorphism> {
    check_target(map, g)?;
    check_source(map, f)?;
    if **source_basis.space() != **map.source() || **target_basis.space() != **map.target() {
        return Err(Error::SpaceMismatch("bases do not live on the spaces of the map".into()));
    }
    for (name, p) in [("source", f), ("target", g)] {
        if !p.is_sheaf() {
            return Err(Error::NotASheaf(format!("the {name} presheaf")));
        }
    }
    if let Some(((u, v), _)) = family.iter().find(|((u, v), _)| !source_basis.contains(*u) || !target_basis.contains(*v)) {
        return Err(Error::IncompatibleFamily(format!(
            "({}, {}) is not a pair of basis opens",
            map.source().open_key(u),
            map.target().open_key(v)
        )));
    }
    check_entries(map, g, f, family)?;
    let (xs, ys) = (map.source(), map.target());
    let pushed = Arc::new(pushforward(map, f)?);
    let components = (0..ys.open_count())
        .map(|w| {
            let pre = map.preimage_open(w)?;
            let table = (0..g.sections(w).len())
                .map(|s| {
                    let mut locals: BTreeMap<OpenId, usize> = BTreeMap::new();
                    for ((u, v), m) in family.iter() {
                        if !ys.is_subset(v, w) {
                            continue;
                        }
                        let t = m.apply(g.restrict(v, w, s));
                        if *locals.entry(u).or_insert(t) != t {
                            return Err(Error::IncompatibleFamily(format!(
                                "two values over {}",
                                xs.open_key(u)
                            )));
                        }
                    }
                    let mut found = None;
                    for t in 0..f.sections(pre).len() {
                        if locals.iter().all(|(&u, &l)| f.restrict(u, pre, t) == l) {
                            if found.is_some() {
                                return Err(Error::NotASheaf("local values glue in two ways".into()));
                            }
                            found = Some(t);
                        }
                    }
                    found.ok_or_else(|| {
                        Error::IncompatibleFamily(format!("local values over {} do not glue", xs.open_key(pre)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ValueMorphism::new(g.sections(w).clone(), f.sections(pre).clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    let body = PresheafMorphism::new(g.clone(), pushed, components)?;
    Ok(PsiMorphism { map: map.clone(), source: g.clone(), target: f.clone(), body })
}
