use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::stalks::{stalk, support};
use crate::topology::{ContinuousMap, PointId};
use crate::values::ValueMorphism;

pub(crate) fn check_source(map: &ContinuousMap, f: &Presheaf) -> Result<()> {
    if **map.source() != **f.space() {
        return Err(Error::SpaceMismatch("presheaf does not live on the source of the map".into()));
    }
    if !map.is_continuous() {
        map.clone().require_continuous()?;
    }
    Ok(())
}

pub(crate) fn check_target(map: &ContinuousMap, g: &Presheaf) -> Result<()> {
    if **map.target() != **g.space() {
        return Err(Error::SpaceMismatch("presheaf does not live on the target of the map".into()));
    }
    if !map.is_continuous() {
        map.clone().require_continuous()?;
    }
    Ok(())
}

/// `V ↦ F(ψ⁻¹(V))` on the target space.
pub fn pushforward(map: &ContinuousMap, f: &Presheaf) -> Result<Presheaf> {
    check_source(map, f)?;
    let target = map.target().clone();
    let pre: Vec<usize> = (0..target.open_count())
        .map(|v| map.preimage_open(v))
        .collect::<Result<Vec<_>>>()?;
    let objects = pre.iter().map(|&u| f.sections(u).clone()).collect();
    let mut maps = Vec::new();
    for v in 0..target.open_count() {
        for w in target.opens_within(v) {
            maps.push(((w, v), f.res(pre[w], pre[v]).clone()));
        }
    }
    Presheaf::new(target, f.category(), objects, maps)
}

pub(crate) fn pushforward_morphism_between(
    map: &ContinuousMap,
    u: &PresheafMorphism,
    source: &Arc<Presheaf>,
    target: &Arc<Presheaf>,
) -> Result<PresheafMorphism> {
    let components = (0..map.target().open_count())
        .map(|v| Ok(u.component(map.preimage_open(v)?).clone()))
        .collect::<Result<Vec<ValueMorphism>>>()?;
    PresheafMorphism::new(source.clone(), target.clone(), components)
}

pub fn pushforward_morphism(map: &ContinuousMap, u: &PresheafMorphism) -> Result<PresheafMorphism> {
    let source = Arc::new(pushforward(map, u.source())?);
    let target = Arc::new(pushforward(map, u.target())?);
    pushforward_morphism_between(map, u, &source, &target)
}

/// The map from the stalk of `ψ_*F` at `ψ(x)` to the stalk of `F` at `x`.
pub fn stalk_comparison(map: &ContinuousMap, f: &Presheaf, x: PointId) -> Result<ValueMorphism> {
    let pushed = pushforward(map, f)?;
    let y = map.apply(x);
    let (from, to) = (stalk(&pushed, y)?, stalk(f, x)?);
    let uy = map.target().minimal_open(y);
    let ux = f.space().minimal_open(x);
    let res = f.res(ux, map.preimage_open(uy)?);
    ValueMorphism::new(from.object, to.object, res.map().to_vec())
}

/// For an open embedding, the inverse of [`stalk_comparison`] at `x`: the germ
/// over the smallest neighbourhood of `x` is read over its image, which is open.
pub fn open_embedding_stalk_inverse(map: &ContinuousMap, f: &Presheaf, x: PointId) -> Result<ValueMorphism> {
    let pushed = pushforward(map, f)?;
    let (source, target) = (map.source(), map.target());
    let ux = source.minimal_open(x);
    let image = map.image(source.open(ux));
    let v = target
        .open_id(image)
        .ok_or_else(|| Error::NotAnOpen(format!("image {} of a neighbourhood", target.set_key(image))))?;
    if map.preimage_open(v)? != ux {
        return Err(Error::NotContinuous("map is not an embedding near the point".into()));
    }
    let y = map.apply(x);
    let (from, to) = (stalk(f, x)?, stalk(&pushed, y)?);
    let res = pushed.res(target.minimal_open(y), v);
    ValueMorphism::new(from.object, to.object, res.map().to_vec())
}

/// Whether `Supp(ψ_*F) ⊆ closure(ψ(Supp F))`.
pub fn pushforward_support_bound(map: &ContinuousMap, f: &Presheaf) -> Result<bool> {
    let pushed = pushforward(map, f)?;
    let bound = map.target().closure(map.image(support(f)?));
    Ok(support(&pushed)?.is_subset(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn pushforward_to_a_point_is_global_sections() {
        let f = fixtures::disc2_constant_sheaf(2);
        let pt = Arc::new(fixtures::point());
        let map = ContinuousMap::new(f.space().clone(), pt, &[("1", "p"), ("2", "p")]).unwrap();
        let pushed = pushforward(&map, &f).unwrap();
        assert_eq!(pushed.sections(pushed.space().whole()), f.sections(f.space().whole()));
    }

    #[test]
    fn identity_pushforward() {
        let f = fixtures::pc4_locally_constant(2);
        let id = ContinuousMap::identity(f.space().clone());
        assert_eq!(pushforward(&id, &f).unwrap(), f);
    }

    #[test]
    fn pc4_to_sierpinski() {
        let f = fixtures::pc4_locally_constant(2);
        let map = fixtures::pc4_to_sierpinski();
        let pushed = pushforward(&map, &f).unwrap();
        let one = pushed.space().open_by_key("{1}").unwrap();
        let ab = f.space().open_by_key("{a,b}").unwrap();
        assert_eq!(pushed.sections(one), f.sections(ab));
    }

    #[test]
    fn discontinuous_maps_are_rejected() {
        let f = fixtures::sierpinski_sheaf();
        let d = Arc::new(fixtures::disc2());
        let map = ContinuousMap::from_labels(f.space().clone(), d, &[("0", "1"), ("1", "2")]).unwrap();
        assert!(matches!(pushforward(&map, &f), Err(Error::NotContinuous(_))));
    }
}
