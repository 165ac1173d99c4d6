use std::collections::HashMap;
use std::sync::Arc;

use super::direct::{check_target, pushforward, pushforward_morphism_between};
use crate::error::{Error, Result};
use crate::labels::tuple_label;
use crate::presheaf::{enumerate_presheaf_morphisms, Presheaf, PresheafMorphism};
use crate::topology::{ContinuousMap, OpenId, PointId};
use crate::values::{Category, ValueMorphism, ValueObject};

/// The sheaf of germ families of `G` along a map, with its unit `G → ψ_*ψ*G`.
///
/// A section over `U` assigns to each `x ∈ U` a germ of `G` at `ψ(x)`, stored as
/// an element of `G` over the smallest neighbourhood of `ψ(x)`.
#[derive(Debug, Clone)]
pub struct InverseImage {
    pub map: ContinuousMap,
    pub source: Arc<Presheaf>,
    pub sheaf: Arc<Presheaf>,
    pub pushed: Arc<Presheaf>,
    pub unit: PresheafMorphism,
    points: Vec<Vec<PointId>>,
    families: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
}

impl InverseImage {
    /// Points of `u`, the positions of a family.
    pub fn points(&self, u: OpenId) -> &[PointId] {
        &self.points[u]
    }

    pub fn family(&self, u: OpenId, e: usize) -> &[usize] {
        &self.families[u][e]
    }

    pub fn element_of(&self, u: OpenId, family: &[usize]) -> Option<usize> {
        self.lookup[u].get(family).copied()
    }
}

/// Smallest neighbourhood of `ψ(x)`, where germs at `ψ(x)` live.
fn germ_open(map: &ContinuousMap, x: PointId) -> OpenId {
    map.target().minimal_open(map.apply(x))
}

/// Whether `family` (one germ per point of `u`, in point order) is a section of
/// the inverse image: germs propagate along the smallest neighbourhood of each point.
pub fn is_germ_family(map: &ContinuousMap, g: &Presheaf, u: OpenId, family: &[usize]) -> bool {
    let source = map.source();
    let pts: Vec<PointId> = source.open(u).iter().collect();
    if family.len() != pts.len() {
        return false;
    }
    let pos = |p: PointId| pts.iter().position(|&q| q == p);
    pts.iter().enumerate().all(|(i, &x)| {
        let gx = germ_open(map, x);
        if family[i] >= g.sections(gx).len() {
            return false;
        }
        source.open(source.minimal_open(x)).iter().all(|z| match pos(z) {
            Some(j) => family[j] == g.restrict(germ_open(map, z), gx, family[i]),
            None => false,
        })
    })
}

fn enumerate_families(map: &ContinuousMap, g: &Presheaf, pts: &[PointId]) -> Vec<Vec<usize>> {
    let source = map.source();
    let opens: Vec<OpenId> = pts.iter().map(|&x| germ_open(map, x)).collect();
    // pairs (i, j) with pts[j] in the smallest neighbourhood of pts[i]
    let below: Vec<Vec<usize>> = pts
        .iter()
        .map(|&x| {
            let ux = source.open(source.minimal_open(x));
            (0..pts.len()).filter(|&j| ux.contains(pts[j])).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut fam = vec![0; pts.len()];
    fn search(
        g: &Presheaf,
        opens: &[OpenId],
        below: &[Vec<usize>],
        i: usize,
        fam: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == fam.len() {
            out.push(fam.clone());
            return;
        }
        for a in 0..g.sections(opens[i]).len() {
            fam[i] = a;
            let ok = (0..i).all(|j| {
                let down = below[i].contains(&j) && fam[j] != g.restrict(opens[j], opens[i], a);
                let up = below[j].contains(&i) && a != g.restrict(opens[i], opens[j], fam[j]);
                !(down || up)
            });
            if ok {
                search(g, opens, below, i + 1, fam, out);
            }
        }
    }
    search(g, &opens, &below, 0, &mut fam, &mut out);
    out
}

/// The inverse image of `g` along `map`.
pub fn pullback(map: &ContinuousMap, g: &Arc<Presheaf>) -> Result<InverseImage> {
    check_target(map, g)?;
    let source = map.source().clone();
    let n = source.open_count();
    let mut points = Vec::with_capacity(n);
    let mut families = Vec::with_capacity(n);
    let mut lookup = Vec::with_capacity(n);
    let mut objects = Vec::with_capacity(n);
    for u in 0..n {
        let pts: Vec<PointId> = source.open(u).iter().collect();
        let opens: Vec<OpenId> = pts.iter().map(|&x| germ_open(map, x)).collect();
        let mut labelled: Vec<(String, Vec<usize>)> = enumerate_families(map, g, &pts)
            .into_iter()
            .map(|f| {
                let label = tuple_label(f.iter().zip(&opens).map(|(&a, &o)| g.sections(o).label(a)));
                (label, f)
            })
            .collect();
        labelled.sort();
        let (labels, fams): (Vec<String>, Vec<Vec<usize>>) = labelled.into_iter().unzip();
        let table: HashMap<Vec<usize>, usize> = fams.iter().enumerate().map(|(e, f)| (f.clone(), e)).collect();
        let object = match g.category() {
            Category::FinSet => ValueObject::set(labels)?,
            Category::FinAb => {
                let zero: Vec<usize> = opens.iter().map(|&o| g.sections(o).zero()).collect();
                ValueObject::group_from_fn(labels, table[&zero], |a, b| {
                    let sum: Vec<usize> = (0..opens.len())
                        .map(|i| g.sections(opens[i]).add(fams[a][i], fams[b][i]))
                        .collect();
                    table[&sum]
                })?
            }
        };
        objects.push(Arc::new(object));
        points.push(pts);
        families.push(fams);
        lookup.push(table);
    }
    let mut maps = Vec::new();
    for v in 0..n {
        for u in source.opens_within(v) {
            let positions: Vec<usize> = points[u]
                .iter()
                .map(|p| points[v].iter().position(|q| q == p).expect("subset"))
                .collect();
            let map_uv = families[v]
                .iter()
                .map(|f| {
                    let sub: Vec<usize> = positions.iter().map(|&i| f[i]).collect();
                    lookup[u][&sub]
                })
                .collect();
            maps.push(((u, v), ValueMorphism::new_unchecked(objects[v].clone(), objects[u].clone(), map_uv)));
        }
    }
    let sheaf = Arc::new(Presheaf::new(source, g.category(), objects, maps)?);
    let pushed = Arc::new(pushforward(map, &sheaf)?);
    let target = map.target();
    let components = (0..target.open_count())
        .map(|v| {
            let pre = map.preimage_open(v)?;
            let table = (0..g.sections(v).len())
                .map(|s| {
                    let fam: Vec<usize> = points[pre].iter().map(|&x| g.restrict(germ_open(map, x), v, s)).collect();
                    lookup[pre][&fam]
                })
                .collect();
            Ok(ValueMorphism::new_unchecked(g.sections(v).clone(), pushed.sections(v).clone(), table))
        })
        .collect::<Result<Vec<_>>>()?;
    let unit = PresheafMorphism::new(g.clone(), pushed.clone(), components)?;
    Ok(InverseImage { map: map.clone(), source: g.clone(), sheaf, pushed, unit, points, families, lookup })
}

/// The inverse image along the identity.
pub fn sheafify(g: &Arc<Presheaf>) -> Result<InverseImage> {
    pullback(&ContinuousMap::identity(g.space().clone()), g)
}

/// Gluing in a sheaf along the covering of each open by the smallest
/// neighbourhoods of its points.
#[derive(Debug, Clone)]
pub struct SheafGluer {
    sheaf: Arc<Presheaf>,
    tables: Vec<HashMap<Vec<usize>, usize>>,
}

impl SheafGluer {
    pub fn new(sheaf: &Arc<Presheaf>) -> Result<Self> {
        if !sheaf.is_sheaf() {
            return Err(Error::NotASheaf("gluing needs a sheaf".into()));
        }
        let space = sheaf.space();
        let tables = (0..space.open_count())
            .map(|u| {
                let locals: Vec<OpenId> = space.open(u).iter().map(|x| space.minimal_open(x)).collect();
                (0..sheaf.sections(u).len())
                    .map(|s| (locals.iter().map(|&l| sheaf.restrict(l, u, s)).collect(), s))
                    .collect()
            })
            .collect();
        Ok(SheafGluer { sheaf: sheaf.clone(), tables })
    }

    pub fn sheaf(&self) -> &Arc<Presheaf> {
        &self.sheaf
    }

    /// The section over `u` restricting to `locals[i]` on the smallest
    /// neighbourhood of the `i`-th point of `u`.
    pub fn glue(&self, u: OpenId, locals: &[usize]) -> Result<usize> {
        self.tables[u].get(locals).copied().ok_or_else(|| {
            Error::NotASheaf(format!("local sections over {} do not glue", self.sheaf.space().open_key(u)))
        })
    }
}

/// The morphism `ψ*G → F` corresponding to `u: G → ψ_*F`.
pub fn sharp(inv: &InverseImage, u: &PresheafMorphism, f: &Arc<Presheaf>) -> Result<PresheafMorphism> {
    sharp_with(inv, u, &SheafGluer::new(f)?)
}

pub fn sharp_with(inv: &InverseImage, u: &PresheafMorphism, gluer: &SheafGluer) -> Result<PresheafMorphism> {
    let f = gluer.sheaf();
    let map = &inv.map;
    if **f.space() != **map.source() {
        return Err(Error::SpaceMismatch("sheaf does not live on the source of the map".into()));
    }
    if u.source() != &inv.source {
        return Err(Error::ValueMismatch("morphism does not start at the pulled-back presheaf".into()));
    }
    let space = map.source();
    let components = (0..space.open_count())
        .map(|w| {
            let pts = &inv.points[w];
            let table = (0..inv.sheaf.sections(w).len())
                .map(|e| {
                    let fam = &inv.families[w][e];
                    let locals: Vec<usize> = pts
                        .iter()
                        .zip(fam)
                        .map(|(&x, &germ)| {
                            let vy = germ_open(map, x);
                            let pre = map.preimage_open(vy)?;
                            let t = u.component(vy).apply(germ);
                            Ok(f.restrict(space.minimal_open(x), pre, t))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    gluer.glue(w, &locals)
                })
                .collect::<Result<Vec<_>>>()?;
            ValueMorphism::new(inv.sheaf.sections(w).clone(), f.sections(w).clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMorphism::new(inv.sheaf.clone(), f.clone(), components)
}

fn flat_onto(inv: &InverseImage, nu: &PresheafMorphism, pushed_f: &Arc<Presheaf>) -> Result<PresheafMorphism> {
    let pushed_nu = pushforward_morphism_between(&inv.map, nu, &inv.pushed, pushed_f)?;
    inv.unit.then(&pushed_nu)
}

/// `ψ_*(ν) ∘ unit`.
pub fn flat(inv: &InverseImage, nu: &PresheafMorphism) -> Result<PresheafMorphism> {
    let pushed_f = Arc::new(pushforward(&inv.map, nu.target())?);
    flat_onto(inv, nu, &pushed_f)
}

/// `ψ*ψ_*F → F`, the morphism corresponding to the identity of `ψ_*F`.
pub fn counit(map: &ContinuousMap, f: &Arc<Presheaf>) -> Result<(InverseImage, PresheafMorphism)> {
    let pushed = Arc::new(pushforward(map, f)?);
    let inv = pullback(map, &pushed)?;
    let sigma = sharp(&inv, &PresheafMorphism::identity(pushed), f)?;
    Ok((inv, sigma))
}

/// `ψ*(u)` from the germ-wise formula.
pub fn pullback_morphism(from: &InverseImage, to: &InverseImage, u: &PresheafMorphism) -> Result<PresheafMorphism> {
    let map = &from.map;
    let space = map.source();
    let components = (0..space.open_count())
        .map(|w| {
            let table = from.families[w]
                .iter()
                .map(|fam| {
                    let image: Vec<usize> = from.points[w]
                        .iter()
                        .zip(fam)
                        .map(|(&x, &germ)| u.component(germ_open(map, x)).apply(germ))
                        .collect();
                    to.element_of(w, &image)
                        .ok_or_else(|| Error::IncompatibleFamily("image is not a germ family".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            ValueMorphism::new(from.sheaf.sections(w).clone(), to.sheaf.sections(w).clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMorphism::new(from.sheaf.clone(), to.sheaf.clone(), components)
}

/// `ψ*(u)` as the morphism corresponding to `unit ∘ u`.
pub fn pullback_morphism_via_sharp(
    from: &InverseImage,
    to: &InverseImage,
    u: &PresheafMorphism,
) -> Result<PresheafMorphism> {
    sharp(from, &u.then(&to.unit)?, &to.sheaf)
}

/// The two Hom-sets of the adjunction and the transposition tables between them.
#[derive(Debug, Clone)]
pub struct AdjunctionWitness {
    pub sheaf_side: Vec<PresheafMorphism>,
    pub presheaf_side: Vec<PresheafMorphism>,
    /// `forward[i]` is the index of `flat(sheaf_side[i])`.
    pub forward: Vec<usize>,
    /// `backward[j]` is the index of `sharp(presheaf_side[j])`.
    pub backward: Vec<usize>,
}

impl AdjunctionWitness {
    pub fn is_bijection(&self) -> bool {
        self.sheaf_side.len() == self.presheaf_side.len()
            && self.forward.iter().enumerate().all(|(i, &j)| self.backward[j] == i)
            && self.backward.iter().enumerate().all(|(j, &i)| self.forward[i] == j)
    }
}

fn key(m: &PresheafMorphism) -> Vec<Vec<usize>> {
    m.components().iter().map(|c| c.map().to_vec()).collect()
}

/// Enumerates `Hom(ψ*G, F)` and `Hom(G, ψ_*F)` and transposes each element.
pub fn check_adjunction(
    map: &ContinuousMap,
    g: &Arc<Presheaf>,
    f: &Arc<Presheaf>,
    max_homs: usize,
) -> Result<AdjunctionWitness> {
    let inv = pullback(map, g)?;
    let gluer = SheafGluer::new(f)?;
    let pushed_f = Arc::new(pushforward(map, f)?);
    let sheaf_side = enumerate_presheaf_morphisms(&inv.sheaf, f, max_homs)?;
    let presheaf_side = enumerate_presheaf_morphisms(g, &pushed_f, max_homs)?;
    let left: HashMap<Vec<Vec<usize>>, usize> = sheaf_side.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
    let right: HashMap<Vec<Vec<usize>>, usize> = presheaf_side.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
    let missing = || Error::NotInverseImagePair("transpose falls outside the enumerated Hom-set".into());
    let forward = sheaf_side
        .iter()
        .map(|nu| right.get(&key(&flat_onto(&inv, nu, &pushed_f)?)).copied().ok_or_else(missing))
        .collect::<Result<Vec<_>>>()?;
    let backward = presheaf_side
        .iter()
        .map(|u| left.get(&key(&sharp_with(&inv, u, &gluer)?)).copied().ok_or_else(missing))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdjunctionWitness { sheaf_side, presheaf_side, forward, backward })
}

/// Naturality of the transposition in the sheaf: for every `ν: ψ*G → F₁`,
/// `flat(φ ∘ ν) = ψ_*(φ) ∘ flat(ν)`.
pub fn check_adjunction_naturality(
    map: &ContinuousMap,
    g: &Arc<Presheaf>,
    phi: &PresheafMorphism,
    max_homs: usize,
) -> Result<bool> {
    let inv = pullback(map, g)?;
    let pushed_phi = super::direct::pushforward_morphism(map, phi)?;
    for nu in enumerate_presheaf_morphisms(&inv.sheaf, phi.source(), max_homs)? {
        let lhs = flat(&inv, &nu.then(phi)?)?;
        let rhs = flat(&inv, &nu)?.then(&pushed_phi)?;
        if key(&lhs) != key(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique isomorphism `ζ: first.sheaf → second` with `ψ_*(ζ) ∘ first.unit = second_unit`.
pub fn canonical_comparison(
    first: &InverseImage,
    second: &Arc<Presheaf>,
    second_unit: &PresheafMorphism,
) -> Result<PresheafMorphism> {
    let zeta = sharp(first, second_unit, second).map_err(|e| match e {
        Error::NotASheaf(m) => Error::NotInverseImagePair(m),
        other => other,
    })?;
    if !zeta.is_iso() {
        return Err(Error::NotInverseImagePair("comparison is not an isomorphism".into()));
    }
    Ok(zeta)
}

/// Inverse images along `outer ∘ inner` computed directly and in two steps.
#[derive(Debug, Clone)]
pub struct CompositionIso {
    pub direct: InverseImage,
    pub first_step: InverseImage,
    pub second_step: InverseImage,
    /// `outer_*(unit of the second step) ∘ unit of the first step`.
    pub composite_unit: PresheafMorphism,
    /// From the direct inverse image to the two-step one.
    pub iso: PresheafMorphism,
}

/// `inner: X → Y`, `outer: Y → Z`, `h` on `Z`.
pub fn composition_iso(inner: &ContinuousMap, outer: &ContinuousMap, h: &Arc<Presheaf>) -> Result<CompositionIso> {
    let composite = inner.then(outer)?;
    let first_step = pullback(outer, h)?;
    let second_step = pullback(inner, &first_step.sheaf)?;
    let lifted = super::direct::pushforward_morphism(outer, &second_step.unit)?;
    let composite_unit = first_step.unit.then(&lifted)?;
    let direct = pullback(&composite, h)?;
    let iso = canonical_comparison(&direct, &second_step.sheaf, &composite_unit)?;
    Ok(CompositionIso { direct, first_step, second_step, composite_unit, iso })
}

/// `G_{ψ(x)} → (ψ*G)_x`: a germ is sent to the germ at `x` of its unit image.
pub fn pullback_stalk_iso(inv: &InverseImage, x: PointId) -> Result<ValueMorphism> {
    let map = &inv.map;
    if x >= map.source().len() {
        return Err(Error::UnknownPoint(format!("point index {x}")));
    }
    let vy = germ_open(map, x);
    let pre = map.preimage_open(vy)?;
    let ux = map.source().minimal_open(x);
    let res = inv.sheaf.res(ux, pre);
    let table = (0..inv.source.sections(vy).len())
        .map(|s| res.apply(inv.unit.component(vy).apply(s)))
        .collect();
    ValueMorphism::new(inv.source.sections(vy).clone(), inv.sheaf.sections(ux).clone(), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn sheafify_disc2_constant() {
        let d = Arc::new(fixtures::disc2());
        let g = Arc::new(Presheaf::constant(d.clone(), Arc::new(ValueObject::set(["0", "1"]).unwrap())));
        let s = sheafify(&g).unwrap();
        assert_eq!(s.sheaf.sections(d.whole()).len(), 4);
        assert_eq!(s.sheaf.sections(d.empty_open()).len(), 1);
        assert!(s.sheaf.is_sheaf());
        for x in 0..d.len() {
            assert!(pullback_stalk_iso(&s, x).unwrap().is_bijective());
        }
    }

    #[test]
    fn sheafify_a_sheaf_has_bijective_unit() {
        let g = Arc::new(fixtures::pc4_locally_constant(2));
        assert!(sheafify(&g).unwrap().unit.is_iso());
    }

    #[test]
    fn non_terminal_empty_sections_become_terminal() {
        let s = Arc::new(fixtures::sierpinski());
        let g = Arc::new(
            Presheaf::from_labels(
                s.clone(),
                Category::FinSet,
                vec![("{}", ValueObject::set(["e", "f"]).unwrap()), ("{1}", ValueObject::set(["u"]).unwrap()), ("{0,1}", ValueObject::set(["u"]).unwrap())],
                &[("{}", "{1}", &[("u", "e")]), ("{}", "{0,1}", &[("u", "e")])],
            )
            .unwrap(),
        );
        assert_eq!(sheafify(&g).unwrap().sheaf.sections(s.empty_open()).len(), 1);
    }

    #[test]
    fn sharp_of_unit_is_identity() {
        let g = Arc::new(fixtures::disc2_constant_presheaf(2));
        let map = ContinuousMap::identity(g.space().clone());
        let inv = pullback(&map, &g).unwrap();
        let id = sharp(&inv, &inv.unit, &inv.sheaf).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn adjunction_on_disc2_to_point() {
        let pt = Arc::new(fixtures::point());
        let f = Arc::new(fixtures::disc2_constant_sheaf(2));
        let map = ContinuousMap::new(f.space().clone(), pt.clone(), &[("1", "p"), ("2", "p")]).unwrap();
        let g = Arc::new(Presheaf::constant(pt, Arc::new(ValueObject::set(["g"]).unwrap())));
        let w = check_adjunction(&map, &g, &f, 10_000).unwrap();
        assert!(w.is_bijection());
        assert_eq!(w.sheaf_side.len(), 4);
    }

    #[test]
    fn counit_of_identity_inverts_unit() {
        let f = Arc::new(fixtures::pc4_locally_constant(2));
        let map = ContinuousMap::identity(f.space().clone());
        let (inv, sigma) = counit(&map, &f).unwrap();
        let unit_then = inv.unit.then(&crate::functors::pushforward_morphism(&map, &sigma).unwrap()).unwrap();
        assert!(unit_then.is_identity());
    }

    #[test]
    fn closed_point_fiber() {
        let g = Arc::new(fixtures::sierpinski_sheaf());
        let pt = Arc::new(fixtures::point());
        let j = ContinuousMap::new(pt.clone(), g.space().clone(), &[("p", "0")]).unwrap();
        let inv = pullback(&j, &g).unwrap();
        assert_eq!(inv.sheaf.sections(pt.whole()).len(), g.sections(g.space().whole()).len());
    }
}
