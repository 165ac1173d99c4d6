//! Gluing sheaves given on an open covering along isomorphisms on the overlaps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functors::SheafGluer;
use crate::presheaf::{extend_from_basis, BasisPresheaf, Presheaf, PresheafMorphism};
use crate::topology::{Basis, FiniteSpace, OpenId};
use crate::values::ValueMorphism;

/// Sheaves `F_λ` on the opens `U_λ` of a covering, with `θ_{λμ}: F_μ → F_λ` on `U_λ ∩ U_μ`.
#[derive(Debug, Clone)]
pub struct GluingDatum {
    space: Arc<FiniteSpace>,
    labels: Vec<String>,
    covering: Vec<OpenId>,
    parts: Vec<Arc<Presheaf>>,
    // keyed by (λ, μ); the source is F_μ and the target F_λ on the overlap
    cocycle: BTreeMap<(usize, usize), PresheafMorphism>,
    derived: Vec<(usize, usize)>,
}

/// One part of a gluing datum: a label, an open of the space and a sheaf on it.
pub type Part = (String, OpenId, Arc<Presheaf>);

/// A cocycle entry `(λ, μ, θ_{λμ})`.
pub type CocycleEntry = (String, String, PresheafMorphism);

impl GluingDatum {
    /// Parts are sorted by label. A missing `θ_{λλ}` is the identity, a missing
    /// `θ_{μλ}` is the inverse of `θ_{λμ}`, and maps over an empty overlap are
    /// filled in.
    pub fn new(space: Arc<FiniteSpace>, parts: Vec<Part>, cocycle: Vec<CocycleEntry>) -> Result<Self> {
        let mut parts = parts;
        parts.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = parts.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::CocycleViolation(format!("part `{}` given twice", w[0].0)));
        }
        let covered = parts.iter().fold(crate::topology::PointSet::EMPTY, |acc, (_, u, _)| {
            acc.union(space.open(*u))
        });
        if covered != space.all_points() {
            return Err(Error::GeneratorsDoNotCover);
        }
        for (label, u, p) in &parts {
            if *u >= space.open_count() {
                return Err(Error::NotAnOpen(format!("open id {u}")));
            }
            if **p.space() != space.subspace(space.open(*u)) {
                return Err(Error::SpaceMismatch(format!("part `{label}` does not live on {}", space.open_key(*u))));
            }
            if !p.is_sheaf() {
                return Err(Error::NotASheaf(format!("part `{label}`")));
            }
        }
        let category = parts.first().map(|p| p.2.category());
        if let Some(p) = parts.iter().find(|p| Some(p.2.category()) != category) {
            return Err(Error::MixedCategories { expected: category.expect("nonempty"), found: p.2.category() });
        }
        let labels: Vec<String> = parts.iter().map(|p| p.0.clone()).collect();
        let covering: Vec<OpenId> = parts.iter().map(|p| p.1).collect();
        let parts: Vec<Arc<Presheaf>> = parts.into_iter().map(|p| p.2).collect();
        let mut datum = GluingDatum { space, labels, covering, parts, cocycle: BTreeMap::new(), derived: Vec::new() };
        let index = |l: &str| {
            datum
                .labels
                .binary_search_by(|x| x.as_str().cmp(l))
                .map_err(|_| Error::CocycleViolation(format!("unknown part `{l}`")))
        };
        let mut given = BTreeMap::new();
        for (l, m, theta) in cocycle {
            let key = (index(&l)?, index(&m)?);
            if given.insert(key, theta).is_some() {
                return Err(Error::CocycleViolation(format!("θ for ({l}, {m}) given twice")));
            }
        }
        let n = datum.parts.len();
        for l in 0..n {
            for m in 0..n {
                let source = Arc::new(datum.restricted(m, l)?);
                let target = Arc::new(datum.restricted(l, m)?);
                let theta = if let Some(theta) = given.remove(&(l, m)) {
                    if **theta.source() != *source || **theta.target() != *target {
                        return Err(Error::CocycleViolation(format!(
                            "θ for ({}, {}) does not run between the restricted parts",
                            datum.labels[l], datum.labels[m]
                        )));
                    }
                    if !theta.is_iso() {
                        return Err(Error::CocycleViolation(format!(
                            "θ for ({}, {}) is not an isomorphism",
                            datum.labels[l], datum.labels[m]
                        )));
                    }
                    PresheafMorphism::new(source, target, theta.components().to_vec())?
                } else {
                    datum.derived.push((l, m));
                    continue;
                };
                datum.cocycle.insert((l, m), theta);
            }
        }
        for &(l, m) in &datum.derived.clone() {
            let source = Arc::new(datum.restricted(m, l)?);
            let target = Arc::new(datum.restricted(l, m)?);
            let theta = if l == m {
                PresheafMorphism::identity(source)
            } else if let Some(back) = datum.cocycle.get(&(m, l)) {
                let inv = back.inverse().expect("checked to be an isomorphism");
                PresheafMorphism::new(source, target, inv.components().to_vec())?
            } else if datum.overlap(l, m).is_empty() {
                let comps = vec![ValueMorphism::identity(source.sections(0).clone())];
                PresheafMorphism::new(source, target, comps)?
            } else {
                return Err(Error::CocycleViolation(format!(
                    "no θ for ({}, {}) or its reverse",
                    datum.labels[l], datum.labels[m]
                )));
            };
            datum.cocycle.insert((l, m), theta);
        }
        Ok(datum)
    }

    /// The datum of restrictions of `f` with identity maps on the overlaps.
    pub fn from_sheaf(f: &Arc<Presheaf>, covering: Vec<(String, OpenId)>) -> Result<Self> {
        let parts = covering
            .into_iter()
            .map(|(l, u)| Ok((l, u, Arc::new(f.restrict_to_open(u)?))))
            .collect::<Result<Vec<_>>>()?;
        let space = f.space();
        let mut cocycle = Vec::new();
        for (l, u, _) in &parts {
            for (m, v, _) in &parts {
                let overlap = space.require_open(space.open(*u).intersection(space.open(*v)))?;
                let id = PresheafMorphism::identity(Arc::new(f.restrict_to_open(overlap)?));
                cocycle.push((l.clone(), m.clone(), id));
            }
        }
        Self::new(space.clone(), parts, cocycle)
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn covering(&self) -> &[OpenId] {
        &self.covering
    }

    pub fn part(&self, l: usize) -> &Arc<Presheaf> {
        &self.parts[l]
    }

    pub fn theta(&self, l: usize, m: usize) -> &PresheafMorphism {
        &self.cocycle[&(l, m)]
    }

    /// Pairs whose map was filled in rather than given.
    pub fn derived(&self) -> &[(usize, usize)] {
        &self.derived
    }

    fn overlap(&self, l: usize, m: usize) -> crate::topology::PointSet {
        self.space.open(self.covering[l]).intersection(self.space.open(self.covering[m]))
    }

    /// `F_l` restricted to `U_l ∩ U_m`.
    fn restricted(&self, l: usize, m: usize) -> Result<Presheaf> {
        let part = &self.parts[l];
        let local = self.space.translate(self.overlap(l, m), part.space())?;
        part.restrict_to_open(part.space().require_open(local)?)
    }

    /// The id in `sub` of the open `w` of the whole space.
    fn local_id(&self, sub: &FiniteSpace, w: OpenId) -> OpenId {
        sub.require_open(self.space.translate(self.space.open(w), sub).expect("points of a subspace"))
            .expect("open of a subspace")
    }

    fn inside(&self, l: usize, w: OpenId) -> bool {
        self.space.is_subset(w, self.covering[l])
    }

    /// The least part containing `w`.
    pub fn choice(&self, w: OpenId) -> Option<usize> {
        (0..self.parts.len()).find(|&l| self.inside(l, w))
    }

    fn part_component<'a>(&self, m: &'a PresheafMorphism, w: OpenId) -> &'a ValueMorphism {
        m.component(self.local_id(m.source().space(), w))
    }

    /// `θ_{λμ}` at an open `w ⊆ U_λ ∩ U_μ` of the whole space.
    fn theta_at(&self, l: usize, m: usize, w: OpenId) -> &ValueMorphism {
        self.part_component(&self.cocycle[&(l, m)], w)
    }

    fn opens_in_overlap(&self, ls: &[usize]) -> Vec<OpenId> {
        (0..self.space.open_count()).filter(|&w| ls.iter().all(|&l| self.inside(l, w))).collect()
    }
}

/// A failing identity or triple-overlap condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleFailure {
    /// Part labels in sorted order; repeated for the identity condition.
    pub parts: Vec<String>,
    /// Key of the first open where the condition fails.
    pub open: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleReport {
    pub verdict: bool,
    pub failures: Vec<CocycleFailure>,
}

/// `θ_{λλ} = id` and `θ_{λν} = θ_{λμ} ∘ θ_{μν}` on every triple overlap.
pub fn check_cocycle(d: &GluingDatum) -> CocycleReport {
    let n = d.len();
    let mut failures: BTreeMap<Vec<String>, String> = BTreeMap::new();
    let mut record = |mut idx: Vec<usize>, w: OpenId| {
        idx.sort_unstable();
        let key: Vec<String> = idx.iter().map(|&i| d.labels[i].clone()).collect();
        failures.entry(key).or_insert_with(|| d.space.open_key(w));
    };
    for l in 0..n {
        if let Some(w) = d.opens_in_overlap(&[l]).into_iter().find(|&w| !d.theta_at(l, l, w).is_identity()) {
            record(vec![l], w);
        }
    }
    for l in 0..n {
        for m in 0..n {
            for k in 0..n {
                let bad = d.opens_in_overlap(&[l, m, k]).into_iter().find(|&w| {
                    let composite = d.theta_at(m, k, w).then(d.theta_at(l, m, w)).expect("matching ends");
                    composite.map() != d.theta_at(l, k, w).map()
                });
                if let Some(w) = bad {
                    let mut idx = vec![l, m, k];
                    idx.dedup();
                    record(idx, w);
                }
            }
        }
    }
    let failures: Vec<CocycleFailure> =
        failures.into_iter().map(|(parts, open)| CocycleFailure { parts, open }).collect();
    CocycleReport { verdict: failures.is_empty(), failures }
}

/// A sheaf on the whole space with isomorphisms `η_λ` from its restrictions to the parts.
#[derive(Debug, Clone)]
pub struct GluedSheaf {
    pub sheaf: Arc<Presheaf>,
    pub isos: Vec<PresheafMorphism>,
}

impl GluedSheaf {
    /// `η_λ` at an open `w ⊆ U_λ` of the whole space.
    fn eta_at(&self, d: &GluingDatum, l: usize, w: OpenId) -> &ValueMorphism {
        self.isos[l].component(d.local_id(self.isos[l].source().space(), w))
    }
}

/// Checks that `g` is a gluing of `d`: a sheaf with isomorphisms
/// `η_λ: g|_{U_λ} → F_λ` satisfying `θ_{λμ} = η_λ ∘ η_μ⁻¹` on overlaps.
pub fn check_glued(d: &GluingDatum, g: &GluedSheaf) -> Result<()> {
    let fail = |m: String| Err(Error::NotAGluing(m));
    if **g.sheaf.space() != *d.space {
        return fail("sheaf lives on another space".into());
    }
    if !g.sheaf.is_sheaf() {
        return fail("not a sheaf".into());
    }
    if g.isos.len() != d.len() {
        return fail(format!("{} isomorphisms for {} parts", g.isos.len(), d.len()));
    }
    for (l, eta) in g.isos.iter().enumerate() {
        let label = &d.labels[l];
        if **eta.source() != g.sheaf.restrict_to_open(d.covering[l])? || **eta.target() != *d.parts[l] {
            return fail(format!("η for `{label}` has the wrong ends"));
        }
        if !eta.is_iso() {
            return fail(format!("η for `{label}` is not an isomorphism"));
        }
    }
    for l in 0..d.len() {
        for m in 0..d.len() {
            for w in d.opens_in_overlap(&[l, m]) {
                let expected = g.eta_at(d, m, w).inverse().expect("bijective").then(g.eta_at(d, l, w))?;
                if expected.map() != d.theta_at(l, m, w).map() {
                    return fail(format!(
                        "θ for ({}, {}) differs from η_λ ∘ η_μ⁻¹ over {}",
                        d.labels[l],
                        d.labels[m],
                        d.space.open_key(w)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Glues along the basis of opens lying in some part, choosing the least part for each.
pub fn glue(d: &GluingDatum) -> Result<GluedSheaf> {
    let report = check_cocycle(d);
    if let Some(f) = report.failures.first() {
        return Err(Error::CocycleViolation(format!("parts {:?} over {}", f.parts, f.open)));
    }
    let space = d.space.clone();
    let members: Vec<OpenId> = (0..space.open_count()).filter(|&w| d.choice(w).is_some()).collect();
    let basis = Basis::new(space.clone(), &members)?;
    let tau: BTreeMap<OpenId, usize> = members.iter().map(|&w| (w, d.choice(w).expect("member"))).collect();
    let part_sections = |l: usize, w: OpenId| d.parts[l].sections(d.local_id(d.parts[l].space(), w)).clone();
    let sections = members.iter().map(|&w| (w, part_sections(tau[&w], w))).collect();
    let mut restrictions = Vec::new();
    for &v in &members {
        for &w in &members {
            if w == v || !space.is_subset(w, v) {
                continue;
            }
            let (lv, lw) = (tau[&v], tau[&w]);
            let part = &d.parts[lv];
            let local = |x| d.local_id(part.space(), x);
            let res = part.res(local(w), local(v)).then(d.theta_at(lw, lv, w))?;
            restrictions.push(((w, v), res));
        }
    }
    let bp = BasisPresheaf::new(basis, d.parts.first().map_or(crate::values::Category::FinSet, |p| p.category()), sections, restrictions)?;
    let ext = extend_from_basis(&bp)?;
    let sheaf = ext.presheaf.clone();
    let isos = (0..d.len())
        .map(|l| {
            let source = Arc::new(sheaf.restrict_to_open(d.covering[l])?);
            let target = d.parts[l].clone();
            let components = (0..source.space().open_count())
                .map(|local| {
                    let w = space.require_open(source.space().translate(source.space().open(local), &space)?)?;
                    let can = ext.can(w).expect("basis open");
                    can.then(d.theta_at(l, tau[&w], w))
                })
                .collect::<Result<Vec<_>>>()?;
            PresheafMorphism::new(source, target, components)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GluedSheaf { sheaf, isos })
}

/// A morphism of sheaves on the whole space from components on opens inside
/// some part, glued over smallest neighbourhoods elsewhere.
fn assemble(
    d: &GluingDatum,
    source: &Arc<Presheaf>,
    target: &Arc<Presheaf>,
    local: impl Fn(usize, OpenId) -> Result<ValueMorphism>,
) -> Result<PresheafMorphism> {
    let space = &d.space;
    let n = space.open_count();
    let mut components: Vec<Option<ValueMorphism>> = vec![None; n];
    for (w, slot) in components.iter_mut().enumerate() {
        if let Some(l) = d.choice(w) {
            *slot = Some(local(l, w)?);
        }
    }
    let gluer = SheafGluer::new(target)?;
    for w in 0..n {
        if components[w].is_some() {
            continue;
        }
        let table = (0..source.sections(w).len())
            .map(|s| {
                let locals: Vec<usize> = space
                    .open(w)
                    .iter()
                    .map(|x| {
                        let ux = space.minimal_open(x);
                        components[ux].as_ref().expect("smallest neighbourhoods lie in a part").apply(source.restrict(ux, w, s))
                    })
                    .collect();
                gluer.glue(w, &locals)
            })
            .collect::<Result<Vec<_>>>()?;
        components[w] = Some(ValueMorphism::new(source.sections(w).clone(), target.sections(w).clone(), table)?);
    }
    PresheafMorphism::new(source.clone(), target.clone(), components.into_iter().map(Option::unwrap).collect())
}

/// The unique isomorphism `Φ: candidate → glue(d)` with `ζ_λ = η_λ ∘ Φ|_{U_λ}`.
pub fn glued_uniqueness(d: &GluingDatum, candidate: &GluedSheaf) -> Result<PresheafMorphism> {
    check_glued(d, candidate)?;
    let glued = glue(d)?;
    let phi = assemble(d, &candidate.sheaf, &glued.sheaf, |l, w| {
        candidate.eta_at(d, l, w).then(&glued.eta_at(d, l, w).inverse().expect("bijective"))
    })
    .map_err(|e| Error::NotAGluing(e.to_string()))?;
    if !phi.is_iso() {
        return Err(Error::NotAGluing("comparison is not an isomorphism".into()));
    }
    Ok(phi)
}

fn same_covering(d: &GluingDatum, e: &GluingDatum) -> Result<()> {
    if d.space != e.space || d.labels != e.labels || d.covering != e.covering {
        return Err(Error::SpaceMismatch("gluing data over different coverings".into()));
    }
    Ok(())
}

/// The morphism `glue(d) → glue(e)` restricting to `u_λ` on each part.
pub fn glue_morphisms(d: &GluingDatum, e: &GluingDatum, family: &[PresheafMorphism]) -> Result<PresheafMorphism> {
    same_covering(d, e)?;
    if family.len() != d.len() {
        return Err(Error::IncompatibleFamily(format!("{} morphisms for {} parts", family.len(), d.len())));
    }
    for (l, u) in family.iter().enumerate() {
        if **u.source() != *d.parts[l] || **u.target() != *e.parts[l] {
            return Err(Error::IncompatibleFamily(format!("morphism for `{}` has the wrong ends", d.labels[l])));
        }
    }
    for l in 0..d.len() {
        for m in 0..d.len() {
            for w in d.opens_in_overlap(&[l, m]) {
                let left = d.theta_at(l, m, w).then(d.part_component(&family[l], w))?;
                let right = d.part_component(&family[m], w).then(e.theta_at(l, m, w))?;
                if left.map() != right.map() {
                    return Err(Error::IncompatibleFamily(format!(
                        "square for ({}, {}) fails over {}",
                        d.labels[l],
                        d.labels[m],
                        d.space.open_key(w)
                    )));
                }
            }
        }
    }
    let (gd, ge) = (glue(d)?, glue(e)?);
    assemble(d, &gd.sheaf, &ge.sheaf, |l, w| {
        gd.eta_at(d, l, w)
            .then(d.part_component(&family[l], w))?
            .then(&ge.eta_at(e, l, w).inverse().expect("bijective"))
    })
}

/// The family `u_λ = ζ_λ ∘ u|_{U_λ} ∘ η_λ⁻¹` of a morphism `glue(d) → glue(e)`.
pub fn decompose_morphism(d: &GluingDatum, e: &GluingDatum, u: &PresheafMorphism) -> Result<Vec<PresheafMorphism>> {
    same_covering(d, e)?;
    let (gd, ge) = (glue(d)?, glue(e)?);
    if u.source() != &gd.sheaf || u.target() != &ge.sheaf {
        return Err(Error::IncompatibleFamily("morphism does not run between the glued sheaves".into()));
    }
    (0..d.len())
        .map(|l| {
            let part_space = d.parts[l].space();
            let components = (0..part_space.open_count())
                .map(|local| {
                    let w = d.space.require_open(part_space.translate(part_space.open(local), &d.space)?)?;
                    gd.eta_at(d, l, w).inverse().expect("bijective").then(u.component(w))?.then(ge.eta_at(e, l, w))
                })
                .collect::<Result<Vec<_>>>()?;
            PresheafMorphism::new(d.parts[l].clone(), e.parts[l].clone(), components)
        })
        .collect()
}

/// The datum induced on the open subspace `v`.
pub fn restrict_gluing(d: &GluingDatum, v: OpenId) -> Result<GluingDatum> {
    if v >= d.space.open_count() {
        return Err(Error::NotAnOpen(format!("open id {v}")));
    }
    let sub = Arc::new(d.space.subspace(d.space.open(v)));
    let local = |part: &Presheaf, set| -> Result<OpenId> {
        part.space().require_open(d.space.translate(set, part.space())?)
    };
    let parts = (0..d.len())
        .map(|l| {
            let set = d.space.open(v).intersection(d.space.open(d.covering[l]));
            let part = d.parts[l].restrict_to_open(local(&d.parts[l], set)?)?;
            Ok((d.labels[l].clone(), sub.require_open(d.space.translate(set, &sub)?)?, Arc::new(part)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cocycle = Vec::new();
    for (&(l, m), theta) in &d.cocycle {
        if d.derived.contains(&(l, m)) {
            continue;
        }
        let set = d.overlap(l, m).intersection(d.space.open(v));
        let source = Arc::new(theta.source().restrict_to_open(local(theta.source(), set)?)?);
        let target = Arc::new(theta.target().restrict_to_open(local(theta.target(), set)?)?);
        let components = (0..source.space().open_count())
            .map(|w| {
                let big = local(theta.source(), source.space().translate(source.space().open(w), &d.space)?)?;
                Ok(theta.component(big).clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let restricted = PresheafMorphism::new(source, target, components)?;
        cocycle.push((d.labels[l].clone(), d.labels[m].clone(), restricted));
    }
    GluingDatum::new(sub, parts, cocycle)
}
