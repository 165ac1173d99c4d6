use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::topology::{FiniteSpace, OpenId};
use crate::values::{Category, ValueMorphism, ValueObject};

/// Value objects on every open of a space, with restriction maps for every inclusion.
#[derive(Clone)]
pub struct Presheaf {
    space: Arc<FiniteSpace>,
    category: Category,
    sections: Vec<Arc<ValueObject>>,
    // indexed by small * open_count + big
    res: Vec<Option<ValueMorphism>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (u, s) in self.sections.iter().enumerate() {
            m.entry(&self.space.open_key(u), s);
        }
        m.finish()
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.category == other.category
            && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
            && self.sections == other.sections
            && self
                .res
                .iter()
                .zip(&other.res)
                .all(|(a, b)| a.as_ref().map(|m| m.map()) == b.as_ref().map(|m| m.map()))
    }
}

impl Eq for Presheaf {}

/// Where functoriality of a presheaf breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorialityViolation {
    Identity { open: OpenId },
    Composite { small: OpenId, middle: OpenId, big: OpenId },
}

/// Checks the given restrictions against `sections` and fills in the missing
/// pairs among `members`: identities, composites through an intermediate
/// member, and maps into singletons or out of empty objects.
pub(crate) fn complete_restrictions(
    space: &FiniteSpace,
    members: &[OpenId],
    sections: &dyn Fn(OpenId) -> Arc<ValueObject>,
    given: Vec<((OpenId, OpenId), ValueMorphism)>,
) -> Result<BTreeMap<(OpenId, OpenId), ValueMorphism>> {
    let key = |u: OpenId| space.open_key(u);
    let mut table = BTreeMap::new();
    for ((small, big), m) in given {
        if !members.contains(&small) || !members.contains(&big) {
            return Err(Error::ValueMismatch(format!(
                "restriction {} ⊆ {} leaves the index of opens",
                key(small),
                key(big)
            )));
        }
        if !space.is_subset(small, big) {
            return Err(Error::ValueMismatch(format!("{} is not contained in {}", key(small), key(big))));
        }
        let (s, t) = (sections(big), sections(small));
        if **m.source() != *s || **m.target() != *t {
            return Err(Error::ValueMismatch(format!(
                "restriction {} ⊆ {} does not run between the section objects",
                key(small),
                key(big)
            )));
        }
        let m = ValueMorphism::new_unchecked(s, t, m.map().to_vec());
        if table.insert((small, big), m).is_some() {
            return Err(Error::ValueMismatch(format!(
                "restriction {} ⊆ {} given twice",
                key(small),
                key(big)
            )));
        }
    }
    let mut pairs: Vec<(OpenId, OpenId)> = members
        .iter()
        .flat_map(|&u| members.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| space.is_subset(u, v))
        .collect();
    pairs.sort_by_key(|&(u, v)| (space.open(v).len() - space.open(u).len(), u, v));
    for (u, v) in pairs {
        if table.contains_key(&(u, v)) {
            continue;
        }
        let filled = if u == v {
            Some(ValueMorphism::identity(sections(u)))
        } else {
            members
                .iter()
                .filter(|&&w| w != u && w != v && space.is_subset(u, w) && space.is_subset(w, v))
                .find_map(|&w| {
                    let (a, b) = (table.get(&(w, v))?, table.get(&(u, w))?);
                    a.then(b).ok()
                })
                .or_else(|| {
                    let (s, t) = (sections(v), sections(u));
                    if t.len() == 1 || s.is_empty() {
                        ValueMorphism::new(s.clone(), t, vec![0; s.len()]).ok()
                    } else {
                        None
                    }
                })
        };
        match filled {
            Some(m) => {
                table.insert((u, v), m);
            }
            None => {
                return Err(Error::ValueMismatch(format!(
                    "no restriction from {} to {}",
                    key(v),
                    key(u)
                )))
            }
        }
    }
    Ok(table)
}

impl Presheaf {
    /// `restrictions` maps `(small, big)` to a morphism `sections[big] → sections[small]`.
    /// Pairs that can be derived are filled in; see [`Presheaf::is_valid`] for functoriality.
    pub fn new(
        space: Arc<FiniteSpace>,
        category: Category,
        sections: Vec<Arc<ValueObject>>,
        restrictions: Vec<((OpenId, OpenId), ValueMorphism)>,
    ) -> Result<Self> {
        if sections.len() != space.open_count() {
            return Err(Error::ValueMismatch(format!(
                "{} section objects for {} opens",
                sections.len(),
                space.open_count()
            )));
        }
        if let Some(s) = sections.iter().find(|s| s.category() != category) {
            return Err(Error::MixedCategories { expected: category, found: s.category() });
        }
        let members: Vec<OpenId> = (0..space.open_count()).collect();
        let table = complete_restrictions(&space, &members, &|u| sections[u].clone(), restrictions)?;
        let n = space.open_count();
        let mut res = vec![None; n * n];
        for ((u, v), m) in table {
            res[u * n + v] = Some(m);
        }
        Ok(Presheaf { space, category, sections, res })
    }

    /// Sections and restriction maps given by functions on ids.
    pub fn from_fn(
        space: Arc<FiniteSpace>,
        category: Category,
        sections: impl Fn(OpenId) -> Arc<ValueObject>,
        restrict: impl Fn(OpenId, OpenId, usize) -> usize,
    ) -> Result<Self> {
        let objects: Vec<Arc<ValueObject>> = (0..space.open_count()).map(sections).collect();
        let mut restrictions = Vec::new();
        for v in 0..space.open_count() {
            for u in space.opens_within(v) {
                let m = ValueMorphism::from_fn(objects[v].clone(), objects[u].clone(), |s| restrict(u, v, s))?;
                restrictions.push(((u, v), m));
            }
        }
        Self::new(space, category, objects, restrictions)
    }

    /// Sections keyed by open key (`{a,b}`) and restrictions as
    /// `(small key, big key, element pairs)`. A missing empty-open section is terminal.
    pub fn from_labels(
        space: Arc<FiniteSpace>,
        category: Category,
        sections: Vec<(&str, ValueObject)>,
        restrictions: &[(&str, &str, &[(&str, &str)])],
    ) -> Result<Self> {
        let mut objects: Vec<Option<Arc<ValueObject>>> = vec![None; space.open_count()];
        for (key, obj) in sections {
            let u = space.open_by_key(key)?;
            objects[u] = Some(Arc::new(obj));
        }
        if objects[space.empty_open()].is_none() {
            objects[space.empty_open()] = Some(Arc::new(ValueObject::terminal(category)));
        }
        let objects = objects
            .into_iter()
            .enumerate()
            .map(|(u, o)| o.ok_or_else(|| Error::ValueMismatch(format!("no section object for {}", space.open_key(u)))))
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for (small, big, pairs) in restrictions {
            let (u, v) = (space.open_by_key(small)?, space.open_by_key(big)?);
            let m = ValueMorphism::from_labels(objects[v].clone(), objects[u].clone(), pairs)?;
            maps.push(((u, v), m));
        }
        Self::new(space, category, objects, maps)
    }

    /// `object` on every nonempty open with identity restrictions, terminal on `∅`.
    pub fn constant(space: Arc<FiniteSpace>, object: Arc<ValueObject>) -> Self {
        let category = object.category();
        let terminal = Arc::new(ValueObject::terminal(category));
        let empty = space.empty_open();
        Self::from_fn(
            space,
            category,
            |u| if u == empty { terminal.clone() } else { object.clone() },
            |u, _, s| if u == empty { 0 } else { s },
        )
        .expect("constant presheaf is well formed")
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn sections(&self, u: OpenId) -> &Arc<ValueObject> {
        &self.sections[u]
    }

    pub fn section_objects(&self) -> &[Arc<ValueObject>] {
        &self.sections
    }

    /// The restriction `F(big) → F(small)`. Panics unless `small ⊆ big`.
    pub fn res(&self, small: OpenId, big: OpenId) -> &ValueMorphism {
        self.res[small * self.space.open_count() + big]
            .as_ref()
            .expect("restriction along an inclusion")
    }

    pub fn try_res(&self, small: OpenId, big: OpenId) -> Result<&ValueMorphism> {
        if small >= self.space.open_count() || big >= self.space.open_count() {
            return Err(Error::NotAnOpen(format!("open id {}", small.max(big))));
        }
        self.res[small * self.space.open_count() + big].as_ref().ok_or_else(|| {
            Error::NotAnOpen(format!(
                "{} is not contained in {}",
                self.space.open_key(small),
                self.space.open_key(big)
            ))
        })
    }

    /// Restriction of one section.
    pub fn restrict(&self, small: OpenId, big: OpenId, s: usize) -> usize {
        self.res(small, big).apply(s)
    }

    /// Every inclusion pair `(small, big)` with its restriction, in id order.
    pub fn restrictions(&self) -> impl Iterator<Item = ((OpenId, OpenId), &ValueMorphism)> {
        let n = self.space.open_count();
        self.res
            .iter()
            .enumerate()
            .filter_map(move |(k, m)| m.as_ref().map(|m| ((k / n, k % n), m)))
    }

    pub fn functoriality_violations(&self) -> Vec<FunctorialityViolation> {
        let mut out = Vec::new();
        let n = self.space.open_count();
        for u in 0..n {
            if !self.res(u, u).map().iter().enumerate().all(|(a, &b)| a == b) {
                out.push(FunctorialityViolation::Identity { open: u });
            }
        }
        for w in 0..n {
            for v in self.space.opens_within(w) {
                for u in self.space.opens_within(v) {
                    let (vw, uv, uw) = (self.res(v, w), self.res(u, v), self.res(u, w));
                    if !vw.map().iter().zip(uw.map()).all(|(&b, &c)| uv.apply(b) == c) {
                        out.push(FunctorialityViolation::Composite { small: u, middle: v, big: w });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.functoriality_violations().is_empty()
    }

    /// The induced presheaf on the open subspace `u`.
    pub fn restrict_to_open(&self, u: OpenId) -> Result<Presheaf> {
        if u >= self.space.open_count() {
            return Err(Error::NotAnOpen(format!("open id {u}")));
        }
        let sub = Arc::new(self.space.subspace(self.space.open(u)));
        let parent = (0..sub.open_count())
            .map(|w| self.space.require_open(sub.translate(sub.open(w), &self.space)?))
            .collect::<Result<Vec<_>>>()?;
        let objects: Vec<Arc<ValueObject>> = parent.iter().map(|&p| self.sections[p].clone()).collect();
        let mut maps = Vec::new();
        for v in 0..sub.open_count() {
            for w in sub.opens_within(v) {
                maps.push(((w, v), self.res(parent[w], parent[v]).clone()));
            }
        }
        Presheaf::new(sub, self.category, objects, maps)
    }

    /// Same presheaf with every element label rewritten by `f(open key, label)`.
    pub fn relabel(&self, f: impl Fn(&str, &str) -> String) -> Result<Presheaf> {
        let objects = (0..self.space.open_count())
            .map(|u| {
                let key = self.space.open_key(u);
                Ok(Arc::new(self.sections[u].relabel(|l| f(&key, l))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let maps = self
            .restrictions()
            .map(|((u, v), m)| ((u, v), ValueMorphism::new_unchecked(objects[v].clone(), objects[u].clone(), m.map().to_vec())))
            .collect();
        Presheaf::new(self.space.clone(), self.category, objects, maps)
    }
}

/// A natural family of maps `F(U) → G(U)`.
#[derive(Clone)]
pub struct PresheafMorphism {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: Vec<ValueMorphism>,
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (u, c) in self.components.iter().enumerate() {
            m.entry(&self.source.space.open_key(u), c);
        }
        m.finish()
    }
}

impl PartialEq for PresheafMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.components.iter().zip(&other.components).all(|(a, b)| a.map() == b.map())
            && self.components.len() == other.components.len()
            && (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
    }
}

impl Eq for PresheafMorphism {}

fn same_shape(a: &Presheaf, b: &Presheaf) -> Result<()> {
    if a.category != b.category {
        return Err(Error::MixedCategories { expected: a.category, found: b.category });
    }
    if !(Arc::ptr_eq(&a.space, &b.space) || a.space == b.space) {
        return Err(Error::SpaceMismatch("presheaves live on different spaces".into()));
    }
    Ok(())
}

impl PresheafMorphism {
    pub fn new(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<ValueMorphism>) -> Result<Self> {
        same_shape(&source, &target)?;
        let n = source.space.open_count();
        if components.len() != n {
            return Err(Error::ValueMismatch(format!("{} components for {} opens", components.len(), n)));
        }
        let mut rewrapped = Vec::with_capacity(n);
        for (u, c) in components.into_iter().enumerate() {
            let (s, t) = (source.sections[u].clone(), target.sections[u].clone());
            if **c.source() != *s || **c.target() != *t {
                return Err(Error::ValueMismatch(format!(
                    "component at {} does not run between the section objects",
                    source.space.open_key(u)
                )));
            }
            rewrapped.push(ValueMorphism::new_unchecked(s, t, c.map().to_vec()));
        }
        let m = PresheafMorphism { source, target, components: rewrapped };
        m.check_natural()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<ValueMorphism>) -> Self {
        PresheafMorphism { source, target, components }
    }

    fn check_natural(&self) -> Result<()> {
        let space = &self.source.space;
        for v in 0..space.open_count() {
            for u in space.opens_within(v) {
                let (f, g) = (self.source.res(u, v), self.target.res(u, v));
                let ok = (0..self.source.sections[v].len())
                    .all(|s| self.components[u].apply(f.apply(s)) == g.apply(self.components[v].apply(s)));
                if !ok {
                    return Err(Error::IncompatibleFamily(format!(
                        "not natural along {} ⊆ {}",
                        space.open_key(u),
                        space.open_key(v)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: Arc<Presheaf>) -> Self {
        let components = p.sections.iter().map(|s| ValueMorphism::identity(s.clone())).collect();
        PresheafMorphism { source: p.clone(), target: p, components }
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn component(&self, u: OpenId) -> &ValueMorphism {
        &self.components[u]
    }

    pub fn components(&self) -> &[ValueMorphism] {
        &self.components
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PresheafMorphism) -> Result<PresheafMorphism> {
        if !(Arc::ptr_eq(&self.target, &next.source) || self.target == next.source) {
            return Err(Error::ValueMismatch("composition of non-matching presheaf morphisms".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&next.components)
            .map(|(a, b)| a.then(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(PresheafMorphism { source: self.source.clone(), target: next.target.clone(), components })
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(ValueMorphism::is_identity)
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(ValueMorphism::is_bijective)
    }

    pub fn inverse(&self) -> Option<PresheafMorphism> {
        let components = self.components.iter().map(ValueMorphism::inverse).collect::<Option<Vec<_>>>()?;
        Some(PresheafMorphism { source: self.target.clone(), target: self.source.clone(), components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(xs: &[&str]) -> ValueObject {
        ValueObject::set(xs.iter().copied()).unwrap()
    }

    #[test]
    fn constant_on_sierpinski_is_valid() {
        let s = Arc::new(fixtures::sierpinski());
        let p = Presheaf::constant(s, Arc::new(set(&["a", "b"])));
        assert!(p.is_valid());
    }

    #[test]
    fn broken_identity_is_reported() {
        let s = Arc::new(fixtures::sierpinski());
        let obj = Arc::new(set(&["a", "b"]));
        let x = s.whole();
        let one = s.open_by_key("{1}").unwrap();
        let swap = ValueMorphism::new(obj.clone(), obj.clone(), vec![1, 0]).unwrap();
        let id = ValueMorphism::identity(obj.clone());
        let p = Presheaf::new(
            s.clone(),
            Category::FinSet,
            vec![Arc::new(ValueObject::terminal(Category::FinSet)), obj.clone(), obj],
            vec![((x, x), swap), ((one, x), id)],
        )
        .unwrap();
        assert!(p.functoriality_violations().contains(&FunctorialityViolation::Identity { open: x }));
    }

    #[test]
    fn broken_composite_on_pc4() {
        let pc = Arc::new(fixtures::pc4());
        let obj = Arc::new(set(&["0", "1"]));
        let a = pc.open_by_key("{a}").unwrap();
        let ab = pc.open_by_key("{a,b}").unwrap();
        let x = pc.whole();
        let p = Presheaf::from_fn(
            pc.clone(),
            Category::FinSet,
            |u| if u == 0 { Arc::new(ValueObject::terminal(Category::FinSet)) } else { obj.clone() },
            |u, v, s| if u == 0 { 0 } else if (u, v) == (a, x) { 1 - s } else { s },
        )
        .unwrap();
        let v = p.functoriality_violations();
        assert!(v.contains(&FunctorialityViolation::Composite { small: a, middle: ab, big: x }));
    }

    #[test]
    fn mismatched_objects_are_rejected() {
        let s = Arc::new(fixtures::sierpinski());
        let obj = Arc::new(set(&["a"]));
        let other = Arc::new(set(&["z"]));
        let bad = ValueMorphism::new(other.clone(), obj.clone(), vec![0]).unwrap();
        let err = Presheaf::new(
            s.clone(),
            Category::FinSet,
            vec![obj.clone(), obj.clone(), obj],
            vec![((1, 2), bad)],
        );
        assert!(matches!(err, Err(Error::ValueMismatch(_))));
    }

    #[test]
    fn restriction_to_whole_space_is_identity() {
        let s = Arc::new(fixtures::sierpinski());
        let p = Presheaf::constant(s.clone(), Arc::new(set(&["a", "b"])));
        assert_eq!(p.restrict_to_open(s.whole()).unwrap(), p);
        let q = p.restrict_to_open(1).unwrap();
        assert_eq!(q.space().labels(), ["1"]);
        assert_eq!(q.sections(q.space().whole()).len(), 2);
    }

    #[test]
    fn naturality_is_checked() {
        let s = Arc::new(fixtures::sierpinski());
        let obj = Arc::new(set(&["a", "b"]));
        let p = Arc::new(Presheaf::constant(s, obj.clone()));
        let id = ValueMorphism::identity(obj.clone());
        let swap = ValueMorphism::new(obj.clone(), obj, vec![1, 0]).unwrap();
        let t = ValueMorphism::identity(p.sections(0).clone());
        let err = PresheafMorphism::new(p.clone(), p.clone(), vec![t.clone(), id, swap.clone()]);
        assert!(matches!(err, Err(Error::IncompatibleFamily(_))));
        let ok = PresheafMorphism::new(p.clone(), p, vec![t, swap.clone(), swap]).unwrap();
        assert!(ok.is_iso());
        assert!(ok.then(&ok).unwrap().is_identity());
    }
}
