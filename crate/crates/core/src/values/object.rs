use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::Category;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
struct GroupTable {
    add: Vec<usize>,
    zero: usize,
    neg: Vec<usize>,
}

/// A finite set, or a finite abelian group given by its addition table.
///
/// Elements are kept sorted by label; element ids are positions in that order.
#[derive(Clone, PartialEq, Eq)]
pub struct ValueObject {
    category: Category,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    group: Option<GroupTable>,
}

impl fmt::Debug for ValueObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.category, self.elements)
    }
}

fn sorted_unique(elements: Vec<String>) -> Result<(Vec<String>, HashMap<String, usize>)> {
    let mut elements = elements;
    elements.sort();
    for w in elements.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateElement(w[0].clone()));
        }
    }
    let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    Ok((elements, index))
}

impl ValueObject {
    pub fn set<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let (elements, index) = sorted_unique(elements.into_iter().map(Into::into).collect())?;
        Ok(ValueObject { category: Category::FinSet, elements, index, group: None })
    }

    /// A group from `(x, y, x + y)` triples covering every ordered pair.
    pub fn group<I, S, T>(elements: I, zero: &str, triples: &[(T, T, T)]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let (elements, index) = sorted_unique(elements.into_iter().map(Into::into).collect())?;
        let n = elements.len();
        let look = |l: &str| index.get(l).copied().ok_or_else(|| Error::UnknownElement(l.to_owned()));
        let zero = look(zero)?;
        let mut add = vec![None; n * n];
        for (x, y, z) in triples {
            let (x, y, z) = (look(x.as_ref())?, look(y.as_ref())?, look(z.as_ref())?);
            match add[x * n + y] {
                Some(prev) if prev != z => {
                    return Err(Error::InvalidGroup(format!(
                        "{} + {} given twice with different values",
                        elements[x], elements[y]
                    )))
                }
                _ => add[x * n + y] = Some(z),
            }
        }
        let add = add
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    Error::InvalidGroup(format!("{} + {} is missing", elements[k / n], elements[k % n]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(elements, index, add, zero)
    }

    /// A group on `labels` whose addition is given on element ids.
    pub fn group_from_fn<S: Into<String>>(
        labels: Vec<S>,
        zero: usize,
        add: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let raw: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = raw.len();
        if zero >= n {
            return Err(Error::InvalidGroup("zero out of range".into()));
        }
        let (elements, index) = sorted_unique(raw.clone())?;
        let pos: Vec<usize> = raw.iter().map(|l| index[l]).collect();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let c = add(a, b);
                if c >= n {
                    return Err(Error::InvalidGroup("sum out of range".into()));
                }
                table[pos[a] * n + pos[b]] = pos[c];
            }
        }
        Self::from_table(elements, index, table, pos[zero])
    }

    fn from_table(
        elements: Vec<String>,
        index: HashMap<String, usize>,
        add: Vec<usize>,
        zero: usize,
    ) -> Result<Self> {
        let n = elements.len();
        let sum = |a: usize, b: usize| add[a * n + b];
        let name = |a: usize| elements[a].as_str();
        for a in 0..n {
            if sum(zero, a) != a {
                return Err(Error::InvalidGroup(format!("{} is not neutral for {}", name(zero), name(a))));
            }
            for b in 0..n {
                if sum(a, b) != sum(b, a) {
                    return Err(Error::InvalidGroup(format!("{} + {} is not commutative", name(a), name(b))));
                }
                for c in 0..n {
                    if sum(sum(a, b), c) != sum(a, sum(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "({} + {}) + {} is not associative",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                }
            }
        }
        let neg = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| sum(a, b) == zero)
                    .ok_or_else(|| Error::InvalidGroup(format!("{} has no inverse", name(a))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ValueObject {
            category: Category::FinAb,
            elements,
            index,
            group: Some(GroupTable { add, zero, neg }),
        })
    }

    /// Z/n with elements labelled `"0"`, `"1"`, ...
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order zero");
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::group_from_fn(labels, 0, |a, b| (a + b) % n).expect("cyclic group is valid")
    }

    /// The singleton set `{*}` or the zero group `{0}`.
    pub fn terminal(category: Category) -> Self {
        match category {
            Category::FinSet => Self::set(["*"]).expect("singleton"),
            Category::FinAb => Self::cyclic(1),
        }
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn label(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn element(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_owned()))
    }

    pub fn is_terminal(&self) -> bool {
        self.elements.len() == 1
    }

    fn table(&self) -> &GroupTable {
        self.group.as_ref().expect("FinAb object carries a table")
    }

    pub fn require_group(&self) -> Result<()> {
        match self.category {
            Category::FinAb => Ok(()),
            found => Err(Error::WrongCategory { expected: Category::FinAb, found }),
        }
    }

    /// Panics on a FinSet object.
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.table().add[a * self.len() + b]
    }

    /// Panics on a FinSet object.
    pub fn zero(&self) -> usize {
        self.table().zero
    }

    /// Panics on a FinSet object.
    pub fn neg(&self, a: usize) -> usize {
        self.table().neg[a]
    }

    /// `(x, y, x + y)` label triples in element order; empty for FinSet.
    pub fn add_triples(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        if self.group.is_some() {
            for a in 0..self.len() {
                for b in 0..self.len() {
                    out.push((
                        self.elements[a].clone(),
                        self.elements[b].clone(),
                        self.elements[self.add(a, b)].clone(),
                    ));
                }
            }
        }
        out
    }

    /// Same shape with every label mapped through `f`; `f` must stay injective.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        let labels: Vec<String> = self.elements.iter().map(|e| f(e)).collect();
        match &self.group {
            None => Self::set(labels),
            Some(g) => Self::group_from_fn(labels, g.zero, |a, b| self.add(a, b)),
        }
    }
}

/// A map of value objects; a homomorphism when both ends are groups.
#[derive(Clone)]
pub struct ValueMorphism {
    source: Arc<ValueObject>,
    target: Arc<ValueObject>,
    map: Vec<usize>,
}

impl fmt::Debug for ValueMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(&str, &str)> = self
            .map
            .iter()
            .enumerate()
            .map(|(a, &b)| (self.source.label(a), self.target.label(b)))
            .collect();
        f.debug_map().entries(pairs).finish()
    }
}

fn same(a: &Arc<ValueObject>, b: &Arc<ValueObject>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for ValueMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && same(&self.source, &other.source) && same(&self.target, &other.target)
    }
}

impl Eq for ValueMorphism {}

impl ValueMorphism {
    pub fn new(source: Arc<ValueObject>, target: Arc<ValueObject>, map: Vec<usize>) -> Result<Self> {
        if source.category() != target.category() {
            return Err(Error::MixedCategories { expected: source.category(), found: target.category() });
        }
        if map.len() != source.len() {
            return Err(Error::InvalidMorphism(format!(
                "map has {} entries for {} source elements",
                map.len(),
                source.len()
            )));
        }
        if map.iter().any(|&b| b >= target.len()) {
            return Err(Error::InvalidMorphism("image outside the target".into()));
        }
        let m = ValueMorphism { source, target, map };
        if m.source.category() == Category::FinAb {
            m.check_hom()?;
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: Arc<ValueObject>, target: Arc<ValueObject>, map: Vec<usize>) -> Self {
        debug_assert_eq!(map.len(), source.len());
        ValueMorphism { source, target, map }
    }

    fn check_hom(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        if self.map[s.zero()] != t.zero() {
            return Err(Error::InvalidMorphism("zero is not preserved".into()));
        }
        for a in 0..s.len() {
            for b in 0..s.len() {
                if self.map[s.add(a, b)] != t.add(self.map[a], self.map[b]) {
                    return Err(Error::InvalidMorphism(format!(
                        "addition not preserved at {} + {}",
                        s.label(a),
                        s.label(b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_fn(
        source: Arc<ValueObject>,
        target: Arc<ValueObject>,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let map = (0..source.len()).map(f).collect();
        Self::new(source, target, map)
    }

    pub fn from_labels<S: AsRef<str>>(
        source: Arc<ValueObject>,
        target: Arc<ValueObject>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut map = vec![None; source.len()];
        for (a, b) in pairs {
            map[source.element(a.as_ref())?] = Some(target.element(b.as_ref())?);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(a, b)| b.ok_or_else(|| Error::InvalidMorphism(format!("no image for `{}`", source.label(a)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, map)
    }

    pub fn identity(object: Arc<ValueObject>) -> Self {
        let map = (0..object.len()).collect();
        ValueMorphism { source: object.clone(), target: object, map }
    }

    /// The unique map into a terminal object.
    pub fn to_terminal(source: Arc<ValueObject>, target: Arc<ValueObject>) -> Result<Self> {
        if !target.is_terminal() {
            return Err(Error::InvalidMorphism("target is not terminal".into()));
        }
        let map = vec![0; source.len()];
        Self::new(source, target, map)
    }

    pub fn source(&self) -> &Arc<ValueObject> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ValueObject> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ValueMorphism) -> Result<ValueMorphism> {
        if !same(&self.target, &next.source) {
            return Err(Error::InvalidMorphism("composition of non-matching morphisms".into()));
        }
        let map = self.map.iter().map(|&b| next.map[b]).collect();
        Ok(ValueMorphism { source: self.source.clone(), target: next.target.clone(), map })
    }

    pub fn is_identity(&self) -> bool {
        same(&self.source, &self.target) && self.map.iter().enumerate().all(|(a, &b)| a == b)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.map.iter().all(|&b| !std::mem::replace(&mut seen[b], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<ValueMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut map = vec![0; self.target.len()];
        for (a, &b) in self.map.iter().enumerate() {
            map[b] = a;
        }
        Some(ValueMorphism { source: self.target.clone(), target: self.source.clone(), map })
    }

    /// Label pairs `(a, f(a))` in source order.
    pub fn label_pairs(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(a, &b)| (self.source.label(a).to_owned(), self.target.label(b).to_owned()))
            .collect()
    }
}
