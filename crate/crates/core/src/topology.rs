//! Finite topological spaces.
//!
//! Points are identified by string labels and stored in sorted label order, so
//! a point's index doubles as its rank in the canonical ordering. Point sets are
//! bitmasks; opens are kept sorted by size and then lexicographically, which is a
//! linear extension of inclusion: every open appears after all of its subsets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::labels;

pub type PointId = usize;
pub type OpenId = usize;

pub const MAX_POINTS: usize = 64;

/// A set of points of one space, as a bitmask over point indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn singleton(p: PointId) -> Self {
        PointSet(1 << p)
    }

    pub fn full(n: usize) -> Self {
        if n == 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, p: PointId) -> bool {
        self.0 >> p & 1 == 1
    }

    pub fn insert(&mut self, p: PointId) {
        self.0 |= 1 << p;
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = PointId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(p)
            }
        })
    }

    /// Size first, then lexicographic on the sorted index lists.
    pub fn canonical_cmp(self, other: PointSet) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal if self != other => {
                let lowest = (self.0 ^ other.0).trailing_zeros();
                if self.0 >> lowest & 1 == 1 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            ord => ord,
        }
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(*other)
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<PointId> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A covering of an open by opens contained in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Covering {
    pub target: OpenId,
    pub parts: Vec<OpenId>,
}

/// A finite set of labelled points with an explicit topology.
pub struct FiniteSpace {
    labels: Vec<String>,
    index: HashMap<String, PointId>,
    opens: Vec<PointSet>,
    open_ids: HashMap<PointSet, OpenId>,
    minimal: Vec<OpenId>,
    generators: Vec<OpenId>,
    antichains: OnceLock<Vec<Vec<Covering>>>,
}

impl Clone for FiniteSpace {
    fn clone(&self) -> Self {
        FiniteSpace {
            labels: self.labels.clone(),
            index: self.index.clone(),
            opens: self.opens.clone(),
            open_ids: self.open_ids.clone(),
            minimal: self.minimal.clone(),
            generators: self.generators.clone(),
            antichains: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.opens == other.opens
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opens: Vec<String> = self.opens.iter().map(|&s| self.set_key(s)).collect();
        f.debug_struct("FiniteSpace")
            .field("points", &self.labels)
            .field("opens", &opens)
            .finish()
    }
}

fn sorted_labels<S: AsRef<str>>(points: &[S]) -> Result<Vec<String>> {
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints { got: points.len(), max: MAX_POINTS });
    }
    let mut labels: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
    labels.sort();
    for w in labels.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoint(w[0].clone()));
        }
    }
    if labels.iter().any(String::is_empty) {
        return Err(Error::EmptyLabel);
    }
    Ok(labels)
}

fn label_index(labels: &[String]) -> HashMap<String, PointId> {
    labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()
}

fn resolve<S: AsRef<str>>(index: &HashMap<String, PointId>, set: &[S]) -> Result<PointSet> {
    set.iter()
        .map(|l| {
            index
                .get(l.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownPoint(l.as_ref().to_owned()))
        })
        .collect()
}

impl FiniteSpace {
    /// Builds a space from an explicit list of opens, which must already form a topology.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(points: &[S], opens: &[Vec<T>]) -> Result<Self> {
        let labels = sorted_labels(points)?;
        let index = label_index(&labels);
        let sets = opens
            .iter()
            .map(|o| resolve(&index, o))
            .collect::<Result<BTreeSet<_>>>()?;
        let full = PointSet::full(labels.len());
        let render = |s: PointSet| {
            labels::set_label(s.iter().map(|p| labels[p].as_str()))
        };
        if !sets.contains(&PointSet::EMPTY) {
            return Err(Error::NotATopology("the empty set is missing".into()));
        }
        if !sets.contains(&full) {
            return Err(Error::NotATopology("the whole point set is missing".into()));
        }
        for &a in &sets {
            for &b in &sets {
                if !sets.contains(&a.union(b)) {
                    return Err(Error::NotATopology(format!(
                        "union of {} and {} is missing",
                        render(a),
                        render(b)
                    )));
                }
                if !sets.contains(&a.intersection(b)) {
                    return Err(Error::NotATopology(format!(
                        "intersection of {} and {} is missing",
                        render(a),
                        render(b)
                    )));
                }
            }
        }
        let all: Vec<PointSet> = sets.into_iter().collect();
        Ok(Self::assemble(labels, index, all.clone(), &all))
    }

    /// The coarsest topology containing every generator.
    pub fn from_basis<S: AsRef<str>, T: AsRef<str>>(points: &[S], generators: &[Vec<T>]) -> Result<Self> {
        let labels = sorted_labels(points)?;
        let index = label_index(&labels);
        let gens = generators
            .iter()
            .map(|g| resolve(&index, g))
            .collect::<Result<Vec<_>>>()?;
        let full = PointSet::full(labels.len());
        let cover = gens.iter().fold(PointSet::EMPTY, |acc, &g| acc.union(g));
        if cover != full {
            return Err(Error::GeneratorsDoNotCover);
        }
        let mut sets: BTreeSet<PointSet> = gens.iter().copied().collect();
        sets.insert(PointSet::EMPTY);
        sets.insert(full);
        loop {
            let current: Vec<PointSet> = sets.iter().copied().collect();
            let before = sets.len();
            for &a in &current {
                for &b in &current {
                    sets.insert(a.union(b));
                    sets.insert(a.intersection(b));
                }
            }
            if sets.len() == before {
                break;
            }
        }
        let all: Vec<PointSet> = sets.into_iter().collect();
        Ok(Self::assemble(labels, index, all, &gens))
    }

    fn assemble(
        labels: Vec<String>,
        index: HashMap<String, PointId>,
        mut opens: Vec<PointSet>,
        generators: &[PointSet],
    ) -> Self {
        opens.sort_by(|a, b| a.canonical_cmp(*b));
        opens.dedup();
        let open_ids: HashMap<PointSet, OpenId> =
            opens.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let minimal = (0..labels.len())
            .map(|p| {
                let m = opens
                    .iter()
                    .filter(|o| o.contains(p))
                    .fold(PointSet::full(labels.len()), |acc, &o| acc.intersection(o));
                open_ids[&m]
            })
            .collect();
        let mut gens: Vec<OpenId> = generators.iter().map(|g| open_ids[g]).collect();
        gens.sort_unstable();
        gens.dedup();
        FiniteSpace {
            labels,
            index,
            opens,
            open_ids,
            minimal,
            generators: gens,
            antichains: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p]
    }

    pub fn point(&self, label: &str) -> Result<PointId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_owned()))
    }

    pub fn point_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        resolve(&self.index, labels)
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn set_labels(&self, set: PointSet) -> Vec<&str> {
        set.iter().map(|p| self.labels[p].as_str()).collect()
    }

    /// Canonical `{a,b}` key of a point set.
    pub fn set_key(&self, set: PointSet) -> String {
        labels::set_label(self.set_labels(set))
    }

    pub fn open_key(&self, id: OpenId) -> String {
        self.set_key(self.opens[id])
    }

    pub fn parse_key(&self, key: &str) -> Result<PointSet> {
        let parts = labels::parse_set_label(key)
            .ok_or_else(|| Error::Parse(format!("malformed open key `{key}`")))?;
        self.point_set(&parts)
    }

    pub fn open_by_key(&self, key: &str) -> Result<OpenId> {
        self.require_open(self.parse_key(key)?)
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn open_count(&self) -> usize {
        self.opens.len()
    }

    pub fn open(&self, id: OpenId) -> PointSet {
        self.opens[id]
    }

    pub fn open_id(&self, set: PointSet) -> Option<OpenId> {
        self.open_ids.get(&set).copied()
    }

    pub fn require_open(&self, set: PointSet) -> Result<OpenId> {
        self.open_id(set).ok_or_else(|| Error::NotAnOpen(self.set_key(set)))
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.open_ids.contains_key(&set)
    }

    pub fn empty_open(&self) -> OpenId {
        0
    }

    pub fn whole(&self) -> OpenId {
        self.opens.len() - 1
    }

    pub fn is_subset(&self, a: OpenId, b: OpenId) -> bool {
        self.opens[a].is_subset(self.opens[b])
    }

    /// Opens contained in `u`, in canonical order.
    pub fn opens_within(&self, u: OpenId) -> Vec<OpenId> {
        let set = self.opens[u];
        (0..self.opens.len()).filter(|&v| self.opens[v].is_subset(set)).collect()
    }

    /// Opens containing `u`, in canonical order.
    pub fn opens_containing(&self, u: OpenId) -> Vec<OpenId> {
        let set = self.opens[u];
        (0..self.opens.len()).filter(|&v| set.is_subset(self.opens[v])).collect()
    }

    /// Open neighbourhoods of a point, in canonical order.
    pub fn neighborhoods(&self, p: PointId) -> Vec<OpenId> {
        (0..self.opens.len()).filter(|&v| self.opens[v].contains(p)).collect()
    }

    pub fn intersect(&self, a: OpenId, b: OpenId) -> OpenId {
        self.open_ids[&self.opens[a].intersection(self.opens[b])]
    }

    pub fn join(&self, a: OpenId, b: OpenId) -> OpenId {
        self.open_ids[&self.opens[a].union(self.opens[b])]
    }

    /// The smallest open containing `p`.
    pub fn minimal_open(&self, p: PointId) -> OpenId {
        self.minimal[p]
    }

    pub fn minimal_open_of(&self, label: &str) -> Result<OpenId> {
        Ok(self.minimal[self.point(label)?])
    }

    /// Smallest closed set containing `set`.
    pub fn closure(&self, set: PointSet) -> PointSet {
        let outside = self
            .opens
            .iter()
            .filter(|o| o.intersection(set).is_empty())
            .fold(PointSet::EMPTY, |acc, &o| acc.union(o));
        self.all_points().difference(outside)
    }

    pub fn closure_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        Ok(self.closure(self.point_set(labels)?))
    }

    pub fn is_closed(&self, set: PointSet) -> bool {
        self.is_open(self.all_points().difference(set))
    }

    /// Nonempty, and any two nonempty opens meet.
    pub fn is_irreducible(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let nonempty: Vec<PointSet> = self.opens.iter().copied().filter(|o| !o.is_empty()).collect();
        nonempty
            .iter()
            .all(|a| nonempty.iter().all(|b| !a.intersection(*b).is_empty()))
    }

    /// Opens the space was generated from.
    pub fn generators(&self) -> &[OpenId] {
        &self.generators
    }

    /// The subspace on `points` with the induced topology. Point labels are kept.
    pub fn subspace(&self, points: PointSet) -> FiniteSpace {
        let kept: Vec<PointId> = points.iter().collect();
        let labels: Vec<String> = kept.iter().map(|&p| self.labels[p].clone()).collect();
        let index = label_index(&labels);
        let shrink = |s: PointSet| -> PointSet {
            kept.iter()
                .enumerate()
                .filter(|(_, &p)| s.contains(p))
                .map(|(i, _)| i)
                .collect()
        };
        let opens: BTreeSet<PointSet> = self
            .opens
            .iter()
            .map(|&o| shrink(o.intersection(points)))
            .collect();
        let gens: Vec<PointSet> = self
            .generators
            .iter()
            .map(|&g| shrink(self.opens[g].intersection(points)))
            .collect();
        Self::assemble(labels, index, opens.into_iter().collect(), &gens)
    }

    /// Carries a point set of `self` over to `other` by matching labels.
    pub fn translate(&self, set: PointSet, other: &FiniteSpace) -> Result<PointSet> {
        set.iter().map(|p| other.point(&self.labels[p])).collect()
    }

    /// Antichain coverings of every open, indexed by open id.
    pub fn antichain_covering_table(&self, cap: usize) -> Result<&[Vec<Covering>]> {
        if let Some(table) = self.antichains.get() {
            return if table.iter().any(|c| c.len() > cap) {
                Err(Error::CapExceeded { what: "coverings", cap })
            } else {
                Ok(table)
            };
        }
        let table = (0..self.opens.len())
            .map(|u| enumerate_antichain_coverings(self, u, cap))
            .collect::<Result<Vec<_>>>()?;
        let _ = self.antichains.set(table);
        Ok(self.antichains.get().expect("just set"))
    }
}

fn covering_order(a: &Covering, b: &Covering) -> Ordering {
    a.parts.len().cmp(&b.parts.len()).then_with(|| a.parts.cmp(&b.parts))
}

/// Coverings of `u` whose parts are pairwise incomparable. Includes `{u}`; for
/// `u = ∅` the empty covering comes first.
pub fn enumerate_antichain_coverings(space: &FiniteSpace, u: OpenId, cap: usize) -> Result<Vec<Covering>> {
    let target = space.open(u);
    if target.is_empty() {
        return Ok(vec![
            Covering { target: u, parts: vec![] },
            Covering { target: u, parts: vec![u] },
        ]);
    }
    let candidates: Vec<OpenId> = space
        .opens_within(u)
        .into_iter()
        .filter(|&v| !space.open(v).is_empty())
        .collect();
    // suffix unions for coverage pruning
    let mut reach = vec![PointSet::EMPTY; candidates.len() + 1];
    for i in (0..candidates.len()).rev() {
        reach[i] = reach[i + 1].union(space.open(candidates[i]));
    }
    let mut out = Vec::new();
    let mut chosen: Vec<OpenId> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn search(
        space: &FiniteSpace,
        target: PointSet,
        u: OpenId,
        candidates: &[OpenId],
        reach: &[PointSet],
        i: usize,
        covered: PointSet,
        chosen: &mut Vec<OpenId>,
        out: &mut Vec<Covering>,
        cap: usize,
    ) -> Result<()> {
        if covered == target {
            if out.len() == cap {
                return Err(Error::CapExceeded { what: "coverings", cap });
            }
            out.push(Covering { target: u, parts: chosen.clone() });
            return Ok(());
        }
        if i == candidates.len() || !target.is_subset(covered.union(reach[i])) {
            return Ok(());
        }
        let c = space.open(candidates[i]);
        let comparable = chosen.iter().any(|&d| {
            let d = space.open(d);
            d.is_subset(c) || c.is_subset(d)
        });
        if !comparable && !c.is_subset(covered) {
            chosen.push(candidates[i]);
            search(space, target, u, candidates, reach, i + 1, covered.union(c), chosen, out, cap)?;
            chosen.pop();
        }
        search(space, target, u, candidates, reach, i + 1, covered, chosen, out, cap)
    }

    search(space, target, u, &candidates, &reach, 0, PointSet::EMPTY, &mut chosen, &mut out, cap)?;
    out.sort_by(covering_order);
    Ok(out)
}

/// Every family of opens inside `u` whose union is `u`; the brute-force reference.
pub fn enumerate_all_coverings(space: &FiniteSpace, u: OpenId, cap: usize) -> Result<Vec<Covering>> {
    let target = space.open(u);
    let candidates = space.opens_within(u);
    if candidates.len() >= usize::BITS as usize - 1 || (1usize << candidates.len()) > cap.saturating_mul(4) {
        return Err(Error::CapExceeded { what: "coverings", cap });
    }
    let mut out = Vec::new();
    for mask in 0usize..(1 << candidates.len()) {
        let parts: Vec<OpenId> = (0..candidates.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| candidates[i])
            .collect();
        let covered = parts.iter().fold(PointSet::EMPTY, |acc, &p| acc.union(space.open(p)));
        if covered == target {
            if out.len() == cap {
                return Err(Error::CapExceeded { what: "coverings", cap });
            }
            out.push(Covering { target: u, parts });
        }
    }
    out.sort_by(covering_order);
    Ok(out)
}

/// A family of opens generating every open by unions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    space: Arc<FiniteSpace>,
    members: Vec<OpenId>,
}

impl Basis {
    pub fn new(space: Arc<FiniteSpace>, members: &[OpenId]) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&m| m >= space.open_count()) {
            return Err(Error::NotABasis(format!("open id {bad} out of range")));
        }
        for u in 0..space.open_count() {
            let set = space.open(u);
            let cover = members
                .iter()
                .map(|&m| space.open(m))
                .filter(|m| m.is_subset(set))
                .fold(PointSet::EMPTY, |acc, m| acc.union(m));
            if cover != set {
                return Err(Error::NotABasis(format!(
                    "{} is not a union of members",
                    space.open_key(u)
                )));
            }
        }
        Ok(Basis { space, members })
    }

    pub fn from_keys<S: AsRef<str>>(space: Arc<FiniteSpace>, keys: &[Vec<S>]) -> Result<Self> {
        let members = keys
            .iter()
            .map(|k| space.require_open(space.point_set(k)?))
            .collect::<Result<Vec<_>>>()?;
        Basis::new(space, &members)
    }

    pub fn all_opens(space: Arc<FiniteSpace>) -> Self {
        let members = (0..space.open_count()).collect();
        Basis { space, members }
    }

    /// The generators the space was built from, when they form a basis.
    pub fn generators(space: Arc<FiniteSpace>) -> Result<Self> {
        let gens = space.generators().to_vec();
        Basis::new(space, &gens)
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn members(&self) -> &[OpenId] {
        &self.members
    }

    pub fn contains(&self, u: OpenId) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    pub fn members_within(&self, u: OpenId) -> Vec<OpenId> {
        let set = self.space.open(u);
        self.members
            .iter()
            .copied()
            .filter(|&m| self.space.open(m).is_subset(set))
            .collect()
    }

    pub fn neighborhoods(&self, p: PointId) -> Vec<OpenId> {
        self.members
            .iter()
            .copied()
            .filter(|&m| self.space.open(m).contains(p))
            .collect()
    }

    /// Antichain coverings of a member by members contained in it.
    pub fn antichain_coverings(&self, u: OpenId, cap: usize) -> Result<Vec<Covering>> {
        let all = enumerate_antichain_coverings(&self.space, u, cap)?;
        Ok(all
            .into_iter()
            .filter(|c| c.parts.iter().all(|&p| self.contains(p)))
            .collect())
    }
}

/// A point assignment between two finite spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousMap {
    source: Arc<FiniteSpace>,
    target: Arc<FiniteSpace>,
    assignment: Vec<PointId>,
    preimages: Vec<Option<OpenId>>,
}

impl ContinuousMap {
    /// Builds the map without requiring continuity; see [`ContinuousMap::is_continuous`].
    pub fn from_assignment(
        source: Arc<FiniteSpace>,
        target: Arc<FiniteSpace>,
        assignment: Vec<PointId>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::UnknownPoint(format!(
                "assignment covers {} of {} source points",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(Error::UnknownPoint(format!("target index {bad}")));
        }
        let preimages = target
            .opens()
            .iter()
            .map(|&v| {
                let pre: PointSet = (0..source.len()).filter(|&x| v.contains(assignment[x])).collect();
                source.open_id(pre)
            })
            .collect();
        Ok(ContinuousMap { source, target, assignment, preimages })
    }

    pub fn from_labels<S: AsRef<str>, T: AsRef<str>>(
        source: Arc<FiniteSpace>,
        target: Arc<FiniteSpace>,
        pairs: &[(S, T)],
    ) -> Result<Self> {
        let mut assignment = vec![None; source.len()];
        for (x, y) in pairs {
            let x = source.point(x.as_ref())?;
            assignment[x] = Some(target.point(y.as_ref())?);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| Error::UnknownPoint(format!("no image for `{}`", source.label(x)))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_assignment(source, target, assignment)
    }

    /// Like [`ContinuousMap::from_labels`] but rejects discontinuous assignments.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(
        source: Arc<FiniteSpace>,
        target: Arc<FiniteSpace>,
        pairs: &[(S, T)],
    ) -> Result<Self> {
        Self::from_labels(source, target, pairs)?.require_continuous()
    }

    pub fn identity(space: Arc<FiniteSpace>) -> Self {
        let assignment = (0..space.len()).collect();
        Self::from_assignment(space.clone(), space, assignment).expect("identity is total")
    }

    /// Inclusion of a subspace whose labels are a subset of `space`'s.
    pub fn inclusion(sub: Arc<FiniteSpace>, space: Arc<FiniteSpace>) -> Result<Self> {
        let assignment = sub
            .labels()
            .iter()
            .map(|l| space.point(l))
            .collect::<Result<Vec<_>>>()?;
        Self::from_assignment(sub, space, assignment)?.require_continuous()
    }

    pub fn require_continuous(self) -> Result<Self> {
        match self.preimages.iter().position(Option::is_none) {
            Some(v) => Err(Error::NotContinuous(self.target.open_key(v))),
            None => Ok(self),
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.preimages.iter().all(Option::is_some)
    }

    pub fn source(&self) -> &Arc<FiniteSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSpace> {
        &self.target
    }

    pub fn apply(&self, x: PointId) -> PointId {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[PointId] {
        &self.assignment
    }

    pub fn image(&self, set: PointSet) -> PointSet {
        set.iter().map(|x| self.assignment[x]).collect()
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        (0..self.source.len()).filter(|&x| set.contains(self.assignment[x])).collect()
    }

    /// Preimage of a target open as a source open.
    pub fn preimage_open(&self, v: OpenId) -> Result<OpenId> {
        self.preimages[v].ok_or_else(|| Error::NotContinuous(self.target.open_key(v)))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ContinuousMap) -> Result<ContinuousMap> {
        if *self.target != *next.source {
            return Err(Error::SpaceMismatch("composable maps need target = source".into()));
        }
        let assignment = self.assignment.iter().map(|&y| next.assignment[y]).collect();
        Self::from_assignment(self.source.clone(), next.target.clone(), assignment)
    }
}

/// Every topology on `n` labelled points `"0"`, `"1"`, ... (29 of them for n = 3).
pub fn all_topologies(n: usize) -> Vec<FiniteSpace> {
    assert!(n <= 4, "enumeration is exhaustive over subsets of the power set");
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let full = PointSet::full(n);
    let middle: Vec<PointSet> = (1..(1u64 << n) - 1).map(PointSet::from_bits).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << middle.len()) {
        let mut family: Vec<PointSet> = vec![PointSet::EMPTY, full];
        family.extend((0..middle.len()).filter(|i| mask >> i & 1 == 1).map(|i| middle[i]));
        let set: BTreeSet<PointSet> = family.iter().copied().collect();
        let closed = family.iter().all(|&a| {
            family
                .iter()
                .all(|&b| set.contains(&a.union(b)) && set.contains(&a.intersection(b)))
        });
        if closed {
            let opens: Vec<Vec<&str>> = set
                .iter()
                .map(|s| s.iter().map(|p| labels[p].as_str()).collect())
                .collect();
            out.push(FiniteSpace::new(&labels, &opens).expect("closed family is a topology"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn keys(space: &FiniteSpace) -> Vec<String> {
        (0..space.open_count()).map(|u| space.open_key(u)).collect()
    }

    #[test]
    fn sierpinski_from_generators() {
        let s = fixtures::sierpinski();
        assert_eq!(keys(&s), ["{}", "{1}", "{0,1}"]);
    }

    #[test]
    fn discrete_two_points() {
        let s = fixtures::disc2();
        assert_eq!(keys(&s), ["{}", "{1}", "{2}", "{1,2}"]);
    }

    #[test]
    fn pseudocircle_has_seven_opens() {
        let s = fixtures::pc4();
        assert_eq!(
            keys(&s),
            ["{}", "{a}", "{b}", "{a,b}", "{a,b,x}", "{a,b,y}", "{a,b,x,y}"]
        );
    }

    #[test]
    fn generators_must_cover() {
        let err = FiniteSpace::from_basis(&["0", "1"], &[vec!["1"]]).unwrap_err();
        assert_eq!(err, Error::GeneratorsDoNotCover);
    }

    #[test]
    fn explicit_opens_are_checked() {
        let err = FiniteSpace::new(&["a", "b", "c"], &[vec![], vec!["a", "b", "c"], vec!["a"], vec!["b"]]);
        assert!(matches!(err, Err(Error::NotATopology(_))));
        assert!(matches!(FiniteSpace::new(&["a", "a"], &[Vec::<&str>::new()]), Err(Error::DuplicatePoint(_))));
    }

    #[test]
    fn minimal_opens() {
        let s = fixtures::sierpinski();
        assert_eq!(s.open_key(s.minimal_open_of("1").unwrap()), "{1}");
        assert_eq!(s.open_key(s.minimal_open_of("0").unwrap()), "{0,1}");
        let pc = fixtures::pc4();
        assert_eq!(pc.open_key(pc.minimal_open_of("x").unwrap()), "{a,b,x}");
        assert!(matches!(pc.minimal_open_of("z"), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn closures() {
        let s = fixtures::sierpinski();
        assert_eq!(s.set_key(s.closure_of(&["1"]).unwrap()), "{0,1}");
        assert_eq!(s.set_key(s.closure_of(&["0"]).unwrap()), "{0}");
        let d = fixtures::disc2();
        assert_eq!(d.set_key(d.closure_of(&["1"]).unwrap()), "{1}");
        assert!(matches!(d.closure_of(&["7"]), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn irreducibility() {
        assert!(fixtures::sierpinski().is_irreducible());
        assert!(!fixtures::disc2().is_irreducible());
        assert!(!fixtures::pc4().is_irreducible());
        assert!(fixtures::point().is_irreducible());
    }

    #[test]
    fn continuity() {
        let pt = Arc::new(fixtures::point());
        let s = Arc::new(fixtures::sierpinski());
        let d = Arc::new(fixtures::disc2());
        let collapse = ContinuousMap::from_labels(d.clone(), pt.clone(), &[("1", "p"), ("2", "p")]).unwrap();
        assert!(collapse.is_continuous());
        let to_closed = ContinuousMap::from_labels(pt, s.clone(), &[("p", "0")]).unwrap();
        assert!(to_closed.is_continuous());
        let bad = ContinuousMap::from_labels(s, d, &[("0", "1"), ("1", "2")]).unwrap();
        assert!(!bad.is_continuous());
        assert!(matches!(bad.require_continuous(), Err(Error::NotContinuous(_))));
    }

    #[test]
    fn antichain_coverings_examples() {
        let s = fixtures::sierpinski();
        let cov = enumerate_antichain_coverings(&s, s.whole(), 100).unwrap();
        assert_eq!(cov, vec![Covering { target: 2, parts: vec![2] }]);

        let d = fixtures::disc2();
        let cov = enumerate_antichain_coverings(&d, d.whole(), 100).unwrap();
        let rendered: Vec<Vec<String>> = cov
            .iter()
            .map(|c| c.parts.iter().map(|&p| d.open_key(p)).collect())
            .collect();
        assert_eq!(rendered, vec![vec!["{1,2}"], vec!["{1}", "{2}"]]);

        let cov = enumerate_antichain_coverings(&d, d.empty_open(), 100).unwrap();
        assert_eq!(cov[0].parts, Vec::<OpenId>::new());
        assert_eq!(cov[1].parts, vec![d.empty_open()]);
    }

    #[test]
    fn covering_cap_errors() {
        let d = fixtures::disc2();
        assert!(matches!(
            enumerate_antichain_coverings(&d, d.whole(), 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn twenty_nine_topologies_on_three_points() {
        assert_eq!(all_topologies(0).len(), 1);
        assert_eq!(all_topologies(1).len(), 1);
        assert_eq!(all_topologies(2).len(), 4);
        assert_eq!(all_topologies(3).len(), 29);
    }

    #[test]
    fn subspace_keeps_labels() {
        let pc = fixtures::pc4();
        let sub = pc.subspace(pc.point_set(&["a", "b", "x"]).unwrap());
        assert_eq!(keys(&sub), ["{}", "{a}", "{b}", "{a,b}", "{a,b,x}"]);
        let closed = fixtures::sierpinski().subspace(PointSet::singleton(0));
        assert_eq!(keys(&closed), ["{}", "{0}"]);
    }

    #[test]
    fn bases() {
        let pc = Arc::new(fixtures::pc4());
        assert!(Basis::generators(pc.clone()).is_ok());
        let ab = pc.open_by_key("{a,b}").unwrap();
        assert!(matches!(Basis::new(pc, &[ab]), Err(Error::NotABasis(_))));
    }
}
