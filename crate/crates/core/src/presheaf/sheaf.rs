use std::collections::HashMap;
use std::sync::Arc;

use super::Presheaf;
use crate::error::{Error, Result};
use crate::topology::{enumerate_antichain_coverings, Covering, OpenId};
use crate::values::{enumerate_morphisms, Category, ValueMorphism, ValueObject};

pub const DEFAULT_MAX_COVERINGS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureKind {
    /// Two sections with the same restrictions to every part.
    G1,
    /// A compatible family with no gluing.
    G2,
    /// The empty covering of `∅` finds a non-terminal object.
    EmptyNotTerminal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Two distinct sections over the covered open.
    Sections(usize, usize),
    /// One section per part, in part order.
    Family(Vec<usize>),
    /// Size of the section object over `∅`.
    SectionCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafFailure {
    pub open: OpenId,
    pub parts: Vec<OpenId>,
    pub kind: FailureKind,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafReport {
    pub verdict: bool,
    pub failures: Vec<SheafFailure>,
}

impl SheafReport {
    pub(crate) fn from_failures(failures: Vec<SheafFailure>) -> Self {
        SheafReport { verdict: failures.is_empty(), failures }
    }
}

/// The gluing problem of one covering, abstracted over how sections restrict
/// and when two part sections agree.
pub(crate) struct CoveringProblem<'a> {
    pub open: OpenId,
    pub parts: &'a [OpenId],
    pub sections: usize,
    pub part_sizes: Vec<usize>,
    pub image: &'a dyn Fn(usize, usize) -> usize,
    pub agree: &'a dyn Fn(usize, usize, usize, usize) -> bool,
}

impl CoveringProblem<'_> {
    pub(crate) fn failures(&self, stop_early: bool) -> Vec<SheafFailure> {
        let mut out = Vec::new();
        let fail = |kind, witness| SheafFailure { open: self.open, parts: self.parts.to_vec(), kind, witness };
        if self.parts.is_empty() {
            if self.sections != 1 {
                out.push(fail(FailureKind::EmptyNotTerminal, Witness::SectionCount(self.sections)));
            }
            return out;
        }
        let k = self.parts.len();
        let mut images: HashMap<Vec<usize>, usize> = HashMap::with_capacity(self.sections);
        let mut g1: Option<(usize, usize)> = None;
        for s in 0..self.sections {
            let fam: Vec<usize> = (0..k).map(|i| (self.image)(i, s)).collect();
            if let Some(&t) = images.get(&fam) {
                if g1.is_none_or(|best| (t, s) < best) {
                    g1 = Some((t, s));
                }
                if stop_early {
                    break;
                }
            } else {
                images.insert(fam, s);
            }
        }
        if let Some((t, s)) = g1 {
            out.push(fail(FailureKind::G1, Witness::Sections(t, s)));
            if stop_early {
                return out;
            }
        }
        let mut fam = vec![0; k];
        if let Some(f) = self.first_unglued(0, &mut fam, &images) {
            out.push(fail(FailureKind::G2, Witness::Family(f)));
        }
        out
    }

    fn first_unglued(&self, i: usize, fam: &mut Vec<usize>, images: &HashMap<Vec<usize>, usize>) -> Option<Vec<usize>> {
        if i == fam.len() {
            return if images.contains_key(fam.as_slice()) { None } else { Some(fam.clone()) };
        }
        for a in 0..self.part_sizes[i] {
            if (0..i).all(|j| (self.agree)(j, fam[j], i, a)) {
                fam[i] = a;
                if let Some(f) = self.first_unglued(i + 1, fam, images) {
                    return Some(f);
                }
            }
        }
        None
    }
}

fn covering_problem_failures(p: &Presheaf, cov: &Covering, stop_early: bool) -> Vec<SheafFailure> {
    let space = p.space();
    let u = cov.target;
    let parts = &cov.parts;
    let to_parts: Vec<&ValueMorphism> = parts.iter().map(|&q| p.res(q, u)).collect();
    let overlaps: Vec<Vec<OpenId>> = parts
        .iter()
        .map(|&a| parts.iter().map(|&b| space.intersect(a, b)).collect())
        .collect();
    let image = |i: usize, s: usize| to_parts[i].apply(s);
    let agree = |i: usize, a: usize, j: usize, b: usize| {
        let w = overlaps[i][j];
        p.restrict(w, parts[i], a) == p.restrict(w, parts[j], b)
    };
    CoveringProblem {
        open: u,
        parts,
        sections: p.sections(u).len(),
        part_sizes: parts.iter().map(|&q| p.sections(q).len()).collect(),
        image: &image,
        agree: &agree,
    }
    .failures(stop_early)
}

impl Presheaf {
    /// Sheaf condition over the antichain coverings of every open.
    pub fn check_sheaf(&self) -> SheafReport {
        self.check_sheaf_capped(usize::MAX).expect("no cap")
    }

    pub fn check_sheaf_capped(&self, max_coverings: usize) -> Result<SheafReport> {
        let table = self.space().antichain_covering_table(max_coverings)?;
        Ok(self.check_sheaf_over(table.iter().flatten()))
    }

    /// Sheaf condition over an explicit list of coverings.
    pub fn check_sheaf_over<'a>(&self, coverings: impl IntoIterator<Item = &'a Covering>) -> SheafReport {
        let failures = coverings
            .into_iter()
            .flat_map(|c| covering_problem_failures(self, c, false))
            .collect();
        SheafReport::from_failures(failures)
    }

    /// Same verdict as [`Presheaf::check_sheaf`], stopping at the first failure.
    pub fn is_sheaf(&self) -> bool {
        let table = self.space().antichain_covering_table(usize::MAX).expect("no cap");
        table
            .iter()
            .flatten()
            .all(|c| covering_problem_failures(self, c, true).is_empty())
    }

    /// Sheaf condition at one open only.
    pub fn check_sheaf_at(&self, u: OpenId, max_coverings: usize) -> Result<SheafReport> {
        let covs = enumerate_antichain_coverings(self.space(), u, max_coverings)?;
        Ok(self.check_sheaf_over(&covs))
    }

    /// Probes that suffice to detect element-level failures: a singleton for
    /// sets, and the cyclic groups up to the exponent of all section groups.
    pub fn default_probes(&self) -> Vec<Arc<ValueObject>> {
        match self.category() {
            Category::FinSet => vec![Arc::new(ValueObject::terminal(Category::FinSet))],
            Category::FinAb => {
                let exponent = self.section_objects().iter().map(|g| group_exponent(g)).fold(1, lcm);
                (1..=exponent).map(|n| Arc::new(ValueObject::cyclic(n))).collect()
            }
        }
    }

    /// The set-valued presheaf `U ↦ Hom(T, F(U))`.
    pub fn hom_presheaf(&self, probe: &Arc<ValueObject>, max_homs: usize) -> Result<Presheaf> {
        if probe.category() != self.category() {
            return Err(Error::MixedCategories { expected: self.category(), found: probe.category() });
        }
        let space = self.space().clone();
        let mut objects = Vec::new();
        let mut lookups: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
        let mut homs_per_open = Vec::new();
        for u in 0..space.open_count() {
            let homs = enumerate_morphisms(probe, self.sections(u), max_homs)?;
            let labels: Vec<String> = homs
                .iter()
                .map(|h| crate::labels::tuple_label(h.map().iter().map(|&b| self.sections(u).label(b))))
                .collect();
            let obj = Arc::new(ValueObject::set(labels.clone())?);
            let lookup = homs
                .iter()
                .zip(&labels)
                .map(|(h, l)| (h.map().to_vec(), obj.element(l).expect("label present")))
                .collect();
            objects.push(obj);
            lookups.push(lookup);
            homs_per_open.push(homs);
        }
        let mut maps = Vec::new();
        for v in 0..space.open_count() {
            for u in space.opens_within(v) {
                let mut map = vec![0; objects[v].len()];
                for h in &homs_per_open[v] {
                    let src = lookups[v][h.map()];
                    let composed: Vec<usize> = h.map().iter().map(|&b| self.restrict(u, v, b)).collect();
                    map[src] = lookups[u][&composed];
                }
                maps.push(((u, v), ValueMorphism::new_unchecked(objects[v].clone(), objects[u].clone(), map)));
            }
        }
        Presheaf::new(space, Category::FinSet, objects, maps)
    }

    /// Sheaf condition on every `Hom(T, F(-))` for the given probes.
    pub fn check_sheaf_by_representables(&self, probes: &[Arc<ValueObject>], max_homs: usize) -> Result<bool> {
        for probe in probes {
            if !self.hom_presheaf(probe, max_homs)?.is_sheaf() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn group_exponent(g: &ValueObject) -> usize {
    (0..g.len())
        .map(|a| {
            let mut k = 1;
            let mut acc = a;
            while acc != g.zero() {
                acc = g.add(acc, a);
                k += 1;
            }
            k
        })
        .fold(1, lcm)
}
