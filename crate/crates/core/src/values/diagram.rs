use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{Category, ValueMorphism, ValueObject};
use crate::error::{Error, Result};
use crate::labels::tuple_label;

/// A finite partial order on labelled indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Reflexive-transitive closure of `relations`, where `(i, j)` means `i ≤ j`.
    pub fn new<S: Into<String>>(labels: Vec<S>, relations: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in relations {
            if i >= n || j >= n {
                return Err(Error::MalformedDiagram(format!("relation ({i}, {j}) out of range")));
            }
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::MalformedDiagram(format!(
                        "`{}` and `{}` are mutually below each other",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(Poset { labels, leq })
    }

    pub fn discrete<S: Into<String>>(labels: Vec<S>) -> Self {
        Self::new(labels, &[]).expect("discrete order")
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

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Strict relations `i < j`, in lexicographic order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq[i][j])
            .collect()
    }

    pub fn upper_bound(&self, i: usize, j: usize) -> Option<usize> {
        (0..self.len()).find(|&k| self.leq[i][k] && self.leq[j][k])
    }

    pub fn is_filtered(&self) -> bool {
        !self.is_empty()
            && (0..self.len()).all(|i| (0..self.len()).all(|j| self.upper_bound(i, j).is_some()))
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|i| self.leq[i][m]))
    }
}

/// Which way the arrow attached to `i ≤ j` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// From the object at `j` to the object at `i`.
    Contravariant,
    /// From the object at `i` to the object at `j`.
    Covariant,
}

/// A functor from a finite poset into one value category.
#[derive(Debug, Clone)]
pub struct Diagram {
    category: Category,
    poset: Poset,
    orientation: Orientation,
    objects: Vec<Arc<ValueObject>>,
    arrows: BTreeMap<(usize, usize), ValueMorphism>,
}

impl Diagram {
    /// Every strict relation needs an arrow; identities may be omitted.
    pub fn new(
        category: Category,
        poset: Poset,
        orientation: Orientation,
        objects: Vec<Arc<ValueObject>>,
        arrows: Vec<((usize, usize), ValueMorphism)>,
    ) -> Result<Self> {
        if objects.len() != poset.len() {
            return Err(Error::MalformedDiagram(format!(
                "{} objects for {} indices",
                objects.len(),
                poset.len()
            )));
        }
        if let Some(o) = objects.iter().find(|o| o.category() != category) {
            return Err(Error::MixedCategories { expected: category, found: o.category() });
        }
        let ends = |(i, j): (usize, usize)| match orientation {
            Orientation::Contravariant => (j, i),
            Orientation::Covariant => (i, j),
        };
        let mut table = BTreeMap::new();
        for ((i, j), m) in arrows {
            if i >= poset.len() || j >= poset.len() || !poset.leq(i, j) {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) is not a relation")));
            }
            if m.source().category() != category {
                return Err(Error::MixedCategories { expected: category, found: m.source().category() });
            }
            let (s, t) = ends((i, j));
            if **m.source() != *objects[s] || **m.target() != *objects[t] {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) has the wrong ends")));
            }
            let m = ValueMorphism::new_unchecked(objects[s].clone(), objects[t].clone(), m.map().to_vec());
            if table.insert((i, j), m).is_some() {
                return Err(Error::MalformedDiagram(format!("arrow ({i}, {j}) given twice")));
            }
        }
        for i in 0..poset.len() {
            match table.get(&(i, i)) {
                Some(m) if !m.is_identity() => {
                    return Err(Error::MalformedDiagram(format!("arrow ({i}, {i}) is not the identity")))
                }
                Some(_) => {}
                None => {
                    table.insert((i, i), ValueMorphism::identity(objects[i].clone()));
                }
            }
        }
        for (i, j) in poset.strict_pairs() {
            if !table.contains_key(&(i, j)) {
                return Err(Error::MalformedDiagram(format!(
                    "missing arrow for `{}` ≤ `{}`",
                    poset.labels()[i],
                    poset.labels()[j]
                )));
            }
        }
        let d = Diagram { category, poset, orientation, objects, arrows: table };
        d.check_functorial()?;
        Ok(d)
    }

    fn check_functorial(&self) -> Result<()> {
        let n = self.poset.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !(self.poset.leq(i, j) && self.poset.leq(j, k)) {
                        continue;
                    }
                    let (ij, jk, ik) = (&self.arrows[&(i, j)], &self.arrows[&(j, k)], &self.arrows[&(i, k)]);
                    let composite = match self.orientation {
                        Orientation::Contravariant => jk.then(ij)?,
                        Orientation::Covariant => ij.then(jk)?,
                    };
                    if composite.map() != ik.map() {
                        let l = self.poset.labels();
                        return Err(Error::MalformedDiagram(format!(
                            "arrows do not compose along `{}` ≤ `{}` ≤ `{}`",
                            l[i], l[j], l[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn objects(&self) -> &[Arc<ValueObject>] {
        &self.objects
    }

    pub fn arrow(&self, i: usize, j: usize) -> &ValueMorphism {
        &self.arrows[&(i, j)]
    }
}

/// A limit object with its projections and the family behind each element.
#[derive(Debug, Clone)]
pub struct LimitCone {
    pub object: Arc<ValueObject>,
    pub projections: Vec<ValueMorphism>,
    families: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl LimitCone {
    pub fn family(&self, e: usize) -> &[usize] {
        &self.families[e]
    }

    pub fn element_of(&self, family: &[usize]) -> Option<usize> {
        self.lookup.get(family).copied()
    }
}

/// Compatible families of a contravariant diagram.
pub fn limit(diagram: &Diagram) -> Result<LimitCone> {
    if diagram.orientation != Orientation::Contravariant {
        return Err(Error::MalformedDiagram("limits take contravariant diagrams".into()));
    }
    let poset = &diagram.poset;
    let n = poset.len();
    // larger indices first, so each index sees every index above it already chosen
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| ((0..n).filter(|&j| poset.leq(i, j)).count(), i));

    let mut families = Vec::new();
    let mut current = vec![usize::MAX; n];
    fn search(
        d: &Diagram,
        order: &[usize],
        pos: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == order.len() {
            out.push(current.clone());
            return;
        }
        let i = order[pos];
        let above: Vec<usize> = order[..pos]
            .iter()
            .copied()
            .filter(|&j| d.poset.leq(i, j))
            .collect();
        let mut forced = None;
        for &j in &above {
            let v = d.arrows[&(i, j)].apply(current[j]);
            match forced {
                None => forced = Some(v),
                Some(f) if f != v => return,
                _ => {}
            }
        }
        let choices: Vec<usize> = match forced {
            Some(v) => vec![v],
            None => (0..d.objects[i].len()).collect(),
        };
        for a in choices {
            current[i] = a;
            search(d, order, pos + 1, current, out);
        }
        current[i] = usize::MAX;
    }
    search(diagram, &order, 0, &mut current, &mut families);

    let label_of = |fam: &Vec<usize>| {
        tuple_label(fam.iter().enumerate().map(|(i, &a)| diagram.objects[i].label(a)))
    };
    let mut labelled: Vec<(String, Vec<usize>)> = families.into_iter().map(|f| (label_of(&f), f)).collect();
    labelled.sort();
    let (labels, families): (Vec<String>, Vec<Vec<usize>>) = labelled.into_iter().unzip();
    let lookup: HashMap<Vec<usize>, usize> =
        families.iter().enumerate().map(|(e, f)| (f.clone(), e)).collect();

    let object = match diagram.category {
        Category::FinSet => ValueObject::set(labels)?,
        Category::FinAb => {
            let zero_family: Vec<usize> = diagram.objects.iter().map(|o| o.zero()).collect();
            let zero = lookup[&zero_family];
            ValueObject::group_from_fn(labels, zero, |x, y| {
                let sum: Vec<usize> = (0..n)
                    .map(|i| diagram.objects[i].add(families[x][i], families[y][i]))
                    .collect();
                lookup[&sum]
            })?
        }
    };
    let object = Arc::new(object);
    let projections = (0..n)
        .map(|i| {
            let map = families.iter().map(|f| f[i]).collect();
            ValueMorphism::new_unchecked(object.clone(), diagram.objects[i].clone(), map)
        })
        .collect();
    Ok(LimitCone { object, projections, families, lookup })
}

/// The unique map `T → lim` through which `cone` factors.
pub fn mediating_morphism(cone: &[ValueMorphism], limit: &LimitCone) -> Result<ValueMorphism> {
    if cone.len() != limit.projections.len() {
        return Err(Error::IncompatibleCone);
    }
    let source = match cone.first() {
        Some(c) => c.source().clone(),
        None => {
            return Err(Error::MalformedDiagram(
                "an empty cone does not determine its source; use to_terminal".into(),
            ))
        }
    };
    for (c, p) in cone.iter().zip(&limit.projections) {
        if **c.source() != *source || **c.target() != **p.target() {
            return Err(Error::IncompatibleCone);
        }
    }
    let map = (0..source.len())
        .map(|t| {
            let fam: Vec<usize> = cone.iter().map(|c| c.apply(t)).collect();
            limit.element_of(&fam).ok_or(Error::IncompatibleCone)
        })
        .collect::<Result<Vec<_>>>()?;
    ValueMorphism::new(source, limit.object.clone(), map)
}

/// A filtered colimit with its injections.
#[derive(Debug, Clone)]
pub struct ColimitCocone {
    pub object: Arc<ValueObject>,
    pub injections: Vec<ValueMorphism>,
    /// Least `(index, element)` in each class.
    pub representatives: Vec<(usize, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Quotient of the disjoint union by the arrows of a covariant, filtered diagram.
pub fn filtered_colimit(diagram: &Diagram) -> Result<ColimitCocone> {
    if diagram.orientation != Orientation::Covariant {
        return Err(Error::MalformedDiagram("colimits take covariant diagrams".into()));
    }
    let poset = &diagram.poset;
    if !poset.is_filtered() {
        return Err(Error::NotFiltered(if poset.is_empty() {
            "empty index".into()
        } else {
            "some pair has no upper bound".into()
        }));
    }
    let n = poset.len();
    let mut offset = vec![0; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + diagram.objects[i].len();
    }
    let mut uf = UnionFind((0..offset[n]).collect());
    for (&(i, j), m) in &diagram.arrows {
        for a in 0..m.source().len() {
            uf.union(offset[i] + a, offset[j] + m.apply(a));
        }
    }
    // least representative per class, compared by (index label, element label)
    let mut best: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for i in 0..n {
        for a in 0..diagram.objects[i].len() {
            let root = uf.find(offset[i] + a);
            let key = |&(j, b): &(usize, usize)| (poset.labels()[j].clone(), diagram.objects[j].label(b).to_owned());
            match best.get(&root) {
                Some(cur) if key(cur) <= key(&(i, a)) => {}
                _ => {
                    best.insert(root, (i, a));
                }
            }
        }
    }
    let mut classes: Vec<(String, usize, (usize, usize))> = best
        .into_iter()
        .map(|(root, (i, a))| {
            let label = tuple_label([poset.labels()[i].as_str(), diagram.objects[i].label(a)]);
            (label, root, (i, a))
        })
        .collect();
    classes.sort();
    let class_of_root: HashMap<usize, usize> =
        classes.iter().enumerate().map(|(c, (_, root, _))| (*root, c)).collect();
    let representatives: Vec<(usize, usize)> = classes.iter().map(|(_, _, r)| *r).collect();
    let labels: Vec<String> = classes.iter().map(|(l, _, _)| l.clone()).collect();

    let mut class_maps: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let map = (0..diagram.objects[i].len())
            .map(|a| class_of_root[&uf.find(offset[i] + a)])
            .collect();
        class_maps.push(map);
    }

    let object = match diagram.category {
        Category::FinSet => ValueObject::set(labels)?,
        Category::FinAb => {
            let zero = class_maps[0][diagram.objects[0].zero()];
            ValueObject::group_from_fn(labels, zero, |x, y| {
                let ((i, a), (j, b)) = (representatives[x], representatives[y]);
                let k = poset.upper_bound(i, j).expect("filtered");
                let (a, b) = (diagram.arrows[&(i, k)].apply(a), diagram.arrows[&(j, k)].apply(b));
                class_maps[k][diagram.objects[k].add(a, b)]
            })?
        }
    };
    let object = Arc::new(object);
    // group_from_fn re-sorts labels; the classes were already in label order
    let injections = class_maps
        .into_iter()
        .enumerate()
        .map(|(i, map)| ValueMorphism::new_unchecked(diagram.objects[i].clone(), object.clone(), map))
        .collect();
    Ok(ColimitCocone { object, injections, representatives })
}

/// The unique map `colim → T` through which `cocone` factors.
pub fn colimit_factor(cocone: &[ValueMorphism], colimit: &ColimitCocone) -> Result<ValueMorphism> {
    if cocone.len() != colimit.injections.len() || cocone.is_empty() {
        return Err(Error::IncompatibleCone);
    }
    let target = cocone[0].target().clone();
    let mut map = vec![None; colimit.object.len()];
    for (c, inj) in cocone.iter().zip(&colimit.injections) {
        if **c.target() != *target || **c.source() != **inj.source() {
            return Err(Error::IncompatibleCone);
        }
        for a in 0..c.source().len() {
            let slot = &mut map[inj.apply(a)];
            match *slot {
                Some(v) if v != c.apply(a) => return Err(Error::IncompatibleCone),
                _ => *slot = Some(c.apply(a)),
            }
        }
    }
    let map = map.into_iter().map(|v| v.expect("injections are jointly surjective")).collect();
    ValueMorphism::new(colimit.object.clone(), target, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> Arc<ValueObject> {
        Arc::new(ValueObject::set(xs.iter().copied()).unwrap())
    }

    fn cospan() -> Diagram {
        // C sits below A and B, so the arrows run A → C and B → C
        let (a, b, c) = (set(&["a1", "a2"]), set(&["b1"]), set(&["c"]));
        let poset = Poset::new(vec!["A", "B", "C"], &[(2, 0), (2, 1)]).unwrap();
        let ac = ValueMorphism::new(a.clone(), c.clone(), vec![0, 0]).unwrap();
        let bc = ValueMorphism::new(b.clone(), c.clone(), vec![0]).unwrap();
        Diagram::new(
            Category::FinSet,
            poset,
            Orientation::Contravariant,
            vec![a, b, c],
            vec![((2, 0), ac), ((2, 1), bc)],
        )
        .unwrap()
    }

    #[test]
    fn empty_limit_is_terminal() {
        let d = Diagram::new(Category::FinSet, Poset::discrete(Vec::<String>::new()), Orientation::Contravariant, vec![], vec![])
            .unwrap();
        assert_eq!(limit(&d).unwrap().object.len(), 1);
        let d = Diagram::new(Category::FinAb, Poset::discrete(Vec::<String>::new()), Orientation::Contravariant, vec![], vec![])
            .unwrap();
        let l = limit(&d).unwrap();
        assert_eq!(l.object.len(), 1);
        assert_eq!(l.object.category(), Category::FinAb);
    }

    #[test]
    fn product_of_incomparable() {
        let d = Diagram::new(
            Category::FinSet,
            Poset::discrete(vec!["1", "2"]),
            Orientation::Contravariant,
            vec![set(&["s"]), set(&["t", "u"])],
            vec![],
        )
        .unwrap();
        let l = limit(&d).unwrap();
        assert_eq!(l.object.elements(), ["(s,t)", "(s,u)"]);
    }

    #[test]
    fn pullback() {
        let l = limit(&cospan()).unwrap();
        assert_eq!(l.object.elements(), ["(a1,b1,c)", "(a2,b1,c)"]);
        let t = set(&["t"]);
        let cone = vec![
            ValueMorphism::new(t.clone(), l.projections[0].target().clone(), vec![0]).unwrap(),
            ValueMorphism::new(t.clone(), l.projections[1].target().clone(), vec![0]).unwrap(),
            ValueMorphism::new(t, l.projections[2].target().clone(), vec![0]).unwrap(),
        ];
        let m = mediating_morphism(&cone, &l).unwrap();
        assert_eq!(m.map(), [0]);
        let ident = mediating_morphism(&l.projections, &l).unwrap();
        assert!(ident.is_identity());
    }

    #[test]
    fn missing_arrows_are_rejected() {
        let poset = Poset::new(vec!["i", "j"], &[(0, 1)]).unwrap();
        let err = Diagram::new(Category::FinSet, poset, Orientation::Contravariant, vec![set(&["a"]), set(&["b"])], vec![]);
        assert!(matches!(err, Err(Error::MalformedDiagram(_))));
    }

    #[test]
    fn chain_colimit() {
        let (a, b) = (set(&["a1", "a2"]), set(&["b"]));
        let poset = Poset::new(vec!["A", "B"], &[(0, 1)]).unwrap();
        let ab = ValueMorphism::new(a.clone(), b.clone(), vec![0, 0]).unwrap();
        let d = Diagram::new(Category::FinSet, poset, Orientation::Covariant, vec![a, b], vec![((0, 1), ab)]).unwrap();
        let c = filtered_colimit(&d).unwrap();
        assert_eq!(c.object.elements(), ["(A,a1)"]);
        assert!(c.injections[1].is_bijective());
    }

    #[test]
    fn colimit_needs_filtered_index() {
        let d = Diagram::new(
            Category::FinSet,
            Poset::discrete(vec!["1", "2"]),
            Orientation::Covariant,
            vec![set(&["a"]), set(&["b"])],
            vec![],
        )
        .unwrap();
        assert!(matches!(filtered_colimit(&d), Err(Error::NotFiltered(_))));
    }
}
