//! Brute-force oracles over plain restriction tables. Nothing here calls the
//! library's sheaf, stalk or Hom machinery.

#![allow(dead_code)]

use std::sync::Arc;

use sheafkit::presheaf::{BasisPresheaf, Presheaf};
use sheafkit::topology::{Basis, FiniteSpace, OpenId};
use sheafkit::values::{Category, ValueMorphism, ValueObject};

/// A functor on a family of open sets: `res[u][v]` is the map `v → u` when `u ⊆ v`.
#[derive(Debug, Clone)]
pub struct Table {
    pub opens: Vec<u64>,
    pub sizes: Vec<usize>,
    pub res: Vec<Vec<Option<Vec<usize>>>>,
    /// Addition tables, for groups.
    pub add: Option<Vec<Vec<Vec<usize>>>>,
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

impl Table {
    pub fn of(p: &Presheaf) -> Table {
        let space = p.space();
        let n = space.open_count();
        let opens: Vec<u64> = (0..n).map(|u| space.open(u).bits()).collect();
        let sizes = (0..n).map(|u| p.sections(u).len()).collect();
        let res = (0..n)
            .map(|u| {
                (0..n)
                    .map(|v| subset(opens[u], opens[v]).then(|| p.res(u, v).map().to_vec()))
                    .collect()
            })
            .collect();
        let add = (p.category() == Category::FinAb).then(|| {
            (0..n)
                .map(|u| {
                    let obj = p.sections(u);
                    (0..obj.len()).map(|a| (0..obj.len()).map(|b| obj.add(a, b)).collect()).collect()
                })
                .collect()
        });
        Table { opens, sizes, res, add }
    }

    pub fn restrict(&self, u: usize, v: usize, s: usize) -> usize {
        self.res[u][v].as_ref().expect("u inside v")[s]
    }

    pub fn index(&self, bits: u64) -> Option<usize> {
        self.opens.iter().position(|&o| o == bits)
    }

    pub fn le(&self, u: usize, v: usize) -> bool {
        subset(self.opens[u], self.opens[v])
    }
}

/// Every family of members inside `opens[u]` whose union is `opens[u]`, for each `u`.
pub fn all_coverings(opens: &[u64]) -> Vec<Vec<Vec<usize>>> {
    (0..opens.len())
        .map(|u| {
            let inside: Vec<usize> = (0..opens.len()).filter(|&v| subset(opens[v], opens[u])).collect();
            (0u64..1 << inside.len())
                .map(|mask| (0..inside.len()).filter(|i| mask >> i & 1 == 1).map(|i| inside[i]).collect::<Vec<_>>())
                .filter(|parts| parts.iter().fold(0, |acc, &p| acc | opens[p]) == opens[u])
                .collect()
        })
        .collect()
}

/// Whether `F(U)` maps bijectively onto the compatible families of `parts`, where
/// two parts are compatible when `agree(i, a_i, j, a_j)`.
fn glues(t: &Table, u: usize, parts: &[usize], agree: &dyn Fn(usize, usize, usize, usize) -> bool) -> bool {
    // stops once more than `limit` families are found
    fn count(
        t: &Table,
        parts: &[usize],
        agree: &dyn Fn(usize, usize, usize, usize) -> bool,
        fam: &mut Vec<usize>,
        limit: usize,
    ) -> usize {
        let i = fam.len();
        if i == parts.len() {
            return 1;
        }
        let mut total = 0;
        for a in 0..t.sizes[parts[i]] {
            if (0..i).all(|j| agree(parts[j], fam[j], parts[i], a)) {
                fam.push(a);
                total += count(t, parts, agree, fam, limit);
                fam.pop();
                if total > limit {
                    break;
                }
            }
        }
        total
    }
    let families = count(t, parts, agree, &mut Vec::new(), t.sizes[u]);
    if families != t.sizes[u] {
        return false;
    }
    let images: std::collections::HashSet<Vec<usize>> =
        (0..t.sizes[u]).map(|s| parts.iter().map(|&p| t.restrict(p, u, s)).collect()).collect();
    images.len() == t.sizes[u]
}

/// The sheaf condition over every covering of every open, with agreement
/// tested on the pairwise intersections.
pub fn sheaf_by_all_coverings(t: &Table, coverings: &[Vec<Vec<usize>>]) -> bool {
    let meet = |a: usize, b: usize| t.index(t.opens[a] & t.opens[b]).expect("opens closed under intersection");
    let agree = |p: usize, a: usize, q: usize, b: usize| {
        let m = meet(p, q);
        t.restrict(m, p, a) == t.restrict(m, q, b)
    };
    coverings
        .iter()
        .enumerate()
        .all(|(u, covs)| covs.iter().all(|parts| glues(t, u, parts, &agree)))
}

/// Condition (F₀) on a table over basis members: every covering of a member by
/// members, with agreement tested on every member inside each overlap.
pub fn basis_condition(t: &Table) -> bool {
    let n = t.opens.len();
    let agree = |p: usize, a: usize, q: usize, b: usize| {
        let overlap = t.opens[p] & t.opens[q];
        (0..n)
            .filter(|&w| subset(t.opens[w], overlap))
            .all(|w| t.restrict(w, p, a) == t.restrict(w, q, b))
    };
    all_coverings(&t.opens)
        .iter()
        .enumerate()
        .all(|(u, covs)| covs.iter().all(|parts| glues(t, u, parts, &agree)))
}

/// Families over the members inside `bits` related by restriction.
pub fn count_compatible_families(t: &Table, bits: u64) -> usize {
    let inside: Vec<usize> = (0..t.opens.len()).filter(|&v| subset(t.opens[v], bits)).collect();
    let agree = |p: usize, a: usize, q: usize, b: usize| {
        if t.le(p, q) {
            t.restrict(p, q, b) == a
        } else if t.le(q, p) {
            t.restrict(q, p, a) == b
        } else {
            true
        }
    };
    fn go(t: &Table, inside: &[usize], agree: &dyn Fn(usize, usize, usize, usize) -> bool, fam: &mut Vec<usize>) -> usize {
        let i = fam.len();
        if i == inside.len() {
            return 1;
        }
        let mut total = 0;
        for a in 0..t.sizes[inside[i]] {
            if (0..i).all(|j| agree(inside[j], fam[j], inside[i], a)) {
                fam.push(a);
                total += go(t, inside, agree, fam);
                fam.pop();
            }
        }
        total
    }
    go(t, &inside, &agree, &mut Vec::new())
}

/// Calls `f` on every functor from the members (ordered by inclusion, reversed)
/// to sets of size at most `max`.
pub fn for_each_functor(opens: &[u64], max: usize, f: &mut dyn FnMut(&Table)) {
    let n = opens.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(opens[u].count_ones()));
    let parents: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && subset(opens[u], opens[v]))
                .filter(|&v| !(0..n).any(|w| w != u && w != v && subset(opens[u], opens[w]) && subset(opens[w], opens[v])))
                .collect()
        })
        .collect();
    let mut t = Table { opens: opens.to_vec(), sizes: vec![0; n], res: vec![vec![None; n]; n], add: None };
    step(&order, &parents, max, 0, &mut t, f);
}

fn step(order: &[usize], parents: &[Vec<usize>], max: usize, k: usize, t: &mut Table, f: &mut dyn FnMut(&Table)) {
    if k == order.len() {
        f(t);
        return;
    }
    let u = order[k];
    let n = t.opens.len();
    for s in 0..=max {
        t.sizes[u] = s;
        let ps = &parents[u];
        let lens: Vec<usize> = ps.iter().map(|&p| t.sizes[p]).collect();
        let total: usize = lens.iter().sum();
        if s == 0 && total > 0 {
            continue;
        }
        let mut digits = vec![0usize; total];
        loop {
            let mut row: Vec<Option<Vec<usize>>> = vec![None; n];
            row[u] = Some((0..s).collect());
            let mut ok = true;
            let mut offset = 0;
            'parents: for (i, &p) in ps.iter().enumerate() {
                let map = digits[offset..offset + lens[i]].to_vec();
                offset += lens[i];
                for v in 0..n {
                    if !subset(t.opens[p], t.opens[v]) {
                        continue;
                    }
                    let comp: Vec<usize> = t.res[p][v].as_ref().expect("assigned").iter().map(|&e| map[e]).collect();
                    match &row[v] {
                        Some(existing) if *existing != comp => {
                            ok = false;
                            break 'parents;
                        }
                        _ => row[v] = Some(comp),
                    }
                }
            }
            if ok {
                t.res[u] = row;
                step(order, parents, max, k + 1, t, f);
            }
            // odometer in base s
            let mut i = 0;
            while i < total {
                digits[i] += 1;
                if digits[i] < s {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == total {
                break;
            }
        }
    }
    t.res[u] = vec![None; n];
}

/// Set objects `{}`, `{0}`, `{0,1}`, ...
pub fn set_objects(max: usize) -> Vec<Arc<ValueObject>> {
    (0..=max)
        .map(|k| Arc::new(ValueObject::set((0..k).map(|i| i.to_string())).expect("labels")))
        .collect()
}

impl Table {
    fn restrict_range(&self, u: usize, v: usize) -> Vec<usize> {
        self.res[u][v].clone().expect("u inside v")
    }
}

/// The presheaf on `space` whose table is `t`, indexed by open id.
pub fn presheaf_of(space: &Arc<FiniteSpace>, t: &Table, objs: &[Arc<ValueObject>]) -> Presheaf {
    let ids: Vec<OpenId> = (0..t.opens.len()).collect();
    let sections = t.sizes.iter().map(|&s| objs[s].clone()).collect();
    let maps = ids
        .iter()
        .flat_map(|&u| ids.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| u != v && t.le(u, v))
        .map(|(u, v)| {
            let m = ValueMorphism::new(objs[t.sizes[v]].clone(), objs[t.sizes[u]].clone(), t.restrict_range(u, v))
                .expect("table entries in range");
            ((u, v), m)
        })
        .collect();
    Presheaf::new(space.clone(), Category::FinSet, sections, maps).expect("functor")
}

/// The basis presheaf whose table is `t`, indexed by position in `basis.members()`.
pub fn basis_presheaf_of(basis: &Basis, t: &Table, objs: &[Arc<ValueObject>]) -> BasisPresheaf {
    let ids = basis.members();
    let sections = ids.iter().zip(&t.sizes).map(|(&u, &s)| (u, objs[s].clone())).collect();
    let mut maps = Vec::new();
    for u in 0..ids.len() {
        for v in 0..ids.len() {
            if u != v && t.le(u, v) {
                let m = ValueMorphism::new(objs[t.sizes[v]].clone(), objs[t.sizes[u]].clone(), t.restrict_range(u, v))
                    .expect("table entries in range");
                maps.push(((ids[u], ids[v]), m));
            }
        }
    }
    BasisPresheaf::new(basis.clone(), Category::FinSet, sections, maps).expect("functor on the basis")
}

/// Intersection of the opens containing point `x`.
pub fn smallest_open(t: &Table, x: usize) -> usize {
    let bits = t.opens.iter().filter(|&&o| o >> x & 1 == 1).fold(!0u64, |acc, &o| acc & o);
    t.index(bits).expect("finite intersection of opens")
}

/// Points every open neighbourhood of which meets `set`.
pub fn closure(t: &Table, points: usize, set: u64) -> u64 {
    (0..points)
        .filter(|&y| t.opens.iter().filter(|&&o| o >> y & 1 == 1).all(|&o| o & set != 0))
        .fold(0, |acc, y| acc | 1 << y)
}

/// Points where the smallest neighbourhood carries more than one section.
pub fn support(t: &Table, points: usize) -> u64 {
    (0..points).filter(|&x| t.sizes[smallest_open(t, x)] > 1).fold(0, |acc, x| acc | 1 << x)
}

/// Germ classes at `x`: pairs `(U, s)` with `x ∈ U`, identified when they agree
/// on some open neighbourhood of `x` inside both. Returns the pairs and a class id per pair.
pub fn germ_classes(t: &Table, x: usize) -> (Vec<(usize, usize)>, Vec<usize>) {
    let nbhds: Vec<usize> = (0..t.opens.len()).filter(|&u| t.opens[u] >> x & 1 == 1).collect();
    let pairs: Vec<(usize, usize)> = nbhds.iter().flat_map(|&u| (0..t.sizes[u]).map(move |s| (u, s))).collect();
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let ((u, s), (v, r)) = (pairs[i], pairs[j]);
            let same = nbhds
                .iter()
                .any(|&w| t.le(w, u) && t.le(w, v) && t.restrict(w, u, s) == t.restrict(w, v, r));
            if same {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..pairs.len()).map(|i| find(&mut parent, i)).collect();
    let mut distinct: Vec<usize> = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let class = roots.iter().map(|r| distinct.binary_search(r).expect("root")).collect();
    (pairs, class)
}

/// Number of natural transformations `a → b` (homomorphisms at each open when
/// both carry addition tables).
pub fn count_morphisms(a: &Table, b: &Table) -> usize {
    assert_eq!(a.opens, b.opens, "tables over the same opens");
    let n = a.opens.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(a.opens[u].count_ones()));
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; n];
    fn go(a: &Table, b: &Table, order: &[usize], k: usize, comps: &mut Vec<Option<Vec<usize>>>) -> usize {
        if k == order.len() {
            return 1;
        }
        let u = order[k];
        let (s, t) = (a.sizes[u], b.sizes[u]);
        if s > 0 && t == 0 {
            return 0;
        }
        let mut total = 0;
        let mut digits = vec![0usize; s];
        loop {
            let natural = (0..k).all(|j| {
                let v = order[j];
                let cv = comps[v].as_ref().expect("assigned");
                if a.le(u, v) {
                    (0..a.sizes[v]).all(|e| b.restrict(u, v, cv[e]) == digits[a.restrict(u, v, e)])
                } else if a.le(v, u) {
                    (0..s).all(|e| b.restrict(v, u, digits[e]) == cv[a.restrict(v, u, e)])
                } else {
                    true
                }
            });
            let additive = match (&a.add, &b.add) {
                (Some(pa), Some(pb)) => {
                    (0..s).all(|x| (0..s).all(|y| digits[pa[u][x][y]] == pb[u][digits[x]][digits[y]]))
                }
                _ => true,
            };
            if natural && additive {
                comps[u] = Some(digits.clone());
                total += go(a, b, order, k + 1, comps);
                comps[u] = None;
            }
            let mut i = 0;
            while i < s {
                digits[i] += 1;
                if digits[i] < t {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == s {
                break;
            }
        }
        total
    }
    go(a, b, &order, 0, &mut comps)
}
