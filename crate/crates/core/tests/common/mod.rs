#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use sheafkit::presheaf::Presheaf;
use sheafkit::topology::{all_topologies, FiniteSpace};
use sheafkit::values::{Category, ValueMorphism, ValueObject};

/// Plain restriction tables: `res[u][v]` is the map `v → u` when `u ⊆ v`.
#[derive(Debug, Clone)]
pub struct Table {
    pub opens: Vec<u64>,
    pub sizes: Vec<usize>,
    pub res: Vec<Vec<Option<Vec<usize>>>>,
}

pub fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

impl Table {
    pub fn of(p: &Presheaf) -> Table {
        let s = p.space();
        let n = s.open_count();
        let opens: Vec<u64> = (0..n).map(|u| s.open(u).bits()).collect();
        let sizes = (0..n).map(|u| p.sections(u).len()).collect();
        let res = (0..n)
            .map(|u| (0..n).map(|v| subset(opens[u], opens[v]).then(|| p.res(u, v).map().to_vec())).collect())
            .collect();
        Table { opens, sizes, res }
    }

    pub fn restrict(&self, u: usize, v: usize, s: usize) -> usize {
        self.res[u][v].as_ref().expect("u inside v")[s]
    }

    pub fn index(&self, bits: u64) -> usize {
        self.opens.iter().position(|&o| o == bits).expect("open")
    }

    /// Intersection of the opens containing `x`.
    pub fn smallest_open(&self, x: usize) -> usize {
        self.index(self.opens.iter().filter(|&&o| o >> x & 1 == 1).fold(!0u64, |a, &o| a & o))
    }
}

/// Sheaf condition over every covering (every family of opens with the right union).
pub fn sheaf_by_all_coverings(t: &Table) -> bool {
    let n = t.opens.len();
    (0..n).all(|u| {
        let inside: Vec<usize> = (0..n).filter(|&v| subset(t.opens[v], t.opens[u])).collect();
        (0u64..1 << inside.len()).all(|mask| {
            let parts: Vec<usize> = (0..inside.len()).filter(|i| mask >> i & 1 == 1).map(|i| inside[i]).collect();
            if parts.iter().fold(0, |a, &p| a | t.opens[p]) != t.opens[u] {
                return true;
            }
            let mut families = vec![vec![]];
            for &p in &parts {
                families = families
                    .into_iter()
                    .flat_map(|f: Vec<usize>| (0..t.sizes[p]).map(move |a| [f.clone(), vec![a]].concat()))
                    .collect();
            }
            let compatible: Vec<Vec<usize>> = families
                .into_iter()
                .filter(|f| {
                    parts.iter().enumerate().all(|(i, &p)| {
                        parts.iter().enumerate().all(|(j, &q)| {
                            let m = t.index(t.opens[p] & t.opens[q]);
                            t.restrict(m, p, f[i]) == t.restrict(m, q, f[j])
                        })
                    })
                })
                .collect();
            let images: Vec<Vec<usize>> =
                (0..t.sizes[u]).map(|s| parts.iter().map(|&p| t.restrict(p, u, s)).collect()).collect();
            let mut distinct = images.clone();
            distinct.sort();
            distinct.dedup();
            distinct.len() == images.len() && compatible.len() == images.len()
        })
    })
}

pub fn set_object(n: usize) -> Arc<ValueObject> {
    Arc::new(ValueObject::set((0..n).map(|i| i.to_string())).expect("labels"))
}

/// Builds a functorial table on `opens`, trying candidates in an order picked by `choices`.
pub fn build_table(opens: &[u64], max: usize, choices: &[u32]) -> Table {
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
    let mut t = Table { opens: opens.to_vec(), sizes: vec![0; n], res: vec![vec![None; n]; n] };
    let mut cursor = 0;
    assert!(fill(&order, &parents, max, 0, &mut t, choices, &mut cursor), "a functor always exists");
    t
}

fn next(choices: &[u32], cursor: &mut usize) -> u64 {
    let c = if choices.is_empty() { 0 } else { choices[*cursor % choices.len()] };
    *cursor += 1;
    u64::from(c)
}

fn fill(order: &[usize], parents: &[Vec<usize>], max: usize, k: usize, t: &mut Table, choices: &[u32], cursor: &mut usize) -> bool {
    if k == order.len() {
        return true;
    }
    let u = order[k];
    let n = t.opens.len();
    let first_size = next(choices, cursor) as usize % (max + 1);
    for ds in 0..=max {
        let s = (first_size + ds) % (max + 1);
        t.sizes[u] = s;
        let lens: Vec<usize> = parents[u].iter().map(|&p| t.sizes[p]).collect();
        let total: u32 = lens.iter().sum::<usize>() as u32;
        if s == 0 && total > 0 {
            continue;
        }
        let combos = (s as u64).pow(total).max(1);
        let start = next(choices, cursor) % combos;
        for i in 0..combos {
            let mut code = (start + i) % combos;
            let mut digits = Vec::with_capacity(total as usize);
            for _ in 0..total {
                digits.push((code % s as u64) as usize);
                code /= s as u64;
            }
            let mut row: Vec<Option<Vec<usize>>> = vec![None; n];
            row[u] = Some((0..s).collect());
            let mut offset = 0;
            let mut ok = true;
            for (pi, &p) in parents[u].iter().enumerate() {
                let map = &digits[offset..offset + lens[pi]];
                offset += lens[pi];
                for v in 0..n {
                    if !subset(t.opens[p], t.opens[v]) {
                        continue;
                    }
                    let comp: Vec<usize> = t.res[p][v].as_ref().expect("assigned").iter().map(|&e| map[e]).collect();
                    match &row[v] {
                        Some(existing) if *existing != comp => ok = false,
                        _ => row[v] = Some(comp),
                    }
                }
            }
            if ok {
                t.res[u] = row;
                if fill(order, parents, max, k + 1, t, choices, cursor) {
                    return true;
                }
            }
        }
    }
    t.res[u] = vec![None; n];
    false
}

pub fn presheaf_of(space: &Arc<FiniteSpace>, t: &Table) -> Presheaf {
    let n = t.opens.len();
    let objs: Vec<Arc<ValueObject>> = t.sizes.iter().map(|&s| set_object(s)).collect();
    let mut maps = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && subset(t.opens[u], t.opens[v]) {
                let m = ValueMorphism::new(objs[v].clone(), objs[u].clone(), t.res[u][v].clone().expect("entry"))
                    .expect("in range");
                maps.push(((u, v), m));
            }
        }
    }
    Presheaf::new(space.clone(), Category::FinSet, objs, maps).expect("functor")
}

/// A topology on at most `max_points` points.
pub fn any_space(max_points: usize) -> impl Strategy<Value = Arc<FiniteSpace>> {
    let spaces: Vec<Arc<FiniteSpace>> = (0..=max_points).flat_map(all_topologies).map(Arc::new).collect();
    (0..spaces.len()).prop_map(move |i| spaces[i].clone())
}

/// A set-valued presheaf with at most `max` sections per open on a space with at most three points.
pub fn any_presheaf(max: usize) -> impl Strategy<Value = Arc<Presheaf>> {
    (any_space(3), prop::collection::vec(any::<u32>(), 1..24)).prop_map(move |(s, choices)| {
        let opens: Vec<u64> = s.opens().iter().map(|o| o.bits()).collect();
        Arc::new(presheaf_of(&s, &build_table(&opens, max, &choices)))
    })
}

/// Same as [`any_presheaf`] with a singleton over the empty open.
pub fn any_reduced_presheaf(max: usize) -> impl Strategy<Value = Arc<Presheaf>> {
    any_presheaf(max).prop_filter("terminal over the empty open", |p| p.sections(p.space().empty_open()).len() == 1)
}

/// Two presheaves on one space with at most two points.
pub fn pair_on_one_space() -> impl Strategy<Value = (Arc<Presheaf>, Arc<Presheaf>)> {
    (any_space(2), prop::collection::vec(any::<u32>(), 1..16), prop::collection::vec(any::<u32>(), 1..16)).prop_map(
        |(s, c1, c2)| {
            let opens: Vec<u64> = s.opens().iter().map(|o| o.bits()).collect();
            (Arc::new(presheaf_of(&s, &build_table(&opens, 2, &c1))), Arc::new(presheaf_of(&s, &build_table(&opens, 2, &c2))))
        },
    )
}

pub fn presheaf_on(space: &Arc<FiniteSpace>, max: usize, choices: &[u32]) -> Arc<Presheaf> {
    let opens: Vec<u64> = space.opens().iter().map(|o| o.bits()).collect();
    Arc::new(presheaf_of(space, &build_table(&opens, max, choices)))
}
