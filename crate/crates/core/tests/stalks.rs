mod common;

use common::{any_presheaf, pair_on_one_space, subset, Table};
use proptest::prelude::*;
use sheafkit::presheaf::{enumerate_presheaf_morphisms, PresheafMorphism};
use sheafkit::stalks::{germ_of, stalk, stalk_by_germ_quotient, stalk_of_morphism};

/// Germ classes at `x` from the definition: `(U, s) ~ (V, t)` when some
/// neighbourhood inside `U ∩ V` sees equal restrictions.
fn germ_classes(t: &Table, x: usize) -> Vec<Vec<(usize, usize)>> {
    let n = t.opens.len();
    let nbhds: Vec<usize> = (0..n).filter(|&u| t.opens[u] >> x & 1 == 1).collect();
    let pairs: Vec<(usize, usize)> = nbhds.iter().flat_map(|&u| (0..t.sizes[u]).map(move |s| (u, s))).collect();
    let related = |(u, s): (usize, usize), (v, r): (usize, usize)| {
        nbhds.iter().any(|&w| {
            subset(t.opens[w], t.opens[u] & t.opens[v]) && t.restrict(w, u, s) == t.restrict(w, v, r)
        })
    };
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for &p in &pairs {
        let hits: Vec<usize> = (0..classes.len()).filter(|&c| classes[c].iter().any(|&q| related(p, q))).collect();
        let mut merged = vec![p];
        for &c in hits.iter().rev() {
            merged.extend(classes.remove(c));
        }
        classes.push(merged);
    }
    classes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn stalks_are_germ_classes(p in any_presheaf(3)) {
        let t = Table::of(&p);
        for x in 0..p.space().len() {
            let classes = germ_classes(&t, x);
            let short = stalk(&p, x).unwrap();
            let quotient = stalk_by_germ_quotient(&p, x).unwrap();
            prop_assert_eq!(short.object.len(), classes.len());
            prop_assert_eq!(quotient.object.len(), classes.len());
            let mut firsts: Vec<usize> = classes.iter().map(|c| short.germ(c[0].0, c[0].1).unwrap()).collect();
            firsts.sort();
            firsts.dedup();
            prop_assert_eq!(firsts.len(), classes.len());
            for class in &classes {
                let germs: Vec<usize> = class.iter().map(|&(u, s)| short.germ(u, s).unwrap()).collect();
                prop_assert!(germs.iter().all(|&g| g == germs[0]));
                let germs: Vec<usize> = class.iter().map(|&(u, s)| quotient.germ(u, s).unwrap()).collect();
                prop_assert!(germs.iter().all(|&g| g == germs[0]));
                for &(u, s) in class {
                    let g = germ_of(&p, u, s, x).unwrap();
                    let (m, r) = g.representative;
                    prop_assert_eq!(m, p.space().minimal_open(x));
                    prop_assert_eq!(r, t.restrict(m, u, s));
                }
            }
        }
    }

    #[test]
    fn stalk_maps_are_functorial((a, b) in pair_on_one_space()) {
        let forward = enumerate_presheaf_morphisms(&a, &b, 2000).unwrap();
        let ends = enumerate_presheaf_morphisms(&b, &b, 2000).unwrap();
        for x in 0..a.space().len() {
            let id = stalk_of_morphism(&PresheafMorphism::identity(a.clone()), x).unwrap();
            prop_assert!(id.is_identity());
            let (sa, sb) = (stalk(&a, x).unwrap(), stalk(&b, x).unwrap());
            for f in forward.iter().take(8) {
                let fx = stalk_of_morphism(f, x).unwrap();
                for &u in &sa.neighborhoods {
                    for s in 0..a.sections(u).len() {
                        prop_assert_eq!(fx.apply(sa.germ(u, s).unwrap()), sb.germ(u, f.component(u).apply(s)).unwrap());
                    }
                }
                for g in ends.iter().take(8) {
                    let both = stalk_of_morphism(&f.then(g).unwrap(), x).unwrap();
                    prop_assert_eq!(both, fx.then(&stalk_of_morphism(g, x).unwrap()).unwrap());
                }
            }
        }
    }
}
