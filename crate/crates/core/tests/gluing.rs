use std::sync::Arc;

use sheafkit::fixtures;
use sheafkit::gluing::{
    check_cocycle, check_glued, decompose_morphism, glue, glue_morphisms, glued_uniqueness, restrict_gluing,
    GluedSheaf, GluingDatum,
};
use sheafkit::presheaf::{enumerate_presheaf_morphisms, PresheafMorphism};
use sheafkit::topology::FiniteSpace;

fn key(m: &PresheafMorphism) -> Vec<Vec<usize>> {
    m.components().iter().map(|c| c.map().to_vec()).collect()
}

/// Id in `to` of the open `o` of `from`, matched by point labels.
fn carry(from: &FiniteSpace, o: usize, to: &FiniteSpace) -> usize {
    to.require_open(from.translate(from.open(o), to).unwrap()).unwrap()
}

fn data() -> Vec<GluingDatum> {
    let mut out = vec![fixtures::pc4_gluing(false), fixtures::pc4_gluing(true)];
    for n in [1, 2] {
        let f = Arc::new(fixtures::pc4_locally_constant(n));
        let s = f.space().clone();
        let cover = ["{a,b,x}", "{a,b,y}"];
        out.push(
            GluingDatum::from_sheaf(&f, cover.iter().enumerate().map(|(i, k)| (i.to_string(), s.open_by_key(k).unwrap())).collect())
                .unwrap(),
        );
    }
    out
}

#[test]
fn glued_sheaves_are_sheaves() {
    for d in data() {
        assert!(check_cocycle(&d).verdict);
        let g = glue(&d).unwrap();
        assert!(g.sheaf.is_sheaf());
        check_glued(&d, &g).unwrap();
    }
    let global = |twisted| {
        let g = glue(&fixtures::pc4_gluing(twisted)).unwrap();
        g.sheaf.sections(g.sheaf.space().whole()).len()
    };
    assert_eq!((global(false), global(true)), (2, 0));
}

#[test]
fn the_part_order_does_not_matter() {
    for d in data() {
        let parts = (0..d.len())
            .map(|l| (format!("p{}", d.len() - l), d.covering()[l], d.part(l).clone()))
            .collect();
        let mut cocycle = Vec::new();
        for l in 0..d.len() {
            for m in 0..d.len() {
                if l != m {
                    cocycle.push((format!("p{}", d.len() - l), format!("p{}", d.len() - m), d.theta(l, m).clone()));
                }
            }
        }
        let flipped = GluingDatum::new(d.space().clone(), parts, cocycle).unwrap();
        let g = glue(&flipped).unwrap();
        let candidate = GluedSheaf { sheaf: g.sheaf.clone(), isos: g.isos.iter().rev().cloned().collect() };
        let phi = glued_uniqueness(&d, &candidate).unwrap();
        assert!(phi.is_iso());
    }
}

#[test]
fn restricting_the_datum_restricts_the_gluing() {
    for d in data() {
        let whole = glue(&d).unwrap();
        let space = d.space();
        for v in 0..space.open_count() {
            let e = restrict_gluing(&d, v).unwrap();
            let sheaf = Arc::new(whole.sheaf.restrict_to_open(v).unwrap());
            let sub = sheaf.space();
            let isos = (0..e.len())
                .map(|l| {
                    let source = Arc::new(sheaf.restrict_to_open(e.covering()[l]).unwrap());
                    let big = whole.isos[l].source().space();
                    let components = (0..source.space().open_count())
                        .map(|o| whole.isos[l].component(carry(source.space(), o, big)).clone())
                        .collect();
                    PresheafMorphism::new(source, e.part(l).clone(), components).unwrap()
                })
                .collect();
            let candidate = GluedSheaf { sheaf: sheaf.clone(), isos };
            let phi = glued_uniqueness(&e, &candidate).unwrap();
            assert!(phi.is_iso());
            assert_eq!(glue(&e).unwrap().sheaf.sections(sub.whole()).len(), whole.sheaf.sections(v).len());
        }
    }
}

fn compatible(d: &GluingDatum, family: &[PresheafMorphism]) -> bool {
    (0..d.len()).all(|l| {
        (0..d.len()).all(|m| {
            let theta = d.theta(l, m);
            let overlap = theta.source().space();
            (0..overlap.open_count()).all(|o| {
                let (ol, om) = (carry(overlap, o, d.part(l).space()), carry(overlap, o, d.part(m).space()));
                let left = theta.component(o).then(family[l].component(ol)).unwrap();
                let right = family[m].component(om).then(theta.component(o)).unwrap();
                left.map() == right.map()
            })
        })
    })
}

#[test]
fn morphisms_glue_from_compatible_families() {
    for d in data() {
        let ends: Vec<Vec<PresheafMorphism>> =
            (0..d.len()).map(|l| enumerate_presheaf_morphisms(d.part(l), d.part(l), 10_000).unwrap()).collect();
        let mut glued = 0;
        for a in &ends[0] {
            for b in &ends[1] {
                let family = vec![a.clone(), b.clone()];
                match glue_morphisms(&d, &d, &family) {
                    Ok(u) => {
                        assert!(compatible(&d, &family));
                        glued += 1;
                        let back = decompose_morphism(&d, &d, &u).unwrap();
                        assert_eq!(back.iter().map(key).collect::<Vec<_>>(), family.iter().map(key).collect::<Vec<_>>());
                    }
                    Err(_) => assert!(!compatible(&d, &family)),
                }
            }
        }
        let g = glue(&d).unwrap();
        assert_eq!(glued, enumerate_presheaf_morphisms(&g.sheaf, &g.sheaf, 100_000).unwrap().len());
    }
}
