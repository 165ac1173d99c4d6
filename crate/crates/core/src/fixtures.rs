//! Small named spaces and presheaves used throughout the tests and examples.

use std::sync::Arc;

use crate::gluing::GluingDatum;
use crate::labels::tuple_label;
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::topology::{ContinuousMap, FiniteSpace, PointId};
use crate::values::{Category, ValueMorphism, ValueObject};

/// `{0, 1}` with opens `∅, {1}, X`.
pub fn sierpinski() -> FiniteSpace {
    FiniteSpace::from_basis(&["0", "1"], &[vec!["1"], vec!["0", "1"]]).expect("valid")
}

/// Two discrete points `1`, `2`.
pub fn disc2() -> FiniteSpace {
    FiniteSpace::from_basis(&["1", "2"], &[vec!["1"], vec!["2"]]).expect("valid")
}

/// The four-point circle: open points `a`, `b` and closed points `x`, `y`.
pub fn pc4() -> FiniteSpace {
    FiniteSpace::from_basis(
        &["a", "b", "x", "y"],
        &[vec!["a"], vec!["b"], vec!["a", "b", "x"], vec!["a", "b", "y"]],
    )
    .expect("valid")
}

/// A single point `p`.
pub fn point() -> FiniteSpace {
    FiniteSpace::from_basis(&["p"], &[vec!["p"]]).expect("valid")
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Sections over `U` are the families `(s_x)_{x ∈ U}` of elements of `object`
/// that are constant on the connected components of `U`.
pub fn locally_constant(space: Arc<FiniteSpace>, object: Arc<ValueObject>) -> Presheaf {
    let n = space.open_count();
    let points: Vec<Vec<PointId>> = (0..n).map(|u| space.open(u).iter().collect()).collect();
    let families: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|u| {
            let pts = &points[u];
            // component representative of each point, by repeated merging
            let mut comp: Vec<usize> = (0..pts.len()).collect();
            loop {
                let mut changed = false;
                for i in 0..pts.len() {
                    let ui = space.open(space.minimal_open(pts[i]));
                    for j in 0..pts.len() {
                        if ui.contains(pts[j]) && comp[i] != comp[j] {
                            let m = comp[i].min(comp[j]);
                            comp[i] = m;
                            comp[j] = m;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let reps: Vec<usize> = (0..pts.len()).filter(|&i| comp[i] == i).collect();
            let mut out = Vec::new();
            let total = object.len().pow(reps.len() as u32);
            for mut code in 0..total {
                let mut values = vec![0; reps.len()];
                for v in values.iter_mut() {
                    *v = code % object.len();
                    code /= object.len();
                }
                out.push(
                    (0..pts.len())
                        .map(|i| values[reps.iter().position(|&r| r == comp[i]).unwrap()])
                        .collect(),
                );
            }
            out
        })
        .collect();
    let label = |fam: &[usize]| tuple_label(fam.iter().map(|&a| object.label(a)));
    let objects: Vec<Arc<ValueObject>> = (0..n)
        .map(|u| {
            let labels: Vec<String> = families[u].iter().map(|f| label(f)).collect();
            Arc::new(match object.category() {
                Category::FinSet => ValueObject::set(labels).expect("distinct labels"),
                Category::FinAb => {
                    let find = |f: &[usize]| families[u].iter().position(|g| g == f).unwrap();
                    let zero = find(&vec![object.zero(); points[u].len()]);
                    ValueObject::group_from_fn(labels, zero, |a, b| {
                        let sum: Vec<usize> =
                            families[u][a].iter().zip(&families[u][b]).map(|(&x, &y)| object.add(x, y)).collect();
                        find(&sum)
                    })
                    .expect("componentwise group")
                }
            })
        })
        .collect();
    Presheaf::from_fn(space.clone(), object.category(), |u| objects[u].clone(), |u, v, s| {
        let fam = families[v]
            .iter()
            .find(|f| label(f) == objects[v].label(s))
            .unwrap();
        let sub: Vec<usize> = points[u]
            .iter()
            .map(|p| fam[points[v].iter().position(|q| q == p).unwrap()])
            .collect();
        objects[u].element(&label(&sub)).unwrap()
    })
    .expect("locally constant presheaf is well formed")
}

/// Locally constant sheaf on [`pc4`] with values in `{0, …, n-1}`.
pub fn pc4_locally_constant(n: usize) -> Presheaf {
    locally_constant(Arc::new(pc4()), Arc::new(ValueObject::set(labels(n)).expect("labels")))
}

/// Locally constant sheaf on [`disc2`]: global sections are pairs.
pub fn disc2_constant_sheaf(n: usize) -> Presheaf {
    locally_constant(Arc::new(disc2()), Arc::new(ValueObject::set(labels(n)).expect("labels")))
}

/// The constant presheaf on [`disc2`], not a sheaf for `n > 1`.
pub fn disc2_constant_presheaf(n: usize) -> Presheaf {
    Presheaf::constant(Arc::new(disc2()), Arc::new(ValueObject::set(labels(n)).expect("labels")))
}

pub fn sierpinski_constant(n: usize) -> Presheaf {
    Presheaf::constant(Arc::new(sierpinski()), Arc::new(ValueObject::set(labels(n)).expect("labels")))
}

/// `F(X) = {s, t}`, `F({1}) = {u}`.
pub fn sierpinski_sheaf() -> Presheaf {
    Presheaf::from_labels(
        Arc::new(sierpinski()),
        Category::FinSet,
        vec![("{1}", ValueObject::set(["u"]).expect("set")), ("{0,1}", ValueObject::set(["s", "t"]).expect("set"))],
        &[("{1}", "{0,1}", &[("s", "u"), ("t", "u")])],
    )
    .expect("valid")
}

/// `Z/2` on the whole space and zero on `{1}`: supported on the closed point.
pub fn sierpinski_z2_closed() -> Presheaf {
    Presheaf::from_labels(
        Arc::new(sierpinski()),
        Category::FinAb,
        vec![("{1}", ValueObject::cyclic(1)), ("{0,1}", ValueObject::cyclic(2))],
        &[("{1}", "{0,1}", &[("0", "0"), ("1", "0")])],
    )
    .expect("valid")
}

/// Sections `a` over `{1}`, `b, b'` over `{2}` and only `s ↦ (a, b)` globally.
pub fn disc2_g2_failure() -> Presheaf {
    Presheaf::from_labels(
        Arc::new(disc2()),
        Category::FinSet,
        vec![
            ("{1}", ValueObject::set(["a"]).expect("set")),
            ("{2}", ValueObject::set(["b", "b'"]).expect("set")),
            ("{1,2}", ValueObject::set(["s"]).expect("set")),
        ],
        &[("{1}", "{1,2}", &[("s", "a")]), ("{2}", "{1,2}", &[("s", "b")])],
    )
    .expect("valid")
}

/// `a, b ↦ 1` and `x, y ↦ 0`.
pub fn pc4_to_sierpinski() -> ContinuousMap {
    ContinuousMap::new(
        Arc::new(pc4()),
        Arc::new(sierpinski()),
        &[("a", "1"), ("b", "1"), ("x", "0"), ("y", "0")],
    )
    .expect("continuous")
}

/// [`pc4`] covered by `{a,b,x}` and `{a,b,y}`, each carrying a locally constant
/// sheaf with values in `{0, 1}`. Over the overlap the map is the identity, or
/// the swap on the `b` component when `twisted`.
pub fn pc4_gluing(twisted: bool) -> GluingDatum {
    let space = Arc::new(pc4());
    let two = Arc::new(ValueObject::set(labels(2)).expect("labels"));
    let part = |key: &str| {
        let u = space.open_by_key(key).expect("open");
        let sub = Arc::new(space.subspace(space.open(u)));
        (u, Arc::new(locally_constant(sub, two.clone())))
    };
    let (u1, f1) = part("{a,b,x}");
    let (u2, f2) = part("{a,b,y}");
    let overlap = space.open_by_key("{a,b}").expect("open");
    let s1 = Arc::new(f1.restrict_to_open(f1.space().require_open(space.translate(space.open(overlap), f1.space()).expect("points")).expect("open")).expect("open"));
    let s2 = Arc::new(f2.restrict_to_open(f2.space().require_open(space.translate(space.open(overlap), f2.space()).expect("points")).expect("open")).expect("open"));
    let ov = s1.space().clone();
    let b = ov.point("b").expect("point");
    let theta = (0..ov.open_count())
        .map(|w| {
            let pts: Vec<PointId> = ov.open(w).iter().collect();
            let target = s1.sections(w).clone();
            ValueMorphism::from_fn(s2.sections(w).clone(), target.clone(), |e| {
                let label = s2.sections(w).label(e);
                if !twisted || pts.is_empty() {
                    return target.element(label).expect("same labels");
                }
                let inner = label.trim_start_matches('(').trim_end_matches(')');
                let flipped: Vec<String> = inner
                    .split(',')
                    .zip(&pts)
                    .map(|(v, &p)| if p == b { (if v == "0" { "1" } else { "0" }).to_string() } else { v.to_string() })
                    .collect();
                target.element(&tuple_label(flipped.iter().map(String::as_str))).expect("flipped label")
            })
            .expect("map")
        })
        .collect();
    let theta = PresheafMorphism::new(s2, s1, theta).expect("natural");
    GluingDatum::new(
        space,
        vec![("1".into(), u1, f1), ("2".into(), u2, f2)],
        vec![("1".into(), "2".into(), theta)],
    )
    .expect("valid gluing datum")
}
