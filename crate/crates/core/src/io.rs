//! JSON file formats.
//!
//! Every document carries a `schema` field. Spaces and presheaves may be given
//! inline or as a path relative to the referring file. Writers emit canonical
//! JSON: object keys sorted, arrays in a fixed order, so equal inputs give
//! byte-identical output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::GluingDatum;
use crate::presheaf::{BasisPresheaf, Presheaf, PresheafMorphism, SheafDiagram};
use crate::topology::{Basis, ContinuousMap, FiniteSpace, OpenId};
use crate::values::{Category, Poset, ValueMorphism, ValueObject};

pub const SPACE_SCHEMA: &str = "sheafkit/space/v1";
pub const PRESHEAF_SCHEMA: &str = "sheafkit/presheaf/v1";
pub const BASIS_PRESHEAF_SCHEMA: &str = "sheafkit/basis-presheaf/v1";
pub const MORPHISM_SCHEMA: &str = "sheafkit/morphism/v1";
pub const MAP_SCHEMA: &str = "sheafkit/map/v1";
pub const GLUING_SCHEMA: &str = "sheafkit/gluing/v1";
pub const DIAGRAM_SCHEMA: &str = "sheafkit/diagram/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub schema: String,
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
}

/// Inline document or path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(Box<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectDoc {
    Set(Vec<String>),
    Group { elements: Vec<String>, zero: String, add: Vec<[String; 3]> },
}

/// Element map of one restriction or component, keyed by source label.
pub type ElementMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDoc {
    pub small: String,
    pub big: String,
    pub map: ElementMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Ref<SpaceDoc>>,
    pub category: Category,
    pub sections: BTreeMap<String, ObjectDoc>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisPresheafDoc {
    pub schema: String,
    pub space: Ref<SpaceDoc>,
    pub basis: Vec<Vec<String>>,
    pub category: Category,
    pub sections: BTreeMap<String, ObjectDoc>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDoc>,
}

/// Components keyed by open key.
pub type ComponentsDoc = BTreeMap<String, ElementMap>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub schema: String,
    pub components: ComponentsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub schema: String,
    pub source: Ref<SpaceDoc>,
    pub target: Ref<SpaceDoc>,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingPartDoc {
    pub label: String,
    pub open: Vec<String>,
    pub presheaf: Ref<PresheafDoc>,
}

/// `θ` for the ordered pair `(λ, μ)`, from part `μ` to part `λ` over the overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleDoc {
    pub pair: [String; 2],
    pub components: ComponentsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDoc {
    pub schema: String,
    pub space: Ref<SpaceDoc>,
    pub parts: Vec<GluingPartDoc>,
    #[serde(default)]
    pub cocycle: Vec<CocycleDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramNodeDoc {
    pub label: String,
    pub presheaf: Ref<PresheafDoc>,
}

/// The arrow for `le = [i, j]` with `i ≤ j` runs from the node `j` to the node `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramArrowDoc {
    pub le: [String; 2],
    pub components: ComponentsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub schema: String,
    pub space: Ref<SpaceDoc>,
    pub nodes: Vec<DiagramNodeDoc>,
    #[serde(default)]
    pub arrows: Vec<DiagramArrowDoc>,
}

pub fn to_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("serializable")
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(value)).expect("serializable");
    s.push('\n');
    s
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Parse(format!("schema `{found}` where `{expected}` was expected")));
    }
    Ok(())
}

fn base_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Resolves a reference, returning the document and the directory further references are relative to.
fn resolve<T: DeserializeOwned + Clone>(r: &Ref<T>, base: &Path) -> Result<(T, PathBuf)> {
    match r {
        Ref::Inline(doc) => Ok(((**doc).clone(), base.to_path_buf())),
        Ref::Path(p) => {
            let path = base.join(p);
            Ok((read_doc(&path)?, base_of(&path)))
        }
    }
}

// spaces

pub fn space_from_doc(doc: &SpaceDoc) -> Result<FiniteSpace> {
    check_schema(&doc.schema, SPACE_SCHEMA)?;
    match (&doc.opens, &doc.basis) {
        (Some(opens), None) => FiniteSpace::new(&doc.points, opens),
        (None, Some(basis)) => FiniteSpace::from_basis(&doc.points, basis),
        _ => Err(Error::Parse("a space needs exactly one of `opens` and `basis`".into())),
    }
}

fn sorted_labels(space: &FiniteSpace, set: crate::topology::PointSet) -> Vec<String> {
    let mut v: Vec<String> = space.set_labels(set).into_iter().map(str::to_owned).collect();
    v.sort();
    v
}

/// Canonical form: sorted points and every open in id order.
pub fn space_to_doc(space: &FiniteSpace) -> SpaceDoc {
    SpaceDoc {
        schema: SPACE_SCHEMA.into(),
        points: space.labels().to_vec(),
        opens: Some(space.opens().iter().map(|&o| sorted_labels(space, o)).collect()),
        basis: None,
    }
}

pub fn read_space(path: &Path) -> Result<Arc<FiniteSpace>> {
    Ok(Arc::new(space_from_doc(&read_doc(path)?)?))
}

fn space_ref(r: &Ref<SpaceDoc>, base: &Path) -> Result<Arc<FiniteSpace>> {
    let (doc, _) = resolve(r, base)?;
    Ok(Arc::new(space_from_doc(&doc)?))
}

// value objects

pub fn object_from_doc(doc: &ObjectDoc, category: Category) -> Result<ValueObject> {
    match (doc, category) {
        (ObjectDoc::Set(elements), Category::FinSet) => ValueObject::set(elements.iter().map(String::as_str)),
        (ObjectDoc::Group { elements, zero, add }, Category::FinAb) => {
            let triples: Vec<(&str, &str, &str)> =
                add.iter().map(|[a, b, c]| (a.as_str(), b.as_str(), c.as_str())).collect();
            ValueObject::group(elements.iter().map(String::as_str), zero, &triples)
        }
        (ObjectDoc::Set(_), Category::FinAb) => {
            Err(Error::WrongCategory { expected: Category::FinAb, found: Category::FinSet })
        }
        (ObjectDoc::Group { .. }, Category::FinSet) => {
            Err(Error::WrongCategory { expected: Category::FinSet, found: Category::FinAb })
        }
    }
}

pub fn object_to_doc(obj: &ValueObject) -> ObjectDoc {
    match obj.category() {
        Category::FinSet => ObjectDoc::Set(obj.elements().to_vec()),
        Category::FinAb => {
            let mut add: Vec<[String; 3]> = obj.add_triples().into_iter().map(|(a, b, c)| [a, b, c]).collect();
            add.sort();
            ObjectDoc::Group { elements: obj.elements().to_vec(), zero: obj.label(obj.zero()).to_owned(), add }
        }
    }
}

fn map_from_doc(source: &Arc<ValueObject>, target: &Arc<ValueObject>, map: &ElementMap, what: &str) -> Result<ValueMorphism> {
    let pairs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    if pairs.len() != source.len() {
        return Err(Error::InvalidMorphism(format!("{what}: {} of {} elements mapped", pairs.len(), source.len())));
    }
    ValueMorphism::from_labels(source.clone(), target.clone(), &pairs)
}

fn map_to_doc(m: &ValueMorphism) -> ElementMap {
    m.label_pairs().into_iter().collect()
}

// presheaves

fn sections_and_restrictions(
    space: &Arc<FiniteSpace>,
    category: Category,
    members: &[OpenId],
    sections: &BTreeMap<String, ObjectDoc>,
    restrictions: &[RestrictionDoc],
) -> Result<(Vec<(OpenId, Arc<ValueObject>)>, Vec<((OpenId, OpenId), ValueMorphism)>)> {
    let mut objects: BTreeMap<OpenId, Arc<ValueObject>> = BTreeMap::new();
    for (key, obj) in sections {
        let u = space.open_by_key(key)?;
        if !members.contains(&u) {
            return Err(Error::CrossReference(format!("sections given over {key}, which is not indexed")));
        }
        if objects.insert(u, Arc::new(object_from_doc(obj, category)?)).is_some() {
            return Err(Error::Parse(format!("two section objects for {key}")));
        }
    }
    let empty = space.empty_open();
    if members.contains(&empty) {
        objects.entry(empty).or_insert_with(|| Arc::new(ValueObject::terminal(category)));
    }
    let mut maps = Vec::new();
    for r in restrictions {
        let (u, v) = (space.open_by_key(&r.small)?, space.open_by_key(&r.big)?);
        let (src, tgt) = match (objects.get(&v), objects.get(&u)) {
            (Some(s), Some(t)) => (s, t),
            _ => return Err(Error::CrossReference(format!("restriction {} ⊆ {} between unknown opens", r.small, r.big))),
        };
        maps.push(((u, v), map_from_doc(src, tgt, &r.map, &format!("restriction {} ⊆ {}", r.small, r.big))?));
    }
    Ok((objects.into_iter().collect(), maps))
}

/// Builds a presheaf; `expected` is the space it must live on when the
/// document names none or when it is fixed by the context.
pub fn presheaf_from_doc(doc: &PresheafDoc, base: &Path, expected: Option<&Arc<FiniteSpace>>) -> Result<Presheaf> {
    check_schema(&doc.schema, PRESHEAF_SCHEMA)?;
    let space = match (&doc.space, expected) {
        (Some(r), Some(e)) => {
            let s = space_ref(r, base)?;
            if *s != **e {
                return Err(Error::CrossReference("presheaf lives on a different space".into()));
            }
            e.clone()
        }
        (Some(r), None) => space_ref(r, base)?,
        (None, Some(e)) => e.clone(),
        (None, None) => return Err(Error::CrossReference("presheaf names no space".into())),
    };
    let members: Vec<OpenId> = (0..space.open_count()).collect();
    let (objects, maps) = sections_and_restrictions(&space, doc.category, &members, &doc.sections, &doc.restrictions)?;
    if objects.len() != members.len() {
        let missing = members.iter().find(|u| !objects.iter().any(|(v, _)| v == *u)).expect("some open");
        return Err(Error::CrossReference(format!("no section object for {}", space.open_key(*missing))));
    }
    Presheaf::new(space, doc.category, objects.into_iter().map(|(_, o)| o).collect(), maps)
}

/// Pairs `(small, big)` with nothing strictly between them among `members`.
fn covering_pairs(space: &FiniteSpace, members: &[OpenId]) -> Vec<(OpenId, OpenId)> {
    let mut out = Vec::new();
    for &v in members {
        for &u in members {
            if u == v || !space.is_subset(u, v) {
                continue;
            }
            let between = members.iter().any(|&w| w != u && w != v && space.is_subset(u, w) && space.is_subset(w, v));
            if !between {
                out.push((u, v));
            }
        }
    }
    out
}

fn restriction_docs(space: &FiniteSpace, pairs: Vec<(OpenId, OpenId)>, res: impl Fn(OpenId, OpenId) -> ValueMorphism) -> Vec<RestrictionDoc> {
    let mut docs: Vec<RestrictionDoc> = pairs
        .into_iter()
        .map(|(u, v)| RestrictionDoc { small: space.open_key(u), big: space.open_key(v), map: map_to_doc(&res(u, v)) })
        .collect();
    docs.sort_by(|a, b| (&a.small, &a.big).cmp(&(&b.small, &b.big)));
    docs
}

/// Canonical form with the space inline and restrictions along covering pairs only.
pub fn presheaf_to_doc(p: &Presheaf, inline_space: bool) -> PresheafDoc {
    let space = p.space();
    let members: Vec<OpenId> = (0..space.open_count()).collect();
    PresheafDoc {
        schema: PRESHEAF_SCHEMA.into(),
        space: inline_space.then(|| Ref::Inline(Box::new(space_to_doc(space)))),
        category: p.category(),
        sections: members.iter().map(|&u| (space.open_key(u), object_to_doc(p.sections(u)))).collect(),
        restrictions: restriction_docs(space, covering_pairs(space, &members), |u, v| p.res(u, v).clone()),
    }
}

pub fn read_presheaf(path: &Path) -> Result<Arc<Presheaf>> {
    let doc: PresheafDoc = read_doc(path)?;
    Ok(Arc::new(presheaf_from_doc(&doc, &base_of(path), None)?))
}

fn presheaf_ref(r: &Ref<PresheafDoc>, base: &Path, expected: Option<&Arc<FiniteSpace>>) -> Result<Arc<Presheaf>> {
    let (doc, dir) = resolve(r, base)?;
    Ok(Arc::new(presheaf_from_doc(&doc, &dir, expected)?))
}

// basis presheaves

pub fn basis_presheaf_from_doc(doc: &BasisPresheafDoc, base: &Path) -> Result<BasisPresheaf> {
    check_schema(&doc.schema, BASIS_PRESHEAF_SCHEMA)?;
    let space = space_ref(&doc.space, base)?;
    let basis = Basis::from_keys(space.clone(), &doc.basis)?;
    let (objects, maps) = sections_and_restrictions(&space, doc.category, basis.members(), &doc.sections, &doc.restrictions)?;
    BasisPresheaf::new(basis, doc.category, objects, maps)
}

pub fn read_basis_presheaf(path: &Path) -> Result<BasisPresheaf> {
    basis_presheaf_from_doc(&read_doc(path)?, &base_of(path))
}

// morphisms

pub fn components_from_doc(source: &Arc<Presheaf>, target: &Arc<Presheaf>, doc: &ComponentsDoc) -> Result<PresheafMorphism> {
    let space = source.space();
    let mut comps: Vec<Option<ValueMorphism>> = vec![None; space.open_count()];
    for (key, map) in doc {
        let u = space.open_by_key(key)?;
        comps[u] = Some(map_from_doc(source.sections(u), target.sections(u), map, &format!("component over {key}"))?);
    }
    let comps = comps
        .into_iter()
        .enumerate()
        .map(|(u, c)| match c {
            Some(c) => Ok(c),
            None => ValueMorphism::to_terminal(source.sections(u).clone(), target.sections(u).clone())
                .map_err(|_| Error::CrossReference(format!("no component over {}", space.open_key(u)))),
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMorphism::new(source.clone(), target.clone(), comps)
}

pub fn components_to_doc(m: &PresheafMorphism) -> ComponentsDoc {
    let space = m.source().space();
    (0..space.open_count()).map(|u| (space.open_key(u), map_to_doc(m.component(u)))).collect()
}

pub fn morphism_to_doc(m: &PresheafMorphism) -> MorphismDoc {
    MorphismDoc { schema: MORPHISM_SCHEMA.into(), components: components_to_doc(m) }
}

pub fn read_morphism(path: &Path, source: &Arc<Presheaf>, target: &Arc<Presheaf>) -> Result<PresheafMorphism> {
    let doc: MorphismDoc = read_doc(path)?;
    check_schema(&doc.schema, MORPHISM_SCHEMA)?;
    components_from_doc(source, target, &doc.components)
}

// continuous maps

pub fn map_from_doc_file(doc: &MapDoc, base: &Path) -> Result<ContinuousMap> {
    check_schema(&doc.schema, MAP_SCHEMA)?;
    let source = space_ref(&doc.source, base)?;
    let target = space_ref(&doc.target, base)?;
    let pairs: Vec<(&str, &str)> = doc.assignment.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    ContinuousMap::new(source, target, &pairs)
}

pub fn map_to_doc_file(map: &ContinuousMap) -> MapDoc {
    let (s, t) = (map.source(), map.target());
    MapDoc {
        schema: MAP_SCHEMA.into(),
        source: Ref::Inline(Box::new(space_to_doc(s))),
        target: Ref::Inline(Box::new(space_to_doc(t))),
        assignment: (0..s.len()).map(|x| (s.label(x).to_owned(), t.label(map.apply(x)).to_owned())).collect(),
    }
}

pub fn read_map(path: &Path) -> Result<ContinuousMap> {
    map_from_doc_file(&read_doc(path)?, &base_of(path))
}

// gluing data

pub fn gluing_from_doc(doc: &GluingDoc, base: &Path) -> Result<GluingDatum> {
    check_schema(&doc.schema, GLUING_SCHEMA)?;
    let space = space_ref(&doc.space, base)?;
    let mut parts = Vec::new();
    let mut part_spaces = BTreeMap::new();
    for p in &doc.parts {
        let u = space.require_open(space.point_set(&p.open)?)?;
        let sub = Arc::new(space.subspace(space.open(u)));
        let f = presheaf_ref(&p.presheaf, base, Some(&sub))?;
        part_spaces.insert(p.label.clone(), (u, f.clone()));
        parts.push((p.label.clone(), u, f));
    }
    let mut cocycle = Vec::new();
    for c in &doc.cocycle {
        let [l, m] = &c.pair;
        let lookup = |k: &String| {
            part_spaces.get(k).cloned().ok_or_else(|| Error::CrossReference(format!("cocycle names unknown part `{k}`")))
        };
        let ((ul, fl), (um, fm)) = (lookup(l)?, lookup(m)?);
        let overlap = space.open(ul).intersection(space.open(um));
        let restrict = |f: &Arc<Presheaf>| -> Result<Arc<Presheaf>> {
            let local = f.space().require_open(space.translate(overlap, f.space())?)?;
            Ok(Arc::new(f.restrict_to_open(local)?))
        };
        let theta = components_from_doc(&restrict(&fm)?, &restrict(&fl)?, &c.components)?;
        cocycle.push((l.clone(), m.clone(), theta));
    }
    GluingDatum::new(space, parts, cocycle)
}

pub fn read_gluing(path: &Path) -> Result<GluingDatum> {
    gluing_from_doc(&read_doc(path)?, &base_of(path))
}

/// Canonical form with every part inline and only the given cocycle entries.
pub fn gluing_to_doc(d: &GluingDatum) -> GluingDoc {
    let space = d.space();
    let derived = d.derived();
    let mut cocycle = Vec::new();
    for l in 0..d.len() {
        for m in 0..d.len() {
            if !derived.contains(&(l, m)) {
                cocycle.push(CocycleDoc {
                    pair: [d.labels()[l].clone(), d.labels()[m].clone()],
                    components: components_to_doc(d.theta(l, m)),
                });
            }
        }
    }
    GluingDoc {
        schema: GLUING_SCHEMA.into(),
        space: Ref::Inline(Box::new(space_to_doc(space))),
        parts: (0..d.len())
            .map(|l| GluingPartDoc {
                label: d.labels()[l].clone(),
                open: sorted_labels(space, space.open(d.covering()[l])),
                presheaf: Ref::Inline(Box::new(presheaf_to_doc(d.part(l), false))),
            })
            .collect(),
        cocycle,
    }
}

// diagrams of sheaves

pub fn diagram_from_doc(doc: &DiagramDoc, base: &Path) -> Result<SheafDiagram> {
    check_schema(&doc.schema, DIAGRAM_SCHEMA)?;
    let space = space_ref(&doc.space, base)?;
    let labels: Vec<String> = doc.nodes.iter().map(|n| n.label.clone()).collect();
    let index = |l: &String| {
        labels.iter().position(|x| x == l).ok_or_else(|| Error::CrossReference(format!("unknown node `{l}`")))
    };
    let sheaves = doc
        .nodes
        .iter()
        .map(|n| presheaf_ref(&n.presheaf, base, Some(&space)))
        .collect::<Result<Vec<_>>>()?;
    let mut relations = Vec::new();
    let mut arrows = Vec::new();
    for a in &doc.arrows {
        let (i, j) = (index(&a.le[0])?, index(&a.le[1])?);
        relations.push((i, j));
        arrows.push(((i, j), components_from_doc(&sheaves[j], &sheaves[i], &a.components)?));
    }
    let poset = Poset::new(labels, &relations)?;
    SheafDiagram::new(poset, sheaves, arrows)
}

pub fn read_diagram(path: &Path) -> Result<SheafDiagram> {
    diagram_from_doc(&read_doc(path)?, &base_of(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn space_round_trip() {
        for s in [fixtures::sierpinski(), fixtures::pc4(), fixtures::disc2()] {
            let doc = space_to_doc(&s);
            let back = space_from_doc(&doc).unwrap();
            assert_eq!(back, s);
            assert_eq!(canonical_json(&space_to_doc(&back)), canonical_json(&doc));
        }
    }

    #[test]
    fn presheaf_round_trip() {
        for p in [fixtures::pc4_locally_constant(2), fixtures::sierpinski_z2_closed(), fixtures::disc2_g2_failure()] {
            let doc = presheaf_to_doc(&p, true);
            let text = canonical_json(&doc);
            let parsed: PresheafDoc = serde_json::from_str(&text).unwrap();
            let back = presheaf_from_doc(&parsed, Path::new("."), None).unwrap();
            assert_eq!(back, p);
            assert_eq!(canonical_json(&presheaf_to_doc(&back, true)), text);
        }
    }

    #[test]
    fn gluing_round_trip() {
        let d = fixtures::pc4_gluing(true);
        let text = canonical_json(&gluing_to_doc(&d));
        let back = gluing_from_doc(&serde_json::from_str(&text).unwrap(), Path::new(".")).unwrap();
        assert_eq!(canonical_json(&gluing_to_doc(&back)), text);
    }

    #[test]
    fn wrong_schema_is_a_parse_error() {
        let mut doc = space_to_doc(&fixtures::point());
        doc.schema = "other".into();
        assert!(matches!(space_from_doc(&doc), Err(Error::Parse(_))));
    }
}
