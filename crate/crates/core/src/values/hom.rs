use std::sync::Arc;

use super::{Category, ValueMorphism, ValueObject};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_HOMS: usize = 1_000_000;

/// All maps, or all homomorphisms for groups, in lexicographic order of their
/// image tuples.
pub fn enumerate_morphisms(
    source: &Arc<ValueObject>,
    target: &Arc<ValueObject>,
    cap: usize,
) -> Result<Vec<ValueMorphism>> {
    if source.category() != target.category() {
        return Err(Error::MixedCategories { expected: source.category(), found: target.category() });
    }
    let (s, t) = (source.len(), target.len());
    match source.category() {
        Category::FinSet => {
            let total = (t as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
            if total > cap as u128 {
                return Err(Error::CapExceeded { what: "morphisms", cap });
            }
            let mut out = Vec::with_capacity(total as usize);
            let mut map = vec![0; s];
            if s > 0 && t == 0 {
                return Ok(out);
            }
            loop {
                out.push(ValueMorphism::new_unchecked(source.clone(), target.clone(), map.clone()));
                // odometer, last position fastest
                let mut k = s;
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    map[k] += 1;
                    if map[k] < t {
                        break;
                    }
                    map[k] = 0;
                }
            }
        }
        Category::FinAb => {
            let mut out = Vec::new();
            let mut map = vec![usize::MAX; s];
            hom_search(source, target, 0, &mut map, &mut out, cap)?;
            Ok(out)
        }
    }
}

fn hom_search(
    src: &Arc<ValueObject>,
    tgt: &Arc<ValueObject>,
    k: usize,
    map: &mut Vec<usize>,
    out: &mut Vec<ValueMorphism>,
    cap: usize,
) -> Result<()> {
    if k == src.len() {
        if out.len() == cap {
            return Err(Error::CapExceeded { what: "morphisms", cap });
        }
        out.push(ValueMorphism::new_unchecked(src.clone(), tgt.clone(), map.clone()));
        return Ok(());
    }
    for v in 0..tgt.len() {
        if k == src.zero() && v != tgt.zero() {
            continue;
        }
        map[k] = v;
        // every sum whose operands and result are already assigned must match
        let consistent = (0..=k).all(|a| {
            (0..=k).all(|b| {
                let c = src.add(a, b);
                c > k || map[c] == tgt.add(map[a], map[b])
            })
        });
        if consistent {
            hom_search(src, tgt, k + 1, map, out, cap)?;
        }
    }
    map[k] = usize::MAX;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> Arc<ValueObject> {
        Arc::new(ValueObject::set(xs.iter().copied()).unwrap())
    }

    #[test]
    fn finset_counts() {
        assert_eq!(enumerate_morphisms(&set(&["a", "b"]), &set(&["c"]), 100).unwrap().len(), 1);
        assert_eq!(enumerate_morphisms(&set(&["a"]), &set(&["c", "d"]), 100).unwrap().len(), 2);
        assert_eq!(enumerate_morphisms(&set(&[]), &set(&[]), 100).unwrap().len(), 1);
        assert_eq!(enumerate_morphisms(&set(&["a"]), &set(&[]), 100).unwrap().len(), 0);
    }

    #[test]
    fn z2_endomorphisms() {
        let z2 = Arc::new(ValueObject::cyclic(2));
        let homs = enumerate_morphisms(&z2, &z2, 100).unwrap();
        assert_eq!(homs.iter().map(|h| h.map().to_vec()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn cap_is_enforced() {
        let s = set(&["a", "b", "c"]);
        assert!(matches!(enumerate_morphisms(&s, &s, 26), Err(Error::CapExceeded { .. })));
    }
}
