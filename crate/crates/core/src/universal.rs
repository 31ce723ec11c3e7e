//! Bounded versions of the definitional universal properties.
//!
//! Each check quantifies over a supplied list of test objects (usually
//! [`test_models`] up to a small carrier size) instead of the whole category,
//! and compares hom-sets by enumeration.

use std::collections::BTreeSet;

use crate::catops::{CoproductResult, EqualizerResult, ProductResult, PullbackResult, Sink, Source};
use crate::error::{Error, Result};
use crate::hom::{functions, hom_maps, preserves};
use crate::par::Parallelism;
use crate::saturate::ReflectionResult;
use crate::structure::{all_edges, Carrier, Edge, ElementMap, Morphism, Structure};
use crate::theory::{is_model, Theory};

/// Largest number of candidate edges [`test_models`] will take subsets of.
pub const MAX_CANDIDATE_EDGES: usize = 20;

/// Every model of `theory` on the carriers `{}`, `{"0"}`, ..., up to `bound`
/// elements. Labelled, so isomorphic copies all appear.
pub fn test_models(theory: &Theory, bound: usize) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    for n in 0..=bound {
        let carrier: Carrier = (0..n).map(|i| i.to_string()).collect();
        let candidates: Vec<Edge> = all_edges(&theory.signature, &carrier).into_iter().collect();
        if candidates.len() > MAX_CANDIDATE_EDGES {
            return Err(Error::TooLarge(format!(
                "{} candidate edges on {n} elements",
                candidates.len()
            )));
        }
        for mask in 0u32..(1 << candidates.len()) {
            let x = Structure {
                carrier: carrier.clone(),
                edges: candidates
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| e.clone())
                    .collect(),
            };
            if is_model(theory, &x) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

fn compose(first: &ElementMap, second: &ElementMap) -> Option<ElementMap> {
    first.then(second).ok()
}

/// For every test object `Y` and function `k: |Y| → |X|`, `k` is a morphism
/// iff every `h_i ∘ k` is.
pub fn initial_by_definition(src: &Source, tests: &[Structure]) -> Result<bool> {
    for y in tests {
        for k in functions(&y.carrier, &src.apex().carrier)? {
            let direct = preserves(&k, y, src.apex());
            let through = src
                .legs()
                .iter()
                .all(|h| compose(&k, h.map()).is_some_and(|hk| preserves(&hk, y, h.cod())));
            if direct != through {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For every test object `Z` and function `k: |X| → |Z|`, `k` is a morphism
/// iff every `k ∘ h_i` is.
pub fn final_by_definition(snk: &Sink, tests: &[Structure]) -> Result<bool> {
    for z in tests {
        for k in functions(&snk.apex().carrier, &z.carrier)? {
            let direct = preserves(&k, snk.apex(), z);
            let through = snk
                .legs()
                .iter()
                .all(|h| compose(h.map(), &k).is_some_and(|kh| preserves(&kh, h.dom(), z)));
            if direct != through {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn homs(a: &Structure, x: &Structure) -> Result<Vec<ElementMap>> {
    hom_maps(a, x, Parallelism::Sequential)
}

/// Precomposition with `r` is a bijection `hom(M, Z) → hom(X, Z)` for every
/// test model `Z`.
pub fn reflection_by_definition(r: &ReflectionResult, tests: &[Structure]) -> Result<bool> {
    let q = &r.quotient;
    for z in tests {
        let induced: BTreeSet<ElementMap> = homs(&r.model, z)?
            .iter()
            .filter_map(|m| compose(q.map(), m))
            .collect();
        let direct: BTreeSet<ElementMap> = homs(q.dom(), z)?.into_iter().collect();
        let count = homs(&r.model, z)?.len();
        if induced != direct || induced.len() != count {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `m ↦ (leg_i ∘ m)_i` maps `hom(Y, apex)` bijectively onto the
/// cones in `cones`.
fn cone_bijection(
    apex: &Structure,
    legs: &[&Morphism],
    y: &Structure,
    cones: BTreeSet<Vec<ElementMap>>,
) -> Result<bool> {
    let mediating = homs(y, apex)?;
    let images: BTreeSet<Vec<ElementMap>> = mediating
        .iter()
        .map(|m| legs.iter().map(|h| compose(m, h.map())).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .unwrap_or_default();
    Ok(images.len() == mediating.len() && images == cones)
}

/// Cartesian power of per-factor choices.
fn all_tuples(lists: &[Vec<ElementMap>]) -> BTreeSet<Vec<ElementMap>> {
    let mut acc: Vec<Vec<ElementMap>> = vec![Vec::new()];
    for list in lists {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |h| {
                    let mut t = prefix.clone();
                    t.push(h.clone());
                    t
                })
            })
            .collect();
    }
    acc.into_iter().collect()
}

pub fn product_by_definition(p: &ProductResult, factors: &[Structure], tests: &[Structure]) -> Result<bool> {
    let legs: Vec<&Morphism> = p.projections.iter().collect();
    for y in tests {
        let per: Vec<Vec<ElementMap>> = factors.iter().map(|x| homs(y, x)).collect::<Result<_>>()?;
        if !cone_bijection(&p.object, &legs, y, all_tuples(&per))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn equalizer_by_definition(e: &EqualizerResult, f: &Morphism, g: &Morphism, tests: &[Structure]) -> Result<bool> {
    for y in tests {
        let cones = homs(y, f.dom())?
            .into_iter()
            .filter(|u| compose(u, f.map()) == compose(u, g.map()))
            .map(|u| vec![u])
            .collect();
        if !cone_bijection(&e.object, &[&e.inclusion], y, cones)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn pullback_by_definition(p: &PullbackResult, f: &Morphism, g: &Morphism, tests: &[Structure]) -> Result<bool> {
    for y in tests {
        let us = homs(y, f.dom())?;
        let vs = homs(y, g.dom())?;
        let mut cones = BTreeSet::new();
        for u in &us {
            for v in &vs {
                if compose(u, f.map()) == compose(v, g.map()) {
                    cones.insert(vec![u.clone(), v.clone()]);
                }
            }
        }
        if !cone_bijection(&p.object, &[&p.proj_left, &p.proj_right], y, cones)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `m ↦ (m ∘ leg_i)_i` maps `hom(apex, Z)` bijectively onto
/// `cocones`.
fn cocone_bijection(
    apex: &Structure,
    legs: &[&Morphism],
    z: &Structure,
    cocones: BTreeSet<Vec<ElementMap>>,
) -> Result<bool> {
    let mediating = homs(apex, z)?;
    let images: BTreeSet<Vec<ElementMap>> = mediating
        .iter()
        .map(|m| legs.iter().map(|h| compose(h.map(), m)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .unwrap_or_default();
    Ok(images.len() == mediating.len() && images == cocones)
}

pub fn coproduct_by_definition(c: &CoproductResult, family: &[Structure], tests: &[Structure]) -> Result<bool> {
    let legs: Vec<&Morphism> = c.insertions.iter().collect();
    for z in tests {
        let per: Vec<Vec<ElementMap>> = family.iter().map(|x| homs(x, z)).collect::<Result<_>>()?;
        if !cocone_bijection(&c.object, &legs, z, all_tuples(&per))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn coequalizer_by_definition(q: &Morphism, f: &Morphism, g: &Morphism, tests: &[Structure]) -> Result<bool> {
    for z in tests {
        let cocones = homs(f.cod(), z)?
            .into_iter()
            .filter(|k| compose(f.map(), k) == compose(g.map(), k))
            .map(|k| vec![k])
            .collect();
        if !cocone_bijection(q.cod(), &[q], z, cocones)? {
            return Ok(false);
        }
    }
    Ok(true)
}
