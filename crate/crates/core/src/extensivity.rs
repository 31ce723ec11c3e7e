//! Instance checks for universality and disjointness of coproducts,
//! distributivity, and the representing objects `R_T` with their hom-counts,
//! connectedness and final density.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catops::{
    coproduct, disjoint_union, is_final_sink, is_isomorphism, product, pullback, tag, tuple_name, untag, Sink,
};
use crate::error::{Error, Result};
use crate::hom::{hom_maps, preserves};
use crate::par::{self, Parallelism};
use crate::saturate::{closure, is_t_relation, reflect};
use crate::structure::{
    transport_edge, validate_structure, Carrier, Edge, EdgeSet, ElementMap, Morphism, Structure,
};
use crate::theory::{strip_equality, Theory};

/// A concrete instance on which a check failed. [`Witness::replay`] reruns
/// the check on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Witness {
    /// The union of the inserted edges is not closed; `missing` are edges of
    /// its closure outside the union.
    EdgeFormula { family: Vec<Structure>, missing: Vec<Edge> },
    Universality { family: Vec<Structure>, f: Morphism, reason: String },
    Disjointness { family: Vec<Structure>, left: usize, right: usize },
    Distributivity { x: Structure, family: Vec<Structure> },
}

impl Witness {
    /// True iff the recorded instance still fails its check.
    pub fn replay(&self, theory: &Theory) -> Result<bool> {
        Ok(match self {
            Witness::EdgeFormula { family, .. } => edge_formula_failure(theory, family)?.is_some(),
            Witness::Universality { family, f, .. } => universality_failure(theory, family, f)?.is_some(),
            Witness::Disjointness { family, left, right } => {
                let co = disjoint_union(family)?;
                let plain = strip_equality(theory);
                !pullback(&plain, &co.insertions[*left], &co.insertions[*right])?
                    .object
                    .is_empty()
            }
            Witness::Distributivity { x, family } => !check_distributivity(theory, x, family)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensivityReport {
    pub edge_formula_ok: bool,
    pub universality_ok: bool,
    pub disjointness_ok: bool,
    pub witnesses: Vec<Witness>,
}

impl ExtensivityReport {
    pub fn ok(&self) -> bool {
        self.edge_formula_ok && self.universality_ok && self.disjointness_ok
    }
}

fn edge_formula_failure(theory: &Theory, family: &[Structure]) -> Result<Option<Witness>> {
    for x in family {
        validate_structure(&theory.signature, x)?;
    }
    let union = disjoint_union(family)?.object;
    let plain = strip_equality(theory);
    if is_t_relation(&plain, &union.carrier, &union.edges)? {
        return Ok(None);
    }
    let closed = closure(&plain, &union.carrier, &union.edges)?;
    Ok(Some(Witness::EdgeFormula {
        family: family.to_vec(),
        missing: closed.difference(&union.edges).cloned().collect(),
    }))
}

/// True iff the plain union of the inserted edge sets is already closed
/// under the equality-free part of `theory`.
pub fn check_coproduct_edge_formula(theory: &Theory, family: &[Structure]) -> Result<bool> {
    Ok(edge_formula_failure(theory, family)?.is_none())
}

fn universality_failure(theory: &Theory, family: &[Structure], f: &Morphism) -> Result<Option<Witness>> {
    let co = coproduct(theory, family)?;
    if f.cod() != &co.object {
        return Err(Error::ShapeMismatch("f does not land in the coproduct of the family".into()));
    }
    let fail = |reason: String| {
        Ok(Some(Witness::Universality {
            family: family.to_vec(),
            f: f.clone(),
            reason,
        }))
    };
    if !f.preserves_edges() {
        return fail("f is not a morphism".into());
    }
    let plain = strip_equality(theory);
    let pullbacks = co
        .insertions
        .iter()
        .map(|s| pullback(&plain, f, s))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for (i, p) in pullbacks.iter().enumerate() {
        let t = &p.proj_left;
        if !t.is_injective() {
            return fail(format!("pullback leg {i} is not injective"));
        }
        for y in t.map().image() {
            if !seen.insert(y.clone()) {
                return fail(format!("{y} lies in two pullbacks"));
            }
        }
    }
    if seen != f.dom().carrier {
        return fail("pullbacks do not cover the domain".into());
    }
    let mut union = EdgeSet::new();
    for p in &pullbacks {
        for e in &p.object.edges {
            union.insert(transport_edge(p.proj_left.map(), e)?);
        }
    }
    if union != f.dom().edges {
        return fail("domain edges differ from the union of the pullback edges".into());
    }
    let summands: Vec<Structure> = pullbacks.iter().map(|p| p.object.clone()).collect();
    let sum = disjoint_union(&summands)?;
    let mut map = ElementMap::default();
    for (i, p) in pullbacks.iter().enumerate() {
        for (x, y) in &p.proj_left.map().map {
            map.map.insert(tag(i, x), y.clone());
        }
    }
    let comparison = Morphism::new(sum.object, f.dom().clone(), map)?;
    if !is_isomorphism(&plain, &comparison)? {
        return fail("comparison map from the coproduct of pullbacks is not an isomorphism".into());
    }
    Ok(None)
}

/// Pulls the coproduct back along `f` and checks that the pulled-back
/// insertions again form a coproduct of the domain of `f`.
pub fn check_universality(theory: &Theory, family: &[Structure], f: &Morphism) -> Result<bool> {
    Ok(universality_failure(theory, family, f)?.is_none())
}

fn disjointness_failures(theory: &Theory, family: &[Structure]) -> Result<Vec<Witness>> {
    let co = disjoint_union(family)?;
    let plain = strip_equality(theory);
    let mut out = Vec::new();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !pullback(&plain, &co.insertions[i], &co.insertions[j])?.object.is_empty() {
                out.push(Witness::Disjointness {
                    family: family.to_vec(),
                    left: i,
                    right: j,
                });
            }
        }
    }
    Ok(out)
}

/// True iff the pullback of every two distinct insertions is empty.
pub fn check_disjointness(theory: &Theory, family: &[Structure]) -> Result<bool> {
    for x in family {
        validate_structure(&theory.signature, x)?;
    }
    Ok(disjointness_failures(theory, family)?.is_empty())
}

/// Checks that `i.(x,y) ↦ (x,i.y)` is an isomorphism
/// `∐ᵢ (X × Yᵢ) → X × ∐ᵢ Yᵢ`.
pub fn check_distributivity(theory: &Theory, x: &Structure, family: &[Structure]) -> Result<bool> {
    let plain = strip_equality(theory);
    let products = family
        .iter()
        .map(|y| Ok(product(&plain, &[x.clone(), y.clone()])?.object))
        .collect::<Result<Vec<_>>>()?;
    let left = coproduct(theory, &products)?.object;
    let sum = coproduct(theory, family)?.object;
    let right = product(&plain, &[x.clone(), sum])?.object;
    let mut map = ElementMap::default();
    for element in &left.carrier {
        let (i, pair) = untag(element).ok_or_else(|| Error::Malformed(element.clone()))?;
        let parts = crate::catops::parse_tuple_name(pair).ok_or_else(|| Error::Malformed(pair.to_string()))?;
        map.map
            .insert(element.clone(), tuple_name(&[parts[0].clone(), tag(i, &parts[1])]));
    }
    let canonical = Morphism::new(left, right, map)?;
    is_isomorphism(&plain, &canonical)
}

/// Runs the edge-formula and disjointness checks on `family`, and the
/// universality check for each of `maps` into its coproduct.
pub fn check_extensivity(theory: &Theory, family: &[Structure], maps: &[Morphism]) -> Result<ExtensivityReport> {
    let mut witnesses = Vec::new();
    let edge = edge_formula_failure(theory, family)?;
    let edge_formula_ok = edge.is_none();
    witnesses.extend(edge);
    let disjoint = disjointness_failures(theory, family)?;
    let disjointness_ok = disjoint.is_empty();
    witnesses.extend(disjoint);
    let mut universality_ok = true;
    if edge_formula_ok {
        let results = par::map_slice(Parallelism::default(), maps, |f| universality_failure(theory, family, f));
        for r in results {
            if let Some(w) = r? {
                universality_ok = false;
                witnesses.push(w);
            }
        }
    } else {
        universality_ok = false;
    }
    Ok(ExtensivityReport {
        edge_formula_ok,
        universality_ok,
        disjointness_ok,
        witnesses,
    })
}

/// The free model on one `R`-edge through the points `"1"`, ..., `"n"`.
pub fn representing_object(theory: &Theory, symbol: &str) -> Result<Structure> {
    Ok(representing(theory, symbol)?.0)
}

/// `R_T` together with the image of the generating edge.
fn representing(theory: &Theory, symbol: &str) -> Result<(Structure, Edge)> {
    let arity = theory.signature.arity(symbol).ok_or_else(|| {
        Error::UnknownSymbol(Edge {
            symbol: symbol.to_string(),
            args: Vec::new(),
        })
    })?;
    let names: Vec<String> = (1..=arity).map(|i| i.to_string()).collect();
    let generator = Edge {
        symbol: symbol.to_string(),
        args: names.clone(),
    };
    let raw = Structure::new(names, [generator.clone()]);
    let r = reflect(theory, &raw)?;
    let edge = transport_edge(r.quotient.map(), &generator)?;
    Ok((r.model, edge))
}

/// Every morphism `a → x`.
pub fn hom_set(theory: &Theory, a: &Structure, x: &Structure) -> Result<Vec<Morphism>> {
    validate_structure(&theory.signature, a)?;
    validate_structure(&theory.signature, x)?;
    hom_maps(a, x, Parallelism::default())?
        .into_iter()
        .map(|h| Morphism::new(a.clone(), x.clone(), h))
        .collect()
}

pub fn hom_count(theory: &Theory, a: &Structure, x: &Structure) -> Result<u64> {
    validate_structure(&theory.signature, a)?;
    validate_structure(&theory.signature, x)?;
    Ok(hom_maps(a, x, Parallelism::default())?.len() as u64)
}

/// True iff `hom(a, ∐ family)` is the disjoint union of the
/// `hom(a, family_i)`: the counts agree and every morphism into the
/// coproduct factors through exactly one insertion.
pub fn check_connected(theory: &Theory, a: &Structure, family: &[Structure]) -> Result<bool> {
    let co = coproduct(theory, family)?;
    let mut total = 0;
    for x in family {
        total += hom_count(theory, a, x)?;
    }
    let into_sum = hom_maps(a, &co.object, Parallelism::default())?;
    if into_sum.len() as u64 != total {
        return Ok(false);
    }
    for m in &into_sum {
        let mut factorizations = 0;
        for (i, s) in co.insertions.iter().enumerate() {
            let inverse: ElementMap = ElementMap::new(s.map().map.iter().map(|(x, y)| (y.clone(), x.clone())));
            let Ok(k) = m.then(&inverse) else { continue };
            if preserves(&k, a, &family[i]) {
                factorizations += 1;
            }
        }
        if factorizations != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalDensity {
    /// One leg `R_T → X` per edge of `X`, in edge order.
    pub sink: Sink,
    pub legs_are_morphisms: bool,
    pub is_final: bool,
}

impl FinalDensity {
    pub fn ok(&self) -> bool {
        self.legs_are_morphisms && self.is_final
    }
}

/// Builds the sink of all maps from representing objects that pick out an
/// edge of `x`, and checks that it is final.
pub fn final_density_sink(theory: &Theory, x: &Structure) -> Result<FinalDensity> {
    validate_structure(&theory.signature, x)?;
    let mut reps = std::collections::BTreeMap::new();
    for symbol in theory.signature.symbols.keys() {
        reps.insert(symbol.clone(), representing(theory, symbol)?);
    }
    let mut legs = Vec::with_capacity(x.edges.len());
    let mut legs_are_morphisms = true;
    for e in &x.edges {
        let (rt, generator) = &reps[&e.symbol];
        let mut map = ElementMap::default();
        for (g, target) in generator.args.iter().zip(&e.args) {
            if let Some(old) = map.map.insert(g.clone(), target.clone()) {
                if &old != target {
                    legs_are_morphisms = false;
                }
            }
        }
        if map.map.len() != rt.carrier.len() {
            return Err(Error::Malformed(format!(
                "representing object for {} is not generated by its edge",
                e.symbol
            )));
        }
        let leg = Morphism::new(rt.clone(), x.clone(), map)?;
        legs_are_morphisms &= leg.preserves_edges();
        legs.push(leg);
    }
    let sink = Sink::new(x.clone(), legs)?;
    let is_final = is_final_sink(&strip_equality(theory), &sink)?;
    Ok(FinalDensity {
        sink,
        legs_are_morphisms,
        is_final,
    })
}

/// Carrier `{"1", ..., "n"}`.
pub fn numbered_carrier(n: usize) -> Carrier {
    (1..=n).map(|i| i.to_string()).collect()
}
