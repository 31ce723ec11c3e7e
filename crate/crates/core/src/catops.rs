//! Initial and final lifts, and the limits and colimits built from them.
//!
//! Element naming is fixed so results serialize deterministically: tuples
//! are `(a,b,...)` with `\`, `(`, `)` and `,` backslash-escaped inside
//! components, and coproduct elements are `i.x` where `i` is the summand
//! index.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::saturate::{closure, reflect_with_equality};
use crate::structure::{
    all_edges, transport_edge, transport_edge_set, validate_structure, Carrier, Edge, EdgeSet, ElementMap,
    Morphism, Structure,
};
use crate::theory::{check_variable_condition, is_model, strip_equality, Theory};
use crate::unionfind::MinUnionFind;

/// Renders a tuple of element names as `(a,b,...)`.
pub fn tuple_name<S: AsRef<str>>(parts: &[S]) -> String {
    let mut out = String::from("(");
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        for c in p.as_ref().chars() {
            if matches!(c, '\\' | '(' | ')' | ',') {
                out.push('\\');
            }
            out.push(c);
        }
    }
    out.push(')');
    out
}

/// Inverse of [`tuple_name`]. Returns `None` for strings it cannot produce.
pub fn parse_tuple_name(s: &str) -> Option<Vec<String>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let mut parts = vec![String::new()];
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => parts.last_mut()?.push(chars.next()?),
            ',' => parts.push(String::new()),
            '(' | ')' => return None,
            c => parts.last_mut()?.push(c),
        }
    }
    Some(parts)
}

/// Name of `x` in summand `i` of a coproduct.
pub fn tag(i: usize, x: &str) -> String {
    format!("{i}.{x}")
}

/// Inverse of [`tag`].
pub fn untag(s: &str) -> Option<(usize, &str)> {
    let (i, x) = s.split_once('.')?;
    Some((i.parse().ok()?, x))
}

/// A family of morphisms out of a common domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    apex: Structure,
    legs: Vec<Morphism>,
}

impl Source {
    pub fn new(apex: Structure, legs: Vec<Morphism>) -> Result<Self> {
        if let Some(i) = legs.iter().position(|h| h.dom() != &apex) {
            return Err(Error::ShapeMismatch(format!("leg {i} does not start at the apex")));
        }
        Ok(Source { apex, legs })
    }

    pub fn apex(&self) -> &Structure {
        &self.apex
    }

    pub fn legs(&self) -> &[Morphism] {
        &self.legs
    }
}

/// A family of morphisms into a common codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sink {
    apex: Structure,
    legs: Vec<Morphism>,
}

impl Sink {
    pub fn new(apex: Structure, legs: Vec<Morphism>) -> Result<Self> {
        if let Some(i) = legs.iter().position(|h| h.cod() != &apex) {
            return Err(Error::ShapeMismatch(format!("leg {i} does not end at the apex")));
        }
        Ok(Sink { apex, legs })
    }

    pub fn apex(&self) -> &Structure {
        &self.apex
    }

    pub fn legs(&self) -> &[Morphism] {
        &self.legs
    }
}

fn check_leg_function(map: &ElementMap, dom: &Carrier, cod: &Carrier) -> Result<()> {
    for x in dom {
        let y = map.apply(x)?;
        if !cod.contains(y) {
            return Err(Error::ImageOutsideCodomain {
                element: x.clone(),
                image: y.clone(),
            });
        }
    }
    if let Some(extra) = map.map.keys().find(|k| !dom.contains(*k)) {
        return Err(Error::ExtraneousElement(extra.clone()));
    }
    Ok(())
}

/// The largest structure on `carrier` making every `(h_i, X_i)` a morphism:
/// a tuple is an edge iff every leg maps it to an edge.
pub fn initial_lift(theory: &Theory, carrier: &Carrier, legs: &[(ElementMap, Structure)]) -> Result<Structure> {
    theory.require_no_equality()?;
    for (h, x) in legs {
        validate_structure(&theory.signature, x)?;
        check_leg_function(h, carrier, &x.carrier)?;
    }
    let edges = match legs.split_first() {
        None => all_edges(&theory.signature, carrier),
        Some(((h0, x0), rest)) => crate::structure::preimage_edge_set(h0, &x0.edges)
            .into_iter()
            .filter(|e| {
                rest.iter()
                    .all(|(h, x)| transport_edge(h, e).is_ok_and(|t| x.edges.contains(&t)))
            })
            .collect(),
    };
    Ok(Structure {
        carrier: carrier.clone(),
        edges,
    })
}

/// The smallest model structure on `carrier` making every `(X_i, h_i)` a
/// morphism: the closure of the union of the transported edge sets.
pub fn final_lift(theory: &Theory, carrier: &Carrier, legs: &[(Structure, ElementMap)]) -> Result<Structure> {
    theory.require_no_equality()?;
    let mut union = EdgeSet::new();
    for (x, h) in legs {
        validate_structure(&theory.signature, x)?;
        check_leg_function(h, &x.carrier, carrier)?;
        union.extend(transport_edge_set(h, &x.edges)?);
    }
    Ok(Structure {
        carrier: carrier.clone(),
        edges: closure(theory, carrier, &union)?,
    })
}

/// Edge-level test: the apex holds exactly the tuples every leg maps to an
/// edge.
pub fn is_initial_source(theory: &Theory, src: &Source) -> Result<bool> {
    let legs: Vec<_> = src.legs.iter().map(|h| (h.map().clone(), h.cod().clone())).collect();
    let lifted = initial_lift(theory, &src.apex.carrier, &legs)?;
    Ok(lifted.edges == src.apex.edges)
}

/// Edge-level test: the apex edges are the closure of the union of the
/// transported leg edges.
pub fn is_final_sink(theory: &Theory, snk: &Sink) -> Result<bool> {
    let legs: Vec<_> = snk.legs.iter().map(|h| (h.dom().clone(), h.map().clone())).collect();
    let lifted = final_lift(theory, &snk.apex.carrier, &legs)?;
    Ok(lifted.edges == snk.apex.edges)
}

/// Injective and relation-reflecting.
pub fn is_embedding(theory: &Theory, h: &Morphism) -> Result<bool> {
    theory.require_no_equality()?;
    Ok(h.is_injective() && crate::structure::reflects_relations(&theory.signature, h)?)
}

/// Surjective, with codomain edges the closure of the image edges.
pub fn is_quotient(theory: &Theory, h: &Morphism) -> Result<bool> {
    theory.require_no_equality()?;
    validate_structure(&theory.signature, h.dom())?;
    validate_structure(&theory.signature, h.cod())?;
    if !h.is_surjective() {
        return Ok(false);
    }
    let image = transport_edge_set(h.map(), &h.dom().edges)?;
    Ok(closure(theory, &h.cod().carrier, &image)? == h.cod().edges)
}

/// Bijective embedding; no inverse is searched for.
pub fn is_isomorphism(theory: &Theory, h: &Morphism) -> Result<bool> {
    Ok(h.is_bijective() && h.preserves_edges() && is_embedding(theory, h)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductResult {
    pub object: Structure,
    pub projections: Vec<Morphism>,
}

/// Cartesian product with componentwise edges. The empty product is the
/// one-point structure `()` holding every edge.
pub fn product(theory: &Theory, factors: &[Structure]) -> Result<ProductResult> {
    theory.require_no_equality()?;
    for x in factors {
        validate_structure(&theory.signature, x)?;
    }
    let mut carrier = Carrier::new();
    let mut tuple: Vec<&str> = Vec::with_capacity(factors.len());
    for_each_choice(
        &factors.iter().map(|x| x.carrier.iter().map(String::as_str).collect()).collect::<Vec<Vec<_>>>(),
        &mut tuple,
        &mut |t| {
            carrier.insert(tuple_name(t));
        },
    );
    let mut edges = EdgeSet::new();
    for (symbol, &arity) in &theory.signature.symbols {
        let per_factor: Vec<Vec<&Edge>> = factors.iter().map(|x| x.edges_with_symbol(symbol).collect()).collect();
        let mut chosen: Vec<&Edge> = Vec::with_capacity(factors.len());
        for_each_choice(&per_factor, &mut chosen, &mut |es| {
            let args = (0..arity)
                .map(|k| tuple_name(&es.iter().map(|e| e.args[k].as_str()).collect::<Vec<_>>()))
                .collect();
            edges.insert(Edge {
                symbol: symbol.clone(),
                args,
            });
        });
    }
    let object = Arc::new(Structure { carrier, edges });
    let projections = factors
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let map = ElementMap::new(object.carrier.iter().map(|p| {
                let parts = parse_tuple_name(p).expect("product element");
                (p.clone(), parts[j].clone())
            }));
            Morphism::from_shared(object.clone(), Arc::new(x.clone()), map)
        })
        .collect::<Result<_>>()?;
    Ok(ProductResult {
        object: (*object).clone(),
        projections,
    })
}

/// Calls `f` on every way of picking one item from each list, in
/// lexicographic order.
fn for_each_choice<'a, T: Copy, F: FnMut(&[T])>(lists: &'a [Vec<T>], acc: &mut Vec<T>, f: &mut F) {
    let depth = acc.len();
    if depth == lists.len() {
        f(acc);
        return;
    }
    for &item in &lists[depth] {
        acc.push(item);
        for_each_choice(lists, acc, f);
        acc.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualizerResult {
    pub object: Structure,
    pub inclusion: Morphism,
}

/// The substructure of the domain on which `f` and `g` agree.
pub fn equalizer(theory: &Theory, f: &Morphism, g: &Morphism) -> Result<EqualizerResult> {
    theory.require_no_equality()?;
    require_parallel(f, g)?;
    let carrier: Carrier = f
        .dom()
        .carrier
        .iter()
        .filter(|x| f.map().get(x) == g.map().get(x))
        .cloned()
        .collect();
    let inclusion = ElementMap::identity(&carrier);
    let object = initial_lift(theory, &carrier, &[(inclusion.clone(), f.dom().clone())])?;
    let shared = Arc::new(object.clone());
    Ok(EqualizerResult {
        inclusion: Morphism::from_shared(shared, f.shared_dom().clone(), inclusion)?,
        object,
    })
}

fn require_parallel(f: &Morphism, g: &Morphism) -> Result<()> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::ShapeMismatch("morphisms are not parallel".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackResult {
    pub object: Structure,
    pub proj_left: Morphism,
    pub proj_right: Morphism,
}

/// Pairs `(a,b)` with `f(a) = g(b)`; a tuple of pairs is an edge iff both of
/// its components are.
pub fn pullback(theory: &Theory, f: &Morphism, g: &Morphism) -> Result<PullbackResult> {
    theory.require_no_equality()?;
    if f.cod() != g.cod() {
        return Err(Error::ShapeMismatch("pullback legs have different codomains".into()));
    }
    for x in [f.dom(), g.dom(), f.cod()] {
        validate_structure(&theory.signature, x)?;
    }
    let mut carrier = Carrier::new();
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (b, gb) in &g.map().map {
        for a in f.map().fibers().get(gb.as_str()).into_iter().flatten() {
            let p = tuple_name(&[*a, b.as_str()]);
            left.insert(p.clone(), a.to_string());
            right.insert(p.clone(), b.clone());
            carrier.insert(p);
        }
    }
    let mut by_image: BTreeMap<Edge, Vec<&Edge>> = BTreeMap::new();
    for e in &g.dom().edges {
        by_image.entry(transport_edge(g.map(), e)?).or_default().push(e);
    }
    let mut edges = EdgeSet::new();
    for ea in &f.dom().edges {
        let Some(matches) = by_image.get(&transport_edge(f.map(), ea)?) else {
            continue;
        };
        for eb in matches {
            edges.insert(Edge {
                symbol: ea.symbol.clone(),
                args: ea
                    .args
                    .iter()
                    .zip(&eb.args)
                    .map(|(a, b)| tuple_name(&[a, b]))
                    .collect(),
            });
        }
    }
    let object = Arc::new(Structure { carrier, edges });
    Ok(PullbackResult {
        proj_left: Morphism::from_shared(object.clone(), f.shared_dom().clone(), ElementMap { map: left })?,
        proj_right: Morphism::from_shared(object.clone(), g.shared_dom().clone(), ElementMap { map: right })?,
        object: (*object).clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoproductResult {
    pub object: Structure,
    pub insertions: Vec<Morphism>,
}

/// Tagged disjoint union with the plain union of the inserted edges and no
/// further checks.
pub fn disjoint_union(family: &[Structure]) -> Result<CoproductResult> {
    let mut carrier = Carrier::new();
    let mut edges = EdgeSet::new();
    let maps: Vec<ElementMap> = family
        .iter()
        .enumerate()
        .map(|(i, x)| ElementMap::new(x.carrier.iter().map(|a| (a.clone(), tag(i, a)))))
        .collect();
    for (x, s) in family.iter().zip(&maps) {
        carrier.extend(s.map.values().cloned());
        edges.extend(transport_edge_set(s, &x.edges)?);
    }
    let object = Arc::new(Structure { carrier, edges });
    let insertions = family
        .iter()
        .zip(maps)
        .map(|(x, s)| Morphism::from_shared(Arc::new(x.clone()), object.clone(), s))
        .collect::<Result<_>>()?;
    Ok(CoproductResult {
        object: (*object).clone(),
        insertions,
    })
}

/// Coproduct of models. The union of the inserted edge sets is checked to
/// be closed rather than closed again, and with equality the result is
/// checked to be a model of the full theory.
pub fn coproduct(theory: &Theory, family: &[Structure]) -> Result<CoproductResult> {
    check_variable_condition(theory).map_err(Error::VariableConditionViolated)?;
    for x in family {
        validate_structure(&theory.signature, x)?;
    }
    let result = disjoint_union(family)?;
    let plain = strip_equality(theory);
    if !crate::saturate::is_t_relation(&plain, &result.object.carrier, &result.object.edges)? {
        return Err(Error::NotAModel(
            "union of the inserted edges is not closed under the theory".into(),
        ));
    }
    if theory.uses_equality() && !is_model(theory, &result.object) {
        return Err(Error::NotAModel("coproduct fails an equality axiom".into()));
    }
    Ok(result)
}

/// The quotient of `cod(f)` by the equivalence generated by `f(x) ~ g(x)`,
/// carrying the final structure and then reflected when the theory has
/// equality. Classes are named by their least element.
pub fn coequalizer(theory: &Theory, f: &Morphism, g: &Morphism) -> Result<Morphism> {
    require_parallel(f, g)?;
    let y = f.cod();
    validate_structure(&theory.signature, y)?;
    let names: Vec<&String> = y.carrier.iter().collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut uf = MinUnionFind::new(names.len());
    for x in &f.dom().carrier {
        uf.union(index[f.apply(x)?.as_str()], index[g.apply(x)?.as_str()]);
    }
    let q = ElementMap::new(names.iter().enumerate().map(|(i, n)| ((*n).clone(), names[uf.find(i)].clone())));
    let plain = strip_equality(theory);
    let lifted = final_lift(&plain, &q.image(), &[(y.clone(), q.clone())])?;
    let first = Morphism::from_shared(f.shared_cod().clone(), Arc::new(lifted.clone()), q)?;
    if !theory.uses_equality() {
        return Ok(first);
    }
    let reflected = reflect_with_equality(theory, &lifted)?;
    first.then(&reflected.quotient)
}
