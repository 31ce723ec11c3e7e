//! Relational signatures, edges, finite structures and the morphisms between
//! them.
//!
//! A structure is a finite carrier together with a set of edges `R(x1,…,xn)`
//! over it. Everything here is a plain value: validation against a
//! [`Signature`] is an explicit step so that malformed input can be loaded and
//! then rejected with an error that names the offending edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theory::EQUALITY;

pub type ElementId = String;
pub type SymbolId = String;
pub type Carrier = BTreeSet<ElementId>;
pub type EdgeSet = BTreeSet<Edge>;

/// A finite set of relation symbols with positive arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub symbols: BTreeMap<SymbolId, usize>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<SymbolId>,
    {
        let sig = Signature {
            symbols: symbols.into_iter().map(|(s, n)| (s.into(), n)).collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (symbol, &arity) in &self.symbols {
            if symbol == EQUALITY {
                return Err(Error::ReservedSymbol);
            }
            if arity == 0 {
                return Err(Error::ZeroArity(symbol.clone()));
            }
        }
        Ok(())
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.symbols.get(symbol).copied()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of distinct edges over a carrier of the given size.
    pub fn edge_count_over(&self, carrier_size: usize) -> Option<usize> {
        self.symbols.values().try_fold(0usize, |acc, &n| {
            let count = carrier_size.checked_pow(u32::try_from(n).ok()?)?;
            acc.checked_add(count)
        })
    }
}

/// A relation symbol applied to a tuple of elements (or of variables, when
/// the edge occurs inside a formula).
///
/// Serialized as `["le", ["a", "b"]]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(SymbolId, Vec<ElementId>)", into = "(SymbolId, Vec<ElementId>)")]
pub struct Edge {
    pub symbol: SymbolId,
    pub args: Vec<ElementId>,
}

impl Edge {
    pub fn new<S, I, A>(symbol: S, args: I) -> Self
    where
        S: Into<SymbolId>,
        I: IntoIterator<Item = A>,
        A: Into<ElementId>,
    {
        Edge {
            symbol: symbol.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl From<(SymbolId, Vec<ElementId>)> for Edge {
    fn from((symbol, args): (SymbolId, Vec<ElementId>)) -> Self {
        Edge { symbol, args }
    }
}

impl From<Edge> for (SymbolId, Vec<ElementId>) {
    fn from(e: Edge) -> Self {
        (e.symbol, e.args)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol, self.args.join(","))
    }
}

/// A finite Π-structure: a carrier and a set of edges over it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Structure {
    pub carrier: Carrier,
    pub edges: EdgeSet,
}

impl Structure {
    pub fn new<C, A, E>(carrier: C, edges: E) -> Self
    where
        C: IntoIterator<Item = A>,
        A: Into<ElementId>,
        E: IntoIterator<Item = Edge>,
    {
        Structure {
            carrier: carrier.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Structure::default()
    }

    /// A carrier with no edges.
    pub fn discrete<C, A>(carrier: C) -> Self
    where
        C: IntoIterator<Item = A>,
        A: Into<ElementId>,
    {
        Structure::new(carrier, [])
    }

    /// The structure holding every edge over `carrier`.
    pub fn full(sig: &Signature, carrier: Carrier) -> Self {
        let edges = all_edges(sig, &carrier);
        Structure { carrier, edges }
    }

    pub fn holds(&self, edge: &Edge) -> bool {
        self.edges.contains(edge)
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn edges_with_symbol<'a>(&'a self, symbol: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.symbol == symbol)
    }
}

/// Checks every structure invariant against `sig`.
pub fn validate_structure(sig: &Signature, x: &Structure) -> Result<()> {
    validate_edges(sig, &x.carrier, &x.edges)
}

pub fn validate_edges<'a, I>(sig: &Signature, carrier: &Carrier, edges: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Edge>,
{
    for edge in edges {
        let arity = sig
            .arity(&edge.symbol)
            .ok_or_else(|| Error::UnknownSymbol(edge.clone()))?;
        if arity != edge.args.len() {
            return Err(Error::ArityMismatch {
                edge: edge.clone(),
                expected: arity,
                found: edge.args.len(),
            });
        }
        if let Some(element) = edge.args.iter().find(|a| !carrier.contains(*a)) {
            return Err(Error::ForeignElement {
                edge: edge.clone(),
                element: element.clone(),
            });
        }
    }
    Ok(())
}

/// Every edge over `carrier`, in lexicographic order.
pub fn all_edges(sig: &Signature, carrier: &Carrier) -> EdgeSet {
    let elems: Vec<&ElementId> = carrier.iter().collect();
    let mut out = EdgeSet::new();
    for (symbol, &arity) in &sig.symbols {
        for_each_tuple(elems.len(), arity, |idx| {
            out.insert(Edge {
                symbol: symbol.clone(),
                args: idx.iter().map(|&i| elems[i].clone()).collect(),
            });
        });
    }
    out
}

/// Calls `f` with every index tuple in `0..base` of length `len`, in
/// lexicographic order.
pub(crate) fn for_each_tuple<F: FnMut(&[usize])>(base: usize, len: usize, mut f: F) {
    if len > 0 && base == 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < base {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// A function between finite sets, stored as a lookup table.
///
/// Serialized as `{"map": {"a": "0", ...}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementMap {
    pub map: BTreeMap<ElementId, ElementId>,
}

impl ElementMap {
    pub fn new<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        ElementMap {
            map: pairs
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    pub fn identity(carrier: &Carrier) -> Self {
        ElementMap::new(carrier.iter().map(|x| (x.clone(), x.clone())))
    }

    pub fn get(&self, x: &str) -> Option<&ElementId> {
        self.map.get(x)
    }

    pub fn apply(&self, x: &str) -> Result<&ElementId> {
        self.map
            .get(x)
            .ok_or_else(|| Error::UnmappedElement(x.to_string()))
    }

    pub fn domain(&self) -> Carrier {
        self.map.keys().cloned().collect()
    }

    pub fn image(&self) -> Carrier {
        self.map.values().cloned().collect()
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &ElementMap) -> Result<ElementMap> {
        let mut out = BTreeMap::new();
        for (x, y) in &self.map {
            out.insert(x.clone(), other.apply(y)?.clone());
        }
        Ok(ElementMap { map: out })
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.map.len()
    }

    pub fn is_surjective_onto(&self, carrier: &Carrier) -> bool {
        carrier.iter().all(|y| self.map.values().any(|v| v == y))
    }

    /// Elements of the domain grouped by their image.
    pub fn fibers(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (x, y) in &self.map {
            out.entry(y.as_str()).or_default().push(x.as_str());
        }
        out
    }
}

/// `h · e`: applies `h` to every argument of `e`.
pub fn transport_edge(h: &ElementMap, e: &Edge) -> Result<Edge> {
    let mut args = Vec::with_capacity(e.args.len());
    for a in &e.args {
        let image = h.get(a).ok_or_else(|| Error::ForeignElement {
            edge: e.clone(),
            element: a.clone(),
        })?;
        args.push(image.clone());
    }
    Ok(Edge {
        symbol: e.symbol.clone(),
        args,
    })
}

/// `h · E`: the forward image of an edge set. Duplicates collapse.
pub fn transport_edge_set<'a, I>(h: &ElementMap, edges: I) -> Result<EdgeSet>
where
    I: IntoIterator<Item = &'a Edge>,
{
    edges.into_iter().map(|e| transport_edge(h, e)).collect()
}

/// `h⁻¹[E′]`: every edge `e` over the domain of `h` with `h · e ∈ E′`.
///
/// Computed fiberwise: an edge of `E′` pulls back to the product of the fibers
/// over its arguments.
pub fn preimage_edge_set<'a, I>(h: &ElementMap, target: I) -> EdgeSet
where
    I: IntoIterator<Item = &'a Edge>,
{
    let fibers = h.fibers();
    let mut out = EdgeSet::new();
    for e in target {
        let Some(choices) = e
            .args
            .iter()
            .map(|a| fibers.get(a.as_str()))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let mut idx = vec![0usize; choices.len()];
        'outer: loop {
            out.insert(Edge {
                symbol: e.symbol.clone(),
                args: idx
                    .iter()
                    .zip(&choices)
                    .map(|(&i, c)| c[i].to_string())
                    .collect(),
            });
            for pos in (0..idx.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    out
}

/// A function between the carriers of two structures.
///
/// The map is checked to be total on the domain carrier with values in the
/// codomain carrier. Whether it preserves edges is a separate question, see
/// [`is_pi_morphism`].
///
/// Serialized as `{"dom": Structure, "cod": Structure, "map": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MorphismJson", into = "MorphismJson")]
pub struct Morphism {
    dom: Arc<Structure>,
    cod: Arc<Structure>,
    map: ElementMap,
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    dom: Structure,
    cod: Structure,
    map: BTreeMap<ElementId, ElementId>,
}

impl TryFrom<MorphismJson> for Morphism {
    type Error = Error;

    fn try_from(m: MorphismJson) -> Result<Self> {
        Morphism::new(m.dom, m.cod, ElementMap { map: m.map })
    }
}

impl From<Morphism> for MorphismJson {
    fn from(m: Morphism) -> Self {
        MorphismJson {
            dom: (*m.dom).clone(),
            cod: (*m.cod).clone(),
            map: m.map.map,
        }
    }
}

impl Morphism {
    pub fn new(dom: Structure, cod: Structure, map: ElementMap) -> Result<Self> {
        Morphism::from_shared(Arc::new(dom), Arc::new(cod), map)
    }

    pub fn from_shared(dom: Arc<Structure>, cod: Arc<Structure>, map: ElementMap) -> Result<Self> {
        for x in &dom.carrier {
            let y = map.apply(x)?;
            if !cod.carrier.contains(y) {
                return Err(Error::ImageOutsideCodomain {
                    element: x.clone(),
                    image: y.clone(),
                });
            }
        }
        if let Some(extra) = map.map.keys().find(|k| !dom.carrier.contains(*k)) {
            return Err(Error::ExtraneousElement(extra.clone()));
        }
        Ok(Morphism { dom, cod, map })
    }

    pub fn identity(x: Structure) -> Self {
        let map = ElementMap::identity(&x.carrier);
        let shared = Arc::new(x);
        Morphism {
            dom: shared.clone(),
            cod: shared,
            map,
        }
    }

    pub fn dom(&self) -> &Structure {
        &self.dom
    }

    pub fn cod(&self) -> &Structure {
        &self.cod
    }

    pub fn shared_dom(&self) -> &Arc<Structure> {
        &self.dom
    }

    pub fn shared_cod(&self) -> &Arc<Structure> {
        &self.cod
    }

    pub fn map(&self) -> &ElementMap {
        &self.map
    }

    pub fn apply(&self, x: &str) -> Result<&ElementId> {
        self.map.apply(x)
    }

    /// `other ∘ self`. The codomain of `self` must equal the domain of `other`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if self.cod != other.dom {
            return Err(Error::ShapeMismatch(
                "codomain of the first morphism differs from the domain of the second".into(),
            ));
        }
        Ok(Morphism {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            map: self.map.then(&other.map)?,
        })
    }

    /// True iff `h · E(dom) ⊆ E(cod)`.
    pub fn preserves_edges(&self) -> bool {
        self.dom.edges.iter().all(|e| {
            transport_edge(&self.map, e)
                .map(|t| self.cod.edges.contains(&t))
                .unwrap_or(false)
        })
    }

    pub fn is_injective(&self) -> bool {
        self.map.is_injective()
    }

    pub fn is_surjective(&self) -> bool {
        self.map.is_surjective_onto(&self.cod.carrier)
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// True iff `h` is a Π-morphism, after validating both ends against `sig`.
pub fn is_pi_morphism(sig: &Signature, h: &Morphism) -> Result<bool> {
    validate_structure(sig, h.dom())?;
    validate_structure(sig, h.cod())?;
    Ok(h.preserves_edges())
}

/// True iff `cod ⊨ R h(x⃗)` implies `dom ⊨ R x⃗` for every symbol and tuple.
pub fn reflects_relations(sig: &Signature, h: &Morphism) -> Result<bool> {
    validate_structure(sig, h.dom())?;
    validate_structure(sig, h.cod())?;
    Ok(preimage_edge_set(h.map(), &h.cod().edges).is_subset(&h.dom().edges))
}
