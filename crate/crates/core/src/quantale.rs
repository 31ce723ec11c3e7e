//! Finite commutative unital quantales, the Horn theories of V-categories,
//! pseudo-V-metric and V-metric spaces they generate, and the translation
//! between models of those theories and distance matrices.
//!
//! The generated signature has one binary symbol `~v` for each element
//! `v` above the bottom. A `~⊥` relation would hold everywhere and carry no
//! information, and its join axiom (an empty premise set with two free
//! variables) is not expressible here; dropping it keeps both translations
//! exact inverses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{Carrier, Edge, ElementId, Signature, Structure};
use crate::theory::{Formula, Theory, EQUALITY};

pub type QId = String;

/// Subsets of at most this many elements are checked for joins and
/// distributivity exhaustively; larger quantales use binary and empty joins,
/// which is equivalent for finite lattices.
const EXHAUSTIVE_LIMIT: usize = 12;

/// A finite quantale given by explicit tables.
///
/// JSON: `{"elements": [...], "le": [["a","b"], ...], "tensor": {"a,b": "c",
/// ...}, "unit": "k"}`. `le` must list the whole order, reflexive pairs
/// included. A tensor entry for `(a,b)` also serves `(b,a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuantaleJson", into = "QuantaleJson")]
pub struct Quantale {
    elements: BTreeSet<QId>,
    le: BTreeSet<(QId, QId)>,
    tensor: BTreeMap<(QId, QId), QId>,
    unit: QId,
}

#[derive(Serialize, Deserialize)]
struct QuantaleJson {
    elements: Vec<QId>,
    le: Vec<(QId, QId)>,
    tensor: BTreeMap<String, QId>,
    unit: QId,
}

impl TryFrom<QuantaleJson> for Quantale {
    type Error = Error;

    fn try_from(j: QuantaleJson) -> Result<Self> {
        let mut tensor = BTreeMap::new();
        for (key, value) in j.tensor {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| Error::Malformed(format!("tensor key {key:?} is not of the form \"a,b\"")))?;
            tensor.insert((a.to_string(), b.to_string()), value);
        }
        Quantale::new(j.elements, j.le, tensor, j.unit)
    }
}

impl From<Quantale> for QuantaleJson {
    fn from(q: Quantale) -> Self {
        QuantaleJson {
            elements: q.elements.into_iter().collect(),
            le: q.le.into_iter().collect(),
            tensor: q
                .tensor
                .into_iter()
                .map(|((a, b), c)| (format!("{a},{b}"), c))
                .collect(),
            unit: q.unit,
        }
    }
}

/// A failed quantale law and the elements witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawViolation {
    pub law: String,
    pub witness: Vec<QId>,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.law, self.witness.join(","))
    }
}

impl Quantale {
    /// Builds the tables. Only well-formedness is checked here (names, and
    /// references to declared elements); the laws are checked by
    /// [`validate_quantale`].
    pub fn new<E, L, T>(elements: E, le: L, tensor: T, unit: impl Into<QId>) -> Result<Self>
    where
        E: IntoIterator,
        E::Item: Into<QId>,
        L: IntoIterator<Item = (QId, QId)>,
        T: IntoIterator<Item = ((QId, QId), QId)>,
    {
        let mut set = BTreeSet::new();
        for e in elements {
            let e = e.into();
            if e.contains(',') {
                return Err(Error::Malformed(format!("quantale element {e:?} contains a comma")));
            }
            if !set.insert(e.clone()) {
                return Err(Error::Malformed(format!("duplicate quantale element {e:?}")));
            }
        }
        let known = |x: &QId| {
            if set.contains(x) {
                Ok(())
            } else {
                Err(Error::Malformed(format!("unknown quantale element {x:?}")))
            }
        };
        let le: BTreeSet<(QId, QId)> = le.into_iter().collect();
        for (a, b) in &le {
            known(a)?;
            known(b)?;
        }
        let tensor: BTreeMap<(QId, QId), QId> = tensor.into_iter().collect();
        for ((a, b), c) in &tensor {
            known(a)?;
            known(b)?;
            known(c)?;
        }
        let unit = unit.into();
        known(&unit)?;
        Ok(Quantale {
            elements: set,
            le,
            tensor,
            unit,
        })
    }

    /// Builds a quantale from a total order listed bottom first and a tensor
    /// function.
    pub fn chain<F>(elements: &[&str], unit: &str, tensor: F) -> Self
    where
        F: Fn(usize, usize) -> usize,
    {
        let mut le = Vec::new();
        let mut table = Vec::new();
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                if i <= j {
                    le.push((a.to_string(), b.to_string()));
                }
                table.push(((a.to_string(), b.to_string()), elements[tensor(i, j)].to_string()));
            }
        }
        Quantale::new(elements.iter().copied(), le, table, unit).expect("chain tables are well formed")
    }

    pub fn elements(&self) -> impl Iterator<Item = &QId> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unit(&self) -> &QId {
        &self.unit
    }

    pub fn leq(&self, a: &str, b: &str) -> bool {
        self.le.contains(&(a.to_string(), b.to_string()))
    }

    pub fn tensor(&self, a: &str, b: &str) -> Option<&QId> {
        self.tensor
            .get(&(a.to_string(), b.to_string()))
            .or_else(|| self.tensor.get(&(b.to_string(), a.to_string())))
    }

    /// Least upper bound of `xs`, if it exists.
    pub fn join<'a, I: IntoIterator<Item = &'a QId>>(&self, xs: I) -> Option<&QId> {
        let xs: Vec<&QId> = xs.into_iter().collect();
        let uppers: Vec<&QId> = self
            .elements
            .iter()
            .filter(|u| xs.iter().all(|x| self.leq(x, u)))
            .collect();
        uppers
            .iter()
            .find(|u| uppers.iter().all(|w| self.leq(u, w)))
            .copied()
    }

    pub fn bottom(&self) -> Option<&QId> {
        self.join([])
    }

    pub fn top(&self) -> Option<&QId> {
        self.join(self.elements.iter())
    }

    /// Elements strictly above the bottom, in name order.
    pub fn nonbottom(&self) -> Vec<&QId> {
        let bottom = self.bottom();
        self.elements.iter().filter(|v| Some(*v) != bottom).collect()
    }

    fn require_valid(&self) -> Result<&QId> {
        validate_quantale(self).map_err(|vs| Error::InvalidQuantale(vs.iter().map(|v| v.to_string()).collect()))?;
        Ok(self.bottom().expect("a valid quantale has a bottom"))
    }
}

/// Checks the partial order, the existence of all joins, the commutative
/// monoid laws, and distributivity of the tensor over joins (the empty join
/// included). Returns every violation found.
pub fn validate_quantale(q: &Quantale) -> std::result::Result<(), Vec<LawViolation>> {
    let mut out = Vec::new();
    fn fail(out: &mut Vec<LawViolation>, law: &str, witness: &[&QId]) {
        out.push(LawViolation {
            law: law.to_string(),
            witness: witness.iter().map(|s| s.to_string()).collect(),
        })
    }
    let els: Vec<&QId> = q.elements.iter().collect();
    if els.is_empty() {
        fail(&mut out, "nonempty", &[]);
    }
    for &a in &els {
        if !q.leq(a, a) {
            fail(&mut out, "reflexivity", &[a]);
        }
        for &b in &els {
            if a < b && q.leq(a, b) && q.leq(b, a) {
                fail(&mut out, "antisymmetry", &[a, b]);
            }
            for &c in &els {
                if q.leq(a, b) && q.leq(b, c) && !q.leq(a, c) {
                    fail(&mut out, "transitivity", &[a, b, c]);
                }
            }
        }
    }
    let subsets = joinable_subsets(&els);
    for s in &subsets {
        if q.join(s.iter().copied()).is_none() {
            fail(&mut out, "join-exists", s);
        }
    }
    for &a in &els {
        for &b in &els {
            if q.tensor(a, b).is_none() {
                fail(&mut out, "tensor-total", &[a, b]);
            }
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let t = |a: &QId, b: &QId| q.tensor(a, b).expect("checked total");
    for &a in &els {
        if t(a, &q.unit) != a {
            fail(&mut out, "unit", &[a]);
        }
        for &b in &els {
            if a < b && t(a, b) != t(b, a) {
                fail(&mut out, "commutativity", &[a, b]);
            }
            for &c in &els {
                if t(t(a, b), c) != t(a, t(b, c)) {
                    fail(&mut out, "associativity", &[a, b, c]);
                }
            }
        }
    }
    for &a in &els {
        for s in &subsets {
            let lhs = t(a, q.join(s.iter().copied()).expect("checked"));
            let images: Vec<&QId> = s.iter().map(|b| t(a, b)).collect();
            if q.join(images) != Some(lhs) {
                let mut w = vec![a];
                w.extend(s.iter().copied());
                fail(&mut out, "distributivity", &w);
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn joinable_subsets<'a>(els: &[&'a QId]) -> Vec<Vec<&'a QId>> {
    if els.len() <= EXHAUSTIVE_LIMIT {
        (0u32..(1 << els.len()))
            .map(|mask| {
                els.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| *e)
                    .collect()
            })
            .collect()
    } else {
        let mut out = vec![Vec::new()];
        for (i, &a) in els.iter().enumerate() {
            for &b in &els[i..] {
                out.push(vec![a, b]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// V-categories.
    VCat,
    /// Symmetric V-categories.
    PMet,
    /// Symmetric and separated V-categories.
    Met,
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vcat" => Ok(Flavor::VCat),
            "pmet" => Ok(Flavor::PMet),
            "met" => Ok(Flavor::Met),
            other => Err(Error::Malformed(format!("unknown flavor {other:?}"))),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::VCat => "vcat",
            Flavor::PMet => "pmet",
            Flavor::Met => "met",
        })
    }
}

/// The relation symbol for distance at least `v`.
pub fn relation_symbol(v: &str) -> String {
    format!("~{v}")
}

fn dist(v: &str, a: &str, b: &str) -> Edge {
    Edge::new(relation_symbol(v), [a, b])
}

/// The theory whose models are the V-categories (or symmetric, or symmetric
/// and separated ones) for the quantale `q`.
///
/// Axioms, all over symbols above the bottom: reflexivity at the unit,
/// transitivity for every pair of symbols whose tensor is above the bottom,
/// downward monotonicity, binary joins, and for `pmet`/`met` symmetry, and
/// for `met` separation at the unit. Instances whose conclusion is one of
/// their premises are left out.
pub fn gen_theory(q: &Quantale, flavor: Flavor) -> Result<Theory> {
    let bottom = q.require_valid()?.clone();
    let k = q.unit().clone();
    if flavor == Flavor::Met && k == bottom {
        return Err(Error::TrivialUnit);
    }
    let vs = q.nonbottom();
    let signature = Signature::new(vs.iter().map(|v| (relation_symbol(v), 2)))?;
    let mut axioms = Vec::new();
    if k != bottom {
        axioms.push(Formula::new([], dist(&k, "x", "x")));
    }
    for &v in &vs {
        for &w in &vs {
            let t = q.tensor(v, w).expect("validated");
            if *t != bottom {
                axioms.push(Formula::new([dist(v, "x", "y"), dist(w, "y", "z")], dist(t, "x", "z")));
            }
        }
    }
    for &v in &vs {
        for &w in &vs {
            if v != w && q.leq(w, v) {
                axioms.push(Formula::new([dist(v, "x", "y")], dist(w, "x", "y")));
            }
        }
    }
    for (i, &v) in vs.iter().enumerate() {
        for &w in &vs[i + 1..] {
            let j = q.join([v, w]).expect("validated");
            if j != v && j != w {
                axioms.push(Formula::new([dist(v, "x", "y"), dist(w, "x", "y")], dist(j, "x", "y")));
            }
        }
    }
    if flavor != Flavor::VCat {
        for &v in &vs {
            axioms.push(Formula::new([dist(v, "x", "y")], dist(v, "y", "x")));
        }
    }
    if flavor == Flavor::Met {
        axioms.push(Formula::new([dist(&k, "x", "y")], Edge::new(EQUALITY, ["x", "y"])));
    }
    axioms.retain(|ax| !ax.premises.contains(&ax.conclusion));
    Theory::new(signature, axioms)
}

/// A quantale-valued distance on a finite set.
///
/// JSON: `{"carrier": [...], "d": {"x": {"y": "v", ...}, ...}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistMatrix {
    pub carrier: Carrier,
    pub d: BTreeMap<ElementId, BTreeMap<ElementId, QId>>,
}

impl DistMatrix {
    pub fn get(&self, x: &str, y: &str) -> Option<&QId> {
        self.d.get(x)?.get(y)
    }

    pub fn set(&mut self, x: &str, y: &str, v: impl Into<QId>) {
        self.d
            .entry(x.to_string())
            .or_default()
            .insert(y.to_string(), v.into());
    }

    pub fn is_symmetric(&self) -> bool {
        self.carrier
            .iter()
            .all(|x| self.carrier.iter().all(|y| self.get(x, y) == self.get(y, x)))
    }

    /// `d(x,y) ≥ k` only when `x = y`.
    pub fn is_separated(&self, q: &Quantale) -> bool {
        self.carrier.iter().all(|x| {
            self.carrier
                .iter()
                .all(|y| x == y || !self.get(x, y).is_some_and(|v| q.leq(q.unit(), v)))
        })
    }
}

/// Checks that `m` is total over its carrier with values in `q`, and that
/// `d(x,x) ≥ k` and `d(x,z) ≥ d(x,y) ⊗ d(y,z)`.
pub fn check_vcat(q: &Quantale, m: &DistMatrix) -> Result<()> {
    let bad = |msg: String| Err(Error::NotVCat(msg));
    if m.d.keys().any(|x| !m.carrier.contains(x)) || m.d.values().any(|row| row.keys().any(|y| !m.carrier.contains(y)))
    {
        return bad("matrix has entries outside its carrier".into());
    }
    for x in &m.carrier {
        for y in &m.carrier {
            match m.get(x, y) {
                None => return bad(format!("d({x},{y}) is missing")),
                Some(v) if !q.elements.contains(v) => return bad(format!("d({x},{y}) = {v} is not a quantale element")),
                Some(_) => {}
            }
        }
    }
    let d = |x: &str, y: &str| m.get(x, y).expect("checked total");
    for x in &m.carrier {
        if !q.leq(q.unit(), d(x, x)) {
            return bad(format!("d({x},{x}) is not above the unit"));
        }
        for y in &m.carrier {
            for z in &m.carrier {
                let t = q.tensor(d(x, y), d(y, z)).expect("validated");
                if !q.leq(t, d(x, z)) {
                    return bad(format!("d({x},{z}) is below d({x},{y}) ⊗ d({y},{z})"));
                }
            }
        }
    }
    Ok(())
}

/// `d(x,y)` is the join of every `v` with `x ~v y`; the empty join is the
/// bottom.
pub fn to_distance(q: &Quantale, x: &Structure) -> Result<DistMatrix> {
    let theory = gen_theory(q, Flavor::VCat)?;
    crate::saturate::require_model(&theory, x, "structure")?;
    let mut m = DistMatrix {
        carrier: x.carrier.clone(),
        d: BTreeMap::new(),
    };
    for a in &x.carrier {
        for b in &x.carrier {
            let related: Vec<&QId> = q
                .nonbottom()
                .into_iter()
                .filter(|v| x.holds(&dist(v, a, b)))
                .collect();
            m.set(a, b, q.join(related).expect("validated").clone());
        }
    }
    Ok(m)
}

/// `x ~v y` holds iff `d(x,y) ≥ v`, for every `v` above the bottom.
pub fn from_distance(q: &Quantale, m: &DistMatrix) -> Result<Structure> {
    q.require_valid()?;
    check_vcat(q, m)?;
    let vs = q.nonbottom();
    let mut edges = BTreeSet::new();
    for a in &m.carrier {
        for b in &m.carrier {
            let d = m.get(a, b).expect("checked total");
            for v in &vs {
                if q.leq(v, d) {
                    edges.insert(dist(v, a, b));
                }
            }
        }
    }
    Ok(Structure {
        carrier: m.carrier.clone(),
        edges,
    })
}

/// The two-element Boolean quantale: `bot < top`, tensor is meet, unit `top`.
pub fn two_chain() -> Quantale {
    Quantale::chain(&["bot", "top"], "top", |a, b| a.min(b))
}

/// `{0,1,2}` ordered `2 < 1 < 0` with truncated addition `min(a+b, 2)` and
/// unit `0`: a three-valued stand-in for distances.
pub fn three_chain() -> Quantale {
    // Positions are listed bottom first, so position i holds the number 2-i.
    Quantale::chain(&["2", "1", "0"], "0", |i, j| {
        let sum = ((2 - i) + (2 - j)).min(2);
        2 - sum
    })
}

/// The one-element quantale.
pub fn trivial() -> Quantale {
    Quantale::chain(&["*"], "*", |_, _| 0)
}

/// `lo < mid < hi` with meet as tensor and unit `hi`.
pub fn meet_three_chain() -> Quantale {
    Quantale::chain(&["lo", "mid", "hi"], "hi", |a, b| a.min(b))
}

/// The four-element Boolean algebra `{bot, l, r, top}` with meet as tensor.
pub fn diamond() -> Quantale {
    let els = ["bot", "l", "r", "top"];
    fn below(a: &str, b: &str) -> bool {
        a == b || a == "bot" || b == "top"
    }
    fn meet<'a>(a: &'a str, b: &'a str) -> &'a str {
        if below(a, b) {
            a
        } else if below(b, a) {
            b
        } else {
            "bot"
        }
    }
    let mut le = Vec::new();
    let mut table = Vec::new();
    for a in els {
        for b in els {
            if below(a, b) {
                le.push((a.to_string(), b.to_string()));
            }
            table.push(((a.to_string(), b.to_string()), meet(a, b).to_string()));
        }
    }
    Quantale::new(els, le, table, "top").expect("static tables")
}

/// Built-in quantales by name: `2-chain`, `3-chain`, `trivial`,
/// `meet-3-chain`, `diamond`.
pub fn builtin_quantale(name: &str) -> Option<Quantale> {
    match name {
        "2-chain" => Some(two_chain()),
        "3-chain" => Some(three_chain()),
        "trivial" => Some(trivial()),
        "meet-3-chain" => Some(meet_three_chain()),
        "diamond" => Some(diamond()),
        _ => None,
    }
}

pub const BUILTIN_QUANTALES: [&str; 5] = ["2-chain", "3-chain", "trivial", "meet-3-chain", "diamond"];
