//! Interned representation of structures and axioms, and the premise matcher
//! shared by model checking and saturation.
//!
//! Elements and symbols are renumbered densely; a fact is a symbol index plus
//! a boxed tuple of element indices. Relations keep insertion order next to a
//! hash index with a fixed hasher, so iteration (and therefore trace order) is
//! reproducible across runs.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::BuildHasherDefault;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::structure::{Carrier, Edge, EdgeSet, Signature};
use crate::theory::{Formula, Theory, EQUALITY};

type FixedState = BuildHasherDefault<DefaultHasher>;
pub(crate) type Tuple = Box<[u32]>;

/// Dense numbering of a carrier, in sorted order.
#[derive(Debug, Clone)]
pub(crate) struct Universe {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Universe {
    pub(crate) fn new(carrier: &Carrier) -> Self {
        let names: Vec<String> = carrier.iter().cloned().collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Universe { names, index }
    }

    pub(crate) fn id(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub(crate) fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SymbolTable {
    names: Vec<String>,
    arities: Vec<usize>,
    index: HashMap<String, usize>,
}

impl SymbolTable {
    pub(crate) fn new(sig: &Signature) -> Self {
        let names: Vec<String> = sig.symbols.keys().cloned().collect();
        let arities = sig.symbols.values().copied().collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        SymbolTable {
            names,
            arities,
            index,
        }
    }

    pub(crate) fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn arity(&self, id: usize) -> usize {
        self.arities[id]
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Relation {
    rows: Vec<Tuple>,
    set: HashSet<Tuple, FixedState>,
    /// `by_column[i][x]`: indices of the rows with `x` in position `i`.
    by_column: Vec<Vec<Vec<u32>>>,
}

impl Relation {
    pub(crate) fn insert(&mut self, t: Tuple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        let row = self.rows.len() as u32;
        if self.by_column.len() < t.len() {
            self.by_column.resize_with(t.len(), Vec::new);
        }
        for (col, &x) in self.by_column.iter_mut().zip(t.iter()) {
            if col.len() <= x as usize {
                col.resize_with(x as usize + 1, Vec::new);
            }
            col[x as usize].push(row);
        }
        self.set.insert(t.clone());
        self.rows.push(t);
        true
    }

    /// Indices of the rows with `x` in position `col`.
    pub(crate) fn rows_with(&self, col: usize, x: u32) -> &[u32] {
        self.by_column
            .get(col)
            .and_then(|c| c.get(x as usize))
            .map_or(&[], Vec::as_slice)
    }

    pub(crate) fn row(&self, i: u32) -> &[u32] {
        &self.rows[i as usize]
    }

    pub(crate) fn contains(&self, t: &[u32]) -> bool {
        self.set.contains(t)
    }

    pub(crate) fn rows(&self) -> &[Tuple] {
        &self.rows
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }
}

/// One relation per symbol of the signature.
#[derive(Debug, Clone)]
pub(crate) struct FactStore {
    rels: Vec<Relation>,
}

impl FactStore {
    pub(crate) fn new(symbols: usize) -> Self {
        FactStore {
            rels: vec![Relation::default(); symbols],
        }
    }

    /// Interns `edges`. Edges with an unknown symbol, a wrong arity, or an
    /// argument outside the universe are rejected.
    pub(crate) fn from_edges<'a, I>(symbols: &SymbolTable, universe: &Universe, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut store = FactStore::new(symbols.len());
        for e in edges {
            let (sym, tuple) = intern_edge(symbols, universe, e)?;
            store.rels[sym].insert(tuple);
        }
        Ok(store)
    }

    pub(crate) fn relation(&self, sym: usize) -> &Relation {
        &self.rels[sym]
    }

    pub(crate) fn insert(&mut self, sym: usize, t: Tuple) -> bool {
        self.rels[sym].insert(t)
    }

    pub(crate) fn contains(&self, sym: usize, t: &[u32]) -> bool {
        self.rels[sym].contains(t)
    }

    pub(crate) fn len(&self) -> usize {
        self.rels.iter().map(Relation::len).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn to_edges(&self, symbols: &SymbolTable, universe: &Universe) -> EdgeSet {
        let mut out = EdgeSet::new();
        for (sym, rel) in self.rels.iter().enumerate() {
            for row in rel.rows() {
                out.insert(export_edge(symbols, universe, sym, row));
            }
        }
        out
    }
}

pub(crate) fn intern_edge(symbols: &SymbolTable, universe: &Universe, e: &Edge) -> Result<(usize, Tuple)> {
    let sym = symbols
        .id(&e.symbol)
        .ok_or_else(|| Error::UnknownSymbol(e.clone()))?;
    let arity = symbols.arity(sym);
    if arity != e.args.len() {
        return Err(Error::ArityMismatch {
            edge: e.clone(),
            expected: arity,
            found: e.args.len(),
        });
    }
    let tuple = e
        .args
        .iter()
        .map(|a| {
            universe.id(a).ok_or_else(|| Error::ForeignElement {
                edge: e.clone(),
                element: a.clone(),
            })
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok((sym, tuple.into_boxed_slice()))
}

pub(crate) fn export_edge(symbols: &SymbolTable, universe: &Universe, sym: usize, row: &[u32]) -> Edge {
    Edge {
        symbol: symbols.name(sym).to_string(),
        args: row.iter().map(|&i| universe.name(i).to_string()).collect(),
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Atom {
    pub(crate) sym: usize,
    pub(crate) args: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) enum Head {
    Rel(Atom),
    Eq(usize, usize),
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAxiom {
    pub(crate) premises: Vec<Atom>,
    pub(crate) head: Head,
    pub(crate) var_names: Vec<String>,
    /// Head variables that no premise binds.
    pub(crate) free_in_head: Vec<usize>,
}

impl CompiledAxiom {
    pub(crate) fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub(crate) fn is_equality(&self) -> bool {
        matches!(self.head, Head::Eq(..))
    }

    /// Premise evaluation order. When `first` is given that premise goes
    /// first; the rest are picked greedily by how many of their variables are
    /// already bound, ties broken by position.
    pub(crate) fn plan(&self, first: Option<usize>) -> Vec<usize> {
        let n = self.premises.len();
        let mut bound = vec![false; self.nvars()];
        let mut used = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let take = |p: usize, bound: &mut Vec<bool>, used: &mut Vec<bool>, order: &mut Vec<usize>| {
            used[p] = true;
            order.push(p);
            for &v in &self.premises[p].args {
                bound[v] = true;
            }
        };
        if let Some(p) = first {
            take(p, &mut bound, &mut used, &mut order);
        }
        while order.len() < n {
            let mut best: Option<(usize, usize)> = None;
            for p in 0..n {
                if used[p] {
                    continue;
                }
                let mut seen = Vec::new();
                let shared = self.premises[p]
                    .args
                    .iter()
                    .filter(|&&v| {
                        if bound[v] && !seen.contains(&v) {
                            seen.push(v);
                            true
                        } else {
                            false
                        }
                    })
                    .count();
                if best.is_none_or(|(_, s)| shared > s) {
                    best = Some((p, shared));
                }
            }
            let (p, _) = best.expect("an unused premise remains");
            take(p, &mut bound, &mut used, &mut order);
        }
        order
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledTheory {
    pub(crate) symbols: SymbolTable,
    pub(crate) axioms: Vec<CompiledAxiom>,
}

impl CompiledTheory {
    pub(crate) fn new(theory: &Theory) -> Result<Self> {
        let symbols = SymbolTable::new(&theory.signature);
        let axioms = theory
            .axioms
            .iter()
            .map(|ax| compile_axiom(&symbols, ax))
            .collect::<Result<_>>()?;
        Ok(CompiledTheory { symbols, axioms })
    }
}

#[derive(Default)]
struct VarTable {
    index: HashMap<String, usize>,
    names: Vec<String>,
}

impl VarTable {
    fn id(&mut self, name: &str) -> usize {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len();
        self.index.insert(name.to_string(), v);
        self.names.push(name.to_string());
        v
    }
}

fn compile_atom(symbols: &SymbolTable, vars: &mut VarTable, e: &Edge) -> Result<Atom> {
    let sym = symbols
        .id(&e.symbol)
        .ok_or_else(|| Error::UnknownSymbol(e.clone()))?;
    if symbols.arity(sym) != e.args.len() {
        return Err(Error::ArityMismatch {
            edge: e.clone(),
            expected: symbols.arity(sym),
            found: e.args.len(),
        });
    }
    Ok(Atom {
        sym,
        args: e.args.iter().map(|a| vars.id(a)).collect(),
    })
}

pub(crate) fn compile_axiom(symbols: &SymbolTable, ax: &Formula) -> Result<CompiledAxiom> {
    let mut vars = VarTable::default();
    let premises = ax
        .premises
        .iter()
        .map(|p| compile_atom(symbols, &mut vars, p))
        .collect::<Result<Vec<_>>>()?;
    let bound_by_premises = vars.names.len();
    let head = if ax.conclusion.symbol == EQUALITY {
        if ax.conclusion.args.len() != 2 {
            return Err(Error::ArityMismatch {
                edge: ax.conclusion.clone(),
                expected: 2,
                found: ax.conclusion.args.len(),
            });
        }
        let a = vars.id(&ax.conclusion.args[0]);
        let b = vars.id(&ax.conclusion.args[1]);
        Head::Eq(a, b)
    } else {
        Head::Rel(compile_atom(symbols, &mut vars, &ax.conclusion)?)
    };
    let free_in_head = (bound_by_premises..vars.names.len()).collect();
    Ok(CompiledAxiom {
        premises,
        head,
        var_names: vars.names,
        free_in_head,
    })
}

/// Enumerates every binding of the premises in `order`. The first premise is
/// matched against `first_source` (a delta relation store, in semi-naive
/// rounds) and the rest against `full`.
pub(crate) fn for_each_match<F>(
    axiom: &CompiledAxiom,
    order: &[usize],
    first_source: &FactStore,
    full: &FactStore,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Option<u32>]) -> ControlFlow<()>,
{
    let mut binding = vec![None; axiom.nvars()];
    match_from(axiom, order, 0, first_source, full, &mut binding, f)
}

fn match_from<F>(
    axiom: &CompiledAxiom,
    order: &[usize],
    depth: usize,
    first_source: &FactStore,
    full: &FactStore,
    binding: &mut Vec<Option<u32>>,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Option<u32>]) -> ControlFlow<()>,
{
    if depth == order.len() {
        return f(binding);
    }
    let atom = &axiom.premises[order[depth]];
    let source = if depth == 0 { first_source } else { full };
    let rel = source.relation(atom.sym);
    let indexed = atom
        .args
        .iter()
        .enumerate()
        .find_map(|(col, &v)| binding[v].map(|x| rel.rows_with(col, x)));
    let candidates: Box<dyn Iterator<Item = &[u32]>> = match indexed {
        Some(ids) => Box::new(ids.iter().map(|&i| rel.row(i))),
        None => Box::new(rel.rows().iter().map(|r| &**r)),
    };
    let mut newly = Vec::with_capacity(atom.args.len());
    'rows: for row in candidates {
        newly.clear();
        for (&v, &x) in atom.args.iter().zip(row.iter()) {
            match binding[v] {
                Some(b) if b != x => {
                    for &u in &newly {
                        binding[u] = None;
                    }
                    continue 'rows;
                }
                Some(_) => {}
                None => {
                    binding[v] = Some(x);
                    newly.push(v);
                }
            }
        }
        let flow = match_from(axiom, order, depth + 1, first_source, full, binding, f);
        for &u in &newly {
            binding[u] = None;
        }
        flow?;
    }
    ControlFlow::Continue(())
}

/// Extends a premise binding over the head's free variables in every way
/// (each ranging over `universe_size` elements).
pub(crate) fn for_each_completion<F>(
    axiom: &CompiledAxiom,
    binding: &[Option<u32>],
    universe_size: usize,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let free = &axiom.free_in_head;
    if !free.is_empty() && universe_size == 0 {
        return ControlFlow::Continue(());
    }
    let mut full: Vec<u32> = binding.iter().map(|b| b.unwrap_or(0)).collect();
    let mut counter = vec![0u32; free.len()];
    loop {
        for (k, &v) in free.iter().enumerate() {
            full[v] = counter[k];
        }
        f(&full)?;
        let mut pos = counter.len();
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            counter[pos] += 1;
            if (counter[pos] as usize) < universe_size {
                break;
            }
            counter[pos] = 0;
        }
    }
}

pub(crate) fn head_tuple(atom: &Atom, valuation: &[u32]) -> Tuple {
    atom.args.iter().map(|&v| valuation[v]).collect()
}

/// Searches for a valuation that satisfies every premise of `axiom` in
/// `facts` but not its conclusion. Equality holds exactly on the diagonal.
pub(crate) fn find_violation(axiom: &CompiledAxiom, facts: &FactStore, universe_size: usize) -> Option<Vec<u32>> {
    let order = axiom.plan(None);
    let mut found = None;
    let _ = for_each_match(axiom, &order, facts, facts, &mut |binding| {
        for_each_completion(axiom, binding, universe_size, &mut |val| {
            let holds = match &axiom.head {
                Head::Rel(atom) => facts.contains(atom.sym, &head_tuple(atom, val)),
                Head::Eq(a, b) => val[*a] == val[*b],
            };
            if holds {
                ControlFlow::Continue(())
            } else {
                found = Some(val.to_vec());
                ControlFlow::Break(())
            }
        })
    });
    found
}

pub(crate) fn valuation_map(axiom: &CompiledAxiom, universe: &Universe, val: &[u32]) -> BTreeMap<String, String> {
    axiom
        .var_names
        .iter()
        .zip(val)
        .map(|(v, &x)| (v.clone(), universe.name(x).to_string()))
        .collect()
}
