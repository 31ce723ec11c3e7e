//! T-relations, T-closure by semi-naive saturation, free models, and
//! reflection into models of theories with equality.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::engine::{self, CompiledAxiom, CompiledTheory, FactStore, Head, Tuple, Universe};
use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::structure::{
    transport_edge_set, validate_edges, validate_structure, Carrier, Edge, EdgeSet, ElementMap, Morphism,
    Structure,
};
use crate::theory::{strip_equality, Theory};
use crate::unionfind::MinUnionFind;

/// Below this much round work (delta facts times match tasks) a round runs
/// on the calling thread.
const PARALLEL_ROUND_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaturationOptions {
    pub parallelism: Parallelism,
    /// Record every derivation. Off by default.
    pub trace: bool,
}

/// One derived edge: which axiom fired, under which valuation, in which round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub round: usize,
    pub axiom: usize,
    pub valuation: BTreeMap<String, String>,
    pub edge: Edge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationTrace {
    /// Derivations in the order their edges were added.
    pub rounds: Vec<Derivation>,
    pub final_edges: EdgeSet,
}

impl SaturationTrace {
    /// Re-checks every derivation against the edges available before it:
    /// the premises must already hold and the conclusion must be what the
    /// axiom produces. Finally the accumulated set must equal `final_edges`.
    pub fn replay(&self, theory: &Theory, initial: &EdgeSet) -> bool {
        let mut known = initial.clone();
        for d in &self.rounds {
            let Some(ax) = theory.axioms.get(d.axiom) else {
                return false;
            };
            let inst = |e: &Edge| -> Option<Edge> {
                Some(Edge {
                    symbol: e.symbol.clone(),
                    args: e
                        .args
                        .iter()
                        .map(|v| d.valuation.get(v).cloned())
                        .collect::<Option<_>>()?,
                })
            };
            let premises_hold = ax
                .premises
                .iter()
                .all(|p| inst(p).is_some_and(|e| known.contains(&e)));
            if !premises_hold || inst(&ax.conclusion).as_ref() != Some(&d.edge) {
                return false;
            }
            known.insert(d.edge.clone());
        }
        known == self.final_edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Saturation {
    pub edges: EdgeSet,
    pub trace: Option<SaturationTrace>,
}

/// True iff `edges` is closed under every axiom instance over `carrier`.
pub fn is_t_relation(theory: &Theory, carrier: &Carrier, edges: &EdgeSet) -> Result<bool> {
    theory.require_no_equality()?;
    let compiled = CompiledTheory::new(theory)?;
    let universe = Universe::new(carrier);
    let facts = FactStore::from_edges(&compiled.symbols, &universe, edges)?;
    Ok(compiled
        .axioms
        .iter()
        .all(|ax| engine::find_violation(ax, &facts, universe.len()).is_none()))
}

/// The least T-relation on `carrier` containing `edges`.
pub fn closure(theory: &Theory, carrier: &Carrier, edges: &EdgeSet) -> Result<EdgeSet> {
    Ok(closure_with(theory, carrier, edges, SaturationOptions::default())?.edges)
}

pub fn closure_with(
    theory: &Theory,
    carrier: &Carrier,
    edges: &EdgeSet,
    opts: SaturationOptions,
) -> Result<Saturation> {
    theory.require_no_equality()?;
    validate_edges(&theory.signature, carrier, edges)?;
    let compiled = CompiledTheory::new(theory)?;
    let universe = Universe::new(carrier);
    let store = FactStore::from_edges(&compiled.symbols, &universe, edges)?;
    let (store, raw) = saturate_store(&compiled, &universe, store, opts);
    let edges = store.to_edges(&compiled.symbols, &universe);
    let trace = raw.map(|derivations| SaturationTrace {
        rounds: derivations
            .into_iter()
            .map(|d| Derivation {
                round: d.round,
                axiom: d.axiom,
                valuation: engine::valuation_map(&compiled.axioms[d.axiom], &universe, &d.valuation),
                edge: engine::export_edge(&compiled.symbols, &universe, d.sym, &d.tuple),
            })
            .collect(),
        final_edges: edges.clone(),
    });
    Ok(Saturation { edges, trace })
}

struct RawDerivation {
    round: usize,
    axiom: usize,
    valuation: Vec<u32>,
    sym: usize,
    tuple: Tuple,
}

struct Produced {
    axiom: usize,
    valuation: Option<Vec<u32>>,
    sym: usize,
    tuple: Tuple,
}

/// Semi-naive fixpoint: in each round every premise position of every axiom
/// is matched against the facts new in the previous round, the remaining
/// premises against everything known. Equality axioms are ignored.
fn saturate_store(
    compiled: &CompiledTheory,
    universe: &Universe,
    mut all: FactStore,
    opts: SaturationOptions,
) -> (FactStore, Option<Vec<RawDerivation>>) {
    let n = universe.len();
    let mut trace = opts.trace.then(Vec::new);
    let mut delta = all.clone();

    // Round 0: axioms without premises fire once, independent of the facts.
    for (i, ax) in compiled.axioms.iter().enumerate() {
        let Head::Rel(atom) = &ax.head else { continue };
        if !ax.premises.is_empty() {
            continue;
        }
        let binding = vec![None; ax.nvars()];
        let _ = engine::for_each_completion(ax, &binding, n, &mut |val| {
            let t = engine::head_tuple(atom, val);
            if all.insert(atom.sym, t.clone()) {
                delta.insert(atom.sym, t.clone());
                if let Some(tr) = trace.as_mut() {
                    tr.push(RawDerivation {
                        round: 0,
                        axiom: i,
                        valuation: val.to_vec(),
                        sym: atom.sym,
                        tuple: t,
                    });
                }
            }
            ControlFlow::Continue(())
        });
    }

    let tasks: Vec<(usize, usize, Vec<usize>)> = compiled
        .axioms
        .iter()
        .enumerate()
        .filter(|(_, ax)| matches!(ax.head, Head::Rel(_)))
        .flat_map(|(i, ax)| (0..ax.premises.len()).map(move |p| (i, p, ax.plan(Some(p)))))
        .collect();

    let mut round = 1;
    while !delta.is_empty() && !tasks.is_empty() {
        let mode = if opts.parallelism.is_parallel() && delta.len() * tasks.len() >= PARALLEL_ROUND_THRESHOLD {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        };
        let produced: Vec<Vec<Produced>> = par::map_slice(mode, &tasks, |(i, _, order)| {
            run_task(&compiled.axioms[*i], *i, order, &delta, &all, n, opts.trace)
        });
        let mut next = FactStore::new(compiled.symbols.len());
        for p in produced.into_iter().flatten() {
            if all.insert(p.sym, p.tuple.clone()) {
                next.insert(p.sym, p.tuple.clone());
                if let Some(tr) = trace.as_mut() {
                    tr.push(RawDerivation {
                        round,
                        axiom: p.axiom,
                        valuation: p.valuation.unwrap_or_default(),
                        sym: p.sym,
                        tuple: p.tuple,
                    });
                }
            }
        }
        delta = next;
        round += 1;
    }
    (all, trace)
}

fn run_task(
    ax: &CompiledAxiom,
    index: usize,
    order: &[usize],
    delta: &FactStore,
    all: &FactStore,
    n: usize,
    keep_valuation: bool,
) -> Vec<Produced> {
    let Head::Rel(atom) = &ax.head else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let _ = engine::for_each_match(ax, order, delta, all, &mut |binding| {
        engine::for_each_completion(ax, binding, n, &mut |val| {
            let t = engine::head_tuple(atom, val);
            if !all.contains(atom.sym, &t) {
                out.push(Produced {
                    axiom: index,
                    valuation: keep_valuation.then(|| val.to_vec()),
                    sym: atom.sym,
                    tuple: t,
                });
            }
            ControlFlow::Continue(())
        })
    });
    out
}

/// The free model on `x`: same carrier, edges closed under the theory. The
/// identity function `x → free_model(x)` is the reflection.
pub fn free_model(theory: &Theory, x: &Structure) -> Result<Structure> {
    validate_structure(&theory.signature, x)?;
    Ok(Structure {
        carrier: x.carrier.clone(),
        edges: closure(theory, &x.carrier, &x.edges)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionResult {
    /// Surjection from the input onto `model`.
    pub quotient: Morphism,
    pub model: Structure,
}

/// Reflects `x` into the models of a theory that may use equality.
///
/// Alternates between saturating under the equality-free axioms and merging
/// every pair of elements some equality axiom identifies. All merges of a
/// round happen at once; each class is named by its least element. Stops
/// when a round produces no merge.
pub fn reflect_with_equality(theory: &Theory, x: &Structure) -> Result<ReflectionResult> {
    validate_structure(&theory.signature, x)?;
    let plain = strip_equality(theory);
    let compiled = CompiledTheory::new(theory)?;
    let mut current = x.clone();
    let mut total = ElementMap::identity(&x.carrier);
    loop {
        current.edges = closure(&plain, &current.carrier, &current.edges)?;
        let universe = Universe::new(&current.carrier);
        let facts = FactStore::from_edges(&compiled.symbols, &universe, &current.edges)?;
        let mut uf = MinUnionFind::new(universe.len());
        let mut merged = false;
        for ax in compiled.axioms.iter().filter(|a| a.is_equality()) {
            let Head::Eq(a, b) = ax.head else { continue };
            let order = ax.plan(None);
            let _ = engine::for_each_match(ax, &order, &facts, &facts, &mut |binding| {
                engine::for_each_completion(ax, binding, universe.len(), &mut |val| {
                    merged |= uf.union(val[a] as usize, val[b] as usize);
                    ControlFlow::Continue(())
                })
            });
        }
        if !merged {
            break;
        }
        let step = ElementMap::new(current.carrier.iter().map(|name| {
            let id = universe.id(name).expect("carrier element") as usize;
            (name.clone(), universe.name(uf.find(id) as u32).to_string())
        }));
        current = Structure {
            carrier: step.image(),
            edges: transport_edge_set(&step, &current.edges)?,
        };
        total = total.then(&step)?;
    }
    let quotient = Morphism::new(x.clone(), current.clone(), total)?;
    Ok(ReflectionResult {
        quotient,
        model: current,
    })
}

/// Reflects into models of `theory`, using [`free_model`] when the theory has
/// no equality axioms.
pub fn reflect(theory: &Theory, x: &Structure) -> Result<ReflectionResult> {
    if theory.uses_equality() {
        reflect_with_equality(theory, x)
    } else {
        let model = free_model(theory, x)?;
        let quotient = Morphism::new(x.clone(), model.clone(), ElementMap::identity(&x.carrier))?;
        Ok(ReflectionResult { quotient, model })
    }
}

pub(crate) fn require_model(theory: &Theory, x: &Structure, what: &str) -> Result<()> {
    validate_structure(&theory.signature, x)?;
    let failing = crate::theory::failing_axioms(theory, x);
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Error::NotAModel(format!("{what} fails axioms {failing:?}")))
    }
}
