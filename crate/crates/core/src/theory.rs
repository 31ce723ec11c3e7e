//! Horn formulas and theories over a relational signature.
//!
//! A formula `Φ ⟹ ψ` has a finite set of premise edges over variables and a
//! single conclusion edge, which may use the reserved binary symbol `=`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{self, CompiledTheory, FactStore, Universe};
use crate::error::{Error, Result};
use crate::structure::{Edge, Signature, Structure};

/// The reserved equality symbol. It may only appear in conclusions.
pub const EQUALITY: &str = "=";

pub type VarId = String;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Formula {
    pub premises: BTreeSet<Edge>,
    pub conclusion: Edge,
}

impl Formula {
    pub fn new<I: IntoIterator<Item = Edge>>(premises: I, conclusion: Edge) -> Self {
        Formula {
            premises: premises.into_iter().collect(),
            conclusion,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.conclusion.symbol == EQUALITY
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        for p in &self.premises {
            if p.symbol == EQUALITY {
                return Err(Error::EqualityPremise(p.clone()));
            }
            check_arity(sig, p)?;
        }
        if self.is_equality() {
            if self.conclusion.args.len() != 2 {
                return Err(Error::ArityMismatch {
                    edge: self.conclusion.clone(),
                    expected: 2,
                    found: self.conclusion.args.len(),
                });
            }
        } else {
            check_arity(sig, &self.conclusion)?;
        }
        Ok(())
    }

    /// Applies `rename` to every variable.
    pub fn rename_vars<F: Fn(&str) -> String>(&self, rename: F) -> Formula {
        let r = |e: &Edge| Edge {
            symbol: e.symbol.clone(),
            args: e.args.iter().map(|a| rename(a)).collect(),
        };
        Formula {
            premises: self.premises.iter().map(r).collect(),
            conclusion: r(&self.conclusion),
        }
    }

    /// Applies `rename` to every relation symbol except `=`.
    pub fn rename_symbols<F: Fn(&str) -> String>(&self, rename: F) -> Formula {
        let r = |e: &Edge| Edge {
            symbol: if e.symbol == EQUALITY {
                e.symbol.clone()
            } else {
                rename(&e.symbol)
            },
            args: e.args.clone(),
        };
        Formula {
            premises: self.premises.iter().map(r).collect(),
            conclusion: r(&self.conclusion),
        }
    }
}

fn check_arity(sig: &Signature, e: &Edge) -> Result<()> {
    let arity = sig
        .arity(&e.symbol)
        .ok_or_else(|| Error::UnknownSymbol(e.clone()))?;
    if arity != e.args.len() {
        return Err(Error::ArityMismatch {
            edge: e.clone(),
            expected: arity,
            found: e.args.len(),
        });
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        write!(f, "{} => {}", premises.join(", "), self.conclusion)
    }
}

/// A finite relational Horn theory.
///
/// Serialized as `{"signature": {"le": 2}, "axioms": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TheoryJson", into = "TheoryJson")]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Formula>,
}

#[derive(Serialize, Deserialize)]
struct TheoryJson {
    signature: std::collections::BTreeMap<String, usize>,
    axioms: Vec<Formula>,
}

impl TryFrom<TheoryJson> for Theory {
    type Error = Error;

    fn try_from(raw: TheoryJson) -> Result<Self> {
        Theory::new(Signature { symbols: raw.signature }, raw.axioms)
    }
}

impl From<Theory> for TheoryJson {
    fn from(t: Theory) -> Self {
        TheoryJson {
            signature: t.signature.symbols,
            axioms: t.axioms,
        }
    }
}

impl Theory {
    pub fn new(signature: Signature, axioms: Vec<Formula>) -> Result<Self> {
        signature.validate()?;
        for ax in &axioms {
            ax.validate(&signature)?;
        }
        Ok(Theory { signature, axioms })
    }

    /// The empty theory over `signature`; its models are all structures.
    pub fn empty(signature: Signature) -> Self {
        Theory {
            signature,
            axioms: Vec::new(),
        }
    }

    pub fn uses_equality(&self) -> bool {
        uses_equality(self)
    }

    pub(crate) fn require_no_equality(&self) -> Result<()> {
        if self.uses_equality() {
            Err(Error::EqualityAxiomPresent)
        } else {
            Ok(())
        }
    }

    /// The same theory with every axiom's symbols renamed.
    pub fn rename_symbols<F: Fn(&str) -> String>(&self, rename: F) -> Result<Theory> {
        let signature = Signature::new(
            self.signature
                .symbols
                .iter()
                .map(|(s, &n)| (rename(s), n)),
        )?;
        Theory::new(
            signature,
            self.axioms.iter().map(|a| a.rename_symbols(&rename)).collect(),
        )
    }

    pub fn axiom_set(&self) -> BTreeSet<&Formula> {
        self.axioms.iter().collect()
    }
}

pub fn vars_of(edge: &Edge) -> BTreeSet<VarId> {
    edge.args.iter().cloned().collect()
}

pub fn vars_of_set<'a, I: IntoIterator<Item = &'a Edge>>(edges: I) -> BTreeSet<VarId> {
    edges.into_iter().flat_map(|e| e.args.iter().cloned()).collect()
}

/// Which half of the variable condition an axiom fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// Two distinct premises share no variable.
    SharedVariable,
    /// The conclusion's variables are not covered by the premises, or the
    /// premises are empty and the conclusion has more than one variable.
    ConclusionVariables,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: usize,
    pub clause: Clause,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clause = match self.clause {
            Clause::SharedVariable => "clause 1",
            Clause::ConclusionVariables => "clause 2",
        };
        write!(f, "axiom {} fails {}: {}", self.axiom, clause, self.detail)
    }
}

/// Checks the syntactic condition under which coproducts of models are
/// plain disjoint unions: (1) distinct premises pairwise share a variable;
/// (2) conclusion variables come from the premises, or, with no premises, the
/// conclusion mentions exactly one variable.
pub fn check_variable_condition(theory: &Theory) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for (i, ax) in theory.axioms.iter().enumerate() {
        let premises: Vec<&Edge> = ax.premises.iter().collect();
        'pairs: for (a, p) in premises.iter().enumerate() {
            for q in &premises[a + 1..] {
                if vars_of(p).is_disjoint(&vars_of(q)) {
                    violations.push(Violation {
                        axiom: i,
                        clause: Clause::SharedVariable,
                        detail: format!("premises {p} and {q} share no variable"),
                    });
                    break 'pairs;
                }
            }
        }
        let conclusion_vars = vars_of(&ax.conclusion);
        if premises.is_empty() {
            if conclusion_vars.len() != 1 {
                violations.push(Violation {
                    axiom: i,
                    clause: Clause::ConclusionVariables,
                    detail: format!(
                        "no premises, but conclusion {} has {} variables",
                        ax.conclusion,
                        conclusion_vars.len()
                    ),
                });
            }
        } else {
            let premise_vars = vars_of_set(ax.premises.iter());
            if !conclusion_vars.is_subset(&premise_vars) {
                let missing: Vec<_> = conclusion_vars.difference(&premise_vars).cloned().collect();
                violations.push(Violation {
                    axiom: i,
                    clause: Clause::ConclusionVariables,
                    detail: format!("conclusion variables {missing:?} do not occur in the premises"),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// True iff every valuation making the premises hold in `x` makes the
/// conclusion hold in `x` extended by the diagonal equality relation.
///
/// Valuations range over the variables occurring in the axiom. Edges of `x`
/// that do not validate against `sig` are ignored.
pub fn satisfies(sig: &Signature, x: &Structure, ax: &Formula) -> bool {
    let theory = Theory {
        signature: sig.clone(),
        axioms: vec![ax.clone()],
    };
    failing_axioms(&theory, x).is_empty()
}

pub fn is_model(theory: &Theory, x: &Structure) -> bool {
    failing_axioms(theory, x).is_empty()
}

/// Indices of the axioms `x` does not satisfy.
pub fn failing_axioms(theory: &Theory, x: &Structure) -> Vec<usize> {
    let Ok(compiled) = CompiledTheory::new(theory) else {
        return (0..theory.axioms.len()).collect();
    };
    let universe = Universe::new(&x.carrier);
    let facts = interned_valid_edges(&compiled, &universe, x);
    compiled
        .axioms
        .iter()
        .enumerate()
        .filter(|(_, ax)| engine::find_violation(ax, &facts, universe.len()).is_some())
        .map(|(i, _)| i)
        .collect()
}

fn interned_valid_edges(compiled: &CompiledTheory, universe: &Universe, x: &Structure) -> FactStore {
    let mut store = FactStore::new(compiled.symbols.len());
    for e in &x.edges {
        if let Ok((sym, t)) = engine::intern_edge(&compiled.symbols, universe, e) {
            store.insert(sym, t);
        }
    }
    store
}

/// `T⁻`: drops every axiom whose conclusion is an equation.
pub fn strip_equality(theory: &Theory) -> Theory {
    Theory {
        signature: theory.signature.clone(),
        axioms: theory
            .axioms
            .iter()
            .filter(|ax| !ax.is_equality())
            .cloned()
            .collect(),
    }
}

pub fn uses_equality(theory: &Theory) -> bool {
    theory.axioms.iter().any(Formula::is_equality)
}
