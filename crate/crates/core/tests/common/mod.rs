//! Brute-force reference implementations used to cross-check the engine.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use horncat::structure::{Carrier, Edge, EdgeSet, ElementMap, Structure};
use horncat::theory::{Formula, Theory, EQUALITY};

fn variables(ax: &Formula) -> Vec<String> {
    let mut vs = BTreeSet::new();
    for e in ax.premises.iter().chain([&ax.conclusion]) {
        vs.extend(e.args.iter().cloned());
    }
    vs.into_iter().collect()
}

/// Every valuation of the variables of `ax` in `carrier`.
pub fn valuations(ax: &Formula, carrier: &Carrier) -> Vec<BTreeMap<String, String>> {
    let vars = variables(ax);
    let elems: Vec<&String> = carrier.iter().collect();
    let mut out = vec![BTreeMap::new()];
    for v in &vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                elems.iter().map(move |x| {
                    let mut m = m.clone();
                    m.insert(v.clone(), (*x).clone());
                    m
                })
            })
            .collect();
    }
    out
}

pub fn instantiate(e: &Edge, val: &BTreeMap<String, String>) -> Edge {
    Edge {
        symbol: e.symbol.clone(),
        args: e.args.iter().map(|a| val[a].clone()).collect(),
    }
}

/// Fires every axiom under every valuation until nothing changes.
pub fn naive_closure(theory: &Theory, carrier: &Carrier, edges: &EdgeSet) -> EdgeSet {
    let mut current = edges.clone();
    let all: Vec<(&Formula, Vec<BTreeMap<String, String>>)> =
        theory.axioms.iter().map(|ax| (ax, valuations(ax, carrier))).collect();
    loop {
        let mut next = current.clone();
        for (ax, vals) in &all {
            for val in vals {
                if ax.premises.iter().all(|p| current.contains(&instantiate(p, val))) {
                    next.insert(instantiate(&ax.conclusion, val));
                }
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

pub fn naive_satisfies(x: &Structure, ax: &Formula) -> bool {
    valuations(ax, &x.carrier).iter().all(|val| {
        if !ax.premises.iter().all(|p| x.edges.contains(&instantiate(p, val))) {
            return true;
        }
        let c = instantiate(&ax.conclusion, val);
        if c.symbol == EQUALITY {
            c.args[0] == c.args[1]
        } else {
            x.edges.contains(&c)
        }
    })
}

pub fn naive_is_model(theory: &Theory, x: &Structure) -> bool {
    theory.axioms.iter().all(|ax| naive_satisfies(x, ax))
}

/// `h⁻¹[E]` by enumerating every candidate edge over the domain.
pub fn naive_preimage(h: &ElementMap, symbols: &BTreeMap<String, usize>, target: &EdgeSet) -> EdgeSet {
    let dom: Vec<&String> = h.map.keys().collect();
    let mut out = EdgeSet::new();
    for (s, &n) in symbols {
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for _ in 0..n {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    dom.iter().map(move |x| {
                        let mut t = t.clone();
                        t.push((*x).clone());
                        t
                    })
                })
                .collect();
        }
        for args in tuples {
            let e = Edge { symbol: s.clone(), args };
            let image = Edge {
                symbol: e.symbol.clone(),
                args: e.args.iter().map(|a| h.map[a].clone()).collect(),
            };
            if target.contains(&image) {
                out.insert(e);
            }
        }
    }
    out
}

pub fn le(a: &str, b: &str) -> Edge {
    Edge::new("le", [a, b])
}

/// The chain `0 ≤ 1 ≤ ... ≤ n-1` as a preorder.
pub fn chain(n: usize) -> Structure {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            edges.push(le(&names[i], &names[j]));
        }
    }
    Structure::new(names, edges)
}
