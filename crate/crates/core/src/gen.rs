//! Seeded random instances: signatures, theories, structures, models,
//! families, morphisms and distance matrices.
//!
//! Every generator takes the RNG explicitly. [`instance_rng`] gives each
//! instance of a suite its own stream, so results do not depend on how
//! instances are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::quantale::{DistMatrix, Flavor, Quantale};
use crate::saturate::{closure, reflect};
use crate::structure::{all_edges, preimage_edge_set, Carrier, Edge, EdgeSet, ElementMap, Morphism, Signature, Structure};
use crate::theory::{check_variable_condition, strip_equality, Formula, Theory};

pub type GenRng = ChaCha8Rng;

/// The RNG for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> GenRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub const VARIABLES: [&str; 4] = ["x", "y", "z", "w"];

/// Carrier `{"0", ..., "n-1"}`.
pub fn carrier_of_size(n: usize) -> Carrier {
    (0..n).map(|i| i.to_string()).collect()
}

/// Between 1 and `max_symbols` symbols `r0, r1, ...` of arity 1 to
/// `max_arity`.
pub fn random_signature(rng: &mut GenRng, max_symbols: usize, max_arity: usize) -> Signature {
    let n = rng.gen_range(1..=max_symbols.max(1));
    Signature::new((0..n).map(|i| (format!("r{i}"), rng.gen_range(1..=max_arity.max(1))))).expect("positive arities")
}

fn random_atom(rng: &mut GenRng, sig: &Signature, vars: &[&str]) -> Edge {
    let symbols: Vec<(&String, &usize)> = sig.symbols.iter().collect();
    let (s, &arity) = *symbols.choose(rng).expect("nonempty signature");
    Edge::new(s.clone(), (0..arity).map(|_| *vars.choose(rng).expect("variables")))
}

/// Up to `max_axioms` equality-free axioms with up to `max_premises`
/// premises each, over the variables `x, y, z, w`. The variable condition is
/// not enforced.
pub fn random_theory(rng: &mut GenRng, sig: &Signature, max_axioms: usize, max_premises: usize) -> Theory {
    let n = rng.gen_range(0..=max_axioms);
    let axioms = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=max_premises);
            let premises: Vec<Edge> = (0..k).map(|_| random_atom(rng, sig, &VARIABLES)).collect();
            Formula::new(premises, random_atom(rng, sig, &VARIABLES))
        })
        .collect();
    Theory {
        signature: sig.clone(),
        axioms,
    }
}

/// Like [`random_theory`], keeping only axioms that satisfy the variable
/// condition on their own. Such theories satisfy it as a whole.
pub fn random_condition_theory(rng: &mut GenRng, sig: &Signature, max_axioms: usize, max_premises: usize) -> Theory {
    let mut t = random_theory(rng, sig, max_axioms, max_premises);
    t.axioms.retain(|ax| {
        check_variable_condition(&Theory {
            signature: sig.clone(),
            axioms: vec![ax.clone()],
        })
        .is_ok()
    });
    t
}

/// Each edge over `carrier` independently with probability `density`.
pub fn random_edges(rng: &mut GenRng, sig: &Signature, carrier: &Carrier, density: f64) -> EdgeSet {
    all_edges(sig, carrier)
        .into_iter()
        .filter(|_| rng.gen_bool(density))
        .collect()
}

/// A structure on `{"0", ...}` with at most `max_carrier` elements and a
/// random edge density.
pub fn random_structure(rng: &mut GenRng, sig: &Signature, max_carrier: usize) -> Structure {
    let n = rng.gen_range(0..=max_carrier);
    let carrier = carrier_of_size(n);
    let density = rng.gen_range(0.0..0.5);
    let edges = random_edges(rng, sig, &carrier, density);
    Structure { carrier, edges }
}

/// The reflection of a random structure, so a model of `theory`.
pub fn random_model(rng: &mut GenRng, theory: &Theory, max_carrier: usize) -> Result<Structure> {
    let x = random_structure(rng, &theory.signature, max_carrier);
    Ok(reflect(theory, &x)?.model)
}

/// Between 0 and `max_members` random models.
pub fn random_family(rng: &mut GenRng, theory: &Theory, max_members: usize, max_carrier: usize) -> Result<Vec<Structure>> {
    let n = rng.gen_range(0..=max_members);
    (0..n).map(|_| random_model(rng, theory, max_carrier)).collect()
}

/// A uniformly random function, or `None` when `cod` is empty and `dom` is
/// not.
pub fn random_function(rng: &mut GenRng, dom: &Carrier, cod: &Carrier) -> Option<ElementMap> {
    let targets: Vec<&String> = cod.iter().collect();
    let mut map = ElementMap::default();
    for x in dom {
        map.map.insert(x.clone(), (*targets.choose(rng)?).clone());
    }
    Some(map)
}

/// A morphism from a random model into `target`, which must be a model.
///
/// Picks a random function from a fresh carrier, a random set of edges
/// that the function maps into `target`, closes it (the preimage of a closed
/// set is closed, so the map stays a morphism) and reflects when the theory
/// has equality, factoring the map through the reflection.
pub fn random_morphism_into(
    rng: &mut GenRng,
    theory: &Theory,
    target: &Structure,
    max_carrier: usize,
) -> Result<Morphism> {
    let n = if target.is_empty() { 0 } else { rng.gen_range(0..=max_carrier) };
    let carrier = carrier_of_size(n);
    let h = random_function(rng, &carrier, &target.carrier).expect("target is nonempty when the domain is");
    let allowed = preimage_edge_set(&h, &target.edges);
    let density = rng.gen_range(0.0..1.0);
    let seed: EdgeSet = allowed.into_iter().filter(|_| rng.gen_bool(density)).collect();
    let edges = closure(&strip_equality(theory), &carrier, &seed)?;
    let y = Structure { carrier, edges };
    if !theory.uses_equality() {
        return Morphism::new(y, target.clone(), h);
    }
    let r = reflect(theory, &y)?;
    let mut factored = ElementMap::default();
    for (a, b) in &h.map {
        let prev = factored.map.insert(r.quotient.apply(a)?.clone(), b.clone());
        debug_assert!(prev.is_none_or(|p| &p == b), "reflection must respect maps into models");
    }
    Morphism::new(r.model, target.clone(), factored)
}

/// A random matrix satisfying the V-category laws (and symmetry for the
/// metric flavors): random entries, raised to the unit on the diagonal,
/// symmetrized if asked, then closed under `d(x,z) ≥ d(x,y) ⊗ d(y,z)`.
/// Separation for [`Flavor::Met`] is not enforced.
pub fn random_vcat_matrix(rng: &mut GenRng, q: &Quantale, carrier: &Carrier, flavor: Flavor) -> DistMatrix {
    let els: Vec<&String> = q.elements().collect();
    let bottom = q.bottom().expect("valid quantale").clone();
    let bias = rng.gen_range(0.2..0.8);
    let mut m = DistMatrix {
        carrier: carrier.clone(),
        d: Default::default(),
    };
    for x in carrier {
        for y in carrier {
            let v = if rng.gen_bool(bias) {
                bottom.clone()
            } else {
                (*els.choose(rng).expect("nonempty")).clone()
            };
            m.set(x, y, v);
        }
    }
    let join2 = |a: &String, b: &String| q.join([a, b]).expect("valid quantale").clone();
    for x in carrier {
        let v = join2(m.get(x, x).expect("set"), q.unit());
        m.set(x, x, v);
    }
    if flavor != Flavor::VCat {
        for x in carrier {
            for y in carrier {
                let v = join2(m.get(x, y).expect("set"), m.get(y, x).expect("set"));
                m.set(x, y, v.clone());
                m.set(y, x, v);
            }
        }
    }
    loop {
        let mut changed = false;
        for x in carrier {
            for y in carrier {
                for z in carrier {
                    let t = q
                        .tensor(m.get(x, y).expect("set"), m.get(y, z).expect("set"))
                        .expect("valid quantale")
                        .clone();
                    let cur = m.get(x, z).expect("set").clone();
                    let next = join2(&cur, &t);
                    if next != cur {
                        m.set(x, z, next);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{pos, preord};
    use crate::quantale::{check_vcat, three_chain};
    use crate::theory::is_model;

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..4).map(|i| instance_rng(7, i).gen()).collect();
        let b: Vec<u64> = (0..4).rev().map(|i| instance_rng(7, i).gen()).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn generated_objects_are_valid() {
        for i in 0..50 {
            let mut rng = instance_rng(1, i);
            let sig = random_signature(&mut rng, 3, 3);
            assert!(sig.validate().is_ok());
            let t = random_condition_theory(&mut rng, &sig, 6, 3);
            assert!(check_variable_condition(&t).is_ok());
            for theory in [preord(), pos()] {
                let target = random_model(&mut rng, &theory, 4).unwrap();
                assert!(is_model(&theory, &target));
                let h = random_morphism_into(&mut rng, &theory, &target, 4).unwrap();
                assert!(h.preserves_edges());
                assert!(is_model(&theory, h.dom()));
            }
            let q = three_chain();
            for flavor in [Flavor::VCat, Flavor::PMet] {
                let m = random_vcat_matrix(&mut rng, &q, &carrier_of_size(3), flavor);
                assert!(check_vcat(&q, &m).is_ok());
                if flavor == Flavor::PMet {
                    assert!(m.is_symmetric());
                }
            }
        }
    }
}
