//! Named theories: preorders, partial orders, and the empty theory.

use crate::structure::{Edge, Signature};
use crate::theory::{Formula, Theory, EQUALITY};

pub const LE: &str = "le";

fn le(a: &str, b: &str) -> Edge {
    Edge::new(LE, [a, b])
}

fn le_signature() -> Signature {
    Signature::new([(LE, 2)]).expect("static signature")
}

/// Reflexivity and transitivity of `le`.
pub fn preord() -> Theory {
    Theory {
        signature: le_signature(),
        axioms: vec![
            Formula::new([], le("x", "x")),
            Formula::new([le("x", "y"), le("y", "z")], le("x", "z")),
        ],
    }
}

/// [`preord`] plus antisymmetry.
pub fn pos() -> Theory {
    let mut t = preord();
    t.axioms.push(Formula::new(
        [le("x", "y"), le("y", "x")],
        Edge::new(EQUALITY, ["x", "y"]),
    ));
    t
}

/// The empty theory over `signature`, whose models are all structures.
pub fn structures(signature: Signature) -> Theory {
    Theory::empty(signature)
}

/// `("Preord", ...)`, `("Pos", ...)` and `("Str", ...)` over `user`.
pub fn builtin_theories(user: &Signature) -> Vec<(&'static str, Theory)> {
    vec![
        ("Preord", preord()),
        ("Pos", pos()),
        ("Str", structures(user.clone())),
    ]
}

pub fn by_name(name: &str, user: &Signature) -> Option<Theory> {
    builtin_theories(user)
        .into_iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::check_variable_condition;

    #[test]
    fn axiom_counts() {
        assert_eq!(preord().axioms.len(), 2);
        assert_eq!(pos().axioms.len(), 3);
        let sig = Signature::new([("r", 3), ("s", 1)]).unwrap();
        assert_eq!(structures(sig.clone()).axioms.len(), 0);
        for (_, t) in builtin_theories(&sig) {
            assert!(check_variable_condition(&t).is_ok());
            assert!(Theory::new(t.signature.clone(), t.axioms.clone()).is_ok());
        }
    }
}
