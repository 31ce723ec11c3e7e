//! Enumeration of functions between finite carriers and of the morphisms
//! among them.

use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::structure::{Carrier, ElementMap, Structure};

/// Refuse to enumerate more functions than this.
pub const MAX_FUNCTIONS: u64 = 50_000_000;

const BLOCK: u64 = 4096;

/// `|cod|^|dom|`, or `TooLarge` past [`MAX_FUNCTIONS`].
pub fn function_count(dom: &Carrier, cod: &Carrier) -> Result<u64> {
    let mut n: u64 = 1;
    for _ in dom {
        n = n
            .checked_mul(cod.len() as u64)
            .filter(|&n| n <= MAX_FUNCTIONS)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "{}^{} functions exceed the enumeration limit",
                    cod.len(),
                    dom.len()
                ))
            })?;
    }
    Ok(n)
}

fn decode(index: u64, dom: &[&String], cod: &[&String]) -> ElementMap {
    let base = cod.len() as u64;
    let mut rest = index;
    let mut digits = vec![0usize; dom.len()];
    for d in digits.iter_mut().rev() {
        *d = (rest % base) as usize;
        rest /= base;
    }
    ElementMap::new(dom.iter().zip(digits).map(|(x, d)| ((*x).clone(), cod[d].clone())))
}

/// Every function `dom → cod`, in lexicographic order of the value tuple
/// (domain and codomain both taken in sorted order).
pub fn functions(dom: &Carrier, cod: &Carrier) -> Result<Vec<ElementMap>> {
    let total = function_count(dom, cod)?;
    let d: Vec<&String> = dom.iter().collect();
    let c: Vec<&String> = cod.iter().collect();
    Ok((0..total).map(|i| decode(i, &d, &c)).collect())
}

/// True iff `h` maps every edge of `a` to an edge of `x`. Arguments outside
/// the domain of `h` count as failure.
pub fn preserves(h: &ElementMap, a: &Structure, x: &Structure) -> bool {
    a.edges.iter().all(|e| {
        crate::structure::transport_edge(h, e).is_ok_and(|t| x.edges.contains(&t))
    })
}

/// Every edge-preserving function `a → x`, in the order of [`functions`].
pub fn hom_maps(a: &Structure, x: &Structure, mode: Parallelism) -> Result<Vec<ElementMap>> {
    let total = function_count(&a.carrier, &x.carrier)?;
    let d: Vec<&String> = a.carrier.iter().collect();
    let c: Vec<&String> = x.carrier.iter().collect();
    let blocks = total.div_ceil(BLOCK) as usize;
    let mode = if total < BLOCK { Parallelism::Sequential } else { mode };
    let found = par::map_range(mode, blocks, |b| {
        let lo = b as u64 * BLOCK;
        let hi = (lo + BLOCK).min(total);
        (lo..hi)
            .map(|i| decode(i, &d, &c))
            .filter(|h| preserves(h, a, x))
            .collect::<Vec<_>>()
    });
    Ok(found.into_iter().flatten().collect())
}
