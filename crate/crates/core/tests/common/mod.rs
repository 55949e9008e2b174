//! Brute-force oracles that share no code paths with the library beyond the
//! quantale tables themselves.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use enriched_sites::category::EnrichedCategory;
use enriched_sites::coverage::Coverage;
use enriched_sites::quantale::{Elem, Quantale};
use enriched_sites::sieve::{Presheaf, Sieve};

/// All maps objects -> carrier in lexicographic order of indices.
pub fn all_maps(q: &Quantale, n: usize) -> Vec<Vec<Elem>> {
    let k = q.len();
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut i| {
            let mut v = vec![Elem(0); n];
            for slot in v.iter_mut().rev() {
                *slot = Elem((i % k) as u32);
                i /= k;
            }
            v
        })
        .collect()
}

pub fn presheaf_law(c: &EnrichedCategory, v: &[Elem]) -> bool {
    let q = c.base();
    let n = c.len();
    (0..n).all(|z| (0..n).all(|w| q.leq(q.tensor(c.hom(w, z), v[z]), v[w])))
}

pub fn sieve_laws(c: &EnrichedCategory, x: usize, v: &[Elem]) -> bool {
    let q = c.base();
    (0..c.len()).all(|z| q.leq(v[z], c.hom(z, x))) && presheaf_law(c, v)
}

pub fn oracle_sieves(c: &EnrichedCategory, x: usize) -> BTreeSet<Sieve> {
    all_maps(c.base(), c.len())
        .into_iter()
        .filter(|v| sieve_laws(c, x, v))
        .map(|v| Sieve::new(x, v))
        .collect()
}

pub fn oracle_presheaves(c: &EnrichedCategory) -> Vec<Presheaf> {
    all_maps(c.base(), c.len()).into_iter().filter(|v| presheaf_law(c, v)).map(Presheaf::new).collect()
}

fn pointwise_leq(q: &Quantale, a: &[Elem], b: &[Elem]) -> bool {
    a.iter().zip(b).all(|(&u, &v)| q.leq(u, v))
}

/// The greatest sieve `T` on `y` with `T(z) ⊗ g <= R(z)` for all `z`.
pub fn oracle_pullback(c: &EnrichedCategory, r: &Sieve, g: Elem, y: usize) -> Sieve {
    let q = c.base();
    let cone: Vec<Sieve> = oracle_sieves(c, y)
        .into_iter()
        .filter(|t| (0..c.len()).all(|z| q.leq(q.tensor(t.values[z], g), r.values[z])))
        .collect();
    let top: Vec<&Sieve> =
        cone.iter().filter(|t| cone.iter().all(|u| pointwise_leq(q, &u.values, &t.values))).collect();
    assert_eq!(top.len(), 1, "pullback cone has no greatest element");
    top[0].clone()
}

/// Sheaf condition in its defining form: every `g`-family on a covering
/// sieve extends to the representable.
pub fn oracle_is_sheaf(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> bool {
    let q = c.base();
    let n = c.len();
    (0..n).all(|x| {
        j.families[x].iter().all(|r| {
            q.elements().all(|g| {
                let hyp = (0..n).all(|z| q.leq(q.tensor(g, r.values[z]), p.values[z]));
                !hyp || (0..n).all(|z| q.leq(q.tensor(g, c.hom(z, x)), p.values[z]))
            })
        })
    })
}

/// Least sheaf above `p` among all presheaves.
pub fn oracle_sheafify(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> Presheaf {
    let q = c.base();
    let above: Vec<Presheaf> = oracle_presheaves(c)
        .into_iter()
        .filter(|s| pointwise_leq(q, &p.values, &s.values) && oracle_is_sheaf(c, s, j))
        .collect();
    let least: Vec<&Presheaf> =
        above.iter().filter(|s| above.iter().all(|t| pointwise_leq(q, &s.values, &t.values))).collect();
    assert_eq!(least.len(), 1, "no least sheaf above");
    least[0].clone()
}

/// Every subset of the sieve universe satisfying T1 and T2, counted directly
/// from the pullback oracle.
pub fn oracle_coverage_count(c: &EnrichedCategory) -> usize {
    let q = c.base();
    let n = c.len();
    let universe: Vec<Vec<Sieve>> = (0..n).map(|x| oracle_sieves(c, x).into_iter().collect()).collect();
    let flat: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (0..universe[x].len()).map(move |i| (x, i))).collect();
    assert!(flat.len() <= 20);
    let index = |y: usize, s: &Sieve| flat.iter().position(|&(x, i)| x == y && universe[x][i] == *s).unwrap();
    let mut pulls: Vec<Vec<usize>> = Vec::new();
    for &(x, i) in &flat {
        let mut v = Vec::new();
        for y in 0..n {
            for g in q.elements().filter(|&g| q.leq(g, c.hom(y, x))) {
                v.push(index(y, &oracle_pullback(c, &universe[x][i], g, y)));
            }
        }
        pulls.push(v);
    }
    let maximal: Vec<usize> = (0..n)
        .map(|x| index(x, &Sieve::new(x, (0..n).map(|z| c.hom(z, x)).collect())))
        .collect();
    (0u64..1 << flat.len())
        .filter(|m| maximal.iter().all(|&k| m >> k & 1 == 1))
        .filter(|m| (0..flat.len()).filter(|k| m >> k & 1 == 1).all(|k| pulls[k].iter().all(|&p| m >> p & 1 == 1)))
        .count()
}

/// A valid Lawvere space from arbitrary distances: zero diagonal, then
/// close under the capped triangle inequality.
pub fn lawvere_closure(base: Arc<Quantale>, raw: &[Vec<u32>]) -> EnrichedCategory {
    let n = raw.len();
    let mut d: Vec<Vec<Elem>> = raw.iter().map(|r| r.iter().map(|&k| Elem(k % base.len() as u32)).collect()).collect();
    for (x, row) in d.iter_mut().enumerate() {
        row[x] = base.unit();
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = base.join(d[i][j], base.tensor(d[k][j], d[i][k]));
            }
        }
    }
    let objects = (0..n).map(|i| format!("p{i}")).collect();
    EnrichedCategory::new(base, objects, d).unwrap()
}
