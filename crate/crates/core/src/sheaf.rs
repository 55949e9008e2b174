//! Sheaf condition, sheafification and density over a poset base.
//!
//! Natural transformations `R => P` between value maps have a single
//! truth value `Nat(R, P) = ⋀_z [R(z), P(z)]`, so the gluing condition for
//! `R ∈ J(x)` reads `g <= Nat(R, P)  implies  g <= Nat(C(-, x), P)`.

use std::sync::Arc;

use crate::base_change::{presheaf_base_change, BaseChange};
use crate::category::{base_change_category, EnrichedCategory};
use crate::coverage::{coverage_image, Coverage};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::quantale::Elem;
use crate::sieve::{self, enumerate_presheaves, Presheaf, Sieve};

/// `Nat(R, P)`.
pub fn nat(c: &EnrichedCategory, r: &[Elem], p: &[Elem]) -> Elem {
    let q = c.base();
    q.meet_all(r.iter().zip(p).map(|(&a, &b)| q.residuate(a, b)))
}

/// A triple `(x, R, g)` at which gluing fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafWitness {
    pub x: usize,
    pub sieve: Sieve,
    pub g: Elem,
}

impl SheafWitness {
    pub fn describe(&self, c: &EnrichedCategory) -> String {
        format!(
            "at {} the sieve {} with g = {} glues to nothing",
            c.label(self.x),
            self.sieve.show(c),
            c.base().label(self.g)
        )
    }
}

/// The first failing `(x, R, g)`, quantifying over every `g` in the carrier.
pub fn sheaf_witness(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> Option<SheafWitness> {
    let q = c.base();
    let n = c.len();
    for x in 0..n {
        for r in &j.families[x] {
            for g in q.elements() {
                let hyp = (0..n).all(|z| q.leq(q.tensor(g, r.values[z]), p.values[z]));
                let concl = (0..n).all(|z| q.leq(q.tensor(g, c.hom(z, x)), p.values[z]));
                if hyp && !concl {
                    return Some(SheafWitness { x, sieve: r.clone(), g });
                }
            }
        }
    }
    None
}

pub fn is_sheaf(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> bool {
    sheaf_witness(c, p, j).is_none()
}

/// One step `ΣP(x) = ⋁_{R ∈ J(x)} Nat(R, P)`.
pub fn sigma(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> Presheaf {
    let q = c.base();
    Presheaf::new(
        (0..c.len()).map(|x| q.join_all(j.families[x].iter().map(|r| nat(c, &r.values, &p.values)))).collect(),
    )
}

/// `ΣΣP`.
pub fn sheafify(c: &EnrichedCategory, p: &Presheaf, j: &Coverage<Sieve>) -> Presheaf {
    sigma(c, &sigma(c, p, j), j)
}

/// `R̂(z) = C(z, x) ∧ ℓR(z)`: the pullback of the sheafified inclusion
/// `ℓR -> ℓC(-, x)` along the unit `C(-, x) -> ℓC(-, x)`.
pub fn closure_of_subpresheaf(c: &EnrichedCategory, r: &Sieve, j: &Coverage<Sieve>) -> Result<Sieve> {
    if let Some(v) = sieve::check_sieve(c, r).first() {
        return Err(Error::Precondition(format!("not a sieve: {}", v.describe(c))));
    }
    let q = c.base();
    let l = sheafify(c, &r.as_presheaf(), j);
    Ok(Sieve::new(r.target, (0..c.len()).map(|z| q.meet(c.hom(z, r.target), l.values[z])).collect()))
}

pub fn is_dense(c: &EnrichedCategory, r: &Sieve, j: &Coverage<Sieve>) -> Result<bool> {
    Ok(closure_of_subpresheaf(c, r, j)? == sieve::maximal_sieve(c, r.target)?)
}

/// Every sheaf for `j`, by enumeration of all presheaves.
pub fn enumerate_sheaves(c: &EnrichedCategory, j: &Coverage<Sieve>, limits: &Limits) -> Result<Vec<Presheaf>> {
    Ok(enumerate_presheaves(c, limits)?.into_iter().filter(|p| is_sheaf(c, p, j)).collect())
}

/// The least sheaf above `p`, found by enumeration. `None` if no sheaf lies
/// above `p`, or if the sheaves above `p` have no least element.
pub fn least_sheaf_above(
    c: &EnrichedCategory,
    p: &Presheaf,
    sheaves: &[Presheaf],
) -> Option<Presheaf> {
    let above: Vec<&Presheaf> = sheaves.iter().filter(|s| p.leq(c, s)).collect();
    above.iter().find(|s| above.iter().all(|t| s.leq(c, t))).map(|s| (*s).clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommuteReport {
    /// `G̃(ℓ_V P)`.
    pub image_of_sheafification: Presheaf,
    /// `ℓ_U(G̃P)` for `G̃J`.
    pub sheafification_of_image: Presheaf,
    pub equal: bool,
    /// `G̃(ℓ_V P) <= ℓ_U(G̃P)` pointwise.
    pub image_below: bool,
    /// `ℓ_U(G̃P) <= G̃(ℓ_V P)` pointwise.
    pub image_above: bool,
    /// Equality is guaranteed for this map.
    pub equality_expected: bool,
    pub category: Arc<EnrichedCategory>,
}

/// Compare `G̃(ℓP)` with `ℓ(G̃P)`.
///
/// Refused unless `g` is faithful, conservative and a right adjoint.
/// Equality is expected when `g` is also full; if in addition the left
/// adjoint is strong monoidal a mismatch is an invariant error.
pub fn check_sheafification_commutes(
    g: &BaseChange,
    c: &EnrichedCategory,
    p: &Presheaf,
    j: &Coverage<Sieve>,
) -> Result<CommuteReport> {
    if let Some(why) = g.refusal() {
        return Err(Error::Hypothesis(why));
    }
    let image = Arc::new(base_change_category(g, c)?);
    let lp = sheafify(c, p, j);
    let lhs = presheaf_base_change(g, c, &lp)?;
    let gp = presheaf_base_change(g, c, p)?;
    let gj = coverage_image(g, c, j)?;
    let rhs = sheafify(&image, &gp, &gj);
    let equal = lhs == rhs;
    let equality_expected = g.flags().full;
    if equality_expected && g.flags().left_adjoint_strong_monoidal && !equal {
        return Err(Error::Invariant(format!(
            "sheafification does not commute with {}: {} vs {}",
            g.name(),
            lhs.show(&image),
            rhs.show(&image)
        )));
    }
    Ok(CommuteReport {
        image_below: lhs.leq(&image, &rhs),
        image_above: rhs.leq(&image, &lhs),
        image_of_sheafification: lhs,
        sheafification_of_image: rhs,
        equal,
        equality_expected,
        category: image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{discrete, indiscrete};
    use crate::instances;

    #[test]
    fn everything_is_a_sheaf_for_indiscrete() {
        let c = instances::p2();
        let j = indiscrete(&c);
        for p in enumerate_presheaves(&c, &Limits::default()).unwrap() {
            assert!(is_sheaf(&c, &p, &j));
            assert_eq!(sheafify(&c, &p, &j), p);
        }
    }

    #[test]
    fn representable_on_one_object_discrete() {
        let c = instances::one_object_q2();
        let j = discrete(&c, &Limits::default()).unwrap();
        let y = Presheaf::representable(&c, 0).unwrap();
        assert!(is_sheaf(&c, &y, &j));
    }

    #[test]
    fn zero_sieve_forces_gluing() {
        let c = instances::p2();
        let mut j = indiscrete(&c);
        j.families[0].insert(sieve::zero_sieve(&c, 0).unwrap());
        // the unit is the top of T(3,1), and the top presheaf always glues
        assert!(is_sheaf(&c, &Presheaf::constant(&c, c.base().unit()), &j));
        let p = Presheaf::constant(&c, c.base().bottom());
        let w = sheaf_witness(&c, &p, &j).expect("must fail");
        assert_eq!((w.x, w.g), (0, c.base().unit()));
        assert_eq!(w.sieve, sieve::zero_sieve(&c, 0).unwrap());
        let y = Presheaf::representable(&c, 1).unwrap();
        assert!(!is_sheaf(&c, &y, &j));
    }

    #[test]
    fn density_basics() {
        let c = instances::p2();
        let j = indiscrete(&c);
        assert!(is_dense(&c, &sieve::maximal_sieve(&c, 0).unwrap(), &j).unwrap());
        assert!(!is_dense(&c, &sieve::zero_sieve(&c, 0).unwrap(), &j).unwrap());
    }
}
