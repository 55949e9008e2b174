//! Sieves and presheaves on an enriched category, stored as value maps.
//!
//! Over a poset base every subobject class has exactly one representative,
//! so a sieve on `x` is just the map `z -> R(z)` with `R(z) <= C(z, x)`.
//! Value maps do not carry their category; operations take it explicitly.

use std::fmt;

use crate::base_change::BaseChange;
use crate::category::EnrichedCategory;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::par;
use crate::quantale::{Elem, QuantaleKind};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sieve {
    pub target: usize,
    pub values: Vec<Elem>,
}

/// A value map satisfying only the presheaf law.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Presheaf {
    pub values: Vec<Elem>,
}

/// `g <= C(y, x)`, i.e. a generalized element of the hom from `y` to the
/// target of whatever sieve it is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralizedElement {
    pub g: Elem,
    pub source: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SieveViolation {
    Shape(String),
    /// `R(z) <= C(z, x)` fails.
    Bound { z: usize },
    /// `C(z', z) ⊗ R(z) <= R(z')` fails.
    Naturality { z: usize, z2: usize },
}

impl SieveViolation {
    pub fn describe(&self, c: &EnrichedCategory) -> String {
        match self {
            SieveViolation::Shape(s) => s.clone(),
            SieveViolation::Bound { z } => format!("bound fails at {}", c.label(*z)),
            SieveViolation::Naturality { z, z2 } => {
                format!("naturality fails from {} to {}", c.label(*z), c.label(*z2))
            }
        }
    }
}

fn check_object(c: &EnrichedCategory, x: usize) -> Result<()> {
    if x < c.len() {
        Ok(())
    } else {
        Err(Error::Unknown { kind: "object", name: format!("#{x}") })
    }
}

fn shape(c: &EnrichedCategory, values: &[Elem]) -> Option<String> {
    if values.len() != c.len() {
        Some(format!("{} values for {} objects", values.len(), c.len()))
    } else if values.iter().any(|e| e.index() >= c.base().len()) {
        Some("value outside the base carrier".into())
    } else {
        None
    }
}

fn naturality(c: &EnrichedCategory, values: &[Elem]) -> Option<(usize, usize)> {
    let q = c.base();
    let n = c.len();
    (0..n)
        .flat_map(|z| (0..n).map(move |z2| (z, z2)))
        .find(|&(z, z2)| !q.leq(q.tensor(c.hom(z2, z), values[z]), values[z2]))
}

impl Sieve {
    pub fn new(target: usize, values: Vec<Elem>) -> Self {
        Sieve { target, values }
    }

    pub fn from_labels(c: &EnrichedCategory, target: &str, labels: &[&str]) -> Result<Self> {
        let x = c.object(target)?;
        let values = labels
            .iter()
            .map(|l| c.base().elem(l).ok_or_else(|| Error::Unknown { kind: "element", name: l.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sieve::new(x, values))
    }

    #[inline]
    pub fn value(&self, z: usize) -> Elem {
        self.values[z]
    }

    pub fn as_presheaf(&self) -> Presheaf {
        Presheaf { values: self.values.clone() }
    }

    pub fn show(&self, c: &EnrichedCategory) -> String {
        let cells: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(z, &e)| format!("{}: {}", c.label(z), c.base().label(e)))
            .collect();
        format!("on {} {{{}}}", c.label(self.target), cells.join(", "))
    }
}

pub fn maximal_sieve(c: &EnrichedCategory, x: usize) -> Result<Sieve> {
    check_object(c, x)?;
    Ok(Sieve::new(x, (0..c.len()).map(|z| c.hom(z, x)).collect()))
}

/// The bottom subobject: every value is the bottom of the base.
pub fn zero_sieve(c: &EnrichedCategory, x: usize) -> Result<Sieve> {
    check_object(c, x)?;
    Ok(Sieve::new(x, vec![c.base().bottom(); c.len()]))
}

/// Every violated sieve law, bound failures first.
pub fn check_sieve(c: &EnrichedCategory, s: &Sieve) -> Vec<SieveViolation> {
    if s.target >= c.len() {
        return vec![SieveViolation::Shape(format!("target #{} is not an object", s.target))];
    }
    if let Some(msg) = shape(c, &s.values) {
        return vec![SieveViolation::Shape(msg)];
    }
    let q = c.base();
    let n = c.len();
    let mut out: Vec<SieveViolation> =
        (0..n).filter(|&z| !q.leq(s.values[z], c.hom(z, s.target))).map(|z| SieveViolation::Bound { z }).collect();
    for z in 0..n {
        for z2 in 0..n {
            if !q.leq(q.tensor(c.hom(z2, z), s.values[z]), s.values[z2]) {
                out.push(SieveViolation::Naturality { z, z2 });
            }
        }
    }
    out
}

pub fn is_sieve(c: &EnrichedCategory, s: &Sieve) -> bool {
    check_sieve(c, s).is_empty()
}

fn admissible(c: &EnrichedCategory, x: usize, f: GeneralizedElement) -> Result<()> {
    check_object(c, f.source)?;
    let q = c.base();
    if f.g.index() >= q.len() {
        return Err(Error::malformed("generalized element", "value outside the base carrier"));
    }
    if !q.leq(f.g, c.hom(f.source, x)) {
        return Err(Error::Precondition(format!(
            "generalized element ({}, {}) is not below C({}, {}) = {}",
            q.label(f.g),
            c.label(f.source),
            c.label(f.source),
            c.label(x),
            q.label(c.hom(f.source, x))
        )));
    }
    Ok(())
}

/// `R_f(z) = C(z, y) ∧ [g, R(z)]`, the pullback of `R` along `f = (g, y)`.
pub fn pullback_sieve(c: &EnrichedCategory, s: &Sieve, f: GeneralizedElement) -> Result<Sieve> {
    admissible(c, s.target, f)?;
    let out = pullback_unchecked(c, s, f);
    if let Some(v) = check_sieve(c, &out).first() {
        return Err(Error::Invariant(format!("pullback is not a sieve: {}", v.describe(c))));
    }
    Ok(out)
}

pub(crate) fn pullback_unchecked(c: &EnrichedCategory, s: &Sieve, f: GeneralizedElement) -> Sieve {
    let q = c.base();
    let values = (0..c.len()).map(|z| q.meet(c.hom(z, f.source), q.residuate(f.g, s.values[z]))).collect();
    Sieve::new(f.source, values)
}

fn example_formula(c: &EnrichedCategory, s: &Sieve, q: Elem, y: usize) -> Sieve {
    let b = c.base();
    let values = (0..c.len()).map(|z| b.meet(s.values[z], b.residuate(q, c.hom(z, y)))).collect();
    Sieve::new(y, values)
}

/// `r_q(z) = max{r(z), max(0, d(z, y) - q)}` over a truncated additive base,
/// evaluated literally. The result need not be a sieve.
pub fn pullback_lawvere(c: &EnrichedCategory, s: &Sieve, q: Elem, y: usize) -> Result<Sieve> {
    if !matches!(c.base().kind(), QuantaleKind::TruncatedAdditive { .. }) {
        return Err(Error::Precondition(format!("{} is not a truncated additive base", c.base().name())));
    }
    admissible(c, s.target, GeneralizedElement { g: q, source: y })?;
    Ok(example_formula(c, s, q, y))
}

/// `r_q(z) = min{r(z), U(q, L(z, y))}` over an exponential base, evaluated
/// literally. The result need not be a sieve.
pub fn pullback_proxet(c: &EnrichedCategory, s: &Sieve, q: Elem, y: usize) -> Result<Sieve> {
    if !matches!(c.base().kind(), QuantaleKind::Exponential { .. }) {
        return Err(Error::Precondition(format!("{} is not an exponential base", c.base().name())));
    }
    admissible(c, s.target, GeneralizedElement { g: q, source: y })?;
    Ok(example_formula(c, s, q, y))
}

/// The normative pullback next to the literal pointwise formula for metric
/// bases, with the sieve laws the latter breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackComparison {
    pub generic: Sieve,
    pub literal: Sieve,
    pub literal_violations: Vec<SieveViolation>,
}

impl PullbackComparison {
    pub fn agree(&self) -> bool {
        self.generic == self.literal
    }
}

pub fn compare_pullbacks(c: &EnrichedCategory, s: &Sieve, f: GeneralizedElement) -> Result<PullbackComparison> {
    let generic = pullback_sieve(c, s, f)?;
    let literal = example_formula(c, s, f.g, f.source);
    let literal_violations = check_sieve(c, &literal);
    Ok(PullbackComparison { generic, literal, literal_violations })
}

/// Every sieve on `x`, in lexicographic order of value indices.
pub fn enumerate_sieves(c: &EnrichedCategory, x: usize, limits: &Limits) -> Result<Vec<Sieve>> {
    check_object(c, x)?;
    let q = c.base();
    let space = (q.len() as u128).checked_pow(c.len() as u32).unwrap_or(u128::MAX);
    Limits::guard("sieve enumeration", space, limits.sieve_candidates)?;
    let choices: Vec<Vec<Elem>> = (0..c.len()).map(|z| q.down_set(c.hom(z, x))).collect();
    let mut out: Vec<Sieve> = enumerate_maps(&choices, |values| naturality(c, values).is_none())
        .into_iter()
        .map(|values| Sieve::new(x, values))
        .collect();
    out.sort();
    Ok(out)
}

/// Every presheaf on `c`, in lexicographic order of value indices.
pub fn enumerate_presheaves(c: &EnrichedCategory, limits: &Limits) -> Result<Vec<Presheaf>> {
    let q = c.base();
    let space = (q.len() as u128).checked_pow(c.len() as u32).unwrap_or(u128::MAX);
    Limits::guard("presheaf enumeration", space, limits.sieve_candidates)?;
    let choices: Vec<Vec<Elem>> = vec![q.elements().collect(); c.len()];
    let mut out: Vec<Presheaf> = enumerate_maps(&choices, |values| naturality(c, values).is_none())
        .into_iter()
        .map(|values| Presheaf { values })
        .collect();
    out.sort();
    Ok(out)
}

fn enumerate_maps<F>(choices: &[Vec<Elem>], keep: F) -> Vec<Vec<Elem>>
where
    F: Fn(&[Elem]) -> bool + Sync + Send,
{
    let total: u64 = choices.iter().map(|c| c.len() as u64).product();
    par::filter_map_range(total, |mut i| {
        let mut values = Vec::with_capacity(choices.len());
        for ch in choices {
            values.push(ch[(i % ch.len() as u64) as usize]);
            i /= ch.len() as u64;
        }
        keep(&values).then_some(values)
    })
}

fn same_target(a: &Sieve, b: &Sieve) -> Result<()> {
    if a.target != b.target || a.values.len() != b.values.len() {
        return Err(Error::Precondition("sieves on different objects".into()));
    }
    Ok(())
}

pub fn sieve_meet(c: &EnrichedCategory, a: &Sieve, b: &Sieve) -> Result<Sieve> {
    same_target(a, b)?;
    let q = c.base();
    Ok(Sieve::new(a.target, a.values.iter().zip(&b.values).map(|(&u, &v)| q.meet(u, v)).collect()))
}

pub fn sieve_join(c: &EnrichedCategory, a: &Sieve, b: &Sieve) -> Result<Sieve> {
    same_target(a, b)?;
    let q = c.base();
    Ok(Sieve::new(a.target, a.values.iter().zip(&b.values).map(|(&u, &v)| q.join(u, v)).collect()))
}

pub fn sieve_leq(c: &EnrichedCategory, a: &Sieve, b: &Sieve) -> Result<bool> {
    same_target(a, b)?;
    let q = c.base();
    Ok(a.values.iter().zip(&b.values).all(|(&u, &v)| q.leq(u, v)))
}

/// `G̃R`, a sieve on the same object of `base_change_category(g, c)`.
pub fn base_change_sieve(g: &BaseChange, c: &EnrichedCategory, s: &Sieve) -> Result<Sieve> {
    g.expect_source(c.base())?;
    if let Some(msg) = shape(c, &s.values) {
        return Err(Error::malformed("sieve", msg));
    }
    Ok(Sieve::new(s.target, s.values.iter().map(|&e| g.apply(e)).collect()))
}

impl Presheaf {
    pub fn new(values: Vec<Elem>) -> Self {
        Presheaf { values }
    }

    pub fn from_labels(c: &EnrichedCategory, labels: &[&str]) -> Result<Self> {
        let values = labels
            .iter()
            .map(|l| c.base().elem(l).ok_or_else(|| Error::Unknown { kind: "element", name: l.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presheaf { values })
    }

    pub fn constant(c: &EnrichedCategory, e: Elem) -> Self {
        Presheaf { values: vec![e; c.len()] }
    }

    /// `C(-, x)`.
    pub fn representable(c: &EnrichedCategory, x: usize) -> Result<Self> {
        check_object(c, x)?;
        Ok(Presheaf { values: (0..c.len()).map(|z| c.hom(z, x)).collect() })
    }

    #[inline]
    pub fn value(&self, z: usize) -> Elem {
        self.values[z]
    }

    pub fn law_violation(&self, c: &EnrichedCategory) -> Option<String> {
        if let Some(msg) = shape(c, &self.values) {
            return Some(msg);
        }
        naturality(c, &self.values).map(|(z, z2)| {
            SieveViolation::Naturality { z, z2 }.describe(c)
        })
    }

    pub fn is_presheaf(&self, c: &EnrichedCategory) -> bool {
        self.law_violation(c).is_none()
    }

    pub fn leq(&self, c: &EnrichedCategory, other: &Presheaf) -> bool {
        let q = c.base();
        self.values.iter().zip(&other.values).all(|(&u, &v)| q.leq(u, v))
    }

    pub fn show(&self, c: &EnrichedCategory) -> String {
        let cells: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(z, &e)| format!("{}: {}", c.label(z), c.base().label(e)))
            .collect();
        format!("{{{}}}", cells.join(", "))
    }
}

/// A sieve shown against its category.
pub struct Shown<'a, T>(pub &'a EnrichedCategory, pub &'a T);

impl fmt::Display for Shown<'_, Sieve> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1.show(self.0))
    }
}

impl fmt::Display for Shown<'_, Presheaf> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1.show(self.0))
    }
}

/// Sieves on every object, or an empty list for the empty category.
pub fn enumerate_all_sieves(c: &EnrichedCategory, limits: &Limits) -> Result<Vec<Vec<Sieve>>> {
    (0..c.len()).map(|x| enumerate_sieves(c, x, limits)).collect()
}
