//! Monotone lax monoidal maps `G: V -> U` between quantales, with the
//! computed left adjoint and the predicates the transfer results depend on.

use std::fmt;
use std::sync::Arc;

use crate::category::EnrichedCategory;
use crate::error::{Error, Result};
use crate::quantale::{Elem, Quantale};
use crate::sieve::Presheaf;

/// Everything [`analyze`] decides about a map. Nothing here is user-supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Flags {
    pub lax_monoidal: bool,
    pub right_adjoint: bool,
    /// Always true: hom-sets between elements of a poset have at most one
    /// arrow, so any functor between posets is injective on them.
    pub faithful: bool,
    pub conservative: bool,
    pub full: bool,
    pub preserves_meets: bool,
    /// `F` preserves the unit and the tensor on the nose.
    pub left_adjoint_strong_monoidal: bool,
    /// `G[F u, r] = [u, G r]` for all `u` in the target and `r` in the source.
    pub cotensor_compatible: bool,
}

/// A named counterexample to one of the flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub property: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChange {
    name: String,
    source: Arc<Quantale>,
    target: Arc<Quantale>,
    map: Vec<Elem>,
    left_adjoint: Vec<Elem>,
    flags: Flags,
    witnesses: Vec<Witness>,
}

pub const FAITHFUL_NOTE: &str =
    "faithful holds for every monotone map: each hom-set of a poset has at most one element";

/// Compute all flags of `map: source -> target` by exhaustion.
pub fn analyze(
    name: impl Into<String>,
    source: Arc<Quantale>,
    target: Arc<Quantale>,
    map: Vec<Elem>,
) -> Result<BaseChange> {
    let name = name.into();
    let (v, u) = (&*source, &*target);
    if map.len() != v.len() {
        return Err(Error::malformed(
            "base change",
            format!("map has {} entries for a carrier of size {}", map.len(), v.len()),
        ));
    }
    if let Some(e) = map.iter().find(|e| e.index() >= u.len()) {
        return Err(Error::malformed("base change", format!("image index {} outside the target", e.0)));
    }
    let g = |a: Elem| map[a.index()];
    let lv = |a: Elem| v.label(a).to_string();
    let lu = |a: Elem| u.label(a).to_string();

    for a in v.elements() {
        for b in v.elements() {
            if v.leq(a, b) && !u.leq(g(a), g(b)) {
                return Err(Error::NotMonotone(format!(
                    "{} <= {} but G({}) = {} is not <= G({}) = {}",
                    lv(a),
                    lv(b),
                    lv(a),
                    lu(g(a)),
                    lv(b),
                    lu(g(b))
                )));
            }
        }
    }

    let mut witnesses = Vec::new();
    let mut flags = Flags { faithful: true, ..Flags::default() };

    let lax_fail = if !u.leq(u.unit(), g(v.unit())) {
        Some(format!("unit {} is not <= G(unit) = {}", lu(u.unit()), lu(g(v.unit()))))
    } else {
        pairs(v).find(|&(a, b)| !u.leq(u.tensor(g(a), g(b)), g(v.tensor(a, b)))).map(|(a, b)| {
            format!("G({0}) ⊗ G({1}) is not <= G({0} ⊗ {1})", lv(a), lv(b))
        })
    };
    flags.lax_monoidal = lax_fail.is_none();
    push(&mut witnesses, "lax_monoidal", lax_fail);

    let left_adjoint: Vec<Elem> = u
        .elements()
        .map(|y| v.meet_all(v.elements().filter(|&w| u.leq(y, g(w)))))
        .collect();
    let f = |y: Elem| left_adjoint[y.index()];

    let adj_fail = u
        .elements()
        .flat_map(|y| v.elements().map(move |w| (y, w)))
        .find(|&(y, w)| v.leq(f(y), w) != u.leq(y, g(w)))
        .map(|(y, w)| format!("F({}) <= {} disagrees with {} <= G({})", lu(y), lv(w), lu(y), lv(w)));
    flags.right_adjoint = adj_fail.is_none();
    push(&mut witnesses, "right_adjoint", adj_fail);

    let cons_fail = pairs(v)
        .find(|&(a, b)| a != b && v.leq(a, b) && g(a) == g(b))
        .map(|(a, b)| format!("{} <= {}, distinct, both sent to {}", lv(a), lv(b), lu(g(a))));
    flags.conservative = cons_fail.is_none();
    push(&mut witnesses, "conservative", cons_fail);

    let full_fail = pairs(v)
        .find(|&(a, b)| u.leq(g(a), g(b)) && !v.leq(a, b))
        .map(|(a, b)| format!("G({}) <= G({}) but {} is not <= {}", lv(a), lv(b), lv(a), lv(b)));
    flags.full = full_fail.is_none();
    push(&mut witnesses, "full", full_fail);

    let meet_fail = if g(v.top()) != u.top() {
        Some(format!("G(top) = {} is not the top", lu(g(v.top()))))
    } else {
        pairs(v)
            .find(|&(a, b)| g(v.meet(a, b)) != u.meet(g(a), g(b)))
            .map(|(a, b)| format!("G({0} ∧ {1}) differs from G({0}) ∧ G({1})", lv(a), lv(b)))
    };
    flags.preserves_meets = meet_fail.is_none();
    push(&mut witnesses, "preserves_meets", meet_fail);

    let strong_fail = if f(u.unit()) != v.unit() {
        Some(format!("F({}) = {} is not the unit", lu(u.unit()), lv(f(u.unit()))))
    } else {
        pairs(u).find(|&(y, y2)| f(u.tensor(y, y2)) != v.tensor(f(y), f(y2))).map(|(y, y2)| {
            format!(
                "F({0} ⊗ {1}) = {2} but F({0}) ⊗ F({1}) = {3}",
                lu(y),
                lu(y2),
                lv(f(u.tensor(y, y2))),
                lv(v.tensor(f(y), f(y2)))
            )
        })
    };
    flags.left_adjoint_strong_monoidal = strong_fail.is_none();
    push(&mut witnesses, "left_adjoint_strong_monoidal", strong_fail);

    let cot_fail = u
        .elements()
        .flat_map(|y| v.elements().map(move |r| (y, r)))
        .find(|&(y, r)| g(v.residuate(f(y), r)) != u.residuate(y, g(r)))
        .map(|(y, r)| {
            format!(
                "G([F({0}), {1}]) = {2} but [{0}, G({1})] = {3}",
                lu(y),
                lv(r),
                lu(g(v.residuate(f(y), r))),
                lu(u.residuate(y, g(r)))
            )
        });
    flags.cotensor_compatible = cot_fail.is_none();
    push(&mut witnesses, "cotensor_compatible", cot_fail);

    Ok(BaseChange { name, source, target, map, left_adjoint, flags, witnesses })
}

fn pairs(q: &Quantale) -> impl Iterator<Item = (Elem, Elem)> + '_ {
    q.elements().flat_map(move |a| q.elements().map(move |b| (a, b)))
}

fn push(out: &mut Vec<Witness>, property: &'static str, w: Option<String>) {
    if let Some(detail) = w {
        out.push(Witness { property, detail });
    }
}

/// Analyze a map given as `(source label, target label)` pairs.
pub fn analyze_labels(
    name: impl Into<String>,
    source: Arc<Quantale>,
    target: Arc<Quantale>,
    pairs: &[(&str, &str)],
) -> Result<BaseChange> {
    let mut map = vec![None; source.len()];
    for &(a, b) in pairs {
        let a = source.elem(a).ok_or_else(|| Error::Unknown { kind: "element", name: a.into() })?;
        let b = target.elem(b).ok_or_else(|| Error::Unknown { kind: "element", name: b.into() })?;
        if map[a.index()].replace(b).is_some() {
            return Err(Error::malformed("base change", format!("`{}` mapped twice", source.label(a))));
        }
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.ok_or_else(|| {
                Error::malformed("base change", format!("no image for `{}`", source.labels()[i]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    analyze(name, source, target, map)
}

impl BaseChange {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Quantale> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Quantale> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a.index()]
    }

    /// The computed left adjoint `F(y) = ⋀{v : y <= G v}`. It is an actual
    /// adjoint only when `flags().right_adjoint` holds.
    #[inline]
    pub fn left_adjoint(&self, y: Elem) -> Elem {
        self.left_adjoint[y.index()]
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn witness(&self, property: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.property == property)
    }

    /// Faithful, conservative, and a right adjoint.
    pub fn meets_transfer_hypotheses(&self) -> bool {
        self.flags.faithful && self.flags.conservative && self.flags.right_adjoint
    }

    pub(crate) fn expect_source(&self, base: &Arc<Quantale>) -> Result<()> {
        if Arc::ptr_eq(base, &self.source) || **base == *self.source {
            Ok(())
        } else {
            Err(Error::BaseMismatch {
                expected: self.source.name().to_string(),
                found: base.name().to_string(),
            })
        }
    }

    /// Why the transfer hypotheses fail, or `None` when they hold.
    pub fn refusal(&self) -> Option<String> {
        let mut reasons = Vec::new();
        for p in ["conservative", "right_adjoint"] {
            if let Some(w) = self.witness(p) {
                reasons.push(format!("not {}: {}", p.replace('_', " "), w.detail));
            }
        }
        (!reasons.is_empty()).then(|| reasons.join("; "))
    }

    /// `G F G = G` and `F G F = F`.
    pub fn triangle_identities(&self) -> bool {
        self.source.elements().all(|a| self.apply(self.left_adjoint(self.apply(a))) == self.apply(a))
            && self
                .target
                .elements()
                .all(|y| self.left_adjoint(self.apply(self.left_adjoint(y))) == self.left_adjoint(y))
    }

    /// `F(y ∨ y') = F y ∨ F y'` and `F(bottom) = bottom`.
    pub fn left_adjoint_preserves_joins(&self) -> bool {
        let (v, u) = (&*self.source, &*self.target);
        self.left_adjoint(u.bottom()) == v.bottom()
            && pairs(u).all(|(a, b)| {
                self.left_adjoint(u.join(a, b)) == v.join(self.left_adjoint(a), self.left_adjoint(b))
            })
    }
}

impl fmt::Display for BaseChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (v, u) = (&*self.source, &*self.target);
        writeln!(f, "base change {}: {} -> {}", self.name, v.name(), u.name())?;
        let cells: Vec<String> =
            v.elements().map(|a| format!("{} -> {}", v.label(a), u.label(self.apply(a)))).collect();
        writeln!(f, "  G: {}", cells.join(", "))?;
        let cells: Vec<String> = u
            .elements()
            .map(|y| format!("{} -> {}", u.label(y), v.label(self.left_adjoint(y))))
            .collect();
        writeln!(f, "  F: {}", cells.join(", "))?;
        let fl = self.flags;
        for (name, val) in [
            ("lax_monoidal", fl.lax_monoidal),
            ("right_adjoint", fl.right_adjoint),
            ("faithful", fl.faithful),
            ("conservative", fl.conservative),
            ("full", fl.full),
            ("preserves_meets", fl.preserves_meets),
            ("left_adjoint_strong_monoidal", fl.left_adjoint_strong_monoidal),
            ("cotensor_compatible", fl.cotensor_compatible),
        ] {
            write!(f, "  {name}: {val}")?;
            if name == "faithful" {
                write!(f, " ({FAITHFUL_NOTE})")?;
            } else if let Some(w) = self.witness(name) {
                write!(f, " (witness: {})", w.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn identity(q: Arc<Quantale>) -> BaseChange {
    let map = q.elements().collect();
    analyze(format!("id_{}", q.name()), q.clone(), q, map).expect("identity is monotone")
}

/// `{0, 1} -> target` sending 0 to the bottom and 1 to the top.
pub fn inclusion_two_element(target: Arc<Quantale>) -> Result<BaseChange> {
    let q2 = Arc::new(crate::quantale::make_two_element());
    let map = vec![target.bottom(), target.top()];
    analyze(format!("Q2->{}", target.name()), q2, target, map)
}

/// Relabelling of `E(n, d)` as `T(n, d)`: `e^-q` goes to `q`.
pub fn neg_log(n: u32, d: u32) -> Result<BaseChange> {
    let e = Arc::new(crate::quantale::make_exponential(n, d)?);
    let t = Arc::new(crate::quantale::make_truncated_additive(n, d)?);
    let map = transport(&e, &t)?;
    analyze(format!("-log:{}->{}", e.name(), t.name()), e, t, map)
}

/// Inverse of [`neg_log`]: `q` goes to `e^-q`.
pub fn exp_neg(n: u32, d: u32) -> Result<BaseChange> {
    let t = Arc::new(crate::quantale::make_truncated_additive(n, d)?);
    let e = Arc::new(crate::quantale::make_exponential(n, d)?);
    let map = transport(&t, &e)?;
    analyze(format!("exp:{}->{}", t.name(), e.name()), t, e, map)
}

fn transport(from: &Quantale, to: &Quantale) -> Result<Vec<Elem>> {
    from.elements()
        .map(|a| {
            let q = from.exponent(a).ok_or_else(|| Error::Precondition("carrier has no exponents".into()))?;
            to.elem_with_exponent(q)
                .ok_or_else(|| Error::Invariant(format!("exponent {q} missing from {}", to.name())))
        })
        .collect()
}

/// `T(n, d) -> {0, 1}` sending distance 0 to 1 and everything else to 0.
pub fn collapse(n: u32, d: u32) -> Result<BaseChange> {
    let t = Arc::new(crate::quantale::make_truncated_additive(n, d)?);
    let q2 = Arc::new(crate::quantale::make_two_element());
    let map = t.elements().map(|a| if a == t.unit() { q2.top() } else { q2.bottom() }).collect();
    analyze(format!("collapse:{}->Q2", t.name()), t, q2, map)
}

/// `G̃P`: pointwise image of a presheaf on `c`, a presheaf on
/// `base_change_category(g, c)`.
pub fn presheaf_base_change(g: &BaseChange, c: &EnrichedCategory, p: &Presheaf) -> Result<Presheaf> {
    let image = crate::category::base_change_category(g, c)?;
    if let Some(w) = p.law_violation(c) {
        return Err(Error::Precondition(format!("not a presheaf: {w}")));
    }
    let out = Presheaf::new(p.values.iter().map(|&e| g.apply(e)).collect());
    if g.flags.lax_monoidal {
        if let Some(w) = out.law_violation(&image) {
            return Err(Error::Invariant(format!("base change broke the presheaf law: {w}")));
        }
    }
    Ok(out)
}
