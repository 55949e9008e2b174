//! Finite categories enriched in a quantale.
//!
//! Hom convention: `hom(z, x)` is `C(z, x)`, contravariant slot first, so the
//! column `hom(-, x)` is the representable presheaf a sieve on `x` sits in.

use std::fmt;
use std::sync::Arc;

use crate::base_change::BaseChange;
use crate::error::{Error, Result};
use crate::quantale::{Elem, Quantale};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrichedCategory {
    base: Arc<Quantale>,
    objects: Vec<String>,
    hom: Vec<Vec<Elem>>,
}

/// A failed identity or composition inequality, by object index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    /// `unit <= hom(x, x)` fails.
    Identity { x: usize },
    /// `hom(y, z) ⊗ hom(x, y) <= hom(x, z)` fails.
    Composition { x: usize, y: usize, z: usize },
}

impl CategoryViolation {
    pub fn describe(&self, c: &EnrichedCategory) -> String {
        match *self {
            CategoryViolation::Identity { x } => {
                format!("identity law fails at {}", c.label(x))
            }
            CategoryViolation::Composition { x, y, z } => format!(
                "composition law fails at ({}, {}, {})",
                c.label(x),
                c.label(y),
                c.label(z)
            ),
        }
    }
}

impl EnrichedCategory {
    /// Structural construction: square matrix, entries in the base, distinct
    /// labels. The enrichment laws are checked separately by
    /// [`check_category`](Self::check_category).
    pub fn new(base: Arc<Quantale>, objects: Vec<String>, hom: Vec<Vec<Elem>>) -> Result<Self> {
        let n = objects.len();
        if hom.len() != n || hom.iter().any(|r| r.len() != n) {
            return Err(Error::malformed("category", format!("hom matrix is not {n}x{n}")));
        }
        if hom.iter().flatten().any(|e| e.index() >= base.len()) {
            return Err(Error::malformed("category", "hom entry outside the base carrier"));
        }
        for (i, o) in objects.iter().enumerate() {
            if objects[..i].contains(o) {
                return Err(Error::malformed("category", format!("duplicate object `{o}`")));
            }
        }
        Ok(EnrichedCategory { base, objects, hom })
    }

    /// Build from element labels, `rows[z][x]` being the label of `C(z, x)`.
    pub fn from_labels(base: Arc<Quantale>, objects: &[&str], rows: &[&[&str]]) -> Result<Self> {
        let hom = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| {
                        base.elem(l).ok_or_else(|| Error::Unknown {
                            kind: "element",
                            name: l.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, objects.iter().map(|s| s.to_string()).collect(), hom)
    }

    pub fn base(&self) -> &Arc<Quantale> {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn label(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object(&self, label: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::Unknown { kind: "object", name: label.to_string() })
    }

    /// `C(z, x)`.
    #[inline]
    pub fn hom(&self, z: usize, x: usize) -> Elem {
        self.hom[z][x]
    }

    pub fn hom_matrix(&self) -> &[Vec<Elem>] {
        &self.hom
    }

    pub fn check_category(&self) -> Vec<CategoryViolation> {
        let q = &self.base;
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            if !q.leq(q.unit(), self.hom(x, x)) {
                out.push(CategoryViolation::Identity { x });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !q.leq(q.tensor(self.hom(y, z), self.hom(x, y)), self.hom(x, z)) {
                        out.push(CategoryViolation::Composition { x, y, z });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.check_category().is_empty()
    }

    /// The underlying ordinary category, which is a preorder here:
    /// `x -> y` iff `unit <= C(x, y)`.
    pub fn underlying_preorder(&self) -> Preorder {
        let q = &self.base;
        let n = self.len();
        Preorder {
            rel: (0..n).map(|x| (0..n).map(|y| q.leq(q.unit(), self.hom(x, y))).collect()).collect(),
        }
    }
}

impl fmt::Display for EnrichedCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "category over {} with objects [{}]", self.base.name(), self.objects.join(", "))?;
        for (z, row) in self.hom.iter().enumerate() {
            let cells: Vec<&str> = row.iter().map(|&e| self.base.label(e)).collect();
            writeln!(f, "  C({}, -) = [{}]", self.objects[z], cells.join(", "))?;
        }
        Ok(())
    }
}

/// A binary relation on the objects of a category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preorder {
    pub rel: Vec<Vec<bool>>,
}

impl Preorder {
    pub fn holds(&self, x: usize, y: usize) -> bool {
        self.rel[x][y]
    }

    pub fn is_preorder(&self) -> bool {
        let n = self.rel.len();
        (0..n).all(|x| self.rel[x][x])
            && (0..n).all(|x| {
                (0..n).all(|y| (0..n).all(|z| !(self.rel[x][y] && self.rel[y][z]) || self.rel[x][z]))
            })
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.rel.len();
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| self.rel[x][y]).collect()
    }
}

/// `G_*C`: same objects, every hom value pushed through `g`.
///
/// The result is checked against the enrichment laws; lax monoidality of `g`
/// guarantees them, so a failure is reported as an invariant violation.
pub fn base_change_category(g: &BaseChange, c: &EnrichedCategory) -> Result<EnrichedCategory> {
    g.expect_source(c.base())?;
    let hom = c.hom.iter().map(|row| row.iter().map(|&e| g.apply(e)).collect()).collect();
    let out = EnrichedCategory::new(g.target().clone(), c.objects.clone(), hom)?;
    if g.flags().lax_monoidal {
        if let Some(v) = out.check_category().first() {
            return Err(Error::Invariant(format!(
                "base change along a lax monoidal map broke the category: {}",
                v.describe(&out)
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::quantale::{make_truncated_additive, make_two_element};

    #[test]
    fn p2_is_valid_and_discrete_underneath() {
        let p2 = instances::p2();
        assert!(p2.check_category().is_empty());
        let pre = p2.underlying_preorder();
        assert_eq!(pre.pairs(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn broken_identity_is_reported() {
        let t3 = Arc::new(make_truncated_additive(3, 1).unwrap());
        let bad = EnrichedCategory::from_labels(t3, &["x", "y"], &[&["1", "1"], &["1", "0"]]).unwrap();
        let v = bad.check_category();
        assert!(v.contains(&CategoryViolation::Identity { x: 0 }));
        assert!(!v.contains(&CategoryViolation::Identity { x: 1 }));
    }

    #[test]
    fn one_object_and_total_relation() {
        let q2 = Arc::new(make_two_element());
        let c = EnrichedCategory::from_labels(q2.clone(), &["*"], &[&["1"]]).unwrap();
        assert!(c.is_valid());
        let all = EnrichedCategory::from_labels(q2, &["a", "b"], &[&["1", "1"], &["1", "1"]]).unwrap();
        assert!(all.is_valid());
        assert_eq!(all.underlying_preorder().pairs().len(), 4);
    }

    #[test]
    fn chain_underlying_order_is_the_chain() {
        let c = instances::chain3();
        let pre = c.underlying_preorder();
        assert!(pre.is_preorder());
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(pre.holds(x, y), x <= y);
            }
        }
    }

    #[test]
    fn structural_errors() {
        let q2 = Arc::new(make_two_element());
        assert!(EnrichedCategory::new(q2.clone(), vec!["a".into()], vec![]).is_err());
        assert!(EnrichedCategory::new(q2.clone(), vec!["a".into(), "a".into()], vec![vec![Elem(1); 2]; 2]).is_err());
        assert!(EnrichedCategory::new(q2, vec!["a".into()], vec![vec![Elem(9)]]).is_err());
    }

    #[test]
    fn empty_category_is_valid() {
        let c = EnrichedCategory::new(Arc::new(make_two_element()), vec![], vec![]).unwrap();
        assert!(c.is_valid());
        assert!(c.underlying_preorder().pairs().is_empty());
    }
}
