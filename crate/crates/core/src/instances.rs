//! Small built-in quantales and categories used by tests, benches and the CLI.

use std::sync::Arc;

use crate::category::EnrichedCategory;
use crate::quantale::{make_truncated_additive, make_two_element, Quantale, QuantaleTables};

fn build(base: Arc<Quantale>, objects: &[&str], rows: &[&[&str]]) -> EnrichedCategory {
    EnrichedCategory::from_labels(base, objects, rows).expect("built-in category is well formed")
}

pub fn t3() -> Arc<Quantale> {
    Arc::new(make_truncated_additive(3, 1).expect("T(3,1) is valid"))
}

pub fn q2() -> Arc<Quantale> {
    Arc::new(make_two_element())
}

/// Three-element chain `0 < a < 1` with `min` as tensor.
pub fn godel3() -> Arc<Quantale> {
    let tables = QuantaleTables {
        labels: vec!["0".into(), "a".into(), "1".into()],
        leq: (0..3).map(|i| (0..3).map(|j| i <= j).collect()).collect(),
        tensor: (0..3).map(|i| (0..3).map(|j| usize::min(i, j)).collect()).collect(),
        unit: 2,
    };
    Arc::new(Quantale::from_tables("G3", tables).expect("min on a chain is a quantale"))
}

/// Two points at distance 1 in both directions, over `T(3,1)`.
pub fn p2() -> EnrichedCategory {
    build(t3(), &["x", "y"], &[&["0", "1"], &["1", "0"]])
}

/// Asymmetric three-point space over `T(3,1)`.
pub fn lawvere3() -> EnrichedCategory {
    build(t3(), &["a", "b", "c"], &[&["0", "1", "2"], &["2", "0", "1"], &["3", "1", "0"]])
}

/// The chain `bottom < mid < top` as a `{0,1}`-category.
pub fn chain3() -> EnrichedCategory {
    build(
        q2(),
        &["bottom", "mid", "top"],
        &[&["1", "1", "1"], &["0", "1", "1"], &["0", "0", "1"]],
    )
}

/// Two incomparable points over `{0,1}`.
pub fn antichain2() -> EnrichedCategory {
    build(q2(), &["a", "b"], &[&["1", "0"], &["0", "1"]])
}

pub fn one_object_q2() -> EnrichedCategory {
    build(q2(), &["*"], &[&["1"]])
}

/// The chain `bottom < mid < top` over the three-element Gödel chain.
pub fn chain3_godel() -> EnrichedCategory {
    build(
        godel3(),
        &["bottom", "mid", "top"],
        &[&["1", "1", "1"], &["0", "1", "1"], &["0", "0", "1"]],
    )
}
