//! The acceptance suite: nine criteria, each reduced to a pass/fail line
//! with supporting detail.

use std::collections::BTreeSet;

use enriched_sites::base_change::{exp_neg, inclusion_two_element, neg_log, BaseChange};
use enriched_sites::category::{base_change_category, EnrichedCategory};
use enriched_sites::coverage::{
    check_coverage, coverage_join_closure, coverage_meet, discrete, enumerate_coverages, enumerate_topologies,
    indiscrete, refinement_leq, topology_closure, Coverage,
};
use enriched_sites::graded::{reproduce_counterexample, MonomialIdeal};
use enriched_sites::instances;
use enriched_sites::quantale::{check_axioms, make_exponential, make_truncated_additive, make_two_element, Elem, Quantale};
use enriched_sites::ring::{
    as_coverage, check_gabriel, find_ring_isomorphism, from_mult_set, localize, ring_of_fractions_oracle, torsion, zmod,
    IdealFamily,
};
use enriched_sites::sheaf::{is_sheaf, sheafify};
use enriched_sites::sieve::{
    compare_pullbacks, enumerate_all_sieves, enumerate_presheaves, is_sieve, maximal_sieve, pullback_lawvere,
    pullback_sieve, GeneralizedElement, Sieve,
};
use enriched_sites::{Limits, Result};

use crate::commands::{commute_harness, injectivity_harness, Options};
use crate::report::{anchor, Report, Status};

pub const TITLES: [&str; 9] = [
    "quantale laws and residuation",
    "pullbacks of sieves are sieves",
    "pointwise Lawvere pullback formula is not a sieve",
    "coverage lattice laws",
    "injectivity of change of base",
    "sheafification and change of base",
    "Gabriel topologies and localization",
    "graded counterexample",
    "determinism",
];

/// Pointwise metric pullback formula, kept for the discrepancy record.
const LITERAL_ANCHOR: &str = "pointwise pullback formula on Lawvere metric spaces";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub anchor: Option<&'static str>,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acceptance {
    pub criteria: Vec<CriterionResult>,
}

impl Acceptance {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// `criterion N: pass|fail  title`, one line per criterion.
    pub fn lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| format!("criterion {}: {}  {}", c.id, if c.passed { "pass" } else { "fail" }, c.title))
            .collect()
    }

    pub fn report(&self) -> Report {
        let mut rep = Report::new("acceptance");
        for c in &self.criteria {
            rep.check(format!("criterion {}: {}", c.id, c.title), Status::from_bool(c.passed), c.anchor, c.details.clone());
        }
        rep
    }
}

/// Collects failures; keeps the first few messages.
#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    messages: Vec<String>,
}

impl Tally {
    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.messages.len() < 5 {
                self.messages.push(msg());
            }
        }
    }

    fn error(&mut self, e: impl ToString) {
        self.expect(false, || e.to_string());
    }

    fn finish(self, id: usize, anchor: Option<&'static str>, mut details: Vec<String>) -> CriterionResult {
        details.insert(0, format!("cases: {}; failures: {}", self.cases, self.failures));
        details.extend(self.messages);
        CriterionResult { id, title: TITLES[id - 1], passed: self.failures == 0, anchor, details }
    }
}

/// Join of everything `p` with `p ⊗ a <= b`, found by search.
fn residual_oracle(q: &Quantale, a: Elem, b: Elem) -> Elem {
    q.join_all(q.elements().filter(|&p| q.leq(q.tensor(p, a), b)))
}

pub fn quantale_laws() -> CriterionResult {
    let mut t = Tally::default();
    let mut qs = vec![make_two_element()];
    for n in 1..=4 {
        for d in 1..=4 {
            for q in [make_truncated_additive(n, d), make_exponential(n, d)] {
                match q {
                    Ok(q) => qs.push(q),
                    Err(e) => t.error(e),
                }
            }
        }
    }
    let mut triples = 0u64;
    for q in &qs {
        match check_axioms(&q.tables()) {
            Ok(r) => t.expect(r.is_empty(), || format!("{}: {r}", q.name())),
            Err(e) => t.error(e),
        }
        for a in q.elements() {
            for b in q.elements() {
                let r = q.residuate(a, b);
                t.expect(r == residual_oracle(q, a, b), || format!("{}: [{}, {}]", q.name(), q.label(a), q.label(b)));
                for p in q.elements() {
                    triples += 1;
                    let lhs = q.leq(q.tensor(p, a), b);
                    if lhs != q.leq(p, r) {
                        t.error(format!("{}: adjunction at ({}, {}, {})", q.name(), q.label(p), q.label(a), q.label(b)));
                    }
                }
            }
        }
    }
    t.finish(1, None, vec![format!("quantales: {}; residuation triples: {triples}", qs.len())])
}

pub fn pullback_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let cats = [
        ("one", instances::one_object_q2()),
        ("P2", instances::p2()),
        ("chain3", instances::chain3()),
        ("L3", instances::lawvere3()),
    ];
    let mut details = Vec::new();
    for (name, c) in &cats {
        let all = match enumerate_all_sieves(c, limits) {
            Ok(a) => a,
            Err(e) => {
                t.error(format!("{name}: {e}"));
                continue;
            }
        };
        let q = c.base();
        let mut count = 0u64;
        for (x, sieves) in all.iter().enumerate() {
            for s in sieves {
                for y in 0..c.len() {
                    for g in q.down_set(c.hom(y, x)) {
                        count += 1;
                        let f = GeneralizedElement { g, source: y };
                        match pullback_sieve(c, s, f) {
                            Ok(p) => t.expect(is_sieve(c, &p), || format!("{name}: pullback of {} is not a sieve", s.show(c))),
                            Err(e) => t.error(format!("{name}: {e}")),
                        }
                    }
                }
            }
            let m = maximal_sieve(c, x).expect("object in range");
            for y in 0..c.len() {
                for g in q.down_set(c.hom(y, x)) {
                    let p = pullback_sieve(c, &m, GeneralizedElement { g, source: y });
                    let want = maximal_sieve(c, y).expect("object in range");
                    t.expect(p.as_ref() == Ok(&want), || format!("{name}: maximal sieve on {} not stable", c.label(x)));
                }
            }
        }
        details.push(format!("{name}: {} sieves, {count} pullbacks", all.iter().map(Vec::len).sum::<usize>()));
    }
    t.finish(2, Some(anchor::SIEVE_PULLBACK), details)
}

pub fn literal_discrepancy() -> CriterionResult {
    let mut t = Tally::default();
    let c = instances::p2();
    let q = c.base();
    let two = q.elem("2").expect("T(3,1) has 2");
    let m = maximal_sieve(&c, 0).expect("x exists");
    let y = c.object("y").expect("y exists");
    let mut details = Vec::new();
    match (pullback_lawvere(&c, &m, two, y), compare_pullbacks(&c, &m, GeneralizedElement { g: two, source: y })) {
        (Ok(lit), Ok(cmp)) => {
            t.expect(!is_sieve(&c, &lit), || "literal value map is a sieve".into());
            t.expect(is_sieve(&c, &cmp.generic), || "generic pullback is not a sieve".into());
            t.expect(cmp.literal == lit && !cmp.literal_violations.is_empty(), || "comparison lacks the witness".into());
            details.push(format!("literal {} fails: {}", lit.show(&c), cmp.literal_violations.iter().map(|v| v.describe(&c)).collect::<Vec<_>>().join("; ")));
            details.push(format!("generic {}", cmp.generic.show(&c)));
        }
        (a, b) => {
            if let Err(e) = a {
                t.error(e);
            }
            if let Err(e) = b {
                t.error(e);
            }
        }
    }
    t.finish(3, Some(LITERAL_ANCHOR), details)
}

/// Expected coverage counts on the one-object and 3-chain categories.
pub const LATTICE_COUNTS: [(&str, usize); 2] = [("one", 2), ("chain3", 24)];

pub fn lattice_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let mut details = Vec::new();
    for ((name, want), c) in LATTICE_COUNTS.iter().zip([instances::one_object_q2(), instances::chain3()]) {
        let run = |t: &mut Tally| -> Result<usize> {
            let all = enumerate_coverages(&c, limits)?;
            let top = discrete(&c, limits)?;
            let bottom = indiscrete(&c);
            let leq = |a: &Coverage<Sieve>, b: &Coverage<Sieve>| refinement_leq(a, b).expect("same shape");
            t.expect(all.len() == *want, || format!("{name}: {} coverages, expected {want}", all.len()));
            t.expect(all.contains(&top) && all.contains(&bottom), || format!("{name}: top or bottom missing"));
            let closures: Vec<Coverage<Sieve>> = all.iter().map(|a| topology_closure(&c, a, limits)).collect::<Result<_>>()?;
            for (a, ca) in all.iter().zip(&closures) {
                t.expect(leq(&bottom, a) && leq(a, &top), || format!("{name}: bounds"));
                t.expect(leq(a, ca) && topology_closure(&c, ca, limits).ok().as_ref() == Some(ca), || format!("{name}: closure"));
                t.expect(check_coverage(&c, ca, limits).is_topology(), || format!("{name}: closure not a topology"));
                for b in &all {
                    let m = coverage_meet(&[a.clone(), b.clone()])?;
                    let j = coverage_join_closure(&c, &[a.clone(), b.clone()])?;
                    t.expect(all.contains(&m) && all.contains(&j), || format!("{name}: meet or join leaves the lattice"));
                    t.expect(leq(&m, a) && leq(&m, b) && leq(a, &j) && leq(b, &j), || format!("{name}: bounds of meet/join"));
                    t.expect(coverage_meet(&[b.clone(), a.clone()])? == m, || format!("{name}: meet commutes"));
                    t.expect(coverage_meet(&[a.clone(), j.clone()])? == *a, || format!("{name}: absorption"));
                    t.expect(coverage_join_closure(&c, &[a.clone(), m.clone()])? == *a, || format!("{name}: absorption"));
                    t.expect((m == *a) == leq(a, b), || format!("{name}: order from meet"));
                }
            }
            Ok(all.len())
        };
        match run(&mut t) {
            Ok(n) => details.push(format!("{name}: {n} coverages")),
            Err(e) => t.error(format!("{name}: {e}")),
        }
    }
    t.finish(4, Some(anchor::LATTICE), details)
}

fn q2_into_e31() -> Result<BaseChange> {
    inclusion_two_element(std::sync::Arc::new(make_exponential(3, 1)?))
}

/// `(map, category)` pairs covered by the injectivity and commutation criteria.
fn full_base_changes() -> Result<Vec<(String, BaseChange, EnrichedCategory)>> {
    let inc = q2_into_e31()?;
    let iso = neg_log(3, 1)?;
    let e_p2 = base_change_category(&exp_neg(3, 1)?, &instances::p2())?;
    Ok(vec![
        ("Q2 -> E(3,1) on one".into(), inc.clone(), instances::one_object_q2()),
        ("Q2 -> E(3,1) on chain3".into(), inc.clone(), instances::chain3()),
        ("Q2 -> E(3,1) on antichain2".into(), inc, instances::antichain2()),
        ("-log on exp(P2)".into(), iso, e_p2),
    ])
}

pub fn injectivity_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let mut details = Vec::new();
    match full_base_changes() {
        Ok(list) => {
            for (name, g, c) in list {
                let f = g.flags();
                t.expect(f.faithful && f.conservative && f.full && f.right_adjoint, || format!("{name}: flags {f:?}"));
                match injectivity_harness(&g, &c, limits) {
                    Ok(h) => {
                        t.expect(h.collisions() == 0, || format!("{name}: {} collisions", h.collisions()));
                        t.expect(h.meet_failures == 0, || format!("{name}: {} meets not preserved", h.meet_failures));
                        details.push(format!(
                            "{name}: sieves {} -> {} distinct; coverages {} -> {} distinct; meet pairs {}",
                            h.sieves, h.sieve_images, h.coverages, h.coverage_images, h.meet_pairs
                        ));
                    }
                    Err(e) => t.error(format!("{name}: {e}")),
                }
            }
        }
        Err(e) => t.error(e),
    }
    t.finish(5, Some(anchor::COVERAGE_INJECTIVE), details)
}

pub fn sheafification_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let mut details = Vec::new();
    let cats = [
        ("one", instances::one_object_q2()),
        ("chain3", instances::chain3()),
        ("antichain2", instances::antichain2()),
        ("chain3 over G3", instances::chain3_godel()),
        ("P2", instances::p2()),
        ("L3", instances::lawvere3()),
    ];
    for (name, c) in &cats {
        let tops = match enumerate_topologies(c, limits) {
            Ok(v) => v,
            Err(_) => match discrete(c, limits) {
                Ok(d) => vec![indiscrete(c), d],
                Err(e) => {
                    t.error(format!("{name}: {e}"));
                    continue;
                }
            },
        };
        let ps = match enumerate_presheaves(c, limits) {
            Ok(v) => v,
            Err(e) => {
                t.error(format!("{name}: {e}"));
                continue;
            }
        };
        for j in &tops {
            for p in &ps {
                let l = sheafify(c, p, j);
                t.expect(is_sheaf(c, &l, j), || format!("{name}: sheafification of {} is not a sheaf", p.show(c)));
                t.expect(p.leq(c, &l), || format!("{name}: not above {}", p.show(c)));
                t.expect(sheafify(c, &l, j) == l, || format!("{name}: not idempotent at {}", p.show(c)));
                if is_sheaf(c, p, j) {
                    t.expect(l == *p, || format!("{name}: moves the sheaf {}", p.show(c)));
                }
            }
        }
        details.push(format!("{name}: {} topologies x {} presheaves", tops.len(), ps.len()));
    }
    match full_base_changes() {
        Ok(list) => {
            for (name, g, c) in list {
                let r = enumerate_coverages(&c, limits)
                    .and_then(|covs| enumerate_presheaves(&c, limits).map(|ps| (covs, ps)))
                    .and_then(|(covs, ps)| commute_harness(&g, &c, &covs, &ps));
                match r {
                    Ok(h) => {
                        t.expect(h.equal == h.pairs, || {
                            format!("{name}: {} of {} pairs differ; {}", h.pairs - h.equal, h.pairs, h.first_mismatch.clone().unwrap_or_default())
                        });
                        details.push(format!("{name}: commutes on {} of {} pairs", h.equal, h.pairs));
                    }
                    Err(e) => t.error(format!("{name}: {e}")),
                }
            }
        }
        Err(e) => t.error(e),
    }
    t.finish(6, Some(anchor::COMMUTE), details)
}

pub fn gabriel_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let mut details = Vec::new();
    let run = |t: &mut Tally, details: &mut Vec<String>| -> Result<()> {
        let r = zmod(6)?;
        let s: BTreeSet<u32> = [1, 3].into();
        let h = from_mult_set(&r, &s)?;
        let want: IdealFamily = [r.right_ideal_generated(&[3]), r.unit_ideal()].into();
        t.expect(h == want, || format!("H_S = {}", h.iter().map(|i| r.show_ideal(i)).collect::<Vec<_>>().join(", ")));
        let tors = torsion(&r, &h)?;
        t.expect(tors == r.right_ideal_generated(&[2]), || format!("t(A) = {}", r.show_ideal(&tors)));
        let z2 = zmod(2)?;
        let loc = localize(&r, &h, limits)?;
        let loc_ring = loc.ring.as_ref();
        t.expect(loc_ring.is_some_and(|l| find_ring_isomorphism(l, &z2).is_some()), || format!("A_R has {} elements", loc.len()));
        let frac = ring_of_fractions_oracle(&r, &s)?;
        t.expect(find_ring_isomorphism(&frac, &z2).is_some(), || "oracle is not Z/2".into());
        t.expect(loc_ring.is_some_and(|l| find_ring_isomorphism(l, &frac).is_some()), || "A_R and oracle differ".into());
        details.push(format!("Z/6, S = {{1, 3}}: H_S = {{(3), (1)}}, t(A) = (2), |A_R| = {}", loc.len()));
        for n in [4, 6, 8, 12] {
            let r = zmod(n)?;
            let ideals = r.enumerate_right_ideals(limits)?;
            let mut gabriel = 0;
            for mask in 0u64..1 << ideals.len() {
                let f: IdealFamily = ideals.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, i)| i.clone()).collect();
                let g = check_gabriel(&r, &f).holds();
                let top = check_coverage(&r, &as_coverage(&f), limits).is_topology();
                t.expect(g == top, || format!("Z/{n}: family {mask:b} Gabriel {g}, topology {top}"));
                gabriel += g as usize;
            }
            details.push(format!("Z/{n}: {} families, {gabriel} Gabriel", 1u64 << ideals.len()));
        }
        Ok(())
    };
    if let Err(e) = run(&mut t, &mut details) {
        t.error(e);
    }
    t.finish(7, Some(anchor::GABRIEL), details)
}

pub fn counterexample_suite(limits: &Limits) -> CriterionResult {
    let mut t = Tally::default();
    let mut details = Vec::new();
    match reproduce_counterexample(3, limits) {
        Ok(r) => {
            let x3 = MonomialIdeal::principal((3, 0));
            t.expect(r.topologies_differ() && r.witness == x3, || format!("witness {}", r.witness));
            t.expect(r.witness_in_s && !r.witness_in_t, || "witness membership".into());
            t.expect(r.images_agree() && r.image_s.len() == 2, || "images differ".into());
            t.expect(r.reproduced(), || "not reproduced".into());
            details.extend(r.lines());
        }
        Err(e) => t.error(e),
    }
    t.finish(8, Some(anchor::COUNTEREXAMPLE), details)
}

fn criteria_1_to_8(opts: &Options) -> Vec<CriterionResult> {
    let l = &opts.limits;
    vec![
        quantale_laws(),
        pullback_suite(l),
        literal_discrepancy(),
        lattice_suite(l),
        injectivity_suite(l),
        sheafification_suite(l),
        gabriel_suite(l),
        counterexample_suite(l),
    ]
}

/// Criterion 9: a second run renders byte-identically to the first.
pub fn determinism(first: &[CriterionResult], opts: &Options) -> CriterionResult {
    let render = |cs: Vec<CriterionResult>| Acceptance { criteria: cs }.report().text();
    let a = render(first.to_vec());
    let b = render(criteria_1_to_8(opts));
    let mut t = Tally::default();
    t.expect(a == b, || {
        let line = a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or(0);
        format!("reports differ from line {}", line + 1)
    });
    t.finish(9, None, vec![format!("report bytes: {}", a.len())])
}

pub fn run_all(opts: &Options) -> Acceptance {
    let mut criteria = criteria_1_to_8(opts);
    let d = determinism(&criteria, opts);
    criteria.push(d);
    Acceptance { criteria }
}
