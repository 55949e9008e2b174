//! One function per subcommand, each producing a [`Report`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use enriched_sites::base_change::{presheaf_base_change, BaseChange};
use enriched_sites::category::{base_change_category, EnrichedCategory};
use enriched_sites::coverage::{
    check_coverage, check_t1, check_t2, coverage_image, enumerate_coverages, show_coverage, topology_closure, Coverage,
};
use enriched_sites::graded::{check_graded_gabriel, reproduce_counterexample};
use enriched_sites::quantale::{check_axioms, QuantaleKind};
use enriched_sites::ring::{
    check_gabriel, find_ring_isomorphism, gabriel_closure, localize, ring_of_fractions_oracle, torsion, zmod, FiniteRing,
    IdealFamily,
};
use enriched_sites::sheaf::{check_sheafification_commutes, is_sheaf, sheaf_witness, sheafify};
use enriched_sites::sieve::{
    base_change_sieve, check_sieve, compare_pullbacks, enumerate_all_sieves, enumerate_presheaves, GeneralizedElement,
    Presheaf, Sieve,
};
use enriched_sites::{Error, Limits, Result};

use crate::instance::Instance;
use crate::report::{anchor, Report, Status};

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub limits: Limits,
    pub d_max: u32,
}

fn unknown(kind: &'static str, name: &str) -> Error {
    Error::Unknown { kind, name: name.to_string() }
}

/// The named entries, or all of them when no name is given.
fn select<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, kind: &'static str) -> Result<Vec<(&'a String, &'a T)>> {
    match name {
        None => Ok(map.iter().collect()),
        Some(n) => map.get_key_value(n).map(|kv| vec![kv]).ok_or_else(|| unknown(kind, n)),
    }
}

fn category<'a>(inst: &'a Instance, name: &str) -> Result<&'a Arc<EnrichedCategory>> {
    inst.categories.get(name).ok_or_else(|| unknown("category", name))
}

fn valid_category(c: &EnrichedCategory) -> Result<()> {
    match c.check_category().first() {
        None => Ok(()),
        Some(v) => Err(Error::Precondition(format!("category law fails: {}", v.describe(c)))),
    }
}

fn ring_of<'a>(inst: &'a Instance, name: &str) -> Result<&'a Arc<FiniteRing>> {
    inst.rings.get(name).ok_or_else(|| unknown("ring", name))
}

fn show_family(r: &FiniteRing, f: &IdealFamily) -> String {
    format!("{{{}}}", f.iter().map(|i| r.show_ideal(i)).collect::<Vec<_>>().join(", "))
}

pub fn validate(inst: &Instance, opts: &Options) -> Report {
    let mut rep = Report::new("validate");
    for (name, q) in &inst.quantales {
        let r = check_axioms(&q.tables()).map(|a| (a.is_empty(), a.to_string().lines().map(str::to_string).collect()));
        rep.check_result(format!("quantale {name}: laws of a commutative quantale ({} elements)", q.len()), None, r);
    }
    for (name, c) in &inst.categories {
        let v = c.check_category();
        rep.check(
            format!("category {name}: identity and composition over {}", c.base().name()),
            Status::from_bool(v.is_empty()),
            None,
            v.iter().take(1).map(|x| x.describe(c)).collect(),
        );
    }
    for (name, (cat, s)) in &inst.sieves {
        let c = &inst.categories[cat];
        let v = check_sieve(c, s);
        rep.check(
            format!("sieve {name}: {}", s.show(c)),
            Status::from_bool(v.is_empty()),
            None,
            v.iter().take(1).map(|x| x.describe(c)).collect(),
        );
    }
    for (name, (cat, p)) in &inst.presheaves {
        let c = &inst.categories[cat];
        let v = p.law_violation(c);
        rep.check(format!("presheaf {name}: {}", p.show(c)), Status::from_bool(v.is_none()), None, v.into_iter().collect());
    }
    for (name, nc) in &inst.coverages {
        let c = &inst.categories[&nc.category];
        let r = check_coverage(&**c, &nc.coverage, &Limits::default());
        let ok = r.is_coverage() && (!nc.topology || r.is_topology());
        let what = if nc.topology { "topology" } else { "coverage" };
        rep.check(format!("coverage {name}: {what} on {}", nc.category), Status::from_bool(ok), None, r.lines(&**c));
    }
    for (name, g) in &inst.base_changes {
        let details = g.to_string().lines().skip(1).map(|l| l.trim().to_string()).collect();
        rep.check(
            format!("base change {name}: {} -> {} is lax monoidal", g.source().name(), g.target().name()),
            Status::from_bool(g.flags().lax_monoidal),
            None,
            details,
        );
    }
    for (name, r) in &inst.rings {
        rep.check(
            format!("ring {name}: ring axioms"),
            Status::Pass,
            None,
            vec![format!("{} elements, {}", r.len(), if r.is_commutative() { "commutative" } else { "not commutative" })],
        );
    }
    for (name, t) in &inst.topologies {
        let r = &inst.rings[&t.ring];
        let g = check_gabriel(r, &t.family);
        let mut details = vec![format!("members: {}", show_family(r, &t.family))];
        details.extend(g.lines(r));
        rep.check(format!("topology {name}: Gabriel axioms on {}", t.ring), Status::from_bool(g.holds()), Some(anchor::GABRIEL), details);
    }
    for (name, g) in &inst.graded {
        let d = g.d_max.unwrap_or(opts.d_max);
        let r = check_graded_gabriel(&g.spec, &g.sample, d, &opts.limits).map(|r| (r.holds(), r.lines()));
        rep.check_result(format!("graded {name}: G1, G2, G3 on the sample"), Some(anchor::GRADED), r);
    }
    rep
}

pub fn coverage_check(inst: &Instance, name: Option<&str>, opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("coverage-check {}", name.unwrap_or("*")));
    for (n, nc) in select(&inst.coverages, name, "coverage")? {
        let c = &inst.categories[&nc.category];
        valid_category(c)?;
        let r = check_coverage(&**c, &nc.coverage, &opts.limits);
        let mut details = show_coverage(&**c, &nc.coverage);
        details.extend(r.lines(&**c));
        rep.check(format!("{n} satisfies T1 and T2"), Status::from_bool(r.is_coverage()), None, details);
        if nc.topology {
            rep.check(format!("{n} satisfies T3"), Status::from_bool(r.is_topology()), None, vec![]);
        }
        rep.value(format!("{n}.members"), nc.coverage.size());
        rep.value(format!("{n}.topology"), r.is_topology());
    }
    Ok(rep)
}

pub fn close(inst: &Instance, name: &str, opts: &Options) -> Result<Report> {
    let nc = inst.coverages.get(name).ok_or_else(|| unknown("coverage", name))?;
    let c = category(inst, &nc.category)?;
    valid_category(c)?;
    let mut rep = Report::new(format!("close {name}"));
    let closed = topology_closure(&**c, &nc.coverage, &opts.limits)?;
    rep.note(format!("input on {}:", nc.category));
    for l in show_coverage(&**c, &nc.coverage) {
        rep.note(format!("  {l}"));
    }
    rep.note("closure:");
    for l in show_coverage(&**c, &closed) {
        rep.note(format!("  {l}"));
    }
    let r = check_coverage(&**c, &closed, &opts.limits);
    let again = topology_closure(&**c, &closed, &opts.limits)?;
    let contains = (0..c.len()).all(|x| nc.coverage.families[x].is_subset(&closed.families[x]));
    rep.check("closure is a topology", Status::from_bool(r.is_topology()), Some(anchor::LATTICE), r.lines(&**c));
    rep.check("closure contains the input", Status::from_bool(contains), Some(anchor::LATTICE), vec![]);
    rep.check("closure is idempotent", Status::from_bool(again == closed), Some(anchor::LATTICE), vec![]);
    rep.value("closure.members", closed.size());
    Ok(rep)
}

pub fn pullback(inst: &Instance, sieve: &str, along: Option<&str>, value: Option<&str>, _opts: &Options) -> Result<Report> {
    let (cat, s) = inst.sieves.get(sieve).ok_or_else(|| unknown("sieve", sieve))?;
    let c = category(inst, cat)?;
    valid_category(c)?;
    if let Some(v) = check_sieve(c, s).first() {
        return Err(Error::Precondition(format!("{sieve} is not a sieve: {}", v.describe(c))));
    }
    let q = c.base();
    let mut rep = Report::new(format!("pullback {sieve}"));
    rep.note(format!("sieve {sieve} = {}", s.show(c)));
    let ys: Vec<usize> = match along {
        Some(l) => vec![c.object(l)?],
        None => (0..c.len()).collect(),
    };
    let metric = matches!(q.kind(), QuantaleKind::TruncatedAdditive { .. } | QuantaleKind::Exponential { .. });
    let mut count = 0;
    for y in ys {
        let gs: Vec<_> = match value {
            Some(v) => vec![q.elem(v).ok_or_else(|| unknown("element", v))?],
            None => q.down_set(c.hom(y, s.target)),
        };
        for g in gs {
            count += 1;
            let f = GeneralizedElement { g, source: y };
            let cmp = compare_pullbacks(c, s, f);
            let name = format!("pullback along ({}, {})", q.label(g), c.label(y));
            match cmp {
                Ok(cmp) => {
                    let mut details = vec![format!("result {}", cmp.generic.show(c))];
                    if metric && !cmp.agree() {
                        let why = match cmp.literal_violations.first() {
                            Some(v) => format!("not a sieve: {}", v.describe(c)),
                            None => "a sieve, but a different one".to_string(),
                        };
                        details.push(format!("pointwise metric formula gives {}, {why}", cmp.literal.show(c)));
                    }
                    rep.check(name, Status::Pass, Some(anchor::SIEVE_PULLBACK), details);
                }
                Err(e) => rep.check_result(name, Some(anchor::SIEVE_PULLBACK), Err(e)),
            }
        }
    }
    rep.value("generalized_elements", count);
    Ok(rep)
}

pub fn base_change(inst: &Instance, map: &str, cat: Option<&str>, _opts: &Options) -> Result<Report> {
    let g = inst.base_changes.get(map).ok_or_else(|| unknown("base change", map))?;
    let mut rep = Report::new(format!("base-change {map}"));
    for l in g.to_string().lines() {
        rep.note(l.to_string());
    }
    if let Some(why) = g.refusal() {
        rep.note(format!("transfer hypotheses fail: {why}"));
    }
    for (name, c) in select(&inst.categories, cat, "category")? {
        if **c.base() != **g.source() {
            if cat.is_some() {
                return Err(Error::BaseMismatch { expected: g.source().name().into(), found: c.base().name().into() });
            }
            continue;
        }
        let image = base_change_category(g, c);
        rep.check_result(
            format!("image of category {name} is a {}-category", g.target().name()),
            None,
            image.as_ref().map(|i| (i.is_valid(), i.to_string().lines().map(|l| l.trim().to_string()).collect())).map_err(Clone::clone),
        );
        let Ok(image) = image else { continue };
        for (sn, (sc, s)) in inst.sieves.iter().filter(|(_, (sc, _))| sc == name) {
            let _ = sc;
            let r = base_change_sieve(g, c, s).map(|t| (check_sieve(&image, &t).is_empty(), vec![format!("{} -> {}", s.show(c), t.show(&image))]));
            rep.check_result(format!("image of sieve {sn} is a sieve"), None, r);
        }
        for (pn, (_, p)) in inst.presheaves.iter().filter(|(_, (pc, _))| pc == name) {
            let r = presheaf_base_change(g, c, p).map(|t| (t.is_presheaf(&image), vec![format!("{} -> {}", p.show(c), t.show(&image))]));
            rep.check_result(format!("image of presheaf {pn} is a presheaf"), None, r);
        }
        for (jn, nc) in inst.coverages.iter().filter(|(_, nc)| nc.category == *name) {
            let r = coverage_image(g, c, &nc.coverage).map(|img| {
                let t1 = check_t1(&image, &img).is_empty();
                let t2 = check_t2(&image, &img);
                let mut details = show_coverage(&image, &img);
                if let Some(w) = &t2 {
                    details.push(format!(
                        "T2 fails: pulling back {} along {} gives {}",
                        w.sieve.show(&image),
                        image.base().label(w.arrow),
                        w.pullback.show(&image)
                    ));
                }
                (t1 && t2.is_none(), details)
            });
            let strong = g.flags().left_adjoint_strong_monoidal;
            match r {
                Ok((ok, details)) if !ok && !strong => {
                    rep.note(format!("image of coverage {jn} is not a coverage (left adjoint is not strong monoidal)"));
                    for d in details {
                        rep.note(format!("  {d}"));
                    }
                }
                other => rep.check_result(format!("image of coverage {jn} is a coverage"), Some(anchor::COVERAGE_INJECTIVE), other),
            }
        }
    }
    Ok(rep)
}

/// Everything the injectivity harness measured on one category.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Injectivity {
    pub sieves: usize,
    pub sieve_images: usize,
    pub coverages: usize,
    pub coverage_images: usize,
    pub meet_pairs: u64,
    pub meet_failures: u64,
    /// Images that fail T1 or T2 on the image category.
    pub broken_images: usize,
}

impl Injectivity {
    pub fn collisions(&self) -> usize {
        (self.sieves - self.sieve_images) + (self.coverages - self.coverage_images)
    }
}

/// Exhaustive comparison of every sieve and every coverage with its image.
pub fn injectivity_harness(g: &BaseChange, c: &EnrichedCategory, limits: &Limits) -> Result<Injectivity> {
    let image = base_change_category(g, c)?;
    let all = enumerate_all_sieves(c, limits)?;
    let mut out = Injectivity::default();
    // sieve index -> image id, per object
    let mut img_id: Vec<Vec<u32>> = Vec::new();
    let mut index: Vec<BTreeMap<Sieve, usize>> = Vec::new();
    for sieves in &all {
        let mut ids: BTreeMap<Sieve, u32> = BTreeMap::new();
        let mut row = Vec::with_capacity(sieves.len());
        for s in sieves {
            let t = base_change_sieve(g, c, s)?;
            let next = ids.len() as u32;
            row.push(*ids.entry(t).or_insert(next));
        }
        out.sieves += sieves.len();
        out.sieve_images += ids.len();
        if ids.len() > 128 {
            return Err(Error::TooLarge { what: "sieve images per object", size: ids.len() as u128, cap: 128 });
        }
        img_id.push(row);
        index.push(sieves.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect());
    }
    let covs = enumerate_coverages(c, limits)?;
    let mask_of = |j: &Coverage<Sieve>| -> Vec<u128> {
        j.families
            .iter()
            .enumerate()
            .map(|(x, fam)| fam.iter().fold(0u128, |m, s| m | 1 << index[x][s]))
            .collect()
    };
    let img_of = |m: &[u128]| -> Vec<u128> {
        m.iter()
            .enumerate()
            .map(|(x, &bits)| {
                (0..128).filter(|k| bits >> k & 1 == 1).fold(0u128, |acc, k| acc | 1 << img_id[x][k as usize])
            })
            .collect()
    };
    let masks: Vec<Vec<u128>> = covs.iter().map(mask_of).collect();
    let imgs: Vec<Vec<u128>> = masks.iter().map(|m| img_of(m)).collect();
    out.coverages = covs.len();
    out.coverage_images = imgs.iter().collect::<BTreeSet<_>>().len();
    for a in 0..masks.len() {
        for b in a..masks.len() {
            out.meet_pairs += 1;
            let meet: Vec<u128> = masks[a].iter().zip(&masks[b]).map(|(x, y)| x & y).collect();
            let want: Vec<u128> = imgs[a].iter().zip(&imgs[b]).map(|(x, y)| x & y).collect();
            if img_of(&meet) != want {
                out.meet_failures += 1;
            }
        }
    }
    for j in &covs {
        let img = coverage_image(g, c, j)?;
        if !check_t1(&image, &img).is_empty() || check_t2(&image, &img).is_some() {
            out.broken_images += 1;
        }
    }
    Ok(out)
}

pub fn injectivity(inst: &Instance, map: Option<&str>, cat: Option<&str>, opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("injectivity {}", map.unwrap_or("*")));
    for (gn, g) in select(&inst.base_changes, map, "base change")? {
        let fl = g.flags();
        let hyp = g.refusal();
        rep.check(
            format!("{gn}: faithful, conservative and right adjoint"),
            if hyp.is_none() { Status::Pass } else { Status::NotChecked },
            None,
            vec![format!(
                "faithful: {}, conservative: {}, full: {}, right adjoint: {}, left adjoint strong monoidal: {}",
                fl.faithful, fl.conservative, fl.full, fl.right_adjoint, fl.left_adjoint_strong_monoidal
            )]
            .into_iter()
            .chain(hyp.clone())
            .collect(),
        );
        for (cn, c) in select(&inst.categories, cat, "category")? {
            if **c.base() != **g.source() {
                continue;
            }
            valid_category(c)?;
            let status = |ok: bool| match (&hyp, ok) {
                (None, ok) => Status::from_bool(ok),
                (Some(_), _) => Status::NotChecked,
            };
            match injectivity_harness(g, c, &opts.limits) {
                Ok(h) => {
                    rep.check(
                        format!("{gn} on {cn}: sieve change of base is injective"),
                        status(h.sieves == h.sieve_images),
                        Some(anchor::SIEVE_INJECTIVE),
                        vec![format!("sieves enumerated: {}; images distinct: {}", h.sieves, h.sieve_images)],
                    );
                    rep.check(
                        format!("{gn} on {cn}: coverage change of base is injective"),
                        status(h.coverages == h.coverage_images),
                        Some(anchor::COVERAGE_INJECTIVE),
                        vec![format!("coverages enumerated: {}; images distinct: {}", h.coverages, h.coverage_images)],
                    );
                    rep.check(
                        format!("{gn} on {cn}: coverage change of base preserves meets"),
                        status(h.meet_failures == 0),
                        Some(anchor::COVERAGE_INJECTIVE),
                        vec![format!("pairs checked: {}; failures: {}", h.meet_pairs, h.meet_failures)],
                    );
                    let line = format!("images failing T1 or T2: {} of {}", h.broken_images, h.coverages);
                    if fl.left_adjoint_strong_monoidal {
                        rep.check(format!("{gn} on {cn}: images of coverages are coverages"), status(h.broken_images == 0), None, vec![line]);
                    } else {
                        rep.note(format!("{gn} on {cn}: {line} (left adjoint is not strong monoidal)"));
                    }
                    rep.value(format!("{gn}.{cn}.sieves"), h.sieves);
                    rep.value(format!("{gn}.{cn}.coverages"), h.coverages);
                }
                Err(e) => rep.check_result(format!("{gn} on {cn}: injectivity"), Some(anchor::SIEVE_INJECTIVE), Err(e)),
            }
        }
    }
    Ok(rep)
}

pub fn sheaf_check(inst: &Instance, presheaf: Option<&str>, cov: Option<&str>, _opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("sheaf-check {} {}", presheaf.unwrap_or("*"), cov.unwrap_or("*")));
    for (pn, (pc, p)) in select(&inst.presheaves, presheaf, "presheaf")? {
        let c = category(inst, pc)?;
        for (jn, nc) in select(&inst.coverages, cov, "coverage")? {
            if nc.category != *pc {
                continue;
            }
            let w = sheaf_witness(c, p, &nc.coverage);
            rep.check(
                format!("{pn} is a sheaf for {jn}"),
                Status::from_bool(w.is_none()),
                None,
                w.map(|w| w.describe(c)).into_iter().collect(),
            );
        }
    }
    Ok(rep)
}

pub fn sheafify_cmd(inst: &Instance, presheaf: &str, cov: &str, opts: &Options) -> Result<Report> {
    let (pc, p) = inst.presheaves.get(presheaf).ok_or_else(|| unknown("presheaf", presheaf))?;
    let nc = inst.coverages.get(cov).ok_or_else(|| unknown("coverage", cov))?;
    if nc.category != *pc {
        return Err(Error::Precondition(format!("{presheaf} and {cov} live on different categories")));
    }
    let c = category(inst, pc)?;
    valid_category(c)?;
    let mut rep = Report::new(format!("sheafify {presheaf} {cov}"));
    let l = sheafify(c, p, &nc.coverage);
    rep.note(format!("{presheaf} = {}", p.show(c)));
    rep.note(format!("sheafification = {}", l.show(c)));
    let topo = check_coverage(&**c, &nc.coverage, &opts.limits).is_topology();
    let st = |ok| if topo { Status::from_bool(ok) } else { Status::NotChecked };
    let why = if topo { vec![] } else { vec![format!("{cov} is not a topology")] };
    rep.check("result is a sheaf", st(is_sheaf(c, &l, &nc.coverage)), Some(anchor::SHEAFIFICATION), why.clone());
    rep.check("result lies above the input", st(p.leq(c, &l)), Some(anchor::SHEAFIFICATION), why.clone());
    rep.check("sheafification is idempotent", st(sheafify(c, &l, &nc.coverage) == l), Some(anchor::SHEAFIFICATION), why);
    Ok(rep)
}

/// Counts from comparing `G̃(ℓP)` with `ℓ(G̃P)` over many pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommuteCounts {
    pub pairs: usize,
    pub equal: usize,
    pub image_below: usize,
    pub first_mismatch: Option<String>,
}

pub fn commute_harness(
    g: &BaseChange,
    c: &EnrichedCategory,
    coverages: &[Coverage<Sieve>],
    presheaves: &[Presheaf],
) -> Result<CommuteCounts> {
    let mut out = CommuteCounts::default();
    for j in coverages {
        for p in presheaves {
            let r = check_sheafification_commutes(g, c, p, j)?;
            out.pairs += 1;
            out.equal += r.equal as usize;
            out.image_below += r.image_below as usize;
            if !r.equal && out.first_mismatch.is_none() {
                out.first_mismatch = Some(format!(
                    "P = {}: {} vs {}",
                    p.show(c),
                    r.image_of_sheafification.show(&r.category),
                    r.sheafification_of_image.show(&r.category)
                ));
            }
        }
    }
    Ok(out)
}

pub fn commute_check(
    inst: &Instance,
    map: &str,
    cov: Option<&str>,
    presheaf: Option<&str>,
    opts: &Options,
) -> Result<Report> {
    let g = inst.base_changes.get(map).ok_or_else(|| unknown("base change", map))?;
    let mut rep = Report::new(format!("commute-check {map} {} {}", cov.unwrap_or("*"), presheaf.unwrap_or("*")));
    if let Some(why) = g.refusal() {
        rep.check("transfer hypotheses", Status::NotChecked, Some(anchor::COMMUTE), vec![why]);
        return Ok(rep);
    }
    let cats: Vec<(&String, &Arc<EnrichedCategory>)> = match (cov, presheaf) {
        (Some(j), _) => {
            let nc = inst.coverages.get(j).ok_or_else(|| unknown("coverage", j))?;
            vec![(&nc.category, category(inst, &nc.category)?)]
        }
        (None, Some(p)) => {
            let (pc, _) = inst.presheaves.get(p).ok_or_else(|| unknown("presheaf", p))?;
            vec![(pc, category(inst, pc)?)]
        }
        (None, None) => inst.categories.iter().filter(|(_, c)| **c.base() == **g.source()).collect(),
    };
    for (cn, c) in cats {
        valid_category(c)?;
        let covs = match cov {
            Some(j) => Ok(vec![inst.coverages[j].coverage.clone()]),
            None => enumerate_coverages(&**c, &opts.limits),
        };
        let ps = match presheaf {
            Some(p) => Ok(vec![inst.presheaves[p].1.clone()]),
            None => enumerate_presheaves(c, &opts.limits),
        };
        let name = format!("{map} on {cn}: sheafification commutes with change of base");
        let r = covs.and_then(|covs| ps.and_then(|ps| commute_harness(g, c, &covs, &ps)));
        match r {
            Ok(h) => {
                let mut details = vec![
                    format!("pairs checked: {}; equal: {}", h.pairs, h.equal),
                    format!("image of the sheafification below the sheafification of the image: {}", h.image_below),
                ];
                details.extend(h.first_mismatch.clone().map(|m| format!("first mismatch: {m}")));
                let st = if g.flags().full { Status::from_bool(h.equal == h.pairs) } else { Status::NotChecked };
                if !g.flags().full {
                    details.push("equality is only asserted for full maps".into());
                }
                rep.check(name, st, Some(anchor::COMMUTE), details);
                rep.value(format!("{cn}.pairs"), h.pairs);
            }
            Err(e) => rep.check_result(name, Some(anchor::COMMUTE), Err(e)),
        }
    }
    Ok(rep)
}

pub fn ideals(inst: &Instance, ring: Option<&str>, opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("ideals {}", ring.unwrap_or("*")));
    for (rn, r) in select(&inst.rings, ring, "ring")? {
        let list = r.enumerate_right_ideals(&opts.limits).map(|l| {
            let shown: Vec<String> = l.iter().map(|i| r.show_ideal(i)).collect();
            (true, vec![format!("{} right ideals: {}", l.len(), shown.join(", "))])
        });
        rep.check_result(format!("{rn}: right ideals enumerated"), None, list);
        if let Ok(l) = r.enumerate_right_ideals(&opts.limits) {
            rep.value(format!("{rn}.right_ideals"), l.len());
        }
    }
    Ok(rep)
}

pub fn gabriel_check(inst: &Instance, top: Option<&str>, _opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("gabriel-check {}", top.unwrap_or("*")));
    for (tn, t) in select(&inst.topologies, top, "topology")? {
        let r = ring_of(inst, &t.ring)?;
        let g = check_gabriel(r, &t.family);
        let mut details = vec![format!("members: {}", show_family(r, &t.family))];
        details.extend(g.lines(r));
        rep.check(format!("{tn}: Gabriel axioms on {}", t.ring), Status::from_bool(g.holds()), Some(anchor::GABRIEL), details);
    }
    Ok(rep)
}

pub fn gabriel_close(inst: &Instance, top: &str, opts: &Options) -> Result<Report> {
    let t = inst.topologies.get(top).ok_or_else(|| unknown("topology", top))?;
    let r = ring_of(inst, &t.ring)?;
    let seeds: Vec<_> = t.family.iter().cloned().collect();
    let closed = gabriel_closure(r, &seeds, &opts.limits)?;
    let mut rep = Report::new(format!("gabriel-close {top}"));
    rep.note(format!("seeds: {}", show_family(r, &t.family)));
    rep.note(format!("closure: {}", show_family(r, &closed)));
    let g = check_gabriel(r, &closed);
    rep.check("closure satisfies R1, R2, R3", Status::from_bool(g.holds()), Some(anchor::GABRIEL), g.lines(r));
    rep.value("closure.members", closed.len());
    Ok(rep)
}

/// `zmodN` when the ring is cyclic, otherwise its order.
pub fn ring_name(r: &FiniteRing) -> String {
    match zmod(r.len() as u32) {
        Ok(z) if find_ring_isomorphism(r, &z).is_some() => format!("zmod{}", r.len()),
        _ if r.len() == 1 => "zero ring".to_string(),
        _ => format!("a ring of order {}", r.len()),
    }
}

pub fn localize_cmd(inst: &Instance, top: Option<&str>, opts: &Options) -> Result<Report> {
    let mut rep = Report::new(format!("localize {}", top.unwrap_or("*")));
    for (tn, t) in select(&inst.topologies, top, "topology")? {
        let r = ring_of(inst, &t.ring)?;
        let loc = match localize(r, &t.family, &opts.limits) {
            Ok(l) => l,
            Err(e) => {
                rep.check_result(format!("{tn}: localization"), Some(anchor::LOCALIZATION), Err(e));
                continue;
            }
        };
        let tors = torsion(r, &t.family)?;
        rep.note(format!("{tn}: topology {}", show_family(r, &t.family)));
        rep.note(format!("{tn}: I_min = {}, t(A) = {}", r.show_ideal(&loc.i_min), r.show_ideal(&tors)));
        rep.note(format!("{tn}: |A_R| = {}", loc.len()));
        if loc.module_act.is_none() {
            rep.note(format!("{tn}: I_min is not two-sided, so only the additive group is computed"));
        }
        let kernel_ok = loc.kernel(r) == tors.elements();
        rep.check(format!("{tn}: t(A) is the kernel of A -> A_R"), Status::from_bool(kernel_ok), Some(anchor::LOCALIZATION), vec![]);
        let lname = loc.ring.as_ref().map(ring_name);
        match (&t.mult_set, &loc.ring) {
            (Some(s), Some(lr)) => {
                let frac = ring_of_fractions_oracle(r, s)?;
                let iso = find_ring_isomorphism(lr, &frac).is_some();
                let line = format!(
                    "A_R ≅ {}; oracle A[S^{{-1}}] ≅ {}; isomorphic: {}",
                    ring_name(lr),
                    ring_name(&frac),
                    if iso { "yes" } else { "no" }
                );
                rep.check(format!("{tn}: A_R is the ring of fractions"), Status::from_bool(iso), Some(anchor::LOCALIZATION), vec![line]);
            }
            (_, None) => rep.note(format!("{tn}: {}", loc.ring_note.clone().unwrap_or_default())),
            (None, Some(_)) => rep.note(format!("{tn}: A_R ≅ {}", lname.unwrap_or_default())),
        }
        rep.value(format!("{tn}.size"), loc.len());
    }
    Ok(rep)
}

pub fn counterexample(opts: &Options) -> Result<Report> {
    let r = reproduce_counterexample(opts.d_max, &opts.limits)?;
    let mut rep = Report::new(format!("counterexample --dmax {}", opts.d_max));
    rep.check("H_S and H_T differ", Status::from_bool(r.topologies_differ()), Some(anchor::COUNTEREXAMPLE), vec![format!("witness {}", r.witness)]);
    rep.check(
        "degree-zero images of H_S and H_T coincide as {k, 0}",
        Status::from_bool(r.images_agree() && r.reproduced()),
        Some(anchor::COUNTEREXAMPLE),
        r.lines(),
    );
    rep.value("sample", r.sample_size);
    rep.value("h_s", r.h_s_size);
    rep.value("h_t", r.h_t_size);
    Ok(rep)
}
