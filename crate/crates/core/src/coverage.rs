//! Coverages and Grothendieck topologies on any [`Site`]: axiom checks, the
//! lattice operations, saturation closures and exhaustive enumeration.
//!
//! A family `J` assigns to each object `x` a set of sieves on `x`.
//! * T1: the maximal sieve is in `J(x)`.
//! * T2: `R ∈ J(x)` and `f: y -> x` give `R_f ∈ J(y)`.
//! * T3: `S ∈ J(x)` and `R_f ∈ J(y)` for every `f` in `S(y)` give `R ∈ J(x)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::base_change::BaseChange;
use crate::category::{base_change_category, EnrichedCategory};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::par;
use crate::quantale::Elem;
use crate::sieve::{self, GeneralizedElement, Sieve};

/// Objects, sieves, arrows and pullback: everything the axioms quantify over.
pub trait Site: Sync {
    type Sieve: Clone + Ord + fmt::Debug + Send + Sync;
    type Arrow: Copy + fmt::Debug + Send + Sync;

    fn object_count(&self) -> usize;
    fn object_label(&self, x: usize) -> String;
    fn target(&self, s: &Self::Sieve) -> usize;
    fn maximal_sieve(&self, x: usize) -> Self::Sieve;
    /// All sieves on `x`, sorted.
    fn sieves_on(&self, x: usize, limits: &Limits) -> Result<Vec<Self::Sieve>>;
    /// The arrows `y -> x` the pullback axiom ranges over.
    fn arrows(&self, y: usize, x: usize) -> Vec<Self::Arrow>;
    /// The arrows `y -> target(s)` that lie in `s`.
    fn arrows_in(&self, s: &Self::Sieve, y: usize) -> Vec<Self::Arrow>;
    fn pull_back(&self, s: &Self::Sieve, y: usize, f: Self::Arrow) -> Self::Sieve;
    /// Why `s` is not a sieve, if it is not.
    fn sieve_problem(&self, s: &Self::Sieve) -> Option<String>;
    fn show_sieve(&self, s: &Self::Sieve) -> String;
    fn show_arrow(&self, f: Self::Arrow, y: usize) -> String;
}

impl Site for EnrichedCategory {
    type Sieve = Sieve;
    type Arrow = Elem;

    fn object_count(&self) -> usize {
        self.len()
    }

    fn object_label(&self, x: usize) -> String {
        self.label(x).to_string()
    }

    fn target(&self, s: &Sieve) -> usize {
        s.target
    }

    fn maximal_sieve(&self, x: usize) -> Sieve {
        sieve::maximal_sieve(self, x).expect("object in range")
    }

    fn sieves_on(&self, x: usize, limits: &Limits) -> Result<Vec<Sieve>> {
        sieve::enumerate_sieves(self, x, limits)
    }

    fn arrows(&self, y: usize, x: usize) -> Vec<Elem> {
        self.base().down_set(self.hom(y, x))
    }

    fn arrows_in(&self, s: &Sieve, y: usize) -> Vec<Elem> {
        self.base().down_set(s.values[y])
    }

    fn pull_back(&self, s: &Sieve, y: usize, g: Elem) -> Sieve {
        sieve::pullback_unchecked(self, s, GeneralizedElement { g, source: y })
    }

    fn sieve_problem(&self, s: &Sieve) -> Option<String> {
        sieve::check_sieve(self, s).first().map(|v| v.describe(self))
    }

    fn show_sieve(&self, s: &Sieve) -> String {
        s.show(self)
    }

    fn show_arrow(&self, g: Elem, y: usize) -> String {
        format!("({}, {})", self.base().label(g), self.label(y))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coverage<S> {
    pub families: Vec<BTreeSet<S>>,
}

impl<S: Ord + Clone> Coverage<S> {
    pub fn new(families: Vec<BTreeSet<S>>) -> Self {
        Coverage { families }
    }

    pub fn family(&self, x: usize) -> &BTreeSet<S> {
        &self.families[x]
    }

    pub fn contains(&self, x: usize, s: &S) -> bool {
        self.families[x].contains(s)
    }

    pub fn size(&self) -> usize {
        self.families.iter().map(BTreeSet::len).sum()
    }
}

/// Build a coverage, rejecting members that are not sieves on their object.
pub fn make_coverage<T: Site>(site: &T, families: Vec<BTreeSet<T::Sieve>>) -> Result<Coverage<T::Sieve>> {
    if families.len() != site.object_count() {
        return Err(Error::malformed(
            "coverage",
            format!("{} families for {} objects", families.len(), site.object_count()),
        ));
    }
    for (x, fam) in families.iter().enumerate() {
        for s in fam {
            if site.target(s) != x {
                return Err(Error::malformed(
                    "coverage",
                    format!("family of {} holds a sieve on another object", site.object_label(x)),
                ));
            }
            if let Some(p) = site.sieve_problem(s) {
                return Err(Error::malformed("coverage", format!("{}: {p}", site.show_sieve(s))));
            }
        }
    }
    Ok(Coverage { families })
}

/// `I(x) = {maximal sieve}`, the least coverage.
pub fn indiscrete<T: Site>(site: &T) -> Coverage<T::Sieve> {
    Coverage {
        families: (0..site.object_count()).map(|x| BTreeSet::from([site.maximal_sieve(x)])).collect(),
    }
}

/// `D(x) = every sieve on x`, the greatest coverage.
pub fn discrete<T: Site>(site: &T, limits: &Limits) -> Result<Coverage<T::Sieve>> {
    let families = (0..site.object_count())
        .map(|x| site.sieves_on(x, limits).map(|v| v.into_iter().collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Coverage { families })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T2Witness<S, A> {
    pub x: usize,
    pub sieve: S,
    pub y: usize,
    pub arrow: A,
    pub pullback: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T3Witness<S> {
    pub x: usize,
    /// The sieve that is missing although it is locally covered.
    pub sieve: S,
    /// The member along whose arrows every pullback is covered.
    pub cover: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum T3Status<S> {
    Holds,
    Fails(T3Witness<S>),
    NotChecked(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport<S, A> {
    /// Objects whose family misses the maximal sieve.
    pub t1: Vec<usize>,
    pub t2: Option<T2Witness<S, A>>,
    pub t3: T3Status<S>,
}

impl<S, A> CoverageReport<S, A> {
    pub fn t1_holds(&self) -> bool {
        self.t1.is_empty()
    }

    pub fn t2_holds(&self) -> bool {
        self.t2.is_none()
    }

    pub fn t3_holds(&self) -> bool {
        matches!(self.t3, T3Status::Holds)
    }

    pub fn is_coverage(&self) -> bool {
        self.t1_holds() && self.t2_holds()
    }

    pub fn is_topology(&self) -> bool {
        self.is_coverage() && self.t3_holds()
    }

    /// One line per axiom, with witnesses.
    pub fn lines<T>(&self, site: &T) -> Vec<String>
    where
        T: Site<Sieve = S, Arrow = A>,
        A: Copy,
    {
        let mut out = Vec::new();
        if self.t1.is_empty() {
            out.push("T1 holds".to_string());
        } else {
            let objs: Vec<String> = self.t1.iter().map(|&x| site.object_label(x)).collect();
            out.push(format!("T1 fails: maximal sieve missing at {}", objs.join(", ")));
        }
        match &self.t2 {
            None => out.push("T2 holds".to_string()),
            Some(w) => out.push(format!(
                "T2 fails: pulling back {} along {} gives {}, which is not in J({})",
                site.show_sieve(&w.sieve),
                site.show_arrow(w.arrow, w.y),
                site.show_sieve(&w.pullback),
                site.object_label(w.y)
            )),
        }
        match &self.t3 {
            T3Status::Holds => out.push("T3 holds".to_string()),
            T3Status::Fails(w) => out.push(format!(
                "T3 fails: {} is covered locally along {} but is not in J({})",
                site.show_sieve(&w.sieve),
                site.show_sieve(&w.cover),
                site.object_label(w.x)
            )),
            T3Status::NotChecked(why) => out.push(format!("T3 not checked: {why}")),
        }
        out
    }
}

pub fn check_t1<T: Site>(site: &T, j: &Coverage<T::Sieve>) -> Vec<usize> {
    (0..site.object_count()).filter(|&x| !j.contains(x, &site.maximal_sieve(x))).collect()
}

pub fn check_t2<T: Site>(site: &T, j: &Coverage<T::Sieve>) -> Option<T2Witness<T::Sieve, T::Arrow>> {
    let n = site.object_count();
    for x in 0..n {
        for r in &j.families[x] {
            for y in 0..n {
                for f in site.arrows(y, x) {
                    let p = site.pull_back(r, y, f);
                    if !j.contains(y, &p) {
                        return Some(T2Witness { x, sieve: r.clone(), y, arrow: f, pullback: p });
                    }
                }
            }
        }
    }
    None
}

/// Is `r` covered along `s`: do all pullbacks of `r` along arrows in `s` lie in `j`?
fn locally_covered<T: Site>(site: &T, j: &Coverage<T::Sieve>, r: &T::Sieve, s: &T::Sieve) -> bool {
    (0..site.object_count())
        .all(|y| site.arrows_in(s, y).into_iter().all(|f| j.contains(y, &site.pull_back(r, y, f))))
}

pub fn check_t3<T: Site>(site: &T, j: &Coverage<T::Sieve>, limits: &Limits) -> T3Status<T::Sieve> {
    for x in 0..site.object_count() {
        let all = match site.sieves_on(x, limits) {
            Ok(v) => v,
            Err(e) => return T3Status::NotChecked(e.to_string()),
        };
        let missing: Vec<&T::Sieve> = all.iter().filter(|r| !j.contains(x, r)).collect();
        let hit = par::find_map_first(&missing, |r| {
            j.families[x].iter().find(|s| locally_covered(site, j, r, s)).map(|s| (*r, s))
        });
        if let Some((r, s)) = hit {
            return T3Status::Fails(T3Witness { x, sieve: r.clone(), cover: s.clone() });
        }
    }
    T3Status::Holds
}

pub fn check_coverage<T: Site>(
    site: &T,
    j: &Coverage<T::Sieve>,
    limits: &Limits,
) -> CoverageReport<T::Sieve, T::Arrow> {
    CoverageReport { t1: check_t1(site, j), t2: check_t2(site, j), t3: check_t3(site, j, limits) }
}

fn same_shape<S>(a: &Coverage<S>, b: &Coverage<S>) -> Result<()> {
    if a.families.len() != b.families.len() {
        return Err(Error::Precondition("coverages on different categories".into()));
    }
    Ok(())
}

/// Objectwise intersection. The empty list has no meet.
pub fn coverage_meet<S: Ord + Clone>(list: &[Coverage<S>]) -> Result<Coverage<S>> {
    let (first, rest) = list.split_first().ok_or_else(|| Error::Precondition("meet of no coverages".into()))?;
    let mut out = first.clone();
    for k in rest {
        same_shape(&out, k)?;
        for (a, b) in out.families.iter_mut().zip(&k.families) {
            a.retain(|s| b.contains(s));
        }
    }
    Ok(out)
}

/// `J(x) ⊆ K(x)` for every `x`: `K` refines `J`.
pub fn refinement_leq<S: Ord>(j: &Coverage<S>, k: &Coverage<S>) -> Result<bool> {
    if j.families.len() != k.families.len() {
        return Err(Error::Precondition("coverages on different categories".into()));
    }
    Ok(j.families.iter().zip(&k.families).all(|(a, b)| a.is_subset(b)))
}

/// Add maximal sieves, then all pullbacks, until nothing changes.
pub fn t2_saturate<T: Site>(site: &T, j: &Coverage<T::Sieve>) -> Coverage<T::Sieve> {
    let n = site.object_count();
    let mut out = j.clone();
    let mut frontier: Vec<(usize, T::Sieve)> = Vec::new();
    for x in 0..n {
        out.families[x].insert(site.maximal_sieve(x));
        frontier.extend(out.families[x].iter().map(|s| (x, s.clone())));
    }
    while let Some((x, r)) = frontier.pop() {
        for y in 0..n {
            for f in site.arrows(y, x) {
                let p = site.pull_back(&r, y, f);
                if out.families[y].insert(p.clone()) {
                    frontier.push((y, p));
                }
            }
        }
    }
    out
}

/// The least coverage containing every input.
pub fn coverage_join_closure<T: Site>(site: &T, list: &[Coverage<T::Sieve>]) -> Result<Coverage<T::Sieve>> {
    let mut union = Coverage { families: vec![BTreeSet::new(); site.object_count()] };
    for k in list {
        same_shape(&union, k)?;
        for (a, b) in union.families.iter_mut().zip(&k.families) {
            a.extend(b.iter().cloned());
        }
    }
    Ok(t2_saturate(site, &union))
}

/// Alternate T2- and T3-saturation until both are stable.
pub fn topology_closure<T: Site>(
    site: &T,
    j: &Coverage<T::Sieve>,
    limits: &Limits,
) -> Result<Coverage<T::Sieve>> {
    let n = site.object_count();
    let universe = (0..n).map(|x| site.sieves_on(x, limits)).collect::<Result<Vec<_>>>()?;
    let mut out = t2_saturate(site, j);
    loop {
        let mut grew = false;
        for x in 0..n {
            let missing: Vec<&T::Sieve> = universe[x].iter().filter(|r| !out.contains(x, r)).collect();
            let snapshot = &out;
            let added: Vec<T::Sieve> = par::map_slice(&missing, |r| {
                snapshot.families[x].iter().any(|s| locally_covered(site, snapshot, r, s)).then(|| (*r).clone())
            })
            .into_iter()
            .flatten()
            .collect();
            if !added.is_empty() {
                grew = true;
                out.families[x].extend(added);
            }
        }
        if !grew {
            return Ok(out);
        }
        out = t2_saturate(site, &out);
    }
}

/// Sieve universe of a site with pullbacks precomputed as indices.
struct Universe<S> {
    sieves: Vec<Vec<S>>,
    maximal: Vec<usize>,
    /// `pullbacks[x][i]`: indices `(y, j)` of every pullback of sieve `i` on `x`.
    pullbacks: Vec<Vec<Vec<(usize, usize)>>>,
}

impl<S: Ord + Clone> Universe<S> {
    fn build<T: Site<Sieve = S>>(site: &T, limits: &Limits) -> Result<Self> {
        let n = site.object_count();
        let sieves = (0..n).map(|x| site.sieves_on(x, limits)).collect::<Result<Vec<_>>>()?;
        let index = |y: usize, s: &S| -> Result<usize> {
            sieves[y]
                .binary_search(s)
                .map_err(|_| Error::Invariant("pullback outside the sieve universe".into()))
        };
        let maximal = (0..n).map(|x| index(x, &site.maximal_sieve(x))).collect::<Result<Vec<_>>>()?;
        let mut pullbacks = Vec::with_capacity(n);
        for x in 0..n {
            let mut per = Vec::with_capacity(sieves[x].len());
            for r in &sieves[x] {
                let mut v = Vec::new();
                for y in 0..n {
                    for f in site.arrows(y, x) {
                        v.push((y, index(y, &site.pull_back(r, y, f))?));
                    }
                }
                v.sort_unstable();
                v.dedup();
                per.push(v);
            }
            pullbacks.push(per);
        }
        Ok(Universe { sieves, maximal, pullbacks })
    }

    fn to_coverage(&self, masks: &[u64]) -> Coverage<S> {
        Coverage {
            families: masks
                .iter()
                .zip(&self.sieves)
                .map(|(&m, all)| all.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, s)| s.clone()).collect())
                .collect(),
        }
    }
}

/// Every family containing the maximal sieves that satisfies T1 and T2, in
/// a fixed order. The number of candidate families is bounded by
/// `limits.coverage_candidates`.
pub fn enumerate_coverages<T: Site>(site: &T, limits: &Limits) -> Result<Vec<Coverage<T::Sieve>>> {
    let u = Universe::build(site, limits)?;
    let n = site.object_count();
    let free: Vec<Vec<usize>> =
        (0..n).map(|x| (0..u.sieves[x].len()).filter(|&i| i != u.maximal[x]).collect()).collect();
    let bits: u32 = free.iter().map(|f| f.len() as u32).sum();
    let space = 1u128.checked_shl(bits).unwrap_or(u128::MAX);
    Limits::guard("coverage enumeration", space, limits.coverage_candidates)?;
    let masks = par::filter_map_range(space as u64, |code| {
        let mut masks = vec![0u64; n];
        let mut shift = 0;
        for x in 0..n {
            masks[x] = 1 << u.maximal[x];
            for (k, &i) in free[x].iter().enumerate() {
                if code >> (shift + k) & 1 == 1 {
                    masks[x] |= 1 << i;
                }
            }
            shift += free[x].len();
        }
        let t2 = (0..n).all(|x| {
            (0..u.sieves[x].len())
                .filter(|&i| masks[x] >> i & 1 == 1)
                .all(|i| u.pullbacks[x][i].iter().all(|&(y, j)| masks[y] >> j & 1 == 1))
        });
        t2.then_some(masks)
    });
    Ok(masks.iter().map(|m| u.to_coverage(m)).collect())
}

/// The members of [`enumerate_coverages`] that also satisfy T3.
pub fn enumerate_topologies<T: Site>(site: &T, limits: &Limits) -> Result<Vec<Coverage<T::Sieve>>> {
    let all = enumerate_coverages(site, limits)?;
    let keep = par::map_slice(&all, |j| matches!(check_t3(site, j, limits), T3Status::Holds));
    Ok(all.into_iter().zip(keep).filter_map(|(j, k)| k.then_some(j)).collect())
}

/// `G̃J` with the axiom report of the image.
#[derive(Clone, Debug)]
pub struct CoverageImage {
    pub category: Arc<EnrichedCategory>,
    pub coverage: Coverage<Sieve>,
    pub report: CoverageReport<Sieve, Elem>,
}

/// `G̃J(x) = {G̃R | R ∈ J(x)}` over `base_change_category(g, c)`.
///
/// Refused unless `g` is faithful, conservative and a right adjoint. The
/// image is guaranteed to satisfy T1 and T2 only when the left adjoint of
/// `g` is strong monoidal; in that case a failure is an invariant error,
/// otherwise it is reported in `report`.
pub fn base_change_coverage(
    g: &BaseChange,
    c: &EnrichedCategory,
    j: &Coverage<Sieve>,
    limits: &Limits,
) -> Result<CoverageImage> {
    if let Some(why) = g.refusal() {
        return Err(Error::Hypothesis(why));
    }
    if let Some(&x) = check_t1(c, j).first() {
        return Err(Error::Precondition(format!("input fails T1 at {}", c.label(x))));
    }
    if check_t2(c, j).is_some() {
        return Err(Error::Precondition("input fails T2".into()));
    }
    let image = Arc::new(base_change_category(g, c)?);
    let coverage = coverage_image(g, c, j)?;
    let report = check_coverage(&*image, &coverage, limits);
    if g.flags().left_adjoint_strong_monoidal && !report.is_coverage() {
        return Err(Error::Invariant(format!(
            "image of a coverage is not a coverage: {}",
            report.lines(&*image).join("; ")
        )));
    }
    Ok(CoverageImage { category: image, coverage, report })
}

/// Pointwise image of a coverage, without any checks. Used to compare
/// images of distinct coverages.
pub fn coverage_image(g: &BaseChange, c: &EnrichedCategory, j: &Coverage<Sieve>) -> Result<Coverage<Sieve>> {
    let families = j
        .families
        .iter()
        .map(|fam| fam.iter().map(|s| sieve::base_change_sieve(g, c, s)).collect::<Result<BTreeSet<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Coverage { families })
}

/// Render a coverage one object per line.
pub fn show_coverage<T: Site>(site: &T, j: &Coverage<T::Sieve>) -> Vec<String> {
    (0..site.object_count())
        .map(|x| {
            let members: Vec<String> = j.families[x].iter().map(|s| site.show_sieve(s)).collect();
            format!("J({}) = [{}]", site.object_label(x), members.join(", "))
        })
        .collect()
}
