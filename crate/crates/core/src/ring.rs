//! Finite rings as one-object sites: right ideals are the sieves and the
//! colon ideal `(I : a)` is the pullback, so Gabriel topologies are exactly
//! the Grothendieck topologies of [`crate::coverage`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::coverage::{self, Coverage, Site};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::par;

pub type RElem = u32;

#[derive(Debug)]
pub struct FiniteRing {
    name: String,
    labels: Vec<String>,
    n: usize,
    add: Vec<RElem>,
    mul: Vec<RElem>,
    neg: Vec<RElem>,
    zero: RElem,
    one: RElem,
    commutative: bool,
    ideals: OnceLock<Vec<Ideal>>,
}

impl Clone for FiniteRing {
    fn clone(&self) -> Self {
        FiniteRing {
            name: self.name.clone(),
            labels: self.labels.clone(),
            n: self.n,
            add: self.add.clone(),
            mul: self.mul.clone(),
            neg: self.neg.clone(),
            zero: self.zero,
            one: self.one,
            commutative: self.commutative,
            ideals: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.add == other.add && self.mul == other.mul
    }
}

impl Eq for FiniteRing {}

/// A right ideal, as the sorted list of its elements. Ordered by size first
/// so that sorting lists inclusion before any strict superset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    elems: Vec<RElem>,
}

impl Ord for Ideal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elems.len(), &self.elems).cmp(&(other.elems.len(), &other.elems))
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ideal {
    pub fn elements(&self) -> &[RElem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, a: RElem) -> bool {
        self.elems.binary_search(&a).is_ok()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.elems.iter().all(|&a| other.contains(a))
    }

    fn from_set(s: BTreeSet<RElem>) -> Self {
        Ideal { elems: s.into_iter().collect() }
    }
}

fn tables_from_rows(what: &'static str, n: usize, rows: &[Vec<RElem>]) -> Result<Vec<RElem>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::malformed(what, format!("table is not {n}x{n}")));
    }
    if rows.iter().flatten().any(|&e| e as usize >= n) {
        return Err(Error::malformed(what, "table entry out of range"));
    }
    Ok(rows.iter().flatten().copied().collect())
}

impl FiniteRing {
    /// Validate the ring axioms and build. Tables are indexed by element
    /// position: `add[a][b]` is the index of `a + b`.
    pub fn from_tables(
        name: impl Into<String>,
        labels: Vec<String>,
        add: &[Vec<RElem>],
        mul: &[Vec<RElem>],
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::malformed("ring", "empty carrier"));
        }
        if n > 4096 {
            return Err(Error::TooLarge { what: "ring carrier", size: n as u128, cap: 4096 });
        }
        let add = tables_from_rows("ring", n, add)?;
        let mul = tables_from_rows("ring", n, mul)?;
        let a = |x: usize, y: usize| add[x * n + y] as usize;
        let m = |x: usize, y: usize| mul[x * n + y] as usize;
        let bad = |law: &str, w: String| Err(Error::malformed("ring", format!("{law} fails at {w}")));
        let l = |x: usize| labels[x].as_str();

        let zero = match (0..n).find(|&z| (0..n).all(|x| a(z, x) == x && a(x, z) == x)) {
            Some(z) => z,
            None => return bad("additive identity", "every element".into()),
        };
        let one = match (0..n).find(|&e| (0..n).all(|x| m(e, x) == x && m(x, e) == x)) {
            Some(e) => e,
            None => return bad("multiplicative identity", "every element".into()),
        };
        let mut neg = Vec::with_capacity(n);
        for x in 0..n {
            match (0..n).find(|&y| a(x, y) == zero) {
                Some(y) => neg.push(y as RElem),
                None => return bad("additive inverse", l(x).into()),
            }
        }
        for x in 0..n {
            for y in 0..n {
                if a(x, y) != a(y, x) {
                    return bad("commutativity of +", format!("({}, {})", l(x), l(y)));
                }
                for z in 0..n {
                    if a(a(x, y), z) != a(x, a(y, z)) {
                        return bad("associativity of +", format!("({}, {}, {})", l(x), l(y), l(z)));
                    }
                    if m(m(x, y), z) != m(x, m(y, z)) {
                        return bad("associativity of *", format!("({}, {}, {})", l(x), l(y), l(z)));
                    }
                    if m(x, a(y, z)) != a(m(x, y), m(x, z)) || m(a(y, z), x) != a(m(y, x), m(z, x)) {
                        return bad("distributivity", format!("({}, {}, {})", l(x), l(y), l(z)));
                    }
                }
            }
        }
        let commutative = (0..n).all(|x| (0..n).all(|y| m(x, y) == m(y, x)));
        let mut seen = BTreeSet::new();
        if let Some(d) = labels.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::malformed("ring", format!("duplicate label `{d}`")));
        }
        Ok(FiniteRing {
            name: name.into(),
            labels,
            n,
            add,
            mul,
            neg,
            zero: zero as RElem,
            one: one as RElem,
            commutative,
            ideals: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = RElem> + Clone {
        0..self.n as RElem
    }

    pub fn label(&self, a: RElem) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elem(&self, label: &str) -> Option<RElem> {
        self.labels.iter().position(|l| l == label).map(|i| i as RElem)
    }

    #[inline]
    pub fn add(&self, a: RElem, b: RElem) -> RElem {
        self.add[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: RElem, b: RElem) -> RElem {
        self.mul[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: RElem) -> RElem {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: RElem, b: RElem) -> RElem {
        self.add(a, self.neg(b))
    }

    pub fn zero(&self) -> RElem {
        self.zero
    }

    pub fn one(&self) -> RElem {
        self.one
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn add_rows(&self) -> Vec<Vec<RElem>> {
        self.add.chunks(self.n).map(<[RElem]>::to_vec).collect()
    }

    pub fn mul_rows(&self) -> Vec<Vec<RElem>> {
        self.mul.chunks(self.n).map(<[RElem]>::to_vec).collect()
    }

    /// Additive subgroup generated by `seed`.
    fn additive_closure(&self, seed: impl IntoIterator<Item = RElem>) -> BTreeSet<RElem> {
        let mut set: BTreeSet<RElem> = BTreeSet::from([self.zero]);
        let gens: Vec<RElem> = seed.into_iter().collect();
        let mut queue: VecDeque<RElem> = VecDeque::from([self.zero]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.add(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// `Σ g A` over the generators.
    pub fn right_ideal_generated(&self, gens: &[RElem]) -> Ideal {
        let products: BTreeSet<RElem> =
            gens.iter().flat_map(|&g| self.elements().map(move |r| (g, r))).map(|(g, r)| self.mul(g, r)).collect();
        Ideal::from_set(self.additive_closure(products))
    }

    pub fn zero_ideal(&self) -> Ideal {
        Ideal { elems: vec![self.zero] }
    }

    pub fn unit_ideal(&self) -> Ideal {
        Ideal { elems: self.elements().collect() }
    }

    pub fn is_right_ideal(&self, set: &BTreeSet<RElem>) -> bool {
        set.contains(&self.zero)
            && set.iter().all(|&a| {
                set.contains(&self.neg(a))
                    && set.iter().all(|&b| set.contains(&self.add(a, b)))
                    && self.elements().all(|r| set.contains(&self.mul(a, r)))
            })
    }

    pub fn is_two_sided(&self, i: &Ideal) -> bool {
        i.elems.iter().all(|&a| self.elements().all(|r| i.contains(self.mul(r, a))))
    }

    /// Every right ideal, sorted by size then elements.
    pub fn right_ideals(&self) -> &[Ideal] {
        self.ideals.get_or_init(|| {
            let cyclic: BTreeSet<Ideal> = self.elements().map(|a| self.right_ideal_generated(&[a])).collect();
            let mut all: BTreeSet<Ideal> = cyclic.clone();
            let mut frontier: Vec<Ideal> = cyclic.iter().cloned().collect();
            while let Some(i) = frontier.pop() {
                for c in &cyclic {
                    let s = Ideal::from_set(self.additive_closure(i.elems.iter().chain(&c.elems).copied()));
                    if all.insert(s.clone()) {
                        frontier.push(s);
                    }
                }
            }
            all.into_iter().collect()
        })
    }

    pub fn ideal_index(&self, i: &Ideal) -> Option<usize> {
        self.right_ideals().binary_search(i).ok()
    }

    /// `(I : a) = {r : a r ∈ I}`.
    pub fn colon(&self, i: &Ideal, a: RElem) -> Ideal {
        Ideal { elems: self.elements().filter(|&r| i.contains(self.mul(a, r))).collect() }
    }

    pub fn intersect(&self, a: &Ideal, b: &Ideal) -> Ideal {
        Ideal { elems: a.elems.iter().copied().filter(|&x| b.contains(x)).collect() }
    }

    /// A short generating set, chosen greedily in element order.
    pub fn generators(&self, i: &Ideal) -> Vec<RElem> {
        let mut gens = Vec::new();
        let mut span = self.zero_ideal();
        for &a in &i.elems {
            if !span.contains(a) {
                gens.push(a);
                span = self.right_ideal_generated(&gens);
            }
        }
        gens
    }

    pub fn show_ideal(&self, i: &Ideal) -> String {
        if i.len() == self.n {
            return format!("({})", self.label(self.one));
        }
        let gens = self.generators(i);
        if gens.is_empty() {
            return format!("({})", self.label(self.zero));
        }
        let ls: Vec<&str> = gens.iter().map(|&g| self.label(g)).collect();
        format!("({})", ls.join(", "))
    }

    pub fn show_set(&self, s: &[RElem]) -> String {
        let ls: Vec<&str> = s.iter().map(|&g| self.label(g)).collect();
        format!("{{{}}}", ls.join(", "))
    }

    pub fn enumerate_right_ideals(&self, limits: &Limits) -> Result<Vec<Ideal>> {
        Limits::guard("ring carrier", self.n as u128, limits.ring_size as u128)?;
        Ok(self.right_ideals().to_vec())
    }

    pub fn is_zero_divisor(&self, a: RElem) -> bool {
        self.elements().any(|b| b != self.zero && (self.mul(a, b) == self.zero || self.mul(b, a) == self.zero))
    }

    /// Additive order of `a`.
    pub fn additive_order(&self, a: RElem) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.zero {
            x = self.add(x, a);
            k += 1;
        }
        k
    }
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} elements{})", self.name, self.n, if self.commutative { ", commutative" } else { "" })
    }
}

pub fn zmod(n: u32) -> Result<FiniteRing> {
    if n < 2 {
        return Err(Error::Precondition("Z/n needs n >= 2".into()));
    }
    if n > 4096 {
        return Err(Error::TooLarge { what: "ring carrier", size: n as u128, cap: 4096 });
    }
    let labels = (0..n).map(|k| k.to_string()).collect();
    let add: Vec<Vec<RElem>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let mul: Vec<Vec<RElem>> =
        (0..n).map(|a| (0..n).map(|b| ((a as u64 * b as u64) % n as u64) as RElem).collect()).collect();
    FiniteRing::from_tables(format!("Z/{n}"), labels, &add, &mul)
}

/// Upper triangular 2x2 matrices over F2, labelled `[a b; 0 c]` as `abc`.
pub fn upper_triangular_f2() -> FiniteRing {
    let decode = |k: u32| (k >> 2 & 1, k >> 1 & 1, k & 1);
    let encode = |a: u32, b: u32, c: u32| (a & 1) << 2 | (b & 1) << 1 | (c & 1);
    let labels = (0..8).map(|k| {
        let (a, b, c) = decode(k);
        format!("{a}{b}{c}")
    });
    let add: Vec<Vec<RElem>> = (0..8).map(|x| (0..8).map(|y| x ^ y).collect()).collect();
    let mul: Vec<Vec<RElem>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (a, b, c) = decode(x);
                    let (d, e, f) = decode(y);
                    encode(a * d, a * e + b * f, c * f)
                })
                .collect()
        })
        .collect();
    FiniteRing::from_tables("UT2(F2)", labels.collect(), &add, &mul).expect("matrix ring axioms")
}

pub fn product(a: &FiniteRing, b: &FiniteRing) -> Result<FiniteRing> {
    let (n, m) = (a.len() as u32, b.len() as u32);
    let pair = |k: u32| (k / m, k % m);
    let labels = (0..n * m)
        .map(|k| {
            let (x, y) = pair(k);
            format!("({},{})", a.label(x), b.label(y))
        })
        .collect();
    let table = |op: &dyn Fn(u32, u32, u32, u32) -> (u32, u32)| -> Vec<Vec<RElem>> {
        (0..n * m)
            .map(|k| {
                (0..n * m)
                    .map(|l| {
                        let ((x1, y1), (x2, y2)) = (pair(k), pair(l));
                        let (x, y) = op(x1, y1, x2, y2);
                        x * m + y
                    })
                    .collect()
            })
            .collect()
    };
    let add = table(&|x1, y1, x2, y2| (a.add(x1, x2), b.add(y1, y2)));
    let mul = table(&|x1, y1, x2, y2| (a.mul(x1, x2), b.mul(y1, y2)));
    FiniteRing::from_tables(format!("{}x{}", a.name(), b.name()), labels, &add, &mul)
}

/// The one-object site of a ring: arrows are ring elements, sieves are right
/// ideals, pullback along `a` is `(I : a)`.
impl Site for FiniteRing {
    type Sieve = Ideal;
    type Arrow = RElem;

    fn object_count(&self) -> usize {
        1
    }

    fn object_label(&self, _: usize) -> String {
        "*".into()
    }

    fn target(&self, _: &Ideal) -> usize {
        0
    }

    fn maximal_sieve(&self, _: usize) -> Ideal {
        self.unit_ideal()
    }

    fn sieves_on(&self, _: usize, limits: &Limits) -> Result<Vec<Ideal>> {
        self.enumerate_right_ideals(limits)
    }

    fn arrows(&self, _: usize, _: usize) -> Vec<RElem> {
        self.elements().collect()
    }

    fn arrows_in(&self, s: &Ideal, _: usize) -> Vec<RElem> {
        s.elems.clone()
    }

    fn pull_back(&self, s: &Ideal, _: usize, a: RElem) -> Ideal {
        self.colon(s, a)
    }

    fn sieve_problem(&self, s: &Ideal) -> Option<String> {
        let set: BTreeSet<RElem> = s.elems.iter().copied().collect();
        (!self.is_right_ideal(&set)).then(|| format!("{} is not a right ideal", self.show_set(&s.elems)))
    }

    fn show_sieve(&self, s: &Ideal) -> String {
        self.show_ideal(s)
    }

    fn show_arrow(&self, a: RElem, _: usize) -> String {
        self.label(a).to_string()
    }
}

/// A set of right ideals, the candidate Gabriel topology.
pub type IdealFamily = BTreeSet<Ideal>;

pub fn as_coverage(f: &IdealFamily) -> Coverage<Ideal> {
    Coverage { families: vec![f.clone()] }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabrielReport {
    pub nonempty: bool,
    /// `I` in the family, `J ⊇ I` not in it.
    pub r1: Option<(Ideal, Ideal)>,
    /// `I` in the family, `(I : a)` not in it.
    pub r2: Option<(Ideal, RElem)>,
    /// `I` missing although every `(I : a)`, `a ∈ J`, is in the family.
    pub r3: Option<(Ideal, Ideal)>,
}

impl GabrielReport {
    pub fn holds(&self) -> bool {
        self.nonempty && self.r1.is_none() && self.r2.is_none() && self.r3.is_none()
    }

    pub fn lines(&self, ring: &FiniteRing) -> Vec<String> {
        let s = |i: &Ideal| ring.show_ideal(i);
        vec![
            if self.nonempty { "non-empty".into() } else { "empty family".into() },
            match &self.r1 {
                None => "R1 holds".into(),
                Some((i, j)) => format!("R1 fails: {} is a member but {} is not", s(i), s(j)),
            },
            match &self.r2 {
                None => "R2 holds".into(),
                Some((i, a)) => format!(
                    "R2 fails: ({} : {}) = {} is not a member",
                    s(i),
                    ring.label(*a),
                    s(&ring.colon(i, *a))
                ),
            },
            match &self.r3 {
                None => "R3 holds".into(),
                Some((i, j)) => format!(
                    "R3 fails: every (I : a) with a in {} is a member but I = {} is not",
                    s(j),
                    s(i)
                ),
            },
        ]
    }
}

/// Check the Gabriel axioms directly over the ideal lattice.
pub fn check_gabriel(ring: &FiniteRing, f: &IdealFamily) -> GabrielReport {
    let ideals = ring.right_ideals();
    let r1 = f.iter().find_map(|i| ideals.iter().find(|j| i.is_subset(j) && !f.contains(j)).map(|j| (i.clone(), j.clone())));
    let r2 = f.iter().find_map(|i| ring.elements().find(|&a| !f.contains(&ring.colon(i, a))).map(|a| (i.clone(), a)));
    let r3 = ideals.iter().filter(|i| !f.contains(i)).find_map(|i| {
        f.iter().find(|j| j.elems.iter().all(|&a| f.contains(&ring.colon(i, a)))).map(|j| (i.clone(), j.clone()))
    });
    GabrielReport { nonempty: !f.is_empty(), r1, r2, r3 }
}

/// Least Gabriel topology containing `seeds`; `{(1)}` when there are none.
pub fn gabriel_closure(ring: &FiniteRing, seeds: &[Ideal], limits: &Limits) -> Result<IdealFamily> {
    for s in seeds {
        if let Some(p) = ring.sieve_problem(s) {
            return Err(Error::malformed("ideal", p));
        }
    }
    let j = Coverage { families: vec![seeds.iter().cloned().collect()] };
    let mut out = coverage::topology_closure(ring, &j, limits)?;
    Ok(std::mem::take(&mut out.families[0]))
}

pub fn check_mult_set(ring: &FiniteRing, s: &BTreeSet<RElem>) -> Result<()> {
    if !s.contains(&ring.one()) {
        return Err(Error::Precondition(format!("{} does not contain 1", ring.show_set(&s.iter().copied().collect::<Vec<_>>()))));
    }
    for &a in s {
        for &b in s {
            if !s.contains(&ring.mul(a, b)) {
                return Err(Error::Precondition(format!(
                    "not multiplicatively closed: {} * {} = {}",
                    ring.label(a),
                    ring.label(b),
                    ring.label(ring.mul(a, b))
                )));
            }
        }
    }
    Ok(())
}

/// `H_S = {I : (I : a) ∩ S ≠ ∅ for all a}`.
pub fn from_mult_set(ring: &FiniteRing, s: &BTreeSet<RElem>) -> Result<IdealFamily> {
    check_mult_set(ring, s)?;
    let f: IdealFamily = ring
        .right_ideals()
        .iter()
        .filter(|i| ring.elements().all(|a| ring.colon(i, a).elems.iter().any(|r| s.contains(r))))
        .cloned()
        .collect();
    let report = check_gabriel(ring, &f);
    if !report.holds() {
        return Err(Error::Hypothesis(format!(
            "H_S is not a Gabriel topology on {}: {}",
            ring.name(),
            report.lines(ring).join("; ")
        )));
    }
    Ok(f)
}

/// `t(A) = {x : xJ = 0 for some J in t}`.
pub fn torsion(ring: &FiniteRing, t: &IdealFamily) -> Result<Ideal> {
    let set: BTreeSet<RElem> = ring
        .elements()
        .filter(|&x| t.iter().any(|j| j.elems.iter().all(|&i| ring.mul(x, i) == ring.zero())))
        .collect();
    if !ring.is_right_ideal(&set) {
        return Err(Error::Invariant(format!("torsion {} is not a right ideal", ring.show_set(&set.iter().copied().collect::<Vec<_>>()))));
    }
    Ok(Ideal::from_set(set))
}

/// A finite right module: abelian group tables plus `act[m][r] = m·r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModule {
    pub labels: Vec<String>,
    add: Vec<u32>,
    act: Vec<u32>,
    zero: u32,
    ring_size: usize,
}

impl FiniteModule {
    pub fn from_tables(ring: &FiniteRing, labels: Vec<String>, add: &[Vec<u32>], act: &[Vec<u32>]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::malformed("module", "empty carrier"));
        }
        let add = tables_from_rows("module", n, add)?;
        if act.len() != n || act.iter().any(|r| r.len() != ring.len()) || act.iter().flatten().any(|&e| e as usize >= n) {
            return Err(Error::malformed("module", "action table has the wrong shape"));
        }
        let act: Vec<u32> = act.iter().flatten().copied().collect();
        let k = ring.len();
        let a = |x: usize, y: usize| add[x * n + y] as usize;
        let ac = |m: usize, r: RElem| act[m * k + r as usize] as usize;
        let zero = (0..n)
            .find(|&z| (0..n).all(|x| a(z, x) == x))
            .ok_or_else(|| Error::malformed("module", "no additive identity"))?;
        for x in 0..n {
            if !(0..n).any(|y| a(x, y) == zero) {
                return Err(Error::malformed("module", format!("{} has no inverse", labels[x])));
            }
            for y in 0..n {
                if a(x, y) != a(y, x) || (0..n).any(|z| a(a(x, y), z) != a(x, a(y, z))) {
                    return Err(Error::malformed("module", "addition is not an abelian group"));
                }
                for r in ring.elements() {
                    if ac(a(x, y), r) != a(ac(x, r), ac(y, r)) {
                        return Err(Error::malformed("module", "action is not additive in the module"));
                    }
                }
            }
            if ac(x, ring.one()) != x {
                return Err(Error::malformed("module", "1 does not act as the identity"));
            }
            for r in ring.elements() {
                for s in ring.elements() {
                    if ac(x, ring.add(r, s)) != a(ac(x, r), ac(x, s)) || ac(ac(x, r), s) != ac(x, ring.mul(r, s)) {
                        return Err(Error::malformed("module", "action is not a right action"));
                    }
                }
            }
        }
        Ok(FiniteModule { labels, add, act, zero: zero as u32, ring_size: k })
    }

    /// `A_A`.
    pub fn regular(ring: &FiniteRing) -> Self {
        FiniteModule {
            labels: ring.labels().to_vec(),
            add: ring.add.clone(),
            act: ring.mul.clone(),
            zero: ring.zero(),
            ring_size: ring.len(),
        }
    }

    /// `A/I` for a right ideal `I`, elements labelled by their least representative.
    pub fn quotient(ring: &FiniteRing, i: &Ideal) -> Result<Self> {
        if let Some(p) = ring.sieve_problem(i) {
            return Err(Error::malformed("ideal", p));
        }
        let mut class = vec![u32::MAX; ring.len()];
        let mut reps = Vec::new();
        for a in ring.elements() {
            if class[a as usize] == u32::MAX {
                let c = reps.len() as u32;
                for &x in &i.elems {
                    class[ring.add(a, x) as usize] = c;
                }
                reps.push(a);
            }
        }
        let n = reps.len();
        let labels = reps.iter().map(|&r| ring.label(r).to_string()).collect();
        let add = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| class[ring.add(reps[x], reps[y]) as usize]).collect();
        let act = (0..n)
            .flat_map(|x| ring.elements().map(move |r| (x, r)))
            .map(|(x, r)| class[ring.mul(reps[x], r) as usize])
            .collect();
        Ok(FiniteModule { labels, add, act, zero: class[ring.zero() as usize], ring_size: ring.len() })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.len() + y as usize]
    }

    #[inline]
    pub fn act(&self, m: u32, r: RElem) -> u32 {
        self.act[m as usize * self.ring_size + r as usize]
    }

    pub fn zero(&self) -> u32 {
        self.zero
    }
}

/// A module map `I -> M`, as the images of the elements of `I` in order.
pub type HomMap = Vec<u32>;

/// `hom_A(I, M)` by generator assignment: choose images of a generating set
/// of `I`, propagate through sums and right multiples, keep consistent maps.
pub fn hom_from_ideal(ring: &FiniteRing, i: &Ideal, m: &FiniteModule, limits: &Limits) -> Result<Vec<HomMap>> {
    let gens = ring.generators(i);
    let space = (m.len() as u128).checked_pow(gens.len() as u32).unwrap_or(u128::MAX);
    Limits::guard("module hom search", space, limits.hom_candidates)?;
    let pos: BTreeMap<RElem, usize> = i.elems.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let maps = par::filter_map_range(space as u64, |mut code| {
        let mut f: Vec<Option<u32>> = vec![None; i.len()];
        let mut queue = VecDeque::new();
        f[pos[&ring.zero()]] = Some(m.zero());
        queue.push_back(ring.zero());
        for &g in &gens {
            let v = (code % m.len() as u64) as u32;
            code /= m.len() as u64;
            match f[pos[&g]] {
                Some(w) if w != v => return None,
                _ => f[pos[&g]] = Some(v),
            }
            queue.push_back(g);
        }
        // propagate until every element of I has an image
        while let Some(a) = queue.pop_front() {
            let fa = f[pos[&a]].unwrap();
            for r in ring.elements() {
                let (b, fb) = (ring.mul(a, r), m.act(fa, r));
                match f[pos[&b]] {
                    Some(w) if w != fb => return None,
                    Some(_) => {}
                    None => {
                        f[pos[&b]] = Some(fb);
                        queue.push_back(b);
                    }
                }
            }
            for &c in &i.elems {
                if let Some(fc) = f[pos[&c]] {
                    let (b, fb) = (ring.add(a, c), m.add(fa, fc));
                    match f[pos[&b]] {
                        Some(w) if w != fb => return None,
                        Some(_) => {}
                        None => {
                            f[pos[&b]] = Some(fb);
                            queue.push_back(b);
                        }
                    }
                }
            }
        }
        let f: HomMap = f.into_iter().collect::<Option<Vec<_>>>()?;
        is_module_map(ring, i, m, &f).then_some(f)
    });
    let mut maps = maps;
    maps.sort();
    maps.dedup();
    Ok(maps)
}

pub fn is_module_map(ring: &FiniteRing, i: &Ideal, m: &FiniteModule, f: &[u32]) -> bool {
    let at = |a: RElem| f[i.elems.binary_search(&a).unwrap()];
    i.elems.iter().enumerate().all(|(k, &a)| {
        i.elems.iter().enumerate().all(|(l, &b)| at(ring.add(a, b)) == m.add(f[k], f[l]))
            && ring.elements().all(|r| at(ring.mul(a, r)) == m.act(f[k], r))
    })
}

/// Restriction `m ↦ (i ↦ m·i)` as a map into `hom_from_ideal` output.
fn restriction(i: &Ideal, m: &FiniteModule, x: u32) -> HomMap {
    i.elems.iter().map(|&a| m.act(x, a)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedWitness {
    pub ideal: Ideal,
    pub reason: String,
}

/// `M` is a sheaf iff `M -> hom_A(I, M)` is bijective for every `I` in `t`.
pub fn is_j_closed_module(
    ring: &FiniteRing,
    m: &FiniteModule,
    t: &IdealFamily,
    limits: &Limits,
) -> Result<Option<ClosedWitness>> {
    for i in t {
        let homs = hom_from_ideal(ring, i, m, limits)?;
        let images: Vec<HomMap> = (0..m.len() as u32).map(|x| restriction(i, m, x)).collect();
        let distinct: BTreeSet<&HomMap> = images.iter().collect();
        if distinct.len() < m.len() {
            let (x, y) = (0..m.len())
                .flat_map(|x| (x + 1..m.len()).map(move |y| (x, y)))
                .find(|&(x, y)| images[x] == images[y])
                .unwrap();
            return Ok(Some(ClosedWitness {
                ideal: i.clone(),
                reason: format!(
                    "restriction to {} is not injective: {} and {} agree",
                    ring.show_ideal(i),
                    m.labels[x],
                    m.labels[y]
                ),
            }));
        }
        if homs.len() != m.len() {
            return Ok(Some(ClosedWitness {
                ideal: i.clone(),
                reason: format!(
                    "restriction to {} is not surjective: {} maps out of {} elements",
                    ring.show_ideal(i),
                    homs.len(),
                    m.len()
                ),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct Localization {
    pub i_min: Ideal,
    pub torsion: Ideal,
    /// `hom_A(I_min, A/t(A))`, sorted.
    pub homs: Vec<HomMap>,
    /// Pointwise addition on `homs`.
    pub module_add: Vec<Vec<u32>>,
    /// `(f·a)(i) = f(a i)`; present only when `I_min` is two-sided.
    pub module_act: Option<Vec<Vec<u32>>>,
    /// Index in `homs` of `ℓ(a) = (i ↦ a i + t(A))`.
    pub canonical: Vec<u32>,
    pub ring: Option<FiniteRing>,
    /// Why no ring structure was installed.
    pub ring_note: Option<String>,
}

impl Localization {
    pub fn len(&self) -> usize {
        self.homs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homs.is_empty()
    }

    /// Elements of `A` sent to zero by the canonical map.
    pub fn kernel(&self, ring: &FiniteRing) -> Vec<RElem> {
        let zero = self.canonical[ring.zero() as usize];
        ring.elements().filter(|&a| self.canonical[a as usize] == zero).collect()
    }
}

/// `A_t = hom_A(I_min, A/t(A))`, the value at the least member.
pub fn localize(ring: &FiniteRing, t: &IdealFamily, limits: &Limits) -> Result<Localization> {
    let report = check_gabriel(ring, t);
    if !report.holds() {
        return Err(Error::Precondition(format!("not a Gabriel topology: {}", report.lines(ring).join("; "))));
    }
    let i_min = t.iter().skip(1).fold(t.iter().next().unwrap().clone(), |acc, i| ring.intersect(&acc, i));
    if !t.contains(&i_min) {
        return Err(Error::Invariant(format!(
            "intersection {} of the topology is not a member",
            ring.show_ideal(&i_min)
        )));
    }
    let tors = torsion(ring, t)?;
    let quot = FiniteModule::quotient(ring, &tors)?;
    let homs = hom_from_ideal(ring, &i_min, &quot, limits)?;
    let index: BTreeMap<&HomMap, u32> = homs.iter().enumerate().map(|(k, f)| (f, k as u32)).collect();
    let lookup = |f: &HomMap| -> Result<u32> {
        index.get(f).copied().ok_or_else(|| Error::Invariant("map outside the hom set".into()))
    };
    let module_add = homs
        .iter()
        .map(|f| homs.iter().map(|g| lookup(&f.iter().zip(g).map(|(&a, &b)| quot.add(a, b)).collect())).collect())
        .collect::<Result<Vec<Vec<u32>>>>()?;
    let pos = |a: RElem| i_min.elems.binary_search(&a).unwrap();
    let module_act = if ring.is_two_sided(&i_min) {
        Some(
            homs.iter()
                .map(|f| {
                    ring.elements()
                        .map(|a| lookup(&i_min.elems.iter().map(|&i| f[pos(ring.mul(a, i))]).collect()))
                        .collect::<Result<Vec<u32>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let class_of = |a: RElem| -> u32 { quot_class(ring, &tors, &quot, a) };
    let canonical = ring
        .elements()
        .map(|a| lookup(&i_min.elems.iter().map(|&i| class_of(ring.mul(a, i))).collect()))
        .collect::<Result<Vec<u32>>>()?;

    let (ring_out, ring_note) = if !ring.is_commutative() {
        (None, Some("ring structure is only installed over commutative rings".to_string()))
    } else if canonical.iter().collect::<BTreeSet<_>>().len() != homs.len() {
        (None, Some("the canonical map A -> A_t is not surjective".to_string()))
    } else {
        (Some(ring_via_canonical(ring, &homs, &module_add, &canonical)?), None)
    };
    Ok(Localization {
        i_min,
        torsion: tors,
        homs,
        module_add,
        module_act,
        canonical,
        ring: ring_out,
        ring_note,
    })
}

fn quot_class(ring: &FiniteRing, tors: &Ideal, quot: &FiniteModule, a: RElem) -> u32 {
    // quotient classes are numbered by least representative, in element order
    let rep = tors.elems.iter().map(|&t| ring.add(a, t)).min().unwrap();
    quot.labels.iter().position(|l| l == ring.label(rep)).unwrap() as u32
}

/// Multiplication `ℓ(a)ℓ(b) = ℓ(ab)` on a surjective canonical map.
fn ring_via_canonical(ring: &FiniteRing, homs: &[HomMap], add: &[Vec<u32>], canonical: &[u32]) -> Result<FiniteRing> {
    let n = homs.len();
    let mut lift = vec![None; n];
    for a in ring.elements() {
        lift[canonical[a as usize] as usize].get_or_insert(a);
    }
    let lift: Vec<RElem> = lift.into_iter().map(|x| x.unwrap()).collect();
    for a in ring.elements() {
        for b in ring.elements() {
            let via_lift = canonical[ring.mul(lift[canonical[a as usize] as usize], lift[canonical[b as usize] as usize]) as usize];
            if via_lift != canonical[ring.mul(a, b) as usize] {
                return Err(Error::Invariant("multiplication does not descend along the canonical map".into()));
            }
        }
    }
    let mul: Vec<Vec<RElem>> =
        (0..n).map(|x| (0..n).map(|y| canonical[ring.mul(lift[x], lift[y]) as usize]).collect()).collect();
    let labels = (0..n).map(|x| format!("[{}]", ring.label(lift[x]))).collect();
    FiniteRing::from_tables(format!("{}_t", ring.name()), labels, add, &mul)
}

/// `A[S^-1]` by the classical construction on pairs.
pub fn ring_of_fractions_oracle(ring: &FiniteRing, s: &BTreeSet<RElem>) -> Result<FiniteRing> {
    if !ring.is_commutative() {
        return Err(Error::Precondition(format!("{} is not commutative", ring.name())));
    }
    check_mult_set(ring, s)?;
    let dens: Vec<RElem> = s.iter().copied().collect();
    let pairs: Vec<(RElem, RElem)> = ring.elements().flat_map(|a| dens.iter().map(move |&d| (a, d))).collect();
    let equiv = |(a, s1): (RElem, RElem), (b, s2): (RElem, RElem)| {
        let diff = ring.sub(ring.mul(a, s2), ring.mul(b, s1));
        dens.iter().any(|&u| ring.mul(u, diff) == ring.zero())
    };
    let mut class = vec![usize::MAX; pairs.len()];
    let mut reps: Vec<(RElem, RElem)> = Vec::new();
    for (k, &p) in pairs.iter().enumerate() {
        if let Some(c) = reps.iter().position(|&r| equiv(r, p)) {
            class[k] = c;
        } else {
            class[k] = reps.len();
            reps.push(p);
        }
    }
    let class_of = |p: (RElem, RElem)| -> RElem {
        let k = pairs.iter().position(|&q| q == p).unwrap();
        class[k] as RElem
    };
    let n = reps.len();
    let add: Vec<Vec<RElem>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let ((a, s1), (b, s2)) = (reps[x], reps[y]);
                    class_of((ring.add(ring.mul(a, s2), ring.mul(b, s1)), ring.mul(s1, s2)))
                })
                .collect()
        })
        .collect();
    let mul: Vec<Vec<RElem>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let ((a, s1), (b, s2)) = (reps[x], reps[y]);
                    class_of((ring.mul(a, b), ring.mul(s1, s2)))
                })
                .collect()
        })
        .collect();
    let labels = reps
        .iter()
        .map(|&(a, d)| {
            if d == ring.one() {
                ring.label(a).to_string()
            } else {
                format!("{}/{}", ring.label(a), ring.label(d))
            }
        })
        .collect();
    FiniteRing::from_tables(format!("{}[S^-1]", ring.name()), labels, &add, &mul)
}

/// A bijection `a -> b` preserving `+`, `*` and `1`, found by assigning
/// images to additive generators and backtracking.
pub fn find_ring_isomorphism(a: &FiniteRing, b: &FiniteRing) -> Option<Vec<RElem>> {
    if a.len() != b.len() {
        return None;
    }
    // additive generators of a, greedily
    let mut gens = Vec::new();
    let mut span: BTreeSet<RElem> = BTreeSet::from([a.zero()]);
    for x in a.elements() {
        if !span.contains(&x) {
            gens.push(x);
            span = a.additive_closure(gens.iter().copied());
        }
    }
    let mut images = Vec::new();
    search(a, b, &gens, &mut images)
}

fn search(a: &FiniteRing, b: &FiniteRing, gens: &[RElem], images: &mut Vec<RElem>) -> Option<Vec<RElem>> {
    if images.len() == gens.len() {
        return extend_additively(a, b, gens, images).filter(|f| is_ring_iso(a, b, f));
    }
    let g = gens[images.len()];
    for y in b.elements().filter(|&y| b.additive_order(y) == a.additive_order(g)) {
        images.push(y);
        if let Some(f) = search(a, b, gens, images) {
            return Some(f);
        }
        images.pop();
    }
    None
}

fn extend_additively(a: &FiniteRing, b: &FiniteRing, gens: &[RElem], images: &[RElem]) -> Option<Vec<RElem>> {
    let mut f: Vec<Option<RElem>> = vec![None; a.len()];
    f[a.zero() as usize] = Some(b.zero());
    let mut queue = VecDeque::from([a.zero()]);
    while let Some(x) = queue.pop_front() {
        let fx = f[x as usize].unwrap();
        for (&g, &h) in gens.iter().zip(images) {
            let (y, fy) = (a.add(x, g), b.add(fx, h));
            match f[y as usize] {
                Some(w) if w != fy => return None,
                Some(_) => {}
                None => {
                    f[y as usize] = Some(fy);
                    queue.push_back(y);
                }
            }
        }
    }
    f.into_iter().collect()
}

pub fn is_ring_iso(a: &FiniteRing, b: &FiniteRing, f: &[RElem]) -> bool {
    f.len() == a.len()
        && f.iter().collect::<BTreeSet<_>>().len() == b.len()
        && f[a.one() as usize] == b.one()
        && a.elements().all(|x| {
            a.elements().all(|y| {
                f[a.add(x, y) as usize] == b.add(f[x as usize], f[y as usize])
                    && f[a.mul(x, y) as usize] == b.mul(f[x as usize], f[y as usize])
            })
        })
}

/// Every multiplicatively closed subset containing 1, for small rings.
pub fn mult_closed_subsets(ring: &FiniteRing) -> Result<Vec<BTreeSet<RElem>>> {
    let others: Vec<RElem> = ring.elements().filter(|&x| x != ring.one()).collect();
    if others.len() > 20 {
        return Err(Error::TooLarge { what: "subset enumeration", size: 1u128 << others.len(), cap: 1 << 20 });
    }
    let out = par::filter_map_range(1u64 << others.len(), |mask| {
        let mut s: BTreeSet<RElem> = BTreeSet::from([ring.one()]);
        s.extend(others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &x)| x));
        s.iter().all(|&x| s.iter().all(|&y| s.contains(&ring.mul(x, y)))).then_some(s)
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(r: &FiniteRing, gens: &[u32]) -> Ideal {
        r.right_ideal_generated(gens)
    }

    #[test]
    fn ideals_of_small_zmod() {
        let z6 = zmod(6).unwrap();
        let shown: Vec<String> = z6.right_ideals().iter().map(|i| z6.show_ideal(i)).collect();
        assert_eq!(shown, ["(0)", "(3)", "(2)", "(1)"]);
        let z4 = zmod(4).unwrap();
        assert_eq!(z4.right_ideals().len(), 3);
        assert_eq!(zmod(7).unwrap().right_ideals().len(), 2);
    }

    #[test]
    fn colon_examples() {
        let z6 = zmod(6).unwrap();
        let three = ideal(&z6, &[3]);
        assert_eq!(z6.colon(&three, 2), three);
        assert_eq!(z6.colon(&three, 1), three);
        assert_eq!(z6.colon(&z6.unit_ideal(), 4), z6.unit_ideal());
    }

    #[test]
    fn gabriel_examples() {
        let z6 = zmod(6).unwrap();
        let t: IdealFamily = [ideal(&z6, &[3]), z6.unit_ideal()].into();
        assert!(check_gabriel(&z6, &t).holds());
        let bad: IdealFamily = [ideal(&z6, &[3])].into();
        assert!(check_gabriel(&z6, &bad).r1.is_some());
        assert!(check_gabriel(&z6, &[z6.unit_ideal()].into()).holds());
        assert_eq!(gabriel_closure(&z6, &[ideal(&z6, &[3])], &Limits::default()).unwrap(), t);
        assert_eq!(from_mult_set(&z6, &[1, 3].into()).unwrap(), t);
        assert_eq!(from_mult_set(&z6, &[1].into()).unwrap(), [z6.unit_ideal()].into());
        assert_eq!(torsion(&z6, &t).unwrap(), ideal(&z6, &[2]));
        assert_eq!(torsion(&z6, &[z6.unit_ideal()].into()).unwrap(), z6.zero_ideal());
        let z2 = zmod(2).unwrap();
        let all: IdealFamily = z2.right_ideals().iter().cloned().collect();
        assert!(check_gabriel(&z2, &all).holds());
        assert_eq!(torsion(&z2, &all).unwrap(), z2.unit_ideal());
    }

    #[test]
    fn closed_modules() {
        let z6 = zmod(6).unwrap();
        let lim = Limits::default();
        let t: IdealFamily = [ideal(&z6, &[3]), z6.unit_ideal()].into();
        let z2 = FiniteModule::quotient(&z6, &ideal(&z6, &[2])).unwrap();
        assert_eq!(z2.len(), 2);
        assert_eq!(hom_from_ideal(&z6, &ideal(&z6, &[3]), &z2, &lim).unwrap().len(), 2);
        assert!(is_j_closed_module(&z6, &z2, &t, &lim).unwrap().is_none());
        let reg = FiniteModule::regular(&z6);
        assert!(is_j_closed_module(&z6, &reg, &[z6.unit_ideal()].into(), &lim).unwrap().is_none());
        let w = is_j_closed_module(&z6, &reg, &t, &lim).unwrap().unwrap();
        assert!(w.reason.contains("not injective"), "{}", w.reason);
    }

    #[test]
    fn localization_of_z6_at_3() {
        let z6 = zmod(6).unwrap();
        let t = from_mult_set(&z6, &[1, 3].into()).unwrap();
        let loc = localize(&z6, &t, &Limits::default()).unwrap();
        assert_eq!(loc.len(), 2);
        let r = loc.ring.as_ref().unwrap();
        assert!(find_ring_isomorphism(r, &zmod(2).unwrap()).is_some());
        assert_eq!(loc.kernel(&z6), vec![0, 2, 4]);
        let frac = ring_of_fractions_oracle(&z6, &[1, 3].into()).unwrap();
        assert!(find_ring_isomorphism(&frac, &zmod(2).unwrap()).is_some());
    }

    #[test]
    fn fraction_examples() {
        let z4 = zmod(4).unwrap();
        let f = ring_of_fractions_oracle(&z4, &[1, 3].into()).unwrap();
        assert!(find_ring_isomorphism(&f, &z4).is_some());
        let z6 = zmod(6).unwrap();
        let f = ring_of_fractions_oracle(&z6, &[1].into()).unwrap();
        assert!(find_ring_isomorphism(&f, &z6).is_some());
        assert!(ring_of_fractions_oracle(&upper_triangular_f2(), &[7].into()).is_err());
    }

    #[test]
    fn noncommutative_ring() {
        let ut = upper_triangular_f2();
        assert!(!ut.is_commutative());
        assert_eq!(ut.len(), 8);
        let ideals = ut.right_ideals();
        assert!(ideals.iter().any(|i| !ut.is_two_sided(i)));
    }

    #[test]
    fn bad_tables_are_rejected() {
        let labels = vec!["0".to_string(), "1".to_string()];
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 0]];
        assert!(FiniteRing::from_tables("r", labels, &add, &mul).is_err());
    }
}
