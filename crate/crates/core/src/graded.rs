//! Monomial ideals of `k[x, y]` with the total-degree grading. Everything is
//! combinatorial on exponent pairs; the field is never materialized.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::limits::Limits;

/// Exponent pair `(i, j)` for `x^i y^j`.
pub type Monomial = (u32, u32);

pub fn degree(m: Monomial) -> u32 {
    m.0 + m.1
}

pub fn divides(a: Monomial, b: Monomial) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

pub fn show_monomial(m: Monomial) -> String {
    let part = |v: char, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    match m {
        (0, 0) => "1".into(),
        (i, j) => format!("{}{}", part('x', i), part('y', j)),
    }
}

/// Accepts `1`, `x`, `y^3`, `x^2y`, `x^2 y^5`, `x*y`.
pub fn parse_monomial(s: &str) -> Result<Monomial> {
    let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    if t == "1" {
        return Ok((0, 0));
    }
    let bad = || Error::malformed("monomial", format!("`{s}`"));
    let mut m = (0u32, 0u32);
    let mut chars = t.chars().peekable();
    let mut seen = BTreeSet::new();
    while let Some(v) = chars.next() {
        if !matches!(v, 'x' | 'y') || !seen.insert(v) {
            return Err(bad());
        }
        let mut e = 1;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            e = digits.parse().map_err(|_| bad())?;
        }
        if v == 'x' {
            m.0 = e;
        } else {
            m.1 = e;
        }
    }
    if seen.is_empty() {
        return Err(bad());
    }
    Ok(m)
}

/// Minimal generators, sorted by `x`-exponent. No generators is the zero
/// ideal; `{(0, 0)}` is the unit ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIdeal {
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn new(gens: impl IntoIterator<Item = Monomial>) -> Self {
        let all: BTreeSet<Monomial> = gens.into_iter().collect();
        let gens = all.iter().copied().filter(|&g| !all.iter().any(|&h| h != g && divides(h, g))).collect();
        MonomialIdeal { gens }
    }

    pub fn zero() -> Self {
        MonomialIdeal { gens: Vec::new() }
    }

    pub fn unit() -> Self {
        MonomialIdeal { gens: vec![(0, 0)] }
    }

    pub fn principal(m: Monomial) -> Self {
        MonomialIdeal { gens: vec![m] }
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens == [(0, 0)]
    }

    pub fn contains(&self, e: Monomial) -> bool {
        self.gens.iter().any(|&g| divides(g, e))
    }

    pub fn is_subset(&self, other: &MonomialIdeal) -> bool {
        self.gens.iter().all(|&g| other.contains(g))
    }

    /// `(I : e)`.
    pub fn colon(&self, e: Monomial) -> MonomialIdeal {
        MonomialIdeal::new(self.gens.iter().map(|&(i, j)| (i.saturating_sub(e.0), j.saturating_sub(e.1))))
    }

    pub fn max_degree(&self) -> u32 {
        self.gens.iter().map(|&g| degree(g)).max().unwrap_or(0)
    }

    /// `<x^2, y>`; also accepts `0`, `1`, and a bare generator list.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('<').and_then(|u| u.strip_suffix('>')).unwrap_or(t).trim();
        if t == "0" || t.is_empty() {
            return Ok(MonomialIdeal::zero());
        }
        Ok(MonomialIdeal::new(t.split(',').map(parse_monomial).collect::<Result<Vec<_>>>()?))
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("<0>");
        }
        let gs: Vec<String> = self.gens.iter().map(|&g| show_monomial(g)).collect();
        write!(f, "<{}>", gs.join(", "))
    }
}

pub fn contains_monomial(i: &MonomialIdeal, e: Monomial) -> bool {
    i.contains(e)
}

pub fn colon_monomial(i: &MonomialIdeal, e: Monomial) -> MonomialIdeal {
    i.colon(e)
}

/// Monomials of total degree at most `d`, by degree then `x`-exponent.
pub fn monomials_up_to(d: u32) -> Vec<Monomial> {
    (0..=d).flat_map(|t| (0..=t).rev().map(move |i| (i, t - i))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn power(self, n: u32) -> Monomial {
        match self {
            Var::X => (n, 0),
            Var::Y => (0, n),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::Y => "y",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradedTopologySpec {
    /// `H_S` for `S = {1, v, v^2, ...}`.
    PowersOf(Var),
    /// An explicit list of members.
    Family(BTreeSet<MonomialIdeal>),
}

impl GradedTopologySpec {
    pub fn name(&self) -> String {
        match self {
            GradedTopologySpec::PowersOf(v) => format!("H_powers_of({v})"),
            GradedTopologySpec::Family(f) => {
                let ms: Vec<String> = f.iter().map(ToString::to_string).collect();
                format!("family{{{}}}", ms.join(", "))
            }
        }
    }

    pub fn member(&self, i: &MonomialIdeal, d_max: u32) -> bool {
        match self {
            GradedTopologySpec::PowersOf(_) => h_s_member(i, self, d_max),
            GradedTopologySpec::Family(f) => f.contains(i),
        }
    }
}

/// Every colon `(I : a)`, `deg a <= d_max`, contains `v^n` with `n <= d_max`.
pub fn h_s_member(i: &MonomialIdeal, spec: &GradedTopologySpec, d_max: u32) -> bool {
    match spec {
        GradedTopologySpec::PowersOf(v) => monomials_up_to(d_max)
            .into_iter()
            .all(|a| (0..=d_max).any(|n| i.colon(a).contains(v.power(n)))),
        GradedTopologySpec::Family(f) => f.contains(i),
    }
}

/// The staircase criterion: some generator is a pure power of `v`.
pub fn h_s_member_unbounded(i: &MonomialIdeal, v: Var) -> bool {
    i.generators().iter().any(|&(a, b)| match v {
        Var::X => b == 0,
        Var::Y => a == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedReport {
    pub spec: String,
    pub d_max: u32,
    /// The sample after closing under colons.
    pub sample: Vec<MonomialIdeal>,
    pub added_by_closure: usize,
    pub members: Vec<MonomialIdeal>,
    pub nonempty: bool,
    /// Member `I`, sample ideal `J ⊇ I` that is not a member.
    pub g1: Option<(MonomialIdeal, MonomialIdeal)>,
    /// Member `I`, monomial `a` with `(I : a)` not a member.
    pub g2: Option<(MonomialIdeal, Monomial)>,
    /// Non-member `I`, member `J` with `(I : a)` a member for every `a ∈ J`.
    pub g3: Option<(MonomialIdeal, MonomialIdeal)>,
}

pub const SATURATION_NOTE: &str =
    "G3 is checked against monomial ideals only; saturation among all homogeneous ideals is not decided here";

impl GradedReport {
    pub fn holds(&self) -> bool {
        self.nonempty && self.g1.is_none() && self.g2.is_none() && self.g3.is_none()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("spec: {}", self.spec),
            format!("d_max: {}", self.d_max),
            format!("sample size: {} ({} added by colon closure)", self.sample.len(), self.added_by_closure),
            format!(
                "members: {}",
                self.members.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            ),
        ];
        out.push(if self.nonempty { "non-empty".into() } else { "no member in the sample".into() });
        out.push(match &self.g1 {
            None => "G1 holds".into(),
            Some((i, j)) => format!("G1 fails: {i} is a member, {j} contains it and is not"),
        });
        out.push(match &self.g2 {
            None => "G2 holds".into(),
            Some((i, a)) => format!("G2 fails: ({i} : {}) = {} is not a member", show_monomial(*a), i.colon(*a)),
        });
        out.push(match &self.g3 {
            None => "G3 holds".into(),
            Some((i, j)) => format!("G3 fails: every (I : a), a in {j}, is a member but I = {i} is not"),
        });
        out.push(format!("note: {SATURATION_NOTE}"));
        out
    }
}

/// Check G1 to G3 over `sample`, after closing it under colons by every
/// monomial of degree at most `d_max`.
pub fn check_graded_gabriel(
    spec: &GradedTopologySpec,
    sample: &[MonomialIdeal],
    d_max: u32,
    limits: &Limits,
) -> Result<GradedReport> {
    if d_max == 0 {
        return Err(Error::Precondition("d_max must be at least 1".into()));
    }
    if let Some(i) = sample.iter().find(|i| i.max_degree() > d_max) {
        return Err(Error::Precondition(format!("{i} has a generator of degree above d_max = {d_max}")));
    }
    let monos = monomials_up_to(d_max);
    let mut set: BTreeSet<MonomialIdeal> = sample.iter().cloned().collect();
    let given = set.len();
    let mut frontier: Vec<MonomialIdeal> = set.iter().cloned().collect();
    while let Some(i) = frontier.pop() {
        for &a in &monos {
            let c = i.colon(a);
            if set.insert(c.clone()) {
                Limits::guard("graded sample", set.len() as u128, limits.graded_sample as u128)?;
                frontier.push(c);
            }
        }
    }
    let sample: Vec<MonomialIdeal> = set.into_iter().collect();
    let member: Vec<bool> = sample.iter().map(|i| spec.member(i, d_max)).collect();
    let is_member = |i: &MonomialIdeal| spec.member(i, d_max);
    let members: Vec<MonomialIdeal> = sample.iter().zip(&member).filter(|p| *p.1).map(|p| p.0.clone()).collect();

    let g1 = members
        .iter()
        .find_map(|i| sample.iter().zip(&member).find(|(j, m)| !**m && i.is_subset(j)).map(|(j, _)| (i.clone(), j.clone())));
    let g2 = members.iter().find_map(|i| monos.iter().find(|&&a| !is_member(&i.colon(a))).map(|&a| (i.clone(), a)));
    let g3 = sample.iter().zip(&member).filter(|p| !*p.1).find_map(|(i, _)| {
        members
            .iter()
            .find(|j| monos.iter().filter(|&&a| j.contains(a)).all(|&a| is_member(&i.colon(a))))
            .map(|j| (i.clone(), j.clone()))
    });
    Ok(GradedReport {
        spec: spec.name(),
        d_max,
        added_by_closure: sample.len() - given,
        nonempty: !members.is_empty(),
        sample,
        members,
        g1,
        g2,
        g3,
    })
}

/// Degree-zero part of a sieve under `hom(k, -)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreeZero {
    K,
    Zero,
}

impl fmt::Display for DegreeZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegreeZero::K => "k",
            DegreeZero::Zero => "0",
        })
    }
}

pub fn degree_zero_base_change(i: &MonomialIdeal) -> DegreeZero {
    if i.is_unit() {
        DegreeZero::K
    } else {
        DegreeZero::Zero
    }
}

/// Every monomial ideal whose generators have degree at most `d`.
pub fn monomial_ideals_up_to(d: u32, limits: &Limits) -> Result<Vec<MonomialIdeal>> {
    // antichains listed by increasing x-exponent have strictly decreasing y
    fn extend(
        d: u32,
        min_x: u32,
        max_y: Option<u32>,
        cur: &mut Vec<Monomial>,
        out: &mut Vec<MonomialIdeal>,
        cap: usize,
    ) -> Result<()> {
        out.push(MonomialIdeal { gens: cur.clone() });
        Limits::guard("graded sample", out.len() as u128, cap as u128)?;
        for i in min_x..=d {
            let top = (d - i).min(max_y.map_or(u32::MAX, |y| y.saturating_sub(1)));
            if max_y == Some(0) {
                break;
            }
            for j in 0..=top {
                cur.push((i, j));
                extend(d, i + 1, Some(j), cur, out, cap)?;
                cur.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    extend(d, 0, None, &mut Vec::new(), &mut out, limits.graded_sample)?;
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub d_max: u32,
    pub sample_size: usize,
    pub h_s_size: usize,
    pub h_t_size: usize,
    /// In `H_S` and not in `H_T`.
    pub witness: MonomialIdeal,
    pub witness_in_s: bool,
    pub witness_in_t: bool,
    pub image_s: BTreeSet<DegreeZero>,
    pub image_t: BTreeSet<DegreeZero>,
    /// Two distinct `H_S` members with the same image.
    pub collision: (MonomialIdeal, MonomialIdeal),
}

pub const NOT_FAITHFUL: &str = "hom(k, -) only sees degree 0, so it is not faithful";

impl CounterexampleReport {
    pub fn topologies_differ(&self) -> bool {
        self.witness_in_s && !self.witness_in_t
    }

    pub fn images_agree(&self) -> bool {
        self.image_s == self.image_t
    }

    pub fn reproduced(&self) -> bool {
        let two: BTreeSet<DegreeZero> = [DegreeZero::K, DegreeZero::Zero].into();
        self.topologies_differ()
            && self.images_agree()
            && self.image_s == two
            && self.collision.0 != self.collision.1
            && degree_zero_base_change(&self.collision.0) == degree_zero_base_change(&self.collision.1)
    }

    pub fn lines(&self) -> Vec<String> {
        let show = |s: &BTreeSet<DegreeZero>| {
            format!("{{{}}}", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
        };
        vec![
            format!("d_max: {}", self.d_max),
            format!("monomial ideals sampled: {}", self.sample_size),
            format!("H_S members (S = powers of x): {}", self.h_s_size),
            format!("H_T members (T = powers of y): {}", self.h_t_size),
            format!(
                "separating ideal: {} in H_S: {}, in H_T: {}",
                self.witness,
                yes(self.witness_in_s),
                yes(self.witness_in_t)
            ),
            format!("degree-zero image of H_S: {}", show(&self.image_s)),
            format!("degree-zero image of H_T: {}", show(&self.image_t)),
            format!("images equal: {}", yes(self.images_agree())),
            format!(
                "not injective on H_S: {} and {} both map to {}",
                self.collision.0,
                self.collision.1,
                degree_zero_base_change(&self.collision.0)
            ),
            format!("reason: {NOT_FAITHFUL}"),
        ]
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn reproduce_counterexample(d_max: u32, limits: &Limits) -> Result<CounterexampleReport> {
    if d_max == 0 {
        return Err(Error::Precondition("d_max must be at least 1".into()));
    }
    let sample = monomial_ideals_up_to(d_max, limits)?;
    let s = GradedTopologySpec::PowersOf(Var::X);
    let t = GradedTopologySpec::PowersOf(Var::Y);
    let h_s: Vec<&MonomialIdeal> = sample.iter().filter(|i| h_s_member(i, &s, d_max)).collect();
    let h_t: Vec<&MonomialIdeal> = sample.iter().filter(|i| h_s_member(i, &t, d_max)).collect();
    let witness = MonomialIdeal::principal((d_max, 0));
    let second = if d_max >= 2 { MonomialIdeal::principal((2, 0)) } else { MonomialIdeal::new([(1, 0), (0, 1)]) };
    Ok(CounterexampleReport {
        d_max,
        sample_size: sample.len(),
        h_s_size: h_s.len(),
        h_t_size: h_t.len(),
        witness_in_s: h_s_member(&witness, &s, d_max),
        witness_in_t: h_s_member(&witness, &t, d_max),
        witness,
        image_s: h_s.iter().map(|i| degree_zero_base_change(i)).collect(),
        image_t: h_t.iter().map(|i| degree_zero_base_change(i)).collect(),
        collision: (MonomialIdeal::principal((1, 0)), second),
    })
}
