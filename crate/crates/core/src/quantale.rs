//! Finite commutative unital quantales.
//!
//! A quantale is stored as explicit tables over an indexed carrier: the
//! categorical order (`leq(a, b)` iff there is a morphism `a -> b`), the
//! tensor, and the unit. Meets, joins and the residuation (internal hom) are
//! derived once at construction by exhaustive search, never by closed forms.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Index of an element in the carrier of a specific quantale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Elem {
    fn from(i: usize) -> Self {
        Elem(i as u32)
    }
}

/// Exact nonnegative rational extended by a distinguished infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extended {
    Finite(Ratio<i64>),
    Infinite,
}

impl Extended {
    /// `max{0, b - a}`, the untruncated Lawvere internal hom, with
    /// `inf - inf = 0`.
    pub fn truncated_sub(b: &Extended, a: &Extended) -> Extended {
        match (b, a) {
            (Extended::Infinite, Extended::Infinite) => Extended::zero(),
            (Extended::Infinite, Extended::Finite(_)) => Extended::Infinite,
            (Extended::Finite(_), Extended::Infinite) => Extended::zero(),
            (Extended::Finite(b), Extended::Finite(a)) => {
                let diff = b - a;
                if diff < Ratio::from_integer(0) {
                    Extended::zero()
                } else {
                    Extended::Finite(diff)
                }
            }
        }
    }

    pub fn zero() -> Self {
        Extended::Finite(Ratio::from_integer(0))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(r) => write!(f, "{r}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Which constructor produced a quantale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuantaleKind {
    TwoElement,
    /// `{k/d : 0 <= k <= n*d} ∪ {inf}`, reversed numeric order, addition
    /// capped to `inf` above `n`.
    TruncatedAdditive { n: u32, d: u32 },
    /// The image of `TruncatedAdditive { n, d }` under `q ↦ e^{-q}`.
    Exponential { n: u32, d: u32 },
    Table,
}

/// Unvalidated quantale tables, as read from a file or built by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantaleTables {
    pub labels: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub tensor: Vec<Vec<usize>>,
    pub unit: usize,
}

/// The law a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    Reflexivity,
    Antisymmetry,
    Transitivity,
    MeetExists,
    JoinExists,
    Associativity,
    Commutativity,
    Unit,
    Monotonicity,
    JoinDistributivity,
    BottomAnnihilates,
    Residuation,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::Reflexivity => "order reflexivity",
            Law::Antisymmetry => "order antisymmetry",
            Law::Transitivity => "order transitivity",
            Law::MeetExists => "binary meet exists",
            Law::JoinExists => "binary join exists",
            Law::Associativity => "tensor associativity",
            Law::Commutativity => "tensor commutativity",
            Law::Unit => "unit law",
            Law::Monotonicity => "tensor monotonicity",
            Law::JoinDistributivity => "tensor distributes over binary joins",
            Law::BottomAnnihilates => "tensor distributes over the empty join",
            Law::Residuation => "residuation adjunction",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    /// Labels of the offending elements.
    pub witness: Vec<String>,
}

/// Violated laws, in the fixed order in which they are checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, law: Law) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {}: ({})", v.law, v.witness.join(", "))?;
        }
        Ok(())
    }
}

/// Check every quantale law over explicit tables.
///
/// Returns `Err` for structural problems (non-total or out-of-range tables),
/// and an [`AxiomReport`] otherwise. At most one witness is reported per law.
pub fn check_axioms(t: &QuantaleTables) -> Result<AxiomReport> {
    check_structure(t)?;
    let n = t.labels.len();
    let leq = |a: usize, b: usize| t.leq[a][b];
    let ten = |a: usize, b: usize| t.tensor[a][b];
    let mut report = AxiomReport::default();
    let add = |report: &mut AxiomReport, law: Law, w: &[usize]| {
        if !report.has(law) {
            let witness = w.iter().map(|&i| t.labels[i].clone()).collect();
            report.violations.push(Violation { law, witness });
        }
    };

    for a in 0..n {
        if !leq(a, a) {
            add(&mut report, Law::Reflexivity, &[a]);
        }
        for b in 0..n {
            if a != b && leq(a, b) && leq(b, a) {
                add(&mut report, Law::Antisymmetry, &[a, b]);
            }
            for c in 0..n {
                if leq(a, b) && leq(b, c) && !leq(a, c) {
                    add(&mut report, Law::Transitivity, &[a, b, c]);
                }
            }
        }
    }
    let order_ok = report.is_empty();

    let mut meets = vec![None; n * n];
    let mut joins = vec![None; n * n];
    let mut lattice_ok = order_ok;
    if order_ok {
        for a in 0..n {
            for b in 0..n {
                meets[a * n + b] = extremal_bound(n, &leq, a, b, false);
                joins[a * n + b] = extremal_bound(n, &leq, a, b, true);
                if meets[a * n + b].is_none() {
                    add(&mut report, Law::MeetExists, &[a, b]);
                    lattice_ok = false;
                }
                if joins[a * n + b].is_none() {
                    add(&mut report, Law::JoinExists, &[a, b]);
                    lattice_ok = false;
                }
            }
        }
    }
    let join = |a: usize, b: usize| joins[a * n + b];

    for a in 0..n {
        if ten(t.unit, a) != a || ten(a, t.unit) != a {
            add(&mut report, Law::Unit, &[a]);
        }
        for b in 0..n {
            if ten(a, b) != ten(b, a) {
                add(&mut report, Law::Commutativity, &[a, b]);
            }
            for c in 0..n {
                if ten(ten(a, b), c) != ten(a, ten(b, c)) {
                    add(&mut report, Law::Associativity, &[a, b, c]);
                }
                if leq(a, b) && !(leq(ten(a, c), ten(b, c)) && leq(ten(c, a), ten(c, b))) {
                    add(&mut report, Law::Monotonicity, &[a, b, c]);
                }
            }
        }
    }

    if lattice_ok {
        let bottom = (0..n).find(|&b| (0..n).all(|x| leq(b, x))).expect("finite lattice has a bottom");
        for a in 0..n {
            if ten(a, bottom) != bottom {
                add(&mut report, Law::BottomAnnihilates, &[a]);
            }
            for b in 0..n {
                for c in 0..n {
                    let lhs = ten(a, join(b, c).unwrap());
                    let rhs = join(ten(a, b), ten(a, c)).unwrap();
                    if lhs != rhs {
                        add(&mut report, Law::JoinDistributivity, &[a, b, c]);
                    }
                }
                // The join of {p : p ⊗ a <= b} must itself satisfy the bound.
                let res = (0..n)
                    .filter(|&p| leq(ten(p, a), b))
                    .fold(bottom, |acc, p| join(acc, p).unwrap());
                if let Some(p) = (0..n).find(|&p| leq(p, res) != leq(ten(p, a), b)) {
                    add(&mut report, Law::Residuation, &[p, a, b]);
                }
            }
        }
    }
    Ok(report)
}

fn check_structure(t: &QuantaleTables) -> Result<()> {
    let n = t.labels.len();
    if n == 0 {
        return Err(Error::malformed("quantale", "empty carrier"));
    }
    let mut sorted = t.labels.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::malformed("quantale", format!("duplicate label `{}`", w[0])));
    }
    if t.leq.len() != n || t.leq.iter().any(|row| row.len() != n) {
        return Err(Error::malformed("quantale", format!("order table is not {n}x{n}")));
    }
    if t.tensor.len() != n || t.tensor.iter().any(|row| row.len() != n) {
        return Err(Error::malformed("quantale", format!("tensor table is not {n}x{n}")));
    }
    if let Some(&e) = t.tensor.iter().flatten().find(|&&e| e >= n) {
        return Err(Error::malformed("quantale", format!("tensor entry {e} out of range")));
    }
    if t.unit >= n {
        return Err(Error::malformed("quantale", format!("unit {} out of range", t.unit)));
    }
    Ok(())
}

/// Greatest lower bound (`upper = false`) or least upper bound of `{a, b}`.
fn extremal_bound(
    n: usize,
    leq: &impl Fn(usize, usize) -> bool,
    a: usize,
    b: usize,
    upper: bool,
) -> Option<usize> {
    let rel = |x: usize, y: usize| if upper { leq(y, x) } else { leq(x, y) };
    let bounds: Vec<usize> = (0..n).filter(|&x| rel(x, a) && rel(x, b)).collect();
    bounds.iter().copied().find(|&m| bounds.iter().all(|&x| rel(x, m)))
}

/// Largest carrier accepted by the parametric constructors.
pub const MAX_CARRIER: usize = 64;

/// A validated finite commutative unital quantale.
#[derive(Clone, Debug)]
pub struct Quantale {
    name: String,
    kind: QuantaleKind,
    labels: Vec<String>,
    n: usize,
    leq: Vec<bool>,
    tensor: Vec<Elem>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    residual: Vec<Elem>,
    unit: Elem,
    top: Elem,
    bottom: Elem,
    /// Exponent `q` for the additive and exponential families.
    numeric: Option<Vec<Extended>>,
}

impl PartialEq for Quantale {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.leq == other.leq
            && self.tensor == other.tensor
            && self.unit == other.unit
    }
}

impl Eq for Quantale {}

impl Quantale {
    /// Validate tables and derive meets, joins and residuation.
    pub fn from_tables(name: impl Into<String>, tables: QuantaleTables) -> Result<Self> {
        Self::build(name.into(), QuantaleKind::Table, tables, None)
    }

    fn build(
        name: String,
        kind: QuantaleKind,
        t: QuantaleTables,
        numeric: Option<Vec<Extended>>,
    ) -> Result<Self> {
        let report = check_axioms(&t)?;
        if !report.is_empty() {
            return Err(Error::QuantaleAxioms(report));
        }
        let n = t.labels.len();
        let leq: Vec<bool> = t.leq.iter().flatten().copied().collect();
        let tensor: Vec<Elem> = t.tensor.iter().flatten().map(|&e| Elem::from(e)).collect();
        let le = |a: usize, b: usize| leq[a * n + b];
        let mut meet = Vec::with_capacity(n * n);
        let mut join = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                meet.push(Elem::from(extremal_bound(n, &le, a, b, false).unwrap()));
                join.push(Elem::from(extremal_bound(n, &le, a, b, true).unwrap()));
            }
        }
        let bottom = Elem::from((0..n).find(|&b| (0..n).all(|x| le(b, x))).unwrap());
        let top = Elem::from((0..n).find(|&t| (0..n).all(|x| le(x, t))).unwrap());
        let mut residual = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let r = (0..n)
                    .filter(|&p| le(tensor[p * n + a].index(), b))
                    .fold(bottom, |acc, p| join[acc.index() * n + p]);
                residual.push(r);
            }
        }
        Ok(Quantale {
            name,
            kind,
            labels: t.labels,
            n,
            leq,
            tensor,
            meet,
            join,
            residual,
            unit: Elem::from(t.unit),
            top,
            bottom,
            numeric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn kind(&self) -> &QuantaleKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator + Clone {
        (0..self.n as u32).map(Elem)
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Look an element up by label. `∞` is accepted for `inf`.
    pub fn elem(&self, label: &str) -> Option<Elem> {
        let label = if label == "∞" { "inf" } else { label };
        self.labels.iter().position(|l| l == label).map(Elem::from)
    }

    /// Exponent `q` of an element of an additive or exponential quantale.
    pub fn exponent(&self, a: Elem) -> Option<&Extended> {
        self.numeric.as_ref().map(|v| &v[a.index()])
    }

    /// Element with the given exponent, if it lies in the carrier.
    pub fn elem_with_exponent(&self, q: &Extended) -> Option<Elem> {
        self.numeric.as_ref()?.iter().position(|x| x == q).map(Elem::from)
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.n + b.index()]
    }

    #[inline]
    pub fn tensor(&self, a: Elem, b: Elem) -> Elem {
        self.tensor[a.index() * self.n + b.index()]
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.index() * self.n + b.index()]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.index() * self.n + b.index()]
    }

    /// Internal hom `[a, b]`: the join of all `p` with `p ⊗ a <= b`.
    #[inline]
    pub fn residuate(&self, a: Elem, b: Elem) -> Elem {
        self.residual[a.index() * self.n + b.index()]
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn meet_all(&self, it: impl IntoIterator<Item = Elem>) -> Elem {
        it.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, it: impl IntoIterator<Item = Elem>) -> Elem {
        it.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Elements below `a`, in carrier order.
    pub fn down_set(&self, a: Elem) -> Vec<Elem> {
        self.elements().filter(|&p| self.leq(p, a)).collect()
    }

    /// The tables this quantale was built from.
    pub fn tables(&self) -> QuantaleTables {
        let n = self.n;
        QuantaleTables {
            labels: self.labels.clone(),
            leq: (0..n).map(|a| self.leq[a * n..(a + 1) * n].to_vec()).collect(),
            tensor: (0..n)
                .map(|a| self.tensor[a * n..(a + 1) * n].iter().map(|e| e.index()).collect())
                .collect(),
            unit: self.unit.index(),
        }
    }
}

/// `({0, 1}, ∧, 1)`.
pub fn make_two_element() -> Quantale {
    let tables = QuantaleTables {
        labels: vec!["0".into(), "1".into()],
        leq: vec![vec![true, true], vec![false, true]],
        tensor: vec![vec![0, 0], vec![0, 1]],
        unit: 1,
    };
    Quantale::build("Q2".into(), QuantaleKind::TwoElement, tables, None)
        .expect("two-element quantale is valid")
}

fn additive_carrier(n: u32, d: u32) -> Result<Vec<Extended>> {
    if n == 0 || d == 0 {
        return Err(Error::Precondition("truncation bound and denominator must be positive".into()));
    }
    let top = n.checked_mul(d).ok_or_else(|| {
        Error::malformed("quantale", format!("{n}*{d} overflows the element width"))
    })?;
    let size = top as u128 + 2;
    if size > MAX_CARRIER as u128 {
        return Err(Error::TooLarge { what: "quantale carrier", size, cap: MAX_CARRIER as u128 });
    }
    let mut carrier: Vec<Extended> =
        (0..=top).map(|k| Extended::Finite(Ratio::new(k as i64, d as i64))).collect();
    carrier.push(Extended::Infinite);
    Ok(carrier)
}

/// Shared tables of the additive and exponential families: index `k < n*d+1`
/// is `k/d`, the last index is infinity.
fn additive_tables(n: u32, d: u32, labels: Vec<String>) -> QuantaleTables {
    let top = (n * d) as usize;
    let size = top + 2;
    let inf = size - 1;
    let leq = (0..size).map(|a| (0..size).map(|b| a >= b).collect()).collect();
    let tensor = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| if a == inf || b == inf || a + b > top { inf } else { a + b })
                .collect()
        })
        .collect();
    QuantaleTables { labels, leq, tensor, unit: 0 }
}

/// Truncated Lawvere quantale: carrier `{k/d : 0 <= k <= n*d} ∪ {inf}`,
/// `a -> b` iff `a >= b` numerically, tensor is addition with every sum
/// above `n` sent to `inf`, unit `0`.
pub fn make_truncated_additive(n: u32, d: u32) -> Result<Quantale> {
    let carrier = additive_carrier(n, d)?;
    let labels = carrier.iter().map(|x| x.to_string()).collect();
    Quantale::build(
        format!("T({n},{d})"),
        QuantaleKind::TruncatedAdditive { n, d },
        additive_tables(n, d, labels),
        Some(carrier),
    )
}

/// Multiplicative model `e^{-q}` of [`make_truncated_additive`], numeric
/// order, unit `e^0`. Labels: `1` for `e^0`, `0` for `e^{-inf}`, otherwise
/// `e^-q` (parenthesised when `q` is not an integer).
pub fn make_exponential(n: u32, d: u32) -> Result<Quantale> {
    let carrier = additive_carrier(n, d)?;
    let labels = carrier.iter().map(exponential_label).collect();
    Quantale::build(
        format!("E({n},{d})"),
        QuantaleKind::Exponential { n, d },
        additive_tables(n, d, labels),
        Some(carrier),
    )
}

fn exponential_label(q: &Extended) -> String {
    match q {
        Extended::Infinite => "0".into(),
        Extended::Finite(r) if *r == Ratio::from_integer(0) => "1".into(),
        Extended::Finite(r) if r.is_integer() => format!("e^-{r}"),
        Extended::Finite(r) => format!("e^-({r})"),
    }
}
