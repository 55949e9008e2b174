//! The instance file: TOML with one table per named block.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use enriched_sites::base_change::{self, BaseChange};
use enriched_sites::category::EnrichedCategory;
use enriched_sites::coverage::{self, Coverage};
use enriched_sites::graded::{GradedTopologySpec, MonomialIdeal, Var};
use enriched_sites::quantale::{self, Quantale, QuantaleTables};
use enriched_sites::ring::{self, FiniteRing, IdealFamily};
use enriched_sites::sieve::{Presheaf, Sieve};
use enriched_sites::Limits;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quantale: BTreeMap<String, RawQuantale>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub category: BTreeMap<String, RawCategory>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sieve: BTreeMap<String, RawSieve>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub presheaf: BTreeMap<String, RawPresheaf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coverage: BTreeMap<String, RawCoverage>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub base_change: BTreeMap<String, RawBaseChange>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ring: BTreeMap<String, RawRing>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub topology: BTreeMap<String, RawTopology>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graded: BTreeMap<String, RawGraded>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuantale {
    /// `two_element`, `truncated_additive`, `exponential` or `table`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Generating pairs `a <= b`; reflexive-transitive closure is taken.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[String; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCategory {
    pub base: String,
    pub objects: Vec<String>,
    /// `hom[z][x]` is the value from `z` to `x`.
    pub hom: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSieve {
    pub category: String,
    pub target: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPresheaf {
    pub category: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoverage {
    pub category: String,
    /// `explicit` (default), `indiscrete`, `discrete` or `closure`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Members per object label, each a value list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<BTreeMap<String, Vec<Vec<String>>>>,
    /// Assert T3 as well as T1 and T2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBaseChange {
    /// `identity`, `inclusion_two_element`, `neg_log`, `exp_neg` or `collapse`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRing {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zmod: Option<u32>,
    /// `upper_triangular_f2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Names of two ring blocks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub add: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mul: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTopology {
    pub ring: String,
    /// Ideals by generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideals: Option<Vec<Vec<String>>>,
    /// Use `H_S` for this multiplicative set instead of `ideals`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult_set: Option<Vec<String>>,
    /// Treat `ideals` as seeds of the least Gabriel topology containing them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraded {
    /// `x` or `y`: `H_S` for the powers of that variable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers_of: Option<String>,
    /// An explicit family of monomial ideals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    pub sample: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u32>,
}

/// A load failure with its position in the source, when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for LoadError {}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Line of the `[kind.name]` header, if present.
fn header_line(src: &str, kind: &str, name: &str) -> Option<usize> {
    let forms = [format!("[{kind}.{name}]"), format!("[{kind}.\"{name}\"]")];
    src.lines().position(|l| forms.iter().any(|f| l.trim() == f)).map(|k| k + 1)
}

pub fn parse_raw(src: &str) -> Result<RawInstance, LoadError> {
    toml::from_str(src).map_err(|e| {
        let (line, column) = match e.span() {
            Some(s) => {
                let (l, c) = line_col(src, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        LoadError { line, column, message: format!("parse error: {}", e.message().trim()) }
    })
}

/// Canonical text: blocks sorted by kind and name, fields in a fixed order.
pub fn canonical(raw: &RawInstance) -> String {
    toml::to_string(raw).expect("instance serializes")
}

#[derive(Clone, Debug)]
pub struct NamedCoverage {
    pub category: String,
    pub coverage: Coverage<Sieve>,
    pub topology: bool,
}

#[derive(Clone, Debug)]
pub struct NamedTopology {
    pub ring: String,
    pub family: IdealFamily,
    pub mult_set: Option<BTreeSet<u32>>,
}

#[derive(Clone, Debug)]
pub struct NamedGraded {
    pub spec: GradedTopologySpec,
    pub sample: Vec<MonomialIdeal>,
    pub d_max: Option<u32>,
}

/// A resolved instance. Structural problems are rejected at load; laws
/// (category, sieve, coverage, Gabriel) are left to the checks.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    pub raw: RawInstance,
    pub quantales: BTreeMap<String, Arc<Quantale>>,
    pub categories: BTreeMap<String, Arc<EnrichedCategory>>,
    pub sieves: BTreeMap<String, (String, Sieve)>,
    pub presheaves: BTreeMap<String, (String, Presheaf)>,
    pub coverages: BTreeMap<String, NamedCoverage>,
    pub base_changes: BTreeMap<String, BaseChange>,
    pub rings: BTreeMap<String, Arc<FiniteRing>>,
    pub topologies: BTreeMap<String, NamedTopology>,
    pub graded: BTreeMap<String, NamedGraded>,
}

struct Ctx<'a> {
    src: &'a str,
    kind: &'static str,
    name: &'a str,
}

impl Ctx<'_> {
    fn err(&self, msg: impl fmt::Display) -> LoadError {
        LoadError {
            line: header_line(self.src, self.kind, self.name),
            column: None,
            message: format!("in [{}.{}]: {msg}", self.kind, self.name),
        }
    }
}

fn need<'a, T>(ctx: &Ctx, v: &'a Option<T>, field: &str) -> Result<&'a T, LoadError> {
    v.as_ref().ok_or_else(|| ctx.err(format!("missing field `{field}`")))
}

fn lookup<'a, T>(ctx: &Ctx, map: &'a BTreeMap<String, T>, what: &str, name: &str) -> Result<&'a T, LoadError> {
    map.get(name).ok_or_else(|| ctx.err(format!("unknown {what} `{name}`")))
}

fn elem(ctx: &Ctx, q: &Quantale, label: &str) -> Result<quantale::Elem, LoadError> {
    q.elem(label).ok_or_else(|| ctx.err(format!("`{label}` is not an element of {}", q.name())))
}

fn values(ctx: &Ctx, c: &EnrichedCategory, labels: &[String]) -> Result<Vec<quantale::Elem>, LoadError> {
    if labels.len() != c.len() {
        return Err(ctx.err(format!("expected {} values, one per object, got {}", c.len(), labels.len())));
    }
    labels.iter().map(|l| elem(ctx, c.base(), l)).collect()
}

pub fn load(src: &str, limits: &Limits) -> Result<Instance, LoadError> {
    let raw = parse_raw(src)?;
    let mut inst = Instance { raw: raw.clone(), ..Instance::default() };

    for (name, q) in &raw.quantale {
        let ctx = Ctx { src, kind: "quantale", name };
        let built = build_quantale(&ctx, q)?.with_name(name.clone());
        inst.quantales.insert(name.clone(), Arc::new(built));
    }
    for (name, c) in &raw.category {
        let ctx = Ctx { src, kind: "category", name };
        let base = lookup(&ctx, &inst.quantales, "quantale", &c.base)?.clone();
        let rows: Vec<&[String]> = c.hom.iter().map(Vec::as_slice).collect();
        let objs: Vec<&str> = c.objects.iter().map(String::as_str).collect();
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        let cat = EnrichedCategory::from_labels(base, &objs, &rows).map_err(|e| ctx.err(e))?;
        inst.categories.insert(name.clone(), Arc::new(cat));
    }
    for (name, s) in &raw.sieve {
        let ctx = Ctx { src, kind: "sieve", name };
        let c = lookup(&ctx, &inst.categories, "category", &s.category)?;
        let x = c.object(&s.target).map_err(|e| ctx.err(e))?;
        inst.sieves.insert(name.clone(), (s.category.clone(), Sieve::new(x, values(&ctx, c, &s.values)?)));
    }
    for (name, p) in &raw.presheaf {
        let ctx = Ctx { src, kind: "presheaf", name };
        let c = lookup(&ctx, &inst.categories, "category", &p.category)?;
        inst.presheaves.insert(name.clone(), (p.category.clone(), Presheaf::new(values(&ctx, c, &p.values)?)));
    }
    for (name, j) in &raw.coverage {
        let ctx = Ctx { src, kind: "coverage", name };
        let c = lookup(&ctx, &inst.categories, "category", &j.category)?;
        let cov = build_coverage(&ctx, c, j, limits)?;
        inst.coverages.insert(
            name.clone(),
            NamedCoverage { category: j.category.clone(), coverage: cov, topology: j.topology.unwrap_or(false) },
        );
    }
    for (name, b) in &raw.base_change {
        let ctx = Ctx { src, kind: "base_change", name };
        inst.base_changes.insert(name.clone(), build_base_change(&ctx, &inst, b)?);
    }
    for (name, r) in &raw.ring {
        let ctx = Ctx { src, kind: "ring", name };
        let built = build_ring(&ctx, &inst, r)?.with_name(name.clone());
        inst.rings.insert(name.clone(), Arc::new(built));
    }
    for (name, t) in &raw.topology {
        let ctx = Ctx { src, kind: "topology", name };
        let r = lookup(&ctx, &inst.rings, "ring", &t.ring)?.clone();
        inst.topologies.insert(name.clone(), build_topology(&ctx, &r, t, limits)?);
    }
    for (name, g) in &raw.graded {
        let ctx = Ctx { src, kind: "graded", name };
        inst.graded.insert(name.clone(), build_graded(&ctx, g)?);
    }
    Ok(inst)
}

fn build_quantale(ctx: &Ctx, q: &RawQuantale) -> Result<Quantale, LoadError> {
    let nd = || -> Result<(u32, u32), LoadError> { Ok((*need(ctx, &q.n, "n")?, *need(ctx, &q.d, "d")?)) };
    match q.kind.as_str() {
        "two_element" => Ok(quantale::make_two_element()),
        "truncated_additive" => {
            let (n, d) = nd()?;
            quantale::make_truncated_additive(n, d).map_err(|e| ctx.err(e))
        }
        "exponential" => {
            let (n, d) = nd()?;
            quantale::make_exponential(n, d).map_err(|e| ctx.err(e))
        }
        "table" => {
            let labels = need(ctx, &q.labels, "labels")?.clone();
            let ix = |l: &str| {
                labels.iter().position(|x| x == l).ok_or_else(|| ctx.err(format!("unknown element `{l}`")))
            };
            let n = labels.len();
            let mut leq: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
            for [a, b] in need(ctx, &q.order, "order")? {
                leq[ix(a)?][ix(b)?] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if leq[i][k] && leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
            let tensor = need(ctx, &q.tensor, "tensor")?
                .iter()
                .map(|row| row.iter().map(|l| ix(l)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let unit = ix(need(ctx, &q.unit, "unit")?)?;
            Quantale::from_tables("table", QuantaleTables { labels, leq, tensor, unit }).map_err(|e| ctx.err(e))
        }
        other => Err(ctx.err(format!("unknown quantale kind `{other}`"))),
    }
}

fn build_coverage(
    ctx: &Ctx,
    c: &EnrichedCategory,
    j: &RawCoverage,
    limits: &Limits,
) -> Result<Coverage<Sieve>, LoadError> {
    let explicit = || -> Result<Vec<BTreeSet<Sieve>>, LoadError> {
        let mut fams = vec![BTreeSet::new(); c.len()];
        for (obj, members) in need(ctx, &j.families, "families")? {
            let x = c.object(obj).map_err(|e| ctx.err(e))?;
            for m in members {
                fams[x].insert(Sieve::new(x, values(ctx, c, m)?));
            }
        }
        Ok(fams)
    };
    match j.kind.as_deref().unwrap_or("explicit") {
        "explicit" => Ok(Coverage::new(explicit()?)),
        "indiscrete" => Ok(coverage::indiscrete(c)),
        "discrete" => coverage::discrete(c, limits).map_err(|e| ctx.err(e)),
        "closure" => {
            let seeds = Coverage::new(explicit()?);
            coverage::topology_closure(c, &seeds, limits).map_err(|e| ctx.err(e))
        }
        other => Err(ctx.err(format!("unknown coverage kind `{other}`"))),
    }
}

fn build_base_change(ctx: &Ctx, inst: &Instance, b: &RawBaseChange) -> Result<BaseChange, LoadError> {
    let nd = || -> Result<(u32, u32), LoadError> { Ok((*need(ctx, &b.n, "n")?, *need(ctx, &b.d, "d")?)) };
    let q = |field: &Option<String>, what: &str| -> Result<Arc<Quantale>, LoadError> {
        Ok(lookup(ctx, &inst.quantales, "quantale", need(ctx, field, what)?)?.clone())
    };
    let built = match b.builtin.as_deref() {
        Some("identity") => Ok(base_change::identity(q(&b.source, "source")?)),
        Some("inclusion_two_element") => base_change::inclusion_two_element(q(&b.target, "target")?),
        Some("neg_log") => {
            let (n, d) = nd()?;
            base_change::neg_log(n, d)
        }
        Some("exp_neg") => {
            let (n, d) = nd()?;
            base_change::exp_neg(n, d)
        }
        Some("collapse") => {
            let (n, d) = nd()?;
            base_change::collapse(n, d)
        }
        Some(other) => return Err(ctx.err(format!("unknown builtin base change `{other}`"))),
        None => {
            let (s, t) = (q(&b.source, "source")?, q(&b.target, "target")?);
            let map = need(ctx, &b.map, "map")?;
            let mut image = Vec::with_capacity(s.len());
            for a in s.elements() {
                let l = s.label(a);
                let to = map.get(l).ok_or_else(|| ctx.err(format!("map has no entry for `{l}`")))?;
                image.push(elem(ctx, &t, to)?);
            }
            base_change::analyze(ctx.name, s, t, image)
        }
    };
    built.map_err(|e| ctx.err(e))
}

fn build_ring(ctx: &Ctx, inst: &Instance, r: &RawRing) -> Result<FiniteRing, LoadError> {
    if let Some(n) = r.zmod {
        return ring::zmod(n).map_err(|e| ctx.err(e));
    }
    match r.builtin.as_deref() {
        Some("upper_triangular_f2") => return Ok(ring::upper_triangular_f2()),
        Some(other) => return Err(ctx.err(format!("unknown builtin ring `{other}`"))),
        None => {}
    }
    if let Some([a, b]) = &r.product {
        let (a, b) = (lookup(ctx, &inst.rings, "ring", a)?, lookup(ctx, &inst.rings, "ring", b)?);
        return ring::product(a, b).map_err(|e| ctx.err(e));
    }
    let labels = need(ctx, &r.labels, "labels")?.clone();
    let ix = |l: &String| {
        labels.iter().position(|x| x == l).map(|k| k as u32).ok_or_else(|| ctx.err(format!("unknown element `{l}`")))
    };
    let table = |t: &Vec<Vec<String>>| -> Result<Vec<Vec<u32>>, LoadError> {
        t.iter().map(|row| row.iter().map(ix).collect()).collect()
    };
    let add = table(need(ctx, &r.add, "add")?)?;
    let mul = table(need(ctx, &r.mul, "mul")?)?;
    FiniteRing::from_tables("ring", labels.clone(), &add, &mul).map_err(|e| ctx.err(e))
}

fn build_topology(ctx: &Ctx, r: &FiniteRing, t: &RawTopology, limits: &Limits) -> Result<NamedTopology, LoadError> {
    let el = |l: &String| r.elem(l).ok_or_else(|| ctx.err(format!("`{l}` is not an element of {}", r.name())));
    if let Some(s) = &t.mult_set {
        if t.ideals.is_some() {
            return Err(ctx.err("give either `ideals` or `mult_set`, not both"));
        }
        let s: BTreeSet<u32> = s.iter().map(el).collect::<Result<_, _>>()?;
        let family = ring::from_mult_set(r, &s).map_err(|e| ctx.err(e))?;
        return Ok(NamedTopology { ring: t.ring.clone(), family, mult_set: Some(s) });
    }
    let ideals = need(ctx, &t.ideals, "ideals")?
        .iter()
        .map(|gens| Ok(r.right_ideal_generated(&gens.iter().map(el).collect::<Result<Vec<_>, _>>()?)))
        .collect::<Result<Vec<_>, LoadError>>()?;
    let family = if t.closure.unwrap_or(false) {
        ring::gabriel_closure(r, &ideals, limits).map_err(|e| ctx.err(e))?
    } else {
        ideals.into_iter().collect()
    };
    Ok(NamedTopology { ring: t.ring.clone(), family, mult_set: None })
}

fn build_graded(ctx: &Ctx, g: &RawGraded) -> Result<NamedGraded, LoadError> {
    let parse = |s: &String| MonomialIdeal::parse(s).map_err(|e| ctx.err(e));
    let spec = match (&g.powers_of, &g.members) {
        (Some(v), None) => GradedTopologySpec::PowersOf(match v.as_str() {
            "x" => Var::X,
            "y" => Var::Y,
            other => return Err(ctx.err(format!("`powers_of` must be x or y, not `{other}`"))),
        }),
        (None, Some(m)) => GradedTopologySpec::Family(m.iter().map(parse).collect::<Result<_, _>>()?),
        _ => return Err(ctx.err("give exactly one of `powers_of` and `members`")),
    };
    Ok(NamedGraded { spec, sample: g.sample.iter().map(parse).collect::<Result<_, _>>()?, d_max: g.d_max })
}
