//! Finite approximations of Fraïssé limits and the example constructions.
//!
//! Generic graphs, `K_n`-free graphs and tournaments are grown by witness
//! completion: each round adds one fresh vertex for every extension-axiom
//! instance of the current level that still lacks a witness, with the
//! remaining adjacencies of the new vertex decided by seeded coins. The
//! chain records one level per round.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{FinStructure, RelationSymbol, Signature, Tables};

/// Retries of the coin wiring before a `K_n`-free witness is given up.
const KN_FREE_RETRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClassName {
    PureSet,
    Graph,
    KnFreeGraph(usize),
    Tournament,
    LinearOrder,
    TwoPredicatePQ,
    BipartiteDeg2,
    InvolutionOrder,
    F2VectorSpace(u32),
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassName::PureSet => f.write_str("pure-set"),
            ClassName::Graph => f.write_str("graph"),
            ClassName::KnFreeGraph(n) => write!(f, "k{n}-free"),
            ClassName::Tournament => f.write_str("tournament"),
            ClassName::LinearOrder => f.write_str("linear-order"),
            ClassName::TwoPredicatePQ => f.write_str("two-predicate"),
            ClassName::BipartiteDeg2 => f.write_str("bipartite-deg2"),
            ClassName::InvolutionOrder => f.write_str("involution-order"),
            ClassName::F2VectorSpace(d) => write!(f, "f2:{d}"),
        }
    }
}

impl From<ClassName> for String {
    fn from(c: ClassName) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for ClassName {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for ClassName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        let bad = || Error::InvalidArgument(format!("unknown class `{s}`"));
        Ok(match norm.as_str() {
            "pure-set" | "set" => ClassName::PureSet,
            "graph" => ClassName::Graph,
            "tournament" => ClassName::Tournament,
            "linear-order" | "order" => ClassName::LinearOrder,
            "two-predicate" | "two-predicate-pq" | "pq" => ClassName::TwoPredicatePQ,
            "bipartite-deg2" | "bipartite" => ClassName::BipartiteDeg2,
            "involution-order" | "involution" => ClassName::InvolutionOrder,
            other => {
                if let Some(d) = other.strip_prefix("f2:") {
                    ClassName::F2VectorSpace(d.parse().map_err(|_| bad())?)
                } else if let Some(n) = other
                    .strip_prefix('k')
                    .and_then(|r| r.strip_suffix("-free"))
                {
                    ClassName::KnFreeGraph(n.parse().map_err(|_| bad())?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

/// A registered class of finite structures: its signature and membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FraisseClassSpec {
    name: ClassName,
    signature: Signature,
}

fn sym(name: &str, arity: usize) -> RelationSymbol {
    RelationSymbol::new(name, arity).symmetric().irreflexive()
}

impl FraisseClassSpec {
    pub fn new(name: ClassName) -> Result<Self> {
        let rels = match name {
            ClassName::PureSet => vec![],
            ClassName::Graph => vec![sym("E", 2)],
            ClassName::KnFreeGraph(n) => {
                if n < 3 {
                    return Err(Error::InvalidArgument(format!(
                        "K_n-free graphs need n >= 3, got {n}"
                    )));
                }
                vec![sym("E", 2)]
            }
            ClassName::Tournament => vec![RelationSymbol::new("T", 2).irreflexive()],
            ClassName::LinearOrder => vec![RelationSymbol::new("lt", 2).irreflexive()],
            ClassName::TwoPredicatePQ => vec![RelationSymbol::new("P", 1), RelationSymbol::new("Q", 1)],
            ClassName::BipartiteDeg2 => vec![
                RelationSymbol::new("S0", 1),
                RelationSymbol::new("S1", 1),
                sym("R", 2),
            ],
            ClassName::InvolutionOrder => {
                vec![RelationSymbol::new("lt", 2).irreflexive(), sym("f", 2)]
            }
            ClassName::F2VectorSpace(d) => {
                if !(1..=16).contains(&d) {
                    return Err(Error::InvalidArgument(format!(
                        "F_2 dimension must be in 1..=16, got {d}"
                    )));
                }
                vec![RelationSymbol::new("sum", 3), RelationSymbol::new("zero", 1)]
            }
        };
        Ok(FraisseClassSpec {
            name,
            signature: Signature::new(rels)?,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        FraisseClassSpec::new(s.parse()?)
    }

    pub fn name(&self) -> ClassName {
        self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Builds a member from tables, validating class membership.
    pub fn structure(&self, size: usize, tables: Tables) -> Result<FinStructure> {
        let s = FinStructure::new(self.signature.clone(), size, tables)?;
        self.check(&s)?;
        Ok(s)
    }

    pub fn contains(&self, s: &FinStructure) -> bool {
        self.check(s).is_ok()
    }

    /// Membership test with a reason on failure.
    pub fn check(&self, s: &FinStructure) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::NotInClass {
                class: self.name.to_string(),
                reason,
            })
        };
        let names: Vec<(&str, usize)> = self
            .signature
            .relations()
            .iter()
            .map(|r| (r.name.as_str(), r.arity))
            .collect();
        let theirs: Vec<(&str, usize)> = s
            .signature()
            .relations()
            .iter()
            .map(|r| (r.name.as_str(), r.arity))
            .collect();
        if names != theirs {
            return fail(format!("signature {theirs:?} differs from {names:?}"));
        }
        let n = s.size();
        match self.name {
            ClassName::PureSet => Ok(()),
            ClassName::Graph | ClassName::KnFreeGraph(_) => {
                if let Some(reason) = simple_graph_defect(s, 0) {
                    return fail(reason);
                }
                if let ClassName::KnFreeGraph(k) = self.name {
                    if let Some(c) = find_clique(s, 0, k) {
                        return fail(format!("contains K_{k} on {c:?}"));
                    }
                }
                Ok(())
            }
            ClassName::Tournament => {
                for a in 0..n {
                    if s.holds(0, &[a, a]) {
                        return fail(format!("loop at {a}"));
                    }
                    for b in a + 1..n {
                        if s.holds(0, &[a, b]) == s.holds(0, &[b, a]) {
                            return fail(format!("pair ({a},{b}) not oriented exactly once"));
                        }
                    }
                }
                Ok(())
            }
            ClassName::LinearOrder => match strict_order_defect(s, 0) {
                Some(r) => fail(r),
                None => Ok(()),
            },
            ClassName::TwoPredicatePQ => match (0..n).find(|&a| s.holds(0, &[a]) && s.holds(1, &[a])) {
                Some(a) => fail(format!("{a} lies in both P and Q")),
                None => Ok(()),
            },
            ClassName::BipartiteDeg2 => {
                for a in 0..n {
                    if s.holds(0, &[a]) == s.holds(1, &[a]) {
                        return fail(format!("{a} must lie in exactly one of S0, S1"));
                    }
                }
                if let Some(r) = simple_graph_defect(s, 2) {
                    return fail(r);
                }
                for a in 0..n {
                    let nbrs: Vec<usize> = (0..n).filter(|&b| s.holds(2, &[a, b])).collect();
                    if nbrs.iter().any(|&b| s.holds(0, &[a]) == s.holds(0, &[b])) {
                        return fail(format!("edge inside a part at {a}"));
                    }
                    if s.holds(0, &[a]) && nbrs.len() != 2 {
                        return fail(format!("S0 element {a} has degree {}", nbrs.len()));
                    }
                }
                Ok(())
            }
            ClassName::InvolutionOrder => {
                if let Some(r) = strict_order_defect(s, 0) {
                    return fail(r);
                }
                if let Some(r) = simple_graph_defect(s, 1) {
                    return fail(r);
                }
                for a in 0..n {
                    let deg = (0..n).filter(|&b| s.holds(1, &[a, b])).count();
                    if deg != 1 {
                        return fail(format!("f is not a fixed-point-free involution at {a}"));
                    }
                }
                Ok(())
            }
            ClassName::F2VectorSpace(d) => {
                if n == 0 {
                    return Ok(());
                }
                if n != 1 << d {
                    return fail(format!("size {n} is not 2^{d}"));
                }
                for a in 0..n {
                    if s.holds(1, &[a]) != (a == 0) {
                        return fail("zero predicate must name exactly element 0".into());
                    }
                    for b in 0..n {
                        for c in 0..n {
                            if s.holds(0, &[a, b, c]) != (a ^ b == c) {
                                return fail(format!("sum({a},{b},{c}) disagrees with xor"));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether witness completion applies to this class.
    pub fn is_witnessable(&self) -> bool {
        matches!(
            self.name,
            ClassName::PureSet | ClassName::Graph | ClassName::KnFreeGraph(_) | ClassName::Tournament
        )
    }

    /// Whether the class is closed under substructures and enumerable by
    /// one-point extensions.
    pub fn is_hereditary(&self) -> bool {
        matches!(
            self.name,
            ClassName::PureSet
                | ClassName::Graph
                | ClassName::KnFreeGraph(_)
                | ClassName::Tournament
                | ClassName::LinearOrder
                | ClassName::TwoPredicatePQ
        )
    }

    /// All members on `{0, …, m}` whose restriction to `{0, …, m-1}` is `s`,
    /// the new point being `m`.
    pub fn one_point_extensions(&self, s: &FinStructure) -> Result<Vec<FinStructure>> {
        if !self.is_hereditary() {
            return Err(Error::UnsupportedClass(self.name.to_string()));
        }
        let m = s.size();
        let base = s.tables();
        let mut out = Vec::new();
        let mut push = |extra: Vec<(&str, Vec<usize>)>| -> Result<()> {
            let mut t = base.clone();
            for (name, tuple) in extra {
                t.entry(name.to_string()).or_default().push(tuple);
            }
            let ext = FinStructure::new(self.signature.clone(), m + 1, t)?;
            if self.contains(&ext) {
                out.push(ext);
            }
            Ok(())
        };
        match self.name {
            ClassName::PureSet => push(vec![])?,
            ClassName::Graph | ClassName::KnFreeGraph(_) => {
                for mask in 0u64..(1 << m) {
                    let extra = (0..m)
                        .filter(|&x| mask >> x & 1 == 1)
                        .flat_map(|x| [("E", vec![x, m]), ("E", vec![m, x])])
                        .collect();
                    push(extra)?;
                }
            }
            ClassName::Tournament => {
                for mask in 0u64..(1 << m) {
                    let extra = (0..m)
                        .map(|x| {
                            if mask >> x & 1 == 1 {
                                ("T", vec![x, m])
                            } else {
                                ("T", vec![m, x])
                            }
                        })
                        .collect();
                    push(extra)?;
                }
            }
            ClassName::LinearOrder => {
                let rank: Vec<usize> = (0..m)
                    .map(|x| (0..m).filter(|&y| s.holds(0, &[y, x])).count())
                    .collect();
                for r in 0..=m {
                    let extra = (0..m)
                        .map(|x| {
                            if rank[x] < r {
                                ("lt", vec![x, m])
                            } else {
                                ("lt", vec![m, x])
                            }
                        })
                        .collect();
                    push(extra)?;
                }
            }
            ClassName::TwoPredicatePQ => {
                push(vec![])?;
                push(vec![("P", vec![m])])?;
                push(vec![("Q", vec![m])])?;
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// All members on `{0, …, m-1}` (labeled, not up to isomorphism).
    pub fn labeled_members(&self, m: usize) -> Result<Vec<FinStructure>> {
        let mut level = vec![FinStructure::new(self.signature.clone(), 0, Tables::new())?];
        for _ in 0..m {
            let mut next = Vec::new();
            for s in &level {
                next.extend(self.one_point_extensions(s)?);
            }
            level = next;
        }
        Ok(level)
    }
}

fn simple_graph_defect(s: &FinStructure, r: usize) -> Option<String> {
    let n = s.size();
    for a in 0..n {
        if s.holds(r, &[a, a]) {
            return Some(format!("loop at {a}"));
        }
        for b in 0..n {
            if s.holds(r, &[a, b]) != s.holds(r, &[b, a]) {
                return Some(format!("edge ({a},{b}) without its reverse"));
            }
        }
    }
    None
}

fn strict_order_defect(s: &FinStructure, r: usize) -> Option<String> {
    let n = s.size();
    for a in 0..n {
        if s.holds(r, &[a, a]) {
            return Some(format!("{a} < {a}"));
        }
        for b in 0..n {
            if a != b && s.holds(r, &[a, b]) == s.holds(r, &[b, a]) {
                return Some(format!("{a} and {b} not comparable exactly once"));
            }
            for c in 0..n {
                if s.holds(r, &[a, b]) && s.holds(r, &[b, c]) && !s.holds(r, &[a, c]) {
                    return Some(format!("transitivity fails on {a},{b},{c}"));
                }
            }
        }
    }
    None
}

fn find_clique(s: &FinStructure, r: usize, k: usize) -> Option<Vec<usize>> {
    fn rec(s: &FinStructure, r: usize, k: usize, start: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == k {
            return true;
        }
        for v in start..s.size() {
            if cur.iter().all(|&u| s.holds(r, &[u, v])) {
                cur.push(v);
                if rec(s, r, k, v + 1, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::new();
    rec(s, r, k, 0, &mut cur).then_some(cur)
}

/// An increasing chain of finite approximations; each level restricted to
/// the previous level's universe equals the previous level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureChain {
    class: ClassName,
    levels: Vec<FinStructure>,
    saturation: Vec<usize>,
    seed: Option<u64>,
}

impl StructureChain {
    /// Validates inclusions and class membership.
    pub fn new(
        class: ClassName,
        levels: Vec<FinStructure>,
        saturation: Vec<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if levels.len() != saturation.len() {
            return Err(Error::InvalidArgument(
                "one saturation entry per level required".into(),
            ));
        }
        let spec = FraisseClassSpec::new(class)?;
        for (i, l) in levels.iter().enumerate() {
            spec.check(l)?;
            if i > 0 {
                let prev = &levels[i - 1];
                let prefix: Vec<usize> = (0..prev.size()).collect();
                if prev.size() > l.size() || !l.induced_substructure(&prefix)?.same_tables(prev) {
                    return Err(Error::InvalidArgument(format!(
                        "level {} does not extend level {}",
                        i,
                        i - 1
                    )));
                }
            }
        }
        Ok(StructureChain {
            class,
            levels,
            saturation,
            seed,
        })
    }

    pub fn class(&self) -> ClassName {
        self.class
    }

    pub fn levels(&self) -> &[FinStructure] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&FinStructure> {
        self.levels.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!("chain has {} levels, asked for {i}", self.levels.len()))
        })
    }

    pub fn last(&self) -> &FinStructure {
        self.levels.last().expect("chains are nonempty")
    }

    pub fn saturation(&self) -> &[usize] {
        &self.saturation
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Chain of prefixes of one structure whose prefixes are class members.
    pub fn from_prefixes(class: ClassName, s: &FinStructure, sizes: &[usize]) -> Result<Self> {
        let levels = sizes
            .iter()
            .map(|&k| s.induced_substructure(&(0..k).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let spec = FraisseClassSpec::new(class)?;
        let saturation = levels
            .iter()
            .map(|l| saturation_level(&spec, l, 3).unwrap_or(0))
            .collect();
        StructureChain::new(class, levels, saturation, None)
    }
}

/// An extension-axiom instance: a witness must relate to `a` one way and
/// to `b` the other way.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AxiomInstance {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

fn for_each_subset(n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, max: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(cur);
        if cur.len() == max {
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, max, v + 1, cur, f);
            cur.pop();
        }
    }
    rec(n, max, 0, &mut Vec::new(), f);
}

fn is_witness(spec: &FraisseClassSpec, s: &FinStructure, inst: &AxiomInstance, v: usize) -> bool {
    if inst.a.contains(&v) || inst.b.contains(&v) {
        return false;
    }
    match spec.name {
        ClassName::PureSet => true,
        ClassName::Graph | ClassName::KnFreeGraph(_) => {
            inst.a.iter().all(|&x| s.holds(0, &[v, x])) && inst.b.iter().all(|&x| !s.holds(0, &[v, x]))
        }
        ClassName::Tournament => {
            inst.a.iter().all(|&x| s.holds(0, &[v, x])) && inst.b.iter().all(|&x| s.holds(0, &[x, v]))
        }
        _ => false,
    }
}

fn instance_required(spec: &FraisseClassSpec, s: &FinStructure, inst: &AxiomInstance) -> bool {
    match spec.name {
        ClassName::KnFreeGraph(k) => {
            let sub = s.induced_unchecked(&inst.a);
            find_clique(&sub, 0, k - 1).is_none()
        }
        _ => true,
    }
}

/// Instances with `|A| + |B| <= t` lacking a witness, in a fixed order.
pub fn unsatisfied_instances(
    spec: &FraisseClassSpec,
    s: &FinStructure,
    t: usize,
) -> Result<Vec<AxiomInstance>> {
    if !spec.is_witnessable() {
        return Err(Error::UnsupportedClass(spec.name.to_string()));
    }
    let mut out = Vec::new();
    for_each_subset(s.size(), t, &mut |u| {
        for mask in 0u32..(1 << u.len()) {
            let inst = AxiomInstance {
                a: u.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect(),
                b: u.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &x)| x).collect(),
            };
            if spec.name == ClassName::PureSet && mask != 0 {
                continue;
            }
            if !instance_required(spec, s, &inst) {
                continue;
            }
            if !(0..s.size()).any(|v| is_witness(spec, s, &inst, v)) {
                out.push(inst);
            }
        }
    });
    Ok(out)
}

/// Largest `t' <= max_t` such that every instance with `|A|+|B| <= t'` has a
/// witness inside `s`.
pub fn saturation_level(spec: &FraisseClassSpec, s: &FinStructure, max_t: usize) -> Result<usize> {
    let mut level = 0;
    for t in 0..=max_t {
        if unsatisfied_instances(spec, s, t)?.is_empty() {
            level = t;
        } else {
            return Ok(if t == 0 { 0 } else { level });
        }
    }
    Ok(level)
}

fn add_witness(
    spec: &FraisseClassSpec,
    s: &FinStructure,
    inst: &AxiomInstance,
    rng: &mut ChaCha8Rng,
) -> Result<FinStructure> {
    let m = s.size();
    let name = spec.signature.relations().first().map(|r| r.name.clone());
    for _ in 0..KN_FREE_RETRIES {
        let mut t = s.tables();
        if let Some(rel) = &name {
            let list = t.entry(rel.clone()).or_default();
            for x in 0..m {
                let forward = if inst.a.contains(&x) {
                    true
                } else if inst.b.contains(&x) {
                    false
                } else {
                    rng.random_bool(0.5)
                };
                match spec.name {
                    ClassName::Tournament => {
                        list.push(if forward { vec![m, x] } else { vec![x, m] });
                    }
                    _ if forward => {
                        list.push(vec![m, x]);
                        list.push(vec![x, m]);
                    }
                    _ => {}
                }
            }
        }
        let next = FinStructure::new(spec.signature.clone(), m + 1, t)?;
        if spec.contains(&next) {
            return Ok(next);
        }
    }
    Err(Error::Resource(format!(
        "no admissible wiring for witness of {inst:?} after {KN_FREE_RETRIES} retries"
    )))
}

/// Grows a chain by witness-completion rounds until the last level is
/// saturated at depth `t` within itself.
pub fn build_generic(spec: &FraisseClassSpec, t: usize, cap: usize, seed: u64) -> Result<StructureChain> {
    if t == 0 {
        return Err(Error::InvalidArgument("saturation target must be at least 1".into()));
    }
    if !spec.is_witnessable() {
        return Err(Error::UnsupportedClass(spec.name.to_string()));
    }
    if spec.name == ClassName::PureSet {
        if cap <= t {
            return Err(Error::SaturationInfeasible { target: t, cap, reached: cap });
        }
        let mut sizes = vec![];
        let mut k = (t + 1).min(cap);
        while k < cap {
            sizes.push(k);
            k *= 2;
        }
        sizes.push(cap);
        let levels: Vec<FinStructure> = sizes
            .iter()
            .map(|&k| FinStructure::new(Signature::empty(), k, Tables::new()))
            .collect::<Result<_>>()?;
        let saturation = sizes.iter().map(|k| k - 1).collect();
        return StructureChain::new(spec.name, levels, saturation, Some(seed));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = FinStructure::new(spec.signature.clone(), 0, Tables::new())?;
    let empty = AxiomInstance { a: vec![], b: vec![] };
    for _ in 0..2.min(cap) {
        current = add_witness(spec, &current, &empty, &mut rng)?;
    }
    let mut levels = vec![current.clone()];
    loop {
        let pending = unsatisfied_instances(spec, &current, t)?;
        if pending.is_empty() {
            break;
        }
        for inst in pending {
            if (0..current.size()).any(|v| is_witness(spec, &current, &inst, v)) {
                continue;
            }
            if current.size() >= cap {
                return Err(Error::SaturationInfeasible {
                    target: t,
                    cap,
                    reached: current.size(),
                });
            }
            current = add_witness(spec, &current, &inst, &mut rng)?;
        }
        levels.push(current.clone());
    }
    let saturation = levels
        .iter()
        .map(|l| saturation_level(spec, l, t))
        .collect::<Result<_>>()?;
    StructureChain::new(spec.name, levels, saturation, Some(seed))
}

/// Paley graph on `Z/q`, `q` a prime congruent to 1 mod 4: `x ~ y` iff
/// `x - y` is a nonzero square. Vertex- and arc-transitive, and its
/// complement is isomorphic to it.
pub fn build_paley(q: usize) -> Result<FinStructure> {
    let prime = q >= 5 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
    if !prime || q % 4 != 1 {
        return Err(Error::InvalidArgument(format!(
            "Paley graphs need a prime q = 1 mod 4, got {q}"
        )));
    }
    let squares: BTreeSet<usize> = (1..q).map(|x| x * x % q).collect();
    let mut edges = Vec::new();
    for x in 0..q {
        for y in 0..q {
            if x != y && squares.contains(&((x + q - y) % q)) {
                edges.push(vec![x, y]);
            }
        }
    }
    let spec = FraisseClassSpec::new(ClassName::Graph)?;
    spec.structure(q, Tables::from([("E".to_string(), edges)]))
}

/// Chain of graphs each embedded as the prefix of the next. Every level is
/// relabeled so that an induced copy of the previous level occupies its
/// initial segment.
pub fn embedded_chain(class: ClassName, graphs: &[FinStructure]) -> Result<StructureChain> {
    let spec = FraisseClassSpec::new(class)?;
    let mut levels: Vec<FinStructure> = Vec::new();
    for g in graphs {
        let placed = match levels.last() {
            None => g.clone(),
            Some(prev) => {
                let emb = crate::search::find_embedding(prev, g).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "level of size {} does not embed into size {}",
                        prev.size(),
                        g.size()
                    ))
                })?;
                let mut order = emb.clone();
                order.extend((0..g.size()).filter(|x| !emb.contains(x)));
                g.induced_substructure(&order)?
            }
        };
        levels.push(placed);
    }
    let saturation = levels
        .iter()
        .map(|l| saturation_level(&spec, l, 3))
        .collect::<Result<_>>()?;
    StructureChain::new(class, levels, saturation, None)
}

/// `P = {0, …, p-1}` and `Q = {p, …, p+q-1}`.
pub fn build_two_predicate_pq(p: usize, q: usize) -> Result<FinStructure> {
    let spec = FraisseClassSpec::new(ClassName::TwoPredicatePQ)?;
    let mut t = Tables::new();
    t.insert("P".into(), (0..p).map(|x| vec![x]).collect());
    t.insert("Q".into(), (p..p + q).map(|x| vec![x]).collect());
    spec.structure(p + q, t)
}

/// Linear order `0 < 1 < … < n-1` in the `lt` signature.
pub fn build_linear_order(n: usize) -> Result<FinStructure> {
    let spec = FraisseClassSpec::new(ClassName::LinearOrder)?;
    let lt = (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect();
    spec.structure(n, Tables::from([("lt".to_string(), lt)]))
}

/// Sort label of the degree-2 part of a bipartite structure.
pub const SORT_S0: u32 = 0;
pub const SORT_S1: u32 = 1;

/// Bipartite structure with `S0 = {0, …, m-1}` and `S1 = {m, …, m+p-1}`;
/// `pairs[i]` lists the two `S1` indices (in `0..p`) adjacent to `i`.
pub fn build_bipartite_from_pairs(pairs: &[(usize, usize)], p: usize) -> Result<FinStructure> {
    let m = pairs.len();
    let mut r = Vec::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        if x == y || x >= p || y >= p {
            return Err(Error::InvalidArgument(format!(
                "neighbor pair ({x},{y}) invalid for {p} S1 points"
            )));
        }
        for z in [x, y] {
            r.push(vec![i, m + z]);
            r.push(vec![m + z, i]);
        }
    }
    let mut t = Tables::new();
    t.insert("S0".into(), (0..m).map(|x| vec![x]).collect());
    t.insert("S1".into(), (m..m + p).map(|x| vec![x]).collect());
    t.insert("R".into(), r);
    let spec = FraisseClassSpec::new(ClassName::BipartiteDeg2)?;
    let sorts = (0..m + p).map(|x| if x < m { SORT_S0 } else { SORT_S1 }).collect();
    let s = FinStructure::with_sorts(spec.signature.clone(), m + p, t, Some(sorts))?;
    spec.check(&s)?;
    Ok(s)
}

/// Seeded growth: each new `S0` element attaches to two old `S1` points
/// (an unused pair), one old and one fresh, or two fresh ones. Neighbor
/// pairs are never repeated.
pub fn build_bipartite_deg2(m_size: usize, seed: u64) -> Result<FinStructure> {
    if m_size == 0 {
        return Err(Error::InvalidArgument("need at least one S0 element".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = vec![(0, 1)];
    let mut used = BTreeSet::from([(0, 1)]);
    let mut p = 2;
    while pairs.len() < m_size {
        let unused: Vec<(usize, usize)> = (0..p)
            .flat_map(|x| (x + 1..p).map(move |y| (x, y)))
            .filter(|e| !used.contains(e))
            .collect();
        let pick = match rng.random_range(0..3) {
            0 if !unused.is_empty() => unused[rng.random_range(0..unused.len())],
            0 | 1 => {
                let old = rng.random_range(0..p);
                p += 1;
                (old, p - 1)
            }
            _ => {
                p += 2;
                (p - 2, p - 1)
            }
        };
        used.insert(pick);
        pairs.push(pick);
    }
    build_bipartite_from_pairs(&pairs, p)
}

/// Every 2-subset of `p` `S1` points is the neighborhood of exactly one
/// `S0` element.
pub fn build_bipartite_saturated(p: usize) -> Result<FinStructure> {
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|x| (x + 1..p).map(move |y| (x, y))).collect();
    build_bipartite_from_pairs(&pairs, p)
}

fn neighbors(s: &FinStructure, a: usize) -> Vec<usize> {
    let r = s.relation_index("R").expect("bipartite signature");
    (0..s.size()).filter(|&b| s.holds(r, &[a, b])).collect()
}

/// `S0` elements and their neighbor pairs; errors on degree other than 2.
pub fn bipartite_neighbor_pairs(s: &FinStructure) -> Result<Vec<(usize, [usize; 2])>> {
    let s0 = s.relation_index("S0")?;
    (0..s.size())
        .filter(|&a| s.holds(s0, &[a]))
        .map(|a| {
            let n = neighbors(s, a);
            if n.len() != 2 {
                return Err(Error::NotInClass {
                    class: ClassName::BipartiteDeg2.to_string(),
                    reason: format!("S0 element {a} has degree {}", n.len()),
                });
            }
            Ok((a, [n[0], n[1]]))
        })
        .collect()
}

/// Every 2-subset of `S1` realized exactly once.
pub fn bipartite_is_saturated(s: &FinStructure) -> Result<bool> {
    let pairs = bipartite_neighbor_pairs(s)?;
    let p = s.sort_elements(Some(SORT_S1)).len();
    let distinct: BTreeSet<[usize; 2]> = pairs.iter().map(|&(_, n)| n).collect();
    Ok(distinct.len() == pairs.len() && distinct.len() == p * (p.saturating_sub(1)) / 2)
}

/// The structure induced on `S0` by the traces of "shares exactly 0, 1,
/// or 2 neighbors". Element `i` of the view is the `i`-th `S0` element.
pub fn bipartite_m_view(s: &FinStructure) -> Result<(FinStructure, Vec<usize>)> {
    let pairs = bipartite_neighbor_pairs(s)?;
    let mut t: Tables = ["share0", "share1", "share2"]
        .iter()
        .map(|n| (n.to_string(), vec![]))
        .collect();
    for (i, (_, a)) in pairs.iter().enumerate() {
        for (j, (_, b)) in pairs.iter().enumerate() {
            if i != j {
                let shared = a.iter().filter(|x| b.contains(x)).count();
                t.get_mut(&format!("share{shared}")).unwrap().push(vec![i, j]);
            }
        }
    }
    let sig = Signature::new([sym("share0", 2), sym("share1", 2), sym("share2", 2)])?;
    let view = FinStructure::new(sig, pairs.len(), t)?;
    Ok((view, pairs.into_iter().map(|(a, _)| a).collect()))
}

/// Sort labels of the involution construction.
pub const SORT_M: u32 = 0;
pub const SORT_M_PRIME: u32 = 1;

/// `2·pairs` elements, `f` matching `2i ↔ 2i+1`, `<` built by inserting the
/// elements of each new pair at seeded random positions. Prefixes of even
/// length are again members, so chains come from prefixes.
pub fn build_involution_order(pairs: usize, seed: u64) -> Result<FinStructure> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = vec![0, 1];
    for i in 1..pairs {
        for e in [2 * i, 2 * i + 1] {
            let pos = rng.random_range(0..=order.len());
            order.insert(pos, e);
        }
    }
    let n = 2 * pairs;
    let mut rank = vec![0; n];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r;
    }
    let mut t = Tables::new();
    t.insert(
        "lt".into(),
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| rank[a] < rank[b])
            .map(|(a, b)| vec![a, b])
            .collect(),
    );
    t.insert("f".into(), (0..n).map(|a| vec![a, a ^ 1]).collect());
    let sorts = (0..n)
        .map(|a| if rank[a ^ 1] < rank[a] { SORT_M } else { SORT_M_PRIME })
        .collect();
    let spec = FraisseClassSpec::new(ClassName::InvolutionOrder)?;
    let s = FinStructure::with_sorts(spec.signature.clone(), n, t, Some(sorts))?;
    spec.check(&s)?;
    Ok(s)
}

/// Partner of `a` under the involution.
pub fn involution_partner(s: &FinStructure, a: usize) -> Result<usize> {
    let f = s.relation_index("f")?;
    (0..s.size())
        .find(|&b| s.holds(f, &[a, b]))
        .ok_or_else(|| Error::InvalidArgument(format!("{a} has no partner")))
}

/// Left-to-right arrangement of `f(a), a, f(b), b`, e.g. `"fa<fb<a<b"`.
pub fn pair_pattern(s: &FinStructure, a: usize, b: usize) -> Result<String> {
    let lt = s.relation_index("lt")?;
    let mut items = vec![
        ("a", a),
        ("fa", involution_partner(s, a)?),
        ("b", b),
        ("fb", involution_partner(s, b)?),
    ];
    items.sort_by(|x, y| {
        if x.1 == y.1 {
            std::cmp::Ordering::Equal
        } else if s.holds(lt, &[x.1, y.1]) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    Ok(items.iter().map(|x| x.0).collect::<Vec<_>>().join("<"))
}

/// First ordered pair of distinct `M`-elements realizing `pattern`.
pub fn find_pair_with_pattern(s: &FinStructure, pattern: &str) -> Result<Option<(usize, usize)>> {
    let m = s.sort_elements(Some(SORT_M));
    for &a in &m {
        for &b in &m {
            if a != b && pair_pattern(s, a, b)? == pattern {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// The structure on `M = {a : f(a) < a}` carrying the traces `a < b`,
/// `f(a) < b` and `f(a) < f(b)`. Element `i` of the view is `M[i]`.
pub fn involution_m_view(s: &FinStructure) -> Result<(FinStructure, Vec<usize>)> {
    let lt = s.relation_index("lt")?;
    let m = s.sort_elements(Some(SORT_M));
    let f: Vec<usize> = m.iter().map(|&a| involution_partner(s, a)).collect::<Result<_>>()?;
    let mut t: Tables = BTreeMap::new();
    for name in ["lt", "flt", "ff"] {
        t.insert(name.into(), vec![]);
    }
    for i in 0..m.len() {
        for j in 0..m.len() {
            if i == j {
                continue;
            }
            if s.holds(lt, &[m[i], m[j]]) {
                t.get_mut("lt").unwrap().push(vec![i, j]);
            }
            if s.holds(lt, &[f[i], m[j]]) {
                t.get_mut("flt").unwrap().push(vec![i, j]);
            }
            if s.holds(lt, &[f[i], f[j]]) {
                t.get_mut("ff").unwrap().push(vec![i, j]);
            }
        }
    }
    let sig = Signature::new([
        RelationSymbol::new("lt", 2).irreflexive(),
        RelationSymbol::new("flt", 2).irreflexive(),
        RelationSymbol::new("ff", 2).irreflexive(),
    ])?;
    Ok((FinStructure::new(sig, m.len(), t)?, m))
}

/// `F_2^d` with elements encoded as `d`-bit integers: `sum(a, b, c)` iff
/// `a xor b = c`, and `zero` names element 0.
pub fn build_f2_vector_space(d: u32) -> Result<FinStructure> {
    let spec = FraisseClassSpec::new(ClassName::F2VectorSpace(d))?;
    let n = 1usize << d;
    let zero = FinStructure::listed_table(BTreeSet::from([vec![0]]), 1, n);
    Ok(FinStructure::from_raw(
        spec.signature.clone(),
        n,
        vec![FinStructure::xor_table(), zero],
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_spec() -> FraisseClassSpec {
        FraisseClassSpec::new(ClassName::Graph).unwrap()
    }

    #[test]
    fn class_names_parse() {
        for (s, c) in [
            ("graph", ClassName::Graph),
            ("k3-free", ClassName::KnFreeGraph(3)),
            ("f2:3", ClassName::F2VectorSpace(3)),
            ("linear_order", ClassName::LinearOrder),
        ] {
            assert_eq!(s.parse::<ClassName>().unwrap(), c);
            assert_eq!(c.to_string().parse::<ClassName>().unwrap(), c);
        }
        assert!("widget".parse::<ClassName>().is_err());
        assert!(FraisseClassSpec::new(ClassName::KnFreeGraph(2)).is_err());
        assert!(FraisseClassSpec::new(ClassName::F2VectorSpace(17)).is_err());
    }

    #[test]
    fn every_checker_accepts_the_empty_structure() {
        for c in [
            ClassName::PureSet,
            ClassName::Graph,
            ClassName::KnFreeGraph(3),
            ClassName::Tournament,
            ClassName::LinearOrder,
            ClassName::TwoPredicatePQ,
            ClassName::BipartiteDeg2,
            ClassName::InvolutionOrder,
            ClassName::F2VectorSpace(2),
        ] {
            let spec = FraisseClassSpec::new(c).unwrap();
            let empty = FinStructure::new(spec.signature().clone(), 0, Tables::new()).unwrap();
            assert!(spec.contains(&empty), "{c}");
        }
    }

    #[test]
    fn graph_t1_chain_is_audited() {
        let chain = build_generic(&graph_spec(), 1, 64, 3).unwrap();
        let last = chain.last();
        assert!(unsatisfied_instances(&graph_spec(), last, 1).unwrap().is_empty());
        assert!(*chain.saturation().last().unwrap() >= 1);
        for w in chain.levels().windows(2) {
            assert!(unsatisfied_instances(&graph_spec(), &w[0], 1)
                .unwrap()
                .iter()
                .all(|inst| (0..w[1].size()).any(|v| is_witness(&graph_spec(), &w[1], inst, v))));
        }
    }

    #[test]
    fn pure_set_chain_reaches_cap() {
        let spec = FraisseClassSpec::new(ClassName::PureSet).unwrap();
        let chain = build_generic(&spec, 2, 10, 0).unwrap();
        assert_eq!(chain.last().size(), 10);
        assert_eq!(*chain.saturation().last().unwrap(), 9);
        assert!(matches!(
            build_generic(&spec, 5, 5, 0),
            Err(Error::SaturationInfeasible { .. })
        ));
    }

    #[test]
    fn cap_too_small_is_reported() {
        assert!(matches!(
            build_generic(&graph_spec(), 3, 10, 1),
            Err(Error::SaturationInfeasible { target: 3, cap: 10, .. })
        ));
    }

    #[test]
    fn triangle_free_chain_has_no_triangle() {
        let spec = FraisseClassSpec::new(ClassName::KnFreeGraph(3)).unwrap();
        let chain = build_generic(&spec, 1, 64, 5).unwrap();
        for l in chain.levels() {
            assert!(find_clique(l, 0, 3).is_none());
        }
        assert!(unsatisfied_instances(&spec, chain.last(), 1).unwrap().is_empty());
    }

    #[test]
    fn tournaments_are_built() {
        let spec = FraisseClassSpec::new(ClassName::Tournament).unwrap();
        let chain = build_generic(&spec, 1, 64, 2).unwrap();
        assert!(spec.contains(chain.last()));
        assert!(saturation_level(&spec, chain.last(), 1).unwrap() >= 1);
    }

    #[test]
    fn unsupported_classes_are_refused() {
        let spec = FraisseClassSpec::new(ClassName::LinearOrder).unwrap();
        assert!(matches!(build_generic(&spec, 1, 10, 0), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn two_predicate_examples() {
        let s = build_two_predicate_pq(1, 1).unwrap();
        assert!(s.holds_named("P", &[0]) && s.holds_named("Q", &[1]));
        let s = build_two_predicate_pq(3, 2).unwrap();
        assert_eq!(s.relation_len(0), 3);
        assert_eq!(s.relation_len(1), 2);
        assert!((0..5).all(|a| !(s.holds(0, &[a]) && s.holds(1, &[a]))));
        let s = build_two_predicate_pq(0, 2).unwrap();
        assert_eq!(s.relation_len(0), 0);
    }

    #[test]
    fn bipartite_examples() {
        let s = build_bipartite_deg2(1, 0).unwrap();
        assert_eq!(s.size(), 3);
        assert_eq!(neighbors(&s, 0).len(), 2);
        let forced = build_bipartite_from_pairs(&[(0, 1), (1, 2)], 3).unwrap();
        let pairs = bipartite_neighbor_pairs(&forced).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(forced.sort_elements(Some(SORT_S1)).len(), 3);
        let big = build_bipartite_deg2(12, 9).unwrap();
        let r = big.relation_index("R").unwrap();
        for a in 0..big.size() {
            for b in 0..big.size() {
                if big.holds(r, &[a, b]) {
                    assert_ne!(big.sort_of(a), big.sort_of(b));
                }
            }
        }
        assert!(FraisseClassSpec::new(ClassName::BipartiteDeg2).unwrap().contains(&big));
        assert!(matches!(
            build_bipartite_from_pairs(&[(0, 0)], 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn generic_bipartite_growth_shares_neighbors() {
        let s = build_bipartite_deg2(10, 4).unwrap();
        let (view, _) = bipartite_m_view(&s).unwrap();
        assert!(view.relation_len(1) > 0, "some pair shares exactly one neighbor");
        assert_eq!(view.relation_len(2), 0);
    }

    #[test]
    fn saturated_bipartite_audit() {
        let s = build_bipartite_saturated(5).unwrap();
        assert!(bipartite_is_saturated(&s).unwrap());
        assert!(!bipartite_is_saturated(&build_bipartite_deg2(3, 1).unwrap()).unwrap());
    }

    #[test]
    fn involution_examples() {
        let s = build_involution_order(1, 0).unwrap();
        assert!(s.holds_named("lt", &[0, 1]));
        assert!(s.holds_named("f", &[0, 1]) && s.holds_named("f", &[1, 0]));
        assert_eq!(s.sort_elements(Some(SORT_M)), vec![1]);
        let s = build_involution_order(3, 11).unwrap();
        for a in 0..6 {
            let fa = involution_partner(&s, a).unwrap();
            assert_ne!(fa, a);
            assert_eq!(involution_partner(&s, fa).unwrap(), a);
        }
        assert!(build_involution_order(0, 0).is_err());
    }

    #[test]
    fn involution_prefixes_are_members() {
        let s = build_involution_order(6, 2).unwrap();
        let chain = StructureChain::from_prefixes(ClassName::InvolutionOrder, &s, &[4, 8, 12]).unwrap();
        assert_eq!(chain.levels().len(), 3);
    }

    #[test]
    fn crossing_pattern_is_found_by_scan() {
        let hit = (0..50u64).find_map(|seed| {
            let s = build_involution_order(4, seed).unwrap();
            find_pair_with_pattern(&s, "fa<fb<a<b").unwrap().map(|p| (s, p))
        });
        let (s, (a, b)) = hit.expect("some seed realizes the crossing pattern");
        let lt = |x: usize, y: usize| s.holds_named("lt", &[x, y]);
        let (fa, fb) = (involution_partner(&s, a).unwrap(), involution_partner(&s, b).unwrap());
        assert!(lt(fa, fb) && lt(fb, a) && lt(a, b));
    }

    #[test]
    fn f2_examples() {
        let s = build_f2_vector_space(1).unwrap();
        assert!(s.holds_named("sum", &[1, 1, 0]));
        let s = build_f2_vector_space(2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(s.holds(0, &[a, b, c]), a ^ b == c);
                }
            }
        }
        let s = build_f2_vector_space(3).unwrap();
        assert!((0..8).all(|a| s.holds(0, &[a, a, 0])));
        assert!(FraisseClassSpec::new(ClassName::F2VectorSpace(3)).unwrap().contains(&s));
        assert!(build_f2_vector_space(17).is_err());
    }

    #[test]
    fn paley_graphs() {
        let p = build_paley(13).unwrap();
        let spec = graph_spec();
        assert_eq!(saturation_level(&spec, &p, 2).unwrap(), 2);
        assert!(build_paley(7).is_err());
    }

    #[test]
    fn one_point_extension_counts() {
        let g = graph_spec();
        assert_eq!(g.labeled_members(3).unwrap().len(), 8);
        let lo = FraisseClassSpec::new(ClassName::LinearOrder).unwrap();
        assert_eq!(lo.labeled_members(4).unwrap().len(), 24);
        let pq = FraisseClassSpec::new(ClassName::TwoPredicatePQ).unwrap();
        assert_eq!(pq.labeled_members(2).unwrap().len(), 9);
        let k3 = FraisseClassSpec::new(ClassName::KnFreeGraph(3)).unwrap();
        assert_eq!(k3.labeled_members(3).unwrap().len(), 7);
    }
}
