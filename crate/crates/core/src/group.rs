//! Automorphism groups of finite structures and their actions on tuples.
//!
//! Groups are computed as stabilizer chains: for each base point the orbit
//! under the pointwise stabilizer of the earlier base points is found by
//! searching one automorphism per candidate image, closing the orbit under
//! the generators found so far. The group order is the product of the orbit
//! lengths; elements are listed only when the order is below a bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::builder::StructureChain;
use crate::error::{Error, Result};
use crate::search::Matcher;
use crate::structure::{check_tuple_space, for_each_injective, FinStructure};

/// Default bound on explicitly listed group elements.
pub const DEFAULT_GROUP_BOUND: usize = 1_000_000;

/// Image-array permutation of `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
        }
        Ok(Permutation(images))
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

#[derive(Debug, Clone)]
struct ChainLevel {
    base_point: usize,
    /// Orbit point → element of the level stabilizer mapping the base point there.
    transversal: BTreeMap<usize, Permutation>,
}

/// `Aut(S)` or a pointwise stabilizer `Aut(S)_A`.
#[derive(Debug, Clone)]
pub struct AutGroup {
    base: FinStructure,
    fixed: Vec<usize>,
    levels: Vec<ChainLevel>,
    generators: Vec<Permutation>,
    order: BigUint,
    elements: Option<Vec<Permutation>>,
}

impl AutGroup {
    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    /// Points fixed pointwise by every element.
    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// All elements in sorted order, or `None` when the order exceeded the
    /// bound and only generators are available.
    pub fn elements(&self) -> Option<&[Permutation]> {
        self.elements.as_deref()
    }

    pub fn is_explicit(&self) -> bool {
        self.elements.is_some()
    }

    /// Orbit of a point, sorted.
    pub fn orbit_of(&self, x: usize) -> Vec<usize> {
        let mut seen = BTreeSet::from([x]);
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for g in &self.generators {
                let z = g.apply(y);
                if seen.insert(z) {
                    stack.push(z);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Lengths of the basic orbits of the stabilizer chain.
    pub fn basic_orbit_lengths(&self) -> Vec<(usize, usize)> {
        self.levels
            .iter()
            .map(|l| (l.base_point, l.transversal.len()))
            .collect()
    }
}

fn close_orbit(
    base_point: usize,
    gens: &[Permutation],
    n: usize,
) -> BTreeMap<usize, Permutation> {
    let mut t = BTreeMap::new();
    t.insert(base_point, Permutation::identity(n));
    let mut stack = vec![base_point];
    while let Some(y) = stack.pop() {
        let rep = t[&y].clone();
        for g in gens {
            let z = g.apply(y);
            if let std::collections::btree_map::Entry::Vacant(e) = t.entry(z) {
                e.insert(g.compose(&rep));
                stack.push(z);
            }
        }
    }
    t
}

fn stabilizer_chain(s: &FinStructure, fixed: &[usize]) -> (Vec<ChainLevel>, Vec<Permutation>) {
    let n = s.size();
    let matcher = Matcher::new(s, s).expect("a structure matches itself");
    let mut prefix: Vec<(usize, usize)> = fixed.iter().map(|&p| (p, p)).collect();
    let mut in_prefix = vec![false; n];
    for &p in fixed {
        in_prefix[p] = true;
    }
    let mut levels = Vec::new();
    let mut generators = Vec::new();
    for beta in 0..n {
        if in_prefix[beta] {
            continue;
        }
        let fixed_points: Vec<usize> = prefix.iter().map(|&(p, _)| p).collect();
        let colors = matcher.colors(&fixed_points);
        let mut distinct = colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == n {
            // Discrete colouring: the stabilizer is trivial from here on.
            for b in (beta..n).filter(|&b| !in_prefix[b]) {
                levels.push(ChainLevel {
                    base_point: b,
                    transversal: close_orbit(b, &[], n),
                });
            }
            break;
        }
        let mut gens: Vec<Permutation> = Vec::new();
        let mut transversal = close_orbit(beta, &gens, n);
        for c in 0..n {
            if c == beta
                || in_prefix[c]
                || colors[c] != colors[beta]
                || transversal.contains_key(&c)
            {
                continue;
            }
            prefix.push((beta, c));
            let found = matcher.find(&prefix);
            prefix.pop();
            if let Some(images) = found {
                gens.push(Permutation(images));
                transversal = close_orbit(beta, &gens, n);
            }
        }
        prefix.push((beta, beta));
        in_prefix[beta] = true;
        generators.extend(gens);
        levels.push(ChainLevel {
            base_point: beta,
            transversal,
        });
    }
    (levels, generators)
}

fn assemble(s: &FinStructure, fixed: &[usize], bound: usize) -> AutGroup {
    let (levels, generators) = stabilizer_chain(s, fixed);
    let order = levels
        .iter()
        .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.transversal.len()));
    let elements = order.to_usize().filter(|&o| o <= bound).map(|_| {
        let mut all = vec![Permutation::identity(s.size())];
        for level in levels.iter().rev() {
            all = level
                .transversal
                .values()
                .flat_map(|t| all.iter().map(move |h| t.compose(h)))
                .collect();
        }
        all.sort();
        all
    });
    AutGroup {
        base: s.clone(),
        fixed: fixed.to_vec(),
        levels,
        generators,
        order,
        elements,
    }
}

/// `Aut(S)`, listed explicitly when its order is at most `bound`.
pub fn automorphisms(s: &FinStructure, bound: usize) -> AutGroup {
    assemble(s, &[], bound)
}

/// Pointwise stabilizer `Aut(S)_A`.
pub fn pointwise_stabilizer(s: &FinStructure, fixed: &[usize], bound: usize) -> Result<AutGroup> {
    s.check_points(fixed)?;
    Ok(assemble(s, fixed, bound))
}

/// Partition of the injective `k`-tuples into `Aut(S)_A`-orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    pub arity: usize,
    pub stabilized_by: Vec<usize>,
    /// Each block sorted; blocks ordered by their least tuple.
    pub blocks: Vec<Vec<Vec<usize>>>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, tuple: &[usize]) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

fn tuple_orbits(
    generators: &[Permutation],
    tuples: Vec<Vec<usize>>,
) -> Vec<Vec<Vec<usize>>> {
    let index: HashMap<&[usize], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let mut uf = UnionFind::new(tuples.len());
    let mut image = Vec::new();
    for (i, t) in tuples.iter().enumerate() {
        for g in generators {
            image.clear();
            image.extend(t.iter().map(|&x| g.apply(x)));
            if let Some(&j) = index.get(image.as_slice()) {
                uf.union(i, j);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for (i, t) in tuples.iter().enumerate() {
        blocks.entry(uf.find(i)).or_default().push(t.clone());
    }
    let mut out: Vec<_> = blocks
        .into_values()
        .map(|mut b| {
            b.sort();
            b
        })
        .collect();
    out.sort();
    out
}

/// Orbits of `Aut(S)_fixed` on injective `k`-tuples.
pub fn orbits(s: &FinStructure, k: usize, fixed: &[usize]) -> Result<OrbitPartition> {
    if k > s.size() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds structure size {}",
            s.size()
        )));
    }
    check_tuple_space(s.size(), k)?;
    let group = pointwise_stabilizer(s, fixed, 0)?;
    Ok(orbits_under(&group, k))
}

/// Orbits of an already computed group on injective `k`-tuples.
pub fn orbits_under(group: &AutGroup, k: usize) -> OrbitPartition {
    let mut tuples = Vec::new();
    for_each_injective(group.base.size(), k, |t| tuples.push(t.to_vec()));
    let mut fixed = group.fixed.clone();
    fixed.sort_unstable();
    OrbitPartition {
        arity: k,
        stabilized_by: fixed,
        blocks: tuple_orbits(&group.generators, tuples),
    }
}

/// Heuristic algebraicity verdict read off a finite chain. It never claims
/// anything about the limit structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AclVerdict {
    AlgebraicOverA,
    Growing,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AclProfile {
    pub verdict: AclVerdict,
    /// Orbit size of `b` under `Aut(level)_A`, per level.
    pub orbit_sizes: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

/// Tracks the orbit of `b` under the stabilizer of `a_set` along a chain.
pub fn acl_profile(chain: &StructureChain, a_set: &[usize], b: usize) -> Result<AclProfile> {
    let levels = chain.levels();
    if levels.len() < 2 {
        return Err(Error::InvalidArgument(
            "acl profile needs a chain of at least 2 levels".into(),
        ));
    }
    levels[0].check_points(a_set)?;
    if b >= levels[0].size() {
        return Err(Error::OutOfRange {
            element: b,
            size: levels[0].size(),
        });
    }
    if a_set.contains(&b) {
        return Ok(AclProfile {
            verdict: AclVerdict::AlgebraicOverA,
            orbit_sizes: vec![1; levels.len()],
            orbits: vec![vec![b]; levels.len()],
        });
    }
    let orbits: Vec<Vec<usize>> = levels
        .iter()
        .map(|l| pointwise_stabilizer(l, a_set, 0).map(|g| g.orbit_of(b)))
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    let tail = &sizes[sizes.len().saturating_sub(3)..];
    let last = &orbits[orbits.len().saturating_sub(3)..];
    let verdict = if tail.windows(2).all(|w| w[0] < w[1]) {
        AclVerdict::Growing
    } else if last.windows(2).all(|w| w[0] == w[1]) {
        AclVerdict::AlgebraicOverA
    } else {
        AclVerdict::Undecided
    };
    Ok(AclProfile {
        verdict,
        orbit_sizes: sizes,
        orbits,
    })
}

/// Upper bound on off-diagonal pair orbits for the equivalence search.
pub const PAIR_ORBIT_LIMIT: usize = 18;

/// An equivalence relation given by its classes, each sorted, classes
/// ordered by least element.
pub type Partition = Vec<Vec<usize>>;

/// All `Aut(S)`-invariant equivalence relations on the elements of `sort`
/// (the whole universe for `None`), sorted by number of classes, descending.
pub fn invariant_equivalences(s: &FinStructure, sort: Option<u32>) -> Result<Vec<Partition>> {
    let group = automorphisms(s, 0);
    let domain = s.sort_elements(sort);
    let pos: HashMap<usize, usize> = domain.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let pairs: Vec<Vec<usize>> = domain
        .iter()
        .flat_map(|&a| domain.iter().filter(move |&&b| b != a).map(move |&b| vec![a, b]))
        .collect();
    let pair_orbits = tuple_orbits(&group.generators, pairs);
    if pair_orbits.len() > PAIR_ORBIT_LIMIT {
        return Err(Error::Resource(format!(
            "{} pair orbits exceed the limit of {PAIR_ORBIT_LIMIT}",
            pair_orbits.len()
        )));
    }
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << pair_orbits.len()) {
        let mut uf = UnionFind::new(domain.len());
        for (i, orbit) in pair_orbits.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for p in orbit {
                    uf.union(pos[&p[0]], pos[&p[1]]);
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &x) in domain.iter().enumerate() {
            classes.entry(uf.find(i)).or_default().push(x);
        }
        let partition: Partition = classes.into_values().collect();
        found.insert(partition);
    }
    let mut out: Vec<Partition> = found.into_iter().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    Ok(out)
}
