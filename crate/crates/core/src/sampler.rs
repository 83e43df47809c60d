//! Seedable samplers of random linear orders built from latent variables.
//!
//! A law is stateless and draws one sample restricted to a tuple of points
//! from a caller-owned RNG. Streams are cut into fixed chunks; chunk `c` of
//! lane `l` under seed `s` always uses the ChaCha8 stream `(l << 40) | c`
//! keyed by `s`, so sequential and parallel consumers see identical samples
//! regardless of thread count.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{bipartite_neighbor_pairs, involution_m_view, involution_partner};
use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// Samples per RNG chunk.
pub const CHUNK: u64 = 4096;

/// Default cap on proposals per accepted sample for rejection samplers.
pub const DEFAULT_MAX_TRIES: u64 = 1_000_000;

/// RNG for one chunk of one lane.
pub fn chunk_rng(seed: u64, lane: u32, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((lane as u64) << 40) | chunk);
    rng
}

/// Latent value attached to one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Latent {
    Real { value: f64 },
    Atom { index: usize, location: f64 },
    Bit { value: bool },
}

impl Latent {
    pub fn value(&self) -> f64 {
        match *self {
            Latent::Real { value } => value,
            Latent::Atom { location, .. } => location,
            Latent::Bit { value } => value as u8 as f64,
        }
    }
}

/// One draw, restricted to the requested points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSample {
    /// The points, least to greatest.
    pub order: Vec<usize>,
    /// Latent per point, aligned with the requested points.
    pub latent: Vec<Latent>,
    /// Sampler statistic per point, aligned with the requested points.
    pub eta: Option<Vec<f64>>,
    /// Fresh uniforms used to break ties, aligned with the requested points.
    pub tiebreak: Option<Vec<f64>>,
}

impl OrderSample {
    /// Rank of the `i`-th requested point.
    pub fn ranks(&self, points: &[usize]) -> Vec<usize> {
        points
            .iter()
            .map(|p| self.order.iter().position(|q| q == p).expect("point in order"))
            .collect()
    }

    /// Whether `a` precedes `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        let pa = self.order.iter().position(|&x| x == a);
        let pb = self.order.iter().position(|&x| x == b);
        matches!((pa, pb), (Some(x), Some(y)) if x < y)
    }
}

/// Index in `0..k!` of the pattern whose ranks are `ranks` (Lehmer code).
pub fn pattern_index(ranks: &[usize]) -> usize {
    let k = ranks.len();
    let mut idx = 0;
    for i in 0..k {
        let smaller = ranks[i + 1..].iter().filter(|&&r| r < ranks[i]).count();
        idx = idx * (k - i) + smaller;
    }
    idx
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Points sorted by key, ties by position in `points`.
pub fn order_by_key(points: &[usize], key: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| key(i).total_cmp(&key(j)).then(i.cmp(&j)));
    idx.into_iter().map(|i| points[i]).collect()
}

/// `a < b` iff `z(a) < z(b)`.
pub fn order_from_latents(points: &[usize], z: &[f64]) -> Vec<usize> {
    order_by_key(points, |i| z[i])
}

/// A random-order construction on a sort of a structure.
pub trait OrderLaw: Send + Sync {
    fn name(&self) -> &str;
    /// Elements the law orders.
    fn domain(&self) -> &[usize];
    fn has_eta(&self) -> bool;
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample>;
}

fn check_points(law: &dyn OrderLaw, points: &[usize]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points requested".into()));
    }
    let dom: BTreeSet<usize> = law.domain().iter().copied().collect();
    let mut seen = BTreeSet::new();
    for &p in points {
        if !dom.contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "point {p} is not in the domain of sampler `{}`",
                law.name()
            )));
        }
        if !seen.insert(p) {
            return Err(Error::RepeatedPoint(p));
        }
    }
    Ok(())
}

/// Deterministic stream of samples for a lane.
pub struct SampleStream<'a> {
    law: &'a dyn OrderLaw,
    points: Vec<usize>,
    seed: u64,
    lane: u32,
    index: u64,
    end: u64,
    rng: ChaCha8Rng,
}

impl<'a> SampleStream<'a> {
    pub fn new(law: &'a dyn OrderLaw, points: &[usize], seed: u64, lane: u32, n: u64) -> Result<Self> {
        check_points(law, points)?;
        Ok(SampleStream {
            law,
            points: points.to_vec(),
            seed,
            lane,
            index: 0,
            end: n,
            rng: chunk_rng(seed, lane, 0),
        })
    }
}

impl Iterator for SampleStream<'_> {
    type Item = Result<OrderSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.end {
            return None;
        }
        if self.index % CHUNK == 0 {
            self.rng = chunk_rng(self.seed, self.lane, self.index / CHUNK);
        }
        self.index += 1;
        Some(self.law.draw(&mut self.rng, &self.points))
    }
}

/// The first `n` samples of lane 0.
pub fn sample(law: &dyn OrderLaw, points: &[usize], seed: u64, n: u64) -> Result<Vec<OrderSample>> {
    SampleStream::new(law, points, seed, 0, n)?.collect()
}

/// Maps `f` over the chunks of a lane in parallel; results in chunk order.
pub fn map_chunks<T: Send>(
    law: &dyn OrderLaw,
    points: &[usize],
    seed: u64,
    lane: u32,
    n: u64,
    f: impl Fn(&[OrderSample]) -> T + Sync,
) -> Result<Vec<T>> {
    check_points(law, points)?;
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, lane, c);
            let len = CHUNK.min(n - c * CHUNK);
            let batch = (0..len)
                .map(|_| law.draw(&mut rng, points))
                .collect::<Result<Vec<_>>>()?;
            Ok(f(&batch))
        })
        .collect()
}

/// `eq:def-pi`: i.i.d. uniform latents, order by latent.
#[derive(Debug, Clone)]
pub struct UniformLaw {
    domain: Vec<usize>,
}

impl UniformLaw {
    pub fn new(domain: Vec<usize>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        Ok(UniformLaw { domain })
    }

    /// On the elements of `sort` (all elements for `None`).
    pub fn on(s: &FinStructure, sort: Option<u32>) -> Result<Self> {
        UniformLaw::new(s.sort_elements(sort))
    }
}

impl OrderLaw for UniformLaw {
    fn name(&self) -> &str {
        "uniform"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let z: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        Ok(OrderSample {
            order: order_from_latents(points, &z),
            latent: z.iter().map(|&value| Latent::Real { value }).collect(),
            eta: Some(z),
            tiebreak: None,
        })
    }
}

/// A named strict total order on a sort, listed least to greatest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedOrder {
    pub name: String,
    pub sequence: Vec<usize>,
}

impl FixedOrder {
    pub fn new(name: impl Into<String>, sequence: Vec<usize>) -> Result<Self> {
        let distinct: BTreeSet<usize> = sequence.iter().copied().collect();
        if distinct.len() != sequence.len() {
            return Err(Error::InvalidArgument("fixed order repeats an element".into()));
        }
        Ok(FixedOrder {
            name: name.into(),
            sequence,
        })
    }

    /// The order carried by binary relation `relation` of a linear order.
    pub fn of_structure(name: impl Into<String>, s: &FinStructure, relation: &str) -> Result<Self> {
        let r = s.relation_index(relation)?;
        let mut seq: Vec<usize> = (0..s.size()).collect();
        seq.sort_by_key(|&x| (0..s.size()).filter(|&y| s.holds(r, &[y, x])).count());
        for w in seq.windows(2) {
            if !s.holds(r, &[w[0], w[1]]) {
                return Err(Error::InvalidArgument(format!("`{relation}` is not a strict total order")));
            }
        }
        FixedOrder::new(name, seq)
    }

    pub fn reversed(&self, name: impl Into<String>) -> Self {
        FixedOrder {
            name: name.into(),
            sequence: self.sequence.iter().rev().copied().collect(),
        }
    }

    fn ranks(&self) -> BTreeMap<usize, usize> {
        self.sequence.iter().enumerate().map(|(i, &x)| (x, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
    /// Name of the fixed order breaking ties at this atom.
    pub tie_break: String,
}

/// Atoms plus a uniform remainder carrying the leftover mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub atoms: Vec<Atom>,
}

impl AtomSpec {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut total = 0.0;
        let mut locs = Vec::new();
        for a in &atoms {
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidAtomSpec(format!("mass {} must be positive", a.mass)));
            }
            if !(0.0..=1.0).contains(&a.location) {
                return Err(Error::InvalidAtomSpec(format!("location {} outside [0,1]", a.location)));
            }
            if locs.contains(&a.location) {
                return Err(Error::InvalidAtomSpec(format!("location {} repeated", a.location)));
            }
            locs.push(a.location);
            total += a.mass;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidAtomSpec(format!("total mass {total} exceeds 1")));
        }
        Ok(AtomSpec { atoms })
    }

    pub fn continuous_mass(&self) -> f64 {
        (1.0 - self.atoms.iter().map(|a| a.mass).sum::<f64>()).max(0.0)
    }

    pub fn atom_at(&self, location: f64) -> Option<usize> {
        self.atoms.iter().position(|a| a.location == location)
    }
}

impl FromStr for AtomSpec {
    type Err = Error;

    /// `location:mass:order` entries separated by commas; empty for no atoms.
    fn from_str(s: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let f: Vec<&str> = part.split(':').collect();
            if f.len() != 3 {
                return Err(Error::InvalidAtomSpec(format!("`{part}` is not location:mass:order")));
            }
            let num = |x: &str| {
                x.parse::<f64>()
                    .map_err(|_| Error::InvalidAtomSpec(format!("`{x}` is not a number")))
            };
            atoms.push(Atom {
                location: num(f[0])?,
                mass: num(f[1])?,
                tie_break: f[2].to_string(),
            });
        }
        AtomSpec::new(atoms)
    }
}

/// Latents from the atoms-plus-uniform law; equal latents at an atom are
/// ordered by that atom's fixed order.
#[derive(Debug, Clone)]
pub struct AtomLaw {
    domain: Vec<usize>,
    spec: AtomSpec,
    /// Per atom, rank of each domain element in its tie order.
    ranks: Vec<BTreeMap<usize, usize>>,
}

impl AtomLaw {
    pub fn new(domain: Vec<usize>, spec: AtomSpec, orders: &[FixedOrder]) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        let dom: BTreeSet<usize> = domain.iter().copied().collect();
        let mut ranks = Vec::new();
        for a in &spec.atoms {
            let o = orders
                .iter()
                .find(|o| o.name == a.tie_break)
                .ok_or_else(|| Error::InvalidAtomSpec(format!("no fixed order named `{}`", a.tie_break)))?;
            let seq: BTreeSet<usize> = o.sequence.iter().copied().collect();
            if seq != dom {
                return Err(Error::InvalidAtomSpec(format!(
                    "fixed order `{}` is not a total order on the sort",
                    o.name
                )));
            }
            ranks.push(o.ranks());
        }
        Ok(AtomLaw { domain, spec, ranks })
    }

    pub fn spec(&self) -> &AtomSpec {
        &self.spec
    }

    fn draw_latent(&self, rng: &mut ChaCha8Rng) -> Latent {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (index, a) in self.spec.atoms.iter().enumerate() {
            acc += a.mass;
            if u < acc {
                return Latent::Atom {
                    index,
                    location: a.location,
                };
            }
        }
        Latent::Real { value: rng.random() }
    }

    fn compare(&self, x: (usize, Latent), y: (usize, Latent)) -> Ordering {
        match (x.1, y.1) {
            (Latent::Atom { index: i, .. }, Latent::Atom { index: j, .. }) if i == j => {
                self.ranks[i][&x.0].cmp(&self.ranks[i][&y.0])
            }
            _ => x.1.value().total_cmp(&y.1.value()),
        }
    }
}

impl OrderLaw for AtomLaw {
    fn name(&self) -> &str {
        "atoms"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let latent: Vec<Latent> = points.iter().map(|_| self.draw_latent(rng)).collect();
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&i, &j| {
            self.compare((points[i], latent[i]), (points[j], latent[j]))
                .then(i.cmp(&j))
        });
        Ok(OrderSample {
            order: idx.iter().map(|&i| points[i]).collect(),
            eta: Some(latent.iter().map(Latent::value).collect()),
            latent,
            tiebreak: None,
        })
    }
}

/// Rejection sampler: proposals from an atom law, accepted iff every
/// requested point's latent sits at one atom.
#[derive(Debug, Clone)]
pub struct ConditionedLaw {
    inner: AtomLaw,
    atom: usize,
    max_tries: u64,
}

impl ConditionedLaw {
    pub fn atom_index(&self) -> usize {
        self.atom
    }

    /// Fraction of `n` proposals accepted on `points`, with its count.
    pub fn acceptance(&self, points: &[usize], seed: u64, n: u64) -> Result<(u64, u64)> {
        let hits = map_chunks(&self.inner, points, seed, 0, n, |batch| {
            batch.iter().filter(|s| self.accepts(s)).count() as u64
        })?;
        Ok((hits.iter().sum(), n))
    }

    fn accepts(&self, s: &OrderSample) -> bool {
        s.latent
            .iter()
            .all(|l| matches!(l, Latent::Atom { index, .. } if *index == self.atom))
    }
}

/// Conditions `law` on the latents of the sampled points equalling the atom
/// at `location`.
pub fn condition_on_atom(law: &AtomLaw, location: f64, max_tries: u64) -> Result<ConditionedLaw> {
    let atom = law
        .spec
        .atom_at(location)
        .ok_or(Error::NotAnAtom { value: location })?;
    Ok(ConditionedLaw {
        inner: law.clone(),
        atom,
        max_tries: max_tries.max(1),
    })
}

impl OrderLaw for ConditionedLaw {
    fn name(&self) -> &str {
        "atoms-conditioned"
    }
    fn domain(&self) -> &[usize] {
        self.inner.domain()
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        for _ in 0..self.max_tries {
            let s = self.inner.draw(rng, points)?;
            if self.accepts(&s) {
                return Ok(s);
            }
        }
        Err(Error::RejectionExhausted {
            tries: self.max_tries,
            accepted: 0,
            rate: 0.0,
        })
    }
}

/// All of `P` below all of `Q`; uniform latents order each block.
#[derive(Debug, Clone)]
pub struct PqLaw {
    domain: Vec<usize>,
    in_q: Vec<bool>,
}

impl PqLaw {
    pub fn new(s: &FinStructure) -> Result<Self> {
        let (p, q) = (s.relation_index("P")?, s.relation_index("Q")?);
        let mut in_q = vec![false; s.size()];
        for x in 0..s.size() {
            match (s.holds(p, &[x]), s.holds(q, &[x])) {
                (true, false) => {}
                (false, true) => in_q[x] = true,
                _ => {
                    return Err(Error::NotInClass {
                        class: "two-predicate".into(),
                        reason: format!("element {x} must lie in exactly one of P, Q"),
                    })
                }
            }
        }
        if s.size() == 0 {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        Ok(PqLaw {
            domain: (0..s.size()).collect(),
            in_q,
        })
    }
}

impl OrderLaw for PqLaw {
    fn name(&self) -> &str {
        "pq"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let z: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        let eta: Vec<f64> = points
            .iter()
            .zip(&z)
            .map(|(&p, &u)| (self.in_q[p] as u8 as f64 + u) / 2.0)
            .collect();
        Ok(OrderSample {
            order: order_from_latents(points, &eta),
            latent: z.iter().map(|&value| Latent::Real { value }).collect(),
            eta: Some(eta),
            tiebreak: None,
        })
    }
}

/// `ξ_a = min(η_b : a R b)` with `η` i.i.d. uniform on `S1`; `a < b` iff
/// `ξ_a < ξ_b`, ties broken by a recorded fresh uniform. Points are indices
/// into the list of `S0` elements.
#[derive(Debug, Clone)]
pub struct BipartiteMinLaw {
    domain: Vec<usize>,
    neighbors: Vec<[usize; 2]>,
}

impl BipartiteMinLaw {
    pub fn new(s: &FinStructure) -> Result<Self> {
        let pairs = bipartite_neighbor_pairs(s)?;
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        Ok(BipartiteMinLaw {
            domain: (0..pairs.len()).collect(),
            neighbors: pairs.into_iter().map(|(_, n)| n).collect(),
        })
    }
}

impl OrderLaw for BipartiteMinLaw {
    fn name(&self) -> &str {
        "bimin"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let needed: BTreeSet<usize> = points.iter().flat_map(|&p| self.neighbors[p]).collect();
        let eta: BTreeMap<usize, f64> = needed.into_iter().map(|b| (b, rng.random::<f64>())).collect();
        let xi: Vec<f64> = points
            .iter()
            .map(|&p| eta[&self.neighbors[p][0]].min(eta[&self.neighbors[p][1]]))
            .collect();
        let tb: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&i, &j| xi[i].total_cmp(&xi[j]).then(tb[i].total_cmp(&tb[j])).then(i.cmp(&j)));
        Ok(OrderSample {
            order: idx.iter().map(|&i| points[i]).collect(),
            latent: xi.iter().map(|&value| Latent::Real { value }).collect(),
            eta: Some(xi),
            tiebreak: Some(tb),
        })
    }
}

/// `a ≺ b` iff `f^{η_a}(a) < f^{η_b}(b)` with `η` i.i.d. fair bits on the
/// `M` sort. Points are indices into the `M` view.
#[derive(Debug, Clone)]
pub struct InvolutionLaw {
    domain: Vec<usize>,
    /// Rank in `<` of `a` and of `f(a)`, per view index.
    ranks: Vec<[usize; 2]>,
}

impl InvolutionLaw {
    pub fn new(s: &FinStructure) -> Result<Self> {
        let (_, m) = involution_m_view(s)?;
        if m.is_empty() {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        let lt = s.relation_index("lt")?;
        let rank = |x: usize| (0..s.size()).filter(|&y| s.holds(lt, &[y, x])).count();
        let ranks = m
            .iter()
            .map(|&a| Ok([rank(a), rank(involution_partner(s, a)?)]))
            .collect::<Result<_>>()?;
        Ok(InvolutionLaw {
            domain: (0..m.len()).collect(),
            ranks,
        })
    }
}

impl OrderLaw for InvolutionLaw {
    fn name(&self) -> &str {
        "involution"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let bits: Vec<bool> = points.iter().map(|_| rng.random::<bool>()).collect();
        let key: Vec<f64> = points
            .iter()
            .zip(&bits)
            .map(|(&p, &b)| self.ranks[p][b as usize] as f64)
            .collect();
        Ok(OrderSample {
            order: order_from_latents(points, &key),
            latent: bits.iter().map(|&value| Latent::Bit { value }).collect(),
            eta: Some(bits.iter().map(|&b| b as u8 as f64).collect()),
            tiebreak: None,
        })
    }
}

/// Haar-random linear functional on `F_2^d`: `ξ(v) = parity(v & w)` with
/// `w` uniform. Points are ordered by `ξ`, ties by a recorded fresh uniform.
#[derive(Debug, Clone)]
pub struct DualFunctionalLaw {
    domain: Vec<usize>,
    d: u32,
}

impl DualFunctionalLaw {
    pub fn new(s: &FinStructure) -> Result<Self> {
        let n = s.size();
        if n < 2 || !n.is_power_of_two() || s.relation_index("sum").is_err() {
            return Err(Error::NotInClass {
                class: "f2".into(),
                reason: "expected an F_2 vector space".into(),
            });
        }
        Ok(DualFunctionalLaw {
            domain: (0..n).collect(),
            d: n.trailing_zeros(),
        })
    }

    /// Bits of the functional on the basis vectors, low bit first.
    pub fn draw_functional(&self, rng: &mut ChaCha8Rng) -> usize {
        (0..self.d).fold(0, |w, i| w | (rng.random::<bool>() as usize) << i)
    }

    pub fn evaluate(w: usize, v: usize) -> bool {
        (v & w).count_ones() % 2 == 1
    }
}

impl OrderLaw for DualFunctionalLaw {
    fn name(&self) -> &str {
        "dual"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let w = self.draw_functional(rng);
        let xi: Vec<f64> = points
            .iter()
            .map(|&v| Self::evaluate(w, v) as u8 as f64)
            .collect();
        let tb: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&i, &j| xi[i].total_cmp(&xi[j]).then(tb[i].total_cmp(&tb[j])).then(i.cmp(&j)));
        Ok(OrderSample {
            order: idx.iter().map(|&i| points[i]).collect(),
            latent: xi.iter().map(|&x| Latent::Bit { value: x == 1.0 }).collect(),
            eta: Some(xi),
            tiebreak: Some(tb),
        })
    }
}

/// Self-test law that is not invariant: `z(a) = U_a + strength · a / n`,
/// so later elements drift upward.
#[derive(Debug, Clone)]
pub struct BiasedLaw {
    domain: Vec<usize>,
    strength: f64,
    n: usize,
}

impl BiasedLaw {
    pub fn new(domain: Vec<usize>, strength: f64) -> Result<Self> {
        let n = domain.iter().max().map_or(0, |m| m + 1);
        if n == 0 {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        Ok(BiasedLaw { domain, strength, n })
    }
}

impl OrderLaw for BiasedLaw {
    fn name(&self) -> &str {
        "biased"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let z: Vec<f64> = points
            .iter()
            .map(|&p| rng.random::<f64>() + self.strength * p as f64 / self.n as f64)
            .collect();
        Ok(OrderSample {
            order: order_from_latents(points, &z),
            latent: z.iter().map(|&value| Latent::Real { value }).collect(),
            eta: Some(z),
            tiebreak: None,
        })
    }
}

/// Self-test law whose order ignores its reported statistic.
#[derive(Debug, Clone)]
pub struct DecoupledLaw {
    domain: Vec<usize>,
}

impl DecoupledLaw {
    pub fn new(domain: Vec<usize>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidArgument("empty sort".into()));
        }
        Ok(DecoupledLaw { domain })
    }
}

impl OrderLaw for DecoupledLaw {
    fn name(&self) -> &str {
        "decoupled"
    }
    fn domain(&self) -> &[usize] {
        &self.domain
    }
    fn has_eta(&self) -> bool {
        true
    }
    fn draw(&self, rng: &mut ChaCha8Rng, points: &[usize]) -> Result<OrderSample> {
        let z: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        let eta: Vec<f64> = points.iter().map(|_| rng.random::<f64>()).collect();
        Ok(OrderSample {
            order: order_from_latents(points, &z),
            latent: z.iter().map(|&value| Latent::Real { value }).collect(),
            eta: Some(eta),
            tiebreak: None,
        })
    }
}

/// Names accepted by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Uniform,
    Atoms,
    Pq,
    Bimin,
    Involution,
    Dual,
    Biased,
    Decoupled,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Uniform => "uniform",
            SamplerKind::Atoms => "atoms",
            SamplerKind::Pq => "pq",
            SamplerKind::Bimin => "bimin",
            SamplerKind::Involution => "involution",
            SamplerKind::Dual => "dual",
            SamplerKind::Biased => "biased",
            SamplerKind::Decoupled => "decoupled",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => SamplerKind::Uniform,
            "atoms" => SamplerKind::Atoms,
            "pq" => SamplerKind::Pq,
            "bimin" => SamplerKind::Bimin,
            "involution" => SamplerKind::Involution,
            "dual" => SamplerKind::Dual,
            "biased" => SamplerKind::Biased,
            "decoupled" => SamplerKind::Decoupled,
            other => return Err(Error::InvalidArgument(format!("unknown sampler `{other}`"))),
        })
    }
}
