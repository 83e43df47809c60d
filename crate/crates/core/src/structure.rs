//! Finite relational structures over the universe `{0, …, n-1}`.
//!
//! A [`FinStructure`] carries a [`Signature`] of relation symbols, one table
//! per symbol and optional sort labels. Quantifier-free types of tuples are
//! represented by [`TypeCode`]: positions are named, so the induced tables of
//! the tuple already form a canonical description and no orbit quotient is
//! needed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense membership bitmaps are kept for tables whose tuple space fits here.
const DENSE_LIMIT: usize = 1 << 24;

/// Bound on the number of injective tuples visited by type enumeration.
pub const TUPLE_SPACE_LIMIT: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub symmetric: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub irreflexive: bool,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelationSymbol {
            name: name.into(),
            arity,
            symmetric: false,
            irreflexive: false,
        }
    }

    /// Declares the relation invariant under every permutation of positions.
    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    /// Declares that no tuple of the relation repeats an element.
    pub fn irreflexive(mut self) -> Self {
        self.irreflexive = true;
        self
    }
}

/// A finite list of relation symbols. No function symbols: functions are
/// encoded as binary relations and their laws are checked by the class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<RelationSymbol>", into = "Vec<RelationSymbol>")]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new(relations: impl IntoIterator<Item = RelationSymbol>) -> Result<Self> {
        let relations: Vec<_> = relations.into_iter().collect();
        let mut seen = BTreeSet::new();
        for r in &relations {
            if r.arity == 0 {
                return Err(Error::ZeroArity(r.name.clone()));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(Error::DuplicateRelation(r.name.clone()));
            }
        }
        Ok(Signature { relations })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    /// Shorthand for plain `(name, arity)` symbols.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Signature::new(pairs.iter().map(|&(n, a)| RelationSymbol::new(n, a)))
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }
}

impl TryFrom<Vec<RelationSymbol>> for Signature {
    type Error = Error;
    fn try_from(v: Vec<RelationSymbol>) -> Result<Self> {
        Signature::new(v)
    }
}

impl From<Signature> for Vec<RelationSymbol> {
    fn from(s: Signature) -> Self {
        s.relations
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Table {
    Listed {
        tuples: BTreeSet<Vec<usize>>,
        dense: Option<Vec<u64>>,
    },
    /// Ternary `a + b = c` over `F_2^d`, elements encoded as bit vectors.
    XorSum,
}

fn dense_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().rev().fold(0, |acc, &x| acc * n + x)
}

impl Table {
    fn listed(tuples: BTreeSet<Vec<usize>>, arity: usize, n: usize) -> Table {
        let space = n.checked_pow(arity as u32).filter(|&s| s <= DENSE_LIMIT);
        let dense = space.map(|space| {
            let mut bits = vec![0u64; space.div_ceil(64).max(1)];
            for t in &tuples {
                let i = dense_index(t, n);
                bits[i / 64] |= 1 << (i % 64);
            }
            bits
        });
        Table::Listed { tuples, dense }
    }

    fn holds(&self, tuple: &[usize], n: usize) -> bool {
        match self {
            Table::Listed { tuples, dense } => match dense {
                Some(bits) => {
                    let i = dense_index(tuple, n);
                    bits[i / 64] >> (i % 64) & 1 == 1
                }
                None => tuples.contains(tuple),
            },
            Table::XorSum => tuple[0] ^ tuple[1] == tuple[2],
        }
    }

    fn len(&self, n: usize) -> usize {
        match self {
            Table::Listed { tuples, .. } => tuples.len(),
            Table::XorSum => n * n,
        }
    }

    fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        match self {
            Table::Listed { tuples, .. } => tuples.iter().cloned().collect(),
            Table::XorSum => (0..n)
                .flat_map(|a| (0..n).map(move |b| vec![a, b, a ^ b]))
                .collect(),
        }
    }
}

/// Immutable finite relational structure on `{0, …, size-1}`.
#[derive(Debug, Clone)]
pub struct FinStructure {
    signature: Signature,
    size: usize,
    tables: Vec<Table>,
    sorts: Option<Vec<u32>>,
}

/// Relation tables keyed by relation name.
pub type Tables = BTreeMap<String, Vec<Vec<usize>>>;

impl FinStructure {
    /// Validates and builds a structure. Relations missing from `tables` are
    /// empty.
    pub fn new(signature: Signature, size: usize, tables: Tables) -> Result<Self> {
        Self::with_sorts(signature, size, tables, None)
    }

    pub fn with_sorts(
        signature: Signature,
        size: usize,
        tables: Tables,
        sorts: Option<Vec<u32>>,
    ) -> Result<Self> {
        for name in tables.keys() {
            if signature.index_of(name).is_none() {
                return Err(Error::UnknownRelation(name.clone()));
            }
        }
        if let Some(s) = &sorts {
            if s.len() != size {
                return Err(Error::SortLength { got: s.len(), size });
            }
        }
        let mut built = Vec::with_capacity(signature.len());
        for sym in signature.relations() {
            let mut set = BTreeSet::new();
            for t in tables.get(&sym.name).map(Vec::as_slice).unwrap_or(&[]) {
                if t.len() != sym.arity {
                    return Err(Error::ArityMismatch {
                        relation: sym.name.clone(),
                        tuple: t.clone(),
                        got: t.len(),
                        arity: sym.arity,
                    });
                }
                if let Some(&e) = t.iter().find(|&&e| e >= size) {
                    return Err(Error::OutOfRange { element: e, size });
                }
                if sym.irreflexive && has_repeat(t) {
                    return Err(Error::ReflexiveTuple {
                        relation: sym.name.clone(),
                        tuple: t.clone(),
                    });
                }
                set.insert(t.clone());
            }
            if sym.symmetric {
                for t in &set {
                    let mut r = t.clone();
                    r.reverse();
                    let mut rotated = t.clone();
                    rotated.rotate_left(1);
                    if !set.contains(&r) || !set.contains(&rotated) {
                        return Err(Error::SymmetryViolation {
                            relation: sym.name.clone(),
                            tuple: t.clone(),
                        });
                    }
                }
            }
            built.push(Table::listed(set, sym.arity, size));
        }
        Ok(FinStructure {
            signature,
            size,
            tables: built,
            sorts,
        })
    }

    pub(crate) fn from_raw(
        signature: Signature,
        size: usize,
        tables: Vec<Table>,
        sorts: Option<Vec<u32>>,
    ) -> Self {
        debug_assert_eq!(signature.len(), tables.len());
        FinStructure {
            signature,
            size,
            tables,
            sorts,
        }
    }

    pub(crate) fn xor_table() -> Table {
        Table::XorSum
    }

    pub(crate) fn listed_table(tuples: BTreeSet<Vec<usize>>, arity: usize, n: usize) -> Table {
        Table::listed(tuples, arity, n)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sorts(&self) -> Option<&[u32]> {
        self.sorts.as_deref()
    }

    pub fn sort_of(&self, element: usize) -> Option<u32> {
        self.sorts.as_ref().map(|s| s[element])
    }

    /// Elements carrying sort `label`, or the whole universe for `None`.
    pub fn sort_elements(&self, label: Option<u32>) -> Vec<usize> {
        match (label, &self.sorts) {
            (Some(l), Some(s)) => (0..self.size).filter(|&i| s[i] == l).collect(),
            (Some(_), None) => Vec::new(),
            (None, _) => (0..self.size).collect(),
        }
    }

    pub fn relation_index(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    /// Membership test; `tuple` must have the relation's arity.
    pub fn holds(&self, relation: usize, tuple: &[usize]) -> bool {
        self.tables[relation].holds(tuple, self.size)
    }

    pub fn holds_named(&self, name: &str, tuple: &[usize]) -> bool {
        self.signature
            .index_of(name)
            .is_some_and(|r| self.holds(r, tuple))
    }

    pub fn relation_len(&self, relation: usize) -> usize {
        self.tables[relation].len(self.size)
    }

    /// All tuples of a relation in lexicographic order.
    pub fn tuples(&self, relation: usize) -> Vec<Vec<usize>> {
        self.tables[relation].tuples(self.size)
    }

    pub fn tables(&self) -> Tables {
        self.signature
            .relations()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.clone(), self.tuples(i)))
            .collect()
    }

    pub(crate) fn check_points(&self, points: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.size];
        for &p in points {
            if p >= self.size {
                return Err(Error::OutOfRange {
                    element: p,
                    size: self.size,
                });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::RepeatedPoint(p));
            }
        }
        Ok(())
    }

    /// Structure on `{0, …, k-1}` pulled back along `i ↦ points[i]`.
    pub fn induced_substructure(&self, points: &[usize]) -> Result<FinStructure> {
        self.check_points(points)?;
        Ok(self.induced_unchecked(points))
    }

    pub(crate) fn induced_unchecked(&self, points: &[usize]) -> FinStructure {
        let k = points.len();
        let tables = self
            .signature
            .relations()
            .iter()
            .enumerate()
            .map(|(r, sym)| {
                let mut set = BTreeSet::new();
                for_each_tuple(k, sym.arity, |pos| {
                    let image: Vec<usize> = pos.iter().map(|&i| points[i]).collect();
                    if self.holds(r, &image) {
                        set.insert(pos.to_vec());
                    }
                });
                Table::listed(set, sym.arity, k)
            })
            .collect();
        let sorts = self
            .sorts
            .as_ref()
            .map(|s| points.iter().map(|&p| s[p]).collect());
        FinStructure::from_raw(self.signature.clone(), k, tables, sorts)
    }

    /// Canonical code of the quantifier-free type of `points`.
    pub fn canonical_type(&self, points: &[usize]) -> Result<TypeCode> {
        self.check_points(points)?;
        Ok(self.type_unchecked(points))
    }

    pub(crate) fn type_unchecked(&self, points: &[usize]) -> TypeCode {
        let k = points.len();
        let mut bytes = Vec::with_capacity(8);
        bytes.extend_from_slice(&(k as u32).to_le_bytes());
        match &self.sorts {
            Some(s) => {
                bytes.push(1);
                for &p in points {
                    bytes.extend_from_slice(&s[p].to_le_bytes());
                }
            }
            None => bytes.push(0),
        }
        let mut image = Vec::new();
        for (r, sym) in self.signature.relations().iter().enumerate() {
            let mut acc = 0u8;
            let mut nbits = 0;
            for_each_tuple(k, sym.arity, |pos| {
                image.clear();
                image.extend(pos.iter().map(|&i| points[i]));
                acc |= (self.holds(r, &image) as u8) << nbits;
                nbits += 1;
                if nbits == 8 {
                    bytes.push(acc);
                    acc = 0;
                    nbits = 0;
                }
            });
            if nbits > 0 {
                bytes.push(acc);
            }
        }
        TypeCode(bytes)
    }

    /// Every type code realized by an injective `k`-tuple.
    pub fn enumerate_types(&self, k: usize) -> Result<BTreeSet<TypeCode>> {
        if k > self.size {
            return Err(Error::InvalidArgument(format!(
                "k = {k} exceeds structure size {}",
                self.size
            )));
        }
        check_tuple_space(self.size, k)?;
        let mut out = BTreeSet::new();
        for_each_injective(self.size, k, |t| {
            out.insert(self.type_unchecked(t));
        });
        Ok(out)
    }

    /// Structural equality of tables and sorts (relation flags ignored).
    pub fn same_tables(&self, other: &FinStructure) -> bool {
        self.size == other.size
            && self.sorts == other.sorts
            && self.signature.len() == other.signature.len()
            && self
                .signature
                .relations()
                .iter()
                .zip(other.signature.relations())
                .all(|(a, b)| a.name == b.name && a.arity == b.arity)
            && (0..self.signature.len()).all(|r| self.tuples(r) == other.tuples(r))
    }
}

impl PartialEq for FinStructure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.same_tables(other)
    }
}

impl Eq for FinStructure {}

fn has_repeat(t: &[usize]) -> bool {
    t.iter()
        .enumerate()
        .any(|(i, x)| t[i + 1..].contains(x))
}

pub(crate) fn check_tuple_space(n: usize, k: usize) -> Result<usize> {
    let mut count: usize = 1;
    for i in 0..k {
        count = count.saturating_mul(n - i);
        if count > TUPLE_SPACE_LIMIT {
            return Err(Error::Resource(format!(
                "{k}-tuples over {n} elements exceed {TUPLE_SPACE_LIMIT}"
            )));
        }
    }
    Ok(count)
}

/// Calls `f` on every tuple of `[k]^arity` in lexicographic order.
pub(crate) fn for_each_tuple(k: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    let mut t = vec![0usize; arity];
    loop {
        f(&t);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < k {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Calls `f` on every injective `k`-tuple over `{0, …, n-1}`, lexicographically.
pub(crate) fn for_each_injective(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, used: &mut [bool], t: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if t.len() == k {
            f(t);
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                t.push(x);
                rec(n, k, used, t, f);
                t.pop();
                used[x] = false;
            }
        }
    }
    if k > n {
        return;
    }
    let mut used = vec![false; n];
    rec(n, k, &mut used, &mut Vec::with_capacity(k), &mut f);
}

/// Canonical byte code of a quantifier-free type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TypeCode(Vec<u8>);

impl TypeCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        u32::from_le_bytes(self.0[..4].try_into().unwrap()) as usize
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 || s.len() < 10 {
            return Err(Error::InvalidArgument(format!("bad type code `{s}`")));
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(TypeCode)
            .map_err(|_| Error::InvalidArgument(format!("bad type code `{s}`")))
    }
}

impl fmt::Debug for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeCode({})", self.to_hex())
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<TypeCode> for String {
    fn from(c: TypeCode) -> String {
        c.to_hex()
    }
}

impl TryFrom<String> for TypeCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        TypeCode::from_hex(&s)
    }
}

/// Interned 2-types of all ordered pairs, with 1-types on the diagonal.
#[derive(Debug, Clone)]
pub struct PairTypes {
    n: usize,
    ids: Vec<u32>,
    codes: Vec<TypeCode>,
}

impl PairTypes {
    pub fn new(s: &FinStructure) -> Self {
        let mut interner = HashMap::new();
        let mut codes = Vec::new();
        let n = s.size();
        let mut ids = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let code = if i == j {
                    s.type_unchecked(&[i])
                } else {
                    s.type_unchecked(&[i, j])
                };
                let next = codes.len() as u32;
                let id = *interner.entry(code.clone()).or_insert_with(|| {
                    codes.push(code);
                    next
                });
                ids[i * n + j] = id;
            }
        }
        PairTypes { n, ids, codes }
    }

    pub fn id(&self, i: usize, j: usize) -> u32 {
        self.ids[i * self.n + j]
    }

    pub fn code(&self, id: u32) -> &TypeCode {
        &self.codes[id as usize]
    }

    pub fn id_of(&self, code: &TypeCode) -> Option<u32> {
        self.codes.iter().position(|c| c == code).map(|i| i as u32)
    }
}
