//! Consistent random orderings of a class truncated at size `n`, as an
//! exact rational linear system.
//!
//! A variable `x_c` is the probability of one particular linear order in the
//! ordered-isomorphism class `c` of an ordered member `(A, <)`; every order
//! in that class gets the same mass, and there are `|Aut A|` of them. Each
//! ordered type is represented by a member on `{0, …, m-1}` carrying the
//! natural order, so its code is the type of the identity tuple.
//!
//! Equalities:
//! - level mass: `Σ_{c over A} |Aut A| · x_c = 1` for every base class `A`;
//! - restriction: `x_c = Σ_p x_{c'_p}` for every one-point extension `B` of a
//!   representative of `c`, summing over the insertion positions `p` of the
//!   new point.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::builder::{ClassName, FraisseClassSpec};
use crate::error::{Error, Result};
use crate::sampler::factorial;
use crate::structure::{for_each_injective, FinStructure, TypeCode};

/// Bound on `labeled members × m!` work during enumeration.
pub const ENUMERATION_LIMIT: usize = 2_000_000;

/// Bound on inequalities held during Fourier–Motzkin elimination.
pub const FM_LIMIT: usize = 20_000;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderedType {
    pub size: usize,
    /// Type of the identity tuple of the representative.
    pub code: TypeCode,
    /// Least code over all relabelings: the isomorphism class of the base.
    pub base: TypeCode,
    /// Concrete orders on the base falling in this class, i.e. `|Aut A|`.
    pub order_count: usize,
    #[serde(skip)]
    pub representative: FinStructure,
}

fn base_key(s: &FinStructure) -> (TypeCode, usize) {
    let id: Vec<usize> = (0..s.size()).collect();
    let own = s.type_unchecked(&id);
    let mut best = own.clone();
    let mut aut = 0;
    for_each_injective(s.size(), s.size(), |p| {
        let c = s.type_unchecked(p);
        if c == own {
            aut += 1;
        }
        if c < best {
            best = c;
        }
    });
    (best, aut)
}

fn check_bounds(spec: &FraisseClassSpec, n: usize) -> Result<()> {
    let cap = match spec.name() {
        ClassName::PureSet => 6,
        ClassName::Graph | ClassName::KnFreeGraph(_) | ClassName::Tournament => 5,
        ClassName::LinearOrder => 5,
        ClassName::TwoPredicatePQ => 5,
        _ => return Err(Error::UnsupportedClass(spec.name().to_string())),
    };
    if n > cap {
        return Err(Error::Resource(format!(
            "ordered-type enumeration for {} is bounded by n <= {cap}",
            spec.name()
        )));
    }
    Ok(())
}

/// All ordered types of size exactly `n`, sorted by code.
pub fn enumerate_ordered_types(spec: &FraisseClassSpec, n: usize) -> Result<Vec<OrderedType>> {
    check_bounds(spec, n)?;
    let members = spec.labeled_members(n)?;
    if members.len().saturating_mul(factorial(n)) > ENUMERATION_LIMIT {
        return Err(Error::Resource(format!(
            "{} labeled members of size {n} exceed the enumeration bound",
            members.len()
        )));
    }
    let id: Vec<usize> = (0..n).collect();
    let mut out: BTreeMap<TypeCode, OrderedType> = BTreeMap::new();
    for m in members {
        let code = m.type_unchecked(&id);
        if out.contains_key(&code) {
            continue;
        }
        let (base, aut) = base_key(&m);
        out.insert(
            code.clone(),
            OrderedType {
                size: n,
                code,
                base,
                order_count: aut,
                representative: m,
            },
        );
    }
    Ok(out.into_values().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    LevelMass,
    Restriction,
}

/// `Σ coeff · x_var = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub kind: EquationKind,
    pub terms: Vec<(usize, Q)>,
    pub rhs: Q,
}

impl Equation {
    pub fn holds_at(&self, x: &[Q]) -> bool {
        let lhs: Q = self.terms.iter().map(|(v, c)| c * &x[*v]).sum();
        lhs == self.rhs
    }
}

#[derive(Debug, Clone)]
pub struct CroSystem {
    pub class: ClassName,
    pub n: usize,
    /// Ordered types of sizes `1..=n`, grouped by size.
    pub variables: Vec<OrderedType>,
    pub equations: Vec<Equation>,
    index: HashMap<TypeCode, usize>,
}

impl CroSystem {
    pub fn variable_of(&self, code: &TypeCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn count(&self, kind: EquationKind) -> usize {
        self.equations.iter().filter(|e| e.kind == kind).count()
    }

    /// Each order of each size-`m` member equally likely: `x_c = 1/m!`.
    pub fn uniform_point(&self) -> Vec<Q> {
        self.variables
            .iter()
            .map(|v| Q::new(BigInt::one(), BigInt::from(factorial(v.size))))
            .collect()
    }

    pub fn satisfies(&self, x: &[Q]) -> bool {
        x.len() == self.variables.len() && self.equations.iter().all(|e| e.holds_at(x))
    }

    /// Rows of the equality matrix with their right-hand sides.
    fn rows(&self) -> Vec<(BTreeMap<usize, Q>, Q)> {
        self.equations
            .iter()
            .map(|e| {
                let mut r: BTreeMap<usize, Q> = BTreeMap::new();
                for (v, c) in &e.terms {
                    *r.entry(*v).or_insert_with(Q::zero) += c;
                }
                r.retain(|_, c| !c.is_zero());
                (r, e.rhs.clone())
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(self.rows().into_iter().map(|(r, _)| r).collect())
    }

    pub fn nullspace_dim(&self) -> usize {
        self.variables.len() - self.rank()
    }

    /// Basis of the kernel of the equality matrix.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let rows: Vec<BTreeMap<usize, Q>> = self.rows().into_iter().map(|(r, _)| r).collect();
        kernel_basis(&rows, self.variables.len())
    }

    /// Indices of the variables of size at most `m`.
    pub fn variables_up_to(&self, m: usize) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].size <= m)
            .collect()
    }
}

/// Builds the system for sizes `1..=n`.
pub fn build_cro_system(spec: &FraisseClassSpec, n: usize) -> Result<CroSystem> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
    }
    let mut variables = Vec::new();
    for m in 1..=n {
        variables.extend(enumerate_ordered_types(spec, m)?);
    }
    let index: HashMap<TypeCode, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.code.clone(), i))
        .collect();
    let mut equations = Vec::new();
    let mut bases: BTreeMap<(usize, TypeCode), Vec<usize>> = BTreeMap::new();
    for (i, v) in variables.iter().enumerate() {
        bases.entry((v.size, v.base.clone())).or_default().push(i);
    }
    for vars in bases.values() {
        equations.push(Equation {
            kind: EquationKind::LevelMass,
            terms: vars
                .iter()
                .map(|&i| (i, q(variables[i].order_count as i64)))
                .collect(),
            rhs: Q::one(),
        });
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (i, v) in variables.iter().enumerate() {
        let m = v.size;
        if m >= n {
            continue;
        }
        for ext in spec.one_point_extensions(&v.representative)? {
            let mut lower: Vec<usize> = (0..=m)
                .map(|p| {
                    let tuple: Vec<usize> = (0..p).chain([m]).chain(p..m).collect();
                    index[&ext.type_unchecked(&tuple)]
                })
                .collect();
            lower.sort_unstable();
            let mut key = vec![i];
            key.extend(&lower);
            if !seen.insert(key) {
                continue;
            }
            let mut terms = vec![(i, Q::one())];
            terms.extend(lower.into_iter().map(|j| (j, -Q::one())));
            equations.push(Equation {
                kind: EquationKind::Restriction,
                terms,
                rhs: Q::zero(),
            });
        }
    }
    let system = CroSystem {
        class: spec.name(),
        n,
        variables,
        equations,
        index,
    };
    if !system.satisfies(&system.uniform_point()) {
        return Err(Error::InvalidArgument(
            "uniform assignment violates the system; enumeration is inconsistent".into(),
        ));
    }
    Ok(system)
}

fn row_sub(row: &mut BTreeMap<usize, Q>, factor: &Q, pivot: &BTreeMap<usize, Q>) {
    for (c, v) in pivot {
        let e = row.entry(*c).or_insert_with(Q::zero);
        *e -= factor * v;
        if e.is_zero() {
            row.remove(c);
        }
    }
}

/// Rank over the rationals by incremental echelon reduction.
pub fn rank(rows: Vec<BTreeMap<usize, Q>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
    for mut row in rows {
        while let Some((&c, v)) = row.iter().next() {
            match pivots.get(&c) {
                Some(p) => {
                    let f = v / &p[&c];
                    row_sub(&mut row, &f, p);
                }
                None => {
                    let inv = v.recip();
                    for x in row.values_mut() {
                        *x *= &inv;
                    }
                    pivots.insert(c, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Reduced row echelon form: pivot column → row with a unit pivot and zeros
/// in every other pivot column. Columns are tried in `order`.
fn rref(rows: &[BTreeMap<usize, Q>], order: &[usize]) -> Vec<(usize, BTreeMap<usize, Q>)> {
    let rank_of: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let lead = |r: &BTreeMap<usize, Q>| r.keys().min_by_key(|c| rank_of[c]).copied();
    let mut pivots: Vec<(usize, BTreeMap<usize, Q>)> = Vec::new();
    for row in rows {
        let mut row = row.clone();
        for (c, p) in &pivots {
            if let Some(v) = row.get(c).cloned() {
                row_sub(&mut row, &v, p);
            }
        }
        let Some(c) = lead(&row) else { continue };
        let inv = row[&c].recip();
        for x in row.values_mut() {
            *x *= &inv;
        }
        for (_, p) in pivots.iter_mut() {
            if let Some(v) = p.get(&c).cloned() {
                row_sub(p, &v, &row);
            }
        }
        pivots.push((c, row));
    }
    pivots
}

/// Kernel basis: one vector per free column.
pub fn kernel_basis(rows: &[BTreeMap<usize, Q>], nvars: usize) -> Vec<Vec<Q>> {
    let order: Vec<usize> = (0..nvars).collect();
    let pivots = rref(rows, &order);
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|(c, _)| *c).collect();
    (0..nvars)
        .filter(|c| !pivot_cols.contains(c))
        .map(|f| {
            let mut v = vec![Q::zero(); nvars];
            v[f] = Q::one();
            for (c, row) in &pivots {
                if let Some(a) = row.get(&f) {
                    v[*c] = -a.clone();
                }
            }
            v
        })
        .collect()
}

fn dense_rank(vectors: &[Vec<Q>]) -> usize {
    rank(
        vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| (i, x.clone()))
                    .collect()
            })
            .collect(),
    )
}

/// A 0/1 solution, listed by the codes set to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiracSolution {
    pub ones: Vec<TypeCode>,
}

/// Every 0/1 solution, by backtracking over one chosen ordered type per base
/// class. Equations are checked as soon as all bases they touch are decided;
/// each solution is re-verified against the full system.
pub fn dirac_solutions(system: &CroSystem) -> Vec<DiracSolution> {
    let mut bases: BTreeMap<(usize, TypeCode), Vec<usize>> = BTreeMap::new();
    for (i, v) in system.variables.iter().enumerate() {
        bases.entry((v.size, v.base.clone())).or_default().push(i);
    }
    let bases: Vec<Vec<usize>> = bases.into_values().collect();
    // A 0/1 point meets a level-mass equation only through a coefficient 1.
    if bases.iter().any(|b| system.variables[b[0]].order_count != 1) {
        return vec![];
    }
    let mut base_of = vec![0; system.variables.len()];
    for (bi, b) in bases.iter().enumerate() {
        for &v in b {
            base_of[v] = bi;
        }
    }
    let mut due: Vec<Vec<usize>> = vec![vec![]; bases.len()];
    for (ei, e) in system.equations.iter().enumerate() {
        let last = e.terms.iter().map(|(v, _)| base_of[*v]).max().unwrap_or(0);
        due[last].push(ei);
    }
    let mut x = vec![Q::zero(); system.variables.len()];
    let mut out = Vec::new();
    fn rec(
        bi: usize,
        system: &CroSystem,
        bases: &[Vec<usize>],
        due: &[Vec<usize>],
        x: &mut Vec<Q>,
        out: &mut Vec<DiracSolution>,
    ) {
        if bi == bases.len() {
            if system.satisfies(x) {
                out.push(DiracSolution {
                    ones: (0..x.len())
                        .filter(|&i| x[i].is_one())
                        .map(|i| system.variables[i].code.clone())
                        .collect(),
                });
            }
            return;
        }
        for &v in &bases[bi] {
            x[v] = Q::one();
            if due[bi].iter().all(|&e| system.equations[e].holds_at(x)) {
                rec(bi + 1, system, bases, due, x, out);
            }
            x[v] = Q::zero();
        }
    }
    rec(0, system, &bases, &due, &mut x, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UniquenessReport {
    pub class: String,
    pub n: usize,
    pub variables: usize,
    pub level_mass_equations: usize,
    pub restriction_equations: usize,
    pub rank: usize,
    pub uniform_feasible: bool,
    pub nullspace_dim: usize,
    pub dirac_solutions: Vec<DiracSolution>,
    pub variable_codes: Vec<String>,
}

pub fn uniqueness_report(system: &CroSystem) -> UniquenessReport {
    let rank = system.rank();
    UniquenessReport {
        class: system.class.to_string(),
        n: system.n,
        variables: system.variables.len(),
        level_mass_equations: system.count(EquationKind::LevelMass),
        restriction_equations: system.count(EquationKind::Restriction),
        rank,
        uniform_feasible: system.satisfies(&system.uniform_point()),
        nullspace_dim: system.variables.len() - rank,
        dirac_solutions: dirac_solutions(system),
        variable_codes: system.variables.iter().map(|v| v.code.to_hex()).collect(),
    }
}

/// `Σ coeff · x_var <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Inequality {
    pub coeffs: BTreeMap<usize, Q>,
    pub rhs: Q,
}

impl Inequality {
    /// Scales so the first nonzero coefficient has absolute value 1.
    fn normalized(mut self) -> Self {
        if let Some(first) = self.coeffs.values().next().cloned() {
            let s = first.abs().recip();
            for c in self.coeffs.values_mut() {
                *c *= &s;
            }
            self.rhs *= &s;
        }
        self
    }

    pub fn slack_at(&self, x: &BTreeMap<usize, Q>) -> Q {
        let lhs: Q = self
            .coeffs
            .iter()
            .map(|(v, c)| c * x.get(v).cloned().unwrap_or_else(Q::zero))
            .sum();
        &self.rhs - lhs
    }
}

/// Eliminates `vars` from `ineqs`, picking at each step the variable with
/// the fewest generated combinations. Exact duplicates and trivially true
/// rows are dropped.
pub fn fourier_motzkin(mut ineqs: Vec<Inequality>, vars: &[usize]) -> Result<Vec<Inequality>> {
    let mut remaining: BTreeSet<usize> = vars.iter().copied().collect();
    while !remaining.is_empty() {
        let cost = |v: usize| {
            let pos = ineqs.iter().filter(|i| i.coeffs.get(&v).is_some_and(|c| c.is_positive())).count();
            let neg = ineqs.iter().filter(|i| i.coeffs.get(&v).is_some_and(|c| c.is_negative())).count();
            pos * neg
        };
        let v = *remaining.iter().min_by_key(|&&v| (cost(v), v)).unwrap();
        remaining.remove(&v);
        let (mut pos, mut neg, mut keep) = (vec![], vec![], BTreeSet::new());
        for i in ineqs {
            match i.coeffs.get(&v).map(|c| c.is_positive()) {
                Some(true) => pos.push(i),
                Some(false) => neg.push(i),
                None => {
                    keep.insert(i);
                }
            }
        }
        if pos.len() * neg.len() + keep.len() > FM_LIMIT {
            return Err(Error::Resource(format!(
                "Fourier–Motzkin step would hold {} inequalities",
                pos.len() * neg.len() + keep.len()
            )));
        }
        for p in &pos {
            let a = p.coeffs[&v].clone();
            for n in &neg {
                let b = -n.coeffs[&v].clone();
                let mut coeffs: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, c) in &p.coeffs {
                    *coeffs.entry(*k).or_insert_with(Q::zero) += c / &a;
                }
                for (k, c) in &n.coeffs {
                    *coeffs.entry(*k).or_insert_with(Q::zero) += c / &b;
                }
                coeffs.retain(|_, c| !c.is_zero());
                let rhs = &p.rhs / &a + &n.rhs / &b;
                if coeffs.is_empty() && !rhs.is_negative() {
                    continue;
                }
                keep.insert(Inequality { coeffs, rhs }.normalized());
            }
        }
        ineqs = keep.into_iter().collect();
    }
    Ok(ineqs)
}

/// The solution polytope `{x >= 0 : equalities}` projected onto `keep` by
/// substituting equalities for eliminated variables and then
/// Fourier–Motzkin on the remaining ones.
pub fn project_polytope(system: &CroSystem, keep: &[usize]) -> Result<Vec<Inequality>> {
    let nvars = system.variables.len();
    let kept: BTreeSet<usize> = keep.iter().copied().collect();
    let order: Vec<usize> = (0..nvars)
        .filter(|c| !kept.contains(c))
        .chain(kept.iter().copied())
        .collect();
    let rows = system.rows();
    let mut aug: Vec<BTreeMap<usize, Q>> = Vec::new();
    // Column `nvars` carries the right-hand side.
    for (mut r, rhs) in rows {
        if !rhs.is_zero() {
            r.insert(nvars, rhs);
        }
        aug.push(r);
    }
    let mut order_aug = order.clone();
    order_aug.push(nvars);
    let pivots = rref(&aug, &order_aug);
    let mut ineqs = Vec::new();
    let mut pivot_cols = BTreeSet::new();
    for (c, row) in &pivots {
        if *c == nvars {
            return Err(Error::InvalidArgument("equality system is inconsistent".into()));
        }
        pivot_cols.insert(*c);
        let rhs = row.get(&nvars).cloned().unwrap_or_else(Q::zero);
        let others: BTreeMap<usize, Q> = row
            .iter()
            .filter(|(k, _)| **k != *c && **k != nvars)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        if kept.contains(c) {
            let mut eq = others.clone();
            eq.insert(*c, Q::one());
            let neg: BTreeMap<usize, Q> = eq.iter().map(|(k, v)| (*k, -v.clone())).collect();
            ineqs.push(Inequality { coeffs: eq, rhs: rhs.clone() });
            ineqs.push(Inequality { coeffs: neg, rhs: -rhs.clone() });
            ineqs.push(Inequality {
                coeffs: BTreeMap::from([(*c, -Q::one())]),
                rhs: Q::zero(),
            });
        } else {
            // x_c = rhs - Σ others >= 0.
            ineqs.push(Inequality { coeffs: others, rhs });
        }
    }
    for c in 0..nvars {
        if !pivot_cols.contains(&c) {
            ineqs.push(Inequality {
                coeffs: BTreeMap::from([(c, -Q::one())]),
                rhs: Q::zero(),
            });
        }
    }
    let free_eliminated: Vec<usize> = (0..nvars)
        .filter(|c| !kept.contains(c) && !pivot_cols.contains(c))
        .collect();
    let ineqs: Vec<Inequality> = ineqs.into_iter().map(Inequality::normalized).collect();
    fourier_motzkin(ineqs, &free_eliminated)
}

/// Dimension of an H-polytope given a point in its relative interior: the
/// inequalities tight there are exactly its implicit equalities.
pub fn dimension_at(ineqs: &[Inequality], coords: &[usize], point: &BTreeMap<usize, Q>) -> usize {
    let tight: Vec<BTreeMap<usize, Q>> = ineqs
        .iter()
        .filter(|i| i.slack_at(point).is_zero())
        .map(|i| i.coeffs.clone())
        .collect();
    coords.len() - rank(tight)
}

/// Projection of the larger truncation onto the smaller one's variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShrinkageReport {
    pub class: String,
    pub small_n: usize,
    pub large_n: usize,
    pub small_nullspace_dim: usize,
    /// Dimension of the larger kernel after projection.
    pub projected_dim: usize,
    /// Every projected kernel direction solves the smaller homogeneous system.
    pub contained: bool,
    /// Projected dimension recomputed by Fourier–Motzkin, when within bounds.
    pub fourier_motzkin_dim: Option<usize>,
    pub shrinks: bool,
}

pub fn projection_shrinkage(spec: &FraisseClassSpec, small_n: usize, large_n: usize) -> Result<ShrinkageReport> {
    if small_n >= large_n {
        return Err(Error::InvalidArgument("need small_n < large_n".into()));
    }
    let small = build_cro_system(spec, small_n)?;
    let large = build_cro_system(spec, large_n)?;
    let coords = large.variables_up_to(small_n);
    let map: Vec<usize> = coords
        .iter()
        .map(|&i| small.variable_of(&large.variables[i].code).expect("shared code"))
        .collect();
    let projected: Vec<Vec<Q>> = large
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut w = vec![Q::zero(); small.variables.len()];
            for (k, &i) in coords.iter().enumerate() {
                w[map[k]] = v[i].clone();
            }
            w
        })
        .collect();
    let projected_dim = dense_rank(&projected);
    let contained = projected.iter().all(|w| {
        small.equations.iter().all(|e| {
            e.terms.iter().map(|(v, c)| c * &w[*v]).sum::<Q>().is_zero()
        })
    });
    let small_dim = small.nullspace_dim();
    let fourier_motzkin_dim = match project_polytope(&large, &coords) {
        Ok(ineqs) => {
            let uniform = large.uniform_point();
            let point: BTreeMap<usize, Q> = coords.iter().map(|&i| (i, uniform[i].clone())).collect();
            Some(dimension_at(&ineqs, &coords, &point))
        }
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ShrinkageReport {
        class: spec.name().to_string(),
        small_n,
        large_n,
        small_nullspace_dim: small_dim,
        projected_dim,
        contained,
        fourier_motzkin_dim,
        shrinks: contained && projected_dim <= small_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(c: ClassName) -> FraisseClassSpec {
        FraisseClassSpec::new(c).unwrap()
    }

    #[test]
    fn ordered_type_counts_at_two() {
        assert_eq!(enumerate_ordered_types(&spec(ClassName::PureSet), 2).unwrap().len(), 1);
        assert_eq!(enumerate_ordered_types(&spec(ClassName::Graph), 2).unwrap().len(), 2);
        assert_eq!(enumerate_ordered_types(&spec(ClassName::LinearOrder), 2).unwrap().len(), 2);
    }

    #[test]
    fn order_counts_are_automorphism_group_sizes() {
        let types = enumerate_ordered_types(&spec(ClassName::Graph), 3).unwrap();
        let total: BTreeMap<TypeCode, usize> = types.iter().fold(BTreeMap::new(), |mut m, t| {
            *m.entry(t.base.clone()).or_default() += t.order_count;
            m
        });
        assert_eq!(total.len(), 4);
        assert!(total.values().all(|&c| c == 6));
    }

    #[test]
    fn enumeration_bounds_are_enforced() {
        assert!(matches!(
            enumerate_ordered_types(&spec(ClassName::Graph), 6),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            enumerate_ordered_types(&spec(ClassName::BipartiteDeg2), 2),
            Err(Error::UnsupportedClass(_))
        ));
    }

    #[test]
    fn zero_assignment_is_infeasible() {
        for c in [ClassName::PureSet, ClassName::Graph, ClassName::LinearOrder] {
            let s = build_cro_system(&spec(c), 3).unwrap();
            assert!(!s.satisfies(&vec![Q::zero(); s.variables.len()]));
            assert!(s.satisfies(&s.uniform_point()));
        }
    }

    #[test]
    fn rank_of_small_matrices() {
        let row = |v: &[(usize, i64)]| v.iter().map(|&(c, x)| (c, q(x))).collect::<BTreeMap<_, _>>();
        assert_eq!(rank(vec![row(&[(0, 1), (1, 2)]), row(&[(0, 2), (1, 4)])]), 1);
        assert_eq!(rank(vec![row(&[(0, 1)]), row(&[(1, 1)]), row(&[(0, 1), (1, 1)])]), 2);
        let basis = kernel_basis(&[row(&[(0, 1), (1, 1), (2, 1)])], 3);
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn fourier_motzkin_projects_a_triangle() {
        // x, y >= 0, x + y <= 1; eliminating y leaves 0 <= x <= 1.
        let ineq = |c: &[(usize, i64)], r: i64| Inequality {
            coeffs: c.iter().map(|&(k, v)| (k, q(v))).collect(),
            rhs: q(r),
        };
        let out = fourier_motzkin(vec![ineq(&[(0, -1)], 0), ineq(&[(1, -1)], 0), ineq(&[(0, 1), (1, 1)], 1)], &[1]).unwrap();
        let set: BTreeSet<Inequality> = out.into_iter().collect();
        assert_eq!(set, BTreeSet::from([ineq(&[(0, -1)], 0), ineq(&[(0, 1)], 1)]));
    }

    #[test]
    fn linear_orders_have_the_two_definable_orders() {
        for n in 2..=4 {
            let s = build_cro_system(&spec(ClassName::LinearOrder), n).unwrap();
            let d = dirac_solutions(&s);
            assert_eq!(d.len(), 2, "n = {n}");
        }
    }

    #[test]
    fn two_predicate_system() {
        let s = build_cro_system(&spec(ClassName::TwoPredicatePQ), 3).unwrap();
        let r = uniqueness_report(&s);
        assert!(r.uniform_feasible);
        assert!(r.dirac_solutions.is_empty());
    }
}
