//! Backtracking search for relation-preserving bijections.
//!
//! Candidates are pruned by colour refinement over the interned pair-type
//! matrix, with already-mapped points individualized on both sides. Colours
//! are deterministic hashes, so the two sides can be compared directly; a
//! collision only widens the candidate set, the final relation check is exact.

use std::collections::HashMap;

use crate::structure::{FinStructure, TypeCode};

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn combine(a: u64, b: u64) -> u64 {
    mix(a ^ mix(b).rotate_left(17))
}

struct Side<'a> {
    s: &'a FinStructure,
    pairs: Vec<u32>,
}

impl Side<'_> {
    fn pair(&self, i: usize, j: usize) -> u32 {
        self.pairs[i * self.s.size() + j]
    }
}

pub(crate) struct Matcher<'a> {
    src: Side<'a>,
    dst: Side<'a>,
    n: usize,
    higher: Vec<usize>,
}

fn pair_ids(s: &FinStructure, interner: &mut HashMap<TypeCode, u32>) -> Vec<u32> {
    let n = s.size();
    let mut ids = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let code = if i == j {
                s.type_unchecked(&[i])
            } else {
                s.type_unchecked(&[i, j])
            };
            let next = interner.len() as u32;
            ids[i * n + j] = *interner.entry(code).or_insert(next);
        }
    }
    ids
}

fn class_count(colors: &[u64]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

impl<'a> Matcher<'a> {
    /// Returns `None` when the structures cannot be isomorphic for
    /// signature or size reasons.
    pub(crate) fn new(src: &'a FinStructure, dst: &'a FinStructure) -> Option<Self> {
        let (a, b) = (src.signature().relations(), dst.signature().relations());
        if src.size() != dst.size()
            || a.len() != b.len()
            || a.iter().zip(b).any(|(x, y)| x.name != y.name || x.arity != y.arity)
            || src.sorts().is_some() != dst.sorts().is_some()
        {
            return None;
        }
        let mut interner = HashMap::new();
        let src_pairs = pair_ids(src, &mut interner);
        let dst_pairs = if std::ptr::eq(src, dst) {
            src_pairs.clone()
        } else {
            pair_ids(dst, &mut interner)
        };
        let higher = a
            .iter()
            .enumerate()
            .filter(|(_, r)| r.arity >= 3)
            .map(|(i, _)| i)
            .collect();
        Some(Matcher {
            src: Side { s: src, pairs: src_pairs },
            dst: Side { s: dst, pairs: dst_pairs },
            n: src.size(),
            higher,
        })
    }

    fn initial(&self, side: &Side, ind: &[usize]) -> Vec<u64> {
        let mut c: Vec<u64> = (0..self.n).map(|i| mix(side.pair(i, i) as u64)).collect();
        for (k, &p) in ind.iter().enumerate() {
            c[p] = combine(c[p], 1 + k as u64);
        }
        c
    }

    fn round(&self, side: &Side, old: &[u64]) -> Vec<u64> {
        let mut sig = Vec::with_capacity(self.n);
        (0..self.n)
            .map(|i| {
                sig.clear();
                sig.extend(
                    (0..self.n)
                        .filter(|&j| j != i)
                        .map(|j| combine(side.pair(i, j) as u64, old[j])),
                );
                sig.sort_unstable();
                sig.iter().fold(old[i], |acc, &x| combine(acc, x))
            })
            .collect()
    }

    /// Stable colourings of both sides after the same number of rounds.
    fn refine(&self, ind_src: &[usize], ind_dst: &[usize]) -> (Vec<u64>, Vec<u64>) {
        let mut a = self.initial(&self.src, ind_src);
        let mut b = self.initial(&self.dst, ind_dst);
        let (mut ca, mut cb) = (class_count(&a), class_count(&b));
        loop {
            let na = self.round(&self.src, &a);
            let nb = self.round(&self.dst, &b);
            let (ka, kb) = (class_count(&na), class_count(&nb));
            a = na;
            b = nb;
            if ka == ca && kb == cb {
                return (a, b);
            }
            ca = ka;
            cb = kb;
        }
    }

    /// Stable colouring of the source side with `ind` individualized.
    pub(crate) fn colors(&self, ind: &[usize]) -> Vec<u64> {
        self.refine(ind, ind).0
    }

    fn compatible(&self, map: &[Option<usize>], assigned: &[usize], x: usize, y: usize) -> bool {
        if self.src.pair(x, x) != self.dst.pair(y, y) {
            return false;
        }
        for &p in assigned {
            let q = map[p].unwrap();
            if self.src.pair(x, p) != self.dst.pair(y, q) || self.src.pair(p, x) != self.dst.pair(q, y) {
                return false;
            }
        }
        if self.higher.is_empty() {
            return true;
        }
        let mut pool = assigned.to_vec();
        pool.push(x);
        let (s, d) = (self.src.s, self.dst.s);
        let mut src_t = Vec::new();
        let mut dst_t = Vec::new();
        for &r in &self.higher {
            let arity = s.signature().relations()[r].arity;
            let mut ok = true;
            crate::structure::for_each_tuple(pool.len(), arity, |pos| {
                if !ok || !pos.contains(&(pool.len() - 1)) {
                    return;
                }
                src_t.clear();
                dst_t.clear();
                for &i in pos {
                    let e = pool[i];
                    src_t.push(e);
                    dst_t.push(if e == x { y } else { map[e].unwrap() });
                }
                if s.holds(r, &src_t) != d.holds(r, &dst_t) {
                    ok = false;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// First bijection extending `prefix`, searching candidates in
    /// increasing order so the result is deterministic.
    pub(crate) fn find(&self, prefix: &[(usize, usize)]) -> Option<Vec<usize>> {
        let mut map = vec![None; self.n];
        let mut used = vec![false; self.n];
        let mut assigned = Vec::new();
        for &(x, y) in prefix {
            if map[x].is_some() || used[y] || !self.compatible(&map, &assigned, x, y) {
                return None;
            }
            map[x] = Some(y);
            used[y] = true;
            assigned.push(x);
        }
        self.extend(&mut map, &mut used, &mut assigned)
    }

    fn extend(
        &self,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        assigned: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if assigned.len() == self.n {
            return Some(map.iter().map(|m| m.unwrap()).collect());
        }
        let images: Vec<usize> = assigned.iter().map(|&p| map[p].unwrap()).collect();
        let (cs, cd) = self.refine(assigned, &images);
        let mut ms = cs.clone();
        let mut md = cd.clone();
        ms.sort_unstable();
        md.sort_unstable();
        if ms != md {
            return None;
        }
        let mut class_size: HashMap<u64, usize> = HashMap::new();
        for (i, &c) in cs.iter().enumerate() {
            if map[i].is_none() {
                *class_size.entry(c).or_default() += 1;
            }
        }
        let x = (0..self.n)
            .filter(|&i| map[i].is_none())
            .min_by_key(|&i| (class_size[&cs[i]], i))?;
        for y in 0..self.n {
            if used[y] || cd[y] != cs[x] || !self.compatible(map, assigned, x, y) {
                continue;
            }
            map[x] = Some(y);
            used[y] = true;
            assigned.push(x);
            if let Some(found) = self.extend(map, used, assigned) {
                return Some(found);
            }
            assigned.pop();
            used[y] = false;
            map[x] = None;
        }
        None
    }
}

/// Checks that `perm` is a bijection `src → dst` preserving and reflecting
/// every relation and sort label.
pub fn is_isomorphism(src: &FinStructure, dst: &FinStructure, perm: &[usize]) -> bool {
    let n = src.size();
    if dst.size() != n || perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return false;
        }
    }
    if let (Some(a), Some(b)) = (src.sorts(), dst.sorts()) {
        if (0..n).any(|i| a[i] != b[perm[i]]) {
            return false;
        }
    } else if src.sorts().is_some() != dst.sorts().is_some() {
        return false;
    }
    let (a, b) = (src.signature().relations(), dst.signature().relations());
    if a.len() != b.len() {
        return false;
    }
    for r in 0..a.len() {
        if a[r].name != b[r].name || a[r].arity != b[r].arity {
            return false;
        }
        if src.relation_len(r) != dst.relation_len(r) {
            return false;
        }
        for t in src.tuples(r) {
            let image: Vec<usize> = t.iter().map(|&e| perm[e]).collect();
            if !dst.holds(r, &image) {
                return false;
            }
        }
    }
    true
}

/// Some isomorphism `src → dst`, as the image array of the bijection.
pub fn find_isomorphism(src: &FinStructure, dst: &FinStructure) -> Option<Vec<usize>> {
    Matcher::new(src, dst)?.find(&[])
}

/// Some injective map `small → large` onto an induced copy of `small`,
/// as the image array.
pub fn find_embedding(small: &FinStructure, large: &FinStructure) -> Option<Vec<usize>> {
    let (a, b) = (small.signature().relations(), large.signature().relations());
    if small.size() > large.size()
        || a.len() != b.len()
        || a.iter().zip(b).any(|(x, y)| x.name != y.name || x.arity != y.arity)
    {
        return None;
    }
    let k = small.size();
    let mut map: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; large.size()];
    fn fits(small: &FinStructure, large: &FinStructure, map: &[usize], y: usize) -> bool {
        let x = map.len();
        let mut pts: Vec<usize> = (0..=x).collect();
        let mut img: Vec<usize> = map.to_vec();
        img.push(y);
        if small.type_unchecked(&[x]) != large.type_unchecked(&[y]) {
            return false;
        }
        for p in 0..x {
            if small.type_unchecked(&[p, x]) != large.type_unchecked(&[map[p], y]) {
                return false;
            }
        }
        let higher = small.signature().relations().iter().any(|r| r.arity >= 3);
        if higher {
            pts.truncate(x + 1);
            return small.type_unchecked(&pts) == large.type_unchecked(&img);
        }
        true
    }
    fn rec(small: &FinStructure, large: &FinStructure, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if map.len() == small.size() {
            return true;
        }
        for y in 0..large.size() {
            if used[y] || !fits(small, large, map, y) {
                continue;
            }
            used[y] = true;
            map.push(y);
            if rec(small, large, map, used) {
                return true;
            }
            map.pop();
            used[y] = false;
        }
        false
    }
    rec(small, large, &mut map, &mut used).then_some(map)
}
