//! Alternating τ-paths: `y0, …, y2n` with `tp(y2i, y2i+1) = tp(y2i+2, y2i+1) = τ`
//! and all nodes distinct.
//!
//! A breadth-first pass over (node, parity) states gives a distance bound
//! that ignores distinctness; a depth-bounded search then enumerates simple
//! paths of increasing length, pruned by that bound.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{FinStructure, Signature, Tables, TypeCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauPath {
    pub nodes: Vec<usize>,
    pub tau: TypeCode,
}

impl TauPath {
    /// Number of steps, `2n` for `2n + 1` nodes.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn interior(&self) -> &[usize] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Re-checks every defining condition from the structure.
    pub fn verify(&self, s: &FinStructure) -> Result<bool> {
        let n = &self.nodes;
        if n.len() < 3 || n.len() % 2 == 0 {
            return Ok(false);
        }
        if n.iter().collect::<BTreeSet<_>>().len() != n.len() {
            return Ok(false);
        }
        for i in (1..n.len()).step_by(2) {
            if s.canonical_type(&[n[i - 1], n[i]])? != self.tau
                || s.canonical_type(&[n[i + 1], n[i]])? != self.tau
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Paths with pairwise disjoint interiors and a common length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauPathFamily {
    pub paths: Vec<TauPath>,
    pub requested: usize,
    /// Fewer than `requested` paths exist at the common length.
    pub shortage: bool,
}

struct Search<'a> {
    n: usize,
    /// `step[x][w]`: `tp(x, w) = τ`.
    step: Vec<Vec<bool>>,
    blocked: Vec<bool>,
    target: usize,
    /// Walk distance from `(x, parity)` to the target at even parity.
    dist: [Vec<usize>; 2],
    _s: &'a FinStructure,
}

impl<'a> Search<'a> {
    fn new(s: &'a FinStructure, tau: &TypeCode, a: usize, b: usize, avoid: &[usize]) -> Self {
        let n = s.size();
        let step: Vec<Vec<bool>> = (0..n)
            .map(|x| {
                (0..n)
                    .map(|w| x != w && s.type_unchecked(&[x, w]) == *tau)
                    .collect()
            })
            .collect();
        let mut blocked = vec![false; n];
        for &x in avoid {
            blocked[x] = true;
        }
        blocked[a] = true;
        let mut dist = [vec![usize::MAX; n], vec![usize::MAX; n]];
        dist[0][b] = 0;
        let mut queue = VecDeque::from([(b, 0usize)]);
        while let Some((y, p)) = queue.pop_front() {
            let d = dist[p][y];
            for x in 0..n {
                if blocked[x] && x != a {
                    continue;
                }
                // Predecessor of an even node is odd and vice versa; the
                // connecting pair is always (even, odd).
                let (q, ok) = if p == 0 { (1, step[y][x]) } else { (0, step[x][y]) };
                if ok && dist[q][x] == usize::MAX {
                    dist[q][x] = d + 1;
                    queue.push_back((x, q));
                }
            }
        }
        Search {
            n,
            step,
            blocked,
            target: b,
            dist,
            _s: s,
        }
    }

    fn lower_bound(&self, a: usize) -> Option<usize> {
        let d = self.dist[0][a];
        (d != usize::MAX).then_some(d)
    }

    fn dfs(&self, path: &mut Vec<usize>, used: &mut [bool], len: usize) -> bool {
        let depth = path.len() - 1;
        let cur = *path.last().unwrap();
        let parity = depth % 2;
        if depth == len {
            return cur == self.target;
        }
        for y in 0..self.n {
            if used[y] || (self.blocked[y] && y != self.target) {
                continue;
            }
            let ok = if parity == 0 { self.step[cur][y] } else { self.step[y][cur] };
            if !ok {
                continue;
            }
            let last = depth + 1 == len;
            if (y == self.target) != last {
                continue;
            }
            let d = self.dist[(depth + 1) % 2][y];
            if d == usize::MAX || depth + 1 + d > len {
                continue;
            }
            used[y] = true;
            path.push(y);
            if self.dfs(path, used, len) {
                return true;
            }
            path.pop();
            used[y] = false;
        }
        false
    }

    fn find_of_length(&self, a: usize, len: usize) -> Option<Vec<usize>> {
        let mut used = vec![false; self.n];
        used[a] = true;
        let mut path = vec![a];
        self.dfs(&mut path, &mut used, len).then_some(path)
    }
}

fn check_request(s: &FinStructure, a: usize, b: usize, tau: &TypeCode, avoid: &[usize]) -> Result<()> {
    s.check_points(&[a])?;
    s.check_points(&[b])?;
    if a == b {
        return Err(Error::InvalidArgument("endpoints must differ".into()));
    }
    if avoid.contains(&a) || avoid.contains(&b) {
        return Err(Error::InvalidArgument("endpoints may not be avoided".into()));
    }
    for &x in avoid {
        s.check_points(&[x])?;
    }
    if tau.arity() != 2 {
        return Err(Error::InvalidArgument(format!("τ must be a 2-type, got arity {}", tau.arity())));
    }
    let realized = (0..s.size()).any(|x| (0..s.size()).any(|y| x != y && s.type_unchecked(&[x, y]) == *tau));
    if !realized {
        return Err(Error::TauNotRealized);
    }
    Ok(())
}

/// A shortest alternating τ-path from `a` to `b` whose interior misses `avoid`.
pub fn find_tau_path(
    s: &FinStructure,
    a: usize,
    b: usize,
    tau: &TypeCode,
    avoid: &[usize],
) -> Result<Option<TauPath>> {
    check_request(s, a, b, tau, avoid)?;
    let search = Search::new(s, tau, a, b, avoid);
    let Some(lb) = search.lower_bound(a) else {
        return Ok(None);
    };
    let free = s.size() - avoid.iter().collect::<BTreeSet<_>>().len();
    let mut len = lb.max(2);
    while len < free {
        if let Some(nodes) = search.find_of_length(a, len) {
            return Ok(Some(TauPath { nodes, tau: tau.clone() }));
        }
        len += 2;
    }
    Ok(None)
}

/// Up to `count` paths of one common length with pairwise disjoint interiors,
/// each found after adding the earlier interiors to the avoid set.
pub fn disjoint_tau_paths(
    s: &FinStructure,
    a: usize,
    b: usize,
    tau: &TypeCode,
    count: usize,
) -> Result<TauPathFamily> {
    check_request(s, a, b, tau, &[])?;
    let mut paths: Vec<TauPath> = Vec::new();
    if count > 0 {
        if let Some(first) = find_tau_path(s, a, b, tau, &[])? {
            let len = first.len();
            let mut avoid: Vec<usize> = first.interior().to_vec();
            paths.push(first);
            while paths.len() < count {
                let search = Search::new(s, tau, a, b, &avoid);
                match search.find_of_length(a, len) {
                    Some(nodes) => {
                        avoid.extend_from_slice(&nodes[1..nodes.len() - 1]);
                        paths.push(TauPath { nodes, tau: tau.clone() });
                    }
                    None => break,
                }
            }
        }
    }
    Ok(TauPathFamily {
        shortage: paths.len() < count,
        paths,
        requested: count,
    })
}

/// The 2-type of an adjacent (`edge = true`) or non-adjacent pair in the
/// graph signature `{E:2}`.
pub fn graph_tau(edge: bool) -> TypeCode {
    let sig = Signature::from_pairs(&[("E", 2)]).expect("fixed signature");
    let mut t = Tables::new();
    t.insert(
        "E".into(),
        if edge { vec![vec![0, 1], vec![1, 0]] } else { vec![] },
    );
    FinStructure::new(sig, 2, t)
        .expect("fixed structure")
        .canonical_type(&[0, 1])
        .expect("two points")
}
