//! Property tests against brute-force oracles on small random structures.

use std::collections::BTreeSet;

use homord::builder::{build_generic, saturation_level, ClassName, FraisseClassSpec};
use homord::format::{from_text, structure_from_json, structure_to_json, to_text};
use homord::group::{automorphisms, orbits};
use homord::sampler::{factorial, pattern_index, sample, UniformLaw};
use homord::search::{find_embedding, find_isomorphism, is_isomorphism};
use homord::stats::Estimate;
use homord::structure::{FinStructure, Tables};
use homord::tau_path::{find_tau_path, graph_tau};
use num_bigint::BigUint;
use proptest::prelude::*;

fn graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
    let spec = FraisseClassSpec::new(ClassName::Graph).unwrap();
    let mut t = Tables::new();
    t.insert(
        "E".into(),
        edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect(),
    );
    spec.structure(n, t).unwrap()
}

fn arb_graph(max: usize) -> impl Strategy<Value = FinStructure> {
    (2..=max).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |bits| {
            let edges: Vec<_> = pairs.iter().zip(&bits).filter(|(_, &b)| b).map(|(&p, _)| p).collect();
            graph(n, &edges)
        })
    })
}

fn adjacent(s: &FinStructure, a: usize, b: usize) -> bool {
    s.holds_named("E", &[a, b])
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn preserves(s: &FinStructure, t: &FinStructure, map: &[usize]) -> bool {
    (0..s.size()).all(|a| (0..s.size()).all(|b| a == b || adjacent(s, a, b) == adjacent(t, map[a], map[b])))
}

fn relabeled(s: &FinStructure, pi: &[usize]) -> FinStructure {
    let n = s.size();
    let edges: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| adjacent(s, a, b))
        .map(|(a, b)| (pi[a], pi[b]))
        .collect();
    graph(n, &edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn automorphism_count_matches_brute_force(s in arb_graph(6)) {
        let brute = perms(s.size()).into_iter().filter(|p| preserves(&s, &s, p)).count();
        let group = automorphisms(&s, 0);
        prop_assert_eq!(group.order(), &BigUint::from(brute));
    }

    #[test]
    fn isomorphism_found_for_relabelings(s in arb_graph(7), seed in any::<u64>()) {
        let n = s.size();
        let all = perms(n);
        let pi = &all[(seed % all.len() as u64) as usize];
        let t = relabeled(&s, pi);
        let iso = find_isomorphism(&s, &t);
        prop_assert!(iso.is_some());
        let iso = iso.unwrap();
        prop_assert!(is_isomorphism(&s, &t, &iso));
        prop_assert!(preserves(&s, &t, &iso));
        let pts: Vec<usize> = (0..n.min(3)).collect();
        let img: Vec<usize> = pts.iter().map(|&x| pi[x]).collect();
        prop_assert_eq!(s.canonical_type(&pts).unwrap(), t.canonical_type(&img).unwrap());
    }

    #[test]
    fn embedding_exists_iff_brute_force(small in arb_graph(4), large in arb_graph(6)) {
        let k = small.size();
        let n = large.size();
        let mut brute = false;
        if k <= n {
            for p in perms(n) {
                if preserves(&small, &large, &p[..k]) {
                    brute = true;
                    break;
                }
            }
        }
        let found = find_embedding(&small, &large);
        prop_assert_eq!(found.is_some(), brute);
        if let Some(map) = found {
            prop_assert_eq!(map.iter().collect::<BTreeSet<_>>().len(), k);
            prop_assert!(preserves(&small, &large, &map));
        }
    }

    #[test]
    fn pair_orbits_refine_pair_types(s in arb_graph(6)) {
        let part = orbits(&s, 2, &[]).unwrap();
        let n = s.size();
        prop_assert_eq!(part.blocks.iter().map(Vec::len).sum::<usize>(), n * (n - 1));
        for block in &part.blocks {
            let types: BTreeSet<_> = block.iter().map(|t| s.canonical_type(t).unwrap()).collect();
            prop_assert_eq!(types.len(), 1);
        }
    }

    #[test]
    fn text_and_json_roundtrip(s in arb_graph(8)) {
        let text = to_text(&s).unwrap();
        prop_assert_eq!(&from_text(&text).unwrap(), &s);
        prop_assert_eq!(&structure_from_json(&structure_to_json(&s).unwrap()).unwrap(), &s);
    }

    #[test]
    fn tau_paths_found_are_valid(s in arb_graph(7), a in 0usize..7, b in 0usize..7, edge in any::<bool>()) {
        let n = s.size();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let tau = graph_tau(edge);
        if let Ok(Some(p)) = find_tau_path(&s, a, b, &tau, &[]) {
            prop_assert!(p.verify(&s).unwrap());
            prop_assert_eq!(p.endpoints(), (a, b));
            prop_assert_eq!(p.len() % 2, 0);
        }
    }

    #[test]
    fn uniform_samples_are_reproducible_orders(seed in any::<u64>(), k in 1usize..6) {
        let law = UniformLaw::new((0..8).collect()).unwrap();
        let pts: Vec<usize> = (0..k).collect();
        let x = sample(&law, &pts, seed, 50).unwrap();
        let y = sample(&law, &pts, seed, 50).unwrap();
        prop_assert_eq!(&x, &y);
        for s in &x {
            let mut o = s.order.clone();
            o.sort_unstable();
            prop_assert_eq!(o, pts.clone());
        }
    }

    #[test]
    fn estimate_interval_is_clamped(hits in 0u64..1000, extra in 1u64..1000) {
        let n = hits + extra;
        let e = Estimate::frequency(hits, n);
        let p = hits as f64 / n as f64;
        prop_assert!((e.stderr - (p * (1.0 - p) / n as f64).sqrt()).abs() < 1e-12);
        prop_assert!(e.ci99.0 >= 0.0 && e.ci99.1 <= 1.0 && e.ci99.0 <= e.value && e.value <= e.ci99.1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generic_chains_nest_and_saturate(seed in any::<u64>(), t in 1usize..=2) {
        let spec = FraisseClassSpec::new(ClassName::Graph).unwrap();
        let chain = build_generic(&spec, t, 40, seed).unwrap();
        let last = chain.last();
        prop_assert!(saturation_level(&spec, last, t).unwrap() >= t);
        prop_assert_eq!(*chain.saturation().last().unwrap(), saturation_level(&spec, last, t).unwrap());
        for w in chain.levels().windows(2) {
            let prefix: Vec<usize> = (0..w[0].size()).collect();
            prop_assert!(w[1].induced_substructure(&prefix).unwrap().same_tables(&w[0]));
        }
    }
}

#[test]
fn pattern_index_is_a_bijection() {
    for k in 1..=5 {
        let idx: BTreeSet<usize> = perms(k).iter().map(|p| pattern_index(p)).collect();
        assert_eq!(idx, (0..factorial(k)).collect());
    }
}
