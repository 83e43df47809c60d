//! Monte Carlo estimates and falsifiable checks on sampled orders.
//!
//! Suites use a fixed family-wise significance with Bonferroni correction;
//! frequency targets use a 3σ band. Estimators fan out over fixed chunks of
//! the sample stream and merge sums, so results do not depend on the number
//! of worker threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sampler::{chunk_rng, factorial, map_chunks, pattern_index, OrderLaw, CHUNK};
use crate::structure::FinStructure;

/// Family-wise significance used throughout.
pub const ALPHA: f64 = 0.001;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;
/// Width of the band for frequency checks, in standard errors.
pub const SIGMA_BAND: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    pub ci99: (f64, f64),
}

impl Estimate {
    /// Frequency `hits / n` with the binomial standard error.
    pub fn frequency(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        Estimate {
            value: p,
            stderr: se,
            n,
            ci99: ((p - Z99 * se).max(0.0), (p + Z99 * se).min(1.0)),
        }
    }

    /// A real-valued estimate; the interval is not clamped.
    pub fn real(value: f64, stderr: f64, n: u64) -> Self {
        Estimate {
            value,
            stderr,
            n,
            ci99: (value - Z99 * stderr, value + Z99 * stderr),
        }
    }

    /// `|value - target| <= 3·σ`, with `σ` the standard error at the target
    /// for frequencies (exact when the target is 0 or 1).
    pub fn within_sigma_of(&self, target: f64) -> bool {
        let se = if (0.0..=1.0).contains(&target) && self.ci99.0 >= 0.0 && self.ci99.1 <= 1.0 {
            (target * (1.0 - target) / self.n as f64).sqrt().max(self.stderr)
        } else {
            self.stderr
        };
        (self.value - target).abs() <= SIGMA_BAND * se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub seed: u64,
    pub n: u64,
    /// Extra quantities, e.g. per-pair p-values or effect sizes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<(String, f64)>,
}

fn need_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    Ok(())
}

fn need_eta(law: &dyn OrderLaw) -> Result<()> {
    if !law.has_eta() {
        return Err(Error::MissingEta);
    }
    Ok(())
}

/// Frequency of `points` appearing in the order `target` (least to greatest).
pub fn estimate_order_event(
    law: &dyn OrderLaw,
    points: &[usize],
    target: &[usize],
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    need_n(n)?;
    let mut a = points.to_vec();
    let mut b = target.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::InvalidArgument("target must list the same points".into()));
    }
    let hits = map_chunks(law, points, seed, 0, n, |batch| {
        batch.iter().filter(|s| s.order == target).count() as u64
    })?;
    Ok(Estimate::frequency(hits.iter().sum(), n))
}

/// Counts of each order pattern of `points`, indexed by Lehmer code of the
/// ranks.
pub fn pattern_counts(law: &dyn OrderLaw, points: &[usize], n: u64, seed: u64, lane: u32) -> Result<Vec<u64>> {
    let k = points.len();
    let parts = map_chunks(law, points, seed, lane, n, |batch| {
        let mut c = vec![0u64; factorial(k)];
        for s in batch {
            c[pattern_index(&s.ranks(points))] += 1;
        }
        c
    })?;
    Ok(parts.into_iter().fold(vec![0; factorial(k)], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    }))
}

/// Pearson chi-square test of independence on a contingency table; empty
/// rows and columns are dropped. Returns `(statistic, df, p-value)`.
pub fn chi_square_independence(table: &[Vec<u64>]) -> (f64, usize, f64) {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    if rows.is_empty() {
        return (0.0, 0, 1.0);
    }
    let width = rows[0].len();
    let cols: Vec<usize> = (0..width)
        .filter(|&j| rows.iter().map(|r| r[j]).sum::<u64>() > 0)
        .collect();
    let total: f64 = rows.iter().flat_map(|r| r.iter()).sum::<u64>() as f64;
    let row_sums: Vec<f64> = rows.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = cols.iter().map(|&j| rows.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let mut stat = 0.0;
    for (i, r) in rows.iter().enumerate() {
        for (jj, &j) in cols.iter().enumerate() {
            let e = row_sums[i] * col_sums[jj] / total;
            stat += (r[j] as f64 - e).powi(2) / e;
        }
    }
    let df = (rows.len() - 1) * (cols.len().saturating_sub(1));
    (stat, df, chi_square_sf(stat, df))
}

pub fn chi_square_sf(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("positive df").sf(stat)
}

/// Two-sided normal tail probability of `z`.
pub fn normal_two_sided(z: f64) -> f64 {
    2.0 * Normal::new(0.0, 1.0).expect("standard normal").sf(z.abs())
}

/// For each `(ā, b̄)` of equal type in `s`, compares the order-pattern
/// distributions of `ā` and `b̄` from independent sample lanes. Passes iff
/// every p-value clears `alpha / pairs`.
pub fn test_exchangeability(
    law: &dyn OrderLaw,
    s: &FinStructure,
    pairs: &[(Vec<usize>, Vec<usize>)],
    n: u64,
    alpha: f64,
    seed: u64,
) -> Result<TestVerdict> {
    need_n(n)?;
    for (a, b) in pairs {
        if a.len() != b.len() || s.canonical_type(a)? != s.canonical_type(b)? {
            return Err(Error::TypeMismatch {
                left: a.clone(),
                right: b.clone(),
            });
        }
    }
    let mut min_p: f64 = 1.0;
    let mut details = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let ca = pattern_counts(law, a, n, seed, 2 * i as u32 + 1)?;
        let cb = pattern_counts(law, b, n, seed, 2 * i as u32 + 2)?;
        let (_, _, p) = chi_square_independence(&[ca, cb]);
        details.push((format!("p[{a:?} vs {b:?}]"), p));
        min_p = min_p.min(p);
    }
    let threshold = alpha / pairs.len().max(1) as f64;
    Ok(TestVerdict {
        name: "exchangeability".into(),
        statistic: min_p,
        threshold,
        pass: min_p >= threshold,
        seed,
        n,
        details,
    })
}

/// `eta` columns for `points`, one row per sample.
fn eta_rows(law: &dyn OrderLaw, points: &[usize], n: u64, seed: u64, lane: u32) -> Result<Vec<Vec<f64>>> {
    need_eta(law)?;
    let parts = map_chunks(law, points, seed, lane, n, |batch| {
        batch
            .iter()
            .map(|s| s.eta.clone().unwrap_or_default())
            .collect::<Vec<_>>()
    })?;
    let rows: Vec<Vec<f64>> = parts.concat();
    if rows.iter().any(|r| r.len() != points.len()) {
        return Err(Error::MissingEta);
    }
    Ok(rows)
}

/// Bin boundaries: the distinct values when there are at most four,
/// otherwise the empirical quartiles.
fn binner(values: &[f64]) -> impl Fn(f64) -> usize {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let cuts: Vec<f64> = if distinct.len() <= 4 {
        distinct.iter().skip(1).copied().collect()
    } else {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        (1..4).map(|q| sorted[q * sorted.len() / 4]).collect()
    };
    move |x| cuts.iter().filter(|&&c| x >= c).count()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample correlation of two columns.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Pairwise independence of `eta`: a correlation z-test and a 4×4 grid
/// chi-square per pair, Bonferroni over all `2·pairs` tests.
pub fn test_independence(
    law: &dyn OrderLaw,
    pairs: &[(usize, usize)],
    n: u64,
    alpha: f64,
    seed: u64,
) -> Result<TestVerdict> {
    need_n(n)?;
    need_eta(law)?;
    let mut min_p: f64 = 1.0;
    let mut details = Vec::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let rows = eta_rows(law, &[a, b], n, seed, i as u32 + 1)?;
        let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let r = correlation(&x, &y);
        let p_corr = normal_two_sided(r * (n as f64).sqrt());
        let (bx, by) = (binner(&x), binner(&y));
        let mut grid = vec![vec![0u64; 4]; 4];
        for (u, v) in x.iter().zip(&y) {
            grid[bx(*u)][by(*v)] += 1;
        }
        let (_, _, p_grid) = chi_square_independence(&grid);
        details.push((format!("corr[{a},{b}]"), r));
        details.push((format!("p_corr[{a},{b}]"), p_corr));
        details.push((format!("p_grid[{a},{b}]"), p_grid));
        min_p = min_p.min(p_corr).min(p_grid);
    }
    let threshold = alpha / (2 * pairs.len().max(1)) as f64;
    Ok(TestVerdict {
        name: "independence".into(),
        statistic: min_p,
        threshold,
        pass: min_p >= threshold,
        seed,
        n,
        details,
    })
}

/// Joint independence of the `eta` values on each tuple: chi-square of the
/// binned joint table against the product of its marginals.
pub fn test_joint_independence(
    law: &dyn OrderLaw,
    tuples: &[Vec<usize>],
    n: u64,
    alpha: f64,
    seed: u64,
) -> Result<TestVerdict> {
    need_n(n)?;
    need_eta(law)?;
    let mut min_p: f64 = 1.0;
    let mut details = Vec::new();
    for (i, t) in tuples.iter().enumerate() {
        let rows = eta_rows(law, t, n, seed, 1000 + i as u32)?;
        let k = t.len();
        let cols: Vec<Vec<f64>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let bins: Vec<_> = cols.iter().map(|c| binner(c)).collect();
        let cells: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| (0..k).map(|j| bins[j](r[j])).collect())
            .collect();
        let mut marg = vec![[0u64; 4]; k];
        let mut joint = std::collections::BTreeMap::<Vec<usize>, u64>::new();
        for c in &cells {
            for j in 0..k {
                marg[j][c[j]] += 1;
            }
            *joint.entry(c.clone()).or_default() += 1;
        }
        let levels: Vec<Vec<usize>> = marg
            .iter()
            .map(|m| (0..4).filter(|&v| m[v] > 0).collect())
            .collect();
        let total = n as f64;
        let mut stat = 0.0;
        let mut cell = vec![0usize; k];
        loop {
            let key: Vec<usize> = (0..k).map(|j| levels[j][cell[j]]).collect();
            let e = (0..k).map(|j| marg[j][key[j]] as f64 / total).product::<f64>() * total;
            let o = *joint.get(&key).unwrap_or(&0) as f64;
            stat += (o - e).powi(2) / e;
            let mut j = 0;
            while j < k {
                cell[j] += 1;
                if cell[j] < levels[j].len() {
                    break;
                }
                cell[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
        let prod: usize = levels.iter().map(Vec::len).product();
        let df = prod - 1 - levels.iter().map(|l| l.len() - 1).sum::<usize>();
        let p = chi_square_sf(stat, df);
        details.push((format!("p_joint{t:?}"), p));
        min_p = min_p.min(p);
    }
    let threshold = alpha / tuples.len().max(1) as f64;
    Ok(TestVerdict {
        name: "joint-independence".into(),
        statistic: min_p,
        threshold,
        pass: min_p >= threshold,
        seed,
        n,
        details,
    })
}

/// Counts samples with `a` before `b` but `eta(a) > eta(b)`, over all
/// ordered pairs of `points`. Passes iff the count is 0.
pub fn test_monotone_coupling(law: &dyn OrderLaw, points: &[usize], n: u64, seed: u64) -> Result<TestVerdict> {
    need_n(n)?;
    need_eta(law)?;
    let parts = map_chunks(law, points, seed, 0, n, |batch| {
        let mut bad = 0u64;
        for s in batch {
            let eta = s.eta.as_ref().expect("eta present");
            let ranks = s.ranks(points);
            for i in 0..points.len() {
                for j in 0..points.len() {
                    if ranks[i] < ranks[j] && eta[i] > eta[j] {
                        bad += 1;
                    }
                }
            }
        }
        bad
    })?;
    let violations: u64 = parts.iter().sum();
    Ok(TestVerdict {
        name: "monotone-coupling".into(),
        statistic: violations as f64,
        threshold: 0.0,
        pass: violations == 0,
        seed,
        n,
        details: vec![],
    })
}

/// Mean and covariance estimates of `eta` on two points.
pub fn eta_covariance(law: &dyn OrderLaw, a: usize, b: usize, n: u64, seed: u64) -> Result<Estimate> {
    need_n(n)?;
    let rows = eta_rows(law, &[a, b], n, seed, 0)?;
    let mx = rows.iter().map(|r| r[0]).sum::<f64>() / n as f64;
    let my = rows.iter().map(|r| r[1]).sum::<f64>() / n as f64;
    let prods: Vec<f64> = rows.iter().map(|r| (r[0] - mx) * (r[1] - my)).collect();
    let c = mean(&prods);
    let var = prods.iter().map(|p| (p - c).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    Ok(Estimate::real(c, (var / n as f64).sqrt(), n))
}

/// Mean of `eta` at one point.
pub fn eta_mean(law: &dyn OrderLaw, a: usize, n: u64, seed: u64) -> Result<Estimate> {
    need_n(n)?;
    let xs: Vec<f64> = eta_rows(law, &[a], n, seed, 0)?.into_iter().map(|r| r[0]).collect();
    let m = mean(&xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    Ok(Estimate::real(m, (var / n as f64).sqrt(), n))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Random sequences `x_0, …, x_{L-1}` for the shift-ergodicity check.
pub trait SequenceLaw: Send + Sync {
    fn draw(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64>;
}

/// I.i.d. uniform values.
pub struct IidUniform;

impl SequenceLaw for IidUniform {
    fn draw(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.random()).collect()
    }
}

/// I.i.d. Bernoulli values with a success probability picked once per
/// sequence from `probs` with weights `weights`.
pub struct BernoulliMixture {
    pub probs: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SequenceLaw for BernoulliMixture {
    fn draw(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut p = *self.probs.last().expect("nonempty mixture");
        for (q, w) in self.probs.iter().zip(&self.weights) {
            acc += w;
            if u < acc {
                p = *q;
                break;
            }
        }
        (0..len).map(|_| rng.random_bool(p) as u8 as f64).collect()
    }
}

/// Constant sequences with a fair-coin value.
pub struct ConstantMixture;

impl SequenceLaw for ConstantMixture {
    fn draw(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        let v = rng.random::<bool>() as u8 as f64;
        vec![v; len]
    }
}

/// Variance of block means across samples against the product prediction
/// `σ²/B`. Passes iff the excess is within 3 standard errors of 0; the
/// excess is `(1 - 1/B)` times the between-component variance of a mixture,
/// which is reported after rescaling.
pub fn test_shift_ergodicity(
    law: &dyn SequenceLaw,
    len: usize,
    block: usize,
    n: u64,
    seed: u64,
) -> Result<TestVerdict> {
    need_n(n)?;
    if block == 0 || len == 0 || len % block != 0 || len / block < 2 {
        return Err(Error::InvalidArgument(format!(
            "sequence length {len} must be a multiple of block size {block} with at least two blocks"
        )));
    }
    let chunks = n.div_ceil(CHUNK);
    // Per sequence: (sum x, sum x², sum of block means, sum of squared block means).
    let parts: Vec<Vec<[f64; 4]>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, 0, c);
            let m = CHUNK.min(n - c * CHUNK);
            (0..m)
                .map(|_| {
                    let xs = law.draw(&mut rng, len);
                    let mut acc = [0.0; 4];
                    for b in xs.chunks(block) {
                        let bm = b.iter().sum::<f64>() / block as f64;
                        acc[2] += bm;
                        acc[3] += bm * bm;
                    }
                    for x in &xs {
                        acc[0] += x;
                        acc[1] += x * x;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let seqs: Vec<[f64; 4]> = parts.concat();
    let nf = n as f64;
    let blocks = (len / block) as f64;
    let total = nf * len as f64;
    let mu = seqs.iter().map(|s| s[0]).sum::<f64>() / total;
    let sigma2 = seqs.iter().map(|s| s[1]).sum::<f64>() / total - mu * mu;
    // Per-sequence contribution to the pooled block-mean variance.
    let v: Vec<f64> = seqs
        .iter()
        .map(|s| (s[3] - 2.0 * mu * s[2]) / blocks + mu * mu)
        .collect();
    let v_obs = mean(&v);
    let w: Vec<f64> = seqs.iter().map(|s| s[1] / len as f64 - (s[0] / len as f64).powi(2)).collect();
    let predicted = sigma2 / block as f64;
    let excess = v_obs - predicted;
    // Contributions `v_s - sigma2_s / B` are i.i.d. across sequences.
    let d: Vec<f64> = seqs
        .iter()
        .zip(&v)
        .map(|(s, &vs)| vs - (s[1] / len as f64 - mu * mu) / block as f64)
        .collect();
    let dm = mean(&d);
    let se = (d.iter().map(|x| (x - dm).powi(2)).sum::<f64>() / (nf - 1.0).max(1.0) / nf).sqrt();
    let z = if se > 0.0 {
        excess / se
    } else if excess.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(TestVerdict {
        name: "shift-ergodicity".into(),
        statistic: z.abs(),
        threshold: SIGMA_BAND,
        pass: z.abs() <= SIGMA_BAND,
        seed,
        n,
        details: vec![
            ("observed_block_variance".into(), v_obs),
            ("predicted_block_variance".into(), predicted),
            ("excess".into(), excess),
            ("excess_stderr".into(), se),
            ("between_variance".into(), excess * block as f64 / (block as f64 - 1.0)),
            ("between_variance_stderr".into(), se * block as f64 / (block as f64 - 1.0)),
            ("mean_within_variance".into(), mean(&w)),
        ],
    })
}

impl TestVerdict {
    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{BiasedLaw, DecoupledLaw, UniformLaw};

    #[test]
    fn frequency_estimate_fields() {
        let e = Estimate::frequency(250, 1000);
        assert_eq!(e.value, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
        assert!((e.ci99.0 - (0.25 - Z99 * e.stderr)).abs() < 1e-15);
        let all = Estimate::frequency(1000, 1000);
        assert_eq!(all.ci99, (1.0, 1.0));
        assert!(all.within_sigma_of(1.0));
        assert!(!all.within_sigma_of(0.9));
    }

    #[test]
    fn zero_samples_is_an_error() {
        let law = UniformLaw::new(vec![0, 1]).unwrap();
        assert!(estimate_order_event(&law, &[0, 1], &[0, 1], 0, 1).is_err());
    }

    #[test]
    fn chi_square_on_identical_rows_is_null() {
        let (s, df, p) = chi_square_independence(&[vec![10, 20, 30], vec![10, 20, 30]]);
        assert_eq!(s, 0.0);
        assert_eq!(df, 2);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_distance_of_shifted_samples() {
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let y: Vec<f64> = (50..150).map(|i| i as f64).collect();
        assert!((ks_distance(&x, &y) - 0.5).abs() < 1e-12);
        assert_eq!(ks_distance(&x, &x), 0.0);
    }

    #[test]
    fn decoupled_law_violates_coupling() {
        let law = DecoupledLaw::new((0..3).collect()).unwrap();
        let v = test_monotone_coupling(&law, &[0, 1, 2], 1000, 1).unwrap();
        assert!(!v.pass);
        let law = UniformLaw::new((0..3).collect()).unwrap();
        assert!(test_monotone_coupling(&law, &[0, 1, 2], 1000, 1).unwrap().pass);
    }

    #[test]
    fn biased_law_fails_exchangeability() {
        let pure = FinStructure::new(crate::structure::Signature::empty(), 10, Default::default()).unwrap();
        let law = BiasedLaw::new((0..10).collect(), 0.5).unwrap();
        let v = test_exchangeability(&law, &pure, &[(vec![0, 9], vec![9, 0])], 20_000, ALPHA, 3).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn mismatched_types_are_refused() {
        let s = crate::builder::build_linear_order(3).unwrap();
        let law = UniformLaw::new((0..3).collect()).unwrap();
        assert!(matches!(
            test_exchangeability(&law, &s, &[(vec![0, 1], vec![1, 0])], 10, ALPHA, 1),
            Err(Error::TypeMismatch { .. })
        ));
    }

    #[test]
    fn constant_mixture_fails_maximally() {
        let v = test_shift_ergodicity(&ConstantMixture, 64, 8, 2000, 5).unwrap();
        assert!(!v.pass);
        assert!((v.detail("between_variance").unwrap() - 0.25).abs() < 0.03);
        assert!(test_shift_ergodicity(&IidUniform, 64, 8, 2000, 5).unwrap().pass);
        assert!(test_shift_ergodicity(&IidUniform, 63, 8, 10, 5).is_err());
    }
}
