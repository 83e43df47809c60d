//! Subcommand implementations. Each returns an [`Output`]; [`run`] writes it
//! and reports whether every requested verdict passed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use homord::builder::{
    bipartite_m_view, build_bipartite_deg2, build_bipartite_saturated, build_f2_vector_space,
    build_generic, build_involution_order, build_linear_order, build_paley, build_two_predicate_pq,
    embedded_chain, involution_m_view, ClassName, FraisseClassSpec, StructureChain,
};
use homord::cro::{build_cro_system, projection_shrinkage, uniqueness_report};
use homord::format::{chain_from_json, chain_to_json, load_levels, to_text, ChainJson};
use homord::group::{acl_profile, orbits, AclVerdict};
use homord::sampler::{
    sample, AtomLaw, AtomSpec, BiasedLaw, BipartiteMinLaw, DecoupledLaw, DualFunctionalLaw, FixedOrder,
    InvolutionLaw, OrderLaw, PqLaw, SamplerKind, UniformLaw,
};
use homord::stats::{
    estimate_order_event, test_exchangeability, test_independence, test_joint_independence,
    test_monotone_coupling, test_shift_ergodicity, BernoulliMixture, ConstantMixture, IidUniform,
    SequenceLaw, TestVerdict,
};
use homord::structure::{FinStructure, Tables, TypeCode};
use homord::tau_path::{disjoint_tau_paths, find_tau_path, graph_tau};
use serde_json::{json, Value};

use crate::{
    AclArgs, AclExpect, BuildArgs, Cli, Cmd, CroArgs, EstimateArgs, Expect, InputArgs, OrbitsArgs, SampleArgs,
    SamplerArgs, SequenceKind, Suite, TauArgs, TestArgs,
};

pub struct Output {
    /// Structured result, printed under `--json`.
    pub value: Value,
    /// Text summary.
    pub text: String,
    /// Artifact that replaces the JSON value in files, e.g. CSV.
    pub artifact: Option<String>,
    pub pass: bool,
}

impl Output {
    fn new(value: Value, text: String, pass: bool) -> Self {
        Output {
            value,
            text,
            artifact: None,
            pass,
        }
    }
}

pub fn run(cli: &Cli) -> Result<bool> {
    let mut out_path = cli.out.clone();
    let output = match &cli.cmd {
        Cmd::Build(a) => build(a, cli.seed)?,
        Cmd::Orbits(a) => orbits_cmd(a)?,
        Cmd::Acl(a) => acl(a)?,
        Cmd::TauPath(a) => tau_path(a)?,
        Cmd::Sample(a) => sample_cmd(a, cli.seed)?,
        Cmd::Estimate(a) => estimate(a, cli.seed)?,
        Cmd::Test(a) => test(a, cli.seed)?,
        Cmd::Cro(a) => {
            if out_path.is_none() {
                out_path = a.report.clone();
            }
            cro(a)?
        }
    };
    emit(&output, cli.json, out_path.as_deref())?;
    Ok(output.pass)
}

fn emit(o: &Output, json: bool, out: Option<&Path>) -> Result<()> {
    let pretty = || serde_json::to_string_pretty(&o.value).expect("JSON value serializes");
    let stdout = match out {
        Some(path) => {
            let mut body = o.artifact.clone().unwrap_or_else(pretty);
            if !body.ends_with('\n') {
                body.push('\n');
            }
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            if json {
                pretty()
            } else {
                o.text.clone()
            }
        }
        None => match (&o.artifact, json) {
            (Some(a), _) => a.clone(),
            (None, true) => pretty(),
            (None, false) => o.text.clone(),
        },
    };
    let mut lock = std::io::stdout().lock();
    let written = lock.write_all(stdout.as_bytes()).and_then(|()| {
        if stdout.ends_with('\n') {
            Ok(())
        } else {
            lock.write_all(b"\n")
        }
    });
    match written {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(input: &InputArgs) -> Result<FinStructure> {
    load_level(&input.input, input.level)
}

fn load_level(path: &Path, level: Option<usize>) -> Result<FinStructure> {
    let mut levels = load_levels(&read(path)?)?;
    let i = level.unwrap_or(levels.len() - 1);
    if i >= levels.len() {
        bail!("input has {} levels, asked for level {i}", levels.len());
    }
    Ok(levels.swap_remove(i))
}

fn parse_tuple(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| anyhow!("`{x}` is not an element in `{s}`")))
        .collect()
}

fn single(class: ClassName, s: FinStructure, seed: Option<u64>) -> Result<StructureChain> {
    let mut c = StructureChain::from_prefixes(class, &s, &[s.size()])?;
    if seed.is_some() {
        c = StructureChain::new(class, c.levels().to_vec(), c.saturation().to_vec(), seed)?;
    }
    Ok(c)
}

fn prefixes(class: ClassName, s: FinStructure, sizes: &[usize], seed: Option<u64>) -> Result<StructureChain> {
    if sizes.is_empty() {
        return single(class, s, seed);
    }
    let c = StructureChain::from_prefixes(class, &s, sizes)?;
    Ok(StructureChain::new(class, c.levels().to_vec(), c.saturation().to_vec(), seed)?)
}

fn edge() -> Result<FinStructure> {
    let spec = FraisseClassSpec::new(ClassName::Graph)?;
    Ok(spec.structure(2, Tables::from([("E".to_string(), vec![vec![0, 1], vec![1, 0]])]))?)
}

fn build(a: &BuildArgs, seed: u64) -> Result<Output> {
    let need_size = || a.size.ok_or_else(|| anyhow!("class {} needs --size", a.class));
    let chain = match a.class {
        ClassName::Graph if !a.paley.is_empty() => {
            let mut graphs = vec![edge()?];
            for &q in &a.paley {
                graphs.push(build_paley(q)?);
            }
            embedded_chain(ClassName::Graph, &graphs)?
        }
        ClassName::PureSet | ClassName::Graph | ClassName::KnFreeGraph(_) | ClassName::Tournament => {
            build_generic(&FraisseClassSpec::new(a.class)?, a.sat, a.cap, seed)?
        }
        ClassName::LinearOrder => prefixes(a.class, build_linear_order(need_size()?)?, &a.levels, None)?,
        ClassName::TwoPredicatePQ => single(a.class, build_two_predicate_pq(a.p, a.q)?, None)?,
        ClassName::BipartiteDeg2 => match a.saturated {
            Some(p) => single(a.class, build_bipartite_saturated(p)?, None)?,
            None => single(a.class, build_bipartite_deg2(need_size()?, seed)?, Some(seed))?,
        },
        ClassName::InvolutionOrder => {
            prefixes(a.class, build_involution_order(need_size()?, seed)?, &a.levels, Some(seed))?
        }
        ClassName::F2VectorSpace(d) => {
            let s = build_f2_vector_space(d)?;
            StructureChain::new(a.class, vec![s], vec![0], None)?
        }
    };
    let value = serde_json::to_value(ChainJson::from_chain(&chain)?)?;
    let sizes: Vec<usize> = chain.levels().iter().map(FinStructure::size).collect();
    let text = format!(
        "class {}\nlevel sizes {:?}\nsaturation {:?}\n",
        chain.class(),
        sizes,
        chain.saturation()
    );
    let mut o = Output::new(value, text, true);
    if a.text {
        o.artifact = Some(to_text(chain.last())?);
    } else {
        o.artifact = Some(chain_to_json(&chain)?);
    }
    Ok(o)
}

fn orbits_cmd(a: &OrbitsArgs) -> Result<Output> {
    let s = load(&a.input)?;
    let part = orbits(&s, a.k, &a.fix)?;
    let mut text = format!("{} orbits on injective {}-tuples fixing {:?}\n", part.len(), a.k, a.fix);
    for b in &part.blocks {
        writeln!(text, "{} tuples: {:?}", b.len(), b).unwrap();
    }
    Ok(Output::new(serde_json::to_value(&part)?, text, true))
}

fn acl(a: &AclArgs) -> Result<Output> {
    let chain = chain_from_json(&read(&a.input)?).context("acl needs a chain JSON input")?;
    let profile = acl_profile(&chain, &a.a, a.b)?;
    let pass = match a.expect {
        None => true,
        Some(e) => {
            let want = match e {
                AclExpect::AlgebraicOverA => AclVerdict::AlgebraicOverA,
                AclExpect::Growing => AclVerdict::Growing,
                AclExpect::Undecided => AclVerdict::Undecided,
            };
            profile.verdict == want
        }
    };
    let verdict = serde_json::to_value(profile.verdict)?;
    let text = format!(
        "verdict {} (heuristic, over {} levels)\norbit sizes {:?}\n",
        verdict.as_str().unwrap_or_default(),
        chain.levels().len(),
        profile.orbit_sizes
    );
    Ok(Output::new(serde_json::to_value(&profile)?, text, pass))
}

fn parse_tau(s: &str) -> Result<TypeCode> {
    Ok(match s {
        "edge" => graph_tau(true),
        "non-edge" | "nonedge" => graph_tau(false),
        hex => TypeCode::from_hex(hex)?,
    })
}

fn tau_path(a: &TauArgs) -> Result<Output> {
    let s = load(&a.input)?;
    let tau = parse_tau(&a.tau)?;
    if let Some(count) = a.count {
        if !a.avoid.is_empty() {
            bail!("--count and --avoid cannot be combined");
        }
        let fam = disjoint_tau_paths(&s, a.a, a.b, &tau, count)?;
        let mut text = format!("{} of {} disjoint paths\n", fam.paths.len(), count);
        for p in &fam.paths {
            writeln!(text, "{:?}", p.nodes).unwrap();
        }
        return Ok(Output::new(serde_json::to_value(&fam)?, text, !fam.shortage));
    }
    let path = find_tau_path(&s, a.a, a.b, &tau, &a.avoid)?;
    let text = match &path {
        Some(p) => format!("path of length {}: {:?}\n", p.len(), p.nodes),
        None => "no path\n".to_string(),
    };
    let pass = path.is_some();
    Ok(Output::new(json!({ "found": pass, "path": path }), text, pass))
}

fn fixed_orders(s: &FinStructure, domain: &[usize]) -> Result<Vec<FixedOrder>> {
    let id = match FixedOrder::of_structure("id", s, "lt") {
        Ok(o) if o.sequence.len() == domain.len() => o,
        _ => FixedOrder::new("id", domain.to_vec())?,
    };
    let rev = id.reversed("rev");
    Ok(vec![id, rev])
}

fn make_law(
    kind: SamplerKind,
    s: &FinStructure,
    sort: Option<u32>,
    atoms: Option<&str>,
    strength: f64,
) -> Result<Box<dyn OrderLaw>> {
    let domain = s.sort_elements(sort);
    Ok(match kind {
        SamplerKind::Uniform => Box::new(UniformLaw::on(s, sort)?),
        SamplerKind::Atoms => {
            let spec: AtomSpec = atoms.ok_or_else(|| anyhow!("the atoms sampler needs --atoms"))?.parse()?;
            let orders = fixed_orders(s, &domain)?;
            Box::new(AtomLaw::new(domain, spec, &orders)?)
        }
        SamplerKind::Pq => Box::new(PqLaw::new(s)?),
        SamplerKind::Bimin => Box::new(BipartiteMinLaw::new(s)?),
        SamplerKind::Involution => Box::new(InvolutionLaw::new(s)?),
        SamplerKind::Dual => Box::new(DualFunctionalLaw::new(s)?),
        SamplerKind::Biased => Box::new(BiasedLaw::new(domain, strength)?),
        SamplerKind::Decoupled => Box::new(DecoupledLaw::new(domain)?),
    })
}

fn law_from(a: &SamplerArgs, s: &FinStructure) -> Result<Box<dyn OrderLaw>> {
    make_law(a.sampler, s, a.sort, a.atoms.as_deref(), a.strength)
}

/// The structure whose types govern the sampler's points.
fn point_structure(kind: SamplerKind, s: &FinStructure) -> Result<FinStructure> {
    Ok(match kind {
        SamplerKind::Bimin => bipartite_m_view(s)?.0,
        SamplerKind::Involution => involution_m_view(s)?.0,
        _ => s.clone(),
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn sample_cmd(a: &SampleArgs, seed: u64) -> Result<Output> {
    let s = load(&a.input)?;
    let law = law_from(&a.sampler, &s)?;
    let points = if a.points.is_empty() {
        law.domain().to_vec()
    } else {
        a.points.clone()
    };
    let samples = sample(law.as_ref(), &points, seed, a.n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sampleIndex".to_string(), "order".to_string()];
    if law.has_eta() {
        header.extend(points.iter().map(|p| format!("eta_{p}")));
    }
    w.write_record(&header)?;
    for (i, smp) in samples.iter().enumerate() {
        let order: Vec<String> = smp.order.iter().map(usize::to_string).collect();
        let mut row = vec![i.to_string(), order.join(" ")];
        if let Some(eta) = &smp.eta {
            row.extend(eta.iter().map(|&x| fmt_f64(x)));
        }
        w.write_record(&row)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    let value = json!({
        "sampler": law.name(),
        "points": points,
        "n": a.n,
        "seed": seed,
        "columns": header,
    });
    let text = format!("{} samples of {:?} from `{}`\n", a.n, points, law.name());
    let mut o = Output::new(value, text, true);
    o.artifact = Some(body);
    Ok(o)
}

fn estimate(a: &EstimateArgs, seed: u64) -> Result<Output> {
    let s = load(&a.input)?;
    let law = law_from(&a.sampler, &s)?;
    let target = if a.target.is_empty() { a.points.clone() } else { a.target.clone() };
    let e = estimate_order_event(law.as_ref(), &a.points, &target, a.n, seed)?;
    let pass = a.expect.is_none_or(|t| e.within_sigma_of(t));
    let mut text = format!(
        "P({}) = {:.6} ± {:.6} (99% CI [{:.6}, {:.6}], n = {})\n",
        target.iter().map(usize::to_string).collect::<Vec<_>>().join(" < "),
        e.value,
        e.stderr,
        e.ci99.0,
        e.ci99.1,
        e.n
    );
    if let Some(t) = a.expect {
        writeln!(text, "expected {t}: {}", if pass { "within 3σ" } else { "outside 3σ" }).unwrap();
    }
    let value = json!({
        "sampler": law.name(),
        "points": a.points,
        "target": target,
        "seed": seed,
        "estimate": e,
        "expected": a.expect,
        "pass": pass,
    });
    Ok(Output::new(value, text, pass))
}

fn test(a: &TestArgs, seed: u64) -> Result<Output> {
    let verdict = match a.suite {
        Suite::ShiftErgodicity => {
            let law: Box<dyn SequenceLaw> = match a.sequence {
                SequenceKind::Iid => Box::new(IidUniform),
                SequenceKind::Mixture => Box::new(BernoulliMixture {
                    probs: a.probs.clone(),
                    weights: a.weights.clone(),
                }),
                SequenceKind::Constant => Box::new(ConstantMixture),
            };
            test_shift_ergodicity(law.as_ref(), a.len, a.block, a.n, seed)?
        }
        suite => {
            let input = a.input.as_ref().ok_or_else(|| anyhow!("this suite needs --in"))?;
            let kind = a.sampler.ok_or_else(|| anyhow!("this suite needs --sampler"))?;
            let s = load_level(input, a.level)?;
            let law = make_law(kind, &s, a.sort, a.atoms.as_deref(), a.strength)?;
            structure_suite(suite, a, kind, &s, law.as_ref(), seed)?
        }
    };
    let pass = verdict.pass == (a.expect == Expect::Pass);
    let mut text = format!(
        "{}: {} (statistic {:.6}, threshold {:.6}, n = {}, seed = {})\n",
        verdict.name,
        if verdict.pass { "pass" } else { "fail" },
        verdict.statistic,
        verdict.threshold,
        verdict.n,
        verdict.seed
    );
    for (k, v) in &verdict.details {
        writeln!(text, "  {k} = {v:.6}").unwrap();
    }
    if a.expect == Expect::Fail {
        writeln!(text, "expected fail: {}", if pass { "ok" } else { "not met" }).unwrap();
    }
    Ok(Output::new(serde_json::to_value(&verdict)?, text, pass))
}

fn structure_suite(
    suite: Suite,
    a: &TestArgs,
    kind: SamplerKind,
    s: &FinStructure,
    law: &dyn OrderLaw,
    seed: u64,
) -> Result<TestVerdict> {
    Ok(match suite {
        Suite::Exchangeability => {
            let pairs = a
                .pairs
                .iter()
                .map(|p| {
                    let (x, y) = p.split_once('/').ok_or_else(|| anyhow!("pair `{p}` is not `a,b/c,d`"))?;
                    Ok((parse_tuple(x)?, parse_tuple(y)?))
                })
                .collect::<Result<Vec<_>>>()?;
            if pairs.is_empty() {
                bail!("exchangeability needs --pairs");
            }
            test_exchangeability(law, &point_structure(kind, s)?, &pairs, a.n, a.alpha, seed)?
        }
        Suite::Independence => {
            let pairs = a
                .pairs
                .iter()
                .map(|p| match parse_tuple(p)?.as_slice() {
                    [x, y] => Ok((*x, *y)),
                    _ => bail!("independence pair `{p}` must have two points"),
                })
                .collect::<Result<Vec<_>>>()?;
            if pairs.is_empty() {
                bail!("independence needs --pairs");
            }
            test_independence(law, &pairs, a.n, a.alpha, seed)?
        }
        Suite::JointIndependence => {
            let tuples = a.tuples.iter().map(|t| parse_tuple(t)).collect::<Result<Vec<_>>>()?;
            if tuples.is_empty() {
                bail!("joint independence needs --tuples");
            }
            test_joint_independence(law, &tuples, a.n, a.alpha, seed)?
        }
        Suite::Monotone => {
            let points = if a.points.is_empty() {
                law.domain().to_vec()
            } else {
                a.points.clone()
            };
            test_monotone_coupling(law, &points, a.n, seed)?
        }
        Suite::ShiftErgodicity => unreachable!("handled without a structure"),
    })
}

fn cro(a: &CroArgs) -> Result<Output> {
    let spec = FraisseClassSpec::new(a.class)?;
    let system = build_cro_system(&spec, a.n)?;
    let report = uniqueness_report(&system);
    let mut pass = report.uniform_feasible;
    let mut value = serde_json::to_value(&report)?;
    let mut text = format!(
        "class {} n = {}: {} variables, {} level-mass and {} restriction equations, rank {}\nuniform feasible {}\nnullspace dimension {}\nDirac solutions {}\n",
        report.class,
        report.n,
        report.variables,
        report.level_mass_equations,
        report.restriction_equations,
        report.rank,
        report.uniform_feasible,
        report.nullspace_dim,
        report.dirac_solutions.len()
    );
    if let Some(m) = a.shrink_from {
        let shrink = projection_shrinkage(&spec, m, a.n)?;
        pass &= shrink.shrinks;
        writeln!(
            text,
            "projection to size {m}: dimension {} vs {}, contained {}, Fourier-Motzkin {:?}",
            shrink.projected_dim, shrink.small_nullspace_dim, shrink.contained, shrink.fourier_motzkin_dim
        )
        .unwrap();
        value["shrinkage"] = serde_json::to_value(&shrink)?;
    }
    Ok(Output::new(value, text, pass))
}
