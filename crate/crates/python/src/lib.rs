//! Python bindings: structures, chains, samplers, statistical suites and
//! CRO reports. Structured results come back as plain dicts and lists.

use homord::builder::{build_generic, build_paley, embedded_chain, ClassName, FraisseClassSpec, StructureChain};
use homord::cro::{build_cro_system, projection_shrinkage, uniqueness_report};
use homord::format::{chain_from_json, chain_to_json, from_text, structure_from_json, structure_to_json, to_text};
use homord::group::{acl_profile, automorphisms, invariant_equivalences, orbits};
use homord::sampler::{
    sample as draw, AtomLaw, AtomSpec, BipartiteMinLaw, DualFunctionalLaw, FixedOrder, InvolutionLaw, OrderLaw,
    PqLaw, SamplerKind, UniformLaw,
};
use homord::stats::{estimate_order_event, test_shift_ergodicity, BernoulliMixture, ConstantMixture, IidUniform};
use homord::structure::{FinStructure, Tables};
use homord::tau_path::{find_tau_path, graph_tau};
use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite relational structure.
#[pyclass(name = "Structure", module = "homord_py", frozen)]
struct PyStructure(FinStructure);

#[pymethods]
impl PyStructure {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        from_text(text).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        structure_from_json(text).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn paley(q: usize) -> PyResult<Self> {
        build_paley(q).map(PyStructure).map_err(err)
    }

    fn to_text(&self) -> PyResult<String> {
        to_text(&self.0).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        structure_to_json(&self.0).map_err(err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn relations(&self) -> Vec<(String, usize)> {
        self.0
            .signature()
            .relations()
            .iter()
            .map(|r| (r.name.clone(), r.arity))
            .collect()
    }

    fn holds(&self, relation: &str, tuple: Vec<usize>) -> PyResult<bool> {
        let r = self.0.relation_index(relation).map_err(err)?;
        Ok(self.0.holds(r, &tuple))
    }

    /// Hex code of the quantifier-free type of `points`.
    fn canonical_type(&self, points: Vec<usize>) -> PyResult<String> {
        self.0.canonical_type(&points).map(|c| c.to_hex()).map_err(err)
    }

    fn automorphism_order(&self) -> BigUint {
        automorphisms(&self.0, 0).order().clone()
    }

    #[pyo3(signature = (k, fix = Vec::new()))]
    fn orbits(&self, k: usize, fix: Vec<usize>) -> PyResult<Vec<Vec<Vec<usize>>>> {
        orbits(&self.0, k, &fix).map(|p| p.blocks).map_err(err)
    }

    #[pyo3(signature = (sort = None))]
    fn invariant_equivalences(&self, sort: Option<u32>) -> PyResult<Vec<Vec<Vec<usize>>>> {
        invariant_equivalences(&self.0, sort).map_err(err)
    }

    /// Alternating path between `a` and `b` through edges (`edge = True`) or
    /// non-edges, with interior outside `avoid`.
    #[pyo3(signature = (a, b, edge, avoid = Vec::new()))]
    fn tau_path(&self, a: usize, b: usize, edge: bool, avoid: Vec<usize>) -> PyResult<Option<Vec<usize>>> {
        find_tau_path(&self.0, a, b, &graph_tau(edge), &avoid)
            .map(|p| p.map(|p| p.nodes))
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Structure(size={}, relations={:?})", self.0.size(), self.relations())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// A chain of structures, each the prefix of the next.
#[pyclass(name = "Chain", module = "homord_py", frozen)]
struct PyChain(StructureChain);

#[pymethods]
impl PyChain {
    /// Witness-completion chain saturated at depth `sat`.
    #[staticmethod]
    #[pyo3(signature = (class_name, sat = 2, cap = 64, seed = 0))]
    fn build(class_name: &str, sat: usize, cap: usize, seed: u64) -> PyResult<Self> {
        let spec = FraisseClassSpec::parse(class_name).map_err(err)?;
        build_generic(&spec, sat, cap, seed).map(PyChain).map_err(err)
    }

    /// The chain `K2 ⊂ P(q1) ⊂ P(q2) ⊂ …` of Paley graphs.
    #[staticmethod]
    fn paley(orders: Vec<usize>) -> PyResult<Self> {
        let spec = FraisseClassSpec::new(ClassName::Graph).map_err(err)?;
        let k2 = spec
            .structure(2, Tables::from([("E".to_string(), vec![vec![0, 1], vec![1, 0]])]))
            .map_err(err)?;
        let mut graphs = vec![k2];
        for q in orders {
            graphs.push(build_paley(q).map_err(err)?);
        }
        embedded_chain(ClassName::Graph, &graphs).map(PyChain).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        chain_from_json(text).map(PyChain).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        chain_to_json(&self.0).map_err(err)
    }

    #[getter]
    fn levels(&self) -> Vec<PyStructure> {
        self.0.levels().iter().cloned().map(PyStructure).collect()
    }

    #[getter]
    fn saturation(&self) -> Vec<usize> {
        self.0.saturation().to_vec()
    }

    fn last(&self) -> PyStructure {
        PyStructure(self.0.last().clone())
    }

    /// `(verdict, orbit sizes)` for `b` over the stabilizer of `a_set`.
    fn acl(&self, a_set: Vec<usize>, b: usize) -> PyResult<(String, Vec<usize>)> {
        let p = acl_profile(&self.0, &a_set, b).map_err(err)?;
        let verdict = serde_json::to_value(p.verdict).map_err(err)?;
        Ok((verdict.as_str().unwrap_or_default().to_string(), p.orbit_sizes))
    }

    fn __len__(&self) -> usize {
        self.0.levels().len()
    }
}

fn make_law(s: &FinStructure, sampler: &str, atoms: Option<&str>) -> PyResult<Box<dyn OrderLaw>> {
    let kind: SamplerKind = sampler.parse().map_err(err)?;
    let domain: Vec<usize> = (0..s.size()).collect();
    Ok(match kind {
        SamplerKind::Uniform => Box::new(UniformLaw::on(s, None).map_err(err)?),
        SamplerKind::Atoms => {
            let spec: AtomSpec = atoms
                .ok_or_else(|| PyValueError::new_err("the atoms sampler needs atoms"))?
                .parse()
                .map_err(err)?;
            let id = FixedOrder::new("id", domain.clone()).map_err(err)?;
            let rev = id.reversed("rev");
            Box::new(AtomLaw::new(domain, spec, &[id, rev]).map_err(err)?)
        }
        SamplerKind::Pq => Box::new(PqLaw::new(s).map_err(err)?),
        SamplerKind::Bimin => Box::new(BipartiteMinLaw::new(s).map_err(err)?),
        SamplerKind::Involution => Box::new(InvolutionLaw::new(s).map_err(err)?),
        SamplerKind::Dual => Box::new(DualFunctionalLaw::new(s).map_err(err)?),
        other => return Err(PyValueError::new_err(format!("sampler `{other}` is not exposed"))),
    })
}

/// `n` samples of the order on `points`, as `(order, eta)` pairs.
#[pyfunction]
#[pyo3(signature = (structure, sampler, points, n, seed = 0, atoms = None))]
fn sample(
    structure: &PyStructure,
    sampler: &str,
    points: Vec<usize>,
    n: u64,
    seed: u64,
    atoms: Option<&str>,
) -> PyResult<Vec<(Vec<usize>, Option<Vec<f64>>)>> {
    let law = make_law(&structure.0, sampler, atoms)?;
    let samples = draw(law.as_ref(), &points, seed, n).map_err(err)?;
    Ok(samples.into_iter().map(|s| (s.order, s.eta)).collect())
}

/// Frequency of the order `target` (least to greatest) on `points`.
#[pyfunction]
#[pyo3(signature = (structure, sampler, points, target, n, seed = 0, atoms = None))]
fn estimate<'py>(
    py: Python<'py>,
    structure: &PyStructure,
    sampler: &str,
    points: Vec<usize>,
    target: Vec<usize>,
    n: u64,
    seed: u64,
    atoms: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let law = make_law(&structure.0, sampler, atoms)?;
    let e = estimate_order_event(law.as_ref(), &points, &target, n, seed).map_err(err)?;
    json_to_py(py, &e)
}

/// Shift-ergodicity verdict for `iid`, `mixture` (Bernoulli ¼/¾) or
/// `constant` sequences.
#[pyfunction]
#[pyo3(signature = (sequence, length = 256, block = 16, n = 10_000, seed = 0))]
fn shift_ergodicity<'py>(
    py: Python<'py>,
    sequence: &str,
    length: usize,
    block: usize,
    n: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let v = match sequence {
        "iid" => test_shift_ergodicity(&IidUniform, length, block, n, seed),
        "mixture" => test_shift_ergodicity(
            &BernoulliMixture {
                probs: vec![0.25, 0.75],
                weights: vec![0.5, 0.5],
            },
            length,
            block,
            n,
            seed,
        ),
        "constant" => test_shift_ergodicity(&ConstantMixture, length, block, n, seed),
        other => return Err(PyValueError::new_err(format!("unknown sequence law `{other}`"))),
    }
    .map_err(err)?;
    json_to_py(py, &v)
}

/// Uniqueness report of the CRO system of `class_name` truncated at `n`.
#[pyfunction]
fn cro_report<'py>(py: Python<'py>, class_name: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let spec = FraisseClassSpec::parse(class_name).map_err(err)?;
    let system = build_cro_system(&spec, n).map_err(err)?;
    json_to_py(py, &uniqueness_report(&system))
}

/// Projection of the size-`large_n` kernel onto the size-`small_n` variables.
#[pyfunction]
fn cro_shrinkage<'py>(py: Python<'py>, class_name: &str, small_n: usize, large_n: usize) -> PyResult<Bound<'py, PyAny>> {
    let spec = FraisseClassSpec::parse(class_name).map_err(err)?;
    json_to_py(py, &projection_shrinkage(&spec, small_n, large_n).map_err(err)?)
}

#[pymodule]
fn homord_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PyChain>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(shift_ergodicity, m)?)?;
    m.add_function(wrap_pyfunction!(cro_report, m)?)?;
    m.add_function(wrap_pyfunction!(cro_shrinkage, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
