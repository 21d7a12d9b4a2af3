//! Python bindings. Matrices and vectors are nested lists of int, float,
//! `"p/q"` strings or complex numbers; results come back as plain dicts and
//! lists.

use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyComplex, PyList, PyTuple};
use serde_json::{json, Value};

use parapres_core::harness::{self, CandidateFamily, MinerConfig, VerifyConfig};
use parapres_core::io::{self, Header};
use parapres_core::preserver::{self, ClassifyBudget};
use parapres_core::{
    with_scalar, Complex64, Error, Field, Magnitude, Mode, OperatorMatrix, PNorm, PreserverMap as CoreMap, Rational,
    Scalar, ScalarConfig,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_instance_of::<PyBool>() {
        return Err(PyTypeError::new_err("booleans are not scalars"));
    }
    if let Ok(c) = obj.cast::<PyComplex>() {
        return Ok(json!([c.real(), c.imag()]));
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(json!(i));
    }
    if let Ok(f) = obj.extract::<f64>() {
        return Ok(json!(f));
    }
    if let Ok(s) = obj.extract::<String>() {
        return Ok(Value::String(s));
    }
    if obj.is_instance_of::<PyList>() || obj.is_instance_of::<PyTuple>() {
        let items: Vec<Bound<'_, PyAny>> = obj.extract()?;
        return items.iter().map(to_json).collect::<PyResult<Vec<_>>>().map(Value::Array);
    }
    Err(PyTypeError::new_err(format!("unsupported value {obj}")))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn parse_p(p: &Bound<'_, PyAny>) -> PyResult<PNorm> {
    if let Ok(i) = p.extract::<i64>() {
        return if i == 1 { Ok(PNorm::One) } else { Err(PyValueError::new_err("p must be 1 or 'inf'")) };
    }
    if let Ok(f) = p.extract::<f64>() {
        if f.is_infinite() && f > 0.0 {
            return Ok(PNorm::Inf);
        }
    }
    let s: String = p.extract()?;
    s.parse().map_err(err)
}

/// Resolves field/mode: explicit arguments, else complex iff any entry is a
/// Python complex number, else real exact.
fn config(field: Option<&str>, mode: Option<&str>, complex_seen: bool, norm_tol: Option<f64>, phase_tol: Option<f64>) -> PyResult<ScalarConfig> {
    let field: Option<Field> = field.map(str::parse).transpose().map_err(err)?;
    let mode: Option<Mode> = mode.map(str::parse).transpose().map_err(err)?;
    let field = field.or(complex_seen.then_some(Field::Complex));
    Header { field, mode, p: None }.config(norm_tol, phase_tol).map_err(err)
}

fn contains_py_complex(obj: &Bound<'_, PyAny>) -> bool {
    if obj.cast::<PyComplex>().is_ok() {
        return true;
    }
    if obj.is_instance_of::<PyList>() || obj.is_instance_of::<PyTuple>() {
        if let Ok(items) = obj.extract::<Vec<Bound<'_, PyAny>>>() {
            return items.iter().any(contains_py_complex);
        }
    }
    false
}

#[derive(Clone)]
enum AnyOp {
    Exact(OperatorMatrix<Rational>),
    Float(OperatorMatrix<f64>),
    Complex(OperatorMatrix<Complex64>),
}

macro_rules! each_op {
    ($v:expr, $a:ident => $body:expr) => {
        match $v {
            AnyOp::Exact($a) => $body,
            AnyOp::Float($a) => $body,
            AnyOp::Complex($a) => $body,
        }
    };
}

macro_rules! both_ops {
    ($x:expr, $y:expr, ($a:ident, $b:ident) => $body:expr) => {
        match ($x, $y) {
            (AnyOp::Exact($a), AnyOp::Exact($b)) => $body,
            (AnyOp::Float($a), AnyOp::Float($b)) => $body,
            (AnyOp::Complex($a), AnyOp::Complex($b)) => $body,
            _ => return Err(PyValueError::new_err("operators use different scalar configurations")),
        }
    };
}

trait Wrap: Scalar {
    fn wrap(a: OperatorMatrix<Self>) -> AnyOp;
    fn wrap_map(t: CoreMap<Self>) -> AnyMap;
}

impl Wrap for Rational {
    fn wrap(a: OperatorMatrix<Self>) -> AnyOp {
        AnyOp::Exact(a)
    }
    fn wrap_map(t: CoreMap<Self>) -> AnyMap {
        AnyMap::Exact(t)
    }
}
impl Wrap for f64 {
    fn wrap(a: OperatorMatrix<Self>) -> AnyOp {
        AnyOp::Float(a)
    }
    fn wrap_map(t: CoreMap<Self>) -> AnyMap {
        AnyMap::Float(t)
    }
}
impl Wrap for Complex64 {
    fn wrap(a: OperatorMatrix<Self>) -> AnyOp {
        AnyOp::Complex(a)
    }
    fn wrap_map(t: CoreMap<Self>) -> AnyMap {
        AnyMap::Complex(t)
    }
}

/// An m x n operator on l1 (p = 1) or l-infinity (p = "inf").
#[pyclass(name = "Operator", module = "parapres", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOperator {
    inner: AnyOp,
}

fn build_operator(data: &Bound<'_, PyAny>, p: PNorm, cfg: ScalarConfig) -> PyResult<AnyOp> {
    let doc = json!({ "data": to_json(data)? });
    with_scalar!(cfg, S => Ok(S::wrap(io::operator_from_json::<S>(&doc, p, cfg).map_err(err)?)))
}

fn operator_arg(obj: &Bound<'_, PyAny>, p: PNorm, cfg: ScalarConfig) -> PyResult<AnyOp> {
    if let Ok(op) = obj.cast::<PyOperator>() {
        return Ok(op.get().inner.clone());
    }
    build_operator(obj, p, cfg)
}

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (data, p = None, field = None, mode = None, norm_tol = None, phase_tol = None))]
    fn new(
        data: &Bound<'_, PyAny>,
        p: Option<&Bound<'_, PyAny>>,
        field: Option<&str>,
        mode: Option<&str>,
        norm_tol: Option<f64>,
        phase_tol: Option<f64>,
    ) -> PyResult<Self> {
        let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
        let cfg = config(field, mode, contains_py_complex(data), norm_tol, phase_tol)?;
        Ok(PyOperator { inner: build_operator(data, p, cfg)? })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        each_op!(&self.inner, a => (a.rows(), a.cols()))
    }

    #[getter]
    fn p(&self) -> String {
        each_op!(&self.inner, a => a.p().to_string())
    }

    fn norm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &each_op!(&self.inner, a => a.norm().mag_json()))
    }

    fn to_list<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &each_op!(&self.inner, a => a.to_json()["data"].clone()))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &each_op!(&self.inner, a => a.to_json()))
    }

    fn conj_transpose(&self) -> Self {
        PyOperator { inner: each_op!(&self.inner, a => Wrap::wrap(a.conj_transpose())) }
    }

    /// Parallel verdict with witness and the full feasible phase set.
    fn parallel<'py>(&self, py: Python<'py>, other: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
        let v = both_ops!(&self.inner, &other.inner, (a, b) => {
            let mut r = a.parallel(b).map_err(err)?.to_json();
            r["feasible"] = a.feasible_phases(b).map_err(err)?.to_json();
            r
        });
        to_py(py, &v)
    }

    fn tea<'py>(&self, py: Python<'py>, other: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
        let v = both_ops!(&self.inner, &other.inner, (a, b) => a.tea(b).map_err(err)?.to_json());
        to_py(py, &v)
    }

    fn is_parallel(&self, other: &PyOperator) -> PyResult<bool> {
        Ok(both_ops!(&self.inner, &other.inner, (a, b) => a.is_parallel(b).map_err(err)?))
    }

    fn is_tea(&self, other: &PyOperator) -> PyResult<bool> {
        Ok(both_ops!(&self.inner, &other.inner, (a, b) => a.is_tea(b).map_err(err)?))
    }

    fn is_extreme_contraction(&self) -> bool {
        each_op!(&self.inner, a => a.is_extreme_contraction())
    }

    fn is_smooth(&self) -> PyResult<bool> {
        each_op!(&self.inner, a => a.is_smooth().map_err(err))
    }

    fn __repr__(&self) -> String {
        each_op!(&self.inner, a => format!("Operator({})", a.to_json()))
    }
}

#[derive(Clone)]
enum AnyMap {
    Exact(CoreMap<Rational>),
    Float(CoreMap<f64>),
    Complex(CoreMap<Complex64>),
}

macro_rules! each_map {
    ($v:expr, $t:ident => $body:expr) => {
        match $v {
            AnyMap::Exact($t) => $body,
            AnyMap::Float($t) => $body,
            AnyMap::Complex($t) => $body,
        }
    };
}

/// A linear map on m x n operators, given by its (mn) x (mn) matrix on
/// column-major vectorizations.
#[pyclass(name = "PreserverMap", module = "parapres", frozen)]
struct PyMap {
    inner: AnyMap,
}

#[pymethods]
impl PyMap {
    #[new]
    #[pyo3(signature = (matrix, m, n, p = None, field = None, mode = None, norm_tol = None, phase_tol = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        matrix: &Bound<'_, PyAny>,
        m: usize,
        n: usize,
        p: Option<&Bound<'_, PyAny>>,
        field: Option<&str>,
        mode: Option<&str>,
        norm_tol: Option<f64>,
        phase_tol: Option<f64>,
    ) -> PyResult<Self> {
        let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
        let cfg = config(field, mode, contains_py_complex(matrix), norm_tol, phase_tol)?;
        let doc = json!({"m": m, "n": n, "matrix": to_json(matrix)?});
        let inner = with_scalar!(cfg, S => S::wrap_map(io::map_from_json::<S>(&doc, p, cfg).map_err(err)?));
        Ok(PyMap { inner })
    }

    /// `A -> scale * U A V` for unimodular permutation matrices `U`, `V`.
    #[staticmethod]
    #[pyo3(signature = (u, v, scale = None, p = None, field = None, mode = None))]
    fn make_isometry(
        u: &Bound<'_, PyAny>,
        v: &Bound<'_, PyAny>,
        scale: Option<&Bound<'_, PyAny>>,
        p: Option<&Bound<'_, PyAny>>,
        field: Option<&str>,
        mode: Option<&str>,
    ) -> PyResult<Self> {
        let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
        let complex = contains_py_complex(u) || contains_py_complex(v) || scale.is_some_and(contains_py_complex);
        let cfg = config(field, mode, complex, None, None)?;
        let scale_json = match scale {
            Some(s) => to_json(s)?,
            None => json!(1),
        };
        let inner = with_scalar!(cfg, S => {
            let u = io::operator_from_json::<S>(&json!({"data": to_json(u)?}), p, cfg).map_err(err)?;
            let v = io::operator_from_json::<S>(&json!({"data": to_json(v)?}), p, cfg).map_err(err)?;
            let c = S::from_json(&scale_json).map_err(err)?;
            S::wrap_map(preserver::make_isometry(&u, &v, c).map_err(err)?)
        });
        Ok(PyMap { inner })
    }

    fn apply(&self, a: &PyOperator) -> PyResult<PyOperator> {
        let out = match (&self.inner, &a.inner) {
            (AnyMap::Exact(t), AnyOp::Exact(x)) => AnyOp::Exact(t.apply(x).map_err(err)?),
            (AnyMap::Float(t), AnyOp::Float(x)) => AnyOp::Float(t.apply(x).map_err(err)?),
            (AnyMap::Complex(t), AnyOp::Complex(x)) => AnyOp::Complex(t.apply(x).map_err(err)?),
            _ => return Err(PyValueError::new_err("map and operator use different scalar configurations")),
        };
        Ok(PyOperator { inner: out })
    }

    fn rank(&self) -> usize {
        each_map!(&self.inner, t => t.rank())
    }

    fn is_invertible(&self) -> bool {
        each_map!(&self.inner, t => t.is_invertible())
    }

    fn dual(&self) -> PyResult<Self> {
        Ok(PyMap { inner: each_map!(&self.inner, t => Wrap::wrap_map(t.dual().map_err(err)?)) })
    }

    #[pyo3(signature = (trials = 1_000, seed = harness::DEFAULT_SEED))]
    fn preserves_parallel<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = each_map!(&self.inner, t => preserver::preserves_parallel(t, trials, seed).map_err(err)?.to_json());
        to_py(py, &v)
    }

    #[pyo3(signature = (trials = 1_000, seed = harness::DEFAULT_SEED))]
    fn preserves_tea<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = each_map!(&self.inner, t => preserver::preserves_tea(t, trials, seed).map_err(err)?.to_json());
        to_py(py, &v)
    }

    #[pyo3(signature = (samples = 1_000, seed = harness::DEFAULT_SEED))]
    fn is_scalar_isometry<'py>(&self, py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = each_map!(&self.inner, t => preserver::is_scalar_isometry(t, samples, seed).map_err(err)?.to_json());
        to_py(py, &v)
    }

    #[pyo3(signature = (trials = harness::DEFAULT_TRIALS, isometry_samples = 1_000, seed = harness::DEFAULT_SEED))]
    fn classify<'py>(&self, py: Python<'py>, trials: usize, isometry_samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let b = ClassifyBudget { trials, isometry_samples };
        let v = py.detach(|| each_map!(&self.inner, t => preserver::classify(t, b, seed).map(|r| r.to_json())));
        to_py(py, &v.map_err(err)?)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &each_map!(&self.inner, t => t.to_json()))
    }

    fn __repr__(&self) -> String {
        each_map!(&self.inner, t => format!("PreserverMap(m={}, n={}, p={}, rank={})", t.rows(), t.cols(), t.p(), t.rank()))
    }
}

fn is_nested(obj: &Bound<'_, PyAny>) -> bool {
    obj.extract::<Vec<Bound<'_, PyAny>>>()
        .ok()
        .and_then(|v| v.first().map(|x| x.is_instance_of::<PyList>() || x.is_instance_of::<PyTuple>()))
        .unwrap_or(false)
}

/// Norm of a vector (flat list) or operator (list of rows).
#[pyfunction]
#[pyo3(signature = (x, p = None, field = None, mode = None))]
fn norm<'py>(py: Python<'py>, x: &Bound<'py, PyAny>, p: Option<&Bound<'py, PyAny>>, field: Option<&str>, mode: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, contains_py_complex(x), None, None)?;
    let data = to_json(x)?;
    let v = if is_nested(x) {
        with_scalar!(cfg, S => io::operator_from_json::<S>(&json!({"data": data}), p, cfg).map_err(err)?.norm().mag_json())
    } else {
        with_scalar!(cfg, S => io::vector_from_json::<S>(&data, cfg).map_err(err)?.norm(p).mag_json())
    };
    to_py(py, &v)
}

/// The unimodular phases lambda with ||x + lambda y|| = ||x|| + ||y|| for vectors.
#[pyfunction]
#[pyo3(signature = (x, y, p = None, field = None, mode = None, norm_tol = None, phase_tol = None))]
#[allow(clippy::too_many_arguments)]
fn feasible_phases<'py>(
    py: Python<'py>,
    x: &Bound<'py, PyAny>,
    y: &Bound<'py, PyAny>,
    p: Option<&Bound<'py, PyAny>>,
    field: Option<&str>,
    mode: Option<&str>,
    norm_tol: Option<f64>,
    phase_tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, contains_py_complex(x) || contains_py_complex(y), norm_tol, phase_tol)?;
    let (dx, dy) = (to_json(x)?, to_json(y)?);
    let v = with_scalar!(cfg, S => {
        let a = io::vector_from_json::<S>(&dx, cfg).map_err(err)?;
        let b = io::vector_from_json::<S>(&dy, cfg).map_err(err)?;
        let phases = a.feasible_phases(&b, p).map_err(err)?;
        json!({
            "phases": phases.to_json(),
            "parallel": !phases.is_empty(),
            "tea": phases.contains_one(&cfg),
            "representative": phases.representative().map(|r: S| r.phase_json()),
        })
    });
    to_py(py, &v)
}

/// Extreme point of the unit ball: vectors (flat list) or operators (rows).
#[pyfunction]
#[pyo3(signature = (x, p = None, field = None, mode = None))]
fn is_extreme(x: &Bound<'_, PyAny>, p: Option<&Bound<'_, PyAny>>, field: Option<&str>, mode: Option<&str>) -> PyResult<bool> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, contains_py_complex(x), None, None)?;
    let data = to_json(x)?;
    if is_nested(x) {
        Ok(with_scalar!(cfg, S => io::operator_from_json::<S>(&json!({"data": data}), p, cfg).map_err(err)?.is_extreme_contraction()))
    } else {
        Ok(with_scalar!(cfg, S => io::vector_from_json::<S>(&data, cfg).map_err(err)?.is_extreme(p)))
    }
}

#[pyfunction]
#[pyo3(signature = (x, p = None, field = None, mode = None))]
fn is_smooth(x: &Bound<'_, PyAny>, p: Option<&Bound<'_, PyAny>>, field: Option<&str>, mode: Option<&str>) -> PyResult<bool> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, contains_py_complex(x), None, None)?;
    let data = to_json(x)?;
    if is_nested(x) {
        with_scalar!(cfg, S => io::operator_from_json::<S>(&json!({"data": data}), p, cfg).map_err(err)?.is_smooth().map_err(err))
    } else {
        with_scalar!(cfg, S => io::vector_from_json::<S>(&data, cfg).map_err(err)?.is_smooth(p).map_err(err))
    }
}

/// All real extreme contractions of m x n operators, as lists of rows.
#[pyfunction]
#[pyo3(signature = (m, n, p = None, budget = parapres_core::operator::DEFAULT_ENUMERATION_BUDGET))]
fn enumerate_extreme_contractions<'py>(py: Python<'py>, m: usize, n: usize, p: Option<&Bound<'py, PyAny>>, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let list = parapres_core::operator::enumerate_extreme_contractions::<Rational>(m, n, p, ScalarConfig::exact(), budget).map_err(err)?;
    to_py(py, &Value::Array(list.iter().map(|s| s.to_json()["data"].clone()).collect()))
}

/// A non-parallel pair in span{A, B}, or None when the budget runs out.
#[pyfunction]
#[pyo3(signature = (a, b, budget = harness::DEFAULT_SPAN_BUDGET, seed = harness::DEFAULT_SEED, p = None, field = None, mode = None))]
#[allow(clippy::too_many_arguments)]
fn find_nonparallel_in_span(
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    budget: usize,
    seed: u64,
    p: Option<&Bound<'_, PyAny>>,
    field: Option<&str>,
    mode: Option<&str>,
) -> PyResult<Option<(PyOperator, PyOperator)>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, contains_py_complex(a) || contains_py_complex(b), None, None)?;
    let (x, y) = (operator_arg(a, p, cfg)?, operator_arg(b, p, cfg)?);
    let found = both_ops!(&x, &y, (u, v) => harness::find_nonparallel_in_span(u, v, budget, seed)
        .map_err(err)?
        .map(|(c, d)| (PyOperator { inner: Wrap::wrap(c) }, PyOperator { inner: Wrap::wrap(d) })));
    Ok(found)
}

#[pyfunction]
#[pyo3(signature = (trials = 1_000, seed = harness::DEFAULT_SEED))]
fn paper_example(py: Python<'_>, trials: usize, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let ex = py.detach(|| harness::paper_example_rank1(trials, seed)).map_err(err)?;
    to_py(py, &ex.to_json())
}

/// Classify random candidate maps; returns the miner report.
#[pyfunction]
#[pyo3(signature = (m = 2, n = 2, family = "random-dense", candidates = 100, epsilon = 0.0, trials = harness::DEFAULT_TRIALS, isometry_samples = 1_000, p = None, field = None, mode = None, seed = harness::DEFAULT_SEED))]
#[allow(clippy::too_many_arguments)]
fn mine<'py>(
    py: Python<'py>,
    m: usize,
    n: usize,
    family: &str,
    candidates: usize,
    epsilon: f64,
    trials: usize,
    isometry_samples: usize,
    p: Option<&Bound<'py, PyAny>>,
    field: Option<&str>,
    mode: Option<&str>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, false, None, None)?;
    let family = match family.parse::<CandidateFamily>().map_err(err)? {
        CandidateFamily::IsometryPerturbation(_) => CandidateFamily::IsometryPerturbation(epsilon),
        other => other,
    };
    let mc = MinerConfig { m, n, p, scalar: cfg, candidates, family, budget: ClassifyBudget { trials, isometry_samples }, seed };
    let v = py.detach(|| with_scalar!(cfg, S => harness::mine::<S>(&mc).map(|r| r.to_json())));
    to_py(py, &v.map_err(err)?)
}

/// Runs the ten-item verification battery; `items` restricts it.
#[pyfunction]
#[pyo3(signature = (m = 2, n = 2, p = None, field = None, mode = None, seed = harness::DEFAULT_SEED, items = None))]
#[allow(clippy::too_many_arguments)]
fn verify_theorem<'py>(
    py: Python<'py>,
    m: usize,
    n: usize,
    p: Option<&Bound<'py, PyAny>>,
    field: Option<&str>,
    mode: Option<&str>,
    seed: u64,
    items: Option<Vec<usize>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = p.map(parse_p).transpose()?.unwrap_or(PNorm::One);
    let cfg = config(field, mode, false, None, None)?;
    let mut vc = VerifyConfig::new(m, n, p, cfg, seed);
    vc.items = items;
    let report = py.detach(|| harness::verify_theorem(&vc)).map_err(err)?;
    to_py(py, &report.to_json())
}

#[pymodule]
pub fn parapres(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_SEED", harness::DEFAULT_SEED)?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(feasible_phases, m)?)?;
    m.add_function(wrap_pyfunction!(is_extreme, m)?)?;
    m.add_function(wrap_pyfunction!(is_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_extreme_contractions, m)?)?;
    m.add_function(wrap_pyfunction!(find_nonparallel_in_span, m)?)?;
    m.add_function(wrap_pyfunction!(paper_example, m)?)?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    Ok(())
}
