use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skagree::correlation;
use skagree::dsbe;
use skagree::feasibility::{self, FeasibilityVerdict, SwapInstance, Witness};
use skagree::info;
use skagree::thresholds::{self, Verdict};
use skagree::{build_erasure_source, Channel, Error, JointPmf};

create_exception!(skagree_py, GuardError, PyRuntimeError, "Input exceeds a computational limit.");

fn to_py(e: Error) -> PyErr {
    if e.is_guard() {
        GuardError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn joint(p_xy: Vec<Vec<f64>>) -> PyResult<JointPmf> {
    JointPmf::from_rows(&p_xy).map_err(to_py)
}

fn labels(given: Option<Vec<String>>, n: usize) -> Vec<String> {
    given.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect())
}

/// A joint pmf of `(X, Y)` together with the eavesdropper channel.
#[pyclass(name = "Source", module = "skagree_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySource {
    inner: skagree::Source,
}

#[pymethods]
impl PySource {
    /// Erasure eavesdropper: `Z = (X, Y)` with probability `1 - epsilon`.
    #[staticmethod]
    #[pyo3(signature = (p_xy, epsilon, x_alphabet=None, y_alphabet=None))]
    fn erasure(
        p_xy: Vec<Vec<f64>>,
        epsilon: f64,
        x_alphabet: Option<Vec<String>>,
        y_alphabet: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let nx = p_xy.len();
        let ny = p_xy.first().map_or(0, Vec::len);
        let j = skagree::validate_joint(&p_xy, &labels(x_alphabet, nx), &labels(y_alphabet, ny))
            .map_err(to_py)?;
        Ok(PySource {
            inner: build_erasure_source(j, epsilon).map_err(to_py)?,
        })
    }

    /// General eavesdropper with rows `p(z | x, y)` in x-major order.
    #[staticmethod]
    fn general(p_xy: Vec<Vec<f64>>, p_z_given_xy: Vec<Vec<f64>>) -> PyResult<Self> {
        let j = joint(p_xy)?;
        let ch = Channel::from_rows(&p_z_given_xy).map_err(to_py)?;
        Ok(PySource {
            inner: skagree::Source::general(j, ch).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySource {
            inner: skagree::Source::from_json_str(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json_string().map_err(to_py)
    }

    #[getter]
    fn p_xy(&self) -> Vec<Vec<f64>> {
        self.inner.joint().to_rows()
    }

    /// Erasure probability, or `None` for a general eavesdropper.
    #[getter]
    fn epsilon(&self) -> Option<f64> {
        self.inner.erasure_probability()
    }

    #[getter]
    fn eve_channel(&self) -> Vec<Vec<f64>> {
        self.inner.eve_channel().to_rows()
    }

    fn __repr__(&self) -> String {
        let p = self.inner.joint();
        match self.inner.erasure_probability() {
            Some(e) => format!("Source({}x{}, erasure epsilon={e})", p.nx(), p.ny()),
            None => format!("Source({}x{}, general eve)", p.nx(), p.ny()),
        }
    }
}

#[pyfunction]
fn entropy(p: Vec<f64>) -> PyResult<f64> {
    info::entropy(&p).map_err(to_py)
}

#[pyfunction]
fn mutual_information(p_xy: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(info::mutual_information(&joint(p_xy)?))
}

#[pyfunction]
fn conditional_mutual_information(source: &PySource) -> f64 {
    info::conditional_mutual_information(&source.inner)
}

#[pyfunction]
fn renyi_divergence(p: Vec<f64>, q: Vec<f64>, alpha: f64) -> PyResult<f64> {
    info::renyi_divergence(&p, &q, alpha).map_err(to_py)
}

#[pyfunction]
fn chernoff_information(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    info::chernoff_information(&p, &q).map_err(to_py)
}

#[pyfunction]
fn tv_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    info::tv_distance(&p, &q).map_err(to_py)
}

#[pyfunction]
fn maximal_correlation(p_xy: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(correlation::maximal_correlation(&joint(p_xy)?))
}

/// `(eta, input pmf at the maximum)` for a channel given by its rows.
#[pyfunction]
fn eta(channel: Vec<Vec<f64>>) -> PyResult<(f64, Vec<f64>)> {
    let ch = Channel::from_rows(&channel).map_err(to_py)?;
    let r = correlation::eta(&ch);
    Ok((r.eta, r.input_pmf_at_max))
}

#[pyfunction]
fn j_alpha(p_xy: Vec<Vec<f64>>, alpha: f64) -> PyResult<f64> {
    correlation::j_alpha(&joint(p_xy)?, alpha).map_err(to_py)
}

#[pyfunction]
fn doeblin_coefficient(channel: Vec<Vec<f64>>) -> PyResult<f64> {
    let ch = Channel::from_rows(&channel).map_err(to_py)?;
    Ok(correlation::doeblin_coefficient(&ch))
}

/// `(epsilon1, (xs, ys))` by path enumeration.
#[pyfunction]
fn epsilon1_paths(p_xy: Vec<Vec<f64>>) -> PyResult<(f64, (Vec<usize>, Vec<usize>))> {
    let (v, path) = thresholds::epsilon1_paths(&joint(p_xy)?).map_err(to_py)?;
    Ok((v, (path.xs, path.ys)))
}

#[pyfunction]
fn epsilon1_lp(p_xy: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(thresholds::epsilon1_lp(&joint(p_xy)?))
}

#[pyfunction]
fn epsilon2(p_xy: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(thresholds::epsilon2(&joint(p_xy)?).0)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Zero => "zero",
        Verdict::Positive => "positive",
        Verdict::Indeterminate => "indeterminate",
    }
}

#[pyfunction]
fn threshold_report<'py>(py: Python<'py>, source: &PySource) -> PyResult<Bound<'py, PyDict>> {
    let r = thresholds::threshold_report(&source.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("epsilon1", r.epsilon1)?;
    d.set_item("epsilon2", r.epsilon2)?;
    d.set_item("epsilon3_lb", r.epsilon3_lb)?;
    d.set_item("oneway_threshold", r.oneway_threshold)?;
    d.set_item("lbar_threshold", r.lbar_threshold)?;
    d.set_item("verdict", verdict_name(r.verdict))?;
    d.set_item("witness_path", r.witness_path.map(|p| (p.xs, p.ys)))?;
    d.set_item("witness_pair", r.witness_pair.map(|w| (w[0], w[1], w[2], w[3])))?;
    Ok(d)
}

fn verdict_dict<'py>(py: Python<'py>, v: &FeasibilityVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("positive", v.positive)?;
    match &v.witness {
        Some(Witness::Symbols { x1, x2, y1, y2 }) => d.set_item("witness", (*x1, *x2, *y1, *y2))?,
        Some(Witness::Sets { n }) => d.set_item("witness", *n)?,
        None => d.set_item("witness", py.None())?,
    }
    d.set_item("lhs_chernoff", v.lhs_chernoff)?;
    d.set_item("rhs_half_log_ratio", v.rhs_half_log_ratio)?;
    Ok(d)
}

#[pyfunction]
fn corollary1_test<'py>(py: Python<'py>, source: &PySource) -> PyResult<Bound<'py, PyDict>> {
    verdict_dict(py, &feasibility::corollary1_test(&source.inner))
}

fn swap(source: &PySource, pair: (usize, usize, usize, usize), n: usize) -> PyResult<SwapInstance> {
    let (x1, y1, x2, y2) = pair;
    SwapInstance::new(source.inner.clone(), x1, y1, x2, y2, n).map_err(to_py)
}

/// `pair` is `(x1, y1, x2, y2)`.
#[pyfunction]
fn tilde_p(source: &PySource, pair: (usize, usize, usize, usize), n: usize) -> PyResult<f64> {
    Ok(feasibility::tilde_p(&swap(source, pair, n)?))
}

#[pyfunction]
fn swap_advantage_lb(source: &PySource, pair: (usize, usize, usize, usize), n: usize) -> PyResult<f64> {
    feasibility::swap_advantage_lb(&swap(source, pair, n)?).map_err(to_py)
}

#[pyfunction]
fn monte_carlo_protocol<'py>(
    py: Python<'py>,
    source: &PySource,
    pair: (usize, usize, usize, usize),
    n: usize,
    blocks: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = swap(source, pair, n)?;
    let s = py
        .detach(|| feasibility::monte_carlo_protocol(&inst, blocks, seed))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("blocks", s.blocks)?;
    d.set_item("accepted", s.accepted)?;
    d.set_item("agreed", s.agreed)?;
    d.set_item("eve_errors", s.eve_errors)?;
    d.set_item("acceptance_rate", s.acceptance_rate)?;
    d.set_item("empirical_tilde_p", s.empirical_tilde_p)?;
    d.set_item("empirical_eve_error", s.empirical_eve_error)?;
    Ok(d)
}

#[pyfunction]
fn dsbe_thresholds(p: f64) -> PyResult<(f64, f64)> {
    let t = dsbe::dsbe_thresholds(p).map_err(to_py)?;
    Ok((t.eps2, t.oneway))
}

#[pyfunction]
fn b0_sub(p: f64, epsilon: f64) -> PyResult<f64> {
    dsbe::b0_sub(p, epsilon).map_err(to_py)
}

#[pyfunction]
fn s_ow_lower_bound(p: f64, epsilon: f64) -> PyResult<f64> {
    dsbe::s_ow_lower_bound(p, epsilon).map_err(to_py)
}

#[pyfunction]
fn repetition_rate(p: f64, epsilon: f64, n: usize) -> PyResult<f64> {
    dsbe::repetition_rate(p, epsilon, n).map_err(to_py)
}

#[pymodule]
fn skagree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySource>()?;
    m.add("GuardError", m.py().get_type::<GuardError>())?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_information, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(j_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(doeblin_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon1_paths, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon1_lp, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon2, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_report, m)?)?;
    m.add_function(wrap_pyfunction!(corollary1_test, m)?)?;
    m.add_function(wrap_pyfunction!(tilde_p, m)?)?;
    m.add_function(wrap_pyfunction!(swap_advantage_lb, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(dsbe_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(b0_sub, m)?)?;
    m.add_function(wrap_pyfunction!(s_ow_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(repetition_rate, m)?)?;
    Ok(())
}
