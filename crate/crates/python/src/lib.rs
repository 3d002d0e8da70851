//! Python bindings for `momentray-core`.
//!
//! Sets are `BoxSet` objects; structured results come back as plain
//! dicts with the same fields as the JSON output of the command-line tool.

use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use momentray_core::acceptance::run_acceptance;
use momentray_core::cli::commands::parse_rational;
use momentray_core::cli::exit_code;
use momentray_core::geometry::{self as geo, Dim, MapKind};
use momentray_core::lorentz::{self, SimpleFunction as CoreSimple, Term};
use momentray_core::refinement::{build_tower, tower_kind, tower_report, JacobianSource, TowerOptions, TowerSets};
use momentray_core::sharpness::{
    builtin_corpus, check_rwt, critical_exponents, critical_exponents_f64, default_n_list, necessity_check,
    region_contains_exact, scaling_experiment, shrinking_sweep, BoundSide, FBoundVariant,
};
use momentray_core::xray::{self, AxisBox, BoxUnionSet, Interval, QuadSpec};
use momentray_core::Error;

fn py_err(e: Error) -> PyErr {
    if exit_code(&e) == 2 {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for momentray_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn dim(d: usize) -> PyResult<Dim> {
    Dim::new(d).py()
}

fn kind(name: &str) -> PyResult<MapKind> {
    match name {
        "phi" => Ok(MapKind::Phi),
        "psi" => Ok(MapKind::Psi),
        _ => Err(PyValueError::new_err(format!("kind must be 'phi' or 'psi', got {name:?}"))),
    }
}

fn side(name: &str) -> PyResult<BoundSide> {
    match name {
        "e" => Ok(BoundSide::E),
        "f" => Ok(BoundSide::F),
        _ => Err(PyValueError::new_err(format!("side must be 'e' or 'f', got {name:?}"))),
    }
}

fn interval((lo, hi): (f64, f64)) -> PyResult<Interval> {
    Interval::new(lo, hi).py()
}

fn quad(d: Dim, step: Option<f64>) -> PyResult<QuadSpec> {
    let q = match step {
        Some(s) => QuadSpec::midpoint(s),
        None => QuadSpec::for_dim(d),
    };
    q.validate().py()?;
    Ok(q)
}

/// Finite union of pairwise disjoint axis-aligned boxes.
#[pyclass(module = "momentray", frozen)]
struct BoxSet {
    inner: BoxUnionSet,
}

#[pymethods]
impl BoxSet {
    /// `boxes` is a list of `(lo, hi)` corner pairs.
    #[new]
    fn new(dim: usize, boxes: Vec<(Vec<f64>, Vec<f64>)>) -> PyResult<Self> {
        let boxes = boxes
            .into_iter()
            .map(|(lo, hi)| AxisBox::new(lo, hi))
            .collect::<momentray_core::Result<Vec<_>>>()
            .py()?;
        Ok(BoxSet {
            inner: BoxUnionSet::new(self::dim(dim)?, boxes).py()?,
        })
    }

    #[staticmethod]
    fn unit(dim: usize) -> PyResult<Self> {
        Ok(BoxSet {
            inner: BoxUnionSet::single(AxisBox::unit(self::dim(dim)?)).py()?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim().get()
    }

    #[getter]
    fn boxes(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.inner.boxes().iter().map(|b| (b.lo.clone(), b.hi.clone())).collect()
    }

    fn measure(&self) -> f64 {
        self.inner.measure()
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }

    fn __len__(&self) -> usize {
        self.inner.boxes().len()
    }

    fn __repr__(&self) -> String {
        format!("BoxSet(dim={}, boxes={:?})", self.dim(), self.boxes())
    }
}

/// `Σ aᵢ·χ_{Aᵢ}` with positive weights and disjoint supports.
#[pyclass(module = "momentray", frozen)]
struct SimpleFunction {
    inner: CoreSimple,
}

#[pymethods]
impl SimpleFunction {
    /// `terms` is a list of `(weight, BoxSet)` pairs.
    #[new]
    fn new(dim: usize, terms: Vec<(f64, PyRef<'_, BoxSet>)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(weight, set)| Term {
                weight,
                support: set.inner.clone(),
            })
            .collect();
        Ok(SimpleFunction {
            inner: CoreSimple::new(self::dim(dim)?, terms).py()?,
        })
    }

    #[staticmethod]
    fn indicator(set: PyRef<'_, BoxSet>) -> Self {
        SimpleFunction {
            inner: CoreSimple::indicator(set.inner.clone()),
        }
    }

    fn __call__(&self, x: Vec<f64>) -> f64 {
        self.inner.eval(&x)
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        lorentz::lp_norm(&self.inner, p).py()
    }

    /// `‖f‖_{s,r}`; pass `float("inf")` for `r = ∞`.
    fn lorentz_norm(&self, s: f64, r: f64) -> PyResult<f64> {
        lorentz::lorentz_norm(&self.inner, s, r).py()
    }

    fn distribution(&self, level: f64) -> PyResult<f64> {
        lorentz::distribution(&self.inner, level).py()
    }
}

/// `(p_d, q_d)` as exact fractions `"a/b"`.
#[pyfunction]
fn exponents(d: usize) -> PyResult<(String, String)> {
    let (p, q) = critical_exponents(dim(d)?);
    Ok((p.to_string(), q.to_string()))
}

/// An exponent given exactly as `"2/3"` or `"0.45"`, or as a float.
#[derive(FromPyObject)]
enum Exponent {
    Text(String),
    Float(f64),
}

impl Exponent {
    fn exact(self, name: &str) -> PyResult<BigRational> {
        match self {
            Exponent::Text(s) => parse_rational(name, &s).py(),
            Exponent::Float(v) => {
                BigRational::from_float(v).ok_or_else(|| PyValueError::new_err(format!("{name} must be finite")))
            }
        }
    }
}

/// `"interior"`, `"boundary"` or `"outside"` of the exponent triangle.
#[pyfunction]
fn region(d: usize, p_inv: Exponent, q_inv: Exponent) -> PyResult<String> {
    let pt = (p_inv.exact("p_inv")?, q_inv.exact("q_inv")?);
    let m = region_contains_exact(dim(d)?, pt);
    Ok(serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default())
}

#[pyfunction]
fn gamma(x: Vec<f64>, s: f64) -> Vec<f64> {
    geo::gamma(&x, s).into_vec()
}

#[pyfunction]
fn gamma_star(y: Vec<f64>, t: f64) -> Vec<f64> {
    geo::gamma_star(&y, t).into_vec()
}

/// `Φ` or `Ψ` applied to a base point and `d` parameters.
#[pyfunction]
fn incidence_map(kind: &str, base: Vec<f64>, params: Vec<f64>) -> PyResult<Vec<f64>> {
    let d = dim(base.len())?;
    let p = match self::kind(kind)? {
        MapKind::Phi => geo::phi_map(d, &base, &params),
        MapKind::Psi => geo::psi_map(d, &base, &params),
    };
    Ok(p.py()?.into_vec())
}

/// Finite-difference Jacobian determinant and the product formula.
#[pyfunction]
fn jacobian(kind: &str, base: Vec<f64>, params: Vec<f64>) -> PyResult<(f64, f64)> {
    let (k, d) = (self::kind(kind)?, dim(base.len())?);
    let numeric = geo::jacobian_numeric(k, d, &base, &params).py()?;
    let closed = geo::jacobian_closed_form(k, d, base[0], &params).py()?;
    Ok((numeric, closed))
}

#[pyfunction]
#[pyo3(signature = (kind, d, samples = 100, seed = 7))]
fn estimate_c_d<'py>(py: Python<'py>, kind: &str, d: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let est = geo::estimate_c_d(self::kind(kind)?, dim(d)?, samples, seed).py()?;
    to_dict(py, &est)
}

/// `Xχ_E(x)` over the parameter interval `range`.
#[pyfunction]
#[pyo3(signature = (e, x, range = (0.0, 1.0)))]
fn x_indicator(e: PyRef<'_, BoxSet>, x: Vec<f64>, range: (f64, f64)) -> PyResult<f64> {
    Ok(xray::x_indicator(&e.inner, &interval(range)?, &x))
}

/// `T(E, F) = ⟨Xχ_E, χ_F⟩`.
#[pyfunction]
#[pyo3(signature = (e, f, range = (0.0, 1.0), step = None))]
fn bilinear_form(e: PyRef<'_, BoxSet>, f: PyRef<'_, BoxSet>, range: (f64, f64), step: Option<f64>) -> PyResult<f64> {
    let q = quad(e.inner.dim(), step)?;
    xray::bilinear_form(&e.inner, &f.inner, &interval(range)?, &q).py()
}

/// `⟨χ_E, X*χ_F⟩`, the other side of the duality.
#[pyfunction]
#[pyo3(signature = (e, f, range = (0.0, 1.0), step = None))]
fn adjoint_pairing(e: PyRef<'_, BoxSet>, f: PyRef<'_, BoxSet>, range: (f64, f64), step: Option<f64>) -> PyResult<f64> {
    let q = quad(e.inner.dim(), step)?;
    xray::adjoint_pairing(&e.inner, &f.inner, &interval(range)?, &q).py()
}

#[pyfunction]
#[pyo3(signature = (e, f, range = (0.0, 1.0), step = None))]
fn rwt<'py>(
    py: Python<'py>,
    e: PyRef<'_, BoxSet>,
    f: PyRef<'_, BoxSet>,
    range: (f64, f64),
    step: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let q = quad(e.inner.dim(), step)?;
    let rep = check_rwt(&e.inner, &f.inner, &interval(range)?, &q).py()?;
    to_dict(py, &rep)
}

/// Level-bound ratios on shrinking superlevel sets, one entry per step.
#[pyfunction]
#[pyo3(signature = (side, e, f, range = (0.0, 1.0), grid = 16, over_f = false))]
fn level_sweep<'py>(
    py: Python<'py>,
    side: &str,
    e: PyRef<'_, BoxSet>,
    f: PyRef<'_, BoxSet>,
    range: (f64, f64),
    grid: usize,
    over_f: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let variant = if over_f { FBoundVariant::OverF } else { FBoundVariant::OverH };
    let q = QuadSpec::for_dim(e.inner.dim());
    let steps = shrinking_sweep(self::side(side)?, &e.inner, &f.inner, &interval(range)?, &q, grid, variant).py()?;
    to_dict(py, &steps)
}

#[pyfunction]
#[pyo3(signature = (d, r = None, n_list = None))]
fn scaling<'py>(py: Python<'py>, d: usize, r: Option<f64>, n_list: Option<Vec<usize>>) -> PyResult<Bound<'py, PyAny>> {
    let dd = dim(d)?;
    let r = r.unwrap_or_else(|| critical_exponents_f64(dd).0);
    let n_list = n_list.unwrap_or_else(default_n_list);
    let rep = scaling_experiment(dd, r, &n_list).py()?;
    to_dict(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (d, r, n_list = None))]
fn necessity<'py>(py: Python<'py>, d: usize, r: f64, n_list: Option<Vec<usize>>) -> PyResult<Bound<'py, PyAny>> {
    let n_list = n_list.unwrap_or_else(default_n_list);
    let rep = necessity_check(dim(d)?, r, &n_list).py()?;
    to_dict(py, &rep)
}

/// Builds the parameter tower for one bound and returns its report.
#[pyfunction]
#[pyo3(signature = (e, f, side = "e", range = (0.0, 1.0), keep = 0.5, samples = 200, seed = 7))]
#[allow(clippy::too_many_arguments)]
fn refine<'py>(
    py: Python<'py>,
    e: PyRef<'_, BoxSet>,
    f: PyRef<'_, BoxSet>,
    side: &str,
    range: (f64, f64),
    keep: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = self::side(side)?;
    let d = e.inner.dim();
    let sets = TowerSets {
        first: e.inner.clone(),
        second: f.inner.clone(),
        target: match s {
            BoundSide::E => e.inner.clone(),
            BoundSide::F => f.inner.clone(),
        },
    };
    let opts = TowerOptions {
        keep,
        ..TowerOptions::default()
    };
    let tower = build_tower(tower_kind(s, d), &sets, &interval(range)?, &opts).py()?;
    let rep = tower_report(&tower, &QuadSpec::for_dim(d), JacobianSource::ClosedForm, samples, seed).py()?;
    to_dict(py, &rep)
}

/// Ids of the built-in corpus.
#[pyfunction]
fn corpus_ids() -> Vec<String> {
    builtin_corpus().entries.iter().map(|e| e.id.clone()).collect()
}

/// `(e, f, range)` of a corpus entry.
#[pyfunction]
fn corpus_entry(id: &str) -> PyResult<(BoxSet, BoxSet, (f64, f64))> {
    let corpus = builtin_corpus();
    let entry = corpus
        .entries
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| PyValueError::new_err(format!("no corpus entry {id:?}")))?;
    Ok((
        BoxSet { inner: entry.e.clone() },
        BoxSet { inner: entry.f.clone() },
        (entry.range.lo, entry.range.hi),
    ))
}

/// Runs every acceptance check; releases the GIL while it works.
#[pyfunction]
#[pyo3(signature = (seed = 7))]
fn acceptance<'py>(py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let rep = py.detach(|| run_acceptance(seed)).py()?;
    to_dict(py, &rep)
}

#[pymodule]
fn momentray(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<BoxSet>()?;
    m.add_class::<SimpleFunction>()?;
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_star, m)?)?;
    m.add_function(wrap_pyfunction!(incidence_map, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_c_d, m)?)?;
    m.add_function(wrap_pyfunction!(x_indicator, m)?)?;
    m.add_function(wrap_pyfunction!(bilinear_form, m)?)?;
    m.add_function(wrap_pyfunction!(adjoint_pairing, m)?)?;
    m.add_function(wrap_pyfunction!(rwt, m)?)?;
    m.add_function(wrap_pyfunction!(level_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(scaling, m)?)?;
    m.add_function(wrap_pyfunction!(necessity, m)?)?;
    m.add_function(wrap_pyfunction!(refine, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_ids, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_entry, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance, m)?)?;
    Ok(())
}
