//! Python bindings for the integral-point solver: the main context and
//! pipeline entry points plus a few leaf operations that are handy from
//! notebooks.

use cartanpts::enumeration::{classify_candidate, small_j_filter, SmallJResult};
use cartanpts::geometry::{GroupContext, HSpec};
use cartanpts::jinv::JSeries;
use cartanpts::pipeline::{run_pipeline, RunConfig};
use cartanpts::precision::Prec;
use cartanpts::relation::{cm_on_curve as cm_on_curve_impl, CM_POINTS};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err_to_py(e: cartanpts::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Group-theoretic summary for a prime level and subgroup spec.
#[pyfunction]
#[pyo3(signature = (p, subgroup="pm1"))]
fn context_info(py: Python<'_>, p: u64, subgroup: &str) -> PyResult<PyObject> {
    let spec: HSpec = subgroup.parse().map_err(err_to_py)?;
    let ctx = GroupContext::build(p, &spec).map_err(err_to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("p", ctx.p)?;
    d.set_item("xi", ctx.xi)?;
    d.set_item("h", ctx.h.clone())?;
    d.set_item("d", ctx.d)?;
    d.set_item("m", ctx.m)?;
    d.set_item("cusps", (ctx.p - 1) / 2)?;
    d.set_item("unit_orbit_size", ctx.unit_orbit_size())?;
    Ok(d.into())
}

/// The thirteen rational CM j-invariants with their discriminants.
#[pyfunction]
fn cm_points() -> Vec<(i64, i64)> {
    CM_POINTS.to_vec()
}

/// Whether the CM point of the given discriminant lies on the level-p curve.
#[pyfunction]
fn cm_on_curve(p: u64, disc: i64) -> bool {
    cm_on_curve_impl(p, disc)
}

/// Evaluate the j q-series at a real q, returning (value, error_bound).
#[pyfunction]
#[pyo3(signature = (q, bits=256))]
fn evaluate_j(q: f64, bits: u32) -> PyResult<(f64, f64)> {
    let prec = Prec::new(bits).map_err(err_to_py)?;
    let js = JSeries::new(128);
    let v = js
        .evaluate_auto(&prec.from_f64(q), 1e-12, prec)
        .map_err(err_to_py)?;
    Ok((v.to_f64(), v.err().to_f64()))
}

/// Classify an integer j value against the CM table.
#[pyfunction]
fn classify_j(j: i64, bits: u32) -> PyResult<String> {
    let prec = Prec::new(bits.max(64)).map_err(err_to_py)?;
    let v = prec.int(j);
    let c = classify_candidate(&v).map_err(err_to_py)?;
    Ok(format!("{c:?}"))
}

/// Frobenius-trace filter for j in 1..=1727; returns "excluded:<ell>" or
/// "undetermined".
#[pyfunction]
#[pyo3(signature = (p, j, ell_budget=500))]
fn small_j(p: u64, j: i64, ell_budget: u64) -> String {
    match small_j_filter(p, j, ell_budget) {
        SmallJResult::Excluded { witness_prime } => format!("excluded:{witness_prime}"),
        SmallJResult::Undetermined => "undetermined".into(),
    }
}

/// Run the full pipeline; returns the JSON report as a string.
#[pyfunction]
#[pyo3(signature = (p, subgroup="pm1", bits=256, epsilon=1e-10, t0=10.0,
                    ell_budget=500, index=1, workers=0, checkpoint=None,
                    validate_only=false))]
#[allow(clippy::too_many_arguments)]
fn run(
    p: u64,
    subgroup: &str,
    bits: u32,
    epsilon: f64,
    t0: f64,
    ell_budget: u64,
    index: u32,
    workers: usize,
    checkpoint: Option<String>,
    validate_only: bool,
) -> PyResult<String> {
    let config = RunConfig {
        p,
        subgroup: subgroup.to_string(),
        precision_bits: bits,
        nu_epsilon_target: epsilon,
        t0,
        ell_budget,
        exponent_denominator: index,
        workers,
        checkpoint_path: checkpoint,
        report_path: None,
        unit_basis_path: None,
        validate_only,
    };
    let report = run_pipeline(&config).map_err(err_to_py)?;
    report.to_json().map_err(err_to_py)
}

#[pymodule]
fn cartanpts_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(context_info, m)?)?;
    m.add_function(wrap_pyfunction!(cm_points, m)?)?;
    m.add_function(wrap_pyfunction!(cm_on_curve, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_j, m)?)?;
    m.add_function(wrap_pyfunction!(classify_j, m)?)?;
    m.add_function(wrap_pyfunction!(small_j, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
