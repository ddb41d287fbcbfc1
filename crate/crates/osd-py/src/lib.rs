//! Python bindings for the substitution analysis library.
//!
//! Exposes the core pipeline as a small typed surface:
//!
//!     import osd_py
//!     r = osd_py.Rule("a -> ab; b -> a")
//!     a = osd_py.analyze(r)
//!     a.pure_point, a.osd          # (True, 1.0)
//!     a.as_dict()                  # full report as nested dicts

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use osd_core::algebraic::IntPoly;
use osd_core::oracle::{estimate_decay, iterate_pair_density};
use osd_core::osd::{osd_from_data, product_osd, OsdResult};
use osd_core::pairs::{default_seeds, SplitCtx};
use osd_core::parse::{parse_rule, print_rule};
use osd_core::report::{analyze_with_osd, AnalysisReport, AnalyzeOptions, OsdBounds, OsdValue};
use osd_core::rule::{inflation_matrix, pf_data, SubstitutionRule};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Recursively converts a serde_json value into Python objects.
fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => (*b).into_py(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py)
            }
        }
        serde_json::Value::String(s) => s.as_str().into_py(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_py(py)
        }
    })
}

fn to_py_dict<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let doc = serde_json::to_value(value).map_err(value_error)?;
    json_to_py(py, &doc)
}

/// A substitution rule over a finite alphabet.
///
/// Parses the same text format as the command line tool:
/// statements `letter -> image` separated by newlines or semicolons.
#[pyclass(frozen)]
struct Rule {
    inner: SubstitutionRule,
}

#[pymethods]
impl Rule {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_rule(text).map_err(value_error)?,
        })
    }

    /// Alphabet letters in declaration order.
    #[getter]
    fn letters(&self) -> Vec<String> {
        (0..self.inner.letter_count())
            .map(|i| self.inner.alphabet.name(i).to_string())
            .collect()
    }

    /// Substitution images, aligned with `letters`.
    #[getter]
    fn images(&self) -> Vec<String> {
        (0..self.inner.letter_count())
            .map(|i| self.inner.alphabet.word_to_string(self.inner.image(i)))
            .collect()
    }

    /// Canonical one-line text form of the rule.
    fn text(&self) -> String {
        print_rule(&self.inner).replace('\n', "; ")
    }

    /// Letter-count inflation matrix, rows indexed like `letters`.
    fn inflation_matrix(&self) -> Vec<Vec<u64>> {
        inflation_matrix(&self.inner)
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| u64::try_from(x).unwrap_or(u64::MAX))
                    .collect()
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Rule(\"{}\")", self.text())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Result of a full analysis run.
///
/// Typed getters cover the headline quantities; `as_dict()` returns the
/// complete report in the same shape as the CLI's `--json` output.
#[pyclass(frozen)]
struct Analysis {
    report: AnalysisReport,
    result: OsdResult,
}

#[pymethods]
impl Analysis {
    /// Whether the dynamical spectrum is pure point.
    #[getter]
    fn pure_point(&self) -> bool {
        self.report.pure_point
    }

    /// Inflation factor as a float.
    #[getter]
    fn inflation_factor(&self) -> f64 {
        self.report.lambda.decimal
    }

    /// Minimal polynomial of the inflation factor.
    #[getter]
    fn inflation_min_poly(&self) -> String {
        self.report.lambda.min_poly.clone()
    }

    /// Dominant discrepancy growth rate, when the closure is non-trivial.
    #[getter]
    fn lambda_dc(&self) -> Option<f64> {
        self.report.lambda_dc.as_ref().map(|v| v.decimal)
    }

    /// Number of nodes in the balanced-pair closure.
    #[getter]
    fn closure_nodes(&self) -> usize {
        self.report.pair_graph_size
    }

    /// Orbit separation dimension.
    ///
    /// A float when the value is determined, `inf` when the spectrum is not
    /// pure point, and `None` when only the interval in `osd_bounds` is known.
    #[getter]
    fn osd(&self) -> Option<f64> {
        let o = &self.report.osd;
        if !o.pure_point {
            return Some(f64::INFINITY);
        }
        match o.value {
            OsdValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Whether `osd` is exact rather than a representative of the bounds.
    #[getter]
    fn osd_exact(&self) -> bool {
        self.report.osd.exact
    }

    /// `(lower, upper)` enclosure of the dimension, when finite.
    #[getter]
    fn osd_bounds(&self) -> Option<(f64, f64)> {
        match &self.report.osd.bounds {
            OsdBounds::Finite([lo, hi]) => Some((*lo, *hi)),
            _ => None,
        }
    }

    /// Largest Lyapunov exponent of the discrepancy densities.
    #[getter]
    fn lyapunov_max(&self) -> f64 {
        self.report.osd.lyapunov_max
    }

    /// Hausdorff dimension of the window boundary, when applicable.
    #[getter]
    fn boundary_dim(&self) -> Option<f64> {
        self.report.window.boundary_dim
    }

    /// Warnings accumulated during the run.
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.report.warnings.clone()
    }

    /// Full report as nested dicts, matching the CLI's JSON output.
    fn as_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        to_py_dict(py, &self.report)
    }

    /// Full report serialized as a JSON string.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.report).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        let osd = match self.osd() {
            Some(v) if v.is_infinite() => "inf".to_string(),
            Some(v) => format!("{v}"),
            None => "None".to_string(),
        };
        format!(
            "Analysis(rule=\"{}\", pure_point={}, osd={})",
            self.report.rule.text.replace('\n', "; "),
            if self.report.pure_point { "True" } else { "False" },
            osd,
        )
    }
}

fn options(seed_factor_length: usize, max_pairs: usize, precision_bits: u32) -> AnalyzeOptions {
    AnalyzeOptions {
        seed_factor_length,
        cap: max_pairs,
        precision_bits,
    }
}

fn rule_input(rule: &Bound<'_, PyAny>) -> PyResult<SubstitutionRule> {
    if let Ok(r) = rule.downcast::<Rule>() {
        return Ok(r.get().inner.clone());
    }
    let text: String = rule.extract()?;
    parse_rule(&text).map_err(value_error)
}

/// Runs the balanced-pair analysis for a rule (a `Rule` or rule text).
#[pyfunction]
#[pyo3(signature = (rule, *, seed_factor_length = 2, max_pairs = 100_000, precision_bits = 128))]
fn analyze(
    rule: &Bound<'_, PyAny>,
    seed_factor_length: usize,
    max_pairs: usize,
    precision_bits: u32,
) -> PyResult<Analysis> {
    let rule = rule_input(rule)?;
    let opts = options(seed_factor_length, max_pairs, precision_bits);
    let (report, result) = analyze_with_osd(&rule, &opts).map_err(value_error)?;
    Ok(Analysis { report, result })
}

/// Dimension of a product of analyzed factors: the sum of the factor
/// dimensions. Raises `ValueError` if any factor lacks an exact value.
#[pyfunction]
fn product_dimension(factors: Vec<Py<Analysis>>, py: Python<'_>) -> PyResult<f64> {
    let results: Vec<OsdResult> = factors
        .iter()
        .map(|a| a.borrow(py).result.clone())
        .collect();
    let combined = product_osd(&results).map_err(value_error)?;
    combined
        .value
        .ok_or_else(|| PyValueError::new_err("product has no exact dimension"))
}

/// Formula-level dimension from integer polynomial coefficients
/// (ascending order) for the inflation factor and the discrepancy rate,
/// in ambient dimension `d`.
#[pyfunction]
#[pyo3(signature = (lambda_coeffs, lambda_dc_coeffs, d = 1))]
fn dimension_from_polys(
    lambda_coeffs: Vec<i64>,
    lambda_dc_coeffs: Vec<i64>,
    d: u32,
) -> PyResult<f64> {
    let lp = IntPoly::from_i64(&lambda_coeffs);
    let dp = IntPoly::from_i64(&lambda_dc_coeffs);
    let result = osd_from_data(&lp, &dp, d).map_err(value_error)?;
    result
        .value
        .ok_or_else(|| PyValueError::new_err("no exact dimension for this data"))
}

/// Names of the built-in corpus entries, in run order.
#[pyfunction]
fn corpus_entries() -> Vec<String> {
    osd_core::corpus::entries()
        .iter()
        .map(|e| e.name.to_string())
        .collect()
}

/// Runs the corpus (optionally a single entry) and returns the check rows
/// as dicts with `entry`, `check`, `computed`, `expected`, `provenance`,
/// and `pass` keys.
#[pyfunction]
#[pyo3(signature = (only = None))]
fn run_corpus(py: Python<'_>, only: Option<&str>) -> PyResult<PyObject> {
    let opts = AnalyzeOptions::default();
    let rows = osd_core::corpus::run_corpus(only, &opts).map_err(value_error)?;
    to_py_dict(py, &rows)
}

/// Empirical decay check: iterates the first default seed pair and fits
/// log-density against the step index. Returns a dict with the fitted
/// `slope`, `estimated_log_lambda_dc`, `r_squared`, and the raw `steps`.
#[pyfunction]
#[pyo3(signature = (rule, *, iterations = 25, burn_in = 5, seed_factor_length = 2, max_pairs = 100_000, precision_bits = 128))]
fn decay_estimate(
    py: Python<'_>,
    rule: &Bound<'_, PyAny>,
    iterations: u32,
    burn_in: u32,
    seed_factor_length: usize,
    max_pairs: usize,
    precision_bits: u32,
) -> PyResult<PyObject> {
    let rule = rule_input(rule)?;
    let data = pf_data(&rule, precision_bits).map_err(value_error)?;
    let ctx = SplitCtx::new(&data.lengths);
    let seeds = default_seeds(&rule, &ctx, seed_factor_length).map_err(value_error)?;
    let seed = seeds
        .first()
        .ok_or_else(|| PyValueError::new_err("rule has no non-coincident seed pairs"))?;
    let t = iterate_pair_density(seed, &rule, &data, iterations, max_pairs).map_err(value_error)?;
    let estimate = estimate_decay(&t.trajectory, burn_in).map_err(value_error)?;

    let out = PyDict::new_bound(py);
    out.set_item("seed", seed.label(&rule))?;
    out.set_item("slope", estimate.slope)?;
    out.set_item("estimated_log_lambda_dc", estimate.estimated_log_lambda_dc)?;
    out.set_item("r_squared", estimate.r_squared)?;
    out.set_item("steps", to_py_dict(py, &t.trajectory.steps)?)?;
    Ok(out.into_py(py))
}

#[pymodule]
fn osd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Rule>()?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(product_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_from_polys, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_entries, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(decay_estimate, m)?)?;
    Ok(())
}
