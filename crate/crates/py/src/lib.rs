//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be ints, strings like `"3/2"`, or Fractions.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use tradenet::apsp::floyd_all_pairs;
use tradenet::cli::{
    compromise_pipeline, equilibrium_pipeline, parse_flow_problem, parse_instance, run_distances, CliError,
    CompromiseOptions, CompromiseRun, FlowProblemDocument, InstanceDocument, Metric, OutputFormat, ReplayDocument,
    SituationTie,
};
use tradenet::compromise::{solve_compromise, SelectionTie};
use tradenet::equilibrium::{
    evaluate_path_costs, path_cost_coefficients, solve_equilibrium, verify_equilibrium, EquilibriumMode,
    EquilibriumResult, FlowProblem,
};
use tradenet::exactmath::{solve_linear_system, LinearSystem};
use tradenet::market::{CostConvention, MarketOptions, PayoffMode};
use tradenet::model::CostView;
use tradenet::{Instance, Rational};

/// `(table, row_node, site, supplied, recomputed)`.
type DiffRow = (&'static str, usize, usize, Option<i64>, Option<i64>);

/// `(selected, value, ideal, residuals)`.
type Selection<'py> = (usize, Bound<'py, PyAny>, Vec<Bound<'py, PyAny>>, Vec<Vec<Bound<'py, PyAny>>>);

create_exception!(tradenet, SolverError, PyException, "A solver could not produce a result.");

fn input_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solver_err(e: impl std::fmt::Display) -> PyErr {
    SolverError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Input(m) => PyValueError::new_err(m),
        CliError::Solver(m) => SolverError::new_err(m),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    PyModule::import(py, "fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn fractions<'py>(py: Python<'py>, rs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    rs.iter().map(|r| fraction(py, r)).collect()
}

fn fraction_rows<'py>(py: Python<'py>, rows: &[Vec<Rational>]) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    rows.iter().map(|r| fractions(py, r)).collect()
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(PyValueError::new_err("floats are not exact; pass an int, a string or a Fraction"));
    }
    obj.str()?.to_cow()?.parse().map_err(input_err)
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(rational).collect()
}

fn output_format(name: &str) -> PyResult<OutputFormat> {
    match name {
        "text" => Ok(OutputFormat::Text),
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(PyValueError::new_err(format!("unknown format {name:?} (text, csv, json)"))),
    }
}

fn convention(name: &str) -> PyResult<CostConvention> {
    match name {
        "l-plus-d" => Ok(CostConvention::LPlusD),
        "d" => Ok(CostConvention::D),
        _ => Err(PyValueError::new_err(format!("unknown display {name:?} (l-plus-d, d)"))),
    }
}

fn mode(name: &str) -> PyResult<EquilibriumMode> {
    match name {
        "equal-cost" => Ok(EquilibriumMode::EqualCost),
        "nonnegative" => Ok(EquilibriumMode::Nonnegative),
        _ => Err(PyValueError::new_err(format!("unknown mode {name:?} (equal-cost, nonnegative)"))),
    }
}

fn read(path: &PathBuf) -> PyResult<String> {
    std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{}: {e}", path.display())))
}

/// A validated network instance.
#[pyclass(name = "Instance", module = "tradenet", frozen)]
struct PyInstance {
    inner: Instance,
    payoff: Option<PayoffMode>,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, doc) = parse_instance(text).map_err(input_err)?;
        Ok(PyInstance { inner, payoff: doc.payoff_mode.map(Into::into) })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Self::from_json(&read(&path)?)
    }

    fn to_json(&self) -> String {
        InstanceDocument::from_instance(&self.inner).to_json()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.network().node_count
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.network().edges.len()
    }

    #[getter]
    fn candidate_sites(&self) -> Vec<usize> {
        self.inner.candidate_sites().to_vec()
    }

    #[getter]
    fn retailer_count(&self) -> usize {
        self.inner.retailer_count()
    }

    /// `(node, unit_price)` pairs.
    #[getter]
    fn producers(&self) -> Vec<(usize, u64)> {
        self.inner.producers().iter().map(|p| (p.node, p.unit_price)).collect()
    }

    /// `(node, demand)` pairs.
    #[getter]
    fn consumers(&self) -> Vec<(usize, u64)> {
        self.inner.consumers().iter().map(|c| (c.node, c.demand)).collect()
    }

    #[getter]
    fn markup<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.markup_rate())
    }

    /// Producers × sites (`"retailer"`) or consumers × sites (`"consumer"`);
    /// `None` marks an unreachable pair.
    #[pyo3(signature = (metric, display = "l-plus-d"))]
    fn distances(&self, metric: &str, display: &str) -> PyResult<Vec<Vec<Option<i64>>>> {
        let metric = match metric {
            "retailer" => Metric::Retailer,
            "consumer" => Metric::Consumer,
            _ => return Err(PyValueError::new_err(format!("unknown metric {metric:?} (retailer, consumer)"))),
        };
        let report = run_distances(&self.inner, metric, convention(display)?).map_err(cli_err)?;
        let section = report.sections.last().expect("distance section");
        Ok(section.rows.iter().map(|row| row[1..].iter().map(|c| c.parse().ok()).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(nodes={}, edges={}, sites={:?}, retailers={})",
            self.node_count(),
            self.edge_count(),
            self.inner.candidate_sites(),
            self.retailer_count()
        )
    }
}

/// Outcome of a compromise placement run.
#[pyclass(name = "CompromiseRun", module = "tradenet", frozen)]
struct PyCompromiseRun {
    run: CompromiseRun,
}

#[pymethods]
impl PyCompromiseRun {
    /// Site tuples, one per situation, in enumeration order.
    #[getter]
    fn situations(&self) -> Vec<Vec<usize>> {
        self.run.incomes.situations.iter().map(|s| s.sites.clone()).collect()
    }

    /// `incomes[s][j]` for situation `s` and retailer `j`.
    #[getter]
    fn incomes<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        fraction_rows(py, &self.run.incomes.incomes)
    }

    /// Price at each candidate site, in candidate-list order.
    #[getter]
    fn prices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.run.incomes.site_prices.iter().map(|p| fraction(py, &p.price)).collect()
    }

    #[getter]
    fn ideal<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &self.run.result.ideal)
    }

    #[getter]
    fn residuals<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        fraction_rows(py, &self.run.result.residuals)
    }

    #[getter]
    fn row_max<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &self.run.result.row_max)
    }

    #[getter]
    fn selected(&self) -> usize {
        self.run.result.selected
    }

    #[getter]
    fn selected_sites(&self) -> Vec<usize> {
        self.run.incomes.situations[self.run.result.selected].sites.clone()
    }

    #[getter]
    fn value<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.run.result.value)
    }

    /// `(table, row_node, site, supplied, recomputed)` for every disagreeing
    /// entry between replayed and recomputed tables.
    #[getter]
    fn diffs(&self) -> Vec<DiffRow> {
        self.run
            .diffs
            .iter()
            .flat_map(|d| d.mismatches.iter().map(|m| (m.table, m.row, m.col, m.replay, m.recomputed)))
            .collect()
    }

    #[pyo3(signature = (format = "text"))]
    fn report(&self, format: &str) -> PyResult<String> {
        Ok(self.run.report().render(output_format(format)?))
    }
}

/// Runs the placement pipeline. `replay` is a replay document as JSON text.
#[pyfunction]
#[pyo3(signature = (instance, replay = None, payoff = None, tie = "first", display = "l-plus-d"))]
fn solve_placement(
    instance: &PyInstance,
    replay: Option<&str>,
    payoff: Option<&str>,
    tie: &str,
    display: &str,
) -> PyResult<PyCompromiseRun> {
    let replay = replay.map(ReplayDocument::from_json).transpose().map_err(input_err)?;
    let payoff = match payoff {
        None => instance.payoff.unwrap_or_default(),
        Some("revenue") => PayoffMode::Revenue,
        Some("units") => PayoffMode::Units,
        Some(other) => return Err(PyValueError::new_err(format!("unknown payoff {other:?} (revenue, units)"))),
    };
    let tie = match tie {
        "first" => SituationTie::First,
        "lowest-sites" => SituationTie::LowestSites,
        _ => return Err(PyValueError::new_err(format!("unknown tie {tie:?} (first, lowest-sites)"))),
    };
    let options = CompromiseOptions {
        market: MarketOptions { payoff, ..Default::default() },
        display: convention(display)?,
        tie,
    };
    let run = compromise_pipeline(&instance.inner, replay.as_ref(), options).map_err(cli_err)?;
    Ok(PyCompromiseRun { run })
}

/// Compromise selection on a bare payoff matrix (situations × players).
/// Returns `(selected, value, ideal, residuals)`.
#[pyfunction]
fn compromise<'py>(py: Python<'py>, incomes: Vec<Vec<Bound<'py, PyAny>>>) -> PyResult<Selection<'py>> {
    let rows: Vec<Vec<Rational>> = incomes.iter().map(|r| rationals(r)).collect::<PyResult<_>>()?;
    let r = solve_compromise(&rows, SelectionTie::FirstInOrder).map_err(input_err)?;
    Ok((r.selected, fraction(py, &r.value)?, fractions(py, &r.ideal)?, fraction_rows(py, &r.residuals)?))
}

/// All-pairs shortest distances over undirected `(u, v, weight)` edges.
#[pyfunction]
fn shortest_paths(node_count: usize, edges: Vec<(usize, usize, i64)>) -> PyResult<Vec<Vec<Option<i64>>>> {
    if let Some(&(u, v, _)) = edges.iter().find(|&&(u, v, _)| u >= node_count || v >= node_count) {
        return Err(PyValueError::new_err(format!("edge ({u}, {v}) outside 0..{node_count}")));
    }
    let m = floyd_all_pairs(&CostView::from_edges(node_count, &edges)).map_err(input_err)?;
    Ok(m.rows().map(<[Option<i64>]>::to_vec).collect())
}

/// Exact solution of the square system `a · x = b`.
#[pyfunction]
fn solve_linear<'py>(
    py: Python<'py>,
    a: Vec<Vec<Bound<'py, PyAny>>>,
    b: Vec<Bound<'py, PyAny>>,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let a: Vec<Vec<Rational>> = a.iter().map(|r| rationals(r)).collect::<PyResult<_>>()?;
    let system = LinearSystem::new(a, rationals(&b)?).map_err(input_err)?;
    let x = solve_linear_system(&system).map_err(solver_err)?;
    fractions(py, &x)
}

/// A path-flow equilibrium, either solved or supplied for checking.
#[pyclass(name = "Equilibrium", module = "tradenet", frozen)]
struct PyEquilibrium {
    inner: EquilibriumResult,
}

#[pymethods]
impl PyEquilibrium {
    /// `support` defaults to the paths with nonzero flow (nonnegative mode)
    /// or all paths (equal-cost mode).
    #[new]
    #[pyo3(signature = (flows, common_cost, mode = "equal-cost", support = None))]
    fn new(
        flows: Vec<Bound<'_, PyAny>>,
        common_cost: &Bound<'_, PyAny>,
        mode: &str,
        support: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let flows = rationals(&flows)?;
        let mode = self::mode(mode)?;
        let support = support.unwrap_or_else(|| match mode {
            EquilibriumMode::EqualCost => (0..flows.len()).collect(),
            EquilibriumMode::Nonnegative => (0..flows.len()).filter(|&p| !flows[p].is_zero()).collect(),
        });
        Ok(PyEquilibrium { inner: EquilibriumResult { flows, common_cost: rational(common_cost)?, mode, support } })
    }

    #[getter]
    fn flows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &self.inner.flows)
    }

    #[getter]
    fn common_cost<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.common_cost)
    }

    /// Common cost as a mixed number, e.g. `"34 1/13"`.
    #[getter]
    fn common_cost_mixed(&self) -> String {
        self.inner.common_cost.to_mixed_string()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    /// Zero-based path indices held at the common cost.
    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support.clone()
    }

    fn __repr__(&self) -> String {
        let flows: Vec<String> = self.inner.flows.iter().map(ToString::to_string).collect();
        format!(
            "Equilibrium(flows=[{}], common_cost={}, mode={})",
            flows.join(", "),
            self.inner.common_cost,
            self.inner.mode
        )
    }
}

/// Paths over affine-cost edges carrying a fixed demand.
#[pyclass(name = "FlowProblem", module = "tradenet", frozen)]
struct PyFlowProblem {
    inner: FlowProblem,
}

#[pymethods]
impl PyFlowProblem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFlowProblem { inner: parse_flow_problem(text).map_err(input_err)? })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Self::from_json(&read(&path)?)
    }

    fn to_json(&self) -> String {
        FlowProblemDocument::from_problem(&self.inner).to_json()
    }

    #[getter]
    fn path_count(&self) -> usize {
        self.inner.path_count()
    }

    #[getter]
    fn paths(&self) -> Vec<Vec<u32>> {
        self.inner.paths().to_vec()
    }

    #[getter]
    fn demand<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.demand())
    }

    /// Each path's cost as an affine form in the path flows.
    fn cost_forms(&self) -> Vec<String> {
        let costs = path_cost_coefficients(&self.inner);
        (0..self.inner.path_count()).map(|i| costs.render(i)).collect()
    }

    /// Path costs at the given flows.
    fn path_costs<'py>(&self, py: Python<'py>, flows: Vec<Bound<'py, PyAny>>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let flows = rationals(&flows)?;
        if flows.len() != self.inner.path_count() {
            return Err(PyValueError::new_err(format!("expected {} flows", self.inner.path_count())));
        }
        fractions(py, &evaluate_path_costs(&self.inner, &flows))
    }

    #[pyo3(signature = (mode = "equal-cost"))]
    fn solve(&self, mode: &str) -> PyResult<PyEquilibrium> {
        let inner = solve_equilibrium(&self.inner, self::mode(mode)?).map_err(solver_err)?;
        Ok(PyEquilibrium { inner })
    }

    /// Violated equilibrium conditions; empty when the result checks out.
    fn verify(&self, result: &PyEquilibrium) -> Vec<String> {
        verify_equilibrium(&self.inner, &result.inner).violations.iter().map(ToString::to_string).collect()
    }

    #[pyo3(signature = (mode = "equal-cost", format = "text"))]
    fn report(&self, mode: &str, format: &str) -> PyResult<String> {
        let run = equilibrium_pipeline(&self.inner, self::mode(mode)?).map_err(cli_err)?;
        Ok(run.report().render(output_format(format)?))
    }
}

/// Adds the module's classes and functions to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyCompromiseRun>()?;
    m.add_class::<PyFlowProblem>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_function(wrap_pyfunction!(solve_placement, m)?)?;
    m.add_function(wrap_pyfunction!(compromise, m)?)?;
    m.add_function(wrap_pyfunction!(shortest_paths, m)?)?;
    m.add_function(wrap_pyfunction!(solve_linear, m)?)?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "tradenet")]
fn tradenet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
