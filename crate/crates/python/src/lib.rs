//! Python bindings: graphs, transforms, scheduling, feasibility and the
//! agent-language compiler. Rationals cross the boundary as strings
//! (`"3/2"`) or integers.

use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;

use tca_core::comms::{check_visibility as check_link, link_from_json};
use tca_core::feasibility::{feasible_chains, feasible_trees, SearchBudget};
use tca_core::gantt;
use tca_core::io::{graph_from_json, graph_to_json, schedule_from_json, schedule_to_json};
use tca_core::scheduler::{
    check_correct, simulate, validate_schedule, ChoiceOracle, ChoiceScript, FirstBranch, ScheduleRun, SimOptions,
    Status,
};
use tca_core::transform;
use tca_core::{classify, format_rat, parse_rat, ExecTimeMap, GraphClass, Rat, TcaGraph};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rat(v: &Bound<'_, PyAny>) -> PyResult<Rat> {
    if let Ok(i) = v.extract::<i64>() {
        if i < 0 {
            return Err(PyValueError::new_err("dates and costs must not be negative"));
        }
        return Ok(Rat::from_integer(i));
    }
    if let Ok(s) = v.extract::<String>() {
        return parse_rat(&s).map_err(err);
    }
    Err(PyTypeError::new_err("expected an int or a string such as \"3/2\""))
}

/// A time-constrained graph (chain, tree or automaton).
#[pyclass(name = "Graph", module = "tca", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph(TcaGraph);

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        graph_from_json(text).map(PyGraph).map_err(err)
    }

    fn to_json(&self) -> String {
        graph_to_json(&self.0)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    /// "chain", "tree" or "automaton".
    #[getter]
    fn kind(&self) -> &'static str {
        match classify(&self.0) {
            GraphClass::Chain => "chain",
            GraphClass::Tree => "tree",
            GraphClass::Automaton => "automaton",
        }
    }

    /// `(id, from, to, block, cost)` for every arc.
    fn arcs(&self) -> Vec<(String, String, String, String, String)> {
        self.0
            .arcs
            .iter()
            .map(|a| (a.id.clone(), a.from.clone(), a.to.clone(), a.block.name.clone(), format_rat(a.block.cost)))
            .collect()
    }

    fn simplify(&self) -> PyResult<Self> {
        transform::simplify(&self.0).map(PyGraph).map_err(err)
    }

    fn cdi(&self) -> PyResult<Self> {
        transform::apply_cdi(&self.0).map(PyGraph).map_err(err)
    }

    fn unfold(&self, horizon: &Bound<'_, PyAny>) -> PyResult<Self> {
        transform::unfold(&self.0, to_rat(horizon)?).map(PyGraph).map_err(err)
    }

    fn to_absolute(&self) -> PyResult<Self> {
        transform::to_absolute(&self.0).map(PyGraph).map_err(err)
    }

    fn to_relative(&self) -> PyResult<Self> {
        transform::to_relative(&self.0).map(PyGraph).map_err(err)
    }

    /// Smallest deadline any path through the arc can impose, or None.
    fn min_possible_deadline(&self, arc: &str) -> PyResult<Option<String>> {
        let d = tca_core::min_possible_deadline(&self.0, arc).map_err(err)?;
        Ok(d.finite().map(format_rat))
    }

    fn __repr__(&self) -> String {
        format!("<Graph {} ({}, {} arcs)>", self.0.name, self.kind(), self.0.arcs.len())
    }
}

/// The result of one scheduler run.
#[pyclass(name = "Schedule", module = "tca", frozen)]
struct PySchedule(ScheduleRun);

#[pymethods]
impl PySchedule {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        schedule_from_json(text).map(PySchedule).map_err(err)
    }

    fn to_json(&self) -> String {
        schedule_to_json(&self.0)
    }

    /// "ok", "deadline-miss" or "zeno".
    #[getter]
    fn status(&self) -> &'static str {
        match self.0.status {
            Status::Ok => "ok",
            Status::DeadlineMiss => "deadline-miss",
            Status::Zeno => "zeno",
        }
    }

    /// `(task name, block, start, end)` per segment.
    fn segments(&self) -> Vec<(String, String, String, String)> {
        let m = &self.0.mapping;
        m.segments
            .iter()
            .map(|s| (m.tasks[s.task].clone(), s.block.clone(), format_rat(s.start), format_rat(s.end)))
            .collect()
    }

    #[pyo3(signature = (tick=None))]
    fn gantt(&self, tick: Option<&Bound<'_, PyAny>>) -> PyResult<String> {
        let tick = match tick {
            Some(t) => to_rat(t)?,
            None => gantt::default_tick(&self.0.mapping, &self.0.markers),
        };
        Ok(gantt::render_text(&self.0.mapping, &self.0.markers, tick))
    }

    fn __repr__(&self) -> String {
        format!("<Schedule {} ({} segments)>", self.status(), self.0.mapping.segments.len())
    }
}

fn graphs_of(gs: &[PyRef<'_, PyGraph>]) -> Vec<TcaGraph> {
    gs.iter().map(|g| g.0.clone()).collect()
}

/// Compiles an agent program; one graph per agent.
#[pyfunction]
fn compile(source: &str) -> PyResult<Vec<PyGraph>> {
    tca_core::frontend::compile_source(source)
        .map(|gs| gs.into_iter().map(PyGraph).collect())
        .map_err(|e| PyValueError::new_err(e.render("<source>", source)))
}

/// Runs EDF up to `horizon`. `choices` is a choice script; without one
/// every choice takes its first branch.
#[pyfunction]
#[pyo3(signature = (graphs, horizon, choices=None))]
fn schedule(graphs: Vec<PyRef<'_, PyGraph>>, horizon: &Bound<'_, PyAny>, choices: Option<&str>) -> PyResult<PySchedule> {
    let gs = graphs_of(&graphs);
    let exec = ExecTimeMap::from_graphs(&gs);
    let opts = SimOptions::new(to_rat(horizon)?);
    let mut script = choices.map(ChoiceScript::parse).transpose().map_err(err)?;
    let oracle: &mut dyn ChoiceOracle = match script.as_mut() {
        Some(s) => s,
        None => &mut FirstBranch,
    };
    simulate(&gs, &exec, oracle, &opts).map(PySchedule).map_err(err)
}

/// Violations of a schedule against chains, as JSON strings.
#[pyfunction]
fn validate(chains: Vec<PyRef<'_, PyGraph>>, schedule: PyRef<'_, PySchedule>) -> PyResult<Vec<String>> {
    let gs = graphs_of(&chains);
    let mut v = validate_schedule(&gs, &schedule.0.mapping);
    if v.is_empty() {
        v = check_correct(&gs, &schedule.0.mapping, &ExecTimeMap::from_graphs(&gs));
    }
    v.iter().map(|x| serde_json::to_string(x).map_err(err)).collect()
}

/// Whether some schedule meets every constraint up to `horizon`.
#[pyfunction]
fn feasible(graphs: Vec<PyRef<'_, PyGraph>>, horizon: &Bound<'_, PyAny>) -> PyResult<bool> {
    let gs = graphs_of(&graphs);
    let exec = ExecTimeMap::from_graphs(&gs);
    let h = to_rat(horizon)?;
    let budget = SearchBudget::default();
    let v = if gs.iter().all(|g| classify(g) == GraphClass::Chain) {
        feasible_chains(&gs, &exec, h, &budget)
    } else {
        feasible_trees(&gs, &exec, h, &budget)
    };
    v.map(|v| v.feasible).map_err(err)
}

/// Checks a link manifest entry; returns `(accepted, report as JSON)`.
#[pyfunction]
fn check_visibility(link: &str, graphs: Vec<PyRef<'_, PyGraph>>, horizon: &Bound<'_, PyAny>) -> PyResult<(bool, String)> {
    let l = link_from_json(link).map_err(err)?;
    let rep = check_link(&l, &graphs_of(&graphs), to_rat(horizon)?).map_err(err)?;
    Ok((rep.accepted(), serde_json::to_string(&rep).map_err(err)?))
}

#[pymodule]
fn tca(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySchedule>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(feasible, m)?)?;
    m.add_function(wrap_pyfunction!(check_visibility, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
