//! Python bindings. Structured results cross the boundary as plain dicts and
//! lists, built from the same serde types the CLI writes to disk.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use pursuit_core::catalog::{self, CopKind, RobberKind};
use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::engine::{self, GameConfig, MatchOptions, Recording};
use pursuit_core::evader::UnitTables;
use pursuit_core::{gen, lemma, separator, solver};

create_exception!(pursuit_py, PursuitError, PyException);

fn err(e: pursuit_core::Error) -> PyErr {
    PursuitError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| PursuitError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

/// A game board: a generated construction, a named family or a loaded file.
#[pyclass(frozen, module = "pursuit_py")]
struct Arena {
    inner: Arc<catalog::Arena>,
}

#[pymethods]
impl Arena {
    #[staticmethod]
    #[pyo3(signature = (green = 1000, spoke = 10, chain = 16))]
    fn build(py: Python<'_>, green: u32, spoke: u32, chain: u32) -> PyResult<Self> {
        let params = ConstructionParams::new(green, spoke, chain);
        let a = py.detach(|| catalog::Arena::build(params)).map_err(err)?;
        Ok(Arena { inner: Arc::new(a) })
    }

    /// `path:N`, `cycle:N`, `grid:WxH`, `triangulation:N[:seed]` and friends.
    #[staticmethod]
    fn family(name: &str) -> PyResult<Self> {
        let e = gen::family(name).map_err(err)?;
        Ok(Arena {
            inner: Arc::new(catalog::Arena::from_graph(e.graph, Some(e.rotation))),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Arena {
            inner: Arc::new(catalog::Arena::load(path).map_err(err)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Arena {
            inner: Arc::new(catalog::Arena::from_json(text).map_err(err)?),
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.graph.arc_count()
    }

    /// Arcs as `(from, to)` pairs.
    fn arcs(&self) -> Vec<(u32, u32)> {
        self.inner.graph.arcs().to_vec()
    }

    /// Construction parameters, or None for other graphs.
    fn params(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        self.inner
            .construction
            .as_ref()
            .map(|c| to_py(py, &c.params))
            .transpose()
    }

    fn admissibility(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        self.inner
            .construction
            .as_ref()
            .map(|c| to_py(py, &c.params.admissible()))
            .transpose()
    }

    /// Role of vertex `v` inside the construction.
    fn role(&self, py: Python<'_>, v: u32) -> PyResult<Option<Py<PyAny>>> {
        let Some(c) = &self.inner.construction else {
            return Ok(None);
        };
        self.inner.graph.check_vertex(pursuit_core::VertexId(v)).map_err(err)?;
        to_py(py, &c.role(pursuit_core::VertexId(v))).map(Some)
    }

    fn __repr__(&self) -> String {
        format!(
            "Arena(n={}, arcs={})",
            self.inner.vertex_count(),
            self.inner.graph.arc_count()
        )
    }
}

/// Exact game solution for `k` cops. Returns the verdict, the capture time
/// and an optimal cop placement when the cops win.
#[pyfunction]
#[pyo3(signature = (arena, k, max_states = None))]
fn solve(py: Python<'_>, arena: &Arena, k: usize, max_states: Option<u128>) -> PyResult<Py<PyAny>> {
    #[derive(Serialize)]
    struct Solved {
        k: usize,
        cop_win: bool,
        capture_time: Option<u16>,
        placement: Option<Vec<u32>>,
        states: usize,
    }
    let mut options = solver::SolveOptions::default();
    if let Some(m) = max_states {
        options.max_states = m;
    }
    let g = arena.inner.graph.clone();
    let r = py.detach(|| solver::solve(&g, k, &options)).map_err(err)?;
    let best = r.winning_placement();
    let out = Solved {
        k,
        cop_win: r.is_cop_win(),
        capture_time: best.as_ref().map(|b| b.1),
        placement: best.map(|b| b.0.iter().map(|v| v.0).collect()),
        states: r.state_count(),
    };
    to_py(py, &out)
}

/// Smallest `k ≤ k_max` that wins, or None.
#[pyfunction]
#[pyo3(signature = (arena, k_max = 3, max_states = None))]
fn cop_number(py: Python<'_>, arena: &Arena, k_max: usize, max_states: Option<u128>) -> PyResult<Option<usize>> {
    let mut options = solver::SolveOptions::default();
    if let Some(m) = max_states {
        options.max_states = m;
    }
    let g = arena.inner.graph.clone();
    py.detach(|| solver::cop_number(&g, k_max, &options)).map_err(err)
}

/// Planar separator `(A, B, C)` together with the outcome of the bound
/// check against `constant · √n`.
#[pyfunction]
#[pyo3(signature = (arena, constant = 4.0))]
fn separate(py: Python<'_>, arena: &Arena, constant: f64) -> PyResult<Py<PyAny>> {
    #[derive(Serialize)]
    struct Separated {
        a: Vec<u32>,
        b: Vec<u32>,
        c: Vec<u32>,
        ok: bool,
        problem: Option<String>,
    }
    let a = arena.inner.clone();
    let rot = a
        .rotation
        .clone()
        .ok_or_else(|| PursuitError::new_err("arena has no embedding"))?;
    let (r, check) = py
        .detach(|| {
            let r = separator::separate_graph(&a.graph, &rot)?;
            let check = r.check(&rot, constant);
            Ok((r, check))
        })
        .map_err(err)?;
    let out = Separated {
        ok: check.is_ok(),
        problem: check.err().map(|e| e.to_string()),
        a: r.a,
        b: r.b,
        c: r.c,
    };
    to_py(py, &out)
}

/// Plays one match. `cops` and `robber` take the CLI strategy names. With
/// `trace="summary"` the result is the summary dict, with `"full"` it is
/// `{"header", "records", "summary"}`.
#[pyfunction]
#[pyo3(signature = (arena, cops = "greedy", robber = "evader", k = None, max_rounds = Some(engine::DEFAULT_MAX_ROUNDS), seed = 0, trace = "summary"))]
#[allow(clippy::too_many_arguments)]
fn run_match(
    py: Python<'_>,
    arena: &Arena,
    cops: &str,
    robber: &str,
    k: Option<usize>,
    max_rounds: Option<u64>,
    seed: u64,
    trace: &str,
) -> PyResult<Py<PyAny>> {
    let cop_kind: CopKind = cops.parse().map_err(err)?;
    let robber_kind: RobberKind = robber.parse().map_err(err)?;
    let recording = match trace {
        "full" => Recording::Full,
        "summary" => Recording::Summary,
        other => {
            return Err(PursuitError::new_err(format!(
                "trace must be full or summary, not {other}"
            )))
        }
    };
    let a = arena.inner.clone();
    let k = k.or_else(|| cop_kind.required_cops(&a)).unwrap_or(3);
    let t = py
        .detach(|| {
            let config = GameConfig::new(a.graph.clone(), k, max_rounds)?;
            let mut c = cop_kind.build(&a, k)?;
            let mut r = robber_kind.build(&a, k)?;
            Ok(engine::run_match(
                &config,
                c.as_mut(),
                r.as_mut(),
                MatchOptions { seed, recording },
            ))
        })
        .map_err(err)?;
    match recording {
        Recording::Full => to_py(py, &t),
        Recording::Summary => to_py(py, &t.summary),
    }
}

fn lemma_setup(green: u32, spoke: u32, chain: u32) -> pursuit_core::Result<(Construction, UnitTables)> {
    let c = Construction::assemble(ConstructionParams::new(green, spoke, chain))?;
    let t = UnitTables::new(&c)?;
    Ok((c, t))
}

/// Exhaustive center-escape check for `c` cops inside one unit.
#[pyfunction]
#[pyo3(signature = (c = 1, horizon = None, cross_check = 0, green = 1000, spoke = 10, chain = 16))]
fn verify_center_escape(
    py: Python<'_>,
    c: usize,
    horizon: Option<u32>,
    cross_check: usize,
    green: u32,
    spoke: u32,
    chain: u32,
) -> PyResult<Py<PyAny>> {
    let r = py
        .detach(|| {
            let (arena, tables) = lemma_setup(green, spoke, chain)?;
            lemma::verify_center_escape(&arena, &tables, c, horizon.unwrap_or(spoke), cross_check)
        })
        .map_err(err)?;
    to_py(py, &r)
}

/// Exhaustive perimeter-return check against one cop.
#[pyfunction]
#[pyo3(signature = (horizon = None, green = 1000, spoke = 10, chain = 16))]
fn verify_return(py: Python<'_>, horizon: Option<u32>, green: u32, spoke: u32, chain: u32) -> PyResult<Py<PyAny>> {
    let r = py
        .detach(|| {
            let (arena, tables) = lemma_setup(green, spoke, chain)?;
            let h = horizon.unwrap_or(arena.params.return_budget() as u32);
            lemma::verify_return(&arena, &tables, h)
        })
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn pursuit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PursuitError", m.py().get_type::<PursuitError>())?;
    m.add_class::<Arena>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(cop_number, m)?)?;
    m.add_function(wrap_pyfunction!(separate, m)?)?;
    m.add_function(wrap_pyfunction!(run_match, m)?)?;
    m.add_function(wrap_pyfunction!(verify_center_escape, m)?)?;
    m.add_function(wrap_pyfunction!(verify_return, m)?)?;
    Ok(())
}
