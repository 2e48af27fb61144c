//! Python bindings: scenes, scenario generation, strategy runs and the main
//! geometric queries. Points cross the boundary as `(x, y)` tuples; reports
//! and traces as JSON strings.

use cpex::geodesic;
use cpex::geometry::{Point, Scene as CoreScene};
use cpex::harness::{self, HarnessError, RunConfig, StrategyName};
use cpex::scenarios::{self, ScenarioBundle};
use cpex::visibility;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Xy = (f64, f64);

fn pt((x, y): Xy) -> Point {
    Point::new(x, y)
}

fn xy(p: &Point) -> Xy {
    (p.x, p.y)
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_err(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Input(m) => PyValueError::new_err(m),
        HarnessError::Internal(m) => PyRuntimeError::new_err(m),
    }
}

/// A polygonal room with colored holes and a start point on the outer wall.
#[pyclass(name = "Scene", module = "cpex_py", from_py_object)]
#[derive(Clone)]
struct Scene {
    inner: CoreScene,
}

#[pymethods]
impl Scene {
    /// `outer`: list of points; `holes`: list of `(color, points)`.
    #[new]
    fn new(outer: Vec<Xy>, holes: Vec<(u32, Vec<Xy>)>, start: Xy) -> PyResult<Self> {
        let holes = holes
            .into_iter()
            .map(|(color, v)| cpex::geometry::Hole { color, vertices: v.into_iter().map(pt).collect() })
            .collect();
        let mut s = CoreScene::new(outer.into_iter().map(pt).collect(), holes, pt(start));
        s.normalize_orientation();
        cpex::geometry::validate_scene(&s)
            .map_err(|v| value_err(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))?;
        Ok(Scene { inner: s })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreScene::from_json(text).map(|inner| Scene { inner }).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn outer(&self) -> Vec<Xy> {
        self.inner.outer.iter().map(xy).collect()
    }

    #[getter]
    fn holes(&self) -> Vec<(u32, Vec<Xy>)> {
        self.inner.holes.iter().map(|h| (h.color, h.vertices.iter().map(xy).collect())).collect()
    }

    #[getter]
    fn start(&self) -> Xy {
        xy(&self.inner.start)
    }

    fn h(&self) -> usize {
        self.inner.h()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    /// Counter-clockwise boundary of the region visible from `p`.
    fn visibility_polygon(&self, p: Xy) -> PyResult<Vec<Xy>> {
        let vp = visibility::visibility_polygon(&self.inner, pt(p)).map_err(value_err)?;
        Ok(vp.boundary.vertices.iter().map(xy).collect())
    }

    fn sees(&self, a: Xy, b: Xy) -> PyResult<bool> {
        visibility::sees(&self.inner, pt(a), pt(b)).map_err(value_err)
    }

    fn shortest_path(&self, a: Xy, b: Xy) -> PyResult<Vec<Xy>> {
        let p = geodesic::shortest_path(&self.inner, pt(a), pt(b)).map_err(value_err)?;
        Ok(p.vertices.iter().map(xy).collect())
    }

    /// Shortest closed tour from the start around hole `color`:
    /// `(length, vertices)`.
    fn encircling_tour(&self, color: u32) -> PyResult<(f64, Vec<Xy>)> {
        let t = geodesic::encircling_tour(&self.inner, color).map_err(value_err)?;
        Ok((t.length, t.tour.vertices.iter().map(xy).collect()))
    }

    fn svg(&self, trace: Option<Vec<Xy>>) -> String {
        let trace: Option<Vec<Point>> = trace.map(|t| t.into_iter().map(pt).collect());
        harness::render_svg(&self.inner, trace.as_deref(), &[])
    }

    fn __repr__(&self) -> String {
        format!("Scene(vertices={}, holes={})", self.inner.vertex_count(), self.inner.h())
    }
}

/// A scene together with bounds on its optimal watchman tour.
#[pyclass(name = "Scenario", module = "cpex_py", from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: ScenarioBundle,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ScenarioBundle::from_json(text).map(|inner| Scenario { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn from_scene(scene: &Scene, label: &str) -> Self {
        Scenario { inner: ScenarioBundle::from_scene(scene.inner.clone(), label) }
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn scene(&self) -> Scene {
        Scene { inner: self.inner.scene.clone() }
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    /// `(lower, upper)`; `upper` is `inf` when no tour was constructed.
    #[getter]
    fn opt_bounds(&self) -> (f64, f64) {
        (self.inner.opt_lower, self.inner.opt_upper)
    }

    /// Runs `"cpex"` or `"base"`; returns `(report_json, trace_json)`.
    #[pyo3(signature = (strategy = "cpex", config = None))]
    fn run(&self, py: Python<'_>, strategy: &str, config: Option<&str>) -> PyResult<(String, String)> {
        let strategy: StrategyName = strategy.parse().map_err(harness_err)?;
        let cfg: RunConfig = match config {
            Some(c) => serde_json::from_str(c).map_err(value_err)?,
            None => RunConfig::default(),
        };
        cfg.strategy.validate().map_err(value_err)?;
        let bundle = self.inner.clone();
        let out = py.detach(move || harness::run(&bundle, strategy, &cfg));
        Ok((out.report.to_json(), out.trace.to_json()))
    }
}

/// Generates a scenario of `family` with parameters given as a JSON object.
#[pyfunction]
#[pyo3(signature = (family, params = "{}"))]
fn generate(family: &str, params: &str) -> PyResult<Scenario> {
    let params: serde_json::Value = serde_json::from_str(params).map_err(value_err)?;
    harness::gen_family(family, &params).map(|inner| Scenario { inner }).map_err(harness_err)
}

/// Probe depth and value minimizing the one-hole lower bound.
#[pyfunction]
fn golden_search() -> (f64, f64) {
    scenarios::golden_search()
}

/// Runs a batch spec (JSON); returns the CSV table.
#[pyfunction(name = "bench")]
#[pyo3(signature = (spec, seed = None))]
fn run_bench(py: Python<'_>, spec: &str, seed: Option<u64>) -> PyResult<String> {
    let spec: harness::BenchSpec = serde_json::from_str(spec).map_err(value_err)?;
    let res = py.detach(move || harness::bench(&spec, seed));
    res.to_csv().map_err(harness_err)
}

#[pymodule]
fn cpex_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scene>()?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(golden_search, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
