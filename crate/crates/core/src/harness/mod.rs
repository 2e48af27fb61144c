//! Running strategies on scenarios: reports, coverage checks, SVG output and
//! batch benchmarks.

mod bench;
mod svg;

pub use bench::{bench, bundled_suite, BenchResult, BenchRow, BenchSpec, BenchSummary, RunSpec, Thresholds};
pub use svg::{overlays_from_trace, render_svg, Overlay};

use crate::coverage::{free_mask, Raster};
use crate::geometry::{Point, Scene, Segment};
use crate::scenarios::{
    gen_four_holes, gen_general_lb, gen_multihole_lb, gen_orthogonal_lb, gen_orthogonal_lb_colored, gen_random,
    golden_search, CutSide, ScenarioBundle,
};
use crate::strategies::{base_explore, h_cpex, Config, Environment, Event, Trace};
use crate::visibility::visibility_polygon;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("input error: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Input(_) => 2,
            HarnessError::Internal(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Base,
    Cpex,
}

impl FromStr for StrategyName {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(StrategyName::Base),
            "cpex" => Ok(StrategyName::Cpex),
            _ => Err(HarnessError::Input(format!("unknown strategy {s:?} (expected base or cpex)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub strategy: Config,
    /// Recursion levels for cpex; defaults to the scene's hole count.
    pub h_max: Option<usize>,
    pub coverage_threshold: f64,
    /// Coverage grid spacing relative to the scene diameter.
    pub coverage_resolution: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { strategy: Config::default(), h_max: None, coverage_threshold: 0.999, coverage_resolution: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub strategy: StrategyName,
    pub trace_length: f64,
    pub opt_lower: f64,
    /// `None` when no finite upper bound is known.
    pub opt_upper: Option<f64>,
    /// `[length / upper, length / lower]`; `None` stands for infinity.
    pub ratio_interval: [Option<f64>; 2],
    /// The robot moved although the optimal tour is empty.
    pub ratio_unbounded: bool,
    pub coverage_fraction: f64,
    pub unseen_witness: Option<Point>,
    pub returned_to_start: bool,
    pub events: Vec<Event>,
    pub failure: Option<String>,
    pub wall_time: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Coverage reached, back at the start, no strategy failure.
    pub fn passed(&self, threshold: f64) -> bool {
        self.failure.is_none() && self.returned_to_start && self.coverage_fraction >= threshold
    }
}

pub struct RunOutput {
    pub report: RunReport,
    pub trace: Trace,
}

/// Ratio interval of a tour of length `len` against `[lower, upper]`, with
/// the conventions for empty optimal tours.
pub fn ratio_interval(len: f64, lower: f64, upper: f64) -> ([Option<f64>; 2], bool) {
    let div = |a: f64, b: f64| -> Option<f64> {
        if a == 0.0 {
            Some(if b == 0.0 { 1.0 } else { 0.0 })
        } else if b == 0.0 {
            None
        } else {
            Some(a / b)
        }
    };
    if len > 0.0 && upper == 0.0 {
        return ([None, None], true);
    }
    let lo = if upper.is_infinite() { Some(0.0) } else { div(len, upper) };
    let hi = if len == 0.0 && lower == 0.0 { lo } else { div(len, lower) };
    ([lo, hi], false)
}

/// Runs one strategy on a scenario. Strategy failures end up in the report
/// together with the partial trace.
pub fn run(bundle: &ScenarioBundle, strategy: StrategyName, cfg: &RunConfig) -> RunOutput {
    let t0 = Instant::now();
    let scene = &bundle.scene;
    let mut env = Environment::new(scene.clone(), cfg.strategy.raster_cells);
    let failure = match strategy {
        StrategyName::Cpex => {
            let h = cfg.h_max.unwrap_or(scene.h());
            h_cpex(&mut env, h, &cfg.strategy).err().map(|e| e.to_string())
        }
        StrategyName::Base => {
            let all: BTreeSet<_> = scene.colors().into_iter().collect();
            base_explore(&mut env, None, &all).and_then(|_| env.go_home()).err().map(|e| e.to_string())
        }
    };
    let trace = env.into_trace();
    let diam = scene.diameter();
    let (coverage, witness) = coverage_report(&trace.path, scene, cfg.coverage_resolution * diam);
    let len = trace.total;
    let (interval, unbounded) = ratio_interval(len, bundle.opt_lower, bundle.opt_upper);
    let back = trace.path.last().is_some_and(|&q| q.dist(scene.start) <= 1e-9 * (1.0 + diam));
    let report = RunReport {
        label: bundle.label.clone(),
        strategy,
        trace_length: len,
        opt_lower: bundle.opt_lower,
        opt_upper: bundle.opt_upper.is_finite().then_some(bundle.opt_upper),
        ratio_interval: interval,
        ratio_unbounded: unbounded,
        coverage_fraction: coverage,
        unseen_witness: witness,
        returned_to_start: back,
        events: trace.events.clone(),
        failure,
        wall_time: t0.elapsed().as_secs_f64(),
    };
    RunOutput { report, trace }
}

/// Union of the visibility polygons at the trace vertices.
pub fn seen_raster(trace: &[Point], scene: &Scene, resolution: f64) -> Raster {
    let mut seen = Raster::for_scene(scene, resolution);
    let mut pts: Vec<Point> = trace.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    for q in pts {
        if let Ok(vp) = visibility_polygon(scene, q) {
            seen.fill(&[&vp.boundary.vertices]);
        }
    }
    seen
}

/// Fraction of free-space grid samples seen from the trace vertices, and an
/// unseen sample if there is one.
pub fn coverage_report(trace: &[Point], scene: &Scene, resolution: f64) -> (f64, Option<Point>) {
    let free = free_mask(scene, resolution);
    let seen = seen_raster(trace, scene, resolution);
    let total = free.count();
    if total == 0 {
        return (1.0, None);
    }
    let frac = free.count_and(&seen) as f64 / total as f64;
    (frac, free.first_missing(&seen))
}

/// Fraction of boundary sample points (`per_edge` per edge, strictly inside
/// each edge) seen from at least one of `viewpoints`.
pub fn edge_coverage(scene: &Scene, viewpoints: &[Point], per_edge: usize) -> f64 {
    let vps: Vec<_> = viewpoints.iter().filter_map(|&v| visibility_polygon(scene, v).ok()).collect();
    let tol = 1e-7 * (1.0 + scene.diameter());
    let mut seen = 0;
    let mut total = 0;
    for e in scene.edges() {
        let seg = Segment::new(e.a, e.b);
        for k in 0..per_edge {
            let q = seg.at((k as f64 + 0.5) / per_edge as f64);
            total += 1;
            if vps.iter().any(|vp| vp.contains(q, tol)) {
                seen += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        seen as f64 / total as f64
    }
}

fn num(params: &Value, key: &str, default: f64) -> Result<f64, HarnessError> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| HarnessError::Input(format!("{key} must be a number"))),
    }
}

fn int(params: &Value, key: &str, default: u64) -> Result<u64, HarnessError> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v.as_u64().ok_or_else(|| HarnessError::Input(format!("{key} must be a non-negative integer"))),
    }
}

/// The generator families by name, with parameters from a JSON object.
pub fn gen_family(family: &str, params: &Value) -> Result<ScenarioBundle, HarnessError> {
    let input = |e: crate::scenarios::ScenarioError| match e {
        crate::scenarios::ScenarioError::Params(m) => HarnessError::Input(m),
        e => HarnessError::Internal(e.to_string()),
    };
    match family {
        "general-lb" => {
            let alpha = match params.get("alpha") {
                None | Some(Value::Null) => golden_search().0,
                Some(Value::String(s)) if s == "golden" => golden_search().0,
                Some(v) => v.as_f64().ok_or_else(|| HarnessError::Input("alpha must be a number or \"golden\"".into()))?,
            };
            let side = match params.get("side").and_then(Value::as_str).unwrap_or("left") {
                "left" => CutSide::LeftCut,
                "right" => CutSide::RightCut,
                s => return Err(HarnessError::Input(format!("side must be left or right, got {s:?}"))),
            };
            gen_general_lb(alpha, side, num(params, "eps", 1e-4)?).map_err(input)
        }
        "orth-lb" => {
            let d = num(params, "d", 100.0)?;
            let depth = int(params, "depth", 1)? as usize;
            if params.get("colored").and_then(Value::as_bool).unwrap_or(false) {
                gen_orthogonal_lb_colored(d, depth).map_err(input)
            } else {
                gen_orthogonal_lb(d, depth).map_err(input)
            }
        }
        "multihole-lb" => gen_multihole_lb(int(params, "h", 2)? as usize).map_err(input),
        "four-holes" => Ok(gen_four_holes()),
        "random" => {
            let h = int(params, "h", 1)? as usize;
            let n = int(params, "n", 30)? as usize;
            gen_random(h, n, int(params, "seed", 0)?).map_err(input)
        }
        f => Err(HarnessError::Input(format!("unknown family {f:?}"))),
    }
}
