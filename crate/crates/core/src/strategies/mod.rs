//! Online exploration strategies: a greedy base explorer for simple
//! polygons and the recursive safe/critical strategy for colored holes.

mod cpex;
mod env;
mod learn;
mod yards;

pub use cpex::{explore_frontyard, explore_safe, h_cpex, CpexError};
pub use env::{Environment, Event, EventKind, Interrupt, Trace, View, WalkEnd};
pub use learn::learn_encircling_online;
pub use yards::{explore_backyard, BackyardTask, FrontyardOutcome};

use crate::geodesic::{EncirclingTour, LambdaWitness, ARC_TOLERANCE, LAMBDA_RESOLUTION};
use crate::geometry::Color;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoleStatus {
    Discovered,
    Critical,
    Safe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoleRecord {
    pub color: Color,
    pub status: HoleStatus,
    pub tour: Option<EncirclingTour>,
    pub lambda: Option<f64>,
    pub witness: Option<LambdaWitness>,
}

impl HoleRecord {
    pub fn new(color: Color) -> Self {
        HoleRecord { color, status: HoleStatus::Discovered, tour: None, lambda: None, witness: None }
    }

    /// Applies a status change, rejecting transitions that are not allowed.
    pub fn transition(&mut self, to: HoleStatus) -> Result<(), String> {
        use HoleStatus::*;
        let ok = matches!((self.status, to), (Discovered, Critical) | (Discovered, Safe) | (Critical, Safe) | (_, Discovered))
            || self.status == to;
        if ok {
            self.status = to;
            Ok(())
        } else {
            Err(format!("hole {}: {:?} -> {:?} is not allowed", self.color, self.status, to))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Safety constant of the analysis.
    pub c: f64,
    /// Constant used when a hole is classified.
    pub c_classify: f64,
    /// Competitive constants `C_0, C_1, ...` used for frontyard budgets.
    pub c_table: Vec<f64>,
    pub lambda_resolution: usize,
    /// Chord deviation for discretized curves, relative to the diameter.
    pub arc_tolerance: f64,
    /// Half-width of barrier walls, relative to the diameter.
    pub barrier_width: f64,
    /// First search depth, relative to the diameter.
    pub search_unit: f64,
    /// Cells per diameter of the robot's coverage raster.
    pub raster_cells: usize,
}

/// `C_0 = 26.5`, then `(h + 22)!` capped to stay finite.
pub fn default_c_table(n: usize) -> Vec<f64> {
    let mut t = vec![26.5];
    for h in 1..n {
        let f: f64 = (1..=(h + 22)).map(|k| k as f64).product();
        t.push(f.min(1e300));
    }
    t
}

impl Default for Config {
    fn default() -> Self {
        Config {
            c: 5.0,
            c_classify: 6.0,
            c_table: default_c_table(8),
            lambda_resolution: LAMBDA_RESOLUTION,
            arc_tolerance: ARC_TOLERANCE,
            barrier_width: 1e-4,
            search_unit: 1e-3,
            raster_cells: 300,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if self.c < 1.0 {
            return Err("c must be at least 1".into());
        }
        if self.c_table.first().is_none_or(|&c0| c0 <= 0.0) {
            return Err("C_0 must be positive".into());
        }
        if self.c_table.windows(2).any(|w| w[1] < w[0]) {
            return Err("the C table must be nondecreasing".into());
        }
        Ok(())
    }

    /// `C_h`, repeating the last entry beyond the table.
    pub fn capital_c(&self, h: usize) -> f64 {
        *self.c_table.get(h).or(self.c_table.last()).unwrap_or(&26.5)
    }
}

/// Safe iff the tour is at most `c_classify` times the global λ.
pub fn classify(record: &HoleRecord, lambda_global: f64, cfg: &Config) -> HoleStatus {
    let len = record.tour.as_ref().map_or(f64::INFINITY, |t| t.length);
    classify_length(len, lambda_global, cfg.c_classify)
}

pub fn classify_length(tour_length: f64, lambda_global: f64, c_classify: f64) -> HoleStatus {
    if tour_length <= c_classify * lambda_global || tour_length == 0.0 {
        HoleStatus::Safe
    } else {
        HoleStatus::Critical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseOutcome {
    Explored,
    BudgetExceeded,
    HoleSighted(Color),
}

/// Greedy window chasing: repeatedly walks to the blocking vertex of the
/// nearest open window. Stops when a hole outside `known` comes into view.
pub fn base_explore(env: &mut Environment, budget: Option<f64>, known: &BTreeSet<Color>) -> Result<BaseOutcome, Interrupt> {
    let start = env.traveled();
    let stop = |c: Color| !known.contains(&c);
    loop {
        if let Some(c) = env.unrecorded(known) {
            return Ok(BaseOutcome::HoleSighted(c));
        }
        if budget.is_some_and(|b| env.traveled() - start > b) {
            return Ok(BaseOutcome::BudgetExceeded);
        }
        let mut cands: Vec<crate::geometry::Point> = env
            .windows()
            .iter()
            .filter(|w| !env.visited(w.blocking_vertex) && env.is_node(w.blocking_vertex) && !env.window_resolved(w))
            .map(|w| w.blocking_vertex)
            .collect();
        cands.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        cands.dedup();
        let dist = env.distances(&cands);
        let best = (0..cands.len()).filter(|&i| dist[i].is_finite()).min_by(|&i, &j| dist[i].total_cmp(&dist[j]));
        let Some(i) = best else {
            return Ok(BaseOutcome::Explored);
        };
        let v = cands[i];
        let path = env.path_to(v).expect("finite distance implies a path");
        match env.walk(&path, Some(&stop))? {
            WalkEnd::Completed => env.mark_visited(v),
            WalkEnd::Sighted(c) => return Ok(BaseOutcome::HoleSighted(c)),
        }
    }
}
