//! Exploring behind fences: angle-hull pursuit on the left of the tour,
//! a single sweep over the right-hand vertices, semicircle approaches to
//! whatever is still hidden.

use super::{Config, Environment, EventKind, Interrupt};
use crate::geodesic::{angle_hull, EncirclingTour, Fence};
use crate::geometry::{Color, Point, Polyline, Segment};
use crate::search::{hidden_edge, semicircle_approach, star_search, Probe, SearchRay};
use crate::visibility::{Side, Window};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontyardOutcome {
    Explored,
    PromotedSafe,
}

/// A critical hole whose frontyard is done.
#[derive(Clone, Debug)]
pub struct BackyardTask {
    pub color: Color,
    pub fence: Fence,
    pub tour: EncirclingTour,
    pub apex_index: usize,
}

fn key(p: Point) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

fn seg_dist(a: Segment, b: Segment) -> f64 {
    if crate::geometry::proper_crossing(a.a, a.b, b.a, b.b) {
        return 0.0;
    }
    [a.dist_to_point(b.a), a.dist_to_point(b.b), b.dist_to_point(a.a), b.dist_to_point(a.b)]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

fn chain_dist(chain: &[Point], q: Point) -> f64 {
    chain.windows(2).map(|w| Segment::new(w[0], w[1]).dist_to_point(q)).fold(f64::INFINITY, f64::min)
}

struct Shared<'a> {
    env: &'a mut Environment,
    interrupt: Option<Interrupt>,
}

struct SideRay<'s, 'a> {
    id: usize,
    path: Vec<Point>,
    cum: Vec<f64>,
    at: f64,
    targets: Vec<Window>,
    fence: Segment,
    touch_tol: f64,
    touched: bool,
    shared: &'s RefCell<Shared<'a>>,
}

impl<'s, 'a> SideRay<'s, 'a> {
    fn new(id: usize, path: Vec<Point>, targets: Vec<Window>, fence: Segment, touch_tol: f64, shared: &'s RefCell<Shared<'a>>) -> Self {
        let mut cum = vec![0.0];
        for w in path.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(w[1]));
        }
        SideRay { id, path, cum, at: 0.0, targets, fence, touch_tol, touched: false, shared }
    }

    fn done(&self, env: &Environment) -> bool {
        self.targets.iter().all(|w| env.visited(w.blocking_vertex) || env.window_resolved(w))
    }

    fn point_at(&self, d: f64) -> Point {
        if self.path.len() < 2 {
            return self.path[0];
        }
        let k = self.cum.partition_point(|&c| c <= d).clamp(1, self.path.len() - 1);
        let l = self.cum[k] - self.cum[k - 1];
        if l == 0.0 {
            self.path[k]
        } else {
            self.path[k - 1].lerp(self.path[k], ((d - self.cum[k - 1]) / l).clamp(0.0, 1.0))
        }
    }
}

impl SearchRay for SideRay<'_, '_> {
    fn id(&self) -> usize {
        self.id
    }

    fn advance(&mut self, depth: f64) -> Probe {
        let mut sh = self.shared.borrow_mut();
        if sh.interrupt.is_some() {
            return Probe { found: true, reached: self.at, traveled: 0.0 };
        }
        let total = *self.cum.last().unwrap();
        let target = depth.min(total);
        let t0 = sh.env.traveled();
        if self.done(sh.env) {
            return Probe { found: true, reached: self.at, traveled: 0.0 };
        }
        let mut stops: Vec<f64> = self.cum.iter().copied().filter(|&c| c > self.at && c < target).collect();
        stops.push(target);
        for d in stops {
            let from = sh.env.position();
            let q = self.point_at(d);
            if let Err(e) = sh.env.follow(&[q]) {
                sh.interrupt = Some(e);
                return Probe { found: true, reached: self.at, traveled: sh.env.traveled() - t0 };
            }
            sh.env.settle();
            self.at = d;
            let here = sh.env.position();
            if seg_dist(Segment::new(from, here), self.fence) <= self.touch_tol {
                self.touched = true;
            }
            for w in &self.targets {
                if here == w.blocking_vertex {
                    sh.env.mark_visited(here);
                }
            }
            if self.done(sh.env) {
                return Probe { found: true, reached: d, traveled: sh.env.traveled() - t0 };
            }
        }
        Probe { found: target >= total, reached: self.at, traveled: sh.env.traveled() - t0 }
    }

    fn retreat(&mut self) -> f64 {
        let mut sh = self.shared.borrow_mut();
        if sh.interrupt.is_some() {
            return 0.0;
        }
        let t0 = sh.env.traveled();
        let mut back: Vec<Point> =
            self.cum.iter().zip(&self.path).filter(|(&c, _)| c < self.at).map(|(_, &p)| p).collect();
        back.reverse();
        if let Err(e) = sh.env.follow(&back) {
            sh.interrupt = Some(e);
        }
        sh.env.settle();
        self.at = 0.0;
        sh.env.traveled() - t0
    }
}

/// Open windows whose blocking vertex lies on the backyard boundary.
fn backyard_targets(env: &Environment, fence: &Fence) -> Vec<Window> {
    let verts: HashSet<(u64, u64)> = fence.backyard.rings().flat_map(|(_, r)| r.iter().map(|&p| key(p))).collect();
    let mut seen = HashSet::new();
    env.windows()
        .into_iter()
        .filter(|w| verts.contains(&key(w.blocking_vertex)) && env.is_node(w.blocking_vertex))
        .filter(|w| !env.visited(w.blocking_vertex) && !env.window_resolved(w))
        .filter(|w| seen.insert((key(w.blocking_vertex), key(w.chord.b))))
        .collect()
}

/// Nearest-neighbour sweep over the target vertices along known paths.
fn sweep_path(env: &Environment, from: Point, targets: &[Window]) -> Vec<Point> {
    let mut left: Vec<Point> = targets.iter().map(|w| w.blocking_vertex).collect();
    left.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    left.dedup();
    let mut path = vec![from];
    let mut cur = from;
    while !left.is_empty() {
        let best = left
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| env.path_between(cur, v).map(|p| (i, p)))
            .min_by(|a, b| plen(&a.1).total_cmp(&plen(&b.1)));
        let Some((i, p)) = best else { break };
        path.extend(p.into_iter().skip(1));
        cur = left.remove(i);
    }
    path
}

fn plen(p: &[Point]) -> f64 {
    p.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Explores the backyards of the given fences. Returns a hole that must be
/// promoted to safe because the fence was reached from both sides.
pub fn explore_backyard(env: &mut Environment, tasks: &[BackyardTask], cfg: &Config) -> Result<Option<Color>, Interrupt> {
    if tasks.is_empty() {
        return Ok(None);
    }
    env.event(EventKind::PhaseChange { name: "backyard".into() });
    env.go_home()?;
    let s = env.scene().start;
    let diam = env.scene().diameter();
    let tol = cfg.arc_tolerance * diam;
    let touch_tol = 1e-3 * diam;
    let mut plans = vec![];
    for t in tasks {
        let targets = backyard_targets(env, &t.fence);
        if targets.is_empty() {
            continue;
        }
        let v = &t.tour.tour.vertices;
        let i0 = t.apex_index.min(v.len() - 1);
        let left_chain: Vec<Point> = v[..=i0].to_vec();
        let mut right_chain: Vec<Point> = v[i0..].to_vec();
        right_chain.push(v[0]);
        let (lt, rt): (Vec<Window>, Vec<Window>) = targets
            .into_iter()
            .partition(|w| chain_dist(&left_chain, w.blocking_vertex) <= chain_dist(&right_chain, w.blocking_vertex));
        let left_path = if lt.is_empty() {
            vec![s]
        } else if left_chain.len() >= 2 {
            let hull = angle_hull(env.scene(), &Polyline::open(left_chain.clone()), Side::Right, tol);
            let mut p = vec![s];
            p.extend(hull.curve.vertices.iter().copied());
            p
        } else {
            sweep_path(env, s, &lt)
        };
        let right_path = sweep_path(env, s, &rt);
        plans.push((t.color, t.fence.segment, lt, left_path, rt, right_path));
    }
    if plans.is_empty() {
        return Ok(None);
    }
    let unit = cfg.search_unit * diam;
    let cap = 10.0 * env.scene().perimeter()
        + plans.iter().map(|p| plen(&p.3) + plen(&p.5)).sum::<f64>();
    let shared = RefCell::new(Shared { env, interrupt: None });
    let mut rays: Vec<SideRay> = vec![];
    for (k, (_, fence, lt, lp, rt, rp)) in plans.iter().enumerate() {
        rays.push(SideRay::new(2 * k, lp.clone(), lt.clone(), *fence, touch_tol, &shared));
        rays.push(SideRay::new(2 * k + 1, rp.clone(), rt.clone(), *fence, touch_tol, &shared));
    }
    let mut touched = vec![false; rays.len()];
    let mut remaining: Vec<usize> = (0..rays.len()).collect();
    while !remaining.is_empty() {
        let found = {
            let mut refs: Vec<&mut dyn SearchRay> = vec![];
            for (i, r) in rays.iter_mut().enumerate() {
                if remaining.contains(&i) {
                    refs.push(r as &mut dyn SearchRay);
                }
            }
            star_search(&mut refs, unit, cap)
        };
        if let Some(e) = shared.borrow_mut().interrupt.take() {
            return Err(e);
        }
        let Ok(out) = found else {
            break;
        };
        let r = out.found_on;
        rays[r].retreat();
        if let Some(e) = shared.borrow_mut().interrupt.take() {
            return Err(e);
        }
        remaining.retain(|&i| i != r);
    }
    for (i, r) in rays.iter().enumerate() {
        touched[i] = r.touched && !r.targets.is_empty();
    }
    let left_open: Vec<Window> = rays.iter().step_by(2).flat_map(|r| r.targets.clone()).collect();
    drop(rays);
    let env = shared.into_inner().env;
    for (k, plan) in plans.iter().enumerate() {
        if touched[2 * k] && touched[2 * k + 1] {
            env.go_home()?;
            return Ok(Some(plan.0));
        }
    }
    // Whatever is still hidden on the left: approach its vertex on a semicircle.
    for w in left_open {
        if env.visited(w.blocking_vertex) || env.window_resolved(&w) {
            continue;
        }
        let Some(path) = env.path_to(w.blocking_vertex) else { continue };
        if path.len() >= 2 {
            env.walk(&path[..path.len() - 1], None)?;
        }
        if let Some(hidden) = hidden_edge(env.world(), &w) {
            semicircle_approach(env, w.blocking_vertex, hidden, tol);
            env.settle();
            if let Some(i) = env.interrupted() {
                return Err(i);
            }
        }
    }
    env.go_home()?;
    Ok(None)
}
