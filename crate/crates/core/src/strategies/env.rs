//! The simulated robot: it moves through the current scene, senses the real
//! one, and keeps a roadmap of space it has actually seen.

use super::HoleStatus;
use crate::coverage::Raster;
use crate::geodesic::VisGraph;
use crate::geometry::{Color, Point, Scene, Segment};
use crate::search::Walker;
use crate::visibility::{sees_unchecked, visibility_polygon, VisibilityPolygon, Window};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    HoleDiscovered { color: Color },
    Classified { color: Color, status: HoleStatus },
    FenceBuilt { color: Color, fence: Segment, apex: Point, x: f64 },
    PhaseChange { name: String },
    RecursionEnter { h: usize },
    RecursionExit { h: usize },
    Flagged { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub at_length: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub path: Vec<Point>,
    pub events: Vec<Event>,
    pub total: f64,
}

impl Trace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }

    pub fn flagged(&self) -> bool {
        self.events.iter().any(|e| matches!(e.kind, EventKind::Flagged { .. }))
    }
}

/// Reasons a strategy stops early.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Interrupt {
    #[error("budget {0} exceeded")]
    Budget(u32),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A stored observation.
#[derive(Clone, Debug)]
pub struct View {
    pub at: Point,
    pub vp: VisibilityPolygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkEnd {
    Completed,
    Sighted(Color),
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `p` itself when free, else the closest free point on a few rings around
/// it. Observations made where a barrier wall now stands stay usable.
fn free_nearby(scene: &Scene, p: Point, diam: f64) -> Option<Point> {
    if scene.is_free(p) {
        return Some(p);
    }
    for k in 0..10 {
        let r = 1e-4 * diam * 2f64.powi(k);
        for j in 0..16 {
            let a = j as f64 * std::f64::consts::TAU / 16.0;
            let q = Point::new(p.x + r * a.cos(), p.y + r * a.sin());
            if scene.is_free(q) && sees_unchecked(scene, q, q.lerp(p, 0.5)) {
                return Some(q);
            }
        }
    }
    None
}

fn key(p: Point) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

/// Nodes are reflex vertices of the current scene and observation points.
/// An edge always has an observation point at one end whose view contains
/// the other end, so every roadmap path runs through seen space.
#[derive(Clone, Debug, Default)]
struct Roadmap {
    pts: Vec<Point>,
    index: HashMap<(u64, u64), usize>,
    view_of: Vec<Option<usize>>,
    adj: Vec<Vec<(usize, f64)>>,
    edges: HashSet<(usize, usize)>,
}

impl Roadmap {
    fn node(&mut self, p: Point) -> usize {
        if let Some(&i) = self.index.get(&key(p)) {
            return i;
        }
        self.pts.push(p);
        self.view_of.push(None);
        self.adj.push(vec![]);
        self.index.insert(key(p), self.pts.len() - 1);
        self.pts.len() - 1
    }

    fn link(&mut self, i: usize, j: usize) {
        let k = (i.min(j), i.max(j));
        if i != j && self.edges.insert(k) {
            let d = self.pts[i].dist(self.pts[j]);
            self.adj[i].push((j, d));
            self.adj[j].push((i, d));
        }
    }
}

pub struct Environment {
    world: Scene,
    scenes: Vec<Scene>,
    graphs: Vec<VisGraph>,
    position: Point,
    trace: Trace,
    views: Vec<View>,
    last_vp: Option<VisibilityPolygon>,
    seen: Raster,
    sighted: Vec<Color>,
    visited: HashSet<(u64, u64)>,
    roadmap: Roadmap,
    budgets: Vec<(u32, f64)>,
    next_budget: u32,
    tripped: Option<u32>,
    tol: f64,
}

impl Environment {
    /// Places the robot at the scene's start and takes the first look.
    pub fn new(scene: Scene, raster_cells: usize) -> Environment {
        let diam = scene.diameter();
        let cell = diam.max(1e-9) / raster_cells.max(8) as f64;
        let mut env = Environment {
            position: scene.start,
            trace: Trace { path: vec![scene.start], events: vec![], total: 0.0 },
            graphs: vec![VisGraph::new(&scene)],
            seen: Raster::for_scene(&scene, cell),
            scenes: vec![scene.clone()],
            world: scene,
            views: vec![],
            last_vp: None,
            sighted: vec![],
            visited: HashSet::new(),
            roadmap: Roadmap::default(),
            budgets: vec![],
            next_budget: 0,
            tripped: None,
            tol: 1e-7 * (1.0 + diam),
        };
        env.rebuild_roadmap();
        env.observe(true);
        env
    }

    pub fn world(&self) -> &Scene {
        &self.world
    }

    /// The scene movement is currently confined to.
    pub fn scene(&self) -> &Scene {
        self.scenes.last().unwrap()
    }

    pub fn graph(&self) -> &VisGraph {
        self.graphs.last().unwrap()
    }

    pub fn position(&self) -> Point {
        self.position
    }

    pub fn traveled(&self) -> f64 {
        self.trace.total
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Holes seen so far, in order of first sighting.
    pub fn sighted(&self) -> &[Color] {
        &self.sighted
    }

    pub fn event(&mut self, kind: EventKind) {
        self.trace.events.push(Event { at_length: self.trace.total, kind });
    }

    pub fn flag(&mut self, reason: impl Into<String>) {
        self.event(EventKind::Flagged { reason: reason.into() });
    }

    pub fn push_scene(&mut self, scene: Scene) {
        self.graphs.push(VisGraph::new(&scene));
        self.scenes.push(scene);
        self.rebuild_roadmap();
    }

    pub fn scene_depth(&self) -> usize {
        self.scenes.len()
    }

    /// Pops scenes until `depth` remain.
    pub fn restore_scenes(&mut self, depth: usize) {
        while self.scenes.len() > depth.max(1) {
            self.pop_scene();
        }
    }

    pub fn pop_scene(&mut self) {
        if self.scenes.len() > 1 {
            self.scenes.pop();
            self.graphs.pop();
            self.rebuild_roadmap();
        }
    }

    /// Starts a travel budget of `amount` from now; returns its id.
    pub fn push_budget(&mut self, amount: f64) -> u32 {
        self.next_budget += 1;
        self.budgets.push((self.next_budget, self.trace.total + amount));
        self.next_budget
    }

    pub fn pop_budget(&mut self, id: u32) {
        self.budgets.retain(|b| b.0 != id);
        if self.tripped == Some(id) {
            self.tripped = None;
        }
    }

    pub fn interrupted(&self) -> Option<Interrupt> {
        self.tripped.map(Interrupt::Budget)
    }

    fn rebuild_roadmap(&mut self) {
        let scene = self.scenes.last().unwrap().clone();
        let mut rm = Roadmap::default();
        for (r, i) in scene.reflex_vertices() {
            rm.node(scene.ring(r)[i]);
        }
        // Vertex pairs joined through space already seen: barrier walls can
        // cut off every observation point between them.
        let n = rm.pts.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (rm.pts[i], rm.pts[j]);
                if self.seen_segment(a, b) && sees_unchecked(&scene, a, b) {
                    rm.link(i, j);
                }
            }
        }
        let mut anchors = vec![];
        let diam = scene.diameter();
        for (k, v) in self.views.iter().enumerate() {
            if let Some(at) = free_nearby(&scene, v.at, diam) {
                let id = rm.node(at);
                if rm.view_of[id].is_none() {
                    rm.view_of[id] = Some(k);
                    anchors.push(id);
                }
            }
        }
        self.roadmap = rm;
        for id in anchors {
            self.connect_anchor(id);
        }
    }

    fn connect_anchor(&mut self, id: usize) {
        let scene = self.scenes.last().unwrap();
        let rm = &mut self.roadmap;
        let k = rm.view_of[id].unwrap();
        let a = rm.pts[id];
        let vp = &self.views[k].vp;
        let mut links = vec![];
        for j in 0..rm.pts.len() {
            if j == id {
                continue;
            }
            let q = rm.pts[j];
            let direct = vp.contains(q, self.tol);
            let reverse = rm.view_of[j].is_some_and(|kj| self.views[kj].vp.contains(a, self.tol));
            if (direct || reverse) && sees_unchecked(scene, a, q) {
                links.push(j);
            }
        }
        for j in links {
            rm.link(id, j);
        }
    }

    fn observe(&mut self, anchor: bool) -> Vec<Color> {
        let vp = match visibility_polygon(&self.world, self.position) {
            Ok(vp) => vp,
            Err(e) => {
                self.flag(format!("visibility query failed at {}: {e}", self.position));
                return vec![];
            }
        };
        self.seen.fill(&[&vp.boundary.vertices]);
        let mut new = vec![];
        for c in vp.hole_colors() {
            if !self.sighted.contains(&c) {
                self.sighted.push(c);
                new.push(c);
                self.event(EventKind::HoleDiscovered { color: c });
            }
        }
        self.last_vp = Some(vp);
        if anchor {
            self.anchor_here();
        }
        new
    }

    /// Stores the latest observation and links it into the roadmap.
    fn anchor_here(&mut self) {
        let Some(vp) = self.last_vp.clone() else { return };
        if vp.viewpoint != self.position {
            return;
        }
        if let Some(&id) = self.roadmap.index.get(&key(self.position)) {
            if self.roadmap.view_of[id].is_some() {
                return;
            }
        }
        self.views.push(View { at: self.position, vp });
        let id = self.roadmap.node(self.position);
        self.roadmap.view_of[id] = Some(self.views.len() - 1);
        self.connect_anchor(id);
    }

    fn step(&mut self, q: Point) {
        self.trace.total += self.position.dist(q);
        self.trace.path.push(q);
        self.position = q;
        if self.tripped.is_none() {
            self.tripped = self.budgets.iter().find(|b| self.trace.total > b.1).map(|b| b.0);
        }
    }

    /// Walks a polyline, observing at every vertex. With `stop`, halts at
    /// the first sighting of a current-scene hole that `stop` accepts.
    pub fn walk(&mut self, path: &[Point], stop: Option<&dyn Fn(Color) -> bool>) -> Result<WalkEnd, Interrupt> {
        if let Some(i) = self.interrupted() {
            return Err(i);
        }
        let mut pts: Vec<Point> = path.to_vec();
        pts.dedup();
        while pts.first() == Some(&self.position) {
            pts.remove(0);
        }
        for (k, &q) in pts.iter().enumerate() {
            if !sees_unchecked(self.scene(), self.position, q) {
                return Err(Interrupt::Internal(format!("blocked move {} -> {}", self.position, q)));
            }
            self.step(q);
            let last = k + 1 == pts.len();
            let new = self.observe(last);
            if let Some(i) = self.interrupted() {
                self.anchor_here();
                return Err(i);
            }
            if let Some(f) = stop {
                let current: Vec<Color> = self.scene().colors();
                if let Some(&c) = new.iter().find(|c| current.contains(c) && f(**c)) {
                    self.anchor_here();
                    return Ok(WalkEnd::Sighted(c));
                }
            }
        }
        self.anchor_here();
        Ok(WalkEnd::Completed)
    }

    /// Follows a precomputed curve, detouring along shortest paths where a
    /// discretized piece clips the boundary.
    pub fn follow(&mut self, curve: &[Point]) -> Result<(), Interrupt> {
        for &q in curve {
            if q == self.position || !self.scene().is_free(q) {
                continue;
            }
            if sees_unchecked(self.scene(), self.position, q) {
                self.walk(&[q], None)?;
            } else {
                let (d, p) = self.graph().shortest_path(self.position, q);
                if d.is_finite() {
                    self.walk(&p.vertices, None)?;
                }
            }
        }
        Ok(())
    }

    /// Shortest roadmap distances from the robot (which is always a node).
    fn field(&self) -> (Vec<f64>, Vec<usize>) {
        self.field_from(self.position)
    }

    fn field_from(&self, from: Point) -> (Vec<f64>, Vec<usize>) {
        let rm = &self.roadmap;
        let n = rm.pts.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let Some(&src) = rm.index.get(&key(from)) else {
            return (dist, pred);
        };
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, src));
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &rm.adj[u] {
                if d + w < dist[v] {
                    dist[v] = d + w;
                    pred[v] = u;
                    heap.push(Item(d + w, v));
                }
            }
        }
        (dist, pred)
    }

    /// Roadmap distances from the robot to each point (∞ when unknown).
    pub fn distances(&self, targets: &[Point]) -> Vec<f64> {
        let (dist, _) = self.field();
        targets.iter().map(|p| self.roadmap.index.get(&key(*p)).map_or(f64::INFINITY, |&i| dist[i])).collect()
    }

    /// Known path from the robot to a roadmap node.
    pub fn path_to(&self, target: Point) -> Option<Vec<Point>> {
        self.path_between(self.position, target)
    }

    /// Known path between two roadmap nodes.
    pub fn path_between(&self, from: Point, target: Point) -> Option<Vec<Point>> {
        if target == from {
            return Some(vec![target]);
        }
        let (dist, pred) = self.field_from(from);
        let &t = self.roadmap.index.get(&key(target))?;
        if !dist[t].is_finite() {
            return None;
        }
        let mut rev = vec![self.roadmap.pts[t]];
        let mut cur = t;
        while pred[cur] != usize::MAX {
            cur = pred[cur];
            rev.push(self.roadmap.pts[cur]);
        }
        rev.reverse();
        Some(rev)
    }

    pub fn go_to(&mut self, target: Point) -> Result<(), Interrupt> {
        let path = self
            .path_to(target)
            .ok_or_else(|| Interrupt::Internal(format!("no known path to {target}")))?;
        self.walk(&path, None).map(|_| ())
    }

    /// Returns to the current scene's start.
    pub fn go_home(&mut self) -> Result<(), Interrupt> {
        let s = self.scene().start;
        self.go_to(s)
    }

    pub fn is_node(&self, p: Point) -> bool {
        self.roadmap.index.contains_key(&key(p))
    }

    pub fn visited(&self, p: Point) -> bool {
        self.visited.contains(&key(p))
    }

    pub fn mark_visited(&mut self, p: Point) {
        self.visited.insert(key(p));
    }

    /// Whether every probe point just behind the window has been seen.
    pub fn window_resolved(&self, w: &Window) -> bool {
        let n = w.hidden_normal();
        let off = 1.5 * self.seen.cell;
        if w.chord.length() < 2.0 * off {
            return true;
        }
        [0.1, 0.3, 0.5, 0.7, 0.9].iter().all(|&t| self.seen.covers(w.chord.at(t).add(n.scale(off))))
    }

    /// Every raster sample along the segment, or a neighbour of it, is seen.
    fn seen_segment(&self, a: Point, b: Point) -> bool {
        let cell = self.seen.cell;
        let steps = (a.dist(b) / cell).ceil().max(1.0) as usize;
        (0..steps).all(|k| {
            let p = a.lerp(b, (k as f64 + 0.5) / steps as f64);
            [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
                .iter()
                .any(|&(dx, dy)| self.seen.covers(Point::new(p.x + dx * cell, p.y + dy * cell)))
        })
    }

    /// Whether a point has been seen by any stored view.
    pub fn seen_exactly(&self, q: Point) -> bool {
        self.views.iter().any(|v| v.vp.contains(q, self.tol))
    }

    /// All windows of stored views.
    pub fn windows(&self) -> Vec<Window> {
        self.views.iter().flat_map(|v| v.vp.windows.iter().copied()).collect()
    }

    /// Sighted holes of the current scene that are not in `known`, in
    /// sighting order.
    pub fn unrecorded(&self, known: &BTreeSet<Color>) -> Option<Color> {
        let current = self.scene().colors();
        self.sighted.iter().copied().find(|c| current.contains(c) && !known.contains(c))
    }
}

impl Walker for Environment {
    fn position(&self) -> Point {
        self.position
    }

    fn walk_to(&mut self, p: Point) -> Result<f64, Point> {
        if self.tripped.is_some() {
            return Err(self.position);
        }
        let from = self.position;
        if self.scene().is_free(p) && sees_unchecked(self.scene(), from, p) {
            self.step(p);
            self.observe(false);
            return Ok(from.dist(p));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..48 {
            let mid = 0.5 * (lo + hi);
            let q = from.lerp(p, mid);
            if self.scene().is_free(q) && sees_unchecked(self.scene(), from, q) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = from.lerp(p, lo);
        if q != from {
            self.step(q);
            self.observe(false);
        }
        Err(q)
    }
}

impl Environment {
    /// Makes the current position a roadmap node after free-form motion.
    pub fn settle(&mut self) {
        if self.last_vp.as_ref().is_none_or(|v| v.viewpoint != self.position) {
            self.observe(true);
        } else {
            self.anchor_here();
        }
    }
}
