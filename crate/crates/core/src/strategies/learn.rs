//! Learning the encircling tour of a hole by doubling (one hole) or star
//! search (several holes) along candidate loops through the start.

use super::{Config, Environment, Interrupt};
use crate::geodesic::{encircling_tour_in, interior_point, lifted_loop, EncirclingTour};
use crate::geometry::{Color, Point};
use crate::search::{continue_schedule, cow_path, star_search, Probe, SearchRay};
use std::cell::RefCell;

const SAMPLES_PER_SEGMENT: usize = 6;

struct Shared<'a> {
    env: &'a mut Environment,
    samples: Vec<Point>,
    covered: Vec<bool>,
    /// While set, probes run to full depth (the confirmation round).
    confirming: bool,
    interrupt: Option<Interrupt>,
}

impl Shared<'_> {
    fn update(&mut self) -> bool {
        let Some(v) = self.env.views().last() else { return false };
        for (k, &q) in self.samples.iter().enumerate() {
            if !self.covered[k] && v.vp.contains(q, self.env.tol()) {
                self.covered[k] = true;
            }
        }
        self.covered.iter().all(|&c| c)
    }
}

struct LoopRay<'s, 'a> {
    id: usize,
    path: Vec<Point>,
    cum: Vec<f64>,
    at: f64,
    shared: &'s RefCell<Shared<'a>>,
}

impl<'s, 'a> LoopRay<'s, 'a> {
    fn new(id: usize, path: Vec<Point>, shared: &'s RefCell<Shared<'a>>) -> Self {
        let mut cum = vec![0.0];
        for w in path.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(w[1]));
        }
        LoopRay { id, path, cum, at: 0.0, shared }
    }

    fn point_at(&self, d: f64) -> Point {
        let k = self.cum.partition_point(|&c| c <= d).clamp(1, self.path.len().max(2) - 1);
        if self.path.len() < 2 {
            return self.path[0];
        }
        let (a, b) = (self.path[k - 1], self.path[k]);
        let l = self.cum[k] - self.cum[k - 1];
        if l == 0.0 {
            b
        } else {
            a.lerp(b, ((d - self.cum[k - 1]) / l).clamp(0.0, 1.0))
        }
    }

    fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }
}

impl SearchRay for LoopRay<'_, '_> {
    fn id(&self) -> usize {
        self.id
    }

    fn advance(&mut self, depth: f64) -> Probe {
        let mut sh = self.shared.borrow_mut();
        if sh.interrupt.is_some() {
            return Probe { found: true, reached: self.at, traveled: 0.0 };
        }
        let target = depth.min(self.length());
        let t0 = sh.env.traveled();
        let mut stops: Vec<f64> = self.cum.iter().copied().filter(|&c| c > self.at && c < target).collect();
        stops.push(target);
        for d in stops {
            let q = self.point_at(d);
            if let Err(e) = sh.env.walk(&[q], None) {
                sh.interrupt = Some(e);
                return Probe { found: true, reached: self.at, traveled: sh.env.traveled() - t0 };
            }
            self.at = d;
            let done = sh.update();
            if done && !sh.confirming {
                return Probe { found: true, reached: d, traveled: sh.env.traveled() - t0 };
            }
        }
        // A fully walked loop has seen the whole tour.
        let found = target >= self.length() && !sh.confirming;
        Probe { found, reached: self.at, traveled: sh.env.traveled() - t0 }
    }

    fn retreat(&mut self) -> f64 {
        let mut sh = self.shared.borrow_mut();
        if sh.interrupt.is_some() {
            return 0.0;
        }
        let t0 = sh.env.traveled();
        let mut back: Vec<Point> = self.cum.iter().zip(&self.path).filter(|(&c, _)| c < self.at).map(|(_, &p)| p).collect();
        back.reverse();
        if let Err(e) = sh.env.walk(&back, None) {
            sh.interrupt = Some(e);
        }
        self.at = 0.0;
        sh.env.traveled() - t0
    }
}

fn winding(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let o = b.sub(a).cross(p.sub(a));
        if a.y <= p.y && b.y > p.y && o > 0.0 {
            w += 1;
        } else if a.y > p.y && b.y <= p.y && o < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Candidate loops: the tour itself and, per other hole, the shortest loop
/// that flips whether that hole is enclosed.
fn candidate_loops(env: &Environment, tour: &EncirclingTour) -> Vec<Vec<Point>> {
    let scene = env.scene();
    let s = scene.start;
    let hole = scene.hole(tour.hole_color).unwrap();
    let ch = interior_point(&hole.vertices);
    let mut loops = vec![tour.tour.vertices.clone()];
    for other in scene.holes.iter().filter(|h| h.color != tour.hole_color) {
        let ck = interior_point(&other.vertices);
        let flip = if winding(&tour.tour.vertices, ck) == 0 { 1 } else { 0 };
        if let Some(l) = lifted_loop(env.graph(), s, &[(ch, 1), (ck, flip)]) {
            if l.len() >= 2 && !loops.contains(&l) {
                loops.push(l);
            }
        }
    }
    loops
}

/// Learns the encircling tour of hole `color` by walking candidate loops
/// in both directions with growing depths until every tour segment has been
/// seen, then runs one confirmation round. The robot ends where it started.
pub fn learn_encircling_online(env: &mut Environment, color: Color, cfg: &Config) -> Result<EncirclingTour, Interrupt> {
    let s = env.scene().start;
    let tour = encircling_tour_in(env.graph(), s, color).map_err(|e| Interrupt::Internal(e.to_string()))?;
    let mut samples = vec![];
    let v = &tour.tour.vertices;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        for k in 0..=SAMPLES_PER_SEGMENT {
            samples.push(a.lerp(b, k as f64 / SAMPLES_PER_SEGMENT as f64));
        }
    }
    let covered: Vec<bool> = samples.iter().map(|&q| env.seen_exactly(q)).collect();
    if covered.iter().all(|&c| c) {
        return Ok(tour);
    }
    let to_s = env
        .path_to(s)
        .ok_or_else(|| Interrupt::Internal("no known path back to the start while learning a tour".into()))?;
    let loops = candidate_loops(env, &tour);
    let diam = env.scene().diameter();
    let unit = cfg.search_unit * diam.max(1e-12);
    let perimeter = env.scene().perimeter();
    let origin = env.position();
    let mut paths = vec![];
    for l in &loops {
        let mut closed = l.clone();
        closed.push(s);
        let mut cw = closed.clone();
        cw.reverse();
        for dir in [cw, closed] {
            let mut p = to_s.clone();
            p.extend(dir.into_iter().skip(1));
            p.dedup();
            paths.push(p);
        }
    }
    let longest = paths.iter().map(|p| p.windows(2).map(|w| w[0].dist(w[1])).sum::<f64>()).fold(0.0, f64::max);
    let cap = (10.0 * perimeter).max(2.0 * longest);
    let shared = RefCell::new(Shared { env, samples, covered, confirming: false, interrupt: None });
    let mut rays: Vec<LoopRay> = paths.into_iter().enumerate().map(|(i, p)| LoopRay::new(i, p, &shared)).collect();
    let outcome = {
        let mut refs: Vec<&mut dyn SearchRay> = rays.iter_mut().map(|r| r as &mut dyn SearchRay).collect();
        if refs.len() == 2 {
            let (a, b) = refs.split_at_mut(1);
            cow_path(&mut *a[0], &mut *b[0], unit, cap)
        } else {
            star_search(&mut refs, unit, cap)
        }
    };
    if let Some(e) = shared.borrow_mut().interrupt.take() {
        return Err(e);
    }
    let outcome = outcome.map_err(|e| Interrupt::Internal(format!("tour learning: {e}")))?;
    rays[outcome.found_on].retreat();
    shared.borrow_mut().confirming = true;
    {
        let m = rays.len();
        let mut refs: Vec<&mut dyn SearchRay> = rays.iter_mut().map(|r| r as &mut dyn SearchRay).collect();
        continue_schedule(&mut refs, unit, outcome.visits, m, cap);
    }
    let mut sh = shared.into_inner();
    if let Some(e) = sh.interrupt.take() {
        return Err(e);
    }
    debug_assert_eq!(sh.env.position(), origin, "{:?}", &sh.env.trace().path[sh.env.trace().path.len().saturating_sub(12)..]);
    Ok(tour)
}
