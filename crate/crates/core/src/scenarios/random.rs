//! Seeded random scenes by rejection sampling.

use super::{ScenarioBundle, ScenarioError};
use crate::geometry::{proper_crossing, validate_scene, Hole, Point, Scene, Segment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::TAU;

pub const MAX_ATTEMPTS: usize = 10_000;

const RADIUS: f64 = 10.0;
/// Minimum gap between any two rings and between the start and a hole.
const CLEARANCE: f64 = 0.3;

fn ring_gap(a: &[Point], b: &[Point]) -> f64 {
    let segs = |r: &[Point]| (0..r.len()).map(|i| Segment::new(r[i], r[(i + 1) % r.len()])).collect::<Vec<_>>();
    let (sa, sb) = (segs(a), segs(b));
    let mut best = f64::INFINITY;
    for s in &sa {
        for t in &sb {
            if proper_crossing(s.a, s.b, t.a, t.b) {
                return 0.0;
            }
            best = best.min(s.dist_to_point(t.a)).min(s.dist_to_point(t.b)).min(t.dist_to_point(s.a)).min(t.dist_to_point(s.b));
        }
    }
    best
}

fn star_ring(rng: &mut ChaCha8Rng, c: Point, r: f64, n: usize, spread: f64) -> Vec<Point> {
    let step = TAU / n as f64;
    (0..n)
        .map(|i| {
            let t = step * (i as f64 + rng.gen_range(-0.35..0.35));
            let rr = r * rng.gen_range(spread..1.0);
            Point::new(c.x + rr * t.cos(), c.y + rr * t.sin())
        })
        .collect()
}

fn attempt(rng: &mut ChaCha8Rng, h: usize, n: usize) -> Option<Scene> {
    let outer = star_ring(rng, Point::new(0.0, 0.0), RADIUS, n, 0.55);
    let start = outer[0].lerp(outer[1], 0.5);
    let mut holes: Vec<Hole> = vec![];
    for k in 0..h {
        let c = Point::new(rng.gen_range(-0.7..0.7) * RADIUS, rng.gen_range(-0.7..0.7) * RADIUS);
        let m = rng.gen_range(3..=6);
        let r = rng.gen_range(0.6..1.6);
        let mut ring = star_ring(rng, c, r, m, 0.7);
        ring.reverse();
        if ring_gap(&ring, &outer) < CLEARANCE || holes.iter().any(|o| ring_gap(&ring, &o.vertices) < CLEARANCE) {
            return None;
        }
        if ring.iter().any(|&q| !crate::geometry::ring_contains(&outer, q)) {
            return None;
        }
        let to_start = (0..m).map(|i| Segment::new(ring[i], ring[(i + 1) % m]).dist_to_point(start));
        if to_start.fold(f64::INFINITY, f64::min) < CLEARANCE {
            return None;
        }
        holes.push(Hole { color: k as u32 + 1, vertices: ring });
    }
    let mut scene = Scene::new(outer, holes, start);
    scene.normalize_orientation();
    validate_scene(&scene).ok()?;
    Some(scene)
}

/// A valid scene with `h` holes and an `n`-gon outer boundary, the same for
/// the same seed.
pub fn gen_random(h: usize, n: usize, seed: u64) -> Result<ScenarioBundle, ScenarioError> {
    if h > 5 {
        return Err(ScenarioError::Params(format!("at most 5 holes, got {h}")));
    }
    if !(3..=200).contains(&n) {
        return Err(ScenarioError::Params(format!("outer vertex count must be in 3..=200, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(scene) = attempt(&mut rng, h, n) {
            let params = json!({ "h": h, "n": n, "seed": seed });
            return Ok(ScenarioBundle::with_bounds(scene, None, &format!("random-h{h}-n{n}-s{seed}"), params));
        }
    }
    Err(ScenarioError::Generation(format!("no valid scene after {MAX_ATTEMPTS} attempts")))
}
