//! Fixed lower-bound families: the one-hole golden-ratio gadget, the
//! orthogonal corridor loop, and the four-hole pinwheel.

use super::{ScenarioBundle, ScenarioError};
use crate::geometry::{Hole, Point, Scene};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Which side of the hole the hidden edge can be learned from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutSide {
    LeftCut,
    RightCut,
}

/// Ratio when the adversary puts the cut on the left: the robot probes
/// left, goes right, and must come back.
pub fn ratio_f(alpha: f64) -> f64 {
    (4.0 * alpha + 2.0) / (2.0 * alpha)
}

/// Ratio when the cut is learned on the right.
pub fn ratio_g(alpha: f64) -> f64 {
    (2.0 * alpha + 2.0) / 2.0
}

/// Ternary search for the probing depth minimizing `max(f, g)` on (0, 10).
/// Returns `(alpha, value)`.
pub fn golden_search() -> (f64, f64) {
    let h = |a: f64| ratio_f(a).max(ratio_g(a));
    let (mut lo, mut hi) = (1e-9, 10.0);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if h(m1) <= h(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, h(a))
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Tiny triangular hole right above the start; seeing its two upper sides
/// needs a sideways step of `6ε/√17` in either direction.
fn gadget_hole(cx: f64, eps: f64, color: u32) -> Hole {
    Hole { color, vertices: vec![p(cx - eps, 2.0 * eps), p(cx, 6.0 * eps), p(cx + eps, 2.0 * eps)] }
}

fn gadget_step(eps: f64) -> f64 {
    6.0 * eps / 17f64.sqrt()
}

/// Room of height 2 with the start on the floor, a tiny hole above it, and
/// a slot in the ceiling whose hidden wall lies on the vertical line at
/// distance `alpha` to the left (`LeftCut`) or 1 to the right (`RightCut`).
pub fn gen_general_lb(alpha: f64, side: CutSide, eps: f64) -> Result<ScenarioBundle, ScenarioError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ScenarioError::Params(format!("alpha must be positive, got {alpha}")));
    }
    if !(eps > 0.0 && eps * 100.0 <= alpha.min(1.0)) {
        return Err(ScenarioError::Params(format!("eps must be positive and small against alpha, got {eps}")));
    }
    let (height, depth, width) = (2.0, 1.0, 0.5);
    let x = alpha.max(1.0) + 1.0;
    let mut outer = vec![p(-x, 0.0), p(x, 0.0), p(x, height)];
    let (l, dist) = match side {
        CutSide::LeftCut => {
            let l = p(-alpha, height);
            outer.extend([l, p(-alpha, height + depth), p(-alpha - width, height + depth), p(-alpha - width, height)]);
            (l, alpha)
        }
        CutSide::RightCut => {
            let l = p(1.0, height);
            outer.extend([p(1.0 + width, height), p(1.0 + width, height + depth), p(1.0, height + depth), l]);
            (l, 1.0)
        }
    };
    outer.push(p(-x, height));
    let scene = Scene::new(outer, vec![gadget_hole(0.0, eps, 1)], p(0.0, 0.0));
    let opt = 2.0 * dist + 2.0 * gadget_step(eps);
    let params = json!({
        "alpha": alpha,
        "side": side,
        "eps": eps,
        "reflex_vertex": l,
        "online_cost_left": 4.0 * alpha + 2.0,
        "online_cost_right": 2.0 * alpha + 2.0,
        "f": ratio_f(alpha),
        "g": ratio_g(alpha),
    });
    let label = match side {
        CutSide::LeftCut => "general-lb-left",
        CutSide::RightCut => "general-lb-right",
    };
    Ok(ScenarioBundle::with_bounds(scene, Some(opt), label, params))
}

struct Corridor {
    scene: Scene,
    loop_length: f64,
    dead_end: f64,
}

/// A loop corridor of width 1 around a `d × 1` hole, with a dead end
/// winding `depth` times off the far wall.
fn corridor(d: f64, depth: usize) -> Result<Corridor, ScenarioError> {
    if !(d.is_finite() && d >= 2.0) {
        return Err(ScenarioError::Params(format!("d must be at least 2, got {d}")));
    }
    if depth > 50 {
        return Err(ScenarioError::Params(format!("depth must be at most 50, got {depth}")));
    }
    let far = d + 2.0;
    let seg = 2.0;
    let mut centre = vec![p(far, 1.5)];
    for k in 0..(2 * depth + 1) {
        let c = *centre.last().unwrap();
        centre.push(if k % 2 == 0 { p(c.x + seg, c.y) } else { p(c.x, c.y + seg) });
    }
    let n = centre.len();
    let mut lower = vec![p(far, 1.0)];
    let mut upper = vec![p(far, 2.0)];
    for c in &centre[1..n - 1] {
        lower.push(p(c.x + 0.5, c.y - 0.5));
        upper.push(p(c.x - 0.5, c.y + 0.5));
    }
    let end = centre[n - 1];
    lower.push(p(end.x, end.y - 0.5));
    upper.push(p(end.x, end.y + 0.5));
    let mut outer = vec![p(0.0, 0.0), p(far, 0.0)];
    outer.extend(lower);
    outer.extend(upper.into_iter().rev());
    outer.extend([p(far, 3.0), p(0.0, 3.0)]);
    let hole = Hole { color: 1, vertices: vec![p(1.0, 1.0), p(1.0, 2.0), p(d + 1.0, 2.0), p(d + 1.0, 1.0)] };
    let scene = Scene::new(outer, vec![hole], p(0.0, 1.5));
    Ok(Corridor { scene, loop_length: 2.0 * d + 6.0, dead_end: 0.5 + seg * (2 * depth + 1) as f64 })
}

/// Corridor loop around a long hole. An uncolored strategy cannot tell the
/// dead end from the way back and pays `2d` plus twice the dead end extra.
pub fn gen_orthogonal_lb(d: f64, depth: usize) -> Result<ScenarioBundle, ScenarioError> {
    let c = corridor(d, depth)?;
    let opt = c.loop_length + 2.0 * c.dead_end;
    let forced = opt + 2.0 * d;
    let params = json!({
        "d": d,
        "depth": depth,
        "colored": false,
        "loop_length": c.loop_length,
        "dead_end_length": c.dead_end,
        "opt_length": opt,
        "forced_length": forced,
        "ratio": forced / opt,
    });
    Ok(ScenarioBundle::with_bounds(c.scene, None, "orth-lb", params))
}

/// The same corridor when the hole's color tells the dead end apart: the
/// forced detour disappears.
pub fn gen_orthogonal_lb_colored(d: f64, depth: usize) -> Result<ScenarioBundle, ScenarioError> {
    let c = corridor(d, depth)?;
    let opt = c.loop_length + 2.0 * c.dead_end;
    let params = json!({
        "d": d,
        "depth": depth,
        "colored": true,
        "loop_length": c.loop_length,
        "dead_end_length": c.dead_end,
        "opt_length": opt,
        "forced_length": opt,
        "ratio": 1.0,
    });
    Ok(ScenarioBundle::with_bounds(c.scene, None, "orth-lb-colored", params))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourHolesWitness {
    /// Together these see every boundary edge completely.
    pub viewpoints: Vec<Point>,
    /// Seen by none of the viewpoints.
    pub interior: Point,
}

/// Four holes in a pinwheel around a central square. Each slit between two
/// holes runs along one side of the square, so a viewer looking down the
/// slit sees that side completely but hardly any of the square itself.
pub fn gen_four_holes() -> ScenarioBundle {
    let g = 0.2;
    let c = p(5.0, 5.0);
    let rot = |q: Point, k: usize| (0..k).fold(q, |q, _| p(c.x - (q.y - c.y), c.y + (q.x - c.x)));
    let west = [p(3.0, 4.0 + g), p(3.0, 8.0), p(4.0, 8.0), p(4.0, 4.0 + g)];
    let holes = (0..4)
        .map(|k| Hole { color: k as u32 + 1, vertices: west.iter().map(|&q| rot(q, k)).collect() })
        .collect();
    let outer = vec![p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)];
    let scene = Scene::new(outer, holes, p(5.0, 0.0));
    let mut viewpoints: Vec<Point> = (0..4).map(|k| rot(p(4.0 + g / 2.0, 9.5), k)).collect();
    viewpoints.extend((0..4).map(|k| rot(p(0.5, 0.5), k)));
    let witness = FourHolesWitness { viewpoints, interior: c };
    let params = json!({ "slit_width": g, "witness": witness });
    ScenarioBundle::with_bounds(scene, None, "four-holes", params)
}

impl FourHolesWitness {
    pub fn from_params(params: &serde_json::Value) -> Option<FourHolesWitness> {
        serde_json::from_value(params.get("witness")?.clone()).ok()
    }
}
