//! Chained multi-hole extension of the one-hole gadget, and the maximin
//! over its free dimensions.
//!
//! Level `k` sits at anchor `A_k` on the floor with scale `σ_k` (`σ_1 = 1`).
//! The robot probes `α_k σ_k` to the left of each anchor and moves on by
//! `σ_k`; the deception is only resolved behind the last level. The
//! adversary then either finishes on the right (`A_h` away) or reveals that
//! level `k` needed its left side, which sends the robot back there.

use super::families::CutSide;
use super::{ScenarioBundle, ScenarioError};
use crate::geometry::{Hole, Point, Scene};
use serde::{Deserialize, Serialize};
use serde_json::json;

const ALPHA_RANGE: (f64, f64) = (0.05, 6.0);
const SIGMA_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximin {
    pub h: usize,
    pub value: f64,
    pub alphas: Vec<f64>,
    /// Level scales, the first fixed to 1.
    pub sigmas: Vec<f64>,
}

const MAX_LEVELS: usize = 4;

fn outcomes<'a>(alphas: &'a [f64], sigmas: &'a [f64]) -> impl Iterator<Item = (Option<usize>, f64)> + 'a {
    let h = alphas.len();
    let mut anchor = [0.0; MAX_LEVELS + 1];
    for k in 0..h {
        anchor[k + 1] = anchor[k] + sigmas[k];
    }
    let full: f64 = (0..h).map(|k| 2.0 * alphas[k] * sigmas[k] + sigmas[k]).sum();
    let end = anchor[h];
    let right = (None, (full + end) / (2.0 * end));
    let left = (0..h).map(move |k| {
        let reach = anchor[k] + alphas[k] * sigmas[k];
        let back = (end - anchor[k]) + alphas[k] * sigmas[k];
        (Some(k), (full + back + reach) / (2.0 * reach))
    });
    std::iter::once(right).chain(left)
}

/// Worst-case ratio of the probing depths `alphas` on the chain `sigmas`.
pub fn multihole_ratio(alphas: &[f64], sigmas: &[f64]) -> f64 {
    assert!(alphas.len() <= MAX_LEVELS && alphas.len() == sigmas.len());
    outcomes(alphas, sigmas).map(|o| o.1).fold(0.0, f64::max)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const DIMS: usize = 2 * MAX_LEVELS;

/// Golden-section search over `x[k]`, nested over the later coordinates.
/// Returns the best value found and the coordinates realizing it.
fn nested(x: &mut [f64; DIMS], k: usize, dims: &[(f64, f64, bool)], iters: usize, f: &dyn Fn(&[f64; DIMS]) -> f64) -> (f64, [f64; DIMS]) {
    if k == dims.len() {
        return (f(x), *x);
    }
    let (mut lo, mut hi, maximize) = dims[k];
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut best: Option<(f64, [f64; DIMS])> = None;
    let eval = |t: f64, x: &mut [f64; DIMS], best: &mut Option<(f64, [f64; DIMS])>| {
        x[k] = t;
        let r = nested(x, k + 1, dims, iters, f);
        if best.is_none_or(|b| better(r.0, b.0)) {
            *best = Some(r);
        }
        r.0
    };
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = eval(a, x, &mut best);
    let mut fb = eval(b, x, &mut best);
    for _ in 0..iters {
        if better(fa, fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = eval(a, x, &mut best);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = eval(b, x, &mut best);
        }
    }
    best.unwrap()
}

/// Adversary picks the scales of levels `2..=h` (each level fits inside the
/// previous one, `σ ≤ 1`), the robot picks all probing depths; nested
/// golden-section search with `iters` steps per coordinate.
pub fn maximin(h: usize, iters: usize) -> Maximin {
    assert!((1..=MAX_LEVELS).contains(&h), "1 to {MAX_LEVELS} levels");
    let mut dims = vec![(SIGMA_RANGE.0, SIGMA_RANGE.1, true); h - 1];
    dims.extend(std::iter::repeat_n((ALPHA_RANGE.0, ALPHA_RANGE.1, false), h));
    let split = |x: &[f64; DIMS]| {
        let mut sigmas = [1.0; MAX_LEVELS];
        sigmas[1..h].copy_from_slice(&x[..h - 1]);
        let mut alphas = [0.0; MAX_LEVELS];
        alphas[..h].copy_from_slice(&x[h - 1..2 * h - 1]);
        (alphas, sigmas)
    };
    let f = |x: &[f64; DIMS]| {
        let (a, s) = split(x);
        multihole_ratio(&a[..h], &s[..h])
    };
    let mut x = [0.0; DIMS];
    let (value, arg) = nested(&mut x, 0, &dims, iters, &f);
    let (alphas, sigmas) = split(&arg);
    Maximin { h, value, alphas: alphas[..h].to_vec(), sigmas: sigmas[..h].to_vec() }
}

/// Steps per coordinate used by the generator.
const GENERATOR_ITERS: usize = 28;

/// Chained construction for `h ∈ {2, 3}`: one tiny hole per level on the
/// floor and a ceiling slot placed where the worst outcome needs it.
pub fn gen_multihole_lb(h: usize) -> Result<ScenarioBundle, ScenarioError> {
    if !(2..=3).contains(&h) {
        return Err(ScenarioError::Params(format!("h must be 2 or 3, got {h}")));
    }
    let m = maximin(h, GENERATOR_ITERS);
    let mut anchor = vec![0.0];
    for k in 0..h {
        anchor.push(anchor[k] + m.sigmas[k]);
    }
    let eps = 1e-4;
    if m.sigmas.iter().any(|&s| s < 10.0 * eps) {
        return Err(ScenarioError::Generation("maximin collapsed a level; holes would overlap".into()));
    }
    let (worst, _) = outcomes(&m.alphas, &m.sigmas).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let (wall, side) = match worst {
        None => (anchor[h], CutSide::RightCut),
        Some(k) => (anchor[k] - m.alphas[k] * m.sigmas[k], CutSide::LeftCut),
    };
    let (height, depth, width) = (2.0, 1.0, 0.5);
    let lo = anchor.iter().copied().chain([wall]).fold(f64::INFINITY, f64::min) - width - 1.0;
    let hi = anchor.iter().copied().chain([wall]).fold(f64::NEG_INFINITY, f64::max) + width + 1.0;
    let p = Point::new;
    let mut outer = vec![p(lo, 0.0), p(hi, 0.0), p(hi, height)];
    match side {
        CutSide::LeftCut => outer.extend([
            p(wall, height),
            p(wall, height + depth),
            p(wall - width, height + depth),
            p(wall - width, height),
        ]),
        CutSide::RightCut => outer.extend([
            p(wall + width, height),
            p(wall + width, height + depth),
            p(wall, height + depth),
            p(wall, height),
        ]),
    }
    outer.push(p(lo, height));
    let holes = (0..h)
        .map(|k| {
            let cx = anchor[k];
            Hole {
                color: k as u32 + 1,
                vertices: vec![p(cx - eps, 2.0 * eps), p(cx, 6.0 * eps), p(cx + eps, 2.0 * eps)],
            }
        })
        .collect();
    let scene = Scene::new(outer, holes, p(0.0, 0.0));
    let params = json!({
        "h": h,
        "bound": m.value,
        "alphas": m.alphas,
        "sigmas": m.sigmas,
        "anchors": anchor,
        "worst_level": worst,
        "slot_side": side,
        "eps": eps,
    });
    Ok(ScenarioBundle::with_bounds(scene, None, &format!("multihole-lb-{h}"), params))
}
