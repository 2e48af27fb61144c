//! The recursive control loop: classify every sighted hole, recurse on safe
//! ones behind a barrier, fence off critical ones.

use super::yards::{explore_backyard, BackyardTask, FrontyardOutcome};
use super::{
    base_explore, classify, learn_encircling_online, BaseOutcome, Config, Environment, EventKind, HoleRecord,
    HoleStatus, Interrupt,
};
use crate::geodesic::{build_fence_in, lambda_lower_bound_in, merge_hole_with_barrier, path_to_hole, ring_of_vertex, Fence};
use crate::geometry::{Color, RingKind};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CpexError {
    #[error("internal error: {0}")]
    Internal(String),
}

struct Driver<'e> {
    env: &'e mut Environment,
    cfg: Config,
    depth: usize,
    max_depth: usize,
}

fn internal(e: impl std::fmt::Display) -> Interrupt {
    Interrupt::Internal(e.to_string())
}

impl Driver<'_> {
    fn level(&mut self, h: usize) -> Result<(), Interrupt> {
        self.depth += 1;
        if self.depth > self.max_depth {
            self.depth -= 1;
            return Err(Interrupt::Internal("recursion depth exceeded".into()));
        }
        self.env.event(EventKind::RecursionEnter { h });
        let r = self.level_body(h);
        self.depth -= 1;
        if r.is_ok() {
            self.env.event(EventKind::RecursionExit { h });
        }
        r
    }

    fn set_status(&mut self, rec: &mut HoleRecord, st: HoleStatus) -> Result<(), Interrupt> {
        rec.transition(st).map_err(Interrupt::Internal)?;
        self.env.event(EventKind::Classified { color: rec.color, status: st });
        Ok(())
    }

    fn level_body(&mut self, h: usize) -> Result<(), Interrupt> {
        let mut recs: Vec<HoleRecord> = vec![];
        let mut ignored: BTreeSet<Color> = BTreeSet::new();
        let mut fenced: BTreeSet<Color> = BTreeSet::new();
        loop {
            let known: BTreeSet<Color> = recs.iter().map(|r| r.color).chain(ignored.iter().copied()).collect();
            if let Some(c) = self.env.unrecorded(&known) {
                if h == 0 {
                    self.env.flag(format!("hole {c} sighted with no recursion levels left"));
                    ignored.insert(c);
                    continue;
                }
                let mut rec = HoleRecord::new(c);
                self.env.event(EventKind::PhaseChange { name: format!("learn {c}") });
                let tour = learn_encircling_online(self.env, c, &self.cfg)?;
                let (lambda, w) =
                    lambda_lower_bound_in(self.env.graph(), &tour, self.cfg.lambda_resolution).map_err(internal)?;
                rec.tour = Some(tour);
                rec.lambda = Some(lambda);
                rec.witness = Some(w);
                recs.push(rec);
                let lg = recs.iter().filter_map(|r| r.lambda).fold(0.0, f64::max);
                let n = recs.len();
                let st = classify(&recs[n - 1], lg, &self.cfg);
                let mut last = recs.pop().unwrap();
                self.set_status(&mut last, st)?;
                recs.push(last);
                if st == HoleStatus::Safe {
                    return self.safe(c, h, &recs);
                }
                // Critical holes may have become safe under the larger λ.
                for i in 0..recs.len() {
                    if recs[i].status == HoleStatus::Critical && classify(&recs[i], lg, &self.cfg) == HoleStatus::Safe {
                        let mut r = recs[i].clone();
                        self.set_status(&mut r, HoleStatus::Safe)?;
                        recs[i] = r;
                        let c = recs[i].color;
                        return self.safe(c, h, &recs);
                    }
                }
                continue;
            }
            let pending: Vec<usize> = (0..recs.len())
                .filter(|&i| recs[i].status == HoleStatus::Critical && !fenced.contains(&recs[i].color))
                .collect();
            if !pending.is_empty() {
                for &i in &pending {
                    fenced.insert(recs[i].color);
                }
                if let Some(c) = self.fence_phase(h, &pending, &recs)? {
                    let i = recs.iter().position(|r| r.color == c).unwrap();
                    let mut r = recs[i].clone();
                    self.set_status(&mut r, HoleStatus::Safe)?;
                    recs[i] = r;
                    return self.safe(c, h, &recs);
                }
                continue;
            }
            self.env.event(EventKind::PhaseChange { name: "explore".into() });
            match base_explore(self.env, None, &known)? {
                BaseOutcome::HoleSighted(_) | BaseOutcome::BudgetExceeded => continue,
                BaseOutcome::Explored => break,
            }
        }
        self.env.go_home()
    }

    /// Fences every pending critical hole, explores the frontyards under
    /// budget and then the backyards. Returns a hole promoted to safe.
    fn fence_phase(&mut self, h: usize, pending: &[usize], recs: &[HoleRecord]) -> Result<Option<Color>, Interrupt> {
        self.env.go_home()?;
        let mut tasks = vec![];
        for &i in pending {
            let rec = &recs[i];
            let (Some(tour), Some(w)) = (&rec.tour, &rec.witness) else { continue };
            let fence = match build_fence_in(self.env.graph(), tour, w) {
                Ok(f) => f,
                Err(e) => {
                    self.env.flag(format!("no fence for hole {}: {e}", rec.color));
                    continue;
                }
            };
            self.env.event(EventKind::FenceBuilt { color: rec.color, fence: fence.segment, apex: fence.apex, x: fence.x });
            if fence.clipped {
                self.env.flag(format!("fence of hole {} stops at another hole", rec.color));
            }
            if self.frontyard(&fence, h)? == FrontyardOutcome::PromotedSafe {
                return Ok(Some(rec.color));
            }
            tasks.push(BackyardTask { color: rec.color, fence, tour: tour.clone(), apex_index: w.apex_index });
        }
        explore_backyard(self.env, &tasks, &self.cfg)
    }

    fn frontyard(&mut self, fence: &Fence, h: usize) -> Result<FrontyardOutcome, Interrupt> {
        self.env.event(EventKind::PhaseChange { name: "frontyard".into() });
        self.env.go_home()?;
        let sub = h.saturating_sub(1);
        let budget = self.cfg.capital_c(sub) * fence.x;
        let depth = self.env.scene_depth();
        self.env.push_scene(fence.frontyard.clone());
        let id = self.env.push_budget(budget);
        let r = self.level(sub);
        self.env.pop_budget(id);
        self.env.restore_scenes(depth);
        match r {
            Ok(()) => Ok(FrontyardOutcome::Explored),
            Err(Interrupt::Budget(b)) if b == id => {
                self.env.event(EventKind::PhaseChange { name: "frontyard budget exceeded".into() });
                Ok(FrontyardOutcome::PromotedSafe)
            }
            Err(e) => Err(e),
        }
    }

    /// Walls the hole off with a barrier from the start and recurses with
    /// one hole fewer.
    fn safe(&mut self, color: Color, h: usize, recs: &[HoleRecord]) -> Result<(), Interrupt> {
        self.env.event(EventKind::PhaseChange { name: format!("safe {color}") });
        self.env.go_home()?;
        let s = self.env.scene().start;
        let mut c = color;
        let mut b = path_to_hole(self.env.graph(), s, c).map_err(internal)?;
        // A shortest path bending at another hole picks that hole instead.
        for _ in 0..self.env.scene().h() {
            let inner = &b.vertices[1..b.vertices.len().saturating_sub(1)];
            let other = inner.iter().find_map(|&q| match ring_of_vertex(self.env.scene(), q) {
                Some((RingKind::Hole(k), _)) if self.env.scene().holes[k].color != c => Some(self.env.scene().holes[k].color),
                _ => None,
            });
            let Some(k) = other else { break };
            self.env.event(EventKind::Classified { color: k, status: HoleStatus::Safe });
            c = k;
            b = path_to_hole(self.env.graph(), s, c).map_err(internal)?;
        }
        if let Some(t) = recs.iter().find(|r| r.color == c).and_then(|r| r.tour.as_ref()) {
            if b.length() > 0.5 * t.length + self.env.tol() {
                self.env.flag(format!("barrier to hole {c} is longer than half its tour"));
            }
        }
        for r in recs.iter().filter(|r| r.color != c) {
            self.env.event(EventKind::Classified { color: r.color, status: HoleStatus::Discovered });
        }
        let width = self.cfg.barrier_width * self.env.scene().diameter();
        match merge_hole_with_barrier(self.env.scene(), c, &b, width) {
            Ok(merged) => {
                let depth = self.env.scene_depth();
                self.env.push_scene(merged);
                let r = self.level(h.saturating_sub(1));
                self.env.restore_scenes(depth);
                r?;
                self.env.go_home()
            }
            Err(e) => {
                self.env.flag(format!("barrier to hole {c} failed: {e}"));
                let all: BTreeSet<Color> = self.env.scene().colors().into_iter().collect();
                base_explore(self.env, None, &all)?;
                self.env.go_home()
            }
        }
    }
}

/// Runs the full strategy. The robot ends back at the start unless an
/// internal error stops it.
pub fn h_cpex(env: &mut Environment, h_max: usize, cfg: &Config) -> Result<(), CpexError> {
    cfg.validate().map_err(CpexError::Internal)?;
    let mut d = Driver { env, cfg: cfg.clone(), depth: 0, max_depth: h_max + 1 };
    match d.level(h_max) {
        Ok(()) => Ok(()),
        Err(e) => {
            d.env.flag(e.to_string());
            Err(CpexError::Internal(e.to_string()))
        }
    }
}

/// Barrier recursion on a safe hole with `h` holes left in the scene.
pub fn explore_safe(env: &mut Environment, record: &HoleRecord, h: usize, cfg: &Config) -> Result<(), Interrupt> {
    let mut d = Driver { env, cfg: cfg.clone(), depth: 0, max_depth: h + 1 };
    d.safe(record.color, h, std::slice::from_ref(record))
}

/// Explores the frontyard of `fence` with the strategy for `h - 1` holes
/// under the budget `C_{h-1} · x`.
pub fn explore_frontyard(env: &mut Environment, fence: &Fence, h: usize, cfg: &Config) -> Result<FrontyardOutcome, Interrupt> {
    let mut d = Driver { env, cfg: cfg.clone(), depth: 0, max_depth: h + 1 };
    d.frontyard(fence, h)
}
