//! Scenario generators for the lower-bound constructions, random scenes,
//! and offline bounds on the optimal watchman tour.

mod families;
mod multihole;
mod opt;
mod random;

pub use families::{
    gen_four_holes, gen_general_lb, gen_orthogonal_lb, gen_orthogonal_lb_colored, golden_search, ratio_f, ratio_g,
    CutSide, FourHolesWitness,
};
pub use multihole::{gen_multihole_lb, maximin, multihole_ratio, Maximin};
pub use opt::{cut_lower_bound, opt_bounds, opt_bounds_with, OptBounds, OptConfig};
pub use random::{gen_random, MAX_ATTEMPTS};

use crate::geometry::Scene;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("generation failed: {0}")]
    Generation(String),
}

/// A scene with what is known about its optimal tour.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioBundle {
    pub scene: Scene,
    pub opt_exact: Option<f64>,
    pub opt_lower: f64,
    /// `f64::INFINITY` when no covering tour could be constructed.
    pub opt_upper: f64,
    pub label: String,
    pub params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct OptJson {
    exact: Option<f64>,
    lower: f64,
    upper: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct BundleJson {
    #[serde(flatten)]
    scene: Scene,
    opt: OptJson,
    label: String,
    #[serde(default)]
    params: serde_json::Value,
}

impl ScenarioBundle {
    /// Scene JSON extended by `opt`, `label` and `params`. An infinite upper
    /// bound is written as `null`.
    pub fn to_json(&self) -> String {
        let b = BundleJson {
            scene: self.scene.clone(),
            opt: OptJson {
                exact: self.opt_exact,
                lower: self.opt_lower,
                upper: self.opt_upper.is_finite().then_some(self.opt_upper),
            },
            label: self.label.clone(),
            params: self.params.clone(),
        };
        serde_json::to_string_pretty(&b).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<ScenarioBundle, crate::geometry::SceneError> {
        let b: BundleJson = serde_json::from_str(s)?;
        let scene = Scene::from_json(&serde_json::to_string(&b.scene)?)?;
        Ok(ScenarioBundle {
            scene,
            opt_exact: b.opt.exact,
            opt_lower: b.opt.lower,
            opt_upper: b.opt.upper.unwrap_or(f64::INFINITY),
            label: b.label,
            params: b.params,
        })
    }

    /// A bare scene with computed bounds on the optimal tour.
    pub fn from_scene(scene: Scene, label: &str) -> Self {
        Self::with_bounds(scene, None, label, serde_json::Value::Null)
    }

    pub(crate) fn with_bounds(mut scene: Scene, opt_exact: Option<f64>, label: &str, params: serde_json::Value) -> Self {
        scene.normalize_orientation();
        let b = opt_bounds(&scene);
        ScenarioBundle { scene, opt_exact, opt_lower: b.lower, opt_upper: b.upper, label: label.into(), params }
    }
}
