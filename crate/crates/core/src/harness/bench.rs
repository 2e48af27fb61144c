use super::{gen_family, run, HarnessError, RunConfig, StrategyName};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One generator family with a parameter grid: every array-valued parameter
/// is expanded, in key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    pub strategies: Vec<StrategyName>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub min_coverage: f64,
    pub require_return: bool,
    /// Largest allowed upper end of the ratio interval.
    pub max_ratio_upper: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { min_coverage: 0.999, require_return: true, max_ratio_upper: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    #[serde(default)]
    pub runs: Vec<RunSpec>,
    #[serde(default)]
    pub config: RunConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub index: usize,
    pub family: String,
    pub params: Value,
    pub strategy: StrategyName,
    pub label: String,
    /// Generator parameter `alpha` after resolution, when the family has one.
    pub alpha: Option<f64>,
    pub trace_length: Option<f64>,
    pub opt_lower: Option<f64>,
    pub opt_upper: Option<f64>,
    pub ratio_lower: Option<f64>,
    pub ratio_upper: Option<f64>,
    pub coverage: Option<f64>,
    pub returned: Option<bool>,
    pub error: Option<String>,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: usize,
    pub max_ratio_upper: Option<f64>,
    pub median_ratio_upper: Option<f64>,
    pub violations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
}

/// The scenario suite shipped with the command-line tool: the lower-bound
/// families plus a few seeded random scenes, all with at most three holes.
pub fn bundled_suite() -> BenchSpec {
    let run = |family: &str, params: Value| RunSpec {
        family: family.into(),
        params: params.as_object().cloned().unwrap_or_default(),
        strategies: vec![StrategyName::Cpex],
    };
    BenchSpec {
        runs: vec![
            run("general-lb", serde_json::json!({ "alpha": "golden", "side": ["left", "right"] })),
            run("orth-lb", serde_json::json!({ "d": [10.0, 100.0], "depth": 1 })),
            run("multihole-lb", serde_json::json!({ "h": [2, 3] })),
            run("random", serde_json::json!({ "h": [1, 2, 3], "n": 30, "seed": [1, 2] })),
        ],
        config: RunConfig::default(),
        thresholds: Thresholds::default(),
    }
}

fn expand(params: &Map<String, Value>) -> Vec<Map<String, Value>> {
    let mut out = vec![Map::new()];
    for (k, v) in params {
        let choices: Vec<Value> = match v {
            Value::Array(a) => a.clone(),
            v => vec![v.clone()],
        };
        out = out
            .into_iter()
            .flat_map(|m| {
                choices.iter().map(move |c| {
                    let mut m = m.clone();
                    m.insert(k.clone(), c.clone());
                    m
                })
            })
            .collect();
    }
    out
}

/// Runs every (scenario, strategy) pair of the spec; rows come back in spec
/// order. `seed` replaces the `seed` parameter of every run that has one.
pub fn bench(spec: &BenchSpec, seed: Option<u64>) -> BenchResult {
    let mut jobs = vec![];
    for r in &spec.runs {
        for mut params in expand(&r.params) {
            if let (Some(s), Some(_)) = (seed, params.get("seed")) {
                params.insert("seed".into(), Value::from(s));
            }
            jobs.push((r.family.clone(), Value::Object(params), r.strategies.clone()));
        }
    }
    let th = &spec.thresholds;
    let groups: Vec<Vec<BenchRow>> = jobs
        .par_iter()
        .map(|(family, params, strategies)| {
            let bundle = gen_family(family, params);
            strategies
                .iter()
                .map(|&strategy| {
                    let mut row = BenchRow {
                        index: 0,
                        family: family.clone(),
                        params: params.clone(),
                        strategy,
                        label: String::new(),
                        alpha: None,
                        trace_length: None,
                        opt_lower: None,
                        opt_upper: None,
                        ratio_lower: None,
                        ratio_upper: None,
                        coverage: None,
                        returned: None,
                        error: None,
                        violation: None,
                    };
                    let b = match &bundle {
                        Ok(b) => b,
                        Err(e) => {
                            row.error = Some(e.to_string());
                            row.violation = Some("generation failed".into());
                            return row;
                        }
                    };
                    let rep = run(b, strategy, &spec.config).report;
                    row.label = rep.label.clone();
                    row.alpha = b.params.get("alpha").and_then(Value::as_f64);
                    row.trace_length = Some(rep.trace_length);
                    row.opt_lower = Some(rep.opt_lower);
                    row.opt_upper = rep.opt_upper;
                    row.ratio_lower = rep.ratio_interval[0];
                    row.ratio_upper = rep.ratio_interval[1];
                    row.coverage = Some(rep.coverage_fraction);
                    row.returned = Some(rep.returned_to_start);
                    row.error = rep.failure.clone();
                    let mut v = vec![];
                    if let Some(e) = &rep.failure {
                        v.push(format!("failure: {e}"));
                    }
                    if rep.coverage_fraction < th.min_coverage {
                        v.push(format!("coverage {:.6} < {}", rep.coverage_fraction, th.min_coverage));
                    }
                    if th.require_return && !rep.returned_to_start {
                        v.push("did not return to start".into());
                    }
                    if let Some(m) = th.max_ratio_upper {
                        match rep.ratio_interval[1] {
                            Some(r) if r <= m => {}
                            Some(r) => v.push(format!("ratio {r:.4} > {m}")),
                            None => v.push("ratio unbounded".into()),
                        }
                    }
                    row.violation = (!v.is_empty()).then(|| v.join("; "));
                    row
                })
                .collect()
        })
        .collect();
    let mut rows: Vec<BenchRow> = groups.into_iter().flatten().collect();
    for (i, r) in rows.iter_mut().enumerate() {
        r.index = i;
    }
    let mut ups: Vec<f64> = rows.iter().filter_map(|r| r.ratio_upper).collect();
    ups.sort_by(f64::total_cmp);
    let median = match ups.len() {
        0 => None,
        n if n % 2 == 1 => Some(ups[n / 2]),
        n => Some(0.5 * (ups[n / 2 - 1] + ups[n / 2])),
    };
    let summary = BenchSummary {
        rows: rows.len(),
        max_ratio_upper: ups.last().copied(),
        median_ratio_upper: median,
        violations: rows.iter().filter(|r| r.violation.is_some()).count(),
    };
    BenchResult { rows, summary }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl BenchResult {
    pub fn passed(&self) -> bool {
        self.summary.violations == 0
    }

    /// One line per row, then the summary lines `max` and `median`.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(vec![]);
        let err = |e: csv::Error| HarnessError::Internal(e.to_string());
        w.write_record([
            "index",
            "family",
            "params",
            "strategy",
            "label",
            "alpha",
            "trace_length",
            "opt_lower",
            "opt_upper",
            "ratio_lower",
            "ratio_upper",
            "coverage",
            "returned",
            "error",
            "violation",
        ])
        .map_err(err)?;
        for r in &self.rows {
            let strategy = match r.strategy {
                StrategyName::Base => "base",
                StrategyName::Cpex => "cpex",
            };
            w.write_record([
                r.index.to_string(),
                r.family.clone(),
                r.params.to_string(),
                strategy.into(),
                r.label.clone(),
                opt(r.alpha),
                opt(r.trace_length),
                opt(r.opt_lower),
                opt(r.opt_upper),
                opt(r.ratio_lower),
                opt(r.ratio_upper),
                opt(r.coverage),
                r.returned.map(|b| b.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
                r.violation.clone().unwrap_or_default(),
            ])
            .map_err(err)?;
        }
        if !self.rows.is_empty() {
            let blank = |name: &str, v: Option<f64>| {
                let mut rec = vec![String::new(); 15];
                rec[0] = name.into();
                rec[10] = opt(v);
                rec
            };
            w.write_record(blank("max", self.summary.max_ratio_upper)).map_err(err)?;
            w.write_record(blank("median", self.summary.median_ratio_upper)).map_err(err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| HarnessError::Internal(e.to_string()))?)
            .map_err(|e| HarnessError::Internal(e.to_string()))
    }

    /// Fixed-width table for terminals.
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:>4}  {:<22} {:<5} {:>12} {:>10} {:>10} {:>9}  {}\n",
            "#", "label", "strat", "length", "ratio_lo", "ratio_hi", "coverage", "status"
        );
        for r in &self.rows {
            let strategy = match r.strategy {
                StrategyName::Base => "base",
                StrategyName::Cpex => "cpex",
            };
            s.push_str(&format!(
                "{:>4}  {:<22} {:<5} {:>12} {:>10} {:>10} {:>9}  {}\n",
                r.index,
                if r.label.is_empty() { &r.family } else { &r.label },
                strategy,
                opt(r.trace_length),
                r.ratio_lower.map(|x| format!("{x:.4}")).unwrap_or("inf".into()),
                r.ratio_upper.map(|x| format!("{x:.4}")).unwrap_or("inf".into()),
                r.coverage.map(|x| format!("{x:.5}")).unwrap_or_default(),
                r.violation.as_deref().unwrap_or("ok"),
            ));
        }
        s.push_str(&format!(
            "rows {}  max ratio {}  median ratio {}  violations {}\n",
            self.summary.rows,
            self.summary.max_ratio_upper.map(|x| format!("{x:.4}")).unwrap_or("-".into()),
            self.summary.median_ratio_upper.map(|x| format!("{x:.4}")).unwrap_or("-".into()),
            self.summary.violations
        ));
        s
    }
}
