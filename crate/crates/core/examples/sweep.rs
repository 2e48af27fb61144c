//! Robustness sweep: cpex on seeded random scenes with 0..=3 holes.
//!
//!     cargo run --release --example sweep -- [seeds per h] [vertices]

use cpex::harness::{gen_family, run, RunConfig, StrategyName};
use rayon::prelude::*;
use serde_json::json;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let seeds = args.next().unwrap_or(40);
    let n = args.next().unwrap_or(30);
    let jobs: Vec<(u64, u64)> = (0..=3).flat_map(|h| (0..seeds).map(move |s| (h, s))).collect();
    let cfg = RunConfig::default();
    let rows: Vec<(bool, Option<f64>, f64, String)> = jobs
        .par_iter()
        .map(|&(h, s)| match gen_family("random", &json!({ "h": h, "seed": s, "n": n })) {
            Err(e) => (false, None, 0.0, format!("h{h} s{s}: generation failed: {e}")),
            Ok(b) => {
                let r = run(&b, StrategyName::Cpex, &cfg).report;
                let line = format!(
                    "h{h} s{s}: length {:.2} ratio_hi {:?} coverage {:.5} returned {} failure {:?}",
                    r.trace_length, r.ratio_interval[1], r.coverage_fraction, r.returned_to_start, r.failure
                );
                (r.passed(cfg.coverage_threshold), r.ratio_interval[1], r.wall_time, line)
            }
        })
        .collect();
    for (ok, _, _, line) in &rows {
        if !ok {
            println!("BAD {line}");
        }
    }
    let bad = rows.iter().filter(|r| !r.0).count();
    let worst = rows.iter().filter_map(|r| r.1).fold(0.0, f64::max);
    let slowest = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    println!("runs {} bad {bad} max ratio_hi {worst:.3} slowest {slowest:.2}s", rows.len());
}
