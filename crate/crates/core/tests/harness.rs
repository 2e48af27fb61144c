mod common;

use common::{p, poly_len};
use cpex::geometry::{Hole, Scene};
use cpex::harness::*;
use cpex::scenarios::{gen_general_lb, gen_random, CutSide, ScenarioBundle};
use cpex::strategies::EventKind;
use serde_json::json;

fn bundle(scene: Scene) -> ScenarioBundle {
    let b = cpex::scenarios::opt_bounds(&scene);
    ScenarioBundle { scene, opt_exact: None, opt_lower: b.lower, opt_upper: b.upper, label: "test".into(), params: json!({}) }
}

fn without_wall_time(r: &RunReport) -> String {
    let mut r = r.clone();
    r.wall_time = 0.0;
    r.to_json()
}

#[test]
fn convex_scene_ratio_is_one() {
    let scene = Scene::new(vec![p(0.0, 0.0), p(4.0, 0.0), p(4.0, 3.0), p(0.0, 3.0)], vec![], p(2.0, 0.0));
    let out = run(&bundle(scene), StrategyName::Cpex, &RunConfig::default());
    let r = &out.report;
    assert_eq!(r.trace_length, 0.0);
    assert_eq!(r.ratio_interval, [Some(1.0), Some(1.0)]);
    assert!(!r.ratio_unbounded);
    assert_eq!(r.coverage_fraction, 1.0);
    assert!(r.returned_to_start && r.passed(0.999));
}

#[test]
fn ratio_interval_conventions() {
    assert_eq!(ratio_interval(0.0, 0.0, 0.0), ([Some(1.0), Some(1.0)], false));
    assert_eq!(ratio_interval(3.0, 0.0, 0.0), ([None, None], true));
    assert_eq!(ratio_interval(6.0, 2.0, 3.0), ([Some(2.0), Some(3.0)], false));
    let (iv, _) = ratio_interval(6.0, 2.0, f64::INFINITY);
    assert_eq!(iv, [Some(0.0), Some(3.0)]);
}

#[test]
fn empty_trace_leaves_witness() {
    // L-shaped room seen from the far end of one arm.
    let scene = Scene::new(
        vec![p(0.0, 0.0), p(4.0, 0.0), p(4.0, 1.0), p(1.0, 1.0), p(1.0, 4.0), p(0.0, 4.0)],
        vec![],
        p(4.0, 0.5),
    );
    let (frac, w) = coverage_report(&[scene.start], &scene, 0.01);
    assert!(frac < 1.0);
    let w = w.unwrap();
    assert!(w.y > 1.0, "{w}");
}

#[test]
fn reports_traces_and_svgs_are_deterministic() {
    let b = gen_random(2, 24, 11).unwrap();
    let cfg = RunConfig::default();
    let x = run(&b, StrategyName::Cpex, &cfg);
    let y = run(&b, StrategyName::Cpex, &cfg);
    assert_eq!(x.trace.to_json(), y.trace.to_json());
    assert_eq!(without_wall_time(&x.report), without_wall_time(&y.report));
    let sx = render_svg(&b.scene, Some(&x.trace.path), &overlays_from_trace(&b.scene, &x.trace));
    let sy = render_svg(&b.scene, Some(&y.trace.path), &overlays_from_trace(&b.scene, &y.trace));
    assert_eq!(sx, sy);
}

#[test]
fn trace_length_matches_polyline() {
    for seed in 0..4 {
        let b = gen_random(1 + seed as usize % 3, 20, seed).unwrap();
        let out = run(&b, StrategyName::Cpex, &RunConfig::default());
        let l = poly_len(&out.trace.path, false);
        assert!((out.report.trace_length - l).abs() <= 1e-9 * l.max(1.0), "{} vs {l}", out.report.trace_length);
        assert!(out.report.passed(0.999), "{:?}", out.report.failure);
        let [lo, hi] = out.report.ratio_interval;
        assert!(lo.unwrap() <= hi.unwrap());
    }
}

#[test]
fn svg_is_well_formed_with_one_overlay_per_event() {
    let b = gen_general_lb(1.618034, CutSide::LeftCut, 1e-4).unwrap();
    let out = run(&b, StrategyName::Cpex, &RunConfig::default());
    let overlays = overlays_from_trace(&b.scene, &out.trace);
    let events = out
        .trace
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::FenceBuilt { .. } | EventKind::Classified { .. }))
        .count();
    assert_eq!(overlays.len(), events);
    let svg = render_svg(&b.scene, Some(&out.trace.path), &overlays);
    assert_eq!(svg.matches("class=\"overlay\"").count(), overlays.len());
    assert_eq!(svg.matches("class=\"hole\"").count(), b.scene.holes.len());
    // Tags balance: every element is self-closing except svg and g.
    assert!(svg.starts_with("<svg ") && svg.trim_end().ends_with("</svg>"));
    let opened = svg.matches('<').count();
    let self_closing = svg.matches("/>").count();
    assert_eq!(opened, self_closing + 4, "{svg}");
    assert!(!svg.contains("NaN") && !svg.contains("inf"));
}

#[test]
fn svg_of_scene_only() {
    let scene = Scene::new(
        vec![p(0.0, 0.0), p(10.0, 0.0), p(10.0, 5.0), p(0.0, 5.0)],
        vec![Hole { color: 3, vertices: vec![p(4.0, 2.0), p(4.0, 3.0), p(6.0, 3.0), p(6.0, 2.0)] }],
        p(0.0, 2.5),
    );
    let svg = render_svg(&scene, None, &[]);
    // 5% padding of the larger extent on every side.
    assert!(svg.contains(r#"viewBox="-0.500000 -0.500000 11.000000 6.000000""#), "{svg}");
    assert!(!svg.contains("class=\"trace\""));
    assert_eq!(svg, render_svg(&scene, None, &[]));
}

#[test]
fn empty_bench_is_empty_and_passes() {
    let r = bench(&BenchSpec::default(), None);
    assert!(r.rows.is_empty() && r.passed());
    let csv = r.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn bench_golden_row_and_summary() {
    let spec: BenchSpec = serde_json::from_value(json!({
        "runs": [
            { "family": "general-lb", "params": { "alpha": "golden", "side": ["left", "right"] }, "strategies": ["cpex"] },
            { "family": "nope", "strategies": ["cpex"] }
        ]
    }))
    .unwrap();
    let r = bench(&spec, None);
    assert_eq!(r.rows.len(), 3);
    assert_eq!(r.summary.violations, 1);
    assert!(r.rows[2].error.as_deref().unwrap().contains("unknown family"));
    let csv = r.to_csv().unwrap();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    let recs: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(recs.len(), 5);
    assert_eq!(&recs[0][5], "1.618034");
    assert_eq!(&recs[3][0], "max");
    assert_eq!(&recs[4][0], "median");
    let ups: Vec<f64> = r.rows.iter().filter_map(|x| x.ratio_upper).collect();
    assert_eq!(r.summary.max_ratio_upper, ups.iter().copied().reduce(f64::max));
}

#[test]
fn seeded_bench_reruns_identically() {
    let spec: BenchSpec = serde_json::from_value(json!({
        "runs": [{ "family": "random", "params": { "h": [1, 2], "n": 16, "seed": 3 }, "strategies": ["cpex", "base"] }]
    }))
    .unwrap();
    let strip = |r: BenchResult| r.to_csv().unwrap();
    let a = strip(bench(&spec, Some(99)));
    assert_eq!(a, strip(bench(&spec, Some(99))));
    assert_ne!(a, strip(bench(&spec, None)));
    assert!(a.contains(r#""seed"":99"#), "{a}");
}

#[test]
fn bundled_suite_stays_within_three_holes() {
    let spec = bundled_suite();
    let text = serde_json::to_string(&spec).unwrap();
    let back: BenchSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
    for r in &spec.runs {
        if let Some(h) = r.params.get("h") {
            let hs: Vec<u64> = match h {
                serde_json::Value::Array(a) => a.iter().filter_map(|v| v.as_u64()).collect(),
                v => vec![v.as_u64().unwrap()],
            };
            assert!(hs.iter().all(|&h| h <= 3));
        }
    }
}

#[test]
fn generator_input_errors() {
    assert!(matches!(gen_family("random", &json!({ "h": -1 })), Err(HarnessError::Input(_))));
    assert!(matches!(gen_family("general-lb", &json!({ "side": "up" })), Err(HarnessError::Input(_))));
    assert!(matches!(gen_family("general-lb", &json!({ "alpha": 0.0 })), Err(HarnessError::Input(_))));
    assert_eq!(HarnessError::Input(String::new()).exit_code(), 2);
    assert_eq!(HarnessError::Internal(String::new()).exit_code(), 3);
}
