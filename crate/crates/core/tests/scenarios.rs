use cpex::geometry::{validate_scene, Point};
use cpex::scenarios::*;
use cpex::visibility::{sees, visibility_polygon};

const PHI: f64 = 1.618_033_988_749_895;

#[test]
fn golden_ratio_minimizes_max_of_f_and_g() {
    let (a, v) = golden_search();
    assert!((a - PHI).abs() < 1e-6, "{a}");
    assert!((v - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-6, "{v}");
    assert!((ratio_f(1.0) - 3.0).abs() < 1e-12);
    assert!((ratio_g(1.0) - 2.0).abs() < 1e-12);
}

#[test]
fn f_decreases_and_g_increases() {
    let xs: Vec<f64> = (1..1000).map(|i| i as f64 * 0.01).collect();
    for w in xs.windows(2) {
        assert!(ratio_f(w[1]) < ratio_f(w[0]));
        assert!(ratio_g(w[1]) > ratio_g(w[0]));
    }
}

#[test]
fn general_lb_bounds_bracket_the_optimum() {
    for side in [CutSide::LeftCut, CutSide::RightCut] {
        let b = gen_general_lb(PHI, side, 1e-4).unwrap();
        validate_scene(&b.scene).unwrap();
        let opt = b.opt_exact.unwrap();
        println!("{side:?}: lower {} exact {opt} upper {}", b.opt_lower, b.opt_upper);
        assert!(b.opt_lower <= opt + 1e-9);
        assert!(opt <= b.opt_upper + 1e-6);
        if side == CutSide::LeftCut {
            assert!((b.opt_upper - 2.0 * PHI).abs() <= 0.1 * 2.0 * PHI, "{}", b.opt_upper);
        }
    }
}

#[test]
fn general_lb_rejects_bad_parameters() {
    assert!(gen_general_lb(0.0, CutSide::LeftCut, 1e-4).is_err());
    assert!(gen_general_lb(1.0, CutSide::LeftCut, 0.5).is_err());
}

#[test]
fn orthogonal_ratio_tends_to_two() {
    let ratio = |d: f64| gen_orthogonal_lb(d, 1).unwrap().params["ratio"].as_f64().unwrap();
    let r100 = ratio(100.0);
    assert!((1.9..=2.05).contains(&r100), "{r100}");
    assert!(ratio(10.0) < r100);
    let mut last = 0.0;
    for d in [5.0, 10.0, 20.0, 50.0, 100.0, 400.0] {
        let r = ratio(d);
        assert!(r > last && r < 2.0);
        last = r;
    }
}

#[test]
fn orthogonal_scenes_are_valid() {
    for depth in 0..3 {
        let b = gen_orthogonal_lb(20.0, depth).unwrap();
        validate_scene(&b.scene).unwrap();
        assert!(b.opt_lower <= b.opt_upper);
        let opt = b.params["opt_length"].as_f64().unwrap();
        println!("depth {depth}: lower {} model {opt} upper {}", b.opt_lower, b.opt_upper);
    }
    let c = gen_orthogonal_lb_colored(20.0, 1).unwrap();
    assert_eq!(c.params["forced_length"], c.params["opt_length"]);
}

#[test]
fn four_holes_witnesses() {
    let b = gen_four_holes();
    validate_scene(&b.scene).unwrap();
    let w = FourHolesWitness::from_params(&b.params).unwrap();
    for &v in &w.viewpoints {
        assert!(!sees(&b.scene, v, w.interior).unwrap(), "{v}");
    }
    let vps: Vec<_> = w.viewpoints.iter().map(|&v| visibility_polygon(&b.scene, v).unwrap()).collect();
    for e in b.scene.edges() {
        for k in 1..100 {
            let q = e.a.lerp(e.b, k as f64 / 100.0);
            assert!(vps.iter().any(|vp| vp.contains(q, 1e-7)), "edge point {q} unseen");
        }
    }
}

#[test]
fn multihole_levels() {
    for h in [1usize, 2, 3] {
        let t = std::time::Instant::now();
        let m = maximin(h, 28);
        println!("h={h}: {:.4} {:?} {:?} ({:?})", m.value, m.alphas, m.sigmas, t.elapsed());
    }
    let t = std::time::Instant::now();
    let m = maximin(4, 12);
    println!("h=4: {:.4} ({:?})", m.value, t.elapsed());
    let b = gen_multihole_lb(2).unwrap();
    validate_scene(&b.scene).unwrap();
    assert!(gen_multihole_lb(4).is_err());
}

#[test]
fn random_scenes_are_valid_and_reproducible() {
    for h in 0..=3 {
        let a = gen_random(h, 30, 7).unwrap();
        validate_scene(&a.scene).unwrap();
        assert_eq!(a.scene.h(), h);
        assert!(a.opt_lower <= a.opt_upper, "{} {}", a.opt_lower, a.opt_upper);
        println!("h={h}: lower {} upper {}", a.opt_lower, a.opt_upper);
    }
    let x = gen_random(2, 60, 42).unwrap().to_json();
    let y = gen_random(2, 60, 42).unwrap().to_json();
    assert_eq!(x, y);
}

#[test]
fn convex_scene_bounds_are_zero() {
    let s = cpex::geometry::Scene::new(
        vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 3.0), Point::new(0.0, 3.0)],
        vec![],
        Point::new(2.0, 0.0),
    );
    let b = opt_bounds(&s);
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
}

#[test]
fn bundle_json_round_trip() {
    let b = gen_orthogonal_lb(10.0, 1).unwrap();
    let back = ScenarioBundle::from_json(&b.to_json()).unwrap();
    assert_eq!(back, b);
}
