mod common;

use common::checks::{doubling_cost, semicircle_case};
use cpex::search::{cow_path, cow_schedule, star_schedule, star_search, LineRay, SearchRay};
use proptest::prelude::*;
use std::f64::consts::E;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cow_path_is_nine_competitive(d in 1.0f64..1e4, second in any::<bool>()) {
        let mut a = LineRay::new(0, (!second).then_some(d));
        let mut b = LineRay::new(1, second.then_some(d));
        let out = cow_path(&mut a, &mut b, 1.0, 1e9).unwrap();
        prop_assert_eq!(out.found_on, second as usize);
        prop_assert!((out.total_traveled - doubling_cost(d, second, 1.0)).abs() <= 1e-9 * d);
        prop_assert!(out.total_traveled / d <= 9.0 + 1e-9, "ratio {}", out.total_traveled / d);
    }

    #[test]
    fn star_search_bound(m in prop::sample::select(vec![3usize, 6, 9]), k in 0usize..9, d in 1.0f64..1e4) {
        let k = k % m;
        let mut rays: Vec<LineRay> = (0..m).map(|i| LineRay::new(i, (i == k).then_some(d))).collect();
        let mut refs: Vec<&mut dyn SearchRay> = rays.iter_mut().map(|r| r as &mut dyn SearchRay).collect();
        let out = star_search(&mut refs, 1.0, 1e12).unwrap();
        prop_assert_eq!(out.found_on, k);
        let bound = 2.0 * E * m as f64 + 1.0 + 0.05;
        prop_assert!(out.total_traveled / d <= bound, "m {} ratio {}", m, out.total_traveled / d);
    }

    #[test]
    fn semicircle_at_most_twice_the_straight_distance(
        r in 0.1f64..100.0,
        robot in 0.0f64..std::f64::consts::TAU,
        edge in 0.0f64..std::f64::consts::TAU,
    ) {
        if let Some((arc, straight)) = semicircle_case(r, robot, edge, 1e-4 * r) {
            prop_assert!(arc <= 2.0 * straight + 1e-6 * r, "arc {} straight {}", arc, straight);
        }
    }
}

#[test]
fn schedules() {
    let c = cow_schedule(1.0, 4);
    assert_eq!(c, vec![(0, 1.0), (1, 2.0), (0, 4.0), (1, 8.0)]);
    let s = star_schedule(3, 1.0, 4);
    assert_eq!(s.iter().map(|v| v.0).collect::<Vec<_>>(), vec![0, 1, 2, 0]);
    assert!((s[3].1 - 1.5f64.powi(3)).abs() < 1e-12);
}

#[test]
fn semicircle_cut_angle_sweep() {
    use std::f64::consts::{FRAC_PI_2, PI};
    // Robot one unit in front of the vertex; cut directions 1..179 degrees
    // against the approach direction.
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for deg in 1..180 {
        let cut = -(deg as f64).to_radians();
        if let Some((arc, straight)) = semicircle_case(1.0, PI, cut + PI, 1e-5) {
            worst = worst.max(arc / straight);
            cases += 1;
        }
    }
    assert!(cases >= 170, "{cases}");
    assert!(worst <= 2.0 + 1e-3, "{worst}");
    // Cut perpendicular to the approach, through the vertex: the whole half
    // circle, pi/2 against a straight distance of 1.
    let (arc, straight) = semicircle_case(1.0, PI, FRAC_PI_2, 1e-7).unwrap();
    assert!((arc - FRAC_PI_2).abs() < 1e-3, "{arc}");
    assert!((straight - 1.0).abs() < 1e-9, "{straight}");
}
