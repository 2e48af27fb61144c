mod common;

use common::checks::visibility_sweep;
use common::*;
use cpex::scenarios::gen_random;
use cpex::visibility::{sees, visibility_polygon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn radial_distances_match_ray_casting() {
    let st = visibility_sweep(100, 10, 100, 1e-6, 7);
    println!("{st:?}");
    assert!(st.rays >= 100_000);
    assert_eq!(st.mismatches, 0, "{st:?}");
}

#[test]
fn sees_matches_segment_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for k in 0..40 {
        let scene = gen_random(k % 4, 10 + k % 9, 100 + k as u64).unwrap().scene;
        for _ in 0..50 {
            let (a, b) = (random_free_point(&scene, &mut rng), random_free_point(&scene, &mut rng));
            assert_eq!(sees(&scene, a, b).unwrap(), segment_free(&scene, a, b, 1e-9), "{a} {b}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2000);
}

#[test]
fn polygon_contains_exactly_the_visible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..20 {
        let scene = gen_random(1 + k % 3, 12, 200 + k as u64).unwrap().scene;
        let o = random_free_point(&scene, &mut rng);
        let vp = visibility_polygon(&scene, o).unwrap();
        for _ in 0..200 {
            let q = random_free_point(&scene, &mut rng);
            // Skip points within a hair of the polygon boundary.
            let th = (q.y - o.y).atan2(q.x - o.x);
            let r = ray_cast(&scene, o, p(th.cos(), th.sin()));
            if (r - o.dist(q)).abs() < 1e-6 {
                continue;
            }
            assert_eq!(vp.contains(q, 1e-9), segment_free(&scene, o, q, 1e-9), "{o} {q}");
        }
        let _ = rng.gen::<u8>();
    }
}
