use std::cmp::Ordering;
use std::collections::BTreeMap;

mod common;

use common::ref_orient;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sia_core::geom::triangulation::Triangulation;
use sia_core::geom::Point2;
use sia_core::locate::{locate, SlabMap, TriangleLocator};
use sia_core::sources::DEFAULT_BOUNDING;

fn random_points(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point2::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect()
}

/// Smallest-id finite triangle whose closure contains `q`, by linear scan.
fn scan(t: &Triangulation, q: Point2) -> Option<u32> {
    t.finite_triangles().find(|&s| {
        let [a, b, c] = t.triangle_points(s);
        [(a, b), (b, c), (c, a)]
            .iter()
            .all(|&(u, v)| ref_orient(u, v, q) != Ordering::Less)
    })
}

fn in_bounding(rng: &mut ChaCha8Rng) -> Point2 {
    let [a, b, c] = DEFAULT_BOUNDING;
    let (mut s, mut u): (f64, f64) = (rng.random(), rng.random());
    if s + u > 1.0 {
        s = 1.0 - s;
        u = 1.0 - u;
    }
    Point2::new(
        a.x + s * (b.x - a.x) + u * (c.x - a.x),
        a.y + s * (b.y - a.y) + u * (c.y - a.y),
    )
}

fn setup(n: usize, seed: u64) -> (Triangulation, SlabMap, TriangleLocator) {
    let t = Triangulation::with_bounding(DEFAULT_BOUNDING, &random_points(n, seed)).unwrap();
    let map = SlabMap::build(&t).unwrap();
    let fb = TriangleLocator::fallback(&map);
    (t, map, fb)
}

#[test]
fn fallback_matches_linear_scan() {
    let (t, map, fb) = setup(100, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bound = 4.0 * (t.present_vertices().count() as f64).log2();
    for i in 0..10_000 {
        let q = if i % 2 == 0 {
            in_bounding(&mut rng)
        } else {
            Point2::new(rng.random(), rng.random())
        };
        let r = locate(&map, &t, &fb, &fb, q).unwrap();
        assert_eq!(Some(r.tri), scan(&t, q), "query {q:?}");
        assert!(f64::from(r.steps) <= bound, "{} steps", r.steps);
    }
}

#[test]
fn boundary_queries_take_smallest_id() {
    let (t, map, fb) = setup(60, 3);
    let pts = t.points().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (i, &p) in pts.iter().enumerate() {
        let r = locate(&map, &t, &fb, &fb, p).unwrap();
        assert_eq!(Some(r.tri), scan(&t, p));
        assert!(t.vertices(r.tri).contains(&(i as u32)));
        // Same abscissa as a vertex: on a slab boundary.
        let q = Point2::new(p.x, rng.random::<f64>());
        if map.contains(q) {
            assert_eq!(Some(locate(&map, &t, &fb, &fb, q).unwrap().tri), scan(&t, q));
        }
    }
    // Points exactly on axis-parallel edges of a grid-like triangulation.
    let sq = vec![
        Point2::new(0.0, 0.0),
        Point2::new(4.0, 0.0),
        Point2::new(4.0, 4.0),
        Point2::new(0.0, 4.0),
        Point2::new(1.0, 2.5),
    ];
    let t = Triangulation::from_triangles(sq, &[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]).unwrap();
    let map = SlabMap::build(&t).unwrap();
    let fb = TriangleLocator::fallback(&map);
    for q in [
        Point2::new(2.0, 0.0),
        Point2::new(4.0, 1.0),
        Point2::new(0.0, 3.0),
        Point2::new(1.0, 2.5),
        Point2::new(1.0, 1.0),
        Point2::new(0.5, 1.25),
    ] {
        assert_eq!(Some(locate(&map, &t, &fb, &fb, q).unwrap().tri), scan(&t, q), "{q:?}");
    }
}

#[test]
fn outside_queries_are_rejected() {
    let (t, map, fb) = setup(10, 5);
    assert!(locate(&map, &t, &fb, &fb, Point2::new(0.0, -100.0)).is_err());
    assert!(locate(&map, &t, &fb, &fb, Point2::new(f64::NAN, 0.0)).is_err());
    assert!(locate(&map, &t, &fb, &fb, DEFAULT_BOUNDING[1]).is_ok());
}

#[test]
fn dominant_cell_is_found_quickly() {
    let (t, map, fb) = setup(80, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cells = map.triangle_cells();
    let tri = t.finite_triangles().find(|&s| t.vertices(s).iter().all(|&v| v >= 3)).unwrap();
    let cs = &cells[&tri];
    // All mass on one cell.
    let loc = TriangleLocator::biased(&map, &[(cs[0], 1.0)], 7).unwrap();
    assert_eq!(loc.stored_cells(), 1);
    for _ in 0..200 {
        let q = in_triangle(&mut rng, t.triangle_points(tri));
        let r = locate(&map, &t, &loc, &fb, q).unwrap();
        assert_eq!(r.tri, tri);
        if r.cell == cs[0] {
            assert!(!r.used_fallback);
            assert!(r.steps <= 4);
        }
    }
    // All mass on one triangle: a cell holding most of it sits at both roots.
    let masses = BTreeMap::from([(tri, 1.0)]);
    let loc = TriangleLocator::from_triangle_masses(&map, &masses, 7).unwrap();
    assert_eq!(loc.stored_cells(), cs.len());
    let big = *cs.iter().max_by(|&&a, &&b| map.cell_area(a).total_cmp(&map.cell_area(b))).unwrap();
    let area: f64 = cs.iter().map(|&c| map.cell_area(c)).sum();
    let dominant = map.cell_area(big) > 0.5 * area;
    let mut total = 0;
    for _ in 0..200 {
        let q = in_triangle(&mut rng, t.triangle_points(tri));
        let r = locate(&map, &t, &loc, &fb, q).unwrap();
        assert!(!r.used_fallback);
        assert!(r.cell != big || !dominant || r.steps <= 4);
        total += r.steps;
    }
    assert!(total <= 8 * 200);
    // Empty mass table: always the fallback.
    let empty = TriangleLocator::biased(&map, &[], 7).unwrap();
    let q = in_triangle(&mut rng, t.triangle_points(tri));
    let r = locate(&map, &t, &empty, &fb, q).unwrap();
    assert!(r.used_fallback);
    assert_eq!(r.tri, tri);
}

/// Uniform point in the closed triangle.
fn in_triangle(rng: &mut ChaCha8Rng, [a, b, c]: [Point2; 3]) -> Point2 {
    let (mut s, mut u): (f64, f64) = (rng.random(), rng.random());
    if s + u > 1.0 {
        s = 1.0 - s;
        u = 1.0 - u;
    }
    Point2::new(
        a.x + s * (b.x - a.x) + u * (c.x - a.x),
        a.y + s * (b.y - a.y) + u * (c.y - a.y),
    )
}

fn mean_steps(
    t: &Triangulation,
    map: &SlabMap,
    loc: &TriangleLocator,
    fb: &TriangleLocator,
    tris: &[u32],
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0u64;
    for i in 0..10_000 {
        let tri = tris[i % tris.len()];
        let q = in_triangle(&mut rng, t.triangle_points(tri));
        let r = locate(map, t, loc, fb, q).unwrap();
        assert_eq!(Some(r.tri), scan(t, q));
        total += u64::from(r.steps);
    }
    total as f64 / 10_000.0
}

#[test]
fn two_heavy_triangles() {
    let (t, map, fb) = setup(120, 7);
    let tris: Vec<u32> = t
        .finite_triangles()
        .filter(|&s| t.vertices(s).iter().all(|&v| v >= 3))
        .step_by(17)
        .take(2)
        .collect();
    let masses: BTreeMap<u32, f64> = tris.iter().map(|&s| (s, 0.5)).collect();
    let loc = TriangleLocator::from_triangle_masses(&map, &masses, 8).unwrap();
    let mean = mean_steps(&t, &map, &loc, &fb, &tris, 8);
    assert!(mean <= 8.0, "mean steps {mean}");
}

#[test]
fn spread_mass_engages_budget() {
    let (t, map, fb) = setup(256, 9);
    let tris: Vec<u32> = t.finite_triangles().step_by(31).take(16).collect();
    let masses: BTreeMap<u32, f64> = tris.iter().map(|&s| (s, 1.0 / 16.0)).collect();
    let loc = TriangleLocator::from_triangle_masses(&map, &masses, 8).unwrap();
    let biased = mean_steps(&t, &map, &loc, &fb, &tris, 10);
    let fallback = mean_steps(&t, &map, &fb, &fb, &tris, 10);
    assert!(biased <= fallback + 8.0, "biased {biased} fallback {fallback}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn biased_answers_match_fallback(seed in 0u64..100_000, n in 1usize..60, budget in 1u32..12) {
        let (t, map, fb) = setup(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let mut mass: Vec<(u32, f64)> = Vec::new();
        for c in 0..map.num_cells() as u32 {
            if rng.random::<f64>() < 0.3 {
                mass.push((c, rng.random::<f64>()));
            }
        }
        let loc = TriangleLocator::biased(&map, &mass, budget).unwrap();
        let fb_max = 4.0 * ((n + 3) as f64).log2() + 4.0;
        for i in 0..50 {
            let q = if i % 5 == 0 {
                t.point(rng.random_range(0..(n + 3) as u32))
            } else {
                Point2::new(rng.random(), rng.random())
            };
            let a = locate(&map, &t, &loc, &fb, q).unwrap();
            let b = locate(&map, &t, &fb, &fb, q).unwrap();
            prop_assert_eq!(a.tri, b.tri);
            prop_assert_eq!(Some(a.tri), scan(&t, q));
            prop_assert!(f64::from(a.steps) <= f64::from(budget) + 2.0 + fb_max);
        }
    }
}
