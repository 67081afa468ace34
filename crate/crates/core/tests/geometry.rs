use std::cmp::Ordering;
use std::collections::BTreeSet;

mod common;

use common::{brute_force_delaunay, q_incircle, q_orient};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sia_core::geom::predicates::{diametral, dist_cmp, incircle, orient};
use sia_core::geom::triangulation::{Triangulation, NO_TRI};
use sia_core::geom::voronoi::{dual_back, dualize, voronoi_of_small_set, VorVertex};
use sia_core::geom::Point2;

fn random_points(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point2::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect()
}

fn tri_set(t: &Triangulation) -> BTreeSet<[u32; 3]> {
    t.triangle_set().into_iter().collect()
}

#[test]
fn predicates_match_rational_oracle_near_degeneracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let a = Point2::new(rng.random::<f64>(), rng.random::<f64>());
        let b = Point2::new(rng.random::<f64>(), rng.random::<f64>());
        let t: f64 = rng.random();
        let mut c = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        for _ in 0..rng.random_range(0..3) {
            c.y = c.y.next_up();
        }
        assert_eq!(orient(a, b, c), q_orient(a, b, c));
        let d = Point2::new(rng.random::<f64>(), rng.random::<f64>());
        assert_eq!(incircle(a, b, d, c), q_incircle(a, b, d, c));
    }
}

#[test]
fn cocircular_points_are_detected() {
    let a = Point2::new(1.0, 0.0);
    let b = Point2::new(0.0, 1.0);
    let c = Point2::new(-1.0, 0.0);
    let d = Point2::new(0.0, -1.0);
    assert_eq!(incircle(a, b, c, d), Ordering::Equal);
    assert_eq!(diametral(a, c, b), Ordering::Equal);
    assert_eq!(diametral(a, c, Point2::new(0.1, 0.1)), Ordering::Less);
    assert_eq!(
        dist_cmp(Point2::new(0.0, 0.0), a, b),
        Ordering::Equal
    );
}

#[test]
fn triangulation_matches_brute_force() {
    for (seed, n) in [(1u64, 5usize), (2, 17), (3, 40), (4, 80)] {
        let pts = random_points(n, seed);
        let t = Triangulation::delaunay(&pts).unwrap();
        t.check_structure().unwrap();
        assert_eq!(tri_set(&t), brute_force_delaunay(&pts), "seed {seed}");
    }
}

#[test]
fn bounded_triangulation_matches_brute_force() {
    let b = sia_core::sources::DEFAULT_BOUNDING;
    let pts = random_points(50, 21);
    let t = Triangulation::with_bounding(b, &pts).unwrap();
    let mut all = b.to_vec();
    all.extend_from_slice(&pts);
    assert_eq!(tri_set(&t), brute_force_delaunay(&all));
}

#[test]
fn deletions_give_delaunay_of_remaining() {
    let b = sia_core::sources::DEFAULT_BOUNDING;
    let pts = random_points(60, 8);
    let mut t = Triangulation::with_bounding(b, &pts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut keep: Vec<bool> = vec![true; 63];
    for _ in 0..35 {
        let v = rng.random_range(3..63u32);
        if keep[v as usize] {
            t.remove_vertex(v).unwrap();
            keep[v as usize] = false;
        }
    }
    t.check_structure().unwrap();
    t.check_locally_delaunay().unwrap();
    let mut all = b.to_vec();
    all.extend_from_slice(&pts);
    let ids: Vec<u32> = (0..63u32).filter(|&v| keep[v as usize]).collect();
    let sub: Vec<Point2> = ids.iter().map(|&v| all[v as usize]).collect();
    let want: BTreeSet<[u32; 3]> = brute_force_delaunay(&sub)
        .into_iter()
        .map(|tr| {
            let mut m = tr.map(|i| ids[i as usize]);
            m.sort_unstable();
            m
        })
        .collect();
    assert_eq!(tri_set(&t), want);
    assert!(t.remove_vertex(0).is_err());
}

#[test]
fn degeneracies_are_rejected() {
    let line: Vec<Point2> = (0..4).map(|i| Point2::new(f64::from(i), 2.0 * f64::from(i))).collect();
    assert!(Triangulation::delaunay(&line).is_err());
    let square = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    assert!(Triangulation::delaunay(&square).is_err());
}

#[test]
fn from_triangles_rejects_overlap() {
    let pts = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.0, 1.0),
        Point2::new(1.0, 1.0),
    ];
    assert!(Triangulation::from_triangles(pts.clone(), &[[0, 1, 2], [1, 3, 2]]).is_ok());
    assert!(Triangulation::from_triangles(pts.clone(), &[[0, 1, 2], [0, 1, 3]]).is_err());
    assert!(Triangulation::from_triangles(pts, &[[0, 1, 2], [0, 1, 2]]).is_err());
}

#[test]
fn voronoi_round_trip_and_convexity() {
    let pts = random_points(70, 5);
    let t = Triangulation::delaunay(&pts).unwrap();
    let vor = dualize(&t);
    assert_eq!(dual_back(&vor).unwrap().edges(), t.edges());
    use sia_core::geom::derived::orient as dorient;
    for v in t.present_vertices() {
        let region = vor.region(v);
        if !vor.is_bounded(v) {
            assert_eq!(region.iter().filter(|&&x| x == VorVertex::Infinity).count(), 1);
            continue;
        }
        let c: Vec<_> = region
            .iter()
            .map(|x| match x {
                VorVertex::Finite(id) => vor.vertex_point(*id),
                VorVertex::Infinity => unreachable!(),
            })
            .collect();
        let m = c.len();
        for i in 0..m {
            assert_eq!(
                dorient(&c[i], &c[(i + 1) % m], &c[(i + 2) % m]),
                Ordering::Greater,
                "region of {v} is not strictly convex"
            );
        }
    }
}

#[test]
fn small_voronoi_examples() {
    let three = [
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.2, 0.9),
    ];
    let vor = voronoi_of_small_set(&three).unwrap();
    let finite: BTreeSet<_> = (0..3)
        .flat_map(|v| vor.region(v).to_vec())
        .filter(|x| *x != VorVertex::Infinity)
        .collect();
    assert_eq!(finite.len(), 1);
    for v in 0..3 {
        assert!(!vor.is_bounded(v));
    }
    let two = voronoi_of_small_set(&three[..2]).unwrap();
    assert_eq!(two.owner(Point2::new(0.9, 5.0)), Some(1));
}

#[test]
fn owner_is_nearest_site() {
    let pts = random_points(90, 6);
    let vor = voronoi_of_small_set(&pts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let p = Point2::new(rng.random::<f64>() * 1.4 - 0.2, rng.random::<f64>() * 1.4 - 0.2);
        let best = common::nearest(&pts, p);
        assert_eq!(vor.owner(p), Some(best as u32));
    }
}

#[test]
fn warm_started_insertion() {
    let pts = random_points(40, 12);
    let mut t = Triangulation::delaunay(&pts).unwrap();
    let start = t.finite_triangles().last().unwrap();
    t.insert(Point2::new(0.51, 0.49), start).unwrap();
    t.insert(Point2::new(0.11, 0.93), NO_TRI).unwrap();
    t.check_locally_delaunay().unwrap();
    let mut all = pts.clone();
    all.push(Point2::new(0.51, 0.49));
    all.push(Point2::new(0.11, 0.93));
    assert_eq!(tri_set(&t), brute_force_delaunay(&all));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orientation_is_antisymmetric(
        a in (-1e3f64..1e3, -1e3f64..1e3),
        b in (-1e3f64..1e3, -1e3f64..1e3),
        c in (-1e3f64..1e3, -1e3f64..1e3),
    ) {
        let (a, b, c) = (Point2::new(a.0, a.1), Point2::new(b.0, b.1), Point2::new(c.0, c.1));
        prop_assert_eq!(orient(a, b, c), orient(b, a, c).reverse());
        prop_assert_eq!(orient(a, b, c), orient(b, c, a));
        prop_assert_eq!(orient(a, b, c), q_orient(a, b, c));
    }

    #[test]
    fn random_sets_triangulate_exactly(seed in 0u64..10_000, n in 3usize..30) {
        let pts = random_points(n, seed);
        let t = Triangulation::delaunay(&pts).unwrap();
        prop_assert_eq!(tri_set(&t), brute_force_delaunay(&pts));
    }
}
