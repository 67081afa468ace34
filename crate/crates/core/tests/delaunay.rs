use std::cmp::Ordering;
use std::collections::BTreeSet;

mod common;

use common::{brute_force_delaunay, nearest, ref_incircle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sia_core::delaunay::{
    build_geode, conflict_walk, conflicts, edge_triangles, fuse_and_dualize, global_ids,
    restricted_triangles, restricted_voronoi, split, train_delaunay, triangulate_insertion,
    triangulate_limiting, DelaunayModel, DelaunayParams, DelaunayTrainer, GeodePiece, PieceKind,
};
use sia_core::epsnet::{NetConfig, NetMethod};
use sia_core::geom::derived::DerivedPoint;
use sia_core::geom::predicates::in_closed_triangle;
use sia_core::geom::triangulation::Triangulation;
use sia_core::geom::Point2;
use sia_core::sources::{families, sample_points, DEFAULT_BOUNDING};

fn params() -> DelaunayParams {
    DelaunayParams {
        eps: 0.5,
        c: 2.0,
        net: NetConfig::scaled(),
        ..DelaunayParams::default()
    }
}

fn model_for(family: &str, n: usize, seed: u64) -> (DelaunayModel, sia_core::sources::WorkloadSpec) {
    let spec = families::build(family, n, seed).unwrap();
    (train_delaunay(&spec, params()).unwrap(), spec)
}

/// Brute-force triangles of bounding + input, in the standard numbering.
fn oracle(input: &[Point2]) -> BTreeSet<[u32; 3]> {
    let mut all = DEFAULT_BOUNDING.to_vec();
    all.extend_from_slice(input);
    brute_force_delaunay(&all)
}

fn tri_set(t: &Triangulation) -> BTreeSet<[u32; 3]> {
    t.triangle_set().into_iter().collect()
}

fn random_inside(rng: &mut ChaCha8Rng) -> Point2 {
    let [a, b, c] = DEFAULT_BOUNDING;
    loop {
        let (s, t): (f64, f64) = (rng.random(), rng.random());
        if s + t < 1.0 {
            let p = Point2::new(
                a.x + s * (b.x - a.x) + t * (c.x - a.x),
                a.y + s * (b.y - a.y) + t * (c.y - a.y),
            );
            if in_closed_triangle(a, b, c, p) {
                return p;
            }
        }
    }
}

#[test]
fn conflict_walk_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net: Vec<Point2> = (0..60)
        .map(|_| Point2::new(rng.random(), rng.random()))
        .collect();
    let tv = Triangulation::with_bounding(DEFAULT_BOUNDING, &net).unwrap();
    for _ in 0..300 {
        let q = if rng.random_bool(0.5) {
            Point2::new(rng.random(), rng.random())
        } else {
            random_inside(&mut rng)
        };
        let start = tv
            .finite_triangles()
            .find(|&t| {
                let [a, b, c] = tv.triangle_points(t);
                in_closed_triangle(a, b, c, q)
            })
            .unwrap();
        let (got, tests) = conflict_walk(&tv, start, q).unwrap();
        let want: Vec<u32> = tv
            .finite_triangles()
            .filter(|&t| {
                let [a, b, c] = tv.triangle_points(t);
                ref_incircle(a, b, c, q) == Ordering::Greater
            })
            .collect();
        assert_eq!(got, want);
        assert!(tests as usize >= got.len());
    }
    let t0 = tv.finite_triangles().next().unwrap();
    let [a, _, _] = tv.triangle_points(t0);
    assert_eq!(conflict_walk(&tv, t0, a).unwrap().0, Vec::<u32>::new());
    assert!(conflict_walk(&tv, t0, Point2::new(50.0, 80.0)).is_err());
}

#[test]
fn limiting_matches_brute_force_on_every_family() {
    for family in families::TWO_D {
        let (model, spec) = model_for(family, 24, 7);
        for round in 100..103 {
            let input = sample_points(&spec, round).unwrap();
            let out = triangulate_limiting(&model, &input, true).unwrap();
            assert_eq!(tri_set(&out.triangulation), oracle(&input), "{family} round {round}");
            let ins = triangulate_insertion(&model, &input, false).unwrap();
            assert_eq!(tri_set(&ins.triangulation), oracle(&input), "{family} insertion");
            let r = out.report;
            assert_eq!(r.locate_steps, ins.report.locate_steps);
            assert!(r.max_conflict as u64 <= r.sum_conflicts);
            assert!(r.sum_piece_sq >= r.pieces);
        }
    }
}

#[test]
fn tiny_inputs() {
    for n in 1..4 {
        let (model, spec) = model_for("uniform-square", n, 3);
        let input = sample_points(&spec, 50).unwrap();
        let out = triangulate_limiting(&model, &input, true).unwrap();
        assert_eq!(tri_set(&out.triangulation), oracle(&input));
    }
}

#[test]
fn coincident_inputs_reuse_net_vertices() {
    let (model, spec) = model_for("point-mass-2d", 20, 5);
    let input = sample_points(&spec, 40).unwrap();
    let rec = conflicts(&model, &input).unwrap();
    let on_net = rec.coincident.iter().filter(|c| c.is_some()).count();
    assert!(on_net > 0);
    for (i, c) in rec.coincident.iter().enumerate() {
        if c.is_some() {
            assert!(rec.s[i].is_empty());
        }
    }
    let out = triangulate_limiting(&model, &input, true).unwrap();
    assert_eq!(tri_set(&out.triangulation), oracle(&input));
    assert!(triangulate_limiting(&model, &input[..5], false).is_err());
}

#[test]
fn pieces_cover_the_plane() {
    let (model, spec) = model_for("clustered", 30, 2);
    let input = sample_points(&spec, 9).unwrap();
    let rec = conflicts(&model, &input).unwrap();
    let geode = build_geode(&model, &rec);
    let tv = model.tv();
    let sites: Vec<u32> = tv.present_vertices().collect();
    let site_pts: Vec<Point2> = sites.iter().map(|&v| tv.point(v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..2000 {
        let p = Point2::new(rng.random_range(-400.0..400.0), rng.random_range(-400.0..400.0));
        let owner = sites[nearest(&site_pts, p)];
        let d = DerivedPoint::input(p);
        assert!(
            geode
                .pieces
                .iter()
                .any(|s| s.site == owner && s.contains(&model, &d)),
            "{p:?} is in no piece of site {owner}"
        );
    }
    for s in &geode.pieces {
        assert!(s.z.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn trainer_streams_and_model_round_trips() {
    let spec = families::build("concentrated", 16, 11).unwrap();
    let p = params();
    let mut t = DelaunayTrainer::new(16, spec.bounding_triangle(), p).unwrap();
    assert_eq!(t.total_rounds(), DelaunayParams::lambda(16) + p.learning_rounds(16));
    let mut round = 0;
    while !t.is_done() {
        let input = sample_points(&spec, round).unwrap();
        let (out, info) = t.observe(&input).unwrap();
        assert_eq!(tri_set(&out), oracle(&input));
        assert_eq!(info.net_round, (round as usize) < DelaunayParams::lambda(16));
        round += 1;
    }
    assert!(t.observe(&sample_points(&spec, 0).unwrap()).is_err());
    let model = t.finish().unwrap();
    for i in 0..16 {
        let total: u64 = model.counts(i).iter().map(|c| c.1).sum();
        assert_eq!(total as usize, p.learning_rounds(16));
    }
    let text = serde_json::to_string(&model).unwrap();
    let back: DelaunayModel = serde_json::from_str(&text).unwrap();
    assert_eq!(back.tv().triangle_set(), model.tv().triangle_set());
    let input = sample_points(&spec, 77).unwrap();
    let a = triangulate_limiting(&model, &input, false).unwrap();
    let b = triangulate_limiting(&back, &input, false).unwrap();
    assert_eq!(a.triangulation.triangle_set(), b.triangulation.triangle_set());
    assert_eq!(a.report.locate_steps, b.report.locate_steps);

    let early = DelaunayTrainer::new(16, spec.bounding_triangle(), p).unwrap();
    assert!(early.finish().is_err());
}

#[test]
fn greedy_net_method() {
    let spec = families::build("uniform-square", 12, 6).unwrap();
    let p = DelaunayParams {
        net_method: NetMethod::Greedy,
        ..params()
    };
    let model = train_delaunay(&spec, p).unwrap();
    assert_eq!(model.net().method, NetMethod::Greedy);
    let input = sample_points(&spec, 30).unwrap();
    let out = triangulate_limiting(&model, &input, true).unwrap();
    assert_eq!(tri_set(&out.triangulation), oracle(&input));
}

fn probe(model: &DelaunayModel, piece: &GeodePiece, rng: &mut ChaCha8Rng) -> Option<Point2> {
    let corners = match piece.kind {
        PieceKind::Fan { apex, a, b } => Some([
            model.center(apex).approx(),
            model.center(a).approx(),
            model.center(b).approx(),
        ]),
        PieceKind::SiteFan { a, b } => Some([
            model.tv().point(piece.site),
            model.center(a).approx(),
            model.center(b).approx(),
        ]),
        _ => None,
    };
    let site = model.tv().point(piece.site);
    for _ in 0..400 {
        let p = match corners {
            Some([a, b, c]) => {
                let (mut s, mut t): (f64, f64) = (rng.random(), rng.random());
                if s + t > 1.0 {
                    (s, t) = (1.0 - s, 1.0 - t);
                }
                Point2::new(
                    a.x + s * (b.x - a.x) + t * (c.x - a.x),
                    a.y + s * (b.y - a.y) + t * (c.y - a.y),
                )
            }
            None => Point2::new(
                site.x + rng.random_range(-300.0..300.0),
                site.y + rng.random_range(-300.0..300.0),
            ),
        };
        if piece.contains(model, &DerivedPoint::input(p)) {
            return Some(p);
        }
    }
    None
}

#[test]
fn local_diagrams_own_their_pieces() {
    let (model, spec) = model_for("uniform-square", 32, 13);
    let tv = model.tv();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut probes = 0;
    for round in 0..6 {
        let input = sample_points(&spec, 500 + round).unwrap();
        let rec = conflicts(&model, &input).unwrap();
        let ids = global_ids(&model, &rec);
        let mut all = tv.points().to_vec();
        all.extend_from_slice(&input);
        let mut sites: Vec<u32> = tv.present_vertices().collect();
        sites.extend(ids.iter().copied().filter(|&g| g as usize >= tv.vertex_slots()));
        let site_pts: Vec<Point2> = sites.iter().map(|&v| all[v as usize]).collect();
        let geode = build_geode(&model, &rec);
        for piece in &geode.pieces {
            let local = restricted_voronoi(&model, piece, &input, &ids).unwrap();
            for _ in 0..20 {
                let Some(p) = probe(&model, piece, &mut rng) else { continue };
                probes += 1;
                assert_eq!(local.owner(p), sites[nearest(&site_pts, p)], "{p:?} in {:?}", piece.kind);
            }
        }
    }
    assert!(probes > 1000);
}

#[test]
fn apex_has_fewest_conflicts() {
    let (model, spec) = model_for("clustered", 40, 8);
    let input = sample_points(&spec, 3).unwrap();
    let rec = conflicts(&model, &input).unwrap();
    let x = rec.x();
    for piece in build_geode(&model, &rec).pieces {
        if let PieceKind::Fan { apex, a, b } = piece.kind {
            assert!(x[apex as usize] <= x[a as usize].min(x[b as usize]));
            let mut want: Vec<u32> = [apex, a, b]
                .iter()
                .flat_map(|&t| rec.z[t as usize].iter().copied())
                .collect();
            want.sort_unstable();
            want.dedup();
            assert_eq!(piece.z, want);
        }
    }
}

#[test]
fn fusion_and_split_separately() {
    let (model, spec) = model_for("uniform-square", 40, 21);
    let input = sample_points(&spec, 60).unwrap();
    let rec = conflicts(&model, &input).unwrap();
    let ids = global_ids(&model, &rec);
    let geode = build_geode(&model, &rec);
    let (mut tris, _) = restricted_triangles(&model, &geode, &input, &ids).unwrap();
    tris.extend(edge_triangles(&model, &rec, &input, &ids).unwrap().0);
    let asm = fuse_and_dualize(&model, &input, &ids, &tris, true).unwrap();

    let tv = model.tv();
    let mut all = tv.points().to_vec();
    all.extend_from_slice(&input);
    let used: Vec<u32> = (0..all.len() as u32).filter(|&v| asm.fused.is_present(v)).collect();
    let sub: Vec<Point2> = used.iter().map(|&v| all[v as usize]).collect();
    let want: BTreeSet<[u32; 3]> = brute_force_delaunay(&sub)
        .into_iter()
        .map(|t| {
            let mut m = t.map(|i| used[i as usize]);
            m.sort_unstable();
            m
        })
        .collect();
    assert_eq!(tri_set(&asm.fused), want);

    let mut broken = tris.clone();
    let first = *broken.iter().next().unwrap();
    broken.remove(&first);
    assert!(matches!(
        fuse_and_dualize(&model, &input, &ids, &broken, false),
        Err(sia_core::Error::Fusion(_))
    ));

    let (out, deletions, _) = split(&model, &input, asm, 1).unwrap();
    assert_eq!(deletions as usize, tv.present_vertices().count() - 3);
    assert_eq!(tri_set(&out), oracle(&input));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn limiting_equals_standard(seed in 0u64..1_000_000, n in 4usize..28, fam in 0usize..4) {
        let (model, spec) = model_for(families::TWO_D[fam], n, seed);
        let input = sample_points(&spec, 1000 + seed % 7).unwrap();
        let want = Triangulation::with_bounding(DEFAULT_BOUNDING, &input).unwrap();
        let out = triangulate_limiting(&model, &input, false).unwrap();
        prop_assert_eq!(out.triangulation.triangle_set(), want.triangle_set());
        prop_assert_eq!(out.report.deletions as usize + input.len(),
            model.tv().present_vertices().count() - 3
                + input.len()
                - conflicts(&model, &input).unwrap().coincident.iter().filter(|c| c.is_some()).count());
    }
}
