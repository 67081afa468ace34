use sia_core::sorter::{
    build_vlist, mergesort_with_count, train_sorter, SorterParams, SorterTrainer,
};
use sia_core::sources::{canonical_permutation, families, sample_values};

/// Sorted (value, position) pairs by the standard library sort.
fn oracle(input: &[f64]) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = input.iter().copied().zip(0..).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    v
}

#[test]
fn vlist_from_two_instances() {
    let v = build_vlist(&[vec![3.0, 1.0, 4.0, 1.5], vec![2.0, 5.0, 0.5, 3.5]]).unwrap();
    let values: Vec<f64> = v.iter().map(|k| k.value).collect();
    assert_eq!(values, vec![1.0, 2.0, 3.5, 5.0]);
}

#[test]
fn canonical_permutation_example() {
    assert_eq!(canonical_permutation(&[1.5, 1.5, 0.0]), vec![2, 0, 1]);
}

#[test]
fn mergesort_matches_oracle() {
    let x = [0.3, -1.0, 0.3, 7.0, 2.0, -1.0];
    let (order, count) = mergesort_with_count(&x);
    let want: Vec<usize> = oracle(&x).iter().map(|p| p.1).collect();
    assert_eq!(order, want);
    assert!(count > 0);
}

#[test]
fn training_rounds_are_sorted() {
    let spec = families::build("finite-support", 32, 9).unwrap();
    let mut t = SorterTrainer::new(32, SorterParams::default()).unwrap();
    let mut r = 0;
    while !t.is_done() {
        let x = sample_values(&spec, r).unwrap();
        let (out, _) = t.observe(&x).unwrap();
        assert_eq!(out, oracle(&x));
        r += 1;
    }
    assert_eq!(r as usize, 5 + 57);
    t.finish().unwrap();
}

#[test]
fn limiting_outputs_match_oracle() {
    for name in families::ONE_D {
        for n in [16usize, 100] {
            let spec = families::build(name, n, 3).unwrap();
            let model = train_sorter(&spec, SorterParams::default()).unwrap();
            for r in 1000..1020 {
                let x = sample_values(&spec, r).unwrap();
                let out = model.sort_limiting(&x).unwrap();
                assert_eq!(out.sorted, oracle(&x), "{name} n={n} round {r}");
            }
        }
    }
}

#[test]
fn point_mass_costs() {
    let spec = families::build("point-mass", 256, 1).unwrap();
    let model = train_sorter(&spec, SorterParams::default()).unwrap();
    let x = sample_values(&spec, 5000).unwrap();
    let out = model.sort_limiting(&x).unwrap();
    assert_eq!(out.report.steps_phase1, 256);
    assert_eq!(out.report.comparisons, 2 * 256);
    assert_eq!(out.report.max_bucket, 1);
}

#[test]
fn drifted_distribution_still_sorts() {
    let train = families::build("two-point", 64, 4).unwrap();
    let model = train_sorter(&train, SorterParams::default()).unwrap();
    let other = families::build("uniform", 64, 4).unwrap();
    for r in 0..20 {
        let x = sample_values(&other, r).unwrap();
        let out = model.sort_limiting(&x).unwrap();
        assert_eq!(out.sorted, oracle(&x));
        assert!(out.report.fallback_uses > 0);
        let nlog = 64.0 * 6.0;
        assert!((out.report.comparisons as f64) <= 4.0 * nlog);
    }
}

#[test]
fn wrong_length_is_rejected() {
    let spec = families::build("uniform", 16, 1).unwrap();
    let model = train_sorter(&spec, SorterParams::default()).unwrap();
    assert!(model.sort_limiting(&[0.5; 15]).is_err());
}

#[test]
fn model_json_round_trip() {
    let spec = families::build("two-point", 32, 2).unwrap();
    let model = train_sorter(&spec, SorterParams::default()).unwrap();
    let text = serde_json::to_string(&model).unwrap();
    let back: sia_core::sorter::SorterModel = serde_json::from_str(&text).unwrap();
    for r in 100..110 {
        let x = sample_values(&spec, r).unwrap();
        assert_eq!(model.sort_limiting(&x).unwrap(), back.sort_limiting(&x).unwrap());
    }
}
