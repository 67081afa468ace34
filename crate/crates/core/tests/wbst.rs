use proptest::prelude::*;
use sia_core::wbst::{SearchShape, WeightedSearchTree};

/// Bucket by linear scan: last key not above x.
fn scan_bucket(keys: &[f64], x: f64) -> Option<u32> {
    keys.iter().rposition(|&k| k <= x).map(|i| i as u32)
}

#[test]
fn uniform_three_keys() {
    let t = WeightedSearchTree::build(vec![1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], None).unwrap();
    let root = t.shape().nodes()[0];
    assert_eq!(root.bucket, 1);
    assert_eq!(t.shape().height(), 2);
    let r = t.search(&2.5);
    assert_eq!(r.bucket, Some(1));
    assert_eq!(r.steps, 1);
}

#[test]
fn sentinel_catches_small_values() {
    let keys = vec![f64::NEG_INFINITY, 1.0, 2.0];
    let t = WeightedSearchTree::balanced_tree(keys).unwrap();
    assert_eq!(t.search(&-1e300).bucket, Some(0));
}

#[test]
fn pruned_uniform_tree() {
    let keys: Vec<f64> = (0..64).map(f64::from).collect();
    let t = WeightedSearchTree::build(keys.clone(), &[1.0; 64], Some(3)).unwrap();
    assert!(t.shape().height() <= 4);
    assert!(t.shape().len() <= 15);
    for x in keys {
        let r = t.search(&(x + 0.5));
        assert!(r.steps <= 4);
        if let Some(b) = r.bucket {
            assert_eq!(b as f64, x);
        }
    }
}

#[test]
fn unobserved_bucket_falls_off() {
    let keys: Vec<f64> = (0..10).map(f64::from).collect();
    let mut w = vec![0.0; 10];
    w[2] = 3.0;
    w[7] = 1.0;
    let t = WeightedSearchTree::build(keys, &w, Some(1)).unwrap();
    let r = t.search(&5.5);
    assert_eq!(r.bucket, None);
    assert!(r.steps <= 2);
}

#[test]
fn balanced_height() {
    for k in 1..300usize {
        let s = SearchShape::balanced(k);
        let bound = (k as f64).log2().ceil() as u32 + 1;
        assert!(s.height() <= bound, "k = {k}");
        assert_eq!(s.len(), k);
    }
}

#[test]
fn json_round_trip() {
    let t = WeightedSearchTree::build(vec![0.0, 1.0, 2.0, 3.0], &[4.0, 0.0, 1.0, 2.0], Some(5))
        .unwrap();
    let s = serde_json::to_string(&t).unwrap();
    let back: WeightedSearchTree<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
}

proptest! {
    #[test]
    fn depth_invariant(w in prop::collection::vec(0u32..1000, 1..200)) {
        let weights: Vec<f64> = w.iter().map(|&x| f64::from(x)).collect();
        let total: f64 = weights.iter().sum();
        let s = SearchShape::weighted(&weights, None).unwrap();
        for (b, d) in s.depths() {
            let wk = weights[b as usize];
            prop_assert!(wk > 0.0);
            prop_assert!(f64::from(d) <= 2.0 + 2.0 * (total / wk).log2() + 1e-9);
        }
        prop_assert_eq!(s.len(), weights.iter().filter(|&&x| x > 0.0).count());
    }

    #[test]
    fn search_matches_scan(
        w in prop::collection::vec(0u32..5, 1..60),
        xs in prop::collection::vec(-5.0f64..70.0, 1..40),
    ) {
        let keys: Vec<f64> = (0..w.len()).map(|i| i as f64).collect();
        let weights: Vec<f64> = w.iter().map(|&x| f64::from(x)).collect();
        let t = WeightedSearchTree::build(keys.clone(), &weights, None).unwrap();
        for x in xs {
            let r = t.search(&x);
            let want = scan_bucket(&keys, x);
            match r.bucket {
                Some(b) => prop_assert_eq!(Some(b), want),
                None => prop_assert!(want.is_none_or(|b| weights[b as usize] == 0.0)),
            }
        }
    }

    #[test]
    fn expected_steps_within_entropy_bound(w in prop::collection::vec(1u32..100, 1..100)) {
        let weights: Vec<f64> = w.iter().map(|&x| f64::from(x)).collect();
        let total: f64 = weights.iter().sum();
        let keys: Vec<f64> = (0..w.len()).map(|i| i as f64).collect();
        let t = WeightedSearchTree::build(keys, &weights, None).unwrap();
        let mut mean = 0.0;
        let mut h = 0.0;
        for (k, &wk) in weights.iter().enumerate() {
            let p = wk / total;
            mean += p * f64::from(t.search(&(k as f64 + 0.5)).steps);
            h -= p * p.log2();
        }
        prop_assert!(mean <= 2.0 + 2.0 * h + 1.0);
    }
}
