use proptest::prelude::*;
use sia_core::entropy::{
    empirical_entropy, entropy, joint_entropy_of_independents, DiscreteDistribution,
};

fn natural_log_entropy(p: &[f64]) -> f64 {
    // Independent formulation: natural logs, converted to bits at the end.
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>() / std::f64::consts::LN_2
}

#[test]
fn uniform_point_and_dyadic() {
    let u = DiscreteDistribution::from_probabilities(&[0.125; 8]).unwrap();
    assert!((entropy(&u) - 3.0).abs() < 1e-12);
    let p = DiscreteDistribution::from_probabilities(&[1.0]).unwrap();
    assert_eq!(entropy(&p), 0.0);
    let d = DiscreteDistribution::from_probabilities(&[0.5, 0.25, 0.25]).unwrap();
    assert!((entropy(&d) - 1.5).abs() < 1e-12);
}

#[test]
fn empirical_three_to_one() {
    let est = empirical_entropy(["a", "a", "a", "b"]).unwrap();
    let oracle = natural_log_entropy(&[0.75, 0.25]);
    assert!((est.value_bits - oracle).abs() < 1e-12);
    assert!((est.value_bits - 0.8113).abs() < 1e-4);
    assert_eq!(est.sample_count, 4);
    assert_eq!(est.distinct_outcomes, 2);
}

#[test]
fn error_cases() {
    assert!(empirical_entropy(Vec::<u8>::new()).is_err());
    assert!(joint_entropy_of_independents(&[1.0, -0.5]).is_err());
    assert!(DiscreteDistribution::from_probabilities(&[0.3, 0.3]).is_err());
    assert!(DiscreteDistribution::new(vec![(vec![1], 0.5), (vec![1], 0.5)]).is_err());
}

#[test]
fn joint_is_sum() {
    assert_eq!(joint_entropy_of_independents(&[1.0, 2.5, 0.0]).unwrap(), 3.5);
}

proptest! {
    #[test]
    fn bounded_by_support_size(raw in prop::collection::vec(0.0f64..10.0, 1..40)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-9);
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let d = DiscreteDistribution::from_probabilities(&p).unwrap();
        let h = entropy(&d);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-9);
        prop_assert!((h - natural_log_entropy(&p)).abs() < 1e-9);
    }

    #[test]
    fn distinct_samples_give_log_count(n in 1usize..200) {
        let est = empirical_entropy(0..n).unwrap();
        prop_assert!((est.value_bits - (n as f64).log2()).abs() < 1e-9);
    }
}
