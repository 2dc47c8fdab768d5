//! Finite-difference verification of the analytic loss gradient over
//! seeded random pairs on two tensor shapes.

use pentrack_core::distill::{
    gradient_check_max_rel_error, loss_gradient, FeatureTensor, LossWeights,
};
use pentrack_core::rng::SplitMix64;

fn random_tensor(dims: [usize; 4], rng: &mut SplitMix64) -> FeatureTensor {
    let count: usize = dims.iter().product();
    FeatureTensor::from_vec(dims, (0..count).map(|_| rng.next_gaussian()).collect()).unwrap()
}

fn check_dims(dims: [usize; 4], seed_base: u64) {
    let weights = LossWeights::default();
    for seed in 0..20_u64 {
        let mut rng = SplitMix64::new(seed_base + seed);
        let teacher = random_tensor(dims, &mut rng);
        let student = random_tensor(dims, &mut rng);
        let err = gradient_check_max_rel_error(&student, &teacher, &weights).unwrap();
        assert!(err < 1e-4, "dims {dims:?} seed {seed}: max rel error {err}");
    }
}

#[test]
fn gradient_matches_finite_differences_small_shape() {
    check_dims([1, 4, 3, 3], 500);
}

#[test]
fn gradient_matches_finite_differences_batched_shape() {
    check_dims([2, 3, 5, 5], 700);
}

#[test]
fn gradient_check_holds_for_each_single_term() {
    // Isolate every term so a compensating error between terms cannot
    // slip through the combined check.
    let term_weights = [
        LossWeights::new(1.0, 0.0, 0.0, 0.0).unwrap(),
        LossWeights::new(0.0, 0.5, 0.0, 0.0).unwrap(),
        LossWeights::new(0.0, 0.0, 0.3, 0.0).unwrap(),
        LossWeights::new(0.0, 0.0, 0.0, 0.1).unwrap(),
    ];
    for (term, weights) in term_weights.iter().enumerate() {
        for seed in 0..5_u64 {
            let mut rng = SplitMix64::new(3000 + seed);
            let teacher = random_tensor([1, 4, 3, 3], &mut rng);
            let student = random_tensor([1, 4, 3, 3], &mut rng);
            let err = gradient_check_max_rel_error(&student, &teacher, weights).unwrap();
            assert!(err < 1e-4, "term {term} seed {seed}: max rel error {err}");
        }
    }
}

#[test]
fn gradient_is_zero_weighted_zero() {
    let mut rng = SplitMix64::new(4000);
    let teacher = random_tensor([1, 4, 3, 3], &mut rng);
    let student = random_tensor([1, 4, 3, 3], &mut rng);
    let weights = LossWeights::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let g = loss_gradient(&student, &teacher, &weights).unwrap();
    assert!(g.values().iter().all(|v| *v == 0.0));
}
