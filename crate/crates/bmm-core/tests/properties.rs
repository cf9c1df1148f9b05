//! Property tests for the estimators and the weight sampler.

use proptest::prelude::*;

use bmm_core::dirichlet::{
    sample_dirichlet_uniform_fast, sample_symmetric_dirichlet, weighted_mean, DirichletWeights,
    SIMPLEX_TOL,
};
use bmm_core::estimators::{
    abmm, bmm, hodges_lehmann, median_of_means, sample_mean, sample_median,
};
use bmm_core::{derive_substream, EstimatorConfig, Sample};

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6f64, 1..24)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + scale.abs())
}

proptest! {
    #[test]
    fn translation_equivariance(values in sample_strategy(), shift in -1e6f64..1e6f64) {
        let s = Sample::new(values.clone()).unwrap();
        let shifted = Sample::new(values.iter().map(|v| v + shift).collect()).unwrap();
        let cfg = EstimatorConfig::new(1.0, 32, 7).unwrap();
        let scale = 1e6 + shift.abs();

        prop_assert!(close(sample_mean(&shifted), sample_mean(&s) + shift, scale));
        prop_assert!(close(
            sample_median(shifted.values()).unwrap(),
            sample_median(s.values()).unwrap() + shift,
            scale
        ));
        prop_assert!(close(
            abmm(&shifted, 0.8).unwrap(),
            abmm(&s, 0.8).unwrap() + shift,
            scale
        ));
        prop_assert!(close(
            bmm(&shifted, &cfg).unwrap().estimate,
            bmm(&s, &cfg).unwrap().estimate + shift,
            scale
        ));
        let g = 1 + values.len() / 3;
        prop_assert!(close(
            median_of_means(&shifted, g).unwrap(),
            median_of_means(&s, g).unwrap() + shift,
            scale
        ));
        if values.len() >= 2 {
            prop_assert!(close(
                hodges_lehmann(&shifted).unwrap(),
                hodges_lehmann(&s).unwrap() + shift,
                scale
            ));
        }
    }

    #[test]
    fn scale_equivariance(values in sample_strategy(), factor in prop::sample::select(vec![-3.5f64, -1.0, -0.25, 0.5, 2.0, 40.0])) {
        let s = Sample::new(values.clone()).unwrap();
        let scaled = Sample::new(values.iter().map(|v| v * factor).collect()).unwrap();
        let cfg = EstimatorConfig::new(0.5, 16, 3).unwrap();
        let scale = 1e6 * factor.abs();

        prop_assert!(close(sample_mean(&scaled), factor * sample_mean(&s), scale));
        prop_assert!(close(
            sample_median(scaled.values()).unwrap(),
            factor * sample_median(s.values()).unwrap(),
            scale
        ));
        prop_assert!(close(
            abmm(&scaled, 1.3).unwrap(),
            factor * abmm(&s, 1.3).unwrap(),
            scale
        ));
        prop_assert!(close(
            bmm(&scaled, &cfg).unwrap().estimate,
            factor * bmm(&s, &cfg).unwrap().estimate,
            scale
        ));
    }

    #[test]
    fn bmm_stays_in_support(values in sample_strategy(), seed in any::<u64>(), draws in 1usize..80) {
        let s = Sample::new(values).unwrap();
        let cfg = EstimatorConfig::new(0.7, draws, seed).unwrap();
        let rep = bmm(&s, &cfg).unwrap();
        prop_assert!(rep.estimate >= s.min() && rep.estimate <= s.max());
    }

    #[test]
    fn bmm_is_bit_deterministic(values in sample_strategy(), seed in any::<u64>()) {
        let s = Sample::new(values).unwrap();
        let cfg = EstimatorConfig::new(1.0, 25, seed).unwrap();
        let a = bmm(&s, &cfg).unwrap();
        let b = bmm(&s, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn order_free_estimators_are_permutation_invariant(
        values in prop::collection::vec(-1e3f64..1e3f64, 2..16),
        rotation in 1usize..15,
    ) {
        let mut permuted = values.clone();
        permuted.rotate_left(rotation % values.len());
        let s = Sample::new(values).unwrap();
        let p = Sample::new(permuted).unwrap();
        prop_assert!(close(sample_mean(&s), sample_mean(&p), 1e3));
        prop_assert_eq!(
            sample_median(s.values()).unwrap(),
            sample_median(p.values()).unwrap()
        );
        prop_assert!(close(abmm(&s, 1.0).unwrap(), abmm(&p, 1.0).unwrap(), 1e3));
        prop_assert_eq!(hodges_lehmann(&s).unwrap(), hodges_lehmann(&p).unwrap());
    }

    #[test]
    fn weighted_mean_is_invariant_under_joint_permutation(
        values in prop::collection::vec(-1e3f64..1e3f64, 2..12),
        seed in any::<u64>(),
        rotation in 1usize..11,
    ) {
        // permuting data and weight coordinates together keeps the average
        let n = values.len();
        let r = rotation % n;
        let w = sample_symmetric_dirichlet(n, 1.5, &derive_substream(seed, 0)).unwrap();
        let mut wv = w.values().to_vec();
        wv.rotate_left(r);
        let mut pv = values.clone();
        pv.rotate_left(r);
        let y1 = weighted_mean(&w, &Sample::new(values).unwrap()).unwrap();
        let y2 = weighted_mean(
            &DirichletWeights::from_vec(wv).unwrap(),
            &Sample::new(pv).unwrap(),
        )
        .unwrap();
        prop_assert!((y1 - y2).abs() <= 1e-9 * (1.0 + y1.abs()));
    }

    #[test]
    fn simplex_invariant(
        n in 1usize..50,
        alpha in prop::sample::select(vec![0.01f64, 0.3, 1.0, 2.5, 20.0]),
        seed in any::<u64>(),
        index in any::<u64>(),
    ) {
        let stream = derive_substream(seed, index);
        let w = sample_symmetric_dirichlet(n, alpha, &stream).unwrap();
        prop_assert!(w.values().iter().all(|&v| v >= 0.0));
        prop_assert!((w.values().iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL);
        let f = sample_dirichlet_uniform_fast(n, &stream).unwrap();
        prop_assert!(f.values().iter().all(|&v| v >= 0.0));
        prop_assert!((f.values().iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL);
    }
}

#[test]
fn median_of_means_depends_on_order() {
    // documented: the block split follows input order
    let a = Sample::new(vec![10.0, 10.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let b = Sample::new(vec![10.0, 0.0, 0.0, 10.0, 0.0, 0.0]).unwrap();
    let ma = median_of_means(&a, 3).unwrap();
    let mb = median_of_means(&b, 3).unwrap();
    assert_ne!(ma, mb);
}
