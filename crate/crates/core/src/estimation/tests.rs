use approx::assert_relative_eq;

use super::*;
use crate::measures::{renyi_divergence, shannon_entropy, Measure};
use crate::numeric::RunningMoments;
use crate::param::SourceParam;

fn reals(v: &[f64]) -> Vec<Observation> {
    v.iter().map(|&x| Observation::Real(x)).collect()
}

fn counts(v: &[u64]) -> Vec<Observation> {
    v.iter().map(|&x| Observation::Count(x)).collect()
}

fn drawn(src: &SourceParam, n: usize, seed: u64) -> SampleSet {
    let fam = src.family();
    let theta = fam.to_natural(src).unwrap();
    SampleSet::new(fam, fam.sample(&theta, n, seed).unwrap()).unwrap()
}

fn sources() -> Vec<SourceParam> {
    vec![
        SourceParam::Exponential { rate: 2.0 },
        SourceParam::Poisson { rate: 3.5 },
        SourceParam::Bernoulli { p: 0.3 },
        SourceParam::Gaussian { mu: -1.0, var: 2.0 },
        SourceParam::MultivariateGaussian {
            mu: vec![1.0, 0.5],
            sigma: SymMatrix::new(2, vec![1.0, 0.4, 0.4, 2.0]).unwrap(),
        },
        SourceParam::CenteredLaplacian { scale: 1.5 },
    ]
}

#[test]
fn exponential_mean_two() {
    let s = SampleSet::new(Family::Exponential, reals(&[1.0, 3.0, 2.5, 1.5])).unwrap();
    let e = mle(&s).unwrap();
    assert_eq!(e.n, 4);
    match Family::Exponential.from_natural(&e.theta).unwrap() {
        SourceParam::Exponential { rate } => assert_relative_eq!(rate, 0.5, max_relative = 1e-15),
        other => panic!("{other:?}"),
    }
}

#[test]
fn poisson_mean_three() {
    let s = SampleSet::new(Family::Poisson, counts(&[1, 5, 3, 3])).unwrap();
    let e = mle(&s).unwrap();
    assert_relative_eq!(e.theta.first(), 3f64.ln(), max_relative = 1e-15);
}

#[test]
fn boundary_moments_are_degenerate() {
    let ones = SampleSet::new(Family::Bernoulli, counts(&[1; 20])).unwrap();
    assert!(matches!(mle(&ones), Err(Error::DegenerateSample(_))));
    let zeros = SampleSet::new(Family::Bernoulli, counts(&[0; 5])).unwrap();
    assert!(matches!(mle(&zeros), Err(Error::DegenerateSample(_))));
    let flat = SampleSet::new(Family::Gaussian, reals(&[0.1; 7])).unwrap();
    assert!(matches!(mle(&flat), Err(Error::DegenerateSample(_))));
    let single = SampleSet::new(Family::Gaussian, reals(&[3.0])).unwrap();
    assert!(matches!(mle(&single), Err(Error::DegenerateSample(_))));
    let zero = SampleSet::new(Family::Poisson, counts(&[0, 0])).unwrap();
    assert!(matches!(mle(&zero), Err(Error::DegenerateSample(_))));

    let mvn = Family::MultivariateGaussian { dim: 2 };
    let two = vec![Observation::Vector(vec![0.0, 1.0]), Observation::Vector(vec![1.0, 0.0])];
    assert!(matches!(mle(&SampleSet::new(mvn, two).unwrap()), Err(Error::DegenerateSample(_))));
    let line: Vec<_> = (0..4).map(|i| Observation::Vector(vec![i as f64, 2.0 * i as f64])).collect();
    assert!(matches!(mle(&SampleSet::new(mvn, line).unwrap()), Err(Error::DegenerateSample(_))));
}

#[test]
fn construction_checks() {
    assert!(matches!(SampleSet::new(Family::Poisson, vec![]), Err(Error::DegenerateSample(_))));
    assert!(SampleSet::new(Family::Exponential, reals(&[1.0, -1.0])).is_err());
    assert!(SampleSet::new(Family::Bernoulli, counts(&[2])).is_err());
}

#[test]
fn single_interior_observation_is_a_fixed_point() {
    for (fam, x) in [
        (Family::Exponential, Observation::Real(2.5)),
        (Family::Poisson, Observation::Count(4)),
        (Family::CenteredLaplacian, Observation::Real(-1.5)),
    ] {
        let e = mle(&SampleSet::new(fam, vec![x.clone()]).unwrap()).unwrap();
        let eta = fam.grad_log_normalizer(&e.theta).unwrap();
        let t = fam.sufficient_stat(&x).unwrap();
        assert!(eta.max_abs_diff(&t) < 1e-9, "{fam}");
    }
}

#[test]
fn execution_paths_agree_bitwise() {
    for src in sources() {
        let s = drawn(&src, 40_000, 17);
        let a = mle_with(&s, Execution::Sequential).unwrap();
        let b = mle_with(&s, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn consistency_across_sample_sizes() {
    for src in sources() {
        let fam = src.family();
        let truth = fam.to_natural(&src).unwrap();
        let eta_true = fam.grad_log_normalizer(&truth).unwrap().coordinates();
        let errors: Vec<f64> = [100, 1_000, 10_000, 100_000]
            .iter()
            .map(|&n| mle(&drawn(&src, n, 23)).unwrap().theta.max_abs_diff(&truth))
            .collect();
        let shrinking = errors.windows(2).filter(|w| w[1] <= w[0]).count();
        assert!(shrinking >= 2, "{fam}: {errors:?}");

        let s = drawn(&src, 100_000, 23);
        let eta = mle(&s).unwrap().mean_sufficient_stat.coordinates();
        let mut spread = vec![RunningMoments::default(); eta.len()];
        for x in s.observations() {
            for (m, v) in spread.iter_mut().zip(fam.sufficient_stat(x).unwrap().coordinates()) {
                m.push(v);
            }
        }
        for ((e, t), m) in eta.iter().zip(&eta_true).zip(&spread) {
            assert!((e - t).abs() <= 4.0 * m.std_error(), "{fam}: {e} vs {t}");
        }
    }
}

#[test]
fn plugin_is_the_measure_at_the_estimate() {
    let s = drawn(&SourceParam::Exponential { rate: 2.0 }, 100_000, 3);
    let req = MeasureRequest { measure: Measure::Shannon, alpha: None };
    let plug = plugin_measure(&req, &s, None).unwrap();
    let direct = shannon_entropy(&Family::Exponential, &mle(&s).unwrap().theta).unwrap();
    assert_eq!(plug.value, direct);
    assert!((plug.value - (1.0 - 2f64.ln())).abs() < 0.02);
}

#[test]
fn plugin_kl_of_identical_samples_is_zero() {
    let s = drawn(&SourceParam::Gaussian { mu: 0.5, var: 1.5 }, 5_000, 8);
    let req = MeasureRequest { measure: Measure::Kl, alpha: None };
    assert_eq!(plugin_measure(&req, &s, Some(&s)).unwrap().value, 0.0);
}

#[test]
fn plugin_renyi_divergence_exponential_pair() {
    let p = drawn(&SourceParam::Exponential { rate: 1.0 }, 100_000, 5);
    let q = drawn(&SourceParam::Exponential { rate: 2.0 }, 100_000, 6);
    let req = MeasureRequest { measure: Measure::RenyiDivergence, alpha: Some(0.5) };
    let r = plugin_measure(&req, &p, Some(&q)).unwrap();
    assert!((r.value - 0.117_783_035_656_383_45).abs() < 0.01);
    let theta = |s: &SampleSet| mle(s).unwrap().theta;
    assert_eq!(r.value, renyi_divergence(&Family::Exponential, &theta(&p), &theta(&q), 0.5).unwrap().value);
}

#[test]
fn plugin_errors() {
    let p = drawn(&SourceParam::Exponential { rate: 1.0 }, 100, 1);
    let q = drawn(&SourceParam::Poisson { rate: 1.0 }, 100, 1);
    let kl = MeasureRequest { measure: Measure::Kl, alpha: None };
    assert!(matches!(plugin_measure(&kl, &p, Some(&q)), Err(Error::FamilyMismatch(..))));
    assert!(matches!(plugin_measure(&kl, &p, None), Err(Error::MissingSample(_))));
    let ones = SampleSet::new(Family::Bernoulli, counts(&[1; 10])).unwrap();
    let h = MeasureRequest { measure: Measure::Shannon, alpha: None };
    assert!(matches!(plugin_measure(&h, &ones, None), Err(Error::DegenerateSample(_))));
}
