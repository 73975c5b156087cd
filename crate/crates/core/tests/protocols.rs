use nalgebra::DMatrix;
use proptest::prelude::*;

use commest::cli::gaussian_designs;
use commest::families::{
    sample, BoundedLaw, BoundedProductSpec, FamilySpec, GaussianLocationSpec, ProbitSpec, RegressionSpec,
    UniformLocationSpec, UnitIntervalSpec,
};
use commest::protocols::{
    estimate_risk, gaussian_bits_per_machine, local_average_bits_per_machine, run_protocol,
    single_machine_quantized_mean, ProtocolId, RiskReport,
};
use commest::rng::derive_seed;

fn check_report(r: &RiskReport) {
    assert!(r.mse_mean >= 0.0 && r.mse_stderr >= 0.0);
    assert!(r.bits_max as f64 >= r.bits_mean);
}

#[test]
fn accounting_formulas() {
    assert_eq!(gaussian_bits_per_machine(4, 16, 64, 1.0).unwrap(), 48);
    assert_eq!(local_average_bits_per_machine(3, 10, 30).unwrap(), 30);
}

#[test]
fn single_machine_uses_exactly_its_budget() {
    let x = vec![0.0, 1.0, 1.0, 0.0, 1.0];
    for b in [1u32, 4, 10] {
        let out = single_machine_quantized_mean(&x, b).unwrap();
        assert_eq!(out.transcript.total_bits(), u64::from(b));
        assert!((out.theta_hat[0] - 0.6).abs() <= 2f64.powi(-(b as i32)));
    }
}

#[test]
fn uniform_single_machine_sends_one_message() {
    let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.1, 0.2, -0.3]).unwrap());
    let n = 20;
    let s = sample(&spec, 1, n, 3).unwrap();
    let out = run_protocol(ProtocolId::UniformMin, &spec, &s, 3).unwrap();
    assert_eq!(out.transcript.messages.len(), 1);
    let per_coord = (2.0 * (2.0 * n as f64).log2()).ceil() as u64;
    assert_eq!(out.transcript.total_bits(), 3 * per_coord);
}

#[test]
fn centralized_uniform_matches_order_statistics() {
    let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.3, -0.1, 0.0]).unwrap());
    let r = estimate_risk(ProtocolId::Centralized, &spec, 8, 16, 5000, 31).unwrap();
    check_report(&r);
    assert_eq!(r.bits_max, 0);
    let big_n = 128.0;
    let oracle = 8.0 / ((big_n + 1.0) * (big_n + 2.0));
    let per_coord = r.mse_mean / 3.0;
    assert!((per_coord - oracle).abs() <= 0.15 * oracle, "{per_coord} vs {oracle}");
}

#[test]
fn probit_risk_scales_like_one_over_n() {
    let (d, m, n) = (2, 8, 200);
    let theta = vec![0.3, -0.2];
    let risk = |n: usize| {
        let designs = gaussian_designs(m, n, d, 1.0, 32).unwrap();
        let spec = FamilySpec::Probit(ProbitSpec::new(designs, theta.clone()).unwrap());
        let r = estimate_risk(ProtocolId::ProbitAvg, &spec, m, n, 2000, 32).unwrap();
        check_report(&r);
        assert_eq!(r.flagged, 0);
        r.mse_mean
    };
    let ratio = risk(n) / risk(4 * n);
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn probit_single_machine_concentrates() {
    let n = 10_000;
    let a = DMatrix::from_element(n, 1, 1.0);
    let spec = FamilySpec::Probit(ProbitSpec::new(vec![a], vec![0.5]).unwrap());
    let trials = 500;
    let mut close = 0;
    for t in 0..trials {
        let seed = derive_seed(33, &[t]);
        let s = sample(&spec, 1, n, seed).unwrap();
        let out = run_protocol(ProtocolId::ProbitAvg, &spec, &s, seed).unwrap();
        close += usize::from((out.theta_hat[0] - 0.5).abs() <= 0.05);
    }
    assert!(close as f64 >= 0.99 * trials as f64);
}

/// MSE at (m, 4n) is no larger than at (m, n), up to three standard errors.
#[test]
fn more_samples_never_hurt() {
    let cases: Vec<(ProtocolId, Box<dyn Fn(usize) -> FamilySpec>)> = vec![
        (
            ProtocolId::GaussQavg,
            Box::new(|_| FamilySpec::Gaussian(GaussianLocationSpec::new(vec![0.2, -0.4], 1.0).unwrap())),
        ),
        (
            ProtocolId::UniformMin,
            Box::new(|_| FamilySpec::Uniform(UniformLocationSpec::new(vec![0.2, -0.4]).unwrap())),
        ),
        (
            ProtocolId::RegressAvg,
            Box::new(|n| {
                let designs = gaussian_designs(4, n, 2, 1.0, 34).unwrap();
                FamilySpec::Regression(RegressionSpec::new(designs, vec![0.2, -0.4], 1.0).unwrap())
            }),
        ),
        (
            ProtocolId::SingleMean { budget_bits: 12 },
            Box::new(|_| FamilySpec::UnitInterval(UnitIntervalSpec::new(0.3).unwrap())),
        ),
    ];
    for (protocol, family) in cases {
        let m = if matches!(protocol, ProtocolId::SingleMean { .. }) { 1 } else { 4 };
        let n = 16;
        let a = estimate_risk(protocol, &family(n), m, n, 1000, 34).unwrap();
        let b = estimate_risk(protocol, &family(4 * n), m, 4 * n, 1000, 34).unwrap();
        let tol = 3.0 * (a.mse_stderr.powi(2) + b.mse_stderr.powi(2)).sqrt();
        assert!(b.mse_mean <= a.mse_mean + tol, "{protocol}: {} vs {}", b.mse_mean, a.mse_mean);
    }
}

#[test]
fn onebit_risk_is_at_most_d_over_m() {
    let (d, m) = (6, 40);
    for (k, level) in [0.0, 0.3, 0.6, 0.9].iter().enumerate() {
        for law in [BoundedLaw::TwoPoint, BoundedLaw::UniformInterval] {
            let theta: Vec<f64> = (0..d).map(|j| if j % 2 == 0 { *level } else { -level / 2.0 }).collect();
            let spec = FamilySpec::Bounded(BoundedProductSpec::new(theta, law).unwrap());
            let r = estimate_risk(ProtocolId::OneBit, &spec, m, 1, 4000, 36 + k as u64).unwrap();
            check_report(&r);
            assert!(r.mse_mean <= d as f64 / m as f64 + 4.0 * r.mse_stderr);
        }
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let spec = FamilySpec::Bounded(BoundedProductSpec::new(vec![0.1; 4], BoundedLaw::TwoPoint).unwrap());
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_risk(ProtocolId::OneBit, &spec, 50, 1, 500, 35).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn protocol_family_mismatch_is_an_error() {
    let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.0]).unwrap());
    assert!(estimate_risk(ProtocolId::OneBit, &spec, 2, 1, 10, 0).is_err());
    assert!(estimate_risk(ProtocolId::UniformMin, &spec, 2, 1, 1, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn onebit_estimates_stay_in_the_cube(seed in 0u64..10_000, theta in -1.0f64..1.0) {
        let spec = FamilySpec::Bounded(BoundedProductSpec::new(vec![theta, -theta], BoundedLaw::UniformInterval).unwrap());
        let s = sample(&spec, 30, 1, seed).unwrap();
        let out = run_protocol(ProtocolId::OneBit, &spec, &s, seed).unwrap();
        prop_assert!(out.theta_hat.iter().all(|t| t.abs() <= 1.0));
        // d bits per machine
        prop_assert_eq!(out.transcript.total_bits(), 60);
    }

    #[test]
    fn uniform_estimate_undershoots_by_at_most_one_cell(seed in 0u64..10_000, theta in -0.9f64..0.9) {
        let (m, n) = (5usize, 7usize);
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![theta]).unwrap());
        let s = sample(&spec, m, n, seed).unwrap();
        let out = run_protocol(ProtocolId::UniformMin, &spec, &s, seed).unwrap();
        out.transcript.validate(m).unwrap();
        // the estimate is (quantized sample minimum) + 1, rounded down
        let cell = 4.0 / ((m * n) as f64).powi(2);
        prop_assert!(out.theta_hat[0] >= theta - cell - 1e-12);
    }
}
