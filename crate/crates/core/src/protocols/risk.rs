//! Monte Carlo risk estimation.

use rayon::prelude::*;

use super::{
    centralized_baseline, gaussian_quantized_average, onebit_bounded_mean, probit_local_average,
    regression_local_average, single_machine_quantized_mean, uniform_interactive_min,
    ProtocolId, ProtocolOutput,
};
use crate::codec::{ProtocolKind, Transcript};
use crate::error::{invalid, Result};
use crate::families::{sample, FamilySpec, SampleSet};
use crate::rng::derive_seed;

/// Column order of [`RiskReport::csv_row`].
pub const RISK_CSV_HEADER: &str =
    "protocol,kind,trials,mse_mean,mse_stderr,bits_mean,bits_max,flagged";

#[derive(Clone, Debug, PartialEq)]
pub struct RiskReport {
    pub protocol: ProtocolId,
    pub kind: ProtocolKind,
    pub trials: usize,
    /// Mean of ‖θ̂ − θ‖² over trials.
    pub mse_mean: f64,
    /// Sample standard deviation of ‖θ̂ − θ‖² divided by √trials.
    pub mse_stderr: f64,
    pub bits_mean: f64,
    pub bits_max: u64,
    /// Trials in which a local solver reported divergence.
    pub flagged: usize,
    /// Per-coordinate mean of θ̂.
    pub theta_hat_mean: Vec<f64>,
    /// Per-coordinate standard error of θ̂.
    pub theta_hat_stderr: Vec<f64>,
}

impl RiskReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.10e},{:.10e},{:.6},{},{}",
            self.protocol,
            self.kind,
            self.trials,
            self.mse_mean,
            self.mse_stderr,
            self.bits_mean,
            self.bits_max,
            self.flagged
        )
    }
}

/// Run one protocol on one sample. `seed` drives protocol-internal randomness.
pub fn run_protocol(
    protocol: ProtocolId,
    problem: &FamilySpec,
    samples: &SampleSet,
    seed: u64,
) -> Result<ProtocolOutput> {
    let mismatch = || {
        invalid(format!(
            "protocol {protocol} does not apply to the {} family",
            problem.id()
        ))
    };
    match (protocol, problem) {
        (ProtocolId::SingleMean { budget_bits }, FamilySpec::UnitInterval(_)) => {
            let blocks = samples.location_blocks()?;
            if blocks.len() != 1 {
                return Err(invalid("single_mean runs on exactly one machine"));
            }
            let x: Vec<f64> = blocks[0].iter().copied().collect();
            single_machine_quantized_mean(&x, budget_bits)
        }
        (ProtocolId::GaussQavg, FamilySpec::Gaussian(spec)) => {
            gaussian_quantized_average(samples, spec.sigma)
        }
        (ProtocolId::OneBit, FamilySpec::Bounded(_)) => onebit_bounded_mean(samples, seed),
        (ProtocolId::UniformMin, FamilySpec::Uniform(_)) => uniform_interactive_min(samples),
        (ProtocolId::RegressAvg, FamilySpec::Regression(spec)) => {
            regression_local_average(spec, samples)
        }
        (ProtocolId::ProbitAvg, FamilySpec::Probit(spec)) => probit_local_average(spec, samples),
        (ProtocolId::Centralized, _) => {
            let (theta_hat, flagged) = centralized_baseline(problem, samples)?;
            Ok(ProtocolOutput {
                theta_hat,
                transcript: Transcript::new(ProtocolKind::Independent),
                flagged,
            })
        }
        _ => Err(mismatch()),
    }
}

struct TrialOutcome {
    sq_err: f64,
    bits: u64,
    flagged: bool,
    theta_hat: Vec<f64>,
}

/// Average squared error of `protocol` over `trials` independent draws.
///
/// Trial `t` samples with seed `derive_seed(seed, [t])` and runs the
/// protocol with the same derived seed. Trials run in parallel; outcomes are
/// reduced in trial order, so the report is identical for any thread count.
pub fn estimate_risk(
    protocol: ProtocolId,
    problem: &FamilySpec,
    m: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RiskReport> {
    if trials < 2 {
        return Err(invalid("estimate_risk needs at least two trials"));
    }
    let theta = problem.theta();
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, &[t as u64]);
            let samples = sample(problem, m, n, trial_seed)?;
            let out = run_protocol(protocol, problem, &samples, trial_seed)?;
            let sq_err = out
                .theta_hat
                .iter()
                .zip(&theta)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Ok(TrialOutcome {
                sq_err,
                bits: out.transcript.total_bits(),
                flagged: out.flagged,
                theta_hat: out.theta_hat,
            })
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let count = trials as f64;
    let d = theta.len();
    let mse_mean = outcomes.iter().map(|o| o.sq_err).sum::<f64>() / count;
    let var = outcomes
        .iter()
        .map(|o| (o.sq_err - mse_mean).powi(2))
        .sum::<f64>()
        / (count - 1.0);
    let mut theta_hat_mean = vec![0.0; d];
    for o in &outcomes {
        for (acc, v) in theta_hat_mean.iter_mut().zip(&o.theta_hat) {
            *acc += v;
        }
    }
    theta_hat_mean.iter_mut().for_each(|v| *v /= count);
    let theta_hat_stderr = (0..d)
        .map(|j| {
            let v = outcomes
                .iter()
                .map(|o| (o.theta_hat[j] - theta_hat_mean[j]).powi(2))
                .sum::<f64>()
                / (count - 1.0);
            (v / count).sqrt()
        })
        .collect();
    Ok(RiskReport {
        protocol,
        kind: protocol.kind(),
        trials,
        mse_mean,
        mse_stderr: (var / count).sqrt(),
        bits_mean: outcomes.iter().map(|o| o.bits as f64).sum::<f64>() / count,
        bits_max: outcomes.iter().map(|o| o.bits).max().unwrap_or(0),
        flagged: outcomes.iter().filter(|o| o.flagged).count(),
        theta_hat_mean,
        theta_hat_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{GaussianLocationSpec, RegressionSpec, UniformLocationSpec};
    use nalgebra::DMatrix;

    #[test]
    fn deterministic_protocol_has_zero_stderr() {
        let designs = vec![DMatrix::identity(3, 2) * 2.0; 4];
        let spec = FamilySpec::Regression(
            RegressionSpec::new(designs, vec![0.3, -0.1], 0.0).unwrap(),
        );
        let r = estimate_risk(ProtocolId::RegressAvg, &spec, 4, 3, 20, 1).unwrap();
        assert!(r.mse_stderr < 1e-15);
        assert_eq!(r.bits_max as f64, r.bits_mean);
    }

    #[test]
    fn same_seed_same_report() {
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.2, 0.1]).unwrap());
        let a = estimate_risk(ProtocolId::UniformMin, &spec, 4, 5, 200, 9).unwrap();
        let b = estimate_risk(ProtocolId::UniformMin, &spec, 4, 5, 200, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.csv_row(), b.csv_row());
        assert!(a.bits_max as f64 >= a.bits_mean);
        let c = estimate_risk(ProtocolId::UniformMin, &spec, 4, 5, 200, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_mismatched_family_and_few_trials() {
        let spec = FamilySpec::Gaussian(GaussianLocationSpec::new(vec![0.0], 1.0).unwrap());
        assert!(estimate_risk(ProtocolId::UniformMin, &spec, 2, 2, 10, 0).is_err());
        assert!(estimate_risk(ProtocolId::GaussQavg, &spec, 2, 2, 1, 0).is_err());
        assert!(estimate_risk(ProtocolId::Centralized, &spec, 2, 2, 10, 0).is_ok());
    }

    #[test]
    fn csv_row_matches_header_width() {
        let spec = FamilySpec::Gaussian(GaussianLocationSpec::new(vec![0.0], 1.0).unwrap());
        let r = estimate_risk(ProtocolId::GaussQavg, &spec, 2, 2, 10, 0).unwrap();
        assert_eq!(
            r.csv_row().split(',').count(),
            RISK_CSV_HEADER.split(',').count()
        );
    }
}
