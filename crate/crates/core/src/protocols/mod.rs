//! Achievability schemes and centralized baselines.
//!
//! Every scheme returns the fusion center's estimate together with the
//! [`Transcript`] of messages it needed, so communication can be checked
//! against the closed-form accounting helpers in this module.

mod probit;
mod risk;

pub use probit::{probit_mle, ProbitFit, PROBIT_DIVERGENCE_NORM, PROBIT_GRAD_TOL, PROBIT_MAX_ITERS};
pub use risk::{estimate_risk, run_protocol, RiskReport, RISK_CSV_HEADER};

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;

use crate::codec::{
    encode_improvement_message, index_bits, BitString, Message, ProtocolKind,
    QuantizerSpec, RoundingMode, Transcript,
};
use crate::error::{invalid, Error, Result};
use crate::families::{FamilySpec, ProbitSpec, RegressionSpec, SampleSet};
use crate::rng::{self, STREAM_PROTOCOL};

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutput {
    pub theta_hat: Vec<f64>,
    pub transcript: Transcript,
    /// Set when a local solver had to give up (probit separation).
    pub flagged: bool,
}

/// Stable protocol identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    SingleMean { budget_bits: u32 },
    GaussQavg,
    OneBit,
    UniformMin,
    RegressAvg,
    ProbitAvg,
    Centralized,
}

impl ProtocolId {
    pub const ALL_IDS: [&'static str; 7] = [
        "single_mean",
        "gauss_qavg",
        "onebit",
        "uniform_min",
        "regress_avg",
        "probit_avg",
        "centralized",
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolId::SingleMean { .. } => "single_mean",
            ProtocolId::GaussQavg => "gauss_qavg",
            ProtocolId::OneBit => "onebit",
            ProtocolId::UniformMin => "uniform_min",
            ProtocolId::RegressAvg => "regress_avg",
            ProtocolId::ProbitAvg => "probit_avg",
            ProtocolId::Centralized => "centralized",
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolId::UniformMin => ProtocolKind::Interactive,
            _ => ProtocolKind::Independent,
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    /// `single_mean` parses with a zero budget; set it afterwards.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "single_mean" => ProtocolId::SingleMean { budget_bits: 0 },
            "gauss_qavg" => ProtocolId::GaussQavg,
            "onebit" => ProtocolId::OneBit,
            "uniform_min" => ProtocolId::UniformMin,
            "regress_avg" => ProtocolId::RegressAvg,
            "probit_avg" => ProtocolId::ProbitAvg,
            "centralized" => ProtocolId::Centralized,
            other => return Err(invalid(format!("unknown protocol id {other:?}"))),
        })
    }
}

// ──────────────────────────────────────────────────────────────────────
// Accounting formulas
// ──────────────────────────────────────────────────────────────────────

/// Truncation interval [−1 − σ/√n, 1 + σ/√n] of the Gaussian scheme.
pub fn gaussian_truncation(sigma: f64, n: usize) -> (f64, f64) {
    let r = 1.0 + sigma / (n as f64).sqrt();
    (-r, r)
}

/// Per-coordinate quantizer of the Gaussian scheme: cell width <= σ²/(mn).
pub fn gaussian_quantizer(sigma: f64, m: usize, n: usize) -> Result<QuantizerSpec> {
    let (lo, hi) = gaussian_truncation(sigma, n);
    QuantizerSpec::with_accuracy(lo, hi, sigma * sigma / (m * n) as f64, RoundingMode::RoundNearest)
}

pub fn gaussian_bits_per_machine(d: usize, m: usize, n: usize, sigma: f64) -> Result<u64> {
    Ok(d as u64 * u64::from(gaussian_quantizer(sigma, m, n)?.bits()))
}

/// Quantizer on [−2, 2] with accuracy (mn)⁻², rounding down.
pub fn uniform_quantizer(m: usize, n: usize) -> Result<QuantizerSpec> {
    let mn = (m * n) as f64;
    QuantizerSpec::with_accuracy(-2.0, 2.0, 1.0 / (mn * mn), RoundingMode::RoundDown)
}

/// Bits charged by the uniform protocol given each machine's improvement count.
/// `improvements[0]` is ignored (machine 1 always sends all d values).
pub fn uniform_bits(d: usize, m: usize, n: usize, improvements: &[usize]) -> Result<u64> {
    let vb = u64::from(uniform_quantizer(m, n)?.bits());
    let per_entry = u64::from(index_bits(d)) + vb;
    Ok(d as u64 * vb
        + improvements
            .iter()
            .skip(1)
            .map(|&k| k as u64 * per_entry)
            .sum::<u64>())
}

/// Per-coordinate quantizer for the local-average regression schemes:
/// accuracy 1/(mn) on [−1, 1], i.e. ⌈log₂(2mn)⌉ bits.
pub fn local_average_quantizer(m: usize, n: usize) -> Result<QuantizerSpec> {
    QuantizerSpec::with_accuracy(-1.0, 1.0, 1.0 / (m * n) as f64, RoundingMode::RoundNearest)
}

pub fn local_average_bits_per_machine(d: usize, m: usize, n: usize) -> Result<u64> {
    Ok(d as u64 * u64::from(local_average_quantizer(m, n)?.bits()))
}

/// The nominal ⌈d log₂(mn)⌉ count quoted for the regression scheme; the
/// honest count over a width-2 range is [`local_average_bits_per_machine`].
pub fn local_average_nominal_bits(d: usize, m: usize, n: usize) -> u64 {
    (d as f64 * ((m * n) as f64).log2()).ceil() as u64
}

fn quantize_vector(q: &QuantizerSpec, values: &[f64]) -> Result<(BitString, Vec<f64>)> {
    let mut payload = BitString::new();
    let mut decoded = Vec::with_capacity(values.len());
    for &v in values {
        let k = q.quantize(v)?;
        payload.push_uint(k, q.bits());
        decoded.push(q.dequantize(k)?);
    }
    Ok((payload, decoded))
}

fn average(vectors: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut acc = vec![0.0; d];
    for v in vectors {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let m = vectors.len() as f64;
    acc.iter().map(|a| a / m).collect()
}

fn truncate_unit(v: &mut [f64]) {
    for x in v {
        *x = x.clamp(-1.0, 1.0);
    }
}

// ──────────────────────────────────────────────────────────────────────
// Schemes
// ──────────────────────────────────────────────────────────────────────

/// One machine sends its sample mean quantized on [0, 1] with `budget_bits`
/// bits (cell midpoints).
pub fn single_machine_quantized_mean(x: &[f64], budget_bits: u32) -> Result<ProtocolOutput> {
    if budget_bits == 0 {
        return Err(invalid("single_mean needs a budget of at least one bit"));
    }
    if x.is_empty() {
        return Err(invalid("single_mean needs at least one sample"));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(invalid(format!("sample {v} outside [0, 1]")));
    }
    let q = QuantizerSpec::new(0.0, 1.0, budget_bits, RoundingMode::RoundNearest)?;
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let (payload, decoded) = quantize_vector(&q, &[mean])?;
    let mut transcript = Transcript::new(ProtocolKind::Independent);
    transcript.push(Message::new(1, 1, payload));
    Ok(ProtocolOutput {
        theta_hat: decoded,
        transcript,
        flagged: false,
    })
}

/// Local means, truncated and quantized to σ²/(mn), averaged at the fusion center.
pub fn gaussian_quantized_average(samples: &SampleSet, sigma: f64) -> Result<ProtocolOutput> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("noise scale must be positive, got {sigma}")));
    }
    let blocks = samples.location_blocks()?;
    let (m, n, d) = (blocks.len(), samples.n, samples.d);
    let (lo, hi) = gaussian_truncation(sigma, n);
    let q = gaussian_quantizer(sigma, m, n)?;
    let mut transcript = Transcript::new(ProtocolKind::Independent);
    let mut received = Vec::with_capacity(m);
    for (i, block) in blocks.iter().enumerate() {
        let local: Vec<f64> = (0..d)
            .map(|j| (block.row(j).sum() / n as f64).clamp(lo, hi))
            .collect();
        let (payload, decoded) = quantize_vector(&q, &local)?;
        transcript.push(Message::new(i + 1, 1, payload));
        received.push(decoded);
    }
    Ok(ProtocolOutput {
        theta_hat: average(&received, d),
        transcript,
        flagged: false,
    })
}

/// Each machine sends d bits Z_ij ~ Bernoulli((1 + X_ij)/2); the fusion
/// center returns the average of 2Z − 1.
pub fn onebit_bounded_mean(samples: &SampleSet, seed: u64) -> Result<ProtocolOutput> {
    let blocks = samples.location_blocks()?;
    if samples.n != 1 {
        return Err(invalid(format!(
            "onebit expects one observation per machine, got n = {}",
            samples.n
        )));
    }
    let d = samples.d;
    let mut transcript = Transcript::new(ProtocolKind::Independent);
    let mut sums = vec![0.0; d];
    for (i, block) in blocks.iter().enumerate() {
        let mut rng = rng::stream(seed, &[STREAM_PROTOCOL, i as u64]);
        let mut payload = BitString::new();
        for j in 0..d {
            let x = block[(j, 0)];
            if !(-1.0..=1.0).contains(&x) {
                return Err(invalid(format!("observation {x} outside [-1, 1]")));
            }
            let z = rng.random::<f64>() < (1.0 + x) / 2.0;
            payload.push(z);
            sums[j] += if z { 1.0 } else { -1.0 };
        }
        transcript.push(Message::new(i + 1, 1, payload));
    }
    let m = blocks.len() as f64;
    Ok(ProtocolOutput {
        theta_hat: sums.iter().map(|s| s / m).collect(),
        transcript,
        flagged: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformMinOptions {
    /// When false, the fusion state keeps exact minima (messages are still
    /// charged at the quantized width). Test hook only.
    pub quantize: bool,
}

impl Default for UniformMinOptions {
    fn default() -> Self {
        Self { quantize: true }
    }
}

/// Interactive minimum protocol for the uniform location family.
pub fn uniform_interactive_min(samples: &SampleSet) -> Result<ProtocolOutput> {
    uniform_interactive_min_with(samples, UniformMinOptions::default())
}

pub fn uniform_interactive_min_with(
    samples: &SampleSet,
    options: UniformMinOptions,
) -> Result<ProtocolOutput> {
    let blocks = samples.location_blocks()?;
    let (m, n, d) = (blocks.len(), samples.n, samples.d);
    let q = uniform_quantizer(m, n)?;
    let stored = |v: f64| -> Result<(u64, f64)> {
        let k = q.quantize(v)?;
        Ok((k, if options.quantize { q.dequantize(k)? } else { v }))
    };
    let local_min = |i: usize| -> Vec<f64> {
        (0..d)
            .map(|j| blocks[i].row(j).iter().copied().fold(f64::INFINITY, f64::min))
            .collect()
    };

    let mut transcript = Transcript::new(ProtocolKind::Interactive);
    let mut state = Vec::with_capacity(d);
    let mut first = BitString::new();
    for a in local_min(0) {
        let (k, s) = stored(a)?;
        first.push_uint(k, q.bits());
        state.push(s);
    }
    transcript.push(Message::new(1, 1, first));

    for i in 1..m {
        let a = local_min(i);
        let mut indices = Vec::new();
        let mut cells = Vec::new();
        for j in 0..d {
            // strict: ties with the current state do not trigger a broadcast
            if a[j] < state[j] {
                let (k, s) = stored(a[j])?;
                indices.push(j);
                cells.push(k);
                state[j] = s;
            }
        }
        if !indices.is_empty() {
            let payload = encode_improvement_message(&indices, &cells, d, q.bits())?;
            transcript.push(Message::new(i + 1, i as u32 + 1, payload));
        }
    }
    Ok(ProtocolOutput {
        theta_hat: state.iter().map(|s| s + 1.0).collect(),
        transcript,
        flagged: false,
    })
}

fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let gram = a.transpose() * a;
    let chol = Cholesky::new(gram)
        .ok_or_else(|| Error::DegenerateDesign("local Gram matrix is singular".into()))?;
    let pivots = chol.l_dirty().diagonal();
    if pivots.min() <= pivots.max() * crate::families::RANK_TOLERANCE.sqrt() {
        return Err(Error::DegenerateDesign("local Gram matrix is numerically singular".into()));
    }
    let sol = chol.solve(&(a.transpose() * y));
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateDesign("least-squares solution is not finite".into()));
    }
    Ok(sol)
}

/// Local least squares, truncated to [−1, 1]^d and quantized to 1/(mn).
pub fn regression_local_average(spec: &RegressionSpec, samples: &SampleSet) -> Result<ProtocolOutput> {
    let responses = samples.responses()?;
    if responses.len() != spec.designs.len() {
        return Err(invalid("one response vector per design is required"));
    }
    let (m, n, d) = (spec.machines(), spec.samples_per_machine(), spec.theta.len());
    let q = local_average_quantizer(m, n)?;
    let mut transcript = Transcript::new(ProtocolKind::Independent);
    let mut received = Vec::with_capacity(m);
    for (i, (a, y)) in spec.designs.iter().zip(responses).enumerate() {
        let mut local: Vec<f64> = least_squares(a, y)?.iter().copied().collect();
        truncate_unit(&mut local);
        let (payload, decoded) = quantize_vector(&q, &local)?;
        transcript.push(Message::new(i + 1, 1, payload));
        received.push(decoded);
    }
    Ok(ProtocolOutput {
        theta_hat: average(&received, d),
        transcript,
        flagged: false,
    })
}

/// Local probit MLE (damped Newton), truncated and quantized as in
/// [`regression_local_average`].
pub fn probit_local_average(spec: &ProbitSpec, samples: &SampleSet) -> Result<ProtocolOutput> {
    let responses = samples.binary()?;
    if responses.len() != spec.designs.len() {
        return Err(invalid("one response vector per design is required"));
    }
    let (m, n, d) = (spec.machines(), spec.samples_per_machine(), spec.theta.len());
    let q = local_average_quantizer(m, n)?;
    let mut transcript = Transcript::new(ProtocolKind::Independent);
    let mut received = Vec::with_capacity(m);
    let mut flagged = false;
    for (i, (a, z)) in spec.designs.iter().zip(responses).enumerate() {
        let fit = probit_mle(a, z)?;
        flagged |= fit.diverged;
        let mut local: Vec<f64> = fit.theta.iter().copied().collect();
        truncate_unit(&mut local);
        let (payload, decoded) = quantize_vector(&q, &local)?;
        transcript.push(Message::new(i + 1, 1, payload));
        received.push(decoded);
    }
    Ok(ProtocolOutput {
        theta_hat: average(&received, d),
        transcript,
        flagged,
    })
}

fn stack_rows(designs: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = designs[0].ncols();
    let rows: usize = designs.iter().map(|a| a.nrows()).sum();
    let mut out = DMatrix::zeros(rows, d);
    let mut offset = 0;
    for a in designs {
        out.rows_mut(offset, a.nrows()).copy_from(a);
        offset += a.nrows();
    }
    out
}

/// Estimator with access to the pooled sample. Probit returns the pooled
/// MLE; `flagged` reports divergence.
pub fn centralized_baseline(problem: &FamilySpec, samples: &SampleSet) -> Result<(Vec<f64>, bool)> {
    let d = samples.d;
    match problem {
        FamilySpec::Gaussian(_) | FamilySpec::Bounded(_) | FamilySpec::UnitInterval(_) => {
            let blocks = samples.location_blocks()?;
            let total = (blocks.len() * samples.n) as f64;
            Ok((
                (0..d)
                    .map(|j| blocks.iter().map(|b| b.row(j).sum()).sum::<f64>() / total)
                    .collect(),
                false,
            ))
        }
        FamilySpec::Uniform(_) => {
            let blocks = samples.location_blocks()?;
            Ok((
                (0..d)
                    .map(|j| {
                        blocks
                            .iter()
                            .flat_map(|b| b.row(j).iter().copied().collect::<Vec<_>>())
                            .fold(f64::INFINITY, f64::min)
                            + 1.0
                    })
                    .collect(),
                false,
            ))
        }
        FamilySpec::Regression(spec) => {
            let a = stack_rows(&spec.designs);
            let y = DVector::from_iterator(
                a.nrows(),
                samples.responses()?.iter().flat_map(|r| r.iter().copied()),
            );
            Ok((least_squares(&a, &y)?.iter().copied().collect(), false))
        }
        FamilySpec::Probit(spec) => {
            let a = stack_rows(&spec.designs);
            let z: Vec<bool> = samples.binary()?.iter().flatten().copied().collect();
            let fit = probit_mle(&a, &z)?;
            Ok((fit.theta.iter().copied().collect(), fit.diverged))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::decode_improvement_message;
    use crate::families::{
        sample, BoundedLaw, BoundedProductSpec, GaussianLocationSpec, SampleData,
        UniformLocationSpec,
    };

    #[test]
    fn protocol_ids_round_trip() {
        for id in ProtocolId::ALL_IDS {
            assert_eq!(id.parse::<ProtocolId>().unwrap().as_str(), id);
        }
        assert!("foo".parse::<ProtocolId>().is_err());
    }

    #[test]
    fn single_mean_constant_samples() {
        let out = single_machine_quantized_mean(&[0.5; 16], 10).unwrap();
        assert!((out.theta_hat[0] - 0.5).abs() <= 2f64.powi(-10));
        assert_eq!(out.transcript.total_bits(), 10);
    }

    #[test]
    fn single_mean_one_bit_grid() {
        let lo = single_machine_quantized_mean(&[0.1], 1).unwrap();
        let hi = single_machine_quantized_mean(&[0.9], 1).unwrap();
        assert_eq!(lo.theta_hat, vec![0.25]);
        assert_eq!(hi.theta_hat, vec![0.75]);
        assert!(single_machine_quantized_mean(&[0.5], 0).is_err());
        assert!(single_machine_quantized_mean(&[1.5], 3).is_err());
    }

    #[test]
    fn gaussian_bit_count() {
        assert_eq!(gaussian_bits_per_machine(4, 16, 64, 1.0).unwrap(), 48);
    }

    #[test]
    fn gaussian_small_noise_recovers_sample() {
        let spec = FamilySpec::Gaussian(GaussianLocationSpec::new(vec![0.7], 1e-3).unwrap());
        let s = sample(&spec, 1, 1, 3).unwrap();
        let x = s.location_blocks().unwrap()[0][(0, 0)];
        let out = gaussian_quantized_average(&s, 1e-3).unwrap();
        let q = gaussian_quantizer(1e-3, 1, 1).unwrap();
        assert!((out.theta_hat[0] - x).abs() <= q.cell_width());
        assert_eq!(out.transcript.messages.len(), 1);
    }

    #[test]
    fn gaussian_truncates_outliers() {
        let blocks = vec![DMatrix::from_element(1, 4, 50.0)];
        let s = SampleSet { m: 1, n: 4, d: 1, data: SampleData::Location(blocks) };
        let out = gaussian_quantized_average(&s, 1.0).unwrap();
        let (_, hi) = gaussian_truncation(1.0, 4);
        let width = gaussian_quantizer(1.0, 1, 4).unwrap().cell_width();
        assert!(out.theta_hat[0] <= hi && out.theta_hat[0] >= hi - width);
    }

    #[test]
    fn onebit_degenerate_ones() {
        let blocks = vec![DMatrix::from_element(3, 1, 1.0); 5];
        let s = SampleSet { m: 5, n: 1, d: 3, data: SampleData::Location(blocks) };
        let out = onebit_bounded_mean(&s, 1).unwrap();
        assert_eq!(out.theta_hat, vec![1.0; 3]);
        assert_eq!(out.transcript.total_bits(), 15);
        out.transcript.validate(5).unwrap();
    }

    #[test]
    fn onebit_rejects_bad_input() {
        let blocks = vec![DMatrix::from_element(1, 1, 1.5)];
        let s = SampleSet { m: 1, n: 1, d: 1, data: SampleData::Location(blocks) };
        assert!(onebit_bounded_mean(&s, 1).is_err());
        let spec = FamilySpec::Bounded(
            BoundedProductSpec::new(vec![0.0], BoundedLaw::TwoPoint).unwrap(),
        );
        let s = sample(&spec, 3, 2, 0).unwrap();
        assert!(onebit_bounded_mean(&s, 1).is_err());
    }

    #[test]
    fn uniform_single_machine_message() {
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.1, -0.4, 0.9]).unwrap());
        let s = sample(&spec, 1, 16, 5).unwrap();
        let out = uniform_interactive_min(&s).unwrap();
        assert_eq!(out.transcript.messages.len(), 1);
        let per = (2.0 * (2.0 * 16.0f64).log2()).ceil() as u64;
        assert_eq!(out.transcript.total_bits(), 3 * per);
    }

    #[test]
    fn uniform_fusion_state_is_global_min() {
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.3, -0.6]).unwrap());
        for seed in 0..50 {
            let s = sample(&spec, 6, 5, seed).unwrap();
            let blocks = s.location_blocks().unwrap();
            let global: Vec<f64> = (0..2)
                .map(|j| {
                    blocks
                        .iter()
                        .flat_map(|b| b.row(j).iter().copied().collect::<Vec<_>>())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let exact =
                uniform_interactive_min_with(&s, UniformMinOptions { quantize: false }).unwrap();
            let quant = uniform_interactive_min(&s).unwrap();
            let q = uniform_quantizer(6, 5).unwrap();
            for j in 0..2 {
                assert_eq!(exact.theta_hat[j] - 1.0, global[j]);
                assert_eq!(quant.theta_hat[j] - 1.0, q.round_trip(global[j]).unwrap());
            }
        }
    }

    #[test]
    fn uniform_bits_match_improvement_counts() {
        let d = 5;
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.0; d]).unwrap());
        let q = uniform_quantizer(7, 3).unwrap();
        for seed in 0..30 {
            let s = sample(&spec, 7, 3, seed).unwrap();
            let out = uniform_interactive_min(&s).unwrap();
            out.transcript.validate(7).unwrap();
            let mut counts = vec![0usize; 7];
            for msg in out.transcript.messages.iter().skip(1) {
                let (idx, _) = decode_improvement_message(&msg.payload, d, q.bits()).unwrap();
                counts[msg.machine - 1] = idx.len();
            }
            assert_eq!(out.transcript.total_bits(), uniform_bits(d, 7, 3, &counts).unwrap());
        }
    }

    #[test]
    fn local_average_bits() {
        assert_eq!(local_average_bits_per_machine(3, 10, 30).unwrap(), 30);
        assert_eq!(local_average_nominal_bits(3, 10, 30), 25);
    }

    #[test]
    fn regression_noiseless_recovery() {
        let designs: Vec<DMatrix<f64>> = (0..3)
            .map(|i| DMatrix::from_fn(6, 2, |r, c| ((r + 2 * c + i) % 5) as f64 - 2.0))
            .collect();
        let theta = vec![0.4, -0.35];
        let spec = RegressionSpec::new(designs, theta.clone(), 0.0).unwrap();
        let s = sample(&FamilySpec::Regression(spec.clone()), 3, 6, 1).unwrap();
        let out = regression_local_average(&spec, &s).unwrap();
        let q = local_average_quantizer(3, 6).unwrap();
        let err: f64 = out.theta_hat.iter().zip(&theta).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(err <= 2.0 * q.cell_width().powi(2));
        let (central, _) =
            centralized_baseline(&FamilySpec::Regression(spec), &s).unwrap();
        for (c, t) in central.iter().zip(&theta) {
            assert!((c - t).abs() < 1e-12);
        }
    }

    #[test]
    fn regression_singular_design_errors() {
        let a = DMatrix::from_fn(4, 2, |r, _| r as f64);
        let spec = RegressionSpec::new(vec![a], vec![0.1, 0.1], 1.0).unwrap();
        let s = sample(&FamilySpec::Regression(spec.clone()), 1, 4, 1).unwrap();
        assert!(matches!(
            regression_local_average(&spec, &s),
            Err(Error::DegenerateDesign(_))
        ));
    }
}
