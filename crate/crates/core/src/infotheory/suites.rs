//! Named randomized verification suites.
//!
//! Each instance is generated from its own seed, so a row can be replayed
//! with [`run_suite_instance`]. Every row reads "lhs ≤ rhs".

use rand::Rng;
use rayon::prelude::*;

use super::checks::{
    check_classic_dpi, check_dpi_independent, check_dpi_truncated, check_fano_chain,
    check_information_chaining, check_pinsker_consequence, check_tensorization, Component,
    Quantizer, SourceModel,
};
use super::random::{
    random_binary_joint, random_chain_model, random_interactive_protocol, random_kernel,
    random_subset, ratio_bounded_channel, truncated_channel,
};
use super::{estimation_to_testing_lower, ChannelSpec};
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, stream, STREAM_INSTANCE};

pub const SUITE_NAMES: [&str; 8] = ["pinsker", "dpi", "dpi3", "dpi5", "dpi7", "tensor", "chain", "fano"];
pub const SUITE_CSV_HEADER: &str = "suite,seed,lhs,rhs,slack,holds";

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow {
    pub suite: &'static str,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub slack: f64,
    pub holds: bool,
}

impl SuiteRow {
    fn new(suite: &'static str, seed: u64, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self {
            suite,
            seed,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12e},{:.12e},{:.12e},{}",
            self.suite, self.seed, self.lhs, self.rhs, self.slack, self.holds
        )
    }
}

fn suite_index(name: &str) -> Result<usize> {
    SUITE_NAMES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| invalid(format!("unknown suite {name:?}")))
}

fn log_ratio(delta: f64) -> f64 {
    ((1.0 + delta) / (1.0 - delta)).ln()
}

/// Run `count` instances of a suite. Instance k uses the seed
/// `derive_seed(seed, [STREAM_INSTANCE, suite index, k])`.
pub fn run_suite(name: &str, count: usize, seed: u64) -> Result<Vec<SuiteRow>> {
    let idx = suite_index(name)? as u64;
    (0..count as u64)
        .into_par_iter()
        .map(|k| run_suite_instance(name, derive_seed(seed, &[STREAM_INSTANCE, idx, k])))
        .collect()
}

/// Generate and check the single instance determined by `instance_seed`.
pub fn run_suite_instance(name: &str, instance_seed: u64) -> Result<SuiteRow> {
    let suite = SUITE_NAMES[suite_index(name)?];
    let mut rng = stream(instance_seed, &[]);
    let row = |lhs, rhs, holds| SuiteRow::new(suite, instance_seed, lhs, rhs, holds);
    match suite {
        "pinsker" => {
            let ny = rng.random_range(2..=6);
            let j = random_binary_joint(&mut rng, ny)?;
            let r = check_pinsker_consequence(&j, "V", &["Y"])?;
            Ok(row(r.lhs, r.rhs, r.holds))
        }
        "dpi" => {
            let v_dim = rng.random_range(1..=2);
            let channels = (0..v_dim)
                .map(|_| {
                    let k = rng.random_range(2..=3);
                    let alpha = rng.random_range(0.05..2.0);
                    ratio_bounded_channel(&mut rng, k, alpha)
                })
                .collect::<Result<Vec<_>>>()?;
            let source = SourceModel::product(channels)?;
            let q = random_quantizer(&mut rng, &source, 4)?;
            let r = check_classic_dpi(&source, &q)?;
            Ok(row(r.i_vy, r.i_vx, r.holds))
        }
        "dpi3" => {
            let v_dim = rng.random_range(1..=2);
            let delta = if rng.random_bool(0.5) { 0.1 } else { 0.2 };
            let channels = (0..v_dim)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        ChannelSpec::two_point(delta)
                    } else {
                        let k = rng.random_range(2..=3);
                        ratio_bounded_channel(&mut rng, k, log_ratio(delta))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let source = SourceModel::product(channels)?;
            let q = random_quantizer(&mut rng, &source, 4)?;
            let r = check_dpi_independent(&source, &q)?;
            Ok(row(r.i_vy, r.bound, r.holds))
        }
        "dpi5" => {
            let v_dim = rng.random_range(1..=2);
            let alpha = log_ratio(if rng.random_bool(0.5) { 0.1 } else { 0.2 });
            let comps = (0..v_dim)
                .map(|j| {
                    let subset = random_subset(&mut rng, 3);
                    let ch = truncated_channel(&mut rng, &subset, alpha)?;
                    Ok(Component::new(j, 0, ch).with_subset(subset))
                })
                .collect::<Result<Vec<_>>>()?;
            let source = SourceModel::new(v_dim, comps)?;
            let q = random_quantizer(&mut rng, &source, 4)?;
            let r = check_dpi_truncated(&source, &q)?;
            Ok(row(r.i_vy, r.bound, r.holds))
        }
        "dpi7" => {
            let m = rng.random_range(2..=3);
            let k = rng.random_range(2..=3);
            let alpha = log_ratio(if rng.random_bool(0.5) { 0.1 } else { 0.2 });
            let subset = random_subset(&mut rng, k);
            let ch = truncated_channel(&mut rng, &subset, alpha)?;
            let comps = (0..m)
                .map(|i| Component::new(0, i, ch.clone()).with_subset(subset.clone()))
                .collect();
            let source = SourceModel::new(1, comps)?;
            let rounds = rng.random_range(1..=4);
            let q = random_interactive_protocol(&mut rng, &source, rounds, 2)?;
            let r = check_dpi_truncated(&source, &q)?;
            Ok(row(r.i_vy, r.bound, r.holds))
        }
        "tensor" => {
            let v_dim = rng.random_range(1..=2);
            let m = rng.random_range(1..=3);
            let mut comps = Vec::new();
            for i in 0..m {
                for j in 0..v_dim {
                    let alpha = rng.random_range(0.05..2.0);
                    comps.push(Component::new(j, i, ratio_bounded_channel(&mut rng, 2, alpha)?));
                }
            }
            let source = SourceModel::new(v_dim, comps)?;
            let kernels = (0..m)
                .map(|_| {
                    let det = rng.random_bool(0.5);
                    random_kernel(&mut rng, 1 << v_dim, 2, det)
                })
                .collect::<Result<Vec<_>>>()?;
            let r = check_tensorization(&source, &kernels)?;
            Ok(row(r.i_joint, r.sum_i, r.holds))
        }
        "chain" => {
            let alpha = rng.random_range(0.05..1.5);
            let j = random_chain_model(&mut rng, alpha, 1)?;
            let r = check_information_chaining(&j)?;
            Ok(row(r.worst_lhs, r.worst_rhs, r.holds))
        }
        "fano" => {
            let v_dim = rng.random_range(2..=4);
            let delta = rng.random_range(0.05..0.6);
            let channels = (0..v_dim)
                .map(|_| ChannelSpec::two_point(delta))
                .collect::<Result<Vec<_>>>()?;
            let source = SourceModel::product(channels)?;
            let q = if rng.random_bool(0.25) {
                Quantizer::identity(&source)?
            } else {
                random_quantizer(&mut rng, &source, 8)?
            };
            let t = if v_dim >= 3 && rng.random_bool(0.5) { 1.0 } else { 0.0 };
            let r = check_fano_chain(&source, &q, delta, t)?;
            let lhs = estimation_to_testing_lower(delta, t, r.fano_lower)?;
            Ok(row(lhs, r.bayes_risk, r.holds))
        }
        _ => unreachable!("suite names are validated above"),
    }
}

fn random_quantizer<R: Rng>(rng: &mut R, source: &SourceModel, max_outputs: usize) -> Result<Quantizer> {
    let inputs: usize = source.x_sizes().iter().product();
    let outputs = rng.random_range(2..=max_outputs);
    let det = rng.random_bool(0.5);
    Quantizer::new(vec![outputs], random_kernel(rng, inputs, outputs, det)?)
}
