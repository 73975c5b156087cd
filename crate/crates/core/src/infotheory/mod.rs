//! Exact finite-alphabet information quantities.
//!
//! All entropies and divergences are in nats. Total variation uses the
//! supremum convention, `tv(p, q) = sup_S |p(S) − q(S)| = ½‖p − q‖₁`.
//!
//! The enumeration-based inequality checks live in [`checks`], the random
//! instance generators in [`random`], and the named verification suites
//! in [`suites`].

pub mod checks;
mod quadrature;
pub mod random;
pub mod suites;

pub use checks::{
    check_classic_dpi, check_dpi_independent, check_dpi_truncated, check_fano_chain,
    check_information_chaining, check_pinsker_consequence, check_tensorization, enumerate_joint,
    ChainReport, ClassicDpiReport, Component, DpiReport, FanoReport, PinskerReport, Quantizer,
    SourceModel, TensorReport, TruncatedDpiReport, ENUMERATION_LIMIT, CHECK_SLACK,
};
pub use quadrature::binary_gaussian_mi;
pub use suites::{run_suite, run_suite_instance, SuiteRow, SUITE_CSV_HEADER, SUITE_NAMES};

use crate::error::{invalid, Result};

/// Allowed deviation of a probability table's total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Neumaier-compensated sum, so normalization checks on large tables are
/// not dominated by accumulation error.
pub(crate) fn stable_sum<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn validate_probabilities(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(invalid(format!("{what}: empty probability table")));
    }
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(invalid(format!("{what}: invalid probability {p}")));
    }
    let total = stable_sum(probs);
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(invalid(format!("{what}: probabilities sum to {total}")));
    }
    Ok(())
}

// ──────────────────────────────────────────────────────────────────────
// Distributions
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub struct FinitePMF {
    probs: Vec<f64>,
}

impl FinitePMF {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probabilities(&probs, "pmf")?;
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("uniform pmf needs a nonempty support"));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Joint distribution over a product alphabet. The table is row-major with
/// the last axis varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPMF {
    names: Vec<String>,
    sizes: Vec<usize>,
    table: Vec<f64>,
}

impl JointPMF {
    pub fn new(axes: Vec<(String, usize)>, table: Vec<f64>) -> Result<Self> {
        let (names, sizes): (Vec<_>, Vec<_>) = axes.into_iter().unzip();
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(invalid("joint pmf needs at least one nonempty axis"));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(invalid(format!("duplicate axis name {name:?}")));
            }
        }
        let states: usize = sizes.iter().product();
        if table.len() != states {
            return Err(invalid(format!(
                "table has {} entries for {} joint states",
                table.len(),
                states
            )));
        }
        validate_probabilities(&table, "joint pmf")?;
        Ok(Self {
            names,
            sizes,
            table,
        })
    }

    pub fn axis_names(&self) -> &[String] {
        &self.names
    }

    pub fn axis_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn axis(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| invalid(format!("unknown axis {name:?}")))
    }

    /// Multi-index of a flat table position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.sizes.len()];
        for (slot, &size) in idx.iter_mut().zip(&self.sizes).rev() {
            *slot = flat % size;
            flat /= size;
        }
        idx
    }

    /// Marginal over the listed axes, in the listed order.
    pub fn marginal(&self, axes: &[&str]) -> Result<JointPMF> {
        let positions = axes
            .iter()
            .map(|a| self.axis(a))
            .collect::<Result<Vec<_>>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(invalid(format!("axis {:?} listed twice", axes[i])));
            }
        }
        if positions.is_empty() {
            return Err(invalid("marginal needs at least one axis"));
        }
        let sizes: Vec<usize> = positions.iter().map(|&p| self.sizes[p]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        for (flat, &p) in self.table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let idx = self.unravel(flat);
            let mut target = 0;
            for (&pos, &size) in positions.iter().zip(&sizes) {
                target = target * size + idx[pos];
            }
            out[target] += p;
        }
        Ok(JointPMF {
            names: axes.iter().map(|s| s.to_string()).collect(),
            sizes,
            table: out,
        })
    }

    /// Distribution of one axis.
    pub fn marginal_pmf(&self, axis: &str) -> Result<FinitePMF> {
        let m = self.marginal(&[axis])?;
        Ok(FinitePMF { probs: m.table })
    }

    /// Entropy of the joint law of the listed axes.
    pub fn entropy_of(&self, axes: &[&str]) -> Result<f64> {
        let m = self.marginal(axes)?;
        Ok(entropy_of_slice(&m.table))
    }
}

/// Row-stochastic conditional table P(output | input), rows indexed by input.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    inputs: usize,
    outputs: usize,
    table: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(inputs: usize, outputs: usize, table: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(invalid("channel alphabets must be nonempty"));
        }
        if table.len() != inputs * outputs {
            return Err(invalid(format!(
                "channel table has {} entries, expected {}",
                table.len(),
                inputs * outputs
            )));
        }
        for row in table.chunks(outputs) {
            validate_probabilities(row, "channel row")?;
        }
        Ok(Self {
            inputs,
            outputs,
            table,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(invalid("channel rows have different lengths"));
        }
        Self::new(rows.len(), outputs, rows.concat())
    }

    /// Binary channel of the δ-perturbed sign model: input 0 ↔ v = −1 and
    /// input 1 ↔ v = +1, output 0 ↔ x = −1 and output 1 ↔ x = +1, with
    /// P(x | v) = (1 + δxv)/2.
    pub fn two_point(delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(invalid(format!("delta must lie in [0, 1], got {delta}")));
        }
        let hi = (1.0 + delta) / 2.0;
        let lo = (1.0 - delta) / 2.0;
        Self::new(2, 2, vec![hi, lo, lo, hi])
    }

    /// Deterministic channel sending input `i` to `map[i]`.
    pub fn deterministic(map: &[usize], outputs: usize) -> Result<Self> {
        let mut table = vec![0.0; map.len() * outputs];
        for (i, &y) in map.iter().enumerate() {
            if y >= outputs {
                return Err(invalid(format!("output {y} out of range {outputs}")));
            }
            table[i * outputs + y] = 1.0;
        }
        Self::new(map.len(), outputs, table)
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::deterministic(&(0..k).collect::<Vec<_>>(), k)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.table[input * self.outputs..(input + 1) * self.outputs]
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.table[input * self.outputs + output]
    }
}

// ──────────────────────────────────────────────────────────────────────
// Quantities
// ──────────────────────────────────────────────────────────────────────

fn entropy_of_slice(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

pub fn entropy(p: &FinitePMF) -> f64 {
    entropy_of_slice(&p.probs)
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_slice(&[p, 1.0 - p])
}

fn same_support(p: &FinitePMF, q: &FinitePMF) -> Result<()> {
    if p.len() != q.len() {
        return Err(invalid(format!(
            "support sizes differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// KL divergence D(p‖q). Returns `f64::INFINITY` when p is not absolutely
/// continuous with respect to q.
pub fn kl(p: &FinitePMF, q: &FinitePMF) -> Result<f64> {
    same_support(p, q)?;
    let mut total = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += a * (a / b).ln();
    }
    Ok(total.max(0.0))
}

pub fn tv(p: &FinitePMF, q: &FinitePMF) -> Result<f64> {
    same_support(p, q)?;
    Ok(tv_slices(&p.probs, &q.probs))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).min(1.0)
}

/// I(A; B) between two groups of axes, all other axes marginalized out.
pub fn mutual_information_sets(j: &JointPMF, a: &[&str], b: &[&str]) -> Result<f64> {
    if a.iter().any(|x| b.contains(x)) {
        return Err(invalid("mutual information groups must be disjoint"));
    }
    let axes: Vec<&str> = a.iter().chain(b).copied().collect();
    let joint = j.marginal(&axes)?;
    let size_a: usize = joint.sizes[..a.len()].iter().product();
    let size_b: usize = joint.sizes[a.len()..].iter().product();
    let mut pa = vec![0.0; size_a];
    let mut pb = vec![0.0; size_b];
    for (flat, &p) in joint.table.iter().enumerate() {
        pa[flat / size_b] += p;
        pb[flat % size_b] += p;
    }
    let mut total = 0.0;
    for (flat, &p) in joint.table.iter().enumerate() {
        if p > 0.0 {
            total += p * (p / (pa[flat / size_b] * pb[flat % size_b])).ln();
        }
    }
    Ok(total.max(0.0))
}

pub fn mutual_information(j: &JointPMF, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(invalid("mutual information needs two distinct axes"));
    }
    mutual_information_sets(j, &[a], &[b])
}

/// Size of a Hamming ball of radius t in {−1, 1}^d: Σ_{k ≤ ⌊t⌋} C(d, k).
pub fn hamming_neighborhood_size(d: usize, t: f64) -> Result<u128> {
    if !(t >= 0.0) {
        return Err(invalid(format!("radius must be >= 0, got {t}")));
    }
    let r = (t.floor() as u128).min(d as u128) as usize;
    let mut term: u128 = 1;
    let mut total: u128 = 1;
    for k in 1..=r {
        term = term
            .checked_mul((d - k + 1) as u128)
            .ok_or_else(|| invalid("neighborhood size overflows"))?
            / k as u128;
        total += term;
    }
    Ok(total)
}

/// Fano-type lower bound on P(d_ham(V̂, V) > t) for V uniform on {−1, 1}^d:
/// max{0, 1 − (I + ln 2)/ln(2^d / N_t)}.
pub fn fano_variant_lower(d: usize, t: f64, info_nats: f64) -> Result<f64> {
    if !(info_nats >= 0.0) {
        return Err(invalid(format!("information must be >= 0, got {info_nats}")));
    }
    let nt = hamming_neighborhood_size(d, t)?;
    let denom = d as f64 * std::f64::consts::LN_2 - (nt as f64).ln();
    if !(denom > 0.0) {
        return Err(invalid(format!(
            "2^{d} hypercube points do not exceed the neighborhood size {nt}"
        )));
    }
    Ok((1.0 - (info_nats + std::f64::consts::LN_2) / denom).max(0.0))
}

/// Risk lower bound δ²·(⌊t⌋ + 1)·P(test error).
pub fn estimation_to_testing_lower(delta: f64, t: f64, test_error_prob: f64) -> Result<f64> {
    if !(delta >= 0.0) || !(t >= 0.0) || !(0.0..=1.0).contains(&test_error_prob) {
        return Err(invalid(format!(
            "need delta >= 0, t >= 0 and a probability (got {delta}, {t}, {test_error_prob})"
        )));
    }
    Ok(delta * delta * (t.floor() + 1.0) * test_error_prob)
}

/// Bayes error of the equal-prior binary test: ½ − ½·tv(p1, p2).
pub fn lecam_testing_error(p1: &FinitePMF, p2: &FinitePMF) -> Result<f64> {
    Ok(0.5 - 0.5 * tv(p1, p2)?)
}

/// ln of the largest ratio P(x | v)/P(x | v′) over outputs x and input pairs.
/// Returns `f64::INFINITY` when some output has zero probability under one
/// input and positive probability under another.
pub fn check_likelihood_ratio(channel: &ChannelSpec) -> f64 {
    likelihood_ratio_on(channel, &vec![true; channel.outputs])
}

/// As [`check_likelihood_ratio`], restricted to the outputs marked in `subset`.
pub fn likelihood_ratio_on(channel: &ChannelSpec, subset: &[bool]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, _) in subset.iter().enumerate().filter(|(_, keep)| **keep) {
        let column = (0..channel.inputs).map(|v| channel.prob(v, x));
        let (lo, hi) = column.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p), hi.max(p)));
        if hi == 0.0 {
            continue;
        }
        if lo == 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max((hi / lo).ln());
    }
    worst
}
