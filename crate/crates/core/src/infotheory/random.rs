//! Random instance generators whose likelihood-ratio bounds hold by
//! construction.

use rand::Rng;

use super::checks::{digits, flatten, Quantizer, SourceModel};
use super::{ChannelSpec, JointPMF};
use crate::error::Result;

/// Random probability vector with entries bounded away from zero.
pub fn random_pmf<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random probability vector that may contain exact zeros.
pub fn random_sparse_pmf<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let keep = rng.random_range(0..k);
    let raw: Vec<f64> = (0..k)
        .map(|i| {
            if i == keep || rng.random_bool(0.7) {
                rng.random_range(0.01..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Perturbation u with Σ b·u = 0 and |u| ≤ 1.
fn centered_tilt<R: Rng>(rng: &mut R, base: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = base.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mean: f64 = base.iter().zip(&w).map(|(b, x)| b * x).sum();
    let u: Vec<f64> = w.iter().map(|x| x - mean).collect();
    let peak = u.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    u.into_iter().map(|x| x / peak).collect()
}

/// Binary-input channel with `k` outputs and likelihood ratios at most e^α.
///
/// Rows are b(x)(1 ∓ ε·u(x)) with ε = tanh(α/2), so every ratio is at most
/// (1 + ε)/(1 − ε) = e^α.
pub fn ratio_bounded_channel<R: Rng>(rng: &mut R, k: usize, alpha: f64) -> Result<ChannelSpec> {
    let base = random_pmf(rng, k);
    let u = centered_tilt(rng, &base);
    let eps = (alpha / 2.0).tanh();
    let row = |s: f64| -> Vec<f64> { base.iter().zip(&u).map(|(b, x)| b * (1.0 + s * eps * x)).collect() };
    ChannelSpec::from_rows(&[row(-1.0), row(1.0)])
}

/// Binary-input channel whose ratios are bounded by e^α on `subset` only.
/// The mass of the subset is the same under both inputs; outside it the
/// two rows are unrelated.
pub fn truncated_channel<R: Rng>(rng: &mut R, subset: &[bool], alpha: f64) -> Result<ChannelSpec> {
    let inside: Vec<usize> = (0..subset.len()).filter(|&x| subset[x]).collect();
    let outside: Vec<usize> = (0..subset.len()).filter(|&x| !subset[x]).collect();
    let mass = if outside.is_empty() {
        1.0
    } else {
        rng.random_range(0.5..0.95)
    };
    let base = random_pmf(rng, inside.len());
    let u = centered_tilt(rng, &base);
    let eps = (alpha / 2.0).tanh();
    let mut rows = vec![vec![0.0; subset.len()]; 2];
    for (v, row) in rows.iter_mut().enumerate() {
        let s = if v == 0 { -1.0 } else { 1.0 };
        for (i, &x) in inside.iter().enumerate() {
            row[x] = mass * base[i] * (1.0 + s * eps * u[i]);
        }
        if !outside.is_empty() {
            let rest = random_pmf(rng, outside.len());
            for (i, &x) in outside.iter().enumerate() {
                row[x] = (1.0 - mass) * rest[i];
            }
        }
    }
    ChannelSpec::from_rows(&rows)
}

/// Random nonempty subset of an alphabet of size k.
pub fn random_subset<R: Rng>(rng: &mut R, k: usize) -> Vec<bool> {
    let keep = rng.random_range(0..k);
    (0..k).map(|x| x == keep || rng.random_bool(0.6)).collect()
}

/// Random stochastic kernel; deterministic maps when `deterministic`.
pub fn random_kernel<R: Rng>(rng: &mut R, inputs: usize, outputs: usize, deterministic: bool) -> Result<ChannelSpec> {
    if deterministic {
        let map: Vec<usize> = (0..inputs).map(|_| rng.random_range(0..outputs)).collect();
        ChannelSpec::deterministic(&map, outputs)
    } else {
        let rows: Vec<Vec<f64>> = (0..inputs).map(|_| random_sparse_pmf(rng, outputs)).collect();
        ChannelSpec::from_rows(&rows)
    }
}

/// Joint law of a uniform binary V and Y with random conditional rows.
pub fn random_binary_joint<R: Rng>(rng: &mut R, ny: usize) -> Result<JointPMF> {
    let mut table = random_sparse_pmf(rng, ny);
    table.extend(random_sparse_pmf(rng, ny));
    table.iter_mut().for_each(|p| *p *= 0.5);
    JointPMF::new(vec![("V".into(), 2), ("Y".into(), ny)], table)
}

/// Random sequential protocol: in each round one machine, chosen at random,
/// sends a symbol drawn from a kernel of its own observations and the
/// transcript so far. Y has one axis per round.
pub fn random_interactive_protocol<R: Rng>(
    rng: &mut R,
    source: &SourceModel,
    rounds: usize,
    alphabet: usize,
) -> Result<Quantizer> {
    let m = source.machines();
    let x_sizes = source.x_sizes();
    let groups: Vec<Vec<usize>> = (0..m).map(|i| source.machine_components(i)).collect();
    let local_sizes: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| g.iter().map(|&c| x_sizes[c]).collect())
        .collect();
    let mut senders = Vec::with_capacity(rounds);
    let mut kernels = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let sender = rng.random_range(0..m);
        let local: usize = local_sizes[sender].iter().product();
        let histories = alphabet.pow(r as u32);
        let deterministic = rng.random_bool(0.5);
        senders.push(sender);
        kernels.push(random_kernel(rng, local * histories, alphabet, deterministic)?);
    }
    let y_sizes = vec![alphabet; rounds];
    let outputs = alphabet.pow(rounds as u32);
    Quantizer::from_fn(&x_sizes, y_sizes.clone(), |x| {
        let locals: Vec<usize> = groups
            .iter()
            .zip(&local_sizes)
            .map(|(g, sizes)| flatten(&g.iter().map(|&c| x[c]).collect::<Vec<_>>(), sizes))
            .collect();
        (0..outputs)
            .map(|y| {
                let ys = digits(y, &y_sizes);
                (0..rounds)
                    .map(|r| {
                        let history = flatten(&ys[..r], &y_sizes[..r]);
                        let row = locals[senders[r]] * alphabet.pow(r as u32) + history;
                        kernels[r].prob(row, ys[r])
                    })
                    .product()
            })
            .collect()
    })
}

/// Random joint over (A, B, C, D) of the chaining form. C is built from
/// `c_rounds` binary messages, each emitted by A or B given the earlier
/// messages, so P(c | a, b) splits into a factor of (a, c) and one of (b, c).
/// P(B | A) has likelihood ratios at most e^α.
pub fn random_chain_model<R: Rng>(rng: &mut R, alpha: f64, c_rounds: usize) -> Result<JointPMF> {
    let (na, nb, nd) = (2usize, 2usize, 2usize);
    let nc = 1usize << c_rounds;
    let pa = random_pmf(rng, na);
    let pb_a = ratio_bounded_channel(rng, nb, alpha)?;
    let mut from_a = Vec::with_capacity(c_rounds);
    let mut kernels = Vec::with_capacity(c_rounds);
    for r in 0..c_rounds {
        from_a.push(rng.random_bool(0.5));
        let deterministic = rng.random_bool(0.3);
        kernels.push(random_kernel(rng, 2 << r, 2, deterministic)?);
    }
    let pc_ab = |a: usize, b: usize, c: usize| -> f64 {
        let bits = digits(c, &vec![2; c_rounds]);
        (0..c_rounds)
            .map(|r| {
                let own = if from_a[r] { a } else { b };
                let history = flatten(&bits[..r], &vec![2; r]);
                kernels[r].prob(own * (1 << r) + history, bits[r])
            })
            .product()
    };
    let det = rng.random_bool(0.3);
    let pd_bc = random_kernel(rng, nb * nc, nd, det)?;
    let mut table = Vec::with_capacity(na * nb * nc * nd);
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                for d in 0..nd {
                    table.push(pa[a] * pb_a.prob(a, b) * pc_ab(a, b, c) * pd_bc.prob(b * nc + c, d));
                }
            }
        }
    }
    JointPMF::new(
        vec![("A".into(), na), ("B".into(), nb), ("C".into(), nc), ("D".into(), nd)],
        table,
    )
}
