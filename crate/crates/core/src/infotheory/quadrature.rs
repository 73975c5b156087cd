//! Mutual information of a binary sign observed in Gaussian noise.

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Error, Result};

const TOLERANCE: f64 = 1e-9;
/// Beyond |z| = 14 the Gaussian weight is below 1e-42.
const WINDOW: f64 = 14.0;
const MAX_DEPTH: u32 = 60;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights;
// odd positions are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate of ∫ f over [a, b] and its distance from the Gauss estimate.
fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mid = f(center);
    let mut kronrod = WGK[7] * mid;
    let mut gauss = WG[3] * mid;
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive bisection: an interval is accepted once its Gauss–Kronrod
/// discrepancy is below its length share of `tol`.
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let total = b - a;
    let mut stack = vec![(a, b, 0u32)];
    let mut sum = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod(f, lo, hi);
        if err <= tol * (hi - lo) / total {
            sum += value;
        } else if depth >= MAX_DEPTH {
            return None;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Some(sum)
}

/// ln(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// I(V; X) in nats for V uniform on {−1, 1} and X | V ~ N(δV, σ²).
///
/// Conditioning on V = 1, the posterior log-odds are 2δX/σ², which gives
/// I = ln 2 − E[ln(1 + exp(−2δ(δ + σZ)/σ²))]. The expectation is integrated
/// against the standard normal density by adaptive Gauss–Kronrod quadrature
/// to absolute tolerance 1e-9, with a breakpoint where the log-odds vanish.
/// The result never exceeds δ²/σ².
pub fn binary_gaussian_mi(delta: f64, sigma: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() || !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!(
            "need delta >= 0 and sigma > 0, got delta={delta}, sigma={sigma}"
        )));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let snr = delta / sigma;
    let integrand = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt() * softplus(-2.0 * snr * (snr + z));
    let kink = -snr;
    let mut edges = vec![-WINDOW];
    if kink > -WINDOW {
        edges.push(kink);
    }
    edges.push(WINDOW);
    let share = TOLERANCE / (edges.len() - 1) as f64;
    let mut expectation = 0.0;
    for w in edges.windows(2) {
        expectation += adaptive(&integrand, w[0], w[1], share).ok_or_else(|| {
            Error::Numeric(format!(
                "adaptive quadrature did not converge for delta={delta}, sigma={sigma}"
            ))
        })?;
    }
    Ok((LN_2 - expectation).clamp(0.0, snr * snr))
}
