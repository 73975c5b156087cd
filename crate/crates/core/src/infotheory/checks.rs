//! Enumeration-based checks of data-processing, tensorization, chaining and
//! testing inequalities.
//!
//! A [`SourceModel`] draws V uniformly from {−1, 1}^v_dim and emits one
//! observation per [`Component`], each through a binary-input channel of a
//! single coordinate of V. Components are grouped into machines. A
//! [`Quantizer`] maps the flattened observation tuple to a (possibly
//! multi-axis) message. [`enumerate_joint`] materializes the exact joint law
//! of (V, X, Y) as a [`JointPMF`] with axes `V0.., X0.., Y0..`.

use super::{
    check_likelihood_ratio, likelihood_ratio_on, mutual_information_sets, tv_slices,
    ChannelSpec, JointPMF,
};
use crate::error::{invalid, Error, Result};

/// Largest joint table the checks will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;
/// Additive slack granted to every checked inequality.
pub const CHECK_SLACK: f64 = 1e-10;

// ──────────────────────────────────────────────────────────────────────
// Models
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    /// Coordinate of V this observation depends on.
    pub coord: usize,
    /// Machine holding the observation.
    pub machine: usize,
    /// P(x | v_coord), input 0 ↔ −1 and input 1 ↔ +1.
    pub channel: ChannelSpec,
    /// Truncation set; `None` means the whole alphabet.
    pub subset: Option<Vec<bool>>,
}

impl Component {
    pub fn new(coord: usize, machine: usize, channel: ChannelSpec) -> Self {
        Self {
            coord,
            machine,
            channel,
            subset: None,
        }
    }

    pub fn with_subset(mut self, subset: Vec<bool>) -> Self {
        self.subset = Some(subset);
        self
    }

    pub fn alphabet(&self) -> usize {
        self.channel.outputs()
    }

    fn in_subset(&self, x: usize) -> bool {
        self.subset.as_ref().is_none_or(|s| s[x])
    }

    /// Likelihood-ratio exponent on the truncation set.
    fn alpha(&self) -> f64 {
        match &self.subset {
            Some(s) => likelihood_ratio_on(&self.channel, s),
            None => check_likelihood_ratio(&self.channel),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    v_dim: usize,
    components: Vec<Component>,
}

impl SourceModel {
    pub fn new(v_dim: usize, components: Vec<Component>) -> Result<Self> {
        if v_dim == 0 || v_dim > 20 {
            return Err(invalid(format!("v_dim must lie in 1..=20, got {v_dim}")));
        }
        if components.is_empty() {
            return Err(invalid("source needs at least one observation"));
        }
        for c in &components {
            if c.coord >= v_dim {
                return Err(invalid(format!("component coordinate {} >= {v_dim}", c.coord)));
            }
            if c.channel.inputs() != 2 {
                return Err(invalid("component channels must have binary input"));
            }
            if let Some(s) = &c.subset {
                if s.len() != c.alphabet() {
                    return Err(invalid("truncation set does not match the alphabet"));
                }
            }
        }
        Ok(Self { v_dim, components })
    }

    /// One machine observing every coordinate once through its own channel.
    pub fn product(channels: Vec<ChannelSpec>) -> Result<Self> {
        let v_dim = channels.len();
        let comps = channels
            .into_iter()
            .enumerate()
            .map(|(j, ch)| Component::new(j, 0, ch))
            .collect();
        Self::new(v_dim, comps)
    }

    /// Scalar V observed by `m` machines through the same channel.
    pub fn shared(channel: ChannelSpec, m: usize) -> Result<Self> {
        Self::new(1, (0..m).map(|i| Component::new(0, i, channel.clone())).collect())
    }

    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn x_sizes(&self) -> Vec<usize> {
        self.components.iter().map(Component::alphabet).collect()
    }

    pub fn machines(&self) -> usize {
        self.components.iter().map(|c| c.machine + 1).max().unwrap_or(0)
    }

    /// Component indices belonging to machine `i`, in order.
    pub fn machine_components(&self, i: usize) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| self.components[c].machine == i)
            .collect()
    }

    /// Largest likelihood-ratio exponent over components (on truncation sets).
    pub fn alpha(&self) -> f64 {
        self.components.iter().map(Component::alpha).fold(0.0, f64::max)
    }
}

/// Conditional law of the message given the flattened observation tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantizer {
    y_sizes: Vec<usize>,
    kernel: ChannelSpec,
}

/// Decompose a flat index into mixed-radix digits (last digit fastest).
pub(crate) fn digits(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &size) in out.iter_mut().zip(sizes).rev() {
        *slot = flat % size;
        flat /= size;
    }
    out
}

pub(crate) fn flatten(index: &[usize], sizes: &[usize]) -> usize {
    index.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

impl Quantizer {
    pub fn new(y_sizes: Vec<usize>, kernel: ChannelSpec) -> Result<Self> {
        if y_sizes.is_empty() || y_sizes.iter().product::<usize>() != kernel.outputs() {
            return Err(invalid("message axes do not match the kernel outputs"));
        }
        Ok(Self { y_sizes, kernel })
    }

    /// Build from a function returning the message distribution for each
    /// observation tuple.
    pub fn from_fn(
        x_sizes: &[usize],
        y_sizes: Vec<usize>,
        mut law: impl FnMut(&[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let inputs: usize = x_sizes.iter().product();
        let outputs: usize = y_sizes.iter().product();
        let mut table = Vec::with_capacity(inputs * outputs);
        for x in 0..inputs {
            let row = law(&digits(x, x_sizes));
            if row.len() != outputs {
                return Err(invalid("message law has the wrong length"));
            }
            table.extend(row);
        }
        Self::new(y_sizes, ChannelSpec::new(inputs, outputs, table)?)
    }

    /// Y = X.
    pub fn identity(source: &SourceModel) -> Result<Self> {
        let sizes = source.x_sizes();
        let k: usize = sizes.iter().product();
        Self::new(vec![k], ChannelSpec::identity(k)?)
    }

    /// Y ≡ 0.
    pub fn constant(source: &SourceModel) -> Result<Self> {
        let k: usize = source.x_sizes().iter().product();
        Self::new(vec![1], ChannelSpec::deterministic(&vec![0; k], 1)?)
    }

    /// Y = (Y_1, …, Y_m) with Y_i drawn from `kernels[i]` applied to machine
    /// i's observations alone.
    pub fn per_machine(source: &SourceModel, kernels: &[ChannelSpec]) -> Result<Self> {
        let m = source.machines();
        if kernels.len() != m {
            return Err(invalid(format!("{} kernels for {m} machines", kernels.len())));
        }
        let x_sizes = source.x_sizes();
        let groups: Vec<Vec<usize>> = (0..m).map(|i| source.machine_components(i)).collect();
        for (g, k) in groups.iter().zip(kernels) {
            let local: usize = g.iter().map(|&c| x_sizes[c]).product();
            if k.inputs() != local {
                return Err(invalid("per-machine kernel input size mismatch"));
            }
        }
        let y_sizes: Vec<usize> = kernels.iter().map(ChannelSpec::outputs).collect();
        let outputs: usize = y_sizes.iter().product();
        Self::from_fn(&x_sizes, y_sizes.clone(), |x| {
            let locals: Vec<usize> = groups
                .iter()
                .map(|g| {
                    let idx: Vec<usize> = g.iter().map(|&c| x[c]).collect();
                    let sizes: Vec<usize> = g.iter().map(|&c| x_sizes[c]).collect();
                    flatten(&idx, &sizes)
                })
                .collect();
            (0..outputs)
                .map(|y| {
                    digits(y, &y_sizes)
                        .iter()
                        .zip(&locals)
                        .zip(kernels)
                        .map(|((&yi, &xi), k)| k.prob(xi, yi))
                        .product()
                })
                .collect()
        })
    }

    pub fn y_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn kernel(&self) -> &ChannelSpec {
        &self.kernel
    }
}

pub fn v_axes(source: &SourceModel) -> Vec<String> {
    (0..source.v_dim).map(|j| format!("V{j}")).collect()
}

pub fn x_axes(source: &SourceModel) -> Vec<String> {
    (0..source.components.len()).map(|c| format!("X{c}")).collect()
}

pub fn y_axes(quantizer: &Quantizer) -> Vec<String> {
    (0..quantizer.y_sizes.len()).map(|r| format!("Y{r}")).collect()
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Exact joint law of (V, X, Y).
pub fn enumerate_joint(source: &SourceModel, quantizer: &Quantizer) -> Result<JointPMF> {
    let x_sizes = source.x_sizes();
    let x_states: u128 = x_sizes.iter().map(|&k| k as u128).product();
    if quantizer.kernel.inputs() as u128 != x_states {
        return Err(invalid("quantizer input size does not match the source"));
    }
    let y_states = quantizer.kernel.outputs() as u128;
    let states = (1u128 << source.v_dim) * x_states * y_states;
    if states > ENUMERATION_LIMIT as u128 {
        return Err(Error::TooLarge {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    let (nv, nx, ny) = (1usize << source.v_dim, x_states as usize, y_states as usize);
    let v_weight = 1.0 / nv as f64;
    let mut table = vec![0.0; nv * nx * ny];
    for v in 0..nv {
        let bits = digits(v, &vec![2; source.v_dim]);
        for x in 0..nx {
            let xs = digits(x, &x_sizes);
            let px: f64 = source
                .components
                .iter()
                .zip(&xs)
                .map(|(c, &xc)| c.channel.prob(bits[c.coord], xc))
                .product();
            if px == 0.0 {
                continue;
            }
            let base = (v * nx + x) * ny;
            for (slot, &q) in table[base..base + ny].iter_mut().zip(quantizer.kernel.row(x)) {
                *slot = v_weight * px * q;
            }
        }
    }
    let axes = v_axes(source)
        .into_iter()
        .zip(std::iter::repeat(2))
        .chain(x_axes(source).into_iter().zip(x_sizes))
        .chain(y_axes(quantizer).into_iter().zip(quantizer.y_sizes.iter().copied()))
        .collect();
    JointPMF::new(axes, table)
}

fn contraction(alpha_multiplier: f64, alpha: f64) -> f64 {
    let g = (alpha_multiplier * alpha).exp_m1();
    2.0 * g * g
}

// ──────────────────────────────────────────────────────────────────────
// Pinsker consequence
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinskerReport {
    /// Squared total variation between the two conditional laws of Y.
    pub lhs: f64,
    /// 2·I(V; Y).
    pub rhs: f64,
    pub holds: bool,
}

/// tv(P_{Y|V=−1}, P_{Y|V=1})² ≤ 2·I(V; Y) for uniform binary V.
pub fn check_pinsker_consequence(j: &JointPMF, v: &str, y: &[&str]) -> Result<PinskerReport> {
    let mut axes = vec![v];
    axes.extend_from_slice(y);
    let joint = j.marginal(&axes)?;
    if joint.axis_sizes()[0] != 2 {
        return Err(invalid("V must be binary"));
    }
    let half = joint.table().len() / 2;
    let (p0, p1) = joint.table().split_at(half);
    let (m0, m1) = (super::stable_sum(p0), super::stable_sum(p1));
    if (m0 - 0.5).abs() > 1e-12 || (m1 - 0.5).abs() > 1e-12 {
        return Err(invalid(format!("V must be uniform, got ({m0}, {m1})")));
    }
    let c0: Vec<f64> = p0.iter().map(|p| p / m0).collect();
    let c1: Vec<f64> = p1.iter().map(|p| p / m1).collect();
    let t = tv_slices(&c0, &c1);
    let lhs = t * t;
    let rhs = 2.0 * mutual_information_sets(j, &[v], y)?;
    Ok(PinskerReport {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_SLACK,
    })
}

// ──────────────────────────────────────────────────────────────────────
// Data processing
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpiReport {
    pub i_vy: f64,
    pub i_xy: f64,
    pub alpha: f64,
    /// 2(e^{2α} − 1)²·I(X; Y).
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicDpiReport {
    pub i_vy: f64,
    pub i_vx: f64,
    pub holds: bool,
}

/// I(V; Y) ≤ 2(e^{2α} − 1)²·I(X; Y) for a single machine whose observation
/// coordinates depend on distinct coordinates of V.
pub fn check_dpi_independent(source: &SourceModel, quantizer: &Quantizer) -> Result<DpiReport> {
    if source.machines() != 1 {
        return Err(invalid("independent contraction is a single-machine statement"));
    }
    let mut coords: Vec<usize> = source.components.iter().map(|c| c.coord).collect();
    coords.sort_unstable();
    coords.dedup();
    if coords.len() != source.components.len() {
        return Err(invalid("each coordinate of V must drive exactly one observation"));
    }
    let alpha = source
        .components
        .iter()
        .map(|c| check_likelihood_ratio(&c.channel))
        .fold(0.0, f64::max);
    if !alpha.is_finite() {
        return Err(invalid("channel has an unbounded likelihood ratio"));
    }
    let j = enumerate_joint(source, quantizer)?;
    let (v, x, y) = (v_axes(source), x_axes(source), y_axes(quantizer));
    let i_vy = mutual_information_sets(&j, &as_strs(&v), &as_strs(&y))?;
    let i_xy = mutual_information_sets(&j, &as_strs(&x), &as_strs(&y))?;
    let bound = contraction(2.0, alpha) * i_xy;
    Ok(DpiReport {
        i_vy,
        i_xy,
        alpha,
        bound,
        holds: i_vy <= bound + CHECK_SLACK,
    })
}

/// I(V; Y) ≤ I(V; X) on the enumerated chain V → X → Y.
pub fn check_classic_dpi(source: &SourceModel, quantizer: &Quantizer) -> Result<ClassicDpiReport> {
    let j = enumerate_joint(source, quantizer)?;
    let (v, x, y) = (v_axes(source), x_axes(source), y_axes(quantizer));
    let i_vy = mutual_information_sets(&j, &as_strs(&v), &as_strs(&y))?;
    let i_vx = mutual_information_sets(&j, &as_strs(&v), &as_strs(&x))?;
    Ok(ClassicDpiReport {
        i_vy,
        i_vx,
        holds: i_vy <= i_vx + CHECK_SLACK,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedDpiReport {
    pub i_vy: f64,
    pub i_xy: f64,
    /// Likelihood-ratio exponent on the truncation sets.
    pub alpha: f64,
    /// Σ_j H(E_j) in nats.
    pub h_e: f64,
    /// Σ_j P(E_j = 0).
    pub p_e0: f64,
    /// 2(e^{4α} − 1)²·I(X; Y) + h_e + p_e0.
    pub bound: f64,
    pub holds: bool,
    /// The same bound with e^{2α} in place of e^{4α}.
    pub tighter_bound: f64,
    pub tighter_holds: bool,
}

/// I(V; Y) ≤ 2(e^{4α} − 1)²·I(X; Y) + Σ_j [H(E_j) + P(E_j = 0)], where E_j
/// indicates that every observation driven by coordinate j falls in its
/// truncation set and α bounds likelihood ratios on those sets.
///
/// With one observation per coordinate this is the single-machine form;
/// with a scalar V shared by several machines, E is the intersection over
/// machines and Y may be any interactive transcript.
pub fn check_dpi_truncated(source: &SourceModel, quantizer: &Quantizer) -> Result<TruncatedDpiReport> {
    let alpha = source.alpha();
    if !alpha.is_finite() {
        return Err(invalid("likelihood ratio unbounded on a truncation set"));
    }
    let j = enumerate_joint(source, quantizer)?;
    let (v, x, y) = (v_axes(source), x_axes(source), y_axes(quantizer));
    let i_vy = mutual_information_sets(&j, &as_strs(&v), &as_strs(&y))?;
    let i_xy = mutual_information_sets(&j, &as_strs(&x), &as_strs(&y))?;

    let px = j.marginal(&as_strs(&x))?;
    let x_sizes = source.x_sizes();
    let mut h_e = 0.0;
    let mut p_e0 = 0.0;
    for coord in 0..source.v_dim {
        let members: Vec<&Component> =
            source.components.iter().filter(|c| c.coord == coord).collect();
        if members.is_empty() {
            continue;
        }
        let mut p_in = 0.0;
        for (flat, &p) in px.table().iter().enumerate() {
            let xs = digits(flat, &x_sizes);
            let inside = source
                .components
                .iter()
                .zip(&xs)
                .filter(|(c, _)| c.coord == coord)
                .all(|(c, &xc)| c.in_subset(xc));
            if inside {
                p_in += p;
            }
        }
        let p_in = p_in.clamp(0.0, 1.0);
        h_e += super::binary_entropy(p_in);
        p_e0 += 1.0 - p_in;
    }
    let bound = contraction(4.0, alpha) * i_xy + h_e + p_e0;
    let tighter_bound = contraction(2.0, alpha) * i_xy + h_e + p_e0;
    Ok(TruncatedDpiReport {
        i_vy,
        i_xy,
        alpha,
        h_e,
        p_e0,
        bound,
        holds: i_vy <= bound + CHECK_SLACK,
        tighter_bound,
        tighter_holds: i_vy <= tighter_bound + CHECK_SLACK,
    })
}

// ──────────────────────────────────────────────────────────────────────
// Tensorization
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorReport {
    pub i_joint: f64,
    pub sum_i: f64,
    pub holds: bool,
}

/// I(V; Y_1, …, Y_m) ≤ Σ_i I(V; Y_i) when each Y_i depends on machine i's
/// observations only.
pub fn check_tensorization(source: &SourceModel, kernels: &[ChannelSpec]) -> Result<TensorReport> {
    let quantizer = Quantizer::per_machine(source, kernels)?;
    let j = enumerate_joint(source, &quantizer)?;
    let (v, y) = (v_axes(source), y_axes(&quantizer));
    let vs = as_strs(&v);
    let i_joint = mutual_information_sets(&j, &vs, &as_strs(&y))?;
    let sum_i = y
        .iter()
        .map(|yi| mutual_information_sets(&j, &vs, &[yi.as_str()]))
        .sum::<Result<f64>>()?;
    Ok(TensorReport {
        i_joint,
        sum_i,
        holds: i_joint <= sum_i + CHECK_SLACK,
    })
}

// ──────────────────────────────────────────────────────────────────────
// Chaining
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainReport {
    pub alpha: f64,
    /// Largest value of lhs − rhs over all (a, c, d).
    pub max_violation: f64,
    /// Left and right sides at the worst (a, c, d).
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    /// (c, d) slices skipped because P(C = c, D = d) = 0.
    pub skipped: usize,
    pub holds: bool,
}

const STRUCTURE_TOLERANCE: f64 = 1e-10;

/// For a four-axis joint over (A, B, C, D) factoring as
/// P_A·P_{B|A}·P_{C|A,B}·P_{D|B,C} with P(c | a, b) of product form,
/// checks |P(a | c, d) − P(a | c)| ≤ 2(e^{2α} − 1)·min{P(a | c), P(a | c, d)}
/// ·tv(P_B(· | c, d), P_B(· | c)) for every (a, c, d).
pub fn check_information_chaining(j: &JointPMF) -> Result<ChainReport> {
    let sizes = j.axis_sizes();
    if sizes.len() != 4 {
        return Err(invalid("chaining check needs a joint over exactly four axes"));
    }
    let (na, nb, nc, nd) = (sizes[0], sizes[1], sizes[2], sizes[3]);
    let p = |a: usize, b: usize, c: usize, d: usize| j.table()[((a * nb + b) * nc + c) * nd + d];

    let mut p_abc = vec![0.0; na * nb * nc];
    let mut p_bcd = vec![0.0; nb * nc * nd];
    let mut p_acd = vec![0.0; na * nc * nd];
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                for d in 0..nd {
                    let v = p(a, b, c, d);
                    p_abc[(a * nb + b) * nc + c] += v;
                    p_bcd[(b * nc + c) * nd + d] += v;
                    p_acd[(a * nc + c) * nd + d] += v;
                }
            }
        }
    }
    let p_ab: Vec<f64> = (0..na * nb).map(|ab| p_abc[ab * nc..(ab + 1) * nc].iter().sum()).collect();
    let p_a: Vec<f64> = (0..na).map(|a| p_ab[a * nb..(a + 1) * nb].iter().sum()).collect();
    let p_bc: Vec<f64> = (0..nb * nc)
        .map(|bc| p_bcd[bc * nd..(bc + 1) * nd].iter().sum())
        .collect();

    // D independent of A given (B, C)
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                for d in 0..nd {
                    let lhs = p(a, b, c, d) * p_bc[b * nc + c];
                    let rhs = p_abc[(a * nb + b) * nc + c] * p_bcd[(b * nc + c) * nd + d];
                    if (lhs - rhs).abs() > STRUCTURE_TOLERANCE {
                        return Err(invalid(format!(
                            "joint does not factor through (B, C) at ({a}, {b}, {c}, {d})"
                        )));
                    }
                }
            }
        }
    }
    // each slice c ↦ P(c | a, b) has rank one over the supported (a, b)
    let cond_c = |a: usize, b: usize, c: usize| {
        let w = p_ab[a * nb + b];
        (w > 0.0).then(|| p_abc[(a * nb + b) * nc + c] / w)
    };
    for c in 0..nc {
        for a1 in 0..na {
            for a2 in a1 + 1..na {
                for b1 in 0..nb {
                    for b2 in b1 + 1..nb {
                        let entries = (cond_c(a1, b1, c), cond_c(a2, b2, c), cond_c(a1, b2, c), cond_c(a2, b1, c));
                        if let (Some(w), Some(x), Some(y), Some(z)) = entries {
                            if (w * x - y * z).abs() > STRUCTURE_TOLERANCE {
                                return Err(invalid(format!(
                                    "P(C = {c} | A, B) is not of product form"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    // likelihood-ratio exponent of P(B | A)
    let mut alpha: f64 = 0.0;
    for b in 0..nb {
        let column: Vec<f64> = (0..na)
            .filter(|&a| p_a[a] > 0.0)
            .map(|a| p_ab[a * nb + b] / p_a[a])
            .collect();
        let hi = column.iter().copied().fold(0.0, f64::max);
        let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
        if hi > 0.0 {
            if lo == 0.0 {
                return Err(invalid("P(B | A) has an unbounded likelihood ratio"));
            }
            alpha = alpha.max((hi / lo).ln());
        }
    }
    let constant = 2.0 * (2.0 * alpha).exp_m1();

    let mut report = ChainReport {
        alpha,
        max_violation: f64::NEG_INFINITY,
        worst_lhs: 0.0,
        worst_rhs: 0.0,
        skipped: 0,
        holds: true,
    };
    let p_c: Vec<f64> = (0..nc)
        .map(|c| (0..nb).map(|b| p_bc[b * nc + c]).sum())
        .collect();
    for c in 0..nc {
        if p_c[c] == 0.0 {
            report.skipped += nd;
            continue;
        }
        let pb_c: Vec<f64> = (0..nb).map(|b| p_bc[b * nc + c] / p_c[c]).collect();
        for d in 0..nd {
            let p_cd: f64 = (0..nb).map(|b| p_bcd[(b * nc + c) * nd + d]).sum();
            if p_cd == 0.0 {
                report.skipped += 1;
                continue;
            }
            let pb_cd: Vec<f64> = (0..nb).map(|b| p_bcd[(b * nc + c) * nd + d] / p_cd).collect();
            let tv = tv_slices(&pb_cd, &pb_c);
            for a in 0..na {
                let pa_c: f64 = (0..nb).map(|b| p_abc[(a * nb + b) * nc + c]).sum::<f64>() / p_c[c];
                let pa_cd = p_acd[(a * nc + c) * nd + d] / p_cd;
                let lhs = (pa_cd - pa_c).abs();
                let rhs = constant * pa_c.min(pa_cd) * tv;
                if lhs - rhs > report.max_violation {
                    report.max_violation = lhs - rhs;
                    report.worst_lhs = lhs;
                    report.worst_rhs = rhs;
                }
            }
        }
    }
    if report.max_violation == f64::NEG_INFINITY {
        report.max_violation = 0.0;
    }
    report.holds = report.max_violation <= CHECK_SLACK;
    Ok(report)
}

// ──────────────────────────────────────────────────────────────────────
// Testing reductions
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanoReport {
    pub info: f64,
    /// Error of the best test for d_ham(V̂, V) > t.
    pub optimal_error: f64,
    pub fano_lower: f64,
    /// Bayes risk of estimating δV under the uniform prior.
    pub bayes_risk: f64,
    /// δ²(⌊t⌋ + 1)·optimal_error.
    pub risk_lower: f64,
    pub holds: bool,
}

/// Checks the neighborhood Fano bound against the exact optimal tester, and
/// the estimation-to-testing reduction against the exact Bayes risk for the
/// parameters θ_v = δv.
pub fn check_fano_chain(source: &SourceModel, quantizer: &Quantizer, delta: f64, t: f64) -> Result<FanoReport> {
    let d = source.v_dim;
    let j = enumerate_joint(source, quantizer)?;
    let (v, y) = (v_axes(source), y_axes(quantizer));
    let info = mutual_information_sets(&j, &as_strs(&v), &as_strs(&y))?;
    let fano_lower = super::fano_variant_lower(d, t, info)?;

    let mut axes = as_strs(&v);
    axes.extend(as_strs(&y));
    let vy = j.marginal(&axes)?;
    let nv = 1usize << d;
    let ny = vy.table().len() / nv;
    let radius = t.floor() as u32;
    let mut correct = 0.0;
    let mut bayes_risk = 0.0;
    for yi in 0..ny {
        let col: Vec<f64> = (0..nv).map(|vi| vy.table()[vi * ny + yi]).collect();
        let py: f64 = col.iter().sum();
        if py == 0.0 {
            continue;
        }
        let best = (0..nv)
            .map(|guess| {
                col.iter()
                    .enumerate()
                    .filter(|(vi, _)| ((*vi ^ guess) as u32).count_ones() <= radius)
                    .map(|(_, p)| p)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        correct += best;
        for coord in 0..d {
            let bit = d - 1 - coord;
            let mean: f64 = col
                .iter()
                .enumerate()
                .map(|(vi, p)| if (vi >> bit) & 1 == 1 { *p } else { -*p })
                .sum::<f64>()
                / py;
            bayes_risk += py * (1.0 - mean * mean);
        }
    }
    bayes_risk *= delta * delta;
    let optimal_error = (1.0 - correct).clamp(0.0, 1.0);
    let risk_lower = super::estimation_to_testing_lower(delta, t, optimal_error)?;
    Ok(FanoReport {
        info,
        optimal_error,
        fano_lower,
        bayes_risk,
        risk_lower,
        holds: optimal_error >= fano_lower - CHECK_SLACK && bayes_risk >= risk_lower - CHECK_SLACK,
    })
}
