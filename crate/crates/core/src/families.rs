//! Distribution families, seeded samplers, and the two problem reductions
//! (Gaussian mean → linear regression, linear regression → probit).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::rng::{self, STREAM_DATA};

/// Relative tolerance on negative eigenvalues of the reduction covariance.
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Rescaled Gram matrices with λ_min/λ_max below this are treated as singular.
pub const RANK_TOLERANCE: f64 = 1e-12;

fn check_theta(theta: &[f64]) -> Result<()> {
    if theta.is_empty() {
        return Err(invalid("parameter vector must have dimension >= 1"));
    }
    if let Some(t) = theta.iter().find(|t| !t.is_finite() || t.abs() > 1.0) {
        return Err(invalid(format!("parameter coordinate {t} outside [-1, 1]")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("noise scale must be positive, got {sigma}")));
    }
    Ok(())
}

// ──────────────────────────────────────────────────────────────────────
// Family specifications
// ──────────────────────────────────────────────────────────────────────

/// N(θ, σ²I_d) with θ ∈ [-1, 1]^d.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianLocationSpec {
    pub theta: Vec<f64>,
    pub sigma: f64,
}

impl GaussianLocationSpec {
    pub fn new(theta: Vec<f64>, sigma: f64) -> Result<Self> {
        check_theta(&theta)?;
        check_sigma(sigma)?;
        Ok(Self { theta, sigma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedLaw {
    /// Mass (1 ± θ_j)/2 on ±1.
    TwoPoint,
    /// Uniform on [θ_j − w, θ_j + w] with w = 1 − |θ_j|.
    UniformInterval,
}

/// A product law on [-1, 1]^d with mean θ.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedProductSpec {
    pub theta: Vec<f64>,
    pub law: BoundedLaw,
}

impl BoundedProductSpec {
    pub fn new(theta: Vec<f64>, law: BoundedLaw) -> Result<Self> {
        check_theta(&theta)?;
        Ok(Self { theta, law })
    }
}

/// Coordinate j uniform on [θ_j − 1, θ_j + 1].
#[derive(Clone, Debug, PartialEq)]
pub struct UniformLocationSpec {
    pub theta: Vec<f64>,
}

impl UniformLocationSpec {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        check_theta(&theta)?;
        Ok(Self { theta })
    }
}

/// Bernoulli(θ) observations on {0, 1}, the one-dimensional bounded-mean
/// problem on [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitIntervalSpec {
    pub theta: f64,
}

impl UnitIntervalSpec {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(invalid(format!("Bernoulli mean {theta} outside [0, 1]")));
        }
        Ok(Self { theta })
    }
}

/// y^(i) = A^(i) θ + N(0, σ² I_n), one fixed design per machine.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionSpec {
    pub designs: Vec<DMatrix<f64>>,
    pub theta: Vec<f64>,
    pub sigma: f64,
}

fn check_designs(designs: &[DMatrix<f64>], d: usize) -> Result<()> {
    if designs.is_empty() {
        return Err(invalid("at least one design matrix is required"));
    }
    let n = designs[0].nrows();
    for (i, a) in designs.iter().enumerate() {
        if a.ncols() != d {
            return Err(invalid(format!(
                "design {i} has {} columns, expected {d}",
                a.ncols()
            )));
        }
        if a.nrows() != n {
            return Err(invalid(format!(
                "design {i} has {} rows, expected {n}",
                a.nrows()
            )));
        }
        if a.nrows() < d {
            return Err(Error::DegenerateDesign(format!(
                "design {i} has {} rows < dimension {d}",
                a.nrows()
            )));
        }
    }
    Ok(())
}

impl RegressionSpec {
    /// `sigma = 0` is accepted here (noiseless responses).
    pub fn new(designs: Vec<DMatrix<f64>>, theta: Vec<f64>, sigma: f64) -> Result<Self> {
        check_theta(&theta)?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid(format!("noise scale must be >= 0, got {sigma}")));
        }
        check_designs(&designs, theta.len())?;
        Ok(Self {
            designs,
            theta,
            sigma,
        })
    }

    pub fn machines(&self) -> usize {
        self.designs.len()
    }

    pub fn samples_per_machine(&self) -> usize {
        self.designs[0].nrows()
    }
}

/// P(Z = 1 | a_k, θ) = Φ(⟨a_k, θ⟩).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbitSpec {
    pub designs: Vec<DMatrix<f64>>,
    pub theta: Vec<f64>,
}

impl ProbitSpec {
    pub fn new(designs: Vec<DMatrix<f64>>, theta: Vec<f64>) -> Result<Self> {
        check_theta(&theta)?;
        check_designs(&designs, theta.len())?;
        Ok(Self { designs, theta })
    }

    pub fn machines(&self) -> usize {
        self.designs.len()
    }

    pub fn samples_per_machine(&self) -> usize {
        self.designs[0].nrows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Gaussian(GaussianLocationSpec),
    Bounded(BoundedProductSpec),
    Uniform(UniformLocationSpec),
    UnitInterval(UnitIntervalSpec),
    Regression(RegressionSpec),
    Probit(ProbitSpec),
}

impl FamilySpec {
    pub fn id(&self) -> &'static str {
        match self {
            FamilySpec::Gaussian(_) => "gaussian",
            FamilySpec::Bounded(_) => "bounded",
            FamilySpec::Uniform(_) => "uniform",
            FamilySpec::UnitInterval(_) => "unit_interval",
            FamilySpec::Regression(_) => "regression",
            FamilySpec::Probit(_) => "probit",
        }
    }

    /// The true parameter.
    pub fn theta(&self) -> Vec<f64> {
        match self {
            FamilySpec::Gaussian(s) => s.theta.clone(),
            FamilySpec::Bounded(s) => s.theta.clone(),
            FamilySpec::Uniform(s) => s.theta.clone(),
            FamilySpec::UnitInterval(s) => vec![s.theta],
            FamilySpec::Regression(s) => s.theta.clone(),
            FamilySpec::Probit(s) => s.theta.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilySpec::UnitInterval(_) => 1,
            other => other.theta().len(),
        }
    }

    /// Machine count and per-machine sample size fixed by the family itself
    /// (regression and probit carry their designs).
    pub fn fixed_shape(&self) -> Option<(usize, usize)> {
        match self {
            FamilySpec::Regression(s) => Some((s.machines(), s.samples_per_machine())),
            FamilySpec::Probit(s) => Some((s.machines(), s.samples_per_machine())),
            _ => None,
        }
    }
}

// ──────────────────────────────────────────────────────────────────────
// Samples
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Debug, PartialEq)]
pub enum SampleData {
    /// One d×n block per machine; column k is observation k.
    Location(Vec<DMatrix<f64>>),
    /// One response n-vector per machine.
    Responses(Vec<DVector<f64>>),
    /// One vector of binary responses per machine.
    Binary(Vec<Vec<bool>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub data: SampleData,
}

impl SampleSet {
    pub fn location_blocks(&self) -> Result<&[DMatrix<f64>]> {
        match &self.data {
            SampleData::Location(b) => Ok(b),
            _ => Err(invalid("expected location-family samples")),
        }
    }

    pub fn responses(&self) -> Result<&[DVector<f64>]> {
        match &self.data {
            SampleData::Responses(r) => Ok(r),
            _ => Err(invalid("expected real-valued regression responses")),
        }
    }

    pub fn binary(&self) -> Result<&[Vec<bool>]> {
        match &self.data {
            SampleData::Binary(z) => Ok(z),
            _ => Err(invalid("expected binary responses")),
        }
    }

    /// Audit dump: `machine,obs_index,coordinate,value` (0-based indices).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("machine,obs_index,coordinate,value\n");
        match &self.data {
            SampleData::Location(blocks) => {
                for (i, b) in blocks.iter().enumerate() {
                    for k in 0..b.ncols() {
                        for j in 0..b.nrows() {
                            out.push_str(&format!("{i},{k},{j},{}\n", b[(j, k)]));
                        }
                    }
                }
            }
            SampleData::Responses(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    for (k, v) in r.iter().enumerate() {
                        out.push_str(&format!("{i},{k},0,{v}\n"));
                    }
                }
            }
            SampleData::Binary(zs) => {
                for (i, z) in zs.iter().enumerate() {
                    for (k, &v) in z.iter().enumerate() {
                        out.push_str(&format!("{i},{k},0,{}\n", u8::from(v)));
                    }
                }
            }
        }
        out
    }
}

fn machine_rng(seed: u64, machine: usize) -> ChaCha8Rng {
    rng::stream(seed, &[STREAM_DATA, machine as u64])
}

fn sample_regression_responses(
    designs: &[DMatrix<f64>],
    theta: &[f64],
    sigma: f64,
    seed: u64,
) -> Vec<DVector<f64>> {
    let theta = DVector::from_column_slice(theta);
    designs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut rng = machine_rng(seed, i);
            let noise = DVector::from_fn(a.nrows(), |_, _| {
                sigma * rng.sample::<f64, _>(StandardNormal)
            });
            a * &theta + noise
        })
        .collect()
}

/// Draw `n` observations on each of `m` machines.
///
/// Machine `i` uses its own stream derived from `(seed, i)`, so its data is
/// unchanged when machines are added or removed. Regression and probit specs
/// fix `m` and `n` through their designs; the arguments must agree.
pub fn sample(spec: &FamilySpec, m: usize, n: usize, seed: u64) -> Result<SampleSet> {
    if m == 0 || n == 0 {
        return Err(invalid("sample requires m >= 1 and n >= 1"));
    }
    if let Some((fm, fn_)) = spec.fixed_shape() {
        if (fm, fn_) != (m, n) {
            return Err(invalid(format!(
                "designs fix (m, n) = ({fm}, {fn_}) but ({m}, {n}) was requested"
            )));
        }
    }
    let d = spec.dim();
    let location = |draw: &dyn Fn(&mut ChaCha8Rng, usize) -> f64| -> SampleData {
        SampleData::Location(
            (0..m)
                .map(|i| {
                    let mut rng = machine_rng(seed, i);
                    let mut block = DMatrix::zeros(d, n);
                    for k in 0..n {
                        for j in 0..d {
                            block[(j, k)] = draw(&mut rng, j);
                        }
                    }
                    block
                })
                .collect(),
        )
    };
    let data = match spec {
        FamilySpec::Gaussian(s) => location(&|rng, j| {
            s.theta[j] + s.sigma * rng.sample::<f64, _>(StandardNormal)
        }),
        FamilySpec::Bounded(s) => match s.law {
            BoundedLaw::TwoPoint => location(&|rng, j| {
                if rng.random::<f64>() < (1.0 + s.theta[j]) / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }),
            BoundedLaw::UniformInterval => location(&|rng, j| {
                let w = 1.0 - s.theta[j].abs();
                let u: f64 = rng.random();
                (s.theta[j] + w * (2.0 * u - 1.0)).clamp(-1.0, 1.0)
            }),
        },
        FamilySpec::Uniform(s) => location(&|rng, j| {
            let u: f64 = rng.random();
            s.theta[j] - 1.0 + 2.0 * u
        }),
        FamilySpec::UnitInterval(s) => location(&|rng, _| {
            if rng.random::<f64>() < s.theta {
                1.0
            } else {
                0.0
            }
        }),
        FamilySpec::Regression(s) => {
            SampleData::Responses(sample_regression_responses(&s.designs, &s.theta, s.sigma, seed))
        }
        FamilySpec::Probit(s) => SampleData::Binary(
            sample_regression_responses(&s.designs, &s.theta, 1.0, seed)
                .iter()
                .map(|y| reduce_regression_to_probit(y.as_slice()))
                .collect(),
        ),
    };
    Ok(SampleSet { m, n, d, data })
}

// ──────────────────────────────────────────────────────────────────────
// Designs and reductions
// ──────────────────────────────────────────────────────────────────────

/// Extreme eigenvalues of the rescaled Gram matrices: (λ_max², λ_min²) with
/// λ_max² = max_i eig_max(AᵢᵀAᵢ)/n and λ_min² = min_i eig_min(AᵢᵀAᵢ)/n.
pub fn design_eigenbounds(designs: &[DMatrix<f64>]) -> Result<(f64, f64)> {
    if designs.is_empty() {
        return Err(invalid("design_eigenbounds requires at least one design"));
    }
    let mut lmax = f64::NEG_INFINITY;
    let mut lmin = f64::INFINITY;
    for (i, a) in designs.iter().enumerate() {
        if a.nrows() < a.ncols() || a.ncols() == 0 {
            return Err(Error::DegenerateDesign(format!(
                "design {i} is {}x{}; need n >= d >= 1",
                a.nrows(),
                a.ncols()
            )));
        }
        let gram = a.transpose() * a / a.nrows() as f64;
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let hi = eig.max();
        let lo = eig.min();
        if !(hi > 0.0) || lo <= RANK_TOLERANCE * hi {
            return Err(Error::DegenerateDesign(format!(
                "design {i} is rank deficient (eigenvalues {lo:e} .. {hi:e})"
            )));
        }
        lmax = lmax.max(hi);
        lmin = lmin.min(lo);
    }
    Ok((lmax, lmin))
}

/// Precomputed noise factor for the mean → regression reduction on one design.
///
/// Given X ~ N(θ, σ²/(λ_max² n) I_d), the response y = A X + z with
/// z ~ N(0, Σ), Σ = σ² I_n − σ²/(λ_max² n) A Aᵀ, is distributed as
/// N(Aθ, σ² I_n).
#[derive(Clone, Debug)]
pub struct MeanToRegression {
    design: DMatrix<f64>,
    noise_factor: DMatrix<f64>,
    min_eigenvalue: f64,
}

impl MeanToRegression {
    pub fn new(design: &DMatrix<f64>, sigma: f64, lambda_max2: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid(format!("noise scale must be >= 0, got {sigma}")));
        }
        if !(lambda_max2.is_finite() && lambda_max2 > 0.0) {
            return Err(invalid(format!("lambda_max2 must be positive, got {lambda_max2}")));
        }
        let n = design.nrows();
        let s2 = sigma * sigma;
        let cov = DMatrix::identity(n, n) * s2
            - design * design.transpose() * (s2 / (lambda_max2 * n as f64));
        let eig = SymmetricEigen::new(cov);
        let min_eigenvalue = eig.eigenvalues.min();
        if min_eigenvalue < -PSD_TOLERANCE * s2.max(f64::MIN_POSITIVE) {
            return Err(Error::ReductionInfeasible(format!(
                "noise covariance has eigenvalue {min_eigenvalue:e}; lambda_max2 too small for this design"
            )));
        }
        let root = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let noise_factor =
            &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose();
        Ok(Self {
            design: design.clone(),
            noise_factor,
            min_eigenvalue,
        })
    }

    /// Smallest eigenvalue of Σ before clipping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn noise_factor(&self) -> &DMatrix<f64> {
        &self.noise_factor
    }

    pub fn apply<R: Rng + ?Sized>(&self, x_mean: &DVector<f64>, rng: &mut R) -> Result<DVector<f64>> {
        if x_mean.len() != self.design.ncols() {
            return Err(invalid(format!(
                "mean vector has length {}, design has {} columns",
                x_mean.len(),
                self.design.ncols()
            )));
        }
        let g = DVector::from_fn(self.design.nrows(), |_, _| rng.sample::<f64, _>(StandardNormal));
        Ok(&self.design * x_mean + &self.noise_factor * g)
    }
}

/// One-shot form of [`MeanToRegression`].
pub fn reduce_mean_to_regression(
    x_mean: &DVector<f64>,
    design: &DMatrix<f64>,
    sigma: f64,
    lambda_max2: f64,
    seed: u64,
) -> Result<DVector<f64>> {
    let mut rng = rng::stream(seed, &[]);
    MeanToRegression::new(design, sigma, lambda_max2)?.apply(x_mean, &mut rng)
}

/// Z_k = 1 iff y_k ≥ 0.
pub fn reduce_regression_to_probit(y: &[f64]) -> Vec<bool> {
    y.iter().map(|&v| v >= 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(theta: Vec<f64>, sigma: f64) -> FamilySpec {
        FamilySpec::Gaussian(GaussianLocationSpec::new(theta, sigma).unwrap())
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianLocationSpec::new(vec![1.5], 1.0).is_err());
        assert!(GaussianLocationSpec::new(vec![0.5], 0.0).is_err());
        assert!(GaussianLocationSpec::new(vec![], 1.0).is_err());
        assert!(UniformLocationSpec::new(vec![f64::NAN]).is_err());
        assert!(UnitIntervalSpec::new(1.2).is_err());
        let bad = DMatrix::zeros(2, 3);
        assert!(RegressionSpec::new(vec![bad], vec![0.0; 3], 1.0).is_err());
    }

    #[test]
    fn gaussian_shape_and_determinism() {
        let spec = gaussian(vec![0.0], 1.0);
        let a = sample(&spec, 2, 3, 99).unwrap();
        let b = sample(&spec, 2, 3, 99).unwrap();
        assert_eq!(a, b);
        let blocks = a.location_blocks().unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].shape(), (1, 3));
        assert_ne!(a, sample(&spec, 2, 3, 100).unwrap());
    }

    #[test]
    fn gaussian_mean_converges() {
        let spec = gaussian(vec![0.0], 1.0);
        let s = sample(&spec, 4, 50_000, 5).unwrap();
        let total: f64 = s.location_blocks().unwrap().iter().map(|b| b.sum()).sum();
        assert!((total / 200_000.0).abs() < 0.01);
    }

    #[test]
    fn machine_data_is_invariant_to_machine_count() {
        let spec = gaussian(vec![0.2, -0.3], 0.5);
        let small = sample(&spec, 2, 4, 1).unwrap();
        let large = sample(&spec, 7, 4, 1).unwrap();
        let (sb, lb) = (small.location_blocks().unwrap(), large.location_blocks().unwrap());
        assert_eq!(sb[0], lb[0]);
        assert_eq!(sb[1], lb[1]);
    }

    #[test]
    fn degenerate_two_point() {
        let spec = FamilySpec::Bounded(
            BoundedProductSpec::new(vec![1.0, 0.0], BoundedLaw::TwoPoint).unwrap(),
        );
        let s = sample(&spec, 3, 20, 4).unwrap();
        for b in s.location_blocks().unwrap() {
            assert!(b.row(0).iter().all(|&v| v == 1.0));
            assert!(b.row(1).iter().all(|&v| v == 1.0 || v == -1.0));
        }
    }

    #[test]
    fn two_point_hoeffding() {
        let theta = vec![0.3, -0.7, 0.0];
        let spec = FamilySpec::Bounded(
            BoundedProductSpec::new(theta.clone(), BoundedLaw::TwoPoint).unwrap(),
        );
        let s = sample(&spec, 10, 400, 8).unwrap();
        let n_total = 4000.0;
        for (j, &t) in theta.iter().enumerate() {
            let mean: f64 = s
                .location_blocks()
                .unwrap()
                .iter()
                .map(|b| b.row(j).sum())
                .sum::<f64>()
                / n_total;
            assert!((mean - t).abs() <= 4.0 / n_total.sqrt());
        }
    }

    #[test]
    fn uniform_interval_law_stays_in_range_with_right_mean() {
        let theta = vec![0.8, -0.25];
        let spec = FamilySpec::Bounded(
            BoundedProductSpec::new(theta.clone(), BoundedLaw::UniformInterval).unwrap(),
        );
        let s = sample(&spec, 5, 20_000, 2).unwrap();
        for (j, &t) in theta.iter().enumerate() {
            let mut sum = 0.0;
            for b in s.location_blocks().unwrap() {
                for &v in b.row(j).iter() {
                    assert!((-1.0..=1.0).contains(&v));
                    assert!((v - t).abs() <= 1.0 - t.abs() + 1e-12);
                    sum += v;
                }
            }
            assert!((sum / 100_000.0 - t).abs() < 0.01);
        }
    }

    #[test]
    fn uniform_location_extremes() {
        // E[min + 1] = 2/(N+1) ≈ 2e-5 for N = 1e5
        let spec = FamilySpec::Uniform(UniformLocationSpec::new(vec![0.0]).unwrap());
        let s = sample(&spec, 10, 10_000, 3).unwrap();
        let blocks = s.location_blocks().unwrap();
        let min = blocks.iter().map(|b| b.min()).fold(f64::INFINITY, f64::min);
        let max = blocks.iter().map(|b| b.max()).fold(f64::NEG_INFINITY, f64::max);
        assert!((min + 1.0).abs() < 1e-3 && min >= -1.0);
        assert!((max - 1.0).abs() < 1e-3 && max <= 1.0);
    }

    #[test]
    fn sample_rejects_shape_mismatch() {
        let design = DMatrix::identity(3, 3);
        let spec = FamilySpec::Regression(
            RegressionSpec::new(vec![design.clone(), design], vec![0.0; 3], 1.0).unwrap(),
        );
        assert!(sample(&spec, 2, 3, 0).is_ok());
        assert!(sample(&spec, 3, 3, 0).is_err());
        assert!(sample(&gaussian(vec![0.0], 1.0), 0, 3, 0).is_err());
    }

    #[test]
    fn eigenbounds_examples() {
        let n = 4usize;
        let a = DMatrix::identity(n, n) * (n as f64).sqrt();
        let (hi, lo) = design_eigenbounds(&[a]).unwrap();
        assert_relative_eq!(hi, 1.0, epsilon = 1e-12);
        assert_relative_eq!(lo, 1.0, epsilon = 1e-12);

        let n = 8usize;
        let mut a = DMatrix::zeros(n, 2);
        a[(0, 0)] = (2.0 * n as f64).sqrt();
        a[(1, 1)] = (n as f64 / 2.0).sqrt();
        let (hi, lo) = design_eigenbounds(&[a]).unwrap();
        assert_relative_eq!(hi, 2.0, epsilon = 1e-12);
        assert_relative_eq!(lo, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eigenbounds_rejects_rank_deficiency() {
        let mut a = DMatrix::zeros(5, 2);
        a[(0, 0)] = 1.0;
        a[(1, 0)] = 2.0;
        assert!(matches!(
            design_eigenbounds(&[a]),
            Err(Error::DegenerateDesign(_))
        ));
        assert!(design_eigenbounds(&[]).is_err());
    }

    #[test]
    fn reduction_with_identity_design_is_deterministic_scaling() {
        let n = 3usize;
        let a = DMatrix::identity(n, n) * (n as f64).sqrt();
        let red = MeanToRegression::new(&a, 1.0, 1.0).unwrap();
        assert!(red.noise_factor().iter().all(|v| v.abs() < 1e-7));
        let x = DVector::from_vec(vec![0.1, -0.2, 0.3]);
        let y = reduce_mean_to_regression(&x, &a, 1.0, 1.0, 17).unwrap();
        for k in 0..n {
            assert!((y[k] - (n as f64).sqrt() * x[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn reduction_two_by_two_spectrum() {
        // Σ = I − ½·11ᵀ has eigenvalues {1, 0}
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let red = MeanToRegression::new(&a, 1.0, 1.0).unwrap();
        assert!(red.min_eigenvalue().abs() < 1e-12);
        let f = red.noise_factor();
        let cov = f * f.transpose();
        assert_relative_eq!(cov[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(cov[(0, 1)], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn reduction_rejects_small_lambda() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            MeanToRegression::new(&a, 1.0, 0.5),
            Err(Error::ReductionInfeasible(_))
        ));
    }

    #[test]
    fn probit_thresholding() {
        assert_eq!(
            reduce_regression_to_probit(&[0.0, -0.1, 3.2]),
            vec![true, false, true]
        );
    }
}
