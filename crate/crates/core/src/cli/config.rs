//! Experiment configuration files and design generators.
//!
//! The format is flat `key = value` text. `#` starts a comment. The grid
//! keys (`m`, `n`, `d`, `theta`, `budget_bits`) may repeat; every other key
//! may appear at most once. A `theta` value is either one number, applied
//! to every coordinate, or a `;`-separated vector of length d.
//!
//! ```text
//! protocol = onebit
//! family = bounded
//! law = two_point
//! m = 25
//! m = 100
//! n = 1
//! d = 8
//! trials = 10000
//! seed = 7
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::bounds::Constants;
use crate::error::{invalid, Error, Result};
use crate::families::{
    BoundedLaw, BoundedProductSpec, FamilySpec, GaussianLocationSpec, ProbitSpec, RegressionSpec,
    UniformLocationSpec, UnitIntervalSpec,
};
use crate::protocols::ProtocolId;
use crate::rng::stream;

/// Stream label for design generation.
pub const STREAM_DESIGN: u64 = 0x6465_7369;

pub const FAMILY_IDS: [&str; 6] = ["gaussian", "bounded", "uniform", "unit_interval", "regression", "probit"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignKind {
    /// Orthogonal columns with AᵀA = n·scale²·I.
    Orthogonal,
    /// I.i.d. N(0, scale²) entries.
    Gaussian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: ProtocolId,
    pub family: String,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub theta: Vec<Vec<f64>>,
    pub budget_bits: Vec<u32>,
    pub sigma: f64,
    pub law: BoundedLaw,
    pub design: DesignKind,
    pub design_scale: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub constants: Constants,
}

/// One point of the expanded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub theta: Vec<f64>,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub budget_bits: Option<u32>,
}

fn config_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_error(line, format!("field {key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut protocol = None;
        let mut family = None;
        let (mut m, mut n, mut d) = (Vec::new(), Vec::new(), Vec::new());
        let mut theta = Vec::new();
        let mut budget_bits = Vec::new();
        let mut sigma = None;
        let mut law = None;
        let mut design = None;
        let mut design_scale = None;
        let mut trials = None;
        let mut seed = None;
        let mut out = None;
        let mut constants = Constants::default();
        let mut seen_constants: Vec<&str> = Vec::new();

        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_error(line, format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(config_error(line, format!("field {key}: empty value")));
            }
            fn once<T>(slot: &mut Option<T>, line: usize, key: &str, v: T) -> Result<()> {
                if slot.is_some() {
                    return Err(config_error(line, format!("field {key} given twice")));
                }
                *slot = Some(v);
                Ok(())
            }
            match key {
                "protocol" => {
                    let p = ProtocolId::from_str(value)
                        .map_err(|_| config_error(line, format!("unknown protocol id {value:?}")))?;
                    once(&mut protocol, line, key, p)?;
                }
                "family" => {
                    if !FAMILY_IDS.contains(&value) {
                        return Err(config_error(line, format!("unknown family id {value:?}")));
                    }
                    once(&mut family, line, key, value.to_string())?;
                }
                "m" => m.push(parse_value(line, key, value)?),
                "n" => n.push(parse_value(line, key, value)?),
                "d" => d.push(parse_value(line, key, value)?),
                "budget_bits" => budget_bits.push(parse_value(line, key, value)?),
                "theta" => {
                    let v = value
                        .split(';')
                        .map(|s| parse_value::<f64>(line, key, s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    theta.push(v);
                }
                "sigma" => once(&mut sigma, line, key, parse_value(line, key, value)?)?,
                "law" => {
                    let l = match value {
                        "two_point" => BoundedLaw::TwoPoint,
                        "uniform_interval" => BoundedLaw::UniformInterval,
                        other => return Err(config_error(line, format!("unknown law {other:?}"))),
                    };
                    once(&mut law, line, key, l)?;
                }
                "design" => {
                    let k = match value {
                        "orthogonal" => DesignKind::Orthogonal,
                        "gaussian" => DesignKind::Gaussian,
                        other => return Err(config_error(line, format!("unknown design {other:?}"))),
                    };
                    once(&mut design, line, key, k)?;
                }
                "design_scale" => once(&mut design_scale, line, key, parse_value(line, key, value)?)?,
                "trials" => once(&mut trials, line, key, parse_value(line, key, value)?)?,
                "seed" => once(&mut seed, line, key, parse_value(line, key, value)?)?,
                "out" => once(&mut out, line, key, PathBuf::from(value))?,
                "c" | "c1" | "c2" | "c_prime" => {
                    if seen_constants.contains(&key) {
                        return Err(config_error(line, format!("field {key} given twice")));
                    }
                    let v: f64 = parse_value(line, key, value)?;
                    match key {
                        "c" => {
                            constants.c = v;
                            seen_constants.push("c");
                        }
                        "c1" => {
                            constants.c1 = v;
                            seen_constants.push("c1");
                        }
                        "c2" => {
                            constants.c2 = v;
                            seen_constants.push("c2");
                        }
                        _ => {
                            constants.c_prime = v;
                            seen_constants.push("c_prime");
                        }
                    }
                }
                other => return Err(config_error(line, format!("unknown field {other:?}"))),
            }
        }

        let end = last_line + 1;
        let protocol = protocol.ok_or_else(|| config_error(end, "missing field protocol"))?;
        let family = family.ok_or_else(|| config_error(end, "missing field family"))?;
        for (name, grid) in [("m", &m), ("n", &n), ("d", &d)] {
            if grid.is_empty() {
                return Err(config_error(end, format!("grid {name} is empty")));
            }
            if grid.contains(&0) {
                return Err(config_error(end, format!("grid {name} contains 0")));
            }
        }
        let trials = trials.ok_or_else(|| config_error(end, "missing field trials"))?;
        if trials < 2 {
            return Err(config_error(end, format!("trials must be >= 2, got {trials}")));
        }
        if matches!(protocol, ProtocolId::SingleMean { .. }) && budget_bits.is_empty() {
            return Err(config_error(end, "grid budget_bits is empty (required by single_mean)"));
        }
        if theta.is_empty() {
            theta.push(vec![0.0]);
        }
        let sigma: f64 = sigma.unwrap_or(1.0);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(config_error(end, format!("sigma must be positive, got {sigma}")));
        }
        let design_scale: f64 = design_scale.unwrap_or(1.0);
        if !(design_scale > 0.0 && design_scale.is_finite()) {
            return Err(config_error(end, "design_scale must be positive"));
        }
        Ok(Self {
            protocol,
            family,
            m,
            n,
            d,
            theta,
            budget_bits,
            sigma,
            law: law.unwrap_or(BoundedLaw::TwoPoint),
            design: design.unwrap_or(DesignKind::Orthogonal),
            design_scale,
            trials,
            seed: seed.unwrap_or(0),
            out,
            constants,
        })
    }

    /// Grid points in file order: theta, then m, n, d, budget_bits.
    pub fn grid(&self) -> Vec<GridPoint> {
        let budgets: Vec<Option<u32>> = if self.budget_bits.is_empty() {
            vec![None]
        } else {
            self.budget_bits.iter().copied().map(Some).collect()
        };
        let mut points = Vec::new();
        for theta in &self.theta {
            for &m in &self.m {
                for &n in &self.n {
                    for &d in &self.d {
                        for &budget_bits in &budgets {
                            points.push(GridPoint {
                                theta: theta.clone(),
                                m,
                                n,
                                d,
                                budget_bits,
                            });
                        }
                    }
                }
            }
        }
        points
    }

    /// Protocol with the grid point's budget filled in.
    pub fn protocol_at(&self, point: &GridPoint) -> ProtocolId {
        match (self.protocol, point.budget_bits) {
            (ProtocolId::SingleMean { .. }, Some(b)) => ProtocolId::SingleMean { budget_bits: b },
            (p, _) => p,
        }
    }

    /// Family specification at a grid point. Designs for regression and
    /// probit are drawn once per grid point from the configured seed.
    pub fn family_at(&self, point: &GridPoint) -> Result<FamilySpec> {
        let theta = match point.theta.len() {
            1 => vec![point.theta[0]; point.d],
            k if k == point.d => point.theta.clone(),
            k => return Err(invalid(format!("theta has {k} coordinates but d = {}", point.d))),
        };
        Ok(match self.family.as_str() {
            "gaussian" => FamilySpec::Gaussian(GaussianLocationSpec::new(theta, self.sigma)?),
            "bounded" => FamilySpec::Bounded(BoundedProductSpec::new(theta, self.law)?),
            "uniform" => FamilySpec::Uniform(UniformLocationSpec::new(theta)?),
            "unit_interval" => {
                if point.d != 1 {
                    return Err(invalid("unit_interval family is one-dimensional"));
                }
                FamilySpec::UnitInterval(UnitIntervalSpec::new(theta[0])?)
            }
            "regression" => {
                let designs = self.designs_at(point)?;
                FamilySpec::Regression(RegressionSpec::new(designs, theta, self.sigma)?)
            }
            "probit" => {
                let designs = self.designs_at(point)?;
                FamilySpec::Probit(ProbitSpec::new(designs, theta)?)
            }
            other => return Err(invalid(format!("unknown family id {other:?}"))),
        })
    }

    fn designs_at(&self, point: &GridPoint) -> Result<Vec<DMatrix<f64>>> {
        match self.design {
            DesignKind::Orthogonal => {
                orthogonal_designs(point.m, point.n, point.d, self.design_scale, self.seed)
            }
            DesignKind::Gaussian => {
                gaussian_designs(point.m, point.n, point.d, self.design_scale, self.seed)
            }
        }
    }
}

fn gaussian_matrix(n: usize, d: usize, seed: u64, machine: usize) -> DMatrix<f64> {
    let mut rng = stream(seed, &[STREAM_DESIGN, machine as u64]);
    DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))
}

/// Per-machine n×d designs with orthogonal columns, AᵀA = n·scale²·I.
pub fn orthogonal_designs(m: usize, n: usize, d: usize, scale: f64, seed: u64) -> Result<Vec<DMatrix<f64>>> {
    if n < d || d == 0 {
        return Err(Error::DegenerateDesign(format!("orthogonal design needs n >= d >= 1, got n={n}, d={d}")));
    }
    Ok((0..m)
        .map(|i| gaussian_matrix(n, d, seed, i).qr().q() * ((n as f64).sqrt() * scale))
        .collect())
}

/// Per-machine n×d designs with i.i.d. N(0, scale²) entries.
pub fn gaussian_designs(m: usize, n: usize, d: usize, scale: f64, seed: u64) -> Result<Vec<DMatrix<f64>>> {
    if n < d || d == 0 {
        return Err(Error::DegenerateDesign(format!("design needs n >= d >= 1, got n={n}, d={d}")));
    }
    Ok((0..m).map(|i| gaussian_matrix(n, d, seed, i) * scale).collect())
}
