//! Risk sweeps with bound and centralized-rate columns.

use super::config::{ExperimentConfig, GridPoint};
use crate::bounds::{
    centralized_rate, cor1_rates, cor2_rates, interval_entropy_inverse, prop1_lower, prop2_lower,
    prop3_lower, theorem1_lower, RateQuery,
};
use crate::error::Result;
use crate::families::{design_eigenbounds, FamilySpec};
use crate::protocols::{estimate_risk, ProtocolId, RiskReport};

pub const SIMULATE_CSV_HEADER: &str = "protocol,family,m,n,d,theta,sigma,budget_bits,trials,seed,\
kind,mse_mean,mse_stderr,bits_mean,bits_max,flagged,centralized_rate,bound_id,bound_lower,bound_upper,error";

fn csv_safe(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// The lower (and, where known, upper) bound matching a protocol, evaluated
/// at the measured mean number of bits.
fn matching_bound(
    cfg: &ExperimentConfig,
    protocol: ProtocolId,
    family: &FamilySpec,
    point: &GridPoint,
    report: &RiskReport,
) -> Result<(&'static str, f64, f64)> {
    let (d, m, n) = (point.d, point.m, point.n);
    let base = RateQuery::new(d, m, n).with_constants(cfg.constants);
    let per_machine = report.bits_mean / m as f64;
    Ok(match protocol {
        ProtocolId::SingleMean { budget_bits } => (
            "prop1",
            prop1_lower(f64::from(budget_bits), interval_entropy_inverse)?.value,
            f64::NAN,
        ),
        ProtocolId::GaussQavg => {
            let q = base.with_sigma2(cfg.sigma * cfg.sigma).with_uniform_budget(per_machine);
            ("thm1", theorem1_lower(&q)?.value, f64::NAN)
        }
        ProtocolId::OneBit => (
            "prop2",
            prop2_lower(&base.with_uniform_budget(per_machine))?.value,
            f64::NAN,
        ),
        ProtocolId::UniformMin => (
            "prop3_lower",
            prop3_lower(&base.with_budget_total(report.bits_mean))?.value,
            f64::NAN,
        ),
        ProtocolId::RegressAvg | ProtocolId::ProbitAvg => {
            let designs = match family {
                FamilySpec::Regression(s) => &s.designs,
                FamilySpec::Probit(s) => &s.designs,
                _ => return Ok(("none", f64::NAN, f64::NAN)),
            };
            let (lmax, lmin) = design_eigenbounds(designs)?;
            let q = base
                .with_sigma2(cfg.sigma * cfg.sigma)
                .with_budget_total(report.bits_mean)
                .with_lambdas(lmax, lmin);
            if protocol == ProtocolId::RegressAvg {
                let (lo, hi) = cor1_rates(&q)?;
                ("cor1", lo.value, hi.value)
            } else {
                let (lo, hi) = cor2_rates(&q)?;
                ("cor2", lo.value, hi.value)
            }
        }
        ProtocolId::Centralized => ("none", f64::NAN, f64::NAN),
    })
}

fn centralized_for(cfg: &ExperimentConfig, family: &FamilySpec, point: &GridPoint) -> Result<f64> {
    let (id, sigma2) = match family {
        FamilySpec::UnitInterval(_) => ("bounded", 1.0),
        FamilySpec::Probit(_) => ("regression", 1.0),
        other => (other.id(), cfg.sigma * cfg.sigma),
    };
    Ok(centralized_rate(id, point.d, point.m, point.n, sigma2)?.value)
}

fn run_point(cfg: &ExperimentConfig, point: &GridPoint) -> Result<String> {
    let protocol = cfg.protocol_at(point);
    let family = cfg.family_at(point)?;
    let report = estimate_risk(protocol, &family, point.m, point.n, cfg.trials, cfg.seed)?;
    let central = centralized_for(cfg, &family, point)?;
    let (bound_id, lower, upper) = matching_bound(cfg, protocol, &family, point, &report)?;
    Ok(format!(
        "{},{:.10e},{:.10e},{},{},{},{:e},{},{:e},{:e},",
        report.kind,
        report.mse_mean,
        report.mse_stderr,
        report.bits_mean,
        report.bits_max,
        report.flagged,
        central,
        bound_id,
        lower,
        upper,
    ))
}

/// Header plus one row per grid point, in grid order. Errors at a grid
/// point are recorded in its `error` column and the sweep continues.
pub fn run_simulate(cfg: &ExperimentConfig) -> Vec<String> {
    let mut lines = vec![SIMULATE_CSV_HEADER.to_string()];
    for point in cfg.grid() {
        let protocol = cfg.protocol_at(&point);
        let theta = point.theta.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";");
        let budget = point.budget_bits.map_or_else(String::new, |b| b.to_string());
        let prefix = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            protocol, cfg.family, point.m, point.n, point.d, theta, cfg.sigma, budget, cfg.trials, cfg.seed
        );
        let rest = match run_point(cfg, &point) {
            Ok(r) => r,
            Err(e) => format!("{},NaN,NaN,NaN,0,0,NaN,none,NaN,NaN,{}", protocol.kind(), csv_safe(&e.to_string())),
        };
        lines.push(format!("{prefix},{rest}"));
    }
    lines
}
