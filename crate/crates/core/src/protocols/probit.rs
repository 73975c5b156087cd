//! Probit maximum likelihood by damped Newton on the concave log-likelihood.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::special::{inverse_mills, log_normal_cdf};

pub const PROBIT_MAX_ITERS: usize = 100;
pub const PROBIT_GRAD_TOL: f64 = 1e-9;
/// Iterates beyond this norm are taken as evidence of separation.
pub const PROBIT_DIVERGENCE_NORM: f64 = 1e3;
const MAX_HALVINGS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbitFit {
    pub theta: DVector<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    /// The likelihood has no finite maximizer along the iterate path.
    pub diverged: bool,
}

fn log_likelihood(a: &DMatrix<f64>, z: &[bool], theta: &DVector<f64>) -> f64 {
    let eta = a * theta;
    eta.iter()
        .zip(z)
        .map(|(&e, &zk)| log_normal_cdf(if zk { e } else { -e }))
        .sum()
}

/// Gradient and negated Hessian of the log-likelihood.
fn derivatives(a: &DMatrix<f64>, z: &[bool], theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let d = a.ncols();
    let eta = a * theta;
    let mut grad = DVector::zeros(d);
    let mut info = DMatrix::zeros(d, d);
    for (k, (&e, &zk)) in eta.iter().zip(z).enumerate() {
        // with s = ±1 for z = 1/0: score s·λ(sη), curvature λ(sη)(λ(sη) + sη)
        let s = if zk { 1.0 } else { -1.0 };
        let lam = inverse_mills(s * e);
        let w = lam * (lam + s * e);
        let row = a.row(k).transpose();
        grad.axpy(s * lam, &row, 1.0);
        info.ger(w, &row, &row, 1.0);
    }
    (grad, info)
}

/// True when θ classifies every response strictly correctly, in which case
/// the likelihood increases without bound along the ray through θ.
fn separates(a: &DMatrix<f64>, z: &[bool], theta: &DVector<f64>) -> bool {
    let eta = a * theta;
    eta.iter()
        .zip(z)
        .all(|(&e, &zk)| if zk { e > 0.0 } else { e < 0.0 })
}

/// Maximize the probit log-likelihood for design `a` and responses `z`,
/// starting from zero.
///
/// Divergence is reported when an iterate leaves the ball of radius
/// [`PROBIT_DIVERGENCE_NORM`] or when the final iterate separates the data
/// completely; the gradient decays like φ(η) under separation, so the
/// tolerance test would otherwise stop at a finite but meaningless point.
pub fn probit_mle(a: &DMatrix<f64>, z: &[bool]) -> Result<ProbitFit> {
    let mut fit = newton(a, z)?;
    if !fit.diverged && !z.is_empty() && separates(a, z, &fit.theta) {
        fit.diverged = true;
        fit.converged = false;
    }
    Ok(fit)
}

fn newton(a: &DMatrix<f64>, z: &[bool]) -> Result<ProbitFit> {
    if a.nrows() != z.len() {
        return Err(invalid(format!(
            "design has {} rows but {} responses",
            a.nrows(),
            z.len()
        )));
    }
    let d = a.ncols();
    let mut theta = DVector::zeros(d);
    let mut ll = log_likelihood(a, z, &theta);
    let mut grad_norm = f64::INFINITY;
    for iter in 0..PROBIT_MAX_ITERS {
        let (grad, info) = derivatives(a, z, &theta);
        grad_norm = grad.norm();
        if grad_norm < PROBIT_GRAD_TOL {
            return Ok(ProbitFit {
                theta,
                iterations: iter,
                grad_norm,
                converged: true,
                diverged: false,
            });
        }
        let Some(chol) = Cholesky::new(info) else {
            // curvature vanished: the likelihood is flat along some direction
            return Ok(ProbitFit {
                theta,
                iterations: iter,
                grad_norm,
                converged: false,
                diverged: true,
            });
        };
        let step = chol.solve(&grad);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate = &theta + &step * scale;
            let cand_ll = log_likelihood(a, z, &candidate);
            if cand_ll > ll {
                theta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if theta.norm() > PROBIT_DIVERGENCE_NORM {
            return Ok(ProbitFit {
                theta,
                iterations: iter + 1,
                grad_norm,
                converged: false,
                diverged: true,
            });
        }
        if !accepted {
            // no ascent left at floating-point resolution
            return Ok(ProbitFit {
                theta,
                iterations: iter + 1,
                grad_norm,
                converged: grad_norm < PROBIT_GRAD_TOL.sqrt(),
                diverged: false,
            });
        }
    }
    Ok(ProbitFit {
        theta,
        iterations: PROBIT_MAX_ITERS,
        grad_norm,
        converged: false,
        diverged: false,
    })
}
