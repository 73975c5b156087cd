//! Closed-form minimax lower and upper bound calculators.
//!
//! Universal constants (`c`, `c1`, `c2`, `c_prime`) are parameters that
//! default to 1; their values only fix shapes, never absolute levels.
//! `log m` inside rate formulas is the natural logarithm. With `m = 1` the
//! log-m branches are treated as `+inf`, as are branches whose denominator
//! vanishes (zero budgets).
//!
//! Every [`RateResult`] satisfies `value == prefactor * combined`, with both
//! factors listed in its terms next to the individual min/max branches.

use std::fmt;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c_prime: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c: 1.0,
            c1: 1.0,
            c2: 1.0,
            c_prime: 1.0,
        }
    }
}

/// Inputs to the rate formulas. Optional fields are required only by the
/// formulas that use them.
#[derive(Clone, Debug, PartialEq)]
pub struct RateQuery {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub sigma2: Option<f64>,
    pub budget_total: Option<f64>,
    pub budgets_per_machine: Option<Vec<f64>>,
    pub lambda_max2: Option<f64>,
    pub lambda_min2: Option<f64>,
    pub constants: Constants,
}

impl RateQuery {
    pub fn new(d: usize, m: usize, n: usize) -> Self {
        Self {
            d,
            m,
            n,
            sigma2: None,
            budget_total: None,
            budgets_per_machine: None,
            lambda_max2: None,
            lambda_min2: None,
            constants: Constants::default(),
        }
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Self {
        self.sigma2 = Some(sigma2);
        self
    }

    pub fn with_budget_total(mut self, budget: f64) -> Self {
        self.budget_total = Some(budget);
        self
    }

    pub fn with_budgets(mut self, budgets: Vec<f64>) -> Self {
        self.budgets_per_machine = Some(budgets);
        self
    }

    /// Same budget on every machine.
    pub fn with_uniform_budget(self, budget: f64) -> Self {
        let m = self.m;
        self.with_budgets(vec![budget; m])
    }

    pub fn with_lambdas(mut self, lambda_max2: f64, lambda_min2: f64) -> Self {
        self.lambda_max2 = Some(lambda_max2);
        self.lambda_min2 = Some(lambda_min2);
        self
    }

    pub fn with_constants(mut self, constants: Constants) -> Self {
        self.constants = constants;
        self
    }

    fn check_dims(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 || self.n == 0 {
            return Err(invalid("d, m and n must be positive"));
        }
        Ok(())
    }

    fn sigma2(&self) -> Result<f64> {
        match self.sigma2 {
            Some(s) if s.is_finite() && s > 0.0 => Ok(s),
            Some(s) => Err(invalid(format!("sigma2 must be positive, got {s}"))),
            None => Err(invalid("formula requires sigma2")),
        }
    }

    fn budget_total(&self) -> Result<f64> {
        match self.budget_total {
            Some(b) if b >= 0.0 => Ok(b),
            Some(b) => Err(invalid(format!("budget must be >= 0, got {b}"))),
            None => Err(invalid("formula requires a total budget")),
        }
    }

    fn budgets(&self) -> Result<&[f64]> {
        let b = self
            .budgets_per_machine
            .as_deref()
            .ok_or_else(|| invalid("formula requires per-machine budgets"))?;
        if b.len() != self.m {
            return Err(invalid(format!(
                "{} per-machine budgets supplied for m = {}",
                b.len(),
                self.m
            )));
        }
        if let Some(x) = b.iter().find(|x| !(**x >= 0.0)) {
            return Err(invalid(format!("budgets must be >= 0, got {x}")));
        }
        Ok(b)
    }

    fn lambdas(&self) -> Result<(f64, f64)> {
        match (self.lambda_max2, self.lambda_min2) {
            (Some(hi), Some(lo)) if hi > 0.0 && lo > 0.0 && hi.is_finite() && lo.is_finite() => {
                Ok((hi, lo))
            }
            (Some(_), Some(_)) => Err(invalid("lambda values must be positive")),
            _ => Err(invalid("formula requires lambda_max2 and lambda_min2")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    pub formula_id: &'static str,
    pub value: f64,
    pub terms: Vec<(&'static str, f64)>,
}

impl RateResult {
    fn new(formula_id: &'static str, prefactor: f64, combined: f64) -> Self {
        Self {
            formula_id,
            value: prefactor * combined,
            terms: vec![("prefactor", prefactor), ("combined", combined)],
        }
    }

    fn term(mut self, name: &'static str, value: f64) -> Self {
        self.terms.push((name, value));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    /// Terms as `name=value` pairs joined by `;`.
    pub fn terms_string(&self) -> String {
        self.terms
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for RateResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={} [{}]", self.formula_id, self.value, self.terms_string())
    }
}

/// Natural log of m, or +inf for m = 1 (the branch is dropped).
fn log_m(m: usize) -> f64 {
    if m <= 1 {
        f64::INFINITY
    } else {
        (m as f64).ln()
    }
}

/// a / b with a zero denominator read as +inf.
fn ratio_or_inf(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// m / ((B/d + 1) log m) ∨ 1, the interactive budget branch.
fn interactive_branch(m: usize, d: usize, budget: f64) -> f64 {
    let lm = log_m(m);
    // for m = 1 the bracket drops out and only the floor of 1 remains
    let branch = if lm.is_infinite() {
        1.0
    } else {
        ratio_or_inf(m as f64, (budget / d as f64 + 1.0) * lm)
    };
    branch.max(1.0)
}

// ──────────────────────────────────────────────────────────────────────
// Packing entropy
// ──────────────────────────────────────────────────────────────────────

/// Volume lower bound on the 2δ-packing entropy of [−1, 1]^d, in bits:
/// d·log₂(1/(2δ)). The natural-log reading is the `nats` term. Zero for δ ≥ 1/2.
pub fn packing_entropy_hypercube_lower(d: usize, delta: f64) -> Result<RateResult> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let per_coord = if delta >= 0.5 {
        0.0
    } else {
        (1.0 / (2.0 * delta)).log2()
    };
    let nats = if delta >= 0.5 {
        0.0
    } else {
        d as f64 * (1.0 / (2.0 * delta)).ln()
    };
    Ok(RateResult::new("packing_hypercube", d as f64, per_coord).term("nats", nats))
}

/// Packing-entropy inverse for the interval [0, 1]: M⁻¹(B) = 2^(−B), from
/// M(δ) ≥ log₂(1/δ).
pub fn interval_entropy_inverse(bits: f64) -> f64 {
    (-bits).exp2()
}

/// Generic metric-entropy lower bound: (1/8)·(M⁻¹(2B + 2))².
pub fn prop1_lower(budget: f64, entropy_inverse: impl Fn(f64) -> f64) -> Result<RateResult> {
    if !(budget >= 0.0) {
        return Err(invalid(format!("budget must be >= 0, got {budget}")));
    }
    let sep = entropy_inverse(2.0 * budget + 2.0);
    Ok(RateResult::new("prop1", 0.125, sep * sep).term("separation", sep))
}

// ──────────────────────────────────────────────────────────────────────
// Gaussian and bounded mean
// ──────────────────────────────────────────────────────────────────────

/// Independent-protocol Gaussian lower bound with per-machine budgets.
pub fn theorem1_lower(q: &RateQuery) -> Result<RateResult> {
    q.check_dims()?;
    let s2 = q.sigma2()?;
    let budgets = q.budgets()?;
    let (d, m, n) = (q.d as f64, q.m as f64, q.n as f64);
    let share: f64 = budgets.iter().map(|b| (b / d).min(1.0)).sum();
    let lm = log_m(q.m);
    let sample_branch = m * n / s2;
    let logm_branch = if lm.is_infinite() { f64::INFINITY } else { m / lm };
    let budget_branch = if lm.is_infinite() {
        1.0
    } else {
        ratio_or_inf(m, share * lm).max(1.0)
    };
    let combined = sample_branch.min(logm_branch).min(budget_branch);
    Ok(RateResult::new("thm1", q.constants.c * s2 * d / (m * n), combined)
        .term("sample_branch", sample_branch)
        .term("logm_branch", logm_branch)
        .term("budget_branch", budget_branch)
        .term("budget_share", share))
}

/// Single-observation bounded-mean lower bound: c(d/m)·min{m, m/Σ min(1, B_i/d)}.
pub fn prop2_lower(q: &RateQuery) -> Result<RateResult> {
    q.check_dims()?;
    let budgets = q.budgets()?;
    let (d, m) = (q.d as f64, q.m as f64);
    let share: f64 = budgets.iter().map(|b| (b / d).min(1.0)).sum();
    let budget_branch = ratio_or_inf(m, share);
    Ok(RateResult::new("prop2", q.constants.c * d / m, m.min(budget_branch))
        .term("machine_branch", m)
        .term("budget_branch", budget_branch)
        .term("budget_share", share))
}

/// Uniform-family interactive lower bound: c₁·max{exp(−c₂B/d), d/(mn)²}.
pub fn prop3_lower(q: &RateQuery) -> Result<RateResult> {
    q.check_dims()?;
    let b = q.budget_total()?;
    let d = q.d as f64;
    let mn = (q.m * q.n) as f64;
    let exp_branch = (-q.constants.c2 * b / d).exp();
    let central_branch = d / (mn * mn);
    Ok(
        RateResult::new("prop3_lower", q.constants.c1, exp_branch.max(central_branch))
            .term("exp_branch", exp_branch)
            .term("centralized_branch", central_branch),
    )
}

/// Budget sufficient for the interactive minimum protocol,
/// d·[2log₂(2mn) + ln(m)(⌈log₂ d⌉ + 2log₂(2mn))]. The `log2_reading` term
/// replaces ln(m) with log₂(m).
pub fn prop3_budget(d: usize, m: usize, n: usize) -> Result<RateResult> {
    if d == 0 || m == 0 || n == 0 {
        return Err(invalid("d, m and n must be positive"));
    }
    let value_bits = 2.0 * ((2 * m * n) as f64).log2();
    let index_bits = f64::from(crate::codec::index_bits(d));
    let per_coord_nat = value_bits + (m as f64).ln() * (index_bits + value_bits);
    let per_coord_log2 = value_bits + (m as f64).log2() * (index_bits + value_bits);
    Ok(RateResult::new("prop3_budget", d as f64, per_coord_nat)
        .term("first_message_per_coord", value_bits)
        .term("index_bits", index_bits)
        .term("log2_reading", d as f64 * per_coord_log2))
}

/// Interactive Gaussian lower bound with a total budget.
pub fn theorem2_lower(q: &RateQuery) -> Result<RateResult> {
    q.check_dims()?;
    let s2 = q.sigma2()?;
    let b = q.budget_total()?;
    let (d, m, n) = (q.d as f64, q.m as f64, q.n as f64);
    let sample_branch = m * n / s2;
    let budget_branch = interactive_branch(q.m, q.d, b);
    Ok(RateResult::new(
        "thm2",
        q.constants.c * s2 * d / (m * n),
        sample_branch.min(budget_branch),
    )
    .term("sample_branch", sample_branch)
    .term("budget_branch", budget_branch))
}

// ──────────────────────────────────────────────────────────────────────
// Regression
// ──────────────────────────────────────────────────────────────────────

/// Linear regression: (lower, upper).
pub fn cor1_rates(q: &RateQuery) -> Result<(RateResult, RateResult)> {
    q.check_dims()?;
    let s2 = q.sigma2()?;
    let b = q.budget_total()?;
    let (lmax, lmin) = q.lambdas()?;
    let (d, m, n) = (q.d as f64, q.m as f64, q.n as f64);
    let sample_branch = lmax * m * n / s2;
    let budget_branch = interactive_branch(q.m, q.d, b);
    let lower = RateResult::new(
        "cor1_lower",
        q.constants.c * s2 * d / (lmax * m * n),
        sample_branch.min(budget_branch),
    )
    .term("sample_branch", sample_branch)
    .term("budget_branch", budget_branch);
    let upper = RateResult::new("cor1_upper", q.constants.c_prime / lmin, s2 * d / (m * n));
    Ok((lower, upper))
}

/// Probit regression: (lower, upper), the regression shapes at unit noise.
pub fn cor2_rates(q: &RateQuery) -> Result<(RateResult, RateResult)> {
    let unit = q.clone().with_sigma2(1.0);
    let (mut lower, mut upper) = cor1_rates(&unit)?;
    lower.formula_id = "cor2_lower";
    upper.formula_id = "cor2_upper";
    Ok((lower, upper))
}

// ──────────────────────────────────────────────────────────────────────
// Misc
// ──────────────────────────────────────────────────────────────────────

/// Minimax rate with the full pooled sample.
pub fn centralized_rate(family: &str, d: usize, m: usize, n: usize, sigma2: f64) -> Result<RateResult> {
    if d == 0 || m == 0 || n == 0 {
        return Err(invalid("d, m and n must be positive"));
    }
    let (d, mn) = (d as f64, (m * n) as f64);
    let (prefactor, combined) = match family {
        "gaussian" | "regression" => {
            if !(sigma2 > 0.0 && sigma2.is_finite()) {
                return Err(invalid(format!("sigma2 must be positive, got {sigma2}")));
            }
            (sigma2 * d, 1.0 / mn)
        }
        "bounded" => (d, 1.0 / mn),
        "uniform" => (d, 1.0 / (mn * mn)),
        other => return Err(invalid(format!("unknown family id {other:?}"))),
    };
    Ok(RateResult::new("centralized", prefactor, combined))
}

/// Gaussian tail quantity p* = min{2·exp(−(a − √n·δ)²/(2σ²)), 1/2}.
pub fn tail_pstar(a: f64, delta: f64, n: usize, sigma: f64) -> Result<RateResult> {
    let shift = (n as f64).sqrt() * delta;
    if !(sigma > 0.0) || !(delta >= 0.0) || !(a >= shift) || !a.is_finite() {
        return Err(invalid(format!(
            "tail_pstar requires a >= sqrt(n)*delta >= 0 and sigma > 0 (a={a}, delta={delta}, n={n}, sigma={sigma})"
        )));
    }
    let gap = a - shift;
    let tail = 2.0 * (-(gap * gap) / (2.0 * sigma * sigma)).exp();
    Ok(RateResult::new("pstar", 1.0, tail.min(0.5)).term("tail", tail))
}
