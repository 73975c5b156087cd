//! Bound tables from a query CSV.
//!
//! The input has a header row naming its columns; columns may come in any
//! order and empty cells mean "not supplied". Recognized columns:
//! `formula, d, m, n, sigma2, budget, budgets, lambda_max2, lambda_min2,
//! delta, a, family, c, c1, c2, c_prime`. `budgets` is a `;`-separated list
//! of per-machine budgets or a single value used for every machine; when it
//! is absent, per-machine formulas split `budget` evenly across machines.
//! `formula` is one of the stable formula ids, or `cor1`/`cor2` for both
//! halves, or `packing`.

use crate::bounds::{
    centralized_rate, cor1_rates, cor2_rates, interval_entropy_inverse,
    packing_entropy_hypercube_lower, prop1_lower, prop2_lower, prop3_budget, prop3_lower,
    tail_pstar, theorem1_lower, theorem2_lower, Constants, RateQuery, RateResult,
};
use crate::error::{invalid, Error, Result};

pub const BOUNDS_CSV_HEADER: &str = "query,formula_id,d,m,n,sigma2,budget,value,terms,error";

const COLUMNS: [&str; 16] = [
    "formula", "d", "m", "n", "sigma2", "budget", "budgets", "lambda_max2", "lambda_min2", "delta",
    "a", "family", "c", "c1", "c2", "c_prime",
];

struct Row<'a> {
    header: &'a [String],
    cells: Vec<&'a str>,
}

impl Row<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        let i = self.header.iter().position(|h| h == key)?;
        self.cells.get(i).map(|s| s.trim()).filter(|s| !s.is_empty())
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| invalid(format!("field {key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    fn req<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.num(key)?
            .ok_or_else(|| invalid(format!("field {key} is required")))
    }
}

fn build_query(row: &Row) -> Result<RateQuery> {
    let (d, m, n) = (row.req("d")?, row.req("m")?, row.req("n")?);
    let mut q = RateQuery::new(d, m, n);
    q.sigma2 = row.num("sigma2")?;
    q.budget_total = row.num("budget")?;
    q.lambda_max2 = row.num("lambda_max2")?;
    q.lambda_min2 = row.num("lambda_min2")?;
    q.budgets_per_machine = match row.raw("budgets") {
        Some(list) => {
            let values = list
                .split(';')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("field budgets: cannot parse {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(if values.len() == 1 { vec![values[0]; m] } else { values })
        }
        None => q.budget_total.map(|b| vec![b / m as f64; m]),
    };
    let defaults = Constants::default();
    q.constants = Constants {
        c: row.num("c")?.unwrap_or(defaults.c),
        c1: row.num("c1")?.unwrap_or(defaults.c1),
        c2: row.num("c2")?.unwrap_or(defaults.c2),
        c_prime: row.num("c_prime")?.unwrap_or(defaults.c_prime),
    };
    Ok(q)
}

fn evaluate(row: &Row) -> Result<Vec<RateResult>> {
    let formula = row
        .raw("formula")
        .ok_or_else(|| invalid("field formula is required"))?;
    Ok(match formula {
        "prop1" => vec![prop1_lower(row.req("budget")?, interval_entropy_inverse)?],
        "packing" => vec![packing_entropy_hypercube_lower(row.req("d")?, row.req("delta")?)?],
        "prop3_budget" => vec![prop3_budget(row.req("d")?, row.req("m")?, row.req("n")?)?],
        "centralized" => {
            let family: String = row.req("family")?;
            let sigma2 = row.num("sigma2")?.unwrap_or(1.0);
            vec![centralized_rate(&family, row.req("d")?, row.req("m")?, row.req("n")?, sigma2)?]
        }
        "pstar" => {
            let sigma2: f64 = row.req("sigma2")?;
            vec![tail_pstar(row.req("a")?, row.req("delta")?, row.req("n")?, sigma2.sqrt())?]
        }
        "thm1" => vec![theorem1_lower(&build_query(row)?)?],
        "prop2" => vec![prop2_lower(&build_query(row)?)?],
        "prop3_lower" => vec![prop3_lower(&build_query(row)?)?],
        "thm2" => vec![theorem2_lower(&build_query(row)?)?],
        "cor1" | "cor1_lower" | "cor1_upper" | "cor2" | "cor2_lower" | "cor2_upper" => {
            let q = build_query(row)?;
            let (lo, hi) = if formula.starts_with("cor1") {
                cor1_rates(&q)?
            } else {
                cor2_rates(&q)?
            };
            match formula {
                "cor1" | "cor2" => vec![lo, hi],
                f if f.ends_with("_lower") => vec![lo],
                _ => vec![hi],
            }
        }
        other => return Err(invalid(format!("unknown formula {other:?}"))),
    })
}

/// Header plus one row per (query, formula). A query that fails to parse or
/// evaluate yields a single row with the error message and `NaN` value.
pub fn run_bounds(text: &str) -> Result<Vec<String>> {
    let mut lines_iter = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header_text) = lines_iter.next().ok_or(Error::Config {
        line: 1,
        msg: "query file has no header".into(),
    })?;
    let header: Vec<String> = header_text.split(',').map(|h| h.trim().to_string()).collect();
    if let Some(bad) = header.iter().find(|h| !COLUMNS.contains(&h.as_str())) {
        return Err(Error::Config {
            line: header_line + 1,
            msg: format!("unknown column {bad:?}"),
        });
    }
    if !header.iter().any(|h| h == "formula") {
        return Err(Error::Config {
            line: header_line + 1,
            msg: "missing column formula".into(),
        });
    }
    let mut out = vec![BOUNDS_CSV_HEADER.to_string()];
    for (query, (_, line)) in lines_iter.enumerate() {
        let row = Row {
            header: &header,
            cells: line.split(',').collect(),
        };
        let inputs = format!(
            "{},{},{},{},{}",
            row.raw("d").unwrap_or(""),
            row.raw("m").unwrap_or(""),
            row.raw("n").unwrap_or(""),
            row.raw("sigma2").unwrap_or(""),
            row.raw("budget").unwrap_or(""),
        );
        let checked = if row.cells.len() != header.len() {
            Err(invalid(format!(
                "row has {} fields, header has {}",
                row.cells.len(),
                header.len()
            )))
        } else {
            evaluate(&row)
        };
        match checked {
            Ok(results) => {
                for r in results {
                    out.push(format!(
                        "{},{},{},{},{},",
                        query + 1,
                        r.formula_id,
                        inputs,
                        r.value,
                        r.terms_string()
                    ));
                }
            }
            Err(e) => {
                let id = row.raw("formula").unwrap_or("");
                let msg = e.to_string().replace([',', '\n'], ";");
                out.push(format!("{},{},{},NaN,,{}", query + 1, id.replace(',', ";"), inputs, msg));
            }
        }
    }
    Ok(out)
}
