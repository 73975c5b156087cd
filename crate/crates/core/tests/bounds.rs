use proptest::prelude::*;

use commest::bounds::{
    centralized_rate, cor1_rates, cor2_rates, interval_entropy_inverse, packing_entropy_hypercube_lower,
    prop1_lower, prop2_lower, prop3_budget, prop3_lower, tail_pstar, theorem1_lower, theorem2_lower, RateQuery,
    RateResult,
};

fn recombines(r: &RateResult) {
    assert!(r.value >= 0.0, "{r}");
    let p = r.get("prefactor").unwrap();
    let c = r.get("combined").unwrap();
    assert_eq!(r.value, p * c, "{r}");
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// (d, m, n, B) points of a 200-point grid.
fn grid() -> Vec<(usize, usize, usize, f64)> {
    let mut out = Vec::new();
    for d in [1usize, 3, 8, 20, 50] {
        for m in [2usize, 5, 16, 100, 1000] {
            for n in [1usize, 10] {
                for b in [0.0, 1.0, 50.0, 5000.0] {
                    out.push((d, m, n, b));
                }
            }
        }
    }
    assert_eq!(out.len(), 200);
    out
}

#[test]
fn packing_volume_bound_is_achieved_by_a_grid() {
    // points −1 + 2δk, k = 0..=1/δ, are pairwise ≥ 2δ apart in sup norm
    let delta = 0.125;
    let per_axis = (1.0 / delta) as usize + 1;
    let grid_points = per_axis * per_axis;
    let bits = packing_entropy_hypercube_lower(2, delta).unwrap().value;
    assert_eq!(bits, 4.0);
    assert!(grid_points as f64 >= bits.exp2());
    assert_eq!(packing_entropy_hypercube_lower(1, 0.25).unwrap().value, 1.0);
    assert_eq!(packing_entropy_hypercube_lower(8, 1.0 / 32.0).unwrap().value, 32.0);
}

#[test]
fn interval_example() {
    let b = 0.25 * 1024f64.log2();
    let r = prop1_lower(b, interval_entropy_inverse).unwrap();
    assert_eq!(r.value, 1.0 / (128.0 * 1024.0));
    assert_eq!(prop1_lower(17.0, |_| 0.3).unwrap().value, 0.125 * 0.09);
}

#[test]
fn independent_bound_dominates_interactive_bound() {
    for (d, m, n, b) in grid() {
        let q = RateQuery::new(d, m, n).with_sigma2(1.0);
        let t1 = theorem1_lower(&q.clone().with_uniform_budget(b / m as f64)).unwrap();
        let t2 = theorem2_lower(&q.clone().with_budget_total(b)).unwrap();
        recombines(&t1);
        recombines(&t2);
        assert!(t1.value >= t2.value, "({d},{m},{n},{b}): {} < {}", t1.value, t2.value);
    }
}

#[test]
fn lower_bounds_are_nonincreasing_in_budget() {
    let budgets: Vec<f64> = (0..200).map(|k| (k as f64 * 0.1).exp2() - 1.0).collect();
    for (d, m, n) in [(4usize, 16usize, 64usize), (30, 5, 3), (2, 1000, 1)] {
        let q = RateQuery::new(d, m, n).with_sigma2(2.0).with_lambdas(1.5, 0.5);
        let mut last = [f64::INFINITY; 6];
        for &b in &budgets {
            let now = [
                theorem1_lower(&q.clone().with_uniform_budget(b)).unwrap().value,
                theorem2_lower(&q.clone().with_budget_total(b)).unwrap().value,
                prop2_lower(&q.clone().with_uniform_budget(b)).unwrap().value,
                prop3_lower(&q.clone().with_budget_total(b)).unwrap().value,
                cor1_rates(&q.clone().with_budget_total(b)).unwrap().0.value,
                cor2_rates(&q.clone().with_budget_total(b)).unwrap().0.value,
            ];
            for k in 0..6 {
                assert!(now[k] <= last[k], "formula {k} at budget {b}");
            }
            last = now;
        }
    }
}

#[test]
fn large_budget_limits_share_the_centralized_exponents() {
    const HUGE: f64 = 1e12;
    let ms = [10usize, 40, 160, 640];
    let ns = [4usize, 16, 64, 256];
    let ds = [2usize, 4, 8, 16];
    let xs = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();

    let thm1 = |d, m, n| {
        theorem1_lower(&RateQuery::new(d, m, n).with_sigma2(1.0).with_uniform_budget(HUGE)).unwrap().value
    };
    let gauss = |d, m, n| centralized_rate("gaussian", d, m, n, 1.0).unwrap().value;
    let prop3 = |d, m, n| prop3_lower(&RateQuery::new(d, m, n).with_budget_total(HUGE)).unwrap().value;
    let unif = |d, m, n| centralized_rate("uniform", d, m, n, 1.0).unwrap().value;

    type Rate = dyn Fn(usize, usize, usize) -> f64;
    let pairs: [(&Rate, &Rate); 2] = [(&thm1, &gauss), (&prop3, &unif)];
    for (bound, central) in pairs {
        let by_m = |f: &Rate| ms.iter().map(|&m| f(4, m, 16)).collect::<Vec<_>>();
        let by_n = |f: &Rate| ns.iter().map(|&n| f(4, 20, n)).collect::<Vec<_>>();
        let by_d = |f: &Rate| ds.iter().map(|&d| f(d, 20, 16)).collect::<Vec<_>>();
        assert!((slope(&xs(&ms), &by_m(bound)) - slope(&xs(&ms), &by_m(central))).abs() < 0.05);
        assert!((slope(&xs(&ns), &by_n(bound)) - slope(&xs(&ns), &by_n(central))).abs() < 0.05);
        assert!((slope(&xs(&ds), &by_d(bound)) - slope(&xs(&ds), &by_d(central))).abs() < 0.05);
    }
    let full = |m: usize| prop2_lower(&RateQuery::new(8, m, 1).with_uniform_budget(8.0)).unwrap().value;
    let rates: Vec<f64> = ms.iter().map(|&m| full(m)).collect();
    let central: Vec<f64> = ms.iter().map(|&m| centralized_rate("bounded", 8, m, 1, 1.0).unwrap().value).collect();
    assert_eq!(rates, central);
}

#[test]
fn corollary_examples() {
    let q = RateQuery::new(3, 10, 30).with_sigma2(1.0).with_budget_total(12.0).with_lambdas(1.0, 0.5);
    let (_, hi) = cor1_rates(&q).unwrap();
    assert!((hi.value - 0.02).abs() < 1e-15);

    for (d, m, n, b) in grid() {
        let q = RateQuery::new(d, m, n).with_sigma2(1.0).with_budget_total(b).with_lambdas(1.0, 1.0);
        let (lo, hi) = cor1_rates(&q).unwrap();
        recombines(&lo);
        recombines(&hi);
        assert!((lo.value - theorem2_lower(&q).unwrap().value).abs() <= 1e-15 * lo.value);
        let central = centralized_rate("regression", d, m, n, 1.0).unwrap().value;
        assert!((hi.value - central).abs() <= 1e-15 * central);
    }

    // clamp active: doubling λ_max² halves the prefactor and the value
    let base = RateQuery::new(4, 16, 64).with_sigma2(1.0).with_budget_total(1e6);
    let one = cor1_rates(&base.clone().with_lambdas(1.0, 1.0)).unwrap().0;
    let two = cor1_rates(&base.with_lambdas(2.0, 1.0)).unwrap().0;
    assert!((two.get("prefactor").unwrap() - one.get("prefactor").unwrap() / 2.0).abs() < 1e-18);
    assert!((two.value - one.value / 2.0).abs() < 1e-18);

    assert!(cor1_rates(&RateQuery::new(3, 10, 30).with_sigma2(1.0).with_budget_total(1.0).with_lambdas(0.0, 1.0)).is_err());
}

#[test]
fn budget_readings() {
    let r = prop3_budget(2, 4, 8).unwrap();
    let oracle = 2.0 * (12.0 + 4f64.ln() * 13.0);
    assert!((r.value - oracle).abs() < 1e-12);
    assert!((r.value - 60.05).abs() < 0.01);
    let base2 = r.get("log2_reading").unwrap();
    assert!((base2 - 2.0 * (12.0 + 2.0 * 13.0)).abs() < 1e-12);
}

#[test]
fn pstar_examples() {
    let r = tail_pstar(4.0 * 16f64.ln().sqrt(), 0.0, 1, 1.0).unwrap();
    assert!((r.value - 2.0 * 16f64.powi(-8)).abs() < 1e-22);
    assert_eq!(tail_pstar(3.0, 1.5, 4, 0.7).unwrap().value, 0.5);
    let mut last = f64::INFINITY;
    for k in 0..100 {
        let p = tail_pstar(0.1 * k as f64, 0.0, 1, 1.0).unwrap().value;
        assert!(p <= last);
        last = p;
    }
    assert!(tail_pstar(0.5, 1.0, 1, 1.0).is_err());
}

proptest! {
    #[test]
    fn values_recombine_from_terms(
        d in 1usize..100, m in 1usize..5000, n in 1usize..500,
        s2 in 0.01f64..100.0, b in 0.0f64..1e4, lmax in 0.1f64..10.0, lmin in 0.1f64..10.0,
    ) {
        let q = RateQuery::new(d, m, n).with_sigma2(s2).with_lambdas(lmax, lmin);
        let per = q.clone().with_uniform_budget(b / m as f64);
        let tot = q.clone().with_budget_total(b);
        let (c1l, c1u) = cor1_rates(&tot).unwrap();
        let (c2l, c2u) = cor2_rates(&tot).unwrap();
        for r in [
            theorem1_lower(&per).unwrap(),
            prop2_lower(&per).unwrap(),
            theorem2_lower(&tot).unwrap(),
            prop3_lower(&tot).unwrap(),
            c1l, c1u, c2l, c2u,
        ] {
            prop_assert!(r.value >= 0.0 && r.value.is_finite());
            prop_assert_eq!(r.value, r.get("prefactor").unwrap() * r.get("combined").unwrap());
        }
        prop_assert!(theorem1_lower(&per).unwrap().value >= theorem2_lower(&tot).unwrap().value);
    }
}
