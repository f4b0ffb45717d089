//! Identity suites behind `matchbox verify`.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Zero;

use matchbox_core::asymptotics::{
    finite_difference_derivatives, lambda, residue_asymptotic, s_derivative_at_1, s_second_derivative_at_1,
    truncated_return_probability,
};
use matchbox_core::combinatorics::{enumerate_manila, enumerate_paths, mu_bijection, paths_count, ENUMERATION_LIMIT};
use matchbox_core::expectations::{
    first_return_means, residue_diagonal_sum, residue_oracle, residue_recursion, residue_series, ORACLE_LIMIT,
};
use matchbox_core::numeric::Field;
use matchbox_core::series::{
    diagonal_probabilities, diagonal_probability_closed, diagonal_probability_from_paths, s_series,
};
use matchbox_core::simulator::{estimate, SimulationTarget};
use matchbox_core::{ExactPolynomial, ExactSeries};

use crate::table::Table;
use crate::{usage, CliResult, VerifyArgs};

pub const SUITES: [&str; 9] = [
    "series",
    "gf",
    "methods",
    "oracle",
    "bijection",
    "diagonal",
    "coincidence",
    "asymptotics",
    "simulator",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub parameters: String,
    pub result: Result<(), String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn record(&mut self, suite: &'static str, name: &str, parameters: String, result: Result<(), String>) {
        self.checks.push(Check {
            suite,
            name: name.to_string(),
            parameters,
            result,
        });
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.result.is_err()).count()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["suite", "check", "parameters", "status", "detail"]);
        for c in &self.checks {
            let (status, detail) = match &c.result {
                Ok(()) => ("pass", String::new()),
                Err(e) => ("fail", e.replace(',', ";")),
            };
            t.push(vec![
                c.suite.into(),
                c.name.clone().into(),
                c.parameters.clone().into(),
                status.into(),
                detail.into(),
            ]);
        }
        t
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn grid() -> [BigRational; 5] {
    [r(1, 4), r(1, 3), r(1, 2), r(2, 3), r(3, 4)]
}

fn ks(args: &VerifyArgs, default: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    match args.k {
        Some(k) => vec![k],
        None => default.collect(),
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<Report> {
    if let Some(k) = args.k {
        if k < 2 {
            return Err(usage("--k must be at least 2"));
        }
    }
    let selected: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else if let Some(s) = SUITES.iter().find(|s| **s == args.suite) {
        vec![*s]
    } else {
        return Err(usage(format!("unknown suite {:?}; expected all or one of {}", args.suite, SUITES.join(", "))));
    };
    let mut report = Report::default();
    for suite in selected {
        match suite {
            "series" => series(&mut report),
            "gf" => gf(args, &mut report),
            "methods" => methods(args, &mut report),
            "oracle" => oracle(args, &mut report),
            "bijection" => bijection(args, &mut report),
            "diagonal" => diagonal(args, &mut report),
            "coincidence" => coincidence(args, &mut report),
            "asymptotics" => asymptotics(&mut report),
            "simulator" => simulator(&mut report),
            _ => unreachable!(),
        }
    }
    Ok(report)
}

fn series(report: &mut Report) {
    let tables: [(usize, [i64; 6]); 3] = [
        (2, [1, 1, 2, 5, 14, 42]),
        (3, [1, 2, 7, 30, 143, 728]),
        (4, [1, 3, 15, 91, 612, 4389]),
    ];
    for (k, want) in tables {
        let s: ExactSeries = s_series(k, 6);
        let got: Vec<BigRational> = s.coeffs()[1..].to_vec();
        let want: Vec<BigRational> = want.iter().map(|&w| r(w, 1)).collect();
        report.record("series", "s_n table", format!("k={k}"), ensure(got == want, || format!("{got:?}")));
    }
}

fn gf(args: &VerifyArgs, report: &mut Report) {
    let order = args.order.unwrap_or(30);
    for k in ks(args, 2..=6) {
        let s: ExactSeries = s_series(k, order);
        let one_minus = ExactSeries::one(order) - s.clone();
        let mut power = ExactSeries::one(order);
        for _ in 0..k - 1 {
            power = &power * &one_minus;
        }
        let residual = &s * &power - ExactSeries::z(order);
        report.record(
            "gf",
            "S (1 - S)^(k-1) = z",
            format!("k={k} N={order}"),
            ensure(residual.coeffs().iter().all(Zero::is_zero), || "non-zero residual".into()),
        );
    }
}

fn methods(args: &VerifyArgs, report: &mut Report) {
    let n = args.max_n.unwrap_or(25).max(1);
    for k in ks(args, 2..=4) {
        for p in grid() {
            let result = (|| {
                let rec = residue_recursion(k, n, &p).map_err(|e| e.to_string())?;
                let diag = residue_diagonal_sum(k, n, &p).map_err(|e| e.to_string())?;
                let gf = residue_series(k, &p, n).map_err(|e| e.to_string())?;
                ensure(rec == diag && diag == gf, || "methods disagree".into())
            })();
            report.record("methods", "recursion = diagonal-sum = gf-coefficient", format!("k={k} n<={n} p={p}"), result);
        }
    }
}

fn oracle(args: &VerifyArgs, report: &mut Report) {
    let n_max = args.max_n.unwrap_or(4).max(1);
    for k in ks(args, 2..=3) {
        let n_max = n_max.min(ORACLE_LIMIT / k);
        if n_max == 0 {
            continue;
        }
        let Ok(symbolic) = residue_recursion(k, n_max, &ExactPolynomial::x()) else {
            continue;
        };
        for n in 1..=n_max {
            let result = residue_oracle(k, n)
                .map_err(|e| e.to_string())
                .and_then(|o| ensure(o == symbolic[n - 1], || format!("oracle {o}")));
            report.record("oracle", "exhaustive expansion = recursion", format!("k={k} n={n}"), result);
        }
    }
}

fn bijection(args: &VerifyArgs, report: &mut Report) {
    let default_max = |k: usize| (16 / k).max(1);
    for k in ks(args, 2..=6) {
        let n_max = args.max_n.unwrap_or_else(|| default_max(k)).min(ENUMERATION_LIMIT / k);
        for n in 1..=n_max {
            let result = (|| {
                let paths = enumerate_paths(k, n).map_err(|e| e.to_string())?;
                let manila = enumerate_manila(k, n).map_err(|e| e.to_string())?;
                for i in 0..n {
                    let want = paths_count(k, n, i);
                    let a = paths.iter().filter(|(_, rv)| *rv == i).count();
                    let b = manila.iter().filter(|m| m.index() == i as isize).count();
                    ensure(want == a.into() && want == b.into(), || format!("i={i}: {want} {a} {b}"))?;
                }
                let valid: HashSet<_> = paths.iter().map(|(w, _)| w.clone()).collect();
                let mut seen = HashSet::new();
                for m in &manila {
                    let w = mu_bijection(k, m).map_err(|e| e.to_string())?;
                    ensure(valid.contains(&w), || format!("{m} -> invalid {w}"))?;
                    ensure(w.revisits() as isize == m.index(), || format!("{m} changes index"))?;
                    ensure(seen.insert(w), || format!("{m} collides"))?;
                }
                ensure(seen.len() == paths.len(), || "not onto".into())
            })();
            report.record("bijection", "path and folder counts; mu bijective", format!("k={k} n={n}"), result);
        }
    }
}

fn diagonal(args: &VerifyArgs, report: &mut Report) {
    let order = args.order.unwrap_or(25);
    for k in ks(args, 2..=5) {
        for p in grid() {
            let f = diagonal_probabilities(k, &p, order);
            let result = (1..=order).try_for_each(|n| {
                let closed = diagonal_probability_closed(k, &p, n);
                ensure(&closed == f.coeff(n), || format!("n={n}: closed form"))?;
                ensure(diagonal_probability_from_paths(k, &p, n) == closed, || format!("n={n}: path sum"))
            });
            report.record("diagonal", "closed form = renewal = path sum", format!("k={k} N={order} p={p}"), result);
        }
    }
}

fn coincidence(args: &VerifyArgs, report: &mut Report) {
    let n = args.max_n.unwrap_or(50).max(2);
    for p in grid() {
        let result = (|| {
            let m = residue_diagonal_sum(2, n, &p).map_err(|e| e.to_string())?;
            let rr = first_return_means(2, n, &p).map_err(|e| e.to_string())?;
            ensure(m == rr, || "M != R".into())
        })();
        report.record("coincidence", "M_n = R_n for k = 2", format!("n<={n} p={p}"), result);
    }
    let result = (|| {
        let p = r(1, 2);
        let m = residue_diagonal_sum(3, 2, &p).map_err(|e| e.to_string())?;
        let rr = first_return_means(3, 2, &p).map_err(|e| e.to_string())?;
        ensure(m[1] != rr[1], || "no witness".into())
    })();
    report.record("coincidence", "M_2 != R_2 for k = 3", "p=1/2".into(), result);
}

fn asymptotics(report: &mut Report) {
    let result = (|| {
        let lam = lambda(3, &0.4f64).map_err(|e| e.to_string())?;
        let series = truncated_return_probability(3, 0.4, 400);
        ensure((lam - series).abs() < 1e-10, || format!("{lam} vs {series}"))
    })();
    report.record("asymptotics", "lambda = truncated series", "k=3 q=0.6 N=400".into(), result);

    for k in [2, 3] {
        for q in [0.1, 0.2] {
            let p = 1.0 - q;
            let result = (|| {
                let (d1, d2) = finite_difference_derivatives(k, p, 500);
                let c1 = s_derivative_at_1(k, &p).map_err(|e| e.to_string())?;
                let c2 = s_second_derivative_at_1(k, &p).map_err(|e| e.to_string())?;
                ensure((d1 - c1).abs() < 1e-6 && (d2 - c2).abs() < 1e-6, || format!("{d1} {c1} {d2} {c2}"))
            })();
            report.record("asymptotics", "derivatives = finite differences", format!("k={k} q={q}"), result);
        }
    }

    let cases: [(usize, f64, usize, f64); 3] = [(2, 0.75, 200, 1e-6), (3, 0.8, 300, 1e-6), (3, 0.4, 300, 1e-6)];
    for (k, p, n, tol) in cases {
        let result = (|| {
            let m = residue_diagonal_sum(k, n, &p).map_err(|e| e.to_string())?[n - 1];
            let est = residue_asymptotic(k, n, &p).map_err(|e| e.to_string())?;
            ensure((m - est).abs() < tol, || format!("|{m} - {est}|"))
        })();
        report.record("asymptotics", "M_n matches leading order", format!("k={k} p={p} n={n}"), result);
    }
}

fn simulator(report: &mut Report) {
    let (k, n, p) = (3usize, 10usize, r(1, 2));
    let result = (|| {
        let exact = residue_diagonal_sum(k, n, &p).map_err(|e| e.to_string())?[n - 1].to_f64();
        let sim = estimate(k, n as u64, 0.5, 20_000, 1, SimulationTarget::Residue).map_err(|e| e.to_string())?;
        ensure((sim.mean - exact).abs() < 4.0 * sim.stderr, || format!("{} vs {exact}", sim.mean))
    })();
    report.record("simulator", "sample mean near M_n", "k=3 n=10 p=0.5 trials=20000".into(), result);
}
