//! Command bodies. Library errors during a computation become failed cases;
//! an `Err` here is a usage problem and maps to exit code 2.

use num_complex::Complex64;
use opx_core::moments::{max_off_diagonal, orthogonality_residual};
use opx_core::ratios::{self, chain_params, family_chain_sequence, kernel_ratio_limit};
use opx_core::transforms::{
    max_recovery_deviation, recover_christoffel, recover_geronimus, recover_uvarov, RecoveryCoefficients,
};
use opx_core::verify::{run_suite, CaseResult, Shifts, SuiteConfig};
use opx_core::{eval_sequence, FamilySpec, FamilyKind, FunctionalKind, KernelContext, OpxError, Support};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Case, Cell, Table};
use crate::RunConfig;

pub type Outcome = Result<(Vec<Case>, Option<Table>), String>;

fn case(r: CaseResult) -> Case {
    Case::from(&r)
}

fn attempt(name: &str, f: impl FnOnce() -> opx_core::Result<CaseResult>) -> Case {
    case(f().unwrap_or_else(|e| CaseResult::failed(name, &e)))
}

fn sample_range(family: &FamilySpec) -> (f64, f64) {
    match family.support() {
        Support::Interval(a, b) => (a, b),
        Support::HalfLine(a) => (a, a + 10.0),
        Support::RealLine => (-3.0, 3.0),
    }
}

/// The given points, or five interior points of the sample range.
fn points_or_grid(cfg: &RunConfig) -> Vec<f64> {
    if !cfg.points.is_empty() {
        return cfg.points.clone();
    }
    let (a, b) = sample_range(&cfg.family);
    (0..5).map(|i| a + (b - a) * (i as f64 + 0.5) / 5.0).collect()
}

fn inside_support(family: &FamilySpec, k: f64) -> bool {
    match family.support() {
        Support::Interval(a, b) => a < k && k < b,
        Support::HalfLine(a) => k > a,
        Support::RealLine => true,
    }
}

fn real_shift(z: Complex64) -> Result<f64, String> {
    if z.im != 0.0 {
        return Err(format!("shift {z} must be real for this command"));
    }
    Ok(z.re)
}

fn fmt_point(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        z.to_string()
    }
}

pub fn eval(cfg: &RunConfig) -> Outcome {
    let n = cfg.n_max;
    let xs = points_or_grid(cfg);
    let mut table = Table::new(&["x", "n", "value", "derivative"]);
    let mut worst: f64 = 0.0;
    for &x in &xs {
        let seq = eval_sequence(&cfg.family, n + 1, x, true);
        let d = seq.derivs.as_ref().expect("derivatives requested");
        for j in 0..=n {
            table.push(vec![Cell::Num(x), Cell::Int(j as i64), Cell::Num(seq.values[j]), Cell::Num(d[j])]);
            let (c, l) = cfg.family.coeff(j + 1);
            let prev = if j == 0 { 0.0 } else { seq.values[j - 1] };
            let terms = [x * seq.values[j], seq.values[j + 1], c * seq.values[j], l * prev];
            let r = terms[0] - terms[1] - terms[2] - if j == 0 { 0.0 } else { terms[3] };
            let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            worst = worst.max(if r.is_nan() { f64::INFINITY } else { r.abs() / scale });
        }
    }
    let cases = vec![case(CaseResult::check("three_term_recurrence", worst, cfg.tol(1e-12)))];
    Ok((cases, Some(table)))
}

pub fn kernel(cfg: &RunConfig) -> Outcome {
    let n = cfg.n_max;
    let xs = points_or_grid(cfg);
    let shifts: Vec<Complex64> = if cfg.shifts.is_empty() {
        Shifts::for_family(&cfg.family).kernel.into_iter().map(|k| Complex64::new(k, 0.0)).collect()
    } else {
        cfg.shifts.clone()
    };
    let mut table = Table::new(&["shift", "n", "x", "value_re", "value_im"]);
    let mut cases = Vec::new();
    for &k in &shifts {
        let tag = fmt_point(k);
        let ctx = match KernelContext::<Complex64>::from_family(&cfg.family, k, n + 1) {
            Ok(c) => c,
            Err(e) => {
                cases.push(case(CaseResult::failed(format!("kernel_context/k={tag}"), &e)));
                continue;
            }
        };
        for &x in &xs {
            for j in 0..=n {
                let v = ctx.kernel_poly(j, Complex64::new(x, 0.0));
                table.push(vec![Cell::Text(tag.clone()), Cell::Int(j as i64), Cell::Num(x), Cell::Num(v.re), Cell::Num(v.im)]);
            }
        }
        let name = format!("kernel_recurrence/k={tag}");
        cases.push(attempt(&name, || {
            let star = ctx.kernel_table(n)?;
            let mut worst: f64 = 0.0;
            for &x in &xs {
                let z = Complex64::new(x, 0.0);
                let vals = star.eval(n, z);
                for (j, v) in vals.iter().enumerate() {
                    let direct = ctx.kernel_poly(j, z);
                    worst = worst.max((v - direct).norm() / direct.norm().max(1.0));
                }
            }
            Ok(CaseResult::check(&name, worst, cfg.tol(1e-9)))
        }));
        if k.im == 0.0 && !inside_support(&cfg.family, k.re) {
            let name = format!("kernel_orthogonality/k={tag}");
            cases.push(attempt(&name, || {
                let real = KernelContext::<f64>::from_family(&cfg.family, k.re, n + 1)?;
                let g = orthogonality_residual(
                    &cfg.family,
                    FunctionalKind::Christoffel { k: k.re },
                    |j, x| real.kernel_poly(j, x),
                    n,
                )?;
                Ok(CaseResult::check(&name, max_off_diagonal(&g), cfg.tol(1e-9)))
            }));
        }
    }
    Ok((cases, Some(table)))
}

fn coefficient_rows(table: &mut Table, label: &str, co: &RecoveryCoefficients<f64>) {
    let len = [&co.alpha, &co.beta, &co.gamma, &co.eta].iter().map(|v| v.len()).max().unwrap_or(0);
    let cell = |v: &Vec<f64>, i: usize| match v.get(i) {
        Some(x) if !x.is_nan() => Cell::Num(*x),
        _ => Cell::Missing,
    };
    for i in 0..len {
        table.push(vec![
            Cell::Text(label.to_string()),
            Cell::Int(i as i64),
            cell(&co.alpha, i),
            cell(&co.beta, i),
            cell(&co.gamma, i),
            cell(&co.eta, i),
        ]);
    }
}

pub fn recover(cfg: &RunConfig) -> Outcome {
    let fam = &cfg.family;
    let n = cfg.n_max;
    let defaults = Shifts::for_family(fam);
    let pair = match cfg.shifts.as_slice() {
        [] => None,
        [a, b] => Some((real_shift(*a)?, real_shift(*b)?)),
        _ => return Err("recover takes either no --shift or exactly two (k1, k2)".into()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = sample_range(fam);
    let xs: Vec<f64> = if cfg.points.is_empty() {
        (0..50).map(|_| rng.gen_range(lo..hi)).collect()
    } else {
        cfg.points.clone()
    };
    let mut coeffs = || -> Vec<f64> { (0..n).map(|_| rng.gen_range(0.5..1.5)).collect() };
    let tol = cfg.tol(1e-7);
    let mut table = Table::new(&["construction", "index", "alpha", "beta", "gamma", "eta"]);
    let mut cases = Vec::new();

    let (k1, k2) = pair.unwrap_or(defaults.christoffel);
    let b = coeffs();
    let name = format!("christoffel/k1={k1},k2={k2}");
    cases.push(attempt(&name, || {
        let rec = recover_christoffel(fam, k1, k2, &b, n)?;
        coefficient_rows(&mut table, "christoffel", &rec.coeffs);
        Ok(CaseResult::check(&name, max_recovery_deviation(&rec, &xs)?, tol))
    }));

    match pair.or(defaults.geronimus) {
        Some((g1, g2)) => {
            let bt = coeffs();
            let name = format!("geronimus/k1={g1},k2={g2}");
            cases.push(attempt(&name, || {
                let rec = recover_geronimus(fam, g1, g2, &bt, n)?;
                coefficient_rows(&mut table, "geronimus", &rec.coeffs);
                Ok(CaseResult::check(&name, max_recovery_deviation(&rec, &xs)?, tol))
            }));
        }
        None => cases.push(case(CaseResult::info("geronimus", f64::NAN, "no real shift outside the support"))),
    }

    let (u1, u2) = pair.unwrap_or(defaults.uvarov);
    let bt = coeffs();
    let name = format!("uvarov/k1={u1},k2={u2},r0={}", cfg.r0);
    cases.push(attempt(&name, || {
        let rec = recover_uvarov(fam, u1, u2, cfg.r0, &bt, n)?;
        coefficient_rows(&mut table, "uvarov", &rec.coeffs);
        Ok(CaseResult::check(&name, max_recovery_deviation(&rec, &xs)?, tol))
    }));
    Ok((cases, Some(table)))
}

pub fn ratio(cfg: &RunConfig) -> Outcome {
    let fam = &cfg.family;
    let n = cfg.n_max;
    let k = match cfg.shifts.as_slice() {
        [] => Shifts::for_family(fam).kernel[0],
        [z] => real_shift(*z)?,
        _ => return Err("ratio takes a single --shift".into()),
    };
    let chebyshev_at_one = fam.kind() == FamilyKind::Chebyshev1 && k == 1.0;
    let mut table = Table::new(&["n", "r_up", "closed_form", "abs_diff"]);
    let mut cases = Vec::new();
    let ctx = match KernelContext::<f64>::from_family(fam, k, n + 2) {
        Ok(c) => c,
        Err(e) => {
            cases.push(case(CaseResult::failed(format!("ratio_limit/k={k}"), &e)));
            return Ok((cases, Some(table)));
        }
    };
    let mut reciprocal: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut published: f64 = 0.0;
    let mut exact: f64 = 0.0;
    let mut failure: Option<OpxError> = None;
    for j in 1..=n {
        let (up, down) = match kernel_ratio_limit(&ctx, j) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let closed = chebyshev_at_one.then(|| ratios::chebyshev_ratio_published(j));
        let diff = closed.map(|c| (up - c).abs());
        table.push(vec![
            Cell::Int(j as i64),
            Cell::Num(up),
            closed.map_or(Cell::Missing, Cell::Num),
            diff.map_or(Cell::Missing, Cell::Num),
        ]);
        reciprocal = reciprocal.max((up * down - 1.0).abs());
        let direct = ctx.kernel_poly_sum(j + 1, k) / ctx.kernel_poly_sum(j, k);
        cross = cross.max((up - direct).abs() / direct.abs());
        if let Some(d) = diff {
            published = published.max(d);
            let e = ratios::chebyshev_ratio_exact(j);
            exact = exact.max((up - e).abs() / e);
        }
    }
    if let Some(e) = failure {
        cases.push(case(CaseResult::failed(format!("ratio_limit/k={k}"), &e)));
    }
    cases.push(case(CaseResult::check(format!("reciprocal/k={k}"), reciprocal, cfg.tol(1e-12))));
    cases.push(case(CaseResult::check(format!("cd_sum_cross_check/k={k}"), cross, cfg.tol(1e-9))));
    if chebyshev_at_one {
        cases.push(case(CaseResult::check("chebyshev_exact_form", exact, cfg.tol(1e-12))));
        cases.push(case(CaseResult::info(
            "chebyshev_published_form",
            published,
            "max |r_up - (1 + 4/(2n+1))/2|; recorded only",
        )));
    }
    Ok((cases, Some(table)))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let mut sc = SuiteConfig::new(cfg.family.clone());
    sc.n_max = cfg.n_max;
    sc.tol = cfg.tol;
    sc.seed = cfg.seed;
    sc.mass0 = cfg.mass0;
    sc.r0 = cfg.r0;
    sc.depth = cfg.depth;
    if !cfg.shifts.is_empty() {
        sc.shifts.kernel = cfg.shifts.iter().map(|z| real_shift(*z)).collect::<Result<_, _>>()?;
    }
    let rep = run_suite(cfg.suite, &sc);
    Ok((rep.cases.iter().map(Case::from).collect(), None))
}

pub fn chain(cfg: &RunConfig) -> Outcome {
    let n = cfg.n_max;
    let l = if cfg.l.is_empty() { family_chain_sequence(&cfg.family, n) } else { cfg.l.clone() };
    if l.len() < n {
        return Err(format!("--l has {} terms but --n-max is {n}", l.len()));
    }
    let mut table = Table::new(&["n", "l", "m", "complementary", "complementary_m"]);
    let seq = match chain_params(&l, n) {
        Ok(s) => s,
        Err(e) => return Ok((vec![case(CaseResult::failed("chain_params", &e))], Some(table))),
    };
    let mut worst: f64 = 0.0;
    for j in 1..=n {
        let cm = seq.complementary_m.as_ref().map_or(Cell::Missing, |v| Cell::Num(v[j]));
        table.push(vec![
            Cell::Int(j as i64),
            Cell::Num(seq.l[j - 1]),
            Cell::Num(seq.m[j]),
            Cell::Num(seq.complementary[j - 1]),
            cm,
        ]);
        let r = (seq.m[j] * (1.0 - seq.m[j - 1]) - seq.l[j - 1]).abs();
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r / seq.l[j - 1].abs().max(1.0) });
    }
    let verdict = |b: Option<bool>| match b {
        Some(true) => 1.0,
        Some(false) => 0.0,
        None => f64::NAN,
    };
    let cases = vec![
        case(CaseResult::check("minimal_parameter_recurrence", worst, cfg.tol(1e-14))),
        case(CaseResult::info("positive_chain_sequence", verdict(Some(seq.positive)), "1 when every m_n lies in (0, 1)")),
        case(CaseResult::info(
            "complementary_positive",
            verdict(seq.complementary_positive),
            "1 when every complementary parameter lies in (0, 1); null on breakdown",
        )),
    ];
    Ok((cases, Some(table)))
}
