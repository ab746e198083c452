//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Failures are reported, not
//! fatal, unless `ACCEPTANCE_STRICT=1` is set.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shrinktarget_core::best_approx::{best_simultaneous, pell_with_radius_below, Witness};
use shrinktarget_core::construct::{
    alternating_cf, build_theta, params_from_rules, verify_construction, ARule, ConstructionState, HRule,
};
use shrinktarget_core::criteria::{lemma22_bracket, series_thm5, transfer_check, window_bound, EvalOptions};
use shrinktarget_core::orbit::{bc_window_estimate, hit_census, orbit_hits, OrbitConfig};
use shrinktarget_core::CertifiedVector;

type Q = BigRational;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn qi(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

/// `‖x‖` computed directly.
fn dist_int(x: &Q) -> Q {
    let fr = x - x.floor();
    let other = Q::one() - &fr;
    if fr < other {
        fr
    } else {
        other
    }
}

fn dist_vec(q: &BigInt, theta: &[Q]) -> Q {
    theta.iter().map(|t| dist_int(&(t * qi(q.clone())))).max().unwrap()
}

fn random_theta(rng: &mut ChaCha8Rng, d: usize) -> Vec<Q> {
    (0..d)
        .map(|_| {
            let den: i64 = rng.random_range(100_000_000..1_000_000_000);
            q(rng.random_range(1..den), den)
        })
        .collect()
}

fn exact(theta: Vec<Q>) -> CertifiedVector {
    CertifiedVector::exact(theta).unwrap()
}

/// Brute-force best simultaneous approximations of an exact vector.
fn oracle_best(theta: &[Q], q_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut best: Option<Q> = None;
    for n in 1..=q_max {
        let v = dist_vec(&BigInt::from(n), theta);
        if best.as_ref().is_none_or(|b| v < *b) {
            let zero = v.is_zero();
            best = Some(v);
            out.push(n);
            if zero {
                break;
            }
        }
    }
    out
}

fn witness_q(w: &Witness) -> BigInt {
    match w {
        Witness::Q(q) => BigInt::from(*q),
        other => panic!("unexpected witness {other:?}"),
    }
}

/// Both sides of `(q_n + q_{n+1})^{-1} <= ‖q_nθ‖ <= q_{n+1}^{-1/d}` for every
/// consecutive pair; returns the number of violations.
fn record_gap_violations(theta: &[Q], qs: &[BigInt]) -> usize {
    let d = theta.len() as i32;
    qs.windows(2)
        .filter(|w| {
            let v = dist_vec(&w[0], theta);
            let lower = Q::one() / qi(&w[0] + &w[1]) <= v;
            let upper = v.pow(d) <= Q::one() / qi(w[1].clone());
            !(lower && upper)
        })
        .count()
}

fn ac1() -> Outcome {
    let theta = pell_with_radius_below(&q(1, 10).pow(40));
    let records = best_simultaneous(&theta, 100_000).unwrap();
    let got: Vec<BigInt> = records.iter().map(|r| witness_q(&r.witness)).collect();
    let pell: Vec<BigInt> = [1u64, 2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741, 13860, 33461, 80782]
        .iter()
        .map(|&x| BigInt::from(x))
        .collect();
    let oracle: Vec<BigInt> = oracle_best(&theta.coords, 100_000).into_iter().map(BigInt::from).collect();
    let violations = record_gap_violations(&theta.coords, &got);
    outcome(
        got == pell && oracle == pell && violations == 0,
        format!("{} witnesses, oracle agrees: {}, record gap violations {violations}", got.len(), oracle == got),
    )
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut mismatches = 0;
    let mut pairs = 0;
    for i in 0..50 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let theta = random_theta(&mut rng, d);
        let records = best_simultaneous(&exact(theta.clone()), 10_000).unwrap();
        let qs: Vec<BigInt> = records.iter().map(|r| witness_q(&r.witness)).collect();
        let oracle: Vec<BigInt> = oracle_best(&theta, 10_000).into_iter().map(BigInt::from).collect();
        if qs != oracle {
            mismatches += 1;
        }
        pairs += qs.len().saturating_sub(1);
        violations += record_gap_violations(&theta, &qs);
    }
    outcome(
        violations == 0 && mismatches == 0,
        format!("{pairs} consecutive pairs, {violations} violations, {mismatches} record lists differing from brute force"),
    )
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut errors = Vec::new();
    for i in 0..200 {
        let d: i32 = if i % 2 == 0 { 2 } else { 3 };
        let theta = random_theta(&mut rng, d as usize);
        // smallest h with C h^d >= 1
        let h_min = (2..).find(|h: &i64| h.pow(d as u32) >= 2 * (d as i64 + 1)).unwrap();
        let h = rng.random_range(h_min..=500);
        match transfer_check(&exact(theta), &qi(h)) {
            Ok(r) if r.holds && r.lhs.is_exact() && r.rhs.is_exact() => {}
            Ok(_) => failures += 1,
            Err(e) => errors.push(format!("d={d} h={h}: {e}")),
        }
    }
    outcome(
        failures == 0 && errors.is_empty(),
        format!("200 cases, {failures} failing, errors {errors:?}"),
    )
}

fn bounded_construction(n_steps: usize) -> ConstructionState {
    let params = params_from_rules(&ARule::Const(33.into()), &BigInt::one(), &HRule::Geom24a, n_steps + 1).unwrap();
    build_theta(&params, n_steps).unwrap()
}

fn poly_construction(n_steps: usize) -> ConstructionState {
    let params = params_from_rules(&ARule::Poly(4), &BigInt::one(), &HRule::Geom24a, n_steps + 1).unwrap();
    build_theta(&params, n_steps).unwrap()
}

type V3 = [BigInt; 3];

fn v3(p: &shrinktarget_core::LatticePoint3) -> V3 {
    [p.x.clone(), p.y.clone(), p.z.clone()]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &V3, b: &V3) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup(a: &V3) -> BigInt {
    a.iter().map(|x| x.abs()).max().unwrap()
}

fn primitive(a: &V3) -> bool {
    a[0].gcd(&a[1]).gcd(&a[2]).is_one()
}

/// `[lo, hi]` enclosing `|c ± r|`.
fn abs_interval(c: &Q, r: &Q) -> (Q, Q) {
    let lo = (c.abs() - r).max(Q::zero());
    (lo, c.abs() + r)
}

/// Interval of `⟨Δ, (θ, 1)⟩` over the certified ball of `θ`.
fn pairing(delta: &V3, theta: &CertifiedVector) -> (Q, Q) {
    let c = qi(delta[0].clone()) * &theta.coords[0] + qi(delta[1].clone()) * &theta.coords[1] + qi(delta[2].clone());
    let r = &theta.radius * qi(delta[0].abs() + delta[1].abs());
    abs_interval(&c, &r)
}

/// Interval of `‖qθ‖` over the certified ball of `θ`.
fn dist_interval(q: &BigInt, theta: &CertifiedVector) -> (Q, Q) {
    let c = dist_vec(q, &theta.coords);
    let r = &theta.radius * qi(q.clone());
    ((&c - &r).max(Q::zero()), c + r)
}

fn structural_failures(s: &ConstructionState) -> Vec<String> {
    let mut bad = Vec::new();
    let n_max = s.steps.len() - 1;
    for (n, st) in s.steps.iter().enumerate() {
        let (d, p) = (v3(&st.delta), v3(&st.p));
        if !primitive(&d) || !primitive(&p) {
            bad.push(format!("primitivity at {n}"));
        }
        if !dot(&d, &p).is_zero() {
            bad.push(format!("incidence at {n}"));
        }
        if sup(&d) != st.h || sup(&p) != st.q {
            bad.push(format!("norms at {n}"));
        }
        let (h0, q0) = (&s.params.h0[n], s.params.q0(n));
        let two = BigInt::from(2);
        if !(h0 <= &(&two * &st.h) && st.h <= &two * h0) || !(q0 <= &two * &st.q && st.q <= &two * &q0) {
            bad.push(format!("sandwich at {n}"));
        }
        if n < n_max {
            let next = &s.steps[n + 1];
            let (d1, p1) = (v3(&next.delta), v3(&next.p));
            if cross(&d, &d1) != p {
                bad.push(format!("Δ_{n}∧Δ_{} ≠ P_{n}", n + 1));
            }
            if cross(&p, &p1) != d1 {
                bad.push(format!("P_{n}∧P_{} ≠ Δ_{}", n + 1, n + 1));
            }
            if !dot(&d, &p1).is_one() {
                bad.push(format!("⟨Δ_{n},P_{}⟩ ≠ 1", n + 1));
            }
        }
    }
    let theta_sup = s.theta.coords.iter().map(|c| c.abs()).max().unwrap() + &s.theta.radius;
    if theta_sup > q(1, 8) {
        bad.push("|θ| > 1/8".into());
    }
    bad
}

fn enclosure_failures(s: &ConstructionState) -> Vec<String> {
    let mut bad = Vec::new();
    for n in 0..s.n_steps {
        let (a, b) = (&s.steps[n], &s.steps[n + 1]);
        let scale = Q::new(b.h.clone(), &a.q * &b.q);
        let pt = [qi(a.p.x.clone()) / qi(a.p.z.clone()), qi(a.p.y.clone()) / qi(a.p.z.clone())];
        let c = pt.iter().zip(&s.theta.coords).map(|(x, t)| (x - t).abs()).max().unwrap();
        let (lo, hi) = abs_interval(&c, &s.theta.radius);
        if !(lo >= &scale / qi(2) && hi <= &scale * q(3, 2)) {
            bad.push(format!("|P̃_{n} - θ| enclosure"));
        }
        let (lo, _) = pairing(&v3(&a.delta), &s.theta);
        if lo < q(3, 4) / qi(b.q.clone()) {
            bad.push(format!("|⟨Δ_{n},θ̄⟩| lower bound"));
        }
        let (lo, hi) = dist_interval(&a.q, &s.theta);
        let unit = Q::new(b.h.clone(), b.q.clone());
        if !(lo >= &unit / qi(2) && hi <= &unit * q(3, 2)) {
            bad.push(format!("‖q_{n}θ‖ enclosure"));
        }
    }
    bad
}

fn ac4() -> Outcome {
    let s = bounded_construction(6);
    let mut bad = structural_failures(&s);
    bad.extend(enclosure_failures(&s));
    let report = verify_construction(&s, 2).unwrap();
    let scans = report.checks.iter().filter(|c| c.name == "lemma42_scan").count();
    bad.extend(report.failures().iter().map(|c| format!("{} {:?}: {}", c.name, c.index, c.detail)));
    outcome(
        bad.is_empty() && scans == 2,
        format!(
            "{} library checks, {scans} exhaustive scans, exceptions {:?}, failures {bad:?}",
            report.checks.len(),
            report.exceptions.iter().map(|e| (e.n, format!("{:?}", e.verdict))).collect::<Vec<_>>()
        ),
    )
}

fn ac5() -> Outcome {
    let s = bounded_construction(6);
    let (lo_b, hi_b) = (q(3, 32 * 33), q(10, 33));
    let mut bad = Vec::new();
    for n in 0..s.n_steps {
        let h2 = qi(&s.steps[n + 1].h * &s.steps[n + 1].h);
        let (lo, hi) = pairing(&v3(&s.steps[n].delta), &s.theta);
        if !(&h2 * lo >= lo_b && &h2 * hi <= hi_b) {
            bad.push(n);
        }
    }
    outcome(bad.is_empty(), format!("indices 0..{} checked, outside the bracket: {bad:?}", s.n_steps))
}

fn ac6() -> Outcome {
    let s = poly_construction(50);
    let xs = s.deltas_2d();
    let report = series_thm5(&s.theta, &xs, 51).unwrap();
    // term n is at most (10 / a_{n+1})^{1/3} with a_{n+1} = (n + 4)^4
    let bound = 10f64.cbrt() * (3..=54).map(|m: i32| (m as f64).powf(-4.0 / 3.0)).sum::<f64>();
    let top = report.total().hi().to_f64().unwrap();
    let tail = report.window_sum(40, 50, 64).hi().to_f64().unwrap();
    outcome(
        top < bound * (1.0 - 1e-9) && tail < 0.05,
        format!("partial sum {top:.5} vs bound {bound:.5}; tail over 40..=50 is {tail:.5} (threshold 0.05)"),
    )
}

fn ac7() -> Outcome {
    let spec = alternating_cf(2, &qi(4), 10, 2).unwrap();
    let den = &spec.denominators;
    let mut bad = Vec::new();
    for (i, qs) in den.iter().enumerate() {
        for n in 2..qs.len() {
            if qs[n] != &spec.quotients[i][n - 1] * &qs[n - 1] + &qs[n - 2] {
                bad.push(format!("recursion q_{},{n}", i + 1));
            }
        }
    }
    for n in 2..=10usize {
        let n4 = BigInt::from(n).pow(4);
        if den[1][n] < &den[0][n] * &den[0][n] * &n4 {
            bad.push(format!("q_2,{n} < q_1,{n}^2 n^4"));
        }
        if den[0][n + 1] < &den[1][n] * &den[1][n] * &n4 {
            bad.push(format!("q_1,{} < q_2,{n}^2 n^4", n + 1));
        }
    }
    outcome(
        bad.is_empty(),
        format!("q_2,10 has {} bits, violations {bad:?}", den[1][10].bits()),
    )
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = EvalOptions { root_bits: 48, ..EvalOptions::default() };
    let mut bad = Vec::new();
    for i in 0..20 {
        let d = 1 + i % 2;
        let theta = exact(random_theta(&mut rng, d));
        match lemma22_bracket(&theta, 8, opts) {
            Ok(r) => {
                let certain = r.lower.hi() <= r.s_iv.lo() && r.s_iv.hi() <= r.upper.lo();
                if !(r.lower_holds && r.upper_holds && certain) {
                    bad.push(format!("case {i}"));
                }
            }
            Err(e) => bad.push(format!("case {i}: {e}")),
        }
    }
    outcome(bad.is_empty(), format!("20 cases at M = 8, failing {bad:?}"))
}

struct Fixture {
    theta: Vec<Q>,
    x0: Vec<Q>,
    delta: Q,
    n: u128,
}

fn fixtures() -> Vec<Fixture> {
    let f = |theta: &[(i64, i64)], x0: &[(i64, i64)], delta: Q, n: u128| Fixture {
        theta: theta.iter().map(|&(a, b)| q(a, b)).collect(),
        x0: x0.iter().map(|&(a, b)| q(a, b)).collect(),
        delta,
        n,
    };
    vec![
        f(&[(1, 4)], &[(0, 1)], qi(1), 8),
        f(&[(3, 8)], &[(1, 16)], qi(1), 1000),
        f(&[(1, 3)], &[(0, 1)], qi(1), 999),
        f(&[(5, 13)], &[(1, 7)], qi(2), 1000),
        f(&[(21, 34)], &[(0, 1)], q(3, 2), 1000),
        f(&[(1, 4), (1, 2)], &[(0, 1), (0, 1)], qi(2), 100),
        f(&[(3, 8), (5, 16)], &[(1, 32), (1, 64)], qi(2), 1000),
        f(&[(1, 3), (2, 7)], &[(0, 1), (0, 1)], qi(2), 1000),
        f(&[(5, 12), (70, 169)], &[(0, 1), (0, 1)], qi(3), 1000),
        f(&[(13, 64), (29, 128)], &[(1, 3), (1, 5)], q(5, 2), 1000),
    ]
}

/// Exact hit indices: `‖x_0 + nθ‖^a n^b <= 1` for `δ = a/b`.
fn exact_hits(fx: &Fixture) -> Vec<u128> {
    let a = fx.delta.numer().to_i32().unwrap();
    let b = fx.delta.denom().to_u32().unwrap();
    (1..=fx.n)
        .filter(|&n| {
            let x: Vec<Q> = fx.x0.iter().zip(&fx.theta).map(|(x, t)| x + t * qi(n)).collect();
            let dist = x.iter().map(dist_int).max().unwrap();
            dist.pow(a) * qi(BigInt::from(n).pow(b)) <= Q::one()
        })
        .collect()
}

fn ac9() -> Outcome {
    let mut bad = Vec::new();
    let mut inconclusive = 0;
    let mut tested = 0;
    for (i, fx) in fixtures().iter().enumerate() {
        let config = OrbitConfig::new(exact(fx.theta.clone()), fx.delta.clone(), fx.n);
        let rec = orbit_hits(&config, &fx.x0).unwrap();
        inconclusive += rec.inconclusive;
        tested += rec.tested;
        if rec.hits != exact_hits(fx) {
            bad.push(i);
        }
    }
    outcome(
        bad.is_empty() && inconclusive == 0,
        format!("10 fixtures, {tested} steps, {inconclusive} inconclusive, disagreeing fixtures {bad:?}"),
    )
}

fn ac10() -> Outcome {
    let theta = pell_with_radius_below(&q(1, 10).pow(40));
    let mut config = OrbitConfig::new(theta, qi(1), 100_000);
    config.samples = 50;
    config.seed = 10;
    let census = hit_census(&config).unwrap();
    let stats: Vec<_> = census.records.iter().map(|r| r.stat.clone().unwrap()).collect();
    let ordered = stats.iter().all(|s| s.lo <= s.hi);
    let above = stats.iter().filter(|s| s.hi >= q(4, 5)).count();
    let exceed = stats.iter().filter(|s| s.hi > q(3, 2)).count();
    let mut argmax: Vec<u128> = stats.iter().map(|s| s.argmax).collect();
    argmax.sort();
    outcome(
        ordered && above * 10 >= 9 * stats.len() && exceed * 10 <= stats.len(),
        format!(
            "{above}/50 with upper enclosure >= 0.8, {exceed}/50 above 1.5, median argmax n = {}",
            argmax[argmax.len() / 2]
        ),
    )
}

/// Indices scanned per window; the windows start near 1.5e8, 1e16 and 3.9e24.
const WINDOW_SCAN: u128 = 10_000;

fn ac11() -> Outcome {
    let s = poly_construction(8);
    let xs = s.deltas_2d();
    let delta = qi(2);
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let wb = window_bound(&s.theta, &xs, &delta, n, 64).unwrap();
        let (lo, hi) = wb.integer_window();
        let lo = lo.to_u128().unwrap();
        let hi = hi.to_u128().unwrap_or(u128::MAX);
        let mut config = OrbitConfig::new(s.theta.clone(), delta.clone(), lo + WINDOW_SCAN - 1);
        config.precision_bits = 256;
        config.samples = 10_000;
        config.seed = 11;
        let est = match bc_window_estimate(&config, (lo, hi)) {
            Ok(e) => e,
            Err(e) => {
                ok = false;
                lines.push(format!("window {n}: {e}"));
                continue;
            }
        };
        let holds = est.fraction <= wb.bound.lo() + &est.confidence_radius;
        ok &= holds && est.inconclusive == 0;
        lines.push(format!(
            "window {n} [{lo:.3e}, {:.3e}): {} hits, estimate {:.3e} vs bound {:.3e}",
            hi as f64,
            est.hits,
            est.fraction.to_f64().unwrap(),
            wb.bound.value.to_f64().unwrap(),
            lo = lo as f64
        ));
    }
    outcome(ok, lines.join("; "))
}

fn census_mean(theta: &CertifiedVector) -> (f64, u64) {
    let mut config = OrbitConfig::new(theta.clone(), qi(2), 1_000_000);
    config.n_lo = 1000;
    config.samples = 100;
    config.seed = 12;
    let census = hit_census(&config).unwrap();
    (census.mean.to_f64().unwrap(), census.inconclusive)
}

fn ac12() -> Outcome {
    let (bounded, inc_b) = census_mean(&bounded_construction(10).theta);
    let (poly, inc_p) = census_mean(&poly_construction(10).theta);
    outcome(
        bounded >= 5.0 * poly,
        format!("mean hits: a_n = 33 gives {bounded:.3}, a_n = n^4 gives {poly:.3}; inconclusive {inc_b} and {inc_p}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 12] = [
        ("AC1 pell_sequence", ac1, Some(5)),
        ("AC2 record_property_suite", ac2, Some(120)),
        ("AC3 transfer_inequality", ac3, Some(300)),
        ("AC4 construction_soundness", ac4, Some(120)),
        ("AC5 bracket", ac5, None),
        ("AC6 counterexample_series", ac6, None),
        ("AC7 alternating_cf", ac7, None),
        ("AC8 lemma22_bracket", ac8, None),
        ("AC9 oracle_equivalence", ac9, None),
        ("AC10 log_law", ac10, Some(180)),
        ("AC11 window_bound", ac11, Some(300)),
        ("AC12 hit_census", ac12, Some(600)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|s| took <= Duration::from_secs(s));
        let passed = out.passed && in_time;
        if !passed {
            failed += 1;
        }
        let timing = match limit {
            Some(s) => format!("{:.1}s of {s}s", took.as_secs_f64()),
            None => format!("{:.1}s", took.as_secs_f64()),
        };
        println!("{} {name} ({timing}): {}", if passed { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {failed} failing");
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
