//! Series criteria, the transfer inequality, window bounds and Diophantine
//! type evidence.
//!
//! Reports are descriptive: they carry finitely many certified terms and
//! partial sums and never claim convergence of the infinite series.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::best_approx::{
    best_linear_with, best_simultaneous_with, eps_l_with, eps_s_with, value_at, ApproxKind,
    ApproxRecord, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::exact::{certified_dist_nearest_lattice, certified_linear_form, CertifiedScalar, CertifiedVector, ExactRational};
use crate::roots::{pow_certified, pow_exact, DEFAULT_ROOT_BITS};

pub const DESCRIPTIVE_VERDICT: &str = "partial sums up to N; no convergence claim";

/// Evaluation knobs shared by the criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Relative tolerance exponent of certified roots.
    pub root_bits: u32,
    pub budget: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            root_bits: DEFAULT_ROOT_BITS,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub n: u64,
    pub value: CertifiedScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub label: String,
    pub terms: Vec<SeriesTerm>,
    pub partial_sums: Vec<CertifiedScalar>,
    /// Sum of the terms whose index is at least 4/5 of the last index.
    pub tail_estimate: CertifiedScalar,
    pub verdict: String,
}

impl SeriesReport {
    pub fn from_terms(label: &str, terms: Vec<SeriesTerm>, bits: u32) -> SeriesReport {
        let mut partial_sums = Vec::with_capacity(terms.len());
        let mut acc = CertifiedScalar::exact(BigRational::zero());
        for t in &terms {
            acc = acc.add(&t.value.round_dyadic(bits + 8));
            partial_sums.push(acc.clone());
        }
        let mut report = SeriesReport {
            label: label.to_string(),
            terms,
            partial_sums,
            tail_estimate: CertifiedScalar::exact(BigRational::zero()),
            verdict: DESCRIPTIVE_VERDICT.to_string(),
        };
        if let Some(last) = report.terms.last().map(|t| t.n) {
            report.tail_estimate = report.window_sum(last * 4 / 5, last, bits);
        }
        report
    }

    /// Certified sum of the terms with `lo <= n <= hi`.
    pub fn window_sum(&self, lo: u64, hi: u64, bits: u32) -> CertifiedScalar {
        self.terms
            .iter()
            .filter(|t| lo <= t.n && t.n <= hi)
            .fold(CertifiedScalar::exact(BigRational::zero()), |acc, t| {
                acc.add(&t.value.round_dyadic(bits + 8))
            })
    }

    pub fn total(&self) -> CertifiedScalar {
        self.partial_sums
            .last()
            .cloned()
            .unwrap_or_else(|| CertifiedScalar::exact(BigRational::zero()))
    }
}

fn big(x: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(x.into())
}

fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// Interval power with a non-negative integer exponent.
fn powi(x: &CertifiedScalar, k: u32) -> CertifiedScalar {
    let lo = x.lo().max(BigRational::zero());
    CertifiedScalar::from_bounds(lo.pow(k as i32), x.hi().pow(k as i32))
}

fn nonzero(eps: &CertifiedScalar, what: impl FnOnce() -> String) -> Result<()> {
    if eps.is_exact() && eps.value.is_zero() {
        return Err(Error::Degenerate(format!("{} is 0 (rational relation)", what())));
    }
    Ok(())
}

/// Term `(|X_{n+1}|^d ε_n)^{1/(d+1)}` with `ε_n = ‖⟨X_n, θ⟩‖`.
pub fn thm5_term(theta: &CertifiedVector, x_n: &[BigInt], x_next: &[BigInt], bits: u32) -> Result<CertifiedScalar> {
    let d = theta.dim() as u32;
    let eps = certified_linear_form(x_n, theta)?;
    let base = eps.scale(&big(sup_norm(x_next).pow(d)));
    pow_certified(&base, &BigRational::new(BigInt::one(), BigInt::from(d + 1)), bits)
}

pub fn series_thm5(theta: &CertifiedVector, x_seq: &[Vec<BigInt>], n_terms: usize) -> Result<SeriesReport> {
    series_thm5_with(theta, x_seq, n_terms, EvalOptions::default())
}

pub fn series_thm5_with(
    theta: &CertifiedVector,
    x_seq: &[Vec<BigInt>],
    n_terms: usize,
    opts: EvalOptions,
) -> Result<SeriesReport> {
    if n_terms > 0 && x_seq.len() < n_terms + 1 {
        return Err(Error::domain(format!(
            "{n_terms} terms need {} vectors, got {}",
            n_terms + 1,
            x_seq.len()
        )));
    }
    let used = &x_seq[..if n_terms == 0 { 0 } else { n_terms + 1 }];
    for (i, w) in used.windows(2).enumerate() {
        if sup_norm(&w[1]) <= sup_norm(&w[0]) || sup_norm(&w[0]).is_zero() {
            return Err(Error::domain(format!(
                "norms must increase strictly: |X_{}| = {}, |X_{}| = {}",
                i,
                sup_norm(&w[0]),
                i + 1,
                sup_norm(&w[1])
            )));
        }
    }
    let mut terms = Vec::with_capacity(n_terms);
    for (i, w) in used.windows(2).enumerate() {
        let eps = certified_linear_form(&w[0], theta)?;
        nonzero(&eps, || format!("‖⟨X_{i}, θ⟩‖"))?;
        terms.push(SeriesTerm {
            n: i as u64,
            value: thm5_term(theta, &w[0], &w[1], opts.root_bits)?,
        });
    }
    Ok(SeriesReport::from_terms("thm5", terms, opts.root_bits))
}

fn check_delta(delta: &ExactRational) -> Result<(u32, u32)> {
    if *delta < BigRational::one() {
        return Err(Error::domain(format!("δ = {delta} must be at least 1")));
    }
    match (delta.numer().to_u32(), delta.denom().to_u32()) {
        (Some(a), Some(b)) if a.checked_add(b).is_some() => Ok((a, b)),
        _ => Err(Error::domain(format!("δ = {delta} has too large a numerator or denominator"))),
    }
}

/// `k^{-1} (k^δ ε)^{1/(δ+1)}` with `δ = a/b`, i.e. `k^{-1} (k^a ε^b)^{1/(a+b)}`.
fn lemma22_term(k: u64, eps: &CertifiedScalar, a: u32, b: u32, bits: u32) -> Result<CertifiedScalar> {
    let inner = powi(eps, b).scale(&big(BigInt::from(k).pow(a)));
    let root = pow_certified(&inner, &BigRational::new(BigInt::one(), BigInt::from(a + b)), bits)?;
    Ok(root.scale(&BigRational::new(BigInt::one(), BigInt::from(k))))
}

pub fn series_lemma22(theta: &CertifiedVector, k_max: u64, delta: &ExactRational) -> Result<SeriesReport> {
    series_lemma22_with(theta, k_max, delta, EvalOptions::default())
}

/// Terms for `k = 1..=K`. `ε_l` comes from one scan of best linear
/// approximations and is read off as a step function.
pub fn series_lemma22_with(
    theta: &CertifiedVector,
    k_max: u64,
    delta: &ExactRational,
    opts: EvalOptions,
) -> Result<SeriesReport> {
    let (a, b) = check_delta(delta)?;
    if k_max == 0 {
        return Err(Error::domain("K must be at least 1"));
    }
    let records = best_linear_with(theta, k_max, opts.budget)?;
    let terms = (1..=k_max)
        .map(|k| {
            let eps = value_at(&records, k).expect("record at height 1");
            Ok(SeriesTerm {
                n: k,
                value: lemma22_term(k, eps, a, b, opts.root_bits)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesReport::from_terms("lemma22_iv", terms, opts.root_bits))
}

/// `(2^{nd} ε)^{1/(d+1)}`.
fn dyadic_term(n: u32, d: u32, eps: &CertifiedScalar, bits: u32) -> Result<CertifiedScalar> {
    let base = eps.scale(&big(BigInt::one() << (n * d)));
    pow_certified(&base, &BigRational::new(BigInt::one(), BigInt::from(d + 1)), bits)
}

pub fn dyadic_condition_iii(theta: &CertifiedVector, n_terms: u32) -> Result<SeriesReport> {
    dyadic_condition_iii_with(theta, n_terms, EvalOptions::default())
}

/// Terms `(2^{nd} ε_l(2^n))^{1/(d+1)}` for `n = 0..N`.
pub fn dyadic_condition_iii_with(theta: &CertifiedVector, n_terms: u32, opts: EvalOptions) -> Result<SeriesReport> {
    if n_terms == 0 {
        return Ok(SeriesReport::from_terms("lemma22_iii", vec![], opts.root_bits));
    }
    if n_terms > 63 {
        return Err(Error::resource(format!("2^{} exceeds any scan budget", n_terms - 1)));
    }
    let d = theta.dim() as u32;
    let records = best_linear_with(theta, 1u64 << (n_terms - 1), opts.budget)?;
    let terms = (0..n_terms)
        .map(|n| {
            let eps = value_at(&records, 1u64 << n).expect("record at height 1");
            Ok(SeriesTerm {
                n: n as u64,
                value: dyadic_term(n, d, eps, opts.root_bits)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesReport::from_terms("lemma22_iii", terms, opts.root_bits))
}

pub fn series_prop32(theta: &CertifiedVector, q_seq: &[BigInt], n_terms: usize) -> Result<SeriesReport> {
    series_prop32_with(theta, q_seq, n_terms, EvalOptions::default())
}

/// Terms `(q_n^{1/d} ‖q_{n-1} θ‖)^{1/(d+1)}` for `n = 1..=N`.
pub fn series_prop32_with(
    theta: &CertifiedVector,
    q_seq: &[BigInt],
    n_terms: usize,
    opts: EvalOptions,
) -> Result<SeriesReport> {
    for (i, w) in q_seq.windows(2).enumerate() {
        if w[1] <= w[0] || !w[0].is_positive() {
            return Err(Error::domain(format!(
                "q sequence must be positive and strictly increasing: q_{i} = {}, q_{} = {}",
                w[0],
                i + 1,
                w[1]
            )));
        }
    }
    if n_terms > 0 && q_seq.len() < n_terms + 1 {
        return Err(Error::domain(format!(
            "{n_terms} terms need {} integers, got {}",
            n_terms + 1,
            q_seq.len()
        )));
    }
    let d = theta.dim() as u32;
    let exp = BigRational::new(BigInt::one(), BigInt::from(d * (d + 1)));
    let mut terms = Vec::with_capacity(n_terms);
    for n in 1..=n_terms {
        let dist = certified_dist_nearest_lattice(&q_seq[n - 1], theta)?;
        // (q_n ‖q_{n-1}θ‖^d)^{1/(d(d+1))}
        let base = powi(&dist, d).scale(&big(q_seq[n].clone()));
        terms.push(SeriesTerm {
            n: n as u64,
            value: pow_certified(&base, &exp, opts.root_bits)?,
        });
    }
    Ok(SeriesReport::from_terms("prop32", terms, opts.root_bits))
}

/// Finite form of the equivalence between the dyadic series and the
/// `k^{-1}` series, on `k = 1..=2^M - 1`:
/// `2^{-(1+d/(d+1))} Σ_{n=1}^{M} T_n <= S_iv <= 2^{d/(d+1)} Σ_{n=0}^{M-1} T_n`
/// with `T_n = (2^{nd} ε_l(2^n))^{1/(d+1)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketReport {
    pub m: u32,
    pub lower: CertifiedScalar,
    pub s_iv: CertifiedScalar,
    pub upper: CertifiedScalar,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn lemma22_bracket(theta: &CertifiedVector, m: u32, opts: EvalOptions) -> Result<BracketReport> {
    if m == 0 || m > 40 {
        return Err(Error::domain(format!("bracket depth M = {m} outside 1..=40")));
    }
    let d = theta.dim() as u32;
    let bits = opts.root_bits;
    let records = best_linear_with(theta, 1u64 << m, opts.budget)?;
    let eps = |h: u64| value_at(&records, h).expect("record at height 1");

    let mut s_iv = CertifiedScalar::exact(BigRational::zero());
    for k in 1..(1u64 << m) {
        s_iv = s_iv.add(&lemma22_term(k, eps(k), d, 1, bits)?.round_dyadic(bits + 8));
    }
    let mut t = Vec::with_capacity(m as usize + 1);
    for n in 0..=m {
        t.push(dyadic_term(n, d, eps(1u64 << n), bits)?.round_dyadic(bits + 8));
    }
    let sum = |range: std::ops::RangeInclusive<usize>| {
        t[range]
            .iter()
            .fold(CertifiedScalar::exact(BigRational::zero()), |acc, x| acc.add(x))
    };
    let d_over = BigRational::new(BigInt::from(d), BigInt::from(d + 1));
    let two = big(2);
    let c_up = pow_exact(&two, &d_over, bits)?;
    let c_lo = pow_exact(&two, &-(BigRational::one() + &d_over), bits)?;
    let lower = c_lo.mul(&sum(1..=m as usize));
    let upper = c_up.mul(&sum(0..=m as usize - 1));
    let decide = |a: &CertifiedScalar, b: &CertifiedScalar, what: &str| -> Result<bool> {
        if a.hi() <= b.lo() {
            Ok(true)
        } else if a.lo() > b.hi() {
            Ok(false)
        } else {
            Err(Error::precision(format!("{what} comparison inconclusive at M = {m}; raise the root precision")))
        }
    };
    Ok(BracketReport {
        m,
        lower_holds: decide(&lower, &s_iv, "lower")?,
        upper_holds: decide(&s_iv, &upper, "upper")?,
        lower,
        s_iv,
        upper,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub h: ExactRational,
    pub c: ExactRational,
    pub lhs: CertifiedScalar,
    pub rhs: CertifiedScalar,
    pub holds: bool,
}

/// `ε_l(h) <= ε_s(C h^d) / (C h^{d-1})` with `C = 1/(2(d+1))`.
pub fn transfer_check(theta: &CertifiedVector, h: &ExactRational) -> Result<TransferReport> {
    transfer_check_with(theta, h, DEFAULT_BUDGET)
}

pub fn transfer_check_with(theta: &CertifiedVector, h: &ExactRational, budget: u64) -> Result<TransferReport> {
    let d = theta.dim() as i32;
    let c = BigRational::new(BigInt::one(), BigInt::from(2 * (d + 1)));
    let s_range = &c * h.pow(d);
    if s_range < BigRational::one() {
        return Err(Error::domain(format!(
            "C·h^d = {s_range} < 1 at h = {h}, d = {d}: no integer in the simultaneous range"
        )));
    }
    let lhs = eps_l_with(theta, h, budget)?;
    let eps = eps_s_with(theta, &s_range, budget)?;
    let rhs = eps.scale(&(&c * h.pow(d - 1)).recip());
    let holds = if lhs.is_exact() && rhs.is_exact() {
        lhs.value <= rhs.value
    } else if lhs.hi() <= rhs.lo() {
        true
    } else if lhs.lo() > rhs.hi() {
        false
    } else {
        return Err(Error::precision(format!("transfer comparison inconclusive at h = {h}")));
    };
    Ok(TransferReport { h: h.clone(), c, lhs, rhs, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeClass {
    Theta,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSample {
    pub n: u64,
    /// `q_{n+1}^{(1+τ)/d} ‖q_n θ‖`, or `|Δ_{n+1}|^{d(1+τ)} ‖⟨Δ_n, θ⟩‖`.
    pub theta_scaled: CertifiedScalar,
    /// `q_n^{(1+τ)/d} ‖q_n θ‖`, or `|Δ_n|^{d(1+τ)} ‖⟨Δ_n, θ⟩‖`.
    pub omega_scaled: CertifiedScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEvidence {
    pub mode: ApproxKind,
    pub tau: ExactRational,
    pub samples: Vec<EvidenceSample>,
    /// Lower bound of the smallest Ω-scaled value.
    pub running_inf: ExactRational,
    /// Upper bound of the largest Θ-scaled value over the second half of the samples.
    pub running_sup_of_tail: ExactRational,
}

impl TypeEvidence {
    pub fn series(&self, class: TypeClass) -> Vec<&CertifiedScalar> {
        self.samples
            .iter()
            .map(|s| match class {
                TypeClass::Theta => &s.theta_scaled,
                TypeClass::Omega => &s.omega_scaled,
            })
            .collect()
    }
}

/// Type evidence from explicit heights `q_n` (or `|Δ_n|`) and values `‖·‖`;
/// `values.len() + 1 == heights.len()` so that every sample has a successor.
pub fn evidence_from_heights(
    mode: ApproxKind,
    d: u32,
    tau: &ExactRational,
    heights: &[BigInt],
    values: &[CertifiedScalar],
    bits: u32,
) -> Result<TypeEvidence> {
    if tau.is_negative() {
        return Err(Error::domain(format!("τ = {tau} must be non-negative")));
    }
    let one = BigRational::one();
    let exp = match mode {
        ApproxKind::Simultaneous => (&one + tau) / big(d),
        ApproxKind::Linear => (&one + tau) * big(d),
    };
    let mut samples = Vec::with_capacity(values.len());
    for (n, v) in values.iter().enumerate() {
        let cur = pow_exact(&big(heights[n].clone()), &exp, bits)?;
        let next = pow_exact(&big(heights[n + 1].clone()), &exp, bits)?;
        samples.push(EvidenceSample {
            n: n as u64,
            theta_scaled: next.mul(v),
            omega_scaled: cur.mul(v),
        });
    }
    let running_inf = samples
        .iter()
        .map(|s| s.omega_scaled.lo().max(BigRational::zero()))
        .min()
        .unwrap_or_else(BigRational::zero);
    let half = samples.len() / 2;
    let running_sup_of_tail = samples[half..]
        .iter()
        .map(|s| s.theta_scaled.hi())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(TypeEvidence {
        mode,
        tau: tau.clone(),
        samples,
        running_inf,
        running_sup_of_tail,
    })
}

pub fn type_evidence(theta: &CertifiedVector, tau: &ExactRational, mode: ApproxKind, depth: usize) -> Result<TypeEvidence> {
    type_evidence_with(theta, tau, mode, depth, EvalOptions::default())
}

/// Evidence over the first `depth` best approximations, found by scanning
/// with a doubling limit until `depth + 1` records exist.
pub fn type_evidence_with(
    theta: &CertifiedVector,
    tau: &ExactRational,
    mode: ApproxKind,
    depth: usize,
    opts: EvalOptions,
) -> Result<TypeEvidence> {
    let d = theta.dim() as u32;
    let mut limit: u64 = 64;
    let records: Vec<ApproxRecord> = loop {
        let recs = match mode {
            ApproxKind::Simultaneous => best_simultaneous_with(theta, limit, opts.budget)?,
            ApproxKind::Linear => best_linear_with(theta, limit, opts.budget)?,
        };
        let terminated = recs.last().is_some_and(|r| r.value.is_exact() && r.value.value.is_zero());
        if recs.len() > depth || terminated {
            break recs;
        }
        limit = limit.checked_mul(2).ok_or_else(|| Error::resource("scan limit overflow"))?;
    };
    let depth = depth.min(records.len().saturating_sub(1));
    let heights: Vec<BigInt> = records.iter().take(depth + 1).map(|r| BigInt::from(r.height())).collect();
    let values: Vec<CertifiedScalar> = records.iter().take(depth).map(|r| r.value.clone()).collect();
    evidence_from_heights(mode, d, tau, &heights, &values, opts.root_bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowBound {
    pub n: usize,
    pub l_n: CertifiedScalar,
    pub l_next: CertifiedScalar,
    pub bound: CertifiedScalar,
}

impl WindowBound {
    /// Integer times `l` that certainly lie in `[L_n, L_{n+1})`, as `[lo, hi)`.
    pub fn integer_window(&self) -> (BigInt, BigInt) {
        (self.l_n.hi().ceil().to_integer(), self.l_next.lo().ceil().to_integer())
    }
}

/// `L_n = (|X_n| / ε_{n-1})^{δ/(δ+1)}` and the measure bound
/// `2 (L_{n+1} ε_n + d L_n^{-1/δ} |X_n|)`.
pub fn window_bound(
    theta: &CertifiedVector,
    x_seq: &[Vec<BigInt>],
    delta: &ExactRational,
    n: usize,
    bits: u32,
) -> Result<WindowBound> {
    check_delta(delta)?;
    if n == 0 || x_seq.len() < n + 2 {
        return Err(Error::domain(format!(
            "window {n} needs X_{{n-1}}, X_n, X_{{n+1}}; sequence has {} vectors",
            x_seq.len()
        )));
    }
    let eps_prev = certified_linear_form(&x_seq[n - 1], theta)?;
    let eps_n = certified_linear_form(&x_seq[n], theta)?;
    window_bound_from_values(
        theta.dim() as u32,
        &[sup_norm(&x_seq[n]), sup_norm(&x_seq[n + 1])],
        &[eps_prev, eps_n],
        delta,
        n,
        bits,
    )
}

/// Same bound from `(|X_n|, |X_{n+1}|)` and `(ε_{n-1}, ε_n)`.
pub fn window_bound_from_values(
    d: u32,
    norms: &[BigInt; 2],
    eps: &[CertifiedScalar; 2],
    delta: &ExactRational,
    n: usize,
    bits: u32,
) -> Result<WindowBound> {
    check_delta(delta)?;
    for (i, e) in eps.iter().enumerate() {
        if e.lo() <= BigRational::zero() {
            return Err(Error::Degenerate(format!("ε_{} is not certified positive", n - 1 + i)));
        }
    }
    let e_big = delta / (delta + BigRational::one());
    let inv = -(delta + BigRational::one()).recip();
    let ratio = |x: &BigInt, e: &CertifiedScalar| {
        let x = big(x.clone());
        CertifiedScalar::from_bounds(&x / e.hi(), &x / e.lo())
    };
    let r_n = ratio(&norms[0], &eps[0]);
    let r_next = ratio(&norms[1], &eps[1]);
    let l_n = pow_certified(&r_n, &e_big, bits)?;
    let l_next = pow_certified(&r_next, &e_big, bits)?;
    // L_n^{-1/δ} = (|X_n|/ε_{n-1})^{-1/(δ+1)}
    let l_n_inv = pow_certified(&r_n, &inv, bits)?;
    let bound = l_next
        .mul(&eps[1])
        .add(&l_n_inv.scale(&big(BigInt::from(d) * &norms[0])))
        .scale(&big(2));
    Ok(WindowBound { n, l_n, l_next, bound })
}
