//! Vectors with prescribed approximation behaviour.
//!
//! [`build_theta`] runs the two-dimensional projective recursion: lines
//! `Δ_n` and points `P_n` of `Z^3`, each completed to a lattice basis and
//! pushed to a prescribed height, with `θ` the limit of `P̃_n = (x/z, y/z)`.
//! [`alternating_cf`] builds a vector in any dimension whose coordinates
//! have interleaved, rapidly growing continued-fraction denominators.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::best_approx::{best_simultaneous_with, ContinuedFraction, Witness, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exact::{
    certified_dist_nearest_lattice, certified_linear_form, projective_distance, rat, CertifiedScalar,
    CertifiedVector, ExactRational, LatticePoint3, Verdict,
};
use crate::residue::{BigRing, ModRing, U128Ring};
use crate::lattice::small_multiples;
use crate::roots::ceil_nth_root;

/// Some `U` with `⟨p, U⟩ = 1`, for primitive `p`.
fn unimodular_partner(p: &LatticePoint3) -> LatticePoint3 {
    let e1 = p.x.extended_gcd(&p.y);
    let e2 = e1.gcd.extended_gcd(&p.z);
    debug_assert!(e2.gcd.is_one() || (-&e2.gcd).is_one());
    let s = if e2.gcd.is_negative() { -BigInt::one() } else { BigInt::one() };
    LatticePoint3 {
        x: &s * &e2.x * &e1.x,
        y: &s * &e2.x * &e1.y,
        z: s * e2.y,
    }
}

/// Integer `k` minimising `|q - k p|`.
fn reduce_against(q: &LatticePoint3, p: &LatticePoint3) -> LatticePoint3 {
    // |q - kp| is convex in k; its real minimiser is a breakpoint where one
    // coordinate vanishes or two coordinates meet in absolute value.
    let qc = q.coords();
    let pc = p.coords();
    let mut cands: Vec<BigRational> = Vec::new();
    for i in 0..3 {
        if !pc[i].is_zero() {
            cands.push(BigRational::new(qc[i].clone(), pc[i].clone()));
        }
        for j in 0..3 {
            if i != j {
                for sign in [1i32, -1] {
                    let num = qc[i] - qc[j] * sign;
                    let den = pc[i] - pc[j] * sign;
                    if !den.is_zero() {
                        cands.push(BigRational::new(num, den));
                    }
                }
            }
        }
    }
    let mut best = q.clone();
    for c in cands {
        for k in [c.floor().to_integer(), c.ceil().to_integer()] {
            let r = q.sub(&p.scale(&k));
            if r.norm() < best.norm() {
                best = r;
            }
        }
    }
    best
}

/// Completes a primitive `P` on the plane `⟨Δ, X⟩ = 0` to a basis `{P, P'}`
/// of that rank-2 lattice, with `|P'| <= 2 max(|P|, |Δ|/|P|)`.
///
/// The result satisfies `P ∧ P' = Δ / gcd(Δ)`; callers flip the sign as needed.
pub fn complete_basis(delta: &LatticePoint3, p: &LatticePoint3) -> Result<LatticePoint3> {
    if delta.is_zero() {
        return Err(Error::domain("normal vector Δ is zero"));
    }
    if !p.is_primitive()? {
        return Err(Error::domain(format!("{p} is not primitive")));
    }
    if !delta.dot(p).is_zero() {
        return Err(Error::domain(format!("{p} does not lie on the plane of {delta}")));
    }
    let g = delta.gcd();
    let normal = LatticePoint3 {
        x: &delta.x / &g,
        y: &delta.y / &g,
        z: &delta.z / &g,
    };
    let u = unimodular_partner(p);
    let raw = normal.wedge(&u);
    let out = reduce_against(&raw, p);
    if p.wedge(&out) != normal {
        return Err(Error::internal(format!("basis completion of {p} failed: P ∧ P' = {}", p.wedge(&out))));
    }
    let bound = BigRational::from_integer(p.norm()).max(BigRational::new(delta.norm(), p.norm()))
        * BigRational::from_integer(BigInt::from(2));
    if BigRational::from_integer(out.norm()) > bound {
        return Err(Error::internal(format!(
            "completion {out} of {p} exceeds the norm bound {bound}"
        )));
    }
    Ok(out)
}

/// Parameters `a_n > 32` and heights `h_n°`; `q_n° = a_n (h_n°)^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub a: Vec<BigInt>,
    pub h0: Vec<BigInt>,
}

impl ConstructionParams {
    pub fn q0(&self, n: usize) -> BigInt {
        &self.a[n] * &self.h0[n] * &self.h0[n]
    }

    /// Checks admissibility on indices `0..=last`.
    pub fn check(&self, last: usize) -> Result<()> {
        if self.a.len() <= last || self.h0.len() <= last {
            return Err(Error::domain(format!(
                "need a_n and h_n° for n = 0..={last}; got {} and {}",
                self.a.len(),
                self.h0.len()
            )));
        }
        let thirty_two = BigInt::from(32);
        for n in 0..=last {
            if self.a[n] <= thirty_two {
                return Err(Error::domain(format!("a_{n} = {} must exceed 32", self.a[n])));
            }
            if !self.h0[n].is_positive() {
                return Err(Error::domain(format!("h_{n}° = {} must be positive", self.h0[n])));
            }
            if n < last {
                let need = BigInt::from(24) * &self.a[n] * &self.h0[n];
                if self.h0[n + 1] < need {
                    return Err(Error::domain(format!(
                        "h_{}° = {} is below 24·a_{n}·h_{n}° = {need}",
                        n + 1,
                        self.h0[n + 1]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Rule generating `a_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ARule {
    Const(BigInt),
    /// `a_n = (n + n₀)^p` with `n₀` the least integer with `n₀^p > 32`.
    Poly(u32),
    List(Vec<BigInt>),
}

/// Rule generating `h_n°` from `h_0°`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HRule {
    /// `h_{n+1}° = 24 a_n h_n°`.
    Geom24a,
    List(Vec<BigInt>),
}

/// First index `n₀` with `n₀^p > 32`.
pub fn poly_offset(p: u32) -> u64 {
    if p == 0 {
        return 0;
    }
    (1u64..).find(|n| BigInt::from(*n).pow(p) > BigInt::from(32)).unwrap()
}

impl ARule {
    pub fn term(&self, n: usize) -> Result<BigInt> {
        match self {
            ARule::Const(k) => Ok(k.clone()),
            ARule::Poly(p) => Ok(BigInt::from(n as u64 + poly_offset(*p)).pow(*p)),
            ARule::List(v) => v
                .get(n)
                .cloned()
                .ok_or_else(|| Error::domain(format!("a-sequence list has no entry for n = {n}"))),
        }
    }
}

/// Expands rules into parameters for indices `0..=last`.
pub fn params_from_rules(a: &ARule, h_start: &BigInt, h: &HRule, last: usize) -> Result<ConstructionParams> {
    let a_seq = (0..=last).map(|n| a.term(n)).collect::<Result<Vec<_>>>()?;
    let h0 = match h {
        HRule::Geom24a => {
            let mut v = vec![h_start.clone()];
            for n in 0..last {
                let next = BigInt::from(24) * &a_seq[n] * &v[n];
                v.push(next);
            }
            v
        }
        HRule::List(v) => {
            if v.first() != Some(h_start) && !v.is_empty() {
                return Err(Error::domain("h-sequence list must start with h_0°"));
            }
            v.iter().take(last + 1).cloned().collect()
        }
    };
    Ok(ConstructionParams { a: a_seq, h0 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub n: usize,
    pub delta: LatticePoint3,
    pub p: LatticePoint3,
    pub h: BigInt,
    pub q: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionState {
    pub params: ConstructionParams,
    /// Requested depth `N`; the transcript holds steps `0..=N+1`.
    pub n_steps: usize,
    pub steps: Vec<Step>,
    pub theta: CertifiedVector,
}

impl ConstructionState {
    pub fn deltas_2d(&self) -> Vec<Vec<BigInt>> {
        self.steps
            .iter()
            .map(|s| vec![s.delta.x.clone(), s.delta.y.clone()])
            .collect()
    }

    pub fn qs(&self) -> Vec<BigInt> {
        self.steps.iter().map(|s| s.q.clone()).collect()
    }
}

fn affine_point(p: &LatticePoint3) -> Result<Vec<ExactRational>> {
    p.affine()
        .map(|[x, y]| vec![x, y])
        .ok_or_else(|| Error::internal(format!("point {p} is at infinity")))
}

fn theta_from(steps: &[Step], n: usize) -> Result<CertifiedVector> {
    let (a, b) = (&steps[n], &steps[n + 1]);
    let radius = rat(3, 2) * BigRational::new(b.h.clone(), &a.q * &b.q);
    CertifiedVector::new(affine_point(&a.p)?, radius)
}

/// Runs the recursion through step `N + 1` and reports `θ = P̃_N` with
/// radius `(3/2) h_{N+1} / (q_N q_{N+1})`.
pub fn build_theta(params: &ConstructionParams, n_steps: usize) -> Result<ConstructionState> {
    if n_steps == 0 {
        return Err(Error::domain("at least one construction step is required"));
    }
    params.check(n_steps + 1)?;
    let h0 = &params.h0[0];
    let mut delta = LatticePoint3::new(h0.clone(), -1, 0);
    let mut p = LatticePoint3::new(1, h0.clone(), params.q0(0));
    let mut steps = vec![Step {
        n: 0,
        h: delta.norm(),
        q: p.norm(),
        delta: delta.clone(),
        p: p.clone(),
    }];
    for n in 0..=n_steps {
        let (h_n, q_n) = (delta.norm(), p.norm());
        let mut d_prime = complete_basis(&p, &delta)?;
        if delta.wedge(&d_prime) != p {
            d_prime = d_prime.neg();
        }
        let k = params.h0[n + 1].div_floor(&h_n);
        let next_delta = delta.scale(&k).add(&d_prime);

        let mut p_prime = complete_basis(&next_delta, &p)?;
        if p.wedge(&p_prime) != next_delta {
            p_prime = p_prime.neg();
        }
        let k = params.q0(n + 1).div_floor(&q_n);
        let next_p = p.scale(&k).add(&p_prime);

        if delta.wedge(&next_delta) != p || p.wedge(&next_p) != next_delta {
            return Err(Error::internal(format!("wedge identities fail at step {}", n + 1)));
        }
        delta = next_delta;
        p = next_p;
        steps.push(Step {
            n: n + 1,
            h: delta.norm(),
            q: p.norm(),
            delta: delta.clone(),
            p: p.clone(),
        });
    }
    let theta = theta_from(&steps, n_steps)?;
    Ok(ConstructionState {
        params: params.clone(),
        n_steps,
        steps,
        theta,
    })
}

pub const TRANSCRIPT_HEADER: &str = "# shrinktarget construction transcript v1";

fn join(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Line-oriented text form; [`parse_transcript`] inverts it exactly.
pub fn serialize_transcript(state: &ConstructionState) -> String {
    let mut out = String::new();
    writeln!(out, "{TRANSCRIPT_HEADER}").unwrap();
    writeln!(out, "steps {}", state.n_steps).unwrap();
    writeln!(out, "a {}", join(&state.params.a)).unwrap();
    writeln!(out, "h0 {}", join(&state.params.h0)).unwrap();
    writeln!(out, "# n dx dy dz px py pz h q").unwrap();
    for s in &state.steps {
        writeln!(
            out,
            "{} {} {} {} {} {} {} {} {}",
            s.n, s.delta.x, s.delta.y, s.delta.z, s.p.x, s.p.y, s.p.z, s.h, s.q
        )
        .unwrap();
    }
    out
}

fn parse_ints(line_no: usize, fields: &[&str]) -> Result<Vec<BigInt>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<BigInt>()
                .map_err(|_| Error::domain(format!("transcript line {line_no}: bad integer {f:?}")))
        })
        .collect()
}

/// Parses a transcript. Row values are taken as written so that tampered
/// transcripts still load; [`verify_construction`] judges them.
pub fn parse_transcript(text: &str) -> Result<ConstructionState> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == TRANSCRIPT_HEADER => {}
        _ => return Err(Error::domain(format!("transcript must start with {TRANSCRIPT_HEADER:?}"))),
    }
    let mut keyed = |key: &str| -> Result<(usize, Vec<&str>)> {
        let (no, l) = lines
            .next()
            .ok_or_else(|| Error::domain(format!("transcript ends before {key:?}")))?;
        let mut f = l.split_whitespace();
        if f.next() != Some(key) {
            return Err(Error::domain(format!("transcript line {no}: expected {key:?}")));
        }
        Ok((no, f.collect()))
    };
    let (no, f) = keyed("steps")?;
    let n_steps: usize = match f.as_slice() {
        [x] => x
            .parse()
            .map_err(|_| Error::domain(format!("transcript line {no}: bad step count")))?,
        _ => return Err(Error::domain(format!("transcript line {no}: expected one step count"))),
    };
    let (no, f) = keyed("a")?;
    let a = parse_ints(no, &f)?;
    let (no, f) = keyed("h0")?;
    let h0 = parse_ints(no, &f)?;
    let mut steps = Vec::new();
    for (no, l) in lines {
        if l.starts_with('#') || l.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 9 {
            return Err(Error::domain(format!("transcript line {no}: expected 9 fields, got {}", f.len())));
        }
        let n: usize = f[0]
            .parse()
            .map_err(|_| Error::domain(format!("transcript line {no}: bad step index")))?;
        if n != steps.len() {
            return Err(Error::domain(format!("transcript line {no}: expected step {}", steps.len())));
        }
        let v = parse_ints(no, &f[1..])?;
        steps.push(Step {
            n,
            delta: LatticePoint3::new(v[0].clone(), v[1].clone(), v[2].clone()),
            p: LatticePoint3::new(v[3].clone(), v[4].clone(), v[5].clone()),
            h: v[6].clone(),
            q: v[7].clone(),
        });
    }
    if n_steps == 0 || steps.len() != n_steps + 2 {
        return Err(Error::domain(format!(
            "transcript declares {n_steps} steps but holds {} rows (need steps + 2)",
            steps.len()
        )));
    }
    let theta = theta_from(&steps, n_steps)?;
    Ok(ConstructionState {
        params: ConstructionParams { a, h0 },
        n_steps,
        steps,
        theta,
    })
}

/// Spends at most this many `q` on a linear scan; larger ranges use lattice enumeration.
pub const LINEAR_SCAN_LIMIT: u64 = DEFAULT_BUDGET;
/// Default brute-force depth counts the `n` with `q_{n+1}` at most this.
pub const DEFAULT_SCAN_HEIGHT: u64 = 20_000_000;
const ENUMERATION_NODES: u64 = 5_000_000;

/// Number of `n < N` with `q_{n+1} <= 2·10^7`.
pub fn default_bruteforce_depth(state: &ConstructionState) -> usize {
    (0..state.n_steps)
        .take_while(|&n| state.steps[n + 1].q <= BigInt::from(DEFAULT_SCAN_HEIGHT))
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub index: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

/// How `‖(q_{n+1} - q_n)θ‖` compares to `‖q_nθ‖`; reported, not judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionStatus {
    pub n: usize,
    pub q: BigInt,
    pub dist: CertifiedScalar,
    pub reference: CertifiedScalar,
    /// `‖(q_{n+1} - q_n)θ‖` against `‖q_nθ‖`.
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub exceptions: Vec<ExceptionStatus>,
    /// Certified checks are skipped when the structure is already broken.
    pub analytic_skipped: bool,
    pub depth_bruteforce: usize,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, index: Option<usize>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.to_string(),
            index,
            passed,
            detail: detail.into(),
        });
    }

    /// `lo <= x <= hi` with certified `x`; an undecided comparison is a precision error.
    fn within(
        &mut self,
        name: &str,
        n: usize,
        x: &CertifiedScalar,
        lo: &ExactRational,
        hi: &ExactRational,
    ) -> Result<()> {
        let detail = format!("{x} in [{lo}, {hi}]");
        if &x.lo() >= lo && &x.hi() <= hi {
            self.push(name, Some(n), true, detail);
        } else if &x.hi() < lo || &x.lo() > hi {
            self.push(name, Some(n), false, detail);
        } else {
            return Err(Error::precision(format!(
                "{name} at n = {n} is undecided ({detail}); rebuild with more steps to shrink the radius of θ"
            )));
        }
        Ok(())
    }
}

fn sup_abs(v: &[ExactRational]) -> ExactRational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(ExactRational::zero)
}

fn structural(state: &ConstructionState, out: &mut Checks) -> Result<()> {
    let st = &state.steps;
    let prm = &state.params;
    let one = BigInt::one();
    if let Some(s0) = st.first() {
        let h = &prm.h0[0];
        let ok = s0.delta == LatticePoint3::new(h.clone(), -1, 0) && s0.p == LatticePoint3::new(1, h.clone(), prm.q0(0));
        out.push("initial_data", Some(0), ok, format!("Δ_0 = {}, P_0 = {}", s0.delta, s0.p));
    }
    for (n, s) in st.iter().enumerate() {
        let pd = !s.delta.is_zero() && s.delta.is_primitive()?;
        out.push("primitive_delta", Some(n), pd, format!("Δ_{n} = {}", s.delta));
        let pp = !s.p.is_zero() && s.p.is_primitive()?;
        out.push("primitive_p", Some(n), pp, format!("P_{n} = {}", s.p));
        out.push("incidence", Some(n), s.delta.dot(&s.p).is_zero(), format!("⟨Δ_{n}, P_{n}⟩ = {}", s.delta.dot(&s.p)));
        let norms = s.h == s.delta.norm() && s.q == s.p.norm();
        out.push("norms", Some(n), norms, format!("h = {}, |Δ| = {}, q = {}, |P| = {}", s.h, s.delta.norm(), s.q, s.p.norm()));
        if n < prm.a.len() && n < prm.h0.len() {
            let two = BigInt::from(2);
            let (ho, qo) = (&prm.h0[n], prm.q0(n));
            let ok_h = &two * &s.h >= *ho && s.h <= &two * ho;
            out.push("sandwich_h", Some(n), ok_h, format!("h_{n} = {}, h°_{n} = {ho}", s.h));
            let ok_q = &two * &s.q >= qo && s.q <= &two * &qo;
            out.push("sandwich_q", Some(n), ok_q, format!("q_{n} = {}, q°_{n} = {qo}", s.q));
        } else {
            out.push("sandwich_h", Some(n), false, "no parameters for this index");
        }
    }
    for n in 0..st.len().saturating_sub(1) {
        let (a, b) = (&st[n], &st[n + 1]);
        let v = b.delta.dot(&a.p);
        out.push("incidence_next", Some(n), v.is_zero(), format!("⟨Δ_{}, P_{n}⟩ = {v}", n + 1));
        let w = a.delta.wedge(&b.delta);
        out.push("wedge_delta", Some(n), w == a.p, format!("Δ_{n} ∧ Δ_{} = {w}", n + 1));
        let w = a.p.wedge(&b.p);
        out.push("wedge_p", Some(n), w == b.delta, format!("P_{n} ∧ P_{} = {w}", n + 1));
        let v = a.delta.dot(&b.p);
        out.push("unit_pairing", Some(n), v == one, format!("⟨Δ_{n}, P_{}⟩ = {v}", n + 1));
    }
    Ok(())
}

fn geometric(state: &ConstructionState, out: &mut Checks) -> Result<()> {
    let st = &state.steps;
    let origin = LatticePoint3::new(0, 0, 1);
    let d0 = projective_distance(&origin, &st[0].p)?;
    out.push("initial_distance", Some(0), d0 < rat(1, 32), format!("d(0, P̃_0) = {d0}"));
    let theta_norm = sup_abs(&state.theta.coords) + &state.theta.radius;
    out.push("theta_small", None, theta_norm <= rat(1, 8), format!("|θ| + ρ = {theta_norm}"));
    let ratio = BigRational::new(BigInt::one(), BigInt::from(2u64.pow(18) * 27));
    let mut prev: Option<ExactRational> = None;
    for i in 0..st.len() - 1 {
        let d = projective_distance(&st[i].p, &st[i + 1].p)?;
        let bound = BigRational::new(BigInt::one(), BigInt::from(32).pow(i as u32 + 1));
        out.push("decay_crude", Some(i), d <= bound, format!("d(P̃_{i}, P̃_{}) = {d}", i + 1));
        if let Some(p) = prev {
            let lim = &ratio * &p;
            out.push("decay_ratio", Some(i), d <= lim, format!("d = {d}, (2^18·3^3)^-1·previous = {lim}"));
        }
        prev = Some(d);
    }
    Ok(())
}

fn pairing(delta: &LatticePoint3, theta: &CertifiedVector) -> Result<CertifiedScalar> {
    let c = &theta.coords;
    let v = c[0].clone() * BigRational::from_integer(delta.x.clone())
        + c[1].clone() * BigRational::from_integer(delta.y.clone())
        + BigRational::from_integer(delta.z.clone());
    let l1 = BigRational::from_integer(delta.x.abs() + delta.y.abs());
    CertifiedScalar::new(v.abs(), l1 * &theta.radius)
}

fn analytic(state: &ConstructionState, out: &mut Checks) -> Result<()> {
    let st = &state.steps;
    let th = &state.theta;
    for n in 0..state.n_steps {
        let (a, b) = (&st[n], &st[n + 1]);
        let scale = BigRational::new(b.h.clone(), &a.q * &b.q);
        let pn = affine_point(&a.p)?;
        let gap: Vec<ExactRational> = pn.iter().zip(&th.coords).map(|(x, y)| x - y).collect();
        let dist = CertifiedScalar::new(sup_abs(&gap), th.radius.clone())?;
        out.within("eq5_enclosure", n, &dist, &(&scale * rat(1, 2)), &(&scale * rat(3, 2)))?;

        let pair = pairing(&a.delta, th)?;
        let inv = BigRational::new(BigInt::one(), b.q.clone());
        out.within("lemma43_pairing", n, &pair, &(&inv * rat(3, 4)), &(&inv * rat(5, 4)))?;

        let qn = certified_dist_nearest_lattice(&a.q, th)?;
        let s = BigRational::new(b.h.clone(), b.q.clone());
        out.within("eq6_qn_theta", n, &qn, &(&s * rat(1, 2)), &(&s * rat(3, 2)))?;

        let linear = certified_linear_form(&[a.delta.x.clone(), a.delta.y.clone()], th)?;
        out.push(
            "linear_form_matches",
            Some(n),
            linear.value == pair.value,
            format!("‖⟨(r,s),θ⟩‖ = {}, |⟨Δ,θ̄⟩| = {}", linear.value, pair.value),
        );

        if let Some(a_next) = state.params.a.get(n + 1) {
            let h2 = BigRational::from_integer(&b.h * &b.h);
            let prod = pair.scale(&h2);
            let lo = BigRational::new(BigInt::from(3), BigInt::from(32) * a_next);
            let hi = BigRational::new(BigInt::from(10), a_next.clone());
            out.within("bracket_a", n, &prod, &lo, &hi)?;
        }
    }
    Ok(())
}

fn linear_candidates<R: ModRing>(ring: &R, nums: &[BigUint], q_max: u64, thresh: &BigUint) -> Vec<u64> {
    const CHUNK: u64 = 1 << 20;
    let t = ring.from_big(thresh);
    let modulus = ring.modulus();
    let steps: Vec<R::E> = nums.iter().map(|n| ring.from_big(n)).collect();
    let starts: Vec<u64> = (1..q_max).step_by(CHUNK as usize).collect();
    starts
        .par_iter()
        .flat_map_iter(|&start| {
            let mut r: Vec<R::E> = nums.iter().map(|n| ring.from_big(&((n * start) % &modulus))).collect();
            let mut hits = Vec::new();
            for q in start..(start + CHUNK).min(q_max) {
                if r.iter().all(|x| ring.dist(x) <= t) {
                    hits.push(q);
                }
                for (x, e) in r.iter_mut().zip(&steps) {
                    *x = ring.add(x, e);
                }
            }
            hits
        })
        .collect()
}

/// Every `0 < q < q_max` with `max_i ‖q c_i‖ <= eps` for the center `c` of
/// `θ`, by a linear scan when `q_max` is small and lattice enumeration otherwise.
pub fn simultaneous_candidates(theta: &CertifiedVector, q_max: &BigInt, eps: &ExactRational) -> Result<Vec<BigInt>> {
    match q_max.to_u64() {
        Some(m) if m <= LINEAR_SCAN_LIMIT => {
            if eps.is_negative() {
                return Ok(Vec::new());
            }
            let (den, nums) = theta.residues();
            let thresh = (eps * BigRational::from_integer(BigInt::from(den.clone())))
                .floor()
                .to_integer()
                .to_biguint()
                .unwrap_or_default();
            let hits = match U128Ring::new(&den) {
                Some(ring) => linear_candidates(&ring, &nums, m, &thresh),
                None => linear_candidates(&BigRing::new(&den), &nums, m, &thresh),
            };
            Ok(hits.into_iter().map(BigInt::from).collect())
        }
        _ => small_multiples(&theta.coords, q_max, eps, ENUMERATION_NODES),
    }
}

fn lemma42(state: &ConstructionState, n: usize, out: &mut Checks) -> Result<ExceptionStatus> {
    let th = &state.theta;
    let (qn, qn1) = (&state.steps[n].q, &state.steps[n + 1].q);
    let reference = certified_dist_nearest_lattice(qn, th)?;
    let exception = qn1 - qn;
    // any q with ‖qθ‖ <= ‖q_nθ‖ has ‖qc‖ <= ‖q_nθ‖ + qρ for the center c
    let reach = reference.hi() + BigRational::from_integer(qn1.clone()) * &th.radius;
    let cands = simultaneous_candidates(th, qn1, &reach)?;
    let mut violations = Vec::new();
    for q in &cands {
        if q == qn || *q == exception {
            continue;
        }
        let d = certified_dist_nearest_lattice(q, th)?;
        match d.compare(&reference) {
            Verdict::Greater => {}
            Verdict::Less | Verdict::Equal => violations.push(q.clone()),
            Verdict::Inconclusive => {
                return Err(Error::precision(format!(
                    "‖qθ‖ for q = {q} and q_{n} = {qn} cannot be separated; rebuild with more steps"
                )))
            }
        }
    }
    out.push(
        "lemma42_scan",
        Some(n),
        violations.is_empty(),
        format!(
            "{} candidates below q_{} = {qn1}; violations: {:?}",
            cands.len(),
            n + 1,
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        ),
    );
    let dist = certified_dist_nearest_lattice(&exception, th)?;
    let verdict = dist.compare(&reference);
    Ok(ExceptionStatus {
        n,
        q: exception,
        dist,
        reference,
        verdict,
    })
}

/// Best simultaneous approximations below `q_m` lie in `{q_k} ∪ {q_{k+1} - q_k} ∪ [1, q_0)`
/// and include every `q_k` with `k < m`.
fn best_set(state: &ConstructionState, m: usize, out: &mut Checks) -> Result<()> {
    let qs = state.qs();
    let q_max = (&qs[m] - 1u32)
        .to_u64()
        .ok_or_else(|| Error::internal("scan height overflow"))?;
    let records = best_simultaneous_with(&state.theta, q_max, DEFAULT_BUDGET)?;
    let found: Vec<BigInt> = records
        .iter()
        .filter_map(|r| match r.witness {
            Witness::Q(q) => Some(BigInt::from(q)),
            Witness::Delta(_) => None,
        })
        .collect();
    let allowed = |q: &BigInt| {
        q < &qs[0] || (0..m).any(|k| q == &qs[k] || *q == &qs[k + 1] - &qs[k])
    };
    let stray: Vec<String> = found.iter().filter(|q| !allowed(q)).map(|q| q.to_string()).collect();
    let missing: Vec<String> = (0..m)
        .filter(|&k| !found.contains(&qs[k]))
        .map(|k| format!("q_{k}"))
        .collect();
    out.push(
        "best_approx_set",
        Some(m),
        stray.is_empty() && missing.is_empty(),
        format!("{} records below q_{m}; stray {stray:?}; missing {missing:?}", found.len()),
    );
    Ok(())
}

/// Re-checks every invariant of `state`, then the certified enclosures, then
/// for `n < depth_bruteforce` that no `q < q_{n+1}` outside `{q_n, q_{n+1} - q_n}`
/// reaches `‖q_nθ‖`.
pub fn verify_construction(state: &ConstructionState, depth_bruteforce: usize) -> Result<VerificationReport> {
    if depth_bruteforce > state.n_steps {
        return Err(Error::domain(format!(
            "brute-force depth {depth_bruteforce} exceeds the {} construction steps",
            state.n_steps
        )));
    }
    let mut out = Checks(Vec::new());
    structural(state, &mut out)?;
    let sound = out.0.iter().all(|c| c.passed);
    let mut exceptions = Vec::new();
    if sound {
        geometric(state, &mut out)?;
        analytic(state, &mut out)?;
        for n in 0..depth_bruteforce {
            exceptions.push(lemma42(state, n, &mut out)?);
        }
        let m = (1..=depth_bruteforce)
            .take_while(|&m| state.steps[m].q <= BigInt::from(DEFAULT_SCAN_HEIGHT))
            .last();
        if let Some(m) = m {
            best_set(state, m, &mut out)?;
        }
    }
    Ok(VerificationReport {
        checks: out.0,
        exceptions,
        analytic_skipped: !sound,
        depth_bruteforce,
    })
}

pub const CF_DIGIT_RULE: &str = "a = ceil(target / q_prev) + 1, or 1 without a target";

/// Continued-fraction data for `θ_1..θ_d`; level `n` adds the `n`-th
/// partial quotient of every coordinate, coordinate 1 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CFVectorSpec {
    pub d: usize,
    pub delta: ExactRational,
    pub levels: usize,
    pub start_index: usize,
    pub digit_rule: String,
    /// `quotients[i][n - 1]` is the `n`-th partial quotient of `θ_{i+1}`, `n = 1..=levels + 1`.
    pub quotients: Vec<Vec<BigInt>>,
    /// `denominators[i][n]` is `q_{i+1,n}`, `n = 0..=levels + 1`.
    pub denominators: Vec<Vec<BigInt>>,
    /// `θ_i = p_{i,N}/q_{i,N}` with radius `max_i 1/(q_{i,N} q_{i,N+1})`.
    pub theta: CertifiedVector,
}

/// Least integer at least `q^d · m^δ`.
fn growth_target(q: &BigInt, d: usize, delta: &ExactRational, m: u64) -> BigInt {
    let (a, b) = (delta.numer(), delta.denom());
    let m_a = BigInt::from(m).pow(a.to_u32().expect("exponent fits u32"));
    if b.is_one() {
        return q.pow(d as u32) * m_a;
    }
    let b = b.to_u32().expect("exponent fits u32");
    ceil_nth_root(&BigRational::from_integer(q.pow(d as u32 * b) * m_a), b)
}

/// `x ≥ q^d · m^δ`, decided by integer powers.
fn meets_growth(x: &BigInt, q: &BigInt, d: usize, delta: &ExactRational, m: u64) -> bool {
    let (a, b) = (delta.numer().to_u32().unwrap(), delta.denom().to_u32().unwrap());
    x.pow(b) >= q.pow(d as u32 * b) * BigInt::from(m).pow(a)
}

/// Builds `θ ∈ (0,1)^d` whose convergent denominators alternate between the
/// coordinates: `q_{d,n} ≥ q_{1,n}^d n^δ` and `q_{i-1,n+1} ≥ q_{i,n}^d n^δ`
/// for `2 <= i <= d` and `n₀ <= n <= N`.
pub fn alternating_cf(d: usize, delta: &ExactRational, levels: usize, start_index: usize) -> Result<CFVectorSpec> {
    if d < 2 {
        return Err(Error::domain(format!("dimension {d} < 2")));
    }
    if *delta <= BigRational::from_integer(BigInt::from(d as u64 + 1)) {
        return Err(Error::domain(format!("δ = {delta} must exceed d + 1 = {}", d + 1)));
    }
    if delta.numer().to_u32().is_none() || delta.denom().to_u32().is_none() {
        return Err(Error::domain(format!("δ = {delta} has numerator or denominator beyond u32")));
    }
    if levels == 0 {
        return Err(Error::domain("at least one level is required"));
    }
    let top = levels + 1;
    let mut quotients = vec![Vec::with_capacity(top); d];
    // (p_{n-2}, p_{n-1}) and (q_{n-2}, q_{n-1}) per coordinate, from p_{-1}/q_{-1} = 1/0
    let mut p: Vec<(BigInt, BigInt)> = vec![(BigInt::one(), BigInt::zero()); d];
    let mut q: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::one()); d];
    let mut denominators: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]; d];
    let mut numerators_at_n: Vec<BigInt> = vec![BigInt::zero(); d];
    for n in 1..=top {
        for i in 0..d {
            let target = if i + 1 < d {
                (n > start_index).then(|| growth_target(&denominators[i + 1][n - 1], d, delta, (n - 1) as u64))
            } else {
                (n >= start_index).then(|| growth_target(&denominators[0][n], d, delta, n as u64))
            };
            let digit = match target {
                Some(t) => t.div_ceil(&q[i].1) + 1u32,
                None => BigInt::one(),
            };
            let next_q = &digit * &q[i].1 + &q[i].0;
            let next_p = &digit * &p[i].1 + &p[i].0;
            q[i] = (std::mem::take(&mut q[i].1), next_q.clone());
            p[i] = (std::mem::take(&mut p[i].1), next_p);
            denominators[i].push(next_q);
            quotients[i].push(digit);
            if n == levels {
                numerators_at_n[i] = p[i].1.clone();
            }
        }
    }
    let coords = (0..d)
        // convergents are in lowest terms
        .map(|i| BigRational::new_raw(numerators_at_n[i].clone(), denominators[i][levels].clone()))
        .collect();
    let radius = (0..d)
        .map(|i| BigRational::new_raw(BigInt::one(), &denominators[i][levels] * &denominators[i][top]))
        .max()
        .unwrap();
    let spec = CFVectorSpec {
        d,
        delta: delta.clone(),
        levels,
        start_index,
        digit_rule: CF_DIGIT_RULE.to_string(),
        quotients,
        denominators,
        theta: CertifiedVector::new(coords, radius)?,
    };
    let failed: Vec<Check> = check_alternating(&spec).into_iter().filter(|c| !c.passed).collect();
    if let Some(c) = failed.first() {
        return Err(Error::internal(format!("growth inequality {} fails at n = {:?}", c.name, c.index)));
    }
    Ok(spec)
}

/// Exact re-check of both growth families for `max(n₀, 1) <= n <= N`.
pub fn check_alternating(spec: &CFVectorSpec) -> Vec<Check> {
    let (d, q) = (spec.d, &spec.denominators);
    let mut out = Checks(Vec::new());
    for n in spec.start_index.max(1)..=spec.levels {
        let ok = meets_growth(&q[d - 1][n], &q[0][n], d, &spec.delta, n as u64);
        out.push("growth_last", Some(n), ok, format!("q_{{{d},{n}}} vs q_{{1,{n}}}^{d} n^δ"));
        for i in 2..=d {
            let ok = meets_growth(&q[i - 2][n + 1], &q[i - 1][n], d, &spec.delta, n as u64);
            out.push(
                "growth_cross",
                Some(n),
                ok,
                format!("q_{{{},{}}} vs q_{{{i},{n}}}^{d} n^δ", i - 1, n + 1),
            );
        }
    }
    out.0
}

/// Continued fraction of coordinate `i` (0-based) through level `N + 1`.
pub fn coordinate_cf(spec: &CFVectorSpec, i: usize) -> ContinuedFraction {
    let mut digits = vec![BigInt::zero()];
    digits.extend(spec.quotients[i].iter().cloned());
    ContinuedFraction::from_quotients(digits)
}
