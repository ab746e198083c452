//! Best simultaneous and best linear approximations by exhaustive scan.
//!
//! The scan is the ground truth in every dimension. Continued fractions are
//! provided for `d = 1` as an independent oracle and to build fixtures.
//!
//! Best linear approximations are searched shell by shell in the sup norm.
//! Writing `Δ = (u, s)` with `u ∈ Z^{d-1}`, the shell `|Δ| = k` splits into
//! vectors with `|u| = k` (matched against all `|s| <= k`) and vectors with
//! `s = ±k` (matched against all `|u| < k`); each half is a nearest-neighbour
//! query on the circle `Z/DZ`. The minimum per shell is exact, at a cost of
//! roughly `(2h+1)^{d-1}` lookups instead of `(2h+1)^d` evaluations.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{CertifiedScalar, CertifiedVector, ExactRational};
use crate::residue::{circular_nearest, BigRing, ModRing, U128Ring};

/// Default cap on candidate evaluations per scan.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Cap on the number of stored half-vectors in a linear scan.
const TABLE_CAP: u64 = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxKind {
    Simultaneous,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Q(u64),
    Delta(Vec<i64>),
}

impl Witness {
    /// `q`, or the sup norm `|Δ|`.
    pub fn height(&self) -> u64 {
        match self {
            Witness::Q(q) => *q,
            Witness::Delta(v) => v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxRecord {
    pub kind: ApproxKind,
    pub index: usize,
    pub witness: Witness,
    pub value: CertifiedScalar,
}

impl ApproxRecord {
    pub fn height(&self) -> u64 {
        self.witness.height()
    }
}

/// Value of the step function `h ↦ min_{height <= h}` read off a record list.
pub fn value_at(records: &[ApproxRecord], h: u64) -> Option<&CertifiedScalar> {
    let idx = records.partition_point(|r| r.height() <= h);
    idx.checked_sub(1).map(|i| &records[i].value)
}

fn floor_height(h: &ExactRational) -> Result<u64> {
    if *h < BigRational::one() {
        return Err(Error::domain(format!("height {h} < 1 leaves no integer in range")));
    }
    h.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::resource(format!("height {h} beyond any scan budget")))
}

pub fn eps_s(theta: &CertifiedVector, h: &ExactRational) -> Result<CertifiedScalar> {
    eps_s_with(theta, h, DEFAULT_BUDGET)
}

pub fn eps_s_with(theta: &CertifiedVector, h: &ExactRational, budget: u64) -> Result<CertifiedScalar> {
    let h = floor_height(h)?;
    let records = best_simultaneous_with(theta, h, budget)?;
    Ok(records.last().expect("q = 1 is always a record").value.clone())
}

pub fn eps_l(theta: &CertifiedVector, h: &ExactRational) -> Result<CertifiedScalar> {
    eps_l_with(theta, h, DEFAULT_BUDGET)
}

pub fn eps_l_with(theta: &CertifiedVector, h: &ExactRational, budget: u64) -> Result<CertifiedScalar> {
    let h = floor_height(h)?;
    let records = best_linear_with(theta, h, budget)?;
    Ok(records.last().expect("height 1 always yields a record").value.clone())
}

pub fn best_simultaneous(theta: &CertifiedVector, q_max: u64) -> Result<Vec<ApproxRecord>> {
    best_simultaneous_with(theta, q_max, DEFAULT_BUDGET)
}

pub fn best_simultaneous_with(
    theta: &CertifiedVector,
    q_max: u64,
    budget: u64,
) -> Result<Vec<ApproxRecord>> {
    if q_max > budget {
        return Err(Error::resource(format!(
            "simultaneous scan to q = {q_max} exceeds the budget of {budget} evaluations"
        )));
    }
    let (den, nums) = theta.residues();
    match U128Ring::new(&den) {
        Some(ring) => scan_simultaneous(&ring, &nums, theta, q_max, ApproxKind::Simultaneous),
        None => scan_simultaneous(&BigRing::new(&den), &nums, theta, q_max, ApproxKind::Simultaneous),
    }
}

pub fn best_linear(theta: &CertifiedVector, h_max: u64) -> Result<Vec<ApproxRecord>> {
    best_linear_with(theta, h_max, DEFAULT_BUDGET)
}

pub fn best_linear_with(theta: &CertifiedVector, h_max: u64, budget: u64) -> Result<Vec<ApproxRecord>> {
    let d = theta.dim();
    let side = BigUint::from(2 * h_max as u128 + 1);
    let cost = side.pow(d as u32 - 1) + &side * 2u32;
    if cost > BigUint::from(budget) {
        return Err(Error::resource(format!(
            "linear scan to |Δ| = {h_max} in dimension {d} needs about {cost} evaluations, budget is {budget}"
        )));
    }
    let (den, nums) = theta.residues();
    if d == 1 {
        return match U128Ring::new(&den) {
            Some(ring) => scan_simultaneous(&ring, &nums, theta, h_max, ApproxKind::Linear),
            None => scan_simultaneous(&BigRing::new(&den), &nums, theta, h_max, ApproxKind::Linear),
        };
    }
    let table = side.pow(d as u32 - 1);
    if table > BigUint::from(TABLE_CAP) {
        return Err(Error::resource(format!(
            "linear scan to |Δ| = {h_max} in dimension {d} needs a table of {table} entries"
        )));
    }
    match U128Ring::new(&den) {
        Some(ring) => scan_linear(&ring, &nums, theta, h_max),
        None => scan_linear(&BigRing::new(&den), &nums, theta, h_max),
    }
}

/// Outcome of comparing a candidate against the current record.
/// Radii are passed as thunks; they are only built when the integer slack
/// cannot decide.
fn beats<R: ModRing>(
    ring: &R,
    cand: (&R::E, impl FnOnce() -> BigRational),
    best: (&R::E, impl FnOnce() -> BigRational),
    slack: &R::E,
    exact: bool,
    what: impl FnOnce() -> String,
) -> Result<bool> {
    let (dv, r_c) = cand;
    let (db, r_b) = best;
    if exact {
        return Ok(dv < db);
    }
    if ring.exceeds(dv, db, slack) {
        return Ok(false);
    }
    if ring.exceeds(db, dv, slack) {
        return Ok(true);
    }
    // radii here are already scaled by D
    let (a, b) = (ring.to_big(dv), ring.to_big(db));
    let gap = if a < b { &b - &a } else { &a - &b };
    let gap = BigRational::from_integer(BigInt::from(gap));
    if gap > r_c() + r_b() {
        Ok(a < b)
    } else {
        Err(Error::precision(format!(
            "{} is inconclusive at the given radius; supply a tighter target vector",
            what()
        )))
    }
}

fn ratio<R: ModRing>(ring: &R, v: &R::E, den: &BigInt) -> ExactRational {
    BigRational::new(BigInt::from(ring.to_big(v)), den.clone())
}

fn scan_simultaneous<R: ModRing>(
    ring: &R,
    nums: &[BigUint],
    theta: &CertifiedVector,
    q_max: u64,
    kind: ApproxKind,
) -> Result<Vec<ApproxRecord>> {
    let den = BigInt::from(ring.modulus());
    let rho_d = &theta.radius * BigRational::from_integer(den.clone());
    let exact = theta.is_exact();
    let slack_big = (&rho_d * BigRational::from_integer(BigInt::from(2 * q_max as u128)))
        .ceil()
        .to_integer();
    let slack = ring.from_big(&slack_big.to_biguint().unwrap_or_default());
    let steps: Vec<R::E> = nums.iter().map(|n| ring.from_big(n)).collect();
    let mut res = vec![ring.zero(); steps.len()];
    let zero = ring.zero();

    let mut out = Vec::new();
    let mut best: Option<(u64, R::E)> = None;
    for q in 1..=q_max {
        for (r, s) in res.iter_mut().zip(&steps) {
            *r = ring.add(r, s);
        }
        let dv = res.iter().map(|r| ring.dist(r)).max().unwrap();
        let record = match &best {
            None => true,
            Some((qb, db)) => {
                if exact {
                    dv < *db
                } else {
                    let rc = || &rho_d * BigRational::from_integer(BigInt::from(q));
                    let rb = || &rho_d * BigRational::from_integer(BigInt::from(*qb));
                    beats(ring, (&dv, rc), (db, rb), &slack, false, || {
                        format!("comparison of ‖qθ‖ at q = {q} against q = {qb}")
                    })?
                }
            }
        };
        if record {
            let witness = match kind {
                ApproxKind::Simultaneous => Witness::Q(q),
                ApproxKind::Linear => Witness::Delta(vec![q as i64]),
            };
            out.push(ApproxRecord {
                kind,
                index: out.len(),
                witness,
                value: CertifiedScalar {
                    value: ratio(ring, &dv, &den),
                    radius: &theta.radius * BigRational::from_integer(BigInt::from(q)),
                },
            });
            let done = dv == zero;
            best = Some((q, dv));
            if done {
                break;
            }
        }
    }
    Ok(out)
}

/// All vectors of `Z^m` with sup norm exactly `k >= 1`.
pub(crate) fn shell(m: usize, k: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for j in 0..m {
        // coordinates before j lie strictly inside, coordinate j is ±k
        let mut ranges = Vec::with_capacity(m);
        for i in 0..m {
            ranges.push(match i.cmp(&j) {
                std::cmp::Ordering::Less => (-k + 1, k - 1),
                std::cmp::Ordering::Equal => (-k, k),
                std::cmp::Ordering::Greater => (-k, k),
            });
        }
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'odometer: loop {
            if cur[j].abs() == k {
                out.push(cur.clone());
            }
            let mut i = m;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                // coordinate j only takes the two values ±k
                let step = if i == j { 2 * k } else { 1 };
                if cur[i] + step <= ranges[i].1 {
                    cur[i] += step;
                    break;
                }
                cur[i] = ranges[i].0;
            }
        }
    }
    out
}

fn canonical_sign(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    v
}

fn scan_linear<R: ModRing>(
    ring: &R,
    nums: &[BigUint],
    theta: &CertifiedVector,
    h_max: u64,
) -> Result<Vec<ApproxRecord>> {
    let d = nums.len();
    let m = d - 1;
    let den = BigInt::from(ring.modulus());
    let rho_d = &theta.radius * BigRational::from_integer(den.clone());
    let exact = theta.is_exact();
    let slack_big = (&rho_d * BigRational::from_integer(BigInt::from(2 * d as u128 * h_max as u128)))
        .ceil()
        .to_integer();
    let slack = ring.from_big(&slack_big.to_biguint().unwrap_or_default());
    let steps: Vec<R::E> = nums.iter().map(|n| ring.from_big(n)).collect();
    let zero = ring.zero();

    // mult[i][j] = j n_i mod D
    let mut mult: Vec<Vec<R::E>> = vec![vec![zero.clone()]; d];
    let signed = |mult: &Vec<Vec<R::E>>, i: usize, c: i64| -> R::E {
        let v = &mult[i][c.unsigned_abs() as usize];
        if c < 0 {
            ring.neg(v)
        } else {
            v.clone()
        }
    };
    // residues of <u, n'> for |u| < k, and of s n_d for |s| <= k
    let mut table_a: BTreeMap<R::E, u32> = BTreeMap::new();
    let mut vecs_a: Vec<Vec<i64>> = vec![vec![0; m]];
    table_a.insert(zero.clone(), 0);
    let mut table_b: BTreeMap<R::E, i64> = BTreeMap::new();
    table_b.insert(zero.clone(), 0);

    let mut out = Vec::new();
    let mut best: Option<(u64, R::E)> = None;
    for k in 1..=h_max as i64 {
        for i in 0..d {
            let next = ring.add(mult[i].last().unwrap(), &steps[i]);
            mult[i].push(next);
        }
        for s in [k, -k] {
            let key = signed(&mult, m, s);
            table_b.entry(key).or_insert(s);
        }

        let mut shell_best: Option<(R::E, Vec<i64>)> = None;
        let mut consider = |dist: R::E, delta: Vec<i64>| {
            if shell_best.as_ref().is_none_or(|(b, _)| dist < *b) {
                shell_best = Some((dist, canonical_sign(delta)));
            }
        };

        let new_u = shell(m, k);
        let mut new_keys = Vec::with_capacity(new_u.len());
        for u in &new_u {
            let mut a = zero.clone();
            for (i, c) in u.iter().enumerate() {
                a = ring.add(&a, &signed(&mult, i, *c));
            }
            let target = ring.neg(&a);
            if let Some((dist, _, s)) = circular_nearest(ring, &table_b, &target) {
                let mut delta = u.clone();
                delta.push(*s);
                consider(dist, delta);
            }
            new_keys.push(a);
        }
        for s in [k, -k] {
            let b = signed(&mult, m, s);
            let target = ring.neg(&b);
            if let Some((dist, _, idx)) = circular_nearest(ring, &table_a, &target) {
                let mut delta = vecs_a[*idx as usize].clone();
                delta.push(s);
                consider(dist, delta);
            }
        }
        for (u, key) in new_u.into_iter().zip(new_keys) {
            if let std::collections::btree_map::Entry::Vacant(e) = table_a.entry(key) {
                e.insert(vecs_a.len() as u32);
                vecs_a.push(u);
            }
        }

        let (dv, delta) = shell_best.expect("every shell is non-empty");
        let record = match &best {
            None => true,
            Some((kb, db)) => {
                if exact {
                    dv < *db
                } else {
                    let scale = |h: u64| &rho_d * BigRational::from_integer(BigInt::from(d as u128 * h as u128));
                    beats(ring, (&dv, || scale(k as u64)), (db, || scale(*kb)), &slack, false, || {
                        format!("comparison of ‖⟨Δ,θ⟩‖ on the shell |Δ| = {k} against |Δ| = {kb}")
                    })?
                }
            }
        };
        if record {
            let l1: u64 = delta.iter().map(|c| c.unsigned_abs()).sum();
            out.push(ApproxRecord {
                kind: ApproxKind::Linear,
                index: out.len(),
                witness: Witness::Delta(delta),
                value: CertifiedScalar {
                    value: ratio(ring, &dv, &den),
                    radius: &theta.radius * BigRational::from_integer(BigInt::from(l1)),
                },
            });
            let done = dv == zero;
            best = Some((k as u64, dv));
            if done {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    /// `a_0, a_1, ...`
    pub quotients: Vec<BigInt>,
    /// Convergents `p_k / q_k` as (numerator, denominator).
    pub convergents: Vec<(BigInt, BigInt)>,
}

impl ContinuedFraction {
    /// Convergents built from partial quotients by the usual recurrence.
    pub fn from_quotients(quotients: Vec<BigInt>) -> Self {
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let mut convergents = Vec::with_capacity(quotients.len());
        for a in &quotients {
            let (p, q) = (a * &p1 + &p0, a * &q1 + &q0);
            (p0, q0) = (p1, q1);
            (p1, q1) = (p.clone(), q.clone());
            convergents.push((p, q));
        }
        ContinuedFraction { quotients, convergents }
    }

    pub fn denominators(&self) -> Vec<BigInt> {
        self.convergents.iter().map(|(_, q)| q.clone()).collect()
    }
}

/// Euclidean expansion of `x ∈ (0, 1)`, at most `max_terms` quotients
/// counting `a_0 = 0`; stops early once `x` is reached.
pub fn continued_fraction(x: &ExactRational, max_terms: usize) -> Result<ContinuedFraction> {
    if !x.is_positive() || *x >= BigRational::one() {
        return Err(Error::domain(format!("{x} is not in (0, 1)")));
    }
    let mut quotients = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    while quotients.len() < max_terms && !den.is_zero() {
        let a = &num / &den;
        let r = &num - &a * &den;
        quotients.push(a);
        (num, den) = (den, r);
    }
    Ok(ContinuedFraction::from_quotients(quotients))
}

/// The `k`-th convergent of `√2 - 1 = [0; 2, 2, ...]` as a one-dimensional
/// target, with the certified radius `1 / (q_k q_{k+1})`.
pub fn pell_convergent(k: usize) -> CertifiedVector {
    let mut quotients = vec![BigInt::zero()];
    quotients.extend(std::iter::repeat_n(BigInt::from(2), k + 1));
    let cf = ContinuedFraction::from_quotients(quotients);
    let (p, q) = cf.convergents[k].clone();
    let q_next = cf.convergents[k + 1].1.clone();
    CertifiedVector::new(
        vec![BigRational::new(p, q.clone())],
        BigRational::new(BigInt::one(), q * q_next),
    )
    .expect("well-formed")
}

/// Smallest Pell convergent whose radius is below `bound`.
pub fn pell_with_radius_below(bound: &ExactRational) -> CertifiedVector {
    (1..)
        .map(pell_convergent)
        .find(|t| t.radius < *bound)
        .expect("radii tend to zero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{dist_nearest_int, int, rat};
    use proptest::prelude::*;

    fn exact(coords: &[(i64, i64)]) -> CertifiedVector {
        CertifiedVector::exact(coords.iter().map(|(a, b)| rat(*a, *b)).collect()).unwrap()
    }

    fn qs(records: &[ApproxRecord]) -> Vec<u64> {
        records.iter().map(|r| r.height()).collect()
    }

    /// Naive oracle: value of every candidate, no residues, no tables.
    fn naive_sim(theta: &CertifiedVector, q_max: u64) -> Vec<(u64, ExactRational)> {
        let mut best: Option<ExactRational> = None;
        let mut out = vec![];
        for q in 1..=q_max {
            let v = theta
                .coords
                .iter()
                .map(|c| dist_nearest_int(&(c * int(q as i64))))
                .max()
                .unwrap();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v.clone());
                out.push((q, v.clone()));
                if v.is_zero() {
                    break;
                }
            }
        }
        out
    }

    fn naive_lin(theta: &CertifiedVector, h_max: i64) -> Vec<(i64, ExactRational)> {
        let d = theta.dim();
        let mut best_by_k: Vec<Option<ExactRational>> = vec![None; h_max as usize + 1];
        let total = (2 * h_max + 1).pow(d as u32);
        for idx in 0..total {
            let mut rest = idx;
            let mut delta = vec![];
            for _ in 0..d {
                delta.push(rest % (2 * h_max + 1) - h_max);
                rest /= 2 * h_max + 1;
            }
            let k = delta.iter().map(|c| c.abs()).max().unwrap();
            if k == 0 {
                continue;
            }
            let sum: ExactRational = delta.iter().zip(&theta.coords).map(|(s, c)| c * int(*s)).sum();
            let v = dist_nearest_int(&sum);
            let slot = &mut best_by_k[k as usize];
            if slot.as_ref().is_none_or(|b| v < *b) {
                *slot = Some(v);
            }
        }
        let mut out = vec![];
        let mut best: Option<ExactRational> = None;
        for k in 1..=h_max {
            let v = best_by_k[k as usize].clone().unwrap();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v.clone());
                out.push((k, v.clone()));
                if v.is_zero() {
                    break;
                }
            }
        }
        out
    }

    #[test]
    fn eps_s_examples() {
        let t = exact(&[(2, 7)]);
        let r = eps_s(&t, &int(3)).unwrap();
        assert_eq!(r.value, rat(1, 7));
        assert_eq!(eps_s(&t, &int(1)).unwrap().value, rat(2, 7));
        assert!(matches!(eps_s(&t, &rat(1, 2)), Err(Error::Domain(_))));
        let recs = best_simultaneous(&t, 3).unwrap();
        assert_eq!(recs.last().unwrap().witness, Witness::Q(3));
    }

    #[test]
    fn eps_l_examples() {
        let t = exact(&[(2, 7), (3, 7)]);
        let recs = best_linear(&t, 1).unwrap();
        assert_eq!(recs.last().unwrap().value.value, rat(1, 7));
        assert_eq!(recs.last().unwrap().witness, Witness::Delta(vec![1, -1]));
        assert_eq!(eps_l(&exact(&[(2, 7)]), &int(3)).unwrap().value, rat(1, 7));
        let t3 = exact(&[(1, 3), (1, 5), (1, 7)]);
        assert!(matches!(eps_l(&t3, &int(1_000_000)), Err(Error::Resource(_))));
    }

    #[test]
    fn pell_witnesses() {
        let t = pell_with_radius_below(&rat(1, 1_000_000_000_000_000_000i64).pow(3));
        let recs = best_simultaneous(&t, 100).unwrap();
        assert_eq!(qs(&recs), vec![1, 2, 5, 12, 29, 70]);
    }

    #[test]
    fn rational_endpoint_terminates() {
        let recs = best_simultaneous(&exact(&[(2, 7)]), 7).unwrap();
        assert_eq!(qs(&recs), vec![1, 3, 7]);
        let vals: Vec<_> = recs.iter().map(|r| r.value.value.clone()).collect();
        assert_eq!(vals, vec![rat(2, 7), rat(1, 7), int(0)]);
        assert!(best_simultaneous(&exact(&[(2, 7)]), 0).unwrap().is_empty());
    }

    #[test]
    fn linear_one_dimensional() {
        let recs = best_linear(&exact(&[(2, 7)]), 3).unwrap();
        assert_eq!(qs(&recs), vec![1, 3]);
        assert!(best_linear(&exact(&[(2, 7)]), 0).unwrap().is_empty());
    }

    #[test]
    fn continued_fraction_examples() {
        let cf = continued_fraction(&rat(1, 3), 10).unwrap();
        assert_eq!(cf.quotients, vec![BigInt::from(0), BigInt::from(3)]);
        let cf = continued_fraction(&rat(7, 10), 10).unwrap();
        let q: Vec<_> = cf.quotients.iter().map(|a| a.to_i64().unwrap()).collect();
        assert_eq!(q, vec![0, 1, 2, 3]);
        let c: Vec<_> = cf
            .convergents
            .iter()
            .map(|(p, q)| (p.to_i64().unwrap(), q.to_i64().unwrap()))
            .collect();
        assert_eq!(c, vec![(0, 1), (1, 1), (2, 3), (7, 10)]);
        assert!(continued_fraction(&rat(3, 2), 5).is_err());
    }

    #[test]
    fn inconclusive_scan_is_a_precision_error() {
        let fuzzy = CertifiedVector::new(vec![rat(2, 7)], rat(1, 100)).unwrap();
        match best_simultaneous(&fuzzy, 10) {
            Err(Error::Precision(msg)) => assert!(msg.contains("q = ")),
            other => panic!("expected a precision error, got {other:?}"),
        }
    }

    #[test]
    fn big_denominator_path_matches_oracle() {
        let big = BigInt::from(3u32).pow(90);
        let theta = CertifiedVector::exact(vec![
            BigRational::new(BigInt::from(2u32).pow(140) + 1, big.clone()),
            BigRational::new(BigInt::from(5u32).pow(60), big),
        ])
        .unwrap();
        let fast = best_simultaneous(&theta, 3000).unwrap();
        let slow = naive_sim(&theta, 3000);
        assert_eq!(qs(&fast), slow.iter().map(|s| s.0).collect::<Vec<_>>());
        let lin = best_linear(&theta, 12).unwrap();
        assert_eq!(qs(&lin), naive_lin(&theta, 12).iter().map(|s| s.0 as u64).collect::<Vec<_>>());
    }

    #[test]
    fn shell_sizes() {
        assert_eq!(shell(1, 3), vec![vec![-3], vec![3]]);
        assert_eq!(shell(2, 1).len(), 8);
        assert_eq!(shell(2, 2).len(), 16);
        assert_eq!(shell(3, 2).len(), 125 - 27);
    }

    fn theta_strategy(d: usize) -> impl Strategy<Value = CertifiedVector> {
        (proptest::collection::vec(0i64..1_000_000_007, d), 1_000_000i64..1_000_000_007).prop_map(
            |(nums, den)| CertifiedVector::exact(nums.into_iter().map(|n| rat(n % den, den)).collect()).unwrap(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn simultaneous_matches_naive(theta in (1usize..4).prop_flat_map(theta_strategy)) {
            let fast = best_simultaneous(&theta, 400).unwrap();
            let slow = naive_sim(&theta, 400);
            let fast: Vec<_> = fast.iter().map(|r| (r.height(), r.value.value.clone())).collect();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn linear_matches_naive(theta in (1usize..4).prop_flat_map(theta_strategy)) {
            let h = if theta.dim() == 3 { 6 } else { 20 };
            let fast = best_linear(&theta, h).unwrap();
            let slow = naive_lin(&theta, h as i64);
            let fast: Vec<_> = fast.iter().map(|r| (r.height() as i64, r.value.value.clone())).collect();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn records_monotone_and_gapped(theta in (1usize..4).prop_flat_map(theta_strategy)) {
            let d = theta.dim() as u32;
            let recs = best_simultaneous(&theta, 2000).unwrap();
            for w in recs.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                prop_assert!(a.height() < b.height());
                prop_assert!(a.value.value > b.value.value);
                let v = &a.value.value;
                prop_assert!(BigRational::new(BigInt::one(), BigInt::from(a.height() + b.height())) <= *v);
                prop_assert!(v.pow(d as i32) <= BigRational::new(BigInt::one(), BigInt::from(b.height())));
            }
        }

        #[test]
        fn step_function_identity(theta in (1usize..3).prop_flat_map(theta_strategy), q in 1u64..300) {
            let recs = best_simultaneous(&theta, 300).unwrap();
            prop_assert_eq!(value_at(&recs, q).unwrap(), &eps_s(&theta, &int(q as i64)).unwrap());
        }

        #[test]
        fn one_dimension_linear_equals_simultaneous(theta in theta_strategy(1)) {
            let a = best_simultaneous(&theta, 500).unwrap();
            let b = best_linear(&theta, 500).unwrap();
            prop_assert_eq!(qs(&a), qs(&b));
        }

        #[test]
        fn one_dimension_matches_continued_fraction(n in 1i64..1_000_000_000, den in 1_000_000_001i64..2_000_000_000) {
            let x = rat(n, den);
            let theta = CertifiedVector::exact(vec![x.clone()]).unwrap();
            let recs = best_simultaneous(&theta, 100_000).unwrap();
            let cf = continued_fraction(&x, 200).unwrap();
            // denominators q_k with k >= 1, except a leading repeat of 1, up to the scan range
            let mut want: Vec<u64> = cf.denominators().iter().skip(1).map(|q| q.to_u64().unwrap()).filter(|q| *q <= 100_000).collect();
            want.dedup();
            // when a_1 = 1 the record at q = 1 is shared with q_0
            if want.first() != Some(&1) { want.insert(0, 1); }
            prop_assert_eq!(qs(&recs), want);
        }
    }
}
