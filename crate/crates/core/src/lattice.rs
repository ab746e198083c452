//! Exact LLL reduction and short-vector enumeration for small integer lattices.
//!
//! Used to list every `q` below a bound with `‖qθ‖` under a threshold when the
//! bound is far too large for a linear scan.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

type Q = BigRational;

fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Gram-Schmidt data: `mu[i][j]` for `j < i` and squared norms `|b*_i|^2`.
pub struct GramSchmidt {
    pub mu: Vec<Vec<Q>>,
    pub norms: Vec<Q>,
}

pub fn gram_schmidt(basis: &[Vec<BigInt>]) -> Result<GramSchmidt> {
    let n = basis.len();
    let mut stars: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let bi = to_q(&basis[i]);
        let mut s = bi.clone();
        for j in 0..i {
            let m = dot_q(&bi, &stars[j]) / &norms[j];
            for (sk, tk) in s.iter_mut().zip(&stars[j]) {
                *sk -= &m * tk;
            }
            mu[i][j] = m;
        }
        let ns = dot_q(&s, &s);
        if ns.is_zero() {
            return Err(Error::degenerate("lattice basis is linearly dependent"));
        }
        norms.push(ns);
        stars.push(s);
    }
    Ok(GramSchmidt { mu, norms })
}

/// LLL with parameter 3/4, in place.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) -> Result<()> {
    let n = basis.len();
    if n < 2 {
        return Ok(());
    }
    let delta = Q::new(3.into(), 4.into());
    let half = Q::new(1.into(), 2.into());
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let gs = gram_schmidt(basis)?;
            if gs.mu[k][j].abs() > half {
                let r = gs.mu[k][j].round().to_integer();
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
            }
        }
        let gs = gram_schmidt(basis)?;
        let m = &gs.mu[k][k - 1];
        if gs.norms[k] >= (&delta - m * m) * &gs.norms[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok(())
}

/// Calls `visit` with the coefficient vector and the lattice vector of every
/// nonzero point whose squared Euclidean norm is at most `r2`.
pub fn enumerate_ball(
    basis: &[Vec<BigInt>],
    r2: &Q,
    node_limit: u64,
    visit: &mut dyn FnMut(&[BigInt], &[BigInt]),
) -> Result<()> {
    let gs = gram_schmidt(basis)?;
    let n = basis.len();
    let mut coeffs = vec![BigInt::zero(); n];
    let mut nodes = 0u64;
    walk(basis, &gs, r2, n, Q::zero(), &mut coeffs, &mut nodes, node_limit, visit)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    basis: &[Vec<BigInt>],
    gs: &GramSchmidt,
    r2: &Q,
    level: usize,
    used: Q,
    coeffs: &mut Vec<BigInt>,
    nodes: &mut u64,
    node_limit: u64,
    visit: &mut dyn FnMut(&[BigInt], &[BigInt]),
) -> Result<()> {
    *nodes += 1;
    if *nodes > node_limit {
        return Err(Error::resource(format!("lattice enumeration exceeded {node_limit} nodes")));
    }
    if level == 0 {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Ok(());
        }
        let dim = basis[0].len();
        let mut v = vec![BigInt::zero(); dim];
        for (c, b) in coeffs.iter().zip(basis) {
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk += c * bk;
            }
        }
        visit(coeffs, &v);
        return Ok(());
    }
    let i = level - 1;
    let center: Q = -(i + 1..basis.len())
        .map(|j| Q::from_integer(coeffs[j].clone()) * &gs.mu[j][i])
        .sum::<Q>();
    let rem = r2 - &used;
    // |c - center| <= sqrt(rem / B_i) <= isqrt(ceil(rem / B_i)) + 1
    let ratio = (&rem / &gs.norms[i]).ceil().to_integer();
    let span = if ratio.is_positive() { ratio.sqrt() + BigInt::one() } else { BigInt::one() };
    let lo = (&center - Q::from_integer(span.clone())).ceil().to_integer();
    let hi = (&center + Q::from_integer(span)).floor().to_integer();
    let mut c = lo;
    while c <= hi {
        let off = Q::from_integer(c.clone()) - &center;
        let cost = &off * &off * &gs.norms[i];
        if cost <= rem {
            coeffs[i] = c.clone();
            walk(basis, gs, r2, i, &used + cost, coeffs, nodes, node_limit, visit)?;
        }
        c += 1;
    }
    coeffs[i] = BigInt::zero();
    Ok(())
}

/// Every `0 < q < q_max` with `max_i ‖q c_i‖ <= eps`, in increasing order.
pub fn small_multiples(center: &[Q], q_max: &BigInt, eps: &Q, node_limit: u64) -> Result<Vec<BigInt>> {
    if center.is_empty() {
        return Err(Error::Dimension("empty target vector".into()));
    }
    let d = center
        .iter()
        .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let within = |q: &BigInt| {
        center
            .iter()
            .all(|c| crate::exact::dist_nearest_int(&(c * Q::from_integer(q.clone()))) <= *eps)
    };
    if !eps.is_positive() {
        let mut out = Vec::new();
        let mut q = d.clone();
        while &q < q_max {
            out.push(q.clone());
            q += &d;
        }
        return Ok(out);
    }
    let (e, f) = (eps.numer().clone(), eps.denom().clone());
    let scale0 = &e * &d;
    let scale = &f * q_max;
    let dim = center.len() + 1;
    let mut basis = Vec::with_capacity(dim);
    let mut first = vec![scale0.clone()];
    first.extend(center.iter().map(|c| c.numer() * (&d / c.denom()) * &scale));
    basis.push(first);
    for i in 0..center.len() {
        let mut row = vec![BigInt::zero(); dim];
        row[i + 1] = -(&d * &scale);
        basis.push(row);
    }
    lll_reduce(&mut basis)?;
    let r = Q::from_integer(q_max * &scale0);
    let r2 = &r * &r * Q::from_integer(BigInt::from(dim));
    let mut out = Vec::new();
    enumerate_ball(&basis, &r2, node_limit, &mut |_, v| {
        let q = &v[0] / &scale0;
        if q.is_positive() && &q < q_max && within(&q) {
            out.push(q);
        }
    })?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn brute(basis: &[Vec<BigInt>], r2: i64, box_: i64) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        for a in -box_..=box_ {
            for b in -box_..=box_ {
                for c in -box_..=box_ {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let w: Vec<BigInt> = (0..3)
                        .map(|k| &basis[0][k] * a + &basis[1][k] * b + &basis[2][k] * c)
                        .collect();
                    let n2: BigInt = w.iter().map(|x| x * x).sum();
                    if n2 <= BigInt::from(r2) {
                        out.push(w);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn naive_multiples(center: &[Q], q_max: i64, eps: &Q) -> Vec<BigInt> {
        (1..q_max)
            .map(BigInt::from)
            .filter(|q| {
                center.iter().all(|c| {
                    let x = c * Q::from_integer(q.clone());
                    let fl = x.floor();
                    let fr = &x - &fl;
                    let dist = if fr > Q::new(1.into(), 2.into()) { Q::one() - fr } else { fr };
                    dist <= *eps
                })
            })
            .collect()
    }

    #[test]
    fn multiples_of_golden_ish_vector() {
        let c = vec![Q::new(5.into(), 12.into()), Q::new(70.into(), 169.into())];
        let eps = Q::new(1.into(), 40.into());
        assert_eq!(
            small_multiples(&c, &BigInt::from(3000), &eps, 1_000_000).unwrap(),
            naive_multiples(&c, 3000, &eps)
        );
        assert_eq!(
            small_multiples(&c, &BigInt::from(3000), &Q::zero(), 1_000_000).unwrap(),
            vec![BigInt::from(2028)]
        );
    }

    proptest! {
        #[test]
        fn multiples_match_scan(
            nums in proptest::collection::vec(0i64..500, 1..=3),
            den in 2i64..500,
            q_max in 2i64..2000,
            eps_den in 3i64..200,
        ) {
            let c: Vec<Q> = nums.iter().map(|&n| Q::new(n.into(), den.into())).collect();
            let eps = Q::new(1.into(), eps_den.into());
            prop_assert_eq!(
                small_multiples(&c, &BigInt::from(q_max), &eps, 10_000_000).unwrap(),
                naive_multiples(&c, q_max, &eps)
            );
        }
    }

    #[test]
    fn reduces_skewed_basis() {
        let mut b = vec![v(&[1, 0, 0]), v(&[1000, 1, 0]), v(&[3000, 7000, 1])];
        lll_reduce(&mut b).unwrap();
        let gs = gram_schmidt(&b).unwrap();
        for row in &b {
            assert!(row.iter().all(|x| x.abs() <= BigInt::from(1)));
        }
        assert_eq!(gs.norms.iter().product::<Q>(), Q::one());
    }

    proptest! {
        #[test]
        fn enumeration_matches_brute_force(
            rows in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 3), 3),
            r2 in 1i64..60,
        ) {
            let basis: Vec<Vec<BigInt>> = rows.iter().map(|r| v(r)).collect();
            prop_assume!(gram_schmidt(&basis).is_ok());
            let mut reduced = basis.clone();
            lll_reduce(&mut reduced).unwrap();
            let mut got = Vec::new();
            enumerate_ball(&reduced, &Q::from_integer(r2.into()), 1_000_000, &mut |_, w| got.push(w.to_vec())).unwrap();
            got.sort();
            for w in &brute(&basis, r2, 8) {
                prop_assert!(got.contains(w));
            }
            for w in &got {
                let n2: BigInt = w.iter().map(|x| x * x).sum();
                prop_assert!(n2 <= BigInt::from(r2));
            }
        }
    }
}
