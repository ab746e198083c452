//! Residues modulo the common denominator of a rational target vector.
//!
//! With `θ_i = n_i / D`, the distance `‖qθ_i‖` is `min(r, D - r) / D` for the
//! residue `r = q n_i mod D`, so scans only ever add residues. Denominators
//! below `2^127` run on `u128`; anything larger falls back to `BigUint`.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

pub trait ModRing: Sync {
    type E: Clone + Ord + Debug + Send + Sync;

    fn modulus(&self) -> BigUint;
    fn zero(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// `b - a` taken modulo D.
    fn sub(&self, b: &Self::E, a: &Self::E) -> Self::E {
        self.add(b, &self.neg(a))
    }
    /// Circular distance `min(a, D - a)` to zero.
    fn dist(&self, a: &Self::E) -> Self::E;
    fn to_big(&self, a: &Self::E) -> BigUint;
    /// Saturating embedding of an arbitrary non-negative integer.
    fn from_big(&self, a: &BigUint) -> Self::E;
    /// `a > b + slack` without wrap-around.
    fn exceeds(&self, a: &Self::E, b: &Self::E, slack: &Self::E) -> bool;
}

#[derive(Debug, Clone)]
pub struct U128Ring {
    d: u128,
}

impl U128Ring {
    pub fn new(d: &BigUint) -> Option<Self> {
        let d = d.to_u128()?;
        (d > 0 && d < 1u128 << 127).then_some(U128Ring { d })
    }
}

impl ModRing for U128Ring {
    type E = u128;

    fn modulus(&self) -> BigUint {
        BigUint::from(self.d)
    }
    fn zero(&self) -> u128 {
        0
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        let s = a + b;
        if s >= self.d {
            s - self.d
        } else {
            s
        }
    }
    fn neg(&self, a: &u128) -> u128 {
        if *a == 0 {
            0
        } else {
            self.d - a
        }
    }
    fn dist(&self, a: &u128) -> u128 {
        (*a).min(self.d - a)
    }
    fn to_big(&self, a: &u128) -> BigUint {
        BigUint::from(*a)
    }
    fn from_big(&self, a: &BigUint) -> u128 {
        a.to_u128().unwrap_or(u128::MAX)
    }
    fn exceeds(&self, a: &u128, b: &u128, slack: &u128) -> bool {
        match b.checked_add(*slack) {
            Some(t) => *a > t,
            None => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BigRing {
    d: BigUint,
}

impl BigRing {
    pub fn new(d: &BigUint) -> Self {
        assert!(!d.is_zero());
        BigRing { d: d.clone() }
    }
}

impl ModRing for BigRing {
    type E = BigUint;

    fn modulus(&self) -> BigUint {
        self.d.clone()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.d {
            s - &self.d
        } else {
            s
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.d - a
        }
    }
    fn dist(&self, a: &BigUint) -> BigUint {
        let other = &self.d - a;
        if *a <= other {
            a.clone()
        } else {
            other
        }
    }
    fn to_big(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn from_big(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn exceeds(&self, a: &BigUint, b: &BigUint, slack: &BigUint) -> bool {
        *a > b + slack
    }
}

/// Nearest element of `set` to `t` on the circle `Z/DZ`, as (distance, key).
pub fn circular_nearest<'a, R: ModRing, V>(
    ring: &R,
    set: &'a std::collections::BTreeMap<R::E, V>,
    t: &R::E,
) -> Option<(R::E, &'a R::E, &'a V)> {
    let succ = set.range(t.clone()..).next().or_else(|| set.iter().next());
    let pred = set.range(..=t.clone()).next_back().or_else(|| set.iter().next_back());
    let mut best: Option<(R::E, &R::E, &V)> = None;
    for (k, v) in succ.into_iter().chain(pred) {
        let dist = ring.dist(&ring.sub(k, t));
        if best.as_ref().is_none_or(|(d, bk, _)| dist < *d || (dist == *d && k < *bk)) {
            best = Some((dist, k, v));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn rings_agree() {
        let d = BigUint::from(1000003u32);
        let small = U128Ring::new(&d).unwrap();
        let big = BigRing::new(&d);
        let (mut a, mut b) = (0u128, BigUint::zero());
        let step = 777_777u128;
        for _ in 0..5000 {
            a = small.add(&a, &step);
            b = big.add(&b, &BigUint::from(step));
            assert_eq!(BigUint::from(a), b);
            assert_eq!(BigUint::from(small.dist(&a)), big.dist(&b));
        }
        assert!(U128Ring::new(&(BigUint::from(1u32) << 127u32)).is_none());
    }

    #[test]
    fn nearest_wraps_around() {
        let ring = U128Ring::new(&BigUint::from(100u32)).unwrap();
        let set: BTreeMap<u128, ()> = [5u128, 50, 97].into_iter().map(|k| (k, ())).collect();
        assert_eq!(circular_nearest(&ring, &set, &99).unwrap().0, 2);
        assert_eq!(circular_nearest(&ring, &set, &1).unwrap().0, 4);
        assert_eq!(*circular_nearest(&ring, &set, &30).unwrap().1, 50);
    }
}
