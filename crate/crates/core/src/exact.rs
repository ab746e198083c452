//! Exact scalars, `Z^3` lattice points and certified enclosures.
//!
//! Every real quantity in the crate is an [`ExactRational`] (a canonical
//! `BigRational`); quantities only known up to a bound (a target vector
//! given by a convergent, a fractional power) travel as a
//! [`CertifiedScalar`] whose comparisons report [`Verdict::Inconclusive`]
//! instead of guessing.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; always in lowest terms with positive
/// denominator.
pub type ExactRational = BigRational;

/// Shorthand constructor for small rationals.
pub fn rat(numer: i64, denom: i64) -> ExactRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Nearest integer to `x`; on ties the smaller of the two candidates.
pub fn nearest_integer(x: &ExactRational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - BigRational::from_integer(floor.clone());
    // frac in [0, 1): move up only when strictly past the midpoint
    if frac * BigInt::from(2) > BigRational::one() {
        floor + 1
    } else {
        floor
    }
}

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
pub fn dist_nearest_int(x: &ExactRational) -> ExactRational {
    let frac = x - x.floor();
    let other = BigRational::one() - &frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// Sup-norm distance from `v` to the nearest point of `Z^d`.
pub fn dist_nearest_lattice(v: &[ExactRational]) -> Result<ExactRational> {
    v.iter()
        .map(dist_nearest_int)
        .max()
        .ok_or_else(|| Error::Dimension("empty vector".into()))
}

/// Point of `Z^3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint3 {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl LatticePoint3 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        LatticePoint3 {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn coords(&self) -> [&BigInt; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Sup-norm `max(|x|, |y|, |z|)`.
    pub fn norm(&self) -> BigInt {
        self.coords().into_iter().map(|c| c.abs()).max().unwrap()
    }

    pub fn dot(&self, other: &LatticePoint3) -> BigInt {
        &self.x * &other.x + &self.y * &other.y + &self.z * &other.z
    }

    /// Exterior (cross) product.
    pub fn wedge(&self, other: &LatticePoint3) -> LatticePoint3 {
        LatticePoint3 {
            x: &self.y * &other.z - &self.z * &other.y,
            y: &self.z * &other.x - &self.x * &other.z,
            z: &self.x * &other.y - &self.y * &other.x,
        }
    }

    pub fn scale(&self, k: &BigInt) -> LatticePoint3 {
        LatticePoint3 {
            x: &self.x * k,
            y: &self.y * k,
            z: &self.z * k,
        }
    }

    pub fn add(&self, other: &LatticePoint3) -> LatticePoint3 {
        LatticePoint3 {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            z: &self.z + &other.z,
        }
    }

    pub fn sub(&self, other: &LatticePoint3) -> LatticePoint3 {
        LatticePoint3 {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
            z: &self.z - &other.z,
        }
    }

    pub fn neg(&self) -> LatticePoint3 {
        LatticePoint3 {
            x: -&self.x,
            y: -&self.y,
            z: -&self.z,
        }
    }

    pub fn gcd(&self) -> BigInt {
        self.x.gcd(&self.y).gcd(&self.z)
    }

    /// Gcd of the absolute coordinates equals 1. The zero point is rejected.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain("primitivity of the zero point"));
        }
        Ok(self.gcd().is_one())
    }

    /// Affine image `(x/z, y/z)`; `None` when `z = 0`.
    pub fn affine(&self) -> Option<[ExactRational; 2]> {
        if self.z.is_zero() {
            return None;
        }
        Some([
            BigRational::new(self.x.clone(), self.z.clone()),
            BigRational::new(self.y.clone(), self.z.clone()),
        ])
    }
}

impl fmt::Display for LatticePoint3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub fn wedge(p: &LatticePoint3, q: &LatticePoint3) -> LatticePoint3 {
    p.wedge(q)
}

pub fn is_primitive(p: &LatticePoint3) -> Result<bool> {
    p.is_primitive()
}

/// `|P ∧ Q| / (|P| |Q|)` on projectivized points.
pub fn projective_distance(p: &LatticePoint3, q: &LatticePoint3) -> Result<ExactRational> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::domain("projective distance to the zero point"));
    }
    Ok(BigRational::new(p.wedge(q).norm(), p.norm() * q.norm()))
}

/// Outcome of comparing two certified quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Less,
    Greater,
    /// Both sides exact and equal.
    Equal,
    /// The enclosures overlap; the true order is undecided.
    Inconclusive,
}

/// Exact center with an exact, non-negative error radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedScalar {
    pub value: ExactRational,
    pub radius: ExactRational,
}

impl CertifiedScalar {
    pub fn new(value: ExactRational, radius: ExactRational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::domain("negative certification radius"));
        }
        Ok(CertifiedScalar { value, radius })
    }

    pub fn exact(value: ExactRational) -> Self {
        CertifiedScalar {
            value,
            radius: BigRational::zero(),
        }
    }

    /// Enclosure `[lo, hi]`, stored as midpoint and half-width.
    pub fn from_bounds(lo: ExactRational, hi: ExactRational) -> Self {
        debug_assert!(lo <= hi);
        let two = BigRational::from_integer(BigInt::from(2));
        CertifiedScalar {
            value: (&lo + &hi) / &two,
            radius: (hi - lo) / two,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn lo(&self) -> ExactRational {
        &self.value - &self.radius
    }

    pub fn hi(&self) -> ExactRational {
        &self.value + &self.radius
    }

    pub fn compare(&self, other: &CertifiedScalar) -> Verdict {
        if self.is_exact() && other.is_exact() {
            return match self.value.cmp(&other.value) {
                Ordering::Less => Verdict::Less,
                Ordering::Greater => Verdict::Greater,
                Ordering::Equal => Verdict::Equal,
            };
        }
        if self.hi() < other.lo() {
            Verdict::Less
        } else if self.lo() > other.hi() {
            Verdict::Greater
        } else {
            Verdict::Inconclusive
        }
    }

    /// Conclusively `self <= other`.
    pub fn certainly_le(&self, other: &CertifiedScalar) -> bool {
        self.hi() <= other.lo()
    }

    /// Conclusively `self < other`.
    pub fn certainly_lt(&self, other: &CertifiedScalar) -> bool {
        self.hi() < other.lo()
    }

    pub fn add(&self, other: &CertifiedScalar) -> CertifiedScalar {
        CertifiedScalar {
            value: &self.value + &other.value,
            radius: &self.radius + &other.radius,
        }
    }

    pub fn scale(&self, k: &ExactRational) -> CertifiedScalar {
        CertifiedScalar {
            value: &self.value * k,
            radius: &self.radius * k.abs(),
        }
    }

    /// Interval product.
    pub fn mul(&self, other: &CertifiedScalar) -> CertifiedScalar {
        if self.is_exact() && other.is_exact() {
            return CertifiedScalar::exact(&self.value * &other.value);
        }
        let (a, b, c, d) = (self.lo(), self.hi(), other.lo(), other.hi());
        let products = [&a * &c, &a * &d, &b * &c, &b * &d];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        CertifiedScalar::from_bounds(lo, hi)
    }

    /// Outward rounding onto a dyadic grid a factor `2^-bits` finer than the
    /// magnitude of the upper end. Keeps denominators of long sums small.
    pub fn round_dyadic(&self, bits: u32) -> CertifiedScalar {
        let hi = self.hi();
        let lo = self.lo();
        let mag = hi.abs().max(lo.abs());
        if mag.is_zero() {
            return self.clone();
        }
        let e = mag.numer().bits() as i64 - mag.denom().bits() as i64;
        let shift = bits as i64 + 2 - e;
        let scale = |x: &ExactRational| -> ExactRational {
            if shift >= 0 {
                x * BigRational::from_integer(BigInt::one() << shift as u64)
            } else {
                x / BigRational::from_integer(BigInt::one() << (-shift) as u64)
            }
        };
        let unscale = |n: BigInt| -> ExactRational {
            if shift >= 0 {
                BigRational::new(n, BigInt::one() << shift as u64)
            } else {
                BigRational::from_integer(n << (-shift) as u64)
            }
        };
        let l = unscale(scale(&lo).floor().to_integer());
        let h = unscale(scale(&hi).ceil().to_integer());
        if l == h {
            return CertifiedScalar::exact(l);
        }
        CertifiedScalar::from_bounds(l, h)
    }

    /// Clamp the lower end at zero (for quantities known to be non-negative).
    pub fn clamp_nonneg(&self) -> CertifiedScalar {
        if self.lo().is_negative() {
            CertifiedScalar::from_bounds(BigRational::zero(), self.hi().max(BigRational::zero()))
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for CertifiedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} ± {}", self.value, self.radius)
        }
    }
}

/// Target vector `θ ∈ T^d` known up to a sup-norm radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedVector {
    pub coords: Vec<ExactRational>,
    pub radius: ExactRational,
}

impl CertifiedVector {
    pub fn new(coords: Vec<ExactRational>, radius: ExactRational) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension("vector of dimension 0".into()));
        }
        if radius.is_negative() {
            return Err(Error::domain("negative certification radius"));
        }
        Ok(CertifiedVector { coords, radius })
    }

    pub fn exact(coords: Vec<ExactRational>) -> Result<Self> {
        Self::new(coords, BigRational::zero())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    /// Common denominator `D` of the center and the numerators of the
    /// fractional parts, so that `θ_i mod 1 = n_i / D` with `0 <= n_i < D`.
    pub fn residues(&self) -> (BigUint, Vec<BigUint>) {
        let denom = self
            .coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coords
            .iter()
            .map(|c| {
                let scaled = c.numer() * (&denom / c.denom());
                let reduced = scaled.mod_floor(&denom);
                reduced.to_biguint().expect("mod_floor is non-negative")
            })
            .collect();
        (denom.to_biguint().expect("positive denominator"), nums)
    }
}

/// `‖qθ‖` for the center of `θ`, with radius `q · θ.radius`.
pub fn certified_dist_nearest_lattice(q: &BigInt, theta: &CertifiedVector) -> Result<CertifiedScalar> {
    if q.sign() != Sign::Plus {
        return Err(Error::domain(format!("multiplier q = {q} must be positive")));
    }
    let qr = BigRational::from_integer(q.clone());
    let scaled: Vec<_> = theta.coords.iter().map(|c| c * &qr).collect();
    let value = dist_nearest_lattice(&scaled)?;
    Ok(CertifiedScalar {
        value,
        radius: &theta.radius * qr,
    })
}

/// `‖⟨Δ, θ⟩‖` for the center of `θ`; the radius is `|Δ|_1 · θ.radius`.
pub fn certified_linear_form(delta: &[BigInt], theta: &CertifiedVector) -> Result<CertifiedScalar> {
    if delta.len() != theta.dim() {
        return Err(Error::Dimension(format!(
            "linear form of length {} against vector of dimension {}",
            delta.len(),
            theta.dim()
        )));
    }
    let mut sum = BigRational::zero();
    let mut l1 = BigInt::zero();
    for (s, c) in delta.iter().zip(&theta.coords) {
        sum += c * BigRational::from_integer(s.clone());
        l1 += s.abs();
    }
    Ok(CertifiedScalar {
        value: dist_nearest_int(&sum),
        radius: &theta.radius * BigRational::from_integer(l1),
    })
}
