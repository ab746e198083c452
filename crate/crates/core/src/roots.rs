//! Certified fractional powers and base-2 logarithms of exact rationals.
//!
//! Everything here is integer arithmetic: roots come from `BigUint::nth_root`
//! on a scaled argument, logarithms from repeated squaring in fixed point.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{CertifiedScalar, ExactRational};

/// Default relative tolerance exponent for certified roots (2^-64).
pub const DEFAULT_ROOT_BITS: u32 = 64;

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative")
}

/// Enclosure `[lo, hi]` of `x^(1/n)` for `x >= 0`, with `hi - lo <= 2^-bits * lo`
/// (collapsed to a point when the root is exact).
pub fn nth_root_bounds(x: &ExactRational, n: u32, bits: u32) -> Result<(ExactRational, ExactRational)> {
    if n == 0 {
        return Err(Error::domain("zeroth root"));
    }
    if x.is_negative() {
        return Err(Error::domain(format!("root of negative value {x}")));
    }
    if x.is_zero() || n == 1 {
        return Ok((x.clone(), x.clone()));
    }
    // x^(1/n) = (a b^(n-1))^(1/n) / b
    let a = to_biguint(x.numer());
    let b = to_biguint(x.denom());
    let m = &a * b.pow(n - 1);
    let have = m.bits() / n as u64;
    let k = (bits as u64 + 2).saturating_sub(have);
    let scaled = &m << (n as u64 * k);
    let r = scaled.nth_root(n);
    let denom = BigInt::from(b) << k;
    let lo = BigRational::new(BigInt::from(r.clone()), denom.clone());
    if r.pow(n) == scaled {
        return Ok((lo.clone(), lo));
    }
    let hi = BigRational::new(BigInt::from(r + 1u32), denom);
    Ok((lo, hi))
}

/// `x^(1/n)` as a certified scalar.
pub fn nth_root(x: &ExactRational, n: u32, bits: u32) -> Result<CertifiedScalar> {
    let (lo, hi) = nth_root_bounds(x, n, bits)?;
    Ok(CertifiedScalar::from_bounds(lo, hi))
}

fn exponent_parts(e: &ExactRational) -> Result<(u32, u32, bool)> {
    let p = e.numer().abs().to_u32();
    let q = e.denom().to_u32();
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q, e.is_negative())),
        _ => Err(Error::domain(format!("exponent {e} too large"))),
    }
}

/// Enclosure of `x^e` over every `x` in `[lo, hi]` (`0 <= lo <= hi`), for a
/// rational exponent `e`. A negative exponent requires `lo > 0`.
pub fn pow_interval(
    lo: &ExactRational,
    hi: &ExactRational,
    e: &ExactRational,
    bits: u32,
) -> Result<CertifiedScalar> {
    if lo.is_negative() || lo > hi {
        return Err(Error::domain(format!("bad power base interval [{lo}, {hi}]")));
    }
    let (p, q, neg) = exponent_parts(e)?;
    if p == 0 {
        return Ok(CertifiedScalar::exact(BigRational::one()));
    }
    if neg && lo.is_zero() {
        return Err(Error::Degenerate("negative power of zero".into()));
    }
    let powi = |x: &ExactRational| -> ExactRational {
        BigRational::new(x.numer().pow(p), x.denom().pow(p))
    };
    let (l, _) = nth_root_bounds(&powi(lo), q, bits)?;
    let (_, h) = nth_root_bounds(&powi(hi), q, bits)?;
    if neg {
        Ok(CertifiedScalar::from_bounds(h.recip(), l.recip()))
    } else {
        Ok(CertifiedScalar::from_bounds(l, h))
    }
}

/// `x^e` for certified non-negative `x`.
pub fn pow_certified(x: &CertifiedScalar, e: &ExactRational, bits: u32) -> Result<CertifiedScalar> {
    let lo = x.lo().max(BigRational::zero());
    pow_interval(&lo, &x.hi(), e, bits)
}

/// `x^e` for exact non-negative `x`.
pub fn pow_exact(x: &ExactRational, e: &ExactRational, bits: u32) -> Result<CertifiedScalar> {
    pow_interval(x, x, e, bits)
}

/// Smallest integer `r` with `r^n >= x` for rational `x >= 0`.
pub fn ceil_nth_root(x: &ExactRational, n: u32) -> BigInt {
    let c = to_biguint(&x.ceil().to_integer());
    let mut r = c.nth_root(n);
    if r.pow(n) < c {
        r += 1u32;
    }
    BigInt::from(r)
}

// Fixed point with 62 fractional bits: values in [1, 2] square below 2^128.
const FRAC: u32 = 62;
const ONE_Q: u128 = 1 << FRAC;

/// Enclosure of `log2(x)` for an integer `x >= 1`, with width at most
/// `2^-(k-1)`. Bounds have denominator `2^k`.
pub fn log2_bounds(x: &BigUint, k: u32) -> Result<(ExactRational, ExactRational)> {
    if x.is_zero() {
        return Err(Error::domain("log2 of 0"));
    }
    let e = x.bits() - 1;
    // mantissa y = x / 2^e in [1, 2), truncated to FRAC bits
    let (m_lo, exact) = if e <= FRAC as u64 {
        ((x << (FRAC as u64 - e)).to_u128().unwrap(), true)
    } else {
        let shift = e - FRAC as u64;
        let top = (x >> shift).to_u128().unwrap();
        let rest_zero = x.trailing_zeros().unwrap_or(0) >= shift;
        (top, rest_zero)
    };
    let m_hi = if exact { m_lo } else { m_lo + 1 };
    let s_lo = frac_log2(m_lo, k, false);
    let s_hi = frac_log2(m_hi, k, true) + 1;
    let den = BigInt::one() << k;
    let base = BigInt::from(e) << k;
    Ok((
        BigRational::new(&base + BigInt::from(s_lo), den.clone()),
        BigRational::new(base + BigInt::from(s_hi), den),
    ))
}

/// First `k` binary digits of `log2(m / 2^FRAC)` for `m` in `[2^FRAC, 2^(FRAC+1)]`,
/// with downward (resp. upward) rounding of every squaring.
fn frac_log2(mut y: u128, k: u32, round_up: bool) -> u128 {
    debug_assert!(k <= 120);
    let mut digits: u128 = 0;
    for _ in 0..k {
        let sq = y * y;
        y = if round_up {
            (sq + ONE_Q - 1) >> FRAC
        } else {
            sq >> FRAC
        };
        digits <<= 1;
        if y >= 2 * ONE_Q {
            digits |= 1;
            y = if round_up { (y + 1) >> 1 } else { y >> 1 };
        }
    }
    digits
}
