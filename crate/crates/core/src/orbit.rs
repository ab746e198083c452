//! Orbits of the translation `x ↦ x + θ` on `T^d` with certified hit detection.
//!
//! Points are stored as 256-bit integers in units of `2^-256`, so wrapping
//! addition is exact addition mod 1. Indices are `u128`. `θ` and `x_0` are
//! rounded to `precision_bits` (at most 256); the orbit error is `|x_0 - X_0| + n (|θ - Θ| + ρ)`, tracked in integer units
//! from the actual rounding errors and never above `2^-p + n (2^-p + ρ)`.
//! A step `n` is a hit when `‖x_n‖ <= n^{-1/δ}` holds for every point in the
//! error ball, a miss when it fails for every point, and inconclusive otherwise.
//!
//! Sample points come from ChaCha8 seeded with the config seed, one stream per
//! sample id; changing the generator changes every stored regression value.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ruint::aliases::U256;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{dist_nearest_lattice, CertifiedVector, ExactRational};
use crate::roots::{log2_bounds, nth_root_bounds};

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const MAX_PRECISION_BITS: u32 = 256;
const UNIT_BITS: u32 = 256;
const LOG_BITS: u32 = 48;
const F64_MARGIN: f64 = 1e-9;
const STAT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfig {
    pub theta: CertifiedVector,
    /// Target radius exponent: `r_n = n^{-1/δ}`.
    pub delta: ExactRational,
    pub n_max: u128,
    /// First index counted by [`hit_census`].
    pub n_lo: u128,
    pub samples: u64,
    pub seed: u64,
    pub precision_bits: u32,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl OrbitConfig {
    pub fn new(theta: CertifiedVector, delta: ExactRational, n_max: u128) -> Self {
        OrbitConfig {
            theta,
            delta,
            n_max,
            n_lo: 1,
            samples: 1,
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            threads: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Per-step error `2^-p + ρ`.
    pub fn step_error(&self) -> ExactRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.precision_bits) + &self.theta.radius
    }

    /// Rejects configurations whose accumulated error `N (2^-p + ρ)` is not
    /// below `10^-3 N^{-1/δ}`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.precision_bits == 0 || self.precision_bits > MAX_PRECISION_BITS {
            return Err(Error::domain(format!(
                "precision_bits = {} outside 1..={MAX_PRECISION_BITS}",
                self.precision_bits
            )));
        }
        if self.delta < BigRational::from_integer(BigInt::from(d)) {
            return Err(Error::domain(format!("δ = {} must be at least d = {d}", self.delta)));
        }
        let (a, b) = exponent_parts(&self.delta)?;
        if self.n_lo == 0 {
            return Err(Error::domain("n_lo must be at least 1"));
        }
        if self.n_max == 0 {
            return Ok(());
        }
        // (1000 N e)^a N^b < 1  ⇔  N e < 10^-3 N^{-b/a}
        let n = BigRational::from_integer(BigInt::from(self.n_max));
        let lhs = (BigRational::from_integer(BigInt::from(1000)) * &n * self.step_error()).pow(a as i32)
            * n.pow(b as i32);
        if lhs >= BigRational::one() {
            return Err(Error::resource(format!(
                "error budget exceeded: N·(2^-{} + ρ) with N = {} and ρ = {} is not below 10^-3·N^(-1/δ)",
                self.precision_bits, self.n_max, self.theta.radius
            )));
        }
        Ok(())
    }
}

/// `δ = a/b` as small integers.
fn exponent_parts(delta: &ExactRational) -> Result<(u32, u32)> {
    if !delta.is_positive() {
        return Err(Error::domain(format!("δ = {delta} must be positive")));
    }
    match (delta.numer().to_u32(), delta.denom().to_u32()) {
        (Some(a), Some(b)) if a <= 64 && b <= 64 => Ok((a, b)),
        _ => Err(Error::domain(format!("δ = {delta} needs numerator and denominator at most 64"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Hit,
    Miss,
    Inconclusive,
}

/// Fixed-point engine shared by every sample of a configuration.
struct Engine {
    theta: Vec<U256>,
    /// Bound on `|θ - Θ|` including the radius, in units.
    step_error: U256,
    a: u32,
    b: u32,
    inv_delta: f64,
}

fn u256_to_big(x: U256) -> BigUint {
    BigUint::from_bytes_le(&x.to_le_bytes::<32>())
}

/// Saturates at `U256::MAX`.
fn big_to_u256(x: &BigUint) -> U256 {
    U256::try_from_le_slice(&x.to_bytes_le()).unwrap_or(U256::MAX)
}

/// Rounds `x mod 1` to the nearest multiple of `2^-p`, in units of `2^-256`,
/// with the exact rounding error.
fn to_fixed(x: &ExactRational, p: u32) -> (U256, ExactRational) {
    let frac = x - x.floor();
    let ulp = BigRational::from_integer(BigInt::one() << p);
    let scaled = frac * &ulp;
    let k = (&scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let err = (scaled - BigRational::from_integer(k.clone())).abs() / ulp;
    let k = k.to_biguint().unwrap() % (BigUint::one() << p);
    (big_to_u256(&(k << (UNIT_BITS - p))), err)
}

/// Fixed-point coordinates and the sup of their rounding errors, in units.
fn fixed_point_of(x: &[ExactRational], p: u32) -> (Vec<U256>, U256) {
    let mut worst = BigRational::zero();
    let coords = x
        .iter()
        .map(|c| {
            let (k, e) = to_fixed(c, p);
            worst = worst.clone().max(e);
            k
        })
        .collect();
    (coords, to_units_ceil(&worst))
}

/// `ceil(x · 2^256)`, saturating.
fn to_units_ceil(x: &ExactRational) -> U256 {
    let v = (x * BigRational::from_integer(BigInt::one() << UNIT_BITS)).ceil().to_integer();
    big_to_u256(&v.to_biguint().unwrap_or_default())
}

const HALF: U256 = U256::from_limbs([0, 0, 0, 1 << 63]);

#[inline]
fn circ(x: U256) -> U256 {
    if x <= HALF {
        x
    } else {
        x.wrapping_neg()
    }
}

fn units_to_f64(x: U256) -> f64 {
    let bits = x.bit_len();
    if bits <= 64 {
        return x.as_limbs()[0] as f64 * 2f64.powi(-(UNIT_BITS as i32));
    }
    let top = (x >> (bits - 64)).as_limbs()[0];
    top as f64 * 2f64.powi(bits as i32 - 64 - UNIT_BITS as i32)
}

impl Engine {
    fn new(config: &OrbitConfig) -> Result<Engine> {
        config.validate()?;
        let (a, b) = exponent_parts(&config.delta)?;
        let p = config.precision_bits;
        let mut worst = BigRational::zero();
        let mut theta = Vec::with_capacity(config.dim());
        for c in &config.theta.coords {
            let (k, e) = to_fixed(c, p);
            worst = worst.max(e);
            theta.push(k);
        }
        Ok(Engine {
            theta,
            step_error: to_units_ceil(&(worst + &config.theta.radius)),
            a,
            b,
            inv_delta: b as f64 / a as f64,
        })
    }

    fn error_at(&self, x0_error: U256, n: u128) -> U256 {
        self.step_error.saturating_mul(U256::from(n)).saturating_add(x0_error)
    }

    fn start(&self, x0: &[U256], n: u128) -> Vec<U256> {
        x0.iter()
            .zip(&self.theta)
            .map(|(x, t)| x.wrapping_add(t.wrapping_mul(U256::from(n))))
            .collect()
    }

    /// `x · n^{b/a} <= 1` for `x` in units, i.e. `x^a n^b <= 2^{256a}`.
    fn within_radius(&self, x: U256, n: u128) -> bool {
        u256_to_big(x).pow(self.a) * BigUint::from(n).pow(self.b) <= BigUint::one() << (UNIT_BITS * self.a)
    }

    fn decide(&self, dist: U256, err: U256, n: u128) -> Decision {
        let hi = dist.saturating_add(err);
        let lo = dist.saturating_sub(err);
        let r = (n as f64).powf(-self.inv_delta);
        if units_to_f64(hi) < r * (1.0 - F64_MARGIN) {
            return Decision::Hit;
        }
        if units_to_f64(lo) > r * (1.0 + F64_MARGIN) {
            return Decision::Miss;
        }
        if self.within_radius(hi, n) {
            Decision::Hit
        } else if !lo.is_zero() && !self.within_radius(lo, n) {
            Decision::Miss
        } else {
            Decision::Inconclusive
        }
    }
}

fn sup_dist(x: &[U256]) -> U256 {
    x.iter().map(|&c| circ(c)).max().unwrap_or(U256::ZERO)
}

/// Sample point `id` of a seeded run, on the grid of mesh `2^-p`.
pub fn sample_point(seed: u64, id: u64, d: usize, precision_bits: u32) -> Vec<U256> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let mask = if precision_bits >= UNIT_BITS {
        U256::MAX
    } else {
        !(U256::MAX >> precision_bits as usize)
    };
    (0..d)
        .map(|_| U256::from_limbs([rng.random(), rng.random(), rng.random(), rng.random()]) & mask)
        .collect()
}

/// Exact value of a fixed-point coordinate.
pub fn fixed_to_rational(x: U256) -> ExactRational {
    BigRational::new(BigInt::from(u256_to_big(x)), BigInt::one() << UNIT_BITS)
}

/// Enclosure of `max_n (-log ‖x_n‖) / log n` over the scanned range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLawStat {
    pub lo: ExactRational,
    pub hi: ExactRational,
    /// Index attaining the upper enclosure.
    pub argmax: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitRecord {
    pub sample_id: u64,
    pub hits: Vec<u128>,
    pub inconclusive: u64,
    pub inconclusive_indices: Vec<u128>,
    /// Number of indices tested.
    pub tested: u64,
    pub stat: Option<LogLawStat>,
}

impl HitRecord {
    fn empty(sample_id: u64) -> HitRecord {
        HitRecord {
            sample_id,
            hits: Vec::new(),
            inconclusive: 0,
            inconclusive_indices: Vec::new(),
            tested: 0,
            stat: None,
        }
    }
}

struct StatCandidate {
    n: u128,
    dist: U256,
    err: U256,
    upper_f: f64,
}

/// Certified `(-log2 x) / log2 n` bounds for `x = dist ± err` in units of `2^-256`.
fn stat_bounds(dist: U256, err: U256, n: u128) -> Result<(ExactRational, ExactRational)> {
    if dist <= err {
        return Err(Error::precision(format!(
            "orbit is within the error {err}·2^-256 of a lattice point at n = {n}; distance cannot be bounded below"
        )));
    }
    let full = BigRational::from_integer(BigInt::from(UNIT_BITS));
    let (_, log_far) = log2_bounds(&u256_to_big(dist.saturating_add(err)), LOG_BITS)?;
    let (log_near, _) = log2_bounds(&u256_to_big(dist - err), LOG_BITS)?;
    let (ln_lo, ln_hi) = log2_bounds(&BigUint::from(n), LOG_BITS)?;
    let lo = (&full - log_far).max(BigRational::zero()) / ln_hi;
    let hi = (full - log_near) / ln_lo;
    Ok((lo, hi))
}

fn stat_f64(x: U256, n: u128) -> f64 {
    if x.is_zero() {
        return f64::INFINITY;
    }
    -units_to_f64(x).log2() / (n as f64).log2()
}

/// Walks `x_0 + nθ` for `n` in `[n_lo, n_hi]`, recording hits and optionally
/// the log-law enclosure over `n >= 2`.
fn run_orbit(
    engine: &Engine,
    sample_id: u64,
    (x0, x0_error): (&[U256], U256),
    (n_lo, n_hi): (u128, u128),
    want_stat: bool,
) -> Result<HitRecord> {
    let mut rec = HitRecord::empty(sample_id);
    if n_hi < n_lo {
        return Ok(rec);
    }
    let mut x = engine.start(x0, n_lo);
    let mut err = engine.error_at(x0_error, n_lo);
    let mut cands: Vec<StatCandidate> = Vec::new();
    let mut best_lower = f64::NEG_INFINITY;
    for n in n_lo..=n_hi {
        let dist = sup_dist(&x);
        match engine.decide(dist, err, n) {
            Decision::Hit => rec.hits.push(n),
            Decision::Miss => {}
            Decision::Inconclusive => {
                rec.inconclusive += 1;
                rec.inconclusive_indices.push(n);
            }
        }
        rec.tested += 1;
        if want_stat && n >= 2 {
            if dist <= err {
                stat_bounds(dist, err, n)?;
            }
            let upper_f = stat_f64(dist - err, n);
            if upper_f >= best_lower - STAT_MARGIN {
                let lower_f = stat_f64(dist.saturating_add(err), n);
                if lower_f > best_lower {
                    best_lower = lower_f;
                    cands.retain(|c| c.upper_f >= best_lower - STAT_MARGIN);
                }
                cands.push(StatCandidate { n, dist, err, upper_f });
            }
        }
        for (c, t) in x.iter_mut().zip(&engine.theta) {
            *c = c.wrapping_add(*t);
        }
        err = err.saturating_add(engine.step_error);
    }
    if want_stat && !cands.is_empty() {
        let mut lo = BigRational::zero();
        let mut hi: Option<(ExactRational, u128)> = None;
        for c in &cands {
            let (l, h) = stat_bounds(c.dist, c.err, c.n)?;
            lo = lo.max(l);
            if hi.as_ref().is_none_or(|(v, _)| h > *v) {
                hi = Some((h, c.n));
            }
        }
        let (hi, argmax) = hi.unwrap();
        rec.stat = Some(LogLawStat { lo, hi, argmax });
    }
    Ok(rec)
}

fn fixed_point(config: &OrbitConfig, x0: &[ExactRational]) -> Result<(Vec<U256>, U256)> {
    if x0.len() != config.dim() {
        return Err(Error::Dimension(format!(
            "starting point has {} coordinates, θ has {}",
            x0.len(),
            config.dim()
        )));
    }
    Ok(fixed_point_of(x0, config.precision_bits))
}

/// Hits of the orbit of `x0` for `1 <= n <= N_max`.
pub fn orbit_hits(config: &OrbitConfig, x0: &[ExactRational]) -> Result<HitRecord> {
    orbit_hits_in(config, x0, (1, config.n_max))
}

/// [`orbit_hits`] restricted to `lo <= n <= hi`.
pub fn orbit_hits_in(config: &OrbitConfig, x0: &[ExactRational], (lo, hi): (u128, u128)) -> Result<HitRecord> {
    let engine = Engine::new(config)?;
    check_range(config, lo, hi)?;
    let (x, e) = fixed_point(config, x0)?;
    run_orbit(&engine, 0, (&x, e), (lo, hi), false)
}

fn check_range(config: &OrbitConfig, lo: u128, hi: u128) -> Result<()> {
    if lo == 0 || hi > config.n_max {
        return Err(Error::domain(format!("index range {lo}..={hi} outside 1..={}", config.n_max)));
    }
    Ok(())
}

/// Slow exact evaluation of the orbit of the center of `θ`; no rounding and no
/// inconclusive steps.
pub fn orbit_hits_oracle(config: &OrbitConfig, x0: &[ExactRational]) -> Result<HitRecord> {
    orbit_hits_oracle_in(config, x0, (1, config.n_max))
}

/// [`orbit_hits_oracle`] restricted to `lo <= n <= hi`.
pub fn orbit_hits_oracle_in(
    config: &OrbitConfig,
    x0: &[ExactRational],
    (lo, hi): (u128, u128),
) -> Result<HitRecord> {
    let (a, b) = exponent_parts(&config.delta)?;
    if x0.len() != config.dim() {
        return Err(Error::Dimension("starting point and θ differ in dimension".into()));
    }
    check_range(config, lo, hi)?;
    let mut rec = HitRecord::empty(0);
    let start = BigRational::from_integer(BigInt::from(lo - 1));
    let mut x: Vec<ExactRational> = x0
        .iter()
        .zip(&config.theta.coords)
        .map(|(c, t)| {
            let v = c + t * &start;
            &v - v.floor()
        })
        .collect();
    for n in lo..=hi {
        for (c, t) in x.iter_mut().zip(&config.theta.coords) {
            *c += t;
            *c -= c.floor();
        }
    let dist = dist_nearest_lattice(&x)?;
        // dist <= n^{-b/a}  ⇔  dist^a n^b <= 1
        let lhs = dist.pow(a as i32) * BigRational::from_integer(BigInt::from(n).pow(b));
        if lhs <= BigRational::one() {
            rec.hits.push(n);
        }
        rec.tested += 1;
    }
    Ok(rec)
}

/// Enclosure of `max_{2<=n<=N} (-log ‖x_0 + nθ‖) / log n`.
pub fn log_law_stat(config: &OrbitConfig, x0: &[ExactRational]) -> Result<LogLawStat> {
    if config.n_max < 2 {
        return Err(Error::domain("log-law statistic needs N >= 2"));
    }
    let engine = Engine::new(config)?;
    let (x, e) = fixed_point(config, x0)?;
    let rec = run_orbit(&engine, 0, (&x, e), (2, config.n_max), true)?;
    rec.stat.ok_or_else(|| Error::internal("statistic missing after a non-empty scan"))
}

/// Runs `f` on a dedicated pool when a thread count is configured.
pub fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub n_lo: u128,
    pub n_hi: u128,
    pub seed: u64,
    pub records: Vec<HitRecord>,
    pub mean: ExactRational,
    pub median: ExactRational,
    pub q1: ExactRational,
    pub q3: ExactRational,
    pub inconclusive: u64,
    pub tested: u64,
}

impl CensusSummary {
    pub fn counts(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.hits.len() as u64).collect()
    }

    pub fn inconclusive_fraction(&self) -> ExactRational {
        if self.tested == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.inconclusive), BigInt::from(self.tested))
    }
}

/// Quantile of sorted data by linear interpolation at position `k (len - 1)`.
fn quantile(sorted: &[u64], k: ExactRational) -> ExactRational {
    if sorted.is_empty() {
        return BigRational::zero();
    }
    let pos = k * BigRational::from_integer(BigInt::from(sorted.len() - 1));
    let i = pos.floor().to_integer().to_usize().unwrap();
    let frac = &pos - pos.floor();
    let lo = BigRational::from_integer(BigInt::from(sorted[i]));
    if frac.is_zero() {
        return lo;
    }
    let hi = BigRational::from_integer(BigInt::from(sorted[i + 1]));
    &lo + (hi - &lo) * frac
}

/// Hit counts over `[n_lo, N_max]` for `M` seeded sample points, with the
/// log-law enclosure of each orbit. Records are ordered by sample id.
pub fn hit_census(config: &OrbitConfig) -> Result<CensusSummary> {
    let engine = Engine::new(config)?;
    let d = config.dim();
    let run = || -> Result<Vec<HitRecord>> {
        (0..config.samples)
            .into_par_iter()
            .map(|id| {
                let x0 = sample_point(config.seed, id, d, config.precision_bits);
                run_orbit(&engine, id, (&x0, U256::ZERO), (config.n_lo, config.n_max), true)
            })
            .collect()
    };
    let records = in_pool(config.threads, run)??;
    let mut counts: Vec<u64> = records.iter().map(|r| r.hits.len() as u64).collect();
    counts.sort_unstable();
    let total: u64 = counts.iter().sum();
    let mean = if counts.is_empty() {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(total), BigInt::from(counts.len()))
    };
    Ok(CensusSummary {
        n_lo: config.n_lo,
        n_hi: config.n_max,
        seed: config.seed,
        mean,
        median: quantile(&counts, BigRational::new(1.into(), 2.into())),
        q1: quantile(&counts, BigRational::new(1.into(), 4.into())),
        q3: quantile(&counts, BigRational::new(3.into(), 4.into())),
        inconclusive: records.iter().map(|r| r.inconclusive).sum(),
        tested: records.iter().map(|r| r.tested).sum(),
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    /// Requested window `[L, L')`.
    pub window: (u128, u128),
    /// Last index actually scanned; below `L' - 1` when truncated to `N_max`.
    pub scanned_to: u128,
    pub truncated: bool,
    pub samples: u64,
    pub hits: u64,
    pub inconclusive: u64,
    pub fraction: ExactRational,
    /// Upper bound on `1.96 sqrt(p (1 - p) / M)`.
    pub confidence_radius: ExactRational,
}

/// Monte Carlo estimate of the measure of `∪_{L <= l < L'} T^{-l} B(0, l^{-1/δ})`:
/// the fraction of seeded grid points whose orbit conclusively hits a target
/// in the window. Indices past `N_max` are not scanned.
pub fn bc_window_estimate(config: &OrbitConfig, window: (u128, u128)) -> Result<WindowEstimate> {
    let (l_lo, l_hi) = window;
    if config.samples == 0 {
        return Err(Error::domain("window estimate needs at least one sample"));
    }
    if l_lo == 0 || l_hi <= l_lo {
        return Err(Error::domain(format!("window [{l_lo}, {l_hi}) is empty or starts at 0")));
    }
    if l_lo > config.n_max {
        return Err(Error::resource(format!(
            "window starts at {l_lo}, beyond the iteration budget N = {}",
            config.n_max
        )));
    }
    let engine = Engine::new(config)?;
    let d = config.dim();
    let end = (l_hi - 1).min(config.n_max);
    let run = || {
        (0..config.samples)
            .into_par_iter()
            .map(|id| {
                let x0 = sample_point(config.seed, id, d, config.precision_bits);
                let mut x = engine.start(&x0, l_lo);
                let mut err = engine.error_at(U256::ZERO, l_lo);
                let mut unsure = false;
                for l in l_lo..=end {
                    match engine.decide(sup_dist(&x), err, l) {
                        Decision::Hit => return (true, false),
                        Decision::Inconclusive => unsure = true,
                        Decision::Miss => {}
                    }
                    for (c, t) in x.iter_mut().zip(&engine.theta) {
                        *c = c.wrapping_add(*t);
                    }
                    err = err.saturating_add(engine.step_error);
                }
                (false, unsure)
            })
            .collect::<Vec<_>>()
    };
    let outcomes = in_pool(config.threads, run)?;
    let hits = outcomes.iter().filter(|o| o.0).count() as u64;
    let inconclusive = outcomes.iter().filter(|o| o.1).count() as u64;
    let m = BigInt::from(config.samples);
    let fraction = BigRational::new(BigInt::from(hits), m.clone());
    let var = &fraction * (BigRational::one() - &fraction) / BigRational::from_integer(m);
    let (_, root) = nth_root_bounds(&var, 2, 32)?;
    Ok(WindowEstimate {
        window,
        scanned_to: end,
        truncated: end < l_hi - 1,
        samples: config.samples,
        hits,
        inconclusive,
        fraction,
        confidence_radius: BigRational::new(49.into(), 25.into()) * root,
    })
}
