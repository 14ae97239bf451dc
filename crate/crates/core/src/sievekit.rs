//! Sifted sets and their exponential sums, the Buchstab recursion, anchored
//! short-window weighted sums, and Bonferroni-truncated sieve weights.
//!
//! Threshold convention: an element qualifies when every prime factor of the
//! designated quotient exceeds `z` as a real number. "All factors >= p" is
//! expressed by sifting at `p - 0.5`, which keeps the Buchstab recursion an
//! exact integer identity.

use crate::digitset::{AnchorWindow, DigitSystem};
use crate::nt::{self, primes_up_to};
use crate::phase::{e, mul_mod1, KahanComplex};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SieveError {
    #[error("interval of length {0} exceeds the desk bound 1e9")]
    RangeTooLarge(u64),
    #[error("invalid sift specification: {0}")]
    BadSpec(String),
    #[error("weight table fails the sign property at n = {n} (divisor sum {sum})")]
    SignViolation { n: u64, sum: i64 },
    #[error("value {0} outside the anchored window")]
    OutsideWindow(u64),
}

/// A sifting problem: elements n of `[lo, hi)` with `divisor | n`, an
/// optional residue class n = s (mod q) with gcd(s, q) = 1, and the
/// requirement that every prime factor of n/divisor exceeds `z`.
#[derive(Debug, Clone, Copy)]
pub struct SiftSpec {
    pub lo: u64,
    pub hi: u64,
    pub divisor: u64,
    pub residue: Option<(u64, u64)>,
    pub z: f64,
}

/// Residue class for the quotient variable: `Unconstrained`, a reduced class
/// modulo q, or provably empty.
#[derive(Debug, Clone, Copy)]
enum QuotientClass {
    Unconstrained,
    Class(u64, u64),
    Empty,
}

impl SiftSpec {
    pub fn interval(lo: u64, hi: u64, z: f64) -> Self {
        SiftSpec { lo, hi, divisor: 1, residue: None, z }
    }

    pub fn with_divisor(lo: u64, hi: u64, divisor: u64, z: f64) -> Self {
        SiftSpec { lo, hi, divisor, residue: None, z }
    }

    fn validate(&self) -> Result<(), SieveError> {
        if self.hi.saturating_sub(self.lo) > 1_000_000_000 {
            return Err(SieveError::RangeTooLarge(self.hi - self.lo));
        }
        if self.divisor == 0 {
            return Err(SieveError::BadSpec("divisor must be positive".into()));
        }
        if let Some((s, q)) = self.residue {
            if q == 0 || nt::gcd(s, q) != 1 {
                return Err(SieveError::BadSpec(format!("residue ({s}, {q}) not reduced")));
            }
        }
        Ok(())
    }

    /// Quotient range [c_lo, c_hi) with c*divisor in [lo, hi).
    fn quotient_range(&self) -> (u64, u64) {
        let d = self.divisor;
        (self.lo.div_ceil(d).max(1), self.hi.div_ceil(d))
    }

    fn quotient_class(&self) -> QuotientClass {
        let Some((s, q)) = self.residue else { return QuotientClass::Unconstrained };
        if q == 1 {
            return QuotientClass::Unconstrained;
        }
        let d = self.divisor % q;
        if nt::gcd(d, q) != 1 {
            // d*c = s (mod q) is unsolvable when gcd(d, q) > 1 and gcd(s, q) = 1
            return QuotientClass::Empty;
        }
        let inv = inv_mod(d, q).expect("coprime");
        QuotientClass::Class(s % q * inv % q, q)
    }
}

impl QuotientClass {
    #[inline]
    fn matches(&self, c: u64) -> bool {
        match *self {
            QuotientClass::Unconstrained => true,
            QuotientClass::Class(s, q) => c % q == s,
            QuotientClass::Empty => false,
        }
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

const SEGMENT: usize = 1 << 20;

/// Drive `f` over every c in [c_lo, c_hi) whose prime factors all exceed z
/// (skipping 2 and 5 as sieving primes when `skip_ten`). c = 1 qualifies.
fn for_each_sifted(c_lo: u64, c_hi: u64, z: f64, skip_ten: bool, mut f: impl FnMut(u64)) {
    if c_hi <= c_lo {
        return;
    }
    let z_floor = if z < 2.0 { 0 } else { z.floor() as u64 };
    let sieve_primes: Vec<u64> = if z_floor < 2 {
        Vec::new()
    } else {
        primes_up_to(z_floor.min(c_hi))
            .into_iter()
            .filter(|&p| p as f64 <= z && !(skip_ten && (p == 2 || p == 5)))
            .collect()
    };
    let mut seg_lo = c_lo;
    let mut marked = vec![false; SEGMENT];
    while seg_lo < c_hi {
        let seg_hi = (seg_lo + SEGMENT as u64).min(c_hi);
        let len = (seg_hi - seg_lo) as usize;
        marked[..len].fill(false);
        for &p in &sieve_primes {
            let mut m = seg_lo.div_ceil(p) * p;
            while m < seg_hi {
                marked[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for (i, &hit) in marked[..len].iter().enumerate() {
            if !hit {
                f(seg_lo + i as u64);
            }
        }
        seg_lo = seg_hi;
    }
}

/// S(C, z): exact count of the sifted set described by `spec`.
pub fn sift_count(spec: &SiftSpec) -> Result<u64, SieveError> {
    spec.validate()?;
    let (c_lo, c_hi) = spec.quotient_range();
    let class = spec.quotient_class();
    let mut count = 0u64;
    for_each_sifted(c_lo, c_hi, spec.z, false, |c| {
        if class.matches(c) {
            count += 1;
        }
    });
    Ok(count)
}

/// S(C, z, theta) = sum over the sifted set of e(n theta), phases at the
/// universe elements n = c * divisor.
pub fn sift_expsum(spec: &SiftSpec, theta: f64) -> Result<Complex64, SieveError> {
    spec.validate()?;
    let (c_lo, c_hi) = spec.quotient_range();
    let class = spec.quotient_class();
    let d = spec.divisor as f64;
    let mut acc = KahanComplex::new();
    for_each_sifted(c_lo, c_hi, spec.z, false, |c| {
        if class.matches(c) {
            acc.add(e(mul_mod1(c as f64 * d, theta)));
        }
    });
    Ok(acc.value())
}

/// Both sides of the Buchstab recursion over the interval [lo, hi):
/// S(C, u2, theta) against S(C, u1, theta) minus the sum over primes
/// u1 < p <= u2 of the lpf = p stratum (quotients with all factors >= p).
pub fn buchstab_identity_expsum(
    lo: u64,
    hi: u64,
    u1: f64,
    u2: f64,
    theta: f64,
) -> Result<(Complex64, Complex64), SieveError> {
    if u1 >= u2 {
        return Err(SieveError::BadSpec(format!("need u1 < u2, got ({u1}, {u2})")));
    }
    let lhs = sift_expsum(&SiftSpec::interval(lo, hi, u2), theta)?;
    let mut rhs = sift_expsum(&SiftSpec::interval(lo, hi, u1), theta)?;
    for p in primes_up_to(u2.floor() as u64) {
        let pf = p as f64;
        if pf <= u1 || pf > u2 {
            continue;
        }
        let stratum = SiftSpec { lo, hi, divisor: p, residue: None, z: pf - 0.5 };
        rhs -= sift_expsum(&stratum, theta)?;
    }
    Ok((lhs, rhs))
}

/// Integer-exact version of `buchstab_identity_expsum` at theta = 0.
pub fn buchstab_identity_counts(
    lo: u64,
    hi: u64,
    u1: f64,
    u2: f64,
) -> Result<(u64, i64), SieveError> {
    if u1 >= u2 {
        return Err(SieveError::BadSpec(format!("need u1 < u2, got ({u1}, {u2})")));
    }
    let lhs = sift_count(&SiftSpec::interval(lo, hi, u2))?;
    let mut rhs = sift_count(&SiftSpec::interval(lo, hi, u1))? as i64;
    for p in primes_up_to(u2.floor() as u64) {
        let pf = p as f64;
        if pf <= u1 || pf > u2 {
            continue;
        }
        let stratum = SiftSpec { lo, hi, divisor: p, residue: None, z: pf - 0.5 };
        rhs -= sift_count(&stratum)? as i64;
    }
    Ok((lhs, rhs))
}

/// w*_n = 1_{A*}(n) - kappa_A #A* / #B* for n in the anchored window.
pub fn w_star(sys: &DigitSystem, aw: &AnchorWindow, n: u64) -> Result<f64, SieveError> {
    if !aw.in_window(n) {
        return Err(SieveError::OutsideWindow(n));
    }
    let indicator = if sys.contains(n).expect("window inside [0, X)") { 1.0 } else { 0.0 };
    Ok(indicator - w_star_mean(sys, aw))
}

fn w_star_mean(sys: &DigitSystem, aw: &AnchorWindow) -> f64 {
    sys.kappa().as_f64() * aw.a_star_count(sys) as f64 / aw.b_star_count() as f64
}

/// S*_d(z, theta): the anchored-window weighted sifted sum with phases at
/// the quotients, i.e. S(A*_d, z, theta) - (kappa #A*/#B*) S(B*_d, z, theta).
pub fn sd_star(
    sys: &DigitSystem,
    aw: &AnchorWindow,
    d: u64,
    z: f64,
    theta: f64,
) -> Result<Complex64, SieveError> {
    if d == 0 {
        return Err(SieveError::BadSpec("divisor must be positive".into()));
    }
    let (b_lo, b_hi) = aw.window();
    let mean = w_star_mean(sys, aw);
    let c_lo = b_lo.div_ceil(d).max(1);
    let c_hi = b_hi.div_ceil(d);
    let mut acc = KahanComplex::new();
    for_each_sifted(c_lo, c_hi, z, false, |c| {
        let n = c * d;
        let indicator = if sys.contains(n).expect("window inside [0, X)") { 1.0 } else { 0.0 };
        acc.add((indicator - mean) * e(mul_mod1(c as f64, theta)));
    });
    Ok(acc.value())
}

/// Which Bonferroni truncation a weight table realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Upper,
    Lower,
}

/// Sieve weights lambda(t) on squarefree support below `y`.
///
/// Bonferroni tables vanish off integers coprime to 10 and truncate the
/// Moebius function by the number of prime factors; the untruncated table is
/// plain Moebius and turns the weighted sum into the Legendre identity.
#[derive(Debug, Clone, Copy)]
pub struct WeightTable {
    y: f64,
    max_factors: Option<u32>,
    parity: Option<Parity>,
    include_ten_primes: bool,
}

impl WeightTable {
    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    /// Number of prime factors at which the truncation cuts, if truncated.
    pub fn order(&self) -> Option<u32> {
        self.max_factors
    }

    pub fn lambda(&self, t: u64) -> i32 {
        if t == 0 {
            return 0;
        }
        if t == 1 {
            return 1;
        }
        if t as f64 >= self.y {
            return 0;
        }
        if !self.include_ten_primes && nt::gcd(t, 10) > 1 {
            return 0;
        }
        let factors = nt::factorize(t);
        if factors.iter().any(|&(_, e)| e > 1) {
            return 0;
        }
        let nu = factors.len() as u32;
        if let Some(m) = self.max_factors {
            if nu > m {
                return 0;
            }
        }
        if nu % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Materialized nonzero entries with t < limit.
    pub fn entries_below(&self, limit: u64) -> BTreeMap<u64, i32> {
        (1..limit)
            .filter_map(|t| {
                let l = self.lambda(t);
                (l != 0).then_some((t, l))
            })
            .collect()
    }

    fn divisor_sum(&self, n: u64) -> i64 {
        let primes: Vec<u64> = nt::factorize(n).into_iter().map(|(p, _)| p).collect();
        let mut sum = 0i64;
        for mask in 0u32..(1 << primes.len()) {
            let mut t = 1u64;
            for (i, &p) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t *= p;
                }
            }
            sum += self.lambda(t) as i64;
        }
        sum
    }
}

/// Bonferroni truncation of Moebius: lambda(t) = mu(t) for squarefree t
/// coprime to 10 with at most 2r (upper) or 2r+1 (lower) prime factors and
/// t < y. The sign property is validated exhaustively for n <= 10^4 coprime
/// to 10; failure means y cuts inside a truncation level.
pub fn brun_weights(y: f64, r: u32, parity: Parity) -> Result<WeightTable, SieveError> {
    if y < 2.0 {
        return Err(SieveError::BadSpec(format!("support bound y = {y} < 2")));
    }
    let max_factors = match parity {
        Parity::Upper => 2 * r,
        Parity::Lower => 2 * r + 1,
    };
    let table = WeightTable {
        y,
        max_factors: Some(max_factors),
        parity: Some(parity),
        include_ten_primes: false,
    };
    for n in 2..=10_000u64 {
        if nt::gcd(n, 10) != 1 {
            continue;
        }
        let sum = table.divisor_sum(n);
        let ok = match parity {
            Parity::Upper => sum >= 0,
            Parity::Lower => sum <= 0,
        };
        if !ok {
            return Err(SieveError::SignViolation { n, sum });
        }
    }
    Ok(table)
}

/// The untruncated Moebius table (Legendre sieve), all primes included.
pub fn legendre_weights() -> WeightTable {
    WeightTable { y: f64::INFINITY, max_factors: None, parity: None, include_ten_primes: true }
}

/// Squarefree t dividing P(z) (product of sieving primes <= z from the
/// table's prime pool) with t < bound and lambda(t) != 0.
fn weight_support(w: &WeightTable, z: f64, bound: u64) -> Vec<(u64, i32)> {
    let primes: Vec<u64> = if z < 2.0 {
        Vec::new()
    } else {
        primes_up_to(z.floor() as u64)
            .into_iter()
            .filter(|&p| p as f64 <= z && (w.include_ten_primes || (p != 2 && p != 5)))
            .collect()
    };
    let cap = if w.y < bound as f64 { w.y as u64 } else { bound };
    let mut out = vec![(1u64, 1i32)];
    let mut stack = vec![(0usize, 1u64, 0u32)];
    while let Some((start, prod, nu)) = stack.pop() {
        if let Some(m) = w.max_factors {
            if nu >= m {
                continue;
            }
        }
        for (i, &p) in primes.iter().enumerate().skip(start) {
            let Some(next) = prod.checked_mul(p) else { break };
            if next >= cap {
                break;
            }
            let sign = if (nu + 1) % 2 == 0 { 1 } else { -1 };
            out.push((next, sign));
            stack.push((i + 1, next, nu + 1));
        }
    }
    out
}

/// Weighted sifted exponential sum
/// sum_{n in C} e(n theta) * sum_{t | n, t | P(z)} lambda(t).
pub fn weighted_sift_expsum(
    spec: &SiftSpec,
    weights: &WeightTable,
    theta: f64,
) -> Result<Complex64, SieveError> {
    spec.validate()?;
    let support = weight_support(weights, spec.z, spec.hi.max(1));
    let mut acc = KahanComplex::new();
    for (t, sign) in support {
        let Some(step) = t.checked_mul(spec.divisor) else { continue };
        let mut n = spec.lo.div_ceil(step).max(1) * step;
        while n < spec.hi {
            if spec.residue.map_or(true, |(s, q)| n % q == s) {
                acc.add(sign as f64 * e(mul_mod1(n as f64, theta)));
            }
            n += step;
        }
    }
    Ok(acc.value())
}

/// Integer-exact weighted count (theta = 0 specialization).
pub fn weighted_sift_count(spec: &SiftSpec, weights: &WeightTable) -> Result<i64, SieveError> {
    spec.validate()?;
    let support = weight_support(weights, spec.z, spec.hi.max(1));
    let mut total = 0i64;
    for (t, sign) in support {
        let Some(step) = t.checked_mul(spec.divisor) else { continue };
        if spec.residue.is_some() {
            let mut n = spec.lo.div_ceil(step).max(1) * step;
            while n < spec.hi {
                if spec.residue.map_or(true, |(s, q)| n % q == s) {
                    total += sign as i64;
                }
                n += step;
            }
        } else {
            let first = spec.lo.div_ceil(step).max(1);
            let last = spec.hi.div_ceil(step);
            if last > first {
                total += sign as i64 * (last - first) as i64;
            }
        }
    }
    Ok(total)
}

/// #{n in [lo, hi) : p | n and p coprime to 10 imply p > z}: the sifted
/// count matching the Bonferroni tables' prime pool.
pub fn sift_count_coprime_ten(lo: u64, hi: u64, z: f64) -> u64 {
    let mut count = 0u64;
    for_each_sifted(lo.max(1), hi, z, true, |_| count += 1);
    count
}
