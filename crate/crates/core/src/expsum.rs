//! Generic exponential sums: the normalized digit transform F_Y with its
//! digit-by-digit product evaluation, level-set and L1 statistics, the
//! large-sieve inequality, von-Mangoldt sums with the Vinogradov minor-arc
//! bound, and Dirichlet rational approximation by continued fractions.

use crate::nt::{pow10, PrimeBitmap};
use crate::phase::{e, mul_mod1, KahanComplex, KahanF64};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExpsumError {
    #[error("Y = {0} is not a positive power of 10")]
    BadScale(u64),
    #[error("{0}")]
    BadArgument(String),
    #[error("duplicate frequency points (delta = 0)")]
    DuplicatePoints,
    #[error("argument {0} exceeds the desk bound {1}")]
    RangeTooLarge(u64, u64),
}

fn decimal_length(y: u64) -> Result<u32, ExpsumError> {
    if y < 10 {
        return Err(ExpsumError::BadScale(y));
    }
    let m = y.ilog10();
    if pow10(m) != y {
        return Err(ExpsumError::BadScale(y));
    }
    Ok(m)
}

/// |sum over the ten digits minus a0 of e(d*t)| via one rotation.
#[inline]
fn digit_sum_abs(a0: u8, t: f64) -> f64 {
    let rot = e(t);
    let mut cur = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for d in 0u8..10 {
        if d != a0 {
            s += cur;
        }
        cur *= rot;
    }
    s.norm()
}

/// F_Y(theta) = 9^(-m) |sum_{n < Y, digits != a0} e(n theta)| for Y = 10^m,
/// evaluated as the exact per-digit product.
pub fn fy_eval(a0: u8, y: u64, theta: f64) -> Result<f64, ExpsumError> {
    if a0 > 9 {
        return Err(ExpsumError::BadArgument(format!("digit {a0}")));
    }
    let m = decimal_length(y)?;
    let mut prod = 1.0f64;
    for j in 0..m {
        let t = mul_mod1(pow10(j) as f64, theta);
        prod *= digit_sum_abs(a0, t) / 9.0;
    }
    Ok(prod)
}

/// F_Y(num/den) with all phases reduced in integer arithmetic.
pub fn fy_eval_at_fraction(a0: u8, y: u64, num: u64, den: u64) -> Result<f64, ExpsumError> {
    if a0 > 9 {
        return Err(ExpsumError::BadArgument(format!("digit {a0}")));
    }
    if den == 0 {
        return Err(ExpsumError::BadArgument("zero denominator".into()));
    }
    let m = decimal_length(y)?;
    let mut prod = 1.0f64;
    for j in 0..m {
        let r = (pow10(j) as u128 % den as u128) * (num as u128 % den as u128) % den as u128;
        let t = r as f64 / den as f64;
        prod *= digit_sum_abs(a0, t) / 9.0;
    }
    Ok(prod)
}

/// Counts of b in [0, Y) by dyadic size of F_Y(b/Y): bin i holds values in
/// (2^-(i+1), 2^-i], the final bin collects everything at or below its
/// threshold, zeros included.
pub fn fy_level_sets(a0: u8, y: u64, bin_count: usize) -> Result<Vec<u64>, ExpsumError> {
    if y > 10_000_000 {
        return Err(ExpsumError::RangeTooLarge(y, 10_000_000));
    }
    if bin_count == 0 {
        return Err(ExpsumError::BadArgument("bin_count = 0".into()));
    }
    decimal_length(y)?;
    let chunk = 65_536u64;
    let partial: Vec<Vec<u64>> = (0..y.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut bins = vec![0u64; bin_count];
            for b in ci * chunk..((ci + 1) * chunk).min(y) {
                let f = fy_eval_at_fraction(a0, y, b, y).expect("validated");
                let i = if f <= 0.0 {
                    bin_count - 1
                } else {
                    ((-f.log2()).floor() as usize).min(bin_count - 1)
                };
                bins[i] += 1;
            }
            bins
        })
        .collect();
    let mut bins = vec![0u64; bin_count];
    for part in partial {
        for (b, p) in bins.iter_mut().zip(part) {
            *b += p;
        }
    }
    Ok(bins)
}

/// Trapezoid estimate of the L1 norm of F_Y over [0, 1] on an
/// (oversample * Y)-point grid; F_Y is 1-periodic so this is the grid mean.
pub fn fy_l1(a0: u8, y: u64, oversample: u64) -> Result<f64, ExpsumError> {
    if oversample < 4 {
        return Err(ExpsumError::BadArgument(format!("oversample = {oversample} < 4")));
    }
    decimal_length(y)?;
    let n = oversample * y;
    let chunk = 65_536u64;
    let partial: Vec<f64> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut acc = KahanF64::new();
            for i in ci * chunk..((ci + 1) * chunk).min(n) {
                acc.add(fy_eval_at_fraction(a0, y, i, n).expect("validated"));
            }
            acc.value()
        })
        .collect();
    let mut acc = KahanF64::new();
    for p in partial {
        acc.add(p);
    }
    Ok(acc.value() / n as f64)
}

/// Large-sieve bilinear check: returns (lhs, rhs) for
/// lhs = sum_r |sum_{M < n <= M+N} a_n e(alpha_r n)|^2 and
/// rhs = (1/delta + N - 1) ||a||^2, with delta the minimal circle distance
/// between the points (1/2 for a single point).
pub fn large_sieve_check(
    points: &[f64],
    coeffs: &[Complex64],
    m_offset: i64,
    n_len: usize,
) -> Result<(f64, f64), ExpsumError> {
    if points.is_empty() {
        return Err(ExpsumError::BadArgument("no frequency points".into()));
    }
    if coeffs.len() != n_len {
        return Err(ExpsumError::BadArgument(format!(
            "coefficient count {} != N = {n_len}",
            coeffs.len()
        )));
    }
    let delta = if points.len() == 1 {
        0.5
    } else {
        let mut fracs: Vec<f64> = points.iter().map(|p| p.rem_euclid(1.0)).collect();
        fracs.sort_by(f64::total_cmp);
        let mut d = 1.0 - fracs[fracs.len() - 1] + fracs[0]; // wrap-around gap
        for w in fracs.windows(2) {
            d = d.min(w[1] - w[0]);
        }
        if d <= 0.0 {
            return Err(ExpsumError::DuplicatePoints);
        }
        d.min(0.5)
    };
    let mut lhs = KahanF64::new();
    for &alpha in points {
        let mut s = KahanComplex::new();
        for (k, &a) in coeffs.iter().enumerate() {
            let n = m_offset + 1 + k as i64;
            s.add(a * e(mul_mod1(n as f64, alpha)));
        }
        lhs.add(s.value().norm_sqr());
    }
    let norm_sq: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    let rhs = (1.0 / delta + n_len as f64 - 1.0) * norm_sq;
    Ok((lhs.value(), rhs))
}

/// sum_{n <= N} Lambda(n) e(n theta), exact von-Mangoldt weights.
pub fn prime_expsum(n: u64, theta: f64) -> Result<Complex64, ExpsumError> {
    if n > 100_000_000 {
        return Err(ExpsumError::RangeTooLarge(n, 100_000_000));
    }
    let bitmap = PrimeBitmap::up_to(n);
    let mut acc = KahanComplex::new();
    for p in bitmap.iter_primes() {
        let lp = (p as f64).ln();
        let mut pk = p;
        loop {
            acc.add(lp * e(mul_mod1(pk as f64, theta)));
            match pk.checked_mul(p) {
                Some(next) if next <= n => pk = next,
                _ => break,
            }
        }
    }
    Ok(acc.value())
}

/// The Vinogradov minor-arc envelope
/// (log N)^(7/2) (N q^(-1/2) + N^(4/5) + (Nq)^(1/2)) with constant 1.
pub fn vinogradov_bound(n: u64, q: u64) -> f64 {
    let nf = n as f64;
    let qf = q.max(1) as f64;
    nf.ln().powf(3.5) * (nf / qf.sqrt() + nf.powf(0.8) + (nf * qf).sqrt())
}

/// Dirichlet approximation: the smallest-denominator continued-fraction
/// convergent c/q of theta with q <= N and |theta - c/q| <= 1/(qN).
/// Exact over the dyadic value of theta.
pub fn dirichlet_approx(theta: f64, n: u64) -> Result<(u64, u64), ExpsumError> {
    if n == 0 {
        return Err(ExpsumError::BadArgument("N = 0".into()));
    }
    if !theta.is_finite() {
        return Err(ExpsumError::BadArgument(format!("theta = {theta}")));
    }
    let t = theta - theta.floor();
    if t <= 1.0 / n as f64 {
        return Ok((0, 1));
    }
    // exact dyadic decomposition t = num / 2^s with num odd-ish, s <= ~83
    let mut num = t;
    let mut s = 0u32;
    while num.fract() != 0.0 {
        num *= 2.0;
        s += 1;
    }
    let num = num as u128;
    let den = 1u128 << s;
    // the reported inequality, as callers evaluate it
    let contract_f64 = |h: u128, k: u128| -> bool {
        (t - h as f64 / k as f64).abs() <= 1.0 / (k as f64 * n as f64)
    };
    let contract_exact = |h: u128, k: u128| -> bool {
        // |num/den - h/k| <= 1/(kN)  <=>  |num k - h den| N <= den
        (num * k).abs_diff(h * den) * n as u128 <= den
    };
    let (mut prev_h, mut prev_k, mut cur_h, mut cur_k) = (1u128, 0u128, 0u128, 1u128);
    let (mut a, mut b) = (num, den); // remainder fraction a/b
    loop {
        if contract_f64(cur_h, cur_k) {
            return Ok((cur_h as u64, cur_k as u64));
        }
        if a == 0 {
            break;
        }
        let q = b / a;
        let next_h = q * cur_h + prev_h;
        let next_k = q * cur_k + prev_k;
        if next_k > n as u128 {
            break;
        }
        (prev_h, prev_k, cur_h, cur_k) = (cur_h, cur_k, next_h, next_k);
        (a, b) = (b % a, a);
    }
    // Dirichlet's theorem: the final convergent with k <= N satisfies the
    // exact inequality even if the f64 evaluation refused it at a tie.
    if contract_exact(cur_h, cur_k) {
        return Ok((cur_h as u64, cur_k as u64));
    }
    Err(ExpsumError::BadArgument(format!(
        "no admissible approximation found for theta = {theta}, N = {n}"
    )))
}
