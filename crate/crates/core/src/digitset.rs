//! Missing-digit integer systems.
//!
//! A `DigitSystem` fixes an excluded decimal digit `a0` and a length `k`, and
//! represents the set of integers in `[0, 10^k)` whose k-digit expansion
//! (leading zeros included) avoids `a0`. The anchored short window of
//! `AnchorWindow` selects a subinterval of length `10^(k-H)` whose top `H`
//! digits are pinned to a fixed admissible prefix near `5*10^(k-1)`, so that
//! membership of `anchor + m` factorizes through membership of `m` alone.

use crate::nt::{pow10, Rational};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigitError {
    #[error("digit must be in 0..=9, got {0}")]
    BadDigit(u8),
    #[error("k must be in 1..=18, got {0}")]
    BadLength(u32),
    #[error("value {value} outside [0, {limit})")]
    OutOfRange { value: u64, limit: u64 },
    #[error("window length H={h} invalid for k={k} (need {min}..=k)")]
    BadWindow { h: u32, k: u32, min: u32 },
}

/// The missing-digit universe at scale X = 10^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitSystem {
    a0: u8,
    k: u32,
    x: u64,
}

impl DigitSystem {
    pub fn new(a0: u8, k: u32) -> Result<Self, DigitError> {
        if a0 > 9 {
            return Err(DigitError::BadDigit(a0));
        }
        if k == 0 || k > 18 {
            return Err(DigitError::BadLength(k));
        }
        Ok(DigitSystem { a0, k, x: pow10(k) })
    }

    pub fn excluded_digit(&self) -> u8 {
        self.a0
    }

    pub fn digit_count(&self) -> u32 {
        self.k
    }

    /// X = 10^k.
    pub fn modulus(&self) -> u64 {
        self.x
    }

    /// 9^k, the number of admissible digit strings.
    pub fn member_count(&self) -> u64 {
        9u64.pow(self.k)
    }

    /// True iff no digit of `n` over positions `0..k-1` (leading zeros
    /// included) equals the excluded digit.
    pub fn contains(&self, n: u64) -> Result<bool, DigitError> {
        if n >= self.x {
            return Err(DigitError::OutOfRange { value: n, limit: self.x });
        }
        let mut m = n;
        for _ in 0..self.k {
            if (m % 10) as u8 == self.a0 {
                return Ok(false);
            }
            m /= 10;
        }
        Ok(true)
    }

    /// Exact `#{n < m : contains(n)}` by digit dynamic programming.
    pub fn count_below(&self, m: u64) -> Result<u64, DigitError> {
        if m > self.x {
            return Err(DigitError::OutOfRange { value: m, limit: self.x });
        }
        if m == self.x {
            return Ok(self.member_count());
        }
        let mut count = 0u64;
        for i in (0..self.k).rev() {
            let d = ((m / pow10(i)) % 10) as u8;
            let mut choices = d as u64;
            if self.a0 < d {
                choices -= 1;
            }
            count += choices * 9u64.pow(i);
            if d == self.a0 {
                // the prefix itself is blocked; nothing below it continues
                return Ok(count);
            }
        }
        Ok(count)
    }

    /// Members of `[lo, hi)` in increasing order.
    pub fn enumerate(&self, lo: u64, hi: u64) -> Result<Vec<u64>, DigitError> {
        if hi > self.x {
            return Err(DigitError::OutOfRange { value: hi, limit: self.x + 1 });
        }
        Ok((lo..hi).filter(|&n| self.contains(n).unwrap()).collect())
    }

    /// The local density constant kappa_A: 10(phi(10)-1)/(9 phi(10)) = 5/6
    /// when gcd(10, a0) = 1, else 10/9.
    pub fn kappa(&self) -> Rational {
        if crate::nt::gcd(10, self.a0 as u64) == 1 {
            let phi10 = crate::nt::euler_phi(10);
            Rational::new(10 * (phi10 - 1), 9 * phi10)
        } else {
            Rational::new(10, 9)
        }
    }

    /// Split `n` into the top `H` digit positions and the rest:
    /// `n = n_h1 + n_h2` with `n_h1` a multiple of `10^(k-H)`.
    pub fn split_digits(&self, n: u64, h: u32) -> Result<(u64, u64), DigitError> {
        if n >= self.x {
            return Err(DigitError::OutOfRange { value: n, limit: self.x });
        }
        if h == 0 || h > self.k {
            return Err(DigitError::BadWindow { h, k: self.k, min: 1 });
        }
        let base = pow10(self.k - h);
        let hi = n / base * base;
        Ok((hi, n - hi))
    }

    /// Build the anchored window of length `10^(k-H)`.
    ///
    /// The anchor prefix is "49" except for the excluded digits that clash
    /// with it: a0 = 4 uses "509" and a0 = 9 uses "50" (the only prefixes near
    /// 5*10^(k-1) avoiding those digits). Remaining window positions are
    /// filled with 0, or with 1 when a0 = 0.
    pub fn make_anchor(&self, h: u32) -> Result<AnchorWindow, DigitError> {
        if h < 3 || h > self.k {
            return Err(DigitError::BadWindow { h, k: self.k, min: 3 });
        }
        self.build_anchor(h)
    }

    fn build_anchor(&self, h: u32) -> Result<AnchorWindow, DigitError> {
        let prefix: &[u8] = match self.a0 {
            4 => &[5, 0, 9],
            9 => &[5, 0],
            _ => &[4, 9],
        };
        if prefix.len() as u32 > h {
            return Err(DigitError::BadWindow { h, k: self.k, min: prefix.len() as u32 });
        }
        let fill: u8 = if self.a0 == 0 { 1 } else { 0 };
        let mut n_tilde = 0u64;
        for i in 0..h {
            let d = *prefix.get(i as usize).unwrap_or(&fill);
            n_tilde = n_tilde * 10 + d as u64;
        }
        let base = pow10(self.k - h);
        let n_star = n_tilde * base;
        let aw = AnchorWindow { h, n_star, b_lo: n_star, b_hi: n_star + base };
        debug_assert!(aw.anchor_bound_holds(self.k));
        Ok(aw)
    }

    /// Anchor construction without the H >= 3 floor; used for very small k
    /// where the theorem-scale window does not fit. a0 = 4 still needs H >= 3.
    pub fn make_anchor_relaxed(&self, h: u32) -> Result<AnchorWindow, DigitError> {
        if h < 2 || h > self.k {
            return Err(DigitError::BadWindow { h, k: self.k, min: 2 });
        }
        self.build_anchor(h)
    }
}

/// A short interval `B* = [n*, n* + 10^(k-H))` anchored below a fixed
/// admissible digit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorWindow {
    h: u32,
    n_star: u64,
    b_lo: u64,
    b_hi: u64,
}

impl AnchorWindow {
    /// Assemble a window from parts, validating the arithmetic invariants.
    pub fn from_parts(n_star: u64, h: u32, k: u32) -> Result<Self, DigitError> {
        if h == 0 || h > k {
            return Err(DigitError::BadWindow { h, k, min: 1 });
        }
        let base = pow10(k - h);
        if n_star % base != 0 || n_star >= pow10(k) {
            return Err(DigitError::OutOfRange { value: n_star, limit: pow10(k) });
        }
        let aw = AnchorWindow { h, n_star, b_lo: n_star, b_hi: n_star + base };
        if !aw.anchor_bound_holds(k) {
            return Err(DigitError::OutOfRange { value: n_star, limit: pow10(k) });
        }
        Ok(aw)
    }

    fn anchor_bound_holds(&self, k: u32) -> bool {
        if k < 2 {
            return true;
        }
        // |n* - 5*10^(k-1)| <= (3/2)*10^(k-2), checked as 2|..| <= 3*10^(k-2)
        let center = 5 * pow10(k - 1);
        let dist = self.n_star.abs_diff(center);
        2 * dist <= 3 * pow10(k - 2)
    }

    pub fn window_digits(&self) -> u32 {
        self.h
    }

    pub fn n_star(&self) -> u64 {
        self.n_star
    }

    /// Window bounds `[lo, hi)`.
    pub fn window(&self) -> (u64, u64) {
        (self.b_lo, self.b_hi)
    }

    /// #B* = 10^(k-H).
    pub fn b_star_count(&self) -> u64 {
        self.b_hi - self.b_lo
    }

    /// #A* = #(A  intersect  B*), exact via digit counting.
    pub fn a_star_count(&self, sys: &DigitSystem) -> u64 {
        sys.count_below(self.b_hi).unwrap() - sys.count_below(self.b_lo).unwrap()
    }

    pub fn in_window(&self, n: u64) -> bool {
        (self.b_lo..self.b_hi).contains(&n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_examples() {
        let s = DigitSystem::new(7, 3).unwrap();
        assert_eq!(s.contains(123), Ok(true));
        assert_eq!(s.contains(177), Ok(false));
        let s0 = DigitSystem::new(0, 3).unwrap();
        assert_eq!(s0.contains(105), Ok(false));
        // leading zeros count as digits
        assert_eq!(s0.contains(15), Ok(false));
        assert!(s.contains(1000).is_err());
    }

    #[test]
    fn count_below_brute_force() {
        for a0 in 0..=9u8 {
            let s = DigitSystem::new(a0, 3).unwrap();
            let mut running = 0u64;
            for m in 0..=1000u64 {
                assert_eq!(s.count_below(m).unwrap(), running, "a0={a0} m={m}");
                if m < 1000 && s.contains(m).unwrap() {
                    running += 1;
                }
            }
            assert_eq!(s.count_below(1000).unwrap(), 9u64.pow(3));
        }
    }

    #[test]
    fn count_below_monotone_and_total() {
        let s = DigitSystem::new(7, 5).unwrap();
        let mut prev = 0;
        for m in (0..=100_000).step_by(997) {
            let c = s.count_below(m).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert_eq!(s.count_below(100_000).unwrap(), 9u64.pow(5));
    }

    #[test]
    fn kappa_branches() {
        assert_eq!(DigitSystem::new(5, 3).unwrap().kappa(), Rational::new(10, 9));
        assert_eq!(DigitSystem::new(7, 3).unwrap().kappa(), Rational::new(5, 6));
        assert_eq!(DigitSystem::new(2, 3).unwrap().kappa(), Rational::new(10, 9));
        assert_eq!(DigitSystem::new(0, 3).unwrap().kappa(), Rational::new(10, 9));
    }

    #[test]
    fn split_examples() {
        let s = DigitSystem::new(7, 5).unwrap();
        assert_eq!(s.split_digits(12345, 2).unwrap(), (12000, 345));
        assert_eq!(s.split_digits(12345, 5).unwrap(), (12345, 0));
        assert!(s.split_digits(12345, 6).is_err());
    }

    #[test]
    fn split_membership_factorizes() {
        // contains(n) iff both windows avoid a0 (digit factorization)
        let s = DigitSystem::new(3, 5).unwrap();
        for n in (0..100_000).step_by(37) {
            let (hi, lo) = s.split_digits(n, 2).unwrap();
            assert_eq!(hi + lo, n);
            let top = hi / pow10(3);
            let top_avoids = DigitSystem::new(3, 2).unwrap().contains(top).unwrap();
            let lo_avoids = DigitSystem::new(3, 3).unwrap().contains(lo).unwrap();
            assert_eq!(s.contains(n).unwrap(), top_avoids && lo_avoids);
        }
    }

    #[test]
    fn anchor_cases() {
        let s5 = DigitSystem::new(5, 6).unwrap();
        assert_eq!(s5.make_anchor(3).unwrap().n_star(), 490_000);
        let s4 = DigitSystem::new(4, 6).unwrap();
        assert_eq!(s4.make_anchor(3).unwrap().n_star(), 509_000);
        let s7 = DigitSystem::new(7, 6).unwrap();
        assert_eq!(s7.make_anchor(3).unwrap().n_star(), 490_000);
        let s9 = DigitSystem::new(9, 6).unwrap();
        assert_eq!(s9.make_anchor(3).unwrap().n_star(), 500_000);
        let s0 = DigitSystem::new(0, 6).unwrap();
        assert_eq!(s0.make_anchor(4).unwrap().n_star(), 491_100);
        assert!(s5.make_anchor(2).is_err());
    }

    #[test]
    fn anchor_distance_bound() {
        for a0 in 0..=9u8 {
            for k in 4..=7u32 {
                let s = DigitSystem::new(a0, k).unwrap();
                let aw = s.make_anchor(4).unwrap();
                let center = 5 * pow10(k - 1);
                assert!(
                    2 * aw.n_star().abs_diff(center) <= 3 * pow10(k - 2),
                    "a0={a0} k={k} n*={}",
                    aw.n_star()
                );
            }
        }
    }

    #[test]
    fn anchor_window_membership_implication() {
        // exhaustive check of the window property for every a0 at k = 6, H = 3
        for a0 in 0..=9u8 {
            let s = DigitSystem::new(a0, 6).unwrap();
            let aw = s.make_anchor(3).unwrap();
            let sub = DigitSystem::new(a0, 3).unwrap();
            for m in 0..1000u64 {
                if s.contains(aw.n_star() + m).unwrap() {
                    assert!(
                        sub.contains(m).unwrap(),
                        "a0={a0} m={m} anchor={}",
                        aw.n_star()
                    );
                }
            }
        }
    }

    #[test]
    fn a_star_count_matches_enumeration() {
        let s = DigitSystem::new(7, 5).unwrap();
        let aw = s.make_anchor(3).unwrap();
        let (lo, hi) = aw.window();
        let brute = s.enumerate(lo, hi).unwrap().len() as u64;
        assert_eq!(aw.a_star_count(&s), brute);
    }

    #[test]
    fn enumerate_totals() {
        for a0 in [0u8, 5, 7] {
            for k in 1..=4u32 {
                let s = DigitSystem::new(a0, k).unwrap();
                let all = s.enumerate(0, s.modulus()).unwrap();
                assert_eq!(all.len() as u64, 9u64.pow(k));
                for &n in all.iter().take(50) {
                    assert!(s.contains(n).unwrap());
                }
            }
        }
    }
}
