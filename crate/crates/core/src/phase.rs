//! Unit-circle phases with exact mod-1 reduction.
//!
//! Exponential-sum identities are checked at tolerances near machine epsilon,
//! which requires `n*theta mod 1` without the naive `f64` product rounding.
//! `mul_mod1` recovers the product residual with an FMA, so the returned
//! fraction is accurate to a few ulps for any `n < 2^53`.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `frac(n * theta)` computed exactly up to a couple of ulps.
#[inline]
pub fn mul_mod1(n: f64, theta: f64) -> f64 {
    let p = n * theta;
    let r = n.mul_add(theta, -p); // exact residual of the product
    let k = p.floor();
    let mut frac = (p - k) + r;
    if frac >= 1.0 {
        frac -= 1.0;
    } else if frac < 0.0 {
        frac += 1.0;
    }
    frac
}

/// e(x) = exp(2*pi*i*x).
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// e(num/den) with the phase reduced in integer arithmetic.
#[inline]
pub fn e_frac(num: u64, den: u64) -> Complex64 {
    e((num % den) as f64 / den as f64)
}

/// Kahan-compensated complex accumulator; keeps long exponential sums
/// within a few ulps of the exact rounding of the mathematical sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    sum: Complex64,
    c: Complex64,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Kahan-compensated real accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanF64 {
    sum: f64,
    c: f64,
}

impl KahanF64 {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
