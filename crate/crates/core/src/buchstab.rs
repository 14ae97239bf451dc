//! The Buchstab function omega(u) by delay-differential integration.
//!
//! omega(u) = 1/u on [1,2] and u*omega'(u) = omega(u-1) - u... more precisely
//! omega'(u) = (omega(u-1) - omega(u)) / u for u > 2, with omega = 0 below 1.
//! The table integrates with classical RK4; the lagged value omega(u-1) is
//! read from the analytic branch on [1,2] and from cubic interpolation of the
//! already-computed grid beyond. Interpolation stencils never cross an
//! integer node, where omega loses a derivative.

use crate::nt::PrimeBitmap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OmegaError {
    #[error("step 1/h = {0} is not an integer")]
    StepNotUnitFraction(f64),
    #[error("u_max = {0} must be >= 2 and a grid multiple of h")]
    BadRange(f64),
    #[error("u = {u} beyond table range u_max = {u_max}")]
    OutOfRange { u: f64, u_max: f64 },
    #[error("argument range too large: {0}")]
    RangeTooLarge(u64),
    #[error("degenerate sieve threshold z = {0}")]
    DegenerateThreshold(f64),
}

/// Tabulated omega on a uniform grid over [1, u_max].
#[derive(Debug, Clone)]
pub struct OmegaTable {
    steps_per_unit: usize,
    h: f64,
    u_max: f64,
    values: Vec<f64>,
}

pub const DEFAULT_STEP: f64 = 1.0 / 4096.0;
pub const DEFAULT_U_MAX: f64 = 12.0;

/// omega(u) -> exp(-EulerGamma) as u -> infinity.
pub const OMEGA_LIMIT: f64 = 0.561_459_483_566_885_1;

impl OmegaTable {
    pub fn build(u_max: f64, h: f64) -> Result<Self, OmegaError> {
        let spu_f = 1.0 / h;
        let spu = spu_f.round();
        if !(spu_f - spu).abs().le(&1e-9) || spu < 4.0 {
            return Err(OmegaError::StepNotUnitFraction(spu_f));
        }
        let spu = spu as usize;
        let h = 1.0 / spu as f64;
        let total_f = (u_max - 1.0) * spu as f64;
        let total = total_f.round();
        if u_max < 2.0 || (total_f - total).abs() > 1e-6 {
            return Err(OmegaError::BadRange(u_max));
        }
        let total = total as usize;

        let mut values = vec![0.0f64; total + 1];
        for (i, v) in values.iter_mut().enumerate().take(spu + 1) {
            *v = 1.0 / (1.0 + i as f64 * h);
        }
        for i in spu..total {
            let u = 1.0 + i as f64 * h;
            let hist = |x: f64| lagged(&values, spu, i, x);
            let y = values[i];
            let f = |uu: f64, yy: f64| (hist(uu - 1.0) - yy) / uu;
            let k1 = f(u, y);
            let k2 = f(u + h / 2.0, y + h / 2.0 * k1);
            let k3 = f(u + h / 2.0, y + h / 2.0 * k2);
            let k4 = f(u + h, y + h * k3);
            values[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Ok(OmegaTable { steps_per_unit: spu, h, u_max, values })
    }

    pub fn with_defaults() -> Self {
        Self::build(DEFAULT_U_MAX, DEFAULT_STEP).expect("default parameters are valid")
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Grid as (u, omega(u)) pairs.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (1.0 + i as f64 * self.h, v))
    }

    /// omega(u); zero below 1, analytic 1/u on [1,2], interpolated beyond.
    pub fn eval(&self, u: f64) -> Result<f64, OmegaError> {
        if u > self.u_max + 1e-9 {
            return Err(OmegaError::OutOfRange { u, u_max: self.u_max });
        }
        Ok(self.eval_in_range(u))
    }

    /// As `eval`, clamping arguments just past u_max; callers guarantee range.
    #[inline]
    pub fn eval_in_range(&self, u: f64) -> f64 {
        if u < 1.0 {
            return 0.0;
        }
        if u <= 2.0 {
            return 1.0 / u;
        }
        let frontier = self.values.len() - 1;
        lagged(&self.values, self.steps_per_unit, frontier, u.min(self.u_max))
    }
}

/// Cubic Lagrange read of the partially built grid at abscissa x >= 1,
/// exact on [1,2]; the stencil is clamped inside x's unit cell.
fn lagged(values: &[f64], spu: usize, frontier: usize, x: f64) -> f64 {
    if x < 1.0 {
        return 0.0;
    }
    if x <= 2.0 {
        return 1.0 / x;
    }
    let g = (x - 1.0) * spu as f64;
    let gi = g.round();
    if (g - gi).abs() < 1e-9 && (gi as usize) <= frontier {
        return values[gi as usize];
    }
    let cell = (x - 1.0).floor() as usize; // unit cell [cell+1, cell+2]
    let lo = cell * spu;
    let hi = ((cell + 1) * spu).min(frontier);
    let i = (g.floor() as usize).clamp(lo, hi.saturating_sub(1));
    let i0 = i.saturating_sub(1).clamp(lo, hi.saturating_sub(3));
    let t = g - i0 as f64;
    // Lagrange basis on nodes i0..i0+3 with local coordinates 0,1,2,3
    let y0 = values[i0];
    let y1 = values[i0 + 1];
    let y2 = values[i0 + 2];
    let y3 = values[i0 + 3];
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
}

/// Outcome of comparing an exact rough-number count with the omega-based
/// prediction x * omega(log x / log z) / log z.
#[derive(Debug, Clone, Copy)]
pub struct RoughCountComparison {
    pub exact: u64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Count integers n <= x free of prime factors <= z and compare with the
/// Buchstab prediction.
pub fn rough_count_compare(
    x: u64,
    z: f64,
    table: &OmegaTable,
) -> Result<RoughCountComparison, OmegaError> {
    if x > 100_000_000 {
        return Err(OmegaError::RangeTooLarge(x));
    }
    if z < 2.0 {
        return Err(OmegaError::DegenerateThreshold(z));
    }
    let u = (x as f64).ln() / z.ln();
    if u > table.u_max() + 1e-9 {
        return Err(OmegaError::OutOfRange { u, u_max: table.u_max() });
    }
    let exact = rough_count(x, z);
    let predicted = x as f64 * table.eval_in_range(u) / z.ln();
    Ok(RoughCountComparison { exact, predicted, ratio: exact as f64 / predicted })
}

/// #{1 <= n <= x : least prime factor of n exceeds z}; n = 1 counts.
pub fn rough_count(x: u64, z: f64) -> u64 {
    let mut marked = vec![false; x as usize + 1];
    let primes = PrimeBitmap::up_to((z.floor() as u64).min(x));
    for p in primes.iter_primes() {
        if p as f64 > z {
            break;
        }
        let mut m = p;
        while m <= x {
            marked[m as usize] = true;
            m += p;
        }
    }
    (1..=x).filter(|&n| !marked[n as usize]).count() as u64
}
