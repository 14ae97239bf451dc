//! The nine sieve-decomposition integrals I_1..I_9 over their polytope
//! domains, the singular series, and the main-term evaluators.
//!
//! Region transcription notes: two defects in the source displays are
//! repaired by default and kept toggleable through `RegionOptions`. The
//! undefined cut "z_0 < pq" in the first split is read as z_6 < pq (the
//! neighbouring display uses z_6); the last inequality of R_2 is read as
//! v + w > theta_2, matching its defining sum (the displayed v + w < theta_2
//! would make R_1 a subset of R_2 and double-count that mass).

use crate::buchstab::OmegaTable;
use crate::nt::{primes_up_to, PrimeBitmap};
use crate::pshapiro::GoldbachInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("integral index {0} outside 1..=9")]
    BadIndex(usize),
    #[error("omega table reaches {have} but the integrand needs {needed}")]
    OmegaRange { needed: f64, have: f64 },
    #[error("{0}")]
    BadArgument(String),
}

/// Affine inequality coeffs . u + constant >= 0.
#[derive(Debug, Clone)]
pub struct Affine {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl Affine {
    fn eval(&self, pt: &[f64]) -> f64 {
        self.coeffs.iter().zip(pt).map(|(c, x)| c * x).sum::<f64>() + self.constant
    }
}

/// A polytope with optional excluded bands: points of the bounding box with
/// every inequality nonnegative and every band form outside its interval.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    inequalities: Vec<Affine>,
    excluded_bands: Vec<(Vec<f64>, f64, f64)>,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Affine] {
        &self.inequalities
    }

    pub fn excluded_bands(&self) -> &[(Vec<f64>, f64, f64)] {
        &self.excluded_bands
    }

    /// Sampling box (a superset of the region inside [0,1]^dim).
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.box_lo, &self.box_hi)
    }

    pub fn contains(&self, pt: &[f64]) -> bool {
        debug_assert_eq!(pt.len(), self.dim);
        if self.inequalities.iter().any(|a| a.eval(pt) < 0.0) {
            return false;
        }
        for (form, lo, hi) in &self.excluded_bands {
            let v: f64 = form.iter().zip(pt).map(|(c, x)| c * x).sum();
            if v >= *lo && v <= *hi {
                return false;
            }
        }
        true
    }

    pub fn empty(dim: usize) -> Self {
        Polytope {
            dim,
            inequalities: vec![Affine { coeffs: vec![0.0; dim], constant: -1.0 }],
            excluded_bands: Vec::new(),
            box_lo: vec![0.0; dim],
            box_hi: vec![0.0; dim],
        }
    }

    fn box_volume(&self) -> f64 {
        self.box_lo.iter().zip(&self.box_hi).map(|(l, h)| h - l).product()
    }
}

/// Toggles for the recorded transcription repairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegionOptions {
    /// Read the undefined "z_0 < pq" cut of I_1 as z_5 instead of z_6.
    pub i1_pq_cut_z5: bool,
    /// Keep R_2's displayed inequality v + w < theta_2 instead of the
    /// derivation's v + w > theta_2.
    pub r2_verbatim: bool,
}

pub fn theta1(eps: f64) -> f64 {
    9.0 / 25.0 + 2.0 * eps
}

pub fn theta2(eps: f64) -> f64 {
    17.0 / 40.0 - 2.0 * eps
}

/// The integration domain of I_j at the given epsilon.
pub fn region(j: usize, eps: f64) -> Result<Polytope, RegionError> {
    region_with(j, eps, RegionOptions::default())
}

pub fn region_with(j: usize, eps: f64, opts: RegionOptions) -> Result<Polytope, RegionError> {
    if !(1..=9).contains(&j) {
        return Err(RegionError::BadIndex(j));
    }
    let t1 = theta1(eps);
    let t2 = theta2(eps);
    if t1 >= t2 {
        let dim = match j {
            1 | 2 | 7 | 8 => 2,
            3 | 4 => 3,
            _ => 4,
        };
        return Ok(Polytope::empty(dim));
    }
    let tau = t2 - t1;
    let ge = |coeffs: &[f64], constant: f64| Affine { coeffs: coeffs.to_vec(), constant };
    let poly = match j {
        1 => {
            let cut = if opts.i1_pq_cut_z5 { 1.0 - t2 } else { 1.0 - t1 };
            Polytope {
                dim: 2,
                inequalities: vec![
                    ge(&[0.0, 1.0], -tau),  // tau < v
                    ge(&[0.0, -1.0], t1),   // v <= theta1
                    ge(&[1.0, -1.0], 0.0),  // q <= p
                    ge(&[-1.0, 0.0], t1),   // p <= z2
                    ge(&[-1.0, -2.0], 1.0), // q <= (X/p)^(1/2)
                    ge(&[1.0, 1.0], -cut),  // pq above the cut
                ],
                excluded_bands: Vec::new(),
                box_lo: vec![(1.0 - t1) / 2.0, 1.0 - 2.0 * t1],
                box_hi: vec![t1, t1],
            }
        }
        2 => Polytope {
            dim: 2,
            inequalities: vec![
                ge(&[0.0, 1.0], -tau),
                ge(&[1.0, -1.0], 0.0),
                ge(&[-1.0, 0.0], t1),
                ge(&[1.0, 1.0], -t2),         // z3 <= pq
                ge(&[-1.0, -1.0], 1.0 - t2),  // pq <= z5
                ge(&[1.0, 2.0], -(1.0 - t1)), // z6 <= q^2 p
                ge(&[-1.0, -2.0], 1.0),       // q^2 p <= X
            ],
            excluded_bands: Vec::new(),
            box_lo: vec![t2 / 2.0, (1.0 - 2.0 * t1) / 2.0],
            box_hi: vec![t1, t1],
        },
        3 | 4 => {
            let mut ineqs = vec![
                ge(&[0.0, 1.0, 0.0], -tau),
                ge(&[1.0, -1.0, 0.0], 0.0),
                ge(&[-1.0, 0.0, 0.0], t1),
                ge(&[1.0, 1.0, 0.0], -t2),
                ge(&[-1.0, -1.0, 0.0], 1.0 - t2),
                ge(&[1.0, 2.0, 0.0], -(1.0 - t1)),
                ge(&[-1.0, -2.0, 0.0], 1.0),
                ge(&[0.0, -1.0, 1.0], 0.0),   // v < w
                ge(&[-1.0, -1.0, -2.0], 1.0), // w < (1-u-v)/2
            ];
            if j == 3 {
                ineqs.push(ge(&[0.0, -1.0, -1.0], t1)); // qr < z2
            } else if opts.r2_verbatim {
                ineqs.push(ge(&[0.0, -1.0, -1.0], t2)); // displayed: v + w < theta2
            } else {
                ineqs.push(ge(&[0.0, 1.0, 1.0], -t2)); // derivation: qr > z3
            }
            Polytope {
                dim: 3,
                inequalities: ineqs,
                excluded_bands: Vec::new(),
                box_lo: vec![t2 / 2.0, tau, tau],
                box_hi: vec![t1, t1, (1.0 - t2) / 2.0],
            }
        }
        5 => Polytope {
            dim: 4,
            inequalities: vec![
                ge(&[0.0, 0.0, 0.0, 1.0], -tau),
                ge(&[0.0, 0.0, 1.0, -1.0], 0.0),
                ge(&[0.0, 1.0, -1.0, 0.0], 0.0),
                ge(&[1.0, -1.0, 0.0, 0.0], 0.0),
                ge(&[-1.0, 0.0, 0.0, 0.0], t1),
                ge(&[-1.0, -2.0, 0.0, 0.0], 1.0 - t1),
                ge(&[-1.0, -1.0, -2.0, 0.0], 1.0),
                ge(&[-1.0, -1.0, -1.0, -2.0], 1.0),
                ge(&[1.0, 1.0, 0.0, 0.0], -t2),
                ge(&[-1.0, -1.0, 0.0, 0.0], 1.0 - t2),
            ],
            excluded_bands: pair_bands(t1, t2),
            box_lo: vec![t2 / 2.0, tau, tau, tau],
            box_hi: vec![t1, t1, t1, t1],
        },
        6 => Polytope {
            dim: 4,
            inequalities: vec![
                ge(&[0.0, 0.0, 0.0, 1.0], -tau),
                ge(&[0.0, 0.0, 1.0, -1.0], 0.0),
                ge(&[0.0, 1.0, -1.0, 0.0], 0.0),
                ge(&[1.0, -1.0, 0.0, 0.0], 0.0),
                ge(&[-1.0, 0.0, 0.0, 0.0], t1),
                ge(&[-1.0, -1.0, 0.0, 0.0], t1), // pq < z2
            ],
            excluded_bands: vec![
                (vec![1.0, 1.0, 1.0, 0.0], t1, t2),
                (vec![1.0, 1.0, 0.0, 1.0], t1, t2),
                (vec![1.0, 0.0, 1.0, 1.0], t1, t2),
                (vec![0.0, 1.0, 1.0, 1.0], t1, t2),
                (vec![1.0, 1.0, 1.0, 1.0], t1, t2),
                (vec![1.0, 1.0, 1.0, 1.0], 1.0 - t2, 1.0 - t1),
            ],
            box_lo: vec![tau, tau, tau, tau],
            box_hi: vec![t1, t1 / 2.0, t1 / 2.0, t1 / 2.0],
        },
        7 => Polytope {
            dim: 2,
            inequalities: vec![
                ge(&[1.0, 0.0], -t2),         // theta2 < u
                ge(&[-1.0, 0.0], 0.5),        // u <= 1/2
                ge(&[0.0, 1.0], -tau),        // tau < v
                ge(&[-1.0, -2.0], 1.0),       // v <= (1-u)/2
                ge(&[1.0, 1.0], -(1.0 - t1)), // pq > z6
            ],
            excluded_bands: Vec::new(),
            box_lo: vec![t2, 0.5 - t1],
            box_hi: vec![0.5, (1.0 - t2) / 2.0],
        },
        8 => Polytope {
            dim: 2,
            inequalities: vec![
                ge(&[1.0, 0.0], -t2),
                ge(&[-1.0, 0.0], 0.5),
                ge(&[0.0, 1.0], -tau),
                ge(&[-1.0, -2.0], 1.0),
                ge(&[1.0, 1.0], -t2),         // z3 < pq
                ge(&[-1.0, -1.0], 1.0 - t2),  // pq < z5
                ge(&[1.0, 2.0], -(1.0 - t1)), // z6 <= q^2 p
            ],
            excluded_bands: Vec::new(),
            box_lo: vec![t2, tau],
            box_hi: vec![0.5, (1.0 - t2) / 2.0],
        },
        9 => Polytope {
            dim: 4,
            inequalities: vec![
                ge(&[0.0, 0.0, 0.0, 1.0], -tau),
                ge(&[0.0, 0.0, 1.0, -1.0], 0.0),
                ge(&[0.0, 1.0, -1.0, 0.0], 0.0),
                ge(&[1.0, 0.0, 0.0, 0.0], -t2),
                ge(&[-1.0, 0.0, 0.0, 0.0], 0.5),
                ge(&[-1.0, -2.0, 0.0, 0.0], 1.0 - t1),
                ge(&[-1.0, -1.0, -2.0, 0.0], 1.0),
                ge(&[-1.0, -1.0, -1.0, -2.0], 1.0),
                ge(&[1.0, 1.0, 0.0, 0.0], -t2),
                ge(&[-1.0, -1.0, 0.0, 0.0], 1.0 - t2),
            ],
            excluded_bands: pair_bands(t1, t2),
            box_lo: vec![t2, tau, tau, tau],
            box_hi: vec![
                0.5,
                (1.0 - t1 - t2) / 2.0,
                (1.0 - t1 - t2) / 2.0,
                (1.0 - t1 - t2) / 2.0,
            ],
        },
        _ => unreachable!(),
    };
    Ok(poly)
}

fn pair_bands(t1: f64, t2: f64) -> Vec<(Vec<f64>, f64, f64)> {
    vec![
        (vec![1.0, 1.0, 0.0, 0.0], t1, t2),
        (vec![1.0, 0.0, 1.0, 0.0], t1, t2),
        (vec![1.0, 0.0, 0.0, 1.0], t1, t2),
        (vec![0.0, 1.0, 1.0, 0.0], t1, t2),
        (vec![0.0, 1.0, 0.0, 1.0], t1, t2),
        (vec![0.0, 0.0, 1.0, 1.0], t1, t2),
    ]
}

/// The integrand of I_j at a region point.
fn integrand(j: usize, pt: &[f64], omega: &OmegaTable) -> f64 {
    match j {
        1 | 7 | 8 => {
            let (u, v) = (pt[0], pt[1]);
            omega.eval_in_range((1.0 - u - v) / v) / (u * v * v)
        }
        2 => {
            let (u, v) = (pt[0], pt[1]);
            1.0 / (u * v * (1.0 - u - v))
        }
        3 | 4 => {
            let (u, v, w) = (pt[0], pt[1], pt[2]);
            omega.eval_in_range((1.0 - u - v - w) / w) / (u * v * w * w)
        }
        _ => {
            let (u, v, w, t) = (pt[0], pt[1], pt[2], pt[3]);
            omega.eval_in_range((1.0 - u - v - w - t) / t) / (u * v * w * t * t)
        }
    }
}

/// Specification of one Monte Carlo integral evaluation.
#[derive(Debug, Clone, Copy)]
pub struct IntegralSpec {
    pub j: usize,
    pub eps: f64,
    pub samples: u64,
    pub seed: u64,
}

impl IntegralSpec {
    pub fn theta1(&self) -> f64 {
        theta1(self.eps)
    }

    pub fn theta2(&self) -> f64 {
        theta2(self.eps)
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STRATA_PER_DIM: usize = 4;

/// Stratified Monte Carlo over the polytope's bounding box; bit-reproducible
/// for a fixed (seed, samples) pair regardless of thread count.
pub fn mc_integrate<F>(poly: &Polytope, f: F, samples: u64, seed: u64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = poly.dim;
    let vol = poly.box_volume();
    if vol <= 0.0 || samples == 0 {
        return (0.0, 0.0);
    }
    let strata = STRATA_PER_DIM.pow(dim as u32) as u64;
    let base = samples / strata;
    let extra = samples % strata;
    let cell_vol = vol / strata as f64;
    let results: Vec<(f64, f64, u64)> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let n_s = base + u64::from(s < extra);
            if n_s == 0 {
                return (0.0, 0.0, 0);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(s)));
            let mut lo = vec![0.0f64; dim];
            let mut width = vec![0.0f64; dim];
            let mut idx = s as usize;
            for d in 0..dim {
                let cell = idx % STRATA_PER_DIM;
                idx /= STRATA_PER_DIM;
                let w = (poly.box_hi[d] - poly.box_lo[d]) / STRATA_PER_DIM as f64;
                lo[d] = poly.box_lo[d] + cell as f64 * w;
                width[d] = w;
            }
            let mut pt = vec![0.0f64; dim];
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in 0..n_s {
                for d in 0..dim {
                    pt[d] = lo[d] + rng.gen::<f64>() * width[d];
                }
                if poly.contains(&pt) {
                    let v = f(&pt);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            (sum, sum_sq, n_s)
        })
        .collect();
    let mut value = 0.0f64;
    let mut variance = 0.0f64;
    for (sum, sum_sq, n_s) in results {
        if n_s == 0 {
            continue;
        }
        let n = n_s as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        value += cell_vol * mean;
        variance += cell_vol * cell_vol * var / n;
    }
    (value, variance.sqrt())
}

fn required_u_max(eps: f64) -> f64 {
    1.0 / (theta2(eps) - theta1(eps)) + 2.0
}

/// Monte Carlo estimate (value, stderr) of I_j.
pub fn integrate(spec: &IntegralSpec, omega: &OmegaTable) -> Result<(f64, f64), RegionError> {
    integrate_with(spec, omega, RegionOptions::default())
}

pub fn integrate_with(
    spec: &IntegralSpec,
    omega: &OmegaTable,
    opts: RegionOptions,
) -> Result<(f64, f64), RegionError> {
    if spec.theta1() >= spec.theta2() {
        return Ok((0.0, 0.0));
    }
    let needed = required_u_max(spec.eps);
    if omega.u_max() + 1e-9 < needed {
        return Err(RegionError::OmegaRange { needed, have: omega.u_max() });
    }
    let poly = region_with(spec.j, spec.eps, opts)?;
    let j = spec.j;
    Ok(mc_integrate(&poly, |pt| integrand(j, pt, omega), spec.samples, spec.seed))
}

/// All nine integrals and their combined sum.
#[derive(Debug, Clone)]
pub struct IntegralSum {
    pub per_j: Vec<(f64, f64)>,
    pub total: f64,
    pub stderr: f64,
}

/// Evaluate I_1..I_9 with `samples` points each and combine.
pub fn integral_sum(eps: f64, samples: u64, seed: u64) -> Result<IntegralSum, RegionError> {
    integral_sum_with(eps, samples, seed, RegionOptions::default())
}

pub fn integral_sum_with(
    eps: f64,
    samples: u64,
    seed: u64,
    opts: RegionOptions,
) -> Result<IntegralSum, RegionError> {
    let omega = omega_for_eps(eps)?;
    let mut per_j = Vec::with_capacity(9);
    for j in 1..=9 {
        let spec = IntegralSpec { j, eps, samples, seed: splitmix(seed.wrapping_add(j as u64)) };
        per_j.push(integrate_with(&spec, &omega, opts)?);
    }
    let total = per_j.iter().map(|(v, _)| v).sum();
    let stderr = per_j.iter().map(|(_, e)| e * e).sum::<f64>().sqrt();
    Ok(IntegralSum { per_j, total, stderr })
}

/// An omega table wide enough for every integrand at this epsilon.
pub fn omega_for_eps(eps: f64) -> Result<OmegaTable, RegionError> {
    if theta1(eps) >= theta2(eps) {
        return OmegaTable::build(4.0, 1.0 / 1024.0)
            .map_err(|e| RegionError::BadArgument(e.to_string()));
    }
    let u_max = required_u_max(eps).ceil() + 1.0;
    OmegaTable::build(u_max, 1.0 / 4096.0).map_err(|e| RegionError::BadArgument(e.to_string()))
}

/// Truncated singular series with a certified tail interval.
#[derive(Debug, Clone, Copy)]
pub struct SingularSeries {
    /// The truncated product (the lower end for odd N0).
    pub value: f64,
    /// Upper end of the tail interval.
    pub upper: f64,
}

impl SingularSeries {
    pub fn relative_width(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            (self.upper - self.value) / self.value
        }
    }
}

/// prod_{p | N0} (1 - 1/(p-1)^2) * prod_{p not dividing N0, p <= P}
/// (1 + 1/(p-1)^3), the tail over p > P bounded by exp(1/(2(P-1)^2)).
pub fn singular_series(n0: u64, p_cut: u64) -> Result<SingularSeries, RegionError> {
    if n0 < 3 {
        return Err(RegionError::BadArgument(format!("N0 = {n0} < 3")));
    }
    if p_cut < 1000 {
        return Err(RegionError::BadArgument(format!("P = {p_cut} < 1000")));
    }
    let mut value = 1.0f64;
    for p in primes_up_to(p_cut) {
        let pm1 = (p - 1) as f64;
        if n0 % p == 0 {
            value *= 1.0 - 1.0 / (pm1 * pm1);
        } else {
            value *= 1.0 + 1.0 / (pm1 * pm1 * pm1);
        }
    }
    // prime factors of N0 beyond the cut still contribute their factor < 1
    for (p, _) in crate::nt::factorize(n0) {
        if p > p_cut {
            let pm1 = (p - 1) as f64;
            value *= 1.0 - 1.0 / (pm1 * pm1);
        }
    }
    let tail = (0.5 / ((p_cut - 1) as f64 * (p_cut - 1) as f64)).exp();
    Ok(SingularSeries { value, upper: value * tail })
}

/// Normalization choice for the aggregate main term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MainTermNorm {
    AStar,
    KappaAStar,
}

/// Main term over an explicit region with a continuous sifting exponent
/// z(u) in [delta, 1-delta]:
/// (X #B* / (4 log X)) S(N0) Int_R omega(1 - sum u)/(prod u * z(u)) du.
pub fn main_term<F>(
    inst: &GoldbachInstance,
    poly: &Polytope,
    zfun: F,
    omega: &OmegaTable,
    samples: u64,
    seed: u64,
    singular_cut: u64,
) -> Result<f64, RegionError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (integral, _err) = mc_integrate(
        poly,
        |pt| {
            let s: f64 = pt.iter().sum();
            let prod: f64 = pt.iter().product();
            omega.eval_in_range(1.0 - s) / (prod * zfun(pt))
        },
        samples,
        seed,
    );
    let x = inst.x() as f64;
    let b_star = inst.anchor().b_star_count() as f64;
    let s = singular_series(inst.n0(), singular_cut)?.value;
    Ok(x * b_star / (4.0 * x.ln()) * s * integral)
}

/// The aggregate form (X/4) (#A*/log X) S(N0) (1 - I_1 - ... - I_9), with
/// the normalization by #A* or kappa_A #A* selectable.
pub fn main_term_aggregate(
    inst: &GoldbachInstance,
    eps: f64,
    samples: u64,
    seed: u64,
    norm: MainTermNorm,
    singular_cut: u64,
) -> Result<f64, RegionError> {
    let sum = integral_sum(eps, samples, seed)?;
    let x = inst.x() as f64;
    let a_star = inst.anchor().a_star_count(inst.digit_system()) as f64;
    let weight = match norm {
        MainTermNorm::AStar => a_star,
        MainTermNorm::KappaAStar => inst.digit_system().kappa().as_f64() * a_star,
    };
    let s = singular_series(inst.n0(), singular_cut)?.value;
    Ok(x / 4.0 * weight / x.ln() * s * (1.0 - sum.total))
}

/// Direct-product oracle for tests.
pub fn singular_series_oracle(n0: u64, p_cut: u64) -> f64 {
    let bm = PrimeBitmap::up_to(p_cut);
    let mut v = 1.0f64;
    for p in bm.iter_primes() {
        let pm1 = (p - 1) as f64;
        if n0 % p == 0 {
            v *= 1.0 - 1.0 / (pm1 * pm1);
        } else {
            v *= 1.0 + 1.0 / (pm1 * pm1 * pm1);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pshapiro::SieveConstants;

    #[test]
    fn region_one_example_point() {
        let r = region(1, 0.0).unwrap();
        assert!(!r.contains(&[0.40, 0.10]));
        assert!(r.contains(&[0.34, 0.32]));
    }

    #[test]
    fn large_eps_empties_everything() {
        for j in 1..=9 {
            let r = region(j, 0.02).unwrap();
            assert!(!r.contains(&vec![0.3; r.dim()]));
            let omega = omega_for_eps(0.02).unwrap();
            let spec = IntegralSpec { j, eps: 0.02, samples: 1000, seed: 1 };
            assert_eq!(integrate(&spec, &omega).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn membership_against_direct_transcription() {
        let eps = 1e-4;
        let t1 = theta1(eps);
        let t2 = theta2(eps);
        let tau = t2 - t1;
        let in_band = |x: f64, lo: f64, hi: f64| x >= lo && x <= hi;
        let oracle: Vec<Box<dyn Fn(&[f64]) -> bool>> = vec![
            Box::new(move |p: &[f64]| {
                let (u, v) = (p[0], p[1]);
                v >= tau
                    && v <= t1
                    && v <= u
                    && u <= t1
                    && u + 2.0 * v <= 1.0
                    && u + v >= 1.0 - t1
            }),
            Box::new(move |p: &[f64]| {
                let (u, v) = (p[0], p[1]);
                v >= tau
                    && v <= u
                    && u <= t1
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && u + 2.0 * v >= 1.0 - t1
                    && u + 2.0 * v <= 1.0
            }),
            Box::new(move |p: &[f64]| {
                let (u, v, w) = (p[0], p[1], p[2]);
                v >= tau
                    && v <= u
                    && u <= t1
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && u + 2.0 * v >= 1.0 - t1
                    && u + 2.0 * v <= 1.0
                    && w >= v
                    && 2.0 * w <= 1.0 - u - v
                    && v + w <= t1
            }),
            Box::new(move |p: &[f64]| {
                let (u, v, w) = (p[0], p[1], p[2]);
                v >= tau
                    && v <= u
                    && u <= t1
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && u + 2.0 * v >= 1.0 - t1
                    && u + 2.0 * v <= 1.0
                    && w >= v
                    && 2.0 * w <= 1.0 - u - v
                    && v + w >= t2
            }),
            Box::new(move |p: &[f64]| {
                let (u, v, w, t) = (p[0], p[1], p[2], p[3]);
                let pairs = [u + v, u + w, u + t, v + w, v + t, w + t];
                t >= tau
                    && t <= w
                    && w <= v
                    && v <= u
                    && u <= t1
                    && u + 2.0 * v <= 1.0 - t1
                    && u + v + 2.0 * w <= 1.0
                    && u + v + w + 2.0 * t <= 1.0
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && pairs.iter().all(|&s| !in_band(s, t1, t2))
            }),
            Box::new(move |p: &[f64]| {
                let (u, v, w, t) = (p[0], p[1], p[2], p[3]);
                let triples = [u + v + w, u + v + t, u + w + t, v + w + t];
                let quad = u + v + w + t;
                t >= tau
                    && t <= w
                    && w <= v
                    && v <= u
                    && u <= t1
                    && u + v <= t1
                    && triples.iter().all(|&s| !in_band(s, t1, t2))
                    && !in_band(quad, t1, t2)
                    && !in_band(quad, 1.0 - t2, 1.0 - t1)
            }),
            Box::new(move |p: &[f64]| {
                let (u, v) = (p[0], p[1]);
                u >= t2 && u <= 0.5 && v >= tau && 2.0 * v <= 1.0 - u && u + v >= 1.0 - t1
            }),
            Box::new(move |p: &[f64]| {
                let (u, v) = (p[0], p[1]);
                u >= t2
                    && u <= 0.5
                    && v >= tau
                    && 2.0 * v <= 1.0 - u
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && u + 2.0 * v >= 1.0 - t1
            }),
            Box::new(move |p: &[f64]| {
                let (u, v, w, t) = (p[0], p[1], p[2], p[3]);
                let pairs = [u + v, u + w, u + t, v + w, v + t, w + t];
                t >= tau
                    && t <= w
                    && w <= v
                    && u >= t2
                    && u <= 0.5
                    && u + 2.0 * v <= 1.0 - t1
                    && u + v + 2.0 * w <= 1.0
                    && u + v + w + 2.0 * t <= 1.0
                    && u + v >= t2
                    && u + v <= 1.0 - t2
                    && pairs.iter().all(|&s| !in_band(s, t1, t2))
            }),
        ];
        let mut state = 0xC0FFEEu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for j in 1..=9usize {
            let poly = region(j, eps).unwrap();
            let (lo, hi) = poly.bounding_box();
            let (lo, hi) = (lo.to_vec(), hi.to_vec());
            let mut hits = 0u64;
            for _ in 0..20_000 {
                let pt: Vec<f64> =
                    (0..poly.dim()).map(|d| lo[d] + next() * (hi[d] - lo[d])).collect();
                let a = poly.contains(&pt);
                let b = oracle[j - 1](&pt);
                assert_eq!(a, b, "j = {j}, pt = {pt:?}");
                hits += u64::from(a);
            }
            assert!(hits > 0, "sampling box misses region j = {j}");
        }
    }

    #[test]
    fn integrals_deterministic_and_positive() {
        let omega = omega_for_eps(1e-4).unwrap();
        for j in 1..=9 {
            let spec = IntegralSpec { j, eps: 1e-4, samples: 200_000, seed: 42 };
            let (v1, e1) = integrate(&spec, &omega).unwrap();
            let (v2, _) = integrate(&spec, &omega).unwrap();
            assert_eq!(v1, v2, "j = {j} not reproducible");
            assert!(v1 >= 0.0 && e1 >= 0.0);
        }
    }

    #[test]
    fn stderr_shrinks_with_samples() {
        let omega = omega_for_eps(1e-4).unwrap();
        let small = IntegralSpec { j: 2, eps: 1e-4, samples: 100_000, seed: 7 };
        let big = IntegralSpec { j: 2, eps: 1e-4, samples: 200_000, seed: 7 };
        let (_, e_small) = integrate(&small, &omega).unwrap();
        let (_, e_big) = integrate(&big, &omega).unwrap();
        let ratio = e_small / e_big;
        assert!(
            (ratio - std::f64::consts::SQRT_2).abs() < 0.2 * std::f64::consts::SQRT_2,
            "ratio = {ratio}"
        );
    }

    #[test]
    fn omega_range_enforced() {
        let omega = OmegaTable::build(6.0, 1.0 / 1024.0).unwrap();
        let spec = IntegralSpec { j: 1, eps: 1e-4, samples: 100, seed: 1 };
        assert!(matches!(integrate(&spec, &omega), Err(RegionError::OmegaRange { .. })));
    }

    #[test]
    fn total_decreases_in_eps() {
        let a = integral_sum(1e-4, 150_000, 11).unwrap();
        let b = integral_sum(5e-3, 150_000, 11).unwrap();
        assert!(b.total < a.total, "{} !< {}", b.total, a.total);
        assert!(a.total >= a.per_j[0].0);
    }

    #[test]
    fn singular_series_examples() {
        let even = singular_series(100_000, 10_000).unwrap();
        assert_eq!(even.value, 0.0);
        let s15 = singular_series(15, 100_000).unwrap();
        let oracle = singular_series_oracle(15, 100_000);
        assert!((s15.value - oracle).abs() < 1e-12);
        assert!(s15.relative_width() <= 2.0 / 100_000.0);
        for n0 in [3u64, 9, 101, 99_991] {
            let s = singular_series(n0, 10_000).unwrap().value;
            assert!(s > 0.0 && s < 4.0, "N0 = {n0}: {s}");
        }
    }

    #[test]
    fn main_term_scales_linearly_in_inverse_z() {
        let inst = GoldbachInstance::new(100_003, 7, SieveConstants::default()).unwrap();
        let omega = omega_for_eps(1e-4).unwrap();
        let poly = region(1, 1e-4).unwrap();
        let half = main_term(&inst, &poly, |_| 0.5, &omega, 200_000, 3, 10_000).unwrap();
        let unit = main_term(&inst, &poly, |_| 1.0, &omega, 200_000, 3, 10_000).unwrap();
        assert!((half - 2.0 * unit).abs() < 1e-9 * half.abs().max(1.0));
        let empty = Polytope::empty(2);
        assert_eq!(main_term(&inst, &empty, |_| 1.0, &omega, 1000, 3, 10_000).unwrap(), 0.0);
    }

    #[test]
    fn aggregate_main_term_normalizations() {
        let inst = GoldbachInstance::new(100_003, 7, SieveConstants::default()).unwrap();
        let a = main_term_aggregate(&inst, 1e-4, 100_000, 5, MainTermNorm::AStar, 10_000).unwrap();
        let b = main_term_aggregate(&inst, 1e-4, 100_000, 5, MainTermNorm::KappaAStar, 10_000)
            .unwrap();
        let kappa = inst.digit_system().kappa().as_f64();
        assert!((b / a - kappa).abs() < 1e-9);
    }
}
