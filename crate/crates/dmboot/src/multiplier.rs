//! Dependent multiplier sequences.
//!
//! Multiplier rows are strictly stationary, mean-zero, unit-variance and
//! finitely dependent, with correlation shape given by the normalized
//! self-convolution of the Parzen kernel. They are generated with the
//! moving-average construction: i.i.d. standard normal innovations smoothed
//! by Parzen weights over a window tied to the bandwidth, then rescaled so
//! the variance is exactly one.

use std::sync::OnceLock;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rng::stream_rng;

/// Parzen kernel: piecewise cubic, supported on [-1, 1].
pub fn parzen(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.5 {
        1.0 - 6.0 * x * x + 6.0 * ax * ax * ax
    } else if ax <= 1.0 {
        let t = 1.0 - ax;
        2.0 * t * t * t
    } else {
        0.0
    }
}

/// Correlation shape of the multiplier sequences: the self-convolution of
/// the Parzen kernel evaluated at `2x`, normalized to 1 at the origin.
/// Supported on [-1, 1]; values come from a precomputed 4097-point table
/// with local cubic interpolation.
pub fn phi(x: f64) -> f64 {
    let ax = x.abs();
    if ax >= 1.0 {
        return 0.0;
    }
    let table = phi_table();
    // Position within the grid over [-1, 1]; evaluate at |x| so the result
    // is exactly even.
    let pos = (ax + 1.0) * (GRID_HALF as f64);
    let j = (pos.floor() as usize).min(GRID_POINTS - 2);
    let u = pos - j as f64;
    let get = |idx: isize| -> f64 {
        if idx < 0 || idx as usize >= GRID_POINTS {
            0.0
        } else {
            table.values[idx as usize]
        }
    };
    let p0 = get(j as isize - 1);
    let p1 = get(j as isize);
    let p2 = get(j as isize + 1);
    let p3 = get(j as isize + 2);
    // Catmull-Rom on a uniform grid: O(h^4) error, ~1e-13 at this density.
    let v = 0.5
        * (2.0 * p1
            + u * ((p2 - p0)
                + u * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) + u * (3.0 * (p1 - p2) + p3 - p0))));
    v.clamp(0.0, 1.0)
}

/// Second derivative of [`phi`] at the origin (negative).
pub fn phi_curvature() -> f64 {
    phi_table().curvature
}

/// Integral of `phi(x)^2` over [-1, 1].
pub fn phi_l2() -> f64 {
    phi_table().l2
}

const GRID_POINTS: usize = 4097;
const GRID_HALF: usize = (GRID_POINTS - 1) / 2;

struct PhiTable {
    values: Vec<f64>,
    curvature: f64,
    l2: f64,
}

static PHI_TABLE: OnceLock<PhiTable> = OnceLock::new();

fn phi_table() -> &'static PhiTable {
    PHI_TABLE.get_or_init(build_phi_table)
}

fn build_phi_table() -> PhiTable {
    let c0 = parzen_conv(0.0);
    let mut values = vec![0.0; GRID_POINTS];
    let half = GRID_HALF as f64;
    for i in GRID_HALF..GRID_POINTS {
        let x = i as f64 / half - 1.0;
        let v = parzen_conv(2.0 * x) / c0;
        values[i] = v;
        values[GRID_POINTS - 1 - i] = v;
    }
    // curvature: phi''(0) = 4 (k*k)''(0) / (k*k)(0) and, by parts,
    // (k*k)''(0) = -int k'(u)^2 du.
    let dker_sq = |u: f64| {
        let d = parzen_derivative(u);
        d * d
    };
    let int_dker = gauss_legendre(&dker_sq, &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    let curvature = -4.0 * int_dker / c0;
    // int phi^2 = (1/c0^2) int_0^2 conv(t)^2 dt; conv is piecewise
    // polynomial with knots at multiples of 1/2.
    let conv_sq = |t: f64| {
        let c = parzen_conv(t);
        c * c
    };
    let l2 = gauss_legendre(&conv_sq, &[0.0, 0.5, 1.0, 1.5, 2.0]) / (c0 * c0);
    PhiTable {
        values,
        curvature,
        l2,
    }
}

fn parzen_derivative(x: f64) -> f64 {
    let ax = x.abs();
    let s = x.signum();
    if ax <= 0.5 {
        -12.0 * x + 18.0 * x * ax
    } else if ax <= 1.0 {
        let t = 1.0 - ax;
        -6.0 * s * t * t
    } else {
        0.0
    }
}

/// Self-convolution of the Parzen kernel at `t`, exact up to rounding: the
/// integrand is piecewise polynomial of degree <= 6, integrated with 8-node
/// Gauss-Legendre on each polynomial piece.
fn parzen_conv(t: f64) -> f64 {
    let t = t.abs();
    if t >= 2.0 {
        return 0.0;
    }
    let lo = (t - 1.0).max(-1.0);
    let hi = 1.0f64;
    let mut knots: Vec<f64> = vec![lo, hi];
    for b in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        for cand in [b, t - b] {
            if cand > lo + 1e-14 && cand < hi - 1e-14 {
                knots.push(cand);
            }
        }
    }
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    gauss_legendre(&|u: f64| parzen(u) * parzen(t - u), &knots)
}

#[allow(clippy::excessive_precision)]
const GL8_NODES: [f64; 4] = [
    0.18343464249564980,
    0.52553240991632899,
    0.79666647741362674,
    0.96028985649753623,
];
#[allow(clippy::excessive_precision)]
const GL8_WEIGHTS: [f64; 4] = [
    0.36268378337836198,
    0.31370664587788729,
    0.22238103445337447,
    0.10122853629037626,
];

fn gauss_legendre(f: &dyn Fn(f64) -> f64, knots: &[f64]) -> f64 {
    let mut total = 0.0;
    for seg in knots.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mid = 0.5 * (a + b);
        let rad = 0.5 * (b - a);
        let mut s = 0.0;
        for (&x, &w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            s += w * (f(mid + rad * x) + f(mid - rad * x));
        }
        total += s * rad;
    }
    total
}

/// Configuration for one batch of multiplier sequences.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierConfig {
    /// Sequence length (matches the sample size).
    pub n: usize,
    /// Bandwidth in observation-index units; the dependence range.
    pub ell: usize,
    /// Number of independent sequences to generate.
    pub replicates: usize,
    /// Reproducibility seed; replicate `m` draws from substream `m`.
    pub seed: u64,
}

impl MultiplierConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("multiplier sequence length must be >= 1"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("multiplier replicate count must be >= 1"));
        }
        if self.ell == 0 {
            return Err(Error::invalid("bandwidth ell must be >= 1"));
        }
        if self.ell > self.n {
            return Err(Error::invalid(format!(
                "bandwidth ell = {} exceeds sequence length n = {}",
                self.ell, self.n
            )));
        }
        if self.ell > self.n / 2 {
            log::warn!(
                "bandwidth ell = {} exceeds n/2 = {}; the dependent multiplier \
                 asymptotics assume ell = o(n)",
                self.ell,
                self.n / 2
            );
        }
        Ok(())
    }
}

/// A batch of `replicates` multiplier sequences of length `n` (row-major).
#[derive(Debug, Clone)]
pub struct MultiplierBatch {
    data: Vec<f64>,
    n: usize,
    replicates: usize,
}

impl MultiplierBatch {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    #[inline]
    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.n..(m + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Half window of the moving average for bandwidth `ell`.
pub fn half_window(ell: usize) -> usize {
    ell / 2 + 1
}

/// Moving-average weights `parzen(j / b)`, `j = -b..=b`, unnormalized.
fn weights(ell: usize) -> Vec<f64> {
    let b = half_window(ell) as isize;
    (-b..=b).map(|j| parzen(j as f64 / b as f64)).collect()
}

/// Lag correlation implied by the moving-average weights:
/// `rho(h) = sum_j w_j w_{j+h} / sum_j w_j^2` for `h = 0..=2b`. This is the
/// exact autocorrelation of the generated sequences and converges to
/// `phi(h / ell)` as the bandwidth grows.
pub fn weight_autocorrelation(ell: usize) -> Vec<f64> {
    let w = weights(ell);
    let norm: f64 = w.iter().map(|v| v * v).sum();
    let len = w.len();
    (0..len)
        .map(|h| {
            let dot: f64 = (0..len - h).map(|j| w[j] * w[j + h]).sum();
            dot / norm
        })
        .collect()
}

/// Generates a batch of dependent multiplier sequences.
///
/// Each replicate `m` draws `n + 2b` i.i.d. standard normal innovations from
/// its own substream (`b = ell/2 + 1`) and smooths them with Parzen weights;
/// the normalization makes the variance exactly one. Entries further than
/// `2(b-1)` apart share no innovations and are therefore exactly
/// independent, giving `ell`-dependence.
pub fn gen_multipliers(config: &MultiplierConfig) -> Result<MultiplierBatch> {
    config.validate()?;
    let n = config.n;
    let b = half_window(config.ell);
    let w = weights(config.ell);
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let window = w.len(); // 2b + 1

    let rows: Vec<Vec<f64>> = par::map_indexed(config.replicates, |m| {
        let mut rng = stream_rng(config.seed, m as u64);
        let innovations: Vec<f64> = (0..n + 2 * b)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut row = Vec::with_capacity(n);
        for t in 0..n {
            let mut acc = 0.0;
            for (j, &wj) in w.iter().enumerate() {
                acc += wj * innovations[t + j];
            }
            row.push(acc / norm);
        }
        debug_assert_eq!(window, 2 * b + 1);
        row
    });

    let mut data = Vec::with_capacity(config.replicates * n);
    for row in rows {
        data.extend_from_slice(&row);
    }
    Ok(MultiplierBatch {
        data,
        n,
        replicates: config.replicates,
    })
}
