//! Brute-force reference implementations shared by the integration suites.
//!
//! Everything here evaluates the defining sums directly (O(n^2) per range,
//! O(n^3) per check replicate) and deliberately avoids the incremental
//! machinery in the crate, so it can serve as an independent oracle.

#![allow(dead_code)]
// index loops keep the reference sums visibly identical to the formulas
#![allow(clippy::needless_range_loop)]

use dmboot::rng::stream_rng;
use dmboot::{BootMethod, Kernel, Sample};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn naive_kernel(kernel: &Kernel, x: &[f64], y: &[f64]) -> f64 {
    match kernel {
        Kernel::Variance => {
            let d = x[0] - y[0];
            d * d / 2.0
        }
        Kernel::GiniMeanDifference => (x[0] - y[0]).abs(),
        Kernel::Kendall => {
            let lt = x.iter().zip(y).all(|(a, b)| a < b);
            let gt = x.iter().zip(y).all(|(a, b)| b < a);
            (lt as u8 + gt as u8) as f64
        }
        Kernel::Custom { f, .. } => f(x, y),
    }
}

/// Direct evaluation of the range U-statistic (0-based half-open range).
pub fn naive_u(sample: &Sample, kernel: &Kernel, start: usize, end: usize) -> f64 {
    let w = end - start;
    if w < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in start..end {
        for j in i + 1..end {
            sum += naive_kernel(kernel, sample.row(i), sample.row(j));
        }
    }
    sum / (w as f64 * (w as f64 - 1.0) / 2.0)
}

/// Direct evaluation of the pseudo-observations over a range.
pub fn naive_pseudo(sample: &Sample, kernel: &Kernel, start: usize, end: usize) -> Vec<f64> {
    let w = end - start;
    if w < 2 {
        return vec![0.0; w];
    }
    let u = naive_u(sample, kernel, start, end);
    (start..end)
        .map(|i| {
            let mut s = 0.0;
            for j in start..end {
                if j != i {
                    s += naive_kernel(kernel, sample.row(i), sample.row(j));
                }
            }
            s / (w as f64 - 1.0) - u
        })
        .collect()
}

/// Direct evaluation of the forward U-process path.
pub fn naive_u_process(sample: &Sample, kernel: &Kernel, theta: f64) -> Vec<f64> {
    let n = sample.n();
    let mut vals = vec![0.0; n + 1];
    for k in 2..=n {
        vals[k] =
            (n as f64).sqrt() * (k as f64 / n as f64) * (naive_u(sample, kernel, 0, k) - theta);
    }
    vals
}

/// Direct evaluation of the split-point difference process.
pub fn naive_cusum(sample: &Sample, kernel: &Kernel) -> Vec<f64> {
    let n = sample.n();
    let mut vals = vec![0.0; n + 1];
    for k in 2..=n.saturating_sub(2) {
        let s = k as f64 / n as f64;
        vals[k] = (n as f64).sqrt()
            * s
            * (1.0 - s)
            * (naive_u(sample, kernel, 0, k) - naive_u(sample, kernel, k, n));
    }
    vals
}

/// Direct evaluation of the forward replicate (O(n^3) for check).
pub fn naive_replicate_u(
    sample: &Sample,
    kernel: &Kernel,
    xi: &[f64],
    method: BootMethod,
) -> Vec<f64> {
    let n = sample.n();
    let c = 2.0 / (n as f64).sqrt();
    let full = naive_pseudo(sample, kernel, 0, n);
    (0..=n)
        .map(|k| {
            let pseudo = match method {
                BootMethod::Hat => full[..k].to_vec(),
                BootMethod::Check => {
                    if k == 0 {
                        vec![]
                    } else {
                        naive_pseudo(sample, kernel, 0, k)
                    }
                }
            };
            c * xi[..k]
                .iter()
                .zip(&pseudo)
                .map(|(x, p)| x * p)
                .sum::<f64>()
        })
        .collect()
}

/// Direct evaluation of the tail replicate.
pub fn naive_replicate_u_tail(
    sample: &Sample,
    kernel: &Kernel,
    xi: &[f64],
    method: BootMethod,
) -> Vec<f64> {
    let n = sample.n();
    let c = 2.0 / (n as f64).sqrt();
    let full = naive_pseudo(sample, kernel, 0, n);
    (0..=n)
        .map(|k| {
            let pseudo: Vec<f64> = match method {
                BootMethod::Hat => full[k..].to_vec(),
                BootMethod::Check => {
                    if k == n {
                        vec![]
                    } else {
                        naive_pseudo(sample, kernel, k, n)
                    }
                }
            };
            c * xi[k..]
                .iter()
                .zip(&pseudo)
                .map(|(x, p)| x * p)
                .sum::<f64>()
        })
        .collect()
}

/// Direct evaluation of the cusum replicate.
pub fn naive_replicate_cusum(
    sample: &Sample,
    kernel: &Kernel,
    xi: &[f64],
    method: BootMethod,
) -> Vec<f64> {
    let n = sample.n();
    let forward = naive_replicate_u(sample, kernel, xi, method);
    let tail = naive_replicate_u_tail(sample, kernel, xi, method);
    (0..=n)
        .map(|k| {
            let s = k as f64 / n as f64;
            (1.0 - s) * forward[k] - s * tail[k]
        })
        .collect()
}

/// A random test instance: data (with occasional ties for the concordance
/// kernel), a kernel, and a multiplier row.
pub struct Instance {
    pub sample: Sample,
    pub kernel: Kernel,
    pub xi: Vec<f64>,
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = stream_rng(seed, 17);
    let n = rng.random_range(4..=30usize);
    let kernel = match seed % 3 {
        0 => Kernel::Variance,
        1 => Kernel::GiniMeanDifference,
        _ => Kernel::Kendall,
    };
    let d = match &kernel {
        Kernel::Kendall => {
            if seed % 5 == 2 {
                1
            } else {
                2
            }
        }
        _ => 1,
    };
    let tie_grid = seed % 4 == 3;
    let data: Vec<f64> = (0..n * d)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            if tie_grid {
                (v * 2.0).round() / 2.0
            } else {
                v
            }
        })
        .collect();
    let xi: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    Instance {
        sample: Sample::new(data, d).unwrap(),
        kernel,
        xi,
    }
}

/// Relative agreement within `tol`, anchored at the larger magnitude (or 1).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn assert_paths_close(got: &[f64], want: &[f64], tol: f64, label: &str) {
    assert_eq!(got.len(), want.len(), "{label}: length mismatch");
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        assert!(
            close(*g, *w, tol),
            "{label}: k={k}, got {g}, want {w}"
        );
    }
}
