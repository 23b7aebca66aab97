//! Multiplier bootstrap replicates of the sequential processes.
//!
//! Two computable variants exist for every replicate: `Hat` re-weights the
//! full-sample pseudo-observations, `Check` re-estimates pseudo-observations
//! on the running window (prefix or suffix) at every grid point. `Check` is
//! evaluated incrementally from the kernel rows, O(n) per grid step and
//! O(n^2) per replicate instead of the naive O(n^3).
//!
//! Replicates are embarrassingly parallel over the multiplier rows; the
//! prefix table is shared read-only and every worker owns its row and
//! output buffers, so results do not depend on scheduling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier::MultiplierBatch;
use crate::par;
use crate::process::ProcessPath;
use crate::table::PrefixTable;
use crate::util::CompensatedSum;

/// Which pseudo-observations weight the replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Full-sample pseudo-observations.
    Hat,
    /// Running-window pseudo-observations, re-estimated at every grid point.
    Check,
}

/// Which process the replicates resample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// The running U-statistic fluctuation process.
    U,
    /// The split-point difference process behind the change-point test.
    Cusum,
}

/// A batch of bootstrap replicate paths, plus their sup-norm statistics for
/// change-point targets.
#[derive(Debug, Clone)]
pub struct ReplicateSet {
    pub method: Method,
    pub target: Target,
    pub paths: Vec<ProcessPath>,
    /// Sup-norm statistics over the interior support; present for
    /// [`Target::Cusum`].
    pub stats: Option<Vec<f64>>,
}

fn check_inputs(table: &PrefixTable, xi: &[f64], min_n: usize) -> Result<()> {
    let n = table.n();
    if n < min_n {
        return Err(Error::SampleTooSmall { min: min_n, got: n });
    }
    if xi.len() != n {
        return Err(Error::invalid(format!(
            "multiplier row length {} does not match sample size {}",
            xi.len(),
            n
        )));
    }
    Ok(())
}

/// Bootstrap replicate of the forward U-process for one multiplier row.
pub fn replicate_u(table: &PrefixTable, xi: &[f64], method: Method) -> Result<ProcessPath> {
    check_inputs(table, xi, 2)?;
    let n = table.n();
    let mut out = vec![0.0; n + 1];
    match method {
        Method::Hat => {
            let pseudo = table.pseudo_full();
            sweep_u_hat(&pseudo, xi, &mut out);
        }
        Method::Check => sweep_u_check(table, xi, &mut out, &mut vec![0.0; n]),
    }
    Ok(ProcessPath::from_values(out))
}

/// Bootstrap replicate of the tail U-process (built from the observations
/// after each grid point) for one multiplier row.
pub fn replicate_u_tail(table: &PrefixTable, xi: &[f64], method: Method) -> Result<ProcessPath> {
    check_inputs(table, xi, 2)?;
    let n = table.n();
    let mut out = vec![0.0; n + 1];
    match method {
        Method::Hat => {
            let pseudo = table.pseudo_full();
            sweep_u_tail_hat(&pseudo, xi, &mut out);
        }
        Method::Check => sweep_u_tail_check(table, xi, &mut out, &mut vec![0.0; n]),
    }
    Ok(ProcessPath::from_values(out))
}

/// Bootstrap replicate of the split-point difference process: the forward
/// and tail replicates combined with the split weights `(n-k)/n` and `k/n`,
/// which force zeros at both ends of the grid.
pub fn replicate_cusum(table: &PrefixTable, xi: &[f64], method: Method) -> Result<ProcessPath> {
    check_inputs(table, xi, 4)?;
    let forward = replicate_u(table, xi, method)?;
    let tail = replicate_u_tail(table, xi, method)?;
    let n = table.n();
    let mut out = vec![0.0; n + 1];
    combine_cusum(forward.values(), tail.values(), n, &mut out);
    Ok(ProcessPath::from_values(out))
}

/// Replicates a whole multiplier batch against one target process.
/// Deterministic for a fixed batch and method, independent of scheduling.
pub fn replicate_batch(
    table: &PrefixTable,
    batch: &MultiplierBatch,
    target: Target,
    method: Method,
) -> Result<ReplicateSet> {
    let n = table.n();
    if batch.n() != n {
        return Err(Error::invalid(format!(
            "multiplier batch length {} does not match sample size {}",
            batch.n(),
            n
        )));
    }
    let min_n = match target {
        Target::U => 2,
        Target::Cusum => 4,
    };
    if n < min_n {
        return Err(Error::SampleTooSmall { min: min_n, got: n });
    }

    let pseudo = match method {
        Method::Hat => Some(table.pseudo_full()),
        Method::Check => None,
    };
    let paths: Vec<ProcessPath> = par::map_indexed_scratch(
        batch.replicates(),
        || Scratch::new(n),
        |scratch, m| {
            let xi = batch.row(m);
            let mut out = vec![0.0; n + 1];
            match (target, method) {
                (Target::U, Method::Hat) => {
                    sweep_u_hat(pseudo.as_deref().expect("hat pseudo"), xi, &mut out)
                }
                (Target::U, Method::Check) => sweep_u_check(table, xi, &mut out, &mut scratch.row),
                (Target::Cusum, _) => {
                    fill_cusum(table, pseudo.as_deref(), xi, method, scratch, &mut out)
                }
            }
            ProcessPath::from_values(out)
        },
    );
    let stats = match target {
        Target::Cusum => Some(paths.iter().map(ProcessPath::sup_abs_interior).collect()),
        Target::U => None,
    };
    Ok(ReplicateSet {
        method,
        target,
        paths,
        stats,
    })
}

/// Sup-norm statistics of cusum replicates without materializing the paths;
/// used by the bootstrap p-value where only the statistics matter.
pub(crate) fn replicate_cusum_stats(
    table: &PrefixTable,
    batch: &MultiplierBatch,
    method: Method,
) -> Result<Vec<f64>> {
    let n = table.n();
    if batch.n() != n {
        return Err(Error::invalid(format!(
            "multiplier batch length {} does not match sample size {}",
            batch.n(),
            n
        )));
    }
    if n < 4 {
        return Err(Error::SampleTooSmall { min: 4, got: n });
    }
    let pseudo = match method {
        Method::Hat => Some(table.pseudo_full()),
        Method::Check => None,
    };
    Ok(par::map_indexed_scratch(
        batch.replicates(),
        || (Scratch::new(n), vec![0.0; n + 1]),
        |(scratch, out), m| {
            fill_cusum(table, pseudo.as_deref(), batch.row(m), method, scratch, out);
            let mut sup = 0.0f64;
            for v in &out[2..=n - 2] {
                sup = sup.max(v.abs());
            }
            sup
        },
    ))
}

struct Scratch {
    row: Vec<f64>,
    forward: Vec<f64>,
    tail: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            row: vec![0.0; n],
            forward: vec![0.0; n + 1],
            tail: vec![0.0; n + 1],
        }
    }
}

fn fill_cusum(
    table: &PrefixTable,
    pseudo: Option<&[f64]>,
    xi: &[f64],
    method: Method,
    scratch: &mut Scratch,
    out: &mut [f64],
) {
    let n = table.n();
    match method {
        Method::Hat => {
            let pseudo = pseudo.expect("hat pseudo");
            sweep_u_hat(pseudo, xi, &mut scratch.forward);
            sweep_u_tail_hat(pseudo, xi, &mut scratch.tail);
        }
        Method::Check => {
            sweep_u_check(table, xi, &mut scratch.forward, &mut scratch.row);
            sweep_u_tail_check(table, xi, &mut scratch.tail, &mut scratch.row);
        }
    }
    combine_cusum(&scratch.forward, &scratch.tail, n, out);
}

fn combine_cusum(forward: &[f64], tail: &[f64], n: usize, out: &mut [f64]) {
    let nf = n as f64;
    for k in 0..=n {
        let s = k as f64 / nf;
        out[k] = (1.0 - s) * forward[k] - s * tail[k];
    }
}

/// `out[k] = (2/sqrt n) sum_{i < k} xi_i pseudo_i` - the hat forward sweep.
fn sweep_u_hat(pseudo: &[f64], xi: &[f64], out: &mut [f64]) {
    let n = pseudo.len();
    let c = 2.0 / (n as f64).sqrt();
    let mut acc = CompensatedSum::default();
    out[0] = 0.0;
    for k in 1..=n {
        acc.add(xi[k - 1] * pseudo[k - 1]);
        out[k] = c * acc.value();
    }
}

/// `out[k] = (2/sqrt n) sum_{i >= k} xi_i pseudo_i` - the hat tail sweep.
fn sweep_u_tail_hat(pseudo: &[f64], xi: &[f64], out: &mut [f64]) {
    let n = pseudo.len();
    let c = 2.0 / (n as f64).sqrt();
    let mut acc = CompensatedSum::default();
    out[n] = 0.0;
    for k in (0..n).rev() {
        acc.add(xi[k] * pseudo[k]);
        out[k] = c * acc.value();
    }
}

/// Check forward sweep. Maintains `A(k) = sum_{i<k} xi_i R_i(k)` (with
/// `R_i(k)` the row sum of kernel values inside the prefix) and
/// `B(k) = sum_{i<k} xi_i`; the replicate value is
/// `(2/sqrt n) (A/(k-1) - U_prefix(k) B)`. One kernel row per step keeps the
/// update O(n).
fn sweep_u_check(table: &PrefixTable, xi: &[f64], out: &mut [f64], row_buf: &mut [f64]) {
    let n = table.n();
    let c = 2.0 / (n as f64).sqrt();
    let mut weighted_rows = CompensatedSum::default();
    let mut weight_total = CompensatedSum::default();
    out[0] = 0.0;
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let j = k - 1; // observation joining the prefix
        let (row_sum, row_dot) = match table.kernel_row(j) {
            Some(row) => prefix_dot(&row[..j], &xi[..j]),
            None => {
                table.fill_kernel_row(j, row_buf, 0, j);
                prefix_dot(&row_buf[..j], &xi[..j])
            }
        };
        weighted_rows.add(row_dot);
        weighted_rows.add(xi[j] * row_sum);
        weight_total.add(xi[j]);
        *slot = if k >= 2 {
            c * (weighted_rows.value() / (k as f64 - 1.0)
                - table.u_prefix(k) * weight_total.value())
        } else {
            // single-point window: pseudo-observations are 0 by convention
            0.0
        };
    }
}

/// Check tail sweep, mirroring [`sweep_u_check`] from the right edge; the
/// single-point suffix at `k = n-1` contributes 0 by the same convention.
fn sweep_u_tail_check(table: &PrefixTable, xi: &[f64], out: &mut [f64], row_buf: &mut [f64]) {
    let n = table.n();
    let c = 2.0 / (n as f64).sqrt();
    let mut weighted_rows = CompensatedSum::default();
    let mut weight_total = CompensatedSum::default();
    out[n] = 0.0;
    for k in (0..n).rev() {
        let j = k; // observation joining the suffix
        let (row_sum, row_dot) = match table.kernel_row(j) {
            Some(row) => prefix_dot(&row[j + 1..n], &xi[j + 1..n]),
            None => {
                table.fill_kernel_row(j, row_buf, j + 1, n);
                prefix_dot(&row_buf[j + 1..n], &xi[j + 1..n])
            }
        };
        weighted_rows.add(row_dot);
        weighted_rows.add(xi[j] * row_sum);
        weight_total.add(xi[j]);
        let width = n - k;
        out[k] = if width >= 2 {
            c * (weighted_rows.value() / (width as f64 - 1.0)
                - table.u_suffix(k) * weight_total.value())
        } else {
            0.0
        };
    }
}

#[inline]
fn prefix_dot(row: &[f64], xi: &[f64]) -> (f64, f64) {
    debug_assert_eq!(row.len(), xi.len());
    let mut sum = 0.0;
    let mut dot = 0.0;
    for (&h, &x) in row.iter().zip(xi.iter()) {
        sum += h;
        dot += h * x;
    }
    (sum, dot)
}
