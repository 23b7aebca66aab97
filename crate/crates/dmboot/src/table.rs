//! Cached pairwise kernel aggregates.
//!
//! [`PrefixTable`] precomputes, in O(n^2) kernel evaluations, everything the
//! sequential processes and their bootstrap replicates need: pair sums over
//! prefixes and suffixes (giving O(1) range U-statistics for the grids the
//! processes live on) and per-row totals (giving O(n) full-sample
//! pseudo-observations). Below a configurable size threshold the dense
//! kernel matrix is kept so the bootstrap sweeps read rows directly; above
//! it rows are recomputed on demand.
//!
//! The table is immutable after construction and safe to share across
//! worker threads.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::par;
use crate::sample::Sample;
use crate::util::{binom2, CompensatedSum};

/// Largest `n` for which the dense kernel matrix is cached by default.
pub const DEFAULT_DENSE_THRESHOLD: usize = 4096;

#[derive(Debug, Clone)]
pub struct PrefixTable {
    sample: Sample,
    kernel: Kernel,
    n: usize,
    /// Dense symmetric kernel matrix (row-major, including the diagonal),
    /// present when `n <= dense_threshold`.
    dense: Option<Vec<f64>>,
    /// Sum over `j != i` of `h(x_i, x_j)`.
    row_total: Vec<f64>,
    /// `pair_prefix[k]` = sum of `h` over pairs within the first `k` rows.
    pair_prefix: Vec<f64>,
    /// `pair_suffix[k]` = sum of `h` over pairs within rows `k..n`.
    pair_suffix: Vec<f64>,
}

impl PrefixTable {
    /// Builds the table with the default dense-storage threshold.
    pub fn build(sample: &Sample, kernel: &Kernel) -> Result<Self> {
        Self::build_with(sample, kernel, DEFAULT_DENSE_THRESHOLD)
    }

    /// Builds the table, caching the dense kernel matrix only when
    /// `n <= dense_threshold`.
    pub fn build_with(sample: &Sample, kernel: &Kernel, dense_threshold: usize) -> Result<Self> {
        kernel.check_dim(sample.dim())?;
        let n = sample.n();

        let dense = if n <= dense_threshold {
            let mut matrix = vec![0.0f64; n * n];
            let failures: Vec<Option<(usize, usize)>> = {
                #[cfg(feature = "parallel")]
                {
                    use rayon::prelude::*;
                    matrix
                        .par_chunks_mut(n)
                        .enumerate()
                        .map(|(i, row)| fill_row(sample, kernel, i, row))
                        .collect()
                }
                #[cfg(not(feature = "parallel"))]
                {
                    matrix
                        .chunks_mut(n)
                        .enumerate()
                        .map(|(i, row)| fill_row(sample, kernel, i, row))
                        .collect()
                }
            };
            if let Some((i, j)) = failures.into_iter().flatten().next() {
                return Err(Error::NonFiniteKernel { i, j });
            }
            Some(matrix)
        } else {
            None
        };

        // Per-row prefix/suffix sums; everything else is a scan over these.
        let splits: Vec<(f64, f64)> = match &dense {
            Some(matrix) => par::map_indexed(n, |k| {
                let row = &matrix[k * n..(k + 1) * n];
                (comp_slice_sum(&row[..k]), comp_slice_sum(&row[k + 1..]))
            }),
            None => par::try_map_indexed(n, |k| -> Result<(f64, f64)> {
                let mut pre = CompensatedSum::default();
                for i in 0..k {
                    pre.add(eval_checked(kernel, sample, i, k)?);
                }
                let mut suf = CompensatedSum::default();
                for j in k + 1..n {
                    suf.add(eval_checked(kernel, sample, k, j)?);
                }
                Ok((pre.value(), suf.value()))
            })?,
        };

        let mut row_total = Vec::with_capacity(n);
        let mut pair_prefix = Vec::with_capacity(n + 1);
        let mut pair_suffix = vec![0.0; n + 1];
        let mut acc = CompensatedSum::default();
        pair_prefix.push(0.0);
        for (pre, suf) in &splits {
            row_total.push(pre + suf);
            acc.add(*pre);
            pair_prefix.push(acc.value());
        }
        let mut acc = CompensatedSum::default();
        for k in (0..n).rev() {
            acc.add(splits[k].1);
            pair_suffix[k] = acc.value();
        }

        Ok(PrefixTable {
            sample: sample.clone(),
            kernel: kernel.clone(),
            n,
            dense,
            row_total,
            pair_prefix,
            pair_suffix,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    /// Whether the dense kernel matrix is cached.
    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// U-statistic over the first `k` observations; 0 when `k < 2`.
    #[inline]
    pub fn u_prefix(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        if k < 2 {
            0.0
        } else {
            self.pair_prefix[k] / binom2(k)
        }
    }

    /// U-statistic over the observations after the first `k`; 0 when fewer
    /// than two remain.
    #[inline]
    pub fn u_suffix(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        let w = self.n - k;
        if w < 2 {
            0.0
        } else {
            self.pair_suffix[k] / binom2(w)
        }
    }

    /// Full-sample U-statistic.
    pub fn u_full(&self) -> f64 {
        self.u_prefix(self.n)
    }

    /// U-statistic over an arbitrary observation range (0-based, half-open).
    /// A single-observation range returns 0 by convention.
    pub fn u_range(&self, range: Range<usize>) -> Result<f64> {
        self.check_range(&range)?;
        let w = range.len();
        if w < 2 {
            return Ok(0.0);
        }
        if range.start == 0 {
            return Ok(self.u_prefix(range.end));
        }
        if range.end == self.n {
            return Ok(self.u_suffix(range.start));
        }
        let mut acc = CompensatedSum::default();
        for i in range.clone() {
            for j in i + 1..range.end {
                acc.add(self.kernel_value(i, j));
            }
        }
        Ok(acc.value() / binom2(w))
    }

    /// Pseudo-observations over an observation range: the plug-in estimates
    /// of the linear Hoeffding term for each row in the range. They sum to
    /// zero by construction; a single-observation range yields `[0]`.
    pub fn pseudo_observations(&self, range: Range<usize>) -> Result<Vec<f64>> {
        self.check_range(&range)?;
        let w = range.len();
        if w < 2 {
            return Ok(vec![0.0; w]);
        }
        let u = self.u_range(range.clone())?;
        let scale = 1.0 / (w as f64 - 1.0);
        let full = range.start == 0 && range.end == self.n;
        let mut out = Vec::with_capacity(w);
        for i in range.clone() {
            let s = if full {
                self.row_total[i]
            } else {
                let mut acc = CompensatedSum::default();
                for j in range.clone() {
                    if j != i {
                        acc.add(self.kernel_value(i, j));
                    }
                }
                acc.value()
            };
            out.push(s * scale - u);
        }
        Ok(out)
    }

    /// Full-sample pseudo-observations in O(n), from the cached row totals.
    pub fn pseudo_full(&self) -> Vec<f64> {
        if self.n < 2 {
            return vec![0.0; self.n];
        }
        let u = self.u_full();
        let scale = 1.0 / (self.n as f64 - 1.0);
        self.row_total.iter().map(|&s| s * scale - u).collect()
    }

    /// Sum over `j < k, j != i` of `h(x_i, x_j)`; O(k).
    pub fn row_prefix(&self, i: usize, k: usize) -> f64 {
        debug_assert!(i < self.n && k <= self.n);
        let mut acc = CompensatedSum::default();
        match &self.dense {
            Some(matrix) => {
                let row = &matrix[i * self.n..i * self.n + k];
                for (j, &v) in row.iter().enumerate() {
                    if j != i {
                        acc.add(v);
                    }
                }
            }
            None => {
                for j in 0..k {
                    if j != i {
                        acc.add(self.kernel_value(i, j));
                    }
                }
            }
        }
        acc.value()
    }

    /// Sum over `j >= k, j != i` of `h(x_i, x_j)`; O(n - k).
    pub fn row_suffix(&self, i: usize, k: usize) -> f64 {
        debug_assert!(i < self.n && k <= self.n);
        let mut acc = CompensatedSum::default();
        match &self.dense {
            Some(matrix) => {
                let row = &matrix[i * self.n + k..(i + 1) * self.n];
                for (off, &v) in row.iter().enumerate() {
                    if k + off != i {
                        acc.add(v);
                    }
                }
            }
            None => {
                for j in k..self.n {
                    if j != i {
                        acc.add(self.kernel_value(i, j));
                    }
                }
            }
        }
        acc.value()
    }

    /// Sum over all `j != i` of `h(x_i, x_j)`.
    pub fn row_full(&self, i: usize) -> f64 {
        self.row_total[i]
    }

    /// Kernel value for one pair (dense lookup or recomputed).
    #[inline]
    pub fn kernel_value(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(matrix) => matrix[i * self.n + j],
            None => self.kernel.eval(self.sample.row(i), self.sample.row(j)),
        }
    }

    /// Row `j` of the dense kernel matrix, if cached.
    #[inline]
    pub(crate) fn kernel_row(&self, j: usize) -> Option<&[f64]> {
        self.dense
            .as_ref()
            .map(|matrix| &matrix[j * self.n..(j + 1) * self.n])
    }

    /// Fills `out[lo..hi]` with `h(x_j, x_i)` for `i` in `lo..hi`
    /// (recompute-mode replacement for [`PrefixTable::kernel_row`]).
    pub(crate) fn fill_kernel_row(&self, j: usize, out: &mut [f64], lo: usize, hi: usize) {
        let xj = self.sample.row(j);
        for (i, slot) in out[lo..hi].iter_mut().enumerate() {
            *slot = self.kernel.eval(xj, self.sample.row(lo + i));
        }
    }

    fn check_range(&self, range: &Range<usize>) -> Result<()> {
        if range.start >= range.end || range.end > self.n {
            return Err(Error::IndexRange {
                start: range.start,
                end: range.end,
                n: self.n,
            });
        }
        Ok(())
    }
}

fn fill_row(sample: &Sample, kernel: &Kernel, i: usize, row: &mut [f64]) -> Option<(usize, usize)> {
    let xi = sample.row(i);
    for (j, slot) in row.iter_mut().enumerate() {
        let v = kernel.eval(xi, sample.row(j));
        if !v.is_finite() {
            return Some((i.min(j), i.max(j)));
        }
        *slot = v;
    }
    None
}

fn eval_checked(kernel: &Kernel, sample: &Sample, i: usize, j: usize) -> Result<f64> {
    let v = kernel.eval(sample.row(i), sample.row(j));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteKernel { i, j })
    }
}

fn comp_slice_sum(slice: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for &v in slice {
        acc.add(v);
    }
    acc.value()
}
