//! Sequential processes built from range U-statistics.
//!
//! Paths live on the grid `k = 0..=n` with the value at time fraction `s`
//! taken at `floor(n s)` (left-closed step convention). [`u_process`] tracks
//! the scaled fluctuation of the running U-statistic around a known target;
//! [`cusum_process`] compares the two U-statistics on either side of every
//! split point, which is the basis of the change-point test.

use crate::error::{Error, Result};
use crate::table::PrefixTable;

/// A process path sampled on the grid `k/n`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    values: Vec<f64>,
}

impl ProcessPath {
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        ProcessPath { values }
    }

    /// Number of observations behind the path (`values` has `n + 1` entries).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Path value at time fraction `s in [0, 1]`: the grid value at
    /// `floor(n s)`. The small offset guards against `k/n * n` landing just
    /// below `k` in floating point.
    pub fn at(&self, s: f64) -> f64 {
        let n = self.n() as f64;
        let idx = (n * s.clamp(0.0, 1.0) + 1e-9).floor() as usize;
        self.values[idx.min(self.n())]
    }

    /// Largest absolute value over the interior support `2..=n-2` used by
    /// the change-point statistic; 0 when that support is empty.
    pub fn sup_abs_interior(&self) -> f64 {
        let n = self.n();
        if n < 4 {
            return 0.0;
        }
        self.values[2..=n - 2]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Scaled fluctuation process of the running U-statistic around `theta`:
/// value `sqrt(n) * (k/n) * (U_{first k} - theta)` at grid point `k >= 2`,
/// zero below. `theta` is the known target, so this is mainly a simulation
/// and diagnostics tool.
pub fn u_process(table: &PrefixTable, theta: f64) -> Result<ProcessPath> {
    let n = table.n();
    if n < 2 {
        return Err(Error::SampleTooSmall { min: 2, got: n });
    }
    if !theta.is_finite() {
        return Err(Error::invalid("theta must be finite"));
    }
    let scale = (n as f64).sqrt();
    let mut values = vec![0.0; n + 1];
    for (k, slot) in values.iter_mut().enumerate().skip(2) {
        *slot = scale * (k as f64 / n as f64) * (table.u_prefix(k) - theta);
    }
    Ok(ProcessPath::from_values(values))
}

/// Two-sample difference process over all split points:
/// `sqrt(n) * (k/n) * ((n-k)/n) * (U_{first k} - U_{last n-k})` for
/// `2 <= k <= n-2`, zero elsewhere. The target cancels, so no `theta` is
/// needed.
pub fn cusum_process(table: &PrefixTable) -> Result<ProcessPath> {
    let n = table.n();
    if n < 4 {
        return Err(Error::SampleTooSmall { min: 4, got: n });
    }
    let scale = (n as f64).sqrt();
    let nf = n as f64;
    let mut values = vec![0.0; n + 1];
    for (k, slot) in values.iter_mut().enumerate().take(n - 1).skip(2) {
        let s = k as f64 / nf;
        *slot = scale * s * (1.0 - s) * (table.u_prefix(k) - table.u_suffix(k));
    }
    Ok(ProcessPath::from_values(values))
}

/// Sup-norm statistic of a [`cusum_process`] path over its interior support.
pub fn cusum_statistic(path: &ProcessPath) -> f64 {
    path.sup_abs_interior()
}

/// Split point `k` maximizing `|path[k]|` over the interior support, ties
/// broken towards the smallest `k`. `None` when the support is empty.
pub fn change_point_index(path: &ProcessPath) -> Option<usize> {
    let n = path.n();
    if n < 4 {
        return None;
    }
    let values = path.values();
    let mut best = 2;
    for k in 3..=n - 2 {
        if values[k].abs() > values[best].abs() {
            best = k;
        }
    }
    Some(best)
}
