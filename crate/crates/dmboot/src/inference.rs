//! Confidence intervals for the U-statistic target and the change-point
//! test, with asymptotic and multiplier-bootstrap calibration.

use serde::Serialize;

use crate::bandwidth::{estimate_bandwidth, longrun_variance, BandwidthDiagnostics};
use crate::bootstrap::{replicate_cusum_stats, Method};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::multiplier::{gen_multipliers, MultiplierConfig};
use crate::normal::normal_quantile;
use crate::process::{change_point_index, cusum_process, cusum_statistic};
use crate::sample::Sample;
use crate::table::PrefixTable;

/// Kolmogorov distribution function: the law of the sup-norm of a Brownian
/// bridge. Clamped to [0, 1]; total evaluation error is below 1e-12.
///
/// For `x >= 1` the alternating series `1 - 2 sum (-1)^(k-1) exp(-2k^2x^2)`
/// is truncated once the next term drops below 1e-12. Below 1 that series
/// is badly conditioned (the truncation jumps exceed the local increments,
/// breaking monotonicity), so the equivalent theta-function form with
/// positive terms is used instead; below 0.2 the value is under 6e-13 and
/// is reported as 0.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.2 {
        return 0.0;
    }
    if x < 1.0 {
        let scale = (2.0 * PI).sqrt() / x;
        let a = PI * PI / (8.0 * x * x);
        let mut sum = 0.0;
        for k in (1..20u32).step_by(2) {
            let term = (-((k * k) as f64) * a).exp();
            if term < 1e-17 {
                break;
            }
            sum += term;
        }
        return (scale * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=1000u32 {
        let e = (k as f64) * x;
        let term = 2.0 * (-2.0 * e * e).exp();
        if term < 1e-12 {
            break;
        }
        sum += sign * term;
        sign = -sign;
    }
    (1.0 - sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    Asymptotic,
    Bootstrap,
}

/// Change-point test calibrations. Bootstrap variants name the replicate
/// flavor (hat = full-sample pseudo-observations, check = running windows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CpMethod {
    Asymptotic,
    Hat,
    Check,
}

impl CpMethod {
    fn bootstrap_method(self) -> Option<Method> {
        match self {
            CpMethod::Asymptotic => None,
            CpMethod::Hat => Some(Method::Hat),
            CpMethod::Check => Some(Method::Check),
        }
    }
}

/// A confidence interval for the U-statistic target.
#[derive(Debug, Clone, Serialize)]
pub struct CiResult {
    /// Full-sample U-statistic (point estimate).
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nominal miscoverage level in (0, 1).
    pub alpha: f64,
    pub method: CiMethod,
    /// Long-run standard deviation estimate (asymptotic method).
    pub sigma_hat: Option<f64>,
    /// Bootstrap replicate count (bootstrap method).
    pub replicates: Option<usize>,
    /// Set when the interval collapsed to a point (zero variance input).
    pub degenerate: bool,
    /// Bandwidth actually used for the multipliers / HAC weights.
    pub ell: usize,
    /// Pilot diagnostics; absent when the bandwidth was overridden.
    pub diagnostics: Option<BandwidthDiagnostics>,
}

/// Change-point test outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CpTestResult {
    /// Sup-norm statistic of the split-point difference process.
    pub statistic: f64,
    pub p_value: f64,
    pub method: CpMethod,
    /// Long-run standard deviation estimate (asymptotic method).
    pub sigma_hat: Option<f64>,
    /// Bootstrap replicate count (bootstrap methods).
    pub replicates: Option<usize>,
    /// Split point maximizing the absolute process, ties to the smallest.
    pub change_point: usize,
    /// Set when the asymptotic scale estimate degenerated to zero.
    pub degenerate: bool,
    /// Bandwidth actually used.
    pub ell: usize,
    /// Pilot diagnostics; absent when the bandwidth was overridden.
    pub diagnostics: Option<BandwidthDiagnostics>,
}

struct Prepared {
    table: PrefixTable,
    pseudo: Vec<f64>,
    ell: usize,
    diagnostics: Option<BandwidthDiagnostics>,
}

fn prepare(sample: &Sample, kernel: &Kernel, ell_override: Option<usize>) -> Result<Prepared> {
    let n = sample.n();
    if n < 8 {
        return Err(Error::SampleTooSmall { min: 8, got: n });
    }
    let table = PrefixTable::build(sample, kernel)?;
    let pseudo = table.pseudo_full();
    let (ell, diagnostics) = match ell_override {
        Some(ell) => {
            if ell == 0 || ell > n {
                return Err(Error::invalid(format!(
                    "bandwidth override ell = {ell} must lie in 1..={n}"
                )));
            }
            (ell, None)
        }
        None => {
            let diag = estimate_bandwidth(&pseudo)?;
            (diag.ell_opt, Some(diag))
        }
    };
    Ok(Prepared {
        table,
        pseudo,
        ell,
        diagnostics,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie strictly in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Asymptotic-normal confidence interval: the point estimate plus/minus
/// `z_{1-alpha/2} * 2 sigma_hat / sqrt(n)`, with the long-run scale
/// estimated from the full-sample pseudo-observations at the automatic
/// bandwidth (or `ell_override`).
pub fn ci_asymptotic(
    sample: &Sample,
    kernel: &Kernel,
    alpha: f64,
    ell_override: Option<usize>,
) -> Result<CiResult> {
    check_alpha(alpha)?;
    let prep = prepare(sample, kernel, ell_override)?;
    let estimate = prep.table.u_full();
    let n = prep.table.n() as f64;
    let sigma = longrun_variance(&prep.pseudo, prep.ell).sqrt();
    let (lower, upper, degenerate) = if sigma == 0.0 {
        (estimate, estimate, true)
    } else {
        let half = normal_quantile(1.0 - alpha / 2.0) * 2.0 * sigma / n.sqrt();
        (estimate - half, estimate + half, false)
    };
    Ok(CiResult {
        estimate,
        lower,
        upper,
        alpha,
        method: CiMethod::Asymptotic,
        sigma_hat: Some(sigma),
        replicates: None,
        degenerate,
        ell: prep.ell,
        diagnostics: prep.diagnostics,
    })
}

/// Basic bootstrap confidence interval from the order statistics of the
/// terminal replicate values: `[U - v_(hi)/sqrt n, U - v_(lo)/sqrt n]` with
/// `hi = floor((1-alpha/2)(M+1))` and `lo = ceil((alpha/2)(M+1))`, both
/// clamped to `1..=M`.
pub fn ci_bootstrap(
    sample: &Sample,
    kernel: &Kernel,
    alpha: f64,
    replicates: usize,
    seed: u64,
    ell_override: Option<usize>,
) -> Result<CiResult> {
    check_alpha(alpha)?;
    if (replicates as f64) < 1.0 / alpha {
        return Err(Error::invalid(format!(
            "replicates = {replicates} too small for alpha = {alpha}; need at least 1/alpha"
        )));
    }
    let prep = prepare(sample, kernel, ell_override)?;
    let n = prep.table.n();
    let estimate = prep.table.u_full();
    let batch = gen_multipliers(&MultiplierConfig {
        n,
        ell: prep.ell,
        replicates,
        seed,
    })?;
    // Terminal value of a forward replicate; hat and check coincide there.
    let scale = 2.0 / (n as f64).sqrt();
    let mut terminal: Vec<f64> = batch
        .rows()
        .map(|xi| {
            scale
                * xi.iter()
                    .zip(&prep.pseudo)
                    .map(|(x, p)| x * p)
                    .sum::<f64>()
        })
        .collect();
    terminal.sort_by(|a, b| a.partial_cmp(b).expect("finite replicate values"));
    let m = replicates as f64;
    // Small offsets keep exactly-integer products from flooring down.
    let hi = (((1.0 - alpha / 2.0) * (m + 1.0) + 1e-9).floor() as usize).clamp(1, replicates);
    let lo = (((alpha / 2.0) * (m + 1.0) - 1e-9).ceil() as usize).clamp(1, replicates);
    let lower = estimate - terminal[hi - 1] / (n as f64).sqrt();
    let upper = estimate - terminal[lo - 1] / (n as f64).sqrt();
    Ok(CiResult {
        estimate,
        lower,
        upper,
        alpha,
        method: CiMethod::Bootstrap,
        sigma_hat: None,
        replicates: Some(replicates),
        degenerate: lower == upper,
        ell: prep.ell,
        diagnostics: prep.diagnostics,
    })
}

/// Change-point test based on the sup-norm of the split-point difference
/// process.
///
/// With `CpMethod::Asymptotic` the p-value is `1 - F_K(S / (2 sigma_hat))`
/// (Kolmogorov limit of the scale-normalized statistic). With the bootstrap
/// methods it is the fraction of replicate statistics at least as large as
/// the observed one, ties counting as exceedances, so p-values live on the
/// grid `{0, 1/M, ..., 1}`.
pub fn cp_test(
    sample: &Sample,
    kernel: &Kernel,
    method: CpMethod,
    replicates: usize,
    seed: u64,
    ell_override: Option<usize>,
) -> Result<CpTestResult> {
    let prep = prepare(sample, kernel, ell_override)?;
    finish_cp_test(&prep, method, replicates, seed)
}

/// Runs all three calibrations on one sample, sharing the prefix table,
/// bandwidth selection and multiplier batch (the check/hat statistics reuse
/// the same multiplier rows). Used by the Monte Carlo driver.
pub(crate) fn cp_test_all(
    sample: &Sample,
    kernel: &Kernel,
    replicates: usize,
    seed: u64,
    ell_override: Option<usize>,
) -> Result<CpTestAll> {
    let prep = prepare(sample, kernel, ell_override)?;
    let base = cp_base(&prep)?;
    let batch = gen_multipliers(&MultiplierConfig {
        n: prep.table.n(),
        ell: prep.ell,
        replicates,
        seed,
    })?;
    let check_stats = replicate_cusum_stats(&prep.table, &batch, Method::Check)?;
    let hat_stats = replicate_cusum_stats(&prep.table, &batch, Method::Hat)?;
    Ok(CpTestAll {
        check: bootstrap_result(&prep, &base, CpMethod::Check, &check_stats),
        hat: bootstrap_result(&prep, &base, CpMethod::Hat, &hat_stats),
        asymptotic: asymptotic_result(&prep, &base),
    })
}

pub(crate) struct CpTestAll {
    pub check: CpTestResult,
    pub hat: CpTestResult,
    pub asymptotic: CpTestResult,
}

struct CpBase {
    statistic: f64,
    change_point: usize,
}

fn cp_base(prep: &Prepared) -> Result<CpBase> {
    let path = cusum_process(&prep.table)?;
    Ok(CpBase {
        statistic: cusum_statistic(&path),
        change_point: change_point_index(&path).expect("n >= 8 has interior support"),
    })
}

fn asymptotic_result(prep: &Prepared, base: &CpBase) -> CpTestResult {
    let sigma = longrun_variance(&prep.pseudo, prep.ell).sqrt();
    let (p_value, degenerate) = if sigma == 0.0 {
        (if base.statistic == 0.0 { 1.0 } else { 0.0 }, true)
    } else {
        (1.0 - kolmogorov_cdf(base.statistic / (2.0 * sigma)), false)
    };
    CpTestResult {
        statistic: base.statistic,
        p_value,
        method: CpMethod::Asymptotic,
        sigma_hat: Some(sigma),
        replicates: None,
        change_point: base.change_point,
        degenerate,
        ell: prep.ell,
        diagnostics: prep.diagnostics.clone(),
    }
}

fn bootstrap_result(
    prep: &Prepared,
    base: &CpBase,
    method: CpMethod,
    stats: &[f64],
) -> CpTestResult {
    let exceed = stats.iter().filter(|s| **s >= base.statistic).count();
    CpTestResult {
        statistic: base.statistic,
        p_value: exceed as f64 / stats.len() as f64,
        method,
        sigma_hat: None,
        replicates: Some(stats.len()),
        change_point: base.change_point,
        degenerate: false,
        ell: prep.ell,
        diagnostics: prep.diagnostics.clone(),
    }
}

fn finish_cp_test(
    prep: &Prepared,
    method: CpMethod,
    replicates: usize,
    seed: u64,
) -> Result<CpTestResult> {
    let base = cp_base(prep)?;
    match method.bootstrap_method() {
        None => Ok(asymptotic_result(prep, &base)),
        Some(boot) => {
            if replicates == 0 {
                return Err(Error::invalid("bootstrap replicate count must be >= 1"));
            }
            if replicates < 100 {
                log::warn!(
                    "bootstrap p-values with M = {replicates} replicates are coarse; \
                     M >= 100 recommended"
                );
            }
            let batch = gen_multipliers(&MultiplierConfig {
                n: prep.table.n(),
                ell: prep.ell,
                replicates,
                seed,
            })?;
            let stats = replicate_cusum_stats(&prep.table, &batch, boot)?;
            Ok(bootstrap_result(prep, &base, method, &stats))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_sample(n: usize, seed: u64) -> Sample {
        let mut rng = stream_rng(seed, 0);
        Sample::univariate((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn kolmogorov_reference_values() {
        assert_eq!(kolmogorov_cdf(0.0), 0.0);
        assert_eq!(kolmogorov_cdf(-1.0), 0.0);
        assert!((kolmogorov_cdf(10.0) - 1.0).abs() < 1e-15);
        // classical 5% critical value
        assert_abs_diff_eq!(kolmogorov_cdf(1.3581), 0.95, epsilon = 1e-3);
        // independently computed (scipy kstwobign.cdf), covering both branches
        for (x, want) in [
            (0.3, 9.305801334566636e-6),
            (0.5, 0.036054756335124914),
            (0.8, 0.45585758842580193),
            (0.99, 0.719126160774451),
            (1.0, 0.7300003283226455),
            (1.01, 0.7405658309064025),
            (2.0, 0.9993290747442203),
        ] {
            assert_abs_diff_eq!(kolmogorov_cdf(x), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn kolmogorov_series_truncation_error_bound() {
        // the reported value differs from a much deeper summation by less
        // than the 1e-12 truncation tolerance, at random abscissae
        let mut rng = stream_rng(40, 0);
        for _ in 0..200 {
            let x: f64 = 0.2 + 3.6 * rng.random::<f64>();
            let mut deep = 0.0;
            let mut sign = 1.0;
            for k in 1..=4000u32 {
                let e = (k as f64) * x;
                let term = 2.0 * (-2.0 * e * e).exp();
                if term < 1e-30 {
                    break;
                }
                deep += sign * term;
                sign = -sign;
            }
            let deep = (1.0 - deep).clamp(0.0, 1.0);
            assert!(
                (kolmogorov_cdf(x) - deep).abs() < 1e-12,
                "x={x}: {} vs {deep}",
                kolmogorov_cdf(x)
            );
        }
    }

    #[test]
    fn kolmogorov_is_monotone_into_unit_interval() {
        let mut prev = 0.0;
        for i in 0..=4000 {
            let x = i as f64 * 1e-3;
            let v = kolmogorov_cdf(x);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev, "x={x}");
            prev = v;
        }
    }

    #[test]
    fn ci_asymptotic_degenerates_on_constant_data() {
        let s = Sample::univariate(vec![2.0; 20]).unwrap();
        let ci = ci_asymptotic(&s, &Kernel::Variance, 0.05, None).unwrap();
        assert_eq!(ci.estimate, 0.0);
        assert_eq!((ci.lower, ci.upper), (0.0, 0.0));
        assert!(ci.degenerate);
        assert_eq!(ci.ell, 1);
    }

    #[test]
    fn ci_asymptotic_width_scales_with_sigma() {
        let s = gaussian_sample(100, 4);
        let doubled =
            Sample::univariate(s.data().iter().map(|v| 2.0 * v).collect::<Vec<_>>()).unwrap();
        let a = ci_asymptotic(&s, &Kernel::GiniMeanDifference, 0.05, Some(3)).unwrap();
        let b = ci_asymptotic(&doubled, &Kernel::GiniMeanDifference, 0.05, Some(3)).unwrap();
        // Gini pseudo-observations scale linearly with the data
        let ratio = (b.upper - b.lower) / (a.upper - a.lower);
        assert_abs_diff_eq!(ratio, 2.0, epsilon = 1e-9);
        assert!(a.lower <= a.estimate && a.estimate <= a.upper);
    }

    #[test]
    fn ci_bootstrap_order_statistic_indices() {
        // with M = 4999 and alpha = 0.05 the indices are exactly 4875 / 125
        let m = 4999.0f64;
        let hi = (((1.0 - 0.025) * (m + 1.0)) + 1e-9).floor() as usize;
        let lo = (((0.025) * (m + 1.0)) - 1e-9).ceil() as usize;
        assert_eq!((hi, lo), (4875, 125));
    }

    #[test]
    fn ci_bootstrap_degenerates_on_constant_data() {
        let s = Sample::univariate(vec![1.0; 16]).unwrap();
        let ci = ci_bootstrap(&s, &Kernel::Variance, 0.05, 99, 5, None).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 0.0));
        assert!(ci.degenerate);
    }

    #[test]
    fn ci_bootstrap_requires_enough_replicates() {
        let s = gaussian_sample(32, 8);
        assert!(ci_bootstrap(&s, &Kernel::Variance, 0.05, 10, 1, None).is_err());
        assert!(ci_bootstrap(&s, &Kernel::Variance, 0.05, 20, 1, None).is_ok());
    }

    #[test]
    fn ci_is_deterministic_for_a_seed() {
        let s = gaussian_sample(64, 12);
        let a = ci_bootstrap(&s, &Kernel::Variance, 0.1, 200, 42, None).unwrap();
        let b = ci_bootstrap(&s, &Kernel::Variance, 0.1, 200, 42, None).unwrap();
        assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        let c = ci_bootstrap(&s, &Kernel::Variance, 0.1, 200, 43, None).unwrap();
        assert_ne!((a.lower, a.upper), (c.lower, c.upper));
    }

    #[test]
    fn cp_test_on_constant_data_accepts() {
        let s = Sample::univariate(vec![3.0; 24]).unwrap();
        for method in [CpMethod::Asymptotic, CpMethod::Check, CpMethod::Hat] {
            let r = cp_test(&s, &Kernel::Variance, method, 100, 9, None).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p_value, 1.0, "{method:?}");
            assert_eq!(r.change_point, 2);
        }
    }

    #[test]
    fn cp_bootstrap_pvalues_live_on_the_grid() {
        let s = gaussian_sample(40, 3);
        let m = 73;
        let r = cp_test(&s, &Kernel::Variance, CpMethod::Check, m, 7, None).unwrap();
        let scaled = r.p_value * m as f64;
        assert!((scaled - scaled.round()).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&r.p_value));
        assert!((2..=38).contains(&r.change_point));
    }

    #[test]
    fn cp_test_detects_a_large_variance_break() {
        let mut rng = stream_rng(100, 0);
        let mut data = Vec::with_capacity(200);
        for i in 0..200 {
            let scale = if i < 100 { 1.0 } else { 6.0 };
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(scale * z);
        }
        let s = Sample::univariate(data).unwrap();
        let boot = cp_test(&s, &Kernel::Variance, CpMethod::Check, 500, 11, None).unwrap();
        assert!(boot.p_value < 0.05, "p = {}", boot.p_value);
        assert!((80..=120).contains(&boot.change_point));
        let asym = cp_test(&s, &Kernel::Variance, CpMethod::Asymptotic, 0, 0, None).unwrap();
        assert!(asym.p_value < 0.05);
    }

    #[test]
    fn cp_all_matches_individual_runs() {
        let s = gaussian_sample(48, 19);
        let all = cp_test_all(&s, &Kernel::Variance, 150, 5, None).unwrap();
        let check = cp_test(&s, &Kernel::Variance, CpMethod::Check, 150, 5, None).unwrap();
        let hat = cp_test(&s, &Kernel::Variance, CpMethod::Hat, 150, 5, None).unwrap();
        let asym = cp_test(&s, &Kernel::Variance, CpMethod::Asymptotic, 0, 0, None).unwrap();
        assert_eq!(all.check.p_value, check.p_value);
        assert_eq!(all.hat.p_value, hat.p_value);
        assert_eq!(all.asymptotic.p_value, asym.p_value);
        assert_eq!(all.asymptotic.sigma_hat, asym.sigma_hat);
    }

    #[test]
    fn small_samples_are_rejected() {
        let s = gaussian_sample(7, 2);
        assert!(matches!(
            ci_asymptotic(&s, &Kernel::Variance, 0.05, None),
            Err(Error::SampleTooSmall { min: 8, .. })
        ));
        assert!(cp_test(&s, &Kernel::Variance, CpMethod::Check, 100, 1, None).is_err());
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let s = gaussian_sample(32, 2);
        assert!(ci_asymptotic(&s, &Kernel::Variance, 0.0, None).is_err());
        assert!(ci_asymptotic(&s, &Kernel::Variance, 1.0, None).is_err());
    }
}
