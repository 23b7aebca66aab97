//! Dependent multiplier bootstrap inference for U-statistics of weakly
//! dependent time series.
//!
//! Given a stationary, short-range dependent sample, this crate estimates
//! order-2 U-statistic functionals (variance, Gini's mean difference, the
//! concordance probability behind multivariate Kendall's tau, or a custom
//! kernel) and calibrates confidence intervals and a CUSUM-type
//! change-point test either from the estimated asymptotic distribution or
//! by resampling with dependent multiplier sequences: tapered random
//! weights whose serial dependence mimics the data's.
//!
//! The pieces:
//!
//! - [`table::PrefixTable`]: O(n^2) pairwise kernel aggregates with O(1)
//!   range U-statistics, behind every sequential process.
//! - [`process`]: the running U-statistic fluctuation process and the
//!   split-point (CUSUM) difference process with its sup statistic.
//! - [`multiplier`]: dependent multiplier sequences via the moving-average
//!   construction with a Parzen-convolution correlation shape.
//! - [`bandwidth`]: HAC long-run variance and automatic bandwidth selection
//!   (Politis-White style lag cutoff).
//! - [`bootstrap`]: hat/check replicates of both processes.
//! - [`inference`]: confidence intervals, the change-point test, the
//!   Kolmogorov distribution.
//! - [`datagen`] / [`mc`]: simulation models (copula innovations, AR/GARCH
//!   recursions) and Monte Carlo drivers.
//!
//! ```
//! use dmboot::{cp_test, CpMethod, Kernel, Sample};
//!
//! // variance change halfway through the series
//! let data: Vec<f64> = (0..200)
//!     .map(|i| {
//!         let scale = if i < 100 { 0.2 } else { 2.0 };
//!         scale * ((i * 2654435761u64 % 1000) as f64 / 1000.0 - 0.5)
//!     })
//!     .collect();
//! let sample = Sample::univariate(data).unwrap();
//! let result = cp_test(&sample, &Kernel::Variance, CpMethod::Check, 500, 7, None).unwrap();
//! assert!(result.p_value < 0.05);
//! ```
//!
//! With the default `parallel` feature, replicate and Monte Carlo loops run
//! on rayon; disable it for a dependency-free sequential build. Outputs are
//! identical either way, and for any thread count.

pub mod bandwidth;
pub mod bootstrap;
pub mod datagen;
pub mod error;
pub mod inference;
pub mod kernel;
pub mod mc;
pub mod multiplier;
pub mod normal;
pub mod process;
pub mod rng;
pub mod sample;
pub mod table;

mod par;
mod util;

pub use bandwidth::{
    autocovariance, estimate_bandwidth, flat_top, longrun_variance, select_lag_cutoff,
    BandwidthDiagnostics,
};
pub use bootstrap::{
    replicate_batch, replicate_cusum, replicate_u, replicate_u_tail, Method as BootMethod,
    ReplicateSet, Target as BootTarget,
};
pub use datagen::{
    generate, sample_copula, CopulaFamily, CopulaSpec, DgpConfig, Innovations, Model,
};
pub use error::{Error, Result};
pub use inference::{
    ci_asymptotic, ci_bootstrap, cp_test, kolmogorov_cdf, CiMethod, CiResult, CpMethod,
    CpTestResult,
};
pub use kernel::{kernel_eval, Kernel};
pub use mc::{run_monte_carlo, McConfig, McMode, McOutcome, MethodSummary};
pub use multiplier::{
    gen_multipliers, parzen, phi, phi_curvature, phi_l2, weight_autocorrelation, MultiplierBatch,
    MultiplierConfig,
};
pub use process::{
    change_point_index, cusum_process, cusum_statistic, u_process, ProcessPath,
};
pub use sample::Sample;
pub use table::{PrefixTable, DEFAULT_DENSE_THRESHOLD};
