//! Monte Carlo drivers: coverage studies for the confidence intervals and
//! level/power studies for the change-point test.
//!
//! Replications are distributed across workers with per-replication seed
//! derivation, and aggregation is a sum of indicators, so results are
//! independent of scheduling and thread count.

use serde::Serialize;

use crate::datagen::{generate, DgpConfig};
use crate::error::{Error, Result};
use crate::inference::{ci_asymptotic, ci_bootstrap, cp_test_all};
use crate::kernel::Kernel;
use crate::par;
use crate::rng::{derive_seed, tags};
use crate::table::PrefixTable;

/// What the study measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McMode {
    /// Fraction of replications whose confidence interval covers the target.
    Coverage,
    /// Rejection rate under a stationary model (empirical level).
    CpLevel,
    /// Rejection rate under a model with an innovation break (power).
    CpPower,
}

/// Monte Carlo study configuration. `dgp.seed` acts as the master seed for
/// the whole study.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub dgp: DgpConfig,
    pub kernel: Kernel,
    /// Number of Monte Carlo replications.
    pub reps: usize,
    /// Bootstrap replicates per replication.
    pub replicates: usize,
    /// Nominal level.
    pub alpha: f64,
    pub mode: McMode,
    /// Known target for coverage studies; estimated from a size-20000
    /// sample of the same process when absent.
    pub theta_truth: Option<f64>,
    /// Optional bandwidth override passed through to every replication.
    pub ell: Option<usize>,
}

/// Rate estimate for one method, in [0, 1], with its binomial standard
/// error.
#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: &'static str,
    pub rate: f64,
    pub std_error: f64,
}

/// Aggregated study outcome.
#[derive(Debug, Clone, Serialize)]
pub struct McOutcome {
    pub mode: McMode,
    pub reps: usize,
    /// Target value used for coverage studies.
    pub theta: Option<f64>,
    /// Average selected bandwidth across replications.
    pub mean_ell: f64,
    pub methods: Vec<MethodSummary>,
}

fn summary(method: &'static str, hits: usize, reps: usize) -> MethodSummary {
    let rate = hits as f64 / reps as f64;
    MethodSummary {
        method,
        rate,
        std_error: (rate * (1.0 - rate) / reps as f64).sqrt(),
    }
}

fn rep_error(rep: usize) -> impl FnOnce(Error) -> Error {
    move |source| Error::Replicate {
        rep,
        source: Box::new(source),
    }
}

/// Runs one Monte Carlo study.
pub fn run_monte_carlo(config: &McConfig) -> Result<McOutcome> {
    if config.reps == 0 {
        return Err(Error::invalid("reps must be >= 1"));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie strictly in (0, 1), got {}",
            config.alpha
        )));
    }
    match config.mode {
        McMode::Coverage => run_coverage(config),
        McMode::CpLevel | McMode::CpPower => run_rejection(config),
    }
}

fn run_coverage(config: &McConfig) -> Result<McOutcome> {
    let master = config.dgp.seed;
    let theta = match config.theta_truth {
        Some(t) => t,
        None => estimate_theta(config)?,
    };
    let outcomes = par::try_map_indexed(config.reps, |rep| -> Result<(bool, bool, usize)> {
        let dgp = DgpConfig {
            seed: derive_seed(master, tags::DGP, rep as u64),
            ..config.dgp.clone()
        };
        let sample = generate(&dgp).map_err(rep_error(rep))?;
        let asym = ci_asymptotic(&sample, &config.kernel, config.alpha, config.ell)
            .map_err(rep_error(rep))?;
        let boot = ci_bootstrap(
            &sample,
            &config.kernel,
            config.alpha,
            config.replicates,
            derive_seed(master, tags::BOOTSTRAP, rep as u64),
            config.ell,
        )
        .map_err(rep_error(rep))?;
        Ok((
            asym.lower <= theta && theta <= asym.upper,
            boot.lower <= theta && theta <= boot.upper,
            asym.ell,
        ))
    })?;
    let hits_asym = outcomes.iter().filter(|o| o.0).count();
    let hits_boot = outcomes.iter().filter(|o| o.1).count();
    let mean_ell = outcomes.iter().map(|o| o.2 as f64).sum::<f64>() / config.reps as f64;
    Ok(McOutcome {
        mode: config.mode,
        reps: config.reps,
        theta: Some(theta),
        mean_ell,
        methods: vec![
            summary("ci_asymptotic", hits_asym, config.reps),
            summary("ci_bootstrap", hits_boot, config.reps),
        ],
    })
}

/// Estimates the target from one large stationary sample of the configured
/// process (size 20000), mirroring how simulation studies usually pin it.
fn estimate_theta(config: &McConfig) -> Result<f64> {
    let dgp = DgpConfig {
        n: 20_000,
        seed: derive_seed(config.dgp.seed, tags::THETA, 0),
        ..config.dgp.clone()
    };
    let sample = generate(&dgp)?;
    let table = PrefixTable::build(&sample, &config.kernel)?;
    Ok(table.u_full())
}

fn run_rejection(config: &McConfig) -> Result<McOutcome> {
    let master = config.dgp.seed;
    let outcomes = par::try_map_indexed(config.reps, |rep| -> Result<([bool; 3], usize)> {
        let dgp = DgpConfig {
            seed: derive_seed(master, tags::DGP, rep as u64),
            ..config.dgp.clone()
        };
        let sample = generate(&dgp).map_err(rep_error(rep))?;
        let all = cp_test_all(
            &sample,
            &config.kernel,
            config.replicates,
            derive_seed(master, tags::BOOTSTRAP, rep as u64),
            config.ell,
        )
        .map_err(rep_error(rep))?;
        Ok((
            [
                all.check.p_value <= config.alpha,
                all.hat.p_value <= config.alpha,
                all.asymptotic.p_value <= config.alpha,
            ],
            all.check.ell,
        ))
    })?;
    let count = |idx: usize| outcomes.iter().filter(|o| o.0[idx]).count();
    let mean_ell = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / config.reps as f64;
    Ok(McOutcome {
        mode: config.mode,
        reps: config.reps,
        theta: None,
        mean_ell,
        methods: vec![
            summary("cp_check", count(0), config.reps),
            summary("cp_hat", count(1), config.reps),
            summary("cp_asymptotic", count(2), config.reps),
        ],
    })
}
