//! Simulation models: Archimedean copula innovations fed through AR(1) or
//! GARCH(1,1) recursions, with an optional break in the innovation copula.
//!
//! Copula sampling uses the Marshall-Olkin frailty representation: Clayton
//! through a gamma frailty, Gumbel-Hougaard through a positive stable
//! frailty (Kanter's sampler). Both families are parameterized by Kendall's
//! tau.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal, StudentT};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal::normal_quantile;
use crate::rng::stream_rng;
use crate::sample::Sample;

/// Bivariate Archimedean copula families used by the innovation models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CopulaFamily {
    /// Upper-tail dependent.
    Clayton,
    /// Lower-tail dependent.
    GumbelHougaard,
}

impl CopulaFamily {
    /// Copula parameter corresponding to a Kendall's tau in [0, 1).
    pub fn theta_from_tau(self, tau: f64) -> f64 {
        match self {
            CopulaFamily::Clayton => 2.0 * tau / (1.0 - tau),
            CopulaFamily::GumbelHougaard => 1.0 / (1.0 - tau),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CopulaFamily::Clayton => "clayton",
            CopulaFamily::GumbelHougaard => "gumbel-hougaard",
        }
    }
}

/// Draws `count` independent pairs from the copula with the given Kendall's
/// tau. Outputs lie strictly inside the open unit square. `tau = 0` yields
/// independent uniforms.
pub fn sample_copula<R: Rng + ?Sized>(
    family: CopulaFamily,
    tau: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<[f64; 2]>> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::invalid(format!(
            "kendall tau must lie in [0, 1), got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok((0..count)
            .map(|_| [rng.sample(Open01), rng.sample(Open01)])
            .collect());
    }
    let theta = family.theta_from_tau(tau);
    match family {
        CopulaFamily::Clayton => {
            let frailty = Gamma::new(1.0 / theta, 1.0)
                .map_err(|e| Error::invalid(format!("gamma frailty: {e}")))?;
            Ok((0..count)
                .map(|_| {
                    let v: f64 = frailty.sample(rng);
                    let e1: f64 = rng.sample(Exp1);
                    let e2: f64 = rng.sample(Exp1);
                    // generator psi(t) = (1 + t)^(-1/theta)
                    [
                        (1.0 + e1 / v).powf(-1.0 / theta),
                        (1.0 + e2 / v).powf(-1.0 / theta),
                    ]
                })
                .collect())
        }
        CopulaFamily::GumbelHougaard => {
            let alpha = 1.0 / theta; // = 1 - tau, in (0, 1)
            Ok((0..count)
                .map(|_| {
                    let v = positive_stable(alpha, rng);
                    let e1: f64 = rng.sample(Exp1);
                    let e2: f64 = rng.sample(Exp1);
                    // generator psi(t) = exp(-t^alpha)
                    [
                        (-(e1 / v).powf(alpha)).exp(),
                        (-(e2 / v).powf(alpha)).exp(),
                    ]
                })
                .collect())
        }
    }
}

/// Kanter's sampler for the positive stable law with Laplace transform
/// `exp(-t^alpha)`, `0 < alpha < 1`.
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let w: f64 = std::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    let a = ((alpha * w).sin()).powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * w).sin()
        / w.sin().powf(1.0 / (1.0 - alpha));
    (a / e).powf((1.0 - alpha) / alpha)
}

/// Recursion applied to the innovations.
#[derive(Debug, Clone, Serialize)]
pub enum Model {
    /// `x_i = zeta x_{i-1} + eps_i`, `|zeta| < 1`.
    Ar1 { zeta: f64 },
    /// `sigma_i^2 = omega + beta sigma_{i-1}^2 + alpha eps_{i-1}^2`,
    /// `x_i = sigma_i eps_i`, one parameter triple per margin.
    Garch {
        omega: Vec<f64>,
        beta: Vec<f64>,
        alpha: Vec<f64>,
    },
}

/// GARCH(1,1) parameters estimated from S&P 500 daily logreturns.
pub const GARCH_SP500: (f64, f64, f64) = (0.012, 0.919, 0.072);
/// GARCH(1,1) parameters estimated from DAX daily logreturns.
pub const GARCH_DAX: (f64, f64, f64) = (0.037, 0.868, 0.115);

/// One copula with its Kendall's tau.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CopulaSpec {
    pub family: CopulaFamily,
    pub tau: f64,
}

/// Innovation distributions.
#[derive(Debug, Clone, Serialize)]
pub enum Innovations {
    /// Independent standard normal margins.
    Normal,
    /// Independent (unstandardized) Student t margins with 5 degrees of
    /// freedom.
    StudentT5,
    /// Bivariate copula draws mapped through the normal quantile per
    /// margin; innovations after time `floor(n * break_fraction)` switch
    /// from `first` to `second`. Equal specs generate a stationary
    /// sequence.
    CopulaBreak {
        first: CopulaSpec,
        second: CopulaSpec,
        break_fraction: f64,
    },
}

/// Data-generating-process configuration.
#[derive(Debug, Clone, Serialize)]
pub struct DgpConfig {
    pub n: usize,
    pub dim: usize,
    pub model: Model,
    pub innovations: Innovations,
    /// Pre-sample length discarded before returning rows (default 100).
    pub burn_in: usize,
    pub seed: u64,
}

pub const DEFAULT_BURN_IN: usize = 100;

impl DgpConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample size n must be >= 1"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        match &self.model {
            Model::Ar1 { zeta } => {
                let stationary = zeta.abs() < 1.0; // false for NaN too
                if !stationary {
                    return Err(Error::invalid(format!(
                        "AR(1) coefficient must satisfy |zeta| < 1, got {zeta}"
                    )));
                }
            }
            Model::Garch { omega, beta, alpha } => {
                if omega.len() != self.dim || beta.len() != self.dim || alpha.len() != self.dim {
                    return Err(Error::invalid(
                        "GARCH parameter vectors must have one entry per margin",
                    ));
                }
                for j in 0..self.dim {
                    if !(omega[j] > 0.0 && beta[j] >= 0.0 && alpha[j] >= 0.0) {
                        return Err(Error::invalid("GARCH requires omega > 0, beta, alpha >= 0"));
                    }
                    if beta[j] + alpha[j] >= 1.0 {
                        return Err(Error::invalid(format!(
                            "GARCH margin {j} not stationary: beta + alpha = {}",
                            beta[j] + alpha[j]
                        )));
                    }
                }
            }
        }
        if let Innovations::CopulaBreak {
            first,
            second,
            break_fraction,
        } = &self.innovations
        {
            if self.dim != 2 {
                return Err(Error::invalid("copula innovations require dim = 2"));
            }
            for spec in [first, second] {
                if !(0.0..1.0).contains(&spec.tau) {
                    return Err(Error::invalid(format!(
                        "kendall tau must lie in [0, 1), got {}",
                        spec.tau
                    )));
                }
            }
            if !(*break_fraction > 0.0 && *break_fraction < 1.0) {
                return Err(Error::invalid(format!(
                    "break fraction must lie in (0, 1), got {break_fraction}"
                )));
            }
        }
        Ok(())
    }
}

/// Simulates one sample. The recursion starts `burn_in` steps before time 1
/// with `x = eps` there (GARCH additionally starts its variance recursion
/// at the stationary level); only rows `1..=n` are returned.
pub fn generate(config: &DgpConfig) -> Result<Sample> {
    config.validate()?;
    let n = config.n;
    let d = config.dim;
    let total = config.burn_in + n + 1; // time indices -burn_in ..= n
    let mut rng = stream_rng(config.seed, 0);

    // innovations, row-major total x d
    let mut eps = vec![0.0f64; total * d];
    match &config.innovations {
        Innovations::Normal => {
            for slot in eps.iter_mut() {
                *slot = StandardNormal.sample(&mut rng);
            }
        }
        Innovations::StudentT5 => {
            let t5 = StudentT::new(5.0).expect("valid dof");
            for slot in eps.iter_mut() {
                *slot = t5.sample(&mut rng);
            }
        }
        Innovations::CopulaBreak {
            first,
            second,
            break_fraction,
        } => {
            // innovations at time <= floor(n t) come from the first copula
            let break_time = (n as f64 * break_fraction).floor() as usize;
            let count_first = config.burn_in + break_time + 1;
            let count_second = total - count_first;
            let mut pairs = sample_copula(first.family, first.tau, count_first, &mut rng)?;
            pairs.extend(sample_copula(
                second.family,
                second.tau,
                count_second,
                &mut rng,
            )?);
            for (row, pair) in pairs.iter().enumerate() {
                eps[row * 2] = normal_quantile(pair[0]);
                eps[row * 2 + 1] = normal_quantile(pair[1]);
            }
        }
    }

    let mut series = vec![0.0f64; total * d];
    match &config.model {
        Model::Ar1 { zeta } => {
            series[..d].copy_from_slice(&eps[..d]);
            for t in 1..total {
                for j in 0..d {
                    series[t * d + j] = zeta * series[(t - 1) * d + j] + eps[t * d + j];
                }
            }
        }
        Model::Garch { omega, beta, alpha } => {
            series[..d].copy_from_slice(&eps[..d]);
            let mut var: Vec<f64> = (0..d)
                .map(|j| omega[j] / (1.0 - beta[j] - alpha[j]))
                .collect();
            for t in 1..total {
                for j in 0..d {
                    let prev_eps = eps[(t - 1) * d + j];
                    var[j] = omega[j] + beta[j] * var[j] + alpha[j] * prev_eps * prev_eps;
                    series[t * d + j] = var[j].sqrt() * eps[t * d + j];
                }
            }
        }
    }

    let start = (config.burn_in + 1) * d;
    Sample::new(series[start..].to_vec(), d)
}
