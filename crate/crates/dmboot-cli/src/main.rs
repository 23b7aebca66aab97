//! `dmboot`: U-statistic inference for weakly dependent time series.
//!
//! Three subcommands: `ci` (confidence interval for the kernel's target),
//! `cp` (CUSUM change-point test) and `simulate` (Monte Carlo studies).
//! Exit codes: 0 success, 2 usage/data error, 1 internal error.

mod io;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use dmboot::datagen::{CopulaFamily, CopulaSpec, DgpConfig, Innovations, Model};
use dmboot::rng::{derive_seed, tags};
use dmboot::{
    ci_asymptotic, ci_bootstrap, cp_test, run_monte_carlo, CpMethod, Kernel, McConfig, McMode,
};

use report::{Format, SCHEMA_VERSION};

/// A failed run with its process exit code (2 usage/data, 1 internal).
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<dmboot::Error> for Failure {
    fn from(e: dmboot::Error) -> Self {
        Failure::data(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "dmboot",
    version,
    about = "U-statistic inference for dependent time series: confidence intervals and \
             change-point tests calibrated by dependent multiplier bootstraps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confidence interval for the kernel's target functional
    Ci(CiArgs),
    /// Change-point test based on the sup-norm CUSUM statistic
    Cp(CpArgs),
    /// Monte Carlo studies: coverage, empirical level, power
    Simulate(SimArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    /// (x-y)^2/2: targets the variance (univariate input)
    Variance,
    /// |x-y|: targets Gini's mean difference (univariate input)
    Gini,
    /// concordance indicator: targets Kendall's-tau-type dependence
    /// (at least two columns)
    Kendall,
}

impl KernelArg {
    fn kernel(self) -> Kernel {
        match self {
            KernelArg::Variance => Kernel::Variance,
            KernelArg::Gini => Kernel::GiniMeanDifference,
            KernelArg::Kendall => Kernel::Kendall,
        }
    }

    fn check_input_dim(self, dim: usize) -> Result<(), Failure> {
        if self == KernelArg::Kendall && dim < 2 {
            return Err(Failure::data(format!(
                "kernel `kendall` requires at least 2 columns, input has {dim}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl FormatArg {
    fn format(self) -> Format {
        match self {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for the parallel loops (default: all cores; the
    /// RAYON_NUM_THREADS environment variable is honored too). Results do
    /// not depend on this setting.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CiMethodArg {
    Asymptotic,
    Bootstrap,
}

#[derive(Args)]
struct CiArgs {
    /// Numeric CSV input (optional header line auto-detected)
    input: PathBuf,
    #[arg(long, value_enum)]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value = "asymptotic")]
    method: CiMethodArg,
    /// Nominal miscoverage level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap replicates
    #[arg(long = "M", default_value_t = 1000)]
    replicates: usize,
    /// RNG seed; drawn from entropy (and reported) when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplier bandwidth override (>= 1), bypassing automatic selection
    #[arg(long)]
    ell: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CpMethodArg {
    /// Kolmogorov-limit p-value with estimated long-run scale
    Asymptotic,
    /// Bootstrap with full-sample pseudo-observations
    Hat,
    /// Bootstrap with running-window pseudo-observations
    Check,
}

impl CpMethodArg {
    fn method(self) -> CpMethod {
        match self {
            CpMethodArg::Asymptotic => CpMethod::Asymptotic,
            CpMethodArg::Hat => CpMethod::Hat,
            CpMethodArg::Check => CpMethod::Check,
        }
    }

    fn label(self) -> &'static str {
        match self {
            CpMethodArg::Asymptotic => "asymptotic",
            CpMethodArg::Hat => "hat",
            CpMethodArg::Check => "check",
        }
    }
}

#[derive(Args)]
struct CpArgs {
    /// Numeric CSV input (optional header line auto-detected)
    input: PathBuf,
    #[arg(long, value_enum)]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value = "check")]
    method: CpMethodArg,
    /// Bootstrap replicates
    #[arg(long = "M", default_value_t = 1000)]
    replicates: usize,
    /// RNG seed; drawn from entropy (and reported) when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplier bandwidth override (>= 1), bypassing automatic selection
    #[arg(long)]
    ell: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimModeArg {
    /// Confidence-interval coverage (univariate AR1/GARCH)
    Coverage,
    /// Change-point test level under a stationary bivariate copula model
    Cplevel,
    /// Change-point test power under an innovation-copula break
    Cppower,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ar1,
    Garch,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnovArg {
    Normal,
    T5,
}

#[derive(Clone, Copy, ValueEnum)]
enum CopulaArg {
    Clayton,
    #[value(name = "gh")]
    GumbelHougaard,
}

impl CopulaArg {
    fn family(self) -> CopulaFamily {
        match self {
            CopulaArg::Clayton => CopulaFamily::Clayton,
            CopulaArg::GumbelHougaard => CopulaFamily::GumbelHougaard,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    /// What to measure
    #[arg(value_enum)]
    mode: SimModeArg,
    /// Sample sizes, comma separated (one table row per size)
    #[arg(long, required = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Monte Carlo replications per row
    #[arg(long)]
    reps: usize,
    /// Bootstrap replicates per replication
    #[arg(long = "M", default_value_t = 1000)]
    replicates: usize,
    /// Nominal level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Kernel (default: variance for coverage, kendall for cplevel/cppower)
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    /// Recursion applied to the innovations
    #[arg(long, value_enum, default_value = "ar1")]
    model: ModelArg,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    /// GARCH omega per margin, comma separated (defaults to fitted
    /// index-return values)
    #[arg(long, value_delimiter = ',')]
    garch_omega: Option<Vec<f64>>,
    /// GARCH beta per margin
    #[arg(long, value_delimiter = ',')]
    garch_beta: Option<Vec<f64>>,
    /// GARCH alpha per margin
    #[arg(long, value_delimiter = ',')]
    garch_alpha: Option<Vec<f64>>,
    /// Innovation distribution (coverage mode only)
    #[arg(long, value_enum)]
    innov: Option<InnovArg>,
    /// Copula family (cplevel/cppower)
    #[arg(long, value_enum)]
    copula: Option<CopulaArg>,
    /// Kendall's tau values, comma separated (cplevel; one row per value)
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Kendall's tau before the break (cppower)
    #[arg(long)]
    tau1: Option<f64>,
    /// Kendall's tau values after the break, comma separated (cppower)
    #[arg(long, value_delimiter = ',')]
    tau2: Option<Vec<f64>>,
    /// Break location as a fraction of the sample (cppower)
    #[arg(long)]
    t: Option<f64>,
    /// Known target for coverage (estimated from a size-20000 sample when
    /// omitted)
    #[arg(long)]
    theta: Option<f64>,
    /// Pre-sample length discarded by the recursions
    #[arg(long, default_value_t = 100)]
    burnin: usize,
    /// RNG seed; drawn from entropy (and reported) when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ci(args) => run_ci(args),
        Command::Cp(args) => run_cp(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match result {
        Ok(()) => {}
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::internal(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn run_ci(args: CiArgs) -> Result<(), Failure> {
    init_threads(args.out.threads)?;
    let sample = io::read_sample(&args.input)?;
    args.kernel.check_input_dim(sample.dim())?;
    let kernel = args.kernel.kernel();
    let (result, seed) = match args.method {
        CiMethodArg::Asymptotic => (
            ci_asymptotic(&sample, &kernel, args.alpha, args.ell)?,
            None,
        ),
        CiMethodArg::Bootstrap => {
            let seed = resolve_seed(args.seed);
            (
                ci_bootstrap(
                    &sample,
                    &kernel,
                    args.alpha,
                    args.replicates,
                    seed,
                    args.ell,
                )?,
                Some(seed),
            )
        }
    };
    if result.degenerate {
        log::warn!("degenerate interval: the input has zero kernel variance");
    }
    let report = report::CiReport {
        schema_version: SCHEMA_VERSION,
        command: "ci",
        input: args.input.display().to_string(),
        n: sample.n(),
        dim: sample.dim(),
        kernel: kernel.name().to_owned(),
        method: match args.method {
            CiMethodArg::Asymptotic => "asymptotic",
            CiMethodArg::Bootstrap => "bootstrap",
        },
        alpha: result.alpha,
        estimate: result.estimate,
        lower: result.lower,
        upper: result.upper,
        degenerate: result.degenerate,
        sigma_hat: result.sigma_hat,
        replicates: result.replicates,
        seed,
        ell: result.ell,
        ell_source: if args.ell.is_some() {
            "override"
        } else {
            "estimated"
        },
        bandwidth: result.diagnostics,
    };
    io::write_report(args.out.output.as_deref(), &report.render(args.out.format.format()))
}

fn run_cp(args: CpArgs) -> Result<(), Failure> {
    init_threads(args.out.threads)?;
    let sample = io::read_sample(&args.input)?;
    args.kernel.check_input_dim(sample.dim())?;
    let kernel = args.kernel.kernel();
    let seed = match args.method {
        CpMethodArg::Asymptotic => None,
        _ => Some(resolve_seed(args.seed)),
    };
    let result = cp_test(
        &sample,
        &kernel,
        args.method.method(),
        args.replicates,
        seed.unwrap_or(0),
        args.ell,
    )?;
    if result.degenerate {
        log::warn!("degenerate scale estimate: the input has zero kernel variance");
    }
    let report = report::CpReport {
        schema_version: SCHEMA_VERSION,
        command: "cp",
        input: args.input.display().to_string(),
        n: sample.n(),
        dim: sample.dim(),
        kernel: kernel.name().to_owned(),
        method: args.method.label(),
        statistic: result.statistic,
        p_value: result.p_value,
        change_point: result.change_point,
        degenerate: result.degenerate,
        sigma_hat: result.sigma_hat,
        replicates: result.replicates,
        seed,
        ell: result.ell,
        ell_source: if args.ell.is_some() {
            "override"
        } else {
            "estimated"
        },
        bandwidth: result.diagnostics,
    };
    io::write_report(args.out.output.as_deref(), &report.render(args.out.format.format()))
}

struct RowSpec {
    n: usize,
    innovations: Innovations,
    innovations_label: String,
}

fn run_simulate(args: SimArgs) -> Result<(), Failure> {
    init_threads(args.out.threads)?;
    let dim = match args.mode {
        SimModeArg::Coverage => 1,
        SimModeArg::Cplevel | SimModeArg::Cppower => 2,
    };
    let kernel_arg = args.kernel.unwrap_or(match args.mode {
        SimModeArg::Coverage => KernelArg::Variance,
        _ => KernelArg::Kendall,
    });
    kernel_arg.check_input_dim(dim).map_err(|_| {
        Failure::usage(format!(
            "kernel `kendall` needs bivariate data; {} mode is univariate",
            mode_label(args.mode)
        ))
    })?;
    let kernel = kernel_arg.kernel();
    validate_mode_flags(&args)?;

    let model = build_model(&args, dim)?;
    let rows = build_rows(&args)?;
    let mc_mode = match args.mode {
        SimModeArg::Coverage => McMode::Coverage,
        SimModeArg::Cplevel => McMode::CpLevel,
        SimModeArg::Cppower => McMode::CpPower,
    };

    let master_seed = resolve_seed(args.seed);
    let mut out_rows = Vec::with_capacity(rows.len());
    for (idx, row) in rows.into_iter().enumerate() {
        let started = Instant::now();
        let config = McConfig {
            dgp: DgpConfig {
                n: row.n,
                dim,
                model: model.clone(),
                innovations: row.innovations,
                burn_in: args.burnin,
                seed: derive_seed(master_seed, tags::SIM_ROW, idx as u64),
            },
            kernel: kernel.clone(),
            reps: args.reps,
            replicates: args.replicates,
            alpha: args.alpha,
            mode: mc_mode,
            theta_truth: args.theta,
            ell: None,
        };
        let outcome = run_monte_carlo(&config)?;
        out_rows.push(report::SimRow {
            n: row.n,
            model: model_label(&model),
            innovations: row.innovations_label,
            theta: outcome.theta,
            mean_ell: outcome.mean_ell,
            methods: outcome
                .methods
                .iter()
                .map(|m| report::MethodCell {
                    method: m.method.to_owned(),
                    percent: m.rate * 100.0,
                    std_error_percent: m.std_error * 100.0,
                })
                .collect(),
            elapsed_seconds: started.elapsed().as_secs_f64(),
        });
    }

    let report = report::SimReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        mode: mode_label(args.mode),
        kernel: kernel.name().to_owned(),
        alpha: args.alpha,
        reps: args.reps,
        bootstrap_replicates: args.replicates,
        seed: master_seed,
        rows: out_rows,
    };
    io::write_report(args.out.output.as_deref(), &report.render(args.out.format.format()))
}

fn mode_label(mode: SimModeArg) -> &'static str {
    match mode {
        SimModeArg::Coverage => "coverage",
        SimModeArg::Cplevel => "cplevel",
        SimModeArg::Cppower => "cppower",
    }
}

fn validate_mode_flags(args: &SimArgs) -> Result<(), Failure> {
    match args.mode {
        SimModeArg::Coverage => {
            for (flag, set) in [
                ("--copula", args.copula.is_some()),
                ("--tau", args.tau.is_some()),
                ("--tau1", args.tau1.is_some()),
                ("--tau2", args.tau2.is_some()),
                ("--t", args.t.is_some()),
            ] {
                if set {
                    return Err(Failure::usage(format!(
                        "{flag} does not apply to coverage mode"
                    )));
                }
            }
        }
        SimModeArg::Cplevel => {
            if args.innov.is_some() {
                return Err(Failure::usage("--innov applies only to coverage mode"));
            }
            if args.tau.is_none() {
                return Err(Failure::usage("cplevel requires --tau"));
            }
            for (flag, set) in [
                ("--tau1", args.tau1.is_some()),
                ("--tau2", args.tau2.is_some()),
                ("--t", args.t.is_some()),
                ("--theta", args.theta.is_some()),
            ] {
                if set {
                    return Err(Failure::usage(format!(
                        "{flag} does not apply to cplevel mode"
                    )));
                }
            }
        }
        SimModeArg::Cppower => {
            if args.innov.is_some() {
                return Err(Failure::usage("--innov applies only to coverage mode"));
            }
            if args.tau1.is_none() || args.tau2.is_none() || args.t.is_none() {
                return Err(Failure::usage("cppower requires --tau1, --tau2 and --t"));
            }
            if args.tau.is_some() || args.theta.is_some() {
                return Err(Failure::usage(
                    "--tau/--theta do not apply to cppower mode",
                ));
            }
        }
    }
    Ok(())
}

fn build_model(args: &SimArgs, dim: usize) -> Result<Model, Failure> {
    match args.model {
        ModelArg::Ar1 => {
            if args.garch_omega.is_some() || args.garch_beta.is_some() || args.garch_alpha.is_some()
            {
                return Err(Failure::usage(
                    "--garch-* parameters require --model garch",
                ));
            }
            Ok(Model::Ar1 { zeta: args.zeta })
        }
        ModelArg::Garch => {
            let defaults: (Vec<f64>, Vec<f64>, Vec<f64>) = {
                use dmboot::datagen::{GARCH_DAX, GARCH_SP500};
                let triples: Vec<(f64, f64, f64)> = match dim {
                    1 => vec![GARCH_SP500],
                    _ => vec![GARCH_SP500, GARCH_DAX],
                };
                (
                    triples.iter().map(|t| t.0).collect(),
                    triples.iter().map(|t| t.1).collect(),
                    triples.iter().map(|t| t.2).collect(),
                )
            };
            let omega = args.garch_omega.clone().unwrap_or(defaults.0);
            let beta = args.garch_beta.clone().unwrap_or(defaults.1);
            let alpha = args.garch_alpha.clone().unwrap_or(defaults.2);
            if omega.len() != dim || beta.len() != dim || alpha.len() != dim {
                return Err(Failure::usage(format!(
                    "GARCH parameter lists must have {dim} entries for this mode"
                )));
            }
            Ok(Model::Garch { omega, beta, alpha })
        }
    }
}

fn model_label(model: &Model) -> String {
    match model {
        Model::Ar1 { zeta } => format!("ar1(zeta={zeta})"),
        Model::Garch { .. } => "garch".to_owned(),
    }
}

fn build_rows(args: &SimArgs) -> Result<Vec<RowSpec>, Failure> {
    let mut rows = Vec::new();
    match args.mode {
        SimModeArg::Coverage => {
            let innov = args.innov.unwrap_or(InnovArg::Normal);
            for &n in &args.n {
                let (innovations, label) = match innov {
                    InnovArg::Normal => (Innovations::Normal, "normal".to_owned()),
                    InnovArg::T5 => (Innovations::StudentT5, "t5".to_owned()),
                };
                rows.push(RowSpec {
                    n,
                    innovations,
                    innovations_label: label,
                });
            }
        }
        SimModeArg::Cplevel => {
            let family = args.copula.unwrap_or(CopulaArg::Clayton).family();
            let taus = args.tau.clone().expect("validated");
            for &n in &args.n {
                for &tau in &taus {
                    let spec = CopulaSpec { family, tau };
                    rows.push(RowSpec {
                        n,
                        innovations: Innovations::CopulaBreak {
                            first: spec,
                            second: spec,
                            break_fraction: 0.5,
                        },
                        innovations_label: format!("{}(tau={tau})", family.name()),
                    });
                }
            }
        }
        SimModeArg::Cppower => {
            let family = args.copula.unwrap_or(CopulaArg::Clayton).family();
            let tau1 = args.tau1.expect("validated");
            let break_fraction = args.t.expect("validated");
            for &n in &args.n {
                for &tau2 in args.tau2.as_ref().expect("validated") {
                    rows.push(RowSpec {
                        n,
                        innovations: Innovations::CopulaBreak {
                            first: CopulaSpec { family, tau: tau1 },
                            second: CopulaSpec { family, tau: tau2 },
                            break_fraction,
                        },
                        innovations_label: format!(
                            "{}(tau {tau1}->{tau2} at t={break_fraction})",
                            family.name()
                        ),
                    });
                }
            }
        }
    }
    Ok(rows)
}
