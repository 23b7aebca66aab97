//! Report structures and rendering. JSON schemas are versioned and pinned
//! by golden tests.

use serde::Serialize;

use dmboot::BandwidthDiagnostics;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct CiReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub dim: usize,
    pub kernel: String,
    pub method: &'static str,
    pub alpha: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub degenerate: bool,
    pub sigma_hat: Option<f64>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub ell: usize,
    pub ell_source: &'static str,
    pub bandwidth: Option<BandwidthDiagnostics>,
}

#[derive(Serialize)]
pub struct CpReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub dim: usize,
    pub kernel: String,
    pub method: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub change_point: usize,
    pub degenerate: bool,
    pub sigma_hat: Option<f64>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub ell: usize,
    pub ell_source: &'static str,
    pub bandwidth: Option<BandwidthDiagnostics>,
}

#[derive(Serialize)]
pub struct MethodCell {
    pub method: String,
    pub percent: f64,
    pub std_error_percent: f64,
}

#[derive(Serialize)]
pub struct SimRow {
    pub n: usize,
    pub model: String,
    pub innovations: String,
    pub theta: Option<f64>,
    pub mean_ell: f64,
    pub methods: Vec<MethodCell>,
    pub elapsed_seconds: f64,
}

#[derive(Serialize)]
pub struct SimReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub kernel: String,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap_replicates: usize,
    pub seed: u64,
    pub rows: Vec<SimRow>,
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("serializable report");
    body.push('\n');
    body
}

impl CiReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let header = "command,kernel,method,alpha,n,dim,estimate,lower,upper,\
                              degenerate,sigma_hat,replicates,seed,ell,ell_source,lag_cutoff";
                let lag = self.bandwidth.as_ref().map(|b| b.lag_cutoff);
                format!(
                    "{header}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    self.command,
                    self.kernel,
                    self.method,
                    self.alpha,
                    self.n,
                    self.dim,
                    self.estimate,
                    self.lower,
                    self.upper,
                    self.degenerate,
                    opt(&self.sigma_hat),
                    opt(&self.replicates),
                    opt(&self.seed),
                    self.ell,
                    self.ell_source,
                    opt(&lag),
                )
            }
            Format::Text => {
                let mut s = String::new();
                s.push_str(&format!(
                    "confidence interval ({} / {} kernel)\n",
                    self.method, self.kernel
                ));
                s.push_str(&format!("  input:      {} ({} x {})\n", self.input, self.n, self.dim));
                s.push_str(&format!("  estimate:   {}\n", self.estimate));
                s.push_str(&format!(
                    "  interval:   [{}, {}]  (alpha = {})\n",
                    self.lower, self.upper, self.alpha
                ));
                if let Some(sigma) = self.sigma_hat {
                    s.push_str(&format!("  sigma_hat:  {sigma}\n"));
                }
                if let Some(m) = self.replicates {
                    s.push_str(&format!("  replicates: {m}\n"));
                }
                if let Some(seed) = self.seed {
                    s.push_str(&format!("  seed:       {seed}\n"));
                }
                s.push_str(&format!("  bandwidth:  {} ({})\n", self.ell, self.ell_source));
                if let Some(b) = &self.bandwidth {
                    s.push_str(&format!("  lag cutoff: {}\n", b.lag_cutoff));
                }
                if self.degenerate {
                    s.push_str("  note:       degenerate interval (zero variance input)\n");
                }
                s
            }
        }
    }
}

impl CpReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let header = "command,kernel,method,n,dim,statistic,p_value,change_point,\
                              degenerate,sigma_hat,replicates,seed,ell,ell_source,lag_cutoff";
                let lag = self.bandwidth.as_ref().map(|b| b.lag_cutoff);
                format!(
                    "{header}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    self.command,
                    self.kernel,
                    self.method,
                    self.n,
                    self.dim,
                    self.statistic,
                    self.p_value,
                    self.change_point,
                    self.degenerate,
                    opt(&self.sigma_hat),
                    opt(&self.replicates),
                    opt(&self.seed),
                    self.ell,
                    self.ell_source,
                    opt(&lag),
                )
            }
            Format::Text => {
                let mut s = String::new();
                s.push_str(&format!(
                    "change-point test ({} / {} kernel)\n",
                    self.method, self.kernel
                ));
                s.push_str(&format!("  input:        {} ({} x {})\n", self.input, self.n, self.dim));
                s.push_str(&format!("  statistic:    {}\n", self.statistic));
                s.push_str(&format!("  p-value:      {}\n", self.p_value));
                s.push_str(&format!(
                    "  change point: after observation {}\n",
                    self.change_point
                ));
                if let Some(sigma) = self.sigma_hat {
                    s.push_str(&format!("  sigma_hat:    {sigma}\n"));
                }
                if let Some(m) = self.replicates {
                    s.push_str(&format!("  replicates:   {m}\n"));
                }
                if let Some(seed) = self.seed {
                    s.push_str(&format!("  seed:         {seed}\n"));
                }
                s.push_str(&format!("  bandwidth:    {} ({})\n", self.ell, self.ell_source));
                if self.degenerate {
                    s.push_str("  note:         degenerate scale estimate (zero variance input)\n");
                }
                s
            }
        }
    }
}

impl SimReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut header = String::from("mode,kernel,alpha,reps,M,seed,n,model,innovations,theta,mean_ell");
                if let Some(row) = self.rows.first() {
                    for cell in &row.methods {
                        header.push_str(&format!(",{}_pct,{}_se", cell.method, cell.method));
                    }
                }
                header.push_str(",elapsed_seconds\n");
                let mut out = header;
                for row in &self.rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{:.3}",
                        self.mode,
                        self.kernel,
                        self.alpha,
                        self.reps,
                        self.bootstrap_replicates,
                        self.seed,
                        row.n,
                        row.model,
                        row.innovations,
                        opt(&row.theta),
                        row.mean_ell,
                    ));
                    for cell in &row.methods {
                        out.push_str(&format!(",{:.2},{:.2}", cell.percent, cell.std_error_percent));
                    }
                    out.push_str(&format!(",{:.3}\n", row.elapsed_seconds));
                }
                out
            }
            Format::Text => {
                let mut s = format!(
                    "simulation: {} (kernel {}, alpha {}, reps {}, M {}, seed {})\n",
                    self.mode, self.kernel, self.alpha, self.reps, self.bootstrap_replicates,
                    self.seed
                );
                for row in &self.rows {
                    s.push_str(&format!(
                        "  n={:<5} {:<18} {:<28} mean_ell={:<5.2}",
                        row.n, row.model, row.innovations, row.mean_ell
                    ));
                    for cell in &row.methods {
                        s.push_str(&format!(
                            " {}={:.1}% (se {:.1})",
                            cell.method, cell.percent, cell.std_error_percent
                        ));
                    }
                    if let Some(theta) = row.theta {
                        s.push_str(&format!(" theta={theta:.4}"));
                    }
                    s.push_str(&format!(" [{:.1}s]\n", row.elapsed_seconds));
                }
                s
            }
        }
    }
}
