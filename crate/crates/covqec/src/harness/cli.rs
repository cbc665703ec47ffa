use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::commands::{cmd_bounds, cmd_sdp_check, cmd_simulate, cmd_sweep};
use super::config::RunConfig;
use super::verify::{run_checks, FaultHook, MODULES};
use super::HarnessError;

#[derive(Debug, Parser)]
#[command(name = "covqec", version, about = "Covariant erasure codes with shared reference frames")]
pub struct Cli {
    /// key=value settings file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the analytic upper and lower bounds for one configuration.
    Bounds(CommonArgs),
    /// Scaling sweep over total qudit counts; CSV with a slope footer.
    Sweep(CommonArgs),
    /// Monte Carlo run of the full protocol against the exact mixture.
    Simulate(CommonArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Cross-validate the SDP solvers.
    SdpCheck(SdpCheckArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// weak or strong
    #[arg(long)]
    pub model: Option<String>,
    /// Maximum number of erasures (weak model).
    #[arg(long)]
    pub ne: Option<u32>,
    /// Erasure probability per qudit (strong model).
    #[arg(long)]
    pub pe: Option<f64>,
    /// Physical qudits: 1 (bare qubit) or 5 (five-qubit code).
    #[arg(long)]
    pub np: Option<usize>,
    /// Reference qudits.
    #[arg(long)]
    pub nr: Option<u64>,
    /// Total qudits (bounds only).
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated total qudit counts.
    #[arg(long = "n-grid")]
    pub n_grid: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<usize>,
    /// csv or csv+svg
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall-clock runtimes (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = Vec::new();
        let mut put = |k: &'static str, val: Option<String>| {
            if let Some(x) = val {
                v.push((k, x));
            }
        };
        put("d", self.d.map(|x| x.to_string()));
        put("model", self.model.clone());
        put("ne", self.ne.map(|x| x.to_string()));
        put("pe", self.pe.map(|x| x.to_string()));
        put("np", self.np.map(|x| x.to_string()));
        put("nr", self.nr.map(|x| x.to_string()));
        put("n", self.n.map(|x| x.to_string()));
        put("n-grid", self.n_grid.clone());
        put("alpha", self.alpha.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("quad-order", self.quad_order.map(|x| x.to_string()));
        put("mc-samples", self.mc_samples.map(|x| x.to_string()));
        put("format", self.format.clone());
        put("threads", self.threads.map(|x| x.to_string()));
        put("timing", self.timing.then(|| "true".to_string()));
        v
    }
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Restrict to one module's invariants.
    #[arg(long)]
    pub only: Option<String>,
    /// Test hook: add a failing check to the named module.
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Args)]
pub struct SdpCheckArgs {
    /// Block-covariant instances; twice as many random pairs for the diamond bracket.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print one line per instance.
    #[arg(long)]
    pub verbose: bool,
}

fn resolve(cli_config: Option<&PathBuf>, args: &CommonArgs) -> Result<RunConfig, HarnessError> {
    let file = match cli_config {
        Some(p) => Some(std::fs::read_to_string(p)?),
        None => None,
    };
    RunConfig::resolve(file.as_deref(), &args.overrides())
}

/// Runs a parsed command line; the value is the process exit status.
pub fn run(cli: &Cli, sink: &mut dyn Write) -> Result<i32, HarnessError> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(&resolve(cli.config.as_ref(), a)?, sink).map(|_| 0),
        Command::Sweep(a) => cmd_sweep(&resolve(cli.config.as_ref(), a)?, sink).map(|_| 0),
        Command::Simulate(a) => cmd_simulate(&resolve(cli.config.as_ref(), a)?, sink).map(|_| 0),
        Command::Verify(a) => {
            let fault = match &a.inject_fault {
                Some(m) => Some(FaultHook {
                    module: MODULES
                        .iter()
                        .find(|x| *x == m)
                        .ok_or_else(|| HarnessError::Usage(format!("unknown module {m:?}")))?,
                }),
                None => None,
            };
            let outcomes = run_checks(a.only.as_deref(), fault, sink)?;
            Ok(if outcomes.iter().all(|o| o.witness.is_none()) { 0 } else { 1 })
        }
        Command::SdpCheck(a) => cmd_sdp_check(a.instances, a.seed, a.verbose, sink).map(|ok| if ok { 0 } else { 1 }),
    }
}
