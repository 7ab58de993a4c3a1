use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kdv_cli::commands::{cmd_compare, cmd_converge, cmd_roughgen, cmd_run};
use kdv_cli::config::Settings;
use kdv_cli::{CliError, CliResult};

/// Time integration of the periodic KdV equation.
///
/// Every setting can come from a `key = value` file (`--config`) or from
/// the flag of the same name; flags win.
#[derive(Debug, Parser)]
#[command(name = "kdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one initial datum and write the final field.
    Run(Options),
    /// Convergence table for one scheme, as CSV.
    Converge(Options),
    /// Convergence tables for several schemes against one reference.
    Compare(Options),
    /// Generate a rough random initial datum.
    Roughgen(Options),
}

#[derive(Debug, Args)]
struct Options {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// lri2, lri1 or strang; compare takes a comma-separated list.
    #[arg(long)]
    scheme: Option<String>,
    /// Step size, decimal or `2^-k`.
    #[arg(long)]
    tau: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<String>,
    /// Grid points.
    #[arg(long = "N")]
    n: Option<String>,
    /// Regularity of rough random data.
    #[arg(long)]
    theta: Option<String>,
    /// Seed of rough random data.
    #[arg(long)]
    seed: Option<String>,
    /// Sobolev index of the error norm.
    #[arg(long)]
    gamma: Option<String>,
    /// Comma-separated, strictly decreasing step sizes.
    #[arg(long = "tau-list")]
    tau_list: Option<String>,
    /// Step size of the reference solution.
    #[arg(long = "tau-ref")]
    tau_ref: Option<String>,
    /// 3/2-rule dealiasing of products: on or off.
    #[arg(long)]
    dealias: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<String>,
    /// Output path (field file or CSV; CSV goes to stdout when unset).
    #[arg(long)]
    out: Option<String>,
    /// desk (N=1024, T=1) or paper (N=4096, T=2) defaults.
    #[arg(long)]
    profile: Option<String>,
    /// Named initial datum: smooth, cosine, zero or rough.
    #[arg(long)]
    data: Option<String>,
    /// Initial datum from a field file.
    #[arg(long)]
    input: Option<String>,
    /// Directory caching reference solutions.
    #[arg(long = "cache-dir")]
    cache_dir: Option<String>,
}

impl Options {
    fn settings(self) -> CliResult<Settings> {
        let overrides = [
            ("scheme", self.scheme),
            ("tau", self.tau),
            ("T", self.t_final),
            ("N", self.n),
            ("theta", self.theta),
            ("seed", self.seed),
            ("gamma", self.gamma),
            ("tau-list", self.tau_list),
            ("tau-ref", self.tau_ref),
            ("dealias", self.dealias),
            ("jobs", self.jobs),
            ("out", self.out),
            ("profile", self.profile),
            ("data", self.data),
            ("input", self.input),
            ("cache-dir", self.cache_dir),
        ];
        Settings::resolve(self.config.as_deref(), &overrides)
    }
}

fn execute(command: Command) -> CliResult<String> {
    let (opts, run): (Options, fn(&Settings) -> CliResult<String>) = match command {
        Command::Run(o) => (o, cmd_run),
        Command::Converge(o) => (o, cmd_converge),
        Command::Compare(o) => (o, cmd_compare),
        Command::Roughgen(o) => (o, cmd_roughgen),
    };
    let settings = opts.settings()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs()?)
        .build()
        .map_err(|e| CliError::config(format!("jobs: {e}")))?;
    pool.install(|| run(&settings))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(summary) => {
            if !summary.is_empty() {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kdv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
