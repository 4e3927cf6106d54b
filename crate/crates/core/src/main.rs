use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use steklov_core::cli::{self, RunConfig};
use steklov_core::Error;

#[derive(Parser)]
#[command(name = "steklov", version, about = "Steklov spectra of Cayley subgraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth function V(n) and fitted growth order.
    Growth(Flags),
    /// Steklov spectrum of a single subgraph.
    Spectrum(Flags),
    /// Sweep a shape family and check the eigenvalue bounds.
    Sweep(Flags),
}

#[derive(Args)]
struct Flags {
    /// key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group, e.g. `Z^2`, `H3`, `Z^1 x H3`.
    #[arg(long)]
    group: Option<String>,
    /// Custom generating set, e.g. `1,0;-1,0;0,1;0,-1`.
    #[arg(long)]
    generators: Option<String>,
    /// ball, punctured-ball, box[:AxB..], ball-minus-ball:INNER
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    /// Family parameter for `spectrum` (defaults to --n-max).
    #[arg(long)]
    n: Option<u32>,
    /// Number of nontrivial eigenvalues to report.
    #[arg(short = 'K')]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    ball_cap: Option<usize>,
    /// Comma-separated: spectrum, han-hua, decay, main-bound; `none` for no checks.
    #[arg(long)]
    checks: Option<String>,
    /// Interior vertex file for `spectrum`.
    #[arg(long)]
    omega: Option<PathBuf>,
}

impl Flags {
    fn resolve(self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                RunConfig::from_kv(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.group {
            cfg.group = v;
        }
        if let Some(v) = self.generators {
            cfg.generators = Some(v);
        }
        if let Some(v) = self.family {
            cfg.family = v;
        }
        if let Some(v) = self.n_min {
            cfg.n_min = Some(v);
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.n {
            cfg.n = Some(v);
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.out {
            cfg.out_dir = v;
        }
        if let Some(v) = self.ball_cap {
            cfg.ball_cap = v;
        }
        if let Some(v) = self.checks {
            cfg.checks = Some(cli::parse_checks(&v));
        }
        if let Some(v) = self.omega {
            cfg.omega = Some(v);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (flags, run): (Flags, fn(&RunConfig, &mut dyn std::io::Write) -> steklov_core::Result<i32>) =
        match args.command {
            Command::Growth(f) => (f, cli::cmd_growth),
            Command::Spectrum(f) => (f, cli::cmd_spectrum),
            Command::Sweep(f) => (f, cli::cmd_sweep),
        };
    let result = flags.resolve().and_then(|cfg| run(&cfg, &mut std::io::stdout()));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
