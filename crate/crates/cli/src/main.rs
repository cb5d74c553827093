use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpl_cli::commands;
use hpl_cli::config::{ExperimentConfig, Scenario};
use hpl_cli::output::{resolve_out_dir, OutDir};
use hpl_cli::CliError;
use hpl_core::polydisc::DefectSign;

#[derive(Parser)]
#[command(name = "hpl", version, about = "Truncated Hardy-space operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample |phi|, |psi| on circles and judge the S, C and WC conditions.
    Probe(Common),
    /// Check the operator identities over a seeded corpus.
    Verify(Common),
    /// Rank table on the bidisc, growth table on the tridisc.
    Rank(Common),
    /// Write operator matrices as CSV and binary with a hashed manifest.
    Export(Common),
    /// Quick battery of known values.
    Selftest(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Proof,
    Paper,
}

#[derive(Args)]
struct Common {
    /// JSON config (schema_version 1); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    radii_levels: Option<u32>,
    #[arg(long)]
    angular_samples: Option<usize>,
    #[arg(long)]
    tol_s: Option<f64>,
    #[arg(long)]
    tol_c: Option<f64>,
    #[arg(long)]
    tol_wc: Option<f64>,
    #[arg(long)]
    tol_stability: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Output directory; defaults to $HPL_OUT, then ./hpl-out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    defect_sign: Option<SignArg>,
    #[arg(long)]
    guard: Option<usize>,
    /// Number of polydisc variables for `rank` (2 or 3).
    #[arg(long)]
    variables: Option<usize>,
    /// Degrees `p,q` of the generated symbols for `rank`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    degrees: Option<Vec<usize>>,
    #[arg(long)]
    zero_count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn effective_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.scenario {
            cfg.scenario = s;
        }
        if let Some(d) = &self.dims {
            cfg.dims = Some(d.clone());
        }
        if let Some(v) = self.radii_levels {
            cfg.radii_levels = Some(v);
            cfg.radii = None;
        }
        if let Some(v) = self.angular_samples {
            cfg.angular_samples = v;
        }
        let t = &mut cfg.tolerances;
        for (slot, v) in [
            (&mut t.s, self.tol_s),
            (&mut t.c, self.tol_c),
            (&mut t.wc, self.tol_wc),
            (&mut t.stability, self.tol_stability),
            (&mut t.rank_rel, self.tol_rank),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(s) = self.defect_sign {
            cfg.defect_sign = match s {
                SignArg::Proof => DefectSign::Proof,
                SignArg::Paper => DefectSign::Paper,
            };
        }
        if let Some(g) = self.guard {
            cfg.guard = g;
        }
        if let Some(v) = self.variables {
            cfg.variables = v;
        }
        if let Some(d) = &self.degrees {
            match d.as_slice() {
                [p, q] => cfg.degrees = Some([*p, *q]),
                _ => return Err(CliError::Config("--degrees takes two values, p,q".into())),
            }
        }
        if let Some(z) = self.zero_count {
            cfg.zero_count = z;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

type Runner = fn(&ExperimentConfig, &mut OutDir) -> Result<String, CliError>;

fn run(common: &Common, name: &str, runner: Runner) -> Result<String, CliError> {
    let mut cfg = common.effective_config()?;
    let dir = resolve_out_dir(common.out.as_deref(), cfg.out.as_deref());
    // The snapshot records experiment parameters only, so reports written to
    // different directories stay byte-identical.
    cfg.out = None;
    let mut out = OutDir::create(dir)?;
    let msg = runner(&cfg, &mut out)?;
    Ok(format!("{name}: {msg} ({} files in {})", out.written().len(), out.dir().display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Probe(c) => run(c, "probe", commands::probe),
        Command::Verify(c) => run(c, "verify", commands::verify),
        Command::Rank(c) => run(c, "rank", commands::rank),
        Command::Export(c) => run(c, "export", commands::export),
        Command::Selftest(c) => run(c, "selftest", commands::selftest),
    };
    match result {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hpl: {e}");
            e.exit_code()
        }
    }
}
