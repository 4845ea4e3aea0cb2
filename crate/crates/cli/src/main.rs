use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use partideal::{ProjectionElement, Side, Tolerance};
use partideal_cli::{
    cmd_check, cmd_cover, cmd_partial_ideal, cmd_theorem, cmd_witness, describe_family_error, CliError, CommandOutcome,
    ExperimentConfig, ProjectionSpec, RuleSpec,
};

/// Verify invariant families of projections in M_{n_1}(C) ⊕ … ⊕ M_{n_K}(C).
///
/// Exit codes: 0 all checks passed, 1 usage or I/O error, 2 a check failed.
#[derive(Parser, Debug)]
#[command(name = "partideal", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Block sizes, e.g. 2,3,2.
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3")]
    dims: Vec<usize>,
    /// Master seed; every trial derives its own seed from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random trials.
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
    /// Comparison tolerance.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Pivot cutoff for numerical rank.
    #[arg(long, global = true)]
    rank_eps: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the one-line summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Round-trip every central projection and find witnesses for non-central ones.
    Theorem,
    /// Cover the central carrier of a random projection with the given ranks.
    Cover {
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
    },
    /// Tabulate the one-sided partial ideal of a projection and check it.
    PartialIdeal {
        #[command(flatten)]
        projection: ProjectionArgs,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
    },
    /// Exhibit (V, u) breaking invariance for a non-central projection.
    Witness {
        #[command(flatten)]
        projection: ProjectionArgs,
    },
    /// Check consistency and invariance of one induced family.
    Check {
        /// Central mask, e.g. 1,0,1.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["ranks", "projection"])]
        mask: Option<Vec<u8>>,
        #[command(flatten)]
        projection: ProjectionArgs,
    },
}

#[derive(Args, Debug)]
struct ProjectionArgs {
    /// Block ranks of a random projection.
    #[arg(long, value_delimiter = ',', conflicts_with = "projection")]
    ranks: Option<Vec<usize>>,
    /// JSON file holding an element {"dims", "blocks"}.
    #[arg(long)]
    projection: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

fn config(g: &Global) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(g.dims.clone(), g.seed, g.trials);
    let defaults = Tolerance::default();
    cfg.tolerance = Tolerance::new(g.eps.unwrap_or(defaults.eps), g.rank_eps.unwrap_or(defaults.rank_eps))
        .ok_or_else(|| CliError::Usage("tolerances must be positive and finite".into()))?;
    Ok(cfg)
}

fn projection_spec(args: &ProjectionArgs, cfg: &ExperimentConfig) -> Result<ProjectionSpec, CliError> {
    match (&args.ranks, &args.projection) {
        (Some(r), None) => Ok(ProjectionSpec::Ranks(r.clone())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let p = ProjectionElement::from_json(&text, cfg.tolerance).map_err(CliError::Usage)?;
            Ok(ProjectionSpec::Explicit(p))
        }
        _ => Err(CliError::Usage("give exactly one of --ranks or --projection".into())),
    }
}

fn run(cli: &Cli) -> Result<CommandOutcome, CliError> {
    let mut cfg = config(&cli.global)?;
    match &cli.command {
        Command::Theorem => cmd_theorem(&cfg),
        Command::Cover { ranks } => cmd_cover(&cfg, ranks),
        Command::PartialIdeal { projection, side } => {
            let spec = projection_spec(projection, &cfg)?;
            if let ProjectionSpec::Explicit(p) = &spec {
                cfg.dims = p.algebra().dims().to_vec();
            }
            cmd_partial_ideal(&cfg, &spec, (*side).into())
        }
        Command::Witness { projection } => {
            let spec = projection_spec(projection, &cfg)?;
            if let ProjectionSpec::Explicit(p) = &spec {
                cfg.dims = p.algebra().dims().to_vec();
            }
            cmd_witness(&cfg, &spec)
        }
        Command::Check { mask, projection } => {
            let spec = match mask {
                Some(bits) => RuleSpec::Central(bits.iter().map(|&b| b != 0).collect()),
                None => {
                    let spec = projection_spec(projection, &cfg)?;
                    if let ProjectionSpec::Explicit(p) = &spec {
                        cfg.dims = p.algebra().dims().to_vec();
                    }
                    RuleSpec::Projection(spec)
                }
            };
            cmd_check(&cfg, &spec)
        }
    }
}

fn main() -> ExitCode {
    // clap would exit with 2, which is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let json = outcome.to_json();
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, json),
                None => {
                    print!("{json}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: io: {e}");
                return ExitCode::from(1);
            }
            if !cli.global.quiet {
                eprintln!("{}", outcome.summary);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            let msg = match &e {
                CliError::Family(f) => describe_family_error(f),
                other => other.to_string(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
