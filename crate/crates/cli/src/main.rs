use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use positivity::config::{Format, BUILTINS};
use positivity::report::{run, RunPlan};
use positivity::{Error, ScenarioConfig, Theorem};

const CONFIG_ERROR: u8 = 3;
const THREADS_VAR: &str = "POSITIVITY_THREADS";

/// Numerical positivity checks for vector bundles over the projective line.
#[derive(Parser, Debug)]
#[command(name = "positivity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file, or the name of a built-in scenario.
    #[arg(long, global = true, default_value = "example-1")]
    config: String,
    /// Largest symmetric power scanned.
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Base sampling resolution.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Griffiths curvature extremes of the bundle metric.
    Curvature,
    /// Kobayashi curvature band on the projectivized dual.
    Kobayashi,
    /// Curvature of the direct-image metrics.
    DirectImage,
    /// Hypothesis and conclusion checks.
    Verify {
        #[arg(long, default_value = "all")]
        theorem: TheoremArg,
    },
    /// Everything the scenario selects, plus the curvature summaries.
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "4")]
    Four,
    All,
}

impl TheoremArg {
    fn theorems(self) -> Vec<Theorem> {
        match self {
            Self::One => vec![Theorem::One],
            Self::Two => vec![Theorem::Two],
            Self::Three => vec![Theorem::Three],
            Self::Four => vec![Theorem::Four],
            Self::All => Theorem::ALL.to_vec(),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let mut cfg = if Path::new(&cli.config).exists() {
        ScenarioConfig::load(Path::new(&cli.config))?
    } else if let Some(c) = ScenarioConfig::builtin(&cli.config) {
        c
    } else {
        return Err(Error::Config(vec![format!(
            "`{}` is neither a file nor a built-in scenario ({})",
            cli.config,
            BUILTINS.join(", ")
        )]));
    };
    if let Some(k) = cli.k_max {
        cfg.run.k_max = Some(k);
    }
    if let Some(g) = cli.grid {
        cfg.sampling.grid = g;
    }
    if let Some(out) = &cli.out {
        cfg.run.out = Some(out.clone());
    }
    if let Some(f) = cli.format {
        cfg.run.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    let violations = cfg.violations();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(violations))
    }
}

fn plan(command: &Command, cfg: &mut ScenarioConfig) -> RunPlan {
    let nothing = RunPlan::default();
    match command {
        Command::Curvature => RunPlan {
            curvature: true,
            ..nothing
        },
        Command::Kobayashi => RunPlan {
            kobayashi: true,
            ..nothing
        },
        Command::DirectImage => RunPlan {
            direct_image: true,
            ..nothing
        },
        Command::Verify { theorem } => {
            cfg.run.theorems = theorem.theorems();
            RunPlan {
                theorems: cfg.run.theorems.clone(),
                conclusions: cfg.run.conclusions,
                ..nothing
            }
        }
        Command::Report => RunPlan {
            curvature: true,
            kobayashi: true,
            direct_image: true,
            ..RunPlan::from_config(cfg)
        },
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        Error::Config(vec![format!(
            "{THREADS_VAR} must be a positive integer, got `{v}`"
        )])
    })?;
    if n == 0 {
        return Err(Error::Config(vec![format!(
            "{THREADS_VAR} must be positive"
        )]));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(vec![e.to_string()]))
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Io { .. } => {
            ExitCode::from(CONFIG_ERROR)
        }
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    let mut cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let plan = plan(&cli.command, &mut cfg);
    let report = match run(&cfg, &plan) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match &cfg.run.out {
        Some(path) => {
            if let Err(e) = report.emit(cfg.run.format, path) {
                return fail(&e);
            }
        }
        None => print!("{}", report.render(cfg.run.format)),
    }
    for c in &report.checks {
        let t = c.theorem.map(|t| format!(" {t}")).unwrap_or_default();
        eprintln!(
            "{:?}: {}{} value={:.6} margin={:.3e} [{}]",
            c.status, c.check, t, c.value, c.margin, c.resolution
        );
    }
    ExitCode::from(report.exit_code() as u8)
}
