use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use supportshape_cli::config::parse_emit_list;
use supportshape_cli::verify::{all_passed, run_suites, table, Suite, VerifyOptions};
use supportshape_cli::{configure_threads, run, RunConfig, RunError};
use supportshape_problems::PROBLEMS;

#[derive(Parser)]
#[command(name = "supportshape", version, about = "Shape optimization over support functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a catalog problem and write its artifacts.
    Run(RunArgs),
    /// Run the invariant and oracle suites.
    Verify(VerifyArgs),
    /// List the catalog problems.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its entries.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Fourier order (2D) or harmonic degree (3D).
    #[arg(long)]
    degree: Option<usize>,
    /// Convexity sample count.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of multistarts.
    #[arg(long)]
    starts: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated artifacts: json, boundary_csv, mesh_obj, log.
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (default: all).
    #[arg(long = "suite", value_enum)]
    suites: Vec<Suite>,
    /// Negative control: corrupt the coefficients under test.
    #[arg(long, hide = true)]
    inject_corruption: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, RunError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if self.problem.is_some() {
            cfg.problem = self.problem;
        }
        let p = &mut cfg.params;
        p.width = self.width.or(p.width);
        p.gamma = self.gamma.or(p.gamma);
        p.k = self.k.or(p.k);
        p.degree = self.degree.or(p.degree);
        p.grid = self.grid.or(p.grid);
        cfg.seed = self.seed.or(cfg.seed);
        cfg.starts = self.starts.or(cfg.starts);
        cfg.out = self.out.or(cfg.out);
        if let Some(e) = &self.emit {
            cfg.emit = Some(parse_emit_list(e)?);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match cli.command {
        Command::Run(args) => {
            let outcome = args.into_config().and_then(|cfg| run(&cfg));
            match outcome {
                Ok(o) => {
                    let r = &o.result;
                    println!("{} {}: value {:.10} (seed {}, {} iterations)", r.problem, r.status.as_str(), r.value, r.best_seed, r.iterations);
                    if let Some(c) = &r.reference {
                        println!("reference {} = {} ({}): relative error {:.3e}", c.key, c.value, c.source, c.relative_error);
                    }
                    for p in &o.written {
                        println!("wrote {}", p.display());
                    }
                    ExitCode::from(o.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify(args) => {
            let checks = run_suites(&VerifyOptions { suites: args.suites, corrupt: args.inject_corruption });
            print!("{}", table(&checks));
            ExitCode::from(if all_passed(&checks) { 0 } else { 1 })
        }
        Command::List => {
            for name in PROBLEMS {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}
