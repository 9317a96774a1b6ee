use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use interactions::checklist::{self, Command, RunOptions};
use interactions::problem::Problem;
use interactions::Error;

#[derive(Parser)]
#[command(name = "interact", version, about = "Check interactions on finite-dimensional C*-algebras")]
struct Cli {
    /// Default tolerance when neither --tol nor the problem file sets one.
    #[arg(long, env = "INTERACT_TOL", default_value_t = 1e-9, global = true)]
    default_tol: f64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the interaction axioms and complete positivity.
    Verify {
        spec: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build an object and write it as JSON.
    Build {
        spec: PathBuf,
        #[arg(long, value_enum)]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Full report on the amplified interaction.
    Fuzz {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        amplify: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Bimodule,
    Covrep,
    Report,
}

fn load(path: &PathBuf, tol: Option<f64>) -> Result<Problem, ExitCode> {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("error: --tol must be positive");
            return Err(ExitCode::from(2));
        }
    }
    Problem::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn write(text: &str, out: Option<&PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("error: {}: {e}", p.display());
            ExitCode::from(2)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: &checklist::Report, out: Option<&PathBuf>) -> ExitCode {
    if let Err(c) = write(&report.to_json(), out) {
        return c;
    }
    eprint!("{}", report.summary_text());
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.default_tol > 0.0 && cli.default_tol.is_finite()) {
        eprintln!("error: INTERACT_TOL must be positive");
        return ExitCode::from(2);
    }
    let run = || -> Result<ExitCode, ExitCode> {
        match &cli.command {
            Cmd::Verify { spec, tol } => {
                let p = load(spec, *tol)?;
                let opts = RunOptions::for_problem(&p, Command::Verify, *tol, cli.default_tol);
                Ok(finish(&checklist::run(&p, &opts), None))
            }
            Cmd::Build { spec, emit, out, tol } => {
                let p = load(spec, *tol)?;
                let opts = RunOptions::for_problem(&p, Command::Report, *tol, cli.default_tol);
                let dump = match emit {
                    Emit::Report => return Ok(finish(&checklist::run(&p, &opts), out.as_ref())),
                    Emit::Bimodule => checklist::bimodule_dump(&p, &opts),
                    Emit::Covrep => checklist::covrep_dump(&p, &opts),
                };
                match dump {
                    Ok(v) => {
                        write(&(serde_json::to_string_pretty(&v).unwrap() + "\n"), out.as_ref())?;
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(e @ Error::Problem(_)) => {
                        eprintln!("error: {e}");
                        Ok(ExitCode::from(2))
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        Ok(ExitCode::from(1))
                    }
                }
            }
            Cmd::Fuzz { spec, amplify, samples, seed, tol } => {
                if *amplify == 0 {
                    eprintln!("error: --amplify must be at least 1");
                    return Err(ExitCode::from(2));
                }
                let p = load(spec, *tol)?;
                let mut opts = RunOptions::for_problem(&p, Command::Report, *tol, cli.default_tol);
                opts.amplify = *amplify;
                opts.samples = samples.unwrap_or(opts.samples);
                opts.seed = seed.unwrap_or(opts.seed);
                Ok(finish(&checklist::run(&p, &opts), None))
            }
        }
    };
    run().unwrap_or_else(|c| c)
}
