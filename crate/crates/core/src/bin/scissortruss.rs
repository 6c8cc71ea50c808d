use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use scissortruss::cli::{run, RunConfig, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Link lengths and storage metrics for a set of apertures.
    Design,
    /// Mobility, deployment kinematics, natural frequency and references.
    Analyze,
    /// Thermal screening and scoring of the material table.
    Material,
    /// Surrogate fitting and geometry optimization.
    Optimize,
}

#[derive(Debug, Parser)]
#[command(name = "scissortruss", version, about = "Triple-scissor deployable ring truss toolkit")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "off" } else { "error" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let cfg = RunConfig {
        subcommand: match args.command {
            Command::Design => Subcommand::Design,
            Command::Analyze => Subcommand::Analyze,
            Command::Material => Subcommand::Material,
            Command::Optimize => Subcommand::Optimize,
        },
        config: args.config,
        out: args.out,
        seed: args.seed,
        quiet: args.quiet,
    };
    match run(&cfg) {
        Ok(bundle) => {
            if !cfg.quiet {
                print!("{}", bundle.summary);
                for w in &bundle.warnings {
                    eprintln!("warning: {w}");
                }
                for p in &bundle.artifacts {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
