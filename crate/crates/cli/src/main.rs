use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use shrinktarget_cli::config::{parse_config_for, Command};
use shrinktarget_cli::run::{run, CliError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Approx,
    Criteria,
    Construct,
    Simulate,
    Transfer,
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Approx => Command::Approx,
            Cmd::Criteria => Command::Criteria,
            Cmd::Construct => Command::Construct,
            Cmd::Simulate => Command::Simulate,
            Cmd::Transfer => Command::Transfer,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Exact Diophantine approximation and shrinking-target experiments.
#[derive(Debug, Parser)]
#[command(name = "shrinktarget", version)]
struct Args {
    command: Cmd,
    /// key=value configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `out` key, then `.`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config's `threads` key
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return fail(CliError::Usage(e.kind().to_string()));
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(CliError::Io(format!("{}: {e}", args.config.display()))),
    };
    let config = match parse_config_for(&text, Some(args.command.into())) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    let out = args
        .out
        .or_else(|| config.word("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match run(&config, &out, args.threads) {
        Ok(outputs) => {
            for f in outputs.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = shrinktarget_cli::output::write_json(&out.join("error.json"), &e.to_json());
            fail(e)
        }
    }
}
