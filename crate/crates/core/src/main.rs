use clap::Parser;
use markgeo::cli::{run, Cli};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, ok)) => {
            let out = match &cli.command {
                markgeo::cli::Command::Functional { common, .. }
                | markgeo::cli::Command::Distance { common, .. }
                | markgeo::cli::Command::Figure { common, .. }
                | markgeo::cli::Command::Convexity { common }
                | markgeo::cli::Command::Suite { common } => common.out.clone(),
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &output) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => {
                    let _ = std::io::stdout().write_all(output.as_bytes());
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
