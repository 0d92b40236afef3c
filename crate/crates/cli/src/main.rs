mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::GameRun;
use crate::config::{check_grid, check_positive, Cli, Command, Format, UsageError};

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Report { input, detector, out } => {
            let input = input.resolve(Some(&detector))?;
            let csv = out.format == Some(Format::Csv);
            commands::report(&input, csv, out.output.as_deref())
        }
        Command::Fringe {
            input,
            detector,
            grid,
            out,
        } => {
            let input = input.resolve(Some(&detector))?;
            let grid = check_grid(grid)?;
            let csv = out.format != Some(Format::Json);
            commands::fringe(&input, grid, csv, out.output.as_deref())
        }
        Command::Frontier { input, points, out } => {
            let input = input.resolve(None)?;
            check_positive("points", points as u64)?;
            let csv = out.format != Some(Format::Json);
            commands::frontier(&input, points, csv, out.output.as_deref())
        }
        Command::Game {
            protocol,
            input,
            detector,
            n,
            seed,
            averaged,
            trials_csv,
            out,
        } => {
            let input = input.resolve(Some(&detector))?;
            let run = GameRun {
                kind: protocol,
                n: check_positive("n", n)?,
                seed,
                averaged,
            };
            let csv = out.format == Some(Format::Csv);
            commands::game(&input, &run, trials_csv.as_deref(), csv, out.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage =
                err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<mzi_duality::Error>().is_some();
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
