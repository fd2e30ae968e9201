//! `bernstein`: batch front end over one JSON input description.

mod commands;
mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{Failure, Guards};

#[derive(Parser, Debug)]
#[command(name = "bernstein", version, about = "Invariants of depth-zero Bernstein blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stabilizer of theta, its reflection part, Gamma and the alcove-lift stabilizer.
    Stab(Common),
    /// Hecke parameters and the structure report of the block.
    Qparams(Common),
    /// Build the block's affine Hecke algebra and verify its relations.
    Hecke(Common),
    /// The theta-spherical Hecke algebra of the finite group of Lie type.
    Oracle(Common),
    /// Splitting analysis of the cocycle on the length-zero group.
    Cocycle(Common),
    /// List every violated invariant of the input; exit 0 iff clean.
    Validate(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 100_000)]
    max_group_order: usize,
    /// Largest length of an affine Weyl group element formed during multiplication.
    #[arg(long, default_value_t = 200)]
    max_length: u64,
    /// Also look for a Frobenius-equivariant splitting (cocycle command).
    #[arg(long)]
    equivariant: bool,
}

fn emit(common: &Common, report: &Value) -> Result<(), Failure> {
    let text = match common.format {
        Format::Json => render::json(report),
        Format::Text => render::text(report),
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Parse(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(common: &Common) -> Result<bool, Failure> {
    let diagnostics = match input::read(&common.input) {
        Ok(file) => file.diagnostics(),
        Err(e) => vec![e.0],
    };
    emit(common, &json!({ "clean": diagnostics.is_empty(), "diagnostics": diagnostics }))?;
    Ok(diagnostics.is_empty())
}

fn run(command: &Command) -> Result<(), Failure> {
    let common = match command {
        Command::Stab(c) | Command::Qparams(c) | Command::Hecke(c) | Command::Oracle(c) | Command::Cocycle(c) => c,
        Command::Validate(c) => {
            return if validate(c)? { Ok(()) } else { Err(Failure::Parse("input has diagnostics".into())) };
        }
    };
    let file = input::read(&common.input)?;
    let problem = file.build()?;
    let guards = Guards { max_group_order: common.max_group_order, max_length: common.max_length };
    match command {
        Command::Stab(_) => emit(common, &commands::stab(&problem, &guards)?),
        Command::Qparams(_) => emit(common, &commands::qparams(&problem, &guards)?),
        Command::Hecke(_) => {
            let (report, ok) = commands::hecke(&problem, &guards)?;
            emit(common, &report)?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Invariant("Hecke relations fail; see the relations field".into()))
            }
        }
        Command::Oracle(_) => emit(common, &commands::oracle(&problem, &guards)?),
        Command::Cocycle(_) => {
            emit(common, &commands::cocycle(&problem, file.omega_cocycle.as_deref(), common.equivariant)?)
        }
        Command::Validate(_) => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
