use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ahg::cli_reporting::{
    parse_config, render_json, render_text, run, InputError, JobConfig, OutputFormat, RunError,
    VerifyRequest,
};
use ahg_core::monodromy_engine::Orientation;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ahg", version, about = "Monodromy at infinity of confluent A-hypergeometric systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Ccw,
    Cw,
}

#[derive(clap::Args)]
struct Common {
    /// Job file, or `-` for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Loop direction; overrides the job file.
    #[arg(long, value_enum)]
    orientation: Option<Direction>,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomials of the monodromy at infinity.
    Compute {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the engine against a numerically integrated catalog system.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Catalog id; inferred from A when omitted.
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Face conditions for the coefficients `z` in the job file.
    CheckNondegeneracy {
        #[command(flatten)]
        common: Common,
    },
}

fn read_input(path: &Path) -> Result<String, String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("reading stdin: {e}"))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}

fn load(common: &Common) -> Result<JobConfig, String> {
    let mut config = parse_config(&read_input(&common.input)?).map_err(|e| e.to_string())?;
    if let Some(f) = common.format {
        config.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        };
    }
    if let Some(d) = common.orientation {
        config.orientation = match d {
            Direction::Ccw => Orientation::Ccw,
            Direction::Cw => Orientation::Cw,
        };
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<i32, String> {
    let config = match cli.command {
        Command::Compute { common } => load(&common)?,
        Command::Verify { common, catalog, radius, tol } => {
            let mut config = load(&common)?;
            let mut req = config.verify.take().unwrap_or(VerifyRequest {
                catalog: None,
                frozen: None,
                radius: None,
                tol: None,
            });
            req.catalog = catalog.or(req.catalog);
            req.radius = radius.or(req.radius);
            req.tol = tol.or(req.tol);
            config.verify = Some(req);
            config
        }
        Command::CheckNondegeneracy { common } => {
            let config = load(&common)?;
            if config.z.is_none() {
                let e = InputError {
                    pointer: String::new(),
                    message: "check-nondegeneracy needs coefficients \"z\"".into(),
                };
                return Err(e.to_string());
            }
            config
        }
    };
    let result = run(&config).map_err(|e: RunError| e.to_string())?;
    match config.format {
        OutputFormat::Json => print!("{}", render_json(&result)),
        OutputFormat::Text => print!("{}", render_text(&result)),
    }
    Ok(result.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
