//! `layercake`: solve, verify, generate and brute-force multi-layered cake
//! instances stored as JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use layercake::io::{
    generate_instance, load_allocation, load_instance, render_svg, save_allocation, save_instance, AllocationDocument,
};
use layercake::rational::format;
use layercake::verify::exhaustive_2x2_oracle;
use layercake::{fairness_report, Error, Instance, Protocol};

const EXIT_OTHER: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "layercake", version, about = "Exact multi-layered cake cutting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a protocol on an instance and write the allocation.
    Solve {
        /// exact2x2, ef3x2, prop3x3, prop3n, prop or cutchoose2
        #[arg(long)]
        protocol: Protocol,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Embed a fairness report and fail if it contradicts the certificate.
        #[arg(long)]
        verify: bool,
        /// Also write an SVG drawing of the allocation.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Include per-agent query counts in the output.
        #[arg(long)]
        count_queries: bool,
    },
    /// Print the fairness report of an allocation.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alloc: PathBuf,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        cells: usize,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a grid for the best two-knife division of a 2x2 instance.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        grid: u32,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedShape { .. } => EXIT_UNSUPPORTED,
            Error::Document(_)
            | Error::InvalidAgent { .. }
            | Error::NotNormalized { .. }
            | Error::InvalidDensity(_)
            | Error::ParseRational(_)
            | Error::InvertedInterval { .. }
            | Error::OutOfUnit { .. }
            | Error::Dimension(_)
            | Error::Precondition(_)
            | Error::GridTooLarge(_) => EXIT_INVALID,
            _ => EXIT_OTHER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_OTHER,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(load_instance(&read(path)?)?)
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            protocol,
            input,
            out,
            verify,
            render,
            count_queries,
        } => {
            let inst = read_instance(&input)?;
            let result = protocol.run(&inst)?;
            let mut doc = AllocationDocument::from_result(&result, count_queries);
            let mut violation = None;
            if verify {
                let report = fairness_report(&inst, &result.allocation)?;
                if !report.confirms(&result) {
                    violation = Some(format!(
                        "allocation does not satisfy the {} certificate",
                        result.certificate
                    ));
                }
                doc.report = Some(report);
            }
            write(&out, &save_allocation(&doc))?;
            if let Some(svg) = render {
                write(&svg, &render_svg(&result.allocation))?;
            }
            if let Some(message) = violation {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message,
                });
            }
        }
        Command::Verify { input, alloc } => {
            let inst = read_instance(&input)?;
            let doc = load_allocation(&read(&alloc)?)?;
            let a = doc.to_allocation(inst.cake())?;
            let report = fairness_report(&inst, &a)?;
            print!("{}", to_json(&serde_json::to_value(&report).expect("serializable")));
            let structural = report.structural.feasible && report.structural.complete;
            let certified = doc.certificate.is_none_or(|c| report.satisfies(c));
            if !structural || !certified {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: "allocation fails its claims".into(),
                });
            }
        }
        Command::Gen { seed, n, m, cells, out } => {
            if n == 0 || m == 0 || cells == 0 {
                return Err(Failure {
                    code: EXIT_INVALID,
                    message: "n, m and cells must be positive".into(),
                });
            }
            let text = save_instance(&generate_instance(seed, n, m, cells));
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Oracle { input, grid } => {
            let inst = read_instance(&input)?;
            let best = exhaustive_2x2_oracle(&inst, grid)?;
            let doc = serde_json::json!({
                "grid": grid,
                "deficiency": format(&best.deficiency),
                "x": format(&best.x),
                "y": format(&best.y),
            });
            print!("{}", to_json(&doc));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("layercake: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
