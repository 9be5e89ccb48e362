use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holepack::Parallelism;
use holepack_cli::render::{render_frames, Format};
use holepack_cli::{generate, read_trace, solve_batch, solve_text, verify_texts, write_trace, CliError};

#[derive(Parser)]
#[command(name = "holepack", version, about = "Integer cut and (2,3)-metric packings for planar graphs with up to three holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the verified packing.
    Solve {
        /// Instance file; with --batch, any number of them.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write trace.json, certificates.json and stats.json here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Emit the solution as JSON.
        #[arg(long)]
        json_out: bool,
        /// Write the solution here instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Solve every file independently and in parallel.
        #[arg(long)]
        batch: bool,
        /// Output directory for --batch.
        #[arg(long, default_value = "solutions")]
        out_dir: PathBuf,
        /// Disable data parallelism inside the solver.
        #[arg(long)]
        sequential: bool,
    },
    /// Check a solution file against an instance file.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Generate a random grid instance.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Grid side length.
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        k: u64,
        #[arg(long)]
        max_len: i64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(0..=3))]
        holes: u64,
        #[arg(long)]
        json_out: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Draw every frame of a solve trace.
    Render {
        /// A trace directory or trace.json file.
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        /// Output directory; defaults to the trace directory.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn write_out(out: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Parse(e.into())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(e.into()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { files, trace, json_out, out, batch, out_dir, sequential } => {
            if batch {
                let items = solve_batch(&files, &out_dir, json_out);
                let mut worst: Option<CliError> = None;
                for item in items {
                    match item.result {
                        Ok(()) => println!("{}: PASS -> {}", item.input.display(), item.output.unwrap().display()),
                        Err(e) => {
                            println!("{}: FAIL ({e})", item.input.display());
                            if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                                worst = Some(e);
                            }
                        }
                    }
                }
                return worst.map_or(Ok(()), Err);
            }
            let [file] = &files[..] else {
                return Err(CliError::Parse(holepack_cli::files::FileError::Parse {
                    line: 0,
                    message: "solve takes one file unless --batch is given".into(),
                }));
            };
            let mode = if sequential { Parallelism::Sequential } else { Parallelism::Parallel };
            let res = solve_text(&read(file)?, mode, trace.is_some(), json_out)?;
            if let Some(dir) = &trace {
                write_trace(dir, &res.solution)?;
            }
            write_out(out.as_ref(), &res.text)
        }
        Command::Verify { instance, solution } => {
            verify_texts(&read(&instance)?, &read(&solution)?)?;
            println!("PASS");
            Ok(())
        }
        Command::Gen { seed, k, max_len, holes, json_out, out } => {
            let f = generate(seed, k as usize, holes as usize, max_len);
            write_out(out.as_ref(), &if json_out { f.to_json() } else { f.to_text() })
        }
        Command::Render { trace, format, out } => {
            let frames = read_trace(&trace)?;
            let dir = out.unwrap_or_else(|| if trace.is_dir() { trace.clone() } else { trace.parent().map(PathBuf::from).unwrap_or_default() });
            for p in render_frames(&frames, format, &dir)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("holepack: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
