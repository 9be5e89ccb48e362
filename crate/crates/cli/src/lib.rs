//! File formats, instance generation, trace rendering and the command
//! implementations behind the `holepack` binary.

pub mod files;
pub mod render;

use std::path::{Path, PathBuf};

use holepack::finalize::{solve, SolveError, SolveOptions, Solution, TraceFrame};
use holepack::fixtures::random_grid;
use holepack::metricspace::verify_packing;
use holepack::{Instance, Parallelism};
use rayon::prelude::*;
use thiserror::Error;

use files::{FileError, InstanceFile, SolutionFile};

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] FileError),
    #[error("solve failed: {0}")]
    Solve(#[from] SolveError),
    #[error("verification failed: {}", .0.join("; "))]
    Verify(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Solve(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Parse(FileError::Io(e))
}

/// A generated instance file.
pub fn generate(seed: u64, k: usize, holes: usize, max_len: i64) -> InstanceFile {
    InstanceFile::from_instance(&random_grid(seed, k, holes, max_len))
}

/// A solved and verified instance with its serialized solution.
pub struct SolveOutput {
    pub instance: Instance,
    pub solution: Solution,
    pub text: String,
}

/// Solve an instance and check the packing against it before returning.
pub fn solve_instance(inst: &Instance, mode: Parallelism, record_trace: bool, json: bool) -> Result<SolveOutput, CliError> {
    let opts = SolveOptions { record_trace, ..SolveOptions::with_mode(mode) };
    let solution = solve(inst, &opts)?;
    let report = verify_packing(inst, &solution.packing, mode);
    if !report.passed() {
        return Err(CliError::Verify(report.failures()));
    }
    let file = SolutionFile::from_packing(&solution.packing);
    let text = if json { file.to_json() } else { file.to_text() };
    Ok(SolveOutput { instance: inst.clone(), solution, text })
}

pub fn solve_text(text: &str, mode: Parallelism, record_trace: bool, json: bool) -> Result<SolveOutput, CliError> {
    let inst = files::read_instance(text)?;
    solve_instance(&inst, mode, record_trace, json)
}

/// Write `trace.json`, `certificates.json` and `stats.json` into `dir`.
pub fn write_trace(dir: &Path, solution: &Solution) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let dump = |name: &str, body: String| std::fs::write(dir.join(name), body + "\n").map_err(io_err);
    dump("trace.json", serde_json::to_string_pretty(&solution.trace).expect("trace serializes"))?;
    dump("certificates.json", serde_json::to_string_pretty(&solution.certificates).expect("certificates serialize"))?;
    dump("stats.json", serde_json::to_string_pretty(&solution.stats).expect("stats serialize"))?;
    Ok(())
}

/// Read trace frames from a `trace.json` file or a directory holding one.
pub fn read_trace(path: &Path) -> Result<Vec<TraceFrame>, CliError> {
    let file = if path.is_dir() { path.join("trace.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(io_err)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(FileError::Json(e)))
}

/// Check a solution file against an instance file.
pub fn verify_texts(instance: &str, solution: &str) -> Result<(), CliError> {
    let inst = files::read_instance(instance)?;
    let packing = SolutionFile::parse(solution)?.to_packing()?;
    let report = verify_packing(&inst, &packing, Parallelism::default());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verify(report.failures()))
    }
}

/// Result of one instance of a batch.
pub struct BatchItem {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub result: Result<(), CliError>,
}

/// Solve many files in parallel, one independent sequential solve each,
/// writing `<stem>.sol` (or `<stem>.sol.json`) into `out_dir`.
pub fn solve_batch(inputs: &[PathBuf], out_dir: &Path, json: bool) -> Vec<BatchItem> {
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        return inputs.iter().map(|p| BatchItem { input: p.clone(), output: None, result: Err(io_err(std::io::Error::new(e.kind(), e.to_string()))) }).collect();
    }
    inputs
        .par_iter()
        .map(|input| {
            let run = || -> Result<PathBuf, CliError> {
                let text = std::fs::read_to_string(input).map_err(io_err)?;
                let out = solve_text(&text, Parallelism::Sequential, false, json)?;
                let stem = input.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
                let path = out_dir.join(if json { format!("{stem}.sol.json") } else { format!("{stem}.sol") });
                std::fs::write(&path, out.text).map_err(io_err)?;
                Ok(path)
            };
            match run() {
                Ok(p) => BatchItem { input: input.clone(), output: Some(p), result: Ok(()) },
                Err(e) => BatchItem { input: input.clone(), output: None, result: Err(e) },
            }
        })
        .collect()
}
