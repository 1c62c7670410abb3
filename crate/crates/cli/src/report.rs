use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use drawdown_control::{Error, ModelParams};
use serde::Serialize;

/// Failures mapped onto the documented exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag or configuration value (exit 2).
    Validation(String),
    /// The solver could not produce a value function (exit 3).
    Solver(String),
    /// A simulation needed the solver and it failed (exit 4).
    SimulationDependency(String),
    /// A check ran and did not pass (exit 1).
    CheckFailed(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::SimulationDependency(_) => 4,
            CliError::CheckFailed(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver failed: {m}"),
            CliError::SimulationDependency(m) => write!(f, "simulation needs a solution: {m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Flag that sets the library field `name`.
fn flag_for(name: &str) -> String {
    match name {
        "n_paths" => "--paths".into(),
        "const rate" => "--strategy".into(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

/// Parameter and configuration errors become validation errors naming the
/// flag; anything else goes through `other`.
pub fn classify(e: Error, other: fn(String) -> CliError) -> CliError {
    match &e {
        Error::InvalidParameter { name, .. } | Error::InvalidConfig { name, .. } => {
            CliError::Validation(format!("{}: {e}", flag_for(name)))
        }
        _ => other(e.to_string()),
    }
}

/// `x` to `digits` significant digits, trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: &'a [String],
    version: &'a str,
    params: Option<ModelParams>,
    seed: Option<u64>,
    outputs: &'a [PathBuf],
    duration_secs: f64,
}

/// Tracks the files one command writes and records them in a manifest.
pub struct Run {
    command: &'static str,
    argv: Vec<String>,
    out_dir: PathBuf,
    started: Instant,
    outputs: Vec<PathBuf>,
    pub params: Option<ModelParams>,
    pub seed: Option<u64>,
}

impl Run {
    pub fn new(command: &'static str, argv: Vec<String>, out: Option<&Path>) -> Self {
        let out_dir = out
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os("DDCTL_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Self {
            command,
            argv,
            out_dir,
            started: Instant::now(),
            outputs: Vec::new(),
            params: None,
            seed: None,
        }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    /// Writes `<command>.manifest.json` next to the outputs.
    pub fn finish(self) -> Result<(), CliError> {
        let manifest = Manifest {
            command: self.command,
            argv: &self.argv,
            version: env!("CARGO_PKG_VERSION"),
            params: self.params,
            seed: self.seed,
            outputs: &self.outputs,
            duration_secs: self.started.elapsed().as_secs_f64(),
        };
        fs::create_dir_all(&self.out_dir)?;
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(self.out_dir.join(format!("{}.manifest.json", self.command)), json)?;
        Ok(())
    }
}
