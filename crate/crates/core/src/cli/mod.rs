//! The `qtiming` command line.
//!
//! Exit codes: 0 success, 1 a checked inequality or invariant failed,
//! 2 bad usage or unreadable input.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::infomeasures::Unit;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qtiming", version, about = "Timing information, broadcasting loss and free energy of quantum clocks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Timing information of a state under a Hamiltonian.
    TimingInfo(Flags),
    /// Per-copy information of the phase-covariant cloner on the equatorial orbit.
    ClonerDemo(Flags),
    /// Monte-Carlo check of the information-deficit bounds (CSV output).
    BoundsVerify(Flags),
    /// Energy-conserving unitary extension of a covariant channel.
    ExtendChannel(Flags),
    /// Search for broadcasting maps on the orbit of a state.
    BroadcastOpt(Flags),
    /// Free-energy bookkeeping on the passive covariant channel suite (CSV output).
    Thermo(Flags),
}

/// Flags shared by every subcommand. Each can also be given in the JSON
/// file passed to `--config`; flags on the command line win.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// State (timing-info, broadcast-opt) or channel (extend-channel) file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Orbit samples per period.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random instances (bounds-verify, extend-channel, thermo).
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Output factor dimensions `a,b,e` for broadcast-opt.
    #[arg(long)]
    pub dims: Option<String>,
    /// `bits` or `nats`.
    #[arg(long)]
    pub unit: Option<String>,
    /// Output file (CSV or JSON depending on the command).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub kt: Option<f64>,
    /// Lattice half-width per environment factor (extend-channel).
    #[arg(long)]
    pub window: Option<usize>,
}

impl Flags {
    /// Fill unset flags from the config file, if any.
    fn merged(self) -> Result<Flags> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)?;
        let file: Flags = serde_json::from_str(&text)?;
        Ok(Flags {
            config: self.config,
            input: self.input.or(file.input.map(|p| relative_to(&path, p))),
            hamiltonian: self.hamiltonian.or(file.hamiltonian.map(|p| relative_to(&path, p))),
            samples: self.samples.or(file.samples),
            instances: self.instances.or(file.instances),
            seed: self.seed.or(file.seed),
            restarts: self.restarts.or(file.restarts),
            dims: self.dims.or(file.dims),
            unit: self.unit.or(file.unit),
            out: self.out.or(file.out.map(|p| relative_to(&path, p))),
            kt: self.kt.or(file.kt),
            window: self.window.or(file.window),
        })
    }
}

/// Paths inside a config file are relative to the file itself.
fn relative_to(config: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        config.parent().map_or(p.clone(), |dir| dir.join(&p))
    }
}

/// Fully resolved settings with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub hamiltonian: Option<PathBuf>,
    pub samples: usize,
    pub instances: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub dims: Option<(usize, usize, usize)>,
    pub unit: Unit,
    pub out: Option<PathBuf>,
    pub kt: f64,
    pub window: usize,
}

impl RunConfig {
    pub fn from_flags(flags: Flags) -> Result<Self> {
        let f = flags.merged()?;
        for p in [&f.input, &f.hamiltonian].into_iter().flatten() {
            if !p.is_file() {
                return Err(Error::InvalidArgument(format!("no such file: {}", p.display())));
            }
        }
        let dims = f.dims.as_deref().map(parse_dims).transpose()?;
        let samples = f.samples.unwrap_or(crate::infomeasures::DEFAULT_ORBIT_SAMPLES);
        if samples < 2 {
            return Err(Error::InvalidArgument("--samples must be at least 2".into()));
        }
        if f.instances == Some(0) || f.restarts == Some(0) {
            return Err(Error::InvalidArgument("--instances and --restarts must be positive".into()));
        }
        Ok(Self {
            input: f.input,
            hamiltonian: f.hamiltonian,
            samples,
            instances: f.instances,
            seed: f.seed.unwrap_or(0),
            restarts: f.restarts.unwrap_or(crate::broadcastopt::DEFAULT_RESTARTS),
            dims,
            unit: f.unit.as_deref().unwrap_or("bits").parse()?,
            out: f.out,
            kt: f.kt.unwrap_or(1.0),
            window: f.window.unwrap_or(1),
        })
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("--dims expects a,b,e with positive integers, got {s:?}")))?;
    match parts[..] {
        [a, b, e] if a > 0 && b > 0 && e > 0 => Ok((a, b, e)),
        _ => Err(Error::InvalidArgument(format!("--dims expects a,b,e with positive integers, got {s:?}"))),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CovarianceViolation(_) | Error::PassivityViolation(_) | Error::InvariantViolation(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

type CommandFn = fn(&RunConfig, &mut dyn Write, &mut dyn Write) -> Result<i32>;

/// Parse `args` and run, writing reports to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let (flags, cmd): (Flags, CommandFn) = match cli.command {
        Command::TimingInfo(f) => (f, commands::timing_info),
        Command::ClonerDemo(f) => (f, commands::cloner_demo),
        Command::BoundsVerify(f) => (f, commands::bounds_verify),
        Command::ExtendChannel(f) => (f, commands::extend_channel),
        Command::BroadcastOpt(f) => (f, commands::broadcast_opt),
        Command::Thermo(f) => (f, commands::thermo),
    };
    let result = RunConfig::from_flags(flags).and_then(|cfg| cmd(&cfg, out, err));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
