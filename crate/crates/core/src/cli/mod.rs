//! Command-line front end.
//!
//! Every command writes into an output directory (`--out`, default `.`)
//! together with a `manifest.json` that records the command line, a digest
//! of the effective options, the seed, digests of every input read, and
//! digests of every file written.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod args;
mod commands;
mod sources;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser};
use serde::Serialize;

pub use args::Cli;
use args::Command;

use crate::report::{sha256_hex, timestamp_now, OutputDir, RunManifest};

pub const SEED_ENV: &str = "RCC_SEED";
pub const DEFAULT_SEED: u64 = 7;

pub(crate) enum CliError {
    Usage(String),
    Data(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

pub(crate) fn data_err(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

/// Adds the offending path to an error message.
pub(crate) trait At<T> {
    fn at(self, path: &Path) -> CliResult<T>;
}

impl<T, E: fmt::Display> At<T> for Result<T, E> {
    fn at(self, path: &Path) -> CliResult<T> {
        self.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

/// Per-invocation state: working directory, seed, and the inputs read so far.
pub(crate) struct Ctx {
    cwd: PathBuf,
    command_line: String,
    seed: u64,
    inputs: BTreeMap<String, String>,
}

impl Ctx {
    pub(crate) fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.cwd.join(p)
        }
    }

    /// Reads a file and records its digest under the path as given.
    pub(crate) fn read(&mut self, p: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(self.resolve(p)).at(p)?;
        self.inputs.insert(p.to_string_lossy().replace('\\', "/"), sha256_hex(&bytes));
        Ok(bytes)
    }

    pub(crate) fn out_dir(&self, p: &Path) -> CliResult<OutputDir> {
        OutputDir::create(self.resolve(p)).at(p)
    }

    pub(crate) fn finish<C: Serialize>(&mut self, out: OutputDir, config: &C) -> CliResult<()> {
        let config_json = serde_json::to_string(config).map_err(|e| data_err(e.to_string()))?;
        let manifest = RunManifest {
            command_line: self.command_line.clone(),
            config_digest: sha256_hex(format!("{config_json}\nseed={}", self.seed).as_bytes()),
            seed: self.seed,
            inputs: std::mem::take(&mut self.inputs),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp_now(),
            outputs: BTreeMap::new(),
        };
        let path = out.path().to_path_buf();
        out.finish(manifest).at(&path)?;
        Ok(())
    }
}

/// Parses a flat `key=value` file. Blank lines and `#` comments are skipped;
/// a key may repeat for multi-valued flags.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flag_present(args: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let with_value = format!("--{key}=");
    args.iter().any(|a| *a == long || a.starts_with(&with_value))
}

/// Removes `--config FILE` from `args` and appends the file's entries as
/// flags for the selected subcommand, skipping keys already given on the
/// command line.
fn expand_config(mut args: Vec<String>, cwd: &Path) -> CliResult<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let file = if let Some(v) = args[pos].strip_prefix("--config=") {
        let v = v.to_string();
        args.remove(pos);
        v
    } else {
        if pos + 1 >= args.len() {
            return Err(CliError::Usage("--config needs a file".into()));
        }
        args.remove(pos);
        args.remove(pos)
    };
    let path = Path::new(&file);
    let full = if path.is_absolute() { path.to_path_buf() } else { cwd.join(path) };
    let text = fs::read_to_string(&full).map_err(|e| CliError::Usage(format!("{file}: {e}")))?;
    let entries = parse_config(&text).map_err(|e| CliError::Usage(format!("{file}: {e}")))?;

    // Walk to the deepest subcommand named on the command line.
    let mut cmd = Cli::command();
    cmd.build();
    let mut sub = &cmd;
    for a in args.iter().skip(1).filter(|a| !a.starts_with('-')) {
        match sub.find_subcommand(a) {
            Some(s) => sub = s,
            None => break,
        }
    }
    let explicit = args.clone();
    for (key, value) in entries {
        if flag_present(&explicit, &key) {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| CliError::Usage(format!("{file}: unknown option `{key}`")))?;
        if arg.get_action().takes_values() {
            args.push(format!("--{key}"));
            args.push(value);
        } else if matches!(value.as_str(), "true" | "1" | "yes") {
            args.push(format!("--{key}"));
        }
    }
    Ok(args)
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={v} is not an integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Runs one command line with relative paths resolved against `cwd`.
/// `args[0]` is the program name. Returns the process exit code.
pub fn run(args: &[String], cwd: &Path) -> i32 {
    match try_run(args, cwd) {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}

fn try_run(args: &[String], cwd: &Path) -> CliResult<()> {
    let args = expand_config(args.to_vec(), cwd)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { Ok(()) } else { Err(CliError::Usage("invalid arguments".into())) };
        }
    };
    let seed = resolve_seed(cli.seed)?;
    let mut ctx = Ctx {
        cwd: cwd.to_path_buf(),
        command_line: std::iter::once("rccpath")
            .chain(args.iter().skip(1).map(String::as_str))
            .collect::<Vec<_>>()
            .join(" "),
        seed,
        inputs: BTreeMap::new(),
    };
    match &cli.command {
        Command::Tile(a) => commands::tile(&mut ctx, a),
        Command::Featurize(a) => commands::featurize(&mut ctx, a),
        Command::Train(a) => commands::train(&mut ctx, a),
        Command::Predict(a) => commands::predict(&mut ctx, a),
        Command::EvalSeg(a) => commands::eval_seg(&mut ctx, a),
        Command::Survival(s) => commands::survival(&mut ctx, s),
        Command::Nomogram(n) => commands::nomogram(&mut ctx, n),
        Command::Compare(a) => commands::compare(&mut ctx, a),
        Command::Report(a) => commands::report(&mut ctx, a),
    }
}
