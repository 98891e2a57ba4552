//! Runs the synthetic end-to-end pipeline: `cargo run --release --example pipeline -- OUT_DIR [SEED]`.

use std::path::PathBuf;
use std::process::ExitCode;

use rccpath::pipeline::{run, PipelineConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut args = std::env::args().skip(1);
    let Some(out) = args.next().map(PathBuf::from) else {
        eprintln!("usage: pipeline OUT_DIR [SEED]");
        return ExitCode::from(1);
    };
    let seed = match args.next().map(|s| s.parse::<u64>()) {
        None => 7,
        Some(Ok(s)) => s,
        Some(Err(_)) => {
            eprintln!("seed must be an integer");
            return ExitCode::from(1);
        }
    };
    match run(&out, seed, &PipelineConfig::default()) {
        Ok(()) => {
            println!("outputs in {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
