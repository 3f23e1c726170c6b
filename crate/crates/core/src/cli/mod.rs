//! Command-line front end.

mod config;
mod modes;

use std::process::ExitCode;

use clap::Parser;

pub use config::{parse_config, parse_pairs, ConfigError, Mode, RunConfig, SimModel, Source, KEYS};
pub use modes::{
    fig3, fig3_grid, fig3_taus, run, Fig3Fit, Fig3Point, Fig3Result, RunError, RunSummary, SpotCheck,
};

#[derive(Debug, Parser)]
#[command(name = "delay-apt", version, about = "Spectra and laser simulations of two delay-coupled modes")]
pub struct Args {
    /// Config file of `key=value` lines.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// eigen, dome, sweep-eigen, simulate, sweep-lk, sow or fig3.
    #[arg(long)]
    pub mode: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Builds the effective configuration from parsed arguments.
pub fn config_from_args(args: &Args) -> Result<RunConfig, RunError> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })?,
        None => String::new(),
    };
    let mut flags: Vec<(&str, String)> = Vec::new();
    if let Some(o) = &args.out {
        flags.push(("out", o.clone()));
    }
    if let Some(s) = args.seed {
        flags.push(("seed", s.to_string()));
    }
    if let Some(w) = args.workers {
        flags.push(("workers", w.to_string()));
    }
    Ok(parse_config(&text, args.mode.as_deref(), &args.set, &flags)?)
}

/// Entry point of the binary. Errors end with one line on stderr of the form
/// `error kind=<config|numerical|io> code=<n> message=<text>`.
pub fn main_entry() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = config_from_args(&args).and_then(|cfg| {
        cfg.log_provenance();
        run(&cfg)
    });
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error kind={} code={code} message={}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::from(code)
        }
    }
}
