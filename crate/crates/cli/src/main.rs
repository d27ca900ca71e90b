mod args;
mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use bo_core::{BirkhoffConfig, LaxConfig};
use output::{Output, Tolerances};
use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] bo_core::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Numerical(e) => e.kind(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

/// Resolved global settings shared by every command.
pub struct Context {
    pub settings: Settings,
    pub out: Output,
    pub modes: Option<usize>,
    pub seed: u64,
    pub forward: BirkhoffConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    faer::set_global_parallelism(faer::Par::Seq);
    let name = cli.command.name();
    let mut out_dir = None;
    match run(cli, &mut out_dir) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({ "error": e.kind(), "message": e.to_string(), "command": name });
            eprintln!("{report}");
            if let (CliError::Numerical(_), Some(dir)) = (&e, out_dir) {
                let _ = bo_core::io::write_json(&dir.join("error.json"), &report);
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli, out_dir: &mut Option<PathBuf>) -> Result<String, CliError> {
    let name = cli.command.name();
    let g = &cli.global;
    let settings = Settings::load(g.config.as_deref(), name)?;
    let modes = settings.get("modes", g.modes)?;
    if modes == Some(0) {
        return Err(CliError::Usage("modes must be positive".into()));
    }
    let tol = settings.positive("tol", g.tol, BirkhoffConfig::default().tol_tail)?;
    let jobs = settings.or("jobs", g.jobs, 1usize)?;
    if jobs == 0 {
        return Err(CliError::Usage("jobs must be positive".into()));
    }
    let seed = settings.or("seed", g.seed, 0u64)?;
    let dir = settings.or("out", g.out.clone(), PathBuf::from("bo-out"))?;
    let forward = BirkhoffConfig { lax: LaxConfig::default(), order: None, tol_tail: tol, max_gaps: None };
    let tolerances = Tolerances::new(&forward);
    let out = Output::create(&dir)?;
    *out_dir = Some(dir.clone());
    let mut ctx = Context { settings, out, modes, seed, forward };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let result = pool.install(|| commands::execute(&cli.command, &mut ctx))?;
    ctx.settings.finish()?;

    let report = json!({ "command": name, "tolerances": tolerances, "result": result });
    ctx.out.json("report.json", &report)?;
    ctx.out.manifest(name, env!("CARGO_PKG_VERSION"), ctx.settings.resolved(), seed, &tolerances)?;
    Ok(serde_json::to_string(&json!({ "command": name, "out": dir, "files": ctx.out.files() }))
        .expect("summary serializes"))
}
