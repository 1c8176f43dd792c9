use std::path::PathBuf;
use std::process::ExitCode;

use chainrec::commands;
use chainrec::config::{self, RunConfig};
use chainrec::CliError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chainrec", version, about = "Chain recurrence and explosion scans for interval map families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `output.workers`).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recurrent covering at every grid value.
    Chain(Common),
    /// Sweep, detect and classify chain explosions.
    Scan(Common),
    /// Homoclinic records at one parameter.
    Tangency {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Move to the nearest critical landing within this radius first.
        #[arg(long)]
        polish: Option<f64>,
    },
    /// Expand a recurrence raster into CSV rows.
    Plotdata {
        raster: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = config::load(&c.config)?;
    if let Some(o) = &c.out {
        cfg.out_dir = o.clone();
    }
    if let Some(w) = c.workers {
        if w == 0 {
            return Err(chainrec::ConfigError {
                key: Some("--workers".into()),
                line: None,
                message: "workers must be >= 1".into(),
            }
            .into());
        }
        cfg.workers = w;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Chain(c) => {
            let cfg = load(&c)?;
            let s = commands::cmd_chain(&cfg)?;
            for p in &s.profiles {
                match &p.error {
                    Some(e) => println!("lambda {}: error: {e}", p.lambda),
                    None => println!(
                        "lambda {}: measure {:.6}, {} components, {} boxes",
                        p.lambda, p.measure, p.components, p.recurrent_boxes
                    ),
                }
            }
            Ok(0)
        }
        Cmd::Scan(c) => {
            let cfg = load(&c)?;
            let out = commands::cmd_scan(&cfg)?;
            for e in &out.events {
                println!("{} {} at lambda0 {} x {} est {} window {:?} ({})", e.cause, e.side, e.lambda0, e.x, e.lambda_est, e.search_window, e.verdict.as_deref().unwrap_or("-"));
            }
            for e in &out.summary.errors {
                eprintln!("warning: {e}");
            }
            println!("{} events, {} unclassified", out.events.len(), out.unclassified());
            Ok(if out.unclassified() > 0 { 3 } else { 0 })
        }
        Cmd::Tangency { common, lambda, polish } => {
            let cfg = load(&common)?;
            for r in commands::cmd_tangency(&cfg, lambda, polish)? {
                println!("{}", serde_json::to_string(&r)?);
            }
            Ok(0)
        }
        Cmd::Plotdata { raster, out } => {
            let (path, n) = commands::cmd_plotdata(&raster, out.as_deref())?;
            if let Some(p) = path {
                eprintln!("{n} rows written to {}", p.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors share exit code 1 with config errors; 2 is reserved
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
