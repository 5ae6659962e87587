use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use softplast::scenario::{builtin, builtin_names, run_scenario, sweep, ScenarioConfig, SweepParam};
use softplast::Error;

#[derive(Parser)]
#[command(name = "softplast", version, about = "Softening elastoplasticity scenarios")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file, or a built-in scenario by name.
    Run {
        config: String,
        /// Override a config key, e.g. `--set material.mu=0.5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per parameter value.
    Sweep {
        config: String,
        #[arg(long, value_parser = ["eps", "tau"])]
        param: String,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Run the acceptance suite and print a pass/fail table.
    Acceptance,
}

fn load(config: &str, set: &[String], out: &Option<PathBuf>) -> Result<ScenarioConfig, Error> {
    let mut set = set.to_vec();
    if let Some(o) = out {
        set.push(format!("output.dir={:?}", o.to_string_lossy()));
    }
    let path = PathBuf::from(config);
    if path.exists() {
        ScenarioConfig::load(&path, &set)
    } else if let Some(cfg) = builtin(config) {
        cfg.with_overrides(&set)
    } else {
        Err(Error::Config { field: "config".into(), reason: format!("no file or built-in scenario named `{config}`") })
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.cmd {
        Cmd::Run { config, set, out } => {
            let cfg = load(&config, &set, &out)?;
            let a = run_scenario(&cfg)?;
            println!("{} -> {}", cfg.name, a.dir.display());
            for p in a.csv.iter().chain(&a.svg) {
                println!("  {}", p.display());
            }
            for (k, v) in &a.diagnostics {
                println!("  {k} = {v:.6e}");
            }
            Ok(true)
        }
        Cmd::Sweep { config, param, values, workers, set, out } => {
            let cfg = load(&config, &set, &out)?;
            let rep = sweep(&cfg, param.parse::<SweepParam>()?, &values, workers)?;
            println!("{:>14}  {:>14}  status", param, "error");
            for r in &rep.rows {
                let e = r.error.map_or("-".to_string(), |e| format!("{e:.6e}"));
                println!("{:>14.6e}  {:>14}  {}", r.value, e, r.failure.as_deref().unwrap_or("ok"));
            }
            if let Some(d) = rep.decreasing() {
                println!("error decreasing: {d}");
            }
            println!("table: {}", rep.table.display());
            Ok(rep.rows.iter().all(|r| r.failure.is_none()))
        }
        Cmd::ListScenarios => {
            for (name, what) in builtin_names() {
                println!("{name:<14} {what}");
            }
            Ok(true)
        }
        Cmd::Acceptance => {
            let results = softplast::acceptance::run_all(|r| println!("{r}"));
            let passed = results.iter().filter(|r| r.passed).count();
            println!("{passed}/{} criteria passed", results.len());
            Ok(passed == results.len())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
