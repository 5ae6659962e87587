//! Loads a scenario file, applies an override, runs it and then sweeps ε.
//!
//! `cargo run --example run_scenario -- scenarios/fig-c.toml`

use std::path::PathBuf;

use softplast::scenario::{run_scenario, sweep, ScenarioConfig, SweepParam};

fn main() -> softplast::Result<()> {
    let path = std::env::args().nth(1).map_or_else(|| PathBuf::from("scenarios/fig-a.toml"), PathBuf::from);
    let cfg = ScenarioConfig::load(&path, &["output.dir=out/examples".into()])?;
    let run = run_scenario(&cfg)?;
    println!("{} -> {}", cfg.name, run.dir.display());
    for (k, v) in &run.diagnostics {
        println!("  {k} = {v:.6e}");
    }
    if cfg.quasistatic {
        let rep = sweep(&cfg, SweepParam::Eps, &[1e-2, 5e-3, 2.5e-3], 3)?;
        for r in &rep.rows {
            println!("  ε = {:.2e}: error {:?}", r.value, r.error);
        }
        println!("  decreasing: {:?}, table {}", rep.decreasing(), rep.table.display());
    }
    Ok(())
}
