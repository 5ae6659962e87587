//! Stress–strain curves of the three built-in homogeneous scenarios, with
//! the energy balance across each jump. Writes `out/examples/curves.svg`.

use std::path::Path;

use softplast::homogeneous::energy_audit_quasistatic;
use softplast::scenario::{builtin, emit_plot, scenario_quasistatic, stress_curve, PlotStyle, Series};

fn main() -> softplast::Result<()> {
    let mut series = vec![];
    let mut style = PlotStyle::new("quasistatic stress", "strain t|ξ0|", "|σ|");
    for name in ["fig-a", "fig-b", "fig-c"] {
        let cfg = builtin(name).unwrap();
        let q = scenario_quasistatic(&cfg)?;
        let end = energy_audit_quasistatic(&q, q.t_end);
        print!("{name}: case {:?}, t0 = {:.4}", q.case, q.t0);
        if let Some(j) = &q.jump {
            print!(", jump at {:.4}: θ {:.4} -> {:.4}", j.tau, j.theta_minus, j.theta_plus);
        }
        println!(", energy residual at T {:.3e} (predicted {:?})", end.residual, end.predicted_deficit);
        let c = stress_curve(&q);
        style.jumps.extend(c.jumps.iter().copied());
        series.push(Series { label: name.into(), segments: c.segments, dashed: false });
    }
    let path = Path::new("out/examples/curves.svg");
    std::fs::create_dir_all(path.parent().unwrap())?;
    emit_plot(path, &series, &style)?;
    println!("wrote {}", path.display());
    Ok(())
}
