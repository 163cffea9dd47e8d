//! Sweeps the damping time across the threshold and tabulates the decay of
//! the velocity, sorted by margin.

use std::f64::consts::PI;

use euler_align::diagnostics::{
    sweep, threshold_margin, threshold_margin_max_entry, DiagnosticsConfig, SweepSample,
};
use euler_align::dynamics::{run, Formulation, SchemeConfig, SimState};
use euler_align::eos::EosParams;
use euler_align::grid::{Grid, ScalarField, VectorField};
use euler_align::kernel::{Kernel, KernelKind, KernelSpec, Profile};

fn main() -> euler_align::Result<()> {
    let grid = Grid::new(1, 2.0 * PI, 128)?;
    let kernel = Kernel::build(
        KernelSpec {
            kind: KernelKind::Isotropic,
            profile: Profile::TopHat { radius: 0.25 },
            amplitude: 1.0,
        },
        grid,
    )?;
    let init = SimState::new(
        Formulation::Symmetrized,
        ScalarField::from_fn(grid, |x| 1e-2 * x[0].cos()),
        VectorField::from_fn(grid, |x| [1e-2 * x[0].cos(), 0.0]),
        0.0,
    )?;
    let cfg = SchemeConfig {
        t_end: 4.0,
        ..SchemeConfig::default()
    };
    let diag = DiagnosticsConfig::for_dim(1);
    let taus = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, f64::INFINITY];
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let rows = sweep(&taus, threads, |tau| {
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 2.0, tau)?;
        Ok(SweepSample {
            margin: threshold_margin(&eos, &kernel),
            margin_max_entry: threshold_margin_max_entry(&eos, &kernel),
            output: run(&init, &eos, &kernel, &cfg, &diag)?,
        })
    });
    println!("{:>6} {:>8} {:>12} {:>12} {:>8}", "tau", "margin", "|u|/|u0|", "rate", "class");
    for r in rows {
        println!(
            "{:>6} {:>8.3} {:>12.4e} {:>12.4e} {:>8}",
            r.value,
            r.margin,
            r.decay_ratio,
            r.decay_rate,
            r.classification.name()
        );
    }
    Ok(())
}
