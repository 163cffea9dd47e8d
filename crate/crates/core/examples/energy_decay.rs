//! Small-data run above the damping/alignment threshold: prints the energy
//! functionals every half time unit and the residual audit of the run.

use std::f64::consts::PI;

use euler_align::diagnostics::{dissipation_audit, threshold_margin, DiagnosticsConfig};
use euler_align::dynamics::{run, Formulation, SchemeConfig, SimState};
use euler_align::eos::EosParams;
use euler_align::grid::{Grid, ScalarField, VectorField};
use euler_align::kernel::{Kernel, KernelKind, KernelSpec, Profile};

fn main() -> euler_align::Result<()> {
    let grid = Grid::new(1, 2.0 * PI, 256)?;
    let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4)?;
    let kernel = Kernel::build(
        KernelSpec {
            kind: KernelKind::Isotropic,
            profile: Profile::TopHat { radius: 0.25 },
            amplitude: 1.0,
        },
        grid,
    )?;
    println!("threshold margin {:.4}", threshold_margin(&eos, &kernel));

    let eps = 1e-2;
    let init = SimState::new(
        Formulation::Symmetrized,
        ScalarField::from_fn(grid, |x| eps * x[0].cos()),
        VectorField::from_fn(grid, |x| [eps * x[0].cos(), 0.0]),
        0.0,
    )?;
    let cfg = SchemeConfig {
        t_end: 5.0,
        snapshot_every: 1,
        ..SchemeConfig::default()
    };
    let diag = DiagnosticsConfig::for_dim(1);
    let out = run(&init, &eos, &kernel, &cfg, &diag)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "e_l2", "e_hs", "cross", "lyapunov");
    let mut next = 0.0;
    for r in &out.records {
        if r.time + 1e-9 >= next {
            println!("{:6.2} {:12.4e} {:12.4e} {:12.4e} {:12.4e}", r.time, r.e_l2, r.e_hs, r.cross, r.lyapunov);
            next += 0.5;
        }
    }
    let audit = dissipation_audit(&out.trajectory, &eos, &kernel, diag.sobolev_s)?;
    println!("L2 channel: C_delta = {:.3e} (literal {:.3e})", audit.l2.c_delta, audit.l2.c_delta_literal);
    println!("H^s channel: C_delta = {:.3e}", audit.hs.c_delta);
    println!("cross audit: c_u = {:.3e}", audit.cross.c_u);
    println!("{}", out.status.describe());
    Ok(())
}
