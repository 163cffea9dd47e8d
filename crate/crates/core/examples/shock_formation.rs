//! Without damping or alignment, a smooth compressive profile steepens into a
//! shock. The finite-volume run stays bounded while the spectral run trips
//! the gradient blow-up detector.

use std::f64::consts::PI;

use euler_align::diagnostics::DiagnosticsConfig;
use euler_align::dynamics::{run, Formulation, SchemeConfig, SimState, SpatialScheme};
use euler_align::eos::EosParams;
use euler_align::grid::{Grid, ScalarField, VectorField};
use euler_align::kernel::{Kernel, KernelKind, KernelSpec, Profile};

fn main() -> euler_align::Result<()> {
    let n = 1024;
    let grid = Grid::new(1, 2.0 * PI, n)?;
    let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, f64::INFINITY)?;
    let kernel = Kernel::build(
        KernelSpec {
            kind: KernelKind::Isotropic,
            profile: Profile::TopHat { radius: 0.25 },
            amplitude: 0.0,
        },
        grid,
    )?;
    let init = SimState::new(
        Formulation::Primitive,
        ScalarField::constant(grid, eos.rho_bar),
        VectorField::from_fn(grid, |x| [-0.5 * x[0].sin(), 0.0]),
        0.0,
    )?;
    let diag = DiagnosticsConfig::for_dim(1);
    for spatial in [SpatialScheme::LlfFv, SpatialScheme::Spectral] {
        let cfg = SchemeConfig {
            spatial,
            t_end: 3.0,
            snapshot_every: 50,
            ..SchemeConfig::default()
        };
        let out = run(&init, &eos, &kernel, &cfg, &diag)?;
        println!("{}:", spatial.name());
        for s in &out.trajectory {
            let u = s.velocity.component(0).values();
            let h = grid.spacing();
            let slope = (0..n).map(|i| ((u[(i + 1) % n] - u[i]) / h).abs()).fold(0.0, f64::max);
            println!("  t = {:.3}  max |du/dx| = {slope:.3}", s.time);
        }
        println!("  {}", out.status.describe());
    }
    Ok(())
}
