//! Builds isotropic and projection kernels on a 2D torus, compares the FFT
//! convolution with the direct double sum, and prints both L1 conventions.

use std::f64::consts::PI;
use std::time::Instant;

use euler_align::grid::{Grid, VectorField};
use euler_align::kernel::{
    young_check_vector, ConvolutionMethod, Kernel, KernelKind, KernelSpec, Profile,
};

fn main() -> euler_align::Result<()> {
    let grid = Grid::new(2, 2.0 * PI, 32)?;
    let f = VectorField::from_fn(grid, |x| [(x[0] + 2.0 * x[1]).sin(), (3.0 * x[0]).cos() * x[1].sin()]);
    for kind in [KernelKind::Isotropic, KernelKind::Projection] {
        let kernel = Kernel::build(
            KernelSpec {
                kind,
                profile: Profile::Bump { radius: 1.0 },
                amplitude: 1.0,
            },
            grid,
        )?;
        let t = Instant::now();
        let fast = kernel.convolve(&f, ConvolutionMethod::Fast)?;
        let t_fast = t.elapsed();
        let t = Instant::now();
        let direct = kernel.convolve(&f, ConvolutionMethod::Direct)?;
        let t_direct = t.elapsed();
        let mut diff = fast.clone();
        diff.add_scaled(-1.0, &direct);
        let young = young_check_vector(&kernel, &f)?;
        println!("{kind:?}");
        println!("  l1 (spectral norm) = {:.6}, l1 (max entry) = {:.6}", kernel.l1_norm(), kernel.l1_norm_max_entry());
        println!(
            "  fast vs direct: {:.2e} relative  ({:?} vs {:?})",
            diff.magnitude().max_abs() / direct.magnitude().max_abs(),
            t_fast,
            t_direct
        );
        println!("  |Gamma*f|_inf = {:.4} <= {:.4}: {}", young.lhs, young.rhs, young.ok);
    }
    Ok(())
}
