//! Spectral derivatives and Sobolev norms of a two-mode signal, with the
//! error of the derivative against the closed form.

use std::f64::consts::PI;

use euler_align::grid::{lp_norm, sobolev_norm_sq, spectral_partial, Grid, ScalarField};

fn main() -> euler_align::Result<()> {
    for n in [16, 32, 64] {
        let grid = Grid::new(1, 2.0 * PI, n)?;
        let f = ScalarField::from_fn(grid, |x| x[0].sin() + 0.5 * (3.0 * x[0]).sin());
        let exact = ScalarField::from_fn(grid, |x| x[0].cos() + 1.5 * (3.0 * x[0]).cos());
        let df = spectral_partial(&f, 0);
        let err = df
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "n = {n:3}  max derivative error {err:.2e}  ||f||_2 = {:.12}  ||f||_H2^2 = {:.12}",
            lp_norm(&f, 2.0)?,
            sobolev_norm_sq(&f, 2)?
        );
    }
    // ||f||^2 = pi (1 + 1/4), each derivative order multiplies mode m by m^2
    let h2 = PI * (3.0 + 0.25 * (1.0 + 9.0 + 81.0));
    println!("closed form ||f||_2 = {:.12}  ||f||_H2^2 = {h2:.12}", (1.25 * PI).sqrt());
    Ok(())
}
