//! Moves a density profile to sound-speed variables and back, for several
//! adiabatic exponents.

use std::f64::consts::PI;

use euler_align::eos::{alignment_weight, rho_from_sigma, sigma_from_rho, EosParams};
use euler_align::grid::{Grid, ScalarField};

fn main() -> euler_align::Result<()> {
    let grid = Grid::new(1, 2.0 * PI, 128)?;
    let rho_bar = 0.5;
    let rho = ScalarField::from_fn(grid, |x| rho_bar * (1.0 + 0.6 * x[0].sin()));
    println!("gamma    nu      kappa_bar  max|sigma|  round-trip err  weight*a_sym - a*rho");
    for gamma in [1.4, 5.0 / 3.0, 2.0, 3.0] {
        let eos = EosParams::new(1.0, gamma, rho_bar, 1.0, 0.4)?;
        let sigma = sigma_from_rho(&rho, &eos)?;
        let back = rho_from_sigma(&sigma, &eos)?;
        let err = back
            .values()
            .iter()
            .zip(rho.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let w = alignment_weight(&sigma, &eos)?;
        let gap = w
            .values()
            .iter()
            .zip(rho.values())
            .map(|(wi, ri)| (eos.alignment_sym * wi - eos.alignment * ri).abs())
            .fold(0.0, f64::max);
        println!(
            "{gamma:<8.4} {:<7.3} {:<10.6} {:<11.6} {err:<15.2e} {gap:.2e}",
            eos.nu,
            eos.kappa_bar,
            sigma.max_abs()
        );
    }
    Ok(())
}
