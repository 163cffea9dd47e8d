//! Pseudo-spectral right-hand sides.

use crate::eos::{self, EosParams};
use crate::error::{Error, Result};
use crate::grid::{spectral_div, spectral_grad, ScalarField, VectorField};
use crate::kernel::{alignment_force, Kernel};

use super::{Formulation, SimState};

fn expect_form(s: &SimState, form: Formulation) -> Result<()> {
    if s.form != form {
        return Err(Error::Formulation {
            expected: form.name(),
            found: s.form.name(),
        });
    }
    Ok(())
}

/// `(u . grad) u_i` for every component.
fn advection(u: &VectorField, grads: &[VectorField]) -> Vec<ScalarField> {
    let dim = u.dim();
    (0..dim)
        .map(|i| {
            let mut acc = ScalarField::zeros(*u.grid());
            for j in 0..dim {
                let prod = u.component(j).zip_map(grads[i].component(j), |a, b| a * b);
                acc.add_scaled(1.0, &prod);
            }
            acc
        })
        .collect()
}

/// Primitive system, with the momentum equation divided by `rho`:
///
/// ```text
/// rho_t = -div(rho u)
/// u_t   = -(u.grad)u - grad p(rho) / rho - u/tau - a [u (Gamma*rho) - Gamma*(u rho)]
/// ```
pub fn rhs_primitive(s: &SimState, eos: &EosParams, kernel: &Kernel) -> Result<SimState> {
    expect_form(s, Formulation::Primitive)?;
    let rho = &s.density_like;
    let u = &s.velocity;
    let p = eos::pressure(rho, eos)?;
    let grid = *rho.grid();
    let dim = grid.dim();

    let flux = VectorField::from_raw(
        grid,
        u.components()
            .iter()
            .map(|c| c.zip_map(rho, |a, b| a * b))
            .collect(),
    );
    let drho = spectral_div(&flux).map(|v| -v);

    let grad_p = spectral_grad(&p);
    let grads: Vec<VectorField> = u.components().iter().map(spectral_grad).collect();
    let adv = advection(u, &grads);
    let align = alignment_force(kernel, u, rho, eos.alignment)?;
    let inv_tau = eos.inv_tau();

    let du = (0..dim)
        .map(|i| {
            let vals = (0..grid.len())
                .map(|q| {
                    -adv[i].values()[q]
                        - grad_p.component(i).values()[q] / rho.values()[q]
                        - inv_tau * u.component(i).values()[q]
                        + align.component(i).values()[q]
                })
                .collect();
            ScalarField::from_raw(grid, vals)
        })
        .collect();
    Ok(SimState {
        form: Formulation::Primitive,
        density_like: drho,
        velocity: VectorField::from_raw(grid, du),
        time: 0.0,
    })
}

/// Sound-speed system:
///
/// ```text
/// sigma_t = -kappa_bar div u - u.grad sigma - (1/nu) sigma div u
/// u_t     = -kappa_bar grad sigma - u/tau - (u.grad)u - (1/nu) sigma grad sigma
///           - a_sym [u (Gamma*w) - Gamma*(u w)],   w = (sigma/nu + kappa_bar)^nu
/// ```
pub fn rhs_symmetrized(s: &SimState, eos: &EosParams, kernel: &Kernel) -> Result<SimState> {
    expect_form(s, Formulation::Symmetrized)?;
    let sigma = &s.density_like;
    let u = &s.velocity;
    let w = eos::alignment_weight(sigma, eos)?;
    let grid = *sigma.grid();
    let dim = grid.dim();

    let grad_sigma = spectral_grad(sigma);
    let div_u = spectral_div(u);
    let grads: Vec<VectorField> = u.components().iter().map(spectral_grad).collect();
    let adv = advection(u, &grads);
    let align = alignment_force(kernel, u, &w, eos.alignment_sym)?;
    let kbar = eos.kappa_bar;
    let inv_nu = 1.0 / eos.nu;
    let inv_tau = eos.inv_tau();

    let dsigma = (0..grid.len())
        .map(|q| {
            let sg: f64 = (0..dim)
                .map(|j| u.component(j).values()[q] * grad_sigma.component(j).values()[q])
                .sum();
            let dv = div_u.values()[q];
            -kbar * dv - sg - inv_nu * sigma.values()[q] * dv
        })
        .collect();
    let du = (0..dim)
        .map(|i| {
            let vals = (0..grid.len())
                .map(|q| {
                    let gs = grad_sigma.component(i).values()[q];
                    -kbar * gs
                        - inv_tau * u.component(i).values()[q]
                        - adv[i].values()[q]
                        - inv_nu * sigma.values()[q] * gs
                        + align.component(i).values()[q]
                })
                .collect();
            ScalarField::from_raw(grid, vals)
        })
        .collect();
    Ok(SimState {
        form: Formulation::Symmetrized,
        density_like: ScalarField::from_raw(grid, dsigma),
        velocity: VectorField::from_raw(grid, du),
        time: 0.0,
    })
}
