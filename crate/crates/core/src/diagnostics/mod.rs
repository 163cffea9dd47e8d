//! Energy functionals, the damping/alignment threshold and the convolution
//! inequality monitor, evaluated on single states and along trajectories.

mod audit;
mod sweep;

pub use audit::{
    dissipation_audit, lyapunov_series, time_derivative, AuditChannel, CrossAudit,
    DissipationAudit, LyapunovSeries,
};
pub use sweep::{sweep, Classification, SweepRow, SweepSample};

use rustfft::num_complex::Complex64;

use crate::dynamics::{Formulation, SimState};
use crate::eos::{self, EosParams};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, spectral_grad, Grid, ScalarField, VectorField, MAX_SOBOLEV_ORDER};
use crate::kernel::{young_check, young_check_vector, Kernel};

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `||sigma||^2 + ||u||^2`.
    pub e_l2: f64,
    /// `||sigma||^2_{H^s} + ||u||^2_{H^s}`.
    pub e_hs: f64,
    /// `||u||^2_{H^s}`.
    pub u_diss: f64,
    /// `||grad sigma||^2_{H^{s-1}}`.
    pub grad_sigma_diss: f64,
    /// `sum_{r=1}^{s} integral grad^{r-1} u . grad^r sigma`.
    pub cross: f64,
    /// `e_hs + beta * cross`.
    pub lyapunov: f64,
    /// `integral rho`.
    pub mass: f64,
    /// `max |grad u|` with the pointwise Frobenius norm.
    pub max_grad_u: f64,
    pub young_ok: bool,
    pub threshold_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig {
    pub sobolev_s: usize,
    pub beta: f64,
}

impl DiagnosticsConfig {
    /// `s = 2` in 1D and `s = 3` in 2D, `beta = 0.01`.
    pub fn for_dim(dim: usize) -> Self {
        Self {
            sobolev_s: if dim == 1 { 2 } else { 3 },
            beta: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sobolev_s == 0 || self.sobolev_s > MAX_SOBOLEV_ORDER {
            return Err(Error::UnsupportedSobolev(self.sobolev_s));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be nonnegative, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// `1/tau - 2 a_sym kappa_bar^nu ||Gamma||_1`; positive when damping beats
/// the worst-case alignment self-acceleration.
pub fn threshold_margin(eos: &EosParams, kernel: &Kernel) -> f64 {
    margin_with(eos, kernel.l1_norm())
}

/// The same margin with `||Gamma||_1` measured as the largest entrywise `L^1` norm.
pub fn threshold_margin_max_entry(eos: &EosParams, kernel: &Kernel) -> f64 {
    margin_with(eos, kernel.l1_norm_max_entry())
}

fn margin_with(eos: &EosParams, l1: f64) -> f64 {
    eos.inv_tau() - 2.0 * eos.alignment_sym * eos.kappa_bar.powf(eos.nu) * l1
}

/// `sum_{r=1}^{s} integral grad^{r-1} u . grad^r sigma`, by Parseval:
/// each term is `sum_k |k|^{2(r-1)} Re(u_hat_i conj(i k_i sigma_hat))`.
pub fn cross_term(sigma: &ScalarField, u: &VectorField, s: usize) -> Result<f64> {
    if sigma.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *sigma.grid();
    let sh = sigma.spectrum();
    let uh: Vec<Vec<Complex64>> = u.components().iter().map(|c| c.spectrum()).collect();
    Ok(cross_from_spectra(&grid, &sh, &uh, s))
}

fn cross_from_spectra(grid: &Grid, sh: &[Complex64], uh: &[Vec<Complex64>], s: usize) -> f64 {
    let k2 = grid.k_squared_table();
    let mut total = 0.0;
    for (axis, ui) in uh.iter().enumerate() {
        let ka = grid.axis_wavenumber_table(axis);
        for p in 0..grid.len() {
            let weight: f64 = (0..s).map(|r| k2[p].powi(r as i32)).sum();
            let dsig = Complex64::new(-sh[p].im * ka[p], sh[p].re * ka[p]);
            total += weight * (ui[p] * dsig.conj()).re;
        }
    }
    total * grid.parseval_factor()
}

fn seminorms(grid: &Grid, hats: &[Vec<Complex64>], s: usize) -> Vec<f64> {
    let mut acc = vec![0.0; s + 1];
    for h in hats {
        for (a, v) in acc.iter_mut().zip(crate::grid::seminorms_from_spectrum(grid, h, s)) {
            *a += v;
        }
    }
    acc
}

/// `max_x |grad u(x)|` with the Frobenius norm of the gradient matrix.
pub fn max_velocity_gradient(u: &VectorField) -> f64 {
    let grads: Vec<VectorField> = u.components().iter().map(spectral_grad).collect();
    (0..u.grid().len())
        .map(|p| {
            grads
                .iter()
                .flat_map(|g| g.components().iter().map(move |c| c.values()[p]))
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Weight multiplying the alignment integral in the state's own formulation.
fn alignment_weight_of(state: &SimState, eos: &EosParams) -> Result<ScalarField> {
    match state.form {
        Formulation::Primitive => Ok(state.density_like.clone()),
        Formulation::Symmetrized => eos::alignment_weight(&state.density_like, eos),
    }
}

/// All record fields for one state. Primitive states are measured through
/// `sigma = sigma_from_rho(rho)`.
pub fn energy_report(
    state: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &DiagnosticsConfig,
) -> Result<DiagnosticsRecord> {
    cfg.validate()?;
    state.check_admissible(eos)?;
    let s = cfg.sobolev_s;
    let grid = *state.grid();
    let sigma = state.sigma(eos)?;
    let rho = state.rho(eos)?;
    let u = &state.velocity;

    let sh = sigma.spectrum();
    let uh: Vec<Vec<Complex64>> = u.components().iter().map(|c| c.spectrum()).collect();
    let sig_semi = crate::grid::seminorms_from_spectrum(&grid, &sh, s);
    let u_semi = seminorms(&grid, &uh, s);
    let sig_hs: f64 = sig_semi.iter().sum();
    let u_hs: f64 = u_semi.iter().sum();
    let cross = cross_from_spectra(&grid, &sh, &uh, s);
    let e_hs = sig_hs + u_hs;

    let w = alignment_weight_of(state, eos)?;
    let flux = VectorField::from_raw(
        grid,
        u.components().iter().map(|c| c.zip_map(&w, |a, b| a * b)).collect(),
    );
    let young_ok = young_check(kernel, &w)?.ok && young_check_vector(kernel, &flux)?.ok;

    Ok(DiagnosticsRecord {
        time: state.time,
        e_l2: sig_semi[0] + u_semi[0],
        e_hs,
        u_diss: u_hs,
        grad_sigma_diss: sig_hs - sig_semi[0],
        cross,
        lyapunov: e_hs + cfg.beta * cross,
        mass: rho.integral(),
        max_grad_u: max_velocity_gradient(u),
        young_ok,
        threshold_margin: threshold_margin(eos, kernel),
    })
}

/// `||u||_{L^2}` of a state.
pub fn velocity_l2(state: &SimState) -> f64 {
    lp_norm(&state.velocity, 2.0).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::kernel::{KernelKind, KernelSpec, Profile};

    fn kernel(g: Grid, radius: f64) -> Kernel {
        Kernel::build(
            KernelSpec {
                kind: KernelKind::Isotropic,
                profile: Profile::TopHat { radius },
                amplitude: 1.0,
            },
            g,
        )
        .unwrap()
    }

    fn state(g: Grid, sigma: impl Fn(f64) -> f64, u: impl Fn(f64) -> f64) -> SimState {
        SimState::new(
            Formulation::Symmetrized,
            ScalarField::from_fn(g, |x| sigma(x[0])),
            VectorField::from_fn(g, |x| [u(x[0]), 0.0]),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn margin_arithmetic() {
        let g = Grid::new(1, 2.0 * PI, 64).unwrap();
        // top hat of radius 0.05 has l1 = 0.1 exactly
        let k = kernel(g, 0.05);
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 1.0).unwrap();
        assert!((threshold_margin(&eos, &k) - 0.8).abs() < 1e-14);
        let boundary = 1.0 / (2.0 * k.l1_norm());
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, boundary).unwrap();
        assert!(threshold_margin(&eos, &k).abs() < 1e-14);
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, f64::INFINITY).unwrap();
        assert!(threshold_margin(&eos, &k) < 0.0);
    }

    #[test]
    fn sine_energies_and_cross_terms() {
        let g = Grid::new(1, 2.0 * PI, 64).unwrap();
        let k = kernel(g, 0.25);
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
        let st = state(g, f64::sin, |_| 0.0);
        let cfg = DiagnosticsConfig { sobolev_s: 2, beta: 0.0 };
        let r = energy_report(&st, &eos, &k, &cfg).unwrap();
        assert!((r.e_hs - 3.0 * PI).abs() < 1e-12);
        assert!(r.cross.abs() < 1e-14);

        let st = state(g, |x| 0.1 * x.sin(), |x| 0.1 * x.cos());
        let cross = cross_term(&st.density_like, &st.velocity, 1).unwrap();
        assert!((cross - 0.01 * PI).abs() < 1e-14);
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let g = Grid::new(2, 2.0 * PI, 16).unwrap();
        let k = kernel(g, 0.5);
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
        let st = SimState::equilibrium(g, Formulation::Symmetrized, &eos);
        let r = energy_report(&st, &eos, &k, &DiagnosticsConfig::for_dim(2)).unwrap();
        assert_eq!(r.e_l2, 0.0);
        assert_eq!(r.e_hs, 0.0);
        assert_eq!(r.cross, 0.0);
        assert!(r.young_ok);
        assert!((r.mass - 0.5 * 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn negating_velocity_flips_cross_only() {
        let g = Grid::new(1, 2.0 * PI, 32).unwrap();
        let k = kernel(g, 0.25);
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
        let a = state(g, |x| 0.1 * (2.0 * x).sin(), |x| 0.05 * x.cos() + 0.02 * (3.0 * x).sin());
        let mut b = a.clone();
        b.velocity = b.velocity.map(|v| -v);
        let cfg = DiagnosticsConfig::for_dim(1);
        let ra = energy_report(&a, &eos, &k, &cfg).unwrap();
        let rb = energy_report(&b, &eos, &k, &cfg).unwrap();
        assert_eq!(ra.e_hs, rb.e_hs);
        assert!((ra.cross + rb.cross).abs() < 1e-15);
        assert!(ra.cross.abs() <= 0.5 * ra.e_hs);
    }
}
