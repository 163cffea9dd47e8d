//! Energy inequalities evaluated along computed trajectories.

use rustfft::num_complex::Complex64;

use crate::dynamics::{Formulation, SimState};
use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::Kernel;

use super::{energy_report, threshold_margin, DiagnosticsConfig, DiagnosticsRecord};

/// Relative slack for the monotonicity flag of [`LyapunovSeries`].
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Points in the finite-difference stencil of [`time_derivative`].
const STENCIL: usize = 5;

/// `d/dx` at `x0` of the Lagrange interpolant through `nodes`, as weights.
fn lagrange_derivative_weights(nodes: &[f64], x0: f64) -> Vec<f64> {
    let m = nodes.len();
    (0..m)
        .map(|j| {
            let mut total = 0.0;
            for k in (0..m).filter(|&k| k != j) {
                let mut term = 1.0 / (nodes[j] - nodes[k]);
                for l in (0..m).filter(|&l| l != j && l != k) {
                    term *= (x0 - nodes[l]) / (nodes[j] - nodes[l]);
                }
                total += term;
            }
            total
        })
        .collect()
}

/// Derivative of samples `y(t)` on a possibly non-uniform mesh by
/// differentiating the local interpolating polynomial: five points (fourth
/// order), centred inside and shifted one-sided at both ends. Shorter series
/// use every available point.
pub fn time_derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 2 || y.len() != n {
        return Err(Error::TrajectoryTooShort(n.min(y.len())));
    }
    let width = STENCIL.min(n);
    let half = width / 2;
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half).min(n - width);
            let w = lagrange_derivative_weights(&t[lo..lo + width], t[i]);
            w.iter().zip(&y[lo..lo + width]).map(|(a, b)| a * b).sum()
        })
        .collect())
}

/// One energy inequality of the form
/// `1/2 dE/dt + margin * D <= C delta * N` along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditChannel {
    /// `1/2 dE/dt + margin * D`.
    pub residual: Vec<f64>,
    /// `1/2 dE/dt + D/tau - A_lin`, where `A_lin` is the alignment term of the
    /// system linearised about the background. Only the cubic terms remain.
    pub nonlinear_residual: Vec<f64>,
    /// The right-hand-side norm `N`.
    pub normalizer: Vec<f64>,
    /// `sup_t residual / N`.
    pub c_delta_literal: f64,
    /// `sup_t |nonlinear_residual| / N`; linear in the data amplitude.
    pub c_delta: f64,
}

/// `d/dt cross + kappa_bar/4 ||grad sigma||^2_{H^{s-1}} <= C ||u||^2_{H^s} + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossAudit {
    pub lhs: Vec<f64>,
    /// `sup_t lhs / ||u||^2_{H^s}`.
    pub c_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationAudit {
    pub times: Vec<f64>,
    pub records: Vec<DiagnosticsRecord>,
    /// `L^2` level: `E = ||sigma||^2 + ||u||^2`, `D = ||u||^2`,
    /// `N = ||u||^2 + ||grad sigma||^2`.
    pub l2: AuditChannel,
    /// `H^s` level: `E = e_hs`, `D = ||u||^2_{H^s}`,
    /// `N = ||u||^2_{H^s} + ||grad sigma||^2_{H^{s-1}}`.
    pub hs: AuditChannel,
    pub cross: CrossAudit,
}

fn sup_ratio(num: impl Iterator<Item = f64>, den: &[f64]) -> f64 {
    num.zip(den)
        .map(|(a, &b)| if b > 0.0 { a / b } else { 0.0 })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `-a_sym kappa_bar^nu sum_k w(k) Re(u_hat^* (G(0) - G(k)) u_hat)`, the
/// alignment contribution to `1/2 dE/dt` in the linearised system, with
/// Fourier weight `w(k)` selecting the energy level.
fn linear_alignment_energy(
    grid: &Grid,
    kernel: &Kernel,
    eos: &EosParams,
    uh: &[Vec<Complex64>],
    weight: &[f64],
) -> f64 {
    let dim = grid.dim();
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let g = kernel.symbol(i, j);
            let g0 = g[0];
            for p in 0..grid.len() {
                total += weight[p] * (uh[i][p].conj() * (g0 - g[p]) * uh[j][p]).re;
            }
        }
    }
    -eos.alignment_sym * eos.kappa_bar.powf(eos.nu) * total * grid.parseval_factor()
}

fn channel(
    de: &[f64],
    dissipation: &[f64],
    linear_alignment: &[f64],
    normalizer: Vec<f64>,
    margin: f64,
    inv_tau: f64,
) -> AuditChannel {
    let residual: Vec<f64> = de
        .iter()
        .zip(dissipation)
        .map(|(d, q)| 0.5 * d + margin * q)
        .collect();
    let nonlinear_residual: Vec<f64> = de
        .iter()
        .zip(dissipation)
        .zip(linear_alignment)
        .map(|((d, q), a)| 0.5 * d + inv_tau * q - a)
        .collect();
    let c_delta_literal = sup_ratio(residual.iter().copied(), &normalizer);
    let c_delta = sup_ratio(nonlinear_residual.iter().map(|v| v.abs()), &normalizer);
    AuditChannel {
        residual,
        nonlinear_residual,
        normalizer,
        c_delta_literal,
        c_delta,
    }
}

/// Both sides of the `L^2`, `H^s` and cross-term energy inequalities at every
/// state of `trajectory`, with time derivatives taken by finite differences.
pub fn dissipation_audit(
    trajectory: &[SimState],
    eos: &EosParams,
    kernel: &Kernel,
    sobolev_s: usize,
) -> Result<DissipationAudit> {
    if trajectory.len() < 2 {
        return Err(Error::TrajectoryTooShort(trajectory.len()));
    }
    let cfg = DiagnosticsConfig {
        sobolev_s,
        beta: 0.0,
    };
    let grid = *trajectory[0].grid();
    let k2 = grid.k_squared_table();
    let hs_weight: Vec<f64> = k2
        .iter()
        .map(|&k| (0..=sobolev_s).map(|r| k.powi(r as i32)).sum())
        .collect();
    let l2_weight = vec![1.0; grid.len()];

    let mut records = Vec::with_capacity(trajectory.len());
    let mut u_l2 = Vec::with_capacity(trajectory.len());
    let mut grad_sigma_l2 = Vec::with_capacity(trajectory.len());
    let mut lin_l2 = Vec::with_capacity(trajectory.len());
    let mut lin_hs = Vec::with_capacity(trajectory.len());
    for state in trajectory {
        if state.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let st = state.to_form(Formulation::Symmetrized, eos)?;
        records.push(energy_report(&st, eos, kernel, &cfg)?);
        let uh: Vec<Vec<Complex64>> = st.velocity.components().iter().map(|c| c.spectrum()).collect();
        let sh = st.density_like.spectrum();
        let us: f64 = uh
            .iter()
            .map(|h| crate::grid::seminorms_from_spectrum(&grid, h, 0)[0])
            .sum();
        u_l2.push(us);
        grad_sigma_l2.push(crate::grid::seminorms_from_spectrum(&grid, &sh, 1)[1]);
        lin_l2.push(linear_alignment_energy(&grid, kernel, eos, &uh, &l2_weight));
        lin_hs.push(linear_alignment_energy(&grid, kernel, eos, &uh, &hs_weight));
    }

    let times: Vec<f64> = records.iter().map(|r| r.time).collect();
    let margin = threshold_margin(eos, kernel);
    let inv_tau = eos.inv_tau();

    let e_l2: Vec<f64> = records.iter().map(|r| r.e_l2).collect();
    let de_l2 = time_derivative(&times, &e_l2)?;
    let n_l2 = u_l2.iter().zip(&grad_sigma_l2).map(|(a, b)| a + b).collect();
    let l2 = channel(&de_l2, &u_l2, &lin_l2, n_l2, margin, inv_tau);

    let e_hs: Vec<f64> = records.iter().map(|r| r.e_hs).collect();
    let de_hs = time_derivative(&times, &e_hs)?;
    let u_hs: Vec<f64> = records.iter().map(|r| r.u_diss).collect();
    let n_hs = records.iter().map(|r| r.u_diss + r.grad_sigma_diss).collect();
    let hs = channel(&de_hs, &u_hs, &lin_hs, n_hs, margin, inv_tau);

    let cross: Vec<f64> = records.iter().map(|r| r.cross).collect();
    let dcross = time_derivative(&times, &cross)?;
    let lhs: Vec<f64> = dcross
        .iter()
        .zip(&records)
        .map(|(d, r)| d + 0.25 * eos.kappa_bar * r.grad_sigma_diss)
        .collect();
    let c_u = sup_ratio(lhs.iter().copied(), &u_hs);

    Ok(DissipationAudit {
        times,
        records,
        l2,
        hs,
        cross: CrossAudit { lhs, c_u },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSeries {
    pub times: Vec<f64>,
    /// `L = e_hs + beta * cross`.
    pub values: Vec<f64>,
    /// `L / e_hs`, 1 where `e_hs = 0`.
    pub ratios: Vec<f64>,
    pub non_increasing: bool,
    /// Largest step-to-step increase of `L` (0 if none).
    pub max_increase: f64,
}

/// The composite functional along a trajectory. Fails with
/// [`Error::BetaTooLarge`] as soon as `|beta * cross| > e_hs / 2`, which would
/// break the equivalence `L / e_hs in [1/2, 3/2]`.
pub fn lyapunov_series(
    trajectory: &[SimState],
    eos: &EosParams,
    kernel: &Kernel,
    sobolev_s: usize,
    beta: f64,
) -> Result<LyapunovSeries> {
    let cfg = DiagnosticsConfig { sobolev_s, beta };
    cfg.validate()?;
    let mut times = Vec::with_capacity(trajectory.len());
    let mut values = Vec::with_capacity(trajectory.len());
    let mut ratios = Vec::with_capacity(trajectory.len());
    for state in trajectory {
        let r = energy_report(state, eos, kernel, &cfg)?;
        let lhs = (beta * r.cross).abs();
        let rhs = 0.5 * r.e_hs;
        if lhs > rhs {
            return Err(Error::BetaTooLarge {
                beta,
                time: r.time,
                lhs,
                rhs,
            });
        }
        times.push(r.time);
        values.push(r.lyapunov);
        ratios.push(if r.e_hs > 0.0 { r.lyapunov / r.e_hs } else { 1.0 });
    }
    let slack = MONOTONE_SLACK * values.first().copied().unwrap_or(0.0).abs();
    let max_increase = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(LyapunovSeries {
        times,
        values,
        ratios,
        non_increasing: max_increase <= slack,
        max_increase,
    })
}
