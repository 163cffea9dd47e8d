use crate::diagnostics::{energy_report, max_velocity_gradient, DiagnosticsConfig, DiagnosticsRecord};
use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::grid::{dealias, spectral_grad};
use crate::kernel::Kernel;

use super::fv::{rhs_conservative, ConservedState};
use super::integrate::step_ssprk3;
use super::rhs::{rhs_primitive, rhs_symmetrized};
use super::{Formulation, SchemeConfig, SimState, SpatialScheme};

/// Floor for the gradient scale used by the blow-up detector, so that
/// gradient-free initial data still has a finite threshold.
const GRADIENT_SCALE_FLOOR: f64 = 1e-10;

/// `min(dt_max, cfl * h / max(|u| + kappa))`.
pub fn cfl_dt(s: &SimState, eos: &EosParams, cfg: &SchemeConfig) -> Result<f64> {
    let kappa = s.sound_speed(eos)?;
    let speed = s.velocity.magnitude();
    let mut wave = 0.0f64;
    for (index, (a, b)) in speed.values().iter().zip(kappa.values()).enumerate() {
        let v = a + b;
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { index });
        }
        wave = wave.max(v);
    }
    let h = s.grid().spacing();
    if wave == 0.0 {
        return Ok(cfg.dt_max);
    }
    Ok((cfg.cfl * h / wave).min(cfg.dt_max))
}

fn dealias_state(s: &mut SimState) {
    dealias(&mut s.density_like);
    for i in 0..s.velocity.dim() {
        dealias(s.velocity.component_mut(i));
    }
}

/// One SSP-RK3 step of the configured spatial scheme. Finite-volume steps are
/// taken in conservative variables and mapped back to the state's formulation.
pub fn advance(
    s: &SimState,
    dt: f64,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &SchemeConfig,
) -> Result<SimState> {
    match cfg.spatial {
        SpatialScheme::Spectral => {
            let rhs = |_: usize, x: &SimState| match x.form {
                Formulation::Primitive => rhs_primitive(x, eos, kernel),
                Formulation::Symmetrized => rhs_symmetrized(x, eos, kernel),
            };
            if cfg.dealias {
                step_ssprk3(s, dt, rhs, dealias_state)
            } else {
                step_ssprk3(s, dt, rhs, |_| {})
            }
        }
        SpatialScheme::LlfFv => {
            let c = ConservedState::from_state(s, eos)?;
            let next = step_ssprk3(&c, dt, |_, x| rhs_conservative(x, eos, kernel), |_| {})?;
            next.to_primitive().to_form(s.form, eos)
        }
    }
}

/// `steps` steps of fixed size `dt`; returns all `steps + 1` states.
pub fn integrate_fixed(
    initial: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &SchemeConfig,
    dt: f64,
    steps: usize,
) -> Result<Vec<SimState>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial.clone());
    for step in 0..steps {
        let next = advance(&out[step], dt, eos, kernel, cfg)?;
        if !next.all_finite() {
            return Err(Error::NonFiniteValue { index: step + 1 });
        }
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Density (or `sigma / nu + kappa_bar`) reached the vacuum floor.
    Vacuum { time: f64, detail: String },
    NonFinite { step: usize, time: f64 },
    /// `max |grad u|` exceeded `blowup_factor` times the initial gradient scale.
    BlowUp {
        time: f64,
        max_grad_u: f64,
        threshold: f64,
    },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn describe(&self) -> String {
        match self {
            RunStatus::Completed => "completed".into(),
            RunStatus::Vacuum { time, detail } => format!("vacuum at t = {time}: {detail}"),
            RunStatus::NonFinite { step, time } => {
                format!("non-finite values at step {step} (t = {time})")
            }
            RunStatus::BlowUp {
                time,
                max_grad_u,
                threshold,
            } => format!(
                "gradient blow-up at t = {time}: max |grad u| = {max_grad_u} exceeds {threshold}"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: RunStatus,
    /// Initial state, every `snapshot_every`-th step and the final state.
    pub trajectory: Vec<SimState>,
    /// One record per step, starting with the initial state.
    pub records: Vec<DiagnosticsRecord>,
    pub steps: usize,
}

/// Initial gradient scale `max(||grad u||_inf, ||grad sigma||_inf)`.
fn gradient_scale(s: &SimState, eos: &EosParams) -> Result<f64> {
    let sigma = s.sigma(eos)?;
    let gs = spectral_grad(&sigma);
    let gs_max = gs.magnitude().max_abs();
    Ok(max_velocity_gradient(&s.velocity)
        .max(gs_max)
        .max(GRADIENT_SCALE_FLOOR))
}

fn as_status(e: Error, time: f64, step: usize) -> Result<RunStatus> {
    match e {
        Error::Vacuum { .. } | Error::NonPositiveWeight { .. } => Ok(RunStatus::Vacuum {
            time,
            detail: e.to_string(),
        }),
        Error::NonFiniteValue { .. } => Ok(RunStatus::NonFinite { step, time }),
        other => Err(other),
    }
}

/// Integrates from `initial` to `cfg.t_end` with CFL-limited steps, recording
/// diagnostics after every step. Vacuum, non-finite values and gradient
/// blow-up end the run early with the corresponding status.
pub fn run(
    initial: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &SchemeConfig,
    diag: &DiagnosticsConfig,
) -> Result<RunOutput> {
    cfg.validate()?;
    diag.validate()?;
    initial.check_admissible(eos)?;
    let threshold = cfg.blowup_factor * gradient_scale(initial, eos)?;
    let t_end = initial.time + cfg.t_end;
    let tiny = 1e-12 * cfg.t_end.max(1.0);

    let mut state = initial.clone();
    let mut trajectory = vec![state.clone()];
    let mut records = vec![energy_report(&state, eos, kernel, diag)?];
    let mut steps = 0usize;
    let mut status = RunStatus::Completed;

    while state.time < t_end - tiny {
        let dt = match cfl_dt(&state, eos, cfg) {
            Ok(dt) => dt.min(t_end - state.time),
            Err(e) => {
                status = as_status(e, state.time, steps)?;
                break;
            }
        };
        let next = match advance(&state, dt, eos, kernel, cfg) {
            Ok(n) => n,
            Err(e) => {
                status = as_status(e, state.time, steps + 1)?;
                break;
            }
        };
        steps += 1;
        if !next.all_finite() {
            status = RunStatus::NonFinite {
                step: steps,
                time: next.time,
            };
            break;
        }
        let record = match energy_report(&next, eos, kernel, diag) {
            Ok(r) => r,
            Err(e) => {
                status = as_status(e, next.time, steps)?;
                break;
            }
        };
        records.push(record);
        state = next;
        let blown = record.max_grad_u > threshold;
        if blown || steps % cfg.snapshot_every == 0 {
            trajectory.push(state.clone());
        }
        if blown {
            status = RunStatus::BlowUp {
                time: state.time,
                max_grad_u: record.max_grad_u,
                threshold,
            };
            break;
        }
    }
    if trajectory.last().map(|s| s.time) != Some(state.time) {
        trajectory.push(state);
    }
    Ok(RunOutput {
        status,
        trajectory,
        records,
        steps,
    })
}
