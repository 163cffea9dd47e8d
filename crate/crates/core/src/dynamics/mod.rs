//! Right-hand sides, time stepping and the simulation driver.

mod fv;
mod integrate;
mod rhs;
mod run;

pub use fv::{rhs_conservative, ConservedState};
pub use integrate::{step_ssprk3, RkState};
pub use rhs::{rhs_primitive, rhs_symmetrized};
pub use run::{advance, cfl_dt, integrate_fixed, run, RunOutput, RunStatus};

use crate::eos::{self, EosParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// `(rho, u)`.
    Primitive,
    /// `(sigma, u)` with `sigma = nu (kappa(rho) - kappa_bar)`.
    Symmetrized,
}

impl Formulation {
    pub fn name(&self) -> &'static str {
        match self {
            Formulation::Primitive => "primitive",
            Formulation::Symmetrized => "symmetrized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "primitive" => Some(Formulation::Primitive),
            "symmetrized" => Some(Formulation::Symmetrized),
            _ => None,
        }
    }
}

/// State at one time instant. Time derivatives returned by the right-hand
/// side functions use the same type, with `time` left at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub form: Formulation,
    /// `rho` for the primitive form, `sigma` for the symmetrized form.
    pub density_like: ScalarField,
    pub velocity: VectorField,
    pub time: f64,
}

impl SimState {
    pub fn new(
        form: Formulation,
        density_like: ScalarField,
        velocity: VectorField,
        time: f64,
    ) -> Result<Self> {
        if density_like.grid() != velocity.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            form,
            density_like,
            velocity,
            time,
        })
    }

    /// Background state `(rho_bar, 0)` / `(0, 0)`.
    pub fn equilibrium(grid: Grid, form: Formulation, eos: &EosParams) -> Self {
        let density_like = match form {
            Formulation::Primitive => ScalarField::constant(grid, eos.rho_bar),
            Formulation::Symmetrized => ScalarField::zeros(grid),
        };
        Self {
            form,
            density_like,
            velocity: VectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.density_like.grid()
    }

    /// Positivity of `rho` (primitive) or of `sigma/nu + kappa_bar` (symmetrized).
    pub fn check_admissible(&self, eos: &EosParams) -> Result<()> {
        match self.form {
            Formulation::Primitive => eos::sound_speed(&self.density_like, eos).map(|_| ()),
            Formulation::Symmetrized => eos::check_sigma(&self.density_like, eos),
        }
    }

    pub fn sigma(&self, eos: &EosParams) -> Result<ScalarField> {
        match self.form {
            Formulation::Primitive => eos::sigma_from_rho(&self.density_like, eos),
            Formulation::Symmetrized => Ok(self.density_like.clone()),
        }
    }

    pub fn rho(&self, eos: &EosParams) -> Result<ScalarField> {
        match self.form {
            Formulation::Primitive => Ok(self.density_like.clone()),
            Formulation::Symmetrized => eos::rho_from_sigma(&self.density_like, eos),
        }
    }

    /// Local sound speed `kappa`.
    pub fn sound_speed(&self, eos: &EosParams) -> Result<ScalarField> {
        match self.form {
            Formulation::Primitive => eos::sound_speed(&self.density_like, eos),
            Formulation::Symmetrized => {
                eos::check_sigma(&self.density_like, eos)?;
                Ok(self.density_like.map(|s| eos.kappa_of_sigma(s)))
            }
        }
    }

    pub fn to_form(&self, form: Formulation, eos: &EosParams) -> Result<Self> {
        let density_like = match form {
            Formulation::Primitive => self.rho(eos)?,
            Formulation::Symmetrized => self.sigma(eos)?,
        };
        Ok(Self {
            form,
            density_like,
            velocity: self.velocity.clone(),
            time: self.time,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.density_like.all_finite() && self.velocity.all_finite()
    }
}

impl RkState for SimState {
    fn time(&self) -> f64 {
        self.time
    }

    fn add_scaled(&mut self, dt: f64, rate: &Self) {
        self.density_like.add_scaled(dt, &rate.density_like);
        self.velocity.add_scaled(dt, &rate.velocity);
        self.time += dt;
    }

    fn blend(&mut self, keep: f64, other: &Self, weight: f64) {
        self.density_like.blend(keep, &other.density_like, weight);
        self.velocity.blend(keep, &other.velocity, weight);
        self.time = keep * self.time + weight * other.time;
    }

    fn is_finite(&self) -> bool {
        self.all_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialScheme {
    /// Fourier pseudo-spectral collocation.
    Spectral,
    /// First-order finite volume with the local Lax-Friedrichs (Rusanov)
    /// flux on `(rho, rho u)`.
    LlfFv,
}

impl SpatialScheme {
    pub fn name(&self) -> &'static str {
        match self {
            SpatialScheme::Spectral => "spectral",
            SpatialScheme::LlfFv => "llf_fv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub spatial: SpatialScheme,
    /// 2/3-rule filter after every stage; spectral scheme only.
    pub dealias: bool,
    pub cfl: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Keep every `snapshot_every`-th step in the trajectory (plus the last).
    pub snapshot_every: usize,
    /// Abort when `max |grad u|` exceeds this multiple of the initial gradient scale.
    pub blowup_factor: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            spatial: SpatialScheme::Spectral,
            dealias: true,
            cfl: 0.4,
            dt_max: 0.1,
            t_end: 1.0,
            snapshot_every: 1,
            blowup_factor: 100.0,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            problems.push(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            problems.push(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            problems.push(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if self.snapshot_every == 0 {
            problems.push("snapshot_every must be at least 1".into());
        }
        if !(self.blowup_factor > 1.0) {
            problems.push(format!(
                "blowup_factor must exceed 1, got {}",
                self.blowup_factor
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }
}
