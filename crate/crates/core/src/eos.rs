//! Polytropic pressure law and the sound-speed change of variables
//! `(rho, u) <-> (sigma, u)` with `sigma = nu (kappa(rho) - kappa_bar)`.

use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Densities and sound speeds at or below this value are treated as vacuum.
pub const VACUUM_FLOOR: f64 = 1e-12;

/// Smallest admissible adiabatic exponent; the isothermal case is excluded.
pub const MIN_GAMMA: f64 = 1.0 + 1e-6;

/// Model constants of the damped Euler-alignment system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    /// Pressure constant `A` in `P = A rho^gamma`.
    pub pressure_constant: f64,
    pub gamma: f64,
    /// `2 / (gamma - 1)`.
    pub nu: f64,
    pub rho_bar: f64,
    /// Background sound speed `kappa(rho_bar)`.
    pub kappa_bar: f64,
    /// Alignment strength `a` of the momentum equation.
    pub alignment: f64,
    /// Damping time; `f64::INFINITY` switches damping off.
    pub tau: f64,
    /// Alignment coefficient of the velocity equation in sound-speed
    /// variables, `a (A gamma)^{-1/(gamma-1)}`. Chosen so that
    /// `alignment_sym * (sigma/nu + kappa_bar)^nu == alignment * rho`.
    pub alignment_sym: f64,
}

impl EosParams {
    pub fn new(
        pressure_constant: f64,
        gamma: f64,
        rho_bar: f64,
        alignment: f64,
        tau: f64,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if !(pressure_constant.is_finite() && pressure_constant > 0.0) {
            problems.push(format!("A must be positive, got {pressure_constant}"));
        }
        if !(gamma.is_finite() && gamma >= MIN_GAMMA) {
            problems.push(format!("gamma must exceed 1, got {gamma}"));
        }
        if !(rho_bar.is_finite() && rho_bar > 0.0) {
            problems.push(format!("rho_bar must be positive, got {rho_bar}"));
        }
        if !(alignment.is_finite() && alignment >= 0.0) {
            problems.push(format!("a must be nonnegative, got {alignment}"));
        }
        if !(tau > 0.0) {
            problems.push(format!("tau must be positive, got {tau}"));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidParameter(problems.join("; ")));
        }
        let nu = 2.0 / (gamma - 1.0);
        let kappa_bar = (pressure_constant * gamma).sqrt() * rho_bar.powf((gamma - 1.0) / 2.0);
        let alignment_sym = alignment * Self::density_factor(pressure_constant, gamma);
        Ok(Self {
            pressure_constant,
            gamma,
            nu,
            rho_bar,
            kappa_bar,
            alignment,
            tau,
            alignment_sym,
        })
    }

    /// Same as [`EosParams::new`] but with the symmetrized alignment
    /// coefficient given directly.
    pub fn with_symmetrized_alignment(
        pressure_constant: f64,
        gamma: f64,
        rho_bar: f64,
        alignment_sym: f64,
        tau: f64,
    ) -> Result<Self> {
        let a = alignment_sym / Self::density_factor(pressure_constant, gamma);
        let mut p = Self::new(pressure_constant, gamma, rho_bar, a, tau)?;
        p.alignment_sym = alignment_sym;
        Ok(p)
    }

    /// `(A gamma)^{-1/(gamma-1)}`, the factor in `rho = factor * (sigma/nu + kappa_bar)^nu`.
    fn density_factor(pressure_constant: f64, gamma: f64) -> f64 {
        (pressure_constant * gamma).powf(-1.0 / (gamma - 1.0))
    }

    pub fn inv_tau(&self) -> f64 {
        if self.tau.is_infinite() {
            0.0
        } else {
            1.0 / self.tau
        }
    }

    pub fn pressure_at(&self, rho: f64) -> f64 {
        self.pressure_constant * rho.powf(self.gamma)
    }

    pub fn sound_speed_at(&self, rho: f64) -> f64 {
        (self.pressure_constant * self.gamma).sqrt() * rho.powf((self.gamma - 1.0) / 2.0)
    }

    pub fn sigma_at(&self, rho: f64) -> f64 {
        self.nu * (self.sound_speed_at(rho) - self.kappa_bar)
    }

    /// Sound speed in symmetrized variables, `sigma/nu + kappa_bar`.
    pub fn kappa_of_sigma(&self, sigma: f64) -> f64 {
        sigma / self.nu + self.kappa_bar
    }

    pub fn rho_at_sigma(&self, sigma: f64) -> f64 {
        let k = self.kappa_of_sigma(sigma);
        (k * k / (self.pressure_constant * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn weight_at_sigma(&self, sigma: f64) -> f64 {
        self.kappa_of_sigma(sigma).powf(self.nu)
    }
}

fn check_density(rho: &ScalarField) -> Result<()> {
    match rho.values().iter().position(|&r| !(r > VACUUM_FLOOR)) {
        Some(index) => Err(Error::Vacuum {
            quantity: "rho",
            index,
            value: rho.values()[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_sigma(sigma: &ScalarField, p: &EosParams) -> Result<()> {
    match sigma
        .values()
        .iter()
        .position(|&s| !(p.kappa_of_sigma(s) > VACUUM_FLOOR))
    {
        Some(index) => Err(Error::Vacuum {
            quantity: "sigma/nu + kappa_bar",
            index,
            value: p.kappa_of_sigma(sigma.values()[index]),
        }),
        None => Ok(()),
    }
}

pub fn pressure(rho: &ScalarField, p: &EosParams) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|r| p.pressure_at(r)))
}

pub fn sound_speed(rho: &ScalarField, p: &EosParams) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|r| p.sound_speed_at(r)))
}

pub fn sigma_from_rho(rho: &ScalarField, p: &EosParams) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|r| p.sigma_at(r)))
}

pub fn rho_from_sigma(sigma: &ScalarField, p: &EosParams) -> Result<ScalarField> {
    check_sigma(sigma, p)?;
    Ok(sigma.map(|s| p.rho_at_sigma(s)))
}

/// `(sigma/nu + kappa_bar)^nu`, the density weight of the alignment integral
/// in sound-speed variables.
pub fn alignment_weight(sigma: &ScalarField, p: &EosParams) -> Result<ScalarField> {
    check_sigma(sigma, p)?;
    Ok(sigma.map(|s| p.weight_at_sigma(s)))
}
