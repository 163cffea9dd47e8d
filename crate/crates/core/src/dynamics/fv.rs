//! First-order finite volume on the conservative variables `(rho, m = rho u)`
//! with the local Lax-Friedrichs flux. The alignment and damping terms enter
//! as cell-centred sources.

use crate::eos::{EosParams, VACUUM_FLOOR};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};
use crate::kernel::{alignment_force, Kernel};

use super::{Formulation, RkState, SimState};

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedState {
    pub rho: ScalarField,
    pub momentum: VectorField,
    pub time: f64,
}

impl ConservedState {
    pub fn from_state(s: &SimState, eos: &EosParams) -> Result<Self> {
        let rho = s.rho(eos)?;
        let momentum = VectorField::from_raw(
            *rho.grid(),
            s.velocity
                .components()
                .iter()
                .map(|c| c.zip_map(&rho, |a, b| a * b))
                .collect(),
        );
        Ok(Self {
            rho,
            momentum,
            time: s.time,
        })
    }

    pub fn velocity(&self) -> VectorField {
        VectorField::from_raw(
            *self.rho.grid(),
            self.momentum
                .components()
                .iter()
                .map(|c| c.zip_map(&self.rho, |m, r| m / r))
                .collect(),
        )
    }

    pub fn to_primitive(&self) -> SimState {
        SimState {
            form: Formulation::Primitive,
            density_like: self.rho.clone(),
            velocity: self.velocity(),
            time: self.time,
        }
    }
}

impl RkState for ConservedState {
    fn time(&self) -> f64 {
        self.time
    }

    fn add_scaled(&mut self, dt: f64, rate: &Self) {
        self.rho.add_scaled(dt, &rate.rho);
        self.momentum.add_scaled(dt, &rate.momentum);
        self.time += dt;
    }

    fn blend(&mut self, keep: f64, other: &Self, weight: f64) {
        self.rho.blend(keep, &other.rho, weight);
        self.momentum.blend(keep, &other.momentum, weight);
        self.time = keep * self.time + weight * other.time;
    }

    fn is_finite(&self) -> bool {
        self.rho.all_finite() && self.momentum.all_finite()
    }
}

fn neighbour(grid: &Grid, p: usize, axis: usize) -> usize {
    let n = grid.points();
    let [i, j] = grid.axis_indices(p);
    match (grid.dim(), axis) {
        (1, _) => (i + 1) % n,
        (_, 0) => ((i + 1) % n) * n + j,
        _ => i * n + (j + 1) % n,
    }
}

/// Time derivative of the conserved variables.
pub fn rhs_conservative(
    s: &ConservedState,
    eos: &EosParams,
    kernel: &Kernel,
) -> Result<ConservedState> {
    let grid = *s.rho.grid();
    let dim = grid.dim();
    let len = grid.len();
    let rho = s.rho.values();
    if let Some(index) = rho.iter().position(|&r| !(r > VACUUM_FLOOR)) {
        return Err(Error::Vacuum {
            quantity: "rho",
            index,
            value: rho[index],
        });
    }
    let m: Vec<&[f64]> = s.momentum.components().iter().map(|c| c.values()).collect();
    let u: Vec<Vec<f64>> = m
        .iter()
        .map(|mi| mi.iter().zip(rho).map(|(a, r)| a / r).collect())
        .collect();
    let p: Vec<f64> = rho.iter().map(|&r| eos.pressure_at(r)).collect();
    let c: Vec<f64> = rho.iter().map(|&r| eos.sound_speed_at(r)).collect();

    let inv_h = 1.0 / grid.spacing();
    let mut drho = vec![0.0; len];
    let mut dm = vec![vec![0.0; len]; dim];
    let mut flux_m = vec![0.0; dim];
    for axis in 0..dim {
        for left in 0..len {
            let right = neighbour(&grid, left, axis);
            let ul = u[axis][left];
            let ur = u[axis][right];
            let alpha = (ul.abs() + c[left]).max(ur.abs() + c[right]);
            let flux_rho = 0.5 * (m[axis][left] + m[axis][right]) - 0.5 * alpha * (rho[right] - rho[left]);
            for (i, f) in flux_m.iter_mut().enumerate() {
                let mut fl = m[i][left] * ul;
                let mut fr = m[i][right] * ur;
                if i == axis {
                    fl += p[left];
                    fr += p[right];
                }
                *f = 0.5 * (fl + fr) - 0.5 * alpha * (m[i][right] - m[i][left]);
            }
            drho[left] -= flux_rho * inv_h;
            drho[right] += flux_rho * inv_h;
            for i in 0..dim {
                dm[i][left] -= flux_m[i] * inv_h;
                dm[i][right] += flux_m[i] * inv_h;
            }
        }
    }

    let velocity = s.velocity();
    let align = alignment_force(kernel, &velocity, &s.rho, eos.alignment)?;
    let inv_tau = eos.inv_tau();
    for i in 0..dim {
        for q in 0..len {
            dm[i][q] += -inv_tau * m[i][q] + rho[q] * align.component(i).values()[q];
        }
    }

    Ok(ConservedState {
        rho: ScalarField::from_raw(grid, drho),
        momentum: VectorField::from_raw(
            grid,
            dm.into_iter().map(|v| ScalarField::from_raw(grid, v)).collect(),
        ),
        time: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::kernel::{KernelKind, KernelSpec, Profile};

    fn setup(dim: usize) -> (Grid, EosParams, Kernel) {
        let g = Grid::new(dim, 2.0 * PI, 32).unwrap();
        let eos = EosParams::new(1.0, 2.0, 0.5, 2.0, 0.4).unwrap();
        let k = Kernel::build(
            KernelSpec {
                kind: KernelKind::Projection,
                profile: Profile::TopHat { radius: 0.5 },
                amplitude: 1.0,
            },
            g,
        )
        .unwrap();
        (g, eos, k)
    }

    #[test]
    fn flux_form_conserves_mass_exactly() {
        for dim in [1, 2] {
            let (g, eos, k) = setup(dim);
            let s = SimState::new(
                Formulation::Primitive,
                ScalarField::from_fn(g, |x| 0.5 + 0.2 * (x[0] + x[1]).sin()),
                VectorField::from_fn(g, |x| [0.3 * x[0].cos(), -0.1 * x[1].sin()]),
                0.0,
            )
            .unwrap();
            let cs = ConservedState::from_state(&s, &eos).unwrap();
            let r = rhs_conservative(&cs, &eos, &k).unwrap();
            assert!(r.rho.values().iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_state_feels_only_damping() {
        let (g, eos, k) = setup(2);
        let s = SimState::new(
            Formulation::Primitive,
            ScalarField::constant(g, 0.5),
            VectorField::constant(g, [0.2, -0.1]),
            0.0,
        )
        .unwrap();
        let cs = ConservedState::from_state(&s, &eos).unwrap();
        let r = rhs_conservative(&cs, &eos, &k).unwrap();
        assert!(r.rho.max_abs() < 1e-14);
        for (i, c) in [0.2, -0.1].iter().enumerate() {
            for v in r.momentum.component(i).values() {
                assert!((v + 0.5 * c / eos.tau).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn round_trip_through_conserved_variables() {
        let (g, eos, _) = setup(1);
        let s = SimState::new(
            Formulation::Primitive,
            ScalarField::from_fn(g, |x| 0.5 + 0.1 * x[0].cos()),
            VectorField::from_fn(g, |x| [x[0].sin(), 0.0]),
            0.25,
        )
        .unwrap();
        let back = ConservedState::from_state(&s, &eos).unwrap().to_primitive();
        for (a, b) in back
            .velocity
            .component(0)
            .values()
            .iter()
            .zip(s.velocity.component(0).values())
        {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(back.time, 0.25);
    }
}
