use std::f64::consts::PI;

use euler_align::diagnostics::{time_derivative, DiagnosticsConfig};
use euler_align::dynamics::{
    rhs_primitive, rhs_symmetrized, run, Formulation, SchemeConfig, SimState,
};
use euler_align::eos::{sound_speed, EosParams};
use euler_align::grid::{Grid, ScalarField, VectorField};
use euler_align::kernel::{alignment_force, Kernel, KernelKind, KernelSpec, Profile};

const RADIUS: f64 = 0.25;

fn top_hat(grid: Grid, kind: KernelKind, radius: f64) -> Kernel {
    Kernel::build(
        KernelSpec {
            kind,
            profile: Profile::TopHat { radius },
            amplitude: 1.0,
        },
        grid,
    )
    .unwrap()
}

fn max_abs_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Closed-form right-hand side for `rho = rho_bar + e cos x`, `u = e sin x`
/// with `p = rho^2` and the continuous top-hat kernel, whose action on
/// `exp(ikx)` is multiplication by `2 sin(kR) / k`.
fn analytic_rhs(grid: Grid, eos: &EosParams, e: f64) -> (ScalarField, ScalarField) {
    let (rb, a, tau, r) = (eos.rho_bar, eos.alignment, eos.tau, RADIUS);
    let drho = ScalarField::from_fn(grid, |x| -(rb * e * x[0].cos() + e * e * (2.0 * x[0]).cos()));
    let du = ScalarField::from_fn(grid, |x| {
        let x = x[0];
        let u = e * x.sin();
        let g_rho = 2.0 * r * rb + 2.0 * r.sin() * e * x.cos();
        let g_urho = 2.0 * r.sin() * rb * e * x.sin() + 0.5 * e * e * (2.0 * r).sin() * (2.0 * x).sin();
        -0.5 * e * e * (2.0 * x).sin() + 2.0 * e * x.sin() - u / tau - a * (u * g_rho - g_urho)
    });
    (drho, du)
}

#[test]
fn primitive_rhs_converges_to_closed_form() {
    let eos = EosParams::new(1.0, 2.0, 0.5, 1.5, 0.4).unwrap();
    let e = 0.1;
    let mut errors = Vec::new();
    for n in [64, 128, 256, 512] {
        let grid = Grid::new(1, 2.0 * PI, n).unwrap();
        let k = top_hat(grid, KernelKind::Isotropic, RADIUS);
        let s = SimState::new(
            Formulation::Primitive,
            ScalarField::from_fn(grid, |x| eos.rho_bar + e * x[0].cos()),
            VectorField::from_fn(grid, |x| [e * x[0].sin(), 0.0]),
            0.0,
        )
        .unwrap();
        let r = rhs_primitive(&s, &eos, &k).unwrap();
        let (drho, du) = analytic_rhs(grid, &eos, e);
        // mass and pressure terms are spectrally exact
        assert!(max_abs_diff(&r.density_like, &drho) < 1e-13);
        let h = grid.spacing();
        errors.push((max_abs_diff(r.velocity.component(0), &du), h));
    }
    // what is left is the kernel quadrature, which is second order with an
    // oscillating constant (where the support edge falls inside a cell)
    for (err, h) in &errors {
        assert!(*err <= 5e-3 * h * h, "{errors:?}");
    }
    assert!(errors[3].0 < errors[0].0 / 50.0, "{errors:?}");
}

#[test]
fn formulations_agree_on_the_time_derivative() {
    for (dim, n) in [(1, 128), (2, 32)] {
        let grid = Grid::new(dim, 2.0 * PI, n).unwrap();
        let eos = EosParams::new(1.0, 1.4, 0.8, 0.7, 0.5).unwrap();
        let k = top_hat(grid, KernelKind::Projection, 0.6);
        let rho = ScalarField::from_fn(grid, |x| 0.8 + 0.05 * x[0].cos() + 0.03 * (x[1] - x[0]).sin());
        let u = VectorField::from_fn(grid, |x| [0.04 * x[1].sin() + 0.02, -0.03 * (2.0 * x[0]).cos()]);
        let prim = SimState::new(Formulation::Primitive, rho.clone(), u.clone(), 0.0).unwrap();
        let sym = prim.to_form(Formulation::Symmetrized, &eos).unwrap();
        let dp = rhs_primitive(&prim, &eos, &k).unwrap();
        let ds = rhs_symmetrized(&sym, &eos, &k).unwrap();
        // d sigma / dt = (kappa / rho) d rho / dt
        let kappa = sound_speed(&rho, &eos).unwrap();
        let chain = ScalarField::new(
            grid,
            dp.density_like
                .values()
                .iter()
                .zip(kappa.values().iter().zip(rho.values()))
                .map(|(d, (c, r))| c / r * d)
                .collect(),
        )
        .unwrap();
        assert!(max_abs_diff(&chain, &ds.density_like) < 1e-8);
        for i in 0..dim {
            assert!(max_abs_diff(dp.velocity.component(i), ds.velocity.component(i)) < 1e-8);
        }
    }
}

#[test]
fn momentum_budget_closes() {
    let grid = Grid::new(1, 2.0 * PI, 128).unwrap();
    let eos = EosParams::new(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
    let k = top_hat(grid, KernelKind::Isotropic, RADIUS);
    let init = SimState::new(
        Formulation::Primitive,
        ScalarField::from_fn(grid, |x| 0.5 + 0.02 * x[0].cos()),
        VectorField::from_fn(grid, |x| [0.1 + 0.02 * (x[0] + 0.4).sin(), 0.0]),
        0.0,
    )
    .unwrap();
    let cfg = SchemeConfig {
        t_end: 1.0,
        dt_max: 2e-3,
        snapshot_every: 1,
        ..SchemeConfig::default()
    };
    let out = run(&init, &eos, &k, &cfg, &DiagnosticsConfig::for_dim(1)).unwrap();
    let h = grid.cell_volume();
    let momentum = |s: &SimState| -> f64 {
        s.density_like
            .values()
            .iter()
            .zip(s.velocity.component(0).values())
            .map(|(r, u)| r * u * h)
            .sum()
    };
    let times: Vec<f64> = out.trajectory.iter().map(|s| s.time).collect();
    let p: Vec<f64> = out.trajectory.iter().map(momentum).collect();
    let dp = time_derivative(&times, &p).unwrap();
    let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for (s, (pi, dpi)) in out.trajectory.iter().zip(p.iter().zip(&dp)) {
        let f = alignment_force(&k, &s.velocity, &s.density_like, eos.alignment).unwrap();
        let align: f64 = s
            .density_like
            .values()
            .iter()
            .zip(f.component(0).values())
            .map(|(r, fi)| r * fi * h)
            .sum();
        worst = worst.max((dpi - (-pi / eos.tau + align)).abs());
    }
    assert!(worst / scale <= 1e-6, "relative budget residual {}", worst / scale);
}

#[test]
fn two_dimensional_small_data_decays() {
    let grid = Grid::new(2, 2.0 * PI, 32).unwrap();
    let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
    let k = top_hat(grid, KernelKind::Projection, 0.5);
    let init = SimState::new(
        Formulation::Primitive,
        ScalarField::from_fn(grid, |x| 0.5 + 0.005 * (x[0] + x[1]).cos()),
        VectorField::from_fn(grid, |x| [0.01 * x[1].sin(), 0.01 * (x[0] - 0.2).cos()]),
        0.0,
    )
    .unwrap();
    let cfg = SchemeConfig {
        t_end: 1.0,
        ..SchemeConfig::default()
    };
    let out = run(&init, &eos, &k, &cfg, &DiagnosticsConfig::for_dim(2)).unwrap();
    assert!(out.status.is_completed());
    let r = &out.records;
    assert!(r.windows(2).all(|w| w[1].e_l2 <= w[0].e_l2 + 1e-10));
    assert!(r.last().unwrap().e_l2 < 0.5 * r[0].e_l2);
    let m0 = r[0].mass;
    assert!(r.iter().all(|x| ((x.mass - m0) / m0).abs() < 1e-12));
    assert!(r.iter().all(|x| x.young_ok));
}
