//! End-to-end acceptance checks on the reference problem and its variants.
//! Prints one PASS/FAIL line per criterion and fails if any criterion fails.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use euler_align::diagnostics::{
    dissipation_audit, lyapunov_series, sweep, threshold_margin, threshold_margin_max_entry,
    Classification, DiagnosticsRecord, SweepSample,
};
use euler_align::dynamics::{
    cfl_dt, integrate_fixed, rhs_primitive, rhs_symmetrized, run, Formulation, RunOutput,
    RunStatus, SchemeConfig, SimState, SpatialScheme,
};
use euler_align::eos::{rho_from_sigma, sigma_from_rho, EosParams};
use euler_align::grid::{lp_norm, Grid, ScalarField, VectorField};
use euler_align::io::{format_series, parse_config, write_series, RunConfig};
use euler_align::kernel::{
    alignment_force, ConvolutionMethod, Kernel, KernelKind, KernelSpec, Profile,
};
use euler_align::picard::{auto_t0, sup_l2_distance, PicardConfig};

const REFERENCE: &str = include_str!("../../../configs/reference.cfg");

fn reference() -> RunConfig {
    parse_config(REFERENCE).expect("reference config parses")
}

fn reference_kernel(cfg: &RunConfig) -> Kernel {
    Kernel::build(cfg.kernel, cfg.grid).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Young-monitor flags gathered from every run, for the final criterion.
#[derive(Default)]
struct YoungLog {
    runs: usize,
    failures: Vec<String>,
}

impl YoungLog {
    fn record(&mut self, label: &str, records: &[DiagnosticsRecord]) {
        self.runs += 1;
        if let Some(r) = records.iter().find(|r| !r.young_ok) {
            self.failures.push(format!("{label} at t = {}", r.time));
        }
    }
}

fn max_step_increase(records: &[DiagnosticsRecord]) -> f64 {
    records
        .windows(2)
        .map(|w| w[1].e_l2 - w[0].e_l2)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_field(grid: Grid, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ScalarField {
    let vals = (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect();
    ScalarField::new(grid, vals).unwrap()
}

fn c1_transform_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = Grid::new(1, 2.0 * PI, 64).unwrap();
    let rho_bar = 0.5;
    let mut worst = 0.0f64;
    for gamma in [1.5, 2.0, 3.0] {
        let eos = EosParams::new(1.0, gamma, rho_bar, 1.0, 0.4).unwrap();
        for _ in 0..1000 {
            let rho = random_field(grid, &mut rng, rho_bar / 2.0, 2.0 * rho_bar);
            let back = rho_from_sigma(&sigma_from_rho(&rho, &eos).unwrap(), &eos).unwrap();
            let err = back
                .values()
                .iter()
                .zip(rho.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / rho.max_abs();
            worst = worst.max(err);
        }
    }
    outcome(worst <= 1e-12, format!("3000 fields, worst relative error {worst:.2e}"))
}

fn c2_convolution_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for (dim, n) in [(1, 64), (2, 32)] {
        let grid = Grid::new(dim, 2.0 * PI, n).unwrap();
        for kind in [KernelKind::Isotropic, KernelKind::Projection] {
            for profile in [Profile::TopHat { radius: 0.7 }, Profile::Bump { radius: 1.1 }] {
                let kernel = Kernel::build(
                    KernelSpec {
                        kind,
                        profile,
                        amplitude: 1.3,
                    },
                    grid,
                )
                .unwrap();
                let comps = (0..dim).map(|_| random_field(grid, &mut rng, -1.0, 1.0)).collect();
                let f = VectorField::from_components(comps).unwrap();
                let fast = kernel.convolve(&f, ConvolutionMethod::Fast).unwrap();
                let direct = kernel.convolve(&f, ConvolutionMethod::Direct).unwrap();
                let mut diff = fast.clone();
                diff.add_scaled(-1.0, &direct);
                let rel = diff.magnitude().max_abs() / direct.magnitude().max_abs();
                worst = worst.max(rel);
            }
        }
    }
    outcome(worst <= 1e-10, format!("1D n=64 and 2D 32^2, both kinds, worst {worst:.2e}"))
}

fn c3_alignment_consensus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for (dim, n) in [(1, 128), (2, 32)] {
        let grid = Grid::new(dim, 2.0 * PI, n).unwrap();
        for kind in [KernelKind::Isotropic, KernelKind::Projection] {
            let kernel = Kernel::build(
                KernelSpec {
                    kind,
                    profile: Profile::TopHat { radius: 0.5 },
                    amplitude: 1.0,
                },
                grid,
            )
            .unwrap();
            let u = VectorField::constant(grid, [0.7, -1.3]);
            let w = random_field(grid, &mut rng, 0.1, 2.0);
            let f = alignment_force(&kernel, &u, &w, 1.0).unwrap();
            worst = worst.max(f.magnitude().max_abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |force| = {worst:.2e}"))
}

fn c4_equilibrium(young: &mut YoungLog) -> Outcome {
    let cfg = reference();
    let kernel = reference_kernel(&cfg);
    let mut rhs_max = 0.0f64;
    let mut drift = 0.0f64;
    let mut all_done = true;
    for form in [Formulation::Primitive, Formulation::Symmetrized] {
        let s = SimState::equilibrium(cfg.grid, form, &cfg.eos);
        let r = match form {
            Formulation::Primitive => rhs_primitive(&s, &cfg.eos, &kernel),
            Formulation::Symmetrized => rhs_symmetrized(&s, &cfg.eos, &kernel),
        }
        .unwrap();
        rhs_max = rhs_max
            .max(r.density_like.max_abs())
            .max(r.velocity.magnitude().max_abs());
        let scheme = SchemeConfig {
            t_end: 10.0,
            ..cfg.scheme
        };
        let out = run(&s, &cfg.eos, &kernel, &scheme, &cfg.diagnostics).unwrap();
        all_done &= out.status.is_completed();
        young.record("equilibrium", &out.records);
        let r0 = out.records[0];
        for r in &out.records {
            for (a, b) in [
                (r.e_l2, r0.e_l2),
                (r.e_hs, r0.e_hs),
                (r.u_diss, r0.u_diss),
                (r.grad_sigma_diss, r0.grad_sigma_diss),
                (r.cross, r0.cross),
                (r.lyapunov, r0.lyapunov),
                (r.mass, r0.mass),
                (r.max_grad_u, r0.max_grad_u),
            ] {
                drift = drift.max((a - b).abs());
            }
        }
    }
    outcome(
        rhs_max == 0.0 && drift <= 1e-12 && all_done,
        format!("max |rhs| = {rhs_max:.1e}, diagnostic drift over [0,10] = {drift:.1e}"),
    )
}

fn c5_energy_decay(young: &mut YoungLog) -> (Outcome, Option<RunOutput>) {
    let mut cfg = reference();
    cfg.scheme.snapshot_every = 1;
    let kernel = reference_kernel(&cfg);
    let margin = threshold_margin(&cfg.eos, &kernel);
    let init = cfg.initial_state().unwrap();
    let out = run(&init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics).unwrap();
    young.record("energy decay", &out.records);
    let e0 = out.records[0].e_l2;
    let e_end = out.records.last().unwrap().e_l2;
    let inc = max_step_increase(&out.records);
    let lyap = lyapunov_series(&out.trajectory, &cfg.eos, &kernel, cfg.diagnostics.sobolev_s, cfg.diagnostics.beta)
        .unwrap();
    let pass = (margin - 1.5).abs() < 1e-12
        && out.status.is_completed()
        && inc <= 1e-10
        && e_end <= 0.01 * e0
        && lyap.non_increasing;
    let detail = format!(
        "margin {margin:.3}, {} steps, e_l2(5)/e_l2(0) = {:.3e}, max step increase {inc:.2e}, lyapunov non-increasing {}",
        out.steps,
        e_end / e0,
        lyap.non_increasing
    );
    (outcome(pass, detail), Some(out))
}

fn two_mode_state(grid: Grid, eps: f64) -> SimState {
    let sigma = ScalarField::from_fn(grid, |x| eps * (x[0].cos() + 0.7 * (2.0 * x[0] + 0.3).sin()));
    let u = VectorField::from_fn(grid, |x| [eps * (x[0].cos() + 0.5 * (3.0 * x[0]).cos()), 0.0]);
    SimState::new(Formulation::Symmetrized, sigma, u, 0.0).unwrap()
}

fn c6_residual_linearity(young: &mut YoungLog) -> Outcome {
    let mut cfg = reference();
    // the audit differentiates the trajectory in time, so keep every step
    cfg.scheme.snapshot_every = 1;
    let kernel = reference_kernel(&cfg);
    let s = cfg.diagnostics.sobolev_s;
    let c_delta = |init: &SimState, young: &mut YoungLog| -> f64 {
        let out = run(init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics).unwrap();
        young.record("residual audit", &out.records);
        dissipation_audit(&out.trajectory, &cfg.eos, &kernel, s).unwrap().l2.c_delta
    };
    let eps = 1e-2;
    let multi = [two_mode_state(cfg.grid, eps), two_mode_state(cfg.grid, eps / 2.0)];
    let (m0, m1) = (c_delta(&multi[0], young), c_delta(&multi[1], young));
    let half = m1 / m0;

    let single = |e: f64| {
        let mut c = cfg.clone();
        c.initial.perturbation = euler_align::io::Perturbation::SingleMode { mode: 1, amplitude: e };
        c.initial_state().unwrap()
    };
    let (s0, s1) = (c_delta(&single(eps), young), c_delta(&single(eps / 2.0), young));
    outcome(
        (0.4..=0.6).contains(&half),
        format!(
            "two-mode data: C_delta {m0:.3e} -> {m1:.3e}, ratio {half:.3}; single-mode: {s0:.3e} -> {s1:.3e}, ratio {:.3}",
            s1 / s0
        ),
    )
}

fn c7_cross_formulation(young: &mut YoungLog) -> Outcome {
    let mut cfg = reference();
    let kernel = reference_kernel(&cfg);
    cfg.scheme.t_end = 0.5;
    cfg.scheme.dt_max = 1e-3;
    cfg.scheme.snapshot_every = 1;
    let mut runs = Vec::new();
    let mut admissible = true;
    for form in [Formulation::Primitive, Formulation::Symmetrized] {
        cfg.initial.formulation = form;
        let init = cfg.initial_state().unwrap();
        let out = run(&init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics).unwrap();
        young.record("cross formulation", &out.records);
        admissible &= out.status.is_completed()
            && out.trajectory.iter().all(|s| s.check_admissible(&cfg.eos).is_ok());
        runs.push(out);
    }
    let mut worst = 0.0f64;
    let same_mesh = runs[0].trajectory.len() == runs[1].trajectory.len();
    for (a, b) in runs[0].trajectory.iter().zip(&runs[1].trajectory) {
        let ra = a.rho(&cfg.eos).unwrap();
        let rb = b.rho(&cfg.eos).unwrap();
        let d = ra.values().iter().zip(rb.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    outcome(
        worst <= 1e-6 && admissible && same_mesh,
        format!("{} steps each, max |rho_prim - rho_sym| = {worst:.2e}, admissible {admissible}", runs[0].steps),
    )
}

fn c8_picard() -> Outcome {
    let cfg = reference();
    let kernel = reference_kernel(&cfg);
    let init = cfg.initial_state().unwrap();
    let dt = cfl_dt(&init, &cfg.eos, &cfg.scheme).unwrap();
    let mut base = PicardConfig::new(0.0, dt, 8);
    base.sobolev_s = cfg.diagnostics.sobolev_s;
    let Some((used, out)) = auto_t0(&init, &cfg.eos, &kernel, &base, cfg.scheme.t_end, 0.5).unwrap()
    else {
        return outcome(false, "no contracting horizon found".into());
    };
    let steps = used.steps().unwrap();
    let direct = integrate_fixed(&init, &cfg.eos, &kernel, &cfg.scheme, dt, steps).unwrap();
    let gap = sup_l2_distance(&out.last().states, &direct).unwrap();
    let r = &out.report;
    let max_ratio = r.max_ratio_from(2);
    let d8 = r.d(8);
    outcome(
        max_ratio <= 0.5 && gap <= 10.0 * d8,
        format!(
            "T0 = {:.3} ({steps} steps), max ratio (k>=2) {max_ratio:.3e}, d_8 = {d8:.2e}, gap to nonlinear run {gap:.2e}",
            used.t0
        ),
    )
}

fn c9_temporal_order() -> Outcome {
    let grid = Grid::new(1, 2.0 * PI, 64).unwrap();
    let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, 0.4).unwrap();
    let kernel = Kernel::build(
        KernelSpec {
            kind: KernelKind::Isotropic,
            profile: Profile::TopHat { radius: 0.25 },
            amplitude: 1.0,
        },
        grid,
    )
    .unwrap();
    let init = two_mode_state(grid, 0.2);
    let scheme = SchemeConfig::default();
    let horizon = 1.0;
    let end = |dt: f64| -> SimState {
        let steps = (horizon / dt).round() as usize;
        integrate_fixed(&init, &eos, &kernel, &scheme, dt, steps).unwrap().pop().unwrap()
    };
    let reference = end(0.02 / 16.0);
    let err = |s: &SimState| {
        let mut d = s.density_like.clone();
        d.add_scaled(-1.0, &reference.density_like);
        let mut v = s.velocity.clone();
        v.add_scaled(-1.0, &reference.velocity);
        (lp_norm(&d, 2.0).unwrap().powi(2) + lp_norm(&v, 2.0).unwrap().powi(2)).sqrt()
    };
    let errors: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| err(&end(dt))).collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        min >= 2.9,
        format!("errors {:.2e} {:.2e} {:.2e}, observed orders {:.3} {:.3}", errors[0], errors[1], errors[2], orders[0], orders[1]),
    )
}

fn c10_mass(young: &mut YoungLog) -> Outcome {
    let mut cfg = reference();
    cfg.initial.formulation = Formulation::Primitive;
    let kernel = reference_kernel(&cfg);
    let init = cfg.initial_state().unwrap();
    let out = run(&init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics).unwrap();
    young.record("mass", &out.records);
    let m0 = out.records[0].mass;
    let worst = out.records.iter().map(|r| ((r.mass - m0) / m0).abs()).fold(0.0, f64::max);
    outcome(
        worst <= 1e-10 && out.status.is_completed(),
        format!("{} steps, max relative mass drift {worst:.2e}", out.steps),
    )
}

fn c11_sweep(young: &mut YoungLog) -> Outcome {
    let cfg = reference();
    let kernel = reference_kernel(&cfg);
    let log = Mutex::new(Vec::new());
    let values = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let rows = sweep(&values, 3, |a_sym| {
        let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, a_sym, 0.4)?;
        let init = cfg.initial_state()?;
        let output = run(&init, &eos, &kernel, &cfg.scheme, &cfg.diagnostics)?;
        log.lock().unwrap().push((a_sym, output.records.clone()));
        Ok(SweepSample {
            margin: threshold_margin(&eos, &kernel),
            margin_max_entry: threshold_margin_max_entry(&eos, &kernel),
            output,
        })
    });
    for (v, records) in log.into_inner().unwrap() {
        young.record(&format!("sweep a_sym = {v}"), &records);
    }
    let bad = rows
        .iter()
        .filter(|r| r.margin > 0.0 && r.classification != Classification::Decay)
        .count();
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{:+.1}:{}:{:.3}", r.value, r.margin, r.classification.name(), r.decay_rate))
        .collect();
    let changes = rows.windows(2).any(|w| w[0].classification != w[1].classification);
    outcome(
        bad == 0 && rows.len() == values.len(),
        format!(
            "a_sym:margin:class:rate {}; classification {}",
            table.join(" "),
            if changes { "changes" } else { "unchanged, all decay" }
        ),
    )
}

fn fv_max_slope(s: &SimState) -> f64 {
    let u = s.velocity.component(0).values();
    let n = u.len();
    let h = s.grid().spacing();
    (0..n).map(|i| ((u[(i + 1) % n] - u[i]) / h).abs()).fold(0.0, f64::max)
}

fn c12_shock_formation() -> Outcome {
    let n = 1024;
    let grid = Grid::new(1, 2.0 * PI, n).unwrap();
    let eos = EosParams::with_symmetrized_alignment(1.0, 2.0, 0.5, 1.0, f64::INFINITY).unwrap();
    let kernel = Kernel::build(
        KernelSpec {
            kind: KernelKind::Isotropic,
            profile: Profile::TopHat { radius: 0.25 },
            amplitude: 0.0,
        },
        grid,
    )
    .unwrap();
    let init = SimState::new(
        Formulation::Primitive,
        ScalarField::constant(grid, eos.rho_bar),
        VectorField::from_fn(grid, |x| [-0.5 * x[0].sin(), 0.0]),
        0.0,
    )
    .unwrap();
    let diag = euler_align::diagnostics::DiagnosticsConfig::for_dim(1);
    let fv_cfg = SchemeConfig {
        spatial: SpatialScheme::LlfFv,
        t_end: 3.0,
        snapshot_every: 1,
        ..SchemeConfig::default()
    };
    let fv = run(&init, &eos, &kernel, &fv_cfg, &diag).unwrap();
    let s0 = fv_max_slope(&fv.trajectory[0]);
    let growth = fv
        .trajectory
        .iter()
        .filter(|s| s.time < 3.0)
        .map(fv_max_slope)
        .fold(0.0, f64::max)
        / s0;
    let spectral_cfg = SchemeConfig {
        t_end: 3.0,
        ..SchemeConfig::default()
    };
    let sp = run(&init, &eos, &kernel, &spectral_cfg, &diag).unwrap();
    let fired = match sp.status {
        RunStatus::BlowUp { time, .. } => Some(time),
        _ => None,
    };
    outcome(
        growth >= 10.0 && fired.is_some_and(|t| t < 3.0),
        format!(
            "n = {n}, finite-volume slope growth {growth:.2}x before t = 3; spectral detector: {}",
            sp.status.describe()
        ),
    )
}

fn c13_young(young: &YoungLog) -> Outcome {
    outcome(
        young.failures.is_empty() && young.runs > 0,
        format!("{} runs monitored, failures: {:?}", young.runs, young.failures),
    )
}

fn c14_determinism(first: Option<RunOutput>) -> Outcome {
    let cfg = reference();
    let kernel = reference_kernel(&cfg);
    let again = || {
        let init = cfg.initial_state().unwrap();
        run(&init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics).unwrap()
    };
    let a = first.unwrap_or_else(again);
    let b = again();
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_series(&pa, &a.records).unwrap();
    write_series(&pb, &b.records).unwrap();
    let (ba, bb) = (std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    outcome(
        ba == bb && format_series(&a.records) == format_series(&b.records),
        format!("{} rows, {} bytes, identical {}", a.records.len(), ba.len(), ba == bb),
    )
}

#[test]
fn acceptance_suite() {
    let mut young = YoungLog::default();
    let mut lines = Vec::new();
    let mut timed = |id: u32, name: &str, budget: Option<f64>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > Duration::from_secs_f64(b) {
                o.pass = false;
                o.detail.push_str(&format!(" [over budget {b} s]"));
            }
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let line = format!("[{tag}] {id:>2} {name}: {} ({:.2} s)", o.detail, elapsed.as_secs_f64());
        println!("{line}");
        lines.push((o.pass, line));
    };

    timed(1, "transform round trip", Some(1.0), &mut c1_transform_round_trip);
    timed(2, "convolution oracle", Some(5.0), &mut c2_convolution_oracle);
    timed(3, "alignment consensus", None, &mut c3_alignment_consensus);
    timed(4, "equilibrium fixed point", None, &mut || c4_equilibrium(&mut young));
    let mut reference_run = None;
    timed(5, "energy decay", Some(10.0), &mut || {
        let (o, out) = c5_energy_decay(&mut young);
        reference_run = out;
        o
    });
    timed(6, "residual linearity", None, &mut || c6_residual_linearity(&mut young));
    timed(7, "cross-formulation equivalence", None, &mut || c7_cross_formulation(&mut young));
    timed(8, "picard contraction", Some(60.0), &mut c8_picard);
    timed(9, "temporal order", None, &mut c9_temporal_order);
    timed(10, "mass conservation", None, &mut || c10_mass(&mut young));
    timed(11, "threshold sweep", Some(120.0), &mut || c11_sweep(&mut young));
    timed(12, "shock formation", None, &mut c12_shock_formation);
    timed(13, "young monitor", None, &mut || c13_young(&young));
    timed(14, "determinism", None, &mut || c14_determinism(reference_run.take()));

    let failed: Vec<&String> = lines.iter().filter(|(p, _)| !p).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}
