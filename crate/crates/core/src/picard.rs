//! Successive approximations: each iterate solves the linear system obtained
//! by freezing the transport, pressure and alignment coefficients at the
//! previous iterate, from the same initial data.

use crate::diagnostics::time_derivative;
use crate::dynamics::{step_ssprk3, Formulation, SimState};
use crate::eos::{self, EosParams};
use crate::error::{Error, Result};
use crate::grid::{
    dealias, inner_product, lp_norm, sobolev_norm_sq, spectral_div, spectral_grad, ScalarField,
    VectorField,
};
use crate::kernel::{alignment_force, Kernel};

/// How the frozen coefficients are evaluated at the Runge-Kutta stage times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSampling {
    /// Stage `s` of step `n` uses the previous iterate's own stage-`s` state
    /// of step `n`. The fixed point is then exactly the nonlinear RK3 run.
    StageAligned,
    /// Linear interpolation in time between the previous iterate's mesh states.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub t0: f64,
    pub dt: f64,
    /// Number of iterations after the zeroth approximation.
    pub iterations: usize,
    /// Monitor threshold for `sup_t (||sigma||_{H^s} + ||u||_{H^s})`; `None`
    /// uses `(||sigma_0||^2_{H^s} + ||u_0||^2_{H^s} + 1)^{1/2}`.
    pub m_bound: Option<f64>,
    pub sampling: CoefficientSampling,
    pub sobolev_s: usize,
    pub dealias: bool,
}

impl PicardConfig {
    pub fn new(t0: f64, dt: f64, iterations: usize) -> Self {
        Self {
            t0,
            dt,
            iterations,
            m_bound: None,
            sampling: CoefficientSampling::StageAligned,
            sobolev_s: 2,
            dealias: true,
        }
    }

    /// Number of steps of size `dt` covering `[0, t0]`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need t0 >= 0 and dt > 0, got t0 = {}, dt = {}",
                self.t0, self.dt
            )));
        }
        let steps = (self.t0 / self.dt).round();
        if (steps * self.dt - self.t0).abs() > 1e-9 * self.t0.max(self.dt) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} does not divide t0 = {}",
                self.dt, self.t0
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        if self.iterations < 2 {
            return Err(Error::InvalidParameter(format!(
                "at least 2 iterations needed, got {}",
                self.iterations
            )));
        }
        if let Some(m) = self.m_bound {
            if !(m > 0.0) {
                return Err(Error::InvalidParameter(format!("m_bound must be positive, got {m}")));
            }
        }
        Ok(())
    }
}

/// One iterate on the fixed time mesh `t_n = n dt`, with the two interior
/// Runge-Kutta stage states of every step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrajectory {
    pub index: usize,
    pub states: Vec<SimState>,
    pub stages: Vec<[SimState; 2]>,
}

impl IterateTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// `sup_t (||sigma||_{H^s} + ||u||_{H^s})`.
    pub fn sup_hs(&self, s: usize) -> Result<f64> {
        let mut sup = 0.0f64;
        for st in &self.states {
            let v = sobolev_norm_sq(&st.density_like, s)?.sqrt()
                + sobolev_norm_sq(&st.velocity, s)?.sqrt();
            sup = sup.max(v);
        }
        Ok(sup)
    }

    fn coefficient(&self, step: usize, stage: usize, sampling: CoefficientSampling) -> SimState {
        match (sampling, stage) {
            (_, 0) => self.states[step].clone(),
            (CoefficientSampling::StageAligned, s) => self.stages[step][s - 1].clone(),
            (CoefficientSampling::Linear, 1) => self.states[step + 1].clone(),
            (CoefficientSampling::Linear, _) => {
                let mut c = self.states[step].clone();
                c.density_like.blend(0.5, &self.states[step + 1].density_like, 0.5);
                c.velocity.blend(0.5, &self.states[step + 1].velocity, 0.5);
                c
            }
        }
    }
}

fn symmetrized(init: &SimState, eos: &EosParams) -> Result<SimState> {
    let mut s = init.to_form(Formulation::Symmetrized, eos)?;
    s.time = 0.0;
    s.check_admissible(eos)?;
    Ok(s)
}

/// The constant-in-time trajectory equal to the initial data.
pub fn picard_zeroth(init: &SimState, eos: &EosParams, cfg: &PicardConfig) -> Result<IterateTrajectory> {
    let steps = cfg.steps()?;
    let s0 = symmetrized(init, eos)?;
    let states = (0..=steps)
        .map(|n| {
            let mut s = s0.clone();
            s.time = n as f64 * cfg.dt;
            s
        })
        .collect();
    let stages = (0..steps)
        .map(|n| {
            let mut a = s0.clone();
            a.time = (n as f64 + 1.0) * cfg.dt;
            let mut b = s0.clone();
            b.time = (n as f64 + 0.5) * cfg.dt;
            [a, b]
        })
        .collect();
    Ok(IterateTrajectory {
        index: 0,
        states,
        stages,
    })
}

/// Right-hand side of the linear system for `v = (sigma', u')` with frozen
/// coefficients `c = (sigma^k, u^k)`:
///
/// ```text
/// sigma'_t = -kappa_bar div u' - u^k.grad sigma' - (1/nu) sigma^k div u'
/// u'_t     = -kappa_bar grad sigma' - u'/tau - (u^k.grad) u' - (1/nu) sigma^k grad sigma'
///            - a_sym integral Gamma(x-y) (u^k(x) - u^k(y)) w(sigma^k(y)) dy
/// ```
pub fn rhs_linearized(
    coef: &SimState,
    v: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
) -> Result<SimState> {
    let grid = *v.grid();
    let dim = grid.dim();
    let len = grid.len();
    let sc = coef.density_like.values();
    let uc = &coef.velocity;
    let w = eos::alignment_weight(&coef.density_like, eos)?;
    let align = alignment_force(kernel, uc, &w, eos.alignment_sym)?;

    let gs = spectral_grad(&v.density_like);
    let div = spectral_div(&v.velocity);
    let grads: Vec<VectorField> = v.velocity.components().iter().map(spectral_grad).collect();
    let kbar = eos.kappa_bar;
    let inv_nu = 1.0 / eos.nu;
    let inv_tau = eos.inv_tau();

    let dsigma = (0..len)
        .map(|q| {
            let adv: f64 = (0..dim)
                .map(|j| uc.component(j).values()[q] * gs.component(j).values()[q])
                .sum();
            let d = div.values()[q];
            -kbar * d - adv - inv_nu * sc[q] * d
        })
        .collect();
    let du = (0..dim)
        .map(|i| {
            let vals = (0..len)
                .map(|q| {
                    let adv: f64 = (0..dim)
                        .map(|j| uc.component(j).values()[q] * grads[i].component(j).values()[q])
                        .sum();
                    let g = gs.component(i).values()[q];
                    -kbar * g - inv_tau * v.velocity.component(i).values()[q] - adv
                        - inv_nu * sc[q] * g
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

fn dealias_state(s: &mut SimState) {
    dealias(&mut s.density_like);
    for i in 0..s.velocity.dim() {
        dealias(s.velocity.component_mut(i));
    }
}

/// The next iterate, integrated with SSP-RK3 on the mesh of `prev`.
pub fn picard_iterate(
    prev: &IterateTrajectory,
    init: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &PicardConfig,
) -> Result<IterateTrajectory> {
    let steps = cfg.steps()?;
    if prev.states.len() != steps + 1 || prev.stages.len() != steps {
        return Err(Error::MeshMismatch);
    }
    let mut state = symmetrized(init, eos)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut stages = Vec::with_capacity(steps);
    states.push(state.clone());
    for n in 0..steps {
        let mut captured: Vec<SimState> = Vec::with_capacity(2);
        let rhs = |stage: usize, x: &SimState| {
            if stage > 0 {
                captured.push(x.clone());
            }
            let c = prev.coefficient(n, stage, cfg.sampling);
            rhs_linearized(&c, x, eos, kernel)
        };
        let mut next = if cfg.dealias {
            step_ssprk3(&state, cfg.dt, rhs, dealias_state)?
        } else {
            step_ssprk3(&state, cfg.dt, rhs, |_| {})?
        };
        if !next.all_finite() {
            return Err(Error::NonFiniteValue { index: n + 1 });
        }
        // pin the mesh time so that all iterates share it bit for bit
        next.time = (n + 1) as f64 * cfg.dt;
        let b = captured.pop().expect("stage 2 state");
        let a = captured.pop().expect("stage 1 state");
        stages.push([a, b]);
        states.push(next.clone());
        state = next;
    }
    Ok(IterateTrajectory {
        index: prev.index + 1,
        states,
        stages,
    })
}

/// `sup_t (||sigma_a - sigma_b||_{L^2} + ||u_a - u_b||_{L^2})` over a shared mesh.
pub fn sup_l2_distance(a: &[SimState], b: &[SimState]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MeshMismatch);
    }
    let mut sup = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let ds = x.density_like.zip_map(&y.density_like, |p, q| p - q);
        let mut du = x.velocity.clone();
        du.add_scaled(-1.0, &y.velocity);
        sup = sup.max(lp_norm(&ds, 2.0)? + lp_norm(&du, 2.0)?);
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub t0: f64,
    pub steps: usize,
    /// `d_k = sup_t ||iterate_k - iterate_{k-1}||` for `k = 1..=K`; `d[0]` is `d_1`.
    pub differences: Vec<f64>,
    /// `d_{k+1} / d_k` for `k = 1..K`; `ratios[0]` is `d_2 / d_1`.
    pub ratios: Vec<f64>,
    /// Two consecutive ratios above 1.
    pub non_contraction: bool,
    pub m_bound: f64,
    /// `sup_t (||sigma||_{H^s} + ||u||_{H^s})` per iterate, zeroth included.
    pub sup_hs: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ContractionReport {
    /// `d_k`, 1-based.
    pub fn d(&self, k: usize) -> f64 {
        self.differences[k - 1]
    }

    /// `d_{k+1} / d_k`, 1-based.
    pub fn ratio(&self, k: usize) -> f64 {
        self.ratios[k - 1]
    }

    /// Largest `d_{k+1} / d_k` over `k >= from`.
    pub fn max_ratio_from(&self, from: usize) -> f64 {
        self.ratios
            .iter()
            .skip(from.saturating_sub(1))
            .copied()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutput {
    pub iterates: Vec<IterateTrajectory>,
    pub report: ContractionReport,
}

impl PicardOutput {
    pub fn last(&self) -> &IterateTrajectory {
        self.iterates.last().expect("zeroth iterate is always present")
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// The zeroth approximation followed by `cfg.iterations` linear solves.
pub fn picard_run(
    init: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    cfg: &PicardConfig,
) -> Result<PicardOutput> {
    cfg.validate()?;
    let s = cfg.sobolev_s;
    let s0 = symmetrized(init, eos)?;
    let m_bound = match cfg.m_bound {
        Some(m) => m,
        None => (sobolev_norm_sq(&s0.density_like, s)? + sobolev_norm_sq(&s0.velocity, s)? + 1.0)
            .sqrt(),
    };
    let mut iterates = vec![picard_zeroth(&s0, eos, cfg)?];
    let mut sup_hs = vec![iterates[0].sup_hs(s)?];
    let mut differences = Vec::with_capacity(cfg.iterations);
    let mut warnings = Vec::new();
    for _ in 0..cfg.iterations {
        let prev = iterates.last().expect("nonempty");
        let next = picard_iterate(prev, &s0, eos, kernel, cfg)?;
        let bound = next.sup_hs(s)?;
        if bound > m_bound {
            warnings.push(format!(
                "iterate {}: sup H^{s} norm {bound:.6e} exceeds bound {m_bound:.6e}",
                next.index
            ));
        }
        differences.push(sup_l2_distance(&next.states, &prev.states)?);
        sup_hs.push(bound);
        iterates.push(next);
    }
    let ratios: Vec<f64> = differences.windows(2).map(|w| ratio(w[1], w[0])).collect();
    let non_contraction = ratios.windows(2).any(|w| w[0] > 1.0 && w[1] > 1.0);
    Ok(PicardOutput {
        report: ContractionReport {
            t0: cfg.t0,
            steps: cfg.steps()?,
            differences,
            ratios,
            non_contraction,
            m_bound,
            sup_hs,
            warnings,
        },
        iterates,
    })
}

/// Largest horizon `T0 = m dt <= t_max` (searched by bisection on `m`) for
/// which every ratio `d_{k+1}/d_k` with `k >= 2` is at most `max_ratio`.
/// Returns the configuration and its run; `None` if even one step fails.
pub fn auto_t0(
    init: &SimState,
    eos: &EosParams,
    kernel: &Kernel,
    base: &PicardConfig,
    t_max: f64,
    max_ratio: f64,
) -> Result<Option<(PicardConfig, PicardOutput)>> {
    let probe = PicardConfig { t0: base.dt, ..*base };
    probe.validate()?;
    let hi_steps = (t_max / base.dt).floor() as usize;
    let attempt = |m: usize| -> Result<(PicardConfig, PicardOutput, bool)> {
        let cfg = PicardConfig {
            t0: m as f64 * base.dt,
            ..*base
        };
        let out = picard_run(init, eos, kernel, &cfg)?;
        let ok = out.report.max_ratio_from(2) <= max_ratio;
        Ok((cfg, out, ok))
    };
    let (c, o, ok) = attempt(hi_steps.max(1))?;
    if ok {
        return Ok(Some((c, o)));
    }
    let mut best = None;
    let (mut lo, mut hi) = (0usize, hi_steps.max(1));
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let (c, o, ok) = attempt(mid)?;
        if ok {
            lo = mid;
            best = Some((c, o));
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Terms of the `L^2` energy balance of one iterate at a mesh time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub time: f64,
    /// `1/2 d/dt (||sigma'||^2 + ||u'||^2) + (1/tau) ||u'||^2`, by finite differences.
    pub lhs: f64,
    /// `-integral (u^k.grad sigma') sigma' + ((u^k.grad) u').u'`.
    pub i1: f64,
    /// `-(1/nu) integral sigma^k (div u') sigma' + sigma^k grad sigma'.u'`.
    pub i2: f64,
    /// `-a_sym integral u'(x) . integral Gamma(x-y)(u^k(x)-u^k(y)) w^k(y) dy dx`.
    pub i3: f64,
}

impl EnergyBalance {
    pub fn rhs(&self) -> f64 {
        self.i1 + self.i2 + self.i3
    }
}

/// Both sides of the energy identity of `next`, whose coefficients are the
/// mesh states of `prev`.
pub fn energy_balance(
    prev: &IterateTrajectory,
    next: &IterateTrajectory,
    eos: &EosParams,
    kernel: &Kernel,
) -> Result<Vec<EnergyBalance>> {
    if prev.states.len() != next.states.len() {
        return Err(Error::MeshMismatch);
    }
    let times = next.times();
    let energy: Vec<f64> = next
        .states
        .iter()
        .map(|s| {
            inner_product(&s.density_like, &s.density_like)
                + s.velocity
                    .components()
                    .iter()
                    .map(|c| inner_product(c, c))
                    .sum::<f64>()
        })
        .collect();
    let de = time_derivative(&times, &energy)?;
    let inv_nu = 1.0 / eos.nu;
    let mut out = Vec::with_capacity(times.len());
    for (n, (c, v)) in prev.states.iter().zip(&next.states).enumerate() {
        let dim = v.grid().dim();
        let sigma = &v.density_like;
        let u = &v.velocity;
        let gs = spectral_grad(sigma);
        let div = spectral_div(u);
        let grads: Vec<VectorField> = u.components().iter().map(spectral_grad).collect();
        let mut i1 = 0.0;
        let mut i2 = 0.0;
        for q in 0..v.grid().len() {
            let sq = sigma.values()[q];
            let cq = c.density_like.values()[q];
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 0..dim {
                let ucj = c.velocity.component(j).values()[q];
                a += ucj * gs.component(j).values()[q] * sq;
                for i in 0..dim {
                    a += ucj * grads[i].component(j).values()[q] * u.component(i).values()[q];
                }
                b += cq * gs.component(j).values()[q] * u.component(j).values()[q];
            }
            b += cq * div.values()[q] * sq;
            i1 -= a;
            i2 -= inv_nu * b;
        }
        let h = v.grid().cell_volume();
        let w = eos::alignment_weight(&c.density_like, eos)?;
        let align = alignment_force(kernel, &c.velocity, &w, eos.alignment_sym)?;
        let i3: f64 = (0..dim)
            .map(|i| inner_product(u.component(i), align.component(i)))
            .sum();
        let u2: f64 = u.components().iter().map(|x| inner_product(x, x)).sum();
        out.push(EnergyBalance {
            time: times[n],
            lhs: 0.5 * de[n] + eos.inv_tau() * u2,
            i1: i1 * h,
            i2: i2 * h,
            i3,
        });
    }
    Ok(out)
}
