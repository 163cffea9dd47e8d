//! Matrix-valued influence kernels, periodic convolution and the nonlocal
//! alignment force.
//!
//! A kernel is either isotropic, `phi(|x|) I`, or a projection,
//! `phi(|x|) (x/|x|) (x/|x|)^T`. The radial profile is stored as cell averages
//! of the periodized `phi`, so the quadrature integral of a top-hat kernel in
//! 1D equals `2 R` exactly. At the origin the undefined projection direction
//! is replaced by its angular average, `phi(0)/dim * I`.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid, ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Isotropic,
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    TopHat { radius: f64 },
    /// Smooth compactly supported bump, `exp(1 - 1/(1 - (r/R)^2))`.
    Bump { radius: f64 },
    /// `exp(-rate r)` truncated at `cutoff`.
    Exponential { rate: f64, cutoff: f64 },
}

impl Profile {
    pub fn support_radius(&self) -> f64 {
        match *self {
            Profile::TopHat { radius } | Profile::Bump { radius } => radius,
            Profile::Exponential { cutoff, .. } => cutoff,
        }
    }

    fn value(&self, r: f64) -> f64 {
        match *self {
            Profile::TopHat { radius } => {
                if r < radius {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Bump { radius } => {
                let q = r / radius;
                if q < 1.0 {
                    (1.0 - 1.0 / (1.0 - q * q)).exp()
                } else {
                    0.0
                }
            }
            Profile::Exponential { rate, cutoff } => {
                if r < cutoff {
                    (-rate * r).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub profile: Profile,
    pub amplitude: f64,
}

impl KernelSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let r = self.profile.support_radius();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "support radius must be positive, got {r}"
            )));
        }
        if r >= grid.length() / 2.0 {
            return Err(Error::InvalidKernel(format!(
                "support radius {r} must be below half the torus length {}",
                grid.length() / 2.0
            )));
        }
        if let Profile::Exponential { rate, .. } = self.profile {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidKernel(format!(
                    "exponential rate must be nonnegative, got {rate}"
                )));
            }
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::InvalidKernel(format!(
                "amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMethod {
    /// O(N^2) double sum over grid points.
    Direct,
    /// Product of discrete Fourier transforms.
    Fast,
}

/// Discrete kernel on a grid, immutable after construction.
#[derive(Debug, Clone)]
pub struct Kernel {
    grid: Grid,
    spec: KernelSpec,
    /// `dim x dim` entries, row-major, each sampled at signed offsets.
    entries: Vec<Vec<f64>>,
    /// `h^dim * DFT(entry)`, the symbol of discrete convolution.
    symbols: Vec<Vec<Complex64>>,
    l1_norm: f64,
    l1_norm_max_entry: f64,
}

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL8_NODES
        .iter()
        .zip(GL8_WEIGHTS)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Average of the periodized profile over the 1D cell centred at `xc`.
fn cell_average_1d(profile: &Profile, xc: f64, h: f64, length: f64) -> f64 {
    let r = profile.support_radius();
    let mut total = 0.0;
    for m in [-1.0, 0.0, 1.0] {
        let a = (xc - 0.5 * h + m * length).max(-r);
        let b = (xc + 0.5 * h + m * length).min(r);
        if b <= a {
            continue;
        }
        // split at the apex so each piece is smooth
        let f = |z: f64| profile.value(z.abs());
        if a < 0.0 && b > 0.0 {
            total += gauss_legendre(a, 0.0, f) + gauss_legendre(0.0, b, f);
        } else {
            total += gauss_legendre(a, b, f);
        }
    }
    total / h
}

/// Average of the periodized profile over the 2D cell centred at `c`, by
/// 2x2 subcells with an 8x8 Gauss-Legendre rule each.
fn cell_average_2d(profile: &Profile, c: [f64; 2], h: f64, length: f64) -> f64 {
    let r = profile.support_radius();
    let mut total = 0.0;
    for mx in [-1.0, 0.0, 1.0] {
        for my in [-1.0, 0.0, 1.0] {
            let cx = c[0] + mx * length;
            let cy = c[1] + my * length;
            let dx = (cx.abs() - 0.5 * h).max(0.0);
            let dy = (cy.abs() - 0.5 * h).max(0.0);
            if dx * dx + dy * dy >= r * r {
                continue;
            }
            for sx in 0..2 {
                for sy in 0..2 {
                    let x0 = cx - 0.5 * h + sx as f64 * 0.5 * h;
                    let y0 = cy - 0.5 * h + sy as f64 * 0.5 * h;
                    let hx = 0.25 * h;
                    for (xi, wx) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
                        let x = x0 + hx * (1.0 + xi);
                        for (yi, wy) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
                            let y = y0 + hx * (1.0 + yi);
                            total += wx * wy * hx * hx * profile.value((x * x + y * y).sqrt());
                        }
                    }
                }
            }
        }
    }
    total / (h * h)
}

/// Spectral norm of the symmetric 2x2 matrix `[[a, b], [b, c]]`.
pub(crate) fn sym2_norm(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean + rad).abs().max((mean - rad).abs())
}

/// Signed offset of a storage slot along one axis, in `[-L/2, L/2)`.
fn offset(grid: &Grid, j: usize) -> f64 {
    grid.mode(j) as f64 * grid.spacing()
}

impl Kernel {
    pub fn build(spec: KernelSpec, grid: Grid) -> Result<Self> {
        spec.validate(&grid)?;
        let dim = grid.dim();
        let h = grid.spacing();
        let len = grid.len();
        let mut entries = vec![vec![0.0; len]; dim * dim];
        for p in 0..len {
            let [i, j] = grid.axis_indices(p);
            let x = [offset(&grid, i), if dim == 2 { offset(&grid, j) } else { 0.0 }];
            let phi = spec.amplitude
                * if dim == 1 {
                    cell_average_1d(&spec.profile, x[0], h, grid.length())
                } else {
                    cell_average_2d(&spec.profile, x, h, grid.length())
                };
            if phi == 0.0 {
                continue;
            }
            match spec.kind {
                KernelKind::Isotropic => {
                    for d in 0..dim {
                        entries[d * dim + d][p] = phi;
                    }
                }
                KernelKind::Projection => {
                    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                    if r == 0.0 {
                        for d in 0..dim {
                            entries[d * dim + d][p] = phi / dim as f64;
                        }
                    } else {
                        let e = [x[0] / r, x[1] / r];
                        for a in 0..dim {
                            for b in 0..dim {
                                entries[a * dim + b][p] = phi * e[a.min(b)] * e[a.max(b)];
                            }
                        }
                    }
                }
            }
        }
        let w = grid.cell_volume();
        let symbols = entries
            .iter()
            .map(|e| fft::forward(&grid, e).into_iter().map(|c| c * w).collect())
            .collect();
        let mut kernel = Self {
            grid,
            spec,
            entries,
            symbols,
            l1_norm: 0.0,
            l1_norm_max_entry: 0.0,
        };
        kernel.l1_norm = kernel.compute_l1_norm();
        kernel.l1_norm_max_entry = kernel.compute_l1_norm_max_entry();
        Ok(kernel)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Samples of `Gamma_ij` at signed offsets, in grid storage order.
    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        &self.entries[i * self.dim() + j]
    }

    pub(crate) fn symbol(&self, i: usize, j: usize) -> &[Complex64] {
        &self.symbols[i * self.dim() + j]
    }

    /// Matrix at one offset slot.
    pub fn matrix_at(&self, p: usize) -> [[f64; 2]; 2] {
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate().take(self.dim()) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim()) {
                *v = self.entry(i, j)[p];
            }
        }
        m
    }

    fn pointwise_norm(&self, p: usize) -> f64 {
        let m = self.matrix_at(p);
        if self.dim() == 1 {
            m[0][0].abs()
        } else {
            sym2_norm(m[0][0], m[0][1], m[1][1])
        }
    }

    fn compute_l1_norm(&self) -> f64 {
        (0..self.grid.len()).map(|p| self.pointwise_norm(p)).sum::<f64>() * self.grid.cell_volume()
    }

    fn compute_l1_norm_max_entry(&self) -> f64 {
        (0..self.grid.len())
            .map(|p| self.entries.iter().fold(0.0, |m: f64, e| m.max(e[p].abs())))
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// `integral ||Gamma(x)||_2 dx` with the pointwise spectral norm.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Same integral with the largest absolute entry as the matrix norm.
    pub fn l1_norm_max_entry(&self) -> f64 {
        self.l1_norm_max_entry
    }

    /// Recomputes the spectral-norm `L^1` integral from the stored entries.
    pub fn recompute_l1_norm(&self) -> f64 {
        self.compute_l1_norm()
    }

    /// `integral Gamma_ij dx`, row-major.
    pub fn integral(&self) -> [[f64; 2]; 2] {
        let mut m = [[0.0; 2]; 2];
        let w = self.grid.cell_volume();
        for (i, row) in m.iter_mut().enumerate().take(self.dim()) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim()) {
                *v = self.entry(i, j).iter().sum::<f64>() * w;
            }
        }
        m
    }

    fn check_grid(&self, g: &Grid) -> Result<()> {
        if *g != self.grid {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }

    /// Flat slot of the offset `p - q` (periodic).
    fn offset_slot(&self, p: usize, q: usize) -> usize {
        let n = self.grid.points();
        let [pi, pj] = self.grid.axis_indices(p);
        let [qi, qj] = self.grid.axis_indices(q);
        let di = (pi + n - qi) % n;
        if self.dim() == 1 {
            di
        } else {
            di * n + (pj + n - qj) % n
        }
    }

    fn convolve_entry_direct(&self, i: usize, j: usize, f: &[f64]) -> Vec<f64> {
        let e = self.entry(i, j);
        let w = self.grid.cell_volume();
        let len = self.grid.len();
        (0..len)
            .map(|p| {
                (0..len)
                    .map(|q| e[self.offset_slot(p, q)] * f[q])
                    .sum::<f64>()
                    * w
            })
            .collect()
    }

    /// `Gamma * f` componentwise: `result_i = sum_j Gamma_ij * f_j`.
    pub fn convolve(&self, f: &VectorField, method: ConvolutionMethod) -> Result<VectorField> {
        self.check_grid(f.grid())?;
        let dim = self.dim();
        let components = match method {
            ConvolutionMethod::Direct => (0..dim)
                .map(|i| {
                    let mut acc = vec![0.0; self.grid.len()];
                    for j in 0..dim {
                        for (a, v) in acc
                            .iter_mut()
                            .zip(self.convolve_entry_direct(i, j, f.component(j).values()))
                        {
                            *a += v;
                        }
                    }
                    ScalarField::from_raw(self.grid, acc)
                })
                .collect(),
            ConvolutionMethod::Fast => {
                let hats: Vec<Vec<Complex64>> = f
                    .components()
                    .iter()
                    .map(|c| c.spectrum())
                    .collect();
                self.apply_symbols(&hats)
            }
        };
        Ok(VectorField::from_raw(self.grid, components))
    }

    fn apply_symbols(&self, hats: &[Vec<Complex64>]) -> Vec<ScalarField> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
                for (j, hat) in hats.iter().enumerate() {
                    for ((a, s), x) in acc.iter_mut().zip(self.symbol(i, j)).zip(hat) {
                        *a += s * x;
                    }
                }
                ScalarField::from_raw(self.grid, fft::inverse_real(&self.grid, acc))
            })
            .collect()
    }

    /// Matrix field `(Gamma * w)_ij` for a scalar `w`, row-major entries.
    pub fn convolve_scalar(&self, w: &ScalarField, method: ConvolutionMethod) -> Result<Vec<ScalarField>> {
        self.check_grid(w.grid())?;
        let dim = self.dim();
        let mut out = Vec::with_capacity(dim * dim);
        match method {
            ConvolutionMethod::Direct => {
                for i in 0..dim {
                    for j in 0..dim {
                        out.push(ScalarField::from_raw(
                            self.grid,
                            self.convolve_entry_direct(i, j, w.values()),
                        ));
                    }
                }
            }
            ConvolutionMethod::Fast => {
                let hat = w.spectrum();
                for i in 0..dim {
                    for j in 0..dim {
                        let prod = self.symbol(i, j).iter().zip(&hat).map(|(s, x)| s * x).collect();
                        out.push(ScalarField::from_raw(
                            self.grid,
                            fft::inverse_real(&self.grid, prod),
                        ));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Nonlocal alignment force per unit mass,
/// `-coeff * integral Gamma(x-y) (u(x) - u(y)) w(y) dy`,
/// evaluated as `-coeff * [(Gamma*w)(x) u(x) - (Gamma*(u w))(x)]`.
pub fn alignment_force(
    kernel: &Kernel,
    u: &VectorField,
    w: &ScalarField,
    coeff: f64,
) -> Result<VectorField> {
    kernel.check_grid(u.grid())?;
    kernel.check_grid(w.grid())?;
    if let Some(index) = w.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveWeight {
            index,
            value: w.values()[index],
        });
    }
    let grid = *u.grid();
    let dim = grid.dim();
    let gw = kernel.convolve_scalar(w, ConvolutionMethod::Fast)?;
    let uw_hats: Vec<Vec<Complex64>> = u
        .components()
        .iter()
        .map(|c| c.zip_map(w, |a, b| a * b).spectrum())
        .collect();
    let g_uw = kernel.apply_symbols(&uw_hats);
    let components = (0..dim)
        .map(|i| {
            let vals = (0..grid.len())
                .map(|p| {
                    let local: f64 = (0..dim)
                        .map(|j| gw[i * dim + j].values()[p] * u.component(j).values()[p])
                        .sum();
                    -coeff * (local - g_uw[i].values()[p])
                })
                .collect();
            ScalarField::from_raw(grid, vals)
        })
        .collect();
    Ok(VectorField::from_raw(grid, components))
}

/// Outcome of the convolution-inequality monitor
/// `||Gamma * w||_inf <= ||Gamma||_1 ||w||_inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub const YOUNG_SLACK: f64 = 1e-12;

/// Checks the bound for the matrix field `Gamma * w`, measured with the
/// pointwise spectral norm.
pub fn young_check(kernel: &Kernel, w: &ScalarField) -> Result<YoungCheck> {
    let gw = kernel.convolve_scalar(w, ConvolutionMethod::Fast)?;
    let lhs = (0..w.grid().len())
        .map(|p| {
            if kernel.dim() == 1 {
                gw[0].values()[p].abs()
            } else {
                sym2_norm(gw[0].values()[p], gw[1].values()[p], gw[3].values()[p])
            }
        })
        .fold(0.0, f64::max);
    let rhs = kernel.l1_norm() * w.max_abs();
    Ok(YoungCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + YOUNG_SLACK),
    })
}

/// Same bound for a vector field, with pointwise Euclidean magnitudes.
pub fn young_check_vector(kernel: &Kernel, f: &VectorField) -> Result<YoungCheck> {
    let conv = kernel.convolve(f, ConvolutionMethod::Fast)?;
    let lhs = conv.magnitude().max_abs();
    let rhs = kernel.l1_norm() * f.magnitude().max_abs();
    Ok(YoungCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + YOUNG_SLACK),
    })
}
