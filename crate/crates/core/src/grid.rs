//! Periodic grids, grid-sampled fields, spectral derivatives and discrete norms.
//!
//! The domain is the torus `[0, L)^dim` with `n` points per axis. Derivatives
//! are Fourier multipliers `i k_j` with the Nyquist mode of every odd
//! derivative zeroed, so derivatives of real fields stay real. Integrals are
//! Riemann sums with weight `h^dim`, which is spectrally accurate for smooth
//! periodic integrands.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

/// Uniform periodic lattice on `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    length: f64,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        Ok(Self { dim, length, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Torus volume `L^dim`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Signed mode index for storage slot `j`: `0..n/2-1`, then `-n/2..-1`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Per-axis wavenumber table `k_j = 2 pi m_j / L` in storage order.
    /// The Nyquist entry is `-pi n / L`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points)
            .map(|j| 2.0 * PI * self.mode(j) as f64 / self.length)
            .collect()
    }

    /// Wavenumbers used for differentiation: the table above with the Nyquist
    /// entry set to zero.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let mut k = self.wavenumbers();
        k[self.points / 2] = 0.0;
        k
    }

    /// Per-axis indices of a flat index (axis 0 slowest).
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.points, flat % self.points]
        }
    }

    /// Physical coordinates `(i_0 h, i_1 h)` of a flat index; unused axes are 0.
    pub fn coordinates(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        let [i, j] = self.axis_indices(flat);
        if self.dim == 1 {
            [i as f64 * h, 0.0]
        } else {
            [i as f64 * h, j as f64 * h]
        }
    }

    /// `|k|^2` at a flat spectral index, from the derivative wavenumbers.
    pub(crate) fn k_squared_table(&self) -> Vec<f64> {
        let kd = self.derivative_wavenumbers();
        (0..self.len())
            .map(|p| {
                let [i, j] = self.axis_indices(p);
                if self.dim == 1 {
                    kd[i] * kd[i]
                } else {
                    kd[i] * kd[i] + kd[j] * kd[j]
                }
            })
            .collect()
    }

    /// Derivative wavenumber along `axis` at every flat spectral index.
    pub(crate) fn axis_wavenumber_table(&self, axis: usize) -> Vec<f64> {
        let kd = self.derivative_wavenumbers();
        (0..self.len())
            .map(|p| kd[self.axis_indices(p)[axis]])
            .collect()
    }

    /// Quadrature normalisation turning `sum |f_hat|^2` into `integral |f|^2`.
    pub(crate) fn parseval_factor(&self) -> f64 {
        let total = self.len() as f64;
        self.volume() / (total * total)
    }
}

/// Real scalar samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldLength {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { grid, values })
    }

    /// Construction without the finiteness check; used on solver paths where
    /// non-finite values are detected by the caller.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|p| f(grid.coordinates(p))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
    }

    /// `self = keep * self + weight * other`.
    pub fn blend(&mut self, keep: f64, other: &Self, weight: f64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = keep * *a + weight * b;
        }
    }

    /// Riemann-sum integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn spectrum(&self) -> Vec<Complex64> {
        fft::forward(&self.grid, &self.values)
    }
}

/// `dim` real components on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "vector field needs {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        let components = components
            .into_iter()
            .map(|c| ScalarField::new(grid, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, components })
    }

    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::InvalidParameter("vector field with no components".into()))?
            .grid();
        if components.len() != grid.dim() || components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, components })
    }

    pub(crate) fn from_raw(grid: Grid, components: Vec<ScalarField>) -> Self {
        debug_assert_eq!(components.len(), grid.dim());
        Self { grid, components }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let components = (0..grid.dim())
            .map(|i| ScalarField::from_fn(grid, |x| f(x)[i]))
            .collect();
        Self { grid, components }
    }

    pub fn constant(grid: Grid, c: [f64; 2]) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, [0.0; 2])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn add_scaled(&mut self, factor: f64, other: &Self) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(factor, b);
        }
    }

    pub fn blend(&mut self, keep: f64, other: &Self, weight: f64) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.blend(keep, b, weight);
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> Self {
        Self::from_raw(self.grid, self.components.iter().map(|c| c.map(f)).collect())
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let mut out = vec![0.0; self.grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        ScalarField::from_raw(self.grid, out.into_iter().map(f64::sqrt).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.components.iter().all(ScalarField::all_finite)
    }
}

/// Anything that can be measured by [`lp_norm`] and [`sobolev_norm_sq`].
pub trait Field {
    fn grid(&self) -> &Grid;
    /// Scalar parts; a vector field contributes one part per component.
    fn parts(&self) -> Vec<&ScalarField>;
}

impl Field for ScalarField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn parts(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Field for VectorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn parts(&self) -> Vec<&ScalarField> {
        self.components.iter().collect()
    }
}

fn multiply_and_invert(grid: &Grid, hat: &[Complex64], symbol: &[f64]) -> Vec<f64> {
    let scaled = hat
        .iter()
        .zip(symbol)
        .map(|(c, &k)| Complex64::new(-c.im * k, c.re * k))
        .collect();
    fft::inverse_real(grid, scaled)
}

/// Partial derivative along `axis` of a field given by its spectrum.
pub(crate) fn partial_from_spectrum(grid: &Grid, hat: &[Complex64], axis: usize) -> ScalarField {
    let symbol = grid.axis_wavenumber_table(axis);
    ScalarField::from_raw(*grid, multiply_and_invert(grid, hat, &symbol))
}

pub fn spectral_partial(f: &ScalarField, axis: usize) -> ScalarField {
    partial_from_spectrum(f.grid(), &f.spectrum(), axis)
}

pub fn spectral_grad(f: &ScalarField) -> VectorField {
    let grid = *f.grid();
    let hat = f.spectrum();
    let components = (0..grid.dim())
        .map(|axis| partial_from_spectrum(&grid, &hat, axis))
        .collect();
    VectorField::from_raw(grid, components)
}

pub fn spectral_div(v: &VectorField) -> ScalarField {
    let grid = *v.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, c) in v.components().iter().enumerate() {
        let symbol = grid.axis_wavenumber_table(axis);
        for ((a, h), k) in acc.iter_mut().zip(c.spectrum()).zip(&symbol) {
            *a += Complex64::new(-h.im * k, h.re * k);
        }
    }
    ScalarField::from_raw(grid, fft::inverse_real(&grid, acc))
}

/// Spectral Laplacian with multiplier `-|k|^2` (Nyquist-zeroed wavenumbers).
pub fn spectral_laplacian(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let k2 = grid.k_squared_table();
    let hat = f
        .spectrum()
        .into_iter()
        .zip(&k2)
        .map(|(c, &k)| -c * k)
        .collect();
    ScalarField::from_raw(grid, fft::inverse_real(&grid, hat))
}

/// Discrete `L^p` norm for `p` in {1, 2, inf}. Vector fields use the pointwise
/// Euclidean magnitude.
pub fn lp_norm<F: Field>(f: &F, p: f64) -> Result<f64> {
    let grid = *f.grid();
    let parts = f.parts();
    let magnitude: Vec<f64> = if parts.len() == 1 {
        parts[0].values().iter().map(|v| v.abs()).collect()
    } else {
        (0..grid.len())
            .map(|i| {
                parts
                    .iter()
                    .map(|c| c.values()[i] * c.values()[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    };
    let w = grid.cell_volume();
    if p == 1.0 {
        Ok(magnitude.iter().sum::<f64>() * w)
    } else if p == 2.0 {
        Ok((magnitude.iter().map(|m| m * m).sum::<f64>() * w).sqrt())
    } else if p == f64::INFINITY {
        Ok(magnitude.iter().fold(0.0, |m: f64, v| m.max(*v)))
    } else {
        Err(Error::UnsupportedNorm(p))
    }
}

pub const MAX_SOBOLEV_ORDER: usize = 4;

/// `||grad^r f||^2` for a spectrum, with `grad^r` the full order-r derivative
/// tensor (Fourier multiplier `|k|^{2r}`).
pub(crate) fn seminorms_from_spectrum(grid: &Grid, hat: &[Complex64], s: usize) -> Vec<f64> {
    let k2 = grid.k_squared_table();
    let factor = grid.parseval_factor();
    (0..=s)
        .map(|r| {
            let sum: f64 = if r == 0 {
                hat.iter().map(|c| c.norm_sqr()).sum()
            } else {
                hat.iter()
                    .zip(&k2)
                    .map(|(c, &k)| k.powi(r as i32) * c.norm_sqr())
                    .sum()
            };
            sum * factor
        })
        .collect()
}

/// `||grad^r f||^2_{L^2}` for `r = 0..=s`, summed over vector components.
pub fn sobolev_seminorms_sq<F: Field>(f: &F, s: usize) -> Result<Vec<f64>> {
    if s > MAX_SOBOLEV_ORDER {
        return Err(Error::UnsupportedSobolev(s));
    }
    let grid = *f.grid();
    let mut acc = vec![0.0; s + 1];
    for part in f.parts() {
        for (a, v) in acc
            .iter_mut()
            .zip(seminorms_from_spectrum(&grid, &part.spectrum(), s))
        {
            *a += v;
        }
    }
    Ok(acc)
}

/// `||f||^2_{H^s} = sum_{r=0}^{s} ||grad^r f||^2_{L^2}`.
pub fn sobolev_norm_sq<F: Field>(f: &F, s: usize) -> Result<f64> {
    Ok(sobolev_seminorms_sq(f, s)?.iter().sum())
}

/// Zero every mode with `|m| > n/3` on any axis (2/3 rule).
pub fn dealias(f: &mut ScalarField) {
    let grid = *f.grid();
    let cutoff = (grid.points() / 3) as i64;
    let mut hat = f.spectrum();
    let mut touched = false;
    for (p, c) in hat.iter_mut().enumerate() {
        let [i, j] = grid.axis_indices(p);
        let outside = grid.mode(i).abs() > cutoff || (grid.dim() == 2 && grid.mode(j).abs() > cutoff);
        if outside {
            *c = Complex64::new(0.0, 0.0);
            touched = true;
        }
    }
    if touched {
        f.values = fft::inverse_real(&grid, hat);
    }
}

/// `integral f g` by the Riemann sum.
pub fn inner_product(f: &ScalarField, g: &ScalarField) -> f64 {
    f.values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * f.grid().cell_volume()
}
