//! Thin wrapper around `rustfft` for the periodic grids used here.
//!
//! 2D arrays are stored row-major with axis 0 (x) slowest; the 2D transform
//! is rows, transpose, rows, transpose back. Plans come from a thread-local
//! planner, so repeated calls with the same size reuse the same plan and the
//! summation order is fixed for a given size.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn transform(grid: &Grid, buf: &mut [Complex64], direction: FftDirection) {
    let n = grid.points();
    let fft = plan(n, direction);
    fft.process(buf);
    if grid.dim() == 2 {
        transpose_square(buf, n);
        fft.process(buf);
        transpose_square(buf, n);
    }
}

/// Unnormalised forward DFT of a real array.
pub(crate) fn forward(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(grid, &mut buf, FftDirection::Forward);
    buf
}

/// Inverse DFT, normalised by the number of grid points; keeps the real part.
pub(crate) fn inverse_real(grid: &Grid, mut coeffs: Vec<Complex64>) -> Vec<f64> {
    transform(grid, &mut coeffs, FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    coeffs.iter().map(|c| c.re * scale).collect()
}
