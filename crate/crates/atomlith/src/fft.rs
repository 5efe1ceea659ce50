//! Centered 2D FFT between the position and momentum meshes.
//!
//! The transform pair is normalized so that physical norms (sums weighted by
//! the cell measure) are identical in both domains:
//!
//!   Phi(k) = (dx dy / 2pi) * sum psi(r) e^{-i k.r}
//!   psi(r) = (dkx dky / 2pi) * sum Phi(k) e^{+i k.r}
//!
//! Both meshes are centered; the index permutation `half_shift` moves the
//! origin between the array center and element 0 (its own inverse for the
//! even sizes enforced by `GridSpec`).

use std::cell::RefCell;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Swap quadrants: out[j, i] = in[(j + ny/2) % ny, (i + nx/2) % nx].
pub(crate) fn half_shift(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (ny, nx) = a.dim();
    Array2::from_shape_fn((ny, nx), |(j, i)| a[[(j + ny / 2) % ny, (i + nx / 2) % nx]])
}

/// Unnormalized 2D transform in the given direction, rows then columns.
fn raw_fft2(mut a: Array2<Complex64>, direction: FftDirection) -> Array2<Complex64> {
    let (ny, nx) = a.dim();
    let row_fft = plan(nx, direction);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for mut row in a.rows_mut() {
        let slice = row.as_slice_mut().expect("row-major layout");
        row_fft.process_with_scratch(slice, &mut scratch);
    }
    let mut at = a.reversed_axes().as_standard_layout().into_owned();
    let col_fft = plan(ny, direction);
    let mut scratch = vec![Complex64::default(); col_fft.get_inplace_scratch_len()];
    for mut row in at.rows_mut() {
        let slice = row.as_slice_mut().expect("row-major layout");
        col_fft.process_with_scratch(slice, &mut scratch);
    }
    at.reversed_axes().as_standard_layout().into_owned()
}

/// Position samples -> momentum samples (both centered).
pub(crate) fn forward(grid: &GridSpec, data: &Array2<Complex64>) -> Array2<Complex64> {
    let scale = grid.dx() * grid.dy() / (2.0 * std::f64::consts::PI);
    let mut out = half_shift(&raw_fft2(half_shift(data), FftDirection::Forward));
    out.mapv_inplace(|v| v * scale);
    out
}

/// Momentum samples -> position samples (both centered).
pub(crate) fn inverse(grid: &GridSpec, data: &Array2<Complex64>) -> Array2<Complex64> {
    let scale = grid.dkx() * grid.dky() / (2.0 * std::f64::consts::PI);
    let mut out = half_shift(&raw_fft2(half_shift(data), FftDirection::Inverse));
    out.mapv_inplace(|v| v * scale);
    out
}
