//! Cached FFT plans and raw (unnormalised) multi-dimensional transforms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid;

type PlanKey = (usize, bool);

fn plans() -> &'static Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    PLANS.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Plan for length `n`; creation is serialized, use is lock-free.
pub(crate) fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = plans().lock().expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let dir = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// In-place unnormalised DFT over every axis of `grid`.
pub(crate) fn transform(grid: &Grid, buf: &mut [Complex64], forward: bool) {
    debug_assert_eq!(buf.len(), grid.len());
    match grid.dim() {
        1 => plan(grid.points(0), forward).process(buf),
        _ => {
            let (n0, n1) = (grid.points(0), grid.points(1));
            // Rows are contiguous: one call covers every row.
            plan(n1, forward).process(buf);
            let mut t = vec![Complex64::default(); buf.len()];
            transpose(buf, &mut t, n0, n1);
            plan(n0, forward).process(&mut t);
            transpose(&t, buf, n1, n0);
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// `(-1)^(k_0 + k_1)` for the storage index; accounts for the grid starting at `-L`.
#[inline]
pub(crate) fn shift_sign(grid: &Grid, index: usize) -> f64 {
    let parity = match grid.dim() {
        1 => index,
        _ => {
            let n1 = grid.points(1);
            index / n1 + index % n1
        }
    };
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Physical samples to continuum-normalised Fourier coefficients,
/// `u_hat(xi_k) = h^d sum_j u(x_j) exp(-i xi_k . x_j)`.
pub(crate) fn forward(grid: &Grid, buf: &mut [Complex64]) {
    transform(grid, buf, true);
    let w = grid.cell_volume();
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= w * shift_sign(grid, i);
    }
}

/// Inverse of [`forward`].
pub(crate) fn inverse(grid: &Grid, buf: &mut [Complex64]) {
    let w = 1.0 / (grid.cell_volume() * grid.len() as f64);
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= w * shift_sign(grid, i);
    }
    transform(grid, buf, false);
}
