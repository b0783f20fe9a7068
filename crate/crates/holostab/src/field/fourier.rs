//! Unitary Fourier transform with angular frequency:
//! `F(h)(ξ) = (2π)^{-m/2} ∫ h(x) e^{-i x·ξ} dx`.
//!
//! The DFT approximates the integral with scale `Δx^m (2π)^{-m/2}`. Both
//! domains store samples in centred order, so each axis is rotated by `n/2`
//! before and after the FFT.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{Domain, GridSpec, SampledField};
use crate::error::Result;

type PlanKey = (usize, bool);

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// Centred FFT of every contiguous row of length `n` in `buf`.
fn centred_rows(buf: &mut [Complex64], n: usize, inverse: bool) {
    let half = n / 2;
    for row in buf.chunks_exact_mut(n) {
        row.rotate_left(half);
    }
    plan(n, inverse).process(buf);
    for row in buf.chunks_exact_mut(n) {
        row.rotate_left(half);
    }
}

fn transpose(buf: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); buf.len()];
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    out[j * n + i] = buf[i * n + j];
                }
            }
        }
    }
    out
}

/// Unscaled centred DFT over all axes of a grid-shaped buffer.
pub(crate) fn centred_dft(values: &mut Vec<Complex64>, n: usize, dim: usize, inverse: bool) {
    centred_rows(values, n, inverse);
    if dim == 2 {
        let mut t = transpose(values, n);
        centred_rows(&mut t, n, inverse);
        *values = transpose(&t, n);
    }
}

fn transform(field: &SampledField, inverse: bool) -> SampledField {
    let grid: GridSpec = *field.grid();
    let mut values = field.values().to_vec();
    centred_dft(&mut values, grid.n(), grid.dim(), inverse);
    let spacing = if inverse { grid.dxi() } else { grid.dx() };
    let scale = (spacing / (2.0 * PI).sqrt()).powi(grid.dim() as i32);
    for v in values.iter_mut() {
        *v *= scale;
    }
    let domain = if inverse { Domain::Real } else { Domain::Frequency };
    field.with_values(values).expect("length preserved").retag(domain)
}

/// Forward transform of a real-space field.
pub fn unitary_ft(field: &SampledField) -> Result<SampledField> {
    field.expect_domain(Domain::Real)?;
    Ok(transform(field, false))
}

/// Inverse transform of a frequency-space field.
pub fn unitary_ift(field: &SampledField) -> Result<SampledField> {
    field.expect_domain(Domain::Frequency)?;
    Ok(transform(field, true))
}

/// `F^{-1}(m · F h)` for a multiplier given per flat frequency index.
pub fn apply_multiplier(field: &SampledField, multiplier: impl Fn(usize) -> Complex64) -> Result<SampledField> {
    let spectrum = unitary_ft(field)?;
    let filtered = spectrum.map_indexed(|i, v| v * multiplier(i));
    unitary_ift(&filtered)
}
