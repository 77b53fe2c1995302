//! Multi-axis FFT helpers for Cartesian grids, built on rustfft.
//!
//! Forward transforms are unnormalized (û_k = Σ_j u_j e^{−ik·x_j}); the
//! inverse divides by the total point count. Fourier multipliers commute
//! with the half-cell sample offset, so spectral operators need no phase
//! correction.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().unwrap();
    let key = (len, dir == FftDirection::Forward);
    if let Some(p) = guard.1.get(&key) {
        return p.clone();
    }
    let p = guard.0.plan_fft(len, dir);
    guard.1.insert(key, p.clone());
    p
}

fn transform_axis(dims: &[usize], data: &mut [C64], axis: usize, dir: FftDirection) {
    let n = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let fft = plan(n, dir);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            if inner == 1 {
                fft.process(&mut data[base..base + n]);
            } else {
                for j in 0..n {
                    buf[j] = data[base + j * inner];
                }
                fft.process(&mut buf);
                for j in 0..n {
                    data[base + j * inner] = buf[j];
                }
            }
        }
    }
}

/// Unnormalized forward DFT along every axis (row-major data).
pub fn forward(dims: &[usize], values: &[C64]) -> Vec<C64> {
    let mut data = values.to_vec();
    for axis in 0..dims.len() {
        transform_axis(dims, &mut data, axis, FftDirection::Forward);
    }
    data
}

/// Inverse DFT along every axis, normalized by 1/(total points).
pub fn inverse(dims: &[usize], freq: &[C64]) -> Vec<C64> {
    let mut data = freq.to_vec();
    for axis in 0..dims.len() {
        transform_axis(dims, &mut data, axis, FftDirection::Inverse);
    }
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}

/// Angular frequency of DFT bin m on an axis of n points spanning [−L, L).
pub fn frequency(m: usize, n: usize, half_width: f64) -> f64 {
    let signed = if m < n / 2 { m as i64 } else { m as i64 - n as i64 };
    std::f64::consts::PI * signed as f64 / half_width
}
