//! Process-wide FFT plan cache.
//!
//! Plans are cached per transform length behind a mutex so that concurrent
//! detector runs on the same grid share work buffers' twiddle tables. rustfft
//! plans are `Send + Sync`, so the cached `Arc`s can be used from rayon tasks
//! without further locking.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<PlanPair>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PlanPair>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plans_for(n: usize) -> Arc<PlanPair> {
    let mut guard = cache().lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// In-place unnormalized DFT: X_k = Σ_j x_j e^{−2πi jk/N}.
pub fn dft_forward(buf: &mut [Complex64]) {
    plans_for(buf.len()).forward.process(buf);
}

/// In-place unnormalized inverse DFT: x_j = Σ_k X_k e^{+2πi jk/N}.
///
/// No 1/N factor is applied; callers fold it into their own scaling.
pub fn dft_inverse(buf: &mut [Complex64]) {
    plans_for(buf.len()).inverse.process(buf);
}

/// Full linear convolution of `a` (length p) and `b` (length q) via
/// zero-padded FFTs; the result has length p + q − 1.
pub fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let out_len = a.len() + b.len() - 1;
    let m = out_len.next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    dft_forward(&mut fa);
    dft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    dft_inverse(&mut fa);
    let scale = 1.0 / m as f64;
    fa.truncate(out_len);
    for x in &mut fa {
        *x *= scale;
    }
    fa
}
