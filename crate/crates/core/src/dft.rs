//! Planned discrete Fourier transforms shared by the channel models and receivers.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward DFT without scaling and inverse DFT with `1/N` scaling.
#[derive(Clone)]
pub(crate) struct Dft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }
}

/// Physical frequency index of DFT bin `g`, in `[-N/2, N/2)`.
pub fn signed_bin(g: usize, n: usize) -> i64 {
    if g < n / 2 {
        g as i64
    } else {
        g as i64 - n as i64
    }
}
