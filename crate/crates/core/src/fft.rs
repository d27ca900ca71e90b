//! Thin wrappers around `rustfft` for zero-padded linear convolution and
//! grid transforms of coefficient sequences.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Linear (acyclic) convolution of two complex sequences through a zero-padded
/// transform whose length covers the full support, so no circular aliasing
/// reaches any output index.
pub fn linear_convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let mut fa = vec![C64::new(0.0, 0.0); size];
    let mut fb = vec![C64::new(0.0, 0.0); size];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inverse.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.truncate(out_len);
    for x in fa.iter_mut() {
        *x *= scale;
    }
    fa
}

/// Forward/inverse transform pair on a periodic grid of `size` points.
///
/// Mode `n` (possibly negative) lives at slot `n mod size`. `to_grid` sums
/// `Σ c_n e^{inx_j}`; `to_modes` returns `(1/size) Σ_j g_j e^{−inx_j}`.
#[derive(Clone)]
pub struct GridTransform {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridTransform {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn to_grid(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
    }

    pub fn to_modes(&self, buf: &mut [C64]) {
        self.forward.process(buf);
        let scale = 1.0 / self.size as f64;
        for x in buf.iter_mut() {
            *x *= scale;
        }
    }

    /// Slot of mode `n` in a buffer of this size.
    pub fn slot(&self, n: i64) -> usize {
        n.rem_euclid(self.size as i64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let a: Vec<C64> = (0..7).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let b: Vec<C64> = (0..5).map(|k| C64::new(0.5 * k as f64, 0.25)).collect();
        let fast = linear_convolve(&a, &b);
        let slow = naive(&a, &b);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_round_trip() {
        let t = GridTransform::new(16);
        let mut buf = vec![C64::new(0.0, 0.0); 16];
        buf[t.slot(3)] = C64::new(1.0, 2.0);
        buf[t.slot(-3)] = C64::new(1.0, -2.0);
        let orig = buf.clone();
        t.to_grid(&mut buf);
        for g in &buf {
            assert!(g.im.abs() < 1e-12);
        }
        t.to_modes(&mut buf);
        for (x, y) in buf.iter().zip(&orig) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
