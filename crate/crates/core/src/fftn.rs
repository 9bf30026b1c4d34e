//! Multi-dimensional FFTs on flat row-major cubes (last axis fastest).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct CubeFft {
    side: usize,
    dim: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CubeFft {
    pub fn new(side: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            side,
            dim,
            fwd: planner.plan_fft_forward(side),
            inv: planner.plan_fft_inverse(side),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalised forward transform `Σ_x f(x) e^{-2πi k x / side}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// Unnormalised inverse transform `Σ_k f(k) e^{+2πi k x / side}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let s = self.side;
        assert_eq!(data.len(), self.len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // last axis is contiguous
        for row in data.chunks_exact_mut(s) {
            plan.process_with_scratch(row, &mut scratch);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); s];
        for axis in 0..self.dim.saturating_sub(1) {
            let stride = s.pow((self.dim - 1 - axis) as u32);
            let block = stride * s;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (i, b) in buf.iter_mut().enumerate() {
                        *b = data[start + i * stride];
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for (i, b) in buf.iter().enumerate() {
                        data[start + i * stride] = *b;
                    }
                }
            }
        }
    }
}

/// Smallest size ≥ n of the form 2^a 3^b 5^c.
pub fn fast_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_3d() {
        let f = CubeFft::new(6, 3);
        let orig: Vec<Complex64> = (0..216)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / 216.0 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_2d() {
        let s = 8;
        let f = CubeFft::new(s, 2);
        let mut d = vec![Complex64::new(0.0, 0.0); s * s];
        d[s + 2] = Complex64::new(1.0, 0.0);
        f.inverse(&mut d);
        let tau = std::f64::consts::TAU;
        for x0 in 0..s {
            for x1 in 0..s {
                let th = tau * (x0 as f64 + 2.0 * x1 as f64) / s as f64;
                assert!((d[x0 * s + x1] - Complex64::new(th.cos(), th.sin())).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn fast_sizes() {
        assert_eq!(fast_size(49), 50);
        assert_eq!(fast_size(25), 25);
        assert_eq!(fast_size(97), 100);
    }
}
