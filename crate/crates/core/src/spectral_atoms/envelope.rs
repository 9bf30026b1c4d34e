//! Envelope samples on a symmetric frequency lattice `η_m = m·h`, `|m_d| ≤ M`.

use crate::fftn::{fast_size, CubeFft};
use num_complex::Complex64;
use std::f64::consts::TAU;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    dim: usize,
    half: usize,
    spacing: f64,
    samples: Vec<Complex64>,
}

impl Envelope {
    pub fn zeros(dim: usize, half: usize, spacing: f64) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        assert!(spacing > 0.0);
        let len = (2 * half + 1).pow(dim as u32);
        Self {
            dim,
            half,
            spacing,
            samples: vec![ZERO; len],
        }
    }

    pub fn from_fn(dim: usize, half: usize, spacing: f64, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut e = Self::zeros(dim, half, spacing);
        let mut eta = vec![0.0; dim];
        for i in 0..e.samples.len() {
            e.eta_into(i, &mut eta);
            e.samples[i] = f(&eta);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M`: samples run over `m = -M..=M` per axis.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Half-width of the sampled cube.
    pub fn r_env(&self) -> f64 {
        self.half as f64 * self.spacing
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn index_into(&self, mut idx: usize, m: &mut [i64]) {
        let s = self.side();
        for d in (0..self.dim).rev() {
            m[d] = (idx % s) as i64 - self.half as i64;
            idx /= s;
        }
    }

    pub fn eta_into(&self, idx: usize, eta: &mut [f64]) {
        let mut m = [0i64; 3];
        self.index_into(idx, &mut m[..self.dim]);
        for d in 0..self.dim {
            eta[d] = m[d] as f64 * self.spacing;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn l1(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| *z == ZERO)
    }

    pub fn scale(&mut self, s: Complex64) {
        for z in &mut self.samples {
            *z *= s;
        }
    }

    /// `conj(g(-η))`, the envelope of the mirror atom.
    pub fn mirrored_conj(&self) -> Envelope {
        let mut out = self.clone();
        let n = self.samples.len();
        for i in 0..n {
            // index reversal on every axis is reversal of the flat index
            out.samples[i] = self.samples[n - 1 - i].conj();
        }
        out
    }

    /// Embed into a larger cube with the same spacing.
    pub fn padded(&self, half: usize) -> Envelope {
        assert!(half >= self.half);
        if half == self.half {
            return self.clone();
        }
        let mut out = Envelope::zeros(self.dim, half, self.spacing);
        let mut m = [0i64; 3];
        for i in 0..self.samples.len() {
            self.index_into(i, &mut m[..self.dim]);
            let k = out.flat_index(&m[..self.dim]);
            out.samples[k] = self.samples[i];
        }
        out
    }

    pub fn flat_index(&self, m: &[i64]) -> usize {
        let s = self.side() as i64;
        let mut idx = 0i64;
        for d in 0..self.dim {
            idx = idx * s + m[d] + self.half as i64;
        }
        idx as usize
    }

    /// Zero every sample farther than `radius` from the centre.
    pub fn clear_outside(&mut self, radius: f64) {
        let mut eta = vec![0.0; self.dim];
        let r2 = radius * radius * (1.0 + 1e-12);
        for i in 0..self.samples.len() {
            self.eta_into(i, &mut eta);
            if eta.iter().map(|x| x * x).sum::<f64>() > r2 {
                self.samples[i] = ZERO;
            }
        }
    }

    /// Largest `|η|` carrying a nonzero sample.
    pub fn occupied_radius(&self) -> f64 {
        let mut eta = vec![0.0; self.dim];
        let mut r = 0.0f64;
        for i in 0..self.samples.len() {
            if self.samples[i] != ZERO {
                self.eta_into(i, &mut eta);
                r = r.max(eta.iter().map(|x| x * x).sum::<f64>().sqrt());
            }
        }
        r
    }

    /// Normalisation `(2π)^{-n} h^n` of the discrete inverse transform.
    pub fn inverse_weight(&self) -> f64 {
        (self.spacing / TAU).powi(self.dim as i32)
    }

    /// Discrete inverse transform `(2π)^{-n} h^n Σ_m g_m e^{i y·η_m}` at one point.
    pub fn inverse_at(&self, y: &[f64]) -> Complex64 {
        let axes: Vec<Vec<f64>> = y.iter().map(|v| vec![*v]).collect();
        self.inverse_on_tensor(&axes)[0]
    }

    /// Discrete inverse transform on the tensor grid `axes[0] × axes[1] × …`,
    /// flat row-major output.
    pub fn inverse_on_tensor(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        assert_eq!(axes.len(), self.dim);
        let s = self.side();
        let mut shape: Vec<usize> = vec![s; self.dim];
        let mut data = self.samples.clone();
        for axis in (0..self.dim).rev() {
            let pts = &axes[axis];
            let mat: Vec<Complex64> = pts
                .iter()
                .flat_map(|&y| {
                    (0..s).map(move |i| {
                        let eta = (i as f64 - self.half as f64) * self.spacing;
                        let (sn, cs) = (y * eta).sin_cos();
                        Complex64::new(cs, sn)
                    })
                })
                .collect();
            data = contract_axis(&data, &shape, axis, &mat, pts.len());
            shape[axis] = pts.len();
        }
        let w = self.inverse_weight();
        for z in &mut data {
            *z *= w;
        }
        data
    }

    /// Plain linear convolution `Σ_m a_m b_{M-m}` on the summed lattice.
    pub fn convolve(&self, other: &Envelope) -> Envelope {
        let plan = ConvPlan::new(self.dim, self.spacing, self.half, other.half);
        let a = plan.transform(self);
        let b = plan.transform(other);
        let mut prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        plan.finish(&mut prod)
    }
}

/// Apply a `(new_len × old_len)` matrix along one axis of a flat tensor.
fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    mat: &[Complex64],
    new_len: usize,
) -> Vec<Complex64> {
    let old_len = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![ZERO; outer * new_len * inner];
    for o in 0..outer {
        for r in 0..new_len {
            let row = &mat[r * old_len..(r + 1) * old_len];
            let dst = &mut out[(o * new_len + r) * inner..(o * new_len + r + 1) * inner];
            for (c, m) in row.iter().enumerate() {
                let src = &data[(o * old_len + c) * inner..(o * old_len + c + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += m * s;
                }
            }
        }
    }
    out
}

/// FFT convolution of envelopes with fixed half-widths; forward transforms
/// can be computed once and reused across many products.
pub struct ConvPlan {
    dim: usize,
    spacing: f64,
    half_out: usize,
    fft: CubeFft,
}

impl ConvPlan {
    pub fn new(dim: usize, spacing: f64, half_a: usize, half_b: usize) -> Self {
        let half_out = half_a + half_b;
        let side = fast_size(2 * half_out + 1);
        Self {
            dim,
            spacing,
            half_out,
            fft: CubeFft::new(side, dim),
        }
    }

    pub fn half_out(&self) -> usize {
        self.half_out
    }

    /// Zero-padded forward transform; sample `m` sits at offset `m + M`.
    pub fn transform(&self, env: &Envelope) -> Vec<Complex64> {
        assert_eq!(env.dim, self.dim);
        assert!(env.half <= self.half_out);
        let n = self.fft.side();
        let mut buf = vec![ZERO; self.fft.len()];
        let mut m = [0i64; 3];
        for i in 0..env.samples.len() {
            let z = env.samples[i];
            if z == ZERO {
                continue;
            }
            env.index_into(i, &mut m[..self.dim]);
            let mut idx = 0usize;
            for d in 0..self.dim {
                idx = idx * n + (m[d] + env.half as i64) as usize;
            }
            buf[idx] = z;
        }
        self.fft.forward(&mut buf);
        buf
    }

    /// Inverse transform of a product spectrum; the result is the linear
    /// convolution of the two inputs whose offsets add to `M_a + M_b`.
    pub fn finish(&self, prod: &mut [Complex64]) -> Envelope {
        self.fft.inverse(prod);
        let n = self.fft.side();
        let norm = 1.0 / self.fft.len() as f64;
        let mut out = Envelope::zeros(self.dim, self.half_out, self.spacing);
        let mut m = [0i64; 3];
        for i in 0..out.samples.len() {
            out.index_into(i, &mut m[..self.dim]);
            let mut idx = 0usize;
            for d in 0..self.dim {
                idx = idx * n + (m[d] + self.half_out as i64) as usize;
            }
            out.samples[i] = prod[idx] * norm;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let a = Envelope::from_fn(2, 2, 0.5, |e| c(1.0 + e[0] - 0.3 * e[1]));
        let b = Envelope::from_fn(2, 1, 0.5, |e| Complex64::new(e[0] * e[1], 1.0 + e[1]));
        let out = a.convolve(&b);
        assert_eq!(out.half(), 3);
        let mut ma = [0i64; 2];
        let mut mb = [0i64; 2];
        let mut direct = Envelope::zeros(2, 3, 0.5);
        for i in 0..a.len() {
            a.index_into(i, &mut ma);
            for j in 0..b.len() {
                b.index_into(j, &mut mb);
                let k = direct.flat_index(&[ma[0] + mb[0], ma[1] + mb[1]]);
                direct.samples_mut()[k] += a.samples()[i] * b.samples()[j];
            }
        }
        for (x, y) in out.samples().iter().zip(direct.samples()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_inverse_matches_pointwise() {
        let e = Envelope::from_fn(3, 2, 0.25, |x| Complex64::new(1.0 - x[0], x[1] * x[2]));
        let axes = vec![vec![0.1, -0.7], vec![1.3], vec![0.0, 2.0, -3.5]];
        let grid = e.inverse_on_tensor(&axes);
        let mut k = 0;
        for y0 in &axes[0] {
            for y1 in &axes[1] {
                for y2 in &axes[2] {
                    let mut eta = [0.0; 3];
                    let mut direct = Complex64::new(0.0, 0.0);
                    for i in 0..e.len() {
                        e.eta_into(i, &mut eta);
                        let th = y0 * eta[0] + y1 * eta[1] + y2 * eta[2];
                        direct += e.samples()[i] * Complex64::new(th.cos(), th.sin());
                    }
                    direct *= e.inverse_weight();
                    assert!((grid[k] - direct).norm() < 1e-13);
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn mirror_is_reflection() {
        let e = Envelope::from_fn(2, 2, 1.0, |x| Complex64::new(x[0], x[1] + 2.0 * x[0]));
        let m = e.mirrored_conj();
        let k = e.flat_index(&[1, -2]);
        let kr = e.flat_index(&[-1, 2]);
        assert_eq!(m.samples()[k], e.samples()[kr].conj());
    }
}
