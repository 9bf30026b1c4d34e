//! Periodic fields stored as Fourier coefficients on a cube of wavevectors.

use crate::fftn::CubeFft;
use num_complex::Complex64;
use std::f64::consts::TAU;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    /// Points per axis.
    pub points: usize,
    /// Box side `L`; wavevectors are `2π/L · κ`, `κ ∈ ℤⁿ`.
    pub length: f64,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dk(&self) -> f64 {
        TAU / self.length
    }

    /// Signed integer wavenumber of an FFT index along one axis. The
    /// Nyquist index maps to `-P/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let p = self.points as i64;
        let i = i as i64;
        if i < p / 2 {
            i
        } else {
            i - p
        }
    }

    pub fn kappa_into(&self, idx: usize, out: &mut [i64]) {
        let mut r = idx;
        for d in (0..self.dim).rev() {
            out[d] = self.wavenumber(r % self.points);
            r /= self.points;
        }
    }

    /// Flat index of an integer wavevector, `None` at or beyond Nyquist.
    pub fn index_of(&self, kappa: &[i64]) -> Option<usize> {
        let p = self.points as i64;
        let mut idx = 0usize;
        for &k in kappa {
            if k.abs() >= p / 2 {
                return None;
            }
            idx = idx * self.points + k.rem_euclid(p) as usize;
        }
        Some(idx)
    }

    /// Largest `|κ_d|` kept by the 2/3 rule.
    pub fn dealias_cut(&self) -> i64 {
        self.points as i64 / 3
    }

    pub fn physical_point(&self, idx: usize) -> Vec<f64> {
        let h = self.length / self.points as f64;
        let mut x = vec![0.0; self.dim];
        let mut r = idx;
        for d in (0..self.dim).rev() {
            x[d] = (r % self.points) as f64 * h;
            r /= self.points;
        }
        x
    }
}

/// `u(x) = Σ_κ coeffs[κ] e^{i 2π κ·x / L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            coeffs: vec![ZERO; spec.len()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn add(&self, other: &GridField) -> GridField {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &GridField, s: f64) -> GridField {
        assert_eq!(self.spec, other.spec);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + s * b)
            .collect();
        GridField {
            spec: self.spec,
            coeffs,
        }
    }

    pub fn scaled(&self, s: f64) -> GridField {
        GridField {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiply every mode by `m(ξ)`.
    pub fn apply(&self, m: impl Fn(&[f64]) -> Complex64) -> GridField {
        let spec = self.spec;
        let dk = spec.dk();
        let mut kappa = vec![0i64; spec.dim];
        let mut xi = vec![0.0; spec.dim];
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            if *c == ZERO {
                continue;
            }
            spec.kappa_into(idx, &mut kappa);
            for d in 0..spec.dim {
                xi[d] = kappa[d] as f64 * dk;
            }
            *c *= m(&xi);
        }
        out
    }

    /// `L²` norm over one period (Parseval).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * self.spec.length.powi(self.spec.dim as i32)).sqrt()
    }

    /// Largest `|c_κ + conj(c_{-κ})|`-type asymmetry relative to the largest
    /// coefficient; zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        let spec = self.spec;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut kappa = vec![0i64; spec.dim];
        let mut worst = 0.0f64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            spec.kappa_into(idx, &mut kappa);
            let neg: Vec<i64> = kappa.iter().map(|k| -k).collect();
            if let Some(j) = spec.index_of(&neg) {
                worst = worst.max((c - self.coeffs[j].conj()).norm());
            }
        }
        worst / scale
    }
}

/// Spec plus the transform plan.
pub struct Grid {
    pub spec: GridSpec,
    fft: CubeFft,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Self {
        Self {
            spec,
            fft: CubeFft::new(spec.points, spec.dim),
        }
    }

    pub fn zeros(&self) -> GridField {
        GridField::zeros(self.spec)
    }

    pub fn to_physical(&self, f: &GridField) -> Vec<Complex64> {
        assert_eq!(f.spec, self.spec);
        let mut v = f.coeffs.clone();
        self.fft.inverse(&mut v);
        v
    }

    pub fn from_physical(&self, mut v: Vec<Complex64>) -> GridField {
        self.fft.forward(&mut v);
        let norm = 1.0 / self.spec.len() as f64;
        for z in &mut v {
            *z *= norm;
        }
        GridField {
            spec: self.spec,
            coeffs: v,
        }
    }

    pub fn sup_norm(&self, f: &GridField) -> f64 {
        self.to_physical(f)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Sup norm of the Euclidean length of a vector field.
    pub fn sup_norm_vec(&self, f: &[GridField]) -> f64 {
        let mut acc = vec![0.0; self.spec.len()];
        for c in f {
            for (a, z) in acc.iter_mut().zip(self.to_physical(c)) {
                *a += z.norm_sqr();
            }
        }
        acc.into_iter().fold(0.0, f64::max).sqrt()
    }

    /// Pseudospectral product with the 2/3 mask applied to the result.
    pub fn product(&self, a: &[Complex64], b: &[Complex64]) -> GridField {
        let prod: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let mut out = self.from_physical(prod);
        self.dealias(&mut out);
        out
    }

    pub fn dealias(&self, f: &mut GridField) {
        let spec = self.spec;
        let cut = spec.dealias_cut();
        let mut kappa = vec![0i64; spec.dim];
        for (idx, c) in f.coeffs.iter_mut().enumerate() {
            spec.kappa_into(idx, &mut kappa);
            if kappa.iter().any(|k| k.abs() > cut) {
                *c = ZERO;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_round_trip() {
        let spec = GridSpec {
            dim: 2,
            points: 16,
            length: TAU,
        };
        let grid = Grid::new(spec);
        let mut f = grid.zeros();
        let i = spec.index_of(&[2, -3]).unwrap();
        f.coeffs[i] = Complex64::new(0.5, 0.0);
        let x = grid.to_physical(&f);
        let p = spec.physical_point(37);
        let expect = 0.5 * Complex64::from_polar(1.0, 2.0 * p[0] - 3.0 * p[1]);
        assert!((x[37] - expect).norm() < 1e-14);
        let back = grid.from_physical(x);
        assert!((back.coeffs[i] - f.coeffs[i]).norm() < 1e-15);
    }

    #[test]
    fn nyquist_has_no_index() {
        let spec = GridSpec {
            dim: 1,
            points: 8,
            length: 1.0,
        };
        assert!(spec.index_of(&[4]).is_none());
        assert!(spec.index_of(&[-4]).is_none());
        assert_eq!(spec.index_of(&[-3]), Some(5));
        assert_eq!(spec.wavenumber(5), -3);
    }
}
