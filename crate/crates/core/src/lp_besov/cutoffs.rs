//! Radial cutoffs `ψ`, `φ_j` and `ϱ`.

use crate::spectral_atoms::envelope::Envelope;
use crate::spectral_atoms::symbol::Multiplier;
use num_complex::Complex64;
use std::sync::{Arc, OnceLock};

/// Knobs for the smooth step; the defaults give the classical
/// `ψ = 1` on `|ξ| ≤ 5/4`, `ψ = 0` on `|ξ| ≥ 3/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothnessSpec {
    pub inner: f64,
    pub outer: f64,
    pub table_points: usize,
}

impl Default for SmoothnessSpec {
    fn default() -> Self {
        Self {
            inner: 1.25,
            outer: 1.5,
            table_points: 4096,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CutoffProfile {
    inner: f64,
    outer: f64,
    table: Arc<Vec<(f64, f64)>>,
    kernel_l1: Arc<[OnceLock<f64>; 3]>,
}

/// `h(s) = f(s)/(f(s)+f(1-s))`, `f(s) = e^{-1/s}` for `s > 0`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    // ratio form avoids underflow of both exponentials near the ends
    let d = 1.0 / (1.0 - s) - 1.0 / s;
    1.0 / (1.0 + (-d).exp())
}

pub fn build_cutoffs(spec: SmoothnessSpec) -> CutoffProfile {
    assert!(spec.inner > 0.0 && spec.outer > spec.inner);
    assert!(
        spec.outer <= 2.0 * spec.inner,
        "dyadic plateaus would not overlap"
    );
    let n = spec.table_points.max(2);
    let table = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            (s, smooth_step(s))
        })
        .collect();
    CutoffProfile {
        inner: spec.inner,
        outer: spec.outer,
        table: Arc::new(table),
        kernel_l1: Arc::new([OnceLock::new(), OnceLock::new(), OnceLock::new()]),
    }
}

impl Default for CutoffProfile {
    fn default() -> Self {
        build_cutoffs(SmoothnessSpec::default())
    }
}

impl CutoffProfile {
    pub fn psi_inner(&self) -> f64 {
        self.inner
    }

    pub fn psi_outer(&self) -> f64 {
        self.outer
    }

    /// Tabulated `(s, h(s))` over the transition band.
    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn psi(&self, r: f64) -> f64 {
        if r <= self.inner {
            1.0
        } else if r >= self.outer {
            0.0
        } else {
            1.0 - smooth_step((r - self.inner) / (self.outer - self.inner))
        }
    }

    /// `φ(ξ) = ψ(ξ) - ψ(2ξ)` as a function of `|ξ|`.
    pub fn phi(&self, r: f64) -> f64 {
        self.psi(r) - self.psi(2.0 * r)
    }

    pub fn phi_j(&self, j: i32, r: f64) -> f64 {
        self.phi(r * 2f64.powi(-j))
    }

    /// `ϱ(ξ) = ψ(4ξ)`.
    pub fn rho(&self, r: f64) -> f64 {
        self.psi(4.0 * r)
    }

    pub fn rho_support(&self) -> f64 {
        self.outer / 4.0
    }

    pub fn rho_band(&self) -> f64 {
        (self.outer - self.inner) / 4.0
    }

    /// Open annulus outside which `φ` vanishes, in units of `2^j`.
    pub fn phi_support(&self) -> (f64, f64) {
        (self.inner / 2.0, self.outer)
    }

    /// Closed annulus on which `φ ≡ 1`, in units of `2^j`.
    pub fn phi_plateau(&self) -> (f64, f64) {
        (self.outer / 2.0, self.inner)
    }

    pub fn phi_j_multiplier(&self, j: i32) -> Multiplier {
        let c = self.clone();
        Multiplier::new(format!("phi_{j}"), vec![], move |p| {
            Complex64::new(c.phi_j(j, p.norm_sq().sqrt()), 0.0)
        })
    }

    /// `ϱ̌(0) = (2π)^{-n} ∫ ϱ`, by radial quadrature of the continuous profile.
    pub fn rho_check_origin(&self, dim: usize) -> f64 {
        let r_max = self.rho_support();
        let steps = 20000;
        let dr = r_max / steps as f64;
        // Simpson in r of r^{n-1} ϱ(r)
        let f = |r: f64| r.powi(dim as i32 - 1) * self.rho(r);
        let mut s = f(0.0) + f(r_max);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * dr);
        }
        let radial = s * dr / 3.0;
        let sphere = match dim {
            1 => 2.0,
            2 => std::f64::consts::TAU,
            3 => 4.0 * std::f64::consts::PI,
            _ => panic!("dimension {dim} not supported"),
        };
        sphere * radial / std::f64::consts::TAU.powi(dim as i32)
    }

    /// Upper bound on `‖𝓕^{-1}φ‖_{L¹}`, which bounds every `‖Δ_j‖_{L∞→L∞}`.
    pub fn phi_kernel_l1(&self, dim: usize) -> f64 {
        assert!((1..=3).contains(&dim));
        *self.kernel_l1[dim - 1].get_or_init(|| {
            let h = if dim == 3 { 1.0 / 32.0 } else { 1.0 / 64.0 };
            let half = (self.outer / h).ceil() as usize + 2;
            let env = Envelope::from_fn(dim, half, h, |eta| {
                let r = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
                Complex64::new(self.phi(r), 0.0)
            });
            super::bernstein::bernstein_bound(&env, dim as u32 + 1).expect("L > n/2")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_values() {
        let c = CutoffProfile::default();
        assert_eq!(c.psi(1.0), 1.0);
        assert_eq!(c.psi(1.6), 0.0);
        assert_eq!(c.phi_j(0, 1.0), 1.0);
        let v = c.phi_j(0, 0.7);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn phi_zero_at_point_seven_regression() {
        let c = CutoffProfile::default();
        assert!(
            (c.phi_j(0, 0.7) - 0.697_059_283_965_406_6).abs() < 1e-15,
            "{}",
            c.phi_j(0, 0.7)
        );
    }

    #[test]
    fn step_is_symmetric() {
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn table_has_enough_points() {
        let c = CutoffProfile::default();
        assert!(c.table().len() >= 4096);
        assert_eq!(c.table()[0].1, 0.0);
        assert_eq!(c.table().last().unwrap().1, 1.0);
    }

    #[test]
    fn rho_origin_in_2d() {
        // ϱ ≡ 1 on |ξ| ≤ 5/16 and vanishes past 3/8
        let c = CutoffProfile::default();
        let v = c.rho_check_origin(2);
        let lo = std::f64::consts::PI * (5.0f64 / 16.0).powi(2) / std::f64::consts::TAU.powi(2);
        let hi = std::f64::consts::PI * (3.0f64 / 8.0).powi(2) / std::f64::consts::TAU.powi(2);
        assert!(v > lo && v < hi);
    }
}
