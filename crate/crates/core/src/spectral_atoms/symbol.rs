//! Fourier multipliers evaluated at `ξ = carrier + η`.

use super::carrier::{compensated_sum, Carrier};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Squared frequencies below this are treated as the exact origin.
pub const ORIGIN_TOL_SQ: f64 = 1e-24;

/// Cached data about a carrier for repeated symbol evaluation.
#[derive(Clone, Debug)]
pub struct CarrierInfo {
    pub carrier: Carrier,
    pub value: Vec<f64>,
    pub norm_sq: f64,
}

impl CarrierInfo {
    pub fn new(carrier: &Carrier) -> Self {
        Self {
            carrier: carrier.clone(),
            value: carrier.value(),
            norm_sq: carrier.norm_sq(),
        }
    }
}

/// One frequency sample.
pub struct FreqPoint<'a> {
    pub info: &'a CarrierInfo,
    pub eta: &'a [f64],
}

impl FreqPoint<'_> {
    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn xi(&self, d: usize) -> f64 {
        self.info.value[d] + self.eta[d]
    }

    /// `w·ξ`, accurate under cancellation inside the carrier.
    pub fn dot(&self, w: &[f64]) -> f64 {
        let c = self.info.carrier.dot(w);
        compensated_sum(std::iter::once(c).chain(self.eta.iter().zip(w).map(|(e, x)| e * x)))
    }

    pub fn norm_sq(&self) -> f64 {
        let ce: f64 = self
            .info
            .value
            .iter()
            .zip(self.eta)
            .map(|(c, e)| c * e)
            .sum();
        let ee: f64 = self.eta.iter().map(|e| e * e).sum();
        (self.info.norm_sq + 2.0 * ce + ee).max(0.0)
    }

    pub fn is_origin(&self) -> bool {
        self.norm_sq() <= ORIGIN_TOL_SQ
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Singularity {
    /// Discontinuous or unbounded at `ξ = 0`; the symbol supplies a
    /// zero-mode convention there.
    Origin,
    /// Unbounded on the hyperplane `ξ_axis = 0`.
    Hyperplane(usize),
}

type SymbolFn = dyn Fn(&FreqPoint) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub struct Multiplier {
    label: String,
    singular: Vec<Singularity>,
    f: Arc<SymbolFn>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiplier({})", self.label)
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Multiplier {
    pub fn new(
        label: impl Into<String>,
        singular: Vec<Singularity>,
        f: impl Fn(&FreqPoint) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            singular,
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singular
    }

    pub fn eval(&self, p: &FreqPoint) -> Complex64 {
        (self.f)(p)
    }

    /// Pointwise product `self · other`.
    pub fn then(&self, other: &Multiplier) -> Multiplier {
        let a = self.f.clone();
        let b = other.f.clone();
        let mut singular = self.singular.clone();
        for s in &other.singular {
            if !singular.contains(s) {
                singular.push(s.clone());
            }
        }
        Multiplier {
            label: format!("{}·{}", self.label, other.label),
            singular,
            f: Arc::new(move |p| a(p) * b(p)),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Multiplier {
        let a = self.f.clone();
        Multiplier {
            label: format!("({c})·{}", self.label),
            singular: self.singular.clone(),
            f: Arc::new(move |p| c * a(p)),
        }
    }

    pub fn identity() -> Multiplier {
        Multiplier::new("1", vec![], |_| re(1.0))
    }

    /// `∂_i`, symbol `iξ_i`.
    pub fn derivative(i: usize) -> Multiplier {
        Multiplier::new(format!("d{}", i + 1), vec![], move |p| I * p.xi(i))
    }

    /// `w·∇`, symbol `i w·ξ`.
    pub fn directional(w: Vec<f64>) -> Multiplier {
        Multiplier::new(format!("dir{w:?}"), vec![], move |p| I * p.dot(&w))
    }

    /// `Δ`, symbol `-|ξ|²`.
    pub fn laplacian() -> Multiplier {
        Multiplier::new("lap", vec![], |p| re(-p.norm_sq()))
    }

    /// `e^{tΔ}`.
    pub fn heat(t: f64) -> Multiplier {
        Multiplier::new(format!("heat({t})"), vec![], move |p| {
            re((-t * p.norm_sq()).exp())
        })
    }

    /// `e^{tΔ} - 1`, through `expm1` so small `t|ξ|²` keeps full precision.
    pub fn heat_minus_one(t: f64) -> Multiplier {
        Multiplier::new(format!("heat-1({t})"), vec![], move |p| {
            re((-t * p.norm_sq()).exp_m1())
        })
    }

    /// `Δ^{-1}(e^{tΔ} - 1)`, entire; equal to `t` at the origin.
    pub fn duhamel_heat(t: f64) -> Multiplier {
        Multiplier::new(format!("duhamel({t})"), vec![], move |p| {
            re(duhamel_factor(t, p.norm_sq()))
        })
    }

    /// Truncated series `Σ_{r=1}^{r_max} t^r (-|ξ|²)^{r-1} / r!` of `Δ^{-1}(e^{tΔ}-1)`.
    pub fn duhamel_series(t: f64, r_min: u32, r_max: u32) -> Multiplier {
        Multiplier::new(format!("series({t},{r_min}..{r_max})"), vec![], move |p| {
            let x = -t * p.norm_sq();
            let mut term = t; // r = 1
            let mut sum = 0.0;
            for r in 1..=r_max {
                if r > 1 {
                    term *= x / r as f64;
                }
                if r >= r_min {
                    sum += term;
                }
            }
            re(sum)
        })
    }

    /// `∂_α∂_β/Δ`, symbol `ξ_αξ_β/|ξ|²`, zero at the origin.
    pub fn riesz(a: usize, b: usize) -> Multiplier {
        Multiplier::new(
            format!("R{}{}", a + 1, b + 1),
            vec![Singularity::Origin],
            move |p| {
                let n2 = p.norm_sq();
                if n2 <= ORIGIN_TOL_SQ {
                    re(0.0)
                } else {
                    re(p.xi(a) * p.xi(b) / n2)
                }
            },
        )
    }

    /// Inverse Laplacian, zero at the origin.
    pub fn inverse_laplacian() -> Multiplier {
        Multiplier::new("invlap", vec![Singularity::Origin], |p| {
            let n2 = p.norm_sq();
            if n2 <= ORIGIN_TOL_SQ {
                re(0.0)
            } else {
                re(-1.0 / n2)
            }
        })
    }

    /// `-ξ_1/ξ_2`, turns `û₁` into `û₂` for divergence-free data.
    pub fn second_component() -> Multiplier {
        Multiplier::new("-xi1/xi2", vec![Singularity::Hyperplane(1)], |p| {
            re(-p.xi(0) / p.xi(1))
        })
    }

    /// `(ξ₂ - ξ₁)/ξ₂`, the symbol of `u⁰₁ ↦ u⁰₁ + u⁰₂`.
    pub fn first_plus_second() -> Multiplier {
        let mut w = vec![0.0; 2];
        w[0] = -1.0;
        w[1] = 1.0;
        Multiplier::new(
            "(xi2-xi1)/xi2",
            vec![Singularity::Hyperplane(1)],
            move |p| {
                let mut ww = w.clone();
                ww.resize(p.dim(), 0.0);
                re(p.dot(&ww) / p.xi(1))
            },
        )
    }

    /// Component `alpha` of `ℙ div` acting on a symmetric tensor:
    /// `Σ_β iξ_β Π_{αβ} - iξ_α Σ_{βγ} ξ_βξ_γ Π_{βγ}/|ξ|²`.
    /// Returns the coefficient of `Π_{βγ}` (β ≤ γ, off-diagonal counted twice).
    pub fn leray_div_coefficients(p: &FreqPoint, alpha: usize, active: usize) -> Vec<Complex64> {
        let n2 = p.norm_sq();
        let xa = p.xi(alpha);
        let mut out = Vec::with_capacity(active * (active + 1) / 2);
        for b in 0..active {
            for g in b..active {
                let xb = p.xi(b);
                let xg = p.xi(g);
                let mult = if b == g { 1.0 } else { 2.0 };
                let proj = if n2 <= ORIGIN_TOL_SQ {
                    0.0
                } else {
                    xa * xb * xg / n2
                };
                let mut direct = 0.0;
                if b == alpha {
                    direct += xg;
                }
                if g == alpha && b != g {
                    direct += xb;
                }
                out.push(I * (direct - mult * proj));
            }
        }
        out
    }
}

/// `(1 - e^{-t s})/s` with its limit `t` at `s = 0`.
pub fn duhamel_factor(t: f64, s: f64) -> f64 {
    let x = t * s;
    if x.abs() < 1e-8 {
        t * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        -(-x).exp_m1() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(c: Vec<f64>, eta: Vec<f64>) -> (CarrierInfo, Vec<f64>) {
        (CarrierInfo::new(&Carrier::from_vec(c)), eta)
    }

    #[test]
    fn riesz_center_value_on_diagonal() {
        let k = 20;
        let v = 2f64.powi(k) / 3f64.sqrt();
        let (info, eta) = point(vec![v, v, v], vec![0.0; 3]);
        let p = FreqPoint {
            info: &info,
            eta: &eta,
        };
        let r = Multiplier::riesz(0, 1).eval(&p);
        assert!((r.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn heat_on_sphere() {
        let k = 12;
        let t = 0.02f64.powi(2) * 2f64.powi(-2 * k);
        let (info, eta) = point(vec![0.0, 2f64.powi(k)], vec![0.0, 0.0]);
        let p = FreqPoint {
            info: &info,
            eta: &eta,
        };
        let h = Multiplier::heat(t).eval(&p);
        assert!((h.re - (-0.0004f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn leray_coefficients_kill_gradients() {
        // Π_{βγ} = ξ_β ξ_γ φ gives ℙ div = ℙ(ξ |ξ|² φ) = 0
        let (info, eta) = point(vec![1.3, -0.4, 2.2], vec![0.1, 0.0, -0.05]);
        let p = FreqPoint {
            info: &info,
            eta: &eta,
        };
        let xi: Vec<f64> = (0..3).map(|d| p.xi(d)).collect();
        for alpha in 0..3 {
            let c = Multiplier::leray_div_coefficients(&p, alpha, 3);
            let mut k = 0;
            let mut total = Complex64::new(0.0, 0.0);
            for b in 0..3 {
                for g in b..3 {
                    total += c[k] * xi[b] * xi[g];
                    k += 1;
                }
            }
            assert!(total.norm() < 1e-13);
        }
    }

    #[test]
    fn duhamel_series_matches_closed_form() {
        let (info, eta) = point(vec![30.0, 40.0], vec![0.0, 0.0]);
        let p = FreqPoint {
            info: &info,
            eta: &eta,
        };
        let t = 1e-4;
        let a = Multiplier::duhamel_heat(t).eval(&p).re;
        let b = Multiplier::duhamel_series(t, 1, 30).eval(&p).re;
        assert!(((a - b) / a).abs() < 1e-14);
    }
}
