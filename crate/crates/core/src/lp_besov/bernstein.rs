use crate::fftn::{fast_size, CubeFft};
use crate::spectral_atoms::envelope::Envelope;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BernsteinError {
    #[error("derivative order L = {l} must exceed n/2 = {half}")]
    OrderTooLow { l: u32, half: f64 },
}

fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => TAU,
        3 => 4.0 * PI,
        _ => panic!("dimension {n} not supported"),
    }
}

/// `‖∂_axis^L ρ‖₂` by spectral differentiation on a zero-padded cube.
fn derivative_l2(env: &Envelope, axis: usize, order: u32) -> f64 {
    let n = env.dim();
    let side = fast_size(2 * env.side());
    let fft = CubeFft::new(side, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); fft.len()];
    let mut m = [0i64; 3];
    for i in 0..env.len() {
        env.index_into(i, &mut m[..n]);
        let mut idx = 0usize;
        for d in 0..n {
            idx = idx * side + (m[d] + env.half() as i64) as usize;
        }
        buf[idx] = env.samples()[i];
    }
    fft.forward(&mut buf);
    let stride = side.pow((n - 1 - axis) as u32);
    let dk = TAU / (side as f64 * env.spacing());
    for (idx, z) in buf.iter_mut().enumerate() {
        let f = (idx / stride) % side;
        let freq = if f <= side / 2 {
            f as f64
        } else {
            f as f64 - side as f64
        };
        let k = freq * dk;
        *z *= Complex64::new(0.0, k).powu(order);
    }
    fft.inverse(&mut buf);
    let norm = 1.0 / fft.len() as f64;
    let h = env.spacing().powi(n as i32);
    (buf.iter().map(|z| (z * norm).norm_sqr()).sum::<f64>() * h).sqrt()
}

/// Right-hand side of Bernstein's multiplier inequality with an explicit
/// constant, so that it is a genuine upper bound for `‖𝓕^{-1}ρ‖_{L¹}` under
/// `𝓕^{-1}ρ(x) = (2π)^{-n}∫ e^{ixξ}ρ(ξ)dξ`:
/// `K(n,L)·‖ρ‖₂^{1-θ}·n^{θ(L-1)/2}·Σ_i ‖∂_i^L ρ‖₂^θ`, `θ = n/2L`.
pub fn bernstein_bound(samples: &Envelope, order: u32) -> Result<f64, BernsteinError> {
    let n = samples.dim();
    if (order as f64) <= n as f64 / 2.0 {
        return Err(BernsteinError::OrderTooLow {
            l: order,
            half: n as f64 / 2.0,
        });
    }
    let theta = n as f64 / (2.0 * order as f64);
    let h = samples.spacing().powi(n as i32);
    let a = (samples.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * h).sqrt();
    if a == 0.0 {
        return Ok(0.0);
    }
    let sum_b: f64 = (0..n)
        .map(|i| derivative_l2(samples, i, order).powf(theta))
        .sum();
    let nf = n as f64;
    let k = TAU.powf(-nf / 2.0)
        * unit_sphere_area(n).sqrt()
        * (1.0 / nf.sqrt() + 1.0 / (2.0 * order as f64 - nf).sqrt());
    Ok(k * a.powf(1.0 - theta) * nf.powf(theta * (order as f64 - 1.0) / 2.0) * sum_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_besov::cutoffs::CutoffProfile;

    #[test]
    fn low_order_rejected() {
        let e = Envelope::zeros(2, 2, 0.5);
        assert!(bernstein_bound(&e, 1).is_err());
    }

    #[test]
    fn homogeneous_in_rho() {
        let c = CutoffProfile::default();
        let e = Envelope::from_fn(2, 16, 1.0 / 32.0, |x| {
            Complex64::new(c.rho((x[0] * x[0] + x[1] * x[1]).sqrt()), 0.0)
        });
        let mut e3 = e.clone();
        e3.scale(Complex64::new(3.0, 0.0));
        let b1 = bernstein_bound(&e, 2).unwrap();
        let b3 = bernstein_bound(&e3, 2).unwrap();
        assert!((b3 / b1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_gaussian() {
        // ∂_x of e^{-x²/2σ²} has L² norm² = √π/(2σ) in 1D
        let sigma = 0.5;
        let e = Envelope::from_fn(1, 400, 0.01, |x| {
            Complex64::new((-x[0] * x[0] / (2.0 * sigma * sigma)).exp(), 0.0)
        });
        let got = derivative_l2(&e, 0, 1);
        let want = (PI.sqrt() / (2.0 * sigma)).sqrt();
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}
