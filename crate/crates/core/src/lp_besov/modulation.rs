//! Modulation-space norm `M^{-1}_{∞,1}`: `Σ_k (1+|k|²)^{-1/2} ‖□_k f‖_∞`.

use super::bernstein::bernstein_bound;
use super::cutoffs::smooth_step;
use crate::spectral_atoms::Envelope;
use crate::spectral_atoms::{sup_norm, Atom, AtomField, SamplingSpec};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Tent `τ`: 1 on `|x| ≤ 1/4`, 0 on `|x| ≥ 3/4`, smooth step in between.
pub fn tent(x: f64) -> f64 {
    1.0 - smooth_step((x.abs() - 0.25) / 0.5)
}

/// `τ(x) / Σ_m τ(x - m)`; the translates then sum to one exactly.
pub fn sigma_1d(x: f64) -> f64 {
    if x.abs() >= 0.75 {
        return 0.0;
    }
    let f = x - x.round();
    let total: f64 = (-2..=2).map(|m| tent(f - m as f64)).sum();
    tent(x) / total
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulationNorm {
    pub value: f64,
    pub tail_allowance: f64,
    /// Number of unit cubes touched.
    pub cubes: usize,
}

type CubeKey = (Vec<u64>, Vec<i64>);

/// Cube keys are kept as `(integer part, offset)`; integer parts beyond
/// `2^52` cannot absorb the offset exactly, so it is stored alongside.
fn cube_key(ints: &[f64], off: &[i64]) -> CubeKey {
    if ints.iter().all(|x| x.abs() < 4.0e15) {
        let k: Vec<i64> = ints.iter().zip(off).map(|(a, o)| *a as i64 + o).collect();
        (vec![0; ints.len()], k)
    } else {
        (ints.iter().map(|x| x.to_bits()).collect(), off.to_vec())
    }
}

fn cube_weight(ints: &[f64], off: &[i64]) -> f64 {
    let n2: f64 = ints
        .iter()
        .zip(off)
        .map(|(a, o)| (a + *o as f64).powi(2))
        .sum();
    (1.0 + n2).powf(-0.5)
}

/// Bound on `‖𝓕^{-1}σ‖_{L¹}`, the operator norm of each `□_k` on `L∞`.
pub fn sigma_kernel_l1(dim: usize) -> f64 {
    let h = 1.0 / 32.0;
    let half = (0.75 / h) as usize + 2;
    let env = Envelope::from_fn(dim, half, h, |eta| {
        Complex64::new(eta.iter().map(|x| sigma_1d(*x)).product(), 0.0)
    });
    bernstein_bound(&env, dim as u32 + 1).expect("order above n/2")
}

pub fn modulation_norm(field: &AtomField) -> ModulationNorm {
    let n = field.dim;
    let mut cubes: BTreeMap<CubeKey, (f64, Vec<Atom>)> = BTreeMap::new();
    let mut eta = vec![0.0; n];
    for atom in &field.atoms {
        let (ints, fracs) = atom.carrier.nearest_integer_split();
        let r = atom.support_radius;
        let ranges: Vec<(i64, i64)> = fracs
            .iter()
            .map(|f| ((f - r - 0.75).ceil() as i64, (f + r + 0.75).floor() as i64))
            .collect();
        let count: usize = ranges.iter().map(|(a, b)| (b - a + 1) as usize).product();
        let mut off = vec![0i64; n];
        for c in 0..count {
            let mut rem = c;
            for d in 0..n {
                let w = (ranges[d].1 - ranges[d].0 + 1) as usize;
                off[d] = ranges[d].0 + (rem % w) as i64;
                rem /= w;
            }
            let mut env = atom.envelope.clone();
            for i in 0..env.len() {
                if env.samples()[i].norm() == 0.0 {
                    continue;
                }
                env.eta_into(i, &mut eta);
                let s: f64 = (0..n)
                    .map(|d| sigma_1d(fracs[d] + eta[d] - off[d] as f64))
                    .product();
                env.samples_mut()[i] *= s;
            }
            if env.is_zero() {
                continue;
            }
            let entry = cubes
                .entry(cube_key(&ints, &off))
                .or_insert_with(|| (cube_weight(&ints, &off), Vec::new()));
            entry.1.push(Atom {
                envelope: env,
                ..atom.clone()
            });
        }
    }
    let spec = SamplingSpec::default();
    let value = cubes
        .values()
        .map(|(w, atoms)| {
            w * sup_norm(&AtomField::from_atoms(n, atoms.clone(), false), &spec).sampled_max
        })
        .sum();
    let tail_allowance = if field.tails.is_empty() {
        0.0
    } else {
        let k = sigma_kernel_l1(n);
        field
            .tails
            .iter()
            .map(|t| {
                let span = 2.0 * (t.support_radius + 0.75) + 1.0;
                let touched = span.floor().powi(n as i32);
                let near = (t.carrier.norm() - t.support_radius - (n as f64).sqrt()).max(0.0);
                t.value() * k * touched / (1.0 + near * near).sqrt()
            })
            .sum()
    };
    ModulationNorm {
        value,
        tail_allowance,
        cubes: cubes.len(),
    }
}
