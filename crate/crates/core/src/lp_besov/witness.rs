//! Upper bound on `t‖(∂₁−∂₂)P‖_{Ḟ^{-1}_{∞,q}}` from the explicit
//! decomposition `2^{-j} f_j = εt Δ̃_j P + t 2^{-j} Δ̃_j(∂₁−∂₂−ε2^j)P`.

use super::besov::occupied_shells;
use super::cutoffs::CutoffProfile;
use crate::spectral_atoms::{
    apply_symbol, dyadic_block, eval_probe, eval_tensor, AtomError, AtomField, Multiplier, Probe,
};
use num_complex::Complex64;
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessBound {
    /// `εt·sup_x (Σ_j |Δ̃_j P|^q)^{1/q}`.
    pub first: f64,
    /// `t·sup_x (Σ_j |2^{-j}Δ̃_j(∂₁−∂₂−ε2^j)P|^q)^{1/q}`.
    pub second: f64,
    pub total: f64,
    pub tail_allowance: f64,
    pub shells: (i32, i32),
}

/// `Δ̃_j = Δ_{j-1} + Δ_j + Δ_{j+1}`.
pub fn widened_block(field: &AtomField, j: i32, cutoffs: &CutoffProfile) -> AtomField {
    let mut out = AtomField::zero(field.dim);
    out.real = field.real;
    for i in j - 1..=j + 1 {
        out = out.add(&dyadic_block(field, i, cutoffs).field);
    }
    out
}

struct Probes {
    tensors: Vec<(Vec<f64>, Vec<Vec<f64>>)>,
    points: Vec<Probe>,
}

impl Probes {
    fn len(&self) -> usize {
        self.tensors
            .iter()
            .map(|(_, ax)| ax.iter().map(Vec::len).product::<usize>())
            .sum::<usize>()
            + self.points.len()
    }

    fn eval(&self, f: &AtomField) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for (anchor, axes) in &self.tensors {
            out.extend(eval_tensor(f, anchor, axes));
        }
        out.extend(self.points.iter().map(|p| eval_probe(f, p)));
        out
    }
}

fn probes(field: &AtomField) -> Probes {
    let n = field.dim;
    let axes = |r: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..9).map(|i| -r + r * i as f64 / 4.0).collect())
            .collect()
    };
    let mut anchors: Vec<Vec<f64>> = Vec::new();
    for a in &field.atoms {
        let anchor: Vec<f64> = a.shift.iter().map(|s| -s).collect();
        if !anchors.contains(&anchor) {
            anchors.push(anchor);
        }
    }
    let mut tensors = Vec::new();
    let mut points = Vec::new();
    for anchor in &anchors {
        tensors.push((anchor.clone(), axes(2.0)));
        tensors.push((anchor.clone(), axes(0.5)));
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for a in field
            .atoms
            .iter()
            .filter(|a| a.shift.iter().zip(anchor).all(|(s, x)| *s == -*x))
        {
            let n2 = a.carrier.norm_sq();
            if n2 == 0.0 {
                continue;
            }
            let d: Vec<f64> = a.carrier.value().iter().map(|c| c / n2).collect();
            let neg: Vec<f64> = d.iter().map(|x| -x).collect();
            if dirs.len() < 8 && !dirs.contains(&d) && !dirs.contains(&neg) {
                dirs.push(d);
            }
        }
        for d in dirs {
            for m in 0..32 {
                let th = TAU * m as f64 / 32.0;
                points.push(Probe {
                    anchor: anchor.clone(),
                    offset: d.iter().map(|x| th * x).collect(),
                });
            }
        }
    }
    Probes { tensors, points }
}

fn lq_max(acc: &[f64], q: f64) -> f64 {
    let m = acc.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() {
        m
    } else {
        m.powf(1.0 / q)
    }
}

/// Witness bound for `t(∂₁−∂₂)P`; `q ≥ 1`, with `q = ∞` allowed. At `q = 1`
/// this is exactly the `ℓ¹` bound, which dominates every larger `q`.
pub fn triebel_witness_bound(
    product_field: &AtomField,
    t: f64,
    q: f64,
    eps: f64,
    cutoffs: &CutoffProfile,
) -> Result<WitnessBound, AtomError> {
    let Some((j_lo, j_hi)) = occupied_shells(product_field, cutoffs) else {
        return Ok(WitnessBound {
            first: 0.0,
            second: 0.0,
            total: 0.0,
            tail_allowance: 0.0,
            shells: (0, -1),
        });
    };
    let n = product_field.dim;
    let probes = probes(product_field);
    let mut acc_a = vec![0.0; probes.len()];
    let mut acc_b = vec![0.0; probes.len()];
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    w[1] = -1.0;
    let mut tail = 0.0;
    let add = |acc: &mut [f64], vals: &[Complex64], scale: f64| {
        for (a, v) in acc.iter_mut().zip(vals) {
            let x = scale * v.norm();
            if q.is_infinite() {
                *a = a.max(x);
            } else {
                *a += x.powf(q);
            }
        }
    };
    for j in j_lo..=j_hi {
        let block = widened_block(product_field, j, cutoffs);
        if block.is_empty() {
            continue;
        }
        let sj = 2f64.powi(j);
        add(&mut acc_a, &probes.eval(&block), eps * t);
        let ww = w.clone();
        let m = Multiplier::new("d1-d2-eps2^j", vec![], move |p| {
            Complex64::new(-eps * sj, p.dot(&ww))
        });
        let mb = apply_symbol(&block, &m)?;
        add(&mut acc_b, &probes.eval(&mb), t / sj);
        tail += eps * t * block.tail_allowance() + t / sj * mb.tail_allowance();
    }
    let first = lq_max(&acc_a, q);
    let second = lq_max(&acc_b, q);
    Ok(WitnessBound {
        first,
        second,
        total: first + second,
        tail_allowance: tail,
        shells: (j_lo, j_hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_gives_zero() {
        let w = triebel_witness_bound(
            &AtomField::zero(3),
            1.0,
            1.0,
            0.1,
            &CutoffProfile::default(),
        )
        .unwrap();
        assert_eq!(w.total, 0.0);
    }
}
