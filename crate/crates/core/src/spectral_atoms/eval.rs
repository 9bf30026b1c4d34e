//! Spatial evaluation and sampled sup norms.
//!
//! Points are given relative to an anchor (usually `-shift` of some atom) so
//! that the local coordinate `y = x + shift` is exact even when shifts are of
//! size `2^{k/2}` and carriers of size `2^k`.

use super::atom::{Atom, AtomField};
use super::carrier::cis_dot_parts;
use num_complex::Complex64;
use std::f64::consts::TAU;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub anchor: Vec<f64>,
    pub offset: Vec<f64>,
}

impl Probe {
    pub fn at(x: Vec<f64>) -> Self {
        let n = x.len();
        Self {
            anchor: x,
            offset: vec![0.0; n],
        }
    }
}

/// `anchor + shift`, exactly zero when the anchor is the atom's own centre.
fn relative(anchor: &[f64], shift: &[f64]) -> Vec<f64> {
    anchor
        .iter()
        .zip(shift)
        .map(|(a, s)| if *a == -*s { 0.0 } else { a + s })
        .collect()
}

fn eval_atom(atom: &Atom, probe: &Probe) -> Complex64 {
    let rel = relative(&probe.anchor, &atom.shift);
    let y: Vec<f64> = rel.iter().zip(&probe.offset).map(|(r, o)| r + o).collect();
    atom.eval_local(&y)
}

pub fn eval_probe(field: &AtomField, probe: &Probe) -> Complex64 {
    field.atoms.iter().map(|a| eval_atom(a, probe)).sum()
}

/// Values at plain points `x` (atom_sample).
pub fn atom_sample(field: &AtomField, points: &[Vec<f64>]) -> Vec<Complex64> {
    points
        .iter()
        .map(|x| eval_probe(field, &Probe::at(x.clone())))
        .collect()
}

/// Field values on the tensor grid `anchor + axes[0] × … × axes[n-1]`.
pub fn eval_tensor(field: &AtomField, anchor: &[f64], axes: &[Vec<f64>]) -> Vec<Complex64> {
    let n = field.dim;
    let total: usize = axes.iter().map(Vec::len).product();
    let mut out = vec![ZERO; total];
    for atom in &field.atoms {
        let rel = relative(anchor, &atom.shift);
        let w = atom.window();
        let local: Vec<Vec<f64>> = (0..n)
            .map(|d| axes[d].iter().map(|o| rel[d] + o).collect())
            .collect();
        let outside = local.iter().any(|ax| ax.iter().all(|y| y.abs() > w));
        if outside {
            continue;
        }
        let env = atom.envelope.inverse_on_tensor(&local);
        // carrier phase factorises over axes
        let phases: Vec<Vec<Complex64>> = (0..n)
            .map(|d| {
                let parts: Vec<Vec<f64>> =
                    atom.carrier.parts().iter().map(|p| vec![p[d]]).collect();
                local[d]
                    .iter()
                    .map(|y| {
                        if y.abs() > w {
                            ZERO
                        } else {
                            cis_dot_parts(&parts, &[*y])
                        }
                    })
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        for (k, v) in env.iter().enumerate() {
            let mut r = k;
            for d in (0..n).rev() {
                idx[d] = r % axes[d].len();
                r /= axes[d].len();
            }
            let mut ph = atom.phase;
            for d in 0..n {
                ph *= phases[d][idx[d]];
            }
            out[k] += ph * v;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingSpec {
    /// Probe centres; `None` means every distinct `-shift` in the field.
    pub anchors: Option<Vec<Vec<f64>>>,
    /// Half-width of the local tensor grid around each anchor.
    pub radius: f64,
    /// Points per axis of the local grid (odd keeps the anchor itself).
    pub points: usize,
    /// Adaptive refinement (grid ×4 finer around the running max, then a
    /// phase sweep along carrier directions). Off gives a fixed probe set.
    pub refine: bool,
    /// Phase-sweep samples per direction.
    pub phase_sweep: usize,
    /// Directions `ξ_c/|ξ_c|²` swept at offset 0 of every anchor.
    pub phase_dirs: Vec<Vec<f64>>,
    /// Extra offsets probed at every anchor.
    pub extra_offsets: Vec<Vec<f64>>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            anchors: None,
            radius: 2.0,
            points: 9,
            refine: true,
            phase_sweep: 32,
            phase_dirs: Vec::new(),
            extra_offsets: Vec::new(),
        }
    }
}

impl SamplingSpec {
    /// Fixed probe set: coarse grid, a ×4 finer grid at the anchor, and phase
    /// sweeps along the given carriers. Identical sets across fields make the
    /// sampled norms obey the triangle inequality exactly.
    pub fn fixed(anchors: Vec<Vec<f64>>, carriers: &[Vec<f64>]) -> Self {
        let dirs = carriers
            .iter()
            .filter_map(|c| {
                let n2: f64 = c.iter().map(|x| x * x).sum();
                (n2 > 0.0).then(|| c.iter().map(|x| x / n2).collect())
            })
            .collect();
        Self {
            anchors: Some(anchors),
            refine: false,
            phase_dirs: dirs,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupNorm {
    pub sampled_max: f64,
    pub tail_allowance: f64,
    pub argmax: Option<Probe>,
}

fn grid_axes(center: &[f64], radius: f64, points: usize) -> Vec<Vec<f64>> {
    center
        .iter()
        .map(|c| {
            if points <= 1 {
                vec![*c]
            } else {
                (0..points)
                    .map(|i| c - radius + 2.0 * radius * i as f64 / (points - 1) as f64)
                    .collect()
            }
        })
        .collect()
}

fn tensor_max(field: &AtomField, anchor: &[f64], axes: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let vals = eval_tensor(field, anchor, axes);
    let n = axes.len();
    let mut best = (0.0f64, 0usize);
    for (k, v) in vals.iter().enumerate() {
        let a = v.norm();
        if a > best.0 {
            best = (a, k);
        }
    }
    let mut off = vec![0.0; n];
    let mut r = best.1;
    for d in (0..n).rev() {
        off[d] = axes[d][r % axes[d].len()];
        r /= axes[d].len();
    }
    (best.0, off)
}

fn distinct_anchors(field: &AtomField) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for a in &field.atoms {
        let anchor: Vec<f64> = a.shift.iter().map(|s| -s).collect();
        if !out.contains(&anchor) {
            out.push(anchor);
        }
    }
    out
}

fn carrier_directions(field: &AtomField, anchor: &[f64], limit: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for a in &field.atoms {
        let rel = relative(anchor, &a.shift);
        if rel.iter().any(|r| r.abs() > a.window()) {
            continue;
        }
        let c = a.carrier.value();
        let n2: f64 = a.carrier.norm_sq();
        if n2 == 0.0 {
            continue;
        }
        let d: Vec<f64> = c.iter().map(|x| x / n2).collect();
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        if !dirs.contains(&d) && !dirs.contains(&neg) {
            dirs.push(d);
        }
        if dirs.len() >= limit {
            break;
        }
    }
    dirs
}

fn sweep(
    field: &AtomField,
    anchor: &[f64],
    base: &[f64],
    dir: &[f64],
    count: usize,
    best: &mut (f64, Option<Probe>),
) {
    for m in 0..count {
        let theta = TAU * m as f64 / count as f64;
        let offset: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + theta * d).collect();
        let probe = Probe {
            anchor: anchor.to_vec(),
            offset,
        };
        let v = eval_probe(field, &probe).norm();
        if v > best.0 {
            *best = (v, Some(probe));
        }
    }
}

pub fn sup_norm(field: &AtomField, spec: &SamplingSpec) -> SupNorm {
    let tail_allowance = field.tail_allowance();
    if field.atoms.is_empty() {
        return SupNorm {
            sampled_max: 0.0,
            tail_allowance,
            argmax: None,
        };
    }
    let anchors = spec
        .anchors
        .clone()
        .unwrap_or_else(|| distinct_anchors(field));
    let n = field.dim;
    let zero = vec![0.0; n];
    let mut best: (f64, Option<Probe>) = (0.0, None);
    let consider = |v: f64, anchor: &[f64], off: Vec<f64>, best: &mut (f64, Option<Probe>)| {
        if v > best.0 {
            *best = (
                v,
                Some(Probe {
                    anchor: anchor.to_vec(),
                    offset: off,
                }),
            );
        }
    };
    for anchor in &anchors {
        let coarse = grid_axes(&zero, spec.radius, spec.points);
        let (v, off) = tensor_max(field, anchor, &coarse);
        consider(v, anchor, off.clone(), &mut best);
        let fine_step = spec.radius / 4.0;
        let centre = if spec.refine { off } else { zero.clone() };
        let fine = grid_axes(&centre, fine_step, spec.points);
        let (v2, off2) = tensor_max(field, anchor, &fine);
        consider(v2, anchor, off2.clone(), &mut best);
        for o in &spec.extra_offsets {
            let v = eval_probe(
                field,
                &Probe {
                    anchor: anchor.clone(),
                    offset: o.clone(),
                },
            )
            .norm();
            consider(v, anchor, o.clone(), &mut best);
        }
        for d in &spec.phase_dirs {
            sweep(field, anchor, &zero, d, spec.phase_sweep, &mut best);
        }
        if spec.refine {
            let base = if v2 >= v { off2 } else { centre };
            for d in carrier_directions(field, anchor, 8) {
                sweep(field, anchor, &base, &d, spec.phase_sweep, &mut best);
                sweep(field, anchor, &zero, &d, spec.phase_sweep, &mut best);
            }
        }
    }
    SupNorm {
        sampled_max: best.0,
        tail_allowance,
        argmax: best.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_besov::cutoffs::CutoffProfile;
    use crate::spectral_atoms::atom::{make_atom, EnvelopeGrid, EnvelopeSymbol};
    use crate::spectral_atoms::carrier::Carrier;

    #[test]
    fn tensor_matches_pointwise() {
        let c = CutoffProfile::default();
        let sym = EnvelopeSymbol::rho(&c);
        let a = make_atom(
            Carrier::from_vec(vec![3.0, -1.5]),
            vec![0.5, 2.0],
            &sym,
            EnvelopeGrid::sized(1.0 / 16.0),
        )
        .unwrap();
        let f = AtomField::from_atoms(2, vec![a], false);
        let anchor = vec![-0.5, -2.0];
        let axes = vec![vec![-1.0, 0.0, 0.7], vec![0.3, -2.2]];
        let t = eval_tensor(&f, &anchor, &axes);
        let mut k = 0;
        for x in &axes[0] {
            for y in &axes[1] {
                let p = eval_probe(
                    &f,
                    &Probe {
                        anchor: anchor.clone(),
                        offset: vec![*x, *y],
                    },
                );
                assert!((p - t[k]).norm() < 1e-14);
                k += 1;
            }
        }
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let f = AtomField::zero(3);
        let s = sup_norm(&f, &SamplingSpec::default());
        assert_eq!((s.sampled_max, s.tail_allowance), (0.0, 0.0));
        assert!(atom_sample(&f, &[vec![1.0, 2.0, 3.0]])[0] == ZERO);
    }
}
