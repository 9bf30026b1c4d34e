//! Per-shell sup norms and the `Ḃ^{-1}_{∞,q}` aggregate.

use super::cutoffs::CutoffProfile;
use crate::spectral_atoms::{dyadic_block, sup_norm, AtomField, SamplingSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ShellValue {
    pub j: i32,
    /// Sampled `‖Δ_j f‖_∞` (a lower bound on the true sup).
    pub sampled: f64,
    /// Certified allowance from tail bounds in the block.
    pub tail: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellSpectrum {
    pub q: f64,
    pub shells: Vec<ShellValue>,
    /// `(Σ_j 2^{-jq} v_j^q)^{1/q}` of the sampled values.
    pub aggregate: f64,
    /// Same with `sampled + tail`.
    pub upper_aggregate: f64,
}

/// `(Σ 2^{-jq} v_j^q)^{1/q}`, the max of `2^{-j} v_j` when `q = ∞`.
/// Scaled by the largest term so `2^{-j}` at `j ~ 100` does not underflow.
pub fn aggregate(values: &[(i32, f64)], q: f64) -> f64 {
    assert!(q >= 1.0, "q must be at least 1");
    let w: Vec<f64> = values
        .iter()
        .map(|(j, v)| 2f64.powi(-j) * v.abs())
        .collect();
    let m = w.iter().copied().fold(0.0, f64::max);
    if m == 0.0 || q.is_infinite() {
        return m;
    }
    m * w.iter().map(|x| (x / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

impl ShellSpectrum {
    pub fn from_values(q: f64, shells: Vec<ShellValue>) -> Self {
        let s: Vec<(i32, f64)> = shells.iter().map(|v| (v.j, v.sampled)).collect();
        let u: Vec<(i32, f64)> = shells.iter().map(|v| (v.j, v.sampled + v.tail)).collect();
        Self {
            q,
            aggregate: aggregate(&s, q),
            upper_aggregate: aggregate(&u, q),
            shells,
        }
    }

    /// Re-aggregate the same shell values at another `q`.
    pub fn with_q(&self, q: f64) -> Self {
        Self::from_values(q, self.shells.clone())
    }

    pub fn value(&self, j: i32) -> Option<f64> {
        self.shells.iter().find(|v| v.j == j).map(|v| v.sampled)
    }
}

pub fn shell_value(
    field: &AtomField,
    j: i32,
    cutoffs: &CutoffProfile,
    sampling: &SamplingSpec,
) -> ShellValue {
    let block = dyadic_block(field, j, cutoffs);
    let s = sup_norm(&block.field, sampling);
    ShellValue {
        j,
        sampled: s.sampled_max,
        tail: s.tail_allowance,
    }
}

/// Shells `j` whose cutoff `φ_j` can meet the field's support, padded by
/// one on each side; `None` for an empty field.
pub fn occupied_shells(field: &AtomField, cutoffs: &CutoffProfile) -> Option<(i32, i32)> {
    let (lo_edge, hi_edge) = cutoffs.phi_support();
    let mut range: Option<(i32, i32)> = None;
    let mut widen = |lo: f64, hi: f64| {
        let a = (lo / hi_edge).log2().floor() as i32 - 1;
        let b = (hi / lo_edge).log2().ceil() as i32 + 1;
        range = Some(match range {
            None => (a, b),
            Some((x, y)) => (x.min(a), y.max(b)),
        });
    };
    for a in &field.atoms {
        let c = a.carrier.norm();
        // below the lattice spacing only the origin sample remains, and φ_j(0) = 0
        widen(
            (c - a.support_radius).max(a.spacing()),
            c + a.support_radius,
        );
    }
    for t in &field.tails {
        let c = t.carrier.norm();
        widen((c - t.support_radius).max(1e-3), c + t.support_radius);
    }
    range
}

/// Spectrum over every occupied shell: the full `Ḃ^{-1}_{∞,q}` norm up to
/// sampling.
pub fn besov_norm_spectrum(field: &AtomField, q: f64, cutoffs: &CutoffProfile) -> ShellSpectrum {
    match occupied_shells(field, cutoffs) {
        Some((lo, hi)) => besov_shell_spectrum(field, q, &(lo..=hi).collect::<Vec<_>>(), cutoffs),
        None => ShellSpectrum::from_values(q, Vec::new()),
    }
}

/// Shell spectrum with adaptive sampling.
pub fn besov_shell_spectrum(
    field: &AtomField,
    q: f64,
    shells: &[i32],
    cutoffs: &CutoffProfile,
) -> ShellSpectrum {
    shell_spectrum_with(field, q, shells, cutoffs, |_| SamplingSpec::default())
}

/// Shell spectrum with a caller-chosen probe set per shell.
pub fn shell_spectrum_with(
    field: &AtomField,
    q: f64,
    shells: &[i32],
    cutoffs: &CutoffProfile,
    sampling: impl Fn(i32) -> SamplingSpec,
) -> ShellSpectrum {
    let values = shells
        .iter()
        .map(|&j| shell_value(field, j, cutoffs, &sampling(j)))
        .collect();
    ShellSpectrum::from_values(q, values)
}
