//! Depositing atom fields onto the periodic grid.

use super::field::{GridField, GridSpec};
use super::OracleError;
use crate::spectral_atoms::carrier::cis_dot;
use crate::spectral_atoms::AtomField;
use num_complex::Complex64;
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct Deposit {
    pub field: GridField,
    /// Bound on the sup-norm error from snapping frequencies to the lattice
    /// (envelope modulus times the worst phase drift across the box).
    pub deposit_error: f64,
    /// Sum of tail certificates that were not rendered.
    pub tail_allowance: f64,
}

/// Renders `field` as `Σ_m phase·(h/2π)^n g_m e^{iξ_m·(x+s)}` on the grid.
/// When the envelope lattice equals `2π/L` this is the exact periodization
/// of each atom.
pub fn atoms_to_grid(field: &AtomField, spec: GridSpec) -> Result<Deposit, OracleError> {
    if field.dim != spec.dim {
        return Err(OracleError::Dimension(field.dim, spec.dim));
    }
    let n = spec.dim;
    let dk = spec.dk();
    let half = spec.points as i64 / 2;
    let mut out = GridField::zeros(spec);
    let mut err = 0.0;
    let mut eta = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let mut kappa = vec![0i64; n];
    for atom in &field.atoms {
        let c = atom.carrier.value();
        let h = atom.spacing();
        let w = (h / TAU).powi(n as i32);
        let base = atom.phase * atom.carrier.cis_dot(&atom.shift);
        for i in 0..atom.envelope.len() {
            let g = atom.envelope.samples()[i];
            if g == Complex64::new(0.0, 0.0) {
                continue;
            }
            atom.envelope.eta_into(i, &mut eta);
            let mut drift = 0.0;
            for d in 0..n {
                xi[d] = c[d] + eta[d];
                let q = (xi[d] / dk).round();
                kappa[d] = q as i64;
                drift += (xi[d] - q * dk).abs();
            }
            let worst = kappa.iter().map(|k| k.abs()).max().unwrap_or(0);
            if worst >= half {
                let mut need = 2 * (worst as usize + 1);
                need = need.next_power_of_two();
                return Err(OracleError::Nyquist {
                    required: need,
                    points: spec.points,
                });
            }
            let idx = spec.index_of(&kappa).expect("checked against Nyquist");
            let coef = base * w * g * cis_dot(&eta, &atom.shift);
            out.coeffs[idx] += coef;
            err += coef.norm() * (drift * spec.length / 2.0).min(2.0);
        }
    }
    Ok(Deposit {
        field: out,
        deposit_error: err,
        tail_allowance: field.tail_allowance(),
    })
}
