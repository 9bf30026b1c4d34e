//! Lei–Lin norm `∫ |ξ|^{-1} |f̂(ξ)| dξ`, midpoint rule on envelope lattices.

use super::NormError;
use crate::spectral_atoms::carrier::cis_dot;
use crate::spectral_atoms::{AtomField, CarrierInfo, FreqPoint};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct LeiLinNorm {
    /// Atoms sharing carrier and lattice summed before taking `|·|`.
    pub merged: f64,
    /// Sum of per-atom integrals (upper bound).
    pub triangle: f64,
}

pub fn lei_lin_norm(field: &AtomField) -> Result<LeiLinNorm, NormError> {
    let n = field.dim;
    for (index, a) in field.atoms.iter().enumerate() {
        if a.carrier.norm() <= a.support_radius {
            return Err(NormError::OriginInSupport {
                index,
                radius: a.support_radius,
            });
        }
    }
    let mut eta = vec![0.0; n];
    let mut triangle = 0.0;
    // groups of atom indices with the same carrier and lattice
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, a) in field.atoms.iter().enumerate() {
        let h = a.spacing();
        let w = h.powi(n as i32);
        let info = CarrierInfo::new(&a.carrier);
        for s in 0..a.envelope.len() {
            let g = a.envelope.samples()[s];
            if g.norm() == 0.0 {
                continue;
            }
            a.envelope.eta_into(s, &mut eta);
            let r = FreqPoint {
                info: &info,
                eta: &eta,
            }
            .norm_sq()
            .sqrt();
            triangle += w * g.norm() * a.phase.norm() / r;
        }
        match groups.iter_mut().find(|grp| {
            let b = &field.atoms[grp[0]];
            b.spacing() == h && b.carrier.same_as(&a.carrier)
        }) {
            Some(grp) => grp.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut merged = 0.0;
    for grp in &groups {
        let first = &field.atoms[grp[0]];
        let h = first.spacing();
        let w = h.powi(n as i32);
        let half = grp
            .iter()
            .map(|&i| field.atoms[i].envelope.half())
            .max()
            .unwrap_or(0);
        let info = CarrierInfo::new(&first.carrier);
        let mut acc = first.envelope.padded(half);
        for z in acc.samples_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        for &i in grp {
            let a = &field.atoms[i];
            let e = a.envelope.padded(half);
            let base = a.phase * a.carrier.cis_dot(&a.shift);
            for s in 0..e.len() {
                let g = e.samples()[s];
                if g.norm() == 0.0 {
                    continue;
                }
                e.eta_into(s, &mut eta);
                acc.samples_mut()[s] += base * g * cis_dot(&eta, &a.shift);
            }
        }
        for s in 0..acc.len() {
            let z = acc.samples()[s];
            if z.norm() == 0.0 {
                continue;
            }
            acc.eta_into(s, &mut eta);
            merged += w * z.norm()
                / FreqPoint {
                    info: &info,
                    eta: &eta,
                }
                .norm_sq()
                .sqrt();
        }
    }
    Ok(LeiLinNorm { merged, triangle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_besov::cutoffs::CutoffProfile;
    use crate::spectral_atoms::{make_atom, Carrier, EnvelopeGrid, EnvelopeSymbol};

    #[test]
    fn zero_field_has_zero_norm() {
        let v = lei_lin_norm(&AtomField::zero(3)).unwrap();
        assert_eq!((v.merged, v.triangle), (0.0, 0.0));
    }

    #[test]
    fn origin_in_support_is_rejected() {
        let c = CutoffProfile::default();
        let a = make_atom(
            Carrier::zero(2),
            vec![0.0, 0.0],
            &EnvelopeSymbol::rho(&c),
            EnvelopeGrid::sized(1.0 / 8.0),
        )
        .unwrap();
        let f = AtomField::from_atoms(2, vec![a], false);
        assert!(matches!(
            lei_lin_norm(&f),
            Err(NormError::OriginInSupport { .. })
        ));
    }

    #[test]
    fn opposite_atoms_cancel_in_the_merged_version() {
        let c = CutoffProfile::default();
        let a = make_atom(
            Carrier::from_vec(vec![5.0, 1.0]),
            vec![0.3, 0.0],
            &EnvelopeSymbol::rho(&c),
            EnvelopeGrid::sized(1.0 / 16.0),
        )
        .unwrap();
        let f = AtomField::from_atoms(2, vec![a.clone()], false);
        let one = lei_lin_norm(&f).unwrap();
        assert!((one.merged - one.triangle).abs() < 1e-13 * one.triangle);
        let f2 = AtomField::from_atoms(2, vec![a.clone(), a], false).add(&f.scaled(-2.0));
        let v = lei_lin_norm(&f2).unwrap();
        assert!(v.merged < 1e-14 * v.triangle);
    }
}
