use super::geometry::GeometryTable;
use super::params::ConstructionParams;
use super::InflationError;
use crate::lp_besov::CutoffProfile;
use crate::spectral_atoms::{
    make_atom, AtomField, AtomVectorField, Carrier, EnvelopeGrid, EnvelopeSymbol, Multiplier,
};

/// `Φ^{λμ}_l`: carrier `λc_k + μb_l`, shift `a_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AtomTag {
    pub lambda: i8,
    pub mu: i8,
    pub l: i32,
}

impl AtomTag {
    pub fn label(&self) -> String {
        let s = |x: i8| if x > 0 { '+' } else { '-' };
        format!("Phi{}{}_{}", s(self.lambda), s(self.mu), self.l)
    }
}

#[derive(Clone, Debug)]
pub struct InitialData {
    pub params: ConstructionParams,
    pub geometry: GeometryTable,
    /// One tag per atom; every component uses this layout.
    pub tags: Vec<AtomTag>,
    pub u0: AtomVectorField,
}

impl InitialData {
    pub fn u1(&self) -> &AtomField {
        &self.u0.components[0]
    }

    pub fn u2(&self) -> &AtomField {
        &self.u0.components[1]
    }
}

const SIGNS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// `u⁰₁ = 2^k Σ_l (Φ^{++}_l + Φ^{+-}_l + Φ^{-+}_l + Φ^{--}_l)`,
/// `û⁰₂ = -(ξ₁/ξ₂)û⁰₁`, remaining components zero.
pub fn build_initial_data(
    params: &ConstructionParams,
    geometry: &GeometryTable,
    cutoffs: &CutoffProfile,
    grid: EnvelopeGrid,
) -> Result<InitialData, InflationError> {
    params.validate()?;
    let n = params.n;
    let symbol = EnvelopeSymbol::rho(cutoffs).scaled(2f64.powi(params.k));
    let mut atoms = Vec::new();
    let mut tags = Vec::new();
    for (i, &l) in geometry.shells.iter().enumerate() {
        for (lambda, mu) in SIGNS {
            let c: Vec<f64> = geometry.c_k.iter().map(|x| lambda as f64 * x).collect();
            let b: Vec<f64> = geometry.b[i].iter().map(|x| mu as f64 * x).collect();
            let carrier = Carrier::from_parts(n, vec![c, b]);
            atoms.push(make_atom(carrier, geometry.a[i].clone(), &symbol, grid)?);
            tags.push(AtomTag { lambda, mu, l });
        }
    }
    let u1 = AtomField::from_atoms(n, atoms, true);
    let u2 = crate::spectral_atoms::apply_symbol(&u1, &Multiplier::second_component())?;
    let mut components = vec![u1, u2];
    for _ in 2..n {
        components.push(components[0].scaled(0.0));
    }
    Ok(InitialData {
        params: *params,
        geometry: geometry.clone(),
        tags,
        u0: AtomVectorField { components },
    })
}

/// Theorem-mode data on the default envelope lattice.
pub fn theorem_data(params: &ConstructionParams) -> Result<InitialData, InflationError> {
    let g = GeometryTable::build(params)?;
    build_initial_data(
        params,
        &g,
        &CutoffProfile::default(),
        EnvelopeGrid::default_for(params.n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k32_has_twelve_atoms_and_is_divergence_free() {
        let d = theorem_data(&ConstructionParams::theorem(3, 32, 0.02, 1.0)).unwrap();
        assert_eq!(d.u1().atoms.len(), 12);
        assert_eq!(d.u0.components.len(), 3);
        assert!(d.u0.divergence_residual() < 1e-12);
        assert!(d.u1().check_conjugate_pairs(1e-14));
        assert!(d.u2().check_conjugate_pairs(1e-12));
    }

    #[test]
    fn two_dimensional_data() {
        let d = theorem_data(&ConstructionParams::theorem(2, 48, 0.02, 2.0)).unwrap();
        assert_eq!(d.u1().atoms.len(), 16);
        assert!(d.u0.divergence_residual() < 1e-12);
    }
}
