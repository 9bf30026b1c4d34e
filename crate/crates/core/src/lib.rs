//! Frequency-localized atom calculus for Navier–Stokes norm inflation in
//! critical Besov spaces, with a periodic pseudospectral oracle.

pub mod fftn;
pub mod fit;
pub mod grid_oracle;
pub mod lp_besov;
pub mod ns_inflation;
pub mod quad;
pub mod spectral_atoms;
