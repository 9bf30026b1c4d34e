//! Cutoffs and norm functionals.

pub mod bernstein;
pub mod besov;
pub mod cutoffs;
pub mod koch_tataru;
pub mod leilin;
pub mod modulation;
pub mod witness;

pub use bernstein::{bernstein_bound, BernsteinError};
pub use besov::{
    aggregate, besov_norm_spectrum, besov_shell_spectrum, occupied_shells, shell_spectrum_with,
    ShellSpectrum, ShellValue,
};
pub use cutoffs::{build_cutoffs, CutoffProfile, SmoothnessSpec};
pub use koch_tataru::{dyadic_times, koch_tataru_x_norm, KochTataruNorm};
pub use leilin::{lei_lin_norm, LeiLinNorm};
pub use modulation::{modulation_norm, ModulationNorm};
pub use witness::{triebel_witness_bound, widened_block, WitnessBound};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("support ball of atom {index} (radius {radius}) contains the origin; |xi|^-1 is not integrable there")]
    OriginInSupport { index: usize, radius: f64 },
    #[error("empty trajectory")]
    EmptyTrajectory,
}
