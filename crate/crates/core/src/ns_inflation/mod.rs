//! The inflation construction: data, interaction ledger, second iterate and
//! the term-by-term decomposition.

pub mod data;
pub mod geometry;
pub mod iterate;
pub mod ledger;
pub mod oracle;
pub mod params;
pub mod report;
pub mod sweep;
pub mod tensor;

pub use data::{build_initial_data, theorem_data, AtomTag, InitialData};
pub use geometry::{shell_set, GeometryTable};
pub use iterate::{
    active_components, duhamel_tensor, leray_divergence, second_iterate, split_tensors,
    IterateOptions, Method, SecondIterate,
};
pub use ledger::{interaction_ledger, Family, InteractionLedger};
pub use oracle::{
    compare_second_iterate, ledger_grid_check, oracle_data, oracle_run, render_vector,
    IterateComparison, OracleRun,
};
pub use params::{ConstructionParams, Mode};
pub use report::{construction_spectrum, decomposition_report, DecompositionReport, Quantity};
pub use sweep::{inflation_sweep, iterate_spectrum, GrowthStudy, SweepOptions, SweepRow};
pub use tensor::{pair_layout, Factor, PairLayout, PairTensor, ShellWindow};

use crate::grid_oracle::OracleError;
use crate::spectral_atoms::AtomError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InflationError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("pair ({}, {}) fits no interaction family; carriers {:?} and {:?}", pair.0, pair.1, carriers.0, carriers.1)]
    Unclassifiable {
        pair: (String, String),
        carriers: (Vec<f64>, Vec<f64>),
    },
    #[error("second_iterate: quadrature with {nodes} and {finer} nodes differs by {gap:e} (tolerance {tolerance:e})")]
    QuadratureNonConvergence {
        nodes: usize,
        finer: usize,
        gap: f64,
        tolerance: f64,
    },
    #[error("inflation_sweep: exponent fit needs at least 3 values of k, got {0}")]
    TooFewLevels(usize),
}
