//! Periodic pseudospectral reference.

pub mod field;
pub mod render;
pub mod solver;

pub use field::{Grid, GridField, GridSpec};
pub use render::{atoms_to_grid, Deposit};
pub use solver::{
    b1_identity_check, divergence_defect, grid_block, grid_shell_aggregate, heat, leray_div,
    leray_project, ns_solve, ns_solve_times, products, random_divfree_2d, B1Check, FdSecondIterate,
    OracleSession, PicardTail, SolveOptions, Trajectory,
};

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("frequency beyond Nyquist for P = {points}; need P >= {required}")]
    Nyquist { required: usize, points: usize },
    #[error("dimension mismatch ({0} vs {1})")]
    Dimension(usize, usize),
    #[error("grid maximum blew up at t = {time} (max coefficient {max}); reduce delta")]
    BlowUp { time: f64, max: f64 },
    #[error("energy increased at t = {time}: {before} -> {after}")]
    EnergyIncrease { time: f64, before: f64, after: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Small-`k` configuration for the oracle runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub n: usize,
    pub k: i32,
    pub eps: f64,
    pub delta: f64,
    pub t_final: f64,
    pub steps: usize,
    pub points: usize,
    pub length: f64,
}

impl OracleParams {
    /// 2D, `k = 6`, `P = 1024`, `L = 6π` (grid spacing in frequency `1/3`).
    pub fn default_2d() -> Self {
        Self {
            n: 2,
            k: 6,
            eps: 0.1,
            delta: 1e-2,
            t_final: 2f64.powi(-12),
            steps: 32,
            points: 1024,
            length: 6.0 * PI,
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dim: self.n,
            points: self.points,
            length: self.length,
        }
    }

    /// Frequency lattice spacing `2π/L`; atom envelopes use the same lattice.
    pub fn lattice(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |m: &str| Err(OracleError::Invalid(m.to_string()));
        if !(self.n == 2 || self.n == 3) {
            return bad("oracle dimension must be 2 or 3");
        }
        if self.n == 3 && self.points > 128 {
            return bad("3D oracle grids are capped at P = 128");
        }
        if self.k < 4 {
            return bad("oracle k must be at least 4");
        }
        if self.points < 8 || self.points % 2 != 0 {
            return bad("P must be even and at least 8");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) || (self.n >= 3 && 5.0 * self.eps * self.eps >= 1.0)
        {
            return bad("eps out of range");
        }
        if !(self.t_final > 0.0 && self.length > 0.0) || self.steps == 0 {
            return bad("t_final, L and steps must be positive");
        }
        // quadratic terms must stay inside the 2/3 band
        let top = 2f64.powi(self.k) + 2f64.powf(self.k as f64 / 2.0) + 1.0;
        if 2.0 * top > (self.points / 3) as f64 * self.lattice() * (self.n as f64).sqrt() {
            return bad("P too small: quadratic terms leave the 2/3 band");
        }
        Ok(())
    }
}
