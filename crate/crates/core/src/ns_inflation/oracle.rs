//! Small-`k` cross-checks of the construction against the periodic grid.

use super::data::{build_initial_data, InitialData};
use super::geometry::GeometryTable;
use super::iterate::{second_iterate, IterateOptions, Method};
use super::ledger::interaction_ledger;
use super::params::ConstructionParams;
use super::tensor::ShellWindow;
use super::InflationError;
use crate::grid_oracle::{
    atoms_to_grid, b1_identity_check, grid_block, products, random_divfree_2d, B1Check, Grid,
    GridField, GridSpec, OracleParams, OracleSession, PicardTail,
};
use crate::lp_besov::CutoffProfile;
use crate::spectral_atoms::{AtomVectorField, EnvelopeGrid, ProductPolicy};

/// Picard-tail amplitudes.
pub const TAIL_DELTAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Oracle-mode data with every carrier and envelope sample on the grid
/// lattice `2π/L`.
pub fn oracle_data(
    op: &OracleParams,
    q: f64,
    cutoffs: &CutoffProfile,
) -> Result<InitialData, InflationError> {
    op.validate()?;
    let mut params = ConstructionParams::oracle(op.n, op.k, op.eps, q);
    params.delta = op.delta;
    let h = op.lattice();
    let geometry = GeometryTable::build_snapped(&params, Some(h))?;
    build_initial_data(&params, &geometry, cutoffs, EnvelopeGrid::sized(h))
}

/// Renders every component; returns the fields and the summed deposit error.
pub fn render_vector(
    u: &AtomVectorField,
    spec: GridSpec,
) -> Result<(Vec<GridField>, f64), InflationError> {
    let mut out = Vec::with_capacity(u.components.len());
    let mut err = 0.0;
    for c in &u.components {
        let d = atoms_to_grid(c, spec)?;
        err += d.deposit_error + d.tail_allowance;
        out.push(d.field);
    }
    Ok((out, err))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateComparison {
    /// `‖atom − fd‖_∞ / ‖fd‖_∞` over all components.
    pub rel_error: f64,
    pub atom_sup: f64,
    pub fd_sup: f64,
    pub richardson_gap: f64,
    pub delta_used: f64,
    pub deposit_error: f64,
}

/// Atom second iterate rendered to the grid against `second_iterate_fd`.
pub fn compare_second_iterate(
    session: &mut OracleSession,
    data: &InitialData,
    delta: f64,
    cutoffs: &CutoffProfile,
) -> Result<IterateComparison, InflationError> {
    let opts = IterateOptions::new(Method::Quadrature, ShellWindow::All, ProductPolicy::exact());
    let atom = second_iterate(&data.u0, session.t, &opts, cutoffs)?;
    let grid = session.grid;
    let (rendered, deposit_error) = render_vector(&atom.field, grid.spec)?;
    let fd = session.second_iterate_fd(delta)?;
    let diff: Vec<GridField> = rendered
        .iter()
        .zip(&fd.value)
        .map(|(a, b)| a.sub(b))
        .collect();
    let fd_sup = grid.sup_norm_vec(&fd.value);
    Ok(IterateComparison {
        rel_error: grid.sup_norm_vec(&diff) / fd_sup,
        atom_sup: grid.sup_norm_vec(&rendered),
        fd_sup,
        richardson_gap: fd.richardson_gap,
        delta_used: fd.delta_used,
        deposit_error,
    })
}

/// Per observed shell `j`: `‖Δ_j(u⁰₁u⁰₁ − U₅)‖_∞ / ‖Δ_j U₅‖_∞` on the grid.
pub fn ledger_grid_check(
    data: &InitialData,
    grid: &Grid,
    cutoffs: &CutoffProfile,
) -> Result<Vec<(i32, f64)>, InflationError> {
    let ledger = interaction_ledger(data, &ProductPolicy::exact())?;
    let (u, _) = render_vector(&data.u0, grid.spec)?;
    let u1u1 = products(grid, &u[..1]).swap_remove(0);
    let u5 = atoms_to_grid(&ledger.u5(), grid.spec)?.field;
    Ok(data
        .geometry
        .shells
        .iter()
        .map(|&j| {
            let b = grid_block(&u5, j, cutoffs);
            let gap = grid.sup_norm(&grid_block(&u1u1, j, cutoffs).sub(&b));
            (j, gap / grid.sup_norm(&b))
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub params: OracleParams,
    pub iterate: IterateComparison,
    pub tail: PicardTail,
    /// Four-term rewriting on the rendered data and on a seeded random field.
    pub b1_data: B1Check,
    pub b1_random: B1Check,
    pub ledger_blocks: Vec<(i32, f64)>,
}

/// Full comparison at one oracle configuration (2D only: the `B₁`
/// identity and the default grids are two-dimensional).
pub fn oracle_run(
    op: &OracleParams,
    q: f64,
    seed: u64,
    cutoffs: &CutoffProfile,
) -> Result<OracleRun, InflationError> {
    if op.n != 2 {
        return Err(InflationError::InvalidParams(
            "oracle_run is two-dimensional".into(),
        ));
    }
    let data = oracle_data(op, q, cutoffs)?;
    let grid = Grid::new(op.spec());
    let (u0, _) = render_vector(&data.u0, grid.spec)?;
    let b1_data = b1_identity_check(&grid, &u0)?;
    let b1_random = b1_identity_check(&grid, &random_divfree_2d(&grid, 8, seed))?;
    let ledger_blocks = ledger_grid_check(&data, &grid, cutoffs)?;
    let mut session = OracleSession::new(&grid, u0, op.t_final, op.steps);
    let iterate = compare_second_iterate(&mut session, &data, op.delta, cutoffs)?;
    let tail = session.picard_tail(&TAIL_DELTAS, op.delta, &data.geometry.shells, q, cutoffs)?;
    Ok(OracleRun {
        params: *op,
        iterate,
        tail,
        b1_data,
        b1_random,
        ledger_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small() -> OracleParams {
        OracleParams {
            k: 4,
            points: 256,
            length: 4.0 * PI,
            ..OracleParams::default_2d()
        }
    }

    #[test]
    fn oracle_data_lives_on_the_lattice() {
        let op = small();
        let d = oracle_data(&op, 1.0, &CutoffProfile::default()).unwrap();
        let h = op.lattice();
        for a in &d.u1().atoms {
            for c in a.carrier.value() {
                assert!(((c / h).round() * h - c).abs() < 1e-9);
            }
            assert!((a.spacing() - h).abs() < 1e-15);
        }
        let (_, err) = render_vector(&d.u0, op.spec()).unwrap();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn small_iterate_matches_finite_differences() {
        let op = small();
        let c = CutoffProfile::default();
        let d = oracle_data(&op, 1.0, &c).unwrap();
        let grid = Grid::new(op.spec());
        let (u0, _) = render_vector(&d.u0, grid.spec).unwrap();
        let mut s = OracleSession::new(&grid, u0, op.t_final, op.steps);
        let cmp = compare_second_iterate(&mut s, &d, op.delta, &c).unwrap();
        assert!(cmp.rel_error < 1e-4, "{cmp:?}");
    }
}
