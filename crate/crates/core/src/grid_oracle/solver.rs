//! Integrating-factor RK4 for the periodic Navier–Stokes equations and the
//! finite-difference-in-amplitude second iterate.

use super::field::{Grid, GridField};
use super::OracleError;
use crate::lp_besov::cutoffs::CutoffProfile;
use num_complex::Complex64;
use std::collections::HashMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Per-mode `δ_{αβ} − ξ_αξ_β/|ξ|²`; the zero mode is left alone.
pub fn leray_project(grid: &Grid, v: &[GridField]) -> Vec<GridField> {
    let spec = grid.spec;
    let n = v.len();
    let dk = spec.dk();
    let mut out: Vec<GridField> = v.to_vec();
    let mut kappa = vec![0i64; spec.dim];
    let mut xi = vec![0.0; spec.dim];
    for idx in 0..spec.len() {
        spec.kappa_into(idx, &mut kappa);
        let n2: f64 = kappa.iter().map(|k| (*k as f64 * dk).powi(2)).sum();
        if n2 == 0.0 {
            continue;
        }
        for d in 0..spec.dim {
            xi[d] = kappa[d] as f64 * dk;
        }
        let dot: Complex64 = (0..n).map(|b| xi[b] * v[b].coeffs[idx]).sum();
        for a in 0..n {
            out[a].coeffs[idx] = v[a].coeffs[idx] - xi[a] * dot / n2;
        }
    }
    out
}

/// Max over modes of `|ξ·û(ξ)|` relative to the largest `|ξ||û(ξ)|`.
pub fn divergence_defect(grid: &Grid, v: &[GridField]) -> f64 {
    let spec = grid.spec;
    let dk = spec.dk();
    let mut kappa = vec![0i64; spec.dim];
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for idx in 0..spec.len() {
        spec.kappa_into(idx, &mut kappa);
        let mut div = ZERO;
        let mut mag = 0.0;
        for (d, c) in v.iter().enumerate() {
            let x = kappa[d] as f64 * dk;
            div += x * c.coeffs[idx];
            mag += x * x * c.coeffs[idx].norm_sqr();
        }
        worst = worst.max(div.norm());
        scale = scale.max(mag.sqrt());
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

pub fn heat(grid: &Grid, v: &[GridField], t: f64) -> Vec<GridField> {
    let _ = grid;
    v.iter()
        .map(|c| {
            c.apply(|xi| Complex64::new((-t * xi.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0))
        })
        .collect()
}

/// Dealiased products `u_βu_γ`, `β ≤ γ`, in row order.
pub fn products(grid: &Grid, u: &[GridField]) -> Vec<GridField> {
    let phys: Vec<Vec<Complex64>> = u.iter().map(|c| grid.to_physical(c)).collect();
    let mut out = Vec::new();
    for b in 0..u.len() {
        for g in b..u.len() {
            out.push(grid.product(&phys[b], &phys[g]));
        }
    }
    out
}

fn pair_index(n: usize, b: usize, g: usize) -> usize {
    let (b, g) = if b <= g { (b, g) } else { (g, b) };
    b * n - b * (b + 1) / 2 + g
}

/// `ℙ div(u⊗u)`.
pub fn leray_div(grid: &Grid, u: &[GridField]) -> Vec<GridField> {
    let spec = grid.spec;
    let n = u.len();
    let pi = products(grid, u);
    let dk = spec.dk();
    let mut out = vec![GridField::zeros(spec); n];
    let mut kappa = vec![0i64; spec.dim];
    let mut xi = vec![0.0; spec.dim];
    let mut div = vec![ZERO; n];
    for idx in 0..spec.len() {
        spec.kappa_into(idx, &mut kappa);
        let n2: f64 = kappa.iter().map(|k| (*k as f64 * dk).powi(2)).sum();
        if n2 == 0.0 {
            continue;
        }
        for d in 0..spec.dim {
            xi[d] = kappa[d] as f64 * dk;
        }
        let mut dot = ZERO;
        for a in 0..n {
            div[a] = (0..n)
                .map(|b| I * xi[b] * pi[pair_index(n, a, b)].coeffs[idx])
                .sum();
            dot += xi[a] * div[a];
        }
        for a in 0..n {
            out[a].coeffs[idx] = div[a] - xi[a] * dot / n2;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<GridField>>,
    /// `‖u‖₂` after every step.
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &[GridField] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub nonlinear: bool,
    /// Relative slack on the per-step energy monotonicity check.
    pub energy_slack: f64,
    /// Abort when the grid max exceeds this multiple of the initial max.
    pub blowup_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            nonlinear: true,
            energy_slack: 1e-10,
            blowup_factor: 1e6,
        }
    }
}

fn axpy(y: &mut [GridField], a: f64, x: &[GridField]) {
    for (yc, xc) in y.iter_mut().zip(x) {
        for (p, q) in yc.coeffs.iter_mut().zip(&xc.coeffs) {
            *p += a * q;
        }
    }
}

/// `N(u) = −ℙ div(u⊗u)`, zero when the nonlinearity is switched off.
fn rhs(grid: &Grid, u: &[GridField], nonlinear: bool) -> Vec<GridField> {
    if !nonlinear {
        return vec![grid.zeros(); u.len()];
    }
    leray_div(grid, u)
        .into_iter()
        .map(|f| f.scaled(-1.0))
        .collect()
}

fn max_coeff(u: &[GridField]) -> f64 {
    u.iter()
        .flat_map(|c| c.coeffs.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn energy(u: &[GridField]) -> f64 {
    u.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
}

/// Integrates `δu₀` and stores the state at each requested time, using
/// `steps` equal steps between consecutive times.
pub fn ns_solve_times(
    grid: &Grid,
    u0: &[GridField],
    delta: f64,
    times: &[f64],
    steps: usize,
    opts: SolveOptions,
) -> Result<Trajectory, OracleError> {
    if steps == 0 {
        return Err(OracleError::Invalid("steps must be positive".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(OracleError::Invalid(
            "times must be increasing and non-negative".into(),
        ));
    }
    let mut u: Vec<GridField> = u0.iter().map(|c| c.scaled(delta)).collect();
    let start_max = max_coeff(&u).max(f64::MIN_POSITIVE);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u.clone()],
        energies: vec![energy(&u)],
    };
    let mut now = 0.0;
    for &target in times {
        let span = target - now;
        if span == 0.0 {
            traj.times.push(target);
            traj.states.push(u.clone());
            continue;
        }
        let h = span / steps as f64;
        for step in 0..steps {
            u = rk4_step(grid, &u, h, opts.nonlinear);
            let e = energy(&u);
            let prev = *traj.energies.last().unwrap();
            if !e.is_finite() || max_coeff(&u) > opts.blowup_factor * start_max {
                return Err(OracleError::BlowUp {
                    time: now + (step + 1) as f64 * h,
                    max: max_coeff(&u),
                });
            }
            if e > prev * (1.0 + opts.energy_slack) {
                return Err(OracleError::EnergyIncrease {
                    time: now + (step + 1) as f64 * h,
                    before: prev,
                    after: e,
                });
            }
            traj.energies.push(e);
        }
        now = target;
        traj.times.push(target);
        traj.states.push(u.clone());
    }
    Ok(traj)
}

pub fn ns_solve(
    grid: &Grid,
    u0: &[GridField],
    delta: f64,
    t_final: f64,
    steps: usize,
    opts: SolveOptions,
) -> Result<Trajectory, OracleError> {
    ns_solve_times(grid, u0, delta, &[t_final], steps, opts)
}

fn rk4_step(grid: &Grid, u: &[GridField], h: f64, nonlinear: bool) -> Vec<GridField> {
    let half = |v: &[GridField]| heat(grid, v, h / 2.0);
    let a = rhs(grid, u, nonlinear);
    let mut ua = u.to_vec();
    axpy(&mut ua, h / 2.0, &a);
    let ua = half(&ua);
    let b = rhs(grid, &ua, nonlinear);
    let eu_half = half(u);
    let mut ub = eu_half.clone();
    axpy(&mut ub, h / 2.0, &b);
    let c = rhs(grid, &ub, nonlinear);
    let eu = half(&eu_half);
    let mut uc = eu.clone();
    axpy(&mut uc, h, &half(&c));
    let d = rhs(grid, &uc, nonlinear);
    // E(h)u + h/6 (E(h)a + 2E(h/2)(b+c) + d)
    let mut bc = b;
    axpy(&mut bc, 1.0, &c);
    let mut acc = half(&half(&a));
    axpy(&mut acc, 2.0, &half(&bc));
    axpy(&mut acc, 1.0, &d);
    let mut out = eu;
    axpy(&mut out, h / 6.0, &acc);
    out
}

/// Dyadic block `Δ_j` on the grid.
pub fn grid_block(f: &GridField, j: i32, cutoffs: &CutoffProfile) -> GridField {
    f.apply(|xi| {
        Complex64::new(
            cutoffs.phi_j(j, xi.iter().map(|x| x * x).sum::<f64>().sqrt()),
            0.0,
        )
    })
}

/// `(Σ_j 2^{-jq} ‖Δ_j f‖_∞^q)^{1/q}` over the given shells (max for `q = ∞`).
pub fn grid_shell_aggregate(
    grid: &Grid,
    f: &GridField,
    shells: &[i32],
    q: f64,
    cutoffs: &CutoffProfile,
) -> f64 {
    let vals: Vec<(i32, f64)> = shells
        .iter()
        .map(|&j| (j, grid.sup_norm(&grid_block(f, j, cutoffs))))
        .collect();
    crate::lp_besov::besov::aggregate(&vals, q)
}

#[derive(Clone, Debug)]
pub struct FdSecondIterate {
    /// Richardson-extrapolated `∂²u/∂δ²(0, t)`.
    pub value: Vec<GridField>,
    /// Relative sup-norm gap between the estimates at `δ` and `δ/2`.
    pub richardson_gap: f64,
    pub delta_used: f64,
    /// True when the first `δ` failed the `1e-4` check and was reduced.
    pub reduced: bool,
}

#[derive(Clone, Debug)]
pub struct PicardTail {
    pub deltas: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub shell_aggregates: Vec<f64>,
    /// Shell aggregate of `(δ²/2)·∂²u/∂δ²` at the first `δ`.
    pub second_order_aggregate: f64,
    /// Fitted power of `δ` in the sup norms; `None` below three points.
    pub exponent: Option<f64>,
}

/// One oracle configuration with cached full solves keyed by `δ`.
pub struct OracleSession<'g> {
    pub grid: &'g Grid,
    pub u0: Vec<GridField>,
    pub t: f64,
    pub steps: usize,
    pub opts: SolveOptions,
    cache: HashMap<u64, Vec<GridField>>,
}

impl<'g> OracleSession<'g> {
    pub fn new(grid: &'g Grid, u0: Vec<GridField>, t: f64, steps: usize) -> Self {
        Self {
            grid,
            u0,
            t,
            steps,
            opts: SolveOptions::default(),
            cache: HashMap::new(),
        }
    }

    pub fn solve(&mut self, delta: f64) -> Result<Vec<GridField>, OracleError> {
        if let Some(v) = self.cache.get(&delta.to_bits()) {
            return Ok(v.clone());
        }
        let traj = ns_solve(self.grid, &self.u0, delta, self.t, self.steps, self.opts)?;
        let out = traj.last().to_vec();
        self.cache.insert(delta.to_bits(), out.clone());
        Ok(out)
    }

    fn central(&mut self, delta: f64) -> Result<Vec<GridField>, OracleError> {
        let p = self.solve(delta)?;
        let m = self.solve(-delta)?;
        Ok(p.iter()
            .zip(&m)
            .map(|(a, b)| a.add(b).scaled(1.0 / (delta * delta)))
            .collect())
    }

    fn sup(&self, v: &[GridField]) -> f64 {
        self.grid.sup_norm_vec(v)
    }

    fn attempt(&mut self, delta: f64) -> Result<(Vec<GridField>, f64), OracleError> {
        let d1 = self.central(delta)?;
        let d2 = self.central(delta / 2.0)?;
        let gap: Vec<GridField> = d1.iter().zip(&d2).map(|(a, b)| a.sub(b)).collect();
        let extrapolated: Vec<GridField> = d1
            .iter()
            .zip(&d2)
            .map(|(a, b)| b.scaled(4.0 / 3.0).sub(&a.scaled(1.0 / 3.0)))
            .collect();
        let scale = self.sup(&extrapolated);
        let rel = if scale == 0.0 {
            0.0
        } else {
            self.sup(&gap) / scale
        };
        Ok((extrapolated, rel))
    }

    /// `(u(δ)+u(−δ))/δ²` at `δ` and `δ/2`, Richardson-combined.
    pub fn second_iterate_fd(&mut self, delta: f64) -> Result<FdSecondIterate, OracleError> {
        let (value, gap) = self.attempt(delta)?;
        if gap <= 1e-4 {
            return Ok(FdSecondIterate {
                value,
                richardson_gap: gap,
                delta_used: delta,
                reduced: false,
            });
        }
        let smaller = delta / 4.0;
        let (value, gap) = self.attempt(smaller)?;
        Ok(FdSecondIterate {
            value,
            richardson_gap: gap,
            delta_used: smaller,
            reduced: true,
        })
    }

    /// `ũ = u(δ) − δe^{tΔ}u₀ − (δ²/2)·∂²u/∂δ²` per `δ`.
    pub fn picard_tail(
        &mut self,
        deltas: &[f64],
        fd_delta: f64,
        shells: &[i32],
        q: f64,
        cutoffs: &CutoffProfile,
    ) -> Result<PicardTail, OracleError> {
        let second = self.second_iterate_fd(fd_delta)?.value;
        let lin = heat(self.grid, &self.u0, self.t);
        let first_component = |v: &[GridField]| v[0].clone();
        let mut out = PicardTail {
            deltas: deltas.to_vec(),
            sup_norms: Vec::new(),
            shell_aggregates: Vec::new(),
            second_order_aggregate: 0.0,
            exponent: None,
        };
        for (i, &d) in deltas.iter().enumerate() {
            let u = self.solve(d)?;
            let tail: Vec<GridField> = (0..u.len())
                .map(|a| {
                    u[a].sub(&lin[a].scaled(d))
                        .sub(&second[a].scaled(d * d / 2.0))
                })
                .collect();
            out.sup_norms.push(self.sup(&tail));
            out.shell_aggregates.push(grid_shell_aggregate(
                self.grid,
                &first_component(&tail),
                shells,
                q,
                cutoffs,
            ));
            if i == 0 {
                out.second_order_aggregate = grid_shell_aggregate(
                    self.grid,
                    &second[0].scaled(d * d / 2.0),
                    shells,
                    q,
                    cutoffs,
                );
            }
        }
        if deltas.len() >= 3 {
            out.exponent = crate::fit::power_law(deltas, &out.sup_norms).map(|f| f.slope);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct B1Check {
    pub residual: f64,
    /// `‖B₁(u,u)‖_∞`.
    pub reference: f64,
}

/// Four-term rewriting of the first component of `ℙ div(u⊗u)` in 2D,
/// compared with the direct formula.
pub fn b1_identity_check(grid: &Grid, u: &[GridField]) -> Result<B1Check, OracleError> {
    if u.len() != 2 || grid.spec.dim != 2 {
        return Err(OracleError::Invalid(
            "the B1 identity is two-dimensional".into(),
        ));
    }
    let direct = leray_div(grid, u).swap_remove(0);
    let pi = products(grid, u);
    let (p11, p12, p22) = (&pi[0], &pi[1], &pi[2]);
    let spec = grid.spec;
    let dk = spec.dk();
    let mut four = grid.zeros();
    let mut kappa = [0i64; 2];
    for idx in 0..spec.len() {
        spec.kappa_into(idx, &mut kappa);
        let (x1, x2) = (kappa[0] as f64 * dk, kappa[1] as f64 * dk);
        let n2 = x1 * x1 + x2 * x2;
        if n2 == 0.0 {
            continue;
        }
        let a = p11.coeffs[idx];
        let mixed = a + p12.coeffs[idx];
        let diff = a - p22.coeffs[idx];
        four.coeffs[idx] =
            I * x2 * (x1 * x1 - x2 * x2) / n2 * a + I * x2 * mixed + I * x1 * x2 * x2 / n2 * diff
                - 2.0 * I * x1 * x1 * x2 / n2 * mixed;
    }
    Ok(B1Check {
        residual: grid.sup_norm(&four.sub(&direct)),
        reference: grid.sup_norm(&direct),
    })
}

/// Real divergence-free field `(∂₂ψ, −∂₁ψ)` from a random stream function
/// with modes `|κ_d| ≤ band`.
pub fn random_divfree_2d(grid: &Grid, band: i64, seed: u64) -> Vec<GridField> {
    use rand::{Rng, SeedableRng};
    let spec = grid.spec;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut psi = grid.zeros();
    for a in -band..=band {
        for b in -band..=band {
            if (a, b) <= (0, 0) {
                continue;
            }
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let i = spec.index_of(&[a, b]).expect("band below Nyquist");
            let j = spec.index_of(&[-a, -b]).expect("band below Nyquist");
            psi.coeffs[i] = z;
            psi.coeffs[j] = z.conj();
        }
    }
    vec![psi.apply(|xi| I * xi[1]), psi.apply(|xi| -I * xi[0])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_oracle::field::GridSpec;
    use std::f64::consts::TAU;

    fn small() -> Grid {
        Grid::new(GridSpec {
            dim: 2,
            points: 32,
            length: TAU,
        })
    }

    #[test]
    fn gradient_projects_to_zero_and_projection_is_idempotent() {
        let g = small();
        let u = random_divfree_2d(&g, 4, 7);
        let p = g.zeros();
        let mut p = p;
        p.coeffs[g.spec.index_of(&[2, 1]).unwrap()] = Complex64::new(1.0, 0.5);
        let grad = vec![p.apply(|xi| I * xi[0]), p.apply(|xi| I * xi[1])];
        let pg = leray_project(&g, &grad);
        assert!(g.sup_norm_vec(&pg) < 1e-14);
        let mixed: Vec<GridField> = u.iter().zip(&grad).map(|(a, b)| a.add(b)).collect();
        let once = leray_project(&g, &mixed);
        let twice = leray_project(&g, &once);
        let d: Vec<GridField> = once.iter().zip(&twice).map(|(a, b)| a.sub(b)).collect();
        assert!(g.sup_norm_vec(&d) < 1e-13);
        let du: Vec<GridField> = once.iter().zip(&u).map(|(a, b)| a.sub(b)).collect();
        assert!(g.sup_norm_vec(&du) < 1e-13 * g.sup_norm_vec(&u));
        assert!(divergence_defect(&g, &once) < 1e-14);
    }

    #[test]
    fn linear_solve_is_the_heat_flow() {
        let g = small();
        let u = random_divfree_2d(&g, 5, 1);
        let opts = SolveOptions {
            nonlinear: false,
            ..SolveOptions::default()
        };
        let tr = ns_solve(&g, &u, 0.7, 0.05, 8, opts).unwrap();
        let exact: Vec<GridField> = heat(&g, &u, 0.05).iter().map(|c| c.scaled(0.7)).collect();
        let d: Vec<GridField> = tr
            .last()
            .iter()
            .zip(&exact)
            .map(|(a, b)| a.sub(b))
            .collect();
        assert!(g.sup_norm_vec(&d) < 1e-10 * g.sup_norm_vec(&exact));
    }

    #[test]
    fn zero_amplitude_stays_zero() {
        let g = small();
        let u = random_divfree_2d(&g, 3, 2);
        let tr = ns_solve(&g, &u, 0.0, 0.1, 4, SolveOptions::default()).unwrap();
        assert!(tr.last().iter().all(GridField::is_zero));
    }

    #[test]
    fn energy_decays_with_the_nonlinearity_on() {
        let g = small();
        let u = random_divfree_2d(&g, 4, 3);
        let tr = ns_solve(&g, &u, 1.0, 0.05, 20, SolveOptions::default()).unwrap();
        assert!(tr.energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        let g = small();
        let u = random_divfree_2d(&g, 4, 4);
        let run = |s| {
            ns_solve(&g, &u, 0.02, 0.2, s, SolveOptions::default())
                .unwrap()
                .last()
                .to_vec()
        };
        let (a, b, c) = (run(4), run(8), run(16));
        let e1 = g.sup_norm_vec(&a.iter().zip(&c).map(|(x, y)| x.sub(y)).collect::<Vec<_>>());
        let e2 = g.sup_norm_vec(&b.iter().zip(&c).map(|(x, y)| x.sub(y)).collect::<Vec<_>>());
        // errors against the 16-step run: (2^4 - 1)/(1 - 2^-4) = 16
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn b1_identity_holds_on_random_fields() {
        let g = Grid::new(GridSpec {
            dim: 2,
            points: 64,
            length: TAU,
        });
        let u = random_divfree_2d(&g, 8, 11);
        let r = b1_identity_check(&g, &u).unwrap();
        assert!(r.residual < 1e-10 * r.reference, "{r:?}");
        let z = vec![g.zeros(), g.zeros()];
        assert_eq!(b1_identity_check(&g, &z).unwrap().residual, 0.0);
    }

    #[test]
    fn fd_is_even_in_delta() {
        let g = small();
        let u = random_divfree_2d(&g, 3, 5);
        let mut s = OracleSession::new(&g, u, 0.05, 8);
        let a = s.second_iterate_fd(1e-2).unwrap();
        let mut s2 = OracleSession::new(&g, s.u0.clone(), 0.05, 8);
        let b = s2.second_iterate_fd(-1e-2).unwrap();
        let d: Vec<GridField> = a
            .value
            .iter()
            .zip(&b.value)
            .map(|(x, y)| x.sub(y))
            .collect();
        assert!(g.sup_norm_vec(&d) <= 1e-12 * g.sup_norm_vec(&a.value));
    }
}
