//! Second Picard iterate `∂²_δ u|_{δ=0} = -2∫₀ᵗ e^{(t-τ)Δ} ℙ div(v⊗v) dτ`,
//! `v = e^{τΔ}u₀`.

use super::tensor::{pair_layout, Factor, PairTensor, ShellWindow};
use super::InflationError;
use crate::lp_besov::CutoffProfile;
use crate::spectral_atoms::{
    apply_symbol, heat_flow, AtomField, AtomVectorField, Multiplier, ProductPolicy,
};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Gauss–Legendre in `τ` on the full integrand.
    Quadrature,
    /// `T = Δ^{-1}(e^{tΔ}-1)Π⁰ + T̃`, series for the first part and
    /// quadrature on the difference `v⊗v - u⊗u` for the second.
    TaylorSplit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateOptions {
    pub method: Method,
    pub nodes: usize,
    /// Refuse when `M` and `⌈1.5M⌉` nodes differ beyond this (relative).
    pub tolerance: f64,
    pub window: ShellWindow,
    pub policy: ProductPolicy,
}

impl IterateOptions {
    pub fn new(method: Method, window: ShellWindow, policy: ProductPolicy) -> Self {
        Self {
            method,
            nodes: 32,
            tolerance: 1e-8,
            window,
            policy,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SecondIterate {
    pub field: AtomVectorField,
    /// `T_{βγ} = ∫₀ᵗ e^{(t-τ)Δ}(v_βv_γ) dτ`.
    pub tensor: PairTensor,
    pub nodes: usize,
    /// Relative sample gap between `M` and `⌈1.5M⌉` nodes.
    pub convergence_gap: f64,
    /// Series length used by the split method.
    pub r_max: Option<u32>,
}

/// Leading components that carry any nonzero sample.
pub fn active_components(u: &AtomVectorField) -> usize {
    let nonzero =
        |c: &AtomField| c.atoms.iter().any(|a| !a.envelope.is_zero()) || !c.tails.is_empty();
    let mut active = u.components.len();
    while active > 1 && !nonzero(&u.components[active - 1]) {
        active -= 1;
    }
    active
}

/// Largest `|ξ|²` over the support balls of a field.
fn max_freq_sq(u: &AtomField) -> f64 {
    u.atoms
        .iter()
        .map(|a| (a.carrier.norm() + a.support_radius).powi(2))
        .fold(0.0, f64::max)
}

/// Terms of `Σ t^r(-s)^{r-1}/r!` needed until the ratio to the first term
/// drops below `1e-14` at `s = s_max`.
pub fn series_length(t: f64, s_max: f64) -> u32 {
    let x = t * s_max;
    let mut term = 1.0f64;
    let mut r = 1u32;
    while r < 400 {
        term *= x / (r + 1) as f64;
        r += 1;
        if term.abs() < 1e-14 {
            break;
        }
    }
    r
}

fn heat_all(u: &[AtomField], tau: f64) -> Result<Vec<AtomField>, InflationError> {
    Ok(u.iter()
        .map(|c| heat_flow(c, tau))
        .collect::<Result<_, _>>()?)
}

fn heat_minus_one_all(u: &[AtomField], tau: f64) -> Result<Vec<AtomField>, InflationError> {
    let m = Multiplier::heat_minus_one(tau);
    Ok(u.iter()
        .map(|c| apply_symbol(c, &m))
        .collect::<Result<_, _>>()?)
}

/// The tensor `T` with `nodes` quadrature points.
pub fn duhamel_tensor(
    u: &AtomVectorField,
    t: f64,
    method: Method,
    nodes: usize,
    window: &ShellWindow,
    policy: &ProductPolicy,
    cutoffs: &CutoffProfile,
) -> Result<(PairTensor, Option<u32>), InflationError> {
    let active = active_components(u);
    let comps: Vec<AtomField> = u.components[..active].to_vec();
    let layout = pair_layout(&comps[0], policy, window, cutoffs)?;
    let base = [Factor::square(&comps)];
    match method {
        Method::Quadrature => {
            let tensor = PairTensor::duhamel(
                &layout,
                active,
                t,
                nodes,
                |tau| Ok(vec![Factor::square(&heat_all(&comps, tau)?)]),
                &base,
                1.0,
            )?;
            Ok((tensor, None))
        }
        Method::TaylorSplit => {
            let split = split_tensors(u, t, nodes, window, policy, cutoffs)?;
            let mut tensor = split
                .pi0
                .map(&Multiplier::duhamel_series(t, 1, split.r_max));
            tensor.axpy(1.0, &split.tilde);
            Ok((tensor, Some(split.r_max)))
        }
    }
}

/// Pieces of `T = E(t)Π⁰ + T̃`, `E(t) = Δ^{-1}(e^{tΔ}-1)`.
#[derive(Clone, Debug)]
pub struct SplitTensors {
    /// `Π⁰_{βγ} = u⁰_β u⁰_γ`.
    pub pi0: PairTensor,
    /// `∫₀ᵗ e^{(t-τ)Δ}(v_βd_γ + d_βu_γ) dτ` with `d = (e^{τΔ}-1)u⁰`.
    pub tilde: PairTensor,
    pub r_max: u32,
}

pub fn split_tensors(
    u: &AtomVectorField,
    t: f64,
    nodes: usize,
    window: &ShellWindow,
    policy: &ProductPolicy,
    cutoffs: &CutoffProfile,
) -> Result<SplitTensors, InflationError> {
    let active = active_components(u);
    let comps: Vec<AtomField> = u.components[..active].to_vec();
    let layout = pair_layout(&comps[0], policy, window, cutoffs)?;
    let base = [Factor::square(&comps)];
    let r_max = series_length(t, max_freq_sq(&comps[0]));
    let pi0 = PairTensor::product(&layout, &base, active)?;
    let tilde = PairTensor::duhamel(
        &layout,
        active,
        t,
        nodes,
        |tau| {
            let v = heat_all(&comps, tau)?;
            let d = heat_minus_one_all(&comps, tau)?;
            Ok(vec![
                Factor {
                    left: v,
                    right: d.clone(),
                },
                Factor {
                    left: d,
                    right: comps.clone(),
                },
            ])
        },
        &base,
        2.0,
    )?;
    Ok(SplitTensors { pi0, tilde, r_max })
}

/// Component `α` of `-2ℙ div T`.
pub fn leray_divergence(tensor: &PairTensor, dim: usize) -> AtomVectorField {
    let active = tensor.active;
    let components = (0..dim)
        .map(|alpha| {
            tensor.combine(|p| {
                Multiplier::leray_div_coefficients(p, alpha, active)
                    .into_iter()
                    .map(|c| c * Complex64::new(-2.0, 0.0))
                    .collect()
            })
        })
        .collect();
    AtomVectorField { components }
}

pub fn second_iterate(
    u: &AtomVectorField,
    t: f64,
    opts: &IterateOptions,
    cutoffs: &CutoffProfile,
) -> Result<SecondIterate, InflationError> {
    if !(t >= 0.0) {
        return Err(InflationError::InvalidParams(format!(
            "time {t} must be non-negative"
        )));
    }
    let (tensor, r_max) = duhamel_tensor(
        u,
        t,
        opts.method,
        opts.nodes,
        &opts.window,
        &opts.policy,
        cutoffs,
    )?;
    let finer = opts.nodes + opts.nodes.div_ceil(2);
    let (check, _) = duhamel_tensor(
        u,
        t,
        opts.method,
        finer,
        &opts.window,
        &opts.policy,
        cutoffs,
    )?;
    let gap = tensor.rel_gap(&check);
    if gap > opts.tolerance {
        return Err(InflationError::QuadratureNonConvergence {
            nodes: opts.nodes,
            finer,
            gap,
            tolerance: opts.tolerance,
        });
    }
    Ok(SecondIterate {
        field: leray_divergence(&tensor, u.dim()),
        tensor,
        nodes: opts.nodes,
        convergence_gap: gap,
        r_max,
    })
}

#[cfg(test)]
mod tests {
    use super::super::data::theorem_data;
    use super::super::params::ConstructionParams;
    use super::*;

    fn opts(method: Method, shells: &[i32]) -> IterateOptions {
        let h = 1.0 / 16.0;
        IterateOptions::new(
            method,
            ShellWindow::Shells(shells.to_vec()),
            ProductPolicy::for_spacing(h),
        )
    }

    #[test]
    fn zero_time_gives_zero() {
        let p = ConstructionParams::theorem(3, 16, 0.02, 1.0);
        let d = theorem_data(&p).unwrap();
        let s = second_iterate(
            &d.u0,
            0.0,
            &opts(Method::Quadrature, &d.geometry.shells),
            &CutoffProfile::default(),
        )
        .unwrap();
        for c in &s.field.components {
            assert!(c.atoms.iter().all(|a| a.envelope.is_zero()));
        }
    }

    #[test]
    fn methods_agree_and_output_is_divergence_free() {
        let p = ConstructionParams::theorem(3, 32, 0.02, 1.0);
        let d = theorem_data(&p).unwrap();
        let c = CutoffProfile::default();
        let q = second_iterate(
            &d.u0,
            p.t(),
            &opts(Method::Quadrature, &d.geometry.shells),
            &c,
        )
        .unwrap();
        let s = second_iterate(
            &d.u0,
            p.t(),
            &opts(Method::TaylorSplit, &d.geometry.shells),
            &c,
        )
        .unwrap();
        assert!(
            q.tensor.rel_gap(&s.tensor) < 1e-10,
            "{}",
            q.tensor.rel_gap(&s.tensor)
        );
        assert_eq!(active_components(&d.u0), 2);
        assert!(q.field.divergence_residual() < 1e-10);
        assert!(q.convergence_gap < 1e-12);
    }

    #[test]
    fn series_length_is_short_at_small_times() {
        assert!(series_length(1e-6, 1.0) <= 4);
        assert!(series_length(1.0, 10.0) > 20);
    }
}
