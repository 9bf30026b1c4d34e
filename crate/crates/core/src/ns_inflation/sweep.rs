//! Growth of the `ℕ_k` aggregate of the second iterate across `k`.

use super::data::{theorem_data, InitialData};
use super::iterate::{second_iterate, IterateOptions, Method};
use super::ledger::interaction_ledger;
use super::params::{ConstructionParams, Mode};
use super::report::construction_spectrum;
use super::tensor::ShellWindow;
use super::InflationError;
use crate::fit::{power_law, LineFit};
use crate::lp_besov::{
    lei_lin_norm, modulation_norm, triebel_witness_bound, CutoffProfile, ShellSpectrum,
    WitnessBound,
};
use crate::spectral_atoms::ProductPolicy;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub nodes: usize,
    /// Also compute witness, modulation and Lei–Lin norms (slower).
    pub norms: bool,
    /// Worker threads across `k`; rows stay in input order.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            nodes: 32,
            norms: true,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: i32,
    pub t: f64,
    pub shells: Vec<i32>,
    pub spectrum: ShellSpectrum,
    /// `S(k)`.
    pub aggregate: f64,
    /// Witness bound for `t(∂₁-∂₂)(u⁰₁u⁰₁)` at `t = 2^{-2k}`.
    pub witness: Option<WitnessBound>,
    /// Besov aggregate of the same quantity over `ℕ_k`.
    pub witness_besov: Option<f64>,
    pub modulation: Option<f64>,
    pub lei_lin: Option<f64>,
    pub convergence_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthStudy {
    pub q: f64,
    pub rows: Vec<SweepRow>,
    /// Least squares of `log S` on `log k`.
    pub fit: LineFit,
}

fn policy_for(data: &InitialData) -> ProductPolicy {
    match data.params.mode {
        Mode::Theorem => ProductPolicy::for_spacing(data.u1().atoms[0].spacing()),
        Mode::Oracle => ProductPolicy::exact(),
    }
}

/// `ℕ_k` spectrum of the first component of the second iterate at time `t`.
pub fn iterate_spectrum(
    data: &InitialData,
    t: f64,
    nodes: usize,
    cutoffs: &CutoffProfile,
) -> Result<(ShellSpectrum, f64), InflationError> {
    let mut opts = IterateOptions::new(
        Method::Quadrature,
        ShellWindow::Shells(data.geometry.shells.clone()),
        policy_for(data),
    );
    opts.nodes = nodes;
    let it = second_iterate(&data.u0, t, &opts, cutoffs)?;
    Ok((
        construction_spectrum(data, &it.field.components[0], data.params.q, cutoffs),
        it.convergence_gap,
    ))
}

fn row(
    p: &ConstructionParams,
    cutoffs: &CutoffProfile,
    opts: &SweepOptions,
) -> Result<SweepRow, InflationError> {
    let data = theorem_data(p)?;
    let t = p.t();
    let (spectrum, gap) = iterate_spectrum(&data, t, opts.nodes, cutoffs)?;
    let mut out = SweepRow {
        k: p.k,
        t,
        shells: data.geometry.shells.clone(),
        aggregate: spectrum.aggregate,
        spectrum,
        witness: None,
        witness_besov: None,
        modulation: None,
        lei_lin: None,
        convergence_gap: gap,
    };
    if opts.norms {
        let product = interaction_ledger(&data, &policy_for(&data))?.total();
        let tw = 2f64.powi(-2 * p.k);
        out.witness = Some(triebel_witness_bound(&product, tw, p.q, p.eps, cutoffs)?);
        let mut w = vec![0.0; p.n];
        w[0] = 1.0;
        w[1] = -1.0;
        let d = crate::spectral_atoms::apply_symbol(
            &product,
            &crate::spectral_atoms::Multiplier::directional(w),
        )?;
        out.witness_besov = Some(tw * construction_spectrum(&data, &d, p.q, cutoffs).aggregate);
        out.modulation = Some(modulation_norm(data.u1()).value);
        out.lei_lin = Some(
            lei_lin_norm(data.u1())
                .map_err(|e| InflationError::InvalidParams(e.to_string()))?
                .merged,
        );
    }
    Ok(out)
}

pub fn inflation_sweep(
    ks: &[i32],
    template: &ConstructionParams,
    cutoffs: &CutoffProfile,
    opts: &SweepOptions,
) -> Result<GrowthStudy, InflationError> {
    if ks.len() < 3 {
        return Err(InflationError::TooFewLevels(ks.len()));
    }
    let params: Vec<ConstructionParams> = ks
        .iter()
        .map(|&k| ConstructionParams {
            k,
            eta: template.eps * template.eps,
            ..*template
        })
        .collect();
    let workers = opts.threads.clamp(1, ks.len());
    let rows: Vec<SweepRow> = if workers == 1 {
        params
            .iter()
            .map(|p| row(p, cutoffs, opts))
            .collect::<Result<_, _>>()?
    } else {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<SweepRow, InflationError>>>> =
            params.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= params.len() {
                        break;
                    }
                    let r = row(&params[i], cutoffs, opts);
                    *slots[i].lock().unwrap() = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().unwrap().expect("every slot filled"))
            .collect::<Result<_, _>>()?
    };
    let x: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.aggregate).collect();
    let fit = power_law(&x, &y).ok_or_else(|| {
        InflationError::InvalidParams("aggregates must be positive to fit".into())
    })?;
    Ok(GrowthStudy {
        q: template.q,
        rows,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fewer_than_three_levels_is_refused() {
        let p = ConstructionParams::theorem(3, 32, 0.02, 1.0);
        let e = inflation_sweep(
            &[32, 48],
            &p,
            &CutoffProfile::default(),
            &SweepOptions::default(),
        );
        assert!(matches!(e, Err(InflationError::TooFewLevels(2))));
    }

    #[test]
    fn shorter_time_gives_smaller_aggregate() {
        let p = ConstructionParams::theorem(3, 32, 0.02, 1.0);
        let d = theorem_data(&p).unwrap();
        let c = CutoffProfile::default();
        let (full, _) = iterate_spectrum(&d, p.t(), 32, &c).unwrap();
        let (short, _) = iterate_spectrum(&d, p.t() / 64.0, 32, &c).unwrap();
        assert!(full.aggregate > short.aggregate);
    }
}
