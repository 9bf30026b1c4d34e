//! Term-by-term measurement of the lower-bound argument for the second
//! iterate, each quantity next to its predicted scaling.

use super::data::InitialData;
use super::iterate::{leray_divergence, split_tensors, SplitTensors};
use super::ledger::{interaction_ledger, Family};
use super::params::Mode;
use super::tensor::{Factor, PairTensor, ShellWindow};
use super::InflationError;
use crate::lp_besov::{shell_spectrum_with, CutoffProfile, ShellSpectrum};
use crate::spectral_atoms::{
    apply_symbol, AtomField, FreqPoint, Multiplier, ProductPolicy, SamplingSpec,
};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    /// Predicted size up to a constant, e.g. `ηεk^{1/q}`.
    pub predicted: f64,
    pub scaling: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub n: usize,
    pub k: i32,
    pub q: f64,
    pub eps: f64,
    pub eta: f64,
    pub t: f64,
    pub quantities: Vec<Quantity>,
    /// `ℕ_k` shell spectrum of the first component of the second iterate.
    pub spectrum: ShellSpectrum,
    /// `S/(ε³k^{1/q})` in 3D, `S/(ηk^{1/q})` in 2D.
    pub lower_bound_proxy: f64,
    pub nodes: usize,
    pub r_max: u32,
}

impl DecompositionReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| q.value)
    }

    /// Triangle inequalities of the argument, `(label, holds)`.
    pub fn invariants(&self) -> Vec<(String, bool)> {
        let g = |s: &str| self.get(s).unwrap_or(f64::NAN);
        let slack = 1e-12;
        if self.n == 2 {
            return Vec::new();
        }
        let a1 = g("A1");
        vec![
            (
                "A1 >= A11 - A12".into(),
                a1 >= (g("A11") - g("A12")) * (1.0 - slack) - slack * a1,
            ),
            (
                "S >= A1 - A2".into(),
                g("S") >= (a1 - g("A2")) * (1.0 - slack) - slack * a1,
            ),
        ]
    }
}

struct Measure<'a> {
    q: f64,
    data: &'a InitialData,
    cutoffs: &'a CutoffProfile,
}

/// `ℕ_k` shell spectrum with the fixed probe set of each shell: the anchor
/// `-a_j` and a phase sweep along `a_j/|a_j|²`.
pub fn construction_spectrum(
    data: &InitialData,
    f: &AtomField,
    q: f64,
    cutoffs: &CutoffProfile,
) -> ShellSpectrum {
    let g = &data.geometry;
    shell_spectrum_with(f, q, &g.shells, cutoffs, |j| {
        let a = g.a_of(j).expect("shell in geometry").to_vec();
        SamplingSpec::fixed(vec![a.iter().map(|x| -x).collect()], &[a])
    })
}

impl Measure<'_> {
    fn spectrum(&self, f: &AtomField) -> ShellSpectrum {
        construction_spectrum(self.data, f, self.q, self.cutoffs)
    }

    fn agg(&self, f: &AtomField) -> f64 {
        self.spectrum(f).aggregate
    }
}

fn sym(label: &str, f: impl Fn(&FreqPoint) -> Complex64 + Send + Sync + 'static) -> Multiplier {
    Multiplier::new(
        label,
        vec![crate::spectral_atoms::Singularity::Origin],
        move |p| {
            if p.is_origin() {
                ZERO
            } else {
                f(p)
            }
        },
    )
}

fn apply(f: &AtomField, m: &Multiplier) -> Result<AtomField, InflationError> {
    Ok(apply_symbol(f, m)?)
}

/// `Σ_{r≥2} agg(series_r · m · f)`.
fn series_sum(ms: &Measure, f: &AtomField, t: f64, r_max: u32) -> Result<f64, InflationError> {
    let mut total = 0.0;
    for r in 2..=r_max.max(2) {
        total += ms.agg(&apply(f, &Multiplier::duhamel_series(t, r, r))?);
    }
    Ok(total)
}

fn quantity(name: &str, value: f64, predicted: f64, scaling: &str) -> Quantity {
    Quantity {
        name: name.into(),
        value,
        predicted,
        scaling: scaling.into(),
        ratio: value / predicted,
    }
}

pub fn decomposition_report(
    data: &InitialData,
    cutoffs: &CutoffProfile,
    nodes: usize,
) -> Result<DecompositionReport, InflationError> {
    let p = &data.params;
    let t = p.t();
    let h = data.u1().atoms[0].spacing();
    let policy = match p.mode {
        Mode::Theorem => ProductPolicy::for_spacing(h),
        Mode::Oracle => ProductPolicy::exact(),
    };
    let window = ShellWindow::Shells(data.geometry.shells.clone());
    let split = split_tensors(&data.u0, t, nodes, &window, &policy, cutoffs)?;
    let ms = Measure {
        q: p.q,
        data,
        cutoffs,
    };
    let kq = (p.k as f64).powf(1.0 / p.q);
    let mut tensor = split
        .pi0
        .map(&Multiplier::duhamel_series(t, 1, split.r_max));
    tensor.axpy(1.0, &split.tilde);
    let iterate = leray_divergence(&tensor, p.n);
    let spectrum = ms.spectrum(&iterate.components[0]);
    let s = spectrum.aggregate;
    let layout = split.pi0.layout.clone();
    let u1 = data.u1().clone();
    let ut2 = apply(&u1, &Multiplier::first_plus_second())?;
    let scalar = |l: &AtomField, r: &AtomField| -> Result<AtomField, InflationError> {
        Ok(PairTensor::product(
            &layout,
            &[Factor {
                left: vec![l.clone()],
                right: vec![r.clone()],
            }],
            1,
        )?
        .field(0, 0))
    };
    let pi_u1u1 = scalar(&u1, &u1)?;
    let pi_u1ut2 = scalar(&u1, &ut2)?;
    let pi_ut2ut2 = scalar(&ut2, &ut2)?;
    let (eta, eps) = (p.eta, p.eps);
    let pow2 = |x: f64| 2f64.powf(x);
    let k = p.k as f64;
    let mut qs = Vec::new();
    if p.n >= 3 {
        three_d(
            &ms, &split, &tensor, data, &pi_u1u1, &pi_u1ut2, &pi_ut2ut2, &policy, t, &mut qs,
        )?;
        let pred = |name: &str| -> (f64, &'static str) {
            match name {
                "A1" | "A11" | "main" => (eta * eps * kq, "eta eps k^(1/q)"),
                "correction" | "II" => (
                    eta * eps * k * kq * pow2(-k / 2.0),
                    "eta eps k^(1+1/q) 2^(-k/2)",
                ),
                "series" | "A212" => (eta * eta * kq * pow2(-k), "eta^2 k^(1/q) 2^(-k)"),
                "A12" | "A22" => (eta * eta * kq, "eta^2 k^(1/q)"),
                "B2" => (eta * k * pow2(-k), "eta k 2^(-k)"),
                "III" => (
                    eta * eps * k * k * kq * pow2(-k),
                    "eta eps k^(2+1/q) 2^(-k)",
                ),
                _ => (eta * eps * eps * kq, "eta eps^2 k^(1/q)"),
            }
        };
        for q in &mut qs {
            let (v, sc) = pred(&q.name);
            *q = quantity(&q.name, q.value, v, sc);
        }
        qs.push(quantity("S", s, eps.powi(3) * kq, "eps^3 k^(1/q)"));
    } else {
        two_d(
            &ms, &split, &pi_u1u1, &pi_u1ut2, &pi_ut2ut2, t, eta, kq, k, &mut qs,
        )?;
        qs.push(quantity("S", s, eta * kq, "eta k^(1/q)"));
    }
    let proxy = if p.n >= 3 {
        s / (eps.powi(3) * kq)
    } else {
        s / (eta * kq)
    };
    Ok(DecompositionReport {
        n: p.n,
        k: p.k,
        q: p.q,
        eps,
        eta,
        t,
        quantities: qs,
        spectrum,
        lower_bound_proxy: proxy,
        nodes,
        r_max: split.r_max,
    })
}

fn raw(name: &str, value: f64) -> Quantity {
    Quantity {
        name: name.into(),
        value,
        predicted: f64::NAN,
        scaling: String::new(),
        ratio: f64::NAN,
    }
}

#[allow(clippy::too_many_arguments)]
fn three_d(
    ms: &Measure,
    split: &SplitTensors,
    tensor: &PairTensor,
    data: &InitialData,
    pi_u1u1: &AtomField,
    pi_u1ut2: &AtomField,
    pi_ut2ut2: &AtomField,
    policy: &ProductPolicy,
    t: f64,
    qs: &mut Vec<Quantity>,
) -> Result<(), InflationError> {
    let e_t = Multiplier::duhamel_series(t, 1, split.r_max);
    // ∂₁T₁₁ + ∂₂T₁₂ on entries (11, 12, 22)
    let first = |p: &FreqPoint| vec![I * p.xi(0), I * p.xi(1), ZERO];
    let a1 = ms.agg(&tensor.combine(first));
    let riesz_d1 = |p: &FreqPoint| {
        let n2 = p.norm_sq();
        if n2 <= 1e-24 {
            return vec![ZERO; 3];
        }
        let (x1, x2) = (p.xi(0), p.xi(1));
        vec![
            I * x1 * x1 * x1 / n2,
            I * 2.0 * x1 * x1 * x2 / n2,
            I * x1 * x2 * x2 / n2,
        ]
    };
    let a2 = ms.agg(&tensor.combine(riesz_d1));
    let a11 = ms.agg(&split.pi0.map(&e_t).combine(first));
    let a12 = ms.agg(&split.tilde.combine(first));
    let main_field = apply(pi_u1u1, &Multiplier::directional(vec![1.0, -1.0, 0.0]))?;
    let main = t * ms.agg(&main_field);
    let corr = t * ms.agg(&apply(pi_u1ut2, &Multiplier::derivative(1))?);
    let div0 = split.pi0.combine(first);
    let series = series_sum(ms, &div0, t, split.r_max)?;
    // R_{αβ}∂₁ over the four ordered (α, β); entry index per pair
    let terms: [(usize, usize, usize); 4] = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 2)];
    let r_d1 = |a: usize, b: usize| {
        sym("R d1", move |p| {
            I * p.xi(0) * p.xi(a) * p.xi(b) / p.norm_sq()
        })
    };
    let pick = |e: usize, m: Multiplier| {
        move |p: &FreqPoint| {
            let mut v = vec![ZERO; 3];
            v[e] = m.eval(p);
            v
        }
    };
    let pi0_e = split.pi0.map(&e_t);
    let mut a21 = 0.0;
    let mut a22 = 0.0;
    let mut a212 = 0.0;
    let mut a211 = [0.0; 3];
    for (a, b, e) in terms {
        let m = r_d1(a, b);
        a21 += ms.agg(&pi0_e.combine(pick(e, m.clone())));
        a22 += ms.agg(&split.tilde.combine(pick(e, m.clone())));
        let direct = split.pi0.combine(pick(e, m.clone()));
        a212 += series_sum(ms, &direct, t, split.r_max)?;
        if a == b || (a, b) == (0, 1) {
            a211[e] = t * ms.agg(&direct);
        }
    }
    qs.push(raw("A1", a1));
    qs.push(raw("A2", a2));
    qs.push(raw("A11", a11));
    qs.push(raw("A12", a12));
    qs.push(raw("main", main));
    qs.push(raw("correction", corr));
    qs.push(raw("series", series));
    qs.push(raw("A21", a21));
    qs.push(raw("A22", a22));
    qs.push(raw("A211_11", a211[0]));
    qs.push(raw("A211_12", a211[1]));
    qs.push(raw("A211_22", a211[2]));
    qs.push(raw("A212", a212));
    let ledger = interaction_ledger(data, policy)?;
    let cube = sym("i xi1^3/|xi|^2", |p| I * p.xi(0).powi(3) / p.norm_sq());
    qs.push(raw(
        "B1",
        t * ms.agg(&apply(ledger.family(Family::U51), &cube)?),
    ));
    qs.push(raw(
        "B2",
        t * ms.agg(&apply(ledger.family(Family::U52), &cube)?),
    ));
    let mm = sym("i xi1 xi2^2/|xi|^2", |p| {
        I * p.xi(0) * p.xi(1) * p.xi(1) / p.norm_sq()
    });
    qs.push(raw("I", t * ms.agg(&apply(pi_u1u1, &mm)?)));
    qs.push(raw("II", 2.0 * t * ms.agg(&apply(pi_u1ut2, &mm)?)));
    qs.push(raw("III", t * ms.agg(&apply(pi_ut2ut2, &mm)?)));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn two_d(
    ms: &Measure,
    split: &SplitTensors,
    pi_u1u1: &AtomField,
    pi_u1ut2: &AtomField,
    pi_ut2ut2: &AtomField,
    t: f64,
    eta: f64,
    kq: f64,
    k: f64,
    qs: &mut Vec<Quantity>,
) -> Result<(), InflationError> {
    let e_t = Multiplier::duhamel_series(t, 1, split.r_max);
    let b1 = |p: &FreqPoint| Multiplier::leray_div_coefficients(p, 0, 2);
    let r_tilde = ms.agg(&split.tilde.combine(b1));
    let q_full = ms.agg(&split.pi0.map(&e_t).combine(b1));
    let m = sym("i xi1 xi2^2/|xi|^2", |p| {
        I * p.xi(0) * p.xi(1) * p.xi(1) / p.norm_sq()
    });
    let m2 = sym("i xi1^2 xi2/|xi|^2", |p| {
        I * p.xi(0) * p.xi(0) * p.xi(1) / p.norm_sq()
    });
    let qa = apply(pi_u1ut2, &Multiplier::derivative(1))?;
    let qb = apply(&pi_u1ut2.scaled(2.0).add(&pi_ut2ut2.scaled(-1.0)), &m)?;
    let qc = apply(pi_u1ut2, &m2)?.scaled(-2.0);
    let q_tilde = ms.agg(&apply(&qa.add(&qb).add(&qc), &e_t)?);
    let main = t * ms.agg(&apply(pi_u1u1, &Multiplier::derivative(1))?);
    let cross = t * ms.agg(&apply(pi_u1u1, &m2)?);
    let lead = sym("i(xi1^2-xi2^2)xi2/|xi|^2", |p| {
        let (x1, x2) = (p.xi(0), p.xi(1));
        I * (x1 * x1 - x2 * x2) * x2 / p.norm_sq()
    });
    let series = series_sum(ms, &apply(pi_u1u1, &lead)?, t, split.r_max)?;
    let pow2 = |x: f64| 2f64.powf(x);
    qs.push(quantity("R~", r_tilde, eta * eta * kq, "eta^2 k^(1/q)"));
    qs.push(quantity("Q", q_full, eta * kq, "eta k^(1/q)"));
    let qt = eta * kq * pow2(-k / 2.0);
    qs.push(quantity("Q~", q_tilde, qt, "eta k^(1/q) 2^(-k/2)"));
    qs.push(quantity(
        "Q~_d2",
        ms.agg(&apply(&qa, &e_t)?),
        qt,
        "eta k^(1/q) 2^(-k/2)",
    ));
    qs.push(quantity(
        "Q~_M",
        ms.agg(&apply(&qb, &e_t)?),
        qt,
        "eta k^(1/q) 2^(-k/2)",
    ));
    qs.push(quantity(
        "Q~_R",
        ms.agg(&apply(&qc, &e_t)?),
        qt,
        "eta k^(1/q) 2^(-k/2)",
    ));
    qs.push(quantity("main", main, eta * kq, "eta k^(1/q)"));
    let eps2 = ms.data.params.eps.powi(2);
    qs.push(quantity(
        "cross",
        cross,
        eta * eps2 * kq,
        "eta eps^2 k^(1/q)",
    ));
    qs.push(quantity(
        "series",
        series,
        eta * kq * pow2(-k),
        "eta k^(1/q) 2^(-k)",
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::data::theorem_data;
    use super::super::params::ConstructionParams;
    use super::*;

    #[test]
    fn k32_report_triangle_inequalities() {
        let d = theorem_data(&ConstructionParams::theorem(3, 32, 0.02, 1.0)).unwrap();
        let r = decomposition_report(&d, &CutoffProfile::default(), 32).unwrap();
        for (label, ok) in r.invariants() {
            assert!(ok, "{label}: {:?}", r.quantities);
        }
        assert!(r.get("A11").unwrap() > 0.0);
        assert!(r.get("S").unwrap() > 0.0);
    }
}
