//! Symmetric product tensors `Π_{βγ} = Σ X_β Y_γ` of atom vector fields,
//! stored per unordered atom pair so that symbol combinations across the
//! entries stay exact on the envelope lattice.

use super::InflationError;
use crate::lp_besov::CutoffProfile;
use crate::quad::gauss_legendre_on;
use crate::spectral_atoms::atom::{ball_symbol_max, multiply_samples};
use crate::spectral_atoms::envelope::ConvPlan;
use crate::spectral_atoms::{
    atom_product, classify_ball, Atom, AtomField, BlockClass, Carrier, CarrierInfo, Envelope,
    FreqPoint, Multiplier, ProductOutcome, ProductPolicy, TailBound,
};
use num_complex::Complex64;
use std::collections::HashMap;

/// Which product balls are kept.
#[derive(Clone, Debug, PartialEq)]
pub enum ShellWindow {
    All,
    /// Only balls that meet `supp φ_j` for one of these `j`.
    Shells(Vec<i32>),
}

impl ShellWindow {
    pub fn admits(&self, norm: f64, radius: f64, cutoffs: &CutoffProfile) -> bool {
        match self {
            ShellWindow::All => true,
            ShellWindow::Shells(js) => js
                .iter()
                .any(|&j| classify_ball(norm, radius, j, cutoffs) != BlockClass::Dropped),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub i: usize,
    pub j: usize,
    pub carrier: Carrier,
    /// Shift of atom `j`; products are expressed around it.
    pub shift: Vec<f64>,
    pub radius: f64,
    pub separation: f64,
}

/// Admitted pairs of one atom layout, split by the product policy.
#[derive(Clone, Debug, PartialEq)]
pub struct PairLayout {
    pub dim: usize,
    pub exact: Vec<PairSpec>,
    pub tails: Vec<PairSpec>,
    pub decay_order: u32,
    policy: ProductPolicy,
}

pub fn pair_layout(
    layout: &AtomField,
    policy: &ProductPolicy,
    window: &ShellWindow,
    cutoffs: &CutoffProfile,
) -> Result<PairLayout, InflationError> {
    let atoms = &layout.atoms;
    let mut exact = Vec::new();
    let mut tails = Vec::new();
    for i in 0..atoms.len() {
        for j in i..atoms.len() {
            let (a, b) = (&atoms[i], &atoms[j]);
            if a.spacing() != b.spacing() {
                return Err(crate::spectral_atoms::AtomError::SpacingMismatch(
                    a.spacing(),
                    b.spacing(),
                )
                .into());
            }
            let carrier = a.carrier.add(&b.carrier);
            let radius = a.support_radius + b.support_radius;
            if !window.admits(carrier.norm(), radius, cutoffs) {
                continue;
            }
            let separation = a
                .shift
                .iter()
                .zip(&b.shift)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            let spec = PairSpec {
                i,
                j,
                carrier,
                shift: b.shift.clone(),
                radius,
                separation,
            };
            if separation > policy.shift_threshold {
                tails.push(spec);
            } else {
                exact.push(spec);
            }
        }
    }
    Ok(PairLayout {
        dim: layout.dim,
        exact,
        tails,
        decay_order: policy.decay_order,
        policy: *policy,
    })
}

/// One bilinear term `B(X, Y)_{βγ} = Σ_{i,j} X_{β,i} Y_{γ,j}`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub left: Vec<AtomField>,
    pub right: Vec<AtomField>,
}

impl Factor {
    pub fn square(u: &[AtomField]) -> Self {
        Self {
            left: u.to_vec(),
            right: u.to_vec(),
        }
    }
}

/// Entries `β ≤ γ < active` in row order.
pub fn entry_pairs(active: usize) -> Vec<(usize, usize)> {
    (0..active)
        .flat_map(|b| (b..active).map(move |g| (b, g)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairTensor {
    pub layout: PairLayout,
    pub active: usize,
    /// `env[e][k]`: entry `e`, exact pair `k`; atom phases folded in.
    pub env: Vec<Vec<Envelope>>,
    /// `tail[e][k]`: sup bound of entry `e` on tail pair `k`.
    pub tail: Vec<Vec<f64>>,
}

fn folded(a: &Atom) -> Envelope {
    let mut e = a.envelope.clone();
    if a.phase != Complex64::new(1.0, 0.0) {
        e.scale(a.phase);
    }
    e
}

fn add_padded(acc: &mut Envelope, e: &Envelope) {
    if e.half() > acc.half() {
        *acc = acc.padded(e.half());
    }
    let e = if e.half() < acc.half() {
        e.padded(acc.half())
    } else {
        e.clone()
    };
    for (x, y) in acc.samples_mut().iter_mut().zip(e.samples()) {
        *x += y;
    }
}

struct Products<'a> {
    layout: &'a PairLayout,
    plans: HashMap<(usize, usize), ConvPlan>,
    transforms: HashMap<(usize, usize, usize), Vec<Complex64>>,
}

impl<'a> Products<'a> {
    fn new(layout: &'a PairLayout) -> Self {
        Self {
            layout,
            plans: HashMap::new(),
            transforms: HashMap::new(),
        }
    }

    fn plan(&mut self, spacing: f64, ha: usize, hb: usize) -> &ConvPlan {
        let dim = self.layout.dim;
        let key = (ha.min(hb), ha.max(hb));
        self.plans
            .entry(key)
            .or_insert_with(|| ConvPlan::new(dim, spacing, key.0, key.1))
    }

    /// Cached transform of atom `i` of `field` on the plan of pair `(ha, hb)`.
    fn transform(&mut self, field: &AtomField, i: usize, ha: usize, hb: usize) -> &Vec<Complex64> {
        let key = (
            field as *const AtomField as usize,
            i,
            ha.min(hb) * 100_000 + ha.max(hb),
        );
        if !self.transforms.contains_key(&key) {
            let a = &field.atoms[i];
            let env = folded(a);
            let t = self.plan(a.spacing(), ha, hb).transform(&env);
            self.transforms.insert(key, t);
        }
        &self.transforms[&key]
    }

    /// Entry `(β, γ)` of the pair, summed over the factors.
    fn entry(
        &mut self,
        factors: &[Factor],
        spec: &PairSpec,
        b: usize,
        g: usize,
    ) -> Result<Envelope, InflationError> {
        let (i, j) = (spec.i, spec.j);
        let first = &factors[0].left[b].atoms;
        let (ha, hb) = (first[i].envelope.half(), first[j].envelope.half());
        let spacing = first[i].spacing();
        let fast = spec.separation == 0.0
            && factors.iter().all(|f| {
                f.left[b].atoms[i].envelope.half() == ha
                    && f.right[g].atoms[i].envelope.half() == ha
                    && f.left[b].atoms[j].envelope.half() == hb
                    && f.right[g].atoms[j].envelope.half() == hb
            });
        let mut out = if fast {
            let n = self.plan(spacing, ha, hb).half_out();
            let mut spec_sum: Option<Vec<Complex64>> = None;
            for f in factors {
                let mut terms = vec![(&f.left[b], i, &f.right[g], j)];
                if i != j {
                    terms.push((&f.left[b], j, &f.right[g], i));
                }
                for (x, xi, y, yi) in terms {
                    let tx = self.transform(x, xi, ha, hb).clone();
                    let ty = self.transform(y, yi, ha, hb);
                    match &mut spec_sum {
                        None => spec_sum = Some(tx.iter().zip(ty).map(|(p, q)| p * q).collect()),
                        Some(acc) => {
                            for ((s, p), q) in acc.iter_mut().zip(&tx).zip(ty) {
                                *s += p * q;
                            }
                        }
                    }
                }
            }
            let mut prod = spec_sum.unwrap_or_default();
            let plan = self.plan(spacing, ha, hb);
            let mut e = plan.finish(&mut prod);
            debug_assert_eq!(e.half(), n);
            e.scale(Complex64::new(e.inverse_weight(), 0.0));
            e
        } else {
            let mut acc: Option<Envelope> = None;
            for f in factors {
                let mut terms = vec![(&f.left[b].atoms[i], &f.right[g].atoms[j])];
                if i != j {
                    terms.push((&f.right[g].atoms[i], &f.left[b].atoms[j]));
                }
                for (x, y) in terms {
                    let p = match atom_product(x, y, &ProductPolicy::exact())? {
                        ProductOutcome::Exact(a) => folded(&a),
                        ProductOutcome::Tail(_) => {
                            unreachable!("exact policy never returns a tail")
                        }
                    };
                    match &mut acc {
                        None => acc = Some(p),
                        Some(s) => add_padded(s, &p),
                    }
                }
            }
            acc.expect("at least one factor")
        };
        out.clear_outside(spec.radius);
        Ok(out)
    }
}

/// Sup-norm certificates of the tail pairs, per entry.
fn tail_constants(layout: &PairLayout, factors: &[Factor], active: usize) -> Vec<Vec<f64>> {
    let order = layout.decay_order;
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut dc = |f: &AtomField, i: usize| -> f64 {
        *cache
            .entry((f as *const AtomField as usize, i))
            .or_insert_with(|| f.atoms[i].decay_constant(order))
    };
    let scale = 2f64.powi(order as i32);
    entry_pairs(active)
        .into_iter()
        .map(|(b, g)| {
            layout
                .tails
                .iter()
                .map(|s| {
                    let mut c = 0.0;
                    for f in factors {
                        c += dc(&f.left[b], s.i) * dc(&f.right[g], s.j);
                        if s.i != s.j {
                            c += dc(&f.left[b], s.j) * dc(&f.right[g], s.i);
                        }
                    }
                    c * scale
                })
                .collect()
        })
        .collect()
}

impl PairTensor {
    pub fn zeros(layout: &PairLayout, active: usize, template: &AtomField) -> Self {
        let ne = active * (active + 1) / 2;
        let env = (0..ne)
            .map(|_| {
                layout
                    .exact
                    .iter()
                    .map(|s| {
                        let (a, b) = (&template.atoms[s.i].envelope, &template.atoms[s.j].envelope);
                        Envelope::zeros(layout.dim, a.half() + b.half(), a.spacing())
                    })
                    .collect()
            })
            .collect();
        Self {
            layout: layout.clone(),
            active,
            env,
            tail: vec![vec![0.0; layout.tails.len()]; ne],
        }
    }

    /// `Σ_factors B(X, Y)` at one instant, no time integration.
    pub fn product(
        layout: &PairLayout,
        factors: &[Factor],
        active: usize,
    ) -> Result<Self, InflationError> {
        let mut p = Products::new(layout);
        let mut env = Vec::new();
        for (b, g) in entry_pairs(active) {
            let mut row = Vec::with_capacity(layout.exact.len());
            for spec in &layout.exact {
                row.push(p.entry(factors, spec, b, g)?);
            }
            env.push(row);
        }
        Ok(Self {
            layout: layout.clone(),
            active,
            env,
            tail: tail_constants(layout, factors, active),
        })
    }

    /// `∫₀ᵗ e^{(t-τ)Δ} Σ_factors B(X(τ), Y(τ)) dτ` by `nodes`-point
    /// Gauss–Legendre. Tails are bounded by `t·tail_scale` times the
    /// certificates of `tail_source` (the heat flow contracts sup norms).
    pub fn duhamel(
        layout: &PairLayout,
        active: usize,
        t: f64,
        nodes: usize,
        integrand: impl Fn(f64) -> Result<Vec<Factor>, InflationError>,
        tail_source: &[Factor],
        tail_scale: f64,
    ) -> Result<Self, InflationError> {
        let template = &tail_source[0].left[0];
        let mut acc = Self::zeros(layout, active, template);
        if t > 0.0 {
            for (tau, w) in gauss_legendre_on(nodes, 0.0, t) {
                let factors = integrand(tau)?;
                let mut step = Self::product(layout, &factors, active)?;
                step = step.map_exact(&Multiplier::heat(t - tau));
                acc.axpy(w, &step);
            }
        }
        let tails = tail_constants(layout, tail_source, active);
        for (row, src) in acc.tail.iter_mut().zip(tails) {
            for (x, c) in row.iter_mut().zip(src) {
                *x = t * tail_scale * c;
            }
        }
        Ok(acc)
    }

    pub fn entries(&self) -> usize {
        self.env.len()
    }

    pub fn entry_index(&self, b: usize, g: usize) -> usize {
        let (b, g) = (b.min(g), b.max(g));
        entry_pairs(self.active)
            .iter()
            .position(|p| *p == (b, g))
            .expect("entry inside the active block")
    }

    fn map_exact(&self, m: &Multiplier) -> Self {
        let mut out = self.clone();
        for row in &mut out.env {
            for (e, s) in row.iter_mut().zip(&self.layout.exact) {
                *e = multiply_samples(e, &CarrierInfo::new(&s.carrier), m);
            }
        }
        out
    }

    /// Multiplier applied to every entry.
    pub fn map(&self, m: &Multiplier) -> Self {
        let mut out = self.map_exact(m);
        for row in &mut out.tail {
            for (c, s) in row.iter_mut().zip(&self.layout.tails) {
                *c *= ball_symbol_max(&s.carrier, s.radius, m);
            }
        }
        out
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &PairTensor) {
        let z = Complex64::new(a, 0.0);
        for (ra, rb) in self.env.iter_mut().zip(&other.env) {
            for (x, y) in ra.iter_mut().zip(rb) {
                let y = if y.half() < x.half() {
                    y.padded(x.half())
                } else {
                    y.clone()
                };
                if y.half() > x.half() {
                    *x = x.padded(y.half());
                }
                for (p, q) in x.samples_mut().iter_mut().zip(y.samples()) {
                    *p += z * q;
                }
            }
        }
        for (ra, rb) in self.tail.iter_mut().zip(&other.tail) {
            for (x, y) in ra.iter_mut().zip(rb) {
                *x += a.abs() * y;
            }
        }
    }

    /// Largest sample difference relative to the largest sample of `other`.
    pub fn rel_gap(&self, other: &PairTensor) -> f64 {
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for (ra, rb) in self.env.iter().zip(&other.env) {
            for (x, y) in ra.iter().zip(rb) {
                let h = x.half().max(y.half());
                let (x, y) = (x.padded(h), y.padded(h));
                for (p, q) in x.samples().iter().zip(y.samples()) {
                    diff = diff.max((p - q).norm());
                    scale = scale.max(q.norm());
                }
            }
        }
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    fn atom(&self, k: usize, envelope: Envelope) -> Atom {
        let s = &self.layout.exact[k];
        Atom {
            carrier: s.carrier.clone(),
            shift: s.shift.clone(),
            phase: Complex64::new(1.0, 0.0),
            envelope,
            support_radius: s.radius,
        }
    }

    fn tail_bound(&self, k: usize, constant: f64) -> TailBound {
        let s = &self.layout.tails[k];
        TailBound {
            constant,
            decay_order: self.layout.decay_order,
            separation: s.separation,
            carrier: s.carrier.clone(),
            support_radius: s.radius,
        }
    }

    /// Entry `(β, γ)` as a scalar field.
    pub fn field(&self, b: usize, g: usize) -> AtomField {
        let e = self.entry_index(b, g);
        let atoms = self.env[e]
            .iter()
            .enumerate()
            .map(|(k, env)| self.atom(k, env.clone()))
            .collect();
        let tails = self.tail[e]
            .iter()
            .enumerate()
            .map(|(k, c)| self.tail_bound(k, *c))
            .collect();
        AtomField {
            dim: self.layout.dim,
            atoms,
            tails,
            real: true,
        }
    }

    /// `Σ_e c_e(ξ)·Π_e` for a symbol-valued coefficient vector over the entries.
    pub fn combine(&self, coef: impl Fn(&FreqPoint) -> Vec<Complex64>) -> AtomField {
        let n = self.layout.dim;
        let mut atoms = Vec::with_capacity(self.layout.exact.len());
        let mut eta = vec![0.0; n];
        for (k, s) in self.layout.exact.iter().enumerate() {
            let info = CarrierInfo::new(&s.carrier);
            let h = self.env.iter().map(|r| r[k].half()).max().unwrap_or(0);
            let rows: Vec<Envelope> = self.env.iter().map(|r| r[k].padded(h)).collect();
            let mut out = rows[0].clone();
            for idx in 0..out.len() {
                if rows
                    .iter()
                    .all(|r| r.samples()[idx] == Complex64::new(0.0, 0.0))
                {
                    out.samples_mut()[idx] = Complex64::new(0.0, 0.0);
                    continue;
                }
                out.eta_into(idx, &mut eta);
                let c = coef(&FreqPoint {
                    info: &info,
                    eta: &eta,
                });
                out.samples_mut()[idx] =
                    rows.iter().zip(&c).map(|(r, c)| c * r.samples()[idx]).sum();
            }
            atoms.push(self.atom(k, out));
        }
        let mut tails = Vec::new();
        for (k, s) in self.layout.tails.iter().enumerate() {
            let info = CarrierInfo::new(&s.carrier);
            let maxes = ball_max_vec(&info, s.radius, &coef, self.entries());
            let c: f64 = maxes
                .iter()
                .zip(&self.tail)
                .map(|(m, row)| m * row[k])
                .sum();
            tails.push(self.tail_bound(k, c));
        }
        AtomField {
            dim: n,
            atoms,
            tails,
            real: true,
        }
    }

    pub fn policy(&self) -> ProductPolicy {
        self.layout.policy
    }
}

/// Sampled `max |c_e|` over the support ball, per entry.
fn ball_max_vec(
    info: &CarrierInfo,
    radius: f64,
    coef: &impl Fn(&FreqPoint) -> Vec<Complex64>,
    entries: usize,
) -> Vec<f64> {
    let n = info.value.len();
    let ticks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut best = vec![0.0f64; entries];
    let mut eta = vec![0.0; n];
    for idx in 0..ticks.len().pow(n as u32) {
        let mut r = idx;
        for e in eta.iter_mut() {
            *e = ticks[r % ticks.len()] * radius;
            r /= ticks.len();
        }
        if eta.iter().map(|x| x * x).sum::<f64>() > radius * radius {
            continue;
        }
        for (b, c) in best.iter_mut().zip(coef(&FreqPoint { info, eta: &eta })) {
            *b = b.max(c.norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_atoms::{make_atom, EnvelopeGrid, EnvelopeSymbol};

    fn two_atoms() -> AtomField {
        let c = CutoffProfile::default();
        let s = EnvelopeSymbol::rho(&c);
        let g = EnvelopeGrid::sized(1.0 / 8.0);
        let mut a = make_atom(Carrier::from_vec(vec![5.0, 1.0]), vec![0.5, 0.25], &s, g).unwrap();
        a.phase = Complex64::from_polar(1.0, 0.3);
        let b = make_atom(
            Carrier::from_vec(vec![-2.0, 3.0]),
            vec![0.5, 0.25],
            &s.scaled(2.0),
            g,
        )
        .unwrap();
        let c3 = make_atom(Carrier::from_vec(vec![1.0, 1.0]), vec![1.5, -0.75], &s, g).unwrap();
        AtomField::from_atoms(2, vec![a, b, c3], false)
    }

    #[test]
    fn fast_and_slow_paths_match_atom_product() {
        let u = two_atoms();
        let layout = pair_layout(
            &u,
            &ProductPolicy::exact(),
            &ShellWindow::All,
            &CutoffProfile::default(),
        )
        .unwrap();
        assert_eq!(layout.exact.len(), 6);
        let t =
            PairTensor::product(&layout, &[Factor::square(std::slice::from_ref(&u))], 1).unwrap();
        for (k, s) in layout.exact.iter().enumerate() {
            let w = if s.i == s.j { 1.0 } else { 2.0 };
            let ProductOutcome::Exact(p) =
                atom_product(&u.atoms[s.i], &u.atoms[s.j], &ProductPolicy::exact()).unwrap()
            else {
                panic!()
            };
            let mut want = p.envelope.clone();
            want.scale(p.phase * w);
            let got = &t.env[0][k];
            assert_eq!(got.half(), want.half());
            for (x, y) in got.samples().iter().zip(want.samples()) {
                assert!((x - y).norm() < 1e-13 * want.max_abs(), "pair {k}");
            }
        }
    }

    #[test]
    fn shell_window_drops_far_pairs() {
        let u = two_atoms();
        let w = ShellWindow::Shells(vec![20]);
        let layout =
            pair_layout(&u, &ProductPolicy::exact(), &w, &CutoffProfile::default()).unwrap();
        assert!(layout.exact.is_empty() && layout.tails.is_empty());
    }
}
