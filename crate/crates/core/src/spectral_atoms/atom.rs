use super::carrier::{cis_dot, Carrier};
use super::envelope::Envelope;
use super::symbol::{CarrierInfo, FreqPoint, Multiplier, Singularity};
use crate::lp_besov::cutoffs::CutoffProfile;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomError {
    #[error("symbol support radius {support} exceeds envelope half-width {r_env}; need R_env >= {support}")]
    SupportExceedsEnvelope { support: f64, r_env: f64 },
    #[error("symbol `{symbol}` is singular inside the support ball of atom {index} (carrier {carrier:?}, radius {radius})")]
    SingularSymbol {
        symbol: String,
        index: usize,
        carrier: Vec<f64>,
        radius: f64,
    },
    #[error("envelope spacing mismatch ({0} vs {1}); resample first")]
    SpacingMismatch(f64, f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub carrier: Carrier,
    pub shift: Vec<f64>,
    pub phase: Complex64,
    pub envelope: Envelope,
    pub support_radius: f64,
}

/// Certificate for a discarded product: its sup norm is at most
/// `constant·(1+separation)^{-decay_order}`. The Fourier support ball is kept
/// so that dyadic blocks can still drop it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBound {
    pub constant: f64,
    pub decay_order: u32,
    pub separation: f64,
    pub carrier: Carrier,
    pub support_radius: f64,
}

impl TailBound {
    pub fn value(&self) -> f64 {
        self.constant * (1.0 + self.separation).powi(-(self.decay_order as i32))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomField {
    pub dim: usize,
    pub atoms: Vec<Atom>,
    pub tails: Vec<TailBound>,
    /// Declared real-valued: atoms come in conjugate-carrier pairs.
    pub real: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomVectorField {
    pub components: Vec<AtomField>,
}

/// Frequency-side description of an envelope profile.
#[derive(Clone)]
pub struct EnvelopeSymbol {
    pub support_radius: f64,
    /// Width of the smooth transition band; resolution is reported against it.
    pub band_width: f64,
    f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
}

impl EnvelopeSymbol {
    pub fn new(
        support_radius: f64,
        band_width: f64,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            support_radius,
            band_width,
            f: Arc::new(f),
        }
    }

    /// `ϱ(η) = ψ(4η)`.
    pub fn rho(cutoffs: &CutoffProfile) -> Self {
        let c = cutoffs.clone();
        Self::new(cutoffs.rho_support(), cutoffs.rho_band(), move |eta| {
            let r = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
            Complex64::new(c.rho(r), 0.0)
        })
    }

    /// `ψ` itself.
    pub fn psi(cutoffs: &CutoffProfile) -> Self {
        let c = cutoffs.clone();
        Self::new(c.psi_outer(), c.psi_outer() - c.psi_inner(), move |eta| {
            let r = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
            Complex64::new(c.psi(r), 0.0)
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = self.f.clone();
        Self::new(self.support_radius, self.band_width, move |e| s * f(e))
    }

    pub fn eval(&self, eta: &[f64]) -> Complex64 {
        (self.f)(eta)
    }
}

/// Lattice used when sampling an envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeGrid {
    pub spacing: f64,
    /// Fixed half-width; `None` sizes the cube to the symbol's support.
    pub r_env: Option<f64>,
}

impl EnvelopeGrid {
    pub fn sized(spacing: f64) -> Self {
        Self {
            spacing,
            r_env: None,
        }
    }

    /// Default lattices: 64 samples across `[-1,1]` in 2D, 32 in 3D.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            1 | 2 => Self::sized(1.0 / 32.0),
            _ => Self::sized(1.0 / 16.0),
        }
    }
}

pub fn make_atom(
    carrier: Carrier,
    shift: Vec<f64>,
    symbol: &EnvelopeSymbol,
    grid: EnvelopeGrid,
) -> Result<Atom, AtomError> {
    let dim = shift.len();
    if carrier.dim() != dim {
        return Err(AtomError::DimensionMismatch(carrier.dim(), dim));
    }
    let need = (symbol.support_radius / grid.spacing - 1e-9)
        .ceil()
        .max(0.0) as usize;
    let half = match grid.r_env {
        Some(r) => {
            if symbol.support_radius > r * (1.0 + 1e-12) {
                return Err(AtomError::SupportExceedsEnvelope {
                    support: symbol.support_radius,
                    r_env: r,
                });
            }
            (r / grid.spacing + 1e-9).floor() as usize
        }
        None => need,
    };
    let mut envelope = Envelope::from_fn(dim, half, grid.spacing, |eta| symbol.eval(eta));
    envelope.clear_outside(symbol.support_radius);
    Ok(Atom {
        carrier,
        shift,
        phase: Complex64::new(1.0, 0.0),
        envelope,
        support_radius: symbol.support_radius,
    })
}

impl Atom {
    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn spacing(&self) -> f64 {
        self.envelope.spacing()
    }

    /// Half-period of the discrete inverse transform; outside it the atom is
    /// taken to vanish (its periodic images are not part of the model).
    pub fn window(&self) -> f64 {
        PI / self.spacing()
    }

    /// Samples per transition band of a profile with the given band width.
    pub fn resolution(&self, band_width: f64) -> f64 {
        band_width / self.spacing()
    }

    /// Value at local coordinate `y = x + shift`.
    pub fn eval_local(&self, y: &[f64]) -> Complex64 {
        let w = self.window();
        if y.iter().any(|v| v.abs() > w) {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * self.carrier.cis_dot(y) * self.envelope.inverse_at(y)
    }

    pub fn mirror(&self) -> Atom {
        Atom {
            carrier: self.carrier.neg(),
            shift: self.shift.clone(),
            phase: self.phase.conj(),
            envelope: self.envelope.mirrored_conj(),
            support_radius: self.support_radius,
        }
    }

    /// Certified `sup_y (1+|y|)^N |ǧ(y)|` inside the window, from N-th
    /// differences of the samples.
    pub fn decay_constant(&self, order: u32) -> f64 {
        let env = &self.envelope;
        let n = env.dim();
        let h = env.spacing();
        let big = env.padded(env.half() + order as usize);
        let mut diff_l1 = 0.0;
        let mut m = [0i64; 3];
        let binom: Vec<f64> = (0..=order)
            .map(|k| (0..k).fold(1.0, |acc, i| acc * (order - i) as f64 / (i + 1) as f64))
            .collect();
        for d in 0..n {
            for idx in 0..big.len() {
                big.index_into(idx, &mut m[..n]);
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, b) in binom.iter().enumerate() {
                    let mut mm = m;
                    mm[d] -= k as i64;
                    if mm[d].unsigned_abs() as usize <= big.half() {
                        let sign = if (order as usize - k) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        acc += sign * b * big.samples()[big.flat_index(&mm[..n])];
                    }
                }
                diff_l1 += acc.norm();
            }
        }
        let w = env.inverse_weight();
        let nn = order as i32;
        2f64.powi(nn - 1)
            * w
            * (env.l1() + (n as f64).powf(nn as f64 / 2.0) * (PI / (2.0 * h)).powi(nn) * diff_l1)
    }
}

/// When an exact product is formed instead of a tail certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductPolicy {
    pub shift_threshold: f64,
    pub decay_order: u32,
}

impl ProductPolicy {
    /// Exact only when `|Δshift|·h ≤ π/4`, else an order-8 tail.
    pub fn for_spacing(h: f64) -> Self {
        Self {
            shift_threshold: PI / (4.0 * h),
            decay_order: 8,
        }
    }

    /// Every product exact (periodic oracle comparisons).
    pub fn exact() -> Self {
        Self {
            shift_threshold: f64::INFINITY,
            decay_order: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProductOutcome {
    Exact(Atom),
    Tail(TailBound),
}

fn shift_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn atom_product(
    a: &Atom,
    b: &Atom,
    policy: &ProductPolicy,
) -> Result<ProductOutcome, AtomError> {
    if a.dim() != b.dim() {
        return Err(AtomError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.spacing() != b.spacing() {
        return Err(AtomError::SpacingMismatch(a.spacing(), b.spacing()));
    }
    let sep = shift_distance(&a.shift, &b.shift);
    let carrier = a.carrier.add(&b.carrier);
    let radius = a.support_radius + b.support_radius;
    if sep > policy.shift_threshold {
        let n = policy.decay_order;
        let constant = a.decay_constant(n) * b.decay_constant(n) * 2f64.powi(n as i32);
        return Ok(ProductOutcome::Tail(TailBound {
            constant,
            decay_order: n,
            separation: sep,
            carrier,
            support_radius: radius,
        }));
    }
    let delta: Vec<f64> = a.shift.iter().zip(&b.shift).map(|(x, y)| x - y).collect();
    let moved = if sep == 0.0 {
        a.envelope.clone()
    } else {
        let mut e = a.envelope.clone();
        let mut eta = vec![0.0; a.dim()];
        for i in 0..e.len() {
            e.eta_into(i, &mut eta);
            let z = cis_dot(&eta, &delta);
            e.samples_mut()[i] *= z;
        }
        e
    };
    let mut envelope = moved.convolve(&b.envelope);
    envelope.scale(Complex64::new(a.envelope.inverse_weight(), 0.0));
    envelope.clear_outside(radius);
    let phase = a.phase
        * b.phase
        * if sep == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            a.carrier.cis_dot(&delta)
        };
    Ok(ProductOutcome::Exact(Atom {
        carrier,
        shift: b.shift.clone(),
        phase,
        envelope,
        support_radius: radius,
    }))
}

/// Which way `dyadic_block` treated an atom or tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockClass {
    Dropped,
    Passed,
    Multiplied,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DyadicBlock {
    pub field: AtomField,
    pub atom_classes: Vec<BlockClass>,
    pub tail_classes: Vec<BlockClass>,
}

pub fn classify_ball(norm: f64, radius: f64, j: i32, cutoffs: &CutoffProfile) -> BlockClass {
    let s = 2f64.powi(j);
    let lo = (norm - radius).max(0.0);
    let hi = norm + radius;
    let (drop_lo, drop_hi) = cutoffs.phi_support();
    let (one_lo, one_hi) = cutoffs.phi_plateau();
    if hi <= drop_lo * s || lo >= drop_hi * s {
        BlockClass::Dropped
    } else if lo >= one_lo * s && hi <= one_hi * s {
        BlockClass::Passed
    } else {
        BlockClass::Multiplied
    }
}

impl AtomField {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            atoms: Vec::new(),
            tails: Vec::new(),
            real: true,
        }
    }

    pub fn from_atoms(dim: usize, atoms: Vec<Atom>, real: bool) -> Self {
        Self {
            dim,
            atoms,
            tails: Vec::new(),
            real,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.tails.is_empty()
    }

    pub fn tail_allowance(&self) -> f64 {
        self.tails.iter().map(TailBound::value).sum()
    }

    pub fn add(&self, other: &AtomField) -> AtomField {
        assert_eq!(self.dim, other.dim);
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut tails = self.tails.clone();
        tails.extend(other.tails.iter().cloned());
        AtomField {
            dim: self.dim,
            atoms,
            tails,
            real: self.real && other.real,
        }
    }

    pub fn scaled(&self, s: f64) -> AtomField {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.envelope.scale(Complex64::new(s, 0.0));
        }
        for t in &mut out.tails {
            t.constant *= s.abs();
        }
        out
    }

    /// Sum atoms that share carrier, shift and lattice into one.
    pub fn merged(&self) -> AtomField {
        let mut out: Vec<Atom> = Vec::new();
        for a in &self.atoms {
            if let Some(b) = out.iter_mut().find(|b| {
                b.shift == a.shift
                    && b.envelope.spacing() == a.envelope.spacing()
                    && b.carrier.same_as(&a.carrier)
            }) {
                let half = b.envelope.half().max(a.envelope.half());
                let mut eb = b.envelope.padded(half);
                eb.scale(b.phase);
                let mut ea = a.envelope.padded(half);
                ea.scale(a.phase);
                for (x, y) in eb.samples_mut().iter_mut().zip(ea.samples()) {
                    *x += y;
                }
                b.envelope = eb;
                b.phase = Complex64::new(1.0, 0.0);
                b.support_radius = b.support_radius.max(a.support_radius);
            } else {
                out.push(a.clone());
            }
        }
        AtomField {
            dim: self.dim,
            atoms: out,
            tails: self.tails.clone(),
            real: self.real,
        }
    }

    /// Every atom has a mirror partner (carrier negated, envelope reflected
    /// and conjugated, phase conjugated) up to `tol` relative.
    pub fn check_conjugate_pairs(&self, tol: f64) -> bool {
        let scale = self
            .atoms
            .iter()
            .map(|a| a.envelope.max_abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.atoms.iter().all(|a| {
            let m = a.mirror();
            self.atoms.iter().any(|b| {
                b.shift == m.shift
                    && b.envelope.half() == m.envelope.half()
                    && b.carrier
                        .add(&a.carrier)
                        .value()
                        .iter()
                        .all(|x| x.abs() <= 1e-9 * (1.0 + a.carrier.norm()))
                    && b.envelope
                        .samples()
                        .iter()
                        .zip(m.envelope.samples())
                        .all(|(x, y)| (b.phase * x - m.phase * y).norm() <= tol * scale)
            })
        })
    }
}

fn check_singularities(field: &AtomField, m: &Multiplier) -> Result<(), AtomError> {
    for (index, a) in field.atoms.iter().enumerate() {
        let value = a.carrier.value();
        let r = a.support_radius;
        for s in m.singularities() {
            let bad = match s {
                Singularity::Hyperplane(axis) => value[*axis].abs() <= r,
                Singularity::Origin => {
                    let norm = a.carrier.norm();
                    if norm > r {
                        false
                    } else {
                        // allowed only when the origin is itself a lattice sample
                        let h = a.spacing();
                        !value.iter().all(|c| {
                            let q = c / h;
                            (q - q.round()).abs() < 1e-9
                        })
                    }
                }
            };
            if bad {
                return Err(AtomError::SingularSymbol {
                    symbol: m.label().to_string(),
                    index,
                    carrier: value,
                    radius: r,
                });
            }
        }
    }
    Ok(())
}

fn multiply_envelope(a: &Atom, info: &CarrierInfo, m: &Multiplier) -> Envelope {
    multiply_samples(&a.envelope, info, m)
}

/// Envelope samples times `m(carrier + η)`.
pub(crate) fn multiply_samples(
    envelope: &Envelope,
    info: &CarrierInfo,
    m: &Multiplier,
) -> Envelope {
    let mut env = envelope.clone();
    let mut eta = vec![0.0; env.dim()];
    for i in 0..env.len() {
        if env.samples()[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        env.eta_into(i, &mut eta);
        let v = m.eval(&FreqPoint { info, eta: &eta });
        env.samples_mut()[i] *= v;
    }
    env
}

/// Sampled maximum of `|m|` over a support ball, used to carry tail
/// allowances through a multiplier.
pub(crate) fn ball_symbol_max(carrier: &Carrier, radius: f64, m: &Multiplier) -> f64 {
    let info = CarrierInfo::new(carrier);
    let n = carrier.dim();
    let ticks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut best = 0.0f64;
    let total = ticks.len().pow(n as u32);
    let mut eta = vec![0.0; n];
    for idx in 0..total {
        let mut r = idx;
        for e in eta.iter_mut() {
            *e = ticks[r % ticks.len()] * radius;
            r /= ticks.len();
        }
        if eta.iter().map(|x| x * x).sum::<f64>() > radius * radius {
            continue;
        }
        best = best.max(
            m.eval(&FreqPoint {
                info: &info,
                eta: &eta,
            })
            .norm(),
        );
    }
    best
}

pub fn apply_symbol(field: &AtomField, m: &Multiplier) -> Result<AtomField, AtomError> {
    check_singularities(field, m)?;
    let atoms = field
        .atoms
        .iter()
        .map(|a| {
            let info = CarrierInfo::new(&a.carrier);
            Atom {
                envelope: multiply_envelope(a, &info, m),
                ..a.clone()
            }
        })
        .collect();
    let tails = field
        .tails
        .iter()
        .map(|t| TailBound {
            constant: t.constant * ball_symbol_max(&t.carrier, t.support_radius, m),
            ..t.clone()
        })
        .collect();
    Ok(AtomField {
        dim: field.dim,
        atoms,
        tails,
        real: field.real,
    })
}

pub fn heat_flow(field: &AtomField, t: f64) -> Result<AtomField, AtomError> {
    if t < 0.0 {
        return Err(AtomError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let m = Multiplier::heat(t);
    let atoms = field
        .atoms
        .iter()
        .map(|a| {
            let info = CarrierInfo::new(&a.carrier);
            Atom {
                envelope: multiply_envelope(a, &info, &m),
                ..a.clone()
            }
        })
        .collect();
    // the heat semigroup is an L∞ contraction, tails carry over unchanged
    Ok(AtomField {
        dim: field.dim,
        atoms,
        tails: field.tails.clone(),
        real: field.real,
    })
}

pub fn dyadic_block(field: &AtomField, j: i32, cutoffs: &CutoffProfile) -> DyadicBlock {
    let phi = cutoffs.phi_j_multiplier(j);
    let mut atoms = Vec::new();
    let mut atom_classes = Vec::with_capacity(field.atoms.len());
    for a in &field.atoms {
        let info = CarrierInfo::new(&a.carrier);
        let class = classify_ball(info.norm_sq.sqrt(), a.support_radius, j, cutoffs);
        atom_classes.push(class);
        match class {
            BlockClass::Dropped => {}
            BlockClass::Passed => atoms.push(a.clone()),
            BlockClass::Multiplied => {
                let env = multiply_envelope(a, &info, &phi);
                if !env.is_zero() {
                    atoms.push(Atom {
                        envelope: env,
                        ..a.clone()
                    });
                }
            }
        }
    }
    let mut tails = Vec::new();
    let mut tail_classes = Vec::with_capacity(field.tails.len());
    for t in &field.tails {
        let class = classify_ball(t.carrier.norm(), t.support_radius, j, cutoffs);
        tail_classes.push(class);
        match class {
            BlockClass::Dropped => {}
            BlockClass::Passed => tails.push(t.clone()),
            BlockClass::Multiplied => tails.push(TailBound {
                constant: t.constant * cutoffs.phi_kernel_l1(field.dim),
                ..t.clone()
            }),
        }
    }
    DyadicBlock {
        field: AtomField {
            dim: field.dim,
            atoms,
            tails,
            real: field.real,
        },
        atom_classes,
        tail_classes,
    }
}

impl AtomVectorField {
    pub fn dim(&self) -> usize {
        self.components.first().map(|c| c.dim).unwrap_or(0)
    }

    pub fn apply_symbol(&self, m: &Multiplier) -> Result<AtomVectorField, AtomError> {
        Ok(AtomVectorField {
            components: self
                .components
                .iter()
                .map(|c| apply_symbol(c, m))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Largest `|ξ·F̂(ξ)| / |F̂(ξ)|`-type residual over envelope samples,
    /// relative to the largest sample. Components must share atom layout.
    pub fn divergence_residual(&self) -> f64 {
        let first = match self.components.first() {
            Some(c) => c,
            None => return 0.0,
        };
        let mut worst = 0.0f64;
        for (i, a0) in first.atoms.iter().enumerate() {
            let info = CarrierInfo::new(&a0.carrier);
            let mut eta = vec![0.0; a0.dim()];
            let mut scale = 0.0f64;
            for c in &self.components {
                scale = scale.max(c.atoms[i].envelope.max_abs());
            }
            if scale == 0.0 {
                continue;
            }
            for s in 0..a0.envelope.len() {
                a0.envelope.eta_into(s, &mut eta);
                let p = FreqPoint {
                    info: &info,
                    eta: &eta,
                };
                let mut div = Complex64::new(0.0, 0.0);
                let mut mag = 0.0f64;
                for (d, c) in self.components.iter().enumerate() {
                    let z = c.atoms[i].phase * c.atoms[i].envelope.samples()[s];
                    div += p.xi(d) * z;
                    mag += p.xi(d).abs() * z.norm();
                }
                if mag > 0.0 {
                    worst = worst.max(div.norm() / mag.max(scale * p.norm_sq().sqrt()));
                }
            }
        }
        worst
    }
}

/// `(2π)^{-n} ∫ g`, the value at the origin of the continuous inverse transform.
pub fn origin_value_weight(dim: usize) -> f64 {
    TAU.powi(-(dim as i32))
}
