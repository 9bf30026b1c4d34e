use super::data::{AtomTag, InitialData};
use super::InflationError;
use crate::spectral_atoms::{atom_product, AtomField, ProductOutcome, ProductPolicy};
use std::collections::BTreeMap;
use std::fmt;

/// Interaction families of `u⁰₁u⁰₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `λ = λ' = +`, `μ = μ'`: carrier near `2c_k`.
    U1,
    /// `λ = λ' = -`, `μ = μ'`: carrier near `-2c_k`.
    U2,
    /// `λ = λ'`, `μ ≠ μ'`.
    U3,
    /// `λ ≠ λ'`, `μ ≠ μ'`: carrier `±(b_l - b_m)`.
    U4,
    /// `λ ≠ λ'`, `μ = μ'`, `l = m`: carrier `±a_l`.
    U51,
    /// `λ ≠ λ'`, `μ = μ'`, `l ≠ m`.
    U52,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::U1,
        Family::U2,
        Family::U3,
        Family::U4,
        Family::U51,
        Family::U52,
    ];

    pub fn classify(a: &AtomTag, b: &AtomTag) -> Family {
        match (a.lambda == b.lambda, a.mu == b.mu) {
            (true, true) if a.lambda > 0 => Family::U1,
            (true, true) => Family::U2,
            (true, false) => Family::U3,
            (false, false) => Family::U4,
            (false, true) if a.l == b.l => Family::U51,
            (false, true) => Family::U52,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug)]
pub struct FamilyProducts {
    /// Unordered atom index pairs `(i ≤ j)`.
    pub pairs: Vec<(usize, usize)>,
    /// `Σ` over pairs of `w·Φ_iΦ_j` with `w = 2` off the diagonal.
    pub field: AtomField,
}

#[derive(Clone, Debug)]
pub struct InteractionLedger {
    pub families: BTreeMap<Family, FamilyProducts>,
    /// Ordered pairs accounted for; equals `(4|ℕ_k|)²`.
    pub ordered_pairs: usize,
}

impl InteractionLedger {
    pub fn family(&self, f: Family) -> &AtomField {
        &self.families[&f].field
    }

    /// `U₁+…+U₄`, everything that must vanish on the shells `ℕ_k`.
    pub fn excluded(&self) -> AtomField {
        let mut out = AtomField::zero(self.total().dim);
        for f in [Family::U1, Family::U2, Family::U3, Family::U4] {
            out = out.add(self.family(f));
        }
        out
    }

    pub fn u5(&self) -> AtomField {
        self.family(Family::U51).add(self.family(Family::U52))
    }

    pub fn total(&self) -> AtomField {
        let mut it = self.families.values();
        let mut out = it
            .next()
            .map(|f| f.field.clone())
            .unwrap_or_else(|| AtomField::zero(0));
        for f in it {
            out = out.add(&f.field);
        }
        out
    }
}

/// Carrier bookkeeping: where the family says the product lives.
fn check_location(
    fam: Family,
    a: &AtomTag,
    b: &AtomTag,
    carrier: &[f64],
    radius: f64,
    data: &InitialData,
) -> bool {
    let g = &data.geometry;
    let k = data.params.k;
    let ck = 2f64.powi(k);
    let dist = |target: &[f64]| {
        carrier
            .iter()
            .zip(target)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let bl = |t: &AtomTag| -> Vec<f64> {
        let i = g
            .shells
            .iter()
            .position(|l| *l == t.l)
            .expect("tag shell in geometry");
        g.b[i].iter().map(|x| t.mu as f64 * x).collect()
    };
    let bsum: Vec<f64> = bl(a).iter().zip(bl(b)).map(|(x, y)| x + y).collect();
    let tol = 1e-9 * (1.0 + ck);
    match fam {
        Family::U1 | Family::U2 | Family::U3 => {
            let s = a.lambda as f64 * 2.0;
            let centre: Vec<f64> = g.c_k.iter().map(|x| s * x).collect();
            dist(&centre) + radius <= 2f64.powf(2.0 + k as f64 / 2.0)
        }
        Family::U4 | Family::U51 | Family::U52 => dist(&bsum) <= tol,
    }
}

/// Classify and multiply all pairs of `u⁰₁`'s atoms. Products are formed per
/// unordered pair with weight 2 off the diagonal; the ordered count is kept.
pub fn interaction_ledger(
    data: &InitialData,
    policy: &ProductPolicy,
) -> Result<InteractionLedger, InflationError> {
    let u1 = data.u1();
    let n = u1.dim;
    let mut families: BTreeMap<Family, FamilyProducts> = Family::ALL
        .iter()
        .map(|f| {
            (
                *f,
                FamilyProducts {
                    pairs: Vec::new(),
                    field: AtomField::zero(n),
                },
            )
        })
        .collect();
    let mut ordered = 0usize;
    for i in 0..u1.atoms.len() {
        for j in i..u1.atoms.len() {
            let (ta, tb) = (&data.tags[i], &data.tags[j]);
            let fam = Family::classify(ta, tb);
            let w = if i == j { 1.0 } else { 2.0 };
            ordered += if i == j { 1 } else { 2 };
            let out = atom_product(&u1.atoms[i], &u1.atoms[j], policy)?;
            let (carrier, radius) = match &out {
                ProductOutcome::Exact(a) => (a.carrier.value(), a.support_radius),
                ProductOutcome::Tail(t) => (t.carrier.value(), t.support_radius),
            };
            if !check_location(fam, ta, tb, &carrier, radius, data) {
                return Err(InflationError::Unclassifiable {
                    pair: (ta.label(), tb.label()),
                    carriers: (u1.atoms[i].carrier.value(), u1.atoms[j].carrier.value()),
                });
            }
            let entry = families.get_mut(&fam).expect("all families present");
            entry.pairs.push((i, j));
            let piece = match out {
                ProductOutcome::Exact(a) => AtomField::from_atoms(n, vec![a], false),
                ProductOutcome::Tail(t) => AtomField {
                    dim: n,
                    atoms: vec![],
                    tails: vec![t],
                    real: false,
                },
            };
            entry.field = entry.field.add(&piece.scaled(w));
        }
    }
    Ok(InteractionLedger {
        families,
        ordered_pairs: ordered,
    })
}
